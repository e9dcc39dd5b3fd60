#ifndef TROIKA_TRACKER_HPP
#define TROIKA_TRACKER_HPP

#include "troika/ssr.hpp"
#include "troika/types.hpp"

namespace troika {

struct TrackerParams {
    int delta_s_base = 16;   // search half-width (bins)
    int delta_s_wide = 20;   // widened half-width during stalls
    double eta_ratio = 0.3;  // candidate threshold vs max amplitude in R0
    int theta = 6;           // max bin jump before clamping
    int tau = 2;             // clamped step size
    int h = 3;               // consecutive hold-previous windows before a nudge
    int harmonic_tol = 3;    // |N_j^1 - (2(N_i^0 - 1) + 1)| for a valid pair
    double init_lo_bpm = 42.0;
    double init_hi_bpm = 180.0;
};

struct TrackerState {
    int n_prev = 0;                   // bin of the last accepted estimate
    std::vector<double> bpm_history;  // accepted BPM estimates, oldest first
    int stall_count = 0;              // consecutive hold-previous selections
    int delta_s = 16;
    int n_trend = 0;  // -1 | 0 | +1
    int n_bins = 0;
    double fs = 0.0;
};

struct Peak {
    int bin = 0;
    double amplitude = 0.0;
};

/// Up to three highest qualifying peaks in the fundamental and harmonic
/// search ranges.
struct PeakCandidates {
    std::vector<Peak> fundamental;
    std::vector<Peak> harmonic;
};

struct StepResult {
    int bin = 0;
    double bpm = 0.0;
    int selection_case = 0;  // 1 harmonic pair, 2 nearest to previous, 3 hold
    bool rule1_fired = false;
    bool rule2_fired = false;
};

/// Lock onto the highest peak between init_lo_bpm and init_hi_bpm.
/// With harmonic_check, a credible peak at the subharmonic of the argmax is
/// preferred (for recordings that lack a rest period).
TrackerState initialize(const Spectrum& spectrum, const TrackerParams& params = {},
                        bool harmonic_check = false);

/// Local maxima in R0 = n_prev +- delta_s and the doubled range R1, with
/// amplitude at least eta_ratio times the highest value in R0, top 3 each.
PeakCandidates select_candidates(const Spectrum& spectrum, const TrackerState& state,
                                 const TrackerParams& params = {});

/// Case 1: a (fundamental, harmonic) pair in harmonic relation -> fundamental.
/// Case 2: candidate (harmonics mapped to half frequency) nearest to n_prev.
/// Case 3: no candidates -> hold n_prev.
std::pair<int, int> select_peak(const PeakCandidates& cands, const TrackerState& state,
                                const TrackerParams& params = {});

/// Rule 1 clamps jumps of theta bins or more to +-tau. Rule 2 replaces the
/// h-th consecutive hold with a trend nudge of +-2 bins and widens delta_s.
/// Returns the accepted bin and updates delta_s in state.
struct VerifyResult {
    int n_cur = 0;
    bool rule1_fired = false;
    bool rule2_fired = false;
};
VerifyResult verify(int n_hat, int selection_case, TrackerState& state,
                    const TrackerParams& params = {});

/// Cubic least-squares fit over the last (up to) 20 history points,
/// extrapolated one window ahead; +-3 BPM against the last estimate decides
/// the direction. Fewer than 4 points give 0.
int update_trend(const TrackerState& state);

/// One tracking step: candidates -> selection -> trend -> verification;
/// appends the accepted BPM to the history.
StepResult step(const Spectrum& spectrum, TrackerState& state,
                const TrackerParams& params = {}, bool skip_verify = false);

}  // namespace troika

#endif
