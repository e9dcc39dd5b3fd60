#include "troika/tracker.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace troika {

namespace {

// local maxima of s in [lo, hi] (1-based bins, clipped to the physical band)
std::vector<Peak> local_maxima(const Spectrum& s, int lo, int hi) {
    lo = std::max(lo, 2);
    hi = std::min(hi, s.n_bins / 2 + 1);
    std::vector<Peak> out;
    for (int b = lo; b <= hi; ++b) {
        const double v = s.at(b);
        if (v <= 0.0) continue;
        const double left = b >= 2 ? s.at(b - 1) : 0.0;
        const double right = b < s.n_bins ? s.at(b + 1) : 0.0;
        if (v > left && v >= right) out.push_back({b, v});
    }
    return out;
}

void keep_top3(std::vector<Peak>& peaks) {
    std::stable_sort(peaks.begin(), peaks.end(),
                     [](const Peak& a, const Peak& b) { return a.amplitude > b.amplitude; });
    if (peaks.size() > 3) peaks.resize(3);
}

}  // namespace

TrackerState initialize(const Spectrum& spectrum, const TrackerParams& params,
                        bool harmonic_check) {
    const int lo = static_cast<int>(std::ceil(params.init_lo_bpm / 60.0 *
                                              spectrum.n_bins / spectrum.fs)) + 1;
    const int hi = static_cast<int>(std::floor(params.init_hi_bpm / 60.0 *
                                               spectrum.n_bins / spectrum.fs)) + 1;
    int best = 0;
    double best_v = 0.0;
    for (int b = std::max(lo, 1); b <= std::min(hi, spectrum.n_bins); ++b) {
        if (spectrum.at(b) > best_v) {
            best_v = spectrum.at(b);
            best = b;
        }
    }
    if (best == 0)
        throw DegenerateInput("initialize: spectrum has no energy in the HR band");

    if (harmonic_check) {
        // prefer a credible subharmonic peak: the argmax may be the first
        // harmonic when the recording starts mid-motion
        const int sub = static_cast<int>(std::lround((best - 1) / 2.0)) + 1;
        int sub_best = 0;
        double sub_v = 0.0;
        for (int b = std::max(sub - 3, 2); b <= std::min(sub + 3, spectrum.n_bins - 1); ++b) {
            const double v = spectrum.at(b);
            if (v > sub_v && v > spectrum.at(b - 1) && v >= spectrum.at(b + 1)) {
                sub_v = v;
                sub_best = b;
            }
        }
        if (sub_best >= lo && sub_v >= 0.25 * best_v) best = sub_best;
    }

    TrackerState st;
    st.n_prev = best;
    st.n_bins = spectrum.n_bins;
    st.fs = spectrum.fs;
    st.delta_s = params.delta_s_base;
    st.bpm_history.push_back(bin_to_bpm(best, spectrum.n_bins, spectrum.fs));
    return st;
}

PeakCandidates select_candidates(const Spectrum& spectrum, const TrackerState& state,
                                 const TrackerParams& params) {
    if (state.n_prev <= 0) throw ParamError("select_candidates: uninitialized state");
    const int r0_lo = state.n_prev - state.delta_s;
    const int r0_hi = state.n_prev + state.delta_s;
    const int r1_lo = 2 * (r0_lo - 1) + 1;
    const int r1_hi = 2 * (r0_hi - 1) + 1;

    double r0_max = 0.0;
    for (int b = std::max(r0_lo, 1); b <= std::min(r0_hi, spectrum.n_bins); ++b)
        r0_max = std::max(r0_max, spectrum.at(b));
    const double eta = params.eta_ratio * r0_max;

    PeakCandidates c;
    for (const Peak& p : local_maxima(spectrum, r0_lo, r0_hi))
        if (p.amplitude >= eta) c.fundamental.push_back(p);
    for (const Peak& p : local_maxima(spectrum, r1_lo, r1_hi))
        if (p.amplitude >= eta) c.harmonic.push_back(p);
    keep_top3(c.fundamental);
    keep_top3(c.harmonic);
    return c;
}

std::pair<int, int> select_peak(const PeakCandidates& cands, const TrackerState& state,
                                const TrackerParams& params) {
    if (state.n_prev <= 0) throw ParamError("select_peak: uninitialized state");

    // Case 1: harmonic pair; several pairs tie-break on fundamental amplitude
    const Peak* best_fund = nullptr;
    for (const Peak& f : cands.fundamental) {
        const int expected = 2 * (f.bin - 1) + 1;
        for (const Peak& h : cands.harmonic) {
            if (std::abs(h.bin - expected) <= params.harmonic_tol) {
                if (!best_fund || f.amplitude > best_fund->amplitude) best_fund = &f;
                break;
            }
        }
    }
    if (best_fund) return {best_fund->bin, 1};

    // Case 2: nearest to previous among fundamentals and halved harmonics
    struct Cand {
        int bin;
        double amp;
    };
    std::vector<Cand> pool;
    for (const Peak& f : cands.fundamental) pool.push_back({f.bin, f.amplitude});
    for (const Peak& h : cands.harmonic) {
        const int mapped = static_cast<int>(std::lround((h.bin - 1) / 2.0)) + 1;
        pool.push_back({mapped, h.amplitude});
    }
    if (!pool.empty()) {
        const Cand* best = &pool.front();
        for (const Cand& c : pool) {
            const int dc = std::abs(c.bin - state.n_prev);
            const int db = std::abs(best->bin - state.n_prev);
            if (dc < db || (dc == db && c.amp > best->amp) ||
                (dc == db && c.amp == best->amp && c.bin < best->bin))
                best = &c;
        }
        return {best->bin, 2};
    }

    // Case 3: hold
    return {state.n_prev, 3};
}

int update_trend(const TrackerState& state) {
    const auto& h = state.bpm_history;
    if (h.size() < 4) return 0;
    const int n = static_cast<int>(std::min<std::size_t>(h.size(), 20));
    const double* tail = h.data() + (h.size() - n);

    Eigen::MatrixXd vand(n, 4);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        const double t = i + 1;
        vand(i, 0) = 1.0;
        vand(i, 1) = t;
        vand(i, 2) = t * t;
        vand(i, 3) = t * t * t;
        rhs(i) = tail[i];
    }
    const Eigen::VectorXd coef = vand.colPivHouseholderQr().solve(rhs);
    const double t = n + 1;
    const double predict = coef(0) + coef(1) * t + coef(2) * t * t + coef(3) * t * t * t;
    const double d = predict - h.back();
    if (d >= 3.0) return 1;
    if (d <= -3.0) return -1;
    return 0;
}

VerifyResult verify(int n_hat, int selection_case, TrackerState& state,
                    const TrackerParams& params) {
    if (state.n_prev <= 0) throw ParamError("verify: uninitialized state");
    VerifyResult res;

    const int diff = n_hat - state.n_prev;
    if (diff >= params.theta) {
        res.n_cur = state.n_prev + params.tau;
        res.rule1_fired = true;
    } else if (diff <= -params.theta) {
        res.n_cur = state.n_prev - params.tau;
        res.rule1_fired = true;
    } else {
        res.n_cur = n_hat;
    }

    if (selection_case == 3 && state.stall_count >= params.h) {
        res.n_cur = state.n_prev + 2 * state.n_trend;
        res.rule2_fired = true;
        state.delta_s = params.delta_s_wide;
    } else if (selection_case != 3) {
        state.delta_s = params.delta_s_base;
    }

    res.n_cur = std::clamp(res.n_cur, 2, state.n_bins / 2 + 1);
    return res;
}

StepResult step(const Spectrum& spectrum, TrackerState& state,
                const TrackerParams& params, bool skip_verify) {
    if (state.n_prev <= 0) throw ParamError("step: uninitialized state");
    if (spectrum.n_bins != state.n_bins)
        throw ParamError("step: spectrum grid does not match tracker state");

    const PeakCandidates cands = select_candidates(spectrum, state, params);
    const auto [n_hat, sel_case] = select_peak(cands, state, params);

    if (sel_case == 3)
        ++state.stall_count;
    else
        state.stall_count = 0;

    state.n_trend = update_trend(state);

    StepResult out;
    out.selection_case = sel_case;
    if (skip_verify) {
        out.bin = std::clamp(n_hat, 2, state.n_bins / 2 + 1);
    } else {
        const VerifyResult v = verify(n_hat, sel_case, state, params);
        out.bin = v.n_cur;
        out.rule1_fired = v.rule1_fired;
        out.rule2_fired = v.rule2_fired;
    }
    out.bpm = bin_to_bpm(out.bin, state.n_bins, state.fs);
    state.n_prev = out.bin;
    state.bpm_history.push_back(out.bpm);
    return out;
}

}  // namespace troika
