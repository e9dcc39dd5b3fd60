#ifndef TROIKA_METRICS_HPP
#define TROIKA_METRICS_HPP

#include "troika/types.hpp"

namespace troika {

/// Per-window estimate with provenance.
struct HrEstimate {
    int window_index = 0;
    double t_start_s = 0.0;
    double bpm_est = 0.0;
    std::optional<double> bpm_true;
    int selection_case = 0;  // 0 on the initialization window
    bool rule1_fired = false;
    bool rule2_fired = false;
};

struct AgreementSummary {
    double error1_bpm = 0.0;
    double error2 = 0.0;  // ratio; reported x100 as percent
    double mu = 0.0;
    double sigma_bpm = 0.0;
    double loa_low = 0.0;
    double loa_high = 0.0;
    std::optional<double> pearson_r;  // absent when a series is constant
    std::size_t n_windows = 0;
};

/// Sample indexes of detected R-peaks (5-15 Hz bandpass, squared
/// derivative, 0.5 x rolling-max threshold over 2 s, 0.25 s refractory).
std::vector<long> detect_r_peaks(const Signal& ecg, double fs);

/// 60 H / D from the cardiac cycle count H and the first-to-last peak span
/// D. Fewer than two peaks leave the window without ground truth.
std::optional<double> ecg_ground_truth(const Signal& ecg_window, double fs);

/// Mean absolute error (BPM).
double error1(const std::vector<double>& estimates, const std::vector<double>& truths);

/// Mean absolute relative error (ratio, not percent).
double error2(const std::vector<double>& estimates, const std::vector<double>& truths);

struct BlandAltman {
    double mu = 0.0;
    double sigma = 0.0;  // sample standard deviation of the differences
    double loa_low = 0.0;
    double loa_high = 0.0;
    std::vector<std::pair<double, double>> points;  // (mean, difference)
};

BlandAltman bland_altman(const std::vector<double>& estimates,
                         const std::vector<double>& truths);

double pearson(const std::vector<double>& estimates, const std::vector<double>& truths);

/// All four measures over paired estimate/truth series.
AgreementSummary summarize(const std::vector<double>& estimates,
                           const std::vector<double>& truths);

}  // namespace troika

#endif
