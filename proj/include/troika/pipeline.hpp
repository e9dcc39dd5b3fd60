#ifndef TROIKA_PIPELINE_HPP
#define TROIKA_PIPELINE_HPP

#include <filesystem>
#include <map>

#include "troika/metrics.hpp"
#include "troika/tracker.hpp"
#include "troika/types.hpp"

namespace troika {

/// Every knob of the pipeline in one record. Defaults reproduce the
/// reference configuration at fs = 125 Hz.
struct RunConfig {
    double fs = 125.0;
    double window_sec = 8.0;    // T
    double step_sec = 2.0;      // S
    int ssa_embed = 400;        // L
    int guard_bins = 10;        // Delta, exclusion guard around the HR track
    int n_bins = 4096;          // N
    double focuss_p = 0.8;
    double focuss_lambda = 0.1;
    int focuss_iters = 5;
    int search_halfwidth = 16;  // Delta_s
    double peak_eta_ratio = 0.3;
    int verify_theta = 6;
    int verify_tau = 2;
    int stall_windows = 3;      // h
    double filter_low_hz = 0.4;
    double filter_high_hz = 5.0;
    int filter_taps = 251;

    bool skip_ssa = false;
    bool use_periodogram = false;
    bool skip_verify = false;
    bool init_harmonic_check = false;  // recording does not start at rest

    int jobs = 1;

    void validate() const;
    TrackerParams tracker_params() const;
};

/// Trace of one processed recording.
struct RecordingResult {
    std::string name;
    std::vector<HrEstimate> estimates;
    std::optional<AgreementSummary> summary;  // absent without ground truth
};

/// Run the full pipeline over one recording. Ground truth comes from
/// bpm_truth when given, otherwise from the ECG channel when present.
RecordingResult run_recording(const Recording& rec, const RunConfig& config,
                              const std::map<int, double>* bpm_truth = nullptr);

struct DirectoryResult {
    std::vector<RecordingResult> recordings;
    std::vector<std::pair<std::string, std::string>> failures;  // (file, error)
    std::optional<AgreementSummary> aggregate;
};

/// Process every *.csv recording in input_dir (a sibling
/// <stem>_bpm_truth.csv overrides ECG truth), writing per-recording traces
/// and metrics plus aggregate metrics into output_dir. Error1/error2
/// aggregate as the mean over recordings; Bland-Altman and Pearson pool all
/// windows.
DirectoryResult run_directory(const std::filesystem::path& input_dir,
                              const std::filesystem::path& output_dir,
                              const RunConfig& config);

void write_trace_csv(const RecordingResult& result, const std::filesystem::path& path);
void write_metrics_json(const RecordingResult& result, const std::filesystem::path& path);
void write_aggregate_json(const DirectoryResult& result, const std::filesystem::path& path);

/// Aggregate over already-computed recordings (mean error1/error2, pooled
/// Bland-Altman/Pearson over all windows with truth).
std::optional<AgreementSummary> aggregate_results(const std::vector<RecordingResult>& recs);

}  // namespace troika

#endif
