#include "troika/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>

#include <nlohmann/json.hpp>

#include "troika/ingest.hpp"
#include "troika/preprocess.hpp"
#include "troika/ssa.hpp"
#include "troika/ssr.hpp"

namespace troika {

using nlohmann::json;

void RunConfig::validate() const {
    if (fs <= 0.0 || window_sec <= 0.0 || step_sec <= 0.0 || ssa_embed <= 0 ||
        guard_bins < 0 || n_bins <= 0 || focuss_p <= 0.0 || focuss_lambda < 0.0 ||
        focuss_iters <= 0 || search_halfwidth <= 0 || peak_eta_ratio < 0.0 ||
        verify_theta <= 0 || verify_tau <= 0 || stall_windows <= 0 || filter_taps < 3)
        throw ParamError("RunConfig: all numeric parameters must be positive");
    const double m = fs * window_sec;
    if (std::abs(m - std::round(m)) > 1e-9)
        throw ParamError("RunConfig: fs * window_sec must be an integer sample count");
    if (step_sec > window_sec)
        throw ParamError("RunConfig: step S must not exceed window T");
}

TrackerParams RunConfig::tracker_params() const {
    TrackerParams p;
    p.delta_s_base = search_halfwidth;
    p.delta_s_wide = search_halfwidth + 4;
    p.eta_ratio = peak_eta_ratio;
    p.theta = verify_theta;
    p.tau = verify_tau;
    p.h = stall_windows;
    return p;
}

RecordingResult run_recording(const Recording& rec, const RunConfig& config,
                              const std::map<int, double>* bpm_truth) {
    config.validate();
    if (rec.fs != config.fs)
        throw ParamError("run_recording: recording fs does not match config");

    FilterSpec filt;
    filt.low_cut_hz = config.filter_low_hz;
    filt.high_cut_hz = config.filter_high_hz;
    filt.taps = config.filter_taps;
    filt.fs = config.fs;

    // whole-recording filtering, then windowing; ECG stays raw for truth
    Recording filtered = rec;
    filtered.ppg = bandpass(rec.ppg, filt);
    filtered.acc_x = bandpass(rec.acc_x, filt);
    filtered.acc_y = bandpass(rec.acc_y, filt);
    filtered.acc_z = bandpass(rec.acc_z, filt);

    const auto wins = windows(filtered, config.window_sec, config.step_sec);
    const int m_rows = static_cast<int>(wins.front().ppg.size()) - 2;
    const Dictionary dict(m_rows, config.n_bins, config.fs);
    const FocussParams fp{config.focuss_p, config.focuss_lambda, config.focuss_iters};
    const TrackerParams tp = config.tracker_params();

    RecordingResult result;
    result.name = rec.subject_id;
    result.estimates.reserve(wins.size());

    std::optional<TrackerState> tracker;
    for (const Window& w : wins) {
        std::optional<int> n_prev;
        if (tracker) n_prev = tracker->n_prev;

        Signal cleansed;
        if (config.skip_ssa) {
            cleansed = w.ppg;
        } else {
            try {
                cleansed = cleanse(w.ppg, w.acc_x, w.acc_y, w.acc_z, n_prev,
                                   config.ssa_embed, config.guard_bins, config.n_bins)
                               .series;
            } catch (const DegenerateInput&) {
                cleansed = w.ppg;  // all-zero window: nothing to remove
            }
        }
        const Signal diffed = second_difference(cleansed);

        Spectrum spec;
        if (config.use_periodogram) {
            spec = periodogram(diffed, config.n_bins, config.fs);
        } else {
            try {
                spec = focuss_spectrum(diffed, dict, fp);
            } catch (const NumericError& e) {
                throw NumericError(std::string(e.what()) + " (window " +
                                   std::to_string(w.index) + ")");
            } catch (const DegenerateInput&) {
                spec = periodogram(diffed, config.n_bins, config.fs);
            }
        }

        HrEstimate est;
        est.window_index = w.index;
        est.t_start_s = w.start_sample / config.fs;
        if (!tracker) {
            tracker = initialize(spec, tp, config.init_harmonic_check);
            est.bpm_est = tracker->bpm_history.front();
            est.selection_case = 0;
        } else {
            const StepResult r = step(spec, *tracker, tp, config.skip_verify);
            est.bpm_est = r.bpm;
            est.selection_case = r.selection_case;
            est.rule1_fired = r.rule1_fired;
            est.rule2_fired = r.rule2_fired;
        }

        if (bpm_truth) {
            auto it = bpm_truth->find(w.index);
            if (it != bpm_truth->end()) est.bpm_true = it->second;
        } else if (w.ecg) {
            est.bpm_true = ecg_ground_truth(*w.ecg, config.fs);
        }
        result.estimates.push_back(std::move(est));
    }

    std::vector<double> e, t;
    for (const HrEstimate& est : result.estimates) {
        if (est.bpm_true) {
            e.push_back(est.bpm_est);
            t.push_back(*est.bpm_true);
        }
    }
    if (e.size() >= 2) result.summary = summarize(e, t);
    return result;
}

std::optional<AgreementSummary> aggregate_results(const std::vector<RecordingResult>& recs) {
    std::vector<double> pool_e, pool_t;
    double err1_sum = 0.0, err2_sum = 0.0;
    int counted = 0;
    for (const RecordingResult& r : recs) {
        if (!r.summary) continue;
        err1_sum += r.summary->error1_bpm;
        err2_sum += r.summary->error2;
        ++counted;
        for (const HrEstimate& est : r.estimates) {
            if (est.bpm_true) {
                pool_e.push_back(est.bpm_est);
                pool_t.push_back(*est.bpm_true);
            }
        }
    }
    if (counted == 0 || pool_e.size() < 2) return std::nullopt;
    AgreementSummary s;
    s.n_windows = pool_e.size();
    s.error1_bpm = err1_sum / counted;
    s.error2 = err2_sum / counted;
    const BlandAltman ba = bland_altman(pool_e, pool_t);
    s.mu = ba.mu;
    s.sigma_bpm = ba.sigma;
    s.loa_low = ba.loa_low;
    s.loa_high = ba.loa_high;
    try {
        s.pearson_r = pearson(pool_e, pool_t);
    } catch (const DegenerateInput&) {
        s.pearson_r.reset();
    }
    return s;
}

DirectoryResult run_directory(const std::filesystem::path& input_dir,
                              const std::filesystem::path& output_dir,
                              const RunConfig& config) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(input_dir))
        throw ParamError("run_directory: " + input_dir.string() + " is not a directory");

    std::vector<fs::path> inputs;
    for (const auto& entry : fs::directory_iterator(input_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
        if (entry.path().stem().string().ends_with("_bpm_truth")) continue;
        inputs.push_back(entry.path());
    }
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty())
        throw ParamError("run_directory: no recording CSV files in " + input_dir.string());
    fs::create_directories(output_dir);

    const int jobs = std::max(1, config.jobs);
    DirectoryResult out;
    out.recordings.resize(inputs.size());
    std::vector<std::optional<std::string>> errors(inputs.size());

    auto process = [&](std::size_t i) {
        try {
            const Recording rec = load_recording(inputs[i], config.fs);
            const fs::path truth_path =
                inputs[i].parent_path() / (inputs[i].stem().string() + "_bpm_truth.csv");
            std::map<int, double> truth;
            const bool have_truth = fs::exists(truth_path);
            if (have_truth) truth = load_bpm_truth(truth_path);
            out.recordings[i] =
                run_recording(rec, config, have_truth ? &truth : nullptr);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };

    if (jobs == 1) {
        for (std::size_t i = 0; i < inputs.size(); ++i) process(i);
    } else {
        std::vector<std::future<void>> futs;
        std::atomic<std::size_t> next{0};
        for (int j = 0; j < jobs; ++j) {
            futs.push_back(std::async(std::launch::async, [&] {
                for (std::size_t i = next++; i < inputs.size(); i = next++) process(i);
            }));
        }
        for (auto& f : futs) f.get();
    }

    // drop failures (error order follows the sorted input order)
    std::vector<RecordingResult> ok;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (errors[i]) {
            out.failures.emplace_back(inputs[i].filename().string(), *errors[i]);
        } else {
            ok.push_back(std::move(out.recordings[i]));
        }
    }
    out.recordings = std::move(ok);

    for (const RecordingResult& r : out.recordings) {
        write_trace_csv(r, output_dir / (r.name + "_trace.csv"));
        write_metrics_json(r, output_dir / (r.name + "_metrics.json"));
    }
    out.aggregate = aggregate_results(out.recordings);
    write_aggregate_json(out, output_dir / "aggregate_metrics.json");
    return out;
}

void write_trace_csv(const RecordingResult& result, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot write " + path.string());
    f << "window_index,t_start_s,bpm_est,bpm_true,abs_err,case,rule1_fired,rule2_fired\n";
    char buf[256];
    for (const HrEstimate& e : result.estimates) {
        std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,", e.window_index, e.t_start_s,
                      e.bpm_est);
        f << buf;
        if (e.bpm_true) {
            std::snprintf(buf, sizeof buf, "%.10g,%.10g,", *e.bpm_true,
                          std::abs(e.bpm_est - *e.bpm_true));
            f << buf;
        } else {
            f << ",,";
        }
        f << e.selection_case << ',' << (e.rule1_fired ? 1 : 0) << ','
          << (e.rule2_fired ? 1 : 0) << '\n';
    }
}

namespace {

json summary_json(const std::optional<AgreementSummary>& s, std::size_t n_windows) {
    json j;
    j["n_windows"] = n_windows;
    if (s) {
        j["error1_bpm"] = s->error1_bpm;
        j["error2_pct"] = s->error2 * 100.0;
        j["loa_low"] = s->loa_low;
        j["loa_high"] = s->loa_high;
        j["sigma_bpm"] = s->sigma_bpm;
        if (s->pearson_r)
            j["pearson_r"] = *s->pearson_r;
        else
            j["pearson_r"] = nullptr;
    } else {
        for (const char* k :
             {"error1_bpm", "error2_pct", "loa_low", "loa_high", "sigma_bpm", "pearson_r"})
            j[k] = nullptr;
    }
    return j;
}

void dump_json(const json& j, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot write " + path.string());
    f << j.dump(2) << '\n';
}

}  // namespace

void write_metrics_json(const RecordingResult& result, const std::filesystem::path& path) {
    json j = summary_json(result.summary, result.estimates.size());
    j["recording"] = result.name;
    dump_json(j, path);
}

void write_aggregate_json(const DirectoryResult& result, const std::filesystem::path& path) {
    std::size_t total = 0;
    for (const auto& r : result.recordings) total += r.estimates.size();
    json j = summary_json(result.aggregate,
                          result.aggregate ? result.aggregate->n_windows : total);
    json recs = json::object();
    for (const auto& r : result.recordings)
        recs[r.name] = summary_json(r.summary, r.estimates.size());
    j["recordings"] = recs;
    if (!result.failures.empty()) {
        json fails = json::object();
        for (const auto& [file, err] : result.failures) fails[file] = err;
        j["failures"] = fails;
    }
    dump_json(j, path);
}

}  // namespace troika
