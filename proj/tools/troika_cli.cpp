#include <CLI11.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "troika/ingest.hpp"
#include "troika/pipeline.hpp"
#include "troika/preprocess.hpp"
#include "troika/ssa.hpp"
#include "troika/ssr.hpp"

namespace {

using namespace troika;

void add_config_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--fs", cfg.fs, "Sampling rate in Hz");
    cmd->add_option("--window-sec", cfg.window_sec, "Analysis window T in seconds");
    cmd->add_option("--step-sec", cfg.step_sec, "Window step S in seconds");
    cmd->add_option("--ssa-embed", cfg.ssa_embed, "SSA embedding dimension L");
    cmd->add_option("--guard-bins", cfg.guard_bins,
                    "Exclusion guard half-width (bins) around the HR track");
    cmd->add_option("--bins", cfg.n_bins, "Spectrum grid size N");
    cmd->add_option("--focuss-p", cfg.focuss_p, "FOCUSS sparsity exponent p");
    cmd->add_option("--focuss-lambda", cfg.focuss_lambda, "FOCUSS regularization");
    cmd->add_option("--focuss-iters", cfg.focuss_iters, "FOCUSS iteration count");
    cmd->add_option("--search-halfwidth", cfg.search_halfwidth,
                    "Peak search half-width (bins)");
    cmd->add_option("--peak-eta-ratio", cfg.peak_eta_ratio,
                    "Candidate threshold as a fraction of the range maximum");
    cmd->add_option("--verify-theta", cfg.verify_theta, "Max accepted bin jump");
    cmd->add_option("--verify-tau", cfg.verify_tau, "Clamped step size (bins)");
    cmd->add_option("--stall-windows", cfg.stall_windows,
                    "Hold-previous windows before a trend nudge");
    cmd->add_option("--filter-low-hz", cfg.filter_low_hz, "Bandpass low cut");
    cmd->add_option("--filter-high-hz", cfg.filter_high_hz, "Bandpass high cut");
    cmd->add_option("--filter-taps", cfg.filter_taps, "Bandpass FIR length (odd)");
    cmd->add_flag("--skip-ssa", cfg.skip_ssa, "Disable the decomposition stage");
    cmd->add_flag("--use-periodogram", cfg.use_periodogram,
                  "Replace the sparse spectrum with a plain periodogram");
    cmd->add_flag("--skip-verify", cfg.skip_verify, "Disable peak verification");
    cmd->add_flag("--init-harmonic-check", cfg.init_harmonic_check,
                  "Assume no rest period: let initialization prefer a credible "
                  "subharmonic of the strongest peak");
    cmd->add_option("--jobs", cfg.jobs, "Recordings processed in parallel");
}

void apply_jobs_env(RunConfig& cfg) {
    if (const char* env = std::getenv("TROIKA_JOBS")) {
        const int j = std::atoi(env);
        if (j > 0) cfg.jobs = j;
    }
}

int report_failures(const DirectoryResult& res) {
    for (const auto& [file, err] : res.failures)
        std::cerr << "error: " << file << ": " << err << "\n";
    if (res.recordings.empty()) {
        std::cerr << "error: all recordings failed\n";
        return 1;
    }
    return 0;
}

std::vector<std::pair<double, double>> parse_hr_trace(const std::string& text) {
    // "0:70,120:160,300:90" -> piecewise-linear (t, bpm) breakpoints
    std::vector<std::pair<double, double>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw CLI::ValidationError("--hr", "expected t:bpm pairs, got '" + item + "'");
        out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    }
    return out;
}

ArtifactTone parse_tone(const std::string& text) {
    // "f:amp" constant tone or "f0-f1:amp" sweep, frequencies in Hz
    const auto colon = text.rfind(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--tone", "expected f[:]amp, got '" + text + "'");
    ArtifactTone tone;
    tone.amplitude = std::stod(text.substr(colon + 1));
    const std::string f = text.substr(0, colon);
    const auto dash = f.find('-', 1);
    if (dash == std::string::npos) {
        tone.freq_start_hz = tone.freq_end_hz = std::stod(f);
    } else {
        tone.freq_start_hz = std::stod(f.substr(0, dash));
        tone.freq_end_hz = std::stod(f.substr(dash + 1));
    }
    return tone;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heart-rate estimation from wrist PPG under motion: SSA artifact "
                 "removal, FOCUSS sparse spectra, and verified peak tracking"};
    app.require_subcommand(1);

    // ---- run ----
    RunConfig cfg;
    std::string input_dir, output_dir;
    auto* run_cmd = app.add_subcommand("run", "Process a directory of recordings");
    run_cmd->add_option("--input", input_dir, "Directory of recording CSVs")->required();
    run_cmd->add_option("--output", output_dir, "Output directory")->required();
    add_config_flags(run_cmd, cfg);

    // ---- synth ----
    SynthSpec synth;
    std::string synth_out, hr_text = "0:120";
    std::vector<std::string> tone_texts;
    double synth_fs = 125.0;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic recording");
    synth_cmd->add_option("--duration", synth.duration_s, "Length in seconds");
    synth_cmd->add_option("--hr", hr_text, "BPM breakpoints t:bpm[,t:bpm...]");
    synth_cmd->add_option("--tone", tone_texts,
                          "Artifact tone f:amp or sweep f0-f1:amp (Hz), repeatable");
    synth_cmd->add_option("--noise-std", synth.noise_std, "White noise sigma");
    synth_cmd->add_option("--seed", synth.seed, "RNG seed");
    synth_cmd->add_option("--fs", synth_fs, "Sampling rate in Hz");
    synth_cmd->add_option("--out", synth_out, "Output CSV path")->required();

    // ---- spectrum ----
    RunConfig spec_cfg;
    std::string spec_input, spec_out, spec_stage = "focuss";
    int spec_window = 0;
    auto* spec_cmd = app.add_subcommand("spectrum", "Dump one window's spectrum as CSV");
    spec_cmd->add_option("--input", spec_input, "Recording CSV")->required();
    spec_cmd->add_option("--window", spec_window, "Window index");
    spec_cmd->add_option("--stage", spec_stage, "focuss | periodogram")
        ->check(CLI::IsMember({"focuss", "periodogram"}));
    spec_cmd->add_option("--out", spec_out, "Output CSV path")->required();
    add_config_flags(spec_cmd, spec_cfg);

    // ---- metrics ----
    std::string metrics_trace, metrics_out;
    auto* metrics_cmd =
        app.add_subcommand("metrics", "Recompute metrics from a trace CSV");
    metrics_cmd->add_option("--trace", metrics_trace, "Trace CSV from run")->required();
    metrics_cmd->add_option("--out", metrics_out, "Output JSON (default stdout)");

    // ---- sweep ----
    RunConfig sweep_cfg;
    std::string sweep_input, sweep_output, sweep_param;
    std::vector<double> sweep_values;
    auto* sweep_cmd = app.add_subcommand("sweep", "Re-run over one parameter's values");
    sweep_cmd->add_option("--input", sweep_input, "Directory of recording CSVs")->required();
    sweep_cmd->add_option("--output", sweep_output, "Output directory")->required();
    sweep_cmd->add_option("--param", sweep_param, "One of: L, delta, tau, delta-s")
        ->required()
        ->check(CLI::IsMember({"L", "delta", "tau", "delta-s"}));
    sweep_cmd->add_option("--values", sweep_values, "Values to sweep")->required();
    add_config_flags(sweep_cmd, sweep_cfg);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            apply_jobs_env(cfg);
            const DirectoryResult res = run_directory(input_dir, output_dir, cfg);
            const int rc = report_failures(res);
            if (res.aggregate)
                std::printf("error1 %.3f BPM | error2 %.3f%% | pearson %.4f | %zu windows\n",
                            res.aggregate->error1_bpm, res.aggregate->error2 * 100.0,
                            res.aggregate->pearson_r.value_or(std::nan("")),
                            res.aggregate->n_windows);
            return rc;
        }

        if (*synth_cmd) {
            synth.hr_trace = parse_hr_trace(hr_text);
            for (const auto& t : tone_texts) synth.tones.push_back(parse_tone(t));
            save_recording(generate_synthetic(synth, synth_fs), synth_out);
            return 0;
        }

        if (*spec_cmd) {
            const Recording rec = load_recording(spec_input, spec_cfg.fs);
            // run the pipeline up to the requested window so the tracker state
            // (and with it the SSA guard band) is faithful
            RunConfig c = spec_cfg;
            c.use_periodogram = spec_stage == "periodogram";
            Recording head = rec;
            const long need =
                std::lround(c.fs * (spec_window * c.step_sec + c.window_sec));
            if (static_cast<long>(head.length()) < need)
                throw ParamError("spectrum: window index beyond recording end");
            auto trim = [&](Signal& s) { s.resize(need); };
            trim(head.ppg);
            trim(head.acc_x);
            trim(head.acc_y);
            trim(head.acc_z);
            if (head.ecg) trim(*head.ecg);
            head.ecg.reset();

            FilterSpec filt{c.filter_low_hz, c.filter_high_hz, c.filter_taps, c.fs};
            Recording filtered = head;
            filtered.ppg = bandpass(head.ppg, filt);
            filtered.acc_x = bandpass(head.acc_x, filt);
            filtered.acc_y = bandpass(head.acc_y, filt);
            filtered.acc_z = bandpass(head.acc_z, filt);
            const auto wins = windows(filtered, c.window_sec, c.step_sec);
            const Dictionary dict(static_cast<int>(wins.front().ppg.size()) - 2,
                                  c.n_bins, c.fs);
            const FocussParams fp{c.focuss_p, c.focuss_lambda, c.focuss_iters};
            std::optional<TrackerState> tracker;
            Spectrum spec;
            for (const Window& w : wins) {
                std::optional<int> n_prev;
                if (tracker) n_prev = tracker->n_prev;
                Signal cleansed =
                    c.skip_ssa ? w.ppg
                               : cleanse(w.ppg, w.acc_x, w.acc_y, w.acc_z, n_prev,
                                         c.ssa_embed, c.guard_bins, c.n_bins)
                                     .series;
                const Signal diffed = second_difference(cleansed);
                spec = c.use_periodogram ? periodogram(diffed, c.n_bins, c.fs)
                                         : focuss_spectrum(diffed, dict, fp);
                if (!tracker)
                    tracker = initialize(spec, c.tracker_params(), c.init_harmonic_check);
                else
                    step(spec, *tracker, c.tracker_params(), c.skip_verify);
                if (w.index == spec_window) break;
            }
            std::ofstream f(spec_out);
            if (!f) throw ParseError("cannot write " + spec_out);
            f << "bin,hz,s_k\n";
            char buf[128];
            for (int b = 1; b <= spec.n_bins; ++b) {
                std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g\n", b,
                              (b - 1) * spec.fs / spec.n_bins, spec.at(b));
                f << buf;
            }
            return 0;
        }

        if (*metrics_cmd) {
            std::ifstream f(metrics_trace);
            if (!f) throw ParseError("cannot open " + metrics_trace);
            std::string line;
            std::getline(f, line);  // header
            std::vector<double> est, tru;
            while (std::getline(f, line)) {
                if (line.empty()) continue;
                std::stringstream ss(line);
                std::string cell;
                std::vector<std::string> cells;
                while (std::getline(ss, cell, ',')) cells.push_back(cell);
                if (cells.size() < 4 || cells[3].empty()) continue;
                est.push_back(std::stod(cells[2]));
                tru.push_back(std::stod(cells[3]));
            }
            const AgreementSummary s = summarize(est, tru);
            nlohmann::json j;
            j["error1_bpm"] = s.error1_bpm;
            j["error2_pct"] = s.error2 * 100.0;
            j["loa_low"] = s.loa_low;
            j["loa_high"] = s.loa_high;
            j["sigma_bpm"] = s.sigma_bpm;
            if (s.pearson_r)
                j["pearson_r"] = *s.pearson_r;
            else
                j["pearson_r"] = nullptr;
            j["n_windows"] = s.n_windows;
            if (metrics_out.empty()) {
                std::cout << j.dump(2) << "\n";
            } else {
                std::ofstream out(metrics_out);
                out << j.dump(2) << "\n";
            }
            return 0;
        }

        if (*sweep_cmd) {
            apply_jobs_env(sweep_cfg);
            std::filesystem::create_directories(sweep_output);
            std::ofstream table(std::filesystem::path(sweep_output) / "sweep.csv");
            table << "value,error1,error2\n";
            for (double v : sweep_values) {
                RunConfig c = sweep_cfg;
                if (sweep_param == "L")
                    c.ssa_embed = static_cast<int>(v);
                else if (sweep_param == "delta")
                    c.guard_bins = static_cast<int>(v);
                else if (sweep_param == "tau")
                    c.verify_tau = static_cast<int>(v);
                else
                    c.search_halfwidth = static_cast<int>(v);
                std::ostringstream sub;
                sub << sweep_param << "_" << v;
                const DirectoryResult res = run_directory(
                    sweep_input, std::filesystem::path(sweep_output) / sub.str(), c);
                char buf[128];
                if (res.aggregate) {
                    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g\n", v,
                                  res.aggregate->error1_bpm, res.aggregate->error2 * 100.0);
                } else {
                    std::snprintf(buf, sizeof buf, "%.10g,,\n", v);
                }
                table << buf;
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
