#include "troika/ingest.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

namespace troika {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_cell(const std::string& cell, int line_no, const char* what) {
    double v = 0.0;
    const char* b = cell.data();
    const char* e = b + cell.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e)
        throw ParseError("line " + std::to_string(line_no) + ": non-numeric " +
                         what + " value '" + cell + "'");
    return v;
}

}  // namespace

Recording load_recording(const std::filesystem::path& path, double fs) {
    if (fs <= 0.0) throw ParamError("load_recording: fs must be positive");
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw ParseError(path.string() + ": empty file");
    auto header = split_csv(line);
    const std::vector<std::string> base = {"ppg", "acc_x", "acc_y", "acc_z"};
    bool has_ecg = false;
    if (header.size() == 5 && header[4] == "ecg")
        has_ecg = true;
    else if (header.size() != 4)
        throw ParseError(path.string() +
                         ": line 1: expected header ppg,acc_x,acc_y,acc_z[,ecg]");
    for (std::size_t i = 0; i < base.size(); ++i)
        if (header[i] != base[i])
            throw ParseError(path.string() + ": line 1: bad header column '" +
                             header[i] + "'");

    Recording rec;
    rec.fs = fs;
    rec.subject_id = path.stem().string();
    if (has_ecg) rec.ecg = Signal{};

    const std::size_t ncols = has_ecg ? 5 : 4;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = split_csv(line);
        if (cells.size() != ncols)
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(ncols) + " columns, got " +
                             std::to_string(cells.size()));
        rec.ppg.push_back(parse_cell(cells[0], line_no, "ppg"));
        rec.acc_x.push_back(parse_cell(cells[1], line_no, "acc_x"));
        rec.acc_y.push_back(parse_cell(cells[2], line_no, "acc_y"));
        rec.acc_z.push_back(parse_cell(cells[3], line_no, "acc_z"));
        if (has_ecg) rec.ecg->push_back(parse_cell(cells[4], line_no, "ecg"));
    }
    return rec;
}

void save_recording(const Recording& rec, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    out << "ppg,acc_x,acc_y,acc_z";
    if (rec.ecg) out << ",ecg";
    out << "\n";
    char buf[512];
    for (std::size_t i = 0; i < rec.length(); ++i) {
        if (rec.ecg) {
            std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g\n",
                          rec.ppg[i], rec.acc_x[i], rec.acc_y[i], rec.acc_z[i],
                          (*rec.ecg)[i]);
        } else {
            std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g\n",
                          rec.ppg[i], rec.acc_x[i], rec.acc_y[i], rec.acc_z[i]);
        }
        out << buf;
    }
}

std::vector<Window> windows(const Recording& rec, double t_sec, double s_sec) {
    if (t_sec <= 0.0 || s_sec <= 0.0)
        throw ParamError("windows: T and S must be positive");
    const long m = std::lround(rec.fs * t_sec);
    const long step = std::lround(rec.fs * s_sec);
    if (static_cast<long>(rec.length()) < m)
        throw ParamError("windows: recording shorter than one window (" +
                         std::to_string(rec.length()) + " < " +
                         std::to_string(m) + " samples)");
    if (s_sec > t_sec / 2.0)
        std::cerr << "warning: step S=" << s_sec << "s exceeds T/2=" << t_sec / 2.0
                  << "s; successive estimates may move too far apart\n";

    const long count = (static_cast<long>(rec.length()) - m) / step + 1;
    std::vector<Window> out;
    out.reserve(count);
    for (long i = 0; i < count; ++i) {
        Window w;
        w.index = static_cast<int>(i);
        w.start_sample = i * step;
        auto slice = [&](const Signal& s) {
            return Signal(s.begin() + w.start_sample, s.begin() + w.start_sample + m);
        };
        w.ppg = slice(rec.ppg);
        w.acc_x = slice(rec.acc_x);
        w.acc_y = slice(rec.acc_y);
        w.acc_z = slice(rec.acc_z);
        if (rec.ecg) w.ecg = slice(*rec.ecg);
        out.push_back(std::move(w));
    }
    return out;
}

namespace {

// Pulse occupies this fraction of each cardiac cycle. Chosen so the
// fundamental of the second-differenced pulse train stays well above its
// first harmonic (differencing boosts the harmonic ~4x in amplitude).
constexpr double kPulseDuty = 0.85;

// Box-Muller on top of mt19937_64 so the stream is identical on every
// platform (std::normal_distribution is implementation-defined).
class GaussianSource {
  public:
    explicit GaussianSource(std::uint64_t seed) : gen_(seed) {}

    double uniform() {
        // 53-bit uniform in [0,1)
        return (gen_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace

Recording generate_synthetic(const SynthSpec& spec, double fs) {
    if (spec.duration_s <= 0.0) throw ParamError("generate_synthetic: duration <= 0");
    if (spec.hr_trace.empty()) throw ParamError("generate_synthetic: empty hr_trace");
    for (auto [t, bpm] : spec.hr_trace)
        if (bpm < 40.0 || bpm > 220.0)
            throw ParamError("generate_synthetic: hr_trace value " +
                             std::to_string(bpm) + " outside [40, 220] BPM");
    if (spec.noise_std < 0.0) throw ParamError("generate_synthetic: negative noise_std");

    const long n = std::lround(spec.duration_s * fs);
    Recording rec;
    rec.fs = fs;
    rec.subject_id = "synthetic";
    rec.ppg.assign(n, 0.0);
    rec.acc_x.assign(n, 0.0);
    rec.acc_y.assign(n, 0.0);
    rec.acc_z.assign(n, 0.0);
    rec.ecg = Signal(n, 0.0);

    // instantaneous rate from the piecewise-linear BPM trace
    auto bpm_at = [&](double t) {
        const auto& tr = spec.hr_trace;
        if (t <= tr.front().first) return tr.front().second;
        if (t >= tr.back().first) return tr.back().second;
        for (std::size_t i = 1; i < tr.size(); ++i) {
            if (t <= tr[i].first) {
                const double f = (t - tr[i - 1].first) / (tr[i].first - tr[i - 1].first);
                return tr[i - 1].second + f * (tr[i].second - tr[i - 1].second);
            }
        }
        return tr.back().second;
    };

    // phase = integral of rate; one pulse and one R-peak per integer crossing
    double phase = 0.0;
    double prev_floor = -1.0;  // forces an R-peak at phase 0
    for (long i = 0; i < n; ++i) {
        const double frac = phase - std::round(phase);
        if (std::abs(frac) <= kPulseDuty / 2.0)
            rec.ppg[i] = 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * frac / kPulseDuty));
        if (std::floor(phase) > prev_floor) {
            (*rec.ecg)[i] = 1.0;
            prev_floor = std::floor(phase);
        }
        phase += bpm_at(i / fs) / 60.0 / fs;
    }

    GaussianSource rng(spec.seed);
    for (const ArtifactTone& tone : spec.tones) {
        const double ph0 = rng.uniform() * 2.0 * std::numbers::pi;
        double acc_ph[3];
        for (double& p : acc_ph) p = rng.uniform() * 2.0 * std::numbers::pi;
        double ph = ph0;
        for (long i = 0; i < n; ++i) {
            const double t = i / fs;
            const double f = tone.freq_start_hz +
                             (tone.freq_end_hz - tone.freq_start_hz) * t / spec.duration_s;
            rec.ppg[i] += tone.amplitude * std::cos(ph);
            rec.acc_x[i] += tone.amplitude * std::cos(ph + acc_ph[0]);
            rec.acc_y[i] += tone.amplitude * std::cos(ph + acc_ph[1]);
            rec.acc_z[i] += tone.amplitude * std::cos(ph + acc_ph[2]);
            ph += 2.0 * std::numbers::pi * f / fs;
        }
    }

    if (spec.noise_std > 0.0) {
        for (long i = 0; i < n; ++i) rec.ppg[i] += spec.noise_std * rng.normal();
        for (Signal* s : {&rec.acc_x, &rec.acc_y, &rec.acc_z})
            for (long i = 0; i < n; ++i) (*s)[i] += spec.noise_std * rng.normal();
    }
    return rec;
}

std::map<int, double> load_bpm_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"window_index", "bpm"})
        throw ParseError(path.string() + ": line 1: expected header window_index,bpm");
    std::map<int, double> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = split_csv(line);
        if (cells.size() != 2)
            throw ParseError("line " + std::to_string(line_no) + ": expected 2 columns");
        const int idx = static_cast<int>(parse_cell(cells[0], line_no, "window_index"));
        out[idx] = parse_cell(cells[1], line_no, "bpm");
    }
    return out;
}

}  // namespace troika
