#include "troika/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "troika/preprocess.hpp"

namespace troika {

std::vector<long> detect_r_peaks(const Signal& ecg, double fs) {
    const long n = static_cast<long>(ecg.size());
    if (n < 3) return {};

    // QRS energy lives around 5-15 Hz. The kernel must ring for less than
    // the 0.25 s refractory span or each beat detects twice. Zero padding
    // (not reflection) keeps edge beats from doubling into the threshold.
    FilterSpec qrs;
    qrs.low_cut_hz = 5.0;
    qrs.high_cut_hz = 15.0;
    qrs.fs = fs;
    const long max_taps = std::lround(0.25 * fs) | 1;
    qrs.taps = static_cast<int>(std::min(max_taps, (n - 1) / 2 * 2 - 1));
    if (qrs.taps < 5) return {};
    const Signal kernel = design_bandpass(qrs);
    const long pad = (qrs.taps - 1) / 2;
    Signal f(n, 0.0);
    for (long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (long k = 0; k < qrs.taps; ++k) {
            const long j = i - pad + k;
            if (j >= 0 && j < n) acc += ecg[j] * kernel[qrs.taps - 1 - k];
        }
        f[i] = acc;
    }

    // squared central derivative
    Signal feat(n, 0.0);
    for (long i = 1; i + 1 < n; ++i) {
        const double d = (f[i + 1] - f[i - 1]) * 0.5 * fs;
        feat[i] = d * d;
    }

    // rolling max over a centered 2 s span
    const long half = std::lround(fs);
    Signal thr(n, 0.0);
    {
        // monotonic deque sliding-window maximum
        std::deque<long> dq;
        long right = -1;
        for (long i = 0; i < n; ++i) {
            const long lo = i - half;
            const long hi = std::min(i + half, n - 1);
            while (right < hi) {
                ++right;
                while (!dq.empty() && feat[dq.back()] <= feat[right]) dq.pop_back();
                dq.push_back(right);
            }
            while (!dq.empty() && dq.front() < lo) dq.pop_front();
            thr[i] = 0.5 * feat[dq.front()];
        }
    }

    const long refractory = std::lround(0.25 * fs);
    std::vector<long> feature_peaks;
    for (long i = 1; i + 1 < n; ++i) {
        if (feat[i] < thr[i] || feat[i] <= 0.0) continue;
        if (!(feat[i] > feat[i - 1] && feat[i] >= feat[i + 1])) continue;
        if (!feature_peaks.empty() && i - feature_peaks.back() < refractory) {
            if (feat[i] > feat[feature_peaks.back()]) feature_peaks.back() = i;
            continue;
        }
        feature_peaks.push_back(i);
    }

    // the squared derivative peaks on the QRS slopes; land each detection on
    // the R apex by snapping to the largest |ecg| nearby
    const long snap = std::lround(0.1 * fs);
    std::vector<long> peaks;
    for (long i : feature_peaks) {
        long best = std::max<long>(0, i - snap);
        for (long j = best; j <= std::min(n - 1, i + snap); ++j)
            if (std::abs(ecg[j]) > std::abs(ecg[best])) best = j;
        if (peaks.empty() || best - peaks.back() >= refractory) peaks.push_back(best);
    }
    return peaks;
}

std::optional<double> ecg_ground_truth(const Signal& ecg_window, double fs) {
    if (fs <= 0.0) throw ParamError("ecg_ground_truth: fs must be positive");
    const auto peaks = detect_r_peaks(ecg_window, fs);
    if (peaks.size() < 2) return std::nullopt;
    const double cycles = static_cast<double>(peaks.size() - 1);
    const double span_s = (peaks.back() - peaks.front()) / fs;
    if (span_s <= 0.0) return std::nullopt;
    return 60.0 * cycles / span_s;
}

double error1(const std::vector<double>& estimates, const std::vector<double>& truths) {
    if (estimates.size() != truths.size() || estimates.empty())
        throw ParamError("error1: need equal nonzero lengths");
    double sum = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i)
        sum += std::abs(estimates[i] - truths[i]);
    return sum / estimates.size();
}

double error2(const std::vector<double>& estimates, const std::vector<double>& truths) {
    if (estimates.size() != truths.size() || estimates.empty())
        throw ParamError("error2: need equal nonzero lengths");
    double sum = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        if (truths[i] <= 0.0) throw ParamError("error2: nonpositive truth value");
        sum += std::abs(estimates[i] - truths[i]) / truths[i];
    }
    return sum / estimates.size();
}

BlandAltman bland_altman(const std::vector<double>& estimates,
                         const std::vector<double>& truths) {
    if (estimates.size() != truths.size() || estimates.size() < 2)
        throw ParamError("bland_altman: need at least 2 pairs");
    const std::size_t n = estimates.size();
    BlandAltman ba;
    ba.points.reserve(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = estimates[i] - truths[i];
        ba.points.emplace_back((estimates[i] + truths[i]) / 2.0, d);
        sum += d;
    }
    ba.mu = sum / n;
    double ss = 0.0;
    for (const auto& [m, d] : ba.points) ss += (d - ba.mu) * (d - ba.mu);
    ba.sigma = std::sqrt(ss / (n - 1));
    ba.loa_low = ba.mu - 1.96 * ba.sigma;
    ba.loa_high = ba.mu + 1.96 * ba.sigma;
    return ba;
}

double pearson(const std::vector<double>& estimates, const std::vector<double>& truths) {
    if (estimates.size() != truths.size() || estimates.size() < 2)
        throw ParamError("pearson: need at least 2 pairs");
    const std::size_t n = estimates.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += estimates[i];
        my += truths[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = estimates[i] - mx;
        const double dy = truths[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw DegenerateInput("pearson: correlation undefined for a constant series");
    return sxy / std::sqrt(sxx * syy);
}

AgreementSummary summarize(const std::vector<double>& estimates,
                           const std::vector<double>& truths) {
    AgreementSummary s;
    s.n_windows = estimates.size();
    s.error1_bpm = error1(estimates, truths);
    s.error2 = error2(estimates, truths);
    const BlandAltman ba = bland_altman(estimates, truths);
    s.mu = ba.mu;
    s.sigma_bpm = ba.sigma;
    s.loa_low = ba.loa_low;
    s.loa_high = ba.loa_high;
    try {
        s.pearson_r = pearson(estimates, truths);
    } catch (const DegenerateInput&) {
        s.pearson_r.reset();
    }
    return s;
}

}  // namespace troika
