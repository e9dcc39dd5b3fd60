// Brute-force reference implementations used to freeze expected values.
// Everything here is written independently of the library code paths it
// checks: direct O(n^2) DFTs, long-double accumulation, normal equations.
#ifndef TROIKA_TESTS_ORACLES_HPP
#define TROIKA_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

// O(n N) DFT power spectrum, |X_k|^2 / len(y), full grid; long-double
// phasor recurrence per bin
inline std::vector<double> power_spectrum(const std::vector<double>& y, int n_bins) {
    std::vector<double> s(n_bins);
    for (int k = 0; k < n_bins; ++k) {
        const long double a = -2.0L * std::numbers::pi_v<long double> * k / n_bins;
        const long double wr = std::cos(a), wi = std::sin(a);
        long double re = 0.0L, im = 0.0L;
        long double cr = 1.0L, ci = 0.0L;  // exp(-j 2 pi k n / N)
        for (std::size_t n = 0; n < y.size(); ++n) {
            re += y[n] * cr;
            im += y[n] * ci;
            const long double nr = cr * wr - ci * wi;
            ci = cr * wi + ci * wr;
            cr = nr;
        }
        s[k] = static_cast<double>((re * re + im * im) / y.size());
    }
    return s;
}

// argmax bin (1-based) over [2, N/2+1]
inline int dominant_bin(const std::vector<double>& y, int n_bins) {
    const auto s = power_spectrum(y, n_bins);
    int best = 2;
    for (int k = 2; k <= n_bins / 2; ++k)
        if (s[k] > s[best - 1]) best = k + 1;
    return best;
}

inline double mean(const std::vector<double>& v) {
    long double s = 0.0L;
    for (double x : v) s += x;
    return static_cast<double>(s / v.size());
}

inline double error1(const std::vector<double>& e, const std::vector<double>& t) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < e.size(); ++i) s += std::fabs((long double)e[i] - t[i]);
    return static_cast<double>(s / e.size());
}

inline double error2(const std::vector<double>& e, const std::vector<double>& t) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < e.size(); ++i)
        s += std::fabs((long double)e[i] - t[i]) / t[i];
    return static_cast<double>(s / e.size());
}

struct BaStats {
    double mu, sigma, lo, hi;
};

inline BaStats bland_altman(const std::vector<double>& e, const std::vector<double>& t) {
    const std::size_t n = e.size();
    long double mu = 0.0L;
    for (std::size_t i = 0; i < n; ++i) mu += (long double)e[i] - t[i];
    mu /= n;
    long double ss = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const long double d = (long double)e[i] - t[i] - mu;
        ss += d * d;
    }
    const long double sigma = std::sqrt(ss / (n - 1));
    return {static_cast<double>(mu), static_cast<double>(sigma),
            static_cast<double>(mu - 1.96L * sigma), static_cast<double>(mu + 1.96L * sigma)};
}

inline double pearson(const std::vector<double>& e, const std::vector<double>& t) {
    const std::size_t n = e.size();
    long double mx = 0.0L, my = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        mx += e[i];
        my += t[i];
    }
    mx /= n;
    my /= n;
    long double sxy = 0.0L, sxx = 0.0L, syy = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (e[i] - mx) * (t[i] - my);
        sxx += (e[i] - mx) * (e[i] - mx);
        syy += (t[i] - my) * (t[i] - my);
    }
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

// least-squares polynomial fit by normal equations in long double,
// evaluated at x; degree 3 over small index ranges is well conditioned
inline double cubic_fit_predict(const std::vector<double>& y, double x) {
    const int n = static_cast<int>(y.size());
    long double a[4][5] = {};
    for (int i = 0; i < n; ++i) {
        const long double t = i + 1;
        long double pw[7];
        pw[0] = 1.0L;
        for (int p = 1; p < 7; ++p) pw[p] = pw[p - 1] * t;
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) a[r][c] += pw[r + c];
            a[r][4] += pw[r] * y[i];
        }
    }
    for (int col = 0; col < 4; ++col) {  // gaussian elimination, partial pivot
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        for (int c = 0; c < 5; ++c) std::swap(a[col][c], a[piv][c]);
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const long double f = a[r][col] / a[col][col];
            for (int c = col; c < 5; ++c) a[r][c] -= f * a[col][c];
        }
    }
    long double out = 0.0L, pw = 1.0L;
    for (int p = 0; p < 4; ++p) {
        out += a[p][4] / a[p][p] * pw;
        pw *= x;
    }
    return static_cast<double>(out);
}

// deterministic test-data helpers
inline std::vector<double> random_signal(std::size_t n, unsigned seed, double scale = 1.0) {
    std::mt19937_64 gen(seed);
    std::vector<double> out(n);
    for (auto& v : out) {
        const double u1 = ((gen() >> 11) + 0.5) * 0x1.0p-53;
        const double u2 = (gen() >> 11) * 0x1.0p-53;
        v = scale * std::sqrt(-2.0 * std::log(u1)) *
            std::cos(2.0 * std::numbers::pi * u2);
    }
    return out;
}

inline std::vector<double> tone(std::size_t n, double freq_hz, double fs,
                                double amp = 1.0, double phase = 0.0) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = amp * std::cos(2.0 * std::numbers::pi * freq_hz * i / fs + phase);
    return out;
}

inline double rms(const std::vector<double>& v) {
    long double s = 0.0L;
    for (double x : v) s += (long double)x * x;
    return static_cast<double>(std::sqrt(s / v.size()));
}

}  // namespace oracle

#endif
