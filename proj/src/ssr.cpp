#include "troika/ssr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "troika/fft.hpp"

namespace troika {

double bin_to_bpm(int n_f, int n_bins, double fs) {
    if (n_f < 1 || n_f > n_bins)
        throw ParamError("bin_to_bpm: bin " + std::to_string(n_f) +
                         " outside [1, " + std::to_string(n_bins) + "]");
    return 60.0 * (n_f - 1) / n_bins * fs;
}

int bpm_to_bin(double bpm, int n_bins, double fs) {
    const int b = static_cast<int>(std::lround(bpm / 60.0 * n_bins / fs)) + 1;
    return std::clamp(b, 1, n_bins);
}

namespace {

// Dirichlet kernel D(k) = sum_{m=0}^{M-1} exp(j 2 pi m k / N); the Gram
// matrix of the exponential dictionary depends only on bin differences.
std::complex<double> dirichlet(long k, int m_rows, int n_bins) {
    const long r = ((k % n_bins) + n_bins) % n_bins;
    if (r == 0) return {static_cast<double>(m_rows), 0.0};
    const double a = std::numbers::pi * r / n_bins;
    const double mag = std::sin(m_rows * a) / std::sin(a);
    const double ph = (m_rows - 1) * a;
    return {mag * std::cos(ph), mag * std::sin(ph)};
}

}  // namespace

Dictionary::Dictionary(int rows, int n_bins, double fs, std::optional<int> df1,
                       std::optional<int> df2)
    : rows_(rows), n_bins_(n_bins), fs_(fs) {
    if (rows < 1 || n_bins < rows)
        throw ParamError("Dictionary: need N >= rows >= 1");
    if (fs <= 0.0) throw ParamError("Dictionary: fs must be positive");

    const int lo_base = static_cast<int>(std::ceil(0.4 * n_bins / fs)) + 1;
    const int hi_base = static_cast<int>(std::floor(5.0 * n_bins / fs)) + 1;
    const int d1 = df1 ? *df1 : lo_base - 2;  // band then starts exactly at bin 2
    const int d2 = df2 ? *df2 : static_cast<int>(std::lround(2.0 * n_bins / fs));

    const int lo = std::max(lo_base - d1, 1);
    const int hi = std::min(hi_base + d2, n_bins);
    if (lo > hi) throw ParamError("Dictionary: empty retained band");

    std::set<int> bins;
    for (int b = lo; b <= hi; ++b) {
        bins.insert(b);
        const int mirror = n_bins - b + 2;
        if (mirror >= 1 && mirror <= n_bins) bins.insert(mirror);
    }
    bins_.assign(bins.begin(), bins.end());

    const int r = static_cast<int>(bins_.size());
    phi_.resize(rows_, r);
    for (int j = 0; j < r; ++j) {
        const double step = 2.0 * std::numbers::pi * (bins_[j] - 1) / n_bins_;
        for (int m = 0; m < rows_; ++m)
            phi_(m, j) = {std::cos(step * m), std::sin(step * m)};
    }
    gram_.resize(r, r);
    for (int a = 0; a < r; ++a) {
        gram_(a, a) = {static_cast<double>(rows_), 0.0};
        for (int b = a + 1; b < r; ++b) {
            const auto g = dirichlet(bins_[b] - bins_[a], rows_, n_bins_);
            gram_(a, b) = g;
            gram_(b, a) = std::conj(g);
        }
    }
}

Spectrum periodogram(const Signal& y, int n_bins, double fs) {
    if (y.empty()) throw ParamError("periodogram: empty input");
    if (static_cast<int>(y.size()) > n_bins)
        throw ParamError("periodogram: input longer than N");
    Spectrum s;
    s.values = fft::power_spectrum(y, n_bins);
    s.n_bins = n_bins;
    s.fs = fs;
    return s;
}

Spectrum focuss_spectrum(const Signal& y, const Dictionary& dict,
                         const FocussParams& params, FocussTrace* trace) {
    const int m = static_cast<int>(y.size());
    if (m != dict.rows())
        throw ParamError("focuss_spectrum: dictionary rows " +
                         std::to_string(dict.rows()) + " != signal length " +
                         std::to_string(m));
    if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; }))
        throw DegenerateInput("focuss_spectrum: zero input");
    if (params.p <= 0.0 || params.p > 1.0)
        throw ParamError("focuss_spectrum: p must be in (0, 1]");
    if (params.lambda < 0.0) throw ParamError("focuss_spectrum: negative lambda");
    if (params.iters < 1) throw ParamError("focuss_spectrum: iters must be >= 1");

    const int r = static_cast<int>(dict.retained_bins().size());
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), m);
    const Eigen::VectorXcd b = dict.phi().adjoint() * yv;

    Eigen::VectorXcd x = b / static_cast<double>(m);

    auto objective = [&](const Eigen::VectorXcd& xc) {
        const Eigen::VectorXcd resid = yv.cast<std::complex<double>>() - dict.phi() * xc;
        double pen = 0.0;
        for (int i = 0; i < r; ++i) pen += std::pow(std::abs(xc(i)), params.p);
        return resid.squaredNorm() + params.lambda * pen;
    };
    if (trace) {
        trace->objective.clear();
        trace->objective.push_back(objective(x));
    }

    Eigen::VectorXd w(r);
    Eigen::MatrixXcd a(r, r);
    for (int it = 0; it < params.iters; ++it) {
        double amax = 0.0;
        for (int i = 0; i < r; ++i) amax = std::max(amax, std::abs(x(i)));
        const double floor = 1e-12 * amax;
        for (int i = 0; i < r; ++i)
            w(i) = std::pow(std::max(std::abs(x(i)), floor), 1.0 - params.p / 2.0);

        // (Phi W)^H (Phi W) + lambda I, solved against (Phi W)^H y = W b;
        // identical to the dual form W (Phi W)^H ((Phi W)(Phi W)^H + lambda I)^-1 y
        for (int col = 0; col < r; ++col)
            for (int row = 0; row < r; ++row)
                a(row, col) = w(row) * dict.gram()(row, col) * w(col);
        for (int i = 0; i < r; ++i) a(i, i) += params.lambda;

        Eigen::LLT<Eigen::MatrixXcd> llt(a);
        if (llt.info() != Eigen::Success)
            throw NumericError("focuss_spectrum: singular system in iteration " +
                               std::to_string(it + 1));
        const Eigen::VectorXcd rhs = w.asDiagonal() * b;
        const Eigen::VectorXcd z = llt.solve(rhs);
        if (!z.allFinite() || (a * z - rhs).norm() > 1e-6 * rhs.norm())
            throw NumericError("focuss_spectrum: singular system in iteration " +
                               std::to_string(it + 1));
        x = w.asDiagonal() * z;
        if (trace) trace->objective.push_back(objective(x));
    }
    if (trace) trace->solution = x;

    Spectrum s;
    s.values.assign(dict.n_bins(), 0.0);
    s.n_bins = dict.n_bins();
    s.fs = dict.fs();
    for (int j = 0; j < r; ++j)
        s.values[dict.retained_bins()[j] - 1] = std::norm(x(j));
    return s;
}

}  // namespace troika
