#ifndef TROIKA_SSR_HPP
#define TROIKA_SSR_HPP

#include <Eigen/Dense>
#include <complex>

#include "troika/types.hpp"

namespace troika {

/// BPM of 1-based bin n_f on an N-bin grid: 60 (n_f - 1) / N * fs.
double bin_to_bpm(int n_f, int n_bins, double fs);

/// Nearest 1-based bin for a BPM value.
int bpm_to_bin(double bpm, int n_bins, double fs);

/// Complex-exponential dictionary Phi(m,n) = exp(j 2 pi m n / N) restricted
/// to the passband bins plus transition margins and their conjugate mirrors.
class Dictionary {
  public:
    /// Retained set: [ceil(0.4 N/fs)+1-df1, floor(5 N/fs)+1+df2] union its
    /// mirror under n -> N-n+2, clipped to [1, N]. Defaults
    /// df1 = ceil(0.4 N/fs)-1 (band starts exactly at bin 2) and
    /// df2 = round(2 N/fs).
    Dictionary(int rows, int n_bins, double fs, std::optional<int> df1 = {},
               std::optional<int> df2 = {});

    int rows() const { return rows_; }
    int n_bins() const { return n_bins_; }
    double fs() const { return fs_; }
    const std::vector<int>& retained_bins() const { return bins_; }

    /// Materialized retained columns, rows x |retained|.
    const Eigen::MatrixXcd& phi() const { return phi_; }
    /// Gram matrix phi^H phi (exact, via the Dirichlet-kernel closed form).
    const Eigen::MatrixXcd& gram() const { return gram_; }

  private:
    int rows_, n_bins_;
    double fs_;
    std::vector<int> bins_;
    Eigen::MatrixXcd phi_;
    Eigen::MatrixXcd gram_;
};

/// Power spectrum over the full N-bin grid.
struct Spectrum {
    std::vector<double> values;  // s_k, index k-1 for 1-based bin k
    int n_bins = 0;
    double fs = 0.0;

    double at(int bin) const { return values[bin - 1]; }
};

struct FocussParams {
    double p = 0.8;
    double lambda = 0.1;
    int iters = 5;
};

/// Objective ||y - Phi x||^2 + lambda sum |x_i|^p at the initial point and
/// after each iteration; filled when requested from focuss_spectrum.
struct FocussTrace {
    std::vector<double> objective;
    Eigen::VectorXcd solution;
};

/// s_k = |DFT_N(zero-padded y)_k|^2 / len(y).
Spectrum periodogram(const Signal& y, int n_bins, double fs);

/// Regularized FOCUSS over the retained columns. Starts from the matched
/// filter x0 = Phi^H y / M and applies a fixed number of reweighted ridge
/// solves; no convergence test. Spectrum entries off the retained set are
/// exactly zero.
Spectrum focuss_spectrum(const Signal& y, const Dictionary& dict,
                         const FocussParams& params, FocussTrace* trace = nullptr);

}  // namespace troika

#endif
