#ifndef TROIKA_SSA_HPP
#define TROIKA_SSA_HPP

#include <Eigen/Dense>
#include <set>

#include "troika/types.hpp"

namespace troika {

/// Hankel L-trajectory matrix of a length-M series, K = M - L + 1 columns.
using Trajectory = Eigen::MatrixXd;

/// entry(i,j) = y[i+j]. Requires 2 <= L < M/2.
Trajectory embed(const Signal& y, int L);

/// Averages anti-diagonals back to a series of length L + K - 1.
/// Exact inverse of embed on Hankel matrices.
Signal diagonal_average(const Trajectory& mat);

/// One reconstructed group from the trajectory-matrix SVD.
struct SsaComponent {
    double sigma = 0.0;        // largest singular value in the group
    Signal series;             // diagonal-averaged group, length M
    int dominant_bin = 0;      // periodogram argmax (1-based) over [2, N/2+1]
    bool noise_floor = false;  // sigma < 1e-3 * sigma_1: kept, never classified
};

/// Spectral location indexes (1-based bins) marked for removal.
struct ExclusionSet {
    std::set<int> bins;
};

/// SVD of the trajectory matrix, adjacent singular-value pairing
/// (sigma_{i+1}/sigma_i >= 0.9 and dominant bins within 2), diagonal
/// averaging of each group. Sum of all component series equals y.
std::vector<SsaComponent> decompose(const Signal& y, int L, int n_bins);

/// Union over the three channels of periodogram local-maxima bins whose
/// amplitude exceeds 50% of that channel's spectrum maximum.
ExclusionSet accel_dominant_bins(const Signal& acc_x, const Signal& acc_y,
                                 const Signal& acc_z, int n_bins);

/// Drop bins within +-delta of the previous HR bin and of its harmonic bin
/// 2(n_prev-1)+1. No previous estimate leaves the set unchanged.
ExclusionSet refine_exclusions(const ExclusionSet& f_acc,
                               std::optional<int> n_prev, int delta);

struct CleanseResult {
    Signal series;
    bool all_excluded = false;  // every classified component matched: y returned as-is
};

/// Reconstruction from all components whose dominant bin survives
/// refine_exclusions(accel_dominant_bins(...), n_prev, delta).
CleanseResult cleanse(const Signal& y, const Signal& acc_x, const Signal& acc_y,
                      const Signal& acc_z, std::optional<int> n_prev,
                      int L = 400, int delta = 10, int n_bins = 4096);

}  // namespace troika

#endif
