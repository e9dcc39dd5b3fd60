#include "troika/ssa.hpp"

#include <algorithm>
#include <cmath>

#include "troika/fft.hpp"

namespace troika {

namespace {

constexpr double kNoiseFloorRatio = 1e-3;

// A tone's argmax lands on slightly different bins across channels: the
// 4096-point grid over-resolves an 8 s window (0.03 Hz bins vs 0.125 Hz
// resolution). Components within this distance of an exclusion bin count
// as matched; 2 bins is 0.06 Hz at the reference rate, well inside the
// +-10-bin guard band.
constexpr int kMatchTolBins = 2;

// argmax of the power spectrum over the physical band, bins [2, N/2+1]
int dominant_bin_of(const Signal& series, int n_bins) {
    const auto s = fft::power_spectrum(series, n_bins);
    int best = 2;
    double best_v = s[1];
    for (int k = 2; k <= n_bins / 2; ++k) {
        if (s[k] > best_v) {
            best_v = s[k];
            best = k + 1;
        }
    }
    return best;
}

}  // namespace

Trajectory embed(const Signal& y, int L) {
    const int m = static_cast<int>(y.size());
    if (L < 2 || 2 * L >= m)
        throw ParamError("embed: need 2 <= L < M/2 (L=" + std::to_string(L) +
                         ", M=" + std::to_string(m) + ")");
    const int k = m - L + 1;
    Trajectory mat(L, k);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < L; ++i) mat(i, j) = y[i + j];
    return mat;
}

Signal diagonal_average(const Trajectory& mat) {
    const int L = static_cast<int>(mat.rows());
    const int K = static_cast<int>(mat.cols());
    Signal out(L + K - 1, 0.0);
    std::vector<int> count(L + K - 1, 0);
    for (int j = 0; j < K; ++j) {
        for (int i = 0; i < L; ++i) {
            out[i + j] += mat(i, j);
            ++count[i + j];
        }
    }
    for (std::size_t s = 0; s < out.size(); ++s) out[s] /= count[s];
    return out;
}

std::vector<SsaComponent> decompose(const Signal& y, int L, int n_bins) {
    const int m = static_cast<int>(y.size());
    const Trajectory traj = embed(y, L);
    if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; }))
        throw DegenerateInput("decompose: all-zero input window");
    const int K = m - L + 1;
    const int d = std::min(L, K);

    // Eigendecomposition of Y Y^T gives the left singular vectors; each
    // elementary matrix is u_i (Y^T u_i)^T so no division by sigma is needed
    // and the component series sum back to y exactly.
    Eigen::MatrixXd gram(L, L);
    gram.setZero();
    gram.selfadjointView<Eigen::Lower>().rankUpdate(traj);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success)
        throw NumericError("decompose: eigendecomposition failed");

    // eigh returns ascending order; we want non-increasing sigma
    std::vector<double> sigma(d);
    Eigen::MatrixXd u(L, d);
    for (int i = 0; i < d; ++i) {
        sigma[i] = std::sqrt(std::max(eig.eigenvalues()(L - 1 - i), 0.0));
        u.col(i) = eig.eigenvectors().col(L - 1 - i);
    }
    const Eigen::MatrixXd w = traj.transpose() * u;  // K x d

    const double sig1 = sigma[0];
    std::vector<int> counts(m);
    for (int s = 0; s < m; ++s)
        counts[s] = std::min({s + 1, m - s, std::min(L, K)});

    // elementary component series via anti-diagonal sums = conv(u_i, w_i)
    auto elementary_series = [&](int i) {
        Signal uu(u.col(i).data(), u.col(i).data() + L);
        Signal ww(w.col(i).data(), w.col(i).data() + K);
        Signal conv = fft::convolve(uu, ww);
        for (int s = 0; s < m; ++s) conv[s] /= counts[s];
        return conv;
    };

    std::vector<Signal> series(d);
    std::vector<int> dom(d, 0);
    std::vector<bool> is_noise(d, false);
    for (int i = 0; i < d; ++i) {
        series[i] = elementary_series(i);
        is_noise[i] = sigma[i] < kNoiseFloorRatio * sig1;
        dom[i] = dominant_bin_of(series[i], n_bins);
    }

    std::vector<SsaComponent> out;
    out.reserve(d);
    int i = 0;
    while (i < d) {
        SsaComponent c;
        c.sigma = sigma[i];
        c.noise_floor = is_noise[i];
        const bool pair = !is_noise[i] && i + 1 < d && !is_noise[i + 1] &&
                          sigma[i + 1] >= 0.9 * sigma[i] &&
                          std::abs(dom[i] - dom[i + 1]) <= 2;
        if (pair) {
            c.series = series[i];
            for (int s = 0; s < m; ++s) c.series[s] += series[i + 1][s];
            c.dominant_bin = dominant_bin_of(c.series, n_bins);
            i += 2;
        } else {
            c.series = std::move(series[i]);
            c.dominant_bin = dom[i];
            i += 1;
        }
        out.push_back(std::move(c));
    }
    return out;
}

ExclusionSet accel_dominant_bins(const Signal& acc_x, const Signal& acc_y,
                                 const Signal& acc_z, int n_bins) {
    if (acc_x.empty() || acc_y.empty() || acc_z.empty())
        throw ParamError("accel_dominant_bins: empty channel");
    // A channel with no rhythmic motion has no dominant frequencies: white
    // noise tops out near 80x its spectral mean while even a deeply buried
    // tone exceeds 160x, so 120x separates the two.
    constexpr double kSalience = 120.0;
    ExclusionSet out;
    for (const Signal* ch : {&acc_x, &acc_y, &acc_z}) {
        const auto s = fft::power_spectrum(*ch, n_bins);
        double mx = 0.0;
        double mean = 0.0;
        for (int k = 1; k <= n_bins / 2; ++k) {
            mx = std::max(mx, s[k]);
            mean += s[k];
        }
        mean /= n_bins / 2.0;
        if (mx <= 0.0 || mx <= kSalience * mean) continue;
        for (int k = 1; k <= n_bins / 2; ++k) {
            const double left = s[k - 1];
            const double right = k + 1 < n_bins ? s[k + 1] : 0.0;
            if (s[k] > left && s[k] >= right && s[k] > 0.5 * mx)
                out.bins.insert(k + 1);
        }
    }
    return out;
}

ExclusionSet refine_exclusions(const ExclusionSet& f_acc,
                               std::optional<int> n_prev, int delta) {
    if (delta < 0) throw ParamError("refine_exclusions: negative delta");
    if (!n_prev) return f_acc;
    const int fund = *n_prev;
    const int harm = 2 * (fund - 1) + 1;
    ExclusionSet out;
    for (int b : f_acc.bins)
        if (std::abs(b - fund) > delta && std::abs(b - harm) > delta)
            out.bins.insert(b);
    return out;
}

CleanseResult cleanse(const Signal& y, const Signal& acc_x, const Signal& acc_y,
                      const Signal& acc_z, std::optional<int> n_prev, int L,
                      int delta, int n_bins) {
    const ExclusionSet excl =
        refine_exclusions(accel_dominant_bins(acc_x, acc_y, acc_z, n_bins),
                          n_prev, delta);
    const auto comps = decompose(y, L, n_bins);

    auto matches = [&excl](int dom) {
        const auto it = excl.bins.lower_bound(dom - kMatchTolBins);
        return it != excl.bins.end() && *it <= dom + kMatchTolBins;
    };

    CleanseResult res;
    res.series.assign(y.size(), 0.0);
    int classified = 0;
    int kept = 0;
    for (const SsaComponent& c : comps) {
        const bool excluded = !c.noise_floor && matches(c.dominant_bin);
        if (!c.noise_floor) {
            ++classified;
            if (!excluded) ++kept;
        }
        if (!excluded)
            for (std::size_t s = 0; s < y.size(); ++s) res.series[s] += c.series[s];
    }
    if (classified > 0 && kept == 0) {
        res.series = y;
        res.all_excluded = true;
    }
    return res;
}

}  // namespace troika
