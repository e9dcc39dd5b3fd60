#include "troika/fft.hpp"

#include <fftw3.h>

#include <bit>
#include <map>
#include <memory>
#include <mutex>

namespace troika::fft {

namespace {

// fftw plan creation is not thread-safe; execution with the new-array
// interface is. Plans are cached per size and reused with per-call buffers.
class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }

    fftw_plan forward(int n) {
        std::lock_guard lock(mutex_);
        auto it = fwd_.find(n);
        if (it != fwd_.end()) return it->second;
        double* in = fftw_alloc_real(n);
        fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
        fftw_plan p = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
        fftw_free(in);
        fftw_free(out);
        fwd_[n] = p;
        return p;
    }

    fftw_plan inverse(int n) {
        std::lock_guard lock(mutex_);
        auto it = inv_.find(n);
        if (it != inv_.end()) return it->second;
        fftw_complex* in = fftw_alloc_complex(n / 2 + 1);
        double* out = fftw_alloc_real(n);
        fftw_plan p = fftw_plan_dft_c2r_1d(n, in, out, FFTW_ESTIMATE);
        fftw_free(in);
        fftw_free(out);
        inv_[n] = p;
        return p;
    }

  private:
    PlanCache() = default;
    std::mutex mutex_;
    std::map<int, fftw_plan> fwd_;
    std::map<int, fftw_plan> inv_;
};

struct FftwRealBuf {
    explicit FftwRealBuf(int n) : p(fftw_alloc_real(n)) {}
    ~FftwRealBuf() { fftw_free(p); }
    double* p;
};

struct FftwComplexBuf {
    explicit FftwComplexBuf(int n) : p(fftw_alloc_complex(n)) {}
    ~FftwComplexBuf() { fftw_free(p); }
    fftw_complex* p;
};

}  // namespace

std::vector<std::complex<double>> real_dft(const Signal& x, int nfft) {
    if (x.empty()) throw ParamError("real_dft: empty input");
    if (nfft < static_cast<int>(x.size()))
        throw ParamError("real_dft: nfft shorter than input");
    fftw_plan plan = PlanCache::instance().forward(nfft);
    FftwRealBuf in(nfft);
    FftwComplexBuf out(nfft / 2 + 1);
    for (int i = 0; i < nfft; ++i) in.p[i] = i < static_cast<int>(x.size()) ? x[i] : 0.0;
    fftw_execute_dft_r2c(plan, in.p, out.p);
    std::vector<std::complex<double>> result(nfft / 2 + 1);
    for (int i = 0; i <= nfft / 2; ++i) result[i] = {out.p[i][0], out.p[i][1]};
    return result;
}

std::vector<double> power_spectrum(const Signal& x, int nfft) {
    auto half = real_dft(x, nfft);
    std::vector<double> s(nfft);
    const double norm = 1.0 / static_cast<double>(x.size());
    for (int k = 0; k <= nfft / 2; ++k) s[k] = std::norm(half[k]) * norm;
    for (int k = nfft / 2 + 1; k < nfft; ++k) s[k] = s[nfft - k];
    return s;
}

Signal convolve(const Signal& a, const Signal& b) {
    if (a.empty() || b.empty()) throw ParamError("convolve: empty input");
    const int n = static_cast<int>(a.size() + b.size()) - 1;
    const int nfft = static_cast<int>(std::bit_ceil(static_cast<unsigned>(n)));
    fftw_plan fwd = PlanCache::instance().forward(nfft);
    fftw_plan inv = PlanCache::instance().inverse(nfft);
    FftwRealBuf ra(nfft), rb(nfft), out(nfft);
    FftwComplexBuf ca(nfft / 2 + 1), cb(nfft / 2 + 1);
    for (int i = 0; i < nfft; ++i) {
        ra.p[i] = i < static_cast<int>(a.size()) ? a[i] : 0.0;
        rb.p[i] = i < static_cast<int>(b.size()) ? b[i] : 0.0;
    }
    fftw_execute_dft_r2c(fwd, ra.p, ca.p);
    fftw_execute_dft_r2c(fwd, rb.p, cb.p);
    for (int k = 0; k <= nfft / 2; ++k) {
        const double re = ca.p[k][0] * cb.p[k][0] - ca.p[k][1] * cb.p[k][1];
        const double im = ca.p[k][0] * cb.p[k][1] + ca.p[k][1] * cb.p[k][0];
        ca.p[k][0] = re / nfft;
        ca.p[k][1] = im / nfft;
    }
    fftw_execute_dft_c2r(inv, ca.p, out.p);
    return Signal(out.p, out.p + n);
}

}  // namespace troika::fft
