#ifndef TROIKA_FFT_HPP
#define TROIKA_FFT_HPP

#include <complex>
#include <vector>

#include "troika/types.hpp"

namespace troika::fft {

/// Forward DFT of x zero-padded to nfft points. Returns the nfft/2+1
/// non-negative-frequency coefficients (input is real, the rest are
/// conjugate mirrors). nfft may be any length >= x.size().
std::vector<std::complex<double>> real_dft(const Signal& x, int nfft);

/// |DFT|^2 of x zero-padded to nfft, all nfft bins (mirror half filled in),
/// divided by x.size().
std::vector<double> power_spectrum(const Signal& x, int nfft);

/// Linear convolution of a and b (length a+b-1).
Signal convolve(const Signal& a, const Signal& b);

}  // namespace troika::fft

#endif
