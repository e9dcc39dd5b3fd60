#ifndef TROIKA_PREPROCESS_HPP
#define TROIKA_PREPROCESS_HPP

#include "troika/types.hpp"

namespace troika {

/// Linear-phase FIR bandpass. taps must be odd so the group delay is an
/// integer number of samples.
struct FilterSpec {
    double low_cut_hz = 0.4;
    double high_cut_hz = 5.0;
    int taps = 251;
    double fs = 125.0;

    void validate() const;
};

/// Hamming-windowed-sinc bandpass kernel (difference of two unity-DC
/// lowpass kernels, so the DC gain is exactly zero).
Signal design_bandpass(const FilterSpec& spec);

/// Apply the bandpass with group-delay compensation. Output has the same
/// length as the input and is time-aligned with it; edges are handled by
/// symmetric reflection padding.
Signal bandpass(const Signal& signal, const FilterSpec& spec);

/// out[i] = s[i+2] - 2 s[i+1] + s[i]; output is 2 samples shorter.
Signal second_difference(const Signal& signal);

}  // namespace troika

#endif
