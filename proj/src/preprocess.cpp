#include "troika/preprocess.hpp"

#include <cmath>
#include <numbers>

namespace troika {

namespace {

// Unity-DC-gain Hamming-windowed lowpass sinc with cutoff fc (Hz).
Signal windowed_lowpass(double fc, int taps, double fs) {
    Signal h(taps);
    const double c = (taps - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < taps; ++i) {
        const double m = i - c;
        const double x = 2.0 * fc / fs * m;
        const double sinc = m == 0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        const double w =
            0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (taps - 1));
        h[i] = 2.0 * fc / fs * sinc * w;
        sum += h[i];
    }
    for (double& v : h) v /= sum;
    return h;
}

}  // namespace

void FilterSpec::validate() const {
    if (!(low_cut_hz > 0.0 && low_cut_hz < high_cut_hz && high_cut_hz < fs / 2.0))
        throw ParamError("FilterSpec: need 0 < low_cut < high_cut < fs/2");
    if (taps < 3 || taps % 2 == 0)
        throw ParamError("FilterSpec: taps must be odd and >= 3");
}

Signal design_bandpass(const FilterSpec& spec) {
    spec.validate();
    Signal lo = windowed_lowpass(spec.low_cut_hz, spec.taps, spec.fs);
    Signal hi = windowed_lowpass(spec.high_cut_hz, spec.taps, spec.fs);
    Signal h(spec.taps);
    for (int i = 0; i < spec.taps; ++i) h[i] = hi[i] - lo[i];
    return h;
}

Signal bandpass(const Signal& signal, const FilterSpec& spec) {
    spec.validate();
    const int n = static_cast<int>(signal.size());
    if (n <= spec.taps)
        throw ParamError("bandpass: signal shorter than filter length");
    const Signal h = design_bandpass(spec);
    const int pad = (spec.taps - 1) / 2;

    // reflect about the end samples (x[1..pad] reversed, x[n-2..] reversed)
    Signal ext;
    ext.reserve(n + 2 * pad);
    for (int i = pad; i >= 1; --i) ext.push_back(signal[i]);
    ext.insert(ext.end(), signal.begin(), signal.end());
    for (int i = n - 2; i >= n - 1 - pad; --i) ext.push_back(signal[i]);

    Signal out(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        const double* x = ext.data() + i;
        for (int k = 0; k < spec.taps; ++k) acc += x[k] * h[spec.taps - 1 - k];
        out[i] = acc;
    }
    return out;
}

Signal second_difference(const Signal& signal) {
    if (signal.size() < 3)
        throw ParamError("second_difference: need at least 3 samples");
    Signal out(signal.size() - 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = signal[i + 2] - 2.0 * signal[i + 1] + signal[i];
    return out;
}

}  // namespace troika
