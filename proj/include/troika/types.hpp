#ifndef TROIKA_TYPES_HPP
#define TROIKA_TYPES_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace troika {

using Signal = std::vector<double>;

/// Malformed input file (bad header, ragged row, non-numeric cell).
/// Message names the offending line number.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Out-of-range parameter or input of the wrong shape/length.
struct ParamError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Degenerate input that admits no meaningful result (all-zero window,
/// empty spectrum, constant series for a correlation).
struct DegenerateInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure (singular linear system).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Synchronized sample streams of one recording session.
/// All present channels have the same length; ecg is optional.
struct Recording {
    Signal ppg;
    Signal acc_x, acc_y, acc_z;
    std::optional<Signal> ecg;
    double fs = 125.0;
    std::string subject_id;

    std::size_t length() const { return ppg.size(); }
};

/// One analysis frame: fs*T samples per channel starting at start_sample.
struct Window {
    int index = 0;
    long start_sample = 0;
    Signal ppg;
    Signal acc_x, acc_y, acc_z;
    std::optional<Signal> ecg;
};

/// A tone mixed into synthetic PPG and accelerometer channels.
/// freq_end_hz == freq_start_hz gives a constant tone; otherwise the
/// frequency sweeps linearly over the recording duration.
struct ArtifactTone {
    double freq_start_hz = 0.0;
    double freq_end_hz = 0.0;
    double amplitude = 0.0;
};

/// Specification of a synthetic recording with known ground truth.
/// hr_trace is piecewise linear in (t_sec, bpm); values must be in [40, 220].
struct SynthSpec {
    double duration_s = 60.0;
    std::vector<std::pair<double, double>> hr_trace;  // (t_sec, bpm)
    std::vector<ArtifactTone> tones;
    double noise_std = 0.0;
    std::uint64_t seed = 0;
};

}  // namespace troika

#endif
