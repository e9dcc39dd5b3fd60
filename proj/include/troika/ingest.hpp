#ifndef TROIKA_INGEST_HPP
#define TROIKA_INGEST_HPP

#include <filesystem>
#include <map>

#include "troika/types.hpp"

namespace troika {

/// Parse a recording CSV (header ppg,acc_x,acc_y,acc_z[,ecg]).
/// Malformed rows raise ParseError naming the 1-based line number.
Recording load_recording(const std::filesystem::path& path, double fs);

/// Write a recording in the same CSV format.
void save_recording(const Recording& rec, const std::filesystem::path& path);

/// Slice into overlapping windows of t_sec seconds every s_sec seconds.
/// The trailing partial window is dropped. Warns (stderr) when s > t/2.
std::vector<Window> windows(const Recording& rec, double t_sec, double s_sec);

/// Deterministic synthetic recording: raised-cosine pulse train following
/// hr_trace, artifact tones (also placed on the accelerometer channels),
/// white noise, and an impulse-train ECG at the same instantaneous rate.
Recording generate_synthetic(const SynthSpec& spec, double fs = 125.0);

/// Optional per-window ground truth override (columns window_index,bpm).
std::map<int, double> load_bpm_truth(const std::filesystem::path& path);

}  // namespace troika

#endif
