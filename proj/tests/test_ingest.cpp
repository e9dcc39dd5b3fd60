#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "troika/ingest.hpp"

using namespace troika;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream f(p);
    f << content;
    return p;
}

}  // namespace

TEST_CASE("load_recording: minimal file without ecg") {
    const auto p = write_temp("rec_min.csv",
                              "ppg,acc_x,acc_y,acc_z\n1,0,0,0\n2,0,0,0\n3,0,0,0\n");
    const Recording rec = load_recording(p, 125.0);
    CHECK(rec.length() == 3);
    CHECK(!rec.ecg.has_value());
    CHECK(rec.ppg == Signal{1, 2, 3});
    CHECK(rec.fs == 125.0);
}

TEST_CASE("load_recording: ecg column present") {
    const auto p =
        write_temp("rec_ecg.csv", "ppg,acc_x,acc_y,acc_z,ecg\n1,0,0,0,9\n2,0,0,0,8\n");
    const Recording rec = load_recording(p, 125.0);
    REQUIRE(rec.ecg.has_value());
    CHECK(*rec.ecg == Signal{9, 8});
}

TEST_CASE("load_recording: non-numeric cell names the line") {
    const auto p =
        write_temp("rec_bad.csv", "ppg,acc_x,acc_y,acc_z\n1.0,abc,0,0\n");
    CHECK_THROWS_WITH_AS(load_recording(p, 125.0),
                         doctest::Contains("line 2"), ParseError);
}

TEST_CASE("load_recording: ragged row names the line") {
    const auto p =
        write_temp("rec_ragged.csv", "ppg,acc_x,acc_y,acc_z\n1,2,3,4\n1,2,3\n");
    CHECK_THROWS_WITH_AS(load_recording(p, 125.0),
                         doctest::Contains("line 3"), ParseError);
}

TEST_CASE("load_recording: bad header rejected") {
    const auto p = write_temp("rec_hdr.csv", "time,ppg\n0,1\n");
    CHECK_THROWS_AS(load_recording(p, 125.0), ParseError);
}

TEST_CASE("save/load round trip") {
    SynthSpec spec;
    spec.duration_s = 3.0;
    spec.hr_trace = {{0.0, 90.0}};
    spec.noise_std = 0.2;
    spec.seed = 5;
    const Recording rec = generate_synthetic(spec);
    const fs::path p = fs::temp_directory_path() / "rec_rt.csv";
    save_recording(rec, p);
    const Recording back = load_recording(p, 125.0);
    REQUIRE(back.length() == rec.length());
    for (std::size_t i = 0; i < rec.length(); ++i) {
        CHECK(back.ppg[i] == doctest::Approx(rec.ppg[i]).epsilon(1e-9));
        CHECK((*back.ecg)[i] == (*rec.ecg)[i]);
    }
}

TEST_CASE("windows: 300 s at 125 Hz, T=8, S=2 gives 147 windows") {
    Recording rec;
    rec.fs = 125.0;
    rec.ppg.assign(300 * 125, 0.0);
    rec.acc_x = rec.acc_y = rec.acc_z = rec.ppg;
    const auto w = windows(rec, 8.0, 2.0);
    CHECK(w.size() == 147);
    // start samples follow i*fs*S exactly and every window is fs*T long
    for (std::size_t i = 0; i < w.size(); ++i) {
        CHECK(w[i].start_sample == static_cast<long>(i) * 250);
        CHECK(w[i].ppg.size() == 1000);
    }
}

TEST_CASE("windows: exactly one window at the boundary") {
    Recording rec;
    rec.fs = 125.0;
    rec.ppg.assign(8 * 125, 0.0);
    rec.acc_x = rec.acc_y = rec.acc_z = rec.ppg;
    CHECK(windows(rec, 8.0, 2.0).size() == 1);
}

TEST_CASE("windows: shorter than one window fails") {
    Recording rec;
    rec.fs = 125.0;
    rec.ppg.assign(static_cast<std::size_t>(7.9 * 125), 0.0);
    rec.acc_x = rec.acc_y = rec.acc_z = rec.ppg;
    CHECK_THROWS_AS(windows(rec, 8.0, 2.0), ParamError);
}

TEST_CASE("synthetic: 120 BPM constant gives 16 R-peaks per 8 s window") {
    SynthSpec spec;
    spec.duration_s = 40.0;
    spec.hr_trace = {{0.0, 120.0}};
    const Recording rec = generate_synthetic(spec);
    REQUIRE(rec.ecg.has_value());
    const auto ws = windows(rec, 8.0, 2.0);
    for (const Window& w : ws) {
        int count = 0;
        for (double v : *w.ecg) count += v > 0.5;
        CHECK(count == 16);
    }
}

TEST_CASE("synthetic: R-peak count tracks the integrated rate") {
    SynthSpec spec;
    spec.duration_s = 60.0;
    spec.hr_trace = {{0.0, 70.0}, {30.0, 150.0}, {60.0, 90.0}};
    spec.seed = 3;
    const Recording rec = generate_synthetic(spec);
    int count = 0;
    for (double v : *rec.ecg) count += v > 0.5;
    // integral of hr/60: 0.5*(70+150)*30/60 + 0.5*(150+90)*30/60 = 55 + 60
    // (+1 for the peak at phase 0)
    CHECK(std::abs(count - 116) <= 1);
}

TEST_CASE("synthetic: identical seed, identical recording") {
    SynthSpec spec;
    spec.duration_s = 5.0;
    spec.hr_trace = {{0.0, 100.0}};
    spec.tones = {{1.9, 2.4, 0.5}};
    spec.noise_std = 0.7;
    spec.seed = 99;
    const Recording a = generate_synthetic(spec);
    const Recording b = generate_synthetic(spec);
    CHECK(a.ppg == b.ppg);
    CHECK(a.acc_x == b.acc_x);
    CHECK(a.acc_y == b.acc_y);
    CHECK(a.acc_z == b.acc_z);
    CHECK(*a.ecg == *b.ecg);
}

TEST_CASE("synthetic: hr_trace outside [40, 220] rejected") {
    SynthSpec spec;
    spec.duration_s = 5.0;
    spec.hr_trace = {{0.0, 30.0}};
    CHECK_THROWS_AS(generate_synthetic(spec), ParamError);
    spec.hr_trace = {{0.0, 221.0}};
    CHECK_THROWS_AS(generate_synthetic(spec), ParamError);
}

TEST_CASE("load_bpm_truth") {
    const auto p = write_temp("truth.csv", "window_index,bpm\n0,100\n3,105.5\n");
    const auto t = load_bpm_truth(p);
    CHECK(t.size() == 2);
    CHECK(t.at(0) == 100.0);
    CHECK(t.at(3) == 105.5);
}
