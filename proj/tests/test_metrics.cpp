#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "troika/ingest.hpp"
#include "troika/metrics.hpp"

using namespace troika;

TEST_CASE("ecg_ground_truth: 16 peaks spanning 7.5 s give 120 BPM") {
    // impulses every 0.5 s from 0.25 s to 7.75 s
    Signal ecg(1000, 0.0);
    for (int k = 0; k < 16; ++k) ecg[static_cast<int>((0.25 + 0.5 * k) * 125)] = 1.0;
    const auto bpm = ecg_ground_truth(ecg, 125.0);
    REQUIRE(bpm.has_value());
    CHECK(*bpm == doctest::Approx(120.0).epsilon(0.005));
}

TEST_CASE("ecg_ground_truth: two peaks 0.5 s apart give 120 BPM") {
    Signal ecg(1000, 0.0);
    ecg[250] = 1.0;
    ecg[250 + 62] = 1.0;  // 62/125 s apart = 0.496 s
    const auto bpm = ecg_ground_truth(ecg, 125.0);
    REQUIRE(bpm.has_value());
    CHECK(*bpm == doctest::Approx(60.0 / (62.0 / 125.0)));
}

TEST_CASE("ecg_ground_truth: a single peak is unavailable") {
    Signal ecg(1000, 0.0);
    ecg[500] = 1.0;
    CHECK(!ecg_ground_truth(ecg, 125.0).has_value());
}

TEST_CASE("ecg_ground_truth: synthetic constant rate within 0.5 BPM") {
    SynthSpec spec;
    spec.duration_s = 24.0;
    spec.hr_trace = {{0.0, 132.0}};
    spec.seed = 17;
    const Recording rec = generate_synthetic(spec);
    const auto ws = windows(rec, 8.0, 2.0);
    for (const Window& w : ws) {
        const auto bpm = ecg_ground_truth(*w.ecg, rec.fs);
        REQUIRE(bpm.has_value());
        CHECK(std::abs(*bpm - 132.0) <= 0.5);
    }
}

TEST_CASE("error1: arithmetic and identity") {
    CHECK(error1({120, 130}, {121, 128}) == doctest::Approx(1.5));
    CHECK(error1({100, 90}, {100, 90}) == 0.0);
    CHECK(error1({100, 90}, {90, 100}) == error1({90, 100}, {100, 90}));
}

TEST_CASE("error1: length mismatch rejected") {
    CHECK_THROWS_AS(error1({1.0}, {1.0, 2.0}), ParamError);
    CHECK_THROWS_AS(error1({}, {}), ParamError);
}

TEST_CASE("error2: arithmetic") {
    CHECK(error2({101}, {100}) == doctest::Approx(0.01));
    CHECK(error2({100}, {100}) == 0.0);
    CHECK_THROWS_AS(error2({100}, {0.0}), ParamError);
}

TEST_CASE("bland_altman: exact agreement") {
    const auto ba = bland_altman({100, 110, 120}, {100, 110, 120});
    CHECK(ba.mu == 0.0);
    CHECK(ba.sigma == 0.0);
    CHECK(ba.loa_low == 0.0);
    CHECK(ba.loa_high == 0.0);
}

TEST_CASE("bland_altman: d = [+1, -1]") {
    const auto ba = bland_altman({101, 99}, {100, 100});
    CHECK(ba.mu == doctest::Approx(0.0));
    CHECK(ba.sigma == doctest::Approx(std::sqrt(2.0)));
    CHECK(ba.loa_low == doctest::Approx(-1.96 * std::sqrt(2.0)));
    CHECK(ba.loa_high == doctest::Approx(1.96 * std::sqrt(2.0)));
    // LOA endpoints are mu +- 1.96 sigma by construction
    CHECK(ba.loa_high - ba.mu == doctest::Approx(1.96 * ba.sigma));
}

TEST_CASE("bland_altman: needs two pairs") {
    CHECK_THROWS_AS(bland_altman({1.0}, {1.0}), ParamError);
}

TEST_CASE("pearson: identity, negation, affine invariance") {
    const std::vector<double> t = {100, 105, 110, 108, 112};
    std::vector<double> neg(t.size()), affine(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        neg[i] = -t[i] + 7.0;
        affine[i] = 2.5 * t[i] + 3.0;
    }
    CHECK(pearson(t, t) == doctest::Approx(1.0));
    CHECK(pearson(neg, t) == doctest::Approx(-1.0));
    CHECK(pearson(affine, t) == doctest::Approx(1.0));
}

TEST_CASE("pearson: constant series rejected") {
    CHECK_THROWS_AS(pearson({5, 5, 5}, {1, 2, 3}), DegenerateInput);
}

TEST_CASE("metrics match the brute-force oracle on 1000 random pairs") {
    std::mt19937_64 gen(123);
    auto u = [&] { return 60.0 + (gen() % 100000) / 1000.0; };
    std::vector<double> est, tru;
    for (int i = 0; i < 1000; ++i) {
        est.push_back(u());
        tru.push_back(u());
    }
    CHECK(error1(est, tru) == doctest::Approx(oracle::error1(est, tru)).epsilon(1e-10));
    CHECK(error2(est, tru) == doctest::Approx(oracle::error2(est, tru)).epsilon(1e-10));
    const auto ba = bland_altman(est, tru);
    const auto ob = oracle::bland_altman(est, tru);
    CHECK(ba.mu == doctest::Approx(ob.mu).epsilon(1e-10));
    CHECK(ba.sigma == doctest::Approx(ob.sigma).epsilon(1e-10));
    CHECK(ba.loa_low == doctest::Approx(ob.lo).epsilon(1e-10));
    CHECK(ba.loa_high == doctest::Approx(ob.hi).epsilon(1e-10));
    CHECK(pearson(est, tru) == doctest::Approx(oracle::pearson(est, tru)).epsilon(1e-10));
}
