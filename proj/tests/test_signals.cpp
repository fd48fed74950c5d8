#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "waverc/signals.hpp"

using namespace waverc;

TEST_CASE("gen_beat_signal: interval 0.5 s, phase 0 over 30 s") {
    const auto sig = gen_beat_signal(0.5, 30.0, 0.006, 0.06, 0.0);
    REQUIRE(sig.beat_times.size() == 61);  // centers at 0, 0.5, ..., 30.0
    for (size_t m = 0; m < sig.beat_times.size(); ++m)
        CHECK(sig.beat_times[m] == doctest::Approx(0.5 * m).epsilon(1e-12));
    CHECK(sig.length() == 5000);
    CHECK(sig.interval_s == 0.5);
    CHECK(*std::max_element(sig.samples.begin(), sig.samples.end()) <= 1.0);
    CHECK(*std::min_element(sig.samples.begin(), sig.samples.end()) >= 0.0);
}

TEST_CASE("gen_beat_signal: 120 BPM sits inside the training range") {
    const double interval = 60.0 / 120.0;
    CHECK(interval == 0.5);
    CHECK(120.0 >= 66.0);
    CHECK(120.0 <= 168.0);
    CHECK_NOTHROW(gen_beat_signal(interval, 30.0, 0.006, 0.06, 0.1));
}

TEST_CASE("gen_beat_signal: sample argmax of each pulse lands within dt of the center") {
    const auto sig = gen_beat_signal(0.72, 30.0, 0.006, 0.06, 0.31);
    for (double center : sig.beat_times) {
        const int lo = std::max(0, static_cast<int>((center - 0.1) / sig.dt));
        const int hi = std::min(sig.length() - 1, static_cast<int>((center + 0.1) / sig.dt));
        int best = lo;
        for (int t = lo; t <= hi; ++t)
            if (sig.samples[static_cast<size_t>(t)] > sig.samples[static_cast<size_t>(best)])
                best = t;
        CHECK(std::abs(best * sig.dt - center) <= sig.dt + 1e-12);
    }
}

TEST_CASE("gen_beat_signal precondition errors") {
    CHECK_THROWS_AS(gen_beat_signal(0.5, 30.0, 0.006, 0.5, 0.0), ConfigError);
    CHECK_THROWS_AS(gen_beat_signal(0.5, 30.0, 0.006, 0.06, 0.5), ConfigError);
}

TEST_CASE("gen_nonrhythmic: amplitude bounds and seed variation") {
    const auto a = gen_nonrhythmic(30.0, 0.006, 1);
    const auto b = gen_nonrhythmic(30.0, 0.006, 2);
    CHECK(a.beat_times.empty());
    CHECK(a.interval_s == 0.0);
    CHECK(*std::max_element(a.samples.begin(), a.samples.end()) <= 1.0);
    CHECK(*std::min_element(a.samples.begin(), a.samples.end()) >= 0.0);
    CHECK(a.samples != b.samples);
    CHECK(gen_nonrhythmic(30.0, 0.006, 1).samples == a.samples);
}

TEST_CASE("gen_nonrhythmic: no secondary autocorrelation peak across 20 seeds") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto sig = gen_nonrhythmic(30.0, 0.006, seed);
        const int len = sig.length();
        const double mean =
            std::accumulate(sig.samples.begin(), sig.samples.end(), 0.0) / len;
        const auto acorr = [&](int lag) {
            double acc = 0.0;
            for (int t = 0; t + lag < len; ++t)
                acc += (sig.samples[static_cast<size_t>(t)] - mean) *
                       (sig.samples[static_cast<size_t>(t + lag)] - mean);
            return acc;
        };
        const double zero_lag = acorr(0);
        const int lag_lo = static_cast<int>(0.3 / sig.dt);
        const int lag_hi = static_cast<int>(1.0 / sig.dt);
        for (int lag = lag_lo; lag <= lag_hi; ++lag)
            CHECK(acorr(lag) < 0.5 * zero_lag);
    }
}

TEST_CASE("gen_dataset: split arithmetic and interval range") {
    DatasetConfig cfg;
    cfg.n_samples = 4;
    cfg.seed = 9;
    const auto ds = gen_dataset(cfg);
    REQUIRE(ds.samples.size() == 4);
    int rhythmic = 0;
    for (const auto& s : ds.samples)
        if (s.interval_s > 0.0) ++rhythmic;
    CHECK(rhythmic == 3);  // ceil(0.75 * 4)

    DatasetConfig big;
    big.n_samples = 40;
    big.seed = 10;
    const auto ds2 = gen_dataset(big);
    for (const auto& s : ds2.samples) {
        if (s.interval_s == 0.0) continue;
        CHECK(s.interval_s >= 60.0 / 168.0 - 1e-12);
        CHECK(s.interval_s <= 60.0 / 66.0 + 1e-12);
    }
    // replay-identical
    const auto ds3 = gen_dataset(big);
    for (size_t i = 0; i < ds2.samples.size(); ++i)
        CHECK(ds2.samples[i].samples == ds3.samples[i].samples);
}

TEST_CASE("gen_dataset: paper defaults split 750/250 (counted without generating)") {
    // split rule only; generating 1000 full samples is exercised by the CLI tests
    const int n_rhythmic = static_cast<int>(std::ceil(0.75 * 1000));
    CHECK(n_rhythmic == 750);
    CHECK(1000 - n_rhythmic == 250);
}

TEST_CASE("test_suite: fixed six-sample construction") {
    const auto suite = test_suite();
    REQUIRE(suite.size() == 6);
    int count_2556 = 0;
    for (const auto& s : suite) {
        CHECK(s.duration() == doctest::Approx(30.0).epsilon(1e-9));
        if (std::abs(s.interval_s - 2.556) < 1e-12) ++count_2556;
    }
    CHECK(count_2556 == 1);
    CHECK(suite[0].interval_s == 0.360);
    CHECK(60.0 / suite[0].interval_s == doctest::Approx(166.67).epsilon(1e-3));
    const auto again = test_suite();
    for (size_t i = 0; i < 6; ++i) CHECK(suite[i].samples == again[i].samples);
}
