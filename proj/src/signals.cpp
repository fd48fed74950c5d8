#include "waverc/signals.hpp"

#include <algorithm>
#include <cmath>

#include "waverc/rng.hpp"

namespace waverc {

namespace {

void add_pulse(std::vector<double>& s, double dt, double center, double width) {
    const double half = width / 2.0;
    const int lo = std::max(0, static_cast<int>(std::ceil((center - half) / dt)));
    const int hi = std::min(static_cast<int>(s.size()) - 1,
                            static_cast<int>(std::floor((center + half) / dt)));
    for (int t = lo; t <= hi; ++t) {
        const double u = t * dt - center;
        const double v = 0.5 * (1.0 + std::cos(2.0 * M_PI * u / (2.0 * half)));
        s[static_cast<size_t>(t)] = std::max(s[static_cast<size_t>(t)], v);
    }
}

}  // namespace

void DatasetConfig::validate() const {
    if (n_samples < 0) throw ConfigError("DatasetConfig: n_samples must be >= 0");
    if (bpm_low <= 0.0 || bpm_high < bpm_low)
        throw ConfigError("DatasetConfig: invalid bpm range");
    if (nonrhythmic_fraction < 0.0 || nonrhythmic_fraction > 1.0)
        throw ConfigError("DatasetConfig: nonrhythmic_fraction outside [0, 1]");
    if (duration_s <= 0.0 || dt_s <= 0.0 || pulse_width_s <= 0.0)
        throw ConfigError("DatasetConfig: durations must be positive");
}

Signal gen_beat_signal(double interval_s, double duration_s, double dt_s,
                       double pulse_width_s, double phase_s, std::uint64_t /*seed*/) {
    if (pulse_width_s <= 0.0 || pulse_width_s >= interval_s)
        throw ConfigError("gen_beat_signal: pulse width must be in (0, interval)");
    if (phase_s < 0.0 || phase_s >= interval_s)
        throw ConfigError("gen_beat_signal: phase must be in [0, interval)");

    Signal sig;
    sig.dt = dt_s;
    sig.interval_s = interval_s;
    sig.phase_s = phase_s;
    sig.samples.assign(static_cast<size_t>(std::floor(duration_s / dt_s)), 0.0);
    for (int m = 0;; ++m) {
        const double center = phase_s + m * interval_s;
        if (center > duration_s) break;
        add_pulse(sig.samples, dt_s, center, pulse_width_s);
        sig.beat_times.push_back(center);
    }
    return sig;
}

Signal gen_nonrhythmic(double duration_s, double dt_s, std::uint64_t seed,
                       double pulse_width_s) {
    Signal sig;
    sig.dt = dt_s;
    sig.samples.assign(static_cast<size_t>(std::floor(duration_s / dt_s)), 0.0);
    Rng rng(seed);
    double t = rng.uniform(0.2, 1.5);
    while (t <= duration_s) {
        add_pulse(sig.samples, dt_s, t, pulse_width_s);
        t += rng.uniform(0.2, 1.5);
    }
    return sig;
}

Dataset gen_dataset(const DatasetConfig& cfg) {
    cfg.validate();
    Dataset ds;
    ds.config = cfg;
    const int n_rhythmic =
        static_cast<int>(std::ceil((1.0 - cfg.nonrhythmic_fraction) * cfg.n_samples));
    Rng rng(cfg.seed);
    for (int i = 0; i < cfg.n_samples; ++i) {
        if (i < n_rhythmic) {
            const double bpm = rng.uniform(cfg.bpm_low, cfg.bpm_high);
            const double interval = 60.0 / bpm;
            const double phase = rng.uniform(0.0, interval);
            ds.samples.push_back(gen_beat_signal(interval, cfg.duration_s, cfg.dt_s,
                                                 cfg.pulse_width_s, phase));
        } else {
            ds.samples.push_back(
                gen_nonrhythmic(cfg.duration_s, cfg.dt_s, rng.next_u64(), cfg.pulse_width_s));
        }
    }
    return ds;
}

std::vector<Signal> test_suite(double dt_s) {
    const double intervals[] = {0.360, 0.500, 0.720, 1.000, 1.440, 2.556};
    std::vector<Signal> suite;
    for (double iv : intervals)
        suite.push_back(gen_beat_signal(iv, 30.0, dt_s, 0.06, 0.3 * iv));
    return suite;
}

}  // namespace waverc
