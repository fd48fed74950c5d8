#pragma once

#include <cstdint>
#include <vector>

#include "waverc/errors.hpp"

namespace waverc {

/// Uniformly sampled amplitude envelope in [0, 1]. Rhythmic signals carry
/// their exact pulse-center times and inter-beat interval; non-rhythmic
/// ones have interval_s == 0 and no beat annotations.
struct Signal {
    std::vector<double> samples;
    double dt = 0.006;
    std::vector<double> beat_times;  // seconds, strictly increasing
    double interval_s = 0.0;         // 0 when non-rhythmic
    double phase_s = 0.0;

    int length() const { return static_cast<int>(samples.size()); }
    double duration() const { return samples.size() * dt; }
};

struct DatasetConfig {
    int n_samples = 1000;
    double bpm_low = 66.0;
    double bpm_high = 168.0;
    double nonrhythmic_fraction = 0.25;
    double duration_s = 30.0;
    double dt_s = 0.006;
    double pulse_width_s = 0.06;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Dataset {
    std::vector<Signal> samples;
    DatasetConfig config;
};

/// Hann pulses of peak amplitude 1, width pulse_width_s, centered at
/// phase_s + m*interval_s.
Signal gen_beat_signal(double interval_s, double duration_s, double dt_s,
                       double pulse_width_s, double phase_s, std::uint64_t seed = 0);

/// Aperiodic pulse train: same pulse shape, i.i.d. inter-onset gaps
/// U[0.2 s, 1.5 s]. No beat annotations.
Signal gen_nonrhythmic(double duration_s, double dt_s, std::uint64_t seed,
                       double pulse_width_s = 0.06);

Dataset gen_dataset(const DatasetConfig& cfg);

/// Six fixed test signals with inter-beat intervals
/// {360, 500, 720, 1000, 1440, 2556} ms. The 2556 ms outlier sits outside
/// the trained BPM range; the rest span it.
std::vector<Signal> test_suite(double dt_s = 0.006);

}  // namespace waverc
