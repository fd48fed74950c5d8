#pragma once

#include <vector>

#include "waverc/readout.hpp"

namespace waverc {

/// Local maxima above min_height, greedily suppressing lower neighbors
/// within min_separation_s, refined by 3-point parabolic interpolation.
std::vector<double> detect_peaks(const std::vector<double>& series, double dt,
                                 double min_height, double min_separation_s);

struct OffsetStats {
    std::vector<double> ratios;  // (t_target - t_pred)/interval, positive = early
    double mean = 0.0;
    double variance = 0.0;
    int matched_count = 0;
    int missed_count = 0;
    int spurious_count = 0;
};

/// Nearest-neighbor matching gated at half the target interval.
OffsetStats time_offset_ratio(const std::vector<double>& pred_peaks,
                              const std::vector<double>& target_peaks,
                              double target_interval_s);

/// Peak times of the horizon-advanced target series: the annotated beat times
/// shifted earlier by horizon_steps*dt, dropping any that land before t=0.
/// Prediction peaks are matched against these, so a readout that merely copies
/// its input scores a lag of one full horizon rather than zero.
std::vector<double> target_peak_times(const Signal& sig, int horizon_steps);

struct IntervalErrors {
    double mean_abs_error_s = 0.0;
    double variance = 0.0;
    bool defined = false;
};

IntervalErrors interval_errors(const std::vector<double>& pred_peaks,
                               double target_interval_s);

struct ResonanceMap {
    Grid2d dominant_freq;                      // Hz per p-neuron
    std::vector<std::vector<double>> spectra;  // neuron-major magnitudes, optional
    double freq_resolution = 0.0;              // Hz per FFT bin
};

/// Runs the model noise-free on the excitation, discards settle_steps and
/// FFTs every p-neuron (Hann window, zero-padded to a power of two).
ResonanceMap resonance_map(const ReservoirModel& model, const Signal& excitation,
                           int settle_steps, bool keep_spectra = false);

/// Same analysis over an already-recorded trace.
ResonanceMap resonance_map_from_trace(const StateTrace& trace, int n, double dt,
                                      int settle_steps, bool keep_spectra = false);

/// Random sparse baseline with the wave model's input convention and alpha.
ReservoirModel random_reservoir(const GridSpec& spec, double density,
                                double spectral_radius, std::uint64_t seed,
                                const ReservoirModel& like);

/// Lag (seconds) maximizing the mean-removed cross-correlation of pred
/// against target; positive = pred behind target.
double cross_correlation_lag(const std::vector<double>& pred,
                             const std::vector<double>& target, double dt,
                             double max_lag_s);

}  // namespace waverc
