#pragma once

#include <cstdint>
#include <vector>

#include "waverc/rng.hpp"
#include "waverc/signals.hpp"
#include "waverc/wave.hpp"

namespace waverc {

enum class WeightsKind { Wave, Random };

/// Parameters of the random-baseline connectivity matrix. The matrix itself
/// is rebuilt from these on load, like the wave weights are rebuilt from
/// the fields.
struct RandomWeightsSpec {
    double density = 0.01;
    double spectral_radius = 0.95;
    std::uint64_t matrix_seed = 0;
};

/// Leaky-tanh reservoir over FDTD-derived (or random-baseline) weights.
/// Immutable once built; rebuild_weights() re-derives w from the stored
/// fields after they have been adapted.
struct ReservoirModel {
    GridSpec spec;
    SpeedField c;
    DampingField k;
    double alpha = 0.03;
    double input_gain = 1.0;
    double noise_amp = 1e-3;
    std::uint64_t input_seed = 0;

    WeightsKind kind = WeightsKind::Wave;
    RandomWeightsSpec random;

    SparseMat w;             // (A - (1-alpha) I)/alpha, dim 3n^2
    Eigen::VectorXd w_in;    // nonzero only on the first row of p-neurons

    void rebuild_weights();
};

ReservoirModel init_reservoir(const GridSpec& spec, const SpeedField& c,
                              const DampingField& k, double alpha,
                              double input_gain, double noise_amp,
                              std::uint64_t input_seed);

/// Per-step state snapshots. p rows are always kept (readout and the DS
/// mechanism consume them); full states only when requested.
struct StateTrace {
    Eigen::MatrixXd p;       // steps x n^2
    Eigen::MatrixXd full;    // steps x 3n^2, empty unless record_full
    std::vector<double> inputs;

    int length() const { return static_cast<int>(p.rows()); }
};

/// Owns the running state and the per-run noise stream. One runner per
/// concurrent run; the model itself is shared read-only.
class ReservoirRunner {
public:
    ReservoirRunner(const ReservoirModel& model, std::uint64_t noise_seed);

    /// x' = (1-alpha) x + alpha tanh(w_in s + W x + b), b ~ U[-a, a] fresh.
    void step(double input);

    const Eigen::VectorXd& state() const { return x_; }
    void set_state(const Eigen::VectorXd& x) { x_ = x; }

private:
    const ReservoirModel* model_;
    Rng noise_;
    Eigen::VectorXd x_;
    Eigen::VectorXd pre_;
};

StateTrace run_reservoir(const ReservoirModel& model, const Signal& signal,
                         std::uint64_t noise_seed, bool record_full = false);

}  // namespace waverc
