#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>

#include "waverc/adaptation.hpp"
#include "waverc/signals.hpp"

namespace waverc {

/// Field-initialization parameters (speed gradient and noise, damping fill).
struct FieldInitConfig {
    double c0 = 300.0;
    double grad_per_row = 0.0;  // 0 -> default -250/n
    double c_noise_amp = 0.8;
    double k0 = 0.0;
    double k_min = -0.01;
    double k_max = 0.1;
    double k_sign = 1.0;

    double effective_grad(int n) const {
        return grad_per_row != 0.0 ? grad_per_row : -250.0 / n;
    }
};

struct ReservoirConfig {
    double alpha = 0.03;
    // Keeps the drive in the reservoir's near-linear regime; unit-scale input
    // saturates the tanh and washes out the phase-carrying resonances.
    double input_gain = 0.1;
    // Also the SGD regularizer: per-step state noise caps the effective
    // readout norm the same way ridge regression would.
    double noise_amp = 3e-3;
};

struct EvalConfig {
    double min_height_frac = 0.3;     // of the window max
    double min_separation_frac = 0.5; // of the target interval
    int settle_steps = 500;
};

struct BaselineConfig {
    double density = 0.002;
    double spectral_radius = 0.3;
};

struct SeedConfig {
    std::uint64_t field_seed = 1;
    std::uint64_t input_seed = 2;
    std::uint64_t noise_seed = 3;
    std::uint64_t data_seed = 4;
    std::uint64_t shuffle_seed = 5;
};

/// Everything a reproducible experiment needs. Unknown keys in the file are
/// rejected; the fully-resolved form is written next to every run's outputs.
struct ExperimentConfig {
    GridSpec grid;
    FieldInitConfig fields;
    ReservoirConfig reservoir;
    TrainConfig train;
    SyncConfig sync;
    DsConfig ds;
    DatasetConfig dataset;
    EvalConfig eval;
    BaselineConfig baseline;
    SeedConfig seeds;

    void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

/// FNV-1a over the canonical serialized config, for provenance records.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace waverc
