#pragma once

#include <cstdint>
#include <vector>

#include "waverc/reservoir.hpp"

namespace waverc {

/// Linear output layer over the p-neurons.
struct Readout {
    Eigen::VectorXd w_out;
    double bias = 0.0;

    explicit Readout(int p_dim) : w_out(Eigen::VectorXd::Zero(p_dim)) {}
    Readout() = default;

    double predict(const Eigen::Ref<const Eigen::VectorXd>& p) const {
        return w_out.dot(p) + bias;
    }
};

struct TrainConfig {
    double learning_rate = 0.01;
    int epochs = 20;
    int horizon_steps = 33;        // 198 ms at the 6 ms step
    int warmup_steps = 100;        // initial transient excluded from updates
    double early_stop_rel = 1e-3;  // stop when epoch MSE improves less than this; <= 0 disables
    std::uint64_t shuffle_seed = 0;
    std::uint64_t noise_seed = 0;

    void validate() const {
        if (learning_rate <= 0.0) throw ConfigError("TrainConfig: learning_rate must be > 0");
        if (horizon_steps < 0) throw ConfigError("TrainConfig: horizon_steps must be >= 0");
        if (epochs < 1) throw ConfigError("TrainConfig: epochs must be >= 1");
    }
};

/// target[t] = signal[t + horizon_steps]; the trailing horizon is dropped.
std::vector<double> make_target(const Signal& signal, int horizon_steps);

/// One SGD pass in time order. Per-sample update
///   w_out -= lr * 2 * (yhat - y) * p,   bias likewise.
/// Returns the epoch MSE accumulated from pre-update errors. Steps before
/// `warmup` contribute neither updates nor loss.
double sgd_epoch(Readout& r, const StateTrace& trace, const std::vector<double>& target,
                 double lr, int warmup = 0);

struct TrainResult {
    Readout readout;
    std::vector<double> loss_curve;  // mean MSE per epoch
};

TrainResult train(const ReservoirModel& model, const Dataset& dataset,
                  const TrainConfig& cfg, Readout* resume_from = nullptr);

}  // namespace waverc
