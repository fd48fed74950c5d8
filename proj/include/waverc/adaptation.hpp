#pragma once

#include <cstdint>
#include <vector>

#include "waverc/readout.hpp"

namespace waverc {

struct SyncConfig {
    bool enabled = true;
    int update_step = 200;
    double threshold = 100.0;
    double delta_c = 0.02;
    double threshold_sum = 0.10;
    double delta_early = 1.0;
    double delta_late = 1.0;
    double tau_softmax = 500.0;  // steps

    void validate() const {
        if (update_step < 2) throw ConfigError("SyncConfig: update_step must be >= 2");
        if (delta_c <= 0.0) throw ConfigError("SyncConfig: delta_c must be > 0");
        if (threshold_sum <= 0.0 || threshold_sum >= 1.0)
            throw ConfigError("SyncConfig: threshold_sum must be in (0, 1)");
        if (tau_softmax <= 0.0) throw ConfigError("SyncConfig: tau_softmax must be > 0");
    }
};

enum class MaskMode { Readout, Resim };

struct DsConfig {
    bool enabled = true;
    int n_select = 40;
    double delta_k = 0.002;
    int window = 200;
    MaskMode mask_mode = MaskMode::Readout;
    int sign = +1;  // +1: helpful neurons get lower k; -1 flips the mapping

    void validate() const {
        if (n_select < 1) throw ConfigError("DsConfig: n_select must be >= 1");
        if (delta_k <= 0.0) throw ConfigError("DsConfig: delta_k must be > 0");
        if (window < 1) throw ConfigError("DsConfig: window must be >= 1");
    }
};

/// Streaming realization of the moving-average + log-sum-exp normalizer:
///   E(t) = E(t-1) exp(-1/tau) + exp(s(t)),  S(t) = ln E(t)
///   M(t) = EMA of s with the same tau
///   out(t) = (s(t) - M(t)) / S(t), or 0 (flagged) when S <= 1e-9.
class SoftmaxNormalizer {
public:
    explicit SoftmaxNormalizer(double tau);

    double push(double value);
    bool degenerate() const { return degenerate_; }
    void clear_degenerate() { degenerate_ = false; }

private:
    double decay_;
    double accum_ = 0.0;  // E
    double mean_ = 0.0;   // M
    bool degenerate_ = false;
};

/// Batch form over a whole series (fresh normalizer state).
std::vector<double> softmax_normalize(const std::vector<double>& series, double tau);

struct SyncErrors {
    double early = 0.0;
    double late = 0.0;
};

/// Slope-opposition counters accumulated over a window of normalized
/// prediction/target pairs.
SyncErrors sync_errors(const std::vector<double>& p_norm,
                       const std::vector<double>& t_norm, const SyncConfig& cfg);

struct AdaptCResult {
    int decision = 0;   // +1 sped up, -1 slowed down, 0 no-op
    bool clipped = false;
};

/// Multiplies every field entry by (1 +/- delta_c) while |scale_accum| stays
/// under threshold_sum; values are clipped at c_ref.
AdaptCResult adapt_c(SpeedField& c, double eps_early, double eps_late,
                     const SyncConfig& cfg, const GridSpec& spec);

/// Output-side masking scores over [win_begin, win_end): score[i] is the MSE
/// increase caused by removing neuron i's readout contribution. Positive
/// means the neuron helps.
Eigen::VectorXd contribution_scores(const StateTrace& trace, const Readout& r,
                                    const std::vector<double>& target,
                                    int win_begin, int win_end);

/// Re-simulation variant: neuron i is zeroed inside the reservoir while the
/// window is re-run from `start_state`. Quadratically expensive; small n only.
Eigen::VectorXd contribution_scores_resim(const ReservoirModel& model,
                                          const Eigen::VectorXd& start_state,
                                          const std::vector<double>& inputs,
                                          const Readout& r,
                                          const std::vector<double>& target,
                                          std::uint64_t noise_seed);

struct DsUpdate {
    std::vector<int> boosted;  // p-neuron flat indices whose neighbors got -delta_k
    std::vector<int> damped;
};

/// Adjusts kx/ky left of and below the selected p-neurons by +/- delta_k,
/// clamped to [k_min, k_max].
DsUpdate adapt_k(DampingField& k, const Eigen::VectorXd& scores, const DsConfig& cfg);

struct WindowRecord {
    int window = 0;
    double eps_early = 0.0;
    double eps_late = 0.0;
    int c_decision = 0;
    double delta_sum = 0.0;
    bool clipped = false;
    bool degenerate_norm = false;
    std::vector<int> boosted;
    std::vector<int> damped;
    double window_mse = 0.0;
};

struct AdaptationLog {
    std::vector<WindowRecord> windows;
};

struct AdaptiveRunResult {
    std::vector<double> prediction;
    AdaptationLog log;
    ReservoirModel model;  // fields after adaptation
};

/// Streams through the signal, adapting c and k every sync.update_step steps
/// and rebuilding W in place; the reservoir state survives each rebuild.
AdaptiveRunResult adaptive_run(const ReservoirModel& model, const Readout& r,
                               const Signal& signal, const SyncConfig& sync,
                               const DsConfig& ds, int horizon_steps,
                               std::uint64_t noise_seed);

}  // namespace waverc
