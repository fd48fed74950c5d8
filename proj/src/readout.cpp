#include "waverc/readout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace waverc {

std::vector<double> make_target(const Signal& signal, int horizon_steps) {
    const int len = signal.length();
    if (horizon_steps >= len)
        throw ConfigError("make_target: horizon must be shorter than the signal");
    std::vector<double> target(static_cast<size_t>(len - horizon_steps));
    for (size_t t = 0; t < target.size(); ++t)
        target[t] = signal.samples[t + static_cast<size_t>(horizon_steps)];
    return target;
}

double sgd_epoch(Readout& r, const StateTrace& trace, const std::vector<double>& target,
                 double lr, int warmup) {
    const int len = static_cast<int>(target.size());
    if (len > trace.length()) throw ConfigError("sgd_epoch: target longer than trace");

    double sum_sq = 0.0;
    int count = 0;
    for (int t = warmup; t < len; ++t) {
        const auto p = trace.p.row(t).transpose();
        const double err = r.predict(p) - target[static_cast<size_t>(t)];
        if (!std::isfinite(err))
            throw NumericalError("sgd_epoch: non-finite loss at step " + std::to_string(t));
        sum_sq += err * err;
        ++count;
        const double g = lr * 2.0 * err;
        r.w_out.noalias() -= g * p;
        r.bias -= g;
    }
    return count > 0 ? sum_sq / count : 0.0;
}

TrainResult train(const ReservoirModel& model, const Dataset& dataset,
                  const TrainConfig& cfg, Readout* resume_from) {
    cfg.validate();
    if (dataset.samples.empty()) throw ConfigError("train: empty dataset");

    TrainResult res;
    res.readout = resume_from ? *resume_from : Readout(model.spec.p_count());
    if (res.readout.w_out.size() != model.spec.p_count())
        throw ConfigError("train: readout dimension mismatch");

    const int n_samples = static_cast<int>(dataset.samples.size());
    std::vector<int> order(static_cast<size_t>(n_samples));
    std::iota(order.begin(), order.end(), 0);

    double prev_mse = -1.0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates with the pinned Rng, reseeded per epoch
        Rng shuffle(derive_seed(cfg.shuffle_seed, 0x5u, static_cast<std::uint64_t>(epoch)));
        for (int i = n_samples - 1; i > 0; --i) {
            const int j = static_cast<int>(shuffle.next_u64() % static_cast<std::uint64_t>(i + 1));
            std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
        }

        double mse_sum = 0.0;
        for (int idx : order) {
            const Signal& sig = dataset.samples[static_cast<size_t>(idx)];
            const auto run_seed = derive_seed(cfg.noise_seed, static_cast<std::uint64_t>(epoch),
                                              static_cast<std::uint64_t>(idx));
            const StateTrace trace = run_reservoir(model, sig, run_seed);
            const auto target = make_target(sig, cfg.horizon_steps);
            mse_sum += sgd_epoch(res.readout, trace, target, cfg.learning_rate, cfg.warmup_steps);
        }
        const double epoch_mse = mse_sum / n_samples;
        res.loss_curve.push_back(epoch_mse);

        if (cfg.early_stop_rel > 0.0 && prev_mse >= 0.0 &&
            epoch_mse > (1.0 - cfg.early_stop_rel) * prev_mse)
            break;
        prev_mse = epoch_mse;
    }
    return res;
}

}  // namespace waverc
