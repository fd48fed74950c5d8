#include "waverc/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace waverc {

SoftmaxNormalizer::SoftmaxNormalizer(double tau) {
    if (tau <= 0.0) throw ConfigError("SoftmaxNormalizer: tau must be > 0");
    decay_ = std::exp(-1.0 / tau);
}

double SoftmaxNormalizer::push(double value) {
    accum_ = accum_ * decay_ + std::exp(value);
    mean_ = mean_ * decay_ + (1.0 - decay_) * value;
    const double s = std::log(accum_);
    if (s <= 1e-9) {
        degenerate_ = true;
        return 0.0;
    }
    return (value - mean_) / s;
}

std::vector<double> softmax_normalize(const std::vector<double>& series, double tau) {
    SoftmaxNormalizer norm(tau);
    std::vector<double> out;
    out.reserve(series.size());
    for (double v : series) out.push_back(norm.push(v));
    return out;
}

SyncErrors sync_errors(const std::vector<double>& p_norm,
                       const std::vector<double>& t_norm, const SyncConfig& cfg) {
    if (p_norm.size() != t_norm.size() || p_norm.size() < 2)
        throw ConfigError("sync_errors: sequences must have equal length >= 2");
    SyncErrors e;
    long i_early = 0;
    long i_late = 0;
    for (size_t t = 1; t < t_norm.size(); ++t) {
        if (t_norm[t] > std::max(p_norm[t], 0.0)) {
            const double dt_slope = t_norm[t] - t_norm[t - 1];
            const double dp_slope = p_norm[t] - p_norm[t - 1];
            if (dt_slope > 0.0) {
                if (dp_slope < 0.0) ++i_early;
            } else if (dt_slope < 0.0) {
                if (dp_slope > 0.0) ++i_late;
            }
        }
        e.early += cfg.delta_early * static_cast<double>(i_early);
        e.late += cfg.delta_late * static_cast<double>(i_late);
    }
    return e;
}

AdaptCResult adapt_c(SpeedField& c, double eps_early, double eps_late,
                     const SyncConfig& cfg, const GridSpec& spec) {
    AdaptCResult res;
    if (std::abs(c.scale_accum) >= cfg.threshold_sum - 1e-12) return res;

    const double factor = (eps_early - eps_late < cfg.threshold) ? 1.0 + cfg.delta_c
                                                                 : 1.0 - cfg.delta_c;
    res.decision = factor > 1.0 ? +1 : -1;
    c.scale_accum += res.decision * cfg.delta_c;
    for (double& v : c.values.data()) {
        v *= factor;
        if (v > spec.c_ref) {
            v = spec.c_ref;
            res.clipped = true;
        }
    }
    return res;
}

Eigen::VectorXd contribution_scores(const StateTrace& trace, const Readout& r,
                                    const std::vector<double>& target,
                                    int win_begin, int win_end) {
    if (win_begin >= win_end || win_begin < 0 || win_end > trace.length() ||
        win_end > static_cast<int>(target.size()))
        throw ConfigError("contribution_scores: empty or out-of-range window");

    const int len = win_end - win_begin;
    const int np = static_cast<int>(r.w_out.size());
    Eigen::VectorXd err(len);
    for (int t = 0; t < len; ++t) {
        const auto p = trace.p.row(win_begin + t).transpose();
        err[t] = r.predict(p) - target[static_cast<size_t>(win_begin + t)];
    }
    const double base = err.squaredNorm() / len;

    Eigen::VectorXd scores(np);
    for (int i = 0; i < np; ++i) {
        const double wi = r.w_out[i];
        if (wi == 0.0) {
            scores[i] = 0.0;
            continue;
        }
        double acc = 0.0;
        for (int t = 0; t < len; ++t) {
            const double m = err[t] - wi * trace.p(win_begin + t, i);
            acc += m * m;
        }
        scores[i] = acc / len - base;
    }
    return scores;
}

Eigen::VectorXd contribution_scores_resim(const ReservoirModel& model,
                                          const Eigen::VectorXd& start_state,
                                          const std::vector<double>& inputs,
                                          const Readout& r,
                                          const std::vector<double>& target,
                                          std::uint64_t noise_seed) {
    const int np = model.spec.p_count();
    const int len = static_cast<int>(std::min(inputs.size(), target.size()));
    if (len < 1) throw ConfigError("contribution_scores_resim: empty window");

    const auto window_mse = [&](int masked) {
        ReservoirRunner runner(model, noise_seed);
        Eigen::VectorXd x0 = start_state;
        if (masked >= 0) x0[masked] = 0.0;
        runner.set_state(x0);
        double acc = 0.0;
        for (int t = 0; t < len; ++t) {
            runner.step(inputs[static_cast<size_t>(t)]);
            Eigen::VectorXd x = runner.state();
            if (masked >= 0) {
                x[masked] = 0.0;
                runner.set_state(x);
            }
            const double yhat = r.predict(x.head(np));
            const double e = yhat - target[static_cast<size_t>(t)];
            acc += e * e;
        }
        return acc / len;
    };

    const double base = window_mse(-1);
    Eigen::VectorXd scores(np);
    for (int i = 0; i < np; ++i) scores[i] = window_mse(i) - base;
    return scores;
}

DsUpdate adapt_k(DampingField& k, const Eigen::VectorXd& scores, const DsConfig& cfg) {
    cfg.validate();
    const int np = static_cast<int>(scores.size());
    const int n = k.kx.n();
    if (np != n * n) throw ConfigError("adapt_k: score dimension mismatch");
    if (cfg.n_select > np) throw ConfigError("adapt_k: n_select exceeds neuron count");

    std::vector<int> order(static_cast<size_t>(np));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    DsUpdate upd;
    upd.boosted.assign(order.begin(), order.begin() + cfg.n_select);
    upd.damped.assign(order.end() - cfg.n_select, order.end());
    std::sort(upd.damped.begin(), upd.damped.end());

    const auto apply = [&](const std::vector<int>& neurons, double dk) {
        for (int flat : neurons) {
            const int i = flat / n;
            const int j = flat % n;
            if (j > 0)
                k.kx.at(i, j - 1) = std::clamp(k.kx.at(i, j - 1) + dk, k.k_min, k.k_max);
            if (i > 0)
                k.ky.at(i - 1, j) = std::clamp(k.ky.at(i - 1, j) + dk, k.k_min, k.k_max);
        }
    };
    apply(upd.boosted, -cfg.sign * cfg.delta_k);
    apply(upd.damped, +cfg.sign * cfg.delta_k);
    return upd;
}

AdaptiveRunResult adaptive_run(const ReservoirModel& model, const Readout& r,
                               const Signal& signal, const SyncConfig& sync,
                               const DsConfig& ds, int horizon_steps,
                               std::uint64_t noise_seed) {
    sync.validate();
    ds.validate();
    const int T = signal.length();
    if (T < 2) throw ConfigError("adaptive_run: signal too short");
    const auto target = make_target(signal, horizon_steps);
    const int target_len = static_cast<int>(target.size());
    const int np = model.spec.p_count();
    const int L = sync.update_step;

    AdaptiveRunResult res;
    res.model = model;
    res.prediction.resize(static_cast<size_t>(T));

    ReservoirRunner runner(res.model, noise_seed);
    SoftmaxNormalizer pred_norm(sync.tau_softmax);
    SoftmaxNormalizer targ_norm(sync.tau_softmax);

    StateTrace window_trace;
    window_trace.p.resize(L, np);
    std::vector<double> window_inputs;
    std::vector<double> pn_buf, tn_buf, tgt_buf;
    Eigen::VectorXd window_start_state = runner.state();
    int window_index = 0;
    int filled = 0;

    for (int t = 0; t < T; ++t) {
        runner.step(signal.samples[static_cast<size_t>(t)]);
        const double yhat = r.predict(runner.state().head(np));
        res.prediction[static_cast<size_t>(t)] = yhat;

        if (t < target_len) {
            window_trace.p.row(filled) = runner.state().head(np);
            window_inputs.push_back(signal.samples[static_cast<size_t>(t)]);
            pn_buf.push_back(pred_norm.push(yhat));
            tn_buf.push_back(targ_norm.push(target[static_cast<size_t>(t)]));
            tgt_buf.push_back(target[static_cast<size_t>(t)]);
            ++filled;
        }

        const bool window_done = ((t + 1) % L == 0) || (t == T - 1 && filled > 0);
        if (!window_done || filled < 2) continue;

        WindowRecord rec;
        rec.window = window_index++;
        rec.degenerate_norm = pred_norm.degenerate() || targ_norm.degenerate();
        pred_norm.clear_degenerate();
        targ_norm.clear_degenerate();

        // window MSE for the log
        double mse = 0.0;
        for (int s = 0; s < filled; ++s) {
            const double e = r.predict(window_trace.p.row(s).transpose()) - tgt_buf[static_cast<size_t>(s)];
            mse += e * e;
        }
        rec.window_mse = mse / filled;

        bool fields_changed = false;
        if (sync.enabled) {
            const SyncErrors eps = sync_errors(pn_buf, tn_buf, sync);
            rec.eps_early = eps.early;
            rec.eps_late = eps.late;
            const AdaptCResult cres =
                adapt_c(res.model.c, eps.early, eps.late, sync, res.model.spec);
            rec.c_decision = cres.decision;
            rec.clipped = cres.clipped;
            fields_changed |= cres.decision != 0;
        }
        rec.delta_sum = res.model.c.scale_accum;

        if (ds.enabled) {
            const int score_len = std::min(ds.window, filled);
            Eigen::VectorXd scores;
            if (ds.mask_mode == MaskMode::Readout) {
                StateTrace view;
                view.p = window_trace.p.topRows(filled);
                scores = contribution_scores(view, r, tgt_buf, filled - score_len, filled);
            } else {
                std::vector<double> in_tail(window_inputs.end() - score_len, window_inputs.end());
                std::vector<double> tgt_tail(tgt_buf.end() - score_len, tgt_buf.end());
                scores = contribution_scores_resim(res.model, window_start_state, in_tail, r,
                                                   tgt_tail, derive_seed(noise_seed, 0x7u));
            }
            const DsUpdate upd = adapt_k(res.model.k, scores, ds);
            rec.boosted = upd.boosted;
            rec.damped = upd.damped;
            fields_changed = true;
        }

        if (fields_changed) {
            // in-place rebuild; the runner keeps its state and noise stream
            res.model.rebuild_weights();
        }

        res.log.windows.push_back(std::move(rec));
        filled = 0;
        window_inputs.clear();
        pn_buf.clear();
        tn_buf.clear();
        tgt_buf.clear();
        window_start_state = runner.state();
    }
    return res;
}

}  // namespace waverc
