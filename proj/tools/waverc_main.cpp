#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "waverc/adaptation.hpp"
#include "waverc/config.hpp"
#include "waverc/eval.hpp"
#include "waverc/model_io.hpp"
#include "waverc/version.hpp"

using namespace waverc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    int threads = 1;
    // optional seed overrides; -1 = keep config value
    long long field_seed = -1, input_seed = -1, noise_seed = -1, data_seed = -1,
              shuffle_seed = -1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "Experiment config JSON");
    cmd->add_option("--out", o.out_dir, "Output directory");
    cmd->add_option("--threads", o.threads, "Worker threads (reserved; runs are sequential)");
    cmd->add_option("--field-seed", o.field_seed, "Override seeds.field_seed");
    cmd->add_option("--input-seed", o.input_seed, "Override seeds.input_seed");
    cmd->add_option("--noise-seed", o.noise_seed, "Override seeds.noise_seed");
    cmd->add_option("--data-seed", o.data_seed, "Override seeds.data_seed");
    cmd->add_option("--shuffle-seed", o.shuffle_seed, "Override seeds.shuffle_seed");
}

ExperimentConfig resolve_config(const CommonOpts& o) {
    ExperimentConfig cfg =
        o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
    const auto apply = [](long long v, std::uint64_t& target) {
        if (v >= 0) target = static_cast<std::uint64_t>(v);
    };
    apply(o.field_seed, cfg.seeds.field_seed);
    apply(o.input_seed, cfg.seeds.input_seed);
    apply(o.noise_seed, cfg.seeds.noise_seed);
    apply(o.data_seed, cfg.seeds.data_seed);
    apply(o.shuffle_seed, cfg.seeds.shuffle_seed);
    cfg.dataset.seed = cfg.seeds.data_seed;
    cfg.train.shuffle_seed = cfg.seeds.shuffle_seed;
    cfg.train.noise_seed = cfg.seeds.noise_seed;
    cfg.validate();
    return cfg;
}

/// Every run writes its resolved config and the tool version next to the outputs.
void write_provenance(const ExperimentConfig& cfg, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);
    json j = config_to_json(cfg);
    j["tool_version"] = kToolVersion;
    j["config_hash"] = config_hash(cfg);
    write_text_file(out_dir + "/config.json", j.dump(2) + "\n");
}

ReservoirModel model_from_config(const ExperimentConfig& cfg) {
    const auto c = init_speed_field(cfg.grid, cfg.fields.c0,
                                    cfg.fields.effective_grad(cfg.grid.n),
                                    cfg.fields.c_noise_amp, cfg.seeds.field_seed);
    auto k = init_damping_field(cfg.grid, cfg.fields.k0, cfg.fields.k_min,
                                cfg.fields.k_max);
    k.sign = cfg.fields.k_sign;
    return init_reservoir(cfg.grid, c, k, cfg.reservoir.alpha, cfg.reservoir.input_gain,
                          cfg.reservoir.noise_amp, cfg.seeds.input_seed);
}

json offset_record(const OffsetStats& st) {
    return json{{"mean_offset_ratio", st.mean},
                {"offset_variance", st.variance},
                {"matched", st.matched_count},
                {"missed", st.missed_count},
                {"spurious", st.spurious_count}};
}

struct EvalOutcome {
    std::vector<double> pred;
    OffsetStats offsets;
    IntervalErrors intervals;
};

EvalOutcome evaluate_prediction(const std::vector<double>& pred, const Signal& sig,
                                const ExperimentConfig& cfg) {
    EvalOutcome out;
    out.pred = pred;
    double peak = 0.0;
    for (double v : pred) peak = std::max(peak, v);
    const auto pred_peaks =
        detect_peaks(pred, sig.dt, cfg.eval.min_height_frac * peak,
                     cfg.eval.min_separation_frac * sig.interval_s);
    out.offsets = time_offset_ratio(
        pred_peaks, target_peak_times(sig, cfg.train.horizon_steps), sig.interval_s);
    out.intervals = interval_errors(pred_peaks, sig.interval_s);
    return out;
}

std::vector<double> plain_predict(const ReservoirModel& model, const Readout& r,
                                  const Signal& sig, std::uint64_t noise_seed) {
    const auto trace = run_reservoir(model, sig, noise_seed);
    std::vector<double> pred(static_cast<size_t>(trace.length()));
    for (int t = 0; t < trace.length(); ++t)
        pred[static_cast<size_t>(t)] = r.predict(trace.p.row(t).transpose());
    return pred;
}

void write_loss_curve(const std::vector<double>& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write loss curve: " + path);
    out << "epoch,mse\n";
    char buf[64];
    for (size_t e = 0; e < curve.size(); ++e) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", e, curve[e]);
        out << buf;
    }
}

void write_adaptation_log(const AdaptationLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write adaptation log: " + path);
    for (const auto& w : log.windows) {
        json j{{"window", w.window},
               {"eps_early", w.eps_early},
               {"eps_late", w.eps_late},
               {"c_decision", w.c_decision},
               {"delta_sum", w.delta_sum},
               {"clipped", w.clipped},
               {"degenerate_norm", w.degenerate_norm},
               {"boosted", w.boosted},
               {"damped", w.damped},
               {"window_mse", w.window_mse}};
        out << j.dump() << "\n";
    }
}

ModelFile train_model(const ExperimentConfig& cfg, const Dataset& ds,
                      const std::string& out_dir, const std::string& resume_path,
                      ReservoirModel model) {
    ModelFile mf;
    Readout resume;
    Readout* resume_ptr = nullptr;
    if (!resume_path.empty()) {
        const auto prev = load_model(resume_path);
        resume = prev.readout;
        resume_ptr = &resume;
    }
    const auto res = train(model, ds, cfg.train, resume_ptr);
    mf.model = std::move(model);
    mf.readout = res.readout;
    mf.seeds = cfg.seeds;
    mf.config_hash = config_hash(cfg);
    mf.tool_version = kToolVersion;
    save_model(mf, out_dir + "/model.json");
    write_loss_curve(res.loss_curve, out_dir + "/loss_curve.csv");
    return mf;
}

int cmd_gen(const CommonOpts& o) {
    const auto cfg = resolve_config(o);
    write_provenance(cfg, o.out_dir);
    const auto ds = gen_dataset(cfg.dataset);
    save_dataset(ds, o.out_dir + "/dataset");
    std::cout << "wrote " << ds.samples.size() << " samples to " << o.out_dir
              << "/dataset\n";
    return 0;
}

int cmd_train(const CommonOpts& o, const std::string& dataset_dir,
              const std::string& resume_path) {
    const auto cfg = resolve_config(o);
    write_provenance(cfg, o.out_dir);
    const Dataset ds =
        dataset_dir.empty() ? gen_dataset(cfg.dataset) : load_dataset(dataset_dir);
    const auto mf = train_model(cfg, ds, o.out_dir, resume_path, model_from_config(cfg));
    std::cout << "trained model written to " << o.out_dir << "/model.json\n";
    (void)mf;
    return 0;
}

int cmd_eval(const CommonOpts& o, const std::string& model_path, bool adapt,
             bool sync_only, bool ds_only) {
    const auto cfg = resolve_config(o);
    write_provenance(cfg, o.out_dir);
    const auto mf = load_model(model_path);

    SyncConfig sync = cfg.sync;
    DsConfig ds = cfg.ds;
    if (sync_only) ds.enabled = false;
    if (ds_only) sync.enabled = false;

    const auto suite = test_suite(cfg.dataset.dt_s);
    std::ofstream metrics(o.out_dir + "/metrics.jsonl");
    if (!metrics) throw IoError("cannot write metrics in " + o.out_dir);

    for (size_t i = 0; i < suite.size(); ++i) {
        const Signal& sig = suite[i];
        const auto run_seed = derive_seed(cfg.seeds.noise_seed, 0xe7a1u, i);
        const auto pre_pred = plain_predict(mf.model, mf.readout, sig, run_seed);
        const auto pre = evaluate_prediction(pre_pred, sig, cfg);

        json rec{{"sample", i},
                 {"interval_s", sig.interval_s},
                 {"pre", offset_record(pre.offsets)},
                 {"pre_interval_mae_s", pre.intervals.mean_abs_error_s},
                 {"adapt", adapt}};
        if (adapt) {
            const auto ares = adaptive_run(mf.model, mf.readout, sig, sync, ds,
                                           cfg.train.horizon_steps, run_seed);
            const auto post = evaluate_prediction(ares.prediction, sig, cfg);
            rec["post"] = offset_record(post.offsets);
            rec["post_interval_mae_s"] = post.intervals.mean_abs_error_s;
            rec["sync_enabled"] = sync.enabled;
            rec["ds_enabled"] = ds.enabled;
            char name[64];
            std::snprintf(name, sizeof name, "/adaptation_%02zu.jsonl", i);
            write_adaptation_log(ares.log, o.out_dir + name);
        }
        metrics << rec.dump() << "\n";
    }
    std::cout << "metrics written to " << o.out_dir << "/metrics.jsonl\n";
    return 0;
}

int cmd_sweep_c(const CommonOpts& o, const std::string& model_path,
                std::vector<double> deltas) {
    const auto cfg = resolve_config(o);
    write_provenance(cfg, o.out_dir);
    const auto mf = load_model(model_path);
    if (deltas.empty()) deltas = {-0.1, -0.05, +0.05, +0.1};

    const auto suite = test_suite(cfg.dataset.dt_s);
    std::ofstream records(o.out_dir + "/sweep_c.jsonl");
    if (!records) throw IoError("cannot write sweep records in " + o.out_dir);

    for (size_t i = 0; i < suite.size(); ++i) {
        const Signal& sig = suite[i];
        const auto run_seed = derive_seed(cfg.seeds.noise_seed, 0x5c0u, i);
        const auto base_pred = plain_predict(mf.model, mf.readout, sig, run_seed);
        const auto base = evaluate_prediction(base_pred, sig, cfg);
        for (double delta : deltas) {
            ReservoirModel scaled = mf.model;
            bool clipped = false;
            for (double& v : scaled.c.values.data()) {
                v *= 1.0 + delta;
                if (v > scaled.spec.c_ref) {
                    v = scaled.spec.c_ref;
                    clipped = true;
                }
            }
            scaled.rebuild_weights();
            const auto pred = plain_predict(scaled, mf.readout, sig, run_seed);
            const auto out = evaluate_prediction(pred, sig, cfg);
            // positive ratio = early, so a positive shift means peaks moved earlier
            const double shift = out.offsets.mean - base.offsets.mean;
            records << json{{"sample", i},
                            {"interval_s", sig.interval_s},
                            {"delta_c", delta},
                            {"clipped", clipped},
                            {"base_mean_offset", base.offsets.mean},
                            {"mean_offset", out.offsets.mean},
                            {"offset_shift", shift}}
                           .dump()
                    << "\n";
        }
    }
    std::cout << "sweep records written to " << o.out_dir << "/sweep_c.jsonl\n";
    return 0;
}

int cmd_spectra(const CommonOpts& o, const std::string& model_path, double base_freq,
                const std::string& ratio) {
    const auto cfg = resolve_config(o);
    write_provenance(cfg, o.out_dir);
    const auto mf = load_model(model_path);

    // parse "1:2" style ratios into frequency multipliers
    std::vector<double> multipliers;
    std::string token;
    for (char ch : ratio + ":") {
        if (ch == ':') {
            if (token.empty()) throw ConfigError("spectra: malformed ratio '" + ratio + "'");
            multipliers.push_back(std::stod(token));
            token.clear();
        } else {
            token.push_back(ch);
        }
    }
    const double lead = multipliers.front();

    Signal excitation;
    excitation.dt = cfg.dataset.dt_s;
    const int len = static_cast<int>(30.0 / excitation.dt);
    excitation.samples.assign(static_cast<size_t>(len), 0.0);
    for (double m : multipliers) {
        const double freq = base_freq * m / lead;
        const auto train_m = gen_beat_signal(1.0 / freq, 30.0, excitation.dt,
                                             cfg.dataset.pulse_width_s, 0.0);
        for (int t = 0; t < len && t < train_m.length(); ++t)
            excitation.samples[static_cast<size_t>(t)] +=
                train_m.samples[static_cast<size_t>(t)] / multipliers.size();
    }

    ReservoirModel quiet = mf.model;
    quiet.noise_amp = 0.0;
    const auto trace = run_reservoir(quiet, excitation, 0);
    const auto map = resonance_map_from_trace(trace, quiet.spec.n, excitation.dt,
                                              cfg.eval.settle_steps, true);

    const int n = quiet.spec.n;
    char buf[64];
    {
        std::ofstream out(o.out_dir + "/spectra.csv");
        if (!out) throw IoError("cannot write spectra in " + o.out_dir);
        for (const auto& spectrum : map.spectra) {
            for (size_t b = 0; b < spectrum.size(); ++b) {
                std::snprintf(buf, sizeof buf, "%s%.9g", b ? "," : "", spectrum[b]);
                out << buf;
            }
            out << "\n";
        }
    }
    {
        std::ofstream out(o.out_dir + "/dominant_freq.csv");
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                std::snprintf(buf, sizeof buf, "%s%.9g", j ? "," : "",
                              map.dominant_freq.at(i, j));
                out << buf;
            }
            out << "\n";
        }
    }
    {
        // average signal strength heat map: mean |p| per neuron after settling
        std::ofstream out(o.out_dir + "/activation_heatmap.csv");
        const int settle = cfg.eval.settle_steps;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const int idx = i * n + j;
                double acc = 0.0;
                for (int t = settle; t < trace.length(); ++t)
                    acc += std::abs(trace.p(t, idx));
                std::snprintf(buf, sizeof buf, "%s%.9g", j ? "," : "",
                              acc / (trace.length() - settle));
                out << buf;
            }
            out << "\n";
        }
    }
    json meta{{"base_freq_hz", base_freq},
              {"ratio", ratio},
              {"freq_resolution_hz", map.freq_resolution}};
    write_text_file(o.out_dir + "/spectra_meta.json", meta.dump(2) + "\n");
    std::cout << "spectra written to " << o.out_dir << "\n";
    return 0;
}

int cmd_baseline(const CommonOpts& o, const std::string& dataset_dir) {
    const auto cfg = resolve_config(o);
    write_provenance(cfg, o.out_dir);
    const Dataset ds =
        dataset_dir.empty() ? gen_dataset(cfg.dataset) : load_dataset(dataset_dir);

    const auto like = model_from_config(cfg);
    const auto base = random_reservoir(cfg.grid, cfg.baseline.density,
                                       cfg.baseline.spectral_radius,
                                       derive_seed(cfg.seeds.field_seed, 0xba5eu), like);
    const auto mf = train_model(cfg, ds, o.out_dir, "", base);

    const auto suite = test_suite(cfg.dataset.dt_s);
    std::ofstream metrics(o.out_dir + "/metrics.jsonl");
    if (!metrics) throw IoError("cannot write metrics in " + o.out_dir);
    for (size_t i = 0; i < suite.size(); ++i) {
        const Signal& sig = suite[i];
        const auto run_seed = derive_seed(cfg.seeds.noise_seed, 0xba5eu, i);
        const auto pred = plain_predict(mf.model, mf.readout, sig, run_seed);
        const auto out = evaluate_prediction(pred, sig, cfg);
        const auto target = make_target(sig, cfg.train.horizon_steps);
        std::vector<double> pred_head(pred.begin(), pred.begin() + target.size());
        const double lag_s = cross_correlation_lag(pred_head, target, sig.dt, 0.6);
        metrics << json{{"sample", i},
                        {"interval_s", sig.interval_s},
                        {"offsets", offset_record(out.offsets)},
                        {"lag_s", lag_s}}
                       .dump()
                << "\n";
    }
    std::cout << "baseline metrics written to " << o.out_dir << "/metrics.jsonl\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FDTD-derived reservoir computing for beat prediction"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    CommonOpts gen_o, train_o, eval_o, sweep_o, spectra_o, baseline_o;
    std::string dataset_dir, resume_path, model_path, ratio = "1:2";
    std::vector<double> deltas;
    double base_freq = 1.2;
    bool adapt = true, sync_only = false, ds_only = false;

    auto* gen = app.add_subcommand("gen", "Generate a training dataset");
    add_common(gen, gen_o);

    auto* tr = app.add_subcommand("train", "Train the readout on a dataset");
    add_common(tr, train_o);
    tr->add_option("--dataset", dataset_dir, "Dataset directory (generated if omitted)");
    tr->add_option("--resume", resume_path, "Continue training from a saved model");

    auto* ev = app.add_subcommand("eval", "Evaluate a model on the fixed test suite");
    add_common(ev, eval_o);
    ev->add_option("--model", model_path, "Trained model file")->required();
    ev->add_flag("--adapt,!--no-adapt", adapt, "Run online adaptation (default on)");
    ev->add_flag("--sync-only", sync_only, "Adaptation with the c-update only");
    ev->add_flag("--ds-only", ds_only, "Adaptation with the k-update only");

    auto* sw = app.add_subcommand("sweep-c", "Constant speed-field offsets vs peak timing");
    add_common(sw, sweep_o);
    sw->add_option("--model", model_path, "Trained model file")->required();
    sw->add_option("--delta", deltas, "Relative c offsets (default -0.1 -0.05 0.05 0.1)");

    auto* sp = app.add_subcommand("spectra", "Per-neuron spectra under multi-frequency input");
    add_common(sp, spectra_o);
    sp->add_option("--model", model_path, "Model file")->required();
    sp->add_option("--base-freq", base_freq, "Base beat frequency in Hz");
    sp->add_option("--ratio", ratio, "Frequency proportions, e.g. 1:2 or 1:3");

    auto* bl = app.add_subcommand("baseline", "Train and evaluate the random-matrix baseline");
    add_common(bl, baseline_o);
    bl->add_option("--dataset", dataset_dir, "Dataset directory (generated if omitted)");

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return cmd_gen(gen_o);
        if (tr->parsed()) return cmd_train(train_o, dataset_dir, resume_path);
        if (ev->parsed()) return cmd_eval(eval_o, model_path, adapt, sync_only, ds_only);
        if (sw->parsed()) return cmd_sweep_c(sweep_o, model_path, deltas);
        if (sp->parsed()) return cmd_spectra(spectra_o, model_path, base_freq, ratio);
        if (bl->parsed()) return cmd_baseline(baseline_o, dataset_dir);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
