#include "waverc/config.hpp"

#include <nlohmann/json.hpp>

#include <exception>
#include <fstream>
#include <vector>

#include "waverc/errors.hpp"

namespace waverc {

using nlohmann::json;

namespace {

/// Reads object fields while recording which keys were consumed; any
/// leftover key is a config error.
class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j.is_object()) throw ConfigError("config: section '" + name_ + "' must be an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.push_back(key);
        if (auto it = j_.find(key); it != j_.end()) {
            try {
                out = it->get<T>();
            } catch (const json::exception&) {
                throw ConfigError("config: bad value for '" + name_ + "." + key + "'");
            }
        }
    }

    ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            bool known = false;
            for (const auto& k : seen_)
                if (k == it.key()) {
                    known = true;
                    break;
                }
            if (!known)
                throw ConfigError("config: unknown key '" + name_ + "." + it.key() + "'");
        }
    }

private:
    const json& j_;
    std::string name_;
    std::vector<std::string> seen_;
};

const json* sub(const json& j, const char* key, std::vector<std::string>& seen) {
    seen.push_back(key);
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

}  // namespace

void ExperimentConfig::validate() const {
    grid.validate();
    train.validate();
    sync.validate();
    ds.validate();
    dataset.validate();
    if (reservoir.alpha <= 0.0 || reservoir.alpha > 1.0)
        throw ConfigError("config: alpha must be in (0, 1]");
    if (reservoir.input_gain < 0.0 || reservoir.noise_amp < 0.0)
        throw ConfigError("config: input_gain and noise_amp must be >= 0");
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    ExperimentConfig cfg;
    std::vector<std::string> seen;

    if (const json* g = sub(j, "grid", seen)) {
        Section s(*g, "grid");
        s.get("n", cfg.grid.n);
        s.get("dt_s", cfg.grid.dt);
        s.get("c_ref", cfg.grid.c_ref);
    }
    if (const json* g = sub(j, "fields", seen)) {
        Section s(*g, "fields");
        s.get("c0", cfg.fields.c0);
        s.get("grad_per_row", cfg.fields.grad_per_row);
        s.get("c_noise_amp", cfg.fields.c_noise_amp);
        s.get("k0", cfg.fields.k0);
        s.get("k_min", cfg.fields.k_min);
        s.get("k_max", cfg.fields.k_max);
        s.get("k_sign", cfg.fields.k_sign);
    }
    if (const json* g = sub(j, "reservoir", seen)) {
        Section s(*g, "reservoir");
        s.get("alpha", cfg.reservoir.alpha);
        s.get("input_gain", cfg.reservoir.input_gain);
        s.get("noise_amp", cfg.reservoir.noise_amp);
    }
    if (const json* g = sub(j, "train", seen)) {
        Section s(*g, "train");
        s.get("learning_rate", cfg.train.learning_rate);
        s.get("epochs", cfg.train.epochs);
        s.get("horizon_steps", cfg.train.horizon_steps);
        s.get("warmup_steps", cfg.train.warmup_steps);
        s.get("early_stop_rel", cfg.train.early_stop_rel);
    }
    if (const json* g = sub(j, "sync", seen)) {
        Section s(*g, "sync");
        s.get("enabled", cfg.sync.enabled);
        s.get("update_step", cfg.sync.update_step);
        s.get("threshold", cfg.sync.threshold);
        s.get("delta_c", cfg.sync.delta_c);
        s.get("threshold_sum", cfg.sync.threshold_sum);
        s.get("delta_early", cfg.sync.delta_early);
        s.get("delta_late", cfg.sync.delta_late);
        s.get("tau_softmax", cfg.sync.tau_softmax);
    }
    if (const json* g = sub(j, "ds", seen)) {
        Section s(*g, "ds");
        s.get("enabled", cfg.ds.enabled);
        s.get("n_select", cfg.ds.n_select);
        s.get("delta_k", cfg.ds.delta_k);
        s.get("window", cfg.ds.window);
        s.get("sign", cfg.ds.sign);
        std::string mode = cfg.ds.mask_mode == MaskMode::Readout ? "readout" : "resim";
        s.get("mask_mode", mode);
        if (mode == "readout")
            cfg.ds.mask_mode = MaskMode::Readout;
        else if (mode == "resim")
            cfg.ds.mask_mode = MaskMode::Resim;
        else
            throw ConfigError("config: ds.mask_mode must be 'readout' or 'resim'");
    }
    if (const json* g = sub(j, "dataset", seen)) {
        Section s(*g, "dataset");
        s.get("n_samples", cfg.dataset.n_samples);
        s.get("bpm_low", cfg.dataset.bpm_low);
        s.get("bpm_high", cfg.dataset.bpm_high);
        s.get("nonrhythmic_fraction", cfg.dataset.nonrhythmic_fraction);
        s.get("duration_s", cfg.dataset.duration_s);
        s.get("dt_s", cfg.dataset.dt_s);
        s.get("pulse_width_s", cfg.dataset.pulse_width_s);
    }
    if (const json* g = sub(j, "eval", seen)) {
        Section s(*g, "eval");
        s.get("min_height_frac", cfg.eval.min_height_frac);
        s.get("min_separation_frac", cfg.eval.min_separation_frac);
        s.get("settle_steps", cfg.eval.settle_steps);
    }
    if (const json* g = sub(j, "baseline", seen)) {
        Section s(*g, "baseline");
        s.get("density", cfg.baseline.density);
        s.get("spectral_radius", cfg.baseline.spectral_radius);
    }
    if (const json* g = sub(j, "seeds", seen)) {
        Section s(*g, "seeds");
        s.get("field_seed", cfg.seeds.field_seed);
        s.get("input_seed", cfg.seeds.input_seed);
        s.get("noise_seed", cfg.seeds.noise_seed);
        s.get("data_seed", cfg.seeds.data_seed);
        s.get("shuffle_seed", cfg.seeds.shuffle_seed);
    }

    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const auto& k : seen)
            if (k == it.key()) {
                known = true;
                break;
            }
        if (!known) throw ConfigError("config: unknown section '" + it.key() + "'");
    }

    cfg.dataset.seed = cfg.seeds.data_seed;
    cfg.train.shuffle_seed = cfg.seeds.shuffle_seed;
    cfg.train.noise_seed = cfg.seeds.noise_seed;
    cfg.validate();
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["grid"] = {{"n", cfg.grid.n}, {"dt_s", cfg.grid.dt}, {"c_ref", cfg.grid.c_ref}};
    j["fields"] = {{"c0", cfg.fields.c0},
                   {"grad_per_row", cfg.fields.effective_grad(cfg.grid.n)},
                   {"c_noise_amp", cfg.fields.c_noise_amp},
                   {"k0", cfg.fields.k0},
                   {"k_min", cfg.fields.k_min},
                   {"k_max", cfg.fields.k_max},
                   {"k_sign", cfg.fields.k_sign}};
    j["reservoir"] = {{"alpha", cfg.reservoir.alpha},
                      {"input_gain", cfg.reservoir.input_gain},
                      {"noise_amp", cfg.reservoir.noise_amp}};
    j["train"] = {{"learning_rate", cfg.train.learning_rate},
                  {"epochs", cfg.train.epochs},
                  {"horizon_steps", cfg.train.horizon_steps},
                  {"warmup_steps", cfg.train.warmup_steps},
                  {"early_stop_rel", cfg.train.early_stop_rel}};
    j["sync"] = {{"enabled", cfg.sync.enabled},
                 {"update_step", cfg.sync.update_step},
                 {"threshold", cfg.sync.threshold},
                 {"delta_c", cfg.sync.delta_c},
                 {"threshold_sum", cfg.sync.threshold_sum},
                 {"delta_early", cfg.sync.delta_early},
                 {"delta_late", cfg.sync.delta_late},
                 {"tau_softmax", cfg.sync.tau_softmax}};
    j["ds"] = {{"enabled", cfg.ds.enabled},
               {"n_select", cfg.ds.n_select},
               {"delta_k", cfg.ds.delta_k},
               {"window", cfg.ds.window},
               {"sign", cfg.ds.sign},
               {"mask_mode", cfg.ds.mask_mode == MaskMode::Readout ? "readout" : "resim"}};
    j["dataset"] = {{"n_samples", cfg.dataset.n_samples},
                    {"bpm_low", cfg.dataset.bpm_low},
                    {"bpm_high", cfg.dataset.bpm_high},
                    {"nonrhythmic_fraction", cfg.dataset.nonrhythmic_fraction},
                    {"duration_s", cfg.dataset.duration_s},
                    {"dt_s", cfg.dataset.dt_s},
                    {"pulse_width_s", cfg.dataset.pulse_width_s}};
    j["eval"] = {{"min_height_frac", cfg.eval.min_height_frac},
                 {"min_separation_frac", cfg.eval.min_separation_frac},
                 {"settle_steps", cfg.eval.settle_steps}};
    j["baseline"] = {{"density", cfg.baseline.density},
                     {"spectral_radius", cfg.baseline.spectral_radius}};
    j["seeds"] = {{"field_seed", cfg.seeds.field_seed},
                  {"input_seed", cfg.seeds.input_seed},
                  {"noise_seed", cfg.seeds.noise_seed},
                  {"data_seed", cfg.seeds.data_seed},
                  {"shuffle_seed", cfg.seeds.shuffle_seed}};
    return j;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string s = config_to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace waverc
