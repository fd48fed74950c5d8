#include "waverc/model_io.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

#include "waverc/version.hpp"

namespace waverc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json grid_to_json(const Grid2d& g) {
    return json(g.data());
}

Grid2d grid_from_json(const json& j, int n) {
    Grid2d g(n, 0.0);
    const auto vals = j.get<std::vector<double>>();
    if (static_cast<int>(vals.size()) != n * n)
        throw IoError("model file: grid size mismatch");
    g.data() = vals;
    return g;
}

}  // namespace

void save_model(const ModelFile& mf, const std::string& path) {
    const auto& m = mf.model;
    json j;
    j["format_version"] = kModelFormatVersion;
    j["tool_version"] = mf.tool_version.empty() ? kToolVersion : mf.tool_version;
    j["config_hash"] = mf.config_hash;
    j["grid"] = {{"n", m.spec.n}, {"dt_s", m.spec.dt}, {"c_ref", m.spec.c_ref}};
    j["speed"] = {{"values", grid_to_json(m.c.values)}, {"scale_accum", m.c.scale_accum}};
    j["damping"] = {{"kx", grid_to_json(m.k.kx)},
                    {"ky", grid_to_json(m.k.ky)},
                    {"k_min", m.k.k_min},
                    {"k_max", m.k.k_max},
                    {"sign", m.k.sign}};
    j["alpha"] = m.alpha;
    j["input_gain"] = m.input_gain;
    j["noise_amp"] = m.noise_amp;
    j["input_seed"] = m.input_seed;
    j["kind"] = m.kind == WeightsKind::Wave ? "wave" : "random";
    if (m.kind == WeightsKind::Random) {
        j["random"] = {{"density", m.random.density},
                       {"spectral_radius", m.random.spectral_radius},
                       {"matrix_seed", m.random.matrix_seed}};
    }
    std::vector<double> w_in_row0(static_cast<size_t>(m.spec.n));
    for (int i = 0; i < m.spec.n; ++i) w_in_row0[static_cast<size_t>(i)] = m.w_in[i];
    j["w_in_row0"] = w_in_row0;
    std::vector<double> w_out(mf.readout.w_out.data(),
                              mf.readout.w_out.data() + mf.readout.w_out.size());
    j["readout"] = {{"w_out", w_out}, {"bias", mf.readout.bias}};
    j["seeds"] = {{"field_seed", mf.seeds.field_seed},
                  {"input_seed", mf.seeds.input_seed},
                  {"noise_seed", mf.seeds.noise_seed},
                  {"data_seed", mf.seeds.data_seed},
                  {"shuffle_seed", mf.seeds.shuffle_seed}};

    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file: " + path);
    out << j.dump(2) << "\n";
}

ModelFile load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("model parse error in " + path + ": " + e.what());
    }
    if (j.value("format_version", -1) != kModelFormatVersion)
        throw IoError("model file: unsupported format_version");

    ModelFile mf;
    auto& m = mf.model;
    m.spec.n = j.at("grid").at("n").get<int>();
    m.spec.dt = j.at("grid").at("dt_s").get<double>();
    m.spec.c_ref = j.at("grid").at("c_ref").get<double>();
    m.spec.validate();
    const int n = m.spec.n;

    m.c.values = grid_from_json(j.at("speed").at("values"), n);
    m.c.scale_accum = j.at("speed").at("scale_accum").get<double>();
    m.k.kx = grid_from_json(j.at("damping").at("kx"), n);
    m.k.ky = grid_from_json(j.at("damping").at("ky"), n);
    m.k.k_min = j.at("damping").at("k_min").get<double>();
    m.k.k_max = j.at("damping").at("k_max").get<double>();
    m.k.sign = j.at("damping").value("sign", 1.0);
    m.alpha = j.at("alpha").get<double>();
    m.input_gain = j.at("input_gain").get<double>();
    m.noise_amp = j.at("noise_amp").get<double>();
    m.input_seed = j.at("input_seed").get<std::uint64_t>();
    m.kind = j.at("kind").get<std::string>() == "random" ? WeightsKind::Random
                                                         : WeightsKind::Wave;
    if (m.kind == WeightsKind::Random) {
        m.random.density = j.at("random").at("density").get<double>();
        m.random.spectral_radius = j.at("random").at("spectral_radius").get<double>();
        m.random.matrix_seed = j.at("random").at("matrix_seed").get<std::uint64_t>();
    }
    m.rebuild_weights();

    const auto row0 = j.at("w_in_row0").get<std::vector<double>>();
    if (static_cast<int>(row0.size()) != n) throw IoError("model file: w_in size mismatch");
    m.w_in = Eigen::VectorXd::Zero(m.spec.state_dim());
    for (int i = 0; i < n; ++i) m.w_in[i] = row0[static_cast<size_t>(i)];

    const auto w_out = j.at("readout").at("w_out").get<std::vector<double>>();
    if (static_cast<int>(w_out.size()) != n * n)
        throw IoError("model file: w_out size mismatch");
    mf.readout = Readout(n * n);
    for (size_t i = 0; i < w_out.size(); ++i)
        mf.readout.w_out[static_cast<Eigen::Index>(i)] = w_out[i];
    mf.readout.bias = j.at("readout").at("bias").get<double>();

    const auto& s = j.at("seeds");
    mf.seeds.field_seed = s.at("field_seed").get<std::uint64_t>();
    mf.seeds.input_seed = s.at("input_seed").get<std::uint64_t>();
    mf.seeds.noise_seed = s.at("noise_seed").get<std::uint64_t>();
    mf.seeds.data_seed = s.at("data_seed").get<std::uint64_t>();
    mf.seeds.shuffle_seed = s.at("shuffle_seed").get<std::uint64_t>();
    mf.config_hash = j.value("config_hash", "");
    mf.tool_version = j.value("tool_version", "");
    return mf;
}

void save_signal_csv(const Signal& sig, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write signal file: " + path);
    out << "time_s,value\n";
    char buf[64];
    for (size_t t = 0; t < sig.samples.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t * sig.dt, sig.samples[t]);
        out << buf;
    }
}

Signal load_signal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open signal file: " + path);
    Signal sig;
    std::string line;
    std::getline(in, line);  // header
    double t0 = 0.0, t1 = 0.0;
    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError("malformed signal CSV: " + path);
        const double t = std::stod(line.substr(0, comma));
        sig.samples.push_back(std::stod(line.substr(comma + 1)));
        if (row == 0) t0 = t;
        if (row == 1) t1 = t;
        ++row;
    }
    if (row >= 2) sig.dt = t1 - t0;
    return sig;
}

void save_signal_annotations(const Signal& sig, const std::string& path) {
    json j;
    j["interval_s"] = sig.interval_s;
    j["phase_s"] = sig.phase_s;
    j["beat_times"] = sig.beat_times;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write annotation file: " + path);
    out << j.dump(2) << "\n";
}

void load_signal_annotations(Signal& sig, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open annotation file: " + path);
    json j;
    in >> j;
    sig.interval_s = j.at("interval_s").get<double>();
    sig.phase_s = j.value("phase_s", 0.0);
    sig.beat_times = j.at("beat_times").get<std::vector<double>>();
}

void save_dataset(const Dataset& ds, const std::string& dir) {
    fs::create_directories(dir);
    json manifest;
    manifest["n_samples"] = static_cast<int>(ds.samples.size());
    manifest["dt_s"] = ds.config.dt_s;
    manifest["seed"] = ds.config.seed;
    json entries = json::array();
    for (size_t i = 0; i < ds.samples.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "sample_%04zu", i);
        const Signal& sig = ds.samples[i];
        save_signal_csv(sig, dir + "/" + name + ".csv");
        save_signal_annotations(sig, dir + "/" + name + ".ann.json");
        entries.push_back({{"file", std::string(name) + ".csv"},
                           {"kind", sig.interval_s > 0.0 ? "rhythmic" : "nonrhythmic"},
                           {"interval_s", sig.interval_s}});
    }
    manifest["samples"] = entries;
    std::ofstream out(dir + "/manifest.json");
    if (!out) throw IoError("cannot write manifest in " + dir);
    out << manifest.dump(2) << "\n";
}

Dataset load_dataset(const std::string& dir) {
    std::ifstream in(dir + "/manifest.json");
    if (!in) throw IoError("no manifest.json in " + dir);
    json manifest;
    in >> manifest;
    Dataset ds;
    ds.config.dt_s = manifest.value("dt_s", 0.006);
    for (const auto& e : manifest.at("samples")) {
        const std::string file = e.at("file").get<std::string>();
        Signal sig = load_signal_csv(dir + "/" + file);
        sig.dt = ds.config.dt_s;
        const std::string ann = dir + "/" + file.substr(0, file.size() - 4) + ".ann.json";
        if (fs::exists(ann)) load_signal_annotations(sig, ann);
        ds.samples.push_back(std::move(sig));
    }
    ds.config.n_samples = static_cast<int>(ds.samples.size());
    return ds;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path);
    out << content;
}

}  // namespace waverc
