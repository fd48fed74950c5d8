#pragma once

#include <string>
#include <vector>

#include "waverc/config.hpp"
#include "waverc/readout.hpp"

namespace waverc {

/// Model container persisted to disk. W is never stored; it is rebuilt from
/// the fields (or the random-weights spec) on load, which keeps the file
/// small and the operative matrix consistent with the stored parameters.
struct ModelFile {
    ReservoirModel model;
    Readout readout;
    SeedConfig seeds;
    std::string config_hash;
    std::string tool_version;
};

void save_model(const ModelFile& mf, const std::string& path);
ModelFile load_model(const std::string& path);

/// Two-column CSV (time_s,value); doubles printed with round-trip precision.
void save_signal_csv(const Signal& sig, const std::string& path);
Signal load_signal_csv(const std::string& path);

/// Sidecar annotation record for a signal CSV.
void save_signal_annotations(const Signal& sig, const std::string& path);
void load_signal_annotations(Signal& sig, const std::string& path);

/// Dataset directory: manifest.json + per-sample CSVs and sidecars.
void save_dataset(const Dataset& ds, const std::string& dir);
Dataset load_dataset(const std::string& dir);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace waverc
