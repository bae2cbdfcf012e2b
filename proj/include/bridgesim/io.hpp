#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bridgesim/analysis.hpp"
#include "bridgesim/modulation.hpp"

namespace bridgesim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FileFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AxisSpec {
    double start = 0.0;
    double stop = 0.0;
    int count = 1;

    std::vector<double> linspace() const;
};

/// Fully validated run configuration. Raw scalar fields mirror the config
/// file; the accessors assemble the module parameter records.
struct RunConfig {
    // bridge
    double i0 = 0.0;
    double l_sh = 0.0;
    int n = 20;
    double l_str = 0.0;
    double l_pcs = 0.0;
    // protocol
    TrapProtocol protocol;
    // environment
    double z0 = 50.0;
    double insertion_loss_db = 6.0;
    AxisSpec freq{4e9, 8e9, 161};
    double signal_frequency = 5.1e9;  // carrier for fixed-frequency sweeps
    // sweeps
    AxisSpec i_z_axis;
    AxisSpec i_trg_axis;
    AxisSpec phi_ext_axis;
    // modulation
    double i_z0_frac = 0.05;        // amplitude as a fraction of I~_Z
    AxisSpec f_m{50e6, 650e6, 13};
    int n_max = 12;
    // monitor
    int monitor_hours = 168;
    double jump_rate = 0.0;
    double cadence_hours = 1.0;
    long monitor_j = 0;
    // compression
    double p_min_dbm = -95.0;
    double p_max_dbm = -40.0;
    // misc
    std::uint64_t seed = 1;

    nlohmann::json canonical;  // normalized config document, hashed below

    BridgeParams bridge() const {
        return BridgeParams(SquidParams(i0, l_sh), n, l_str, l_pcs);
    }
    PortEnvironment environment() const {
        return PortEnvironment{z0, freq.linspace(), insertion_loss_db};
    }
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// FNV-1a hash of the canonical config document, embedded in every output.
std::string config_hash(const RunConfig& cfg);

// Grid file: '#'-prefixed JSON header lines, then one CSV row per c index
// with paired re,im columns per i_z sample. Round-trips bit-exactly.
void write_grid(const std::string& path, const TransmissionGrid& g,
                const std::string& cfg_hash);
TransmissionGrid read_grid(const std::string& path, std::string* cfg_hash = nullptr);

nlohmann::json to_json(const StepReport& r, const std::vector<double>& c_axis);
nlohmann::json to_json(const DriftRecord& r);
nlohmann::json to_json(const ZetaFit& f);
nlohmann::json to_json(const ContrastResult& c, const std::vector<double>& freq_grid);
nlohmann::json to_json(const CompressionResult& c);

}  // namespace bridgesim
