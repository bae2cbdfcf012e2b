#include "bridgesim/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bridgesim {

using nlohmann::json;

std::vector<double> AxisSpec::linspace() const {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i)
        v[i] = (count == 1) ? start
                            : start + (stop - start) * i / (count - 1);
    return v;
}

namespace {

double require_number(const json& obj, const std::string& section,
                      const std::string& key, double fallback, bool has_fallback) {
    if (!obj.contains(key)) {
        if (has_fallback) return fallback;
        throw ConfigError(section + "." + key + ": missing required field");
    }
    if (!obj[key].is_number())
        throw ConfigError(section + "." + key + ": expected a number");
    return obj[key].get<double>();
}

AxisSpec parse_axis(const json& obj, const std::string& section,
                    const std::string& key, AxisSpec fallback, bool required) {
    if (!obj.contains(key)) {
        if (!required) return fallback;
        throw ConfigError(section + "." + key + ": missing required field");
    }
    const json& a = obj[key];
    AxisSpec s;
    s.start = require_number(a, section + "." + key, "start", 0.0, false);
    s.stop = require_number(a, section + "." + key, "stop", 0.0, false);
    s.count = static_cast<int>(require_number(a, section + "." + key, "count", 1, false));
    if (s.count < 1)
        throw ConfigError(section + "." + key + ".count: must be >= 1");
    return s;
}

}  // namespace

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
    RunConfig c;

    if (!doc.contains("bridge") || !doc["bridge"].is_object())
        throw ConfigError("bridge: missing required section");
    const json& br = doc["bridge"];
    c.i0 = require_number(br, "bridge", "i0", 0, false);
    c.l_sh = require_number(br, "bridge", "l_sh", 0, false);
    c.n = static_cast<int>(require_number(br, "bridge", "n", 20, true));
    c.l_str = require_number(br, "bridge", "l_str", 0.0, true);
    c.l_pcs = require_number(br, "bridge", "l_pcs", 0.0, true);

    const json pr = doc.value("protocol", json::object());
    c.protocol.heater_threshold =
        require_number(pr, "protocol", "heater_threshold", 4.8e-3, true);
    c.protocol.ramp_duration =
        require_number(pr, "protocol", "ramp_duration", 200e-6, true);
    c.protocol.failure_probability =
        require_number(pr, "protocol", "failure_probability", 0.023, true);
    c.protocol.boundary_width =
        require_number(pr, "protocol", "boundary_width", 0.05, true);
    c.protocol.failure_decay =
        require_number(pr, "protocol", "failure_decay", 0.7, true);
    c.protocol.decay_per_day =
        require_number(pr, "protocol", "decay_per_day", 0.0, true);
    if (c.protocol.failure_probability < 0.0 || c.protocol.failure_probability >= 1.0)
        throw ConfigError("protocol.failure_probability: must be in [0, 1)");

    const json env = doc.value("environment", json::object());
    c.z0 = require_number(env, "environment", "z0", 50.0, true);
    if (c.z0 <= 0.0) throw ConfigError("environment.z0: must be > 0");
    c.insertion_loss_db =
        require_number(env, "environment", "insertion_loss_db", 6.0, true);
    c.freq = parse_axis(env, "environment", "freq", c.freq, false);
    if (c.freq.count > 1 && c.freq.stop <= c.freq.start)
        throw ConfigError("environment.freq: must be strictly increasing");
    c.signal_frequency =
        require_number(env, "environment", "signal_frequency", 5.1e9, true);

    const json sw = doc.value("sweep", json::object());
    c.i_z_axis = parse_axis(sw, "sweep", "i_z", c.i_z_axis, false);
    c.i_trg_axis = parse_axis(sw, "sweep", "i_trg", c.i_trg_axis, false);
    c.phi_ext_axis = parse_axis(sw, "sweep", "phi_ext", c.phi_ext_axis, false);

    const json mod = doc.value("modulation", json::object());
    c.i_z0_frac = require_number(mod, "modulation", "i_z0_frac", 0.05, true);
    c.f_m = parse_axis(mod, "modulation", "f_m", c.f_m, false);
    c.n_max = static_cast<int>(require_number(mod, "modulation", "n_max", 12, true));

    const json mon = doc.value("monitor", json::object());
    c.monitor_hours =
        static_cast<int>(require_number(mon, "monitor", "hours", 168, true));
    c.jump_rate = require_number(mon, "monitor", "jump_rate", 0.0, true);
    c.cadence_hours = require_number(mon, "monitor", "cadence_hours", 1.0, true);
    c.monitor_j = static_cast<long>(require_number(mon, "monitor", "j", 0, true));
    if (c.jump_rate < 0.0) throw ConfigError("monitor.jump_rate: must be >= 0");

    const json cp = doc.value("compression", json::object());
    c.p_min_dbm = require_number(cp, "compression", "p_min_dbm", -95.0, true);
    c.p_max_dbm = require_number(cp, "compression", "p_max_dbm", -40.0, true);

    if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
    c.protocol.rng_seed = c.seed;

    // Validates the physical invariants (i0 > 0, beta < 2, ...).
    try {
        (void)c.bridge();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("bridge: ") + e.what());
    }

    c.canonical = doc;
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    RunConfig c = parse_config(doc);
    if (const char* s = std::getenv("BRIDGESIM_SEED")) {
        c.seed = std::strtoull(s, nullptr, 10);
        c.protocol.rng_seed = c.seed;
        c.canonical["seed"] = c.seed;
    }
    return c;
}

std::string config_hash(const RunConfig& cfg) {
    const std::string s = cfg.canonical.dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

void write_grid(const std::string& path, const TransmissionGrid& g,
                const std::string& cfg_hash) {
    std::ofstream out(path);
    if (!out) throw FileFormatError("cannot open for writing: " + path);

    json hdr;
    hdr["schema"] = "bridgesim-grid";
    hdr["version"] = 1;
    hdr["frequency_hz"] = g.frequency;
    hdr["bias_mode"] = g.bias_mode;
    hdr["c_kind"] = (g.c_kind == TransmissionGrid::CAxisKind::TargetCurrent)
                        ? "i_trg"
                        : "phi_ext";
    hdr["units"] = {{"i_z", "A"},
                    {"c", (g.c_kind == TransmissionGrid::CAxisKind::TargetCurrent)
                              ? "A"
                              : "rad"},
                    {"tau", "linear"}};
    hdr["config_hash"] = cfg_hash;
    hdr["i_z_axis"] = g.i_z_axis;
    hdr["c_axis"] = g.c_axis;
    if (!g.true_j.empty()) hdr["true_j"] = g.true_j;
    json flags = json::array();
    for (std::size_t i = 0; i < g.flagged.size(); ++i)
        if (g.flagged[i])
            flags.push_back({i / g.i_z_axis.size(), i % g.i_z_axis.size()});
    if (!flags.empty()) hdr["flagged"] = flags;

    out << "# " << hdr.dump() << "\n";
    char buf[32];
    for (std::size_t r = 0; r < g.c_axis.size(); ++r) {
        for (std::size_t c = 0; c < g.i_z_axis.size(); ++c) {
            const auto& v = g.at(r, c);
            if (c) out << ',';
            std::snprintf(buf, sizeof buf, "%.17g", v.real());
            out << buf << ',';
            std::snprintf(buf, sizeof buf, "%.17g", v.imag());
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw FileFormatError("write failed: " + path);
}

TransmissionGrid read_grid(const std::string& path, std::string* cfg_hash) {
    std::ifstream in(path);
    if (!in) throw FileFormatError("cannot open grid file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.size() < 2 || line[0] != '#')
        throw FileFormatError(path + ": missing grid header");
    json hdr;
    try {
        hdr = json::parse(line.substr(1));
    } catch (const json::parse_error& e) {
        throw FileFormatError(path + ": bad header: " + e.what());
    }
    if (hdr.value("schema", "") != "bridgesim-grid")
        throw FileFormatError(path + ": not a bridgesim grid file");

    TransmissionGrid g;
    g.frequency = hdr.at("frequency_hz").get<double>();
    g.bias_mode = hdr.value("bias_mode", "");
    g.c_kind = (hdr.value("c_kind", "i_trg") == std::string("i_trg"))
                   ? TransmissionGrid::CAxisKind::TargetCurrent
                   : TransmissionGrid::CAxisKind::ExternalFlux;
    g.i_z_axis = hdr.at("i_z_axis").get<std::vector<double>>();
    g.c_axis = hdr.at("c_axis").get<std::vector<double>>();
    if (hdr.contains("true_j")) g.true_j = hdr["true_j"].get<std::vector<long>>();
    if (cfg_hash) *cfg_hash = hdr.value("config_hash", "");

    g.tau.reserve(g.i_z_axis.size() * g.c_axis.size());
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> nums;
        while (std::getline(ss, tok, ',')) nums.push_back(std::strtod(tok.c_str(), nullptr));
        if (nums.size() != 2 * g.i_z_axis.size())
            throw FileFormatError(path + ": row length does not match i_z axis");
        for (std::size_t i = 0; i < nums.size(); i += 2)
            g.tau.emplace_back(nums[i], nums[i + 1]);
    }
    if (g.tau.size() != g.i_z_axis.size() * g.c_axis.size())
        throw FileFormatError(path + ": row count does not match c axis");
    g.flagged.assign(g.tau.size(), 0);
    if (hdr.contains("flagged")) {
        for (const auto& f : hdr["flagged"]) {
            const std::size_t r = f[0].get<std::size_t>();
            const std::size_t c = f[1].get<std::size_t>();
            g.flagged[r * g.i_z_axis.size() + c] = 1;
        }
    }
    return g;
}

json to_json(const StepReport& r, const std::vector<double>& c_axis) {
    json j;
    j["threshold"] = r.threshold;
    j["failure_rate"] = r.failure_rate;
    j["outlier_indices"] = r.outlier_indices;
    json groups = json::array();
    for (const auto& [a, b] : r.groups) {
        groups.push_back({{"first", a},
                          {"last", b},
                          {"c_first", c_axis[a]},
                          {"c_last", c_axis[b]}});
    }
    j["groups"] = groups;
    j["step_widths_a"] = r.step_widths;
    j["step_centers_a"] = r.step_centers;
    // Differential inductance readouts under both flux-quantum conventions.
    std::vector<double> l_h2e, l_hbar2e;
    for (double w : r.step_widths) {
        l_h2e.push_back(kPhi0h / w);
        l_hbar2e.push_back(kPhi0r / w);
    }
    j["diff_inductance_h_2e"] = l_h2e;
    j["diff_inductance_hbar_2e"] = l_hbar2e;
    return j;
}

json to_json(const DriftRecord& r) {
    return json{{"timestamps_h", r.timestamps},
                {"delta_phi_ext_rad", r.delta_phi_ext},
                {"jump_times_h", r.jump_times},
                {"jump_quanta", r.jump_quanta},
                {"multi_quantum_jump", r.multi_quantum_jump}};
}

json to_json(const ZetaFit& f) {
    return json{{"f_m_hz", f.f_m_grid}, {"zeta", f.zeta}, {"residual_rms", f.residual}};
}

json to_json(const ContrastResult& c, const std::vector<double>& freq_grid) {
    return json{{"freq_hz", freq_grid},
                {"contrast_db", c.contrast_db},
                {"bandwidth_hz", c.bandwidth_hz},
                {"band_lo_hz", c.band_lo_hz},
                {"band_hi_hz", c.band_hi_hz},
                {"clipped", c.clipped}};
}

json to_json(const CompressionResult& c) {
    return json{{"p_1db_dbm", c.p_1db_dbm},
                {"small_signal_mag", c.small_signal_mag},
                {"power_dbm", c.power_dbm},
                {"tau_mag", c.tau_mag}};
}

}  // namespace bridgesim
