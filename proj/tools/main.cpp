#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "bridgesim/analysis.hpp"
#include "bridgesim/io.hpp"
#include "bridgesim/modulation.hpp"

using namespace bridgesim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 ok, 2 config, 3 solver, 4 analysis, 5 file I/O.
enum ExitCode { kOk = 0, kConfigError = 2, kSolverError = 3, kAnalysisError = 4, kIoError = 5 };

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    long long seed_override = -1;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool need_config = true) {
    auto* opt = cmd->add_option("--config", a.config_path, "run configuration file");
    if (need_config) opt->required();
    cmd->add_option("--out", a.out_dir, "output directory");
    cmd->add_option("--seed", a.seed_override, "override config seed");
    cmd->add_option("--threads", a.threads, "worker threads (sweeps are deterministic regardless)");
}

RunConfig load(const CommonArgs& a) {
    RunConfig cfg = load_config(a.config_path);
    if (a.seed_override >= 0) {
        cfg.seed = static_cast<std::uint64_t>(a.seed_override);
        cfg.protocol.rng_seed = cfg.seed;
        cfg.canonical["seed"] = cfg.seed;
    }
    if (const char* s = std::getenv("BRIDGESIM_OUT"); s && a.out_dir == "out")
        const_cast<CommonArgs&>(a).out_dir = s;
    return cfg;
}

void write_json(const fs::path& path, json doc, const RunConfig& cfg) {
    doc["config_hash"] = config_hash(cfg);
    doc["version"] = kVersion;
    std::ofstream out(path);
    if (!out) throw FileFormatError("cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

// Trapped operating point with maximal coupling: phi_C/2pi = N + l_str/2l_sh.
long optimal_fluxoid(const BridgeParams& b) {
    return std::lround(b.n + b.l_str / (2.0 * b.squid.l_sh));
}

// Scan i_z over one period at the trapped bias and return the extremes.
struct OnOff {
    double i_z_on;
    double i_z_off;
};
OnOff pick_on_off(const BridgeParams& b, long j, double phi_ext, double f,
                  const PortEnvironment& env, int points = 201) {
    const double period = i_z_period(b);
    double best_on = 0.0, best_off = 0.0;
    double hi = -1.0, lo = 1e300;
    for (int i = 0; i < points; ++i) {
        const double iz = -period / 2.0 + period * i / (points - 1);
        const BiasState s = solve_bias(AppliedBias::fluxoid(iz, j, phi_ext), b);
        const double mag = std::abs(s21(s, f, env));
        if (mag > hi) {
            hi = mag;
            best_on = iz;
        }
        if (mag < lo) {
            lo = mag;
            best_off = iz;
        }
    }
    return {best_on, best_off};
}

int cmd_simulate_grid(const CommonArgs& a) {
    const RunConfig cfg = load(a);
    const BridgeParams b = cfg.bridge();
    const PortEnvironment env = cfg.environment();
    std::mt19937_64 rng(cfg.seed);
    TransmissionGrid g = sweep_grid_trapped(cfg.i_z_axis.linspace(),
                                            cfg.i_trg_axis.linspace(),
                                            cfg.signal_frequency, b, env,
                                            cfg.protocol, rng);
    fs::create_directories(a.out_dir);
    write_grid(fs::path(a.out_dir) / "grid.csv", g, config_hash(cfg));
    std::cout << "wrote " << (fs::path(a.out_dir) / "grid.csv").string() << " ("
              << g.c_axis.size() << " x " << g.i_z_axis.size() << ")\n";
    return kOk;
}

int cmd_analyze_steps(const CommonArgs& a, const std::string& grid_path) {
    RunConfig cfg = load(a);
    const TransmissionGrid g = read_grid(grid_path);
    const LinecutSet cuts = LinecutSet::from_grid(g);
    const std::vector<double> cm = chi_matrix(cuts);
    const double threshold = histogram_threshold(cm, cuts.curves.size());
    const StepReport rep = group_steps(cuts, threshold);
    json doc = to_json(rep, cuts.c_axis);
    doc["grid_file"] = grid_path;
    fs::create_directories(a.out_dir);
    write_json(fs::path(a.out_dir) / "steps.json", doc, cfg);
    std::cout << "groups: " << rep.groups.size()
              << "  outliers: " << rep.outlier_indices.size()
              << "  threshold: " << threshold << "\n";
    return kOk;
}

int cmd_monitor(const CommonArgs& a) {
    const RunConfig cfg = load(a);
    const BridgeParams b = cfg.bridge();
    const PortEnvironment env = cfg.environment();

    TrapState initial;
    initial.j = cfg.monitor_j;
    initial.phi_ext = 0.0;
    initial.i_c = i_c_of_j(initial.j, 0.0, 0.0, b);
    const auto series =
        drift_monitor(cfg.monitor_hours, cfg.jump_rate, initial, cfg.protocol, b);

    const auto i_z = cfg.i_z_axis.linspace();
    const auto phi_ext = cfg.phi_ext_axis.linspace();
    std::vector<TransmissionGrid> grids;
    grids.reserve(series.size());
    for (const auto& t : series)
        grids.push_back(sweep_grid_flux(i_z, phi_ext, t.j, cfg.signal_frequency, b, env));

    const DriftRecord rec = monitor(grids, cfg.cadence_hours);
    fs::create_directories(a.out_dir);
    write_json(fs::path(a.out_dir) / "drift.json", to_json(rec), cfg);
    std::cout << "epochs: " << rec.timestamps.size()
              << "  jumps: " << rec.jump_times.size() << "\n";
    return kOk;
}

int cmd_sweep_freq(const CommonArgs& a) {
    const RunConfig cfg = load(a);
    const BridgeParams b = cfg.bridge();
    const PortEnvironment env = cfg.environment();
    const long j = optimal_fluxoid(b);
    const OnOff oo = pick_on_off(b, j, 0.0, cfg.signal_frequency, env);

    std::vector<std::complex<double>> tau_on, tau_off;
    const BiasState on = solve_bias(AppliedBias::fluxoid(oo.i_z_on, j, 0.0), b);
    const BiasState off = solve_bias(AppliedBias::fluxoid(oo.i_z_off, j, 0.0), b);
    for (double f : env.freq_grid) {
        tau_on.push_back(s21(on, f, env));
        tau_off.push_back(s21(off, f, env));
    }
    const ContrastResult c = on_off_contrast(tau_on, tau_off, env);
    json doc = to_json(c, env.freq_grid);
    doc["i_z_on"] = oo.i_z_on;
    doc["i_z_off"] = oo.i_z_off;
    doc["fluxoid_j"] = j;
    fs::create_directories(a.out_dir);
    write_json(fs::path(a.out_dir) / "contrast.json", doc, cfg);
    std::cout << "contrast > 20 dB over " << c.bandwidth_hz / 1e9 << " GHz\n";
    return kOk;
}

int cmd_compression(const CommonArgs& a, bool linear_arms) {
    const RunConfig cfg = load(a);
    const BridgeParams b = cfg.bridge();
    const PortEnvironment env = cfg.environment();
    const long j = optimal_fluxoid(b);
    const OnOff oo = pick_on_off(b, j, 0.0, cfg.signal_frequency, env);
    const BiasState on = solve_bias(AppliedBias::fluxoid(oo.i_z_on, j, 0.0), b);
    const CompressionResult r =
        compression_point(on, cfg.signal_frequency, env, cfg.p_min_dbm, cfg.p_max_dbm,
                          b, linear_arms);
    json doc = to_json(r);
    doc["i_z_on"] = oo.i_z_on;
    doc["linear_arms"] = linear_arms;
    fs::create_directories(a.out_dir);
    write_json(fs::path(a.out_dir) / "compression.json", doc, cfg);
    std::cout << "1 dB compression at " << r.p_1db_dbm << " dBm\n";
    return kOk;
}

int cmd_modulate(const CommonArgs& a) {
    const RunConfig cfg = load(a);
    const BridgeParams b = cfg.bridge();
    const PortEnvironment env = cfg.environment();
    const long j = optimal_fluxoid(b);
    const double f0 = cfg.signal_frequency;
    const double period = i_z_period(b);
    const OnOff oo = pick_on_off(b, j, 0.0, f0, env);

    // Static tau(i_z) about the statically imbalanced operating point
    // halfway between off and on.
    const double i_z_dc = 0.5 * (oo.i_z_on + oo.i_z_off);
    auto tau_of = [&](double di_z) {
        const BiasState s = solve_bias(AppliedBias::fluxoid(i_z_dc + di_z, j, 0.0), b);
        return s21(s, f0, env);
    };

    const int m = 256;
    std::vector<double> curve(m);
    for (int i = 0; i < m; ++i) {
        // Even part about the operating point; the odd part carries no
        // carrier-bin weight.
        const double x = period * i / m;
        curve[i] = 0.5 * (tau_of(x).real() + tau_of(-x).real());
    }
    const CosineSeries series = cosine_decompose(curve, period, 1, cfg.n_max);

    const double i_z0 = cfg.i_z0_frac * period;
    json spectra = json::array();
    json carrier_curves = json::array();
    for (double f_m : cfg.f_m.linspace()) {
        const ModulationSpectrum sp =
            sideband_spectrum_timedomain(tau_of, i_z0, f_m, f0, 256, 4);
        json s;
        s["f_m_hz"] = f_m;
        s["carrier_re"] = sp.carrier.real();
        s["carrier_im"] = sp.carrier.imag();
        json sb = json::object();
        for (const auto& [k, v] : sp.sidebands) {
            sb[std::to_string(k)] = {{"re", v.real()},
                                     {"im", v.imag()},
                                     {"gain_db", 20.0 * std::log10(std::abs(v))}};
        }
        s["sidebands"] = sb;
        spectra.push_back(s);

        // Carrier vs amplitude curve for fit-zeta.
        json cc;
        cc["f_m_hz"] = f_m;
        json amps = json::array(), cars = json::array();
        for (int k = 1; k <= 10; ++k) {
            const double amp = 0.05 * k * period;
            const ModulationSpectrum spk =
                sideband_spectrum_timedomain(tau_of, amp, f_m, f0, 256, 1);
            amps.push_back(amp);
            cars.push_back(spk.carrier.real());
        }
        cc["i_z0_a"] = amps;
        cc["carrier"] = cars;
        carrier_curves.push_back(cc);
    }

    json doc;
    doc["i_z_dc"] = i_z_dc;
    doc["i_z0"] = i_z0;
    doc["i_z_period"] = period;
    doc["cosine_c0"] = series.c0;
    doc["cosine_c"] = series.c;
    doc["spectra"] = spectra;
    doc["carrier_curves"] = carrier_curves;
    fs::create_directories(a.out_dir);
    write_json(fs::path(a.out_dir) / "modulation.json", doc, cfg);
    std::cout << "modulation spectra at " << cfg.f_m.count << " frequencies\n";
    return kOk;
}

int cmd_fit_zeta(const CommonArgs& a, const std::string& data_path) {
    const RunConfig cfg = load(a);
    std::ifstream in(data_path);
    if (!in) throw FileFormatError("cannot open " + data_path);
    json doc;
    in >> doc;

    CosineSeries series;
    series.c0 = doc.at("cosine_c0").get<double>();
    series.c = doc.at("cosine_c").get<std::vector<double>>();
    series.period = doc.at("i_z_period").get<double>();

    std::vector<CarrierCurve> curves;
    for (const auto& cc : doc.at("carrier_curves")) {
        CarrierCurve c;
        c.f_m = cc.at("f_m_hz").get<double>();
        c.i_z0 = cc.at("i_z0_a").get<std::vector<double>>();
        c.carrier = cc.at("carrier").get<std::vector<double>>();
        curves.push_back(std::move(c));
    }
    const ZetaFit fit = fit_zeta(curves, series);
    fs::create_directories(a.out_dir);
    write_json(fs::path(a.out_dir) / "zeta.json", to_json(fit), cfg);
    std::cout << "fit zeta at " << fit.f_m_grid.size() << " frequencies\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rf-SQUID Wheatstone-bridge switch simulator and analysis pipeline"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonArgs args;
    std::string grid_path, data_path;
    bool linear_arms = false;

    auto* sim = app.add_subcommand("simulate-grid",
                                   "trap each i_trg, sweep i_z, record tau");
    add_common(sim, args);

    auto* ana = app.add_subcommand("analyze-steps", "group a grid into trapped-flux steps");
    add_common(ana, args);
    ana->add_option("--grid", grid_path, "grid CSV file")->required();

    auto* mon = app.add_subcommand("monitor", "simulate drift and extract flux jumps");
    add_common(mon, args);

    auto* swf = app.add_subcommand("sweep-freq", "on/off contrast over frequency");
    add_common(swf, args);

    auto* cmp = app.add_subcommand("compression", "1 dB compression point");
    add_common(cmp, args);
    cmp->add_flag("--linear-arms", linear_arms, "freeze arm inductances (control case)");

    auto* mod = app.add_subcommand("modulate", "sideband spectra and carrier curves");
    add_common(mod, args);

    auto* fz = app.add_subcommand("fit-zeta", "fit zeta(f_m) to carrier curves");
    add_common(fz, args);
    fz->add_option("--data", data_path, "modulation.json from the modulate command")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate_grid(args);
        if (ana->parsed()) return cmd_analyze_steps(args, grid_path);
        if (mon->parsed()) return cmd_monitor(args);
        if (swf->parsed()) return cmd_sweep_freq(args);
        if (cmp->parsed()) return cmd_compression(args, linear_arms);
        if (mod->parsed()) return cmd_modulate(args);
        if (fz->parsed()) return cmd_fit_zeta(args, data_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const FileFormatError& e) {
        std::cerr << "file error: " << e.what() << "\n";
        return kIoError;
    } catch (const NoConvergence& e) {
        std::cerr << "solver error: " << e.what()
                  << " (last residual " << e.last_residual << ")\n";
        return kSolverError;
    } catch (const std::exception& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return kAnalysisError;
    }
    return kOk;
}
