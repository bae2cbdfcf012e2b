#include "bridgesim/microwave.hpp"

#include <cmath>

namespace bridgesim {

namespace {

using cplx = std::complex<double>;

cplx lattice_tau(double l_series, double l_lattice, double f, double z0) {
    const double w = 2.0 * M_PI * f;
    const cplx za(0.0, w * l_series);
    const cplx zb(0.0, w * l_lattice);
    return z0 * (zb - za) / ((za + z0) * (zb + z0));
}

double loss_scale(const PortEnvironment& env) {
    return std::pow(10.0, -env.insertion_loss_db / 20.0);
}

}  // namespace

cplx s21(const BiasState& bias, double f, const PortEnvironment& env) {
    // Arm order {NW, SW, SE, NE}; series pair NW/SE, lattice pair NE/SW.
    const double la = 0.5 * (bias.arm_inductances[0] + bias.arm_inductances[2]);
    const double lb = 0.5 * (bias.arm_inductances[1] + bias.arm_inductances[3]);
    return loss_scale(env) * lattice_tau(la, lb, f, env.z0);
}

TransmissionGrid sweep_grid_current(const std::vector<double>& i_z_axis,
                                    const std::vector<double>& i_c_axis, double f,
                                    const BridgeParams& b, const PortEnvironment& env) {
    TransmissionGrid g;
    g.i_z_axis = i_z_axis;
    g.c_axis = i_c_axis;
    g.c_kind = TransmissionGrid::CAxisKind::TargetCurrent;
    g.bias_mode = "current";
    g.frequency = f;
    g.tau.assign(i_z_axis.size() * i_c_axis.size(), cplx{});
    g.flagged.assign(g.tau.size(), 0);
    for (std::size_t r = 0; r < i_c_axis.size(); ++r) {
        for (std::size_t c = 0; c < i_z_axis.size(); ++c) {
            try {
                const BiasState s = solve_bias(
                    AppliedBias::current_driven(i_z_axis[c], i_c_axis[r]), b);
                g.at(r, c) = s21(s, f, env);
            } catch (const NoConvergence&) {
                g.flagged[r * i_z_axis.size() + c] = 1;
            }
        }
    }
    return g;
}

TransmissionGrid sweep_grid_trapped(const std::vector<double>& i_z_axis,
                                    const std::vector<double>& i_trg_axis, double f,
                                    const BridgeParams& b, const PortEnvironment& env,
                                    const TrapProtocol& protocol,
                                    std::mt19937_64& rng) {
    TransmissionGrid g;
    g.i_z_axis = i_z_axis;
    g.c_axis = i_trg_axis;
    g.c_kind = TransmissionGrid::CAxisKind::TargetCurrent;
    g.bias_mode = "trapped";
    g.frequency = f;
    g.tau.assign(i_z_axis.size() * i_trg_axis.size(), cplx{});
    g.flagged.assign(g.tau.size(), 0);
    g.true_j.resize(i_trg_axis.size());
    for (std::size_t r = 0; r < i_trg_axis.size(); ++r) {
        const TrapState t = trap(i_trg_axis[r], protocol, b, rng);
        g.true_j[r] = t.j;
        for (std::size_t c = 0; c < i_z_axis.size(); ++c) {
            try {
                const BiasState s =
                    solve_bias(AppliedBias::fluxoid(i_z_axis[c], t.j, t.phi_ext), b);
                g.at(r, c) = s21(s, f, env);
            } catch (const NoConvergence&) {
                g.flagged[r * i_z_axis.size() + c] = 1;
            }
        }
    }
    return g;
}

TransmissionGrid sweep_grid_flux(const std::vector<double>& i_z_axis,
                                 const std::vector<double>& phi_ext_axis, long j,
                                 double f, const BridgeParams& b,
                                 const PortEnvironment& env) {
    TransmissionGrid g;
    g.i_z_axis = i_z_axis;
    g.c_axis = phi_ext_axis;
    g.c_kind = TransmissionGrid::CAxisKind::ExternalFlux;
    g.bias_mode = "fluxoid";
    g.frequency = f;
    g.tau.assign(i_z_axis.size() * phi_ext_axis.size(), cplx{});
    g.flagged.assign(g.tau.size(), 0);
    for (std::size_t r = 0; r < phi_ext_axis.size(); ++r) {
        for (std::size_t c = 0; c < i_z_axis.size(); ++c) {
            try {
                const BiasState s = solve_bias(
                    AppliedBias::fluxoid(i_z_axis[c], j, phi_ext_axis[r]), b);
                g.at(r, c) = s21(s, f, env);
            } catch (const NoConvergence&) {
                g.flagged[r * i_z_axis.size() + c] = 1;
            }
        }
    }
    return g;
}

ContrastResult on_off_contrast(const std::vector<cplx>& tau_on,
                               const std::vector<cplx>& tau_off,
                               const PortEnvironment& env, double threshold_db,
                               double floor_db) {
    ContrastResult r;
    const std::size_t nf = env.freq_grid.size();
    r.contrast_db.resize(nf);
    for (std::size_t i = 0; i < nf; ++i) {
        const double on = std::abs(tau_on[i]);
        const double off = std::abs(tau_off[i]);
        double c;
        if (off <= on * std::pow(10.0, -floor_db / 20.0)) {
            c = floor_db;
            r.clipped = true;
        } else {
            c = 20.0 * std::log10(on / off);
        }
        r.contrast_db[i] = c;
    }
    // Widest contiguous run above threshold.
    std::size_t best_lo = 0, best_len = 0, run_lo = 0, run_len = 0;
    for (std::size_t i = 0; i <= nf; ++i) {
        if (i < nf && r.contrast_db[i] > threshold_db) {
            if (run_len == 0) run_lo = i;
            ++run_len;
        } else {
            if (run_len > best_len) {
                best_len = run_len;
                best_lo = run_lo;
            }
            run_len = 0;
        }
    }
    if (best_len == 0) throw EmptyBand();
    r.band_lo_hz = env.freq_grid[best_lo];
    r.band_hi_hz = env.freq_grid[best_lo + best_len - 1];
    r.bandwidth_hz = r.band_hi_hz - r.band_lo_hz;
    return r;
}

double large_signal_tau_mag(const BiasState& bias, double f,
                            const PortEnvironment& env, double amplitude,
                            const BridgeParams& b, bool linear_arms, int samples) {
    const double n = static_cast<double>(b.n);
    const auto px = arm_pattern_x();
    cplx fundamental{};
    for (int s = 0; s < samples; ++s) {
        const double theta = 2.0 * M_PI * s / samples;
        const double drive = amplitude * std::sin(theta);
        double la, lb;
        if (linear_arms) {
            la = 0.5 * (bias.arm_inductances[0] + bias.arm_inductances[2]);
            lb = 0.5 * (bias.arm_inductances[1] + bias.arm_inductances[3]);
        } else {
            std::array<double, 4> l{};
            for (int a = 0; a < 4; ++a) {
                const double pj = bias.junction_phase[a] + px[a] * drive / n;
                l[a] = arm_diff_inductance(pj, b);
            }
            la = 0.5 * (l[0] + l[2]);
            lb = 0.5 * (l[1] + l[3]);
        }
        const cplx tau_inst = lattice_tau(la, lb, f, env.z0);
        // Fundamental of tau(t)*sin(theta) relative to the drive.
        fundamental += tau_inst * std::sin(theta) * std::sin(theta);
    }
    fundamental *= 2.0 / samples;
    return loss_scale(env) * std::abs(fundamental);
}

CompressionResult compression_point(const BiasState& bias, double f,
                                    const PortEnvironment& env, double p_min_dbm,
                                    double p_max_dbm, const BridgeParams& b,
                                    bool linear_arms, int samples) {
    const double w = 2.0 * M_PI * f;
    auto amp_of_dbm = [&](double dbm) {
        const double p = 1e-3 * std::pow(10.0, dbm / 10.0);
        return std::sqrt(2.0 * env.z0 * p) / (kPhi0r * w);
    };
    auto mag_of_dbm = [&](double dbm) {
        return large_signal_tau_mag(bias, f, env, amp_of_dbm(dbm), b, linear_arms,
                                    samples);
    };

    CompressionResult r;
    r.small_signal_mag =
        large_signal_tau_mag(bias, f, env, 1e-6, b, linear_arms, samples);
    const double target = r.small_signal_mag * std::pow(10.0, -1.0 / 20.0);

    const int coarse = 41;
    for (int i = 0; i < coarse; ++i) {
        const double dbm = p_min_dbm + (p_max_dbm - p_min_dbm) * i / (coarse - 1);
        r.power_dbm.push_back(dbm);
        r.tau_mag.push_back(mag_of_dbm(dbm));
    }
    // First coarse crossing below the -1 dB level.
    int idx = -1;
    for (int i = 0; i < coarse; ++i) {
        if (r.tau_mag[i] < target) {
            idx = i;
            break;
        }
    }
    if (idx <= 0) throw NoCompressionInRange();

    double lo = r.power_dbm[idx - 1], hi = r.power_dbm[idx];
    for (int it = 0; it < 60 && hi - lo > 1e-6; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mag_of_dbm(mid) < target ? hi : lo) = mid;
    }
    r.p_1db_dbm = 0.5 * (lo + hi);
    return r;
}

}  // namespace bridgesim
