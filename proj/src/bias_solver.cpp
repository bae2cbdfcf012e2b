#include "bridgesim/bias_solver.hpp"

#include <cmath>

namespace bridgesim {

namespace {

struct Point {
    double phi_z;
    double phi_c;
};

struct Jacobian {
    // d(I_Z, I_C)/d(phi_z, phi_c)
    double zz, zc, cz, cc;
};

BiasState assemble_state(const Point& p, const BridgeParams& b) {
    BiasState s;
    s.phases = ModePhases{0.0, 0.0, p.phi_z, p.phi_c};
    s.arm_phases = arm_phases_from_modes(s.phases);
    const auto arms = s.arm_phases.as_array();
    const double n = static_cast<double>(b.n);
    for (int l = 0; l < 4; ++l) {
        s.junction_phase[l] = arms[l] / n;
        s.arm_currents[l] = squid_current(s.junction_phase[l], b.squid);
        s.arm_inductances[l] = arm_diff_inductance(s.junction_phase[l], b);
    }
    return s;
}

Jacobian jacobian_at(const Point& p, const BridgeParams& b) {
    const ArmPhases a = arm_phases_from_modes(ModePhases{0.0, 0.0, p.phi_z, p.phi_c});
    const auto arms = a.as_array();
    const auto pz = arm_pattern_z();
    const double n = static_cast<double>(b.n);
    const double beta = b.squid.beta();
    Jacobian j{0.0, 0.0, 0.0, 0.0};
    for (int l = 0; l < 4; ++l) {
        const double didphi = b.squid.i0 * (std::cos(arms[l] / n) + 2.0 / beta) / n;
        j.zz += didphi * pz[l] * pz[l];
        j.zc += didphi * pz[l] * 0.25;
        j.cz += didphi * 0.25 * pz[l];
        j.cc += didphi * 0.25 * 0.25;
    }
    return j;
}

// Residuals: r0 is always the I_Z mismatch (A). In CurrentDriven mode r1 is
// the I_C mismatch (A); in FluxoidConstrained mode it is the loop-phase
// constraint residual (rad).
void residuals(const Point& p, const AppliedBias& ap, const BridgeParams& b,
               double& r0, double& r1) {
    const ModeCurrents ic = mode_currents(ModePhases{0.0, 0.0, p.phi_z, p.phi_c}, b);
    r0 = ic.z - ap.i_z;
    if (ap.mode == BiasMode::CurrentDriven) {
        r1 = ic.c - ap.i_c;
    } else {
        r1 = p.phi_c + b.l_str * ic.c / kPhi0r - 2.0 * M_PI * ap.j - ap.phi_ext;
    }
}

}  // namespace

BiasState solve_bias(const AppliedBias& applied, const BridgeParams& b,
                     const SolverOptions& opts) {
    const double i0 = b.squid.i0;
    const double beta = b.squid.beta();
    const double n = static_cast<double>(b.n);
    const double tol_i = opts.tol_scale * i0;

    Point p{};
    if (opts.initial) {
        p.phi_z = (*opts.initial)[0];
        p.phi_c = (*opts.initial)[1];
    } else {
        // Linearized estimate about the origin.
        const double dzz = 4.0 * i0 * (1.0 + 2.0 / beta) / n;
        p.phi_z = applied.i_z / dzz;
        if (applied.mode == BiasMode::CurrentDriven) {
            const double dcc = i0 * (1.0 + 2.0 / beta) / (4.0 * n);
            p.phi_c = applied.i_c / dcc;
        } else {
            const double loop = 2.0 * M_PI * applied.j + applied.phi_ext;
            const double dcc = i0 * (1.0 + 2.0 / beta) / (4.0 * n);
            p.phi_c = loop / (1.0 + b.l_str * dcc / kPhi0r);
        }
    }

    auto merit = [&](double r0, double r1) {
        const double a = r0 / i0;
        const double c =
            (applied.mode == BiasMode::CurrentDriven) ? r1 / i0 : r1;
        return std::hypot(a, c);
    };
    auto converged = [&](double r0, double r1) {
        if (applied.mode == BiasMode::CurrentDriven)
            return std::abs(r0) <= tol_i && std::abs(r1) <= tol_i;
        return std::abs(r0) <= tol_i && std::abs(r1) <= opts.loop_tol;
    };

    double r0, r1;
    residuals(p, applied, b, r0, r1);
    double m = merit(r0, r1);

    for (int it = 0; it < opts.max_iterations; ++it) {
        if (converged(r0, r1)) break;
        const Jacobian jac = jacobian_at(p, b);
        // Jacobian of (r0, r1) wrt (phi_z, phi_c).
        double a00 = jac.zz, a01 = jac.zc;
        double a10, a11;
        if (applied.mode == BiasMode::CurrentDriven) {
            a10 = jac.cz;
            a11 = jac.cc;
        } else {
            a10 = b.l_str * jac.cz / kPhi0r;
            a11 = 1.0 + b.l_str * jac.cc / kPhi0r;
        }
        const double det = a00 * a11 - a01 * a10;
        if (!(std::abs(det) > 0.0)) throw NoConvergence(m);
        const double dz = (-r0 * a11 + r1 * a01) / det;
        const double dc = (r0 * a10 - r1 * a00) / det;

        double step = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.max_halvings; ++h) {
            const Point trial{p.phi_z + step * dz, p.phi_c + step * dc};
            double t0, t1;
            residuals(trial, applied, b, t0, t1);
            const double tm = merit(t0, t1);
            if (tm < m || converged(t0, t1)) {
                p = trial;
                r0 = t0;
                r1 = t1;
                m = tm;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) throw NoConvergence(m);
    }
    if (!converged(r0, r1)) throw NoConvergence(m);

    BiasState s = assemble_state(p, b);
    s.residual_norm = std::abs(r0) +
                      ((applied.mode == BiasMode::CurrentDriven)
                           ? std::abs(r1)
                           : std::abs(r1) * kPhi0r /
                                 (b.l_str + 4.0 * n * b.squid.l_sh));
    return s;
}

double loop_diff_inductance(const BiasState& s, const BridgeParams& b) {
    const Point p{s.phases.z, s.phases.c};
    const Jacobian j = jacobian_at(p, b);
    // dI_C/dphi_C at fixed I_Z (Schur complement of the Z block).
    const double dic = j.cc - j.cz * j.zc / j.zz;
    return kPhi0r / dic + b.l_str;
}

std::array<double, 4> arm_current_split(double i_z, double i_c) {
    // {NW, SW, SE, NE}
    return {i_c + 0.5 * i_z, i_c - 0.5 * i_z, i_c + 0.5 * i_z, i_c - 0.5 * i_z};
}

}  // namespace bridgesim
