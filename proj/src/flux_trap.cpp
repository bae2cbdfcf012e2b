#include "bridgesim/flux_trap.hpp"

#include <cmath>
#include <stdexcept>

namespace bridgesim {

double i_c_of_j(long j, double phi_ext, double i_z, const BridgeParams& b) {
    const BiasState s = solve_bias(AppliedBias::fluxoid(i_z, j, phi_ext), b);
    return mode_currents(s.phases, b).c;
}

TrapState trap(double i_trg, const TrapProtocol& protocol, const BridgeParams& b,
               std::mt19937_64& rng) {
    // Open-loop phase carried by i_trg with the PCS normal (i_z already
    // ramped back to 0 when the aluminum recondenses).
    const BiasState open = solve_bias(AppliedBias::current_driven(0.0, i_trg), b);
    const double loop_phase = open.phases.c + b.l_str * i_trg / kPhi0r;
    const double phi_ext = b.l_pcs * i_trg / kPhi0r;

    const double u = (loop_phase - phi_ext) / (2.0 * M_PI);
    long j;
    if (protocol.boundary_width > 0.0) {
        const double base = std::floor(u);
        const double frac = u - base;
        const double p_up =
            1.0 / (1.0 + std::exp(-(frac - 0.5) / protocol.boundary_width));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        j = static_cast<long>(base) + (uni(rng) < p_up ? 1 : 0);
    } else {
        j = std::lround(u);
    }

    if (protocol.failure_probability > 0.0) {
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        if (uni(rng) < protocol.failure_probability) {
            const double w = protocol.failure_decay;
            const double norm = 1.0 + w + w * w;
            const double r = uni(rng) * norm;
            const int mag = (r < 1.0) ? 1 : (r < 1.0 + w ? 2 : 3);
            const int sign = (uni(rng) < 0.5) ? -1 : 1;
            j += sign * mag;
        }
    }

    TrapState t;
    t.j = j;
    t.phi_ext = phi_ext;
    t.i_c = i_c_of_j(j, phi_ext, 0.0, b);
    return t;
}

TrapState trap(double i_trg, const TrapProtocol& protocol, const BridgeParams& b) {
    std::mt19937_64 rng(protocol.rng_seed);
    return trap(i_trg, protocol, b, rng);
}

double step_width(double i_trg, double i_z, const BridgeParams& b) {
    const BiasState s = solve_bias(AppliedBias::current_driven(i_z, i_trg), b);
    return 2.0 * M_PI * kPhi0r / loop_diff_inductance(s, b);
}

long quanta_per_period(const BridgeParams& b) {
    return std::lround(periods(b).phi_c_period / (2.0 * M_PI));
}

long quanta_per_period_bruteforce(const BridgeParams& b) {
    // Advance j until the per-squid junction phase at i_z = 0 has grown by
    // exactly 2*pi relative to j = 0.
    const double phi0 =
        solve_bias(AppliedBias::fluxoid(0.0, 0, 0.0), b).junction_phase[0];
    const long hard_cap = 16L * b.n + 8 * quanta_per_period(b) + 64;
    double prev = phi0;
    for (long j = 1; j <= hard_cap; ++j) {
        const double pj =
            solve_bias(AppliedBias::fluxoid(0.0, j, 0.0), b).junction_phase[0];
        if (pj - phi0 >= 2.0 * M_PI) {
            // Nearest integer: the crossing may land exactly on j or just
            // past it when l_str/l_sh is irrational.
            const double before = prev - phi0;
            const double after = pj - phi0;
            return (2.0 * M_PI - before < after - 2.0 * M_PI) ? j - 1 : j;
        }
        prev = pj;
    }
    throw std::runtime_error("quanta_per_period_bruteforce: no period found");
}

double stray_from_quanta_loop(long count, const BridgeParams& b) {
    return 0.5 * (count - 4.0 * b.n) * b.squid.l_sh;
}

double stray_from_quanta_flat(long count, const BridgeParams& b) {
    return (count - 4.0 * b.n) * b.squid.l_sh;
}

std::vector<TrapState> drift_monitor(int hours, double jump_rate,
                                     const TrapState& initial,
                                     const TrapProtocol& protocol,
                                     const BridgeParams& b) {
    if (jump_rate < 0.0)
        throw std::invalid_argument("drift_monitor: jump_rate must be >= 0");
    std::mt19937_64 rng(protocol.rng_seed);
    std::poisson_distribution<int> pois(jump_rate);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    std::vector<TrapState> out;
    out.reserve(hours + 1);
    TrapState cur = initial;
    out.push_back(cur);
    for (int h = 1; h <= hours; ++h) {
        int jumps = (jump_rate > 0.0) ? pois(rng) : 0;
        for (int k = 0; k < jumps; ++k) cur.j += (uni(rng) < 0.5) ? -1 : 1;
        cur.i_c = i_c_of_j(cur.j, cur.phi_ext, 0.0, b) *
                  (1.0 - protocol.decay_per_day * h / 24.0);
        out.push_back(cur);
    }
    return out;
}

}  // namespace bridgesim
