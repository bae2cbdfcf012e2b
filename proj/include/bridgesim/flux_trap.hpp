#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bridgesim/bias_solver.hpp"

namespace bridgesim {

/// PCS trapping protocol parameters. heater_threshold and ramp_duration are
/// protocol metadata (reported by the CLI); the thermal event itself is
/// modeled as instantaneous. boundary_width is the logistic width of the
/// stochastic trapping boundary as a fraction of one step; set it and
/// failure_probability to 0 for a fully deterministic channel.
struct TrapProtocol {
    double heater_threshold = 4.8e-3;  // A
    double ramp_duration = 200e-6;     // s
    double failure_probability = 0.023;
    double boundary_width = 0.05;      // fraction of one flux-quantum step
    double failure_decay = 0.7;        // geometric weight per extra quantum
    double decay_per_day = 0.0;        // linear I_C drift knob, fraction/day
    std::uint64_t rng_seed = 0;
};

/// One trapped configuration: fluxoid index j, the external flux applied
/// through the PCS shunt, and the resulting circulating current.
struct TrapState {
    long j = 0;
    double phi_ext = 0.0;  // radians
    double i_c = 0.0;      // A
};

/// Circulating current on fluxoid branch j: solves
/// phi_C + l_str*I_C/phi0r = 2*pi*j + phi_ext at the given i_z.
double i_c_of_j(long j, double phi_ext, double i_z, const BridgeParams& b);

/// One PCS trap event targeting i_trg, drawing stochastic boundary and
/// failure outcomes from rng. phi_ext after the event is l_pcs*i_trg/phi0r.
TrapState trap(double i_trg, const TrapProtocol& protocol, const BridgeParams& b,
               std::mt19937_64& rng);

/// Convenience overload with a private stream seeded from the protocol.
TrapState trap(double i_trg, const TrapProtocol& protocol, const BridgeParams& b);

/// Width of one trapped-flux step in i_trg at the given bias:
/// I_stp = 2*pi*phi0r / loop_diff_inductance. Periodic in i_trg with the
/// circulating-current period.
double step_width(double i_trg, double i_z, const BridgeParams& b);

/// Trapped flux quanta needed to advance the transmission by one period,
/// from the loop model: round(phi~_C / 2*pi) = 4N + 2*l_str/l_sh.
long quanta_per_period(const BridgeParams& b);

/// Brute-force count: steps j forward from 0 and counts how many quanta
/// advance the per-squid junction phase by 2*pi at i_z = 0.
long quanta_per_period_bruteforce(const BridgeParams& b);

// Stray inductance implied by a measured quanta count, under the two
// conventions the factor-2 tension allows. The loop model reproduces the
// first one.
double stray_from_quanta_loop(long count, const BridgeParams& b);   // (count-4N)/2 * l_sh
double stray_from_quanta_flat(long count, const BridgeParams& b);   // (count-4N) * l_sh

/// Hour-by-hour evolution of a trapped state: Poisson-distributed
/// spontaneous +-1 jumps at jump_rate per hour, plus the linear decay knob.
std::vector<TrapState> drift_monitor(int hours, double jump_rate,
                                     const TrapState& initial,
                                     const TrapProtocol& protocol,
                                     const BridgeParams& b);

}  // namespace bridgesim
