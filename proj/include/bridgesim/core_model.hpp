#pragma once

#include <array>

#include "bridgesim/params.hpp"

namespace bridgesim {

/// Node-basis mode phases (X input, Y output, Z actuation, C circulation),
/// in radians. No range restriction; the fluxoid branch is explicit in the
/// flux-trap module.
struct ModePhases {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double c = 0.0;
};

/// Branch phases across the four arms, in radians. Arm order everywhere in
/// this library is {NW, SW, SE, NE}.
struct ArmPhases {
    double nw = 0.0;
    double sw = 0.0;
    double se = 0.0;
    double ne = 0.0;

    std::array<double, 4> as_array() const { return {nw, sw, se, ne}; }
};

// Linear map between mode and arm phases. Exactly invertible; the arm
// pattern vectors d(arm)/d(mode) are mutually orthogonal.
ArmPhases arm_phases_from_modes(const ModePhases& m);
ModePhases modes_from_arm_phases(const ArmPhases& a);

// Sensitivity of arm l to mode k, constant by linearity. k in {x,y,z,c}
// selected by the accessors below.
std::array<double, 4> arm_pattern_x();
std::array<double, 4> arm_pattern_y();
std::array<double, 4> arm_pattern_z();
std::array<double, 4> arm_pattern_c();

/// Current through one rf-SQUID at junction phase phi:
/// I = i0 * (sin(phi) + 2*phi/beta). Strictly increasing for beta < 2.
double squid_current(double phi, const SquidParams& p);

/// Differential inductance of one rf-SQUID:
/// (phi0r/i0) / (cos(phi) + 2/beta). Positive and 2*pi-periodic for beta < 2.
double squid_diff_inductance(double phi, const SquidParams& p);

/// Differential inductance of one full arm (n squids in series plus a
/// quarter of the stray loop inductance).
double arm_diff_inductance(double phi_j, const BridgeParams& b);

// Bridge energy, J. Branch-flux and eigenmode forms agree to machine
// precision; both are kept so they can cross-check each other.
double hamiltonian_branch(const ArmPhases& a, const BridgeParams& b);
double hamiltonian(const ModePhases& m, const BridgeParams& b);

/// Energy prefactor of the phi_X*phi_Y interaction term:
/// g_XY = (2*E_J/N) * sin(phi_z/N) * sin(phi_c/4N). Odd in both arguments.
double coupling_gxy(double phi_z, double phi_c, const BridgeParams& b);

/// Energy prefactor of the quartic Kerr structure
/// (phi_X^4 + phi_Y^4 + 6 phi_X^2 phi_Y^2):
/// K_XY = -(E_J/24N^3) * cos(phi_z/N) * cos(phi_c/4N). Even in both.
double kerr_kxy(double phi_z, double phi_c, const BridgeParams& b);

/// Mode currents I_k = (1/phi0r) dH/dphi_k, k in {X, Y, Z, C}, via the
/// chain rule over the arm currents.
struct ModeCurrents {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double c = 0.0;
};
ModeCurrents mode_currents(const ModePhases& m, const BridgeParams& b);

/// Periods of the bridge response: the circulating-current period
/// I~_C = 4*pi*i0/beta (independent of l_str) and the loop-phase period
/// phi~_C = 8*pi*N + 4*pi*l_str/l_sh.
struct Periods {
    double i_c_period;    // A
    double phi_c_period;  // radians
};
Periods periods(const BridgeParams& b);

/// Z-actuation current period at fixed trapped flux: the i_z increment
/// advancing phi_Z/N by 2*pi, equal to 16*pi*i0/beta.
double i_z_period(const BridgeParams& b);

}  // namespace bridgesim
