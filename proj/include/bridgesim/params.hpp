#pragma once

#include <stdexcept>

namespace bridgesim {

// Reduced flux quantum hbar/2e in Wb. All phases in this library are in
// radians of junction/loop phase; currents convert through this constant.
inline constexpr double kPhi0r = 1.054571817e-34 / (2.0 * 1.602176634e-19);

// Full flux quantum h/2e in Wb, used only for the alternate differential
// inductance readout (phi0/I_stp with the h/2e convention).
inline constexpr double kPhi0h = 6.62607015e-34 / (2.0 * 1.602176634e-19);

/// One rf-SQUID: a junction with critical current i0 shunted by l_sh.
/// The screening ratio beta = l_sh*i0/phi0r is derived, never stored
/// independently; beta >= 2 is hysteretic and rejected.
struct SquidParams {
    double i0;    // junction critical current, A
    double l_sh;  // shunt inductance, H

    SquidParams(double i0_, double l_sh_) : i0(i0_), l_sh(l_sh_) {
        if (!(i0 > 0.0)) throw std::invalid_argument("SquidParams: i0 must be > 0");
        if (!(l_sh > 0.0)) throw std::invalid_argument("SquidParams: l_sh must be > 0");
        if (!(beta() < 2.0))
            throw std::invalid_argument("SquidParams: beta >= 2 (hysteretic regime)");
    }

    double beta() const { return l_sh * i0 / kPhi0r; }
    double e_j() const { return kPhi0r * i0; }   // Josephson energy, J
    double l_j() const { return kPhi0r / i0; }   // Josephson inductance, H
};

/// The assembled four-arm bridge: n identical rf-SQUIDs per arm, stray loop
/// inductance l_str in series with the loop, and the PCS shunt l_pcs that
/// converts the source current into an external flux bias.
struct BridgeParams {
    SquidParams squid;
    int n = 20;           // rf-SQUIDs per arm
    double l_str = 0.0;   // stray loop inductance, H
    double l_pcs = 0.0;   // PCS shunt inductance, H

    BridgeParams(SquidParams s, int n_ = 20, double l_str_ = 0.0, double l_pcs_ = 0.0)
        : squid(s), n(n_), l_str(l_str_), l_pcs(l_pcs_) {
        if (n < 1) throw std::invalid_argument("BridgeParams: n must be >= 1");
        if (l_str < 0.0) throw std::invalid_argument("BridgeParams: l_str must be >= 0");
        if (l_pcs < 0.0) throw std::invalid_argument("BridgeParams: l_pcs must be >= 0");
    }
};

}  // namespace bridgesim
