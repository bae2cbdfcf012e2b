#include "bridgesim/core_model.hpp"

#include <cmath>

namespace bridgesim {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

ArmPhases arm_phases_from_modes(const ModePhases& m) {
    const double q = m.c / 4.0;
    const double u = m.x / kSqrt2;
    const double v = m.y / kSqrt2;
    ArmPhases a;
    a.nw = q + m.z - u + v;
    a.sw = q - m.z + u + v;
    a.se = q + m.z + u - v;
    a.ne = q - m.z - u - v;
    return a;
}

ModePhases modes_from_arm_phases(const ArmPhases& a) {
    ModePhases m;
    m.c = a.nw + a.sw + a.se + a.ne;
    m.z = (a.nw - a.sw + a.se - a.ne) / 4.0;
    m.x = (a.sw - a.ne + a.se - a.nw) / (2.0 * kSqrt2);
    m.y = (a.sw - a.ne - a.se + a.nw) / (2.0 * kSqrt2);
    return m;
}

// Arm order {NW, SW, SE, NE}.
std::array<double, 4> arm_pattern_x() {
    return {-1.0 / kSqrt2, 1.0 / kSqrt2, 1.0 / kSqrt2, -1.0 / kSqrt2};
}
std::array<double, 4> arm_pattern_y() {
    return {1.0 / kSqrt2, 1.0 / kSqrt2, -1.0 / kSqrt2, -1.0 / kSqrt2};
}
std::array<double, 4> arm_pattern_z() { return {1.0, -1.0, 1.0, -1.0}; }
std::array<double, 4> arm_pattern_c() { return {0.25, 0.25, 0.25, 0.25}; }

double squid_current(double phi, const SquidParams& p) {
    return p.i0 * (std::sin(phi) + 2.0 * phi / p.beta());
}

double squid_diff_inductance(double phi, const SquidParams& p) {
    return (kPhi0r / p.i0) / (std::cos(phi) + 2.0 / p.beta());
}

double arm_diff_inductance(double phi_j, const BridgeParams& b) {
    return b.n * squid_diff_inductance(phi_j, b.squid) + b.l_str / 4.0;
}

double hamiltonian_branch(const ArmPhases& a, const BridgeParams& b) {
    const double ej = b.squid.e_j();
    const double n = static_cast<double>(b.n);
    const double ind = kPhi0r * kPhi0r / b.squid.l_sh;
    double h = 0.0;
    for (double phi_l : a.as_array()) {
        const double pj = phi_l / n;
        h += n * (-ej * std::cos(pj) + ind * pj * pj);
    }
    return h;
}

double hamiltonian(const ModePhases& m, const BridgeParams& b) {
    const double n = static_cast<double>(b.n);
    const double ej = b.squid.e_j();
    const double quad = kPhi0r * kPhi0r / (n * b.squid.l_sh) *
                        (m.c * m.c / 4.0 + 2.0 * m.x * m.x + 2.0 * m.y * m.y +
                         4.0 * m.z * m.z);
    const double qc = m.c / (4.0 * n);
    const double qx = m.x / (kSqrt2 * n);
    const double qy = m.y / (kSqrt2 * n);
    const double qz = m.z / n;
    const double junc =
        -4.0 * n * ej *
        (std::cos(qc) * std::cos(qx) * std::cos(qy) * std::cos(qz) -
         std::sin(qc) * std::sin(qx) * std::sin(qy) * std::sin(qz));
    return quad + junc;
}

double coupling_gxy(double phi_z, double phi_c, const BridgeParams& b) {
    const double n = static_cast<double>(b.n);
    return 2.0 * b.squid.e_j() / n * std::sin(phi_z / n) *
           std::sin(phi_c / (4.0 * n));
}

double kerr_kxy(double phi_z, double phi_c, const BridgeParams& b) {
    const double n = static_cast<double>(b.n);
    return -b.squid.e_j() / (24.0 * n * n * n) * std::cos(phi_z / n) *
           std::cos(phi_c / (4.0 * n));
}

ModeCurrents mode_currents(const ModePhases& m, const BridgeParams& b) {
    const ArmPhases a = arm_phases_from_modes(m);
    const double n = static_cast<double>(b.n);
    const std::array<double, 4> arms = a.as_array();
    std::array<double, 4> i_l{};
    for (int l = 0; l < 4; ++l) i_l[l] = squid_current(arms[l] / n, b.squid);

    const auto px = arm_pattern_x();
    const auto py = arm_pattern_y();
    const auto pz = arm_pattern_z();
    const auto pc = arm_pattern_c();
    ModeCurrents out;
    for (int l = 0; l < 4; ++l) {
        out.x += i_l[l] * px[l];
        out.y += i_l[l] * py[l];
        out.z += i_l[l] * pz[l];
        out.c += i_l[l] * pc[l];
    }
    return out;
}

Periods periods(const BridgeParams& b) {
    const double beta = b.squid.beta();
    Periods p;
    p.i_c_period = 4.0 * M_PI * b.squid.i0 / beta;
    p.phi_c_period = 8.0 * M_PI * b.n + 4.0 * M_PI * b.l_str / b.squid.l_sh;
    return p;
}

double i_z_period(const BridgeParams& b) {
    return 16.0 * M_PI * b.squid.i0 / b.squid.beta();
}

}  // namespace bridgesim
