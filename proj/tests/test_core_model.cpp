#include <doctest.h>

#include <cmath>
#include <random>

#include "bridgesim/core_model.hpp"
#include "test_helpers.hpp"

using namespace bridgesim;
using bridgesim::testing::bare_bridge;
using bridgesim::testing::device_squid;

TEST_CASE("squid current closed form") {
    const SquidParams p = device_squid();
    CHECK(squid_current(0.0, p) == 0.0);
    CHECK(squid_current(M_PI, p) ==
          doctest::Approx(p.i0 * 2.0 * M_PI / 1.2).epsilon(1e-12));
    // One junction-phase period adds 4*pi*i0/beta.
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(-10.0, 10.0);
    for (int i = 0; i < 100; ++i) {
        const double phi = uni(rng);
        const double step = squid_current(phi + 2.0 * M_PI, p) - squid_current(phi, p);
        CHECK(step == doctest::Approx(4.0 * M_PI * p.i0 / p.beta()).epsilon(1e-12));
    }
}

TEST_CASE("squid current is strictly monotone below hysteresis") {
    const SquidParams p = device_squid(1.95);
    double prev = squid_current(-20.0, p);
    for (int i = 1; i <= 40000; ++i) {
        const double phi = -20.0 + i * 1e-3;
        const double cur = squid_current(phi, p);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("squid differential inductance") {
    const SquidParams p = device_squid();
    CHECK(squid_diff_inductance(0.0, p) == doctest::Approx(p.l_sh / 3.2).epsilon(1e-12));
    CHECK(squid_diff_inductance(M_PI, p) ==
          doctest::Approx(1.25 * p.l_sh).epsilon(1e-12));
    // Max/min ratio over a dense period scan equals (2+beta)/(2-beta).
    double lo = 1e300, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double l = squid_diff_inductance(2.0 * M_PI * i / 10000.0, p);
        CHECK(l > 0.0);
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    CHECK(hi / lo == doctest::Approx(4.0).epsilon(1e-7));
    CHECK(squid_diff_inductance(1.0, p) ==
          doctest::Approx(squid_diff_inductance(1.0 + 2.0 * M_PI, p)).epsilon(1e-12));
}

TEST_CASE("hysteretic parameters are rejected at construction") {
    CHECK_THROWS_AS(device_squid(2.0), std::invalid_argument);
    CHECK_THROWS_AS(device_squid(2.7), std::invalid_argument);
}

TEST_CASE("hamiltonian at reference points") {
    const BridgeParams b = bare_bridge();
    const double ej = b.squid.e_j();

    CHECK(hamiltonian(ModePhases{}, b) == doctest::Approx(-4.0 * b.n * ej).epsilon(1e-12));
    CHECK(hamiltonian_branch(ArmPhases{}, b) ==
          doctest::Approx(-4.0 * b.n * ej).epsilon(1e-12));

    // phi_C = 2*pi*N: junction term vanishes, quadratic term survives.
    ModePhases m;
    m.c = 2.0 * M_PI * b.n;
    const double expect = M_PI * M_PI * b.n * kPhi0r * kPhi0r / b.squid.l_sh;
    CHECK(hamiltonian(m, b) == doctest::Approx(expect).epsilon(1e-10));
    CHECK(hamiltonian_branch(arm_phases_from_modes(m), b) ==
          doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("branch and eigenmode hamiltonians agree on random phases") {
    const BridgeParams b = bare_bridge();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uni(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        ModePhases m{uni(rng), uni(rng), uni(rng), uni(rng)};
        const double h1 = hamiltonian(m, b);
        const double h2 = hamiltonian_branch(arm_phases_from_modes(m), b);
        CHECK(h1 == doctest::Approx(h2).epsilon(1e-12));
    }
}

TEST_CASE("mode/arm phase map is exactly invertible") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uni(-30.0, 30.0);
    for (int i = 0; i < 200; ++i) {
        ModePhases m{uni(rng), uni(rng), uni(rng), uni(rng)};
        const ModePhases r = modes_from_arm_phases(arm_phases_from_modes(m));
        CHECK(r.x == doctest::Approx(m.x).epsilon(1e-14));
        CHECK(r.y == doctest::Approx(m.y).epsilon(1e-14));
        CHECK(r.z == doctest::Approx(m.z).epsilon(1e-14));
        CHECK(r.c == doctest::Approx(m.c).epsilon(1e-14));
    }
}

TEST_CASE("arm pattern vectors are mutually orthogonal") {
    const auto px = arm_pattern_x();
    const auto py = arm_pattern_y();
    const auto pz = arm_pattern_z();
    const auto pc = arm_pattern_c();
    auto dot = [](const auto& a, const auto& b) {
        double s = 0.0;
        for (int i = 0; i < 4; ++i) s += a[i] * b[i];
        return s;
    };
    CHECK(dot(px, py) == 0.0);
    CHECK(dot(px, pz) == 0.0);
    CHECK(dot(px, pc) == 0.0);
    CHECK(dot(py, pz) == 0.0);
    CHECK(dot(py, pc) == 0.0);
    CHECK(dot(pz, pc) == 0.0);
}

TEST_CASE("coupling g_XY structure") {
    const BridgeParams b = bare_bridge();
    CHECK(coupling_gxy(1.23, 0.0, b) == 0.0);
    CHECK(coupling_gxy(0.0, 7.7, b) == 0.0);
    // Maximal at phi_c = 2*pi*N, phi_z = pi*N/2.
    const double gmax =
        std::abs(coupling_gxy(M_PI * b.n / 2.0, 2.0 * M_PI * b.n, b));
    for (double z = -60.0; z <= 60.0; z += 0.37)
        for (double c = -300.0; c <= 300.0; c += 2.1)
            CHECK(std::abs(coupling_gxy(z, c, b)) <= gmax * (1.0 + 1e-12));
    // Odd in both arguments.
    CHECK(coupling_gxy(-1.1, 2.2, b) == doctest::Approx(-coupling_gxy(1.1, 2.2, b)));
    CHECK(coupling_gxy(1.1, -2.2, b) == doctest::Approx(-coupling_gxy(1.1, 2.2, b)));
}

TEST_CASE("Kerr K_XY structure") {
    const BridgeParams b = bare_bridge();
    CHECK(kerr_kxy(0.3, 2.0 * M_PI * b.n, b) == doctest::Approx(0.0).epsilon(1e-12));
    const double kmax = std::abs(kerr_kxy(0.0, 0.0, b));
    for (double z = -60.0; z <= 60.0; z += 0.51)
        CHECK(std::abs(kerr_kxy(z, 13.0, b)) <= kmax);
    CHECK(kerr_kxy(-1.7, 4.1, b) == doctest::Approx(kerr_kxy(1.7, 4.1, b)));
    CHECK(kerr_kxy(1.7, -4.1, b) == doctest::Approx(kerr_kxy(1.7, 4.1, b)));
    // Per-factor sin^2 + cos^2 structure between the coupling and Kerr forms.
    const double ej = b.squid.e_j();
    for (double z : {0.4, 1.9, -3.0}) {
        for (double c : {0.0, 11.0, -40.0}) {
            const double s2 =
                coupling_gxy(z, c, b) / (2.0 * ej / b.n);  // sin(z/N) sin(c/4N)
            const double c2 = kerr_kxy(z, c, b) * (-24.0 * std::pow(b.n, 3) / ej);
            const double sz = std::sin(z / b.n), cz = std::cos(z / b.n);
            const double sc = std::sin(c / (4.0 * b.n)), cc = std::cos(c / (4.0 * b.n));
            CHECK(s2 == doctest::Approx(sz * sc).epsilon(1e-12));
            CHECK(c2 == doctest::Approx(cz * cc).epsilon(1e-12));
            CHECK(sz * sz + cz * cz == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("mode currents vanish at the origin") {
    const BridgeParams b = bare_bridge();
    const ModeCurrents i = mode_currents(ModePhases{}, b);
    CHECK(i.x == 0.0);
    CHECK(i.y == 0.0);
    CHECK(i.z == 0.0);
    CHECK(i.c == 0.0);
}

TEST_CASE("I_C period identity at zero stray inductance") {
    const BridgeParams b = bare_bridge();
    const double shift = 8.0 * M_PI * b.n;
    for (double c : {0.0, 3.0, -17.0, 120.0}) {
        const double i1 = mode_currents(ModePhases{0, 0, 0, c}, b).c;
        const double i2 = mode_currents(ModePhases{0, 0, 0, c + shift}, b).c;
        CHECK(i2 - i1 ==
              doctest::Approx(4.0 * M_PI * b.squid.i0 / b.squid.beta()).epsilon(1e-12));
    }
}

TEST_CASE("mode currents match central finite differences of H") {
    const BridgeParams b = bare_bridge();
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> uni(-40.0, 40.0);
    const double h = 1e-5;
    for (int i = 0; i < 1000; ++i) {
        ModePhases m{uni(rng), uni(rng), uni(rng), uni(rng)};
        const ModeCurrents ic = mode_currents(m, b);
        auto fd = [&](auto set) {
            ModePhases p = m, q = m;
            set(p, h);
            set(q, -h);
            return (hamiltonian(p, b) - hamiltonian(q, b)) / (2.0 * h * kPhi0r);
        };
        const double fx = fd([](ModePhases& p, double d) { p.x += d; });
        const double fy = fd([](ModePhases& p, double d) { p.y += d; });
        const double fz = fd([](ModePhases& p, double d) { p.z += d; });
        const double fc = fd([](ModePhases& p, double d) { p.c += d; });
        const double scale = b.squid.i0;
        CHECK(std::abs(ic.x - fx) / std::max(std::abs(fx), scale) < 1e-6);
        CHECK(std::abs(ic.y - fy) / std::max(std::abs(fy), scale) < 1e-6);
        CHECK(std::abs(ic.z - fz) / std::max(std::abs(fz), scale) < 1e-6);
        CHECK(std::abs(ic.c - fc) / std::max(std::abs(fc), scale) < 1e-6);
    }
}

TEST_CASE("hamiltonian phi_C periodicity splits into quadratic shift only") {
    const BridgeParams b = bare_bridge();
    const double period = 8.0 * M_PI * b.n;
    const double quad_coeff = kPhi0r * kPhi0r / (b.n * b.squid.l_sh) / 4.0;
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> uni(-20.0, 20.0);
    for (int i = 0; i < 200; ++i) {
        ModePhases m{uni(rng), uni(rng), uni(rng), uni(rng)};
        ModePhases shifted = m;
        shifted.c += period;
        const double dh = hamiltonian(shifted, b) - hamiltonian(m, b);
        const double quad_shift =
            quad_coeff * (shifted.c * shifted.c - m.c * m.c);
        CHECK(dh == doctest::Approx(quad_shift).epsilon(1e-12));
    }
}

TEST_CASE("periods") {
    const BridgeParams b0 = bare_bridge();
    const Periods p0 = periods(b0);
    CHECK(p0.phi_c_period == doctest::Approx(160.0 * M_PI).epsilon(1e-14));
    CHECK(p0.i_c_period ==
          doctest::Approx(4.0 * M_PI * b0.squid.i0 / 1.2).epsilon(1e-14));

    // i_c period is independent of l_str; phi_c period is not.
    const BridgeParams b1(b0.squid, 20, 20.0 * b0.squid.l_sh, 0.0);
    const Periods p1 = periods(b1);
    CHECK(p1.i_c_period == p0.i_c_period);
    CHECK(p1.phi_c_period == doctest::Approx(240.0 * M_PI).epsilon(1e-14));

    CHECK(i_z_period(b0) == doctest::Approx(4.0 * p0.i_c_period).epsilon(1e-14));
}
