#include <doctest.h>

#include <cmath>
#include <random>

#include "bridgesim/bias_solver.hpp"
#include "test_helpers.hpp"

using namespace bridgesim;
using bridgesim::testing::bare_bridge;
using bridgesim::testing::device_bridge;

TEST_CASE("zero applied currents solve to the origin") {
    const BridgeParams b = device_bridge();
    const BiasState s = solve_bias(AppliedBias::current_driven(0.0, 0.0), b);
    CHECK(std::abs(s.phases.z) < 1e-15);
    CHECK(std::abs(s.phases.c) < 1e-15);
    for (double i : s.arm_currents) CHECK(std::abs(i) < 1e-18);
}

TEST_CASE("fluxoid branch 0 with no external flux carries no current") {
    const BridgeParams b = device_bridge();
    const BiasState s = solve_bias(AppliedBias::fluxoid(0.0, 0, 0.0), b);
    CHECK(std::abs(mode_currents(s.phases, b).c) < 1e-12 * b.squid.i0);
}

TEST_CASE("round-trip: forward mode currents are recovered by the solver") {
    const BridgeParams b = device_bridge();
    std::mt19937 rng(17);
    // Stay within one monotone branch scale; phi_z/N and phi_c/4N well
    // beyond a junction period.
    std::uniform_real_distribution<double> uz(-3.0 * b.n, 3.0 * b.n);
    std::uniform_real_distribution<double> uc(-12.0 * b.n, 12.0 * b.n);
    for (int i = 0; i < 1000; ++i) {
        const ModePhases truth{0.0, 0.0, uz(rng), uc(rng)};
        const ModeCurrents cur = mode_currents(truth, b);
        const BiasState s = solve_bias(AppliedBias::current_driven(cur.z, cur.c), b);
        CHECK(s.phases.z == doctest::Approx(truth.z).epsilon(1e-8));
        CHECK(s.phases.c == doctest::Approx(truth.c).epsilon(1e-8));
    }
}

TEST_CASE("solution is independent of the starting point") {
    const BridgeParams b = device_bridge();
    const AppliedBias ap = AppliedBias::current_driven(3e-5, 1.7e-5);
    const BiasState ref = solve_bias(ap, b);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> uni(-40.0, 40.0);
    for (int i = 0; i < 10; ++i) {
        SolverOptions opts;
        opts.initial = std::array<double, 2>{uni(rng), uni(rng)};
        const BiasState s = solve_bias(ap, b, opts);
        CHECK(s.phases.z == doctest::Approx(ref.phases.z).epsilon(1e-8));
        CHECK(s.phases.c == doctest::Approx(ref.phases.c).epsilon(1e-8));
    }
}

TEST_CASE("fluxoid constraint holds at the solution") {
    const BridgeParams b = device_bridge();
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> upe(-3.0, 3.0);
    std::uniform_real_distribution<double> uiz(-5e-5, 5e-5);
    for (int i = 0; i < 200; ++i) {
        const long j = static_cast<long>(i) - 100;
        const double phi_ext = upe(rng);
        const double i_z = uiz(rng);
        const BiasState s = solve_bias(AppliedBias::fluxoid(i_z, j, phi_ext), b);
        const double ic = mode_currents(s.phases, b).c;
        const double resid = s.phases.c + b.l_str * ic / kPhi0r -
                             2.0 * M_PI * j - phi_ext;
        CHECK(std::abs(resid) < 1e-10);
        CHECK(std::abs(mode_currents(s.phases, b).z - i_z) < 1e-11 * b.squid.i0);
        // Loop phase equals the sum of per-arm squid phases.
        const double sum_arm = b.n * (s.junction_phase[0] + s.junction_phase[1] +
                                      s.junction_phase[2] + s.junction_phase[3]);
        CHECK(sum_arm == doctest::Approx(s.phases.c).epsilon(1e-12));
    }
}

TEST_CASE("arm currents pair up: opposite equal, adjacent different") {
    const BridgeParams b = device_bridge();
    const BiasState s = solve_bias(AppliedBias::current_driven(4e-5, 2e-5), b);
    // {NW, SW, SE, NE}: NW/SE opposite, SW/NE opposite.
    CHECK(s.arm_currents[0] == doctest::Approx(s.arm_currents[2]).epsilon(1e-12));
    CHECK(s.arm_currents[1] == doctest::Approx(s.arm_currents[3]).epsilon(1e-12));
    CHECK(std::abs(s.arm_currents[0] - s.arm_currents[1]) > 1e-9);
}

TEST_CASE("energy minus work terms is stationary at the solution") {
    const BridgeParams b = device_bridge();
    const double i_z = 2.5e-5, i_c = -1.1e-5;
    const BiasState s = solve_bias(AppliedBias::current_driven(i_z, i_c), b);
    // h balances FD truncation against cancellation in H (~4N*E_J >> the
    // gradient scale).
    const double h = 1e-4;
    auto g = [&](double dz, double dc) {
        ModePhases m = s.phases;
        m.z += dz;
        m.c += dc;
        return hamiltonian(m, b) - kPhi0r * (i_z * m.z + i_c * m.c);
    };
    const double gz = (g(h, 0) - g(-h, 0)) / (2.0 * h);
    const double gc = (g(0, h) - g(0, -h)) / (2.0 * h);
    // Natural units: phases in radians, energy scaled by phi0r*i0.
    const double scale = kPhi0r * b.squid.i0;
    CHECK(std::abs(gz) / scale < 1e-9);
    CHECK(std::abs(gc) / scale < 1e-9);
}

TEST_CASE("brute-force energy minimization agrees within one grid cell") {
    const BridgeParams b = bare_bridge();
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> uz(-1.5 * b.n, 1.5 * b.n);
    std::uniform_real_distribution<double> uc(-6.0 * b.n, 6.0 * b.n);
    for (int trial = 0; trial < 20; ++trial) {
        const ModePhases truth{0.0, 0.0, uz(rng), uc(rng)};
        const ModeCurrents cur = mode_currents(truth, b);
        const BiasState s = solve_bias(AppliedBias::current_driven(cur.z, cur.c), b);

        // Coarse scan of H - work over one period around the solution.
        const int g = 61;
        const double span_z = 2.0 * M_PI * b.n;
        const double span_c = 8.0 * M_PI * b.n;
        double best = 1e300, bz = 0, bc = 0;
        for (int iz = 0; iz < g; ++iz) {
            for (int ic = 0; ic < g; ++ic) {
                const double z = s.phases.z + span_z * (iz - g / 2) / g;
                const double c = s.phases.c + span_c * (ic - g / 2) / g;
                const double e = hamiltonian(ModePhases{0, 0, z, c}, b) -
                                 kPhi0r * (cur.z * z + cur.c * c);
                if (e < best) {
                    best = e;
                    bz = z;
                    bc = c;
                }
            }
        }
        CHECK(std::abs(bz - s.phases.z) <= span_z / g * 1.0001);
        CHECK(std::abs(bc - s.phases.c) <= span_c / g * 1.0001);
    }
}

TEST_CASE("arm current split pattern") {
    const auto all_c = arm_current_split(0.0, 3.0e-6);
    for (double v : all_c) CHECK(v == doctest::Approx(3.0e-6));

    const auto pure_z = arm_current_split(2.0e-6, 0.0);
    CHECK(pure_z[0] == doctest::Approx(1.0e-6));   // NW
    CHECK(pure_z[1] == doctest::Approx(-1.0e-6));  // SW
    CHECK(pure_z[2] == doctest::Approx(1.0e-6));   // SE
    CHECK(pure_z[3] == doctest::Approx(-1.0e-6));  // NE

    // The Z and C arm patterns are orthogonal.
    double dot = 0.0;
    for (int i = 0; i < 4; ++i) dot += pure_z[i] * all_c[i];
    CHECK(dot == doctest::Approx(0.0));
}
