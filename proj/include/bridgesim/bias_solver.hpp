#pragma once

#include <array>
#include <optional>
#include <stdexcept>

#include "bridgesim/core_model.hpp"

namespace bridgesim {

struct NoConvergence : std::runtime_error {
    double last_residual;
    explicit NoConvergence(double r)
        : std::runtime_error("bias solver failed to converge"), last_residual(r) {}
};

struct BranchAmbiguity : std::runtime_error {
    BranchAmbiguity()
        : std::runtime_error(
              "current-driven solve is branch-ambiguous; use FluxoidConstrained") {}
};

enum class BiasMode { CurrentDriven, FluxoidConstrained };

/// The applied DC controls. CurrentDriven imposes the circulating current
/// directly (PCS open); FluxoidConstrained imposes the fluxoid index j and
/// the external flux phi_ext (PCS closed).
struct AppliedBias {
    BiasMode mode = BiasMode::CurrentDriven;
    double i_z = 0.0;      // A
    double i_c = 0.0;      // A, CurrentDriven only
    long j = 0;            // fluxoid index, FluxoidConstrained only
    double phi_ext = 0.0;  // radians, FluxoidConstrained only

    static AppliedBias current_driven(double i_z, double i_c) {
        return {BiasMode::CurrentDriven, i_z, i_c, 0, 0.0};
    }
    static AppliedBias fluxoid(double i_z, long j, double phi_ext) {
        return {BiasMode::FluxoidConstrained, i_z, 0.0, j, phi_ext};
    }
};

/// A solved DC operating point. Arm order {NW, SW, SE, NE}. Arm inductances
/// include the l_str/4 series contribution.
struct BiasState {
    ModePhases phases;
    ArmPhases arm_phases;
    std::array<double, 4> junction_phase{};  // per-squid phase per arm, rad
    std::array<double, 4> arm_currents{};    // A
    std::array<double, 4> arm_inductances{}; // H
    double residual_norm = 0.0;              // A
};

struct SolverOptions {
    double tol_scale = 1e-12;   // absolute current tolerance = tol_scale * i0
    double loop_tol = 1e-10;    // fluxoid constraint tolerance, rad
    int max_iterations = 200;
    int max_halvings = 60;
    // Optional initial guess (phi_z, phi_c); default is a linearized estimate.
    std::optional<std::array<double, 2>> initial;
};

/// Invert the current-phase relations by damped Newton iteration with
/// phi_X = phi_Y = 0 (ports undriven at DC). For beta < 2 the map is
/// one-to-one within a fluxoid branch, so the solution is independent of
/// the starting point.
BiasState solve_bias(const AppliedBias& applied, const BridgeParams& b,
                     const SolverOptions& opts = {});

/// Loop differential inductance at an operating point: d(loop flux)/d(I_C)
/// at fixed I_Z, including the stray term. One flux quantum steps I_C by
/// 2*pi*phi0r / this value.
double loop_diff_inductance(const BiasState& s, const BridgeParams& b);

/// Nominal arm current pattern for given port currents:
/// I_NW = I_SE = i_c + i_z/2, I_NE = I_SW = i_c - i_z/2.
/// Returned in arm order {NW, SW, SE, NE}.
std::array<double, 4> arm_current_split(double i_z, double i_c);

}  // namespace bridgesim
