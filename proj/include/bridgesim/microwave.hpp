#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bridgesim/flux_trap.hpp"

namespace bridgesim {

struct EmptyBand : std::runtime_error {
    EmptyBand() : std::runtime_error("on/off contrast never exceeds threshold") {}
};

struct NoCompressionInRange : std::runtime_error {
    NoCompressionInRange()
        : std::runtime_error("no 1 dB compression inside the drive range") {}
};

struct PortEnvironment {
    double z0 = 50.0;                 // Ohm
    std::vector<double> freq_grid;    // Hz, strictly increasing
    double insertion_loss_db = 6.0;   // frequency-flat offset
};

/// Complex transmission sampled over (i_z, c) where the c axis is either a
/// trap-target current or an external flux. Row-major: row = c index,
/// column = i_z index.
struct TransmissionGrid {
    enum class CAxisKind { TargetCurrent, ExternalFlux };

    std::vector<double> i_z_axis;  // A
    std::vector<double> c_axis;    // A or radians
    CAxisKind c_kind = CAxisKind::TargetCurrent;
    std::string bias_mode;         // "current", "trapped" or "fluxoid"
    double frequency = 0.0;        // Hz
    std::vector<std::complex<double>> tau;
    std::vector<std::uint8_t> flagged;  // 1 = solver failed at that cell
    std::vector<long> true_j;           // ground-truth fluxoid per row (trapped mode)

    std::complex<double>& at(std::size_t row, std::size_t col) {
        return tau[row * i_z_axis.size() + col];
    }
    const std::complex<double>& at(std::size_t row, std::size_t col) const {
        return tau[row * i_z_axis.size() + col];
    }
};

/// Lattice two-port transmission of the biased bridge. Series arms are
/// NW/SE, lattice arms NE/SW; tau vanishes exactly when the bridge is
/// balanced. The insertion-loss offset is applied as a flat scalar.
std::complex<double> s21(const BiasState& bias, double f, const PortEnvironment& env);

// Grid sweeps. Solver failures flag the cell rather than aborting the sweep.
TransmissionGrid sweep_grid_current(const std::vector<double>& i_z_axis,
                                    const std::vector<double>& i_c_axis, double f,
                                    const BridgeParams& b, const PortEnvironment& env);

TransmissionGrid sweep_grid_trapped(const std::vector<double>& i_z_axis,
                                    const std::vector<double>& i_trg_axis, double f,
                                    const BridgeParams& b, const PortEnvironment& env,
                                    const TrapProtocol& protocol, std::mt19937_64& rng);

TransmissionGrid sweep_grid_flux(const std::vector<double>& i_z_axis,
                                 const std::vector<double>& phi_ext_axis, long j,
                                 double f, const BridgeParams& b,
                                 const PortEnvironment& env);

struct ContrastResult {
    std::vector<double> contrast_db;  // per frequency of env.freq_grid
    double bandwidth_hz = 0.0;        // contiguous band above threshold
    double band_lo_hz = 0.0;
    double band_hi_hz = 0.0;
    bool clipped = false;             // some point hit the division floor
};

/// Contrast between the on and off bias points over the frequency grid.
/// threshold_db selects the reported contiguous band; contrast is clipped
/// at floor_db where |tau_off| underflows.
ContrastResult on_off_contrast(const std::vector<std::complex<double>>& tau_on,
                               const std::vector<std::complex<double>>& tau_off,
                               const PortEnvironment& env, double threshold_db = 20.0,
                               double floor_db = 80.0);

struct CompressionResult {
    double p_1db_dbm;          // input power at the 1 dB drop
    double small_signal_mag;   // |tau| in the A -> 0 limit
    std::vector<double> power_dbm;
    std::vector<double> tau_mag;
};

/// Quasi-static large-signal transmission: drive phi_X = A*sin(wt) through
/// the nonlinear arm inductances, take the fundamental of the transmitted
/// quadrature, and bisect for the 1 dB drop. Input power maps to the drive
/// amplitude through P = (A*phi0r*w)^2 / (2*z0). With linear_arms the arm
/// inductances are frozen at their DC values (control case, never
/// compresses).
CompressionResult compression_point(const BiasState& bias, double f,
                                    const PortEnvironment& env, double p_min_dbm,
                                    double p_max_dbm, const BridgeParams& b,
                                    bool linear_arms = false, int samples = 512);

/// |tau| at one drive amplitude (radians of phi_X); exposed for the
/// small-signal cross-check.
double large_signal_tau_mag(const BiasState& bias, double f,
                            const PortEnvironment& env, double amplitude,
                            const BridgeParams& b, bool linear_arms = false,
                            int samples = 512);

}  // namespace bridgesim
