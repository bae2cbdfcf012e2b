#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bridgesim/microwave.hpp"

namespace bridgesim {

struct ZeroNormCurve : std::runtime_error {
    ZeroNormCurve() : std::runtime_error("chi: curve has zero norm") {}
};

struct UnimodalHistogram : std::runtime_error {
    UnimodalHistogram()
        : std::runtime_error("chi histogram has no separable peaks; widen the sweep") {}
};

struct FlatGrid : std::runtime_error {
    FlatGrid() : std::runtime_error("grid has zero variance") {}
};

/// Transmission linecuts tau_m(i_z) indexed by the c axis (i_trg index m).
struct LinecutSet {
    std::vector<std::vector<std::complex<double>>> curves;
    std::vector<double> i_z_axis;  // A
    std::vector<double> c_axis;    // A

    static LinecutSet from_grid(const TransmissionGrid& g);
};

/// Normalized complex correlation between two curves:
/// sum tau_m^* tau_n / (|tau_m| |tau_n|). chi_mm = 1 exactly and
/// chi_mn = conj(chi_nm).
std::complex<double> chi(const std::vector<std::complex<double>>& curve_m,
                         const std::vector<std::complex<double>>& curve_n);

/// Real part of chi, the readout the grouping pipeline uses.
double chi_real(const std::vector<std::complex<double>>& curve_m,
                const std::vector<std::complex<double>>& curve_n);

/// Dense matrix of chi_real over all curve pairs.
std::vector<double> chi_matrix(const LinecutSet& cuts);

/// Valley between the two highest-chi histogram peaks of the off-diagonal
/// chi values. bin_width defaults to 1e-4 in chi.
double histogram_threshold(const std::vector<double>& chi_mat, std::size_t n_curves,
                           double bin_width = 1e-4);

struct StepReport {
    std::vector<std::pair<std::size_t, std::size_t>> groups;  // inclusive index ranges
    std::vector<double> step_widths;       // A, one per interior group
    std::vector<double> step_centers;      // A, bias at the middle of each interior group
    double threshold = 0.0;
    std::vector<std::size_t> outlier_indices;
    double failure_rate = 0.0;
};

/// Partition linecuts into trapped-flux groups. Indices with chi < 0.9 to
/// every group are outliers (failed traps); boundaries between adjacent
/// groups minimize the mean-square index distance of misassigned points.
StepReport group_steps(const LinecutSet& cuts, double threshold);

struct ShiftResult {
    double delta_i_z = 0.0;      // A
    double delta_phi_ext = 0.0;  // radians
    double chi_max = 0.0;
};

/// Normalized 2-D cross-correlation between two grids over the same axes,
/// zero-padded in both directions and normalized over the overlap region;
/// shifts are limited to half the grid so the overlap stays meaningful.
/// The argmax is refined by a 3x3 quadratic fit. max_dx further limits the
/// i_z shift search (in samples); -1 leaves only the half-grid limit.
ShiftResult extract_shift_2d(const TransmissionGrid& grid_a,
                             const TransmissionGrid& grid_b, int max_dx = -1);

struct DriftRecord {
    std::vector<double> timestamps;     // hours
    std::vector<double> delta_phi_ext;  // radians, relative to the first grid
    std::vector<double> jump_times;     // hours
    std::vector<int> jump_quanta;       // signed magnitude of each jump
    bool multi_quantum_jump = false;
};

/// Sequential shift extraction of each grid against the first; a jump is a
/// change of more than pi (half a quantum) between consecutive epochs.
DriftRecord monitor(const std::vector<TransmissionGrid>& grids, double cadence_hours,
                    int max_dx = 4);

}  // namespace bridgesim
