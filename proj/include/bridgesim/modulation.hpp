#pragma once

#include <complex>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace bridgesim {

struct PeriodMismatch : std::runtime_error {
    double estimated_period;
    PeriodMismatch(double est)
        : std::runtime_error("declared period disagrees with autocorrelation estimate"),
          estimated_period(est) {}
};

struct AliasedSpectrum : std::runtime_error {
    AliasedSpectrum() : std::runtime_error("requested sideband order exceeds Nyquist") {}
};

struct IllConditioned : std::runtime_error {
    IllConditioned()
        : std::runtime_error("all modulation amplitudes are in the linear regime; "
                             "zeta is unidentifiable") {}
};

/// Cosine series of re(tau) over one i_z period about a symmetric operating
/// point: tau(x) = c0/2 + sum_n c[n-1] * cos(2*pi*n*x/period).
struct CosineSeries {
    double c0 = 0.0;
    std::vector<double> c;
    double period = 0.0;  // A (I~_Z)
};

/// Project uniform samples covering `periods_covered` full periods onto the
/// cosine basis. The declared period is cross-checked against an
/// autocorrelation estimate when the span allows (>= 2 periods); a > 2%
/// deviation raises PeriodMismatch.
CosineSeries cosine_decompose(std::span<const double> samples, double period,
                              int periods_covered = 1, int n_max = 12);

/// RMS error of the truncated reconstruction against the samples.
double reconstruction_rms(const CosineSeries& s, std::span<const double> samples,
                          int periods_covered = 1);

/// Carrier transmission under sinusoidal i_z modulation of amplitude i_z0:
/// c0/2 + sum_n c_n * J0(2*pi*n*zeta*i_z0/period). zeta = 1 is ideal
/// lossless actuation (the 2*pi belongs to the Jacobi-Anger argument and is
/// absorbed here rather than in zeta).
double carrier_response(const CosineSeries& series, double i_z0, double zeta);

struct ModulationSpectrum {
    double f_m = 0.0;        // Hz
    double i_z0 = 0.0;       // A
    std::complex<double> carrier;
    std::map<int, std::complex<double>> sidebands;  // order k -> amplitude
    double mean_square = 0.0;  // time-domain mean |tau(t)|^2
};

/// Time-domain oracle: evaluate tau(i_z0*sin(2*pi*f_m*t)) over exactly one
/// modulation period and DFT into carrier (order 0) and sideband bins up to
/// +-max_order.
ModulationSpectrum sideband_spectrum_timedomain(
    const std::function<std::complex<double>(double)>& static_tau, double i_z0,
    double f_m, double f_carrier, int samples_per_period = 256, int max_order = 8);

struct ZetaFit {
    std::vector<double> f_m_grid;  // Hz
    std::vector<double> zeta;
    std::vector<double> residual;  // RMS per frequency
};

/// Carrier measurements at one modulation frequency: pairs (i_z0, re tau).
struct CarrierCurve {
    double f_m = 0.0;
    std::vector<double> i_z0;
    std::vector<double> carrier;
};

/// Per-frequency 1-D least squares over zeta using carrier_response.
/// Requires at least one amplitude reaching into the J0-curvature regime
/// (Bessel argument >= 0.5 at zeta = 1), else IllConditioned.
ZetaFit fit_zeta(const std::vector<CarrierCurve>& measured, const CosineSeries& series);

}  // namespace bridgesim
