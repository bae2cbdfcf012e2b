#include "bridgesim/modulation.hpp"

#include <cmath>
#include <numeric>

namespace bridgesim {

namespace {

double estimate_period_autocorr(std::span<const double> y, double dx) {
    const std::size_t m = y.size();
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / m;
    std::vector<double> d(m);
    for (std::size_t i = 0; i < m; ++i) d[i] = y[i] - mean;
    double r0 = 0.0;
    for (double v : d) r0 += v * v;
    if (r0 <= 0.0) return 0.0;  // flat signal, nothing to estimate

    double best = -1.0;
    std::size_t best_lag = 0;
    for (std::size_t lag = 2; lag + 2 < m; ++lag) {
        double r = 0.0;
        for (std::size_t i = 0; i < m; ++i) r += d[i] * d[(i + lag) % m];
        if (r > best + 1e-12 * r0) {
            best = r;
            best_lag = lag;
        }
    }
    if (best < 0.5 * r0) return 0.0;  // no convincing repeat
    return best_lag * dx;
}

}  // namespace

CosineSeries cosine_decompose(std::span<const double> samples, double period,
                              int periods_covered, int n_max) {
    const std::size_t m = samples.size();
    if (m < 4 || period <= 0.0 || periods_covered < 1)
        throw std::invalid_argument("cosine_decompose: bad arguments");

    if (periods_covered >= 2) {
        const double dx = periods_covered * period / m;
        const double est = estimate_period_autocorr(samples, dx);
        if (est > 0.0 && std::abs(est - period) / period > 0.02)
            throw PeriodMismatch(est);
    }

    CosineSeries s;
    s.period = period;
    s.c0 = 2.0 * std::accumulate(samples.begin(), samples.end(), 0.0) / m;
    s.c.resize(n_max);
    for (int n = 1; n <= n_max; ++n) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double x = 2.0 * M_PI * n * periods_covered * i / m;
            acc += samples[i] * std::cos(x);
        }
        s.c[n - 1] = 2.0 * acc / m;
    }
    return s;
}

double reconstruction_rms(const CosineSeries& s, std::span<const double> samples,
                          int periods_covered) {
    const std::size_t m = samples.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double v = s.c0 / 2.0;
        for (std::size_t n = 1; n <= s.c.size(); ++n)
            v += s.c[n - 1] * std::cos(2.0 * M_PI * n * periods_covered * i / m);
        const double e = v - samples[i];
        acc += e * e;
    }
    return std::sqrt(acc / m);
}

double carrier_response(const CosineSeries& series, double i_z0, double zeta) {
    if (i_z0 < 0.0) throw std::invalid_argument("carrier_response: i_z0 < 0");
    double v = series.c0 / 2.0;
    for (std::size_t n = 1; n <= series.c.size(); ++n) {
        const double arg = 2.0 * M_PI * n * zeta * i_z0 / series.period;
        v += series.c[n - 1] * std::cyl_bessel_j(0, arg);
    }
    return v;
}

ModulationSpectrum sideband_spectrum_timedomain(
    const std::function<std::complex<double>(double)>& static_tau, double i_z0,
    double f_m, double f_carrier, int samples_per_period, int max_order) {
    (void)f_carrier;
    const int s = samples_per_period;
    if (s < 64) throw std::invalid_argument("sideband_spectrum: need >= 64 samples");
    if (max_order >= s / 2) throw AliasedSpectrum();

    std::vector<std::complex<double>> tau(s);
    ModulationSpectrum out;
    out.f_m = f_m;
    out.i_z0 = i_z0;
    for (int i = 0; i < s; ++i) {
        const double theta = 2.0 * M_PI * i / s;
        tau[i] = static_tau(i_z0 * std::sin(theta));
        out.mean_square += std::norm(tau[i]);
    }
    out.mean_square /= s;

    for (int k = -max_order; k <= max_order; ++k) {
        std::complex<double> bin{};
        for (int i = 0; i < s; ++i) {
            const double ang = -2.0 * M_PI * k * i / s;
            bin += tau[i] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        bin /= static_cast<double>(s);
        if (k == 0)
            out.carrier = bin;
        else
            out.sidebands[k] = bin;
    }
    return out;
}

ZetaFit fit_zeta(const std::vector<CarrierCurve>& measured, const CosineSeries& series) {
    ZetaFit fit;
    for (const auto& curve : measured) {
        if (curve.i_z0.size() < 8 || curve.i_z0.size() != curve.carrier.size())
            throw std::invalid_argument("fit_zeta: need >= 8 (i_z0, carrier) pairs");
        double max_arg = 0.0;
        for (double a : curve.i_z0)
            max_arg = std::max(max_arg, 2.0 * M_PI * a / series.period);
        if (max_arg < 0.5) throw IllConditioned();

        auto sse = [&](double zeta) {
            double acc = 0.0;
            for (std::size_t i = 0; i < curve.i_z0.size(); ++i) {
                const double e =
                    carrier_response(series, curve.i_z0[i], zeta) - curve.carrier[i];
                acc += e * e;
            }
            return acc;
        };

        double best_z = 1.0, best_v = sse(1.0);
        for (int i = 1; i <= 300; ++i) {
            const double z = 0.01 * i;
            const double v = sse(z);
            if (v < best_v) {
                best_v = v;
                best_z = z;
            }
        }
        // Golden-section refinement around the coarse minimum.
        double lo = std::max(1e-4, best_z - 0.02), hi = best_z + 0.02;
        const double gr = 0.6180339887498949;
        double a = hi - gr * (hi - lo), c = lo + gr * (hi - lo);
        double fa = sse(a), fc = sse(c);
        for (int it = 0; it < 80; ++it) {
            if (fa < fc) {
                hi = c;
                c = a;
                fc = fa;
                a = hi - gr * (hi - lo);
                fa = sse(a);
            } else {
                lo = a;
                a = c;
                fa = fc;
                c = lo + gr * (hi - lo);
                fc = sse(c);
            }
        }
        const double z_hat = 0.5 * (lo + hi);
        fit.f_m_grid.push_back(curve.f_m);
        fit.zeta.push_back(z_hat);
        fit.residual.push_back(std::sqrt(sse(z_hat) / curve.i_z0.size()));
    }
    return fit;
}

}  // namespace bridgesim
