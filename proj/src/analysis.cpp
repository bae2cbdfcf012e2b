#include "bridgesim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bridgesim {

namespace {
using cplx = std::complex<double>;
}

LinecutSet LinecutSet::from_grid(const TransmissionGrid& g) {
    LinecutSet s;
    s.i_z_axis = g.i_z_axis;
    s.c_axis = g.c_axis;
    const std::size_t nx = g.i_z_axis.size();
    s.curves.resize(g.c_axis.size());
    for (std::size_t r = 0; r < g.c_axis.size(); ++r) {
        s.curves[r].assign(g.tau.begin() + r * nx, g.tau.begin() + (r + 1) * nx);
    }
    return s;
}

cplx chi(const std::vector<cplx>& curve_m, const std::vector<cplx>& curve_n) {
    if (curve_m.size() != curve_n.size())
        throw std::invalid_argument("chi: curve lengths differ");
    double nm = 0.0, nn = 0.0;
    cplx dot{};
    for (std::size_t i = 0; i < curve_m.size(); ++i) {
        dot += std::conj(curve_m[i]) * curve_n[i];
        nm += std::norm(curve_m[i]);
        nn += std::norm(curve_n[i]);
    }
    if (nm <= 0.0 || nn <= 0.0) throw ZeroNormCurve();
    if (&curve_m == &curve_n) return {1.0, 0.0};
    return dot / (std::sqrt(nm) * std::sqrt(nn));
}

double chi_real(const std::vector<cplx>& curve_m, const std::vector<cplx>& curve_n) {
    return chi(curve_m, curve_n).real();
}

std::vector<double> chi_matrix(const LinecutSet& cuts) {
    const std::size_t n = cuts.curves.size();
    // A dead linecut (zero norm everywhere, e.g. a fully balanced row)
    // correlates with nothing; grouping then treats it as an outlier.
    std::vector<bool> dead(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (const auto& v : cuts.curves[i]) acc += std::norm(v);
        dead[i] = acc <= 0.0;
    }
    std::vector<double> m(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = (dead[i] || dead[j])
                                 ? 0.0
                                 : chi_real(cuts.curves[i], cuts.curves[j]);
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    return m;
}

double histogram_threshold(const std::vector<double>& chi_mat, std::size_t n_curves,
                           double bin_width) {
    std::vector<double> vals;
    vals.reserve(n_curves * (n_curves - 1) / 2);
    for (std::size_t i = 0; i < n_curves; ++i)
        for (std::size_t j = i + 1; j < n_curves; ++j)
            vals.push_back(chi_mat[i * n_curves + j]);
    if (vals.size() < 2) throw UnimodalHistogram();

    const double lo = *std::min_element(vals.begin(), vals.end());
    const std::size_t nbins =
        static_cast<std::size_t>(std::ceil((1.0 - lo) / bin_width)) + 2;
    std::vector<std::size_t> hist(nbins, 0);
    auto bin_of = [&](double v) {
        auto b = static_cast<long>((v - lo) / bin_width);
        return static_cast<std::size_t>(std::clamp<long>(b, 0, nbins - 1));
    };
    for (double v : vals) ++hist[bin_of(v)];

    const std::size_t max_count = *std::max_element(hist.begin(), hist.end());
    const std::size_t significant = std::max<std::size_t>(1, max_count / 20);

    // Peaks: runs of significant bins, scanned from chi = 1 downward. Runs
    // separated by fewer than min_gap insignificant bins are one peak (the
    // sparse tail of a cluster must not split it).
    constexpr std::size_t min_gap = 3;
    std::vector<std::size_t> peak_bins;
    bool in_cluster = false;
    std::size_t cluster_best = 0;
    std::size_t gap = min_gap;
    for (std::size_t b = nbins; b-- > 0;) {
        if (hist[b] >= significant) {
            if (!in_cluster && gap < min_gap && !peak_bins.empty()) {
                // Reopen the previous cluster.
                in_cluster = true;
                cluster_best = peak_bins.back();
                peak_bins.pop_back();
                if (hist[b] > hist[cluster_best]) cluster_best = b;
            } else if (!in_cluster) {
                in_cluster = true;
                cluster_best = b;
            } else if (hist[b] > hist[cluster_best]) {
                cluster_best = b;
            }
            gap = 0;
        } else {
            if (in_cluster) peak_bins.push_back(cluster_best);
            in_cluster = false;
            ++gap;
        }
    }
    if (in_cluster) peak_bins.push_back(cluster_best);
    if (peak_bins.size() < 2) throw UnimodalHistogram();

    // Deepest valley between the two highest-chi peaks.
    const std::size_t hi_peak = peak_bins[0];  // nearest chi = 1
    const std::size_t lo_peak = peak_bins[1];
    std::size_t vlo = lo_peak + 1, vhi = hi_peak;  // candidate valley bins
    std::size_t best = vlo;
    for (std::size_t b = vlo; b < vhi; ++b)
        if (hist[b] < hist[best]) best = b;
    // Center of the minimal run.
    std::size_t run_end = best;
    while (run_end + 1 < vhi && hist[run_end + 1] == hist[best]) ++run_end;
    const double mid_bin = 0.5 * (best + run_end);
    return lo + (mid_bin + 0.5) * bin_width;
}

StepReport group_steps(const LinecutSet& cuts, double threshold) {
    const std::size_t n = cuts.curves.size();
    StepReport rep;
    rep.threshold = threshold;
    if (n == 0) return rep;

    const std::vector<double> cm = chi_matrix(cuts);
    auto chi_at = [&](std::size_t i, std::size_t j) { return cm[i * n + j]; };

    // Outliers: below 0.9 to everything else.
    std::vector<bool> outlier(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        double best = -1.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) best = std::max(best, chi_at(i, j));
        if (n > 1 && best < 0.9) {
            outlier[i] = true;
            rep.outlier_indices.push_back(i);
        }
    }
    rep.failure_rate = static_cast<double>(rep.outlier_indices.size()) / n;

    auto medoid = [&](const std::vector<std::size_t>& members) {
        std::size_t best = members.front();
        double best_mean = -2.0;
        for (std::size_t i : members) {
            double acc = 0.0;
            for (std::size_t j : members) acc += chi_at(i, j);
            const double mean = acc / members.size();
            if (mean > best_mean) {
                best_mean = mean;
                best = i;
            }
        }
        return best;
    };

    // Sequential grouping against the running medoid.
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        if (outlier[i]) continue;
        if (!groups.empty() && chi_at(i, medoid(groups.back())) >= threshold) {
            groups.back().push_back(i);
        } else {
            groups.push_back({i});
        }
    }

    // Boundary refinement between adjacent groups: place the cut where the
    // mean-square index distance of misassigned points is minimal.
    for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
        auto& left = groups[g];
        auto& right = groups[g + 1];
        const std::size_t ml = medoid(left);
        const std::size_t mr = medoid(right);
        std::vector<std::size_t> window;
        window.insert(window.end(), left.begin(), left.end());
        window.insert(window.end(), right.begin(), right.end());

        double best_cost = std::numeric_limits<double>::infinity();
        std::size_t best_cut = left.size();  // cut position within window
        for (std::size_t cut = 1; cut < window.size(); ++cut) {
            const double cut_pos = 0.5 * (static_cast<double>(window[cut - 1]) +
                                          static_cast<double>(window[cut]));
            double cost = 0.0;
            for (std::size_t w = 0; w < window.size(); ++w) {
                const std::size_t idx = window[w];
                const bool wants_right = chi_at(idx, mr) > chi_at(idx, ml);
                const bool placed_right = w >= cut;
                if (wants_right != placed_right) {
                    const double d = static_cast<double>(idx) - cut_pos;
                    cost += d * d;
                }
            }
            if (cost < best_cost) {
                best_cost = cost;
                best_cut = cut;
            }
        }
        std::vector<std::size_t> new_left(window.begin(), window.begin() + best_cut);
        std::vector<std::size_t> new_right(window.begin() + best_cut, window.end());
        left = std::move(new_left);
        right = std::move(new_right);
    }

    for (const auto& g : groups)
        rep.groups.emplace_back(g.front(), g.back());

    // Step widths between boundary midpoints; defined for interior groups.
    std::vector<double> boundaries;
    for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
        const double a = cuts.c_axis[groups[g].back()];
        const double b = cuts.c_axis[groups[g + 1].front()];
        boundaries.push_back(0.5 * (a + b));
    }
    for (std::size_t k = 0; k + 1 < boundaries.size(); ++k) {
        rep.step_widths.push_back(boundaries[k + 1] - boundaries[k]);
        rep.step_centers.push_back(0.5 * (boundaries[k] + boundaries[k + 1]));
    }
    return rep;
}

ShiftResult extract_shift_2d(const TransmissionGrid& grid_a,
                             const TransmissionGrid& grid_b, int max_dx) {
    if (grid_a.i_z_axis.size() != grid_b.i_z_axis.size() ||
        grid_a.c_axis.size() != grid_b.c_axis.size())
        throw std::invalid_argument("extract_shift_2d: grid axes differ");
    const long nx = static_cast<long>(grid_a.i_z_axis.size());
    const long ny = static_cast<long>(grid_a.c_axis.size());

    double var_a = 0.0, var_b = 0.0;
    for (const auto& v : grid_a.tau) var_a += std::norm(v);
    for (const auto& v : grid_b.tau) var_b += std::norm(v);
    if (var_a <= 0.0 || var_b <= 0.0) throw FlatGrid();

    // Shifts are capped at half the grid so the overlap always covers at
    // least half of each axis; tiny overlaps of structured patterns can
    // correlate perfectly by accident.
    const long wx_half = nx / 2;
    const long wx = (max_dx < 0) ? wx_half : std::min<long>(max_dx, wx_half);
    const long wy = ny / 2;

    // chi(dx, dy): zero-padded in both axes, normalized over the overlap
    // region so partial coverage does not dilute a genuine match.
    auto chi_shift = [&](long dx, long dy) {
        cplx dot{};
        double na = 0.0, nb = 0.0;
        const long c_lo = std::max<long>(0, -dx);
        const long c_hi = std::min<long>(nx, nx - dx);
        const long r_lo = std::max<long>(0, -dy);
        const long r_hi = std::min<long>(ny, ny - dy);
        for (long r = r_lo; r < r_hi; ++r) {
            for (long c = c_lo; c < c_hi; ++c) {
                const cplx va = grid_a.at(r, c);
                const cplx vb = grid_b.at(r + dy, c + dx);
                dot += std::conj(va) * vb;
                na += std::norm(va);
                nb += std::norm(vb);
            }
        }
        if (na <= 0.0 || nb <= 0.0) return -2.0;
        return (dot / std::sqrt(na * nb)).real();
    };

    long best_dx = 0, best_dy = 0;
    double best = -2.0;
    std::vector<double> cache((2 * wx + 1) * (2 * wy + 1));
    for (long dx = -wx; dx <= wx; ++dx) {
        for (long dy = -wy; dy <= wy; ++dy) {
            const double v = chi_shift(dx, dy);
            cache[(dx + wx) * (2 * wy + 1) + (dy + wy)] = v;
            if (v > best) {
                best = v;
                best_dx = dx;
                best_dy = dy;
            }
        }
    }

    // 3x3 quadratic refinement about the argmax.
    auto value = [&](long dx, long dy) {
        if (dx < -wx || dx > wx || dy < -wy || dy > wy) return chi_shift(dx, dy);
        return cache[(dx + wx) * (2 * wy + 1) + (dy + wy)];
    };
    // Per-axis 3-point parabola through the argmax. A joint paraboloid over
    // the 3x3 patch lets a sharp peak along one axis be biased by the tilt
    // of the much flatter off-axis rows.
    auto parabola = [](double fm, double f0, double fp) {
        const double curv = fm - 2.0 * f0 + fp;
        if (curv >= 0.0) return 0.0;  // not a local max along this axis
        return std::clamp(0.5 * (fm - fp) / curv, -1.0, 1.0);
    };
    const double f00 = value(best_dx, best_dy);
    const double sub_dx =
        parabola(value(best_dx - 1, best_dy), f00, value(best_dx + 1, best_dy));
    const double sub_dy =
        parabola(value(best_dx, best_dy - 1), f00, value(best_dx, best_dy + 1));

    ShiftResult out;
    const double dx_step =
        (nx > 1) ? grid_a.i_z_axis[1] - grid_a.i_z_axis[0] : 0.0;
    const double dy_step = (ny > 1) ? grid_a.c_axis[1] - grid_a.c_axis[0] : 0.0;
    out.delta_i_z = (static_cast<double>(best_dx) + sub_dx) * dx_step;
    out.delta_phi_ext = (static_cast<double>(best_dy) + sub_dy) * dy_step;
    out.chi_max = best;
    return out;
}

DriftRecord monitor(const std::vector<TransmissionGrid>& grids, double cadence_hours,
                    int max_dx) {
    if (grids.size() < 2)
        throw std::invalid_argument("monitor: need at least 2 grids");
    DriftRecord rec;
    double prev = 0.0;
    for (std::size_t i = 0; i < grids.size(); ++i) {
        const double t = cadence_hours * static_cast<double>(i);
        const double shift =
            (i == 0) ? 0.0
                     : extract_shift_2d(grids[0], grids[i], max_dx).delta_phi_ext;
        rec.timestamps.push_back(t);
        rec.delta_phi_ext.push_back(shift);
        if (i > 0 && std::abs(shift - prev) > M_PI) {
            rec.jump_times.push_back(t);
            const int quanta =
                static_cast<int>(std::lround((shift - prev) / (2.0 * M_PI)));
            rec.jump_quanta.push_back(quanta);
            if (std::abs(quanta) >= 2) rec.multi_quantum_jump = true;
        }
        prev = shift;
    }
    return rec;
}

}  // namespace bridgesim
