#include "coagstat/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coag {

ExponentFit fit_tail_exponent(const ClusterDistribution& state, double b,
                              const std::vector<double>& z_grid) {
    std::vector<double> lx, ly, zs;
    for (double z : z_grid) {
        double w = dyadic_window_mass(state, z, b);
        if (w <= 0) continue;  // empty window: point dropped
        lx.push_back(std::log(z));
        ly.push_back(std::log(w));
        zs.push_back(z);
    }
    if (lx.size() < 4)
        throw std::invalid_argument("tail exponent fit needs at least 4 non-empty windows, got " +
                                    std::to_string(lx.size()));
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
        syy += ly[i] * ly[i];
    }
    ExponentFit fit;
    double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_tot = syy - sy * sy / n;
    double ss_res = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ss_res += r * r;
    }
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.z_min = *std::min_element(zs.begin(), zs.end());
    fit.z_max = *std::max_element(zs.begin(), zs.end());
    fit.points = static_cast<int>(lx.size());
    return fit;
}

std::vector<double> geometric_grid(double lo, double hi, int min_points) {
    if (!(hi > lo) || !(lo > 0)) throw std::invalid_argument("bad geometric grid range");
    double ratio = std::min(std::sqrt(2.0), std::pow(hi / lo, 1.0 / (min_points - 1)));
    std::vector<double> g;
    for (double z = lo; z <= hi * (1 + 1e-12); z *= ratio) g.push_back(std::min(z, hi));
    if (g.size() >= 2 && g[g.size() - 1] == g[g.size() - 2]) g.pop_back();
    return g;
}

std::vector<double> default_fit_grid(double L, double M) {
    double lo = std::max(4.0 * L, 8.0);
    double hi = M / 8.0;
    if (!(hi > lo)) hi = M / 2.0;  // narrow lattice: keep at least the hard range
    return geometric_grid(lo, hi);
}

double localization_ratio(const ClusterDistribution& state, double R, double band,
                          double eps_angle, const std::vector<double>& theta) {
    if (!(band > 1)) throw std::invalid_argument("band ratio must exceed 1");
    if (!(eps_angle > 0)) throw std::invalid_argument("cone width must be positive");
    if (static_cast<int>(theta.size()) != state.dim())
        throw std::invalid_argument("direction dimension mismatch");
    double in_band = 0, in_cone = 0;
    for (const auto& [alpha, n] : state.entries()) {
        double r = static_cast<double>(alpha.norm());
        if (r < R || r > band * R) continue;
        in_band += n;
        double dist = 0;
        for (int j = 0; j < state.dim(); ++j)
            dist += std::abs(alpha.parts[j] / r - theta[j]);
        if (dist < eps_angle) in_cone += n;
    }
    if (in_band <= 0)
        throw EmptyBandError("no mass in the band [" + std::to_string(R) + ", " +
                             std::to_string(band * R) + "]");
    return in_cone / in_band;
}

double localization_ratio(const ClusterDistribution& state, const Source& src, double R,
                          double band, double eps_angle) {
    Moments m = moments(state, src);
    if (!(m.injection_total > 0))
        throw std::invalid_argument("source direction undefined for a zero source");
    std::vector<double> theta(m.injection);
    for (double& v : theta) v /= m.injection_total;
    return localization_ratio(state, R, band, eps_angle, theta);
}

std::string to_string(SweepVerdict v) {
    switch (v) {
        case SweepVerdict::Saturating: return "saturating";
        case SweepVerdict::Diverging: return "diverging";
        default: return "inconclusive";
    }
}

SweepVerdict sweep_verdict(const std::vector<SweepCell>& cells) {
    for (const auto& c : cells)
        if (!c.converged) return SweepVerdict::Inconclusive;
    const std::size_t n = cells.size();
    if (n < 2) return SweepVerdict::Inconclusive;  // no refinement evidence

    auto growth = [&](std::size_t k, double SweepCell::*metric) {
        double prev = cells[k - 1].*metric, cur = cells[k].*metric;
        return (cur - prev) / std::max(std::abs(prev), 1e-300);
    };
    auto both = [&](std::size_t k, auto pred) {
        return pred(growth(k, &SweepCell::total_number)) &&
               pred(growth(k, &SweepCell::tail_count));
    };

    bool all_diverge = true;
    for (std::size_t k = 1; k < n; ++k)
        all_diverge = all_diverge && both(k, [](double g) { return g > 0.25; });
    if (all_diverge) return SweepVerdict::Diverging;

    bool last_flat = both(n - 1, [](double g) { return std::abs(g) < 0.05; });
    bool prev_tame = n == 2 || both(n - 2, [](double g) { return g <= 0.25; });
    if (last_flat && prev_tame) return SweepVerdict::Saturating;
    return SweepVerdict::Inconclusive;
}

SweepResult existence_sweep(const KernelSpec& base, const Source& src,
                            const std::vector<double>& eps_list,
                            const std::vector<double>& M_list, const SolverConfig& cfg,
                            double tail_radius) {
    if (eps_list.empty() || M_list.empty())
        throw std::invalid_argument("sweep lists must be non-empty");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (eps_list[i] > eps_list[i - 1])
            throw std::invalid_argument("sweep epsilon list must be decreasing");
    for (std::size_t i = 1; i < M_list.size(); ++i)
        if (M_list[i] < M_list[i - 1])
            throw std::invalid_argument("sweep M list must be increasing");

    SweepResult res;
    res.tail_radius = tail_radius;
    const std::size_t n = std::max(eps_list.size(), M_list.size());
    for (std::size_t k = 0; k < n; ++k) {
        double eps = eps_list[std::min(k, eps_list.size() - 1)];
        double M = M_list[std::min(k, M_list.size() - 1)];
        if (!(M > 2.0 * src.reach()))
            throw std::invalid_argument("sweep cell violates M > 2L");
        TruncatedKernel kernel(base, {eps, M, src.reach()});
        ClusterDistribution zero(src.dim(), 2.0 * M);
        SteadyResult run = evolve_to_steady(zero, cfg, kernel, src);
        SweepCell cell;
        cell.epsilon = eps;
        cell.M = M;
        cell.converged = run.converged;
        cell.total_number = run.state.total_number();
        cell.tail_count = tail_count(run.state, tail_radius);
        cell.residual = run.residual;
        cell.t_final = run.t_final;
        res.cells.push_back(cell);
    }
    res.verdict = sweep_verdict(res.cells);
    return res;
}

}  // namespace coag
