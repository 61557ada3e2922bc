#include "coagstat/flux.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coag {

std::vector<double> flux_vector(const ClusterDistribution& state, const TruncatedKernel& kernel,
                                double R) {
    if (!(R >= 1)) throw std::invalid_argument("flux radius must be >= 1");
    const int d = state.dim();
    std::vector<double> A(d, 0.0);
    const auto& entries = state.entries();
    for (const auto& [alpha, na] : entries) {
        double ra = static_cast<double>(alpha.norm());
        if (ra > R) continue;
        double w = 0;  // sum over crossing partners of K(alpha,beta) n_beta
        for (const auto& [beta, nb] : entries) {
            if (ra + static_cast<double>(beta.norm()) <= R) continue;
            w += kernel(alpha, beta) * nb;
        }
        w *= na;
        for (int j = 0; j < d; ++j) A[j] += alpha.parts[j] * w;
    }
    return A;
}

FluxReport flux_identity_check(const ClusterDistribution& state, const TruncatedKernel& kernel,
                               const Source& src, const std::vector<double>& radii) {
    if (state.dim() != src.dim())
        throw std::invalid_argument("state and source dimensions differ");
    if (radii.empty()) throw std::invalid_argument("flux radii must be non-empty");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1]))
            throw std::invalid_argument("flux radii must be strictly increasing");

    const int d = state.dim();
    const double M = kernel.params().M;
    Moments mom = moments(state, src);
    const double floor = std::max(1e-12 * std::max(1.0, mom.injection_total), 1e-300);

    FluxReport rep;
    rep.radii = radii;
    for (double R : radii) {
        std::vector<double> A = flux_vector(state, kernel, R);
        std::vector<double> expected(d, 0.0);
        for (const auto& [alpha, rate] : src.entries())
            if (static_cast<double>(alpha.norm()) <= R)
                for (int j = 0; j < d; ++j) expected[j] += alpha.parts[j] * rate;
        std::vector<double> err(d, 0.0);
        bool beyond = R > M / 2.0;
        for (int j = 0; j < d; ++j) {
            err[j] = std::abs(A[j] - expected[j]) / std::max(expected[j], floor);
            if (!beyond) rep.max_rel_err = std::max(rep.max_rel_err, err[j]);
        }
        rep.A.push_back(std::move(A));
        rep.expected.push_back(std::move(expected));
        rep.rel_err.push_back(std::move(err));
        rep.beyond_cutoff.push_back(beyond);
    }
    return rep;
}

std::vector<double> simplex_direction(const Composition& x) {
    if (!x.valid()) throw std::invalid_argument("composition must have |x| >= 1");
    double r = static_cast<double>(x.norm());
    std::vector<double> theta(x.dim());
    for (int j = 0; j < x.dim(); ++j) theta[j] = x.parts[j] / r;
    return theta;
}

std::vector<double> default_flux_radii(double L, double M) {
    std::vector<double> radii;
    for (double R = std::max(1.0, L); R <= M / 2.0; R *= 2.0) radii.push_back(R);
    if (radii.empty()) radii.push_back(std::max(1.0, L));
    return radii;
}

}  // namespace coag
