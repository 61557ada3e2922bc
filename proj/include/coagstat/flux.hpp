#pragma once

#include <vector>

#include "coagstat/lattice_state.hpp"
#include "coagstat/truncation.hpp"

namespace coag {

/// Per-species monomer flux across the surface |x| = R:
///   A_j(R) = sum_{|alpha| <= R} sum_{beta : |alpha|+|beta| > R}
///            alpha_j K(alpha,beta) n_alpha n_beta
/// (ordered pairs: both orderings of a pair contribute).
std::vector<double> flux_vector(const ClusterDistribution& state, const TruncatedKernel& kernel,
                                double R);

struct FluxReport {
    std::vector<double> radii;                  // strictly increasing
    std::vector<std::vector<double>> A;         // per radius: d fluxes
    std::vector<std::vector<double>> expected;  // per radius: sum_{|alpha|<=R} alpha_j s_alpha
    std::vector<std::vector<double>> rel_err;   // per radius and species
    std::vector<bool> beyond_cutoff;            // R > M/2: identity degrades, not counted
    double max_rel_err = 0;                     // over radii within cutoff and species
};

/// Check the stationarity flux identity A_j(R) = sum_{|alpha| <= R} alpha_j s_alpha
/// on an (approximately) steady state.  Species with zero injection are
/// compared with an absolute floor instead of a relative one.
FluxReport flux_identity_check(const ClusterDistribution& state, const TruncatedKernel& kernel,
                               const Source& src, const std::vector<double>& radii);

/// Direction theta = x/|x| on the simplex (entries sum to 1).
std::vector<double> simplex_direction(const Composition& x);

/// Default radius grid {L, 2L, 4L, ...} capped at M/2.
std::vector<double> default_flux_radii(double L, double M);

}  // namespace coag
