#pragma once

#include <string>
#include <vector>

#include "coagstat/lattice_state.hpp"
#include "coagstat/solver.hpp"

namespace coag {

struct ExponentFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
    double z_min = 0, z_max = 0;  // surviving window
    int points = 0;
};

struct EmptyBandError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Least-squares fit of log(dyadic window mass) against log z.  Empty windows
/// are dropped; fewer than 4 surviving points is an error.
ExponentFit fit_tail_exponent(const ClusterDistribution& state, double b,
                              const std::vector<double>& z_grid);

/// Geometric z grid spanning [lo, hi]: ratio sqrt(2), refined as needed to
/// provide at least min_points points.
std::vector<double> geometric_grid(double lo, double hi, int min_points = 6);

/// Default fit grid: boundary layers within a factor 4 of the source reach L
/// and of M/2 are excluded.
std::vector<double> default_fit_grid(double L, double M);

/// Fraction of the band mass {R <= |alpha| <= band*R} lying inside the cone
/// |alpha/|alpha| - theta|_1 < eps_angle.  Throws EmptyBandError when the band
/// carries no mass (distinct from a zero ratio).
double localization_ratio(const ClusterDistribution& state, double R, double band,
                          double eps_angle, const std::vector<double>& theta);

/// Same with theta defaulting to the normalized source mass vector J0/|J0|.
double localization_ratio(const ClusterDistribution& state, const Source& src, double R,
                          double band, double eps_angle);

enum class SweepVerdict { Saturating, Diverging, Inconclusive };
std::string to_string(SweepVerdict v);

struct SweepCell {
    double epsilon = 0;
    double M = 0;
    bool converged = false;
    double total_number = 0;
    double tail_count = 0;  // at the fixed probe radius
    double residual = 0;
    double t_final = 0;
};

struct SweepResult {
    std::vector<SweepCell> cells;
    double tail_radius = 8;
    SweepVerdict verdict = SweepVerdict::Inconclusive;
};

/// Verdict from the refinement sequence, on the two metrics (total number,
/// tail count): `diverging` when every refinement grows both by more than
/// 25%, `saturating` when the last refinement changes both by less than 5%
/// and the one before did not grow beyond 25% (the hysteresis gap keeps
/// verdicts from flipping saturating <-> diverging without passing through
/// inconclusive).  Any non-converged cell forces `inconclusive`.
SweepVerdict sweep_verdict(const std::vector<SweepCell>& cells);

/// Run the truncation refinement sequence obtained by zipping eps_list
/// (decreasing) with M_list (increasing), extending the shorter list with its
/// last entry.  Each cell is a full evolution from the empty state.
SweepResult existence_sweep(const KernelSpec& base, const Source& src,
                            const std::vector<double>& eps_list,
                            const std::vector<double>& M_list, const SolverConfig& cfg,
                            double tail_radius = 8);

}  // namespace coag
