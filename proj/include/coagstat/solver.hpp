#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "coagstat/lattice_state.hpp"
#include "coagstat/truncation.hpp"

namespace coag {

struct SolverConfig {
    double dt_init = 1e-3;
    double dt_max = 10.0;
    double safety = 0.85;        // step controller safety factor, in (0, 1]
    double steady_tol = 1e-8;    // relative residual threshold for stationarity
    double max_time = 1e6;
    long long max_steps = 5'000'000;
    double err_rel = 1e-4;       // local error control, relative to the total number
    double err_abs = 1e-18;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TimeSeries {
    struct Row {
        double t = 0;
        double total = 0;
        double residual = 0;
        double dt = 0;
        std::vector<double> mass;  // one entry per species
    };
    std::vector<Row> rows;
};

struct SteadyResult {
    ClusterDistribution state;
    double residual = 0;
    double t_final = 0;
    bool converged = false;
    long long steps = 0;
    long long rhs_evaluations = 0;
    double max_total_number = 0;   // max over accepted steps of sum_alpha n_alpha
    double mass_beyond_cutoff = 0; // final sum of n_alpha with |alpha| > M (soft check)
    TimeSeries series;
};

/// Full right-hand side of the truncated evolution at one state: for every
/// composition in the union of the state, gain and source supports,
///   zeta_M(alpha) * (pair gain)/2  -  n_alpha * (loss rate)  +  s_alpha.
std::map<Composition, double> rhs_map(const ClusterDistribution& state,
                                      const TruncatedKernel& kernel, const Source& src);

/// One accepted adaptive step; returns the new state and the dt actually used.
std::pair<ClusterDistribution, double> step(const ClusterDistribution& state,
                                            const SolverConfig& cfg,
                                            const TruncatedKernel& kernel, const Source& src);

using SnapshotCallback = std::function<void(double t, const ClusterDistribution&)>;

/// Integrate from `initial` until the relative residual
/// max_alpha |rhs_alpha| / max(|J0|, max_alpha s_alpha) drops below
/// cfg.steady_tol, or a budget is exhausted (flagged non-converged).
SteadyResult evolve_to_steady(const ClusterDistribution& initial, const SolverConfig& cfg,
                              const TruncatedKernel& kernel, const Source& src,
                              double snapshot_interval = 0,
                              const SnapshotCallback& on_snapshot = nullptr);

}  // namespace coag
