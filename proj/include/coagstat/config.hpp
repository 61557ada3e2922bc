#pragma once

#include <string>
#include <utility>
#include <vector>

#include "coagstat/kernels.hpp"
#include "coagstat/lattice_state.hpp"
#include "coagstat/solver.hpp"
#include "coagstat/truncation.hpp"

namespace coag {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputConfig {
    std::string directory = "out";
    double snapshot_interval = 0;  // simulation-time interval; 0 = final snapshot only
};

struct DiagnosticsConfig {
    double window_b = 0.5;   // dyadic window ratio
    double band = 2.0;       // localization band ratio
    double eps_angle = 0.1;  // localization cone width
    double tail_radius = 8;  // sweep / tail probe radius
    std::vector<double> radii;             // flux radii; empty = geometric default
    std::vector<double> z_grid;            // exponent fit grid; empty = default
    std::vector<double> localization_radii;  // empty = {M/8, 3M/8}
};

struct SweepConfig {
    bool present = false;
    std::vector<double> eps_list;
    std::vector<double> M_list;
};

struct RunConfig {
    int dimension = 1;
    KernelSpec kernel;
    std::vector<std::pair<Composition, double>> source_entries;
    TruncationParams truncation;
    SolverConfig solver;
    OutputConfig output;
    DiagnosticsConfig diagnostics;
    SweepConfig sweep;
    unsigned seed = 0;

    Source source() const { return Source(dimension, source_entries); }
    std::vector<std::string> kernel_warnings() const { return kernel.warnings(); }
};

/// Parse and validate a JSON run configuration.  Every violated invariant is
/// reported, naming the constraint (e.g. a cutoff scale with M <= 2L is
/// rejected citing the M > 2L requirement).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical JSON form; parse(print(parse(text))) == parse(text).
std::string print_config(const RunConfig& cfg);

}  // namespace coag
