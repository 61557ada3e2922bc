#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "coagstat/composition.hpp"

namespace coag {

/// Concentrations below this are pruned from sparse supports; far below every
/// tolerance used anywhere in the pipeline.
inline constexpr double kConcentrationFloor = 1e-30;

/// Sparse cluster size distribution: composition -> concentration.
/// Keys satisfy 1 <= |alpha| <= cap; absent keys mean zero; negative
/// concentrations are rejected at every mutation path.
class ClusterDistribution {
public:
    ClusterDistribution() = default;
    ClusterDistribution(int dim, double cap);

    int dim() const { return dim_; }
    double cap() const { return cap_; }

    /// Set a concentration.  Values below the pruning floor erase the entry.
    void set(const Composition& alpha, double value);
    void add(const Composition& alpha, double delta);
    double value(const Composition& alpha) const;

    std::size_t support_size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// Entries in fixed lexicographic key order.
    const std::map<Composition, double>& entries() const { return entries_; }

    double total_number() const;
    double mass(int species) const;
    double norm_weighted_total() const;  // sum |alpha| n_alpha

private:
    int dim_ = 0;
    double cap_ = 0;
    std::map<Composition, double> entries_;

    void check_key(const Composition& alpha) const;
};

/// Finite-support injection rates, composition -> rate.
class Source {
public:
    Source() = default;
    Source(int dim, std::vector<std::pair<Composition, double>> entries);

    int dim() const { return dim_; }
    const std::map<Composition, double>& entries() const { return entries_; }
    /// Reach L = max{|alpha| : s_alpha > 0}; 1 for an empty source.
    double reach() const { return reach_; }
    double total_rate() const;
    double max_rate() const;

private:
    int dim_ = 0;
    double reach_ = 1.0;
    std::map<Composition, double> entries_;
};

struct Moments {
    double total_number = 0;
    std::vector<double> species_mass;     // sum_alpha alpha_j n_alpha
    std::vector<double> injection;        // J0_j = sum_alpha alpha_j s_alpha
    double injection_total = 0;           // |J0| = sum_alpha |alpha| s_alpha
};

Moments moments(const ClusterDistribution& state, const Source& src);

/// (1/z) sum over bz <= |alpha| <= z (both ends closed) of n_alpha.
double dyadic_window_mass(const ClusterDistribution& state, double z, double b);

/// sum over |alpha| >= R of n_alpha.
double tail_count(const ClusterDistribution& state, double R);

/// Snapshot: header `# d=<d> M=<M> t=<time>`, then one `a_1 ... a_d n` record
/// per entry with 17 significant digits (bit-exact round trip).
struct Snapshot {
    ClusterDistribution state;
    double M = 0;
    double t = 0;
};

void save_snapshot(const ClusterDistribution& state, double M, double t, std::ostream& out);
void save_snapshot(const ClusterDistribution& state, double M, double t,
                   const std::string& path);
Snapshot load_snapshot(std::istream& in, const std::string& name = "<stream>");
Snapshot load_snapshot(const std::string& path);

struct SnapshotFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace coag
