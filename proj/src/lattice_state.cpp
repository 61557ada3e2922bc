#include "coagstat/lattice_state.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace coag {

ClusterDistribution::ClusterDistribution(int dim, double cap) : dim_(dim), cap_(cap) {
    if (dim < 1) throw std::invalid_argument("state dimension must be >= 1");
    if (!(cap >= 1)) throw std::invalid_argument("state cap must be >= 1");
}

void ClusterDistribution::check_key(const Composition& alpha) const {
    if (alpha.dim() != dim_) throw std::invalid_argument("composition dimension mismatch");
    if (!alpha.valid()) throw std::invalid_argument("composition must have |alpha| >= 1");
    if (static_cast<double>(alpha.norm()) > cap_)
        throw std::invalid_argument("composition norm exceeds the state cap");
}

void ClusterDistribution::set(const Composition& alpha, double value) {
    check_key(alpha);
    if (!(value >= 0)) throw std::invalid_argument("concentrations must be >= 0");
    if (value < kConcentrationFloor)
        entries_.erase(alpha);
    else
        entries_[alpha] = value;
}

void ClusterDistribution::add(const Composition& alpha, double delta) {
    set(alpha, value(alpha) + delta);
}

double ClusterDistribution::value(const Composition& alpha) const {
    auto it = entries_.find(alpha);
    return it == entries_.end() ? 0.0 : it->second;
}

double ClusterDistribution::total_number() const {
    double s = 0;
    for (const auto& [a, n] : entries_) s += n;
    return s;
}

double ClusterDistribution::mass(int species) const {
    double s = 0;
    for (const auto& [a, n] : entries_) s += a.parts[species] * n;
    return s;
}

double ClusterDistribution::norm_weighted_total() const {
    double s = 0;
    for (const auto& [a, n] : entries_) s += static_cast<double>(a.norm()) * n;
    return s;
}

Source::Source(int dim, std::vector<std::pair<Composition, double>> entries) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("source dimension must be >= 1");
    double reach = 1.0;
    for (auto& [alpha, rate] : entries) {
        if (alpha.dim() != dim_)
            throw std::invalid_argument("source composition dimension mismatch");
        if (!alpha.valid()) throw std::invalid_argument("source composition must be valid");
        if (!(rate >= 0) || !std::isfinite(rate))
            throw std::invalid_argument("source rates must be finite and >= 0");
        if (rate == 0) continue;
        reach = std::max(reach, static_cast<double>(alpha.norm()));
        entries_[alpha] += rate;
    }
    reach_ = reach;
}

double Source::total_rate() const {
    double s = 0;
    for (const auto& [a, r] : entries_) s += r;
    return s;
}

double Source::max_rate() const {
    double s = 0;
    for (const auto& [a, r] : entries_) s = std::max(s, r);
    return s;
}

Moments moments(const ClusterDistribution& state, const Source& src) {
    if (state.dim() != src.dim())
        throw std::invalid_argument("state and source dimensions differ");
    Moments m;
    m.species_mass.assign(state.dim(), 0.0);
    m.injection.assign(state.dim(), 0.0);
    for (const auto& [alpha, n] : state.entries()) {
        m.total_number += n;
        for (int j = 0; j < state.dim(); ++j) m.species_mass[j] += alpha.parts[j] * n;
    }
    for (const auto& [alpha, rate] : src.entries()) {
        for (int j = 0; j < state.dim(); ++j) m.injection[j] += alpha.parts[j] * rate;
        m.injection_total += static_cast<double>(alpha.norm()) * rate;
    }
    return m;
}

double dyadic_window_mass(const ClusterDistribution& state, double z, double b) {
    if (!(z > 0)) throw std::invalid_argument("window scale z must be positive");
    if (!(b > 0) || !(b < 1)) throw std::invalid_argument("window ratio b must be in (0,1)");
    double s = 0;
    for (const auto& [alpha, n] : state.entries()) {
        double r = static_cast<double>(alpha.norm());
        if (r >= b * z && r <= z) s += n;
    }
    return s / z;
}

double tail_count(const ClusterDistribution& state, double R) {
    double s = 0;
    for (const auto& [alpha, n] : state.entries())
        if (static_cast<double>(alpha.norm()) >= R) s += n;
    return s;
}

void save_snapshot(const ClusterDistribution& state, double M, double t, std::ostream& out) {
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "# d=" << state.dim() << " M=" << fmt(M) << " t=" << fmt(t) << "\n";
    for (const auto& [alpha, n] : state.entries()) {
        for (int v : alpha.parts) out << v << ' ';
        out << fmt(n) << "\n";
    }
}

void save_snapshot(const ClusterDistribution& state, double M, double t,
                   const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open snapshot file for writing: " + path);
    save_snapshot(state, M, t, out);
}

Snapshot load_snapshot(std::istream& in, const std::string& name) {
    auto fail = [&](int line, const std::string& what) {
        throw SnapshotFormatError(name + ":" + std::to_string(line) + ": " + what);
    };
    std::string line;
    int lineno = 1;
    if (!std::getline(in, line)) fail(1, "missing snapshot header");
    int d = 0;
    double M = 0, t = 0;
    if (std::sscanf(line.c_str(), "# d=%d M=%lf t=%lf", &d, &M, &t) != 3)
        fail(1, "malformed header, expected `# d=<d> M=<M> t=<time>`");
    if (d < 1 || !(M >= 1)) fail(1, "header has invalid d or M");

    Snapshot snap;
    snap.state = ClusterDistribution(d, 2.0 * M);
    snap.M = M;
    snap.t = t;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        Composition alpha;
        alpha.parts.resize(d);
        for (int j = 0; j < d; ++j)
            if (!(ls >> alpha.parts[j])) fail(lineno, "expected " + std::to_string(d) +
                                                          " composition entries");
        double n;
        if (!(ls >> n)) fail(lineno, "expected a concentration after the composition");
        std::string rest;
        if (ls >> rest) fail(lineno, "trailing characters after the concentration");
        if (!std::isfinite(n) || n < 0) fail(lineno, "concentration must be finite and >= 0");
        try {
            snap.state.set(alpha, n);
        } catch (const std::invalid_argument& e) {
            fail(lineno, e.what());
        }
    }
    return snap;
}

Snapshot load_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open snapshot file: " + path);
    return load_snapshot(in, path);
}

}  // namespace coag
