#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace coag {

/// Cluster composition: the number of monomers of each of the d species.
/// The origin (all species zero) is not a valid cluster.
struct Composition {
    std::vector<int> parts;

    Composition() = default;
    explicit Composition(std::vector<int> p) : parts(std::move(p)) {}
    Composition(std::initializer_list<int> p) : parts(p) {}

    int dim() const { return static_cast<int>(parts.size()); }

    /// Total monomer count |alpha| (l1 norm).
    long norm() const {
        long n = 0;
        for (int v : parts) n += v;
        return n;
    }

    bool valid() const {
        if (parts.empty()) return false;
        for (int v : parts)
            if (v < 0) return false;
        return norm() >= 1;
    }

    friend bool operator==(const Composition&, const Composition&) = default;
    friend std::strong_ordering operator<=>(const Composition& a, const Composition& b) {
        return a.parts <=> b.parts;  // lexicographic
    }
    friend Composition operator+(const Composition& a, const Composition& b) {
        Composition s = a;
        for (std::size_t j = 0; j < s.parts.size(); ++j) s.parts[j] += b.parts[j];
        return s;
    }
};

/// Bijective lexicographic ranking of the lattice points
/// {x in N_0^d : 1 <= |x| <= cap}.  Index 0 is the lexicographically smallest
/// valid composition (0,...,0,1); the origin is excluded.
///
/// Ranks are computed in O(d) from a precomputed binomial table, which makes
/// the composition of two indexed points cheap to locate inside hot loops.
class CompositionIndexer {
public:
    CompositionIndexer(int dim, int cap);

    int dim() const { return dim_; }
    int cap() const { return cap_; }
    std::size_t size() const { return size_; }

    /// Rank of a composition; the composition must satisfy 1 <= |x| <= cap.
    std::size_t index_of(std::span<const int> parts) const;
    std::size_t index_of(const Composition& c) const { return index_of(c.parts); }

    /// Inverse of index_of.
    Composition composition_of(std::size_t idx) const;

    /// Parts of the idx-th composition, as a view into a precomputed table.
    std::span<const int> parts_of(std::size_t idx) const {
        return {comps_.data() + idx * dim_, static_cast<std::size_t>(dim_)};
    }
    int norm_of(std::size_t idx) const { return norms_[idx]; }

private:
    int dim_;
    int cap_;
    std::size_t size_;
    // choose_[k][s] = number of points of N_0^k with coordinate sum <= s = C(s+k, k)
    std::vector<std::vector<std::uint64_t>> choose_;
    std::vector<int> comps_;   // flat dim_ x size_ table of all compositions
    std::vector<int> norms_;   // per-index l1 norm

    std::uint64_t count_below(int k, int s) const {
        return s < 0 ? 0 : choose_[k][s];
    }
};

}  // namespace coag
