#include "coagstat/composition.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace coag {

CompositionIndexer::CompositionIndexer(int dim, int cap) : dim_(dim), cap_(cap) {
    if (dim < 1) throw std::invalid_argument("composition dimension must be >= 1");
    if (cap < 1) throw std::invalid_argument("composition cap must be >= 1");

    // choose_[k][s] = C(s+k, k), built by the Pascal recurrence with overflow checks.
    choose_.assign(dim_ + 1, std::vector<std::uint64_t>(cap_ + 1, 1));
    for (int k = 1; k <= dim_; ++k) {
        for (int s = 1; s <= cap_; ++s) {
            std::uint64_t a = choose_[k][s - 1], b = choose_[k - 1][s];
            if (a > std::numeric_limits<std::uint64_t>::max() - b)
                throw std::invalid_argument("lattice too large to index");
            choose_[k][s] = a + b;
        }
    }
    std::uint64_t total = choose_[dim_][cap_] - 1;  // excludes the origin
    if (total > (std::uint64_t(1) << 40))
        throw std::invalid_argument("lattice too large to index: " + std::to_string(total) +
                                    " sites");
    size_ = static_cast<std::size_t>(total);

    comps_.resize(size_ * dim_);
    norms_.resize(size_);
    std::vector<int> cur(dim_, 0);
    cur[dim_ - 1] = 1;  // first valid composition in lexicographic order
    for (std::size_t i = 0; i < size_; ++i) {
        for (int j = 0; j < dim_; ++j) comps_[i * dim_ + j] = cur[j];
        int n = 0;
        for (int v : cur) n += v;
        norms_[i] = n;
        // advance lexicographically within |x| <= cap
        if (n < cap_) {
            ++cur[dim_ - 1];
        } else {
            int j = dim_ - 1;
            while (j > 0 && cur[j] == 0) --j;
            if (j == 0 && i + 1 < size_)
                throw std::logic_error("composition enumeration exhausted early");
            if (j > 0) {
                cur[j] = 0;
                ++cur[j - 1];
            }
        }
    }
}

std::size_t CompositionIndexer::index_of(std::span<const int> parts) const {
    if (static_cast<int>(parts.size()) != dim_)
        throw std::invalid_argument("composition dimension mismatch");
    // lexicographic rank among all points with |x| <= cap, origin first
    std::uint64_t rank = 0;
    int rem = cap_;
    for (int j = 0; j < dim_; ++j) {
        int v = parts[j];
        if (v < 0) throw std::invalid_argument("negative composition entry");
        if (v > rem) throw std::out_of_range("composition norm exceeds indexer cap");
        int k = dim_ - 1 - j;
        // sum over values 0..v-1 of C(rem - value + k, k)
        rank += count_below(k + 1, rem) - count_below(k + 1, rem - v);
        rem -= v;
    }
    if (rank == 0) throw std::invalid_argument("the empty composition is not indexable");
    return static_cast<std::size_t>(rank - 1);
}

Composition CompositionIndexer::composition_of(std::size_t idx) const {
    if (idx >= size_) throw std::out_of_range("composition index out of range");
    auto view = parts_of(idx);
    return Composition(std::vector<int>(view.begin(), view.end()));
}

}  // namespace coag
