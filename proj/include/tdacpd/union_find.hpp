#pragma once

#include <concepts>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

namespace tdacpd {

/// Disjoint-set forest with union by size and path halving.
template <std::unsigned_integral Index = std::size_t>
class UnionFind {
public:
    explicit UnionFind(Index n) : parent_(n), size_(n, 1), components_(n) {
        std::iota(parent_.begin(), parent_.end(), Index{0});
    }

    Index find(Index x) noexcept {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Returns true when a and b were in different sets.
    bool unite(Index a, Index b) noexcept {
        a = find(a);
        b = find(b);
        if (a == b) {
            return false;
        }
        if (size_[a] < size_[b]) {
            std::swap(a, b);
        }
        parent_[b] = a;
        size_[a] += size_[b];
        --components_;
        return true;
    }

    Index components() const noexcept { return components_; }
    Index set_size(Index x) noexcept { return size_[find(x)]; }

private:
    std::vector<Index> parent_;
    std::vector<Index> size_;
    Index components_;
};

} // namespace tdacpd
