#pragma once

#include <span>
#include <utility>
#include <vector>

namespace ptile {

/// Graph F on the part indices 0..k-1 that a partite graph blows up.
/// Edges are stored normalized (smaller index first), sorted, without duplicates.
class Pattern {
public:
    Pattern(int k, std::vector<std::pair<int, int>> edges);

    static Pattern complete(int k);
    /// C_k in index order 0-1-...-(k-1)-0.
    static Pattern cycle(int k);

    int k() const { return k_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    bool adjacent(int i, int j) const { return adj_[static_cast<std::size_t>(i * k_ + j)]; }
    const std::vector<int>& neighbors(int i) const { return nbrs_[static_cast<std::size_t>(i)]; }

    bool is_complete() const;
    bool is_cycle() const;

    /// True iff the parts are distinct and pairwise adjacent.
    bool is_clique(std::span<const int> parts) const;

    /// Cyclic successor / predecessor (meaningful for cycle patterns).
    int next(int i) const { return (i + 1) % k_; }
    int prev(int i) const { return (i + k_ - 1) % k_; }

    friend bool operator==(const Pattern& a, const Pattern& b) { return a.k_ == b.k_ && a.edges_ == b.edges_; }

private:
    int k_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<bool> adj_;
    std::vector<std::vector<int>> nbrs_;
};

/// All r-subsets of parts that form cliques in the pattern, in lexicographic order.
std::vector<std::vector<int>> clique_part_tuples(const Pattern& pattern, int r);

} // namespace ptile
