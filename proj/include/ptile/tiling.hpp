#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "ptile/partite_graph.hpp"

namespace ptile {

/// One vertex per part; vertices[i].part == i.
struct TransversalCopy {
    std::vector<VertexId> vertices;
    friend bool operator==(const TransversalCopy&, const TransversalCopy&) = default;
};

struct Tiling {
    std::vector<TransversalCopy> copies;
    VertexSet covered;

    static Tiling empty_of(const PartiteGraph& g) { return {{}, VertexSet::empty_of(g)}; }
    void add(const TransversalCopy& c);
    /// Vertices of G not covered by any copy.
    VertexSet leftover(const PartiteGraph& g) const { return VertexSet::full_of(g) - covered; }
    int leftover_per_part(const PartiteGraph& g) const { return g.n() - covered.part_size(0); }
};

/// Throws unless the copies are valid, pairwise disjoint and `covered` is their union.
void validate_tiling(const PartiteGraph& g, const Tiling& t);

/// Calls `visit` on every transversal copy with vertex i in allowed.part(i), in lexicographic
/// order of (vertex in part 0, part 1, ...) restricted to the chosen search order. Stops when
/// `visit` returns false. Returns the number of search nodes.
std::uint64_t for_each_copy(const PartiteGraph& g, const VertexSet& allowed,
                            const std::function<bool(const TransversalCopy&)>& visit);

/// First transversal copy of the pattern inside `allowed`.
std::optional<TransversalCopy> find_transversal_copy(const PartiteGraph& g, const VertexSet& allowed);

/// K_k copy with its i-th vertex in the set given for part i. The family must name every part.
std::optional<TransversalCopy> find_transversal_clique(const PartiteGraph& g, const VertexSetFamily& constraints);

/// Path x_i x_{i+1} ... x_j along consecutive cycle parts (indices mod k) with x_l in X_l.
/// The family must list exactly the parts of that arc.
std::optional<std::vector<VertexId>> find_transversal_path(const PartiteGraph& g, int i, int j,
                                                           const VertexSetFamily& x);

/// Transversal C_k with its i-th vertex in the set for part i. The anchored sweep tries every
/// anchor in part 0, so a negative answer is a proof of absence.
std::optional<TransversalCopy> find_transversal_cycle(const PartiteGraph& g, const VertexSetFamily& constraints);

Tiling greedy_clique_tiling(const PartiteGraph& g);
Tiling greedy_cycle_tiling(const PartiteGraph& g);

inline constexpr int kDefaultFactorCap = 12;

struct FactorResult {
    std::optional<Tiling> factor;
    std::uint64_t nodes = 0;
    int max_depth = 0;
};

/// Complete backtracking decision procedure for a transversal factor. Throws
/// "exact mode refused" when n exceeds `cap`.
FactorResult exact_transversal_factor(const PartiteGraph& g, int cap = kDefaultFactorCap);

/// Same, restricted to the subgraph induced by the balanced set `within`; the cap applies
/// to the part size of `within`.
FactorResult exact_transversal_factor(const PartiteGraph& g, const VertexSet& within, int cap = kDefaultFactorCap);

/// True iff `t` is a transversal factor of G[within].
bool is_factor_of(const PartiteGraph& g, const Tiling& t, const VertexSet& within);

nlohmann::json copy_to_json(const TransversalCopy& c);
TransversalCopy copy_from_json(const nlohmann::json& doc);
nlohmann::json tiling_to_json(const PartiteGraph& g, const Tiling& t);
nlohmann::json factor_result_to_json(const PartiteGraph& g, const FactorResult& r);

} // namespace ptile
