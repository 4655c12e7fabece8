#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptile/partite_graph.hpp"

namespace ptile {

/// Placement of a k-vertex configuration inside the C_k blow-up. P3 at `a` is the path over
/// parts a, a+1, a+2; M2 at (a, b) is the two edges over {a, a+1} and {b, b+1}. All other
/// parts hold isolated vertices. Part indices are taken mod k.
struct Shape {
    enum Kind { p3, m2 } kind = p3;
    int a = 0;
    int b = 0;
    friend bool operator==(const Shape&, const Shape&) = default;
};

/// Every P3 placement, then every M2 placement with a < b and disjoint pairs.
std::vector<Shape> all_shapes(int k);
/// Parts carrying an edge of the shape.
std::vector<int> shape_parts(const Shape& s, int k);
bool is_isolated_part(const Shape& s, int k, int part);

struct MixedCopy {
    Shape shape;
    std::vector<VertexId> vertices; // vertices[i].part == i
};

struct MixedTiling {
    std::vector<MixedCopy> copies;
    VertexSet covered;
    VertexSet leftover(const PartiteGraph& g) const { return VertexSet::full_of(g) - covered; }
};

/// True iff the copy has one vertex per part and realizes the edges of its shape.
bool is_mixed_copy(const PartiteGraph& g, const MixedCopy& c);
void validate_mixed_tiling(const PartiteGraph& g, const MixedTiling& t);

/// Randomized greedy tiling. Copies are added inside the leftover while possible; then any copy
/// that can be re-split, together with one leftover vertex per part, into two copies is
/// replaced, and the process repeats. The result admits neither move.
MixedTiling maximal_mixed_tiling(const PartiteGraph& g, std::uint64_t seed);

/// Greedy phase only: stops as soon as no copy fits inside the leftover.
MixedTiling greedy_mixed_tiling(const PartiteGraph& g, std::uint64_t seed);

struct MaximalityResult {
    bool maximal = true;
    /// -1 when a copy fits inside the leftover; otherwise the index of a copy that can be split.
    int copy = -1;
    std::optional<std::pair<MixedCopy, MixedCopy>> improvement;
};

/// Exhaustive check of both moves used by maximal_mixed_tiling.
MaximalityResult check_maximality(const PartiteGraph& g, const MixedTiling& t);

struct InvariantViolation {
    int copy = 0;
    std::string invariant;
    std::int64_t value = 0;
    std::int64_t bound = 0;
};

struct AppendixReport {
    std::string status; // "pass", "violation" or "not_maximal"
    int leftover_per_part = 0;
    std::size_t copies_checked = 0;
    std::vector<InvariantViolation> violations;
    MaximalityResult maximality;
};

/// Edge-count invariants of a maximal tiling against its leftover L (l = |L_i|):
///   edge_bound        e(V(N), L) <= 4l for every copy N
///   isolated_one_side an isolated vertex has leftover neighbours on at most one side
///   isolated_spread   two isolated vertices adjacent to L are at cyclic distance <= 2, and at
///                     distance 1 when their edge counts into L sum to more than l
///   isolated_count    at most two isolated vertices of N are adjacent to L
///   isolated_edges    e(J_N, L) <= 2l for the isolated vertices J_N of N
/// Maximality is re-checked first; a non-maximal tiling yields "not_maximal".
AppendixReport check_appendix_invariants(const PartiteGraph& g, const MixedTiling& t);

nlohmann::json mixed_tiling_to_json(const MixedTiling& t);
nlohmann::json appendix_report_to_json(const AppendixReport& r);

} // namespace ptile
