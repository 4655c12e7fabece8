#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ptile/bits.hpp"
#include "ptile/pattern.hpp"
#include "ptile/rational.hpp"

namespace ptile {

struct VertexId {
    int part = 0;
    int idx = 0;
    auto operator<=>(const VertexId&) const = default;
};

/// Spanning subgraph of the n-blow-up of a pattern. Adjacency is kept as one
/// n-bit row per (vertex, pattern-adjacent part); rows towards non-adjacent
/// parts are all-zero. Immutable once built; see PartiteGraphBuilder.
class PartiteGraph {
public:
    PartiteGraph(Pattern pattern, int n);

    const Pattern& pattern() const { return pattern_; }
    int k() const { return pattern_.k(); }
    int n() const { return n_; }

    const Bits& neighbors(VertexId v, int part) const { return adj_[row(v, part)]; }
    bool has_edge(VertexId a, VertexId b) const;
    int degree(VertexId v, int part) const { return static_cast<int>(neighbors(v, part).count()); }
    int degree(VertexId v) const;

    std::size_t edge_count() const;
    /// Each unordered edge once, ordered by (flat(a), flat(b)) with flat(a) < flat(b).
    std::vector<std::pair<VertexId, VertexId>> edges() const;

    int flat(VertexId v) const { return v.part * n_ + v.idx; }
    VertexId unflat(int f) const { return {f / n_, f % n_}; }
    bool contains(VertexId v) const { return v.part >= 0 && v.part < k() && v.idx >= 0 && v.idx < n_; }

    friend bool operator==(const PartiteGraph& a, const PartiteGraph& b)
    {
        return a.pattern_ == b.pattern_ && a.n_ == b.n_ && a.adj_ == b.adj_;
    }

private:
    friend class PartiteGraphBuilder;
    std::size_t row(VertexId v, int part) const
    {
        return static_cast<std::size_t>((v.part * n_ + v.idx) * k() + part);
    }

    Pattern pattern_;
    int n_;
    std::vector<Bits> adj_;
};

/// Mutable staging area for a PartiteGraph. Rejects edges inside a part or
/// across non-adjacent parts.
class PartiteGraphBuilder {
public:
    PartiteGraphBuilder(Pattern pattern, int n) : graph_(std::move(pattern), n) {}
    explicit PartiteGraphBuilder(PartiteGraph graph) : graph_(std::move(graph)) {}

    void add_edge(VertexId a, VertexId b);
    void remove_edge(VertexId a, VertexId b);
    bool has_edge(VertexId a, VertexId b) const { return graph_.has_edge(a, b); }

    /// Read access to the current state (for processes that test as they build).
    const PartiteGraph& view() const { return graph_; }
    PartiteGraph build() && { return std::move(graph_); }
    PartiteGraph build() const& { return graph_; }

private:
    void check_pair(VertexId a, VertexId b) const;
    PartiteGraph graph_;
};

/// Vertex subset stored as one n-bit set per part.
class VertexSet {
public:
    VertexSet() = default;
    VertexSet(int k, int n) : parts_(static_cast<std::size_t>(k), Bits(static_cast<std::size_t>(n))) {}
    static VertexSet empty_of(const PartiteGraph& g) { return {g.k(), g.n()}; }
    static VertexSet full_of(const PartiteGraph& g);
    static VertexSet of(const PartiteGraph& g, std::span<const VertexId> vs);

    int k() const { return static_cast<int>(parts_.size()); }
    int n() const { return parts_.empty() ? 0 : static_cast<int>(parts_.front().size()); }

    Bits& part(int i) { return parts_[static_cast<std::size_t>(i)]; }
    const Bits& part(int i) const { return parts_[static_cast<std::size_t>(i)]; }

    void insert(VertexId v) { part(v.part).set(static_cast<std::size_t>(v.idx)); }
    void erase(VertexId v) { part(v.part).reset(static_cast<std::size_t>(v.idx)); }
    bool contains(VertexId v) const { return part(v.part).test(static_cast<std::size_t>(v.idx)); }

    std::size_t size() const;
    int part_size(int i) const { return static_cast<int>(part(i).count()); }
    bool empty() const { return size() == 0; }
    bool is_balanced() const;
    std::vector<VertexId> vertices() const;

    VertexSet& operator|=(const VertexSet& o);
    VertexSet& operator&=(const VertexSet& o);
    VertexSet& operator-=(const VertexSet& o);
    friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
    friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
    friend VertexSet operator-(VertexSet a, const VertexSet& b) { return a -= b; }
    bool intersects(const VertexSet& o) const;
    friend bool operator==(const VertexSet& a, const VertexSet& b) { return a.parts_ == b.parts_; }

    /// Raw words of all parts concatenated; used as a hash key by searches.
    std::vector<std::uint64_t> key() const;

private:
    std::vector<Bits> parts_;
};

/// Ordered list of (part, subset of that part); parts distinct.
struct PartSubset {
    int part = 0;
    Bits set;
};
using VertexSetFamily = std::vector<PartSubset>;

/// Throws unless every entry names a valid part with an n-bit subset and parts are distinct.
void validate_family(const PartiteGraph& g, const VertexSetFamily& family);

/// Minimum over pattern edges {i,j} and vertices of V_i ∪ V_j of the degree
/// into the opposite part. Throws "empty pattern" when the pattern has no edges.
int delta_star(const PartiteGraph& g);

/// True iff `tuple` has one vertex in each part and realizes every pattern edge.
bool is_transversal_copy(const PartiteGraph& g, std::span<const VertexId> tuple);

/// e(X,Y) / (|X||Y|) for disjoint non-empty X, Y.
Rational density(const PartiteGraph& g, const VertexSet& x, const VertexSet& y);

/// Vertices of `target` adjacent to every vertex of `s` (the whole part when s is empty).
/// Throws "non-adjacent part" if some vertex of s lives in a part not adjacent to target.
Bits common_neighborhood(const PartiteGraph& g, std::span<const VertexId> s, int target);

/// ptg-v1 graph documents. Part indices are 1-based in the file, vertex offsets 0-based.
nlohmann::json graph_to_json(const PartiteGraph& g);
PartiteGraph graph_from_json(const nlohmann::json& doc);
void save_graph(const PartiteGraph& g, const std::string& path);
PartiteGraph load_graph(const std::string& path);

nlohmann::json pattern_to_json(const Pattern& p);
Pattern pattern_from_json(const nlohmann::json& doc);

nlohmann::json vertex_to_json(VertexId v);
VertexId vertex_from_json(const nlohmann::json& doc);
nlohmann::json vertex_set_to_json(const VertexSet& s);

} // namespace ptile
