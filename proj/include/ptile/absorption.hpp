#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptile/partite_graph.hpp"
#include "ptile/tiling.hpp"

namespace ptile {

/// Pairwise disjoint (k-1)-sets, each completing `at` to a transversal clique.
/// sets[i][j] lists the vertices in increasing part order (part(at) skipped).
struct Fan {
    VertexId at;
    std::vector<std::vector<VertexId>> sets;
    bool exact = false; // true when sets.size() is the maximum possible (before truncation)
};

inline constexpr int kFanExactCap = 8;

/// Fan at v inside `within` (v itself need not be in `within`), truncated to target_size
/// (negative: no limit). k = 3 uses a maximum matching; for k >= 4 an exact packing search
/// runs when n <= kFanExactCap, greedy extraction otherwise.
Fan find_fan(const PartiteGraph& g, VertexId v, int target_size, const VertexSet& within);
Fan find_fan(const PartiteGraph& g, VertexId v, int target_size = -1);

/// Throws unless the fan's sets are disjoint, avoid `at`, and each spans a clique with it.
void validate_fan(const PartiteGraph& g, const Fan& f);

struct Connector {
    VertexId u, v;
    int t = 1;
    std::vector<VertexId> set;
    Tiling witness_u; // factor of {u} ∪ set
    Tiling witness_v; // factor of {v} ∪ set
};

struct ConnectorOptions {
    /// D-set size for t = 2 is min(2 * ceil(alpha * n), available).
    double alpha = 0.1;
    std::uint64_t seed = 0;
};

/// t = 1: transversal K_{k-1} inside the common neighbourhoods of u and v avoiding W.
/// t = 2: shared apex w in part(u) completing cliques into two disjoint neighbourhood samples.
/// u and v are dropped from W. Throws on a non-complete pattern, u == v, or u, v in
/// different parts.
std::optional<Connector> find_connector(const PartiteGraph& g, VertexId u, VertexId v, const VertexSet& w,
                                        int t, const ConnectorOptions& opt = {});

/// Complete search over every S ⊆ V \ (W ∪ {u, v}) with |S| <= k t - 1 (t in {1, 2}).
/// Exponential; intended for small n. An empty result is a proof that none exists.
std::optional<Connector> exhaustive_connector(const PartiteGraph& g, VertexId u, VertexId v, const VertexSet& w,
                                              int t);

/// Re-validates sizes, disjointness and both witnesses, the latter also by re-running the
/// exact factor solver on the induced sets. Throws with the failed condition.
void validate_connector(const PartiteGraph& g, const Connector& c);

struct ReachVerdict {
    bool pass = true;
    std::optional<VertexSet> defeating_w;
    /// True when the failure was confirmed by exhaustive_connector, so it proves non-reachability.
    bool proof = false;
    int tested = 0;
    bool exhaustive = false; // every W of size m was enumerated
};

inline constexpr int kReachExhaustiveCap = 6;

/// Adversarial check of (m, t)-reachability. Tests W = ∅, neighbourhood-based W truncated to m,
/// and `trials` random W of size m; when there are at most `trials` subsets of size m they
/// are all enumerated instead. A failed find_connector is confirmed by exhaustive_connector
/// when n <= kReachExhaustiveCap.
ReachVerdict is_reachable(const PartiteGraph& g, VertexId u, VertexId v, int m, int t, int trials,
                          std::uint64_t seed, const ConnectorOptions& opt = {});

struct Absorber {
    std::vector<VertexId> target; // the transversal k-set S, by part
    int t = 0;                    // size parameter: |set| <= k t
    std::vector<VertexId> set;
    TransversalCopy core;             // the clique T
    std::vector<Connector> connectors; // I_i joins target[i] and core[i]
    Tiling witness_a;  // factor of set
    Tiling witness_as; // factor of set ∪ target
};

struct AbsorberOptions {
    /// Connector type: 1, 2, or 0 to try t = 1 first and fall back to t = 2.
    int connector_t = 0;
    /// Number of candidate cliques T tried before giving up.
    int max_core_tries = 32;
    ConnectorOptions connector;
};

/// (K_k, 2k)-absorber for the transversal k-set `s` avoiding `forbidden` (and s itself).
std::optional<Absorber> find_absorber(const PartiteGraph& g, const std::vector<VertexId>& s,
                                      const VertexSet& forbidden, const AbsorberOptions& opt = {});

/// Greedy maximal family of pairwise disjoint absorbers for s, stopping at count_target
/// (negative: no limit).
std::vector<Absorber> disjoint_absorbers(const PartiteGraph& g, const std::vector<VertexId>& s, int count_target,
                                         const VertexSet& forbidden, const AbsorberOptions& opt = {});
std::vector<Absorber> disjoint_absorbers(const PartiteGraph& g, const std::vector<VertexId>& s, int count_target,
                                         const AbsorberOptions& opt = {});

void validate_absorber(const PartiteGraph& g, const Absorber& a);

nlohmann::json fan_to_json(const Fan& f);
nlohmann::json connector_to_json(const PartiteGraph& g, const Connector& c);
nlohmann::json absorber_to_json(const PartiteGraph& g, const Absorber& a);
nlohmann::json reach_verdict_to_json(const ReachVerdict& r);

} // namespace ptile
