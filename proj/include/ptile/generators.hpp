#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ptile/holes.hpp"
#include "ptile/partite_graph.hpp"

namespace ptile {

PartiteGraph complete_blowup(const Pattern& pattern, int n);

/// Keeps each edge of G independently with probability p. Pattern edge e uses RNG
/// stream derive_seed(seed, e), scanning V_i x V_j in index order.
PartiteGraph random_spanning_subgraph(const PartiteGraph& g, double p, std::uint64_t seed);

struct ProcessResult {
    PartiteGraph graph;
    std::size_t edges_added = 0;
    bool certified = false;
    std::string regime; // "exact" or "randomized"
};

struct HoleProcessOptions {
    std::size_t budget = static_cast<std::size_t>(-1); // maximum number of edges added
    int exact_cap = kDefaultHoleCap;
    int trials = 200; // randomized certifier budget when n > exact_cap
};

/// Adds uniformly random absent cross edges to the empty graph until no r-partite hole of
/// size s remains (certified) or the edge budget runs out.
ProcessResult hole_suppressed_process(const Pattern& pattern, int n, int r, int s, std::uint64_t seed,
                                      const HoleProcessOptions& opt = {});

struct SpaceBarrier {
    PartiteGraph graph;
    VertexSetFamily u;
    std::size_t edges_added = 0; // edges placed inside V \ U by the random process
};

/// C_k blow-up in which every transversal cycle meets U, |U_i| = n/k - 1. Inside V \ U
/// random edges are added, in a seeded order, whenever they close no transversal C_k.
SpaceBarrier space_barrier(int k, int n, std::uint64_t seed,
                           std::size_t budget = static_cast<std::size_t>(-1));

struct HostGraph {
    int vertices = 0;
    std::vector<std::pair<int, int>> edges;
};

/// Reads "u v" lines (0-based); blank lines and lines starting with '#' are skipped. The vertex
/// count is `vertices` when positive, otherwise one more than the largest index.
HostGraph read_host_edges(const std::string& path, int vertices = 0);

/// Splits the host's vertices uniformly at random into k parts of size m/k.
PartiteGraph random_k_split(const HostGraph& host, const Pattern& pattern, std::uint64_t seed);

enum class Family { complete, random_subgraph, hole_suppressed, space_barrier, random_split };

struct GenSpec {
    Pattern pattern = Pattern::complete(3);
    int n = 1;
    std::uint64_t seed = 0;
    Family family = Family::complete;
    double p = 1.0;
    int r = 2;
    int target_s = 1;
    std::size_t budget = static_cast<std::size_t>(-1);
    std::string host;
    int host_vertices = 0;
};

struct Generated {
    PartiteGraph graph;
    std::optional<VertexSetFamily> u;
    nlohmann::json report; // generator-specific facts (edges_added, certified, ...)
};

GenSpec gen_spec_from_json(const nlohmann::json& doc);
nlohmann::json gen_spec_to_json(const GenSpec& spec);
Generated generate(const GenSpec& spec);

} // namespace ptile
