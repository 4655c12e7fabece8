#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptile/absorption.hpp"
#include "ptile/partite_graph.hpp"
#include "ptile/template.hpp"
#include "ptile/tiling.hpp"

namespace ptile {

struct AbsorbingParams {
    /// X_i has exactly m + beta_m vertices; floor(q n) must be at least that.
    double q = 1.0 / 6.0;
    /// Every vertex needs a fan of size max(1, ceil(tau n)) in G.
    double tau = 0.0;
    /// Every vertex needs a fan of size max(1, ceil(k beta_prime n)) inside X.
    double beta_prime = 0.0;
    int m = 2;
    int beta_m = 2;
    /// |R| <= gamma n; negative disables the check.
    double gamma = -1.0;
    std::uint64_t seed = 0;
    int sample_tries = 50;
    int template_tries = 1000;
    int degree_cap = kTemplateDegreeCap;
    AbsorberOptions absorber;
};

struct EdgeAbsorber {
    int part = 0;  // template T_part
    int left = 0;  // left vertex of the template (X_part then Y_part)
    int right = 0; // right vertex, i.e. index into zsets[part]
    Absorber absorber;
};

struct AbsorbingSet {
    VertexSet r;
    double xi = 0.0;
    int capacity = 0; // largest |U ∩ V_i| the construction absorbs
    int m = 0, beta_m = 0;
    // Construction trace.
    std::vector<std::vector<int>> x, y;            // x[i], y[i]: indices in V_i
    std::vector<std::vector<std::vector<int>>> z;  // z[i][j] = Z_{i,j} (empty for j == i)
    std::vector<std::vector<std::vector<VertexId>>> zsets; // zsets[j][l]: l-th transversal (k-1)-set for part j
    std::vector<Template> templates;               // one per part
    std::vector<EdgeAbsorber> absorbers;           // one per template edge
    int sample_attempts = 0;
    int fan_threshold = 0;

    VertexId left_vertex(int part, int left) const;
};

/// Runs the construction: fan pre-check, X sampling with fan re-check, Y/Z reservation,
/// (k-1)-set partition, one template per part, one disjoint absorber per template edge.
/// Throws an error naming the failing stage and its deficit.
AbsorbingSet build_absorbing_set(const PartiteGraph& g, const AbsorbingParams& params);

struct AbsorbCheck {
    bool ok = false;
    std::string method; // "constructive" or "exact"
    std::optional<Tiling> factor;
};

/// Factor of G[R ∪ U] for a balanced U disjoint from R: first by the greedy cover of U inside
/// X followed by the template matching, then by the exact solver when R ∪ U is small enough.
AbsorbCheck absorb(const PartiteGraph& g, const AbsorbingSet& as, const VertexSet& u);

struct AbsorbVerdict {
    bool pass = true;
    std::optional<VertexSet> failing_u;
    bool proof = false; // failure confirmed by the exact solver
    int random_trials = 0;
    int exhaustive_trials = 0;
    int constructive = 0, exact = 0;
};

struct AbsorbVerifyOptions {
    /// Enumerate every U with this many vertices per part when there are at most
    /// `exhaustive_limit` of them (0 disables).
    int exhaustive_per_part = 1;
    long long exhaustive_limit = 20000;
};

/// Random balanced U ⊆ V \ R with |U| <= xi n, plus the exhaustive family; every factor found
/// is re-validated against R ∪ U. Throws unless xi n >= k.
AbsorbVerdict verify_absorbing_property(const PartiteGraph& g, const AbsorbingSet& as, double xi, int trials,
                                        std::uint64_t seed, const AbsorbVerifyOptions& opt = {});

nlohmann::json absorbing_set_to_json(const PartiteGraph& g, const AbsorbingSet& as);
nlohmann::json absorb_verdict_to_json(const AbsorbVerdict& v);

} // namespace ptile
