#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptile/partite_graph.hpp"

namespace ptile {

/// r equal-size subsets U_1..U_r of the parts `parts` (a clique of the pattern).
struct HoleCertificate {
    int r = 0;
    std::vector<int> parts;
    std::vector<Bits> sets;
    int s = 0;
    bool verified = false;
};

struct HoleReport {
    int r = 0;
    int alpha = 0;
    HoleCertificate witness;
    std::string method; // "exact" or "randomized-lower-bound"
    std::uint64_t explored = 0;
};

inline constexpr int kDefaultHoleCap = 10;

/// True iff no r-tuple with one vertex in each U_i spans a K_r.
/// Throws "invalid hole arena" unless `parts` are distinct and pairwise pattern-adjacent.
bool verify_hole(const PartiteGraph& g, const HoleCertificate& cand);

/// Searches for a hole of size s on the given part tuple. `explored` is incremented per node.
std::optional<HoleCertificate> find_hole_exact(const PartiteGraph& g, const std::vector<int>& parts, int s,
                                               std::uint64_t* explored = nullptr);

/// Exact alpha*_r over all pattern-clique r-tuples of parts. Throws "exact mode refused"
/// when n exceeds `cap`.
HoleReport alpha_star_exact(const PartiteGraph& g, int r, int cap = kDefaultHoleCap);

/// Upper bound on alpha*_2: a hole (A, B) with |A| = |B| = s leaves every a in A with at least
/// s non-neighbours in the part of B, so s never exceeds the largest such non-degree.
int alpha2_degree_bound(const PartiteGraph& g);

/// Randomized grow-and-swap search for a verified hole of size s. An empty result is
/// not a proof that none exists.
std::optional<HoleCertificate> alpha_star_lower_bound(const PartiteGraph& g, int r, int s, int trials,
                                                      std::uint64_t seed);

struct RegularityResult {
    bool regular = false;
    Rational density;
    /// On failure: the offending pair (X, Y themselves when the density is below d).
    std::optional<std::pair<VertexSet, VertexSet>> witness;
};

inline constexpr int kRegularityCap = 12;

/// Exhaustive (eps, d)-regularity test of the pair (X, Y); |X|, |Y| <= 12.
RegularityResult eps_regular_check(const PartiteGraph& g, const VertexSet& x, const VertexSet& y,
                                   const Rational& eps, const Rational& d);

nlohmann::json hole_certificate_to_json(const HoleCertificate& c);
nlohmann::json hole_report_to_json(const HoleReport& r);

} // namespace ptile
