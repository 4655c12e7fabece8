#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace ptile {

/// Bipartite graph between left = X ∪ Y and right = Z. Left vertices 0..|X|-1 form X
/// (|X| = m + beta_m), the next 2m form Y; right vertices are 0..3m-1.
struct Template {
    int m = 1;
    int beta_m = 0;
    int max_degree = 40;
    std::vector<std::pair<int, int>> edges; // (left, right), sorted, no duplicates

    int x_size() const { return m + beta_m; }
    int left_size() const { return 3 * m + beta_m; }
    int right_size() const { return 3 * m; }
    std::vector<std::vector<int>> left_adjacency() const;
    friend bool operator==(const Template&, const Template&) = default;
};

inline constexpr int kTemplateVerifyCap = 20;
inline constexpr int kTemplateDegreeCap = 40;

struct TemplateCheck {
    bool ok = false;
    std::string reason;          // empty when ok
    std::vector<int> violating;  // the X' without a perfect matching, if that was the failure
    std::uint64_t subsets = 0;   // X' subsets examined
};

/// Exhaustive robustness check over every m-subset X' of X, plus the degree bound.
/// Throws "template too large" when |X| > kTemplateVerifyCap, "malformed template" on bad edges.
TemplateCheck verify_template(const Template& t);

/// Right partner of every left vertex in X' ∪ Y under a perfect matching (-1 for X \ X'),
/// or nothing if none exists.
std::optional<std::vector<int>> template_matching(const Template& t, const std::vector<int>& x_subset);

struct TemplateSearch {
    std::optional<Template> tmpl;
    int tries = 0;
};

/// Try t samples each left vertex min(cap, 1 + t / 8) distinct right neighbours among those
/// still below the cap; the first sample passing verify_template is returned.
TemplateSearch generate_template(int m, int beta_m, int max_tries, std::uint64_t seed,
                                 int degree_cap = kTemplateDegreeCap);

nlohmann::json template_to_json(const Template& t);
Template template_from_json(const nlohmann::json& doc);

} // namespace ptile
