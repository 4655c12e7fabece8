#include "ptile/template.hpp"

#include <algorithm>

#include "ptile/error.hpp"
#include "ptile/matching.hpp"
#include "ptile/rng.hpp"

namespace ptile {

using nlohmann::json;

std::vector<std::vector<int>> Template::left_adjacency() const
{
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(left_size()));
    for (auto [l, r] : edges)
        adj[static_cast<std::size_t>(l)].push_back(r);
    return adj;
}

namespace {

void check_shape(const Template& t)
{
    if (t.m < 1 || t.beta_m < 0)
        throw Error("malformed template: need m >= 1 and beta_m >= 0");
    for (std::size_t i = 0; i < t.edges.size(); ++i) {
        auto [l, r] = t.edges[i];
        if (l < 0 || l >= t.left_size() || r < 0 || r >= t.right_size())
            throw Error("malformed template: edge out of range");
        if (i > 0 && !(t.edges[i - 1] < t.edges[i]))
            throw Error("malformed template: edges not sorted or repeated");
    }
}

std::vector<std::vector<int>> restricted(const Template& t, const std::vector<std::vector<int>>& adj,
                                         const std::vector<int>& x_subset, std::vector<int>& left_ids)
{
    left_ids = x_subset;
    for (int y = t.x_size(); y < t.left_size(); ++y)
        left_ids.push_back(y);
    std::vector<std::vector<int>> out;
    out.reserve(left_ids.size());
    for (int l : left_ids)
        out.push_back(adj[static_cast<std::size_t>(l)]);
    return out;
}

} // namespace

TemplateCheck verify_template(const Template& t)
{
    check_shape(t);
    if (t.x_size() > kTemplateVerifyCap)
        throw Error("template too large: |X| = " + std::to_string(t.x_size()) + " exceeds " +
                    std::to_string(kTemplateVerifyCap));
    TemplateCheck out;
    std::vector<int> ldeg(static_cast<std::size_t>(t.left_size()), 0), rdeg(static_cast<std::size_t>(t.right_size()), 0);
    for (auto [l, r] : t.edges) {
        ++ldeg[static_cast<std::size_t>(l)];
        ++rdeg[static_cast<std::size_t>(r)];
    }
    int top = std::max(*std::max_element(ldeg.begin(), ldeg.end()), *std::max_element(rdeg.begin(), rdeg.end()));
    if (top > t.max_degree) {
        out.reason = "degree bound exceeded";
        return out;
    }
    const auto adj = t.left_adjacency();
    std::vector<int> idx(static_cast<std::size_t>(t.m));
    for (int i = 0; i < t.m; ++i)
        idx[static_cast<std::size_t>(i)] = i;
    const int nx = t.x_size();
    for (;;) {
        ++out.subsets;
        std::vector<int> ids;
        if (max_matching_size(restricted(t, adj, idx, ids), t.right_size()) != t.right_size()) {
            out.reason = "no perfect matching";
            out.violating = idx;
            return out;
        }
        int i = t.m - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == nx - t.m + i)
            --i;
        if (i < 0)
            break;
        ++idx[static_cast<std::size_t>(i)];
        for (int q = i + 1; q < t.m; ++q)
            idx[static_cast<std::size_t>(q)] = idx[static_cast<std::size_t>(q - 1)] + 1;
    }
    out.ok = true;
    return out;
}

std::optional<std::vector<int>> template_matching(const Template& t, const std::vector<int>& x_subset)
{
    check_shape(t);
    if (static_cast<int>(x_subset.size()) != t.m)
        throw Error("template matching needs exactly m vertices of X");
    const auto adj = t.left_adjacency();
    std::vector<int> ids;
    auto sub = restricted(t, adj, x_subset, ids);
    BipartiteMatcher bm(sub, t.right_size());
    if (bm.run() != t.right_size())
        return std::nullopt;
    std::vector<int> partner(static_cast<std::size_t>(t.left_size()), -1);
    for (std::size_t i = 0; i < ids.size(); ++i)
        partner[static_cast<std::size_t>(ids[i])] = bm.left_partner()[i];
    return partner;
}

TemplateSearch generate_template(int m, int beta_m, int max_tries, std::uint64_t seed, int degree_cap)
{
    if (m < 1 || beta_m < 0)
        throw Error("template needs m >= 1 and beta_m >= 0");
    if (degree_cap < 1)
        throw Error("template degree cap must be positive");
    TemplateSearch out;
    for (int attempt = 1; attempt <= max_tries; ++attempt) {
        out.tries = attempt;
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
        Template t{m, beta_m, degree_cap, {}};
        const int d = std::min({degree_cap, 1 + attempt / 8, t.right_size()});
        std::vector<int> rdeg(static_cast<std::size_t>(t.right_size()), 0);
        for (int l = 0; l < t.left_size(); ++l) {
            std::vector<int> open;
            for (int r = 0; r < t.right_size(); ++r)
                if (rdeg[static_cast<std::size_t>(r)] < degree_cap)
                    open.push_back(r);
            rng.shuffle(open);
            open.resize(std::min<std::size_t>(open.size(), static_cast<std::size_t>(d)));
            for (int r : open) {
                ++rdeg[static_cast<std::size_t>(r)];
                t.edges.emplace_back(l, r);
            }
        }
        std::sort(t.edges.begin(), t.edges.end());
        if (verify_template(t).ok) {
            out.tmpl = std::move(t);
            return out;
        }
    }
    return out;
}

json template_to_json(const Template& t)
{
    json edges = json::array();
    for (auto [l, r] : t.edges)
        edges.push_back({l, r});
    return {{"m", t.m}, {"beta_m", t.beta_m}, {"max_degree", t.max_degree},
            {"left", t.left_size()}, {"right", t.right_size()}, {"edges", edges}};
}

Template template_from_json(const json& doc)
{
    Template t;
    try {
        t.m = doc.at("m").get<int>();
        t.beta_m = doc.at("beta_m").get<int>();
        t.max_degree = doc.value("max_degree", kTemplateDegreeCap);
        for (const auto& e : doc.at("edges"))
            t.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    }
    catch (const json::exception& ex) {
        throw Error(std::string("malformed template: ") + ex.what());
    }
    std::sort(t.edges.begin(), t.edges.end());
    check_shape(t);
    return t;
}

} // namespace ptile
