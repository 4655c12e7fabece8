#include "ptile/pattern.hpp"

#include <algorithm>

#include "ptile/error.hpp"

namespace ptile {

Pattern::Pattern(int k, std::vector<std::pair<int, int>> edges) : k_(k)
{
    if (k < 2)
        throw Error("pattern needs at least 2 parts");
    for (auto& [a, b] : edges) {
        if (a == b)
            throw Error("pattern self-loop");
        if (a < 0 || b < 0 || a >= k || b >= k)
            throw Error("pattern edge out of range");
        if (a > b)
            std::swap(a, b);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    adj_.assign(static_cast<std::size_t>(k * k), false);
    nbrs_.assign(static_cast<std::size_t>(k), {});
    for (auto [a, b] : edges_) {
        adj_[static_cast<std::size_t>(a * k + b)] = true;
        adj_[static_cast<std::size_t>(b * k + a)] = true;
    }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (adjacent(i, j))
                nbrs_[static_cast<std::size_t>(i)].push_back(j);
}

Pattern Pattern::complete(int k)
{
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            e.emplace_back(i, j);
    return Pattern(k, std::move(e));
}

Pattern Pattern::cycle(int k)
{
    if (k < 3)
        throw Error("cycle pattern needs k >= 3");
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < k; ++i)
        e.emplace_back(i, (i + 1) % k);
    return Pattern(k, std::move(e));
}

bool Pattern::is_complete() const
{
    return edges_.size() == static_cast<std::size_t>(k_ * (k_ - 1) / 2);
}

bool Pattern::is_cycle() const
{
    if (k_ < 3 || edges_.size() != static_cast<std::size_t>(k_))
        return false;
    for (int i = 0; i < k_; ++i)
        if (!adjacent(i, next(i)))
            return false;
    return true;
}

bool Pattern::is_clique(std::span<const int> parts) const
{
    for (std::size_t a = 0; a < parts.size(); ++a) {
        if (parts[a] < 0 || parts[a] >= k_)
            return false;
        for (std::size_t b = a + 1; b < parts.size(); ++b)
            if (parts[a] == parts[b] || !adjacent(parts[a], parts[b]))
                return false;
    }
    return true;
}

namespace {
    void extend_cliques(const Pattern& p, int r, int from, std::vector<int>& cur,
                        std::vector<std::vector<int>>& out)
    {
        if (static_cast<int>(cur.size()) == r) {
            out.push_back(cur);
            return;
        }
        for (int i = from; i < p.k(); ++i) {
            bool ok = std::all_of(cur.begin(), cur.end(), [&](int c) { return p.adjacent(c, i); });
            if (!ok)
                continue;
            cur.push_back(i);
            extend_cliques(p, r, i + 1, cur, out);
            cur.pop_back();
        }
    }
}

std::vector<std::vector<int>> clique_part_tuples(const Pattern& pattern, int r)
{
    std::vector<std::vector<int>> out;
    if (r < 1 || r > pattern.k())
        return out;
    std::vector<int> cur;
    extend_cliques(pattern, r, 0, cur, out);
    return out;
}

} // namespace ptile
