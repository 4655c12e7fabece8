#include "ptile/tiling.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "ptile/error.hpp"

namespace ptile {

using nlohmann::json;

void Tiling::add(const TransversalCopy& c)
{
    for (auto v : c.vertices)
        covered.insert(v);
    copies.push_back(c);
}

void validate_tiling(const PartiteGraph& g, const Tiling& t)
{
    VertexSet seen = VertexSet::empty_of(g);
    for (const auto& c : t.copies) {
        if (!is_transversal_copy(g, c.vertices))
            throw Error("tiling contains an invalid copy");
        for (auto v : c.vertices) {
            if (seen.contains(v))
                throw Error("tiling copies overlap");
            seen.insert(v);
        }
    }
    if (!(seen == t.covered))
        throw Error("tiling cover set does not match its copies");
}

namespace {

// Parts in breadth-first order from part 0, so each part after the first tends to have an
// already-assigned pattern neighbor that restricts its candidates.
std::vector<int> search_order(const Pattern& p)
{
    std::vector<int> order;
    std::vector<bool> seen(static_cast<std::size_t>(p.k()), false);
    for (int root = 0; root < p.k(); ++root) {
        if (seen[static_cast<std::size_t>(root)])
            continue;
        seen[static_cast<std::size_t>(root)] = true;
        std::size_t head = order.size();
        order.push_back(root);
        while (head < order.size()) {
            int x = order[head++];
            for (int y : p.neighbors(x))
                if (!seen[static_cast<std::size_t>(y)]) {
                    seen[static_cast<std::size_t>(y)] = true;
                    order.push_back(y);
                }
        }
    }
    return order;
}

struct CopyEnumerator {
    const PartiteGraph& g;
    const std::function<bool(const TransversalCopy&)>& visit;
    std::vector<int> order;
    TransversalCopy current;
    std::uint64_t nodes = 0;

    // cand[q] holds the live candidates of part q given the vertices assigned so far.
    bool rec(std::size_t depth, const std::vector<Bits>& cand)
    {
        ++nodes;
        if (depth == order.size())
            return visit(current);
        const int p = order[depth];
        const Bits& here = cand[static_cast<std::size_t>(p)];
        for (auto a = here.find_first(); a != Bits::npos; a = here.find_next(a)) {
            VertexId v{p, static_cast<int>(a)};
            current.vertices[static_cast<std::size_t>(p)] = v;
            std::vector<Bits> next = cand;
            bool dead = false;
            for (std::size_t d = depth + 1; d < order.size() && !dead; ++d) {
                int q = order[d];
                if (g.pattern().adjacent(p, q)) {
                    next[static_cast<std::size_t>(q)] &= g.neighbors(v, q);
                    dead = next[static_cast<std::size_t>(q)].none();
                }
            }
            if (!dead && !rec(depth + 1, next))
                return false;
        }
        return true;
    }
};

std::vector<Bits> family_sets(const PartiteGraph& g, const VertexSetFamily& f)
{
    validate_family(g, f);
    std::vector<Bits> sets(static_cast<std::size_t>(g.k()));
    std::vector<bool> have(static_cast<std::size_t>(g.k()), false);
    for (const auto& e : f) {
        sets[static_cast<std::size_t>(e.part)] = e.set;
        have[static_cast<std::size_t>(e.part)] = true;
    }
    for (bool h : have)
        if (!h)
            throw Error("constraint family is missing a part");
    return sets;
}

// Layered sweep along parts[0], parts[1], ...: y[t] holds the vertices of X at parts[t]
// reachable by a path starting in y[0]. Returns false when some layer empties.
bool sweep(const PartiteGraph& g, const std::vector<int>& parts, std::vector<Bits>& y)
{
    for (std::size_t t = 1; t < parts.size(); ++t) {
        Bits reach(static_cast<std::size_t>(g.n()));
        for_each_bit(y[t - 1], [&](int a) { reach |= g.neighbors({parts[t - 1], a}, parts[t]); });
        y[t] &= reach;
        if (y[t].none())
            return false;
    }
    return true;
}

// Walks back from `end` (a member of y.back()) choosing the lowest-index predecessor.
std::vector<VertexId> trace_back(const PartiteGraph& g, const std::vector<int>& parts, const std::vector<Bits>& y,
                                 int end)
{
    std::vector<VertexId> path(parts.size());
    path.back() = {parts.back(), end};
    for (std::size_t t = parts.size() - 1; t > 0; --t) {
        Bits pred = y[t - 1] & g.neighbors(path[t], parts[t - 1]);
        path[t - 1] = {parts[t - 1], static_cast<int>(pred.find_first())};
    }
    return path;
}

} // namespace

std::uint64_t for_each_copy(const PartiteGraph& g, const VertexSet& allowed,
                            const std::function<bool(const TransversalCopy&)>& visit)
{
    CopyEnumerator e{g, visit, search_order(g.pattern()), {}, 0};
    e.current.vertices.resize(static_cast<std::size_t>(g.k()));
    std::vector<Bits> cand;
    for (int i = 0; i < g.k(); ++i) {
        if (allowed.part(i).none())
            return 0;
        cand.push_back(allowed.part(i));
    }
    e.rec(0, cand);
    return e.nodes;
}

std::optional<TransversalCopy> find_transversal_copy(const PartiteGraph& g, const VertexSet& allowed)
{
    std::optional<TransversalCopy> out;
    for_each_copy(g, allowed, [&](const TransversalCopy& c) {
        out = c;
        return false;
    });
    return out;
}

namespace {

bool clique_rec(const PartiteGraph& g, std::vector<Bits>& cand, std::vector<bool>& done, TransversalCopy& cur,
                int remaining)
{
    if (remaining == 0)
        return true;
    // Branch on the smallest live candidate set.
    int pivot = -1;
    for (int q = 0; q < g.k(); ++q)
        if (!done[static_cast<std::size_t>(q)] &&
            (pivot < 0 || cand[static_cast<std::size_t>(q)].count() < cand[static_cast<std::size_t>(pivot)].count()))
            pivot = q;
    const Bits here = cand[static_cast<std::size_t>(pivot)];
    done[static_cast<std::size_t>(pivot)] = true;
    for (auto a = here.find_first(); a != Bits::npos; a = here.find_next(a)) {
        VertexId v{pivot, static_cast<int>(a)};
        auto saved = cand;
        bool dead = false;
        for (int q = 0; q < g.k() && !dead; ++q)
            if (!done[static_cast<std::size_t>(q)]) {
                cand[static_cast<std::size_t>(q)] &= g.neighbors(v, q);
                dead = cand[static_cast<std::size_t>(q)].none();
            }
        cur.vertices[static_cast<std::size_t>(pivot)] = v;
        if (!dead && clique_rec(g, cand, done, cur, remaining - 1))
            return true;
        cand = std::move(saved);
    }
    done[static_cast<std::size_t>(pivot)] = false;
    return false;
}

} // namespace

std::optional<TransversalCopy> find_transversal_clique(const PartiteGraph& g, const VertexSetFamily& constraints)
{
    if (!g.pattern().is_complete())
        throw Error("clique search requires a complete pattern");
    auto cand = family_sets(g, constraints);
    for (const auto& c : cand)
        if (c.none())
            return std::nullopt;
    std::vector<bool> done(static_cast<std::size_t>(g.k()), false);
    TransversalCopy cur;
    cur.vertices.resize(static_cast<std::size_t>(g.k()));
    if (clique_rec(g, cand, done, cur, g.k()))
        return cur;
    return std::nullopt;
}

std::optional<std::vector<VertexId>> find_transversal_path(const PartiteGraph& g, int i, int j,
                                                           const VertexSetFamily& x)
{
    const Pattern& p = g.pattern();
    if (!p.is_cycle())
        throw Error("path search requires a cycle pattern");
    if (i < 0 || i >= g.k() || j < 0 || j >= g.k())
        throw Error("part out of range");
    validate_family(g, x);
    std::vector<int> parts;
    for (int q = i;; q = p.next(q)) {
        parts.push_back(q);
        if (q == j)
            break;
    }
    if (x.size() != parts.size())
        throw Error("non-consecutive parts");
    std::vector<Bits> y(parts.size());
    std::vector<bool> have(parts.size(), false);
    for (const auto& e : x) {
        auto it = std::find(parts.begin(), parts.end(), e.part);
        if (it == parts.end())
            throw Error("non-consecutive parts");
        auto t = static_cast<std::size_t>(it - parts.begin());
        y[t] = e.set;
        have[t] = true;
    }
    if (std::find(have.begin(), have.end(), false) != have.end())
        throw Error("non-consecutive parts");
    if (y[0].none() || !sweep(g, parts, y))
        return std::nullopt;
    return trace_back(g, parts, y, static_cast<int>(y.back().find_first()));
}

std::optional<TransversalCopy> find_transversal_cycle(const PartiteGraph& g, const VertexSetFamily& constraints)
{
    const Pattern& p = g.pattern();
    if (!p.is_cycle())
        throw Error("cycle search requires a cycle pattern");
    auto sets = family_sets(g, constraints);
    std::vector<int> parts(static_cast<std::size_t>(g.k()));
    std::iota(parts.begin(), parts.end(), 0);
    for (auto a = sets[0].find_first(); a != Bits::npos; a = sets[0].find_next(a)) {
        VertexId anchor{0, static_cast<int>(a)};
        std::vector<Bits> y = sets;
        y[0] = make_bits(static_cast<std::size_t>(g.n()), {anchor.idx});
        if (!sweep(g, parts, y))
            continue;
        Bits close = y.back() & g.neighbors(anchor, g.k() - 1);
        if (close.none())
            continue;
        TransversalCopy c;
        c.vertices = trace_back(g, parts, y, static_cast<int>(close.find_first()));
        return c;
    }
    return std::nullopt;
}

namespace {

VertexSetFamily family_of(const VertexSet& s)
{
    VertexSetFamily f;
    for (int i = 0; i < s.k(); ++i)
        f.push_back({i, s.part(i)});
    return f;
}

template <class Find>
Tiling greedy(const PartiteGraph& g, Find find)
{
    Tiling t = Tiling::empty_of(g);
    for (;;) {
        auto c = find(family_of(t.leftover(g)));
        if (!c)
            return t;
        t.add(*c);
    }
}

} // namespace

Tiling greedy_clique_tiling(const PartiteGraph& g)
{
    return greedy(g, [&](const VertexSetFamily& f) { return find_transversal_clique(g, f); });
}

Tiling greedy_cycle_tiling(const PartiteGraph& g)
{
    return greedy(g, [&](const VertexSetFamily& f) { return find_transversal_cycle(g, f); });
}

namespace {

struct KeyHash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (auto w : v)
            h = (h ^ w) * 0x100000001b3ULL;
        return static_cast<std::size_t>(h);
    }
};

class FactorSearch {
public:
    FactorSearch(const PartiteGraph& g, const VertexSet& within) : g_(g)
    {
        // Fail-first: part-0 vertices with the fewest neighbors inside `within` go first.
        order_ = bits_to_vector(within.part(0));
        std::vector<int> deg(static_cast<std::size_t>(g.n()), 0);
        for (int a : order_)
            for (int q : g.pattern().neighbors(0))
                deg[static_cast<std::size_t>(a)] +=
                    static_cast<int>((g.neighbors({0, a}, q) & within.part(q)).count());
        std::stable_sort(order_.begin(), order_.end(),
                         [&](int x, int y) { return deg[static_cast<std::size_t>(x)] < deg[static_cast<std::size_t>(y)]; });
    }

    FactorResult run(const VertexSet& within)
    {
        FactorResult res;
        Tiling t = Tiling::empty_of(g_);
        if (rec(within, t, 0, res))
            res.factor = std::move(t);
        return res;
    }

private:
    bool viable(const VertexSet& r) const
    {
        for (int p = 0; p < g_.k(); ++p) {
            const Bits& here = r.part(p);
            for (auto a = here.find_first(); a != Bits::npos; a = here.find_next(a))
                for (int q : g_.pattern().neighbors(p))
                    if (!g_.neighbors({p, static_cast<int>(a)}, q).intersects(r.part(q)))
                        return false;
        }
        return true;
    }

    bool rec(const VertexSet& r, Tiling& t, int depth, FactorResult& res)
    {
        ++res.nodes;
        res.max_depth = std::max(res.max_depth, depth);
        if (r.empty())
            return true;
        auto key = r.key();
        if (failed_.count(key) || !viable(r)) {
            return false;
        }
        int v = -1;
        for (int a : order_)
            if (r.part(0).test(static_cast<std::size_t>(a))) {
                v = a;
                break;
            }
        VertexSet allowed = r;
        allowed.part(0).reset();
        allowed.part(0).set(static_cast<std::size_t>(v));
        bool found = false;
        res.nodes += for_each_copy(g_, allowed, [&](const TransversalCopy& c) {
            VertexSet rest = r;
            for (auto u : c.vertices)
                rest.erase(u);
            t.add(c);
            if (rec(rest, t, depth + 1, res)) {
                found = true;
                return false;
            }
            t.copies.pop_back();
            for (auto u : c.vertices)
                t.covered.erase(u);
            return true;
        });
        if (!found)
            failed_.insert(std::move(key));
        return found;
    }

    const PartiteGraph& g_;
    std::vector<int> order_;
    std::unordered_set<std::vector<std::uint64_t>, KeyHash> failed_;
};

} // namespace

FactorResult exact_transversal_factor(const PartiteGraph& g, const VertexSet& within, int cap)
{
    if (within.k() != g.k() || within.n() != g.n())
        throw Error("vertex set does not match the graph");
    if (!within.is_balanced())
        throw Error("factor search needs a balanced vertex set");
    if (within.part_size(0) > cap)
        throw Error("exact mode refused: part size " + std::to_string(within.part_size(0)) + " exceeds cap " +
                    std::to_string(cap));
    return FactorSearch(g, within).run(within);
}

FactorResult exact_transversal_factor(const PartiteGraph& g, int cap)
{
    return exact_transversal_factor(g, VertexSet::full_of(g), cap);
}

bool is_factor_of(const PartiteGraph& g, const Tiling& t, const VertexSet& within)
{
    try {
        validate_tiling(g, t);
    }
    catch (const Error&) {
        return false;
    }
    return t.covered == within;
}

json copy_to_json(const TransversalCopy& c)
{
    json out = json::array();
    for (auto v : c.vertices)
        out.push_back(vertex_to_json(v));
    return out;
}

TransversalCopy copy_from_json(const json& doc)
{
    TransversalCopy c;
    for (const auto& v : doc)
        c.vertices.push_back(vertex_from_json(v));
    return c;
}

json tiling_to_json(const PartiteGraph& g, const Tiling& t)
{
    json copies = json::array();
    for (const auto& c : t.copies)
        copies.push_back(copy_to_json(c));
    return {{"copies", copies}, {"leftover_per_part", t.leftover_per_part(g)}};
}

json factor_result_to_json(const PartiteGraph& g, const FactorResult& r)
{
    json out = {{"exists", r.factor.has_value()}, {"nodes", r.nodes}, {"max_depth", r.max_depth}};
    if (r.factor)
        out["factor"] = tiling_to_json(g, *r.factor);
    return out;
}

} // namespace ptile
