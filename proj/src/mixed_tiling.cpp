#include "ptile/mixed_tiling.hpp"

#include <algorithm>
#include <numeric>

#include "ptile/error.hpp"
#include "ptile/rng.hpp"

namespace ptile {

using nlohmann::json;

namespace {

int mod(int x, int k) { return ((x % k) + k) % k; }

int cyclic_distance(int p, int q, int k)
{
    int d = mod(p - q, k);
    return std::min(d, k - d);
}

int pick(const Bits& b, Rng* rng)
{
    if (!rng)
        return static_cast<int>(b.find_first());
    return static_cast<int>(nth_bit(b, static_cast<std::size_t>(rng->below(static_cast<int>(b.count())))));
}

Bits reach(const PartiteGraph& g, const Bits& from, int from_part, int to_part)
{
    Bits out(static_cast<std::size_t>(g.n()));
    for_each_bit(from, [&](int x) { out |= g.neighbors({from_part, x}, to_part); });
    return out;
}

// An edge between cand[p] and cand[q]; false when none exists.
bool realize_edge(const PartiteGraph& g, const std::vector<Bits>& cand, int p, int q, Rng* rng,
                  std::vector<VertexId>& out)
{
    Bits ends = cand[static_cast<std::size_t>(p)] & reach(g, cand[static_cast<std::size_t>(q)], q, p);
    if (ends.none())
        return false;
    int x = pick(ends, rng);
    int y = pick(cand[static_cast<std::size_t>(q)] & g.neighbors({p, x}, q), rng);
    out[static_cast<std::size_t>(p)] = {p, x};
    out[static_cast<std::size_t>(q)] = {q, y};
    return true;
}

// Vertices realizing `s` with vertex i drawn from cand[i].
std::optional<std::vector<VertexId>> realize(const PartiteGraph& g, const Shape& s, const std::vector<Bits>& cand,
                                             Rng* rng)
{
    const int k = g.k();
    for (const auto& c : cand)
        if (c.none())
            return std::nullopt;
    std::vector<VertexId> out(static_cast<std::size_t>(k));
    if (s.kind == Shape::p3) {
        int p0 = s.a, p1 = mod(s.a + 1, k), p2 = mod(s.a + 2, k);
        Bits y1 = cand[static_cast<std::size_t>(p1)] & reach(g, cand[static_cast<std::size_t>(p0)], p0, p1);
        Bits y2 = cand[static_cast<std::size_t>(p2)] & reach(g, y1, p1, p2);
        if (y2.none())
            return std::nullopt;
        int x2 = pick(y2, rng);
        int x1 = pick(y1 & g.neighbors({p2, x2}, p1), rng);
        int x0 = pick(cand[static_cast<std::size_t>(p0)] & g.neighbors({p1, x1}, p0), rng);
        out[static_cast<std::size_t>(p0)] = {p0, x0};
        out[static_cast<std::size_t>(p1)] = {p1, x1};
        out[static_cast<std::size_t>(p2)] = {p2, x2};
    }
    else {
        if (!realize_edge(g, cand, s.a, mod(s.a + 1, k), rng, out) ||
            !realize_edge(g, cand, s.b, mod(s.b + 1, k), rng, out))
            return std::nullopt;
    }
    for (int p = 0; p < k; ++p)
        if (is_isolated_part(s, k, p))
            out[static_cast<std::size_t>(p)] = {p, pick(cand[static_cast<std::size_t>(p)], rng)};
    return out;
}

std::optional<MixedCopy> find_in(const PartiteGraph& g, const std::vector<Shape>& shapes, const std::vector<Bits>& cand,
                                 Rng* rng)
{
    for (const auto& s : shapes)
        if (auto vs = realize(g, s, cand, rng))
            return MixedCopy{s, std::move(*vs)};
    return std::nullopt;
}

std::vector<Bits> parts_of(const VertexSet& s)
{
    std::vector<Bits> out;
    for (int i = 0; i < s.k(); ++i)
        out.push_back(s.part(i));
    return out;
}

// Splits copy c plus one leftover vertex per part into two copies; masks with bit 0 clear
// suffice because swapping the roles of the two halves gives the complementary mask.
std::optional<std::pair<MixedCopy, MixedCopy>> split(const PartiteGraph& g, const MixedCopy& c, const VertexSet& left,
                                                     const std::vector<Shape>& shapes,
                                                     const std::vector<unsigned>& masks, Rng* rng)
{
    const int k = g.k();
    const auto n = static_cast<std::size_t>(g.n());
    for (unsigned m : masks) {
        std::vector<Bits> ca(static_cast<std::size_t>(k)), cb(static_cast<std::size_t>(k));
        for (int p = 0; p < k; ++p) {
            Bits own = make_bits(n, {c.vertices[static_cast<std::size_t>(p)].idx});
            bool to_a = m >> p & 1u;
            ca[static_cast<std::size_t>(p)] = to_a ? left.part(p) : own;
            cb[static_cast<std::size_t>(p)] = to_a ? own : left.part(p);
        }
        auto a = find_in(g, shapes, ca, rng);
        if (!a)
            continue;
        auto b = find_in(g, shapes, cb, rng);
        if (b)
            return std::pair(std::move(*a), std::move(*b));
    }
    return std::nullopt;
}

std::vector<unsigned> split_masks(int k)
{
    std::vector<unsigned> m;
    for (unsigned x = 2; x < (1u << k); x += 2)
        m.push_back(x);
    return m;
}

void require_cycle(const PartiteGraph& g)
{
    if (!g.pattern().is_cycle() || g.k() < 4)
        throw Error("mixed tilings need a cycle pattern with k >= 4");
}

void add_copy(MixedTiling& t, MixedCopy c)
{
    for (auto v : c.vertices)
        t.covered.insert(v);
    t.copies.push_back(std::move(c));
}

MixedTiling run(const PartiteGraph& g, std::uint64_t seed, bool with_splits)
{
    require_cycle(g);
    Rng rng(derive_seed(seed, 0));
    MixedTiling t{{}, VertexSet::empty_of(g)};
    auto shapes = all_shapes(g.k());
    auto masks = split_masks(g.k());
    for (;;) {
        VertexSet left = t.leftover(g);
        if (left.empty())
            return t;
        rng.shuffle(shapes);
        if (auto c = find_in(g, shapes, parts_of(left), &rng)) {
            add_copy(t, std::move(*c));
            continue;
        }
        if (!with_splits)
            return t;
        std::vector<std::size_t> order(t.copies.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(order);
        rng.shuffle(masks);
        bool improved = false;
        for (auto i : order) {
            auto sp = split(g, t.copies[i], left, shapes, masks, &rng);
            if (!sp)
                continue;
            for (auto v : t.copies[i].vertices)
                t.covered.erase(v);
            t.copies.erase(t.copies.begin() + static_cast<std::ptrdiff_t>(i));
            add_copy(t, std::move(sp->first));
            add_copy(t, std::move(sp->second));
            improved = true;
            break;
        }
        if (!improved)
            return t;
    }
}

} // namespace

std::vector<Shape> all_shapes(int k)
{
    std::vector<Shape> out;
    for (int a = 0; a < k; ++a)
        out.push_back({Shape::p3, a, 0});
    for (int a = 0; a < k; ++a)
        for (int b = a + 2; b < k; ++b)
            if (mod(b + 1, k) != a)
                out.push_back({Shape::m2, a, b});
    return out;
}

std::vector<int> shape_parts(const Shape& s, int k)
{
    if (s.kind == Shape::p3)
        return {s.a, mod(s.a + 1, k), mod(s.a + 2, k)};
    return {s.a, mod(s.a + 1, k), s.b, mod(s.b + 1, k)};
}

bool is_isolated_part(const Shape& s, int k, int part)
{
    auto ps = shape_parts(s, k);
    return std::find(ps.begin(), ps.end(), part) == ps.end();
}

bool is_mixed_copy(const PartiteGraph& g, const MixedCopy& c)
{
    const int k = g.k();
    if (static_cast<int>(c.vertices.size()) != k)
        return false;
    for (int p = 0; p < k; ++p)
        if (c.vertices[static_cast<std::size_t>(p)].part != p || !g.contains(c.vertices[static_cast<std::size_t>(p)]))
            return false;
    auto edge = [&](int p) {
        return g.has_edge(c.vertices[static_cast<std::size_t>(p)], c.vertices[static_cast<std::size_t>(mod(p + 1, k))]);
    };
    const Shape& s = c.shape;
    if (s.a < 0 || s.a >= k)
        return false;
    if (s.kind == Shape::p3)
        return edge(s.a) && edge(mod(s.a + 1, k));
    if (s.b < 0 || s.b >= k || cyclic_distance(s.a, s.b, k) < 2)
        return false;
    return edge(s.a) && edge(s.b);
}

void validate_mixed_tiling(const PartiteGraph& g, const MixedTiling& t)
{
    VertexSet seen = VertexSet::empty_of(g);
    for (const auto& c : t.copies) {
        if (!is_mixed_copy(g, c))
            throw Error("mixed tiling contains an invalid copy");
        for (auto v : c.vertices) {
            if (seen.contains(v))
                throw Error("mixed tiling copies overlap");
            seen.insert(v);
        }
    }
    if (!(seen == t.covered))
        throw Error("mixed tiling cover set does not match its copies");
}

MixedTiling maximal_mixed_tiling(const PartiteGraph& g, std::uint64_t seed) { return run(g, seed, true); }

MixedTiling greedy_mixed_tiling(const PartiteGraph& g, std::uint64_t seed) { return run(g, seed, false); }

MaximalityResult check_maximality(const PartiteGraph& g, const MixedTiling& t)
{
    require_cycle(g);
    validate_mixed_tiling(g, t);
    MaximalityResult res;
    VertexSet left = t.leftover(g);
    if (left.empty())
        return res;
    auto shapes = all_shapes(g.k());
    if (auto c = find_in(g, shapes, parts_of(left), nullptr)) {
        res.maximal = false;
        res.copy = -1;
        res.improvement = std::pair(*c, *c);
        return res;
    }
    auto masks = split_masks(g.k());
    for (std::size_t i = 0; i < t.copies.size(); ++i)
        if (auto sp = split(g, t.copies[i], left, shapes, masks, nullptr)) {
            res.maximal = false;
            res.copy = static_cast<int>(i);
            res.improvement = std::move(sp);
            return res;
        }
    return res;
}

AppendixReport check_appendix_invariants(const PartiteGraph& g, const MixedTiling& t)
{
    require_cycle(g);
    validate_mixed_tiling(g, t);
    const int k = g.k();
    VertexSet left = t.leftover(g);
    if (!left.is_balanced())
        throw Error("leftover parts are unbalanced");
    AppendixReport rep;
    rep.leftover_per_part = left.part_size(0);
    rep.maximality = check_maximality(g, t);
    if (!rep.maximality.maximal) {
        rep.status = "not_maximal";
        return rep;
    }
    const std::int64_t l = rep.leftover_per_part;
    if (l == 0) {
        rep.status = "pass";
        return rep;
    }
    for (std::size_t ci = 0; ci < t.copies.size(); ++ci) {
        const auto& c = t.copies[ci];
        ++rep.copies_checked;
        auto violate = [&](const char* name, std::int64_t value, std::int64_t bound) {
            rep.violations.push_back({static_cast<int>(ci), name, value, bound});
        };
        std::vector<std::int64_t> fwd(static_cast<std::size_t>(k)), bwd(static_cast<std::size_t>(k));
        std::int64_t total = 0;
        for (int p = 0; p < k; ++p) {
            auto u = c.vertices[static_cast<std::size_t>(p)];
            int nx = mod(p + 1, k), pv = mod(p - 1, k);
            fwd[static_cast<std::size_t>(p)] = static_cast<std::int64_t>((g.neighbors(u, nx) & left.part(nx)).count());
            bwd[static_cast<std::size_t>(p)] = static_cast<std::int64_t>((g.neighbors(u, pv) & left.part(pv)).count());
            total += fwd[static_cast<std::size_t>(p)] + bwd[static_cast<std::size_t>(p)];
        }
        if (total > 4 * l)
            violate("edge_bound", total, 4 * l);
        std::vector<int> touching;
        std::int64_t iso_edges = 0;
        for (int p = 0; p < k; ++p) {
            if (!is_isolated_part(c.shape, k, p))
                continue;
            auto f = fwd[static_cast<std::size_t>(p)], b = bwd[static_cast<std::size_t>(p)];
            if (f > 0 && b > 0)
                violate("isolated_one_side", 2, 1);
            if (f + b > 0)
                touching.push_back(p);
            iso_edges += f + b;
        }
        if (touching.size() > 2)
            violate("isolated_count", static_cast<std::int64_t>(touching.size()), 2);
        for (std::size_t x = 0; x < touching.size(); ++x)
            for (std::size_t y = x + 1; y < touching.size(); ++y) {
                int p = touching[x], q = touching[y];
                int d = cyclic_distance(p, q, k);
                auto ep = fwd[static_cast<std::size_t>(p)] + bwd[static_cast<std::size_t>(p)];
                auto eq = fwd[static_cast<std::size_t>(q)] + bwd[static_cast<std::size_t>(q)];
                if (d > 2)
                    violate("isolated_spread", d, 2);
                else if (ep + eq > l && d != 1)
                    violate("isolated_spread", d, 1);
            }
        if (iso_edges > 2 * l)
            violate("isolated_edges", iso_edges, 2 * l);
    }
    rep.status = rep.violations.empty() ? "pass" : "violation";
    return rep;
}

json mixed_tiling_to_json(const MixedTiling& t)
{
    json copies = json::array();
    for (const auto& c : t.copies) {
        json vs = json::array();
        for (auto v : c.vertices)
            vs.push_back(vertex_to_json(v));
        json shape = c.shape.kind == Shape::p3 ? json{{"kind", "P3"}, {"at", c.shape.a + 1}}
                                               : json{{"kind", "M2"}, {"at", {c.shape.a + 1, c.shape.b + 1}}};
        copies.push_back({{"shape", shape}, {"vertices", vs}});
    }
    return {{"copies", copies}};
}

json appendix_report_to_json(const AppendixReport& r)
{
    json vs = json::array();
    for (const auto& v : r.violations)
        vs.push_back({{"copy", v.copy}, {"invariant", v.invariant}, {"value", v.value}, {"bound", v.bound}});
    return {{"status", r.status},
            {"leftover_per_part", r.leftover_per_part},
            {"copies_checked", r.copies_checked},
            {"violations", vs},
            {"maximal", r.maximality.maximal}};
}

} // namespace ptile
