#include "ptile/absorption.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ptile/error.hpp"
#include "ptile/matching.hpp"
#include "ptile/rng.hpp"

namespace ptile {

using nlohmann::json;

namespace {

void require_complete(const PartiteGraph& g, const char* what)
{
    if (!g.pattern().is_complete())
        throw Error(std::string(what) + " need a complete pattern");
}

std::optional<TransversalCopy> clique_in(const PartiteGraph& g, const std::vector<Bits>& cand)
{
    VertexSetFamily f;
    for (int i = 0; i < g.k(); ++i)
        f.push_back({i, cand[static_cast<std::size_t>(i)]});
    return find_transversal_clique(g, f);
}

Bits single(const PartiteGraph& g, int idx)
{
    Bits b(static_cast<std::size_t>(g.n()));
    b.set(static_cast<std::size_t>(idx));
    return b;
}

std::vector<VertexId> without_part(const TransversalCopy& c, int part)
{
    std::vector<VertexId> out;
    for (auto x : c.vertices)
        if (x.part != part)
            out.push_back(x);
    return out;
}

TransversalCopy copy_of(VertexId a, const std::vector<VertexId>& rest)
{
    TransversalCopy c;
    c.vertices.resize(rest.size() + 1);
    c.vertices[static_cast<std::size_t>(a.part)] = a;
    for (auto x : rest)
        c.vertices[static_cast<std::size_t>(x.part)] = x;
    return c;
}

Tiling tiling_of(const PartiteGraph& g, const std::vector<TransversalCopy>& copies)
{
    Tiling t = Tiling::empty_of(g);
    for (const auto& c : copies)
        t.add(c);
    return t;
}

void sort_vertices(std::vector<VertexId>& vs) { std::sort(vs.begin(), vs.end()); }

bool induced_factors(const PartiteGraph& g, const VertexSet& s)
{
    if (!s.is_balanced())
        return false;
    return exact_transversal_factor(g, s, std::max(kDefaultFactorCap, s.part_size(0))).factor.has_value();
}

// Maximum packing of completion sets, by branching on the vertices of one part.
struct FanPacker {
    const PartiteGraph& g;
    std::vector<std::vector<VertexId>> sets;
    int pivot_part = 0;
    std::vector<std::vector<int>> by_pivot; // set indices grouped by their pivot vertex
    std::vector<int> pivots;
    VertexSet used;
    std::vector<int> cur, best;

    void rec(std::size_t pos)
    {
        if (cur.size() + (pivots.size() - pos) <= best.size())
            return;
        if (pos == pivots.size()) {
            best = cur;
            return;
        }
        for (int si : by_pivot[pos]) {
            const auto& s = sets[static_cast<std::size_t>(si)];
            bool ok = std::none_of(s.begin(), s.end(), [&](VertexId x) { return used.contains(x); });
            if (!ok)
                continue;
            for (auto x : s)
                used.insert(x);
            cur.push_back(si);
            rec(pos + 1);
            cur.pop_back();
            for (auto x : s)
                used.erase(x);
        }
        rec(pos + 1);
    }
};

} // namespace

Fan find_fan(const PartiteGraph& g, VertexId v, int target_size, const VertexSet& within)
{
    require_complete(g, "fans");
    if (!g.contains(v))
        throw Error("vertex out of range");
    const int k = g.k();
    Fan fan{v, {}, false};
    std::vector<Bits> cand(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
        cand[static_cast<std::size_t>(j)] = j == v.part ? single(g, v.idx) : g.neighbors(v, j) & within.part(j);
    auto limit = [&] {
        if (target_size >= 0 && static_cast<int>(fan.sets.size()) > target_size)
            fan.sets.resize(static_cast<std::size_t>(target_size));
    };

    if (k == 2) {
        for_each_bit(cand[static_cast<std::size_t>(1 - v.part)],
                     [&](int a) { fan.sets.push_back({VertexId{1 - v.part, a}}); });
        fan.exact = true;
        limit();
        return fan;
    }
    if (k == 3) {
        const int a = v.part == 0 ? 1 : 0;
        const int b = v.part == 2 ? 1 : 2;
        auto left = bits_to_vector(cand[static_cast<std::size_t>(a)]);
        std::vector<std::vector<int>> adj(left.size());
        for (std::size_t l = 0; l < left.size(); ++l)
            adj[l] = bits_to_vector(g.neighbors({a, left[l]}, b) & cand[static_cast<std::size_t>(b)]);
        BipartiteMatcher m(adj, g.n());
        m.run();
        for (std::size_t l = 0; l < left.size(); ++l) {
            int r = m.left_partner()[l];
            if (r >= 0)
                fan.sets.push_back({VertexId{a, left[l]}, VertexId{b, r}});
        }
        fan.exact = true;
        limit();
        return fan;
    }
    if (g.n() <= kFanExactCap) {
        FanPacker pk{g, {}, v.part == 0 ? 1 : 0, {}, {}, VertexSet::empty_of(g), {}, {}};
        VertexSet allowed(k, g.n());
        for (int j = 0; j < k; ++j)
            allowed.part(j) = cand[static_cast<std::size_t>(j)];
        for_each_copy(g, allowed, [&](const TransversalCopy& c) {
            pk.sets.push_back(without_part(c, v.part));
            return true;
        });
        pk.pivots = bits_to_vector(cand[static_cast<std::size_t>(pk.pivot_part)]);
        pk.by_pivot.resize(pk.pivots.size());
        for (std::size_t si = 0; si < pk.sets.size(); ++si) {
            int x = pk.sets[si][0].idx; // sets list parts in increasing order; pivot part is the first
            auto it = std::lower_bound(pk.pivots.begin(), pk.pivots.end(), x);
            pk.by_pivot[static_cast<std::size_t>(it - pk.pivots.begin())].push_back(static_cast<int>(si));
        }
        pk.rec(0);
        for (int si : pk.best)
            fan.sets.push_back(pk.sets[static_cast<std::size_t>(si)]);
        fan.exact = true;
        limit();
        return fan;
    }
    while (target_size < 0 || static_cast<int>(fan.sets.size()) < target_size) {
        auto c = clique_in(g, cand);
        if (!c)
            break;
        auto rest = without_part(*c, v.part);
        for (auto x : rest)
            cand[static_cast<std::size_t>(x.part)].reset(static_cast<std::size_t>(x.idx));
        fan.sets.push_back(std::move(rest));
    }
    return fan;
}

Fan find_fan(const PartiteGraph& g, VertexId v, int target_size)
{
    return find_fan(g, v, target_size, VertexSet::full_of(g));
}

void validate_fan(const PartiteGraph& g, const Fan& f)
{
    VertexSet seen = VertexSet::empty_of(g);
    for (const auto& s : f.sets) {
        if (static_cast<int>(s.size()) != g.k() - 1)
            throw Error("fan set has the wrong size");
        for (auto x : s) {
            if (!g.contains(x) || x.part == f.at.part)
                throw Error("fan set is not transversal");
            if (seen.contains(x))
                throw Error("fan sets overlap");
            seen.insert(x);
        }
        auto c = copy_of(f.at, s);
        if (!is_transversal_copy(g, c.vertices))
            throw Error("fan set does not complete a copy");
    }
}

namespace {

void check_endpoints(const PartiteGraph& g, VertexId u, VertexId v)
{
    require_complete(g, "connectors");
    if (!g.contains(u) || !g.contains(v))
        throw Error("vertex out of range");
    if (u.part != v.part || u == v)
        throw Error("connector endpoints must be distinct vertices of one part");
}

VertexSet clean_w(VertexSet w, VertexId u, VertexId v)
{
    w.erase(u);
    w.erase(v);
    return w;
}

std::optional<Connector> connector_t1(const PartiteGraph& g, VertexId u, VertexId v, const VertexSet& w)
{
    std::vector<Bits> cand(static_cast<std::size_t>(g.k()));
    for (int j = 0; j < g.k(); ++j)
        cand[static_cast<std::size_t>(j)] =
            j == u.part ? single(g, u.idx) : (g.neighbors(u, j) & g.neighbors(v, j)) - w.part(j);
    auto c = clique_in(g, cand);
    if (!c)
        return std::nullopt;
    Connector out{u, v, 1, without_part(*c, u.part), {}, {}};
    out.witness_u = tiling_of(g, {copy_of(u, out.set)});
    out.witness_v = tiling_of(g, {copy_of(v, out.set)});
    return out;
}

Connector make_t2(const PartiteGraph& g, VertexId u, VertexId v, VertexId apex, const std::vector<VertexId>& y,
                  const std::vector<VertexId>& z, const std::vector<VertexId>& y2, const std::vector<VertexId>& z2)
{
    // {u} ∪ S = (u + y) ∪ (apex + z); {v} ∪ S = (v + y2) ∪ (apex + z2).
    Connector out{u, v, 2, {apex}, {}, {}};
    out.set.insert(out.set.end(), y.begin(), y.end());
    out.set.insert(out.set.end(), z.begin(), z.end());
    sort_vertices(out.set);
    out.witness_u = tiling_of(g, {copy_of(u, y), copy_of(apex, z)});
    out.witness_v = tiling_of(g, {copy_of(v, y2), copy_of(apex, z2)});
    return out;
}

std::optional<Connector> connector_t2(const PartiteGraph& g, VertexId u, VertexId v, const VertexSet& w,
                                      const ConnectorOptions& opt)
{
    const int k = g.k(), n = g.n(), p = u.part;
    const int want = 2 * static_cast<int>(std::ceil(opt.alpha * n - 1e-12));
    std::vector<Bits> d1(static_cast<std::size_t>(k)), d2(static_cast<std::size_t>(k));
    std::vector<int> order_p;
    for (int j = 0; j < k; ++j) {
        Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(j)));
        auto perm = rng.permutation(n);
        if (j == p) {
            order_p = perm;
            continue;
        }
        Bits a = g.neighbors(u, j) - w.part(j);
        Bits b = g.neighbors(v, j) - w.part(j);
        auto& x1 = d1[static_cast<std::size_t>(j)];
        auto& x2 = d2[static_cast<std::size_t>(j)];
        x1 = Bits(static_cast<std::size_t>(n));
        x2 = Bits(static_cast<std::size_t>(n));
        // Walk the permutation; a vertex seen by both u and v goes to the smaller sample so
        // that D_{j,1} cannot swallow every candidate of D_{j,2}.
        int c1 = 0, c2 = 0;
        for (int x : perm) {
            auto bit = static_cast<std::size_t>(x);
            bool in1 = a.test(bit) && c1 < want, in2 = b.test(bit) && c2 < want;
            if (in1 && in2)
                (c1 <= c2 ? in2 : in1) = false;
            if (in1) {
                x1.set(bit);
                ++c1;
            }
            else if (in2) {
                x2.set(bit);
                ++c2;
            }
        }
    }
    for (int a : order_p) {
        VertexId apex{p, a};
        if (apex == u || apex == v || w.contains(apex))
            continue;
        d1[static_cast<std::size_t>(p)] = single(g, a);
        auto k1 = clique_in(g, d1);
        if (!k1)
            continue;
        d2[static_cast<std::size_t>(p)] = single(g, a);
        auto k2 = clique_in(g, d2);
        if (!k2)
            continue;
        auto y = without_part(*k1, p), z = without_part(*k2, p);
        return make_t2(g, u, v, apex, y, z, z, y);
    }
    return std::nullopt;
}

} // namespace

std::optional<Connector> find_connector(const PartiteGraph& g, VertexId u, VertexId v, const VertexSet& w, int t,
                                        const ConnectorOptions& opt)
{
    check_endpoints(g, u, v);
    if (t != 1 && t != 2)
        throw Error("connector parameter t must be 1 or 2");
    VertexSet ww = clean_w(w, u, v);
    return t == 1 ? connector_t1(g, u, v, ww) : connector_t2(g, u, v, ww, opt);
}

std::optional<Connector> exhaustive_connector(const PartiteGraph& g, VertexId u, VertexId v, const VertexSet& w,
                                              int t)
{
    check_endpoints(g, u, v);
    if (t != 1 && t != 2)
        throw Error("connector parameter t must be 1 or 2");
    VertexSet ww = clean_w(w, u, v);
    // A factor of {u} ∪ S needs |S| = k s - 1 with s - 1 vertices in part(u); s = 1 is the
    // common-neighbourhood clique search, which is already complete.
    if (auto c = connector_t1(g, u, v, ww))
        return c;
    if (t == 1)
        return std::nullopt;

    const int k = g.k(), p = u.part;
    VertexSet free = VertexSet::full_of(g) - ww;
    free.erase(u);
    free.erase(v);
    auto completions = [&](VertexId a, const VertexSet& avoid) {
        VertexSet allowed = free - avoid;
        allowed.part(p) = single(g, a.idx);
        std::vector<std::vector<VertexId>> out;
        for_each_copy(g, allowed, [&](const TransversalCopy& c) {
            out.push_back(without_part(c, p));
            return true;
        });
        return out;
    };
    const auto ys = completions(u, VertexSet::empty_of(g));
    for (int a : bits_to_vector(free.part(p))) {
        VertexId apex{p, a};
        for (const auto& y : ys) {
            VertexSet avoid = VertexSet::of(g, y);
            for (const auto& z : completions(apex, avoid)) {
                // Split y ∪ z per part into (v side, apex side).
                for (unsigned mask = 0; mask < (1u << (k - 1)); ++mask) {
                    std::vector<VertexId> y2, z2;
                    for (int q = 0; q < k - 1; ++q) {
                        bool swap = (mask >> q) & 1u;
                        y2.push_back(swap ? z[static_cast<std::size_t>(q)] : y[static_cast<std::size_t>(q)]);
                        z2.push_back(swap ? y[static_cast<std::size_t>(q)] : z[static_cast<std::size_t>(q)]);
                    }
                    if (is_transversal_copy(g, copy_of(v, y2).vertices) &&
                        is_transversal_copy(g, copy_of(apex, z2).vertices))
                        return make_t2(g, u, v, apex, y, z, y2, z2);
                }
            }
        }
    }
    return std::nullopt;
}

void validate_connector(const PartiteGraph& g, const Connector& c)
{
    check_endpoints(g, c.u, c.v);
    const int k = g.k();
    if (c.t < 1 || static_cast<int>(c.set.size()) > k * c.t - 1)
        throw Error("connector exceeds its size bound");
    VertexSet s = VertexSet::empty_of(g);
    for (auto x : c.set) {
        if (!g.contains(x))
            throw Error("vertex out of range");
        if (s.contains(x))
            throw Error("connector repeats a vertex");
        s.insert(x);
    }
    if (s.contains(c.u) || s.contains(c.v))
        throw Error("connector contains an endpoint");
    VertexSet su = s, sv = s;
    su.insert(c.u);
    sv.insert(c.v);
    if (!is_factor_of(g, c.witness_u, su) || !is_factor_of(g, c.witness_v, sv))
        throw Error("connector witness does not validate");
    if (!induced_factors(g, su) || !induced_factors(g, sv))
        throw Error("connector witness rejected by the exact solver");
}

namespace {

// C(a, b), saturating at `limit` + 1.
long long binom_capped(long long a, long long b, long long limit)
{
    if (b < 0 || b > a)
        return 0;
    b = std::min(b, a - b);
    long long r = 1;
    for (long long i = 1; i <= b; ++i) {
        r = r * (a - b + i) / i;
        if (r > limit)
            return limit + 1;
    }
    return r;
}

VertexSet truncated(const PartiteGraph& g, const std::vector<VertexId>& pool, int m)
{
    VertexSet w = VertexSet::empty_of(g);
    for (std::size_t i = 0; i < pool.size() && static_cast<int>(i) < m; ++i)
        w.insert(pool[i]);
    return w;
}

} // namespace

ReachVerdict is_reachable(const PartiteGraph& g, VertexId u, VertexId v, int m, int t, int trials,
                          std::uint64_t seed, const ConnectorOptions& opt)
{
    check_endpoints(g, u, v);
    if (m < 0 || trials < 0)
        throw Error("reachability budget must be non-negative");
    ReachVerdict out;
    std::vector<VertexId> pool;
    for (int f = 0; f < g.k() * g.n(); ++f) {
        VertexId x = g.unflat(f);
        if (x != u && x != v)
            pool.push_back(x);
    }
    const int size = std::min<int>(m, static_cast<int>(pool.size()));

    auto test = [&](const VertexSet& w) {
        ++out.tested;
        ConnectorOptions o = opt;
        o.seed = derive_seed(opt.seed, static_cast<std::uint64_t>(out.tested));
        if (find_connector(g, u, v, w, t, o))
            return true;
        bool complete = t == 1;
        if (!complete && g.n() <= kReachExhaustiveCap) {
            if (exhaustive_connector(g, u, v, w, t))
                return true;
            complete = true;
        }
        out.pass = false;
        out.defeating_w = w;
        out.proof = complete;
        return false;
    };

    out.exhaustive = binom_capped(static_cast<long long>(pool.size()), size, trials) <= trials;
    if (!test(VertexSet::empty_of(g)))
        return out;
    if (out.exhaustive) {
        std::vector<int> idx(static_cast<std::size_t>(size));
        for (int i = 0; i < size; ++i)
            idx[static_cast<std::size_t>(i)] = i;
        const int total = static_cast<int>(pool.size());
        for (;;) {
            VertexSet w = VertexSet::empty_of(g);
            for (int i : idx)
                w.insert(pool[static_cast<std::size_t>(i)]);
            if (!test(w))
                return out;
            int i = size - 1;
            while (i >= 0 && idx[static_cast<std::size_t>(i)] == total - size + i)
                --i;
            if (i < 0)
                break;
            ++idx[static_cast<std::size_t>(i)];
            for (int q = i + 1; q < size; ++q)
                idx[static_cast<std::size_t>(q)] = idx[static_cast<std::size_t>(q - 1)] + 1;
        }
        return out;
    }

    auto nbrs = [&](VertexId a) {
        std::vector<VertexId> out_n;
        for (auto x : pool)
            if (x.part != a.part && g.has_edge(a, x))
                out_n.push_back(x);
        return out_n;
    };
    auto nu = nbrs(u), nv = nbrs(v);
    std::vector<VertexId> both;
    for (auto x : nu)
        if (std::find(nv.begin(), nv.end(), x) != nv.end())
            both.push_back(x);
    for (const auto* list : {&both, &nu, &nv})
        if (!test(truncated(g, *list, size)))
            return out;

    Rng rng(seed);
    for (int trial = 0; trial < trials; ++trial) {
        auto perm = pool;
        rng.shuffle(perm);
        if (!test(truncated(g, perm, size)))
            return out;
    }
    return out;
}

namespace {

std::vector<VertexId> as_transversal(const PartiteGraph& g, std::vector<VertexId> s)
{
    sort_vertices(s);
    if (static_cast<int>(s.size()) != g.k())
        throw Error("absorber target must be a transversal k-set");
    for (int i = 0; i < g.k(); ++i)
        if (s[static_cast<std::size_t>(i)].part != i || !g.contains(s[static_cast<std::size_t>(i)]))
            throw Error("absorber target must be a transversal k-set");
    return s;
}

} // namespace

std::optional<Absorber> find_absorber(const PartiteGraph& g, const std::vector<VertexId>& s_in,
                                      const VertexSet& forbidden, const AbsorberOptions& opt)
{
    require_complete(g, "absorbers");
    const auto s = as_transversal(g, s_in);
    const int k = g.k();
    VertexSet blocked = forbidden | VertexSet::of(g, s);
    VertexSet allowed = VertexSet::full_of(g) - blocked;

    std::optional<Absorber> found;
    int tries = 0;
    for_each_copy(g, allowed, [&](const TransversalCopy& core) {
        VertexSet used = blocked | VertexSet::of(g, core.vertices);
        std::vector<Connector> conns;
        for (int i = 0; i < k; ++i) {
            VertexId si = s[static_cast<std::size_t>(i)], ti = core.vertices[static_cast<std::size_t>(i)];
            ConnectorOptions co = opt.connector;
            co.seed = derive_seed(opt.connector.seed, static_cast<std::uint64_t>(tries * k + i));
            std::optional<Connector> c;
            if (opt.connector_t != 2)
                c = find_connector(g, si, ti, used, 1, co);
            if (!c && opt.connector_t != 1)
                c = find_connector(g, si, ti, used, 2, co);
            if (!c)
                break;
            for (auto x : c->set)
                used.insert(x);
            conns.push_back(std::move(*c));
        }
        ++tries;
        if (static_cast<int>(conns.size()) == k) {
            Absorber a;
            a.target = s;
            a.t = 2 * k;
            a.core = core;
            a.set = core.vertices;
            std::vector<TransversalCopy> fa, fas{core};
            for (const auto& c : conns) {
                a.set.insert(a.set.end(), c.set.begin(), c.set.end());
                fa.insert(fa.end(), c.witness_v.copies.begin(), c.witness_v.copies.end());
                fas.insert(fas.end(), c.witness_u.copies.begin(), c.witness_u.copies.end());
            }
            sort_vertices(a.set);
            a.connectors = std::move(conns);
            a.witness_a = tiling_of(g, fa);
            a.witness_as = tiling_of(g, fas);
            found = std::move(a);
            return false;
        }
        return tries < opt.max_core_tries;
    });
    return found;
}

std::vector<Absorber> disjoint_absorbers(const PartiteGraph& g, const std::vector<VertexId>& s, int count_target,
                                         const VertexSet& forbidden, const AbsorberOptions& opt)
{
    std::vector<Absorber> out;
    VertexSet blocked = forbidden;
    while (count_target < 0 || static_cast<int>(out.size()) < count_target) {
        AbsorberOptions o = opt;
        o.connector.seed = derive_seed(opt.connector.seed, out.size());
        auto a = find_absorber(g, s, blocked, o);
        if (!a)
            break;
        for (auto x : a->set)
            blocked.insert(x);
        out.push_back(std::move(*a));
    }
    return out;
}

std::vector<Absorber> disjoint_absorbers(const PartiteGraph& g, const std::vector<VertexId>& s, int count_target,
                                         const AbsorberOptions& opt)
{
    return disjoint_absorbers(g, s, count_target, VertexSet::empty_of(g), opt);
}

void validate_absorber(const PartiteGraph& g, const Absorber& a)
{
    require_complete(g, "absorbers");
    const auto s = as_transversal(g, a.target);
    if (static_cast<int>(a.set.size()) > g.k() * a.t)
        throw Error("absorber exceeds its size bound");
    VertexSet set = VertexSet::empty_of(g);
    for (auto x : a.set) {
        if (!g.contains(x))
            throw Error("vertex out of range");
        if (set.contains(x))
            throw Error("absorber repeats a vertex");
        set.insert(x);
    }
    VertexSet target = VertexSet::of(g, s);
    if (set.intersects(target))
        throw Error("absorber meets its target");
    if (!is_factor_of(g, a.witness_a, set) || !is_factor_of(g, a.witness_as, set | target))
        throw Error("absorber witness does not validate");
    if (!induced_factors(g, set) || !induced_factors(g, set | target))
        throw Error("absorber witness rejected by the exact solver");
}

namespace {

json vertex_list(const std::vector<VertexId>& vs)
{
    json out = json::array();
    for (auto v : vs)
        out.push_back(vertex_to_json(v));
    return out;
}

} // namespace

json fan_to_json(const Fan& f)
{
    json sets = json::array();
    for (const auto& s : f.sets)
        sets.push_back(vertex_list(s));
    return {{"at", vertex_to_json(f.at)}, {"size", f.sets.size()}, {"exact", f.exact}, {"sets", sets}};
}

json connector_to_json(const PartiteGraph& g, const Connector& c)
{
    return {{"u", vertex_to_json(c.u)},
            {"v", vertex_to_json(c.v)},
            {"t", c.t},
            {"set", vertex_list(c.set)},
            {"witness_u", tiling_to_json(g, c.witness_u)},
            {"witness_v", tiling_to_json(g, c.witness_v)}};
}

json absorber_to_json(const PartiteGraph& g, const Absorber& a)
{
    json conns = json::array();
    for (const auto& c : a.connectors)
        conns.push_back(connector_to_json(g, c));
    return {{"target", vertex_list(a.target)},
            {"t", a.t},
            {"set", vertex_list(a.set)},
            {"core", copy_to_json(a.core)},
            {"connectors", conns},
            {"witness_a", tiling_to_json(g, a.witness_a)},
            {"witness_as", tiling_to_json(g, a.witness_as)}};
}

json reach_verdict_to_json(const ReachVerdict& r)
{
    json out = {{"pass", r.pass}, {"tested", r.tested}, {"exhaustive", r.exhaustive}, {"proof", r.proof}};
    if (r.defeating_w)
        out["defeating_w"] = vertex_set_to_json(*r.defeating_w);
    return out;
}

} // namespace ptile
