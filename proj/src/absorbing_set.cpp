#include "ptile/absorbing_set.hpp"

#include <algorithm>
#include <cmath>

#include "ptile/error.hpp"
#include "ptile/rng.hpp"

namespace ptile {

using nlohmann::json;

VertexId AbsorbingSet::left_vertex(int part, int left) const
{
    const auto& xs = x[static_cast<std::size_t>(part)];
    if (left < static_cast<int>(xs.size()))
        return {part, xs[static_cast<std::size_t>(left)]};
    return {part, y[static_cast<std::size_t>(part)][static_cast<std::size_t>(left - static_cast<int>(xs.size()))]};
}

namespace {

int ceil_scaled(double c, double n) { return static_cast<int>(std::ceil(c * n - 1e-9)); }

std::string vname(VertexId v) { return "(" + std::to_string(v.part + 1) + "," + std::to_string(v.idx) + ")"; }

[[noreturn]] void stage_error(const std::string& stage, const std::string& detail)
{
    throw Error("stage " + stage + ": " + detail);
}

// Smallest fan size over all vertices (capped at `need`), and the vertex attaining it.
std::pair<int, VertexId> weakest_fan(const PartiteGraph& g, int need, const VertexSet& within)
{
    std::pair<int, VertexId> worst{need, {0, 0}};
    for (int f = 0; f < g.k() * g.n(); ++f) {
        VertexId v = g.unflat(f);
        int got = static_cast<int>(find_fan(g, v, need, within).sets.size());
        if (got < worst.first) {
            worst = {got, v};
            if (got == 0)
                break;
        }
    }
    return worst;
}

} // namespace

AbsorbingSet build_absorbing_set(const PartiteGraph& g, const AbsorbingParams& p)
{
    if (!g.pattern().is_complete())
        throw Error("absorbing sets need a complete pattern");
    const int k = g.k(), n = g.n();
    if (k < 2 || p.m < 1 || p.beta_m < 0 || p.q <= 0 || p.tau < 0 || p.beta_prime < 0)
        throw Error("invalid absorbing-set parameters");
    AbsorbingSet as;
    as.m = p.m;
    as.beta_m = p.beta_m;
    const int xs = p.m + p.beta_m;
    const int qn = static_cast<int>(std::floor(p.q * n + 1e-9));
    if (qn < xs)
        stage_error("(i) sample", "floor(q n) = " + std::to_string(qn) + " is below m + beta_m = " +
                                      std::to_string(xs) + " (deficit " + std::to_string(xs - qn) + ")");
    const int per_part = xs + 2 * p.m + 3 * p.m * (k - 1);
    if (per_part > n)
        stage_error("(ii) reserve", "X, Y and Z need " + std::to_string(per_part) + " vertices per part but n = " +
                                        std::to_string(n) + " (deficit " + std::to_string(per_part - n) + ")");

    const int need_g = std::max(1, ceil_scaled(p.tau, n));
    if (auto [got, v] = weakest_fan(g, need_g, VertexSet::full_of(g)); got < need_g)
        stage_error("fan", "vertex " + vname(v) + " has a fan of size " + std::to_string(got) + " < " +
                               std::to_string(need_g) + " (deficit " + std::to_string(need_g - got) + ")");

    // (i) X_i: first m + beta_m entries of a per-attempt permutation of V_i, re-sampled until
    // every vertex keeps a large fan inside X.
    as.fan_threshold = std::max(1, ceil_scaled(k * p.beta_prime, n));
    std::vector<std::vector<int>> perms;
    int best = -1;
    for (int attempt = 1;; ++attempt) {
        if (attempt > p.sample_tries)
            stage_error("(i) sample", "no sample of X gave every vertex a fan of size " +
                                          std::to_string(as.fan_threshold) + " inside X after " +
                                          std::to_string(p.sample_tries) + " attempts (best minimum " +
                                          std::to_string(best) + ", deficit " +
                                          std::to_string(as.fan_threshold - best) + ")");
        perms.clear();
        VertexSet x = VertexSet::empty_of(g);
        for (int i = 0; i < k; ++i) {
            Rng rng(derive_seed(p.seed, static_cast<std::uint64_t>(attempt) * 64 + static_cast<std::uint64_t>(i)));
            perms.push_back(rng.permutation(n));
            for (int l = 0; l < xs; ++l)
                x.insert({i, perms.back()[static_cast<std::size_t>(l)]});
        }
        int got = weakest_fan(g, as.fan_threshold, x).first;
        best = std::max(best, got);
        if (got >= as.fan_threshold) {
            as.sample_attempts = attempt;
            break;
        }
    }

    // (ii) Y_i and Z_{i,j} follow X_i in the same permutation.
    as.x.resize(static_cast<std::size_t>(k));
    as.y.resize(static_cast<std::size_t>(k));
    as.z.assign(static_cast<std::size_t>(k), std::vector<std::vector<int>>(static_cast<std::size_t>(k)));
    as.r = VertexSet::empty_of(g);
    for (int i = 0; i < k; ++i) {
        const auto& pm = perms[static_cast<std::size_t>(i)];
        std::size_t at = 0;
        auto take = [&](std::vector<int>& into, int count) {
            for (int c = 0; c < count; ++c) {
                into.push_back(pm[at++]);
                as.r.insert({i, into.back()});
            }
            std::sort(into.begin(), into.end());
        };
        take(as.x[static_cast<std::size_t>(i)], xs);
        take(as.y[static_cast<std::size_t>(i)], 2 * p.m);
        for (int j = 0; j < k; ++j)
            if (j != i)
                take(as.z[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], 3 * p.m);
    }

    // (iii) The l-th set for part j takes the l-th vertex of every Z_{i,j}.
    as.zsets.assign(static_cast<std::size_t>(k), {});
    for (int j = 0; j < k; ++j)
        for (int l = 0; l < 3 * p.m; ++l) {
            std::vector<VertexId> s;
            for (int i = 0; i < k; ++i)
                if (i != j)
                    s.push_back({i, as.z[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)][static_cast<std::size_t>(l)]});
            as.zsets[static_cast<std::size_t>(j)].push_back(std::move(s));
        }

    // (iv)
    for (int i = 0; i < k; ++i) {
        auto found = generate_template(p.m, p.beta_m, p.template_tries,
                                       derive_seed(p.seed, 0x7e00 + static_cast<std::uint64_t>(i)), p.degree_cap);
        if (!found.tmpl)
            stage_error("(iv) template", "no verified template for part " + std::to_string(i + 1) + " within " +
                                             std::to_string(p.template_tries) + " tries");
        as.templates.push_back(std::move(*found.tmpl));
    }

    // (v) Sequential, so the reservation set is simply the running union.
    VertexSet reserved = as.r;
    std::size_t total = 0, done = 0;
    for (const auto& t : as.templates)
        total += t.edges.size();
    for (int i = 0; i < k; ++i)
        for (auto [l, r] : as.templates[static_cast<std::size_t>(i)].edges) {
            std::vector<VertexId> target = as.zsets[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];
            target.push_back(as.left_vertex(i, l));
            AbsorberOptions o = p.absorber;
            o.connector.seed = derive_seed(p.seed ^ p.absorber.connector.seed, 0xab00000 + done);
            auto a = find_absorber(g, target, reserved, o);
            if (!a)
                stage_error("(v) absorbers", "no disjoint absorber for template edge (" + std::to_string(l) + "," +
                                                 std::to_string(r) + ") of part " + std::to_string(i + 1) +
                                                 "; placed " + std::to_string(done) + " of " +
                                                 std::to_string(total) + " (deficit " +
                                                 std::to_string(total - done) + ")");
            for (auto v : a->set)
                reserved.insert(v);
            as.absorbers.push_back({i, l, r, std::move(*a)});
            ++done;
        }
    as.r = reserved;
    if (p.gamma >= 0 && static_cast<double>(as.r.size()) > p.gamma * n + 1e-9)
        stage_error("(v) size", "|R| = " + std::to_string(as.r.size()) + " exceeds gamma n = " +
                                    std::to_string(p.gamma * n));
    as.capacity = k > 1 ? p.beta_m / (k - 1) : 0;
    as.xi = static_cast<double>(k * as.capacity) / n;
    return as;
}

namespace {

// Copies inside X, one through each vertex of U, then `fill` more: first greedily in the
// order of U, then by backtracking when the greedy choice gets stuck.
std::vector<TransversalCopy> copies_in(const PartiteGraph& g, const VertexSet& xset, const VertexSet& used,
                                       const VertexId* through, std::size_t limit)
{
    VertexSet allowed = xset - used;
    if (through) {
        allowed.part(through->part).reset();
        allowed.insert(*through);
    }
    std::vector<TransversalCopy> out;
    for_each_copy(g, allowed, [&](const TransversalCopy& c) {
        out.push_back(c);
        return out.size() < limit;
    });
    return out;
}

bool cover_greedy(const PartiteGraph& g, const VertexSet& xset, const std::vector<VertexId>& u, int fill, Tiling& out)
{
    Tiling t = out;
    for (std::size_t i = 0; i < u.size() + static_cast<std::size_t>(fill); ++i) {
        const VertexId* through = i < u.size() ? &u[i] : nullptr;
        auto c = copies_in(g, xset, t.covered, through, 1);
        if (c.empty())
            return false;
        t.add(c.front());
    }
    out = std::move(t);
    return true;
}

struct CoverSearch {
    const PartiteGraph& g;
    const VertexSet& xset;
    const std::vector<VertexId>& u;
    int fill;
    std::vector<TransversalCopy> stack;
    VertexSet used;
    long long budget = 200000;

    bool rec(std::size_t i, int min_first)
    {
        if (i == u.size() + static_cast<std::size_t>(fill))
            return true;
        if (--budget < 0)
            return false;
        const bool cover = i < u.size();
        auto cands = copies_in(g, xset, used, cover ? &u[i] : nullptr,
                               static_cast<std::size_t>(-1));
        for (const auto& c : cands) {
            // Fill copies are chosen in increasing order of their part-0 vertex.
            int first = c.vertices[0].idx;
            if (!cover && first <= min_first)
                continue;
            for (auto v : c.vertices)
                used.insert(v);
            stack.push_back(c);
            if (rec(i + 1, cover ? -1 : first))
                return true;
            stack.pop_back();
            for (auto v : c.vertices)
                used.erase(v);
        }
        return false;
    }
};

bool cover_search(const PartiteGraph& g, const VertexSet& xset, const std::vector<VertexId>& u, int fill, Tiling& out)
{
    CoverSearch cs{g, xset, u, fill, {}, VertexSet::empty_of(g)};
    if (!cs.rec(0, -1))
        return false;
    for (const auto& c : cs.stack)
        out.add(c);
    return true;
}

std::optional<Tiling> constructive(const PartiteGraph& g, const AbsorbingSet& as, const VertexSet& u)
{
    const int k = g.k();
    if (as.templates.size() != static_cast<std::size_t>(k))
        return std::nullopt;
    const int per = u.part_size(0);
    const int fill = as.beta_m - (k - 1) * per;
    if (fill < 0)
        return std::nullopt;
    VertexSet xset = VertexSet::empty_of(g);
    for (int i = 0; i < k; ++i)
        for (int a : as.x[static_cast<std::size_t>(i)])
            xset.insert({i, a});

    Tiling out = Tiling::empty_of(g);
    const auto uv = u.vertices();
    if (!cover_greedy(g, xset, uv, fill, out) && !cover_search(g, xset, uv, fill, out))
        return std::nullopt;

    for (int i = 0; i < k; ++i) {
        const auto& t = as.templates[static_cast<std::size_t>(i)];
        std::vector<int> rest;
        const auto& xs = as.x[static_cast<std::size_t>(i)];
        for (std::size_t l = 0; l < xs.size(); ++l)
            if (!out.covered.contains({i, xs[l]}))
                rest.push_back(static_cast<int>(l));
        if (static_cast<int>(rest.size()) != t.m)
            return std::nullopt;
        auto partner = template_matching(t, rest);
        if (!partner)
            return std::nullopt;
        for (const auto& e : as.absorbers) {
            if (e.part != i)
                continue;
            const auto& w = (*partner)[static_cast<std::size_t>(e.left)] == e.right ? e.absorber.witness_as
                                                                                    : e.absorber.witness_a;
            for (const auto& c : w.copies)
                out.add(c);
        }
    }
    return out;
}

} // namespace

AbsorbCheck absorb(const PartiteGraph& g, const AbsorbingSet& as, const VertexSet& u)
{
    if (!u.is_balanced())
        throw Error("U must be balanced");
    if (u.intersects(as.r))
        throw Error("U must avoid R");
    VertexSet all = as.r | u;
    AbsorbCheck out;
    if (auto t = constructive(g, as, u); t && is_factor_of(g, *t, all)) {
        out.ok = true;
        out.method = "constructive";
        out.factor = std::move(t);
        return out;
    }
    if (all.part_size(0) <= kDefaultFactorCap) {
        out.method = "exact";
        auto r = exact_transversal_factor(g, all);
        if (r.factor && is_factor_of(g, *r.factor, all)) {
            out.ok = true;
            out.factor = std::move(r.factor);
        }
        return out;
    }
    out.method = "constructive";
    return out;
}

AbsorbVerdict verify_absorbing_property(const PartiteGraph& g, const AbsorbingSet& as, double xi, int trials,
                                        std::uint64_t seed, const AbsorbVerifyOptions& opt)
{
    const int k = g.k(), n = g.n();
    if (xi * n + 1e-9 < k)
        throw Error("absorbing check needs xi n >= k");
    AbsorbVerdict out;
    std::vector<std::vector<int>> free(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < n; ++a)
            if (!as.r.contains({i, a}))
                free[static_cast<std::size_t>(i)].push_back(a);
    std::size_t avail = free[0].size();
    for (const auto& f : free)
        avail = std::min(avail, f.size());
    const int top = std::min(static_cast<int>(std::floor(xi * n / k + 1e-9)), static_cast<int>(avail));

    auto check = [&](const VertexSet& u) {
        auto r = absorb(g, as, u);
        (r.method == "exact" ? out.exact : out.constructive) += 1;
        if (!r.ok) {
            out.pass = false;
            out.failing_u = u;
            out.proof = r.method == "exact";
        }
        return r.ok;
    };

    Rng rng(seed);
    for (int trial = 0; trial < trials && top >= 1; ++trial) {
        int size = 1 + rng.below(top);
        VertexSet u = VertexSet::empty_of(g);
        for (int i = 0; i < k; ++i) {
            auto f = free[static_cast<std::size_t>(i)];
            rng.shuffle(f);
            for (int c = 0; c < size; ++c)
                u.insert({i, f[static_cast<std::size_t>(c)]});
        }
        ++out.random_trials;
        if (!check(u))
            return out;
    }

    const int e = opt.exhaustive_per_part;
    if (e < 1 || e > top)
        return out;
    // Number of U: C(|free_i|, e) multiplied over parts.
    long long count = 1;
    for (const auto& f : free) {
        long long c = 1;
        for (int q = 0; q < e; ++q)
            c = c * static_cast<long long>(f.size() - static_cast<std::size_t>(q)) / (q + 1);
        count *= c;
        if (count > opt.exhaustive_limit)
            return out;
    }
    std::vector<std::vector<int>> idx(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(e)));
    for (auto& v : idx)
        for (int q = 0; q < e; ++q)
            v[static_cast<std::size_t>(q)] = q;
    auto next_comb = [&](std::vector<int>& c, int total) {
        int i = e - 1;
        while (i >= 0 && c[static_cast<std::size_t>(i)] == total - e + i)
            --i;
        if (i < 0)
            return false;
        ++c[static_cast<std::size_t>(i)];
        for (int q = i + 1; q < e; ++q)
            c[static_cast<std::size_t>(q)] = c[static_cast<std::size_t>(q - 1)] + 1;
        return true;
    };
    for (;;) {
        VertexSet u = VertexSet::empty_of(g);
        for (int i = 0; i < k; ++i)
            for (int q : idx[static_cast<std::size_t>(i)])
                u.insert({i, free[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)]});
        ++out.exhaustive_trials;
        if (!check(u))
            return out;
        int p = k - 1;
        while (p >= 0 && !next_comb(idx[static_cast<std::size_t>(p)], static_cast<int>(free[static_cast<std::size_t>(p)].size()))) {
            for (int q = 0; q < e; ++q)
                idx[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = q;
            --p;
        }
        if (p < 0)
            break;
    }
    return out;
}

namespace {

json part_lists(const std::vector<std::vector<int>>& lists)
{
    json out = json::array();
    for (const auto& l : lists)
        out.push_back(l);
    return out;
}

json vlist(const std::vector<VertexId>& vs)
{
    json out = json::array();
    for (auto v : vs)
        out.push_back(vertex_to_json(v));
    return out;
}

} // namespace

json absorbing_set_to_json(const PartiteGraph& g, const AbsorbingSet& as)
{
    (void)g;
    json z = json::array();
    for (std::size_t i = 0; i < as.z.size(); ++i)
        for (std::size_t j = 0; j < as.z[i].size(); ++j)
            if (i != j)
                z.push_back({{"part", i + 1}, {"for", j + 1}, {"vertices", as.z[i][j]}});
    json zsets = json::array();
    for (const auto& per : as.zsets) {
        json row = json::array();
        for (const auto& s : per)
            row.push_back(vlist(s));
        zsets.push_back(row);
    }
    json templates = json::array();
    for (const auto& t : as.templates)
        templates.push_back(template_to_json(t));
    json abs = json::array();
    for (const auto& e : as.absorbers)
        abs.push_back({{"part", e.part + 1},
                       {"edge", {e.left, e.right}},
                       {"target", vlist(e.absorber.target)},
                       {"set", vlist(e.absorber.set)}});
    return {{"R", vertex_set_to_json(as.r)},
            {"size", as.r.size()},
            {"xi", as.xi},
            {"capacity_per_part", as.capacity},
            {"m", as.m},
            {"beta_m", as.beta_m},
            {"provenance",
             {{"sample_attempts", as.sample_attempts},
              {"fan_threshold", as.fan_threshold},
              {"X", part_lists(as.x)},
              {"Y", part_lists(as.y)},
              {"Z", z},
              {"zsets", zsets},
              {"templates", templates},
              {"absorbers", abs}}}};
}

json absorb_verdict_to_json(const AbsorbVerdict& v)
{
    json out = {{"pass", v.pass},
                {"random_trials", v.random_trials},
                {"exhaustive_trials", v.exhaustive_trials},
                {"constructive", v.constructive},
                {"exact", v.exact},
                {"proof", v.proof}};
    if (v.failing_u)
        out["failing_u"] = vertex_set_to_json(*v.failing_u);
    return out;
}

} // namespace ptile
