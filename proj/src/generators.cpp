#include "ptile/generators.hpp"

#include <fstream>
#include <sstream>

#include "ptile/error.hpp"
#include "ptile/rng.hpp"
#include "ptile/tiling.hpp"

namespace ptile {

using nlohmann::json;

PartiteGraph complete_blowup(const Pattern& pattern, int n)
{
    PartiteGraphBuilder b(pattern, n);
    for (auto [i, j] : pattern.edges())
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c)
                b.add_edge({i, a}, {j, c});
    return std::move(b).build();
}

PartiteGraph random_spanning_subgraph(const PartiteGraph& g, double p, std::uint64_t seed)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw Error("keep-probability must lie in [0, 1]");
    PartiteGraphBuilder b(g.pattern(), g.n());
    const auto& pe = g.pattern().edges();
    for (std::size_t e = 0; e < pe.size(); ++e) {
        Rng rng(derive_seed(seed, e));
        auto [i, j] = pe[e];
        for (int a = 0; a < g.n(); ++a)
            for (int c = 0; c < g.n(); ++c)
                if (g.has_edge({i, a}, {j, c}) && rng.bernoulli(p))
                    b.add_edge({i, a}, {j, c});
    }
    return std::move(b).build();
}

namespace {

using Edge = std::pair<VertexId, VertexId>;

std::vector<Edge> cross_pairs(const Pattern& pattern, int n, int from)
{
    std::vector<Edge> out;
    for (auto [i, j] : pattern.edges())
        for (int a = from; a < n; ++a)
            for (int c = from; c < n; ++c)
                out.push_back({{i, a}, {j, c}});
    return out;
}

PartiteGraph prefix_graph(const Pattern& pattern, int n, const std::vector<Edge>& order, std::size_t t)
{
    PartiteGraphBuilder b(pattern, n);
    for (std::size_t e = 0; e < t; ++e)
        b.add_edge(order[e].first, order[e].second);
    return std::move(b).build();
}

} // namespace

ProcessResult hole_suppressed_process(const Pattern& pattern, int n, int r, int s, std::uint64_t seed,
                                      const HoleProcessOptions& opt)
{
    if (r < 2)
        throw Error("hole arity must be at least 2");
    if (s < 1)
        throw Error("hole bound must be positive");
    auto tuples = clique_part_tuples(pattern, r);
    if (tuples.empty())
        throw Error("invalid hole arena");
    std::vector<Edge> order = cross_pairs(pattern, n, 0);
    Rng rng(derive_seed(seed, 0));
    rng.shuffle(order);
    const std::size_t limit = std::min(opt.budget, order.size());
    const bool exact = n <= opt.exact_cap;

    auto certified = [&](const PartiteGraph& g) {
        if (s > n)
            return true;
        if (exact) {
            for (const auto& t : tuples)
                if (find_hole_exact(g, t, s))
                    return false;
            return true;
        }
        return !alpha_star_lower_bound(g, r, s, opt.trials, derive_seed(seed, 1));
    };

    // Holes only shrink as edges are added, so the first certified prefix of the edge order
    // can be located by bisection.
    ProcessResult res{prefix_graph(pattern, n, order, limit), limit, false, exact ? "exact" : "randomized"};
    if (!certified(res.graph))
        return res;
    std::size_t lo = 0, hi = limit;
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (certified(prefix_graph(pattern, n, order, mid)))
            hi = mid;
        else
            lo = mid + 1;
    }
    res.graph = prefix_graph(pattern, n, order, lo);
    res.edges_added = lo;
    res.certified = true;
    return res;
}

SpaceBarrier space_barrier(int k, int n, std::uint64_t seed, std::size_t budget)
{
    if (k < 4)
        throw Error("space barrier needs k >= 4");
    if (n % k != 0)
        throw Error("part size not divisible");
    const Pattern pattern = Pattern::cycle(k);
    const int us = n / k - 1;
    PartiteGraphBuilder b(pattern, n);
    for (auto [i, j] : pattern.edges())
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c)
                if (a < us || c < us)
                    b.add_edge({i, a}, {j, c});

    SpaceBarrier out{PartiteGraph(pattern, n), {}, 0};
    Bits outside(static_cast<std::size_t>(n));
    for (int a = us; a < n; ++a)
        outside.set(static_cast<std::size_t>(a));
    for (int i = 0; i < k; ++i) {
        Bits ui(static_cast<std::size_t>(n));
        for (int a = 0; a < us; ++a)
            ui.set(static_cast<std::size_t>(a));
        out.u.push_back({i, ui});
    }

    std::vector<Edge> order = cross_pairs(pattern, n, us);
    Rng rng(derive_seed(seed, 0));
    rng.shuffle(order);
    for (const auto& [x, y] : order) {
        if (out.edges_added >= budget)
            break;
        // The new edge closes a cycle in G - U iff the rest of the cycle already exists there
        // as a path from one endpoint around to the other.
        VertexId from = x, to = y;
        if (pattern.next(x.part) == y.part)
            std::swap(from, to);
        VertexSetFamily f;
        for (int q = from.part;; q = pattern.next(q)) {
            Bits set = outside;
            if (q == from.part)
                set = make_bits(static_cast<std::size_t>(n), {from.idx});
            else if (q == to.part)
                set = make_bits(static_cast<std::size_t>(n), {to.idx});
            f.push_back({q, set});
            if (q == to.part)
                break;
        }
        if (!find_transversal_path(b.view(), from.part, to.part, f)) {
            b.add_edge(x, y);
            ++out.edges_added;
        }
    }
    out.graph = std::move(b).build();
    return out;
}

HostGraph read_host_edges(const std::string& path, int vertices)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot read host edge list " + path);
    HostGraph h;
    std::string line;
    int lineno = 0, top = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::istringstream ss(line);
        int u = 0, v = 0;
        if (!(ss >> u >> v) || u < 0 || v < 0)
            throw Error(path + ":" + std::to_string(lineno) + ": expected 'u v'");
        h.edges.emplace_back(u, v);
        top = std::max({top, u, v});
    }
    h.vertices = vertices > 0 ? vertices : top + 1;
    if (top >= h.vertices)
        throw Error("host edge list references a vertex beyond the declared count");
    return h;
}

PartiteGraph random_k_split(const HostGraph& host, const Pattern& pattern, std::uint64_t seed)
{
    const int k = pattern.k();
    if (host.vertices <= 0 || host.vertices % k != 0)
        throw Error("host vertex count not divisible by k");
    const int n = host.vertices / k;
    Rng rng(derive_seed(seed, 0));
    auto perm = rng.permutation(host.vertices);
    // Host vertex perm[t] becomes vertex t % n of part t / n.
    std::vector<VertexId> place(static_cast<std::size_t>(host.vertices));
    for (int t = 0; t < host.vertices; ++t)
        place[static_cast<std::size_t>(perm[static_cast<std::size_t>(t)])] = {t / n, t % n};
    PartiteGraphBuilder b(pattern, n);
    for (auto [u, v] : host.edges) {
        if (u < 0 || v < 0 || u >= host.vertices || v >= host.vertices)
            throw Error("host edge out of range");
        if (u == v)
            throw Error("host edge list contains a self-loop");
        VertexId a = place[static_cast<std::size_t>(u)], c = place[static_cast<std::size_t>(v)];
        if (a.part != c.part && pattern.adjacent(a.part, c.part))
            b.add_edge(a, c);
    }
    return std::move(b).build();
}

namespace {

const char* family_name(Family f)
{
    switch (f) {
    case Family::complete: return "complete";
    case Family::random_subgraph: return "random_subgraph";
    case Family::hole_suppressed: return "hole_suppressed";
    case Family::space_barrier: return "space_barrier";
    case Family::random_split: return "random_split";
    }
    return "";
}

} // namespace

GenSpec gen_spec_from_json(const json& doc)
{
    if (!doc.is_object())
        throw Error("generator spec must be an object");
    GenSpec s;
    auto fam = doc.value("family", std::string("complete"));
    if (fam == "complete")
        s.family = Family::complete;
    else if (fam == "random_subgraph")
        s.family = Family::random_subgraph;
    else if (fam == "hole_suppressed")
        s.family = Family::hole_suppressed;
    else if (fam == "space_barrier")
        s.family = Family::space_barrier;
    else if (fam == "random_split")
        s.family = Family::random_split;
    else
        throw Error("unknown generator family '" + fam + "'");
    if (doc.contains("pattern"))
        s.pattern = pattern_from_json(doc.at("pattern"));
    else if (s.family == Family::space_barrier)
        s.pattern = Pattern::cycle(doc.value("k", 4));
    s.n = doc.value("n", 1);
    s.seed = doc.value("seed", std::uint64_t{0});
    s.p = doc.value("p", 1.0);
    s.r = doc.value("r", 2);
    s.target_s = doc.value("target_s", 1);
    if (doc.contains("budget"))
        s.budget = doc.at("budget").get<std::size_t>();
    s.host = doc.value("host", std::string());
    s.host_vertices = doc.value("host_vertices", 0);
    if (s.family != Family::random_split && s.n < 1)
        throw Error("part size n must be at least 1");
    if (s.p < 0.0 || s.p > 1.0)
        throw Error("keep-probability must lie in [0, 1]");
    if (s.family == Family::space_barrier) {
        if (!s.pattern.is_cycle() || s.pattern.k() < 4)
            throw Error("space barrier needs a cycle pattern with k >= 4");
        if (s.n % s.pattern.k() != 0)
            throw Error("part size not divisible");
    }
    if (s.family == Family::random_split && s.host.empty())
        throw Error("random_split needs a host edge list");
    return s;
}

json gen_spec_to_json(const GenSpec& s)
{
    json out = {{"family", family_name(s.family)}, {"pattern", pattern_to_json(s.pattern)}, {"n", s.n}, {"seed", s.seed}};
    switch (s.family) {
    case Family::random_subgraph: out["p"] = s.p; break;
    case Family::hole_suppressed:
        out["r"] = s.r;
        out["target_s"] = s.target_s;
        break;
    case Family::random_split:
        out["host"] = s.host;
        out["host_vertices"] = s.host_vertices;
        break;
    default: break;
    }
    if (s.budget != static_cast<std::size_t>(-1))
        out["budget"] = s.budget;
    return out;
}

Generated generate(const GenSpec& s)
{
    switch (s.family) {
    case Family::complete: return {complete_blowup(s.pattern, s.n), std::nullopt, json::object()};
    case Family::random_subgraph:
        return {random_spanning_subgraph(complete_blowup(s.pattern, s.n), s.p, s.seed), std::nullopt, json::object()};
    case Family::hole_suppressed: {
        HoleProcessOptions opt;
        opt.budget = s.budget;
        auto r = hole_suppressed_process(s.pattern, s.n, s.r, s.target_s, s.seed, opt);
        json rep = {{"edges_added", r.edges_added}, {"certified", r.certified}, {"regime", r.regime}};
        return {std::move(r.graph), std::nullopt, rep};
    }
    case Family::space_barrier: {
        auto sb = space_barrier(s.pattern.k(), s.n, s.seed, s.budget);
        json rep = {{"edges_added", sb.edges_added}};
        return {std::move(sb.graph), std::move(sb.u), rep};
    }
    case Family::random_split:
        return {random_k_split(read_host_edges(s.host, s.host_vertices), s.pattern, s.seed), std::nullopt,
                json::object()};
    }
    throw Error("unknown generator family");
}

} // namespace ptile
