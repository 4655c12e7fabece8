#include "ptile/partite_graph.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>

#include "ptile/error.hpp"

namespace ptile {

using nlohmann::json;

PartiteGraph::PartiteGraph(Pattern pattern, int n) : pattern_(std::move(pattern)), n_(n)
{
    if (n < 1)
        throw Error("part size must be positive");
    adj_.assign(static_cast<std::size_t>(k() * n * k()), Bits(static_cast<std::size_t>(n)));
}

bool PartiteGraph::has_edge(VertexId a, VertexId b) const
{
    if (!contains(a) || !contains(b) || a.part == b.part)
        return false;
    return neighbors(a, b.part).test(static_cast<std::size_t>(b.idx));
}

int PartiteGraph::degree(VertexId v) const
{
    int d = 0;
    for (int q : pattern_.neighbors(v.part))
        d += degree(v, q);
    return d;
}

std::size_t PartiteGraph::edge_count() const
{
    std::size_t total = 0;
    for (auto [i, j] : pattern_.edges())
        for (int a = 0; a < n_; ++a)
            total += neighbors({i, a}, j).count();
    return total;
}

std::vector<std::pair<VertexId, VertexId>> PartiteGraph::edges() const
{
    std::vector<std::pair<VertexId, VertexId>> out;
    for (int p = 0; p < k(); ++p)
        for (int a = 0; a < n_; ++a)
            for (int q : pattern_.neighbors(p))
                if (q > p)
                    for_each_bit(neighbors({p, a}, q), [&](int b) { out.push_back({{p, a}, {q, b}}); });
    std::sort(out.begin(), out.end(), [&](const auto& x, const auto& y) {
        return std::pair(flat(x.first), flat(x.second)) < std::pair(flat(y.first), flat(y.second));
    });
    return out;
}

void PartiteGraphBuilder::check_pair(VertexId a, VertexId b) const
{
    if (!graph_.contains(a) || !graph_.contains(b))
        throw Error("vertex out of range");
    if (a.part == b.part)
        throw Error("edge inside a part");
    if (!graph_.pattern().adjacent(a.part, b.part))
        throw Error("edge across non-adjacent parts");
}

void PartiteGraphBuilder::add_edge(VertexId a, VertexId b)
{
    check_pair(a, b);
    graph_.adj_[graph_.row(a, b.part)].set(static_cast<std::size_t>(b.idx));
    graph_.adj_[graph_.row(b, a.part)].set(static_cast<std::size_t>(a.idx));
}

void PartiteGraphBuilder::remove_edge(VertexId a, VertexId b)
{
    check_pair(a, b);
    graph_.adj_[graph_.row(a, b.part)].reset(static_cast<std::size_t>(b.idx));
    graph_.adj_[graph_.row(b, a.part)].reset(static_cast<std::size_t>(a.idx));
}

VertexSet VertexSet::full_of(const PartiteGraph& g)
{
    VertexSet s(g.k(), g.n());
    for (int i = 0; i < g.k(); ++i)
        s.part(i).set();
    return s;
}

VertexSet VertexSet::of(const PartiteGraph& g, std::span<const VertexId> vs)
{
    VertexSet s(g.k(), g.n());
    for (auto v : vs) {
        if (!g.contains(v))
            throw Error("vertex out of range");
        s.insert(v);
    }
    return s;
}

std::size_t VertexSet::size() const
{
    std::size_t t = 0;
    for (const auto& b : parts_)
        t += b.count();
    return t;
}

bool VertexSet::is_balanced() const
{
    for (int i = 1; i < k(); ++i)
        if (part_size(i) != part_size(0))
            return false;
    return true;
}

std::vector<VertexId> VertexSet::vertices() const
{
    std::vector<VertexId> out;
    for (int i = 0; i < k(); ++i)
        for_each_bit(part(i), [&](int a) { out.push_back({i, a}); });
    return out;
}

VertexSet& VertexSet::operator|=(const VertexSet& o)
{
    for (std::size_t i = 0; i < parts_.size(); ++i)
        parts_[i] |= o.parts_[i];
    return *this;
}

VertexSet& VertexSet::operator&=(const VertexSet& o)
{
    for (std::size_t i = 0; i < parts_.size(); ++i)
        parts_[i] &= o.parts_[i];
    return *this;
}

VertexSet& VertexSet::operator-=(const VertexSet& o)
{
    for (std::size_t i = 0; i < parts_.size(); ++i)
        parts_[i] -= o.parts_[i];
    return *this;
}

bool VertexSet::intersects(const VertexSet& o) const
{
    for (std::size_t i = 0; i < parts_.size(); ++i)
        if (parts_[i].intersects(o.parts_[i]))
            return true;
    return false;
}

std::vector<std::uint64_t> VertexSet::key() const
{
    std::vector<std::uint64_t> out;
    for (const auto& b : parts_)
        boost::to_block_range(b, std::back_inserter(out));
    return out;
}

void validate_family(const PartiteGraph& g, const VertexSetFamily& family)
{
    std::vector<bool> seen(static_cast<std::size_t>(g.k()), false);
    for (const auto& entry : family) {
        if (entry.part < 0 || entry.part >= g.k())
            throw Error("family part out of range");
        if (entry.set.size() != static_cast<std::size_t>(g.n()))
            throw Error("family subset has wrong width");
        if (seen[static_cast<std::size_t>(entry.part)])
            throw Error("family repeats a part");
        seen[static_cast<std::size_t>(entry.part)] = true;
    }
}

int delta_star(const PartiteGraph& g)
{
    if (g.pattern().edges().empty())
        throw Error("empty pattern");
    int best = std::numeric_limits<int>::max();
    for (auto [i, j] : g.pattern().edges())
        for (int a = 0; a < g.n(); ++a) {
            best = std::min(best, g.degree({i, a}, j));
            best = std::min(best, g.degree({j, a}, i));
        }
    return best;
}

bool is_transversal_copy(const PartiteGraph& g, std::span<const VertexId> tuple)
{
    if (static_cast<int>(tuple.size()) != g.k())
        return false;
    std::vector<int> at(static_cast<std::size_t>(g.k()), -1);
    for (auto v : tuple) {
        if (!g.contains(v) || at[static_cast<std::size_t>(v.part)] != -1)
            return false;
        at[static_cast<std::size_t>(v.part)] = v.idx;
    }
    for (auto [i, j] : g.pattern().edges())
        if (!g.has_edge({i, at[static_cast<std::size_t>(i)]}, {j, at[static_cast<std::size_t>(j)]}))
            return false;
    return true;
}

Rational density(const PartiteGraph& g, const VertexSet& x, const VertexSet& y)
{
    if (x.empty() || y.empty())
        throw Error("empty side");
    if (x.intersects(y))
        throw Error("sides overlap");
    std::int64_t e = 0;
    for (auto v : x.vertices())
        for (int q = 0; q < g.k(); ++q)
            e += static_cast<std::int64_t>((g.neighbors(v, q) & y.part(q)).count());
    return Rational(e, static_cast<std::int64_t>(x.size() * y.size()));
}

Bits common_neighborhood(const PartiteGraph& g, std::span<const VertexId> s, int target)
{
    if (target < 0 || target >= g.k())
        throw Error("target part out of range");
    Bits out = full_bits(static_cast<std::size_t>(g.n()));
    for (auto v : s) {
        if (!g.contains(v))
            throw Error("vertex out of range");
        if (!g.pattern().adjacent(v.part, target))
            throw Error("non-adjacent part");
        out &= g.neighbors(v, target);
    }
    return out;
}

json pattern_to_json(const Pattern& p)
{
    json edges = json::array();
    for (auto [a, b] : p.edges())
        edges.push_back({a + 1, b + 1});
    return {{"k", p.k()}, {"edges", edges}};
}

Pattern pattern_from_json(const json& doc)
{
    if (doc.is_string()) {
        // Shorthand "K4" / "C5".
        auto s = doc.get<std::string>();
        if (s.size() >= 2 && (s[0] == 'K' || s[0] == 'C')) {
            int k = std::stoi(s.substr(1));
            return s[0] == 'K' ? Pattern::complete(k) : Pattern::cycle(k);
        }
        throw Error("unknown pattern shorthand '" + s + "'");
    }
    int k = doc.at("k").get<int>();
    auto type = doc.value("type", std::string("custom"));
    if (type == "complete")
        return Pattern::complete(k);
    if (type == "cycle")
        return Pattern::cycle(k);
    if (type != "custom")
        throw Error("unknown pattern type '" + type + "'");
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : doc.at("edges"))
        edges.emplace_back(e.at(0).get<int>() - 1, e.at(1).get<int>() - 1);
    return Pattern(k, std::move(edges));
}

json graph_to_json(const PartiteGraph& g)
{
    json pe = json::array();
    for (auto [a, b] : g.pattern().edges())
        pe.push_back({a + 1, b + 1});
    json edges = json::array();
    for (auto [a, b] : g.edges())
        edges.push_back({a.part + 1, a.idx, b.part + 1, b.idx});
    return {{"format", "ptg-v1"}, {"k", g.k()}, {"n", g.n()}, {"pattern_edges", pe}, {"edges", edges}};
}

PartiteGraph graph_from_json(const json& doc)
{
    if (doc.value("format", std::string()) != "ptg-v1")
        throw Error("unsupported graph format (expected ptg-v1)");
    int k = doc.at("k").get<int>();
    int n = doc.at("n").get<int>();
    std::vector<std::pair<int, int>> pe;
    for (const auto& e : doc.at("pattern_edges"))
        pe.emplace_back(e.at(0).get<int>() - 1, e.at(1).get<int>() - 1);
    PartiteGraphBuilder b(Pattern(k, std::move(pe)), n);
    std::set<std::pair<int, int>> seen;
    for (const auto& e : doc.at("edges")) {
        if (!e.is_array() || e.size() != 4)
            throw Error("edge entries must be [part, idx, part, idx]");
        VertexId u{e[0].get<int>() - 1, e[1].get<int>()};
        VertexId v{e[2].get<int>() - 1, e[3].get<int>()};
        b.add_edge(u, v);
        int fu = b.view().flat(u), fv = b.view().flat(v);
        if (!seen.insert({std::min(fu, fv), std::max(fu, fv)}).second)
            throw Error("edge listed twice");
    }
    return std::move(b).build();
}

void save_graph(const PartiteGraph& g, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    out << graph_to_json(g).dump() << '\n';
}

PartiteGraph load_graph(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot read " + path);
    json doc;
    try {
        in >> doc;
    }
    catch (const json::exception& e) {
        throw Error("malformed graph file " + path + ": " + e.what());
    }
    return graph_from_json(doc);
}

json vertex_to_json(VertexId v) { return {v.part + 1, v.idx}; }

VertexId vertex_from_json(const json& doc) { return {doc.at(0).get<int>() - 1, doc.at(1).get<int>()}; }

json vertex_set_to_json(const VertexSet& s)
{
    json out = json::array();
    for (int i = 0; i < s.k(); ++i)
        out.push_back(bits_to_vector(s.part(i)));
    return out;
}

} // namespace ptile
