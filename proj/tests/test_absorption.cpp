#include <doctest.h>

#include "oracles.hpp"
#include "ptile/absorption.hpp"
#include "ptile/error.hpp"
#include "ptile/generators.hpp"
#include "ptile/holes.hpp"
#include "ptile/rng.hpp"

using namespace ptile;

namespace {

PartiteGraph random_clique_graph(Rng& rng, int k, int n, double p)
{
    return random_spanning_subgraph(complete_blowup(Pattern::complete(k), n), p, rng.next());
}

std::vector<VertexId> to_list(const VertexSet& s) { return s.vertices(); }

} // namespace

TEST_CASE("find_fan examples")
{
    auto g = complete_blowup(Pattern::complete(3), 4);
    auto f = find_fan(g, {1, 2});
    CHECK(f.sets.size() == 4);
    CHECK(f.exact);
    validate_fan(g, f);
    CHECK(find_fan(g, {1, 2}, 2).sets.size() == 2);

    PartiteGraphBuilder b(complete_blowup(Pattern::complete(3), 4));
    for (int j : {1, 2})
        for (int a = 0; a < 4; ++a)
            b.remove_edge({0, 0}, {j, a});
    auto iso = std::move(b).build();
    CHECK(find_fan(iso, {0, 0}).sets.empty());

    auto k4 = complete_blowup(Pattern::complete(4), 5);
    CHECK(find_fan(k4, {3, 1}).sets.size() == 5);
    CHECK_THROWS_AS(find_fan(complete_blowup(Pattern::cycle(4), 2), {0, 0}), Error);
}

TEST_CASE("find_fan equals the maximum packing")
{
    Rng rng(31);
    for (int trial = 0; trial < 150; ++trial) {
        int k = 3 + rng.below(2), n = 2 + rng.below(k == 3 ? 4 : 3);
        auto g = random_clique_graph(rng, k, n, 0.45 + 0.4 * rng.unit());
        VertexId v{rng.below(k), rng.below(n)};
        auto f = find_fan(g, v);
        validate_fan(g, f);
        CHECK(f.exact);
        CHECK(static_cast<int>(f.sets.size()) == oracle::max_fan(g, v));
    }
}

TEST_CASE("find_fan greedy mode and restriction")
{
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = random_clique_graph(rng, 4, kFanExactCap + 2, 0.7);
        VertexSet within = VertexSet::full_of(g);
        for (int i = 0; i < 4; ++i)
            within.part(i).reset(static_cast<std::size_t>(rng.below(g.n())));
        VertexId v{rng.below(4), rng.below(g.n())};
        auto f = find_fan(g, v, -1, within);
        CHECK_FALSE(f.exact);
        validate_fan(g, f);
        for (const auto& s : f.sets)
            for (auto x : s)
                CHECK(within.contains(x));
    }
}

TEST_CASE("find_connector examples")
{
    auto g = complete_blowup(Pattern::complete(3), 4);
    VertexSet none = VertexSet::empty_of(g);
    auto c1 = find_connector(g, {0, 0}, {0, 1}, none, 1);
    REQUIRE(c1);
    CHECK(c1->set.size() == 2);
    validate_connector(g, *c1);
    auto c2 = find_connector(g, {0, 0}, {0, 1}, none, 2);
    REQUIRE(c2);
    CHECK(c2->set.size() == 5);
    validate_connector(g, *c2);

    // u sees only index 0 and v only index 1 in parts 2 and 3.
    PartiteGraphBuilder b(Pattern::complete(3), 3);
    for (int j : {1, 2}) {
        b.add_edge({0, 0}, {j, 0});
        b.add_edge({0, 1}, {j, 1});
    }
    for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c)
            b.add_edge({1, a}, {2, c});
    auto apart = std::move(b).build();
    CHECK_FALSE(find_connector(apart, {0, 0}, {0, 1}, VertexSet::empty_of(apart), 1));
    CHECK_FALSE(exhaustive_connector(apart, {0, 0}, {0, 1}, VertexSet::empty_of(apart), 1));

    CHECK_THROWS_AS(find_connector(g, {0, 0}, {1, 1}, none, 1), Error);
    CHECK_THROWS_AS(find_connector(g, {0, 0}, {0, 0}, none, 1), Error);
    CHECK_THROWS_AS(find_connector(g, {0, 0}, {0, 1}, none, 3), Error);
}

TEST_CASE("connector searches agree with brute force")
{
    Rng rng(8);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 3 + rng.below(2);
        auto g = random_clique_graph(rng, 3, n, 0.4 + 0.5 * rng.unit());
        VertexId u{rng.below(3), rng.below(n)};
        VertexId v{u.part, (u.idx + 1 + rng.below(n - 1)) % n};
        VertexSet w = VertexSet::empty_of(g);
        for (int c = rng.below(3); c > 0; --c) {
            VertexId x{rng.below(3), rng.below(n)};
            if (x != u && x != v)
                w.insert(x);
        }
        auto wl = to_list(w);
        for (int t : {1, 2}) {
            bool truth = oracle::connector_exists(g, u, v, wl, t);
            auto e = exhaustive_connector(g, u, v, w, t);
            CHECK(e.has_value() == truth);
            if (t == 1)
                CHECK(find_connector(g, u, v, w, 1).has_value() == truth);
            for (const auto& c : {e, find_connector(g, u, v, w, t)}) {
                if (!c)
                    continue;
                validate_connector(g, *c);
                for (auto x : c->set)
                    CHECK_FALSE(w.contains(x));
            }
        }
    }
}

TEST_CASE("t = 1 connectors exist when common neighbourhoods exceed the hole number")
{
    // If every S_j is larger than alpha*_{k-1}, the S_j cannot form a hole, so a K_{k-1} exists.
    Rng rng(12);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 8;
        auto g = random_clique_graph(rng, 3, n, 0.85);
        if (2 * delta_star(g) <= n)
            continue;
        const int alpha = alpha_star_exact(g, 2).alpha;
        VertexId u{rng.below(3), rng.below(n)};
        VertexId v{u.part, (u.idx + 1) % n};
        VertexSet w = VertexSet::empty_of(g);
        w.insert({(u.part + 1) % 3, rng.below(n)}); // |W| = 1 <= beta n
        int smallest = n;
        for (int j = 0; j < 3; ++j)
            if (j != u.part)
                smallest = std::min<int>(smallest, static_cast<int>(
                    ((g.neighbors(u, j) & g.neighbors(v, j)) - w.part(j)).count()));
        if (smallest <= alpha)
            continue;
        ++checked;
        auto c = find_connector(g, u, v, w, 1);
        REQUIRE(c);
        validate_connector(g, *c);
    }
    CHECK(checked >= 10);
}

TEST_CASE("is_reachable examples")
{
    auto g = complete_blowup(Pattern::complete(3), 6);
    auto r = is_reachable(g, {0, 0}, {0, 1}, 2, 1, 30, 5);
    CHECK(r.pass);
    CHECK(r.tested > 1);

    PartiteGraphBuilder b(complete_blowup(Pattern::complete(3), 4));
    for (int j : {1, 2})
        for (int a = 0; a < 4; ++a)
            b.remove_edge({0, 0}, {j, a});
    auto iso = std::move(b).build();
    for (int t : {1, 2}) {
        auto f = is_reachable(iso, {0, 0}, {0, 1}, 3, t, 10, 1);
        CHECK_FALSE(f.pass);
        REQUIRE(f.defeating_w);
        CHECK(f.defeating_w->empty());
        CHECK(f.proof);
    }
}

TEST_CASE("is_reachable matches exhaustive W enumeration")
{
    Rng rng(21);
    int fails = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 3 + rng.below(2);
        auto g = random_clique_graph(rng, 3, n, 0.55 + 0.4 * rng.unit());
        VertexId u{rng.below(3), rng.below(n)};
        VertexId v{u.part, (u.idx + 1) % n};
        const int m = 1 + rng.below(2), t = 1 + rng.below(2);
        std::vector<VertexId> pool;
        for (int f = 0; f < 3 * n; ++f)
            if (g.unflat(f) != u && g.unflat(f) != v)
                pool.push_back(g.unflat(f));
        bool truth = true;
        for (int size = 0; size <= m && truth; ++size)
            for (const auto& sub : oracle::subsets_of_size(static_cast<int>(pool.size()), size)) {
                std::vector<VertexId> w;
                for (int i : sub)
                    w.push_back(pool[static_cast<std::size_t>(i)]);
                if (!oracle::connector_exists(g, u, v, w, t)) {
                    truth = false;
                    break;
                }
            }
        auto r = is_reachable(g, u, v, m, t, 200, rng.next());
        CHECK(r.exhaustive);
        CHECK(r.pass == truth);
        if (!r.pass) {
            ++fails;
            CHECK(r.proof);
            CHECK_FALSE(oracle::connector_exists(g, u, v, to_list(*r.defeating_w), t));
        }
    }
    CHECK(fails > 0);
}

TEST_CASE("find_absorber examples")
{
    for (int k : {3, 4}) {
        // t = 2 connectors need 2k vertices per part besides the target.
        auto g = complete_blowup(Pattern::complete(k), 2 * k + 1);
        std::vector<VertexId> s;
        for (int i = 0; i < k; ++i)
            s.push_back({i, 0});
        auto a = find_absorber(g, s, VertexSet::empty_of(g));
        REQUIRE(a);
        CHECK(static_cast<int>(a->set.size()) <= 2 * k * k);
        CHECK(a->t == 2 * k);
        validate_absorber(g, *a);

        AbsorberOptions two;
        two.connector_t = 2;
        auto b = find_absorber(g, s, VertexSet::empty_of(g), two);
        REQUIRE(b);
        CHECK(static_cast<int>(b->set.size()) == k + k * (2 * k - 1));
        validate_absorber(g, *b);
    }

    PartiteGraphBuilder b(complete_blowup(Pattern::complete(3), 6));
    for (int j : {1, 2})
        for (int a = 0; a < 6; ++a)
            b.remove_edge({0, 0}, {j, a});
    auto iso = std::move(b).build();
    CHECK_FALSE(find_absorber(iso, {{0, 0}, {1, 0}, {2, 0}}, VertexSet::empty_of(iso)));
    CHECK_THROWS_AS(find_absorber(iso, {{0, 0}, {0, 1}, {2, 0}}, VertexSet::empty_of(iso)), Error);
}

TEST_CASE("disjoint_absorbers")
{
    auto g = complete_blowup(Pattern::complete(3), 12);
    std::vector<VertexId> s{{0, 0}, {1, 0}, {2, 0}};
    // Each absorber built from t = 1 connectors takes 3 vertices per part; 11 remain per part.
    auto all = disjoint_absorbers(g, s, -1);
    CHECK(all.size() == 3);
    VertexSet seen = VertexSet::of(g, s);
    for (const auto& a : all) {
        validate_absorber(g, a);
        for (auto x : a.set) {
            CHECK_FALSE(seen.contains(x));
            seen.insert(x);
        }
    }
    CHECK(disjoint_absorbers(g, s, 2).size() == 2);

    auto empty = PartiteGraphBuilder(Pattern::complete(3), 12).build();
    CHECK(disjoint_absorbers(empty, s, -1).empty());
    VertexSet rest = VertexSet::full_of(g) - VertexSet::of(g, s);
    CHECK(disjoint_absorbers(g, s, -1, rest).empty());
}

TEST_CASE("disjoint absorbers on a dense instance with small holes")
{
    // delta* > 0.55 n and alpha*_2 certified exactly; tau = 1/4 asks for ceil(n / 4) absorbers.
    Rng rng(77);
    int instances = 0;
    for (int trial = 0; trial < 30 && instances < 5; ++trial) {
        const int n = 12;
        auto g = random_clique_graph(rng, 3, n, 0.9);
        if (delta_star(g) * 100 <= 55 * n || alpha_star_exact(g, 2, n).alpha > 2)
            continue;
        ++instances;
        std::vector<VertexId> s{{0, rng.below(n)}, {1, rng.below(n)}, {2, rng.below(n)}};
        auto fam = disjoint_absorbers(g, s, -1);
        CHECK(static_cast<int>(fam.size()) >= (n + 3) / 4);
        for (const auto& a : fam)
            validate_absorber(g, a);
    }
    CHECK(instances == 5);
}

TEST_CASE("absorbers on random instances validate")
{
    Rng rng(90);
    int found = 0;
    for (int trial = 0; trial < 60; ++trial) {
        int k = 3 + rng.below(2), n = 2 * k + rng.below(4);
        auto g = random_clique_graph(rng, k, n, 0.6 + 0.35 * rng.unit());
        std::vector<VertexId> s;
        for (int i = 0; i < k; ++i)
            s.push_back({i, rng.below(n)});
        AbsorberOptions opt;
        opt.connector_t = rng.below(3);
        opt.connector.seed = rng.next();
        for (const auto& a : disjoint_absorbers(g, s, 3, opt)) {
            ++found;
            validate_absorber(g, a);
            CHECK(static_cast<int>(a.set.size()) <= k * a.t);
            for (const auto& c : a.connectors) {
                validate_connector(g, c);
                CHECK(static_cast<int>(c.set.size()) <= k * c.t - 1);
            }
        }
    }
    CHECK(found > 30);
}

TEST_CASE("absorption JSON")
{
    auto g = complete_blowup(Pattern::complete(3), 6);
    auto a = find_absorber(g, {{0, 0}, {1, 0}, {2, 0}}, VertexSet::empty_of(g));
    REQUIRE(a);
    auto j = absorber_to_json(g, *a);
    CHECK(j["target"][0] == nlohmann::json::array({1, 0}));
    CHECK(j["connectors"].size() == 3);
    CHECK(fan_to_json(find_fan(g, {0, 0}))["size"] == 6);
    CHECK(reach_verdict_to_json(is_reachable(g, {0, 0}, {0, 1}, 1, 1, 5, 1))["pass"] == true);
}
