#include <doctest.h>

#include "ptile/absorbing_set.hpp"
#include "ptile/error.hpp"
#include "ptile/generators.hpp"
#include "ptile/holes.hpp"

using namespace ptile;

namespace {

void check_construction(const PartiteGraph& g, const AbsorbingSet& as)
{
    const int k = g.k();
    CHECK(as.r.is_balanced());
    VertexSet xyz = VertexSet::empty_of(g);
    for (int i = 0; i < k; ++i) {
        CHECK(static_cast<int>(as.x[static_cast<std::size_t>(i)].size()) == as.m + as.beta_m);
        CHECK(static_cast<int>(as.y[static_cast<std::size_t>(i)].size()) == 2 * as.m);
        for (int a : as.x[static_cast<std::size_t>(i)])
            xyz.insert({i, a});
        for (int a : as.y[static_cast<std::size_t>(i)])
            xyz.insert({i, a});
        for (int j = 0; j < k; ++j)
            for (int a : as.z[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                xyz.insert({i, a});
        CHECK(verify_template(as.templates[static_cast<std::size_t>(i)]).ok);
        CHECK(static_cast<int>(as.zsets[static_cast<std::size_t>(i)].size()) == 3 * as.m);
    }
    CHECK(static_cast<int>(xyz.size()) == k * (as.m + as.beta_m + 2 * as.m + 3 * as.m * (k - 1)));
    std::size_t edges = 0;
    for (const auto& t : as.templates)
        edges += t.edges.size();
    CHECK(as.absorbers.size() == edges);
    VertexSet seen = xyz;
    for (const auto& e : as.absorbers) {
        validate_absorber(g, e.absorber);
        for (auto v : e.absorber.set) {
            CHECK_FALSE(seen.contains(v));
            seen.insert(v);
        }
        auto target = e.absorber.target;
        CHECK(std::find(target.begin(), target.end(), as.left_vertex(e.part, e.left)) != target.end());
    }
    CHECK(seen == as.r);
}

} // namespace

TEST_CASE("build_absorbing_set on the complete blow-up")
{
    auto g = complete_blowup(Pattern::complete(3), 120);
    AbsorbingParams p;
    p.m = 1;
    p.beta_m = 2;
    p.q = 0.5;
    p.seed = 3;
    p.gamma = 3.0;
    auto as = build_absorbing_set(g, p);
    check_construction(g, as);
    CHECK(as.capacity == 1);
    CHECK(as.xi == doctest::Approx(3.0 / 120));

    auto v = verify_absorbing_property(g, as, as.xi, 40, 9, {1, 0});
    CHECK(v.pass);
    CHECK(v.random_trials == 40);
    CHECK(v.constructive == 40);

    VertexSet u = VertexSet::empty_of(g);
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 120; ++a)
            if (!as.r.contains({i, a})) {
                u.insert({i, a});
                break;
            }
    auto r = absorb(g, as, u);
    CHECK(r.ok);
    CHECK(is_factor_of(g, *r.factor, as.r | u));

    auto again = build_absorbing_set(g, p);
    CHECK(absorbing_set_to_json(g, again).dump() == absorbing_set_to_json(g, as).dump());
}

TEST_CASE("build_absorbing_set with m = 2, beta_m = 1, q = 1/6")
{
    auto g = complete_blowup(Pattern::complete(3), 180);
    AbsorbingParams p;
    p.m = 2;
    p.beta_m = 1;
    p.seed = 1;
    auto as = build_absorbing_set(g, p);
    check_construction(g, as);
    // beta_m < k - 1 leaves no room to absorb even one vertex per part.
    CHECK(as.capacity == 0);
    CHECK_THROWS_AS(verify_absorbing_property(g, as, as.xi, 10, 1), Error);
}

TEST_CASE("build_absorbing_set errors name the stage")
{
    auto g = complete_blowup(Pattern::complete(3), 120);
    AbsorbingParams p;
    p.m = 2;
    p.beta_m = 1;
    p.q = 0.02;
    CHECK_THROWS_WITH_AS(build_absorbing_set(g, p), doctest::Contains("stage (i) sample"), Error);

    auto empty = PartiteGraphBuilder(Pattern::complete(3), 40).build();
    AbsorbingParams e;
    e.m = 1;
    e.beta_m = 2;
    e.q = 0.5;
    CHECK_THROWS_WITH_AS(build_absorbing_set(empty, e), doctest::Contains("stage fan"), Error);

    auto small = complete_blowup(Pattern::complete(3), 10);
    CHECK_THROWS_WITH_AS(build_absorbing_set(small, e), doctest::Contains("stage (ii) reserve"), Error);

    auto mid = complete_blowup(Pattern::complete(3), 60);
    CHECK_THROWS_WITH_AS(build_absorbing_set(mid, e), doctest::Contains("stage (v) absorbers"), Error);

    AbsorbingParams tight = e;
    tight.gamma = 1.0;
    CHECK_THROWS_WITH_AS(build_absorbing_set(g, tight), doctest::Contains("stage (v) size"), Error);
    CHECK_THROWS_AS(build_absorbing_set(complete_blowup(Pattern::cycle(4), 40), e), Error);
}

TEST_CASE("verify_absorbing_property detects a vertex that cannot be covered")
{
    PartiteGraphBuilder b(complete_blowup(Pattern::complete(3), 6));
    for (int j : {1, 2})
        for (int a = 0; a < 6; ++a)
            b.remove_edge({0, 0}, {j, a});
    auto g = std::move(b).build();
    AbsorbingSet none;
    none.r = VertexSet::empty_of(g);
    VertexSet u = VertexSet::of(g, std::vector<VertexId>{{0, 0}, {1, 0}, {2, 0}});
    auto r = absorb(g, none, u);
    CHECK_FALSE(r.ok);
    CHECK(r.method == "exact");

    auto v = verify_absorbing_property(g, none, 0.5, 0, 1);
    CHECK_FALSE(v.pass);
    CHECK(v.proof);
    REQUIRE(v.failing_u);
    CHECK(v.failing_u->contains({0, 0}));
    CHECK_THROWS_AS(verify_absorbing_property(g, none, 0.1, 5, 1), Error);
}

TEST_CASE("absorbing set on a dense instance with certified small holes")
{
    auto g = random_spanning_subgraph(complete_blowup(Pattern::complete(3), 170), 0.9, 101);
    CHECK(2 * delta_star(g) > g.n());
    CHECK(alpha2_degree_bound(g) * 4 < g.n());
    AbsorbingParams p;
    p.m = 1;
    p.beta_m = 4;
    p.q = 0.5;
    p.seed = 1;
    auto as = build_absorbing_set(g, p);
    check_construction(g, as);
    CHECK(as.capacity == 2);
    auto v = verify_absorbing_property(g, as, as.xi, 60, 2, {1, 0});
    CHECK(v.pass);
    CHECK(v.random_trials == 60);
    CHECK(absorb_verdict_to_json(v)["pass"] == true);
}

TEST_CASE("a too small X is caught by the exhaustive check")
{
    // |X_i| = 3: some pair of U vertices reaches X only through one shared vertex.
    auto g = random_spanning_subgraph(complete_blowup(Pattern::complete(3), 140), 0.9, 101);
    AbsorbingParams p;
    p.m = 1;
    p.beta_m = 2;
    p.q = 0.5;
    p.seed = 1;
    auto as = build_absorbing_set(g, p);
    auto v = verify_absorbing_property(g, as, as.xi, 0, 2, {1, 200000});
    CHECK(v.exhaustive_trials > 0);
    CHECK_FALSE(v.pass);
    CHECK_FALSE(v.proof);
    REQUIRE(v.failing_u);
    CHECK(v.failing_u->size() == 3);
    CHECK_FALSE(absorb(g, as, *v.failing_u).ok);
}

TEST_CASE("alpha2_degree_bound dominates the exact value")
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto g = random_spanning_subgraph(complete_blowup(Pattern::complete(3), 5), 0.6, seed);
        CHECK(alpha_star_exact(g, 2).alpha <= alpha2_degree_bound(g));
    }
    CHECK(alpha2_degree_bound(complete_blowup(Pattern::complete(3), 5)) == 0);
}
