// Acceptance harness: one PASS/FAIL line per criterion. Each criterion also writes a JSON
// report (no timings) so that a second in-process run can be compared byte for byte.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "oracles.hpp"
#include "ptile/absorbing_set.hpp"
#include "ptile/absorption.hpp"
#include "ptile/error.hpp"
#include "ptile/generators.hpp"
#include "ptile/holes.hpp"
#include "ptile/lab.hpp"
#include "ptile/mixed_tiling.hpp"
#include "ptile/rng.hpp"
#include "ptile/template.hpp"
#include "ptile/tiling.hpp"

using namespace ptile;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Pinned limits.
constexpr double kC1Seconds = 300, kC3Seconds = 60, kC7Seconds = 600;
constexpr int kC1Instances = 240, kC2Instances = 120, kC4Instances = 50, kC8Target = 500;
constexpr int kC8Budget = 4000; // high-degree instances tried before giving up
constexpr int kC7Trials = 100;

struct Outcome {
    bool pass = false;
    std::string summary;
    json report;
};

std::vector<VertexId> as_list(const std::vector<VertexId>& a, const std::vector<VertexId>& b)
{
    auto out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

Outcome c1_hole_oracle()
{
    Rng rng(derive_seed(1, 0));
    int mismatches = 0, witnesses_bad = 0;
    json counts = json::object();
    for (int t = 0; t < kC1Instances; ++t) {
        int k = 2 + static_cast<int>(rng.below(3)), n = 1 + static_cast<int>(rng.below(5));
        int r = k == 2 ? 2 : 2 + static_cast<int>(rng.below(2));
        Pattern pat = (k == 4 && r == 2 && rng.bernoulli(0.3)) ? Pattern::cycle(4) : Pattern::complete(k);
        auto g = random_spanning_subgraph(complete_blowup(pat, n), 0.2 + 0.7 * rng.unit(), rng.next());
        auto rep = alpha_star_exact(g, r);
        int truth = oracle::alpha_star(g, r);
        mismatches += rep.alpha != truth;
        if (rep.alpha > 0) {
            std::vector<std::vector<int>> sets;
            for (const auto& s : rep.witness.sets)
                sets.push_back(bits_to_vector(s));
            witnesses_bad += oracle::spans_clique(g, rep.witness.parts, sets);
        }
        std::string key = "k" + std::to_string(k) + "_r" + std::to_string(r);
        counts[key] = counts.value(key, 0) + 1;
    }
    Outcome o;
    o.pass = mismatches == 0 && witnesses_bad == 0;
    o.report = {{"instances", kC1Instances}, {"mismatches", mismatches}, {"bad_witnesses", witnesses_bad}, {"by_kr", counts}};
    o.summary = std::to_string(kC1Instances) + " instances, " + std::to_string(mismatches) + " mismatches, " +
                std::to_string(witnesses_bad) + " bad witnesses";
    return o;
}

Outcome c2_greedy_bound()
{
    Rng rng(derive_seed(2, 0));
    int violations = 0, oracle_disagree = 0, worst = 0;
    for (int t = 0; t < kC2Instances; ++t) {
        int n = 2 + static_cast<int>(rng.below(5));
        auto g = random_spanning_subgraph(complete_blowup(Pattern::complete(3), n), 0.3 + 0.7 * rng.unit(), rng.next());
        auto tiling = greedy_clique_tiling(g);
        validate_tiling(g, tiling);
        int left = tiling.leftover_per_part(g);
        int alpha = alpha_star_exact(g, 3).alpha;
        oracle_disagree += alpha != oracle::alpha_star(g, 3);
        violations += left > alpha;
        worst = std::max(worst, left);
    }
    Outcome o;
    o.pass = violations == 0 && oracle_disagree == 0;
    o.report = {{"instances", kC2Instances}, {"violations", violations}, {"oracle_disagreements", oracle_disagree},
                {"max_leftover_per_part", worst}};
    o.summary = std::to_string(kC2Instances) + " instances, " + std::to_string(violations) + " violations, max leftover " +
                std::to_string(worst) + " per part";
    return o;
}

Outcome c3_space_barrier()
{
    const int k = 4, n = 8;
    bool ok = true;
    json runs = json::array();
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto sb = space_barrier(k, n, seed);
        const auto& g = sb.graph;
        VertexSet u = VertexSet::empty_of(g);
        for (const auto& e : sb.u)
            u.part(e.part) = e.set;
        int ds = delta_star(g);
        bool degree = ds >= n / k - 1 && ds == oracle::delta_star(g);
        // Every transversal C_4 of G, by enumeration of all n^k tuples, meets U.
        bool avoid = false;
        oracle::for_each_tuple(k, n, [&](const std::vector<int>& t) {
            if (avoid || !oracle::is_copy(g, t))
                return;
            bool meets = false;
            for (int i = 0; i < k; ++i)
                meets = meets || u.contains({i, t[static_cast<std::size_t>(i)]});
            avoid = !meets;
        });
        VertexSetFamily rest;
        for (int i = 0; i < k; ++i) {
            Bits b = ~u.part(i);
            rest.push_back({i, b});
        }
        bool cycle_none = !find_transversal_cycle(g, rest);
        auto f = exact_transversal_factor(g);
        // Disjoint copies each use a vertex of U, so fewer than n of them fit.
        bool counting = static_cast<int>(u.size()) < n;
        bool run_ok = degree && !avoid && cycle_none && !f.factor && counting;
        ok = ok && run_ok;
        runs.push_back({{"seed", seed},
                        {"delta_star", ds},
                        {"u_size", u.size()},
                        {"copy_avoiding_u", avoid},
                        {"cycle_search_none", cycle_none},
                        {"factor", f.factor.has_value()},
                        {"nodes", f.nodes},
                        {"edges", g.edge_count()}});
    }
    Outcome o;
    o.pass = ok;
    o.report = {{"k", k}, {"n", n}, {"runs", runs}};
    o.summary = "3 seeds at k=4, n=8: delta* >= 1, no transversal C_4 avoids U, exact search proves no factor";
    if (!ok)
        o.summary = "space barrier check failed: " + runs.dump();
    return o;
}

Outcome c4_paths()
{
    Rng rng(derive_seed(4, 0));
    int successes = 0, invalid = 0, uncertified = 0;
    json hist = json::object();
    for (int t = 0; t < kC4Instances; ++t) {
        int k = 4 + static_cast<int>(rng.below(2)), n = 6 + static_cast<int>(rng.below(5));
        int s = n >= 9 && rng.bernoulli(0.5) ? 3 : 2;
        auto proc = hole_suppressed_process(Pattern::cycle(k), n, 2, s, rng.next());
        const auto& g = proc.graph;
        int alpha = alpha_star_exact(g, 2).alpha;
        if (!proc.certified || alpha >= s) {
            ++uncertified;
            continue;
        }
        int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
        int len = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k - 1)));
        int j = (i + len - 1) % k;
        VertexSetFamily x;
        for (int q = 0; q < len; ++q) {
            int size = (q == 0 || q == len - 1) ? s : 2 * s;
            auto perm = rng.permutation(n);
            Bits b(static_cast<std::size_t>(n));
            for (int a = 0; a < size; ++a)
                b.set(static_cast<std::size_t>(perm[static_cast<std::size_t>(a)]));
            x.push_back({(i + q) % k, b});
        }
        auto path = find_transversal_path(g, i, j, x);
        if (!path)
            continue;
        ++successes;
        bool valid = static_cast<int>(path->size()) == len;
        for (int q = 0; valid && q < len; ++q) {
            auto v = (*path)[static_cast<std::size_t>(q)];
            valid = v.part == (i + q) % k && x[static_cast<std::size_t>(q)].set.test(static_cast<std::size_t>(v.idx));
            if (valid && q > 0)
                valid = g.has_edge((*path)[static_cast<std::size_t>(q - 1)], v);
        }
        invalid += !valid;
        std::string key = "k" + std::to_string(k) + "_s" + std::to_string(s);
        hist[key] = hist.value(key, 0) + 1;
    }
    Outcome o;
    o.pass = successes == kC4Instances && invalid == 0;
    o.report = {{"instances", kC4Instances}, {"found", successes}, {"invalid", invalid}, {"uncertified", uncertified},
                {"by_ks", hist}};
    o.summary = std::to_string(successes) + "/" + std::to_string(kC4Instances) + " certified instances found a path, " +
                std::to_string(invalid) + " invalid, " + std::to_string(uncertified) + " uncertified";
    return o;
}

struct Soundness {
    int connectors = 0, absorbers = 0, violations = 0;
    void connector(const PartiteGraph& g, const Connector& c)
    {
        ++connectors;
        bool ok = static_cast<int>(c.set.size()) <= g.k() * c.t - 1;
        ok = ok && oracle::set_factors(g, as_list({c.u}, c.set)) && oracle::set_factors(g, as_list({c.v}, c.set));
        try {
            validate_connector(g, c);
        }
        catch (const Error&) {
            ok = false;
        }
        violations += !ok;
    }
    void absorber(const PartiteGraph& g, const Absorber& a)
    {
        ++absorbers;
        bool ok = static_cast<int>(a.set.size()) <= g.k() * a.t;
        ok = ok && oracle::set_factors(g, a.set) && oracle::set_factors(g, as_list(a.set, a.target));
        try {
            validate_absorber(g, a);
        }
        catch (const Error&) {
            ok = false;
        }
        for (const auto& c : a.connectors)
            connector(g, c);
        violations += !ok;
    }
};

Outcome c5_certificates()
{
    Rng rng(derive_seed(5, 0));
    Soundness s;
    int exhaustive_disagree = 0;
    for (int t = 0; t < 300; ++t) {
        int k = 3 + static_cast<int>(rng.below(2)), n = 3 + static_cast<int>(rng.below(6));
        auto g = random_spanning_subgraph(complete_blowup(Pattern::complete(k), n), 0.6 + 0.4 * rng.unit(), rng.next());
        int part = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
        VertexId u{part, 0}, v{part, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)))};
        VertexSet w = VertexSet::empty_of(g);
        for (int c = 0; c < 2; ++c)
            w.insert({static_cast<int>(rng.below(static_cast<std::uint64_t>(k))),
                      static_cast<int>(rng.below(static_cast<std::uint64_t>(n)))});
        ConnectorOptions opt;
        opt.seed = rng.next();
        for (int ct : {1, 2}) {
            auto c = find_connector(g, u, v, w, ct, opt);
            if (c)
                s.connector(g, *c);
            if (n <= 5) {
                auto e = exhaustive_connector(g, u, v, w, ct);
                if (e)
                    s.connector(g, *e);
                std::vector<VertexId> wl;
                for (auto x : w.vertices())
                    if (!(x == u) && !(x == v))
                        wl.push_back(x);
                exhaustive_disagree += e.has_value() != oracle::connector_exists(g, u, v, wl, ct);
            }
        }
        std::vector<VertexId> target;
        for (int i = 0; i < k; ++i)
            target.push_back({i, static_cast<int>(rng.below(static_cast<std::uint64_t>(n)))});
        for (const auto& a : disjoint_absorbers(g, target, -1))
            s.absorber(g, a);
    }
    // Absorbers placed by the absorbing-set construction.
    auto big = complete_blowup(Pattern::complete(3), 120);
    AbsorbingParams p;
    p.m = 1;
    p.beta_m = 2;
    p.q = 0.5;
    p.seed = 3;
    for (const auto& e : build_absorbing_set(big, p).absorbers)
        s.absorber(big, e.absorber);

    Outcome o;
    o.pass = s.violations == 0 && exhaustive_disagree == 0 && s.connectors > 0 && s.absorbers > 0;
    o.report = {{"connectors", s.connectors}, {"absorbers", s.absorbers}, {"violations", s.violations},
                {"exhaustive_disagreements", exhaustive_disagree}};
    o.summary = std::to_string(s.connectors) + " connectors and " + std::to_string(s.absorbers) +
                " absorbers re-validated, " + std::to_string(s.violations) + " violations";
    return o;
}

std::vector<std::vector<int>> restricted(const Template& t, const std::vector<int>& xs)
{
    auto adj = t.left_adjacency();
    std::vector<std::vector<int>> out;
    for (int x : xs)
        out.push_back(adj[static_cast<std::size_t>(x)]);
    for (int y = t.x_size(); y < t.left_size(); ++y)
        out.push_back(adj[static_cast<std::size_t>(y)]);
    return out;
}

bool brute_robust(const Template& t)
{
    std::vector<int> degree(static_cast<std::size_t>(t.left_size() + t.right_size()), 0);
    for (auto [l, r] : t.edges) {
        ++degree[static_cast<std::size_t>(l)];
        ++degree[static_cast<std::size_t>(t.left_size() + r)];
    }
    if (*std::max_element(degree.begin(), degree.end()) > t.max_degree)
        return false;
    for (const auto& xs : oracle::subsets_of_size(t.x_size(), t.m))
        if (oracle::max_matching(restricted(t, xs), t.right_size()) != t.right_size())
            return false;
    return true;
}

Outcome c6_templates()
{
    int generated = 0, failed = 0;
    json found = json::array();
    for (int m = 1; m <= 3; ++m)
        for (int b = 1; b <= 3; ++b) {
            auto s = generate_template(m, b, 1000, derive_seed(6, static_cast<std::uint64_t>(m * 10 + b)), 40);
            ++generated;
            bool ok = s.tmpl && s.tmpl->max_degree == 40 && verify_template(*s.tmpl).ok && brute_robust(*s.tmpl);
            failed += !ok;
            found.push_back({{"m", m}, {"beta_m", b}, {"tries", s.tries}, {"ok", ok}});
        }
    Rng rng(derive_seed(6, 1));
    int disagree = 0, robust = 0;
    const int randoms = 300;
    for (int t = 0; t < randoms; ++t) {
        Template tm{1 + static_cast<int>(rng.below(3)), static_cast<int>(rng.below(3)), 40, {}};
        if (rng.bernoulli(0.2))
            tm.max_degree = 2 + static_cast<int>(rng.below(3));
        double p = 0.15 + 0.5 * rng.unit();
        for (int l = 0; l < tm.left_size(); ++l)
            for (int r = 0; r < tm.right_size(); ++r)
                if (rng.bernoulli(p))
                    tm.edges.emplace_back(l, r);
        bool truth = brute_robust(tm);
        robust += truth;
        disagree += verify_template(tm).ok != truth;
    }
    Outcome o;
    o.pass = failed == 0 && disagree == 0;
    o.report = {{"generated", found}, {"random_templates", randoms}, {"robust", robust}, {"disagreements", disagree}};
    o.summary = std::to_string(generated - failed) + "/" + std::to_string(generated) +
                " generated templates verified; verifier agrees with brute force on " +
                std::to_string(randoms - disagree) + "/" + std::to_string(randoms) + " random templates";
    return o;
}

Outcome c7_pipeline()
{
    struct Case {
        std::string name;
        PartiteGraph g;
        int beta_m;
        std::uint64_t seed;
    };
    // beta_m = 2 leaves |X_i| = 3 on the random instance, too few for U to be covered reliably
    // (README, "Absorbing pipeline at desk scale"); beta_m = 4 at n = 170 is the smallest setting
    // that passed every probe.
    std::vector<Case> cases;
    cases.push_back({"complete K3 n=120", complete_blowup(Pattern::complete(3), 120), 2, 3});
    cases.push_back({"random p=0.9 n=170",
                     random_spanning_subgraph(complete_blowup(Pattern::complete(3), 170), 0.9, 101), 4, 1});
    bool ok = true;
    json runs = json::array();
    for (const auto& c : cases) {
        const auto& g = c.g;
        // Certificate for small holes: alpha*_2 <= alpha2_degree_bound, certified below n / 4.
        int hole_bound = alpha2_degree_bound(g);
        bool certified = hole_bound * 4 < g.n() && 2 * delta_star(g) > g.n();
        AbsorbingParams p;
        p.m = 1;
        p.beta_m = c.beta_m;
        p.q = 0.5;
        p.seed = c.seed;
        json run = {{"instance", c.name}, {"beta_m", c.beta_m}, {"hole_bound", hole_bound}, {"delta_star", delta_star(g)}, {"certified", certified}};
        try {
            auto as = build_absorbing_set(g, p);
            AbsorbVerifyOptions vo;
            vo.exhaustive_per_part = 1;
            vo.exhaustive_limit = 200000;
            auto v = verify_absorbing_property(g, as, as.xi, kC7Trials, derive_seed(7, c.seed), vo);
            long long expected = 1;
            for (int i = 0; i < g.k(); ++i)
                expected *= g.n() - as.r.part_size(i);
            bool good = certified && v.pass && v.random_trials >= kC7Trials && v.exhaustive_trials == expected;
            ok = ok && good;
            run.update({{"r_size", as.r.size()},
                        {"xi", as.xi},
                        {"pass", v.pass},
                        {"random_trials", v.random_trials},
                        {"exhaustive_trials", v.exhaustive_trials},
                        {"exhaustive_expected", expected}});
        }
        catch (const Error& e) {
            ok = false;
            run["error"] = e.what();
        }
        runs.push_back(run);
    }
    Outcome o;
    o.pass = ok;
    o.report = {{"runs", runs}};
    std::ostringstream os;
    for (const auto& r : runs)
        os << r["instance"].get<std::string>() << ": "
           << (r.contains("pass") ? (r["pass"].get<bool>() ? "pass" : "FAIL") : "error") << " ("
           << r.value("random_trials", 0) << " random + " << r.value("exhaustive_trials", 0) << " exhaustive |U|=3); ";
    o.summary = os.str();
    o.summary.resize(o.summary.size() - 2);
    return o;
}

struct MixedStats {
    int instances = 0, nonempty = 0, violations = 0, not_maximal = 0, oracle_disagree = 0, skipped = 0;
};

MixedStats mixed_run(std::uint64_t stream, int budget, double p_lo, double p_hi, bool high_degree)
{
    Rng rng(derive_seed(8, stream));
    MixedStats st;
    for (int t = 0; t < budget; ++t) {
        int k = 4 + static_cast<int>(rng.below(3)), n = 3 + static_cast<int>(rng.below(7));
        auto g = random_spanning_subgraph(complete_blowup(Pattern::cycle(k), n), p_lo + (p_hi - p_lo) * rng.unit(), rng.next());
        std::uint64_t tseed = rng.next();
        if (high_degree && delta_star(g) < std::ceil((2.0 / k + 0.1) * n - 1e-9)) {
            ++st.skipped;
            continue;
        }
        ++st.instances;
        auto tiling = maximal_mixed_tiling(g, tseed);
        auto rep = check_appendix_invariants(g, tiling);
        bool maximal = oracle::mixed_maximal(g, tiling);
        st.oracle_disagree += maximal != rep.maximality.maximal;
        st.not_maximal += !maximal;
        if (rep.leftover_per_part == 0)
            continue;
        ++st.nonempty;
        st.violations += static_cast<int>(rep.violations.size());
    }
    return st;
}

json stats_json(const MixedStats& s)
{
    return {{"instances", s.instances}, {"nonempty_leftover", s.nonempty}, {"violations", s.violations},
            {"not_maximal", s.not_maximal}, {"oracle_disagreements", s.oracle_disagree}, {"skipped_low_degree", s.skipped}};
}

Outcome c8_appendix(std::string& info)
{
    // Literal protocol: high-degree instances only.
    auto hi = mixed_run(0, kC8Budget, 0.4, 1.0, true);
    // Low-degree evidence: the same checks where leftovers actually occur.
    auto lo = mixed_run(1, 2500, 0.05, 0.55, false);
    Outcome o;
    o.pass = hi.nonempty >= kC8Target && hi.violations == 0 && hi.not_maximal == 0 && hi.oracle_disagree == 0;
    o.report = {{"high_degree", stats_json(hi)}, {"low_degree", stats_json(lo)}, {"target", kC8Target}};
    o.summary = std::to_string(hi.nonempty) + "/" + std::to_string(kC8Target) + " nonempty leftovers among " +
                std::to_string(hi.instances) + " instances with delta* >= (2/k+0.1)n; " +
                std::to_string(hi.violations) + " violations, " + std::to_string(hi.not_maximal) + " non-maximal";
    info = "low-degree evidence: " + std::to_string(lo.nonempty) + " nonempty leftovers over " +
           std::to_string(lo.instances) + " instances, " + std::to_string(lo.violations) + " violations, " +
           std::to_string(lo.not_maximal) + " non-maximal, " + std::to_string(lo.oracle_disagree) +
           " maximality disagreements";
    return o;
}

void write(const fs::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Example lab configs, with outputs redirected into `dir`.
void run_lab_configs(const fs::path& dir, int threads)
{
    std::vector<fs::path> configs;
    for (const auto& e : fs::directory_iterator(PTILE_CONFIG_DIR))
        if (e.path().extension() == ".json")
            configs.push_back(e.path());
    std::sort(configs.begin(), configs.end());
    for (const auto& c : configs) {
        auto cfg = lab::load_config(c.string());
        const std::string stem = c.stem().string();
        cfg.csv_path = (dir / (stem + ".csv")).string();
        cfg.json_path = (dir / (stem + ".json")).string();
        auto recs = lab::run(cfg, threads);
        lab::write_outputs(cfg, recs);
        lab::emit_plot(recs, lab::PlotKind::line, (dir / (stem + ".svg")).string());
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance criteria"};
    std::string out = "acceptance_out";
    app.add_option("--out", out, "directory for result files");
    CLI11_PARSE(app, argc, argv);

    using Clock = std::chrono::steady_clock;
    struct Criterion {
        int id;
        std::string title;
        double limit; // seconds, 0 = none
        bool expected_failure;
        std::function<Outcome(std::string&)> run;
    };
    auto plain = [](Outcome (*f)()) { return [f](std::string&) { return f(); }; };
    std::vector<Criterion> criteria = {
        {1, "hole oracle equivalence", kC1Seconds, false, plain(c1_hole_oracle)},
        {2, "greedy leftover bound", 0, false, plain(c2_greedy_bound)},
        {3, "space-barrier tightness", kC3Seconds, false, plain(c3_space_barrier)},
        {4, "transversal path completeness", 0, false, plain(c4_paths)},
        {5, "connector/absorber certificate soundness", 0, false, plain(c5_certificates)},
        {6, "template robustness", 0, false, plain(c6_templates)},
        {7, "absorbing pipeline end-to-end", kC7Seconds, false, plain(c7_pipeline)},
        // Unattainable as stated: a maximal tiling with nonempty leftover forces delta* < 2n/k
        // (see README, "Criterion 8"). Reported as FAIL; does not count as unexpected.
        {8, "appendix invariants", 0, true, c8_appendix},
    };

    int unexpected = 0;
    std::vector<std::string> infos(criteria.size());
    for (int pass = 1; pass <= 2; ++pass) {
        fs::path dir = fs::path(out) / ("run" + std::to_string(pass));
        fs::remove_all(dir);
        fs::create_directories(dir);
        for (std::size_t c = 0; c < criteria.size(); ++c) {
            auto& cr = criteria[c];
            auto start = Clock::now();
            Outcome o;
            try {
                o = cr.run(infos[c]);
            }
            catch (const std::exception& e) {
                o.pass = false;
                o.summary = std::string("exception: ") + e.what();
            }
            double secs = std::chrono::duration<double>(Clock::now() - start).count();
            bool in_time = cr.limit <= 0 || secs < cr.limit;
            write(dir / ("c" + std::to_string(cr.id) + ".json"),
                  json{{"criterion", cr.id}, {"pass", o.pass && in_time}, {"report", o.report}}.dump(2) + "\n");
            if (pass == 2)
                continue;
            bool ok = o.pass && in_time;
            char timing[96];
            if (cr.limit > 0)
                std::snprintf(timing, sizeof timing, " [%.1fs, limit %.0fs]", secs, cr.limit);
            else
                std::snprintf(timing, sizeof timing, " [%.1fs]", secs);
            std::cout << (ok ? "PASS" : "FAIL") << " C" << cr.id << " " << cr.title << ": " << o.summary << timing
                      << (ok || !cr.expected_failure ? "" : " (expected: unattainable, see README)") << '\n';
            if (!infos[c].empty())
                std::cout << "     C" << cr.id << " " << infos[c] << '\n';
            std::cout.flush();
            if (!ok && !cr.expected_failure)
                ++unexpected;
        }
        run_lab_configs(dir, pass == 1 ? 1 : 3);
    }

    // C9: every file written by the two runs must match byte for byte.
    auto start = Clock::now();
    fs::path a = fs::path(out) / "run1", b = fs::path(out) / "run2";
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(a))
        names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    int differing = 0, missing = 0;
    for (const auto& n : names) {
        if (!fs::exists(b / n)) {
            ++missing;
            continue;
        }
        differing += slurp(a / n) != slurp(b / n);
    }
    std::size_t in_b = static_cast<std::size_t>(std::distance(fs::directory_iterator(b), fs::directory_iterator{}));
    bool c9 = differing == 0 && missing == 0 && in_b == names.size() && !names.empty();
    std::printf("%s C9 determinism: %zu result files compared across two runs (lab configs run with 1 and 3 workers), "
                "%d differ, %d missing [%.1fs]\n",
                c9 ? "PASS" : "FAIL", names.size(), differing, missing,
                std::chrono::duration<double>(Clock::now() - start).count());
    unexpected += !c9;
    std::printf("%d unexpected failure(s)\n", unexpected);
    return unexpected == 0 ? 0 : 1;
}
