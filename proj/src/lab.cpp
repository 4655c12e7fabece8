#include "ptile/lab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "ptile/absorbing_set.hpp"
#include "ptile/absorption.hpp"
#include "ptile/error.hpp"
#include "ptile/holes.hpp"
#include "ptile/mixed_tiling.hpp"
#include "ptile/rng.hpp"
#include "ptile/tiling.hpp"

namespace ptile::lab {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error("config: " + what); }

struct ParamSpec {
    std::string name;
    enum Kind { integer, real, text } kind;
    json fallback;
    double lo = 0, hi = 0;
    std::vector<std::string> choices;
};

const std::vector<ParamSpec>& param_specs(Scenario s)
{
    using K = ParamSpec;
    static const std::vector<ParamSpec> hole = {
        {"r", K::integer, 2, 2, 16, {}},
        {"mode", K::text, "exact", 0, 0, {"exact", "lower"}},
        {"cap", K::integer, kDefaultHoleCap, 1, 64, {}},
        {"trials", K::integer, 200, 1, 1e6, {}},
    };
    static const std::vector<ParamSpec> greedy = {{"alpha_cap", K::integer, 6, 0, 12, {}}};
    static const std::vector<ParamSpec> factor = {{"cap", K::integer, kDefaultFactorCap, 1, 64, {}}};
    static const std::vector<ParamSpec> census = {
        {"targets", K::integer, 5, 1, 1000, {}},
        {"count", K::integer, 4, -1, 1e6, {}},
        {"connector_t", K::integer, 0, 0, 2, {}},
        {"max_core_tries", K::integer, 32, 1, 1e5, {}},
    };
    static const std::vector<ParamSpec> pipeline = {
        {"m", K::integer, 1, 1, 10, {}},
        {"beta_m", K::integer, 2, 0, 10, {}},
        {"q", K::real, 0.5, 0, 1, {}},
        {"tau", K::real, 0.0, 0, 1, {}},
        {"beta_prime", K::real, 0.0, 0, 1, {}},
        {"gamma", K::real, -1.0, -1, 1e6, {}},
        {"trials", K::integer, 100, 0, 1e6, {}},
        {"exhaustive_per_part", K::integer, 1, 0, 10, {}},
        {"exhaustive_limit", K::integer, 20000, 0, 1e9, {}},
        {"sample_tries", K::integer, 50, 1, 1e5, {}},
        {"template_tries", K::integer, 1000, 1, 1e6, {}},
        {"degree_cap", K::integer, kTemplateDegreeCap, 1, kTemplateDegreeCap, {}},
    };
    static const std::vector<ParamSpec> appendix = {{"tilings", K::integer, 1, 1, 1e5, {}}};
    static const std::vector<ParamSpec> sweep = {
        {"p_from", K::real, 0.5, 0, 1, {}},
        {"p_to", K::real, 1.0, 0, 1, {}},
        {"p_step", K::real, 0.05, 1e-6, 1, {}},
        {"seeds", K::integer, 20, 1, 1e5, {}},
        {"cap", K::integer, kDefaultFactorCap, 1, 64, {}},
    };
    switch (s) {
    case Scenario::hole_scan: return hole;
    case Scenario::greedy_tiling: return greedy;
    case Scenario::factor_decision: return factor;
    case Scenario::absorber_census: return census;
    case Scenario::absorbing_pipeline: return pipeline;
    case Scenario::appendix_invariants: return appendix;
    case Scenario::threshold_sweep: return sweep;
    }
    return hole;
}

json normalize_params(Scenario s, const json& given)
{
    if (!given.is_object())
        config_error("params must be an object");
    const auto& specs = param_specs(s);
    for (const auto& [key, _] : given.items())
        if (std::none_of(specs.begin(), specs.end(), [&](const ParamSpec& p) { return p.name == key; }))
            config_error("unknown parameter '" + key + "' for scenario " + scenario_name(s));
    json out = json::object();
    for (const auto& p : specs) {
        json v = given.contains(p.name) ? given.at(p.name) : p.fallback;
        switch (p.kind) {
        case ParamSpec::integer:
            if (!v.is_number_integer())
                config_error("parameter '" + p.name + "' must be an integer");
            break;
        case ParamSpec::real:
            if (!v.is_number())
                config_error("parameter '" + p.name + "' must be a number");
            v = v.get<double>();
            break;
        case ParamSpec::text:
            if (!v.is_string() ||
                std::find(p.choices.begin(), p.choices.end(), v.get<std::string>()) == p.choices.end())
                config_error("parameter '" + p.name + "' has an unsupported value");
            break;
        }
        if (p.kind != ParamSpec::text) {
            double x = v.get<double>();
            if (x < p.lo || x > p.hi)
                config_error("parameter '" + p.name + "' out of range");
        }
        out[p.name] = v;
    }
    return out;
}

std::vector<double> sweep_grid(const json& params)
{
    double from = params.at("p_from"), to = params.at("p_to"), step = params.at("p_step");
    std::vector<double> grid;
    int count = static_cast<int>(std::floor((to - from) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i)
        grid.push_back(std::round((from + i * step) * 1e9) / 1e9);
    return grid;
}

std::string resolve(const std::string& base, const std::string& path)
{
    fs::path p(path);
    if (p.is_relative())
        p = fs::path(base) / p;
    return p.lexically_normal().string();
}

std::uint64_t fnv1a64(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Metric values in column order; missing entries stay null.
class Metrics {
public:
    explicit Metrics(Scenario s) : names_(scenario_metrics(s)), values_(names_.size()) {}

    void set(const std::string& name, json v)
    {
        auto it = std::find(names_.begin(), names_.end(), name);
        values_[static_cast<std::size_t>(it - names_.begin())] = std::move(v);
    }

    std::vector<std::pair<std::string, json>> take() const
    {
        std::vector<std::pair<std::string, json>> out;
        for (std::size_t i = 0; i < names_.size(); ++i)
            out.emplace_back(names_[i], values_[i]);
        return out;
    }

private:
    const std::vector<std::string>& names_;
    std::vector<json> values_;
};

int leftover_of_greedy(const PartiteGraph& g)
{
    const auto& pat = g.pattern();
    if (pat.is_complete())
        return greedy_clique_tiling(g).leftover_per_part(g);
    return greedy_cycle_tiling(g).leftover_per_part(g);
}

void hole_scan(const PartiteGraph& g, const json& p, std::uint64_t seed, Metrics& out)
{
    int r = p.at("r");
    if (p.at("mode") == "exact") {
        auto rep = alpha_star_exact(g, r, p.at("cap").get<int>());
        out.set("alpha", rep.alpha);
        out.set("exact", true);
        out.set("explored", rep.explored);
        out.set("verified", rep.alpha == 0 || verify_hole(g, rep.witness));
        return;
    }
    int best = 0;
    bool verified = true;
    for (int s = 1; s <= g.n(); ++s) {
        auto hole = alpha_star_lower_bound(g, r, s, p.at("trials").get<int>(), derive_seed(seed, static_cast<std::uint64_t>(s)));
        if (!hole)
            break;
        verified = verified && verify_hole(g, *hole);
        best = s;
    }
    out.set("alpha", best);
    out.set("exact", false);
    out.set("verified", verified);
}

void greedy_tiling(const PartiteGraph& g, const json& p, Metrics& out)
{
    const bool clique = g.pattern().is_complete();
    Tiling t = clique ? greedy_clique_tiling(g) : greedy_cycle_tiling(g);
    validate_tiling(g, t);
    int left = t.leftover_per_part(g);
    out.set("copies", t.copies.size());
    out.set("leftover_per_part", left);
    if (clique && g.n() <= p.at("alpha_cap").get<int>()) {
        int alpha = alpha_star_exact(g, g.k(), p.at("alpha_cap").get<int>()).alpha;
        out.set("alpha_k", alpha);
        out.set("bound_ok", left <= alpha);
    }
}

void factor_decision(const PartiteGraph& g, int cap, Metrics& out)
{
    auto r = exact_transversal_factor(g, cap);
    out.set("exists", r.factor.has_value());
    out.set("nodes", r.nodes);
    out.set("max_depth", r.max_depth);
    out.set("validated", !r.factor || is_factor_of(g, *r.factor, VertexSet::full_of(g)));
}

void absorber_census(const PartiteGraph& g, const json& p, std::uint64_t seed, Metrics& out)
{
    AbsorberOptions opt;
    opt.connector_t = p.at("connector_t");
    opt.max_core_tries = p.at("max_core_tries");
    opt.connector.seed = derive_seed(seed, 1);
    Rng rng(derive_seed(seed, 0));
    const int targets = p.at("targets");
    int lo = -1, hi = 0;
    long total = 0;
    bool valid = true;
    for (int t = 0; t < targets; ++t) {
        std::vector<VertexId> s;
        for (int i = 0; i < g.k(); ++i)
            s.push_back({i, static_cast<int>(rng.below(static_cast<std::uint64_t>(g.n())))});
        auto family = disjoint_absorbers(g, s, p.at("count").get<int>(), opt);
        for (const auto& a : family) {
            try {
                validate_absorber(g, a);
            }
            catch (const Error&) {
                valid = false;
            }
        }
        int c = static_cast<int>(family.size());
        lo = lo < 0 ? c : std::min(lo, c);
        hi = std::max(hi, c);
        total += c;
    }
    out.set("targets", targets);
    out.set("min_count", lo);
    out.set("max_count", hi);
    out.set("mean_count", static_cast<double>(total) / targets);
    out.set("validated", valid);
}

void absorbing_pipeline(const PartiteGraph& g, const json& p, std::uint64_t seed, Metrics& out)
{
    AbsorbingParams ap;
    ap.m = p.at("m");
    ap.beta_m = p.at("beta_m");
    ap.q = p.at("q");
    ap.tau = p.at("tau");
    ap.beta_prime = p.at("beta_prime");
    ap.gamma = p.at("gamma");
    ap.sample_tries = p.at("sample_tries");
    ap.template_tries = p.at("template_tries");
    ap.degree_cap = p.at("degree_cap");
    ap.seed = derive_seed(seed, 0);
    auto as = build_absorbing_set(g, ap);
    out.set("r_size", as.r.size());
    out.set("capacity", as.capacity);
    out.set("xi", as.xi);
    AbsorbVerifyOptions vo;
    vo.exhaustive_per_part = p.at("exhaustive_per_part");
    vo.exhaustive_limit = p.at("exhaustive_limit");
    auto v = verify_absorbing_property(g, as, as.xi, p.at("trials").get<int>(), derive_seed(seed, 1), vo);
    out.set("pass", v.pass);
    out.set("proof", v.proof);
    out.set("random_trials", v.random_trials);
    out.set("exhaustive_trials", v.exhaustive_trials);
    out.set("constructive", v.constructive);
    out.set("exact", v.exact);
}

void appendix_invariants(const PartiteGraph& g, const json& p, std::uint64_t seed, Metrics& out)
{
    const int tilings = p.at("tilings");
    int nonempty = 0, worst = 0, violations = 0, not_maximal = 0;
    for (int t = 0; t < tilings; ++t) {
        auto tiling = maximal_mixed_tiling(g, derive_seed(seed, static_cast<std::uint64_t>(t)));
        auto rep = check_appendix_invariants(g, tiling);
        nonempty += rep.leftover_per_part > 0;
        worst = std::max(worst, rep.leftover_per_part);
        violations += static_cast<int>(rep.violations.size());
        not_maximal += rep.status == "not_maximal";
    }
    out.set("tilings", tilings);
    out.set("nonempty", nonempty);
    out.set("max_leftover", worst);
    out.set("violations", violations);
    out.set("not_maximal", not_maximal);
}

std::string csv_cell(const json& v)
{
    if (v.is_null())
        return "";
    if (!v.is_string())
        return v.dump();
    const auto& s = v.get_ref<const std::string&>();
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + "\"";
}

} // namespace

std::string scenario_name(Scenario s)
{
    switch (s) {
    case Scenario::hole_scan: return "hole_scan";
    case Scenario::greedy_tiling: return "greedy_tiling";
    case Scenario::factor_decision: return "factor_decision";
    case Scenario::absorber_census: return "absorber_census";
    case Scenario::absorbing_pipeline: return "absorbing_pipeline";
    case Scenario::appendix_invariants: return "appendix_invariants";
    case Scenario::threshold_sweep: return "threshold_sweep";
    }
    return "";
}

Scenario scenario_from_name(const std::string& name)
{
    for (auto s : {Scenario::hole_scan, Scenario::greedy_tiling, Scenario::factor_decision, Scenario::absorber_census,
                   Scenario::absorbing_pipeline, Scenario::appendix_invariants, Scenario::threshold_sweep})
        if (scenario_name(s) == name)
            return s;
    config_error("unknown scenario '" + name + "'");
}

const std::vector<std::string>& scenario_metrics(Scenario s)
{
    static const std::vector<std::string> hole = {"delta_star", "alpha", "exact", "explored", "verified"};
    static const std::vector<std::string> greedy = {"delta_star", "copies", "leftover_per_part", "alpha_k", "bound_ok"};
    static const std::vector<std::string> factor = {"delta_star", "exists", "nodes", "max_depth", "validated"};
    static const std::vector<std::string> census = {"delta_star", "targets",    "min_count",
                                                    "max_count",  "mean_count", "validated"};
    static const std::vector<std::string> pipeline = {"delta_star",    "r_size",        "capacity",
                                                      "xi",            "pass",          "proof",
                                                      "random_trials", "exhaustive_trials", "constructive",
                                                      "exact"};
    static const std::vector<std::string> appendix = {"delta_star",   "tilings",    "nonempty",
                                                      "max_leftover", "violations", "not_maximal"};
    static const std::vector<std::string> sweep = {"p", "rep", "delta_star", "exists", "nodes", "leftover_per_part"};
    switch (s) {
    case Scenario::hole_scan: return hole;
    case Scenario::greedy_tiling: return greedy;
    case Scenario::factor_decision: return factor;
    case Scenario::absorber_census: return census;
    case Scenario::absorbing_pipeline: return pipeline;
    case Scenario::appendix_invariants: return appendix;
    case Scenario::threshold_sweep: return sweep;
    }
    return hole;
}

std::string config_hash(const json& canonical)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical.dump())));
    return buf;
}

ExperimentConfig parse_config(const json& doc, const std::string& base_dir)
{
    if (!doc.is_object())
        config_error("document must be an object");
    static const std::vector<std::string> keys = {"scenario", "gen", "graph", "params", "seed",
                                                  "instances", "record_timing", "output"};
    for (const auto& [key, _] : doc.items())
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            config_error("unknown field '" + key + "'");
    if (!doc.contains("scenario") || !doc.at("scenario").is_string())
        config_error("missing scenario");

    ExperimentConfig cfg;
    cfg.scenario = scenario_from_name(doc.at("scenario"));
    if (doc.contains("gen") == doc.contains("graph"))
        config_error("exactly one of gen and graph is required");

    Pattern pattern = Pattern::complete(3);
    json canonical = json::object();
    canonical["scenario"] = scenario_name(cfg.scenario);
    if (doc.contains("gen")) {
        const json& g = doc.at("gen");
        if (!g.is_object())
            config_error("gen must be an object");
        if (g.contains("seed"))
            config_error("gen.seed is derived per instance; set the top-level seed instead");
        GenSpec spec;
        try {
            spec = gen_spec_from_json(g);
        }
        catch (const std::exception& e) {
            config_error(std::string("gen: ") + e.what());
        }
        if (spec.family == Family::random_split) {
            spec.host = resolve(base_dir, spec.host);
            if (!fs::exists(spec.host))
                config_error("host edge list " + spec.host + " does not exist");
        }
        pattern = spec.pattern;
        cfg.gen = spec;
        canonical["gen"] = g;
    }
    else {
        if (!doc.at("graph").is_string())
            config_error("graph must be a path");
        cfg.graph_path = resolve(base_dir, doc.at("graph"));
        if (!fs::exists(cfg.graph_path))
            config_error("graph file " + cfg.graph_path + " does not exist");
        try {
            pattern = load_graph(cfg.graph_path).pattern();
        }
        catch (const std::exception& e) {
            config_error(e.what());
        }
        canonical["graph"] = doc.at("graph");
    }

    cfg.params = normalize_params(cfg.scenario, doc.value("params", json::object()));
    canonical["params"] = cfg.params;

    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned() && !(doc.at("seed").is_number_integer() && doc.at("seed") >= 0))
            config_error("seed must be a non-negative integer");
        cfg.seed = doc.at("seed").get<std::uint64_t>();
    }
    canonical["seed"] = cfg.seed;

    if (cfg.scenario == Scenario::threshold_sweep) {
        if (doc.contains("instances"))
            config_error("threshold_sweep derives its instance count from the p grid");
        if (!cfg.gen || cfg.gen->family != Family::random_subgraph)
            config_error("threshold_sweep needs a random_subgraph generator");
        if (cfg.params.at("p_to").get<double>() < cfg.params.at("p_from").get<double>())
            config_error("p_to must not be below p_from");
        cfg.instances = static_cast<int>(sweep_grid(cfg.params).size()) * cfg.params.at("seeds").get<int>();
    }
    else {
        const json& inst = doc.value("instances", json(1));
        if (!inst.is_number_integer() || inst.get<long long>() < 1 || inst.get<long long>() > 1000000)
            config_error("instances must be an integer in [1, 1000000]");
        cfg.instances = inst;
        canonical["instances"] = cfg.instances;
    }

    if (doc.contains("record_timing")) {
        if (!doc.at("record_timing").is_boolean())
            config_error("record_timing must be a boolean");
        cfg.record_timing = doc.at("record_timing");
    }
    canonical["record_timing"] = cfg.record_timing;

    switch (cfg.scenario) {
    case Scenario::hole_scan:
        if (cfg.params.at("r").get<int>() > pattern.k())
            config_error("r exceeds the part count");
        break;
    case Scenario::greedy_tiling:
    case Scenario::threshold_sweep:
        if (!pattern.is_complete() && !pattern.is_cycle())
            config_error("scenario needs a complete or cycle pattern");
        break;
    case Scenario::absorber_census:
    case Scenario::absorbing_pipeline:
        if (!pattern.is_complete())
            config_error("scenario needs a complete pattern");
        break;
    case Scenario::appendix_invariants:
        if (!pattern.is_cycle() || pattern.k() < 4)
            config_error("scenario needs a cycle pattern with k >= 4");
        break;
    case Scenario::factor_decision: break;
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        if (!o.is_object())
            config_error("output must be an object");
        for (const auto& [key, v] : o.items()) {
            if ((key != "csv" && key != "json") || !v.is_string())
                config_error("output accepts string fields csv and json");
            (key == "csv" ? cfg.csv_path : cfg.json_path) = resolve(base_dir, v.get<std::string>());
        }
    }
    cfg.canonical = canonical;
    cfg.hash = config_hash(canonical);
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        config_error("cannot read " + path);
    json doc;
    try {
        in >> doc;
    }
    catch (const json::exception& e) {
        config_error(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc, fs::path(path).parent_path().string().empty() ? "." : fs::path(path).parent_path().string());
}

const json* ResultRecord::metric(const std::string& name) const
{
    for (const auto& [k, v] : metrics)
        if (k == name)
            return &v;
    return nullptr;
}

std::vector<json> instances(const ExperimentConfig& cfg)
{
    std::vector<json> out;
    std::vector<double> grid;
    int seeds = 1;
    if (cfg.scenario == Scenario::threshold_sweep) {
        grid = sweep_grid(cfg.params);
        seeds = cfg.params.at("seeds");
    }
    for (int i = 0; i < cfg.instances; ++i) {
        std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
        json d = {{"index", i}, {"seed", seed}};
        if (cfg.gen) {
            GenSpec spec = *cfg.gen;
            spec.seed = seed;
            if (!grid.empty()) {
                spec.p = grid[static_cast<std::size_t>(i / seeds)];
                d["p"] = spec.p;
                d["rep"] = i % seeds;
            }
            d["gen"] = gen_spec_to_json(spec);
            if (spec.budget != static_cast<std::size_t>(-1))
                d["gen"]["budget"] = spec.budget;
        }
        else {
            d["graph"] = cfg.graph_path;
        }
        out.push_back(std::move(d));
    }
    return out;
}

ResultRecord evaluate(const ExperimentConfig& cfg, const json& instance)
{
    ResultRecord rec;
    rec.config_hash = cfg.hash;
    rec.scenario = scenario_name(cfg.scenario);
    rec.instance = instance;
    Metrics out(cfg.scenario);
    auto start = std::chrono::steady_clock::now();
    try {
        std::uint64_t seed = instance.at("seed");
        PartiteGraph g = instance.contains("gen") ? generate(gen_spec_from_json(instance.at("gen"))).graph
                                                  : load_graph(instance.at("graph"));
        if (cfg.scenario == Scenario::threshold_sweep) {
            out.set("p", instance.at("p"));
            out.set("rep", instance.at("rep"));
        }
        out.set("delta_star", delta_star(g));
        const json& p = cfg.params;
        switch (cfg.scenario) {
        case Scenario::hole_scan: hole_scan(g, p, seed, out); break;
        case Scenario::greedy_tiling: greedy_tiling(g, p, out); break;
        case Scenario::factor_decision: factor_decision(g, p.at("cap"), out); break;
        case Scenario::absorber_census: absorber_census(g, p, seed, out); break;
        case Scenario::absorbing_pipeline: absorbing_pipeline(g, p, seed, out); break;
        case Scenario::appendix_invariants: appendix_invariants(g, p, seed, out); break;
        case Scenario::threshold_sweep: {
            auto r = exact_transversal_factor(g, p.at("cap").get<int>());
            out.set("exists", r.factor.has_value());
            out.set("nodes", r.nodes);
            out.set("leftover_per_part", leftover_of_greedy(g));
            break;
        }
        }
    }
    catch (const std::exception& e) {
        rec.status = "error";
        rec.error = e.what();
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rec.metrics = out.take();
    return rec;
}

int worker_count(std::size_t jobs)
{
    int w = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("LAB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1)
            w = static_cast<int>(std::min(v, 1024L));
    }
    return std::max(1, std::min(w, static_cast<int>(std::max<std::size_t>(jobs, 1))));
}

std::vector<ResultRecord> run(const ExperimentConfig& cfg, int threads)
{
    auto jobs = instances(cfg);
    std::vector<ResultRecord> out(jobs.size());
    int workers = threads > 0 ? std::min<int>(threads, static_cast<int>(jobs.size())) : worker_count(jobs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();)
            out[i] = evaluate(cfg, jobs[i]);
    };
    if (workers <= 1) {
        work();
        return out;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back(work);
    for (auto& t : pool)
        t.join();
    return out;
}

std::string records_to_csv(const std::vector<ResultRecord>& records, bool with_timing)
{
    std::ostringstream os;
    if (records.empty())
        return "";
    const auto& names = scenario_metrics(scenario_from_name(records.front().scenario));
    os << "config_hash,scenario,version,instance,seed";
    for (const auto& n : names)
        os << ',' << n;
    os << ",status,error";
    if (with_timing)
        os << ",wall_ms";
    os << '\n';
    for (const auto& r : records) {
        os << r.config_hash << ',' << r.scenario << ',' << csv_cell(r.version) << ',' << r.instance.at("index").dump()
           << ',' << r.instance.at("seed").dump();
        for (const auto& n : names) {
            const json* v = r.metric(n);
            os << ',' << (v ? csv_cell(*v) : "");
        }
        os << ',' << r.status << ',' << csv_cell(r.error);
        if (with_timing) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
            os << ',' << buf;
        }
        os << '\n';
    }
    return os.str();
}

json records_to_json(const ExperimentConfig& cfg, const std::vector<ResultRecord>& records)
{
    json out = {{"version", kVersion},
                {"config_hash", cfg.hash},
                {"scenario", scenario_name(cfg.scenario)},
                {"config", cfg.canonical},
                {"columns", scenario_metrics(cfg.scenario)}};
    json list = json::array();
    for (const auto& r : records) {
        json m = json::object();
        for (const auto& [k, v] : r.metrics)
            m[k] = v;
        json e = {{"instance", r.instance}, {"metrics", m}, {"status", r.status}, {"error", r.error}, {"version", r.version}};
        if (cfg.record_timing)
            e["wall_ms"] = r.wall_ms;
        list.push_back(std::move(e));
    }
    out["records"] = std::move(list);
    return out;
}

std::vector<ResultRecord> records_from_json(const json& doc)
{
    if (!doc.is_object() || !doc.contains("records") || !doc.contains("scenario"))
        throw Error("malformed results document");
    Scenario s = scenario_from_name(doc.at("scenario"));
    std::vector<ResultRecord> out;
    for (const auto& e : doc.at("records")) {
        ResultRecord r;
        r.config_hash = doc.value("config_hash", std::string());
        r.scenario = scenario_name(s);
        r.instance = e.at("instance");
        for (const auto& n : scenario_metrics(s))
            r.metrics.emplace_back(n, e.at("metrics").value(n, json()));
        r.status = e.value("status", std::string("ok"));
        r.error = e.value("error", std::string());
        r.wall_ms = e.value("wall_ms", 0.0);
        r.version = e.value("version", std::string(kVersion));
        out.push_back(std::move(r));
    }
    return out;
}

void write_outputs(const ExperimentConfig& cfg, const std::vector<ResultRecord>& records)
{
    auto write = [](const std::string& path, const std::string& text) {
        fs::path p(path);
        if (p.has_parent_path())
            fs::create_directories(p.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw Error("cannot write " + path);
        out << text;
    };
    if (!cfg.csv_path.empty()) {
        std::string csv = records_to_csv(records, cfg.record_timing);
        if (csv.empty()) {
            // Header only, so that an empty run still documents its schema.
            csv = "config_hash,scenario,version,instance,seed";
            for (const auto& n : scenario_metrics(cfg.scenario))
                csv += "," + n;
            csv += cfg.record_timing ? ",status,error,wall_ms\n" : ",status,error\n";
        }
        write(cfg.csv_path, csv);
    }
    if (!cfg.json_path.empty())
        write(cfg.json_path, records_to_json(cfg, records).dump(2) + "\n");
}

// ---- plotting

PlotKind plot_kind_from_name(const std::string& name)
{
    if (name == "line")
        return PlotKind::line;
    if (name == "heatmap")
        return PlotKind::heatmap;
    throw Error("unknown plot kind '" + name + "'");
}

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 80, kRight = 30, kTop = 50, kBottom = 70;

std::pair<std::string, std::string> default_axes(Scenario s)
{
    switch (s) {
    case Scenario::hole_scan: return {"delta_star", "alpha"};
    case Scenario::greedy_tiling: return {"delta_star", "leftover_per_part"};
    case Scenario::factor_decision: return {"delta_star", "exists"};
    case Scenario::absorber_census: return {"instance", "min_count"};
    case Scenario::absorbing_pipeline: return {"instance", "r_size"};
    case Scenario::appendix_invariants: return {"delta_star", "violations"};
    case Scenario::threshold_sweep: return {"p", "exists"};
    }
    return {"instance", "delta_star"};
}

std::optional<double> numeric(const ResultRecord& r, const std::string& name)
{
    const json* v = nullptr;
    json index;
    if (name == "instance") {
        index = r.instance.at("index");
        v = &index;
    }
    else {
        v = r.metric(name);
    }
    if (!v || v->is_null())
        return std::nullopt;
    if (v->is_boolean())
        return v->get<bool>() ? 1.0 : 0.0;
    if (v->is_number())
        return v->get<double>();
    return std::nullopt;
}

std::string fmt(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo, hi;
    double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

Range range_of(const std::vector<double>& v)
{
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*lo == *hi)
        return {*lo - 0.5, *hi + 0.5};
    return {*lo, *hi};
}

void frame(std::ostringstream& os, const std::string& title, const std::string& xl, const std::string& yl)
{
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"#ffffff\"/>\n"
       << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
       << "</text>\n"
       << "<text x=\"" << fmt(kLeft + (kWidth - kLeft - kRight) / 2) << "\" y=\"" << fmt(kHeight - 18)
       << "\" text-anchor=\"middle\">" << escape(xl) << "</text>\n"
       << "<text x=\"20\" y=\"" << fmt(kTop + (kHeight - kTop - kBottom) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
       << fmt(kTop + (kHeight - kTop - kBottom) / 2) << ")\">" << escape(yl) << "</text>\n";
}

void axes(std::ostringstream& os)
{
    const double x0 = kLeft, y0 = kHeight - kBottom, x1 = kWidth - kRight;
    os << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x1) << "\" y2=\"" << fmt(y0)
       << "\" stroke=\"#000000\"/>\n"
       << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x0) << "\" y2=\"" << fmt(kTop)
       << "\" stroke=\"#000000\"/>\n";
}

void tick_x(std::ostringstream& os, double x, const std::string& label)
{
    const double y0 = kHeight - kBottom;
    os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(y0 + 5)
       << "\" stroke=\"#000000\"/>\n"
       << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y0 + 20) << "\" text-anchor=\"middle\">" << escape(label) << "</text>\n";
}

void tick_y(std::ostringstream& os, double y, const std::string& label)
{
    os << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft) << "\" y2=\"" << fmt(y)
       << "\" stroke=\"#000000\"/>\n"
       << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">" << escape(label) << "</text>\n";
}

std::string color(double t)
{
    const int lo[3] = {247, 251, 255}, hi[3] = {8, 48, 107};
    char buf[8];
    int c[3];
    for (int i = 0; i < 3; ++i)
        c[i] = static_cast<int>(std::lround(lo[i] + t * (hi[i] - lo[i])));
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
    return buf;
}

} // namespace

std::string render_plot(const std::vector<ResultRecord>& records, PlotKind kind, const PlotOptions& opt)
{
    if (records.empty())
        throw Error("no records to plot");
    const std::string& scenario = records.front().scenario;
    for (const auto& r : records)
        if (r.scenario != scenario)
            throw Error("records mix scenarios " + scenario + " and " + r.scenario);
    Scenario s = scenario_from_name(scenario);
    auto [dx, dy] = default_axes(s);
    std::string xn = opt.x.empty() ? dx : opt.x, yn = opt.y.empty() ? dy : opt.y, vn = opt.value;
    if (kind == PlotKind::heatmap && opt.x.empty() && opt.y.empty() && vn.empty() && s == Scenario::threshold_sweep) {
        yn = "delta_star";
        vn = "exists";
    }
    const auto& names = scenario_metrics(s);
    for (const auto* n : {&xn, &yn, &vn})
        if (!n->empty() && *n != "instance" && std::find(names.begin(), names.end(), *n) == names.end())
            throw Error("unknown metric '" + *n + "'");

    std::ostringstream os;
    const double px0 = kLeft, px1 = kWidth - kRight, py0 = kHeight - kBottom, py1 = kTop;
    if (kind == PlotKind::line) {
        std::map<double, std::pair<double, int>> agg;
        for (const auto& r : records) {
            auto x = numeric(r, xn), y = numeric(r, yn);
            if (x && y) {
                auto& a = agg[*x];
                a.first += *y;
                ++a.second;
            }
        }
        if (agg.empty())
            throw Error("no plottable values");
        std::vector<double> xs, ys;
        for (const auto& [x, a] : agg) {
            xs.push_back(x);
            ys.push_back(a.first / a.second);
        }
        Range rx = range_of(xs), ry = range_of(ys);
        frame(os, scenario + ": mean " + yn + " by " + xn, xn, yn);
        axes(os);
        for (int t = 0; t <= 4; ++t) {
            double vx = rx.lo + (rx.hi - rx.lo) * t / 4, vy = ry.lo + (ry.hi - ry.lo) * t / 4;
            tick_x(os, rx.map(vx, px0, px1), fmt(vx));
            tick_y(os, ry.map(vy, py0, py1), fmt(vy));
        }
        os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i)
            os << (i ? " " : "") << fmt(rx.map(xs[i], px0, px1)) << ',' << fmt(ry.map(ys[i], py0, py1));
        os << "\"/>\n";
        for (std::size_t i = 0; i < xs.size(); ++i)
            os << "<circle cx=\"" << fmt(rx.map(xs[i], px0, px1)) << "\" cy=\"" << fmt(ry.map(ys[i], py0, py1))
               << "\" r=\"3\" fill=\"#1f77b4\"><title>" << fmt(xs[i]) << ", " << fmt(ys[i]) << "</title></circle>\n";
    }
    else {
        std::map<std::pair<double, double>, std::pair<double, int>> cells;
        std::vector<double> xs, ys;
        for (const auto& r : records) {
            auto x = numeric(r, xn), y = numeric(r, yn);
            if (!x || !y)
                continue;
            double v = 1.0;
            if (!vn.empty()) {
                auto z = numeric(r, vn);
                if (!z)
                    continue;
                v = *z;
            }
            auto& c = cells[{*x, *y}];
            c.first += v;
            ++c.second;
            xs.push_back(*x);
            ys.push_back(*y);
        }
        if (cells.empty())
            throw Error("no plottable values");
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
        std::vector<double> values;
        for (const auto& [_, c] : cells)
            values.push_back(vn.empty() ? c.second : c.first / c.second);
        auto [vlo, vhi] = std::minmax_element(values.begin(), values.end());
        const double lo = *vlo, hi = *vhi;
        const std::string vlabel = vn.empty() ? "count" : "mean " + vn;
        frame(os, scenario + ": " + vlabel + " by " + xn + " and " + yn, xn, yn);
        const double cw = (px1 - px0) / static_cast<double>(xs.size()), ch = (py0 - py1) / static_cast<double>(ys.size());
        std::size_t vi = 0;
        for (const auto& [key, c] : cells) {
            auto ix = std::lower_bound(xs.begin(), xs.end(), key.first) - xs.begin();
            auto iy = std::lower_bound(ys.begin(), ys.end(), key.second) - ys.begin();
            double v = values[vi++];
            double t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
            os << "<rect x=\"" << fmt(px0 + static_cast<double>(ix) * cw) << "\" y=\"" << fmt(py0 - static_cast<double>(iy + 1) * ch)
               << "\" width=\"" << fmt(cw) << "\" height=\"" << fmt(ch) << "\" fill=\"" << color(t) << "\"><title>"
               << fmt(key.first) << ", " << fmt(key.second) << ": " << fmt(v) << "</title></rect>\n";
        }
        axes(os);
        const std::size_t sx = (xs.size() + 9) / 10, sy = (ys.size() + 9) / 10;
        for (std::size_t i = 0; i < xs.size(); i += sx)
            tick_x(os, px0 + (static_cast<double>(i) + 0.5) * cw, fmt(xs[i]));
        for (std::size_t i = 0; i < ys.size(); i += sy)
            tick_y(os, py0 - (static_cast<double>(i) + 0.5) * ch, fmt(ys[i]));
        os << "<text x=\"" << fmt(px1) << "\" y=\"40\" text-anchor=\"end\">" << escape(vlabel) << ": " << fmt(lo)
           << " (light) to " << fmt(hi) << " (dark)</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void emit_plot(const std::vector<ResultRecord>& records, PlotKind kind, const std::string& path, const PlotOptions& opt)
{
    std::string svg = render_plot(records, kind, opt);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path);
    out << svg;
}

} // namespace ptile::lab
