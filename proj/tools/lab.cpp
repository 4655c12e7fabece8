// lab: batch experiment runner.
//   lab run <config.json>                       exit 0 ok, 2 some instances failed, 1 config error
//   lab plot <results.json> --kind line --out plot.svg
//   lab verify <graph.json> --what holes|factor|absorber
//   lab gen <spec.json> --out graph.json

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptile/absorption.hpp"
#include "ptile/error.hpp"
#include "ptile/generators.hpp"
#include "ptile/holes.hpp"
#include "ptile/lab.hpp"
#include "ptile/tiling.hpp"

using json = nlohmann::json;
using namespace ptile;

namespace {

json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot read " + path);
    try {
        return json::parse(in);
    }
    catch (const json::exception& e) {
        throw Error("malformed JSON in " + path + ": " + e.what());
    }
}

// "1:0,2:0,3:0" with 1-based parts.
std::vector<VertexId> parse_target(const std::string& text, const PartiteGraph& g)
{
    std::vector<VertexId> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw Error("target entries look like part:idx");
        out.push_back({std::stoi(item.substr(0, colon)) - 1, std::stoi(item.substr(colon + 1))});
    }
    if (static_cast<int>(out.size()) != g.k())
        throw Error("target needs one vertex per part");
    return out;
}

int cmd_run(const std::string& path, int threads, const std::string& csv, const std::string& out_json)
{
    lab::ExperimentConfig cfg;
    try {
        cfg = lab::load_config(path);
    }
    catch (const std::exception& e) {
        std::cerr << "lab: " << e.what() << '\n';
        return 1;
    }
    if (!csv.empty())
        cfg.csv_path = csv;
    if (!out_json.empty())
        cfg.json_path = out_json;
    auto records = lab::run(cfg, threads);
    lab::write_outputs(cfg, records);
    int failed = 0;
    for (const auto& r : records)
        failed += r.status != "ok";
    std::cerr << lab::scenario_name(cfg.scenario) << " [" << cfg.hash << "]: " << records.size() << " instances, "
              << failed << " failed\n";
    if (cfg.csv_path.empty() && cfg.json_path.empty())
        std::cout << lab::records_to_csv(records, cfg.record_timing);
    return failed ? 2 : 0;
}

int cmd_plot(const std::string& path, const std::string& kind, const std::string& out, const lab::PlotOptions& opt)
{
    auto records = lab::records_from_json(read_json(path));
    lab::emit_plot(records, lab::plot_kind_from_name(kind), out, opt);
    return 0;
}

int cmd_verify(const std::string& path, const std::string& what, int r, int cap, const std::string& target, int count)
{
    auto g = load_graph(path);
    json report;
    if (what == "holes") {
        auto rep = alpha_star_exact(g, r, cap < 0 ? kDefaultHoleCap : cap);
        report = hole_report_to_json(rep);
        report["verified"] = rep.alpha == 0 || verify_hole(g, rep.witness);
    }
    else if (what == "factor") {
        auto res = exact_transversal_factor(g, cap < 0 ? kDefaultFactorCap : cap);
        report = factor_result_to_json(g, res);
        report["validated"] = !res.factor || is_factor_of(g, *res.factor, VertexSet::full_of(g));
    }
    else {
        std::vector<VertexId> s;
        if (target.empty())
            for (int i = 0; i < g.k(); ++i)
                s.push_back({i, 0});
        else
            s = parse_target(target, g);
        auto family = disjoint_absorbers(g, s, count);
        json list = json::array();
        for (const auto& a : family) {
            validate_absorber(g, a);
            list.push_back(absorber_to_json(g, a));
        }
        json t = json::array();
        for (auto v : s)
            t.push_back(vertex_to_json(v));
        report = {{"target", t}, {"count", family.size()}, {"absorbers", list}, {"validated", true}};
    }
    std::cout << report.dump(2) << '\n';
    return 0;
}

int cmd_gen(const std::string& path, const std::string& out)
{
    auto spec = gen_spec_from_json(read_json(path));
    auto gen = generate(spec);
    save_graph(gen.graph, out);
    std::cout << gen.report.dump() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Transversal tiling laboratory"};
    app.require_subcommand(1);

    std::string config, csv, out_json;
    int threads = 0;
    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config, "experiment config (JSON)")->required();
    run->add_option("--threads", threads, "worker count (default: LAB_THREADS or hardware)");
    run->add_option("--csv", csv, "override the CSV output path");
    run->add_option("--json", out_json, "override the JSON output path");

    std::string results, kind = "line", out;
    lab::PlotOptions popt;
    auto* plot = app.add_subcommand("plot", "render results as SVG");
    plot->add_option("results", results, "results JSON written by lab run")->required();
    plot->add_option("--kind", kind, "line or heatmap")->check(CLI::IsMember({"line", "heatmap"}));
    plot->add_option("--out", out, "output SVG path")->required();
    plot->add_option("--x", popt.x, "x metric");
    plot->add_option("--y", popt.y, "y metric");
    plot->add_option("--value", popt.value, "heatmap cell metric (default: record count)");

    std::string graph, what, target;
    int r = 2, cap = -1, count = 4;
    auto* verify = app.add_subcommand("verify", "analyse a single graph file");
    verify->add_option("graph", graph, "graph JSON")->required();
    verify->add_option("--what", what, "holes, factor or absorber")
        ->required()
        ->check(CLI::IsMember({"holes", "factor", "absorber"}));
    verify->add_option("--r", r, "hole order (holes)");
    verify->add_option("--cap", cap, "exact-mode part size cap");
    verify->add_option("--target", target, "absorber target, e.g. 1:0,2:0,3:0");
    verify->add_option("--count", count, "number of disjoint absorbers to look for (-1: all)");

    std::string spec, gen_out;
    auto* gen = app.add_subcommand("gen", "generate a graph from a generator spec");
    gen->add_option("spec", spec, "generator spec (JSON)")->required();
    gen->add_option("--out", gen_out, "output graph path")->required();

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*run)
            return cmd_run(config, threads, csv, out_json);
        if (*plot)
            return cmd_plot(results, kind, out, popt);
        if (*verify)
            return cmd_verify(graph, what, r, cap, target, count);
        return cmd_gen(spec, gen_out);
    }
    catch (const std::exception& e) {
        std::cerr << "lab: " << e.what() << '\n';
        return 1;
    }
}
