#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ptile/absorbing_set.hpp"
#include "ptile/absorption.hpp"
#include "ptile/error.hpp"
#include "ptile/generators.hpp"
#include "ptile/holes.hpp"
#include "ptile/lab.hpp"
#include "ptile/mixed_tiling.hpp"
#include "ptile/template.hpp"
#include "ptile/tiling.hpp"

namespace py = pybind11;
using json = nlohmann::json;
using namespace ptile;

// Structured results cross the boundary as JSON text; the Python package decodes them.

namespace {

std::vector<VertexId> vertices_from(const std::vector<std::pair<int, int>>& list)
{
    std::vector<VertexId> out;
    for (auto [p, i] : list)
        out.push_back({p - 1, i});
    return out;
}

std::string absorbing_check(const PartiteGraph& g, const std::string& params, int trials, std::uint64_t seed)
{
    auto doc = json::parse(params);
    AbsorbingParams p;
    p.m = doc.value("m", p.m);
    p.beta_m = doc.value("beta_m", p.beta_m);
    p.q = doc.value("q", p.q);
    p.tau = doc.value("tau", p.tau);
    p.beta_prime = doc.value("beta_prime", p.beta_prime);
    p.gamma = doc.value("gamma", p.gamma);
    p.seed = doc.value("seed", p.seed);
    auto as = build_absorbing_set(g, p);
    AbsorbVerifyOptions vo;
    vo.exhaustive_per_part = doc.value("exhaustive_per_part", vo.exhaustive_per_part);
    vo.exhaustive_limit = doc.value("exhaustive_limit", vo.exhaustive_limit);
    auto v = verify_absorbing_property(g, as, as.xi, trials, seed, vo);
    return json{{"set", absorbing_set_to_json(g, as)}, {"verdict", absorb_verdict_to_json(v)}}.dump();
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Transversal tilings of k-partite graphs";
    py::register_exception<Error>(m, "PtileError", PyExc_ValueError);

    py::class_<PartiteGraph>(m, "Graph")
        .def_static("from_json", [](const std::string& text) { return graph_from_json(json::parse(text)); })
        .def_static("load", &load_graph)
        .def("to_json", [](const PartiteGraph& g) { return graph_to_json(g).dump(); })
        .def("save", [](const PartiteGraph& g, const std::string& path) { save_graph(g, path); })
        .def_property_readonly("k", &PartiteGraph::k)
        .def_property_readonly("n", &PartiteGraph::n)
        .def("edge_count", &PartiteGraph::edge_count)
        .def("has_edge", [](const PartiteGraph& g, std::pair<int, int> a, std::pair<int, int> b) {
            return g.has_edge({a.first - 1, a.second}, {b.first - 1, b.second});
        })
        .def("__repr__", [](const PartiteGraph& g) {
            return "<Graph k=" + std::to_string(g.k()) + " n=" + std::to_string(g.n()) + " edges=" +
                   std::to_string(g.edge_count()) + ">";
        });

    m.def("complete_blowup", [](const std::string& pattern, int n) {
        return complete_blowup(pattern_from_json(json(pattern)), n);
    }, py::arg("pattern"), py::arg("n"));
    m.def("random_spanning_subgraph", &random_spanning_subgraph, py::arg("g"), py::arg("p"), py::arg("seed"));
    m.def("generate", [](const std::string& spec) {
        auto gen = generate(gen_spec_from_json(json::parse(spec)));
        return py::make_tuple(gen.graph, gen.report.dump());
    }, py::arg("spec"));

    m.def("delta_star", &delta_star);
    m.def("alpha_star_exact", [](const PartiteGraph& g, int r, int cap) {
        return hole_report_to_json(alpha_star_exact(g, r, cap)).dump();
    }, py::arg("g"), py::arg("r"), py::arg("cap") = kDefaultHoleCap);
    m.def("alpha2_degree_bound", &alpha2_degree_bound);

    m.def("greedy_tiling", [](const PartiteGraph& g) {
        auto t = g.pattern().is_complete() ? greedy_clique_tiling(g) : greedy_cycle_tiling(g);
        return tiling_to_json(g, t).dump();
    });
    m.def("exact_transversal_factor", [](const PartiteGraph& g, int cap) {
        return factor_result_to_json(g, exact_transversal_factor(g, cap)).dump();
    }, py::arg("g"), py::arg("cap") = kDefaultFactorCap);
    m.def("find_transversal_path", [](const PartiteGraph& g, int i, int j, const std::vector<std::pair<int, std::vector<int>>>& sets) {
        VertexSetFamily f;
        for (const auto& [part, idx] : sets) {
            Bits b(static_cast<std::size_t>(g.n()));
            for (int a : idx)
                b.set(static_cast<std::size_t>(a));
            f.push_back({part - 1, b});
        }
        std::optional<std::vector<std::pair<int, int>>> out;
        if (auto p = find_transversal_path(g, i - 1, j - 1, f)) {
            out.emplace();
            for (auto v : *p)
                out->emplace_back(v.part + 1, v.idx);
        }
        return out;
    }, py::arg("g"), py::arg("i"), py::arg("j"), py::arg("sets"));

    m.def("disjoint_absorbers", [](const PartiteGraph& g, const std::vector<std::pair<int, int>>& target, int count) {
        json out = json::array();
        for (const auto& a : disjoint_absorbers(g, vertices_from(target), count)) {
            validate_absorber(g, a);
            out.push_back(absorber_to_json(g, a));
        }
        return out.dump();
    }, py::arg("g"), py::arg("target"), py::arg("count") = -1);

    m.def("generate_template", [](int mm, int beta, int tries, std::uint64_t seed, int cap) {
        auto s = generate_template(mm, beta, tries, seed, cap);
        return json{{"tries", s.tries}, {"template", s.tmpl ? template_to_json(*s.tmpl) : json()}}.dump();
    }, py::arg("m"), py::arg("beta_m"), py::arg("max_tries") = 1000, py::arg("seed") = 0,
       py::arg("cap") = kTemplateDegreeCap);
    m.def("verify_template", [](const std::string& text) {
        auto c = verify_template(template_from_json(json::parse(text)));
        return json{{"ok", c.ok}, {"reason", c.reason}, {"violating", c.violating}, {"subsets", c.subsets}}.dump();
    });

    m.def("absorbing_check", &absorbing_check, py::arg("g"), py::arg("params"), py::arg("trials") = 100,
          py::arg("seed") = 0);

    m.def("appendix_check", [](const PartiteGraph& g, std::uint64_t seed) {
        auto t = maximal_mixed_tiling(g, seed);
        return json{{"tiling", mixed_tiling_to_json(t)}, {"report", appendix_report_to_json(check_appendix_invariants(g, t))}}
            .dump();
    }, py::arg("g"), py::arg("seed") = 0);

    m.def("lab_run", [](const std::string& config, const std::string& base_dir, int threads) {
        auto cfg = lab::parse_config(json::parse(config), base_dir);
        py::gil_scoped_release release;
        auto recs = lab::run(cfg, threads);
        return lab::records_to_json(cfg, recs).dump();
    }, py::arg("config"), py::arg("base_dir") = ".", py::arg("threads") = 0);
    m.def("lab_plot", [](const std::string& results, const std::string& kind) {
        return lab::render_plot(lab::records_from_json(json::parse(results)), lab::plot_kind_from_name(kind));
    }, py::arg("results"), py::arg("kind") = "line");
}
