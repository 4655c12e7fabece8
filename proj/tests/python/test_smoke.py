import xml.etree.ElementTree as ET

import pytest

import ptile


def test_graph_basics():
    g = ptile.complete_blowup("K3", 4)
    assert (g.k, g.n, g.edge_count()) == (3, 4, 48)
    assert g.has_edge((1, 0), (2, 3))
    assert not g.has_edge((1, 0), (1, 1))
    again = ptile.Graph.from_json(g.to_json())
    assert again.to_json() == g.to_json()


def test_holes_and_factors():
    g = ptile.complete_blowup("K3", 4)
    assert ptile.delta_star(g) == 4
    assert ptile.alpha_star_exact(g, 2)["alpha"] == 0
    assert ptile.exact_transversal_factor(g)["exists"] is True
    assert ptile.greedy_tiling(g)["leftover_per_part"] == 0
    with pytest.raises(ptile.PtileError, match="exact mode refused"):
        ptile.alpha_star_exact(ptile.complete_blowup("K3", 20), 2)


def test_space_barrier_has_no_factor():
    g, report = ptile.generate({"family": "space_barrier", "pattern": "C4", "n": 8, "seed": 1})
    assert report["edges_added"] == 113
    assert ptile.delta_star(g) == 1
    assert ptile.exact_transversal_factor(g)["exists"] is False


def test_path_and_absorbers():
    g = ptile.complete_blowup("C5", 3)
    path = ptile.find_transversal_path(g, 4, 2, [(4, [0, 1]), (5, [2]), (1, [0]), (2, [1])])
    assert [v[0] for v in path] == [4, 5, 1, 2]
    assert all(g.has_edge(a, b) for a, b in zip(path, path[1:]))
    k3 = ptile.complete_blowup("K3", 12)
    absorbers = ptile.disjoint_absorbers(k3, [(1, 0), (2, 0), (3, 0)])
    assert len(absorbers) == 3


def test_template():
    found = ptile.generate_template(2, 1, 1000, 1)
    assert found["tries"] == 9
    assert ptile.verify_template(found["template"])["ok"] is True


def test_appendix_check():
    g = ptile.random_spanning_subgraph(ptile.complete_blowup("C5", 6), 0.3, 4)
    out = ptile.appendix_check(g, 1)
    assert out["report"]["status"] == "pass"


def test_lab_run_and_plot():
    config = {
        "scenario": "threshold_sweep",
        "gen": {"family": "random_subgraph", "pattern": "K3", "n": 6},
        "params": {"p_from": 0.6, "p_to": 1.0, "p_step": 0.2, "seeds": 3},
        "seed": 2,
    }
    results = ptile.lab_run(config)
    assert len(results["records"]) == 9
    assert results == ptile.lab_run(config, threads=2)
    for kind in ("line", "heatmap"):
        svg = ptile.lab_plot(results, kind)
        root = ET.fromstring(svg.encode())
        assert root.tag.endswith("svg")
    with pytest.raises(ptile.PtileError, match="config"):
        ptile.lab_run({"scenario": "nope", "gen": {"n": 3}})
