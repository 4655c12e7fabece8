"""Transversal tilings of k-partite graphs.

Parts are 1-based and vertex offsets 0-based, as in the graph JSON format. Structured
results come back as dictionaries decoded from the library's JSON output.
"""

import json as _json

from . import _core
from ._core import (
    Graph,
    PtileError,
    alpha2_degree_bound,
    complete_blowup,
    delta_star,
    find_transversal_path,
    random_spanning_subgraph,
)

__all__ = [
    "Graph",
    "PtileError",
    "absorbing_check",
    "alpha2_degree_bound",
    "alpha_star_exact",
    "appendix_check",
    "complete_blowup",
    "delta_star",
    "disjoint_absorbers",
    "exact_transversal_factor",
    "find_transversal_path",
    "generate",
    "generate_template",
    "greedy_tiling",
    "lab_plot",
    "lab_run",
    "random_spanning_subgraph",
    "verify_template",
]


def generate(spec):
    graph, report = _core.generate(_json.dumps(spec))
    return graph, _json.loads(report)


def alpha_star_exact(g, r, cap=10):
    return _json.loads(_core.alpha_star_exact(g, r, cap))


def greedy_tiling(g):
    return _json.loads(_core.greedy_tiling(g))


def exact_transversal_factor(g, cap=12):
    return _json.loads(_core.exact_transversal_factor(g, cap))


def disjoint_absorbers(g, target, count=-1):
    return _json.loads(_core.disjoint_absorbers(g, [tuple(v) for v in target], count))


def generate_template(m, beta_m, max_tries=1000, seed=0, cap=40):
    return _json.loads(_core.generate_template(m, beta_m, max_tries, seed, cap))


def verify_template(template):
    return _json.loads(_core.verify_template(_json.dumps(template)))


def absorbing_check(g, params, trials=100, seed=0):
    return _json.loads(_core.absorbing_check(g, _json.dumps(params), trials, seed))


def appendix_check(g, seed=0):
    return _json.loads(_core.appendix_check(g, seed))


def lab_run(config, base_dir=".", threads=0):
    return _json.loads(_core.lab_run(_json.dumps(config), base_dir, threads))


def lab_plot(results, kind="line"):
    return _core.lab_plot(_json.dumps(results), kind)
