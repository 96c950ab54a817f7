"""Command-line front end.

Subcommands mirror the library: `graphs` (count / dissymmetry / blocks),
`virial` (invert / compare / mu), `weights` (estimate / kp-check / stability)
and `bounds` (compute).  Configs are JSON files carrying a top-level
``"schema": "virialkit/1"`` key; output is JSON on stdout (CSV as an opt-in
projection for coefficient tables).  Every run is deterministic given the
config and ``--seed``: floats are serialized with 17 significant digits so
re-runs are byte-identical.

Exit codes: 0 when all requested checks pass, 1 when a check fails, 2 for
usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import bounds as bounds_mod
from . import graphs as graphs_mod
from . import virial as virial_mod
from . import weights as weights_mod
from .series import MPSeries, MultiIndex, Truncation, admissible_indices
from .weights import McParams, McWeightSource, SyntheticBlockModel

SCHEMA = "virialkit/1"


# -- deterministic JSON -------------------------------------------------------


def _format_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError(f"non-finite float {x} in JSON output")
    return format(x, ".17g")


def dumps(doc, indent: int = 0) -> str:
    """JSON with deterministic float formatting (17 significant digits)."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(doc, dict):
        if not doc:
            return "{}"
        rows = [f'{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}' for k, v in doc.items()]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(doc, (list, tuple)):
        if not doc:
            return "[]"
        rows = [f"{inner}{dumps(v, indent + 1)}" for v in doc]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    if isinstance(doc, bool) or doc is None:
        return json.dumps(doc)
    if isinstance(doc, int):
        return str(doc)
    if isinstance(doc, float):
        return _format_float(doc)
    if isinstance(doc, Fraction):
        return json.dumps(str(doc))
    if isinstance(doc, str):
        return json.dumps(doc)
    raise TypeError(f"cannot serialize {type(doc).__name__}")


def compact_index(n: MultiIndex) -> str:
    """Multi-index as a compact sum like "2·e1+1·e3"."""
    if not n:
        return "0"
    return "+".join(f"{e}·e{s}" for s, e in n.items())


def _coeff_out(value):
    return str(value) if isinstance(value, Fraction) else float(value)


def _load_json(path: str) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    schema = doc.get("schema")
    if schema is not None and schema != SCHEMA:
        raise ValueError(f"unsupported config schema {schema!r} (expected {SCHEMA!r})")
    return doc


def _emit(doc, args) -> None:
    text = dumps(doc) + "\n"
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _coefficient_rows(series: MPSeries, method: str) -> list[dict]:
    return [{"n": {str(s): e for s, e in n.items()}, "c": _coeff_out(c), "method": method}
            for n, c in series.sorted_terms()]


def _emit_csv(rows: list[dict], args) -> None:
    lines = ["n,value,method"]
    for row in rows:
        n = MultiIndex({int(s): e for s, e in row["n"].items()})
        lines.append(f"{compact_index(n)},{row['c']},{row['method']}")
    text = "\n".join(lines) + "\n"
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- weight sources from model configs ----------------------------------------


def _weight_source(model, args):
    """A synthetic model is its own exact weight source; interaction models
    are wrapped in a seeded Monte Carlo source."""
    if isinstance(model, SyntheticBlockModel):
        return model
    params = McParams(args.samples, args.seed, args.scheme)
    return McWeightSource(model, params)


# -- graphs --------------------------------------------------------------------


def cmd_graphs_count(args) -> int:
    count = sum(1 for _ in graphs_mod.enumerate_graphs(args.n, args.graph_class))
    _emit({"command": "graphs count", "n": args.n, "class": args.graph_class,
           "count": count}, args)
    return 0


def cmd_graphs_dissymmetry(args) -> int:
    results = []
    all_pass = True
    for g in graphs_mod.enumerate_graphs(args.n, "connected"):
        lhs, rhs = graphs_mod.dissymmetry_check(g)
        ok = lhs == rhs
        all_pass &= ok
        results.append({"edges": [list(e) for e in g.sorted_edges()],
                        "lhs": lhs, "rhs": rhs, "pass": ok})
    _emit({"command": "graphs dissymmetry", "n": args.n, "graphs": len(results),
           "all_pass": all_pass, "results": results}, args)
    return 0 if all_pass else 1


def cmd_graphs_blocks(args) -> int:
    g = graphs_mod.graph_from_json(_load_json(args.input))
    d = graphs_mod.block_decomposition(g)
    tree = graphs_mod.block_cut_tree(d)
    _emit({
        "command": "graphs blocks",
        "n": g.n,
        "blocks": [{"vertices": list(b.vertices),
                    "edges": [list(e) for e in sorted(b.edges)]} for b in d.blocks],
        "articulation_points": sorted(d.articulation_points),
        "block_cut_tree": {"block_count": tree.block_count,
                           "cut_vertices": list(tree.cut_vertices),
                           "edges": [list(e) for e in tree.edges]},
    }, args)
    return 0


# -- virial ----------------------------------------------------------------------


METHOD_FLAGS = ("recursive", "lagrange-good", "two-connected")


def _virial_by_method(source, truncation: Truncation, method: str) -> MPSeries:
    if method == "two-connected":
        if not getattr(source, "block_factorizing", False):
            raise ValueError("the two-connected route needs a block-factorizing "
                             "weight source; this model does not declare one")
        return virial_mod.virial_from_two_connected(source, truncation).series
    p = virial_mod.pressure_from_weights(source, truncation)
    if method == "recursive":
        return virial_mod.invert_recursive(p).series
    inverter = virial_mod.LagrangeGoodInverter(p)
    terms = {}
    for n in admissible_indices(truncation, min_degree=1):
        c = inverter.coefficient(n)
        if c != 0:
            terms[n] = c
    return MPSeries(terms, truncation, p.series.field)


def cmd_virial_invert(args) -> int:
    model = weights_mod.model_from_json(_load_json(args.model))
    source = _weight_source(model, args)
    truncation = Truncation(args.degree, args.species_cap or _species_cap(model))
    series = _virial_by_method(source, truncation, args.method)
    rows = _coefficient_rows(series, args.method)
    if args.format == "csv":
        _emit_csv(rows, args)
    else:
        _emit({"command": "virial invert", "model": args.model, "degree": args.degree,
               "method": args.method, "seed": args.seed, "coefficients": rows}, args)
    return 0


def cmd_virial_compare(args) -> int:
    model = weights_mod.model_from_json(_load_json(args.model))
    source = _weight_source(model, args)
    truncation = Truncation(args.degree, args.species_cap or _species_cap(model))
    methods = ["recursive", "lagrange-good"]
    if getattr(source, "block_factorizing", False):
        methods.append("two-connected")
    results = {m: _virial_by_method(source, truncation, m) for m in methods}
    base = results["recursive"]
    diffs = []
    for m, series in results.items():
        if m == "recursive":
            continue
        keys = set(base.terms) | set(series.terms)
        for n in sorted(keys, key=lambda k: k.grlex_key(truncation.species)):
            a, b = base[n], series[n]
            # exact comparison for rationals; --tol is for Monte-Carlo-backed
            # models whose routes agree only up to sampling error
            if a != b and abs(float(a) - float(b)) > args.tol:
                diffs.append({"n": {str(s): e for s, e in n.items()}, "method": m,
                              "recursive": _coeff_out(a), "other": _coeff_out(b)})
    identical = not diffs
    _emit({"command": "virial compare", "model": args.model, "degree": args.degree,
           "methods": methods, "seed": args.seed, "tolerance": args.tol,
           "verdict": "identical" if identical else "mismatch",
           "differences": diffs,
           "coefficients": _coefficient_rows(base, "recursive")}, args)
    return 0 if identical else 1


def cmd_virial_mu(args) -> int:
    model = weights_mod.model_from_json(_load_json(args.model))
    source = _weight_source(model, args)
    truncation = Truncation(args.degree, args.species_cap or _species_cap(model))
    series = virial_mod.chemical_potential(source, truncation, args.species)
    rows = _coefficient_rows(series, "chemical-potential")
    if args.format == "csv":
        _emit_csv(rows, args)
    else:
        _emit({"command": "virial mu", "model": args.model, "degree": args.degree,
               "species": args.species, "seed": args.seed, "correction": rows}, args)
    return 0


def _species_cap(model) -> int:
    if isinstance(model, SyntheticBlockModel):
        return model.species_count
    return max(model.species)


# -- weights ----------------------------------------------------------------------


def cmd_weights_estimate(args) -> int:
    model = weights_mod.model_from_json(_load_json(args.model))
    if isinstance(model, SyntheticBlockModel):
        raise ValueError("weights estimate needs an interaction model")
    cg = graphs_mod.coloured_graph_from_json(_load_json(args.graph))
    params = McParams(args.samples, args.seed, args.scheme)
    est, err = weights_mod.weight_mc(cg, model, params)
    _emit({"command": "weights estimate", "graph": args.graph, "model": args.model,
           "estimate": est, "stderr": err, "sample_count": args.samples,
           "seed": args.seed, "scheme": args.scheme}, args)
    return 0


def cmd_weights_kp_check(args) -> int:
    model = weights_mod.model_from_json(_load_json(args.model))
    if isinstance(model, SyntheticBlockModel):
        raise ValueError("kp-check needs an interaction model")
    spec_doc = _load_json(args.spec)
    radii = {int(k): float(v) for k, v in spec_doc["radii"].items()}
    spec = weights_mod.KpSpec(radii, float(spec_doc["a"]), float(spec_doc.get("b", 0.0)))
    cap = args.species_cap or max(radii)
    report = weights_mod.kp_check(model, spec, cap,
                                  McParams(args.samples, args.seed, args.scheme))
    _emit({"command": "weights kp-check", "model": args.model, "spec": args.spec,
           "species_cap": cap, "seed": args.seed, **report.as_dict()}, args)
    return 0 if report.passed else 1


def cmd_weights_stability(args) -> int:
    model = weights_mod.model_from_json(_load_json(args.model))
    if isinstance(model, SyntheticBlockModel):
        raise ValueError("stability needs an interaction model")
    report = weights_mod.stability_check(model, args.b,
                                         McParams(args.samples, args.seed, args.scheme),
                                         args.max_n)
    _emit({"command": "weights stability", "model": args.model, "seed": args.seed,
           **report.as_dict()}, args)
    return 0 if report.passed else 1


# -- bounds -----------------------------------------------------------------------


def cmd_bounds_compute(args) -> int:
    spec = bounds_mod.domain_spec_from_json(_load_json(args.spec))
    doc = {"command": "bounds compute", "spec": args.spec,
           "density_domain_radii": {str(i): r for i, r in
                                    sorted(bounds_mod.density_domain(spec).radii.items())}}
    if args.model:
        model = weights_mod.model_from_json(_load_json(args.model))
        source = _weight_source(model, args)
        truncation = Truncation(args.degree, _species_cap(model))
        p = virial_mod.pressure_from_weights(source, truncation)
        report = bounds_mod.bound_report(
            spec, p, virial_mod.invert_recursive(p),
            indices=admissible_indices(truncation, min_degree=1),
            samples=args.samples_hypothesis, seed=args.seed)
        doc["seed"] = args.seed
    else:
        report = bounds_mod.bound_report(spec)
    doc.update(report.as_dict())
    _emit(doc, args)
    return 0 if report.passed else 1


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="virialkit",
                                     description="Multispecies virial expansions")
    parser.add_argument("--threads", type=int, default=1,
                        help="cap on internal parallelism (results never depend on it)")
    sub = parser.add_subparsers(dest="group", required=True)

    def add_common(p, samples_default=100_000):
        p.add_argument("--seed", type=int, default=0, help="64-bit seed for any sampling")
        p.add_argument("--samples", type=int, default=samples_default)
        p.add_argument("--scheme", choices=(weights_mod.SCHEME_PSEUDO,
                                            weights_mod.SCHEME_LOW_DISCREPANCY),
                       default=weights_mod.SCHEME_PSEUDO)
        p.add_argument("--output", help="write the JSON/CSV document here instead of stdout")

    graphs = sub.add_parser("graphs", help="enumeration, blocks, dissymmetry")
    gsub = graphs.add_subparsers(dest="command", required=True)
    g_count = gsub.add_parser("count")
    g_count.add_argument("--n", type=int, required=True)
    g_count.add_argument("--class", dest="graph_class", default="connected",
                         choices=graphs_mod.GRAPH_CLASSES)
    g_count.add_argument("--output")
    g_count.set_defaults(handler=cmd_graphs_count)
    g_dis = gsub.add_parser("dissymmetry")
    g_dis.add_argument("--n", type=int, required=True)
    g_dis.add_argument("--output")
    g_dis.set_defaults(handler=cmd_graphs_dissymmetry)
    g_blocks = gsub.add_parser("blocks")
    g_blocks.add_argument("--input", required=True, help="graph JSON file")
    g_blocks.add_argument("--output")
    g_blocks.set_defaults(handler=cmd_graphs_blocks)

    virial = sub.add_parser("virial", help="pressure inversion three ways")
    vsub = virial.add_subparsers(dest="command", required=True)
    v_inv = vsub.add_parser("invert")
    v_inv.add_argument("--model", required=True)
    v_inv.add_argument("--degree", type=int, required=True)
    v_inv.add_argument("--method", choices=METHOD_FLAGS, default="recursive")
    v_inv.add_argument("--species-cap", type=int, default=None)
    v_inv.add_argument("--format", choices=("json", "csv"), default="json")
    add_common(v_inv)
    v_inv.set_defaults(handler=cmd_virial_invert)
    v_cmp = vsub.add_parser("compare")
    v_cmp.add_argument("--model", required=True)
    v_cmp.add_argument("--degree", type=int, required=True)
    v_cmp.add_argument("--species-cap", type=int, default=None)
    v_cmp.add_argument("--tol", type=float, default=0.0,
                       help="absolute tolerance for float-field comparisons "
                            "(exact models should keep 0)")
    add_common(v_cmp)
    v_cmp.set_defaults(handler=cmd_virial_compare)
    v_mu = vsub.add_parser("mu")
    v_mu.add_argument("--model", required=True)
    v_mu.add_argument("--degree", type=int, required=True)
    v_mu.add_argument("--species", type=int, required=True)
    v_mu.add_argument("--species-cap", type=int, default=None)
    v_mu.add_argument("--format", choices=("json", "csv"), default="json")
    add_common(v_mu)
    v_mu.set_defaults(handler=cmd_virial_mu)

    weights = sub.add_parser("weights", help="cluster integrals and criteria checks")
    wsub = weights.add_subparsers(dest="command", required=True)
    w_est = wsub.add_parser("estimate")
    w_est.add_argument("--graph", required=True)
    w_est.add_argument("--model", required=True)
    add_common(w_est)
    w_est.set_defaults(handler=cmd_weights_estimate)
    w_kp = wsub.add_parser("kp-check")
    w_kp.add_argument("--model", required=True)
    w_kp.add_argument("--spec", required=True)
    w_kp.add_argument("--species-cap", type=int, default=None)
    add_common(w_kp)
    w_kp.set_defaults(handler=cmd_weights_kp_check)
    w_st = wsub.add_parser("stability")
    w_st.add_argument("--model", required=True)
    w_st.add_argument("--b", type=float, required=True)
    w_st.add_argument("--max-n", type=int, default=4)
    add_common(w_st, samples_default=2000)
    w_st.set_defaults(handler=cmd_weights_stability)

    bounds = sub.add_parser("bounds", help="convergence constants and audits")
    bsub = bounds.add_subparsers(dest="command", required=True)
    b_cmp = bsub.add_parser("compute")
    b_cmp.add_argument("--spec", required=True)
    b_cmp.add_argument("--model", default=None)
    b_cmp.add_argument("--degree", type=int, default=4)
    b_cmp.add_argument("--samples-hypothesis", type=int, default=500)
    add_common(b_cmp)
    b_cmp.set_defaults(handler=cmd_bounds_compute)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.handler(args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
