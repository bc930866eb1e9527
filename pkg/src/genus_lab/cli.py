"""``genus-lab`` command line.

Exit codes: 0 success, 1 a verification failed, 2 usage or input error.
Settings resolve as: command-line flag, then ``--config`` file
(``key = value`` lines), then ``GENUS_LAB_WORKERS`` for the worker count,
then built-in defaults.

A graph argument is read as a ``.cmap`` file when a file of that name exists,
otherwise as an inline family spec such as ``bouquet:2``, ``antiprism:9`` or
``counterexample:m=6,k=1,b=1,d=2``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import families as fam
from .counterexample import (
    LimitExceeded,
    PlanError,
    log_concavity_report,
    log_convexity_certificate,
    verify_coefficient_inequalities,
    verify_flip_family,
)
from .distribution import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    exact_distribution,
    sampled_distribution,
)
from .map_core import CombinatorialMap, Cycle, Graph, MapError, cut_components, dual_graph, format_cmap, read_cmap
from .topology import (
    TopologyError,
    cofacial_sparsity,
    face_width,
    freely_homotopic_disjoint,
    is_contractible,
    is_facial,
    is_peripheral_cycle,
    is_peripheral_family,
    is_surface_separating,
    vertex_connectivity,
)

SCHEMA_VERSION = 1

log = logging.getLogger("genus_lab")


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# Configuration
# --------------------------------------------------------------------------


@dataclass
class RunConfig:
    budget: int = DEFAULT_BUDGET
    workers: int = 1
    seed: int = 0
    output: str = "json"
    checkpoint: str | None = None


def _read_config_file(path: str) -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return values


def resolve_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    cfg = RunConfig()
    if "GENUS_LAB_WORKERS" in environ:
        cfg.workers = int(environ["GENUS_LAB_WORKERS"])
    if getattr(args, "config", None):
        for key, value in _read_config_file(args.config).items():
            if key not in RunConfig.__dataclass_fields__:
                raise UsageError(f"unknown config key {key!r}")
            setattr(cfg, key, value if key in ("output", "checkpoint") else int(value))
    for key in RunConfig.__dataclass_fields__:
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    if cfg.budget < 1 or cfg.workers < 1:
        raise UsageError("budget and workers must be at least 1")
    if cfg.output not in ("json", "csv"):
        raise UsageError("output must be json or csv")
    return cfg


# --------------------------------------------------------------------------
# Family specs
# --------------------------------------------------------------------------


def _spec_args(text: str) -> tuple[list[int], dict[str, int]]:
    pos, kw = [], {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" in part:
            key, value = part.split("=", 1)
            kw[key.strip()] = int(value)
        else:
            pos.append(int(part))
    return pos, kw


def _petersen():
    from .lemmas import petersen_graph

    return petersen_graph(), None


def _construction(build, cls):
    def make(*a, **kw):
        c = build(cls(*a, **kw))
        return c.graph, c.base_map
    return make


def _generalized(*a, **kw):
    c = fam.generalized_cylinder(*a, **kw)
    return c.graph, c.base_map


def _disk(length):
    filler = fam.disk_filler(length)
    return filler.graph, filler.base_map


FAMILIES = {
    "bouquet": lambda n: (fam.bouquet(n), None),
    "dipole": lambda n: (fam.dipole(n), None),
    "cycle": fam.cycle_graph,
    "path": lambda n: (fam.path_graph(n), None),
    "complete": lambda n: (fam.complete_graph(n), None),
    "k4": fam.k4,
    "octahedron": fam.octahedron,
    "petersen": _petersen,
    "interleaved": lambda: (lambda m: (m.graph, m))(fam.bouquet_interleaved()),
    "torus": fam.torus_grid,
    "antiprism": fam.antiprism,
    "stacked": fam.stacked_antiprism,
    "cylinder": _construction(fam.cylinder_graph, fam.ConstructionParams),
    "counterexample": _construction(fam.counterexample_graph, fam.ConstructionParams),
    "generalized": _generalized,
    "disk": _disk,
}


def load_graph(spec: str) -> tuple[Graph, CombinatorialMap | None]:
    """Resolve a ``.cmap`` path or an inline family spec to a graph and its map (if any)."""
    if Path(spec).is_file():
        cmap = read_cmap(spec)
        return cmap.graph, cmap
    name, _, rest = spec.partition(":")
    if name not in FAMILIES:
        raise UsageError(f"unknown family {name!r}; known: {', '.join(sorted(FAMILIES))}")
    try:
        pos, kw = _spec_args(rest)
    except ValueError:
        raise UsageError(f"bad arguments in family spec {spec!r}") from None
    try:
        return FAMILIES[name](*pos, **kw)
    except TypeError as exc:
        raise UsageError(f"bad arguments for {name}: {exc}") from None


def _parse_cycle(graph: Graph, text: str) -> Cycle:
    try:
        verts = [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"bad cycle {text!r}") from None
    return Cycle.from_vertices(graph, verts)


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------


def _emit_json(report: dict, out) -> None:
    report = {"schema_version": SCHEMA_VERSION, **report}
    out.write(json.dumps(report, sort_keys=True, indent=2) + "\n")


def _emit_csv(header: list[str], rows: list[list], out) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    out.write(buf.getvalue())


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def cmd_family(args, cfg, out) -> int:
    graph, cmap = load_graph(args.spec)
    if args.cmap:
        if cmap is None:
            raise UsageError(f"{args.spec} has no canonical embedding")
        out.write(format_cmap(cmap))
        return 0
    report = {"family": args.spec, "census": fam.census(graph, cmap)}
    name = args.spec.partition(":")[0]
    if name in ("cylinder", "counterexample", "generalized"):
        pos, kw = _spec_args(args.spec.partition(":")[2])
        if name == "generalized":
            construction = fam.generalized_cylinder(*pos, **kw)
        else:
            params = fam.ConstructionParams(*pos, **kw)
            build = fam.cylinder_graph if name == "cylinder" else fam.counterexample_graph
            construction = build(params)
            report["nu"] = construction.nu()
        report["connectors"] = [
            {"zone": c.zone, "index": c.index, "length": c.length,
             "flip_edge": c.flip_edge, "cross_edges": len(c.cross_edges)}
            for c in construction.connectors
        ]
    _emit_json(report, out)
    return 0


def cmd_distribution(args, cfg, out) -> int:
    spec = args.family or args.spec
    if spec is None:
        raise UsageError("distribution needs a graph (positional or --family)")
    graph, cmap = load_graph(spec)
    if args.sample is not None:
        result = sampled_distribution(graph, args.sample, cfg.seed, cfg.workers)
        body = result.to_dict()
        report = {"graph": fam.census(graph), "mode": "sampled", **body}
        if cfg.output == "csv":
            rows = [[g, c, f"{result.ci[g][0]:.12f}", f"{result.ci[g][1]:.12f}"]
                    for g, c in sorted(result.counts.items())]
            _emit_csv(["genus", "samples", "ci_low", "ci_high"], rows, out)
            return 0
    else:
        result = exact_distribution(graph, cfg.budget, cfg.workers, cfg.checkpoint,
                                    max_chunks=args.max_chunks, chunk_size=args.chunk_size)
        if result is None:
            log.info("stopped early; resume with the same --checkpoint")
            _emit_json({"mode": "exact", "complete": False}, out)
            return 0
        if cfg.output == "csv":
            _emit_csv(["genus", "count"], [[g, c] for g, c in sorted(result.counts.items())], out)
            return 0
        report = {"graph": fam.census(graph), "mode": "exact", **result.to_dict(), "ci": None}
    _emit_json(report, out)
    return 0


PREDICATES = ("facial", "peripheral", "peripheral-family", "separating", "contractible",
              "homotopic", "sparsity", "face-width", "connectivity")


def cmd_check(args, cfg, out) -> int:
    spec = args.map or args.family
    if spec is None:
        raise UsageError("check needs --map or --family")
    graph, cmap = load_graph(spec)
    cycles = [_parse_cycle(graph, text) for text in args.cycle or []]
    pred = args.predicate
    needs_map = pred not in ("peripheral", "peripheral-family", "connectivity")
    if needs_map and cmap is None:
        raise UsageError(f"{pred} needs an embedded graph")
    one_cycle = ("facial", "peripheral", "separating", "contractible")
    if pred in one_cycle and len(cycles) != 1:
        raise UsageError(f"{pred} takes exactly one --cycle")
    if pred == "homotopic" and len(cycles) != 2:
        raise UsageError("homotopic takes exactly two --cycle")

    report: dict = {"predicate": pred, "cycles": [list(c.vertices(graph)) for c in cycles]}
    if pred == "facial":
        report["verdict"] = is_facial(cmap, cycles[0])
    elif pred == "peripheral":
        report["verdict"] = is_peripheral_cycle(graph, cycles[0])
    elif pred == "peripheral-family":
        report["verdict"] = is_peripheral_family(graph, cycles)
    elif pred in ("separating", "contractible"):
        comps = cut_components(cmap, cycles[0])
        fn = is_surface_separating if pred == "separating" else is_contractible
        report["verdict"] = fn(cmap, cycles[0])
        report["components"] = [{"genus": c.genus, "vertices": len(c.vertices), "boundaries": len(c.boundaries)}
                                for c in comps]
        removed = set(cycles[0].edges())
        report["dual_components"] = _dual_component_count(cmap, removed)
    elif pred == "homotopic":
        report["verdict"] = freely_homotopic_disjoint(cmap, *cycles)
        report["components"] = [{"genus": c.genus, "boundaries": len(c.boundaries)}
                                for c in cut_components(cmap, *cycles)]
    elif pred == "sparsity":
        sp = cofacial_sparsity(cmap, cycles)
        report["verdict"] = sp.sparse
        report["delta"] = list(sp.delta)
    elif pred == "face-width":
        report["verdict"] = face_width(cmap)
    elif pred == "connectivity":
        conn = vertex_connectivity(graph)
        report["verdict"] = conn.value
        report["exact"] = conn.exact
    _emit_json(report, out)
    return 0


def _dual_component_count(cmap: CombinatorialMap, removed_edges: set[int]) -> int:
    dual = dual_graph(cmap)
    kept = Graph(dual.vertex_count, [e for i, e in enumerate(dual.edges) if i not in removed_edges], check=False)
    seen, count = set(), 0
    adj = kept.adjacency()
    for s in range(kept.vertex_count):
        if s in seen:
            continue
        count += 1
        stack = [s]
        seen.add(s)
        while stack:
            v = stack.pop()
            for w in adj[v] - seen:
                seen.add(w)
                stack.append(w)
    return count


def _stringify_counts(report: dict) -> dict:
    for key in ("generated", "distinct", "size_formula"):
        report[key] = str(report[key])
    return report


def cmd_claim1(args, cfg, out) -> int:
    params = fam.ConstructionParams(args.m, args.k, args.b, args.d)
    report = verify_flip_family(params, args.r, args.limit, cfg.workers, cfg.checkpoint,
                                args.chunk_size, args.max_chunks)
    if report is None:
        log.info("stopped early; resume with the same --checkpoint")
        _emit_json({"complete": False}, out)
        return 0
    _emit_json(_stringify_counts(report), out)
    return 0 if report["passed"] else 1


def cmd_analyze(args, cfg, out) -> int:
    try:
        seq = [int(x) for x in args.sequence.split(",")]
    except ValueError:
        raise UsageError(f"bad sequence {args.sequence!r}") from None
    report = log_concavity_report(seq)
    if cfg.output == "csv":
        rows = [[i, seq[i], cls] for i, cls in enumerate(report.classes, 1)]
        _emit_csv(["index", "value", "class"], rows, out)
        return 0
    _emit_json(report.to_dict(), out)
    return 0


def cmd_certify(args, cfg, out) -> int:
    cert = log_convexity_certificate(args.g, args.k, args.d, args.nu, args.r)
    _emit_json({key: str(v) if isinstance(v, int) and not isinstance(v, bool) else v for key, v in cert.items()},
               out)
    return 0


def cmd_inequalities(args, cfg, out) -> int:
    report = verify_coefficient_inequalities(args.k_max)
    _emit_json(report, out)
    return 0 if report["passed"] else 1


def cmd_selftest(args, cfg, out) -> int:
    from .lemmas import FAULTS, selftest

    if args.fault and args.fault not in FAULTS:
        raise UsageError(f"unknown fault {args.fault!r}")
    report = selftest(args.fault, quick=args.quick)
    _emit_json(report, out)
    return 0 if report["passed"] else 1


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value settings file")
    common.add_argument("--workers", type=int, help="worker processes (default: GENUS_LAB_WORKERS or 1)")
    common.add_argument("--budget", type=int, help=f"max rotation systems to enumerate (default {DEFAULT_BUDGET})")
    common.add_argument("--seed", type=int, help="sampling seed (default 0)")
    common.add_argument("--output", choices=("json", "csv"), help="report format; csv for distributions and sequences")
    common.add_argument("--checkpoint", help="checkpoint file for resumable exact runs")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="genus-lab", description="Genus distributions of graphs via rotation systems.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("family", parents=[common], help="build a family member and print its census")
    p.add_argument("spec")
    p.add_argument("--census", action="store_true", help="emit the JSON census (the default)")
    p.add_argument("--cmap", action="store_true", help="print the canonical map in .cmap format instead")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("distribution", parents=[common], help="genus distribution, exact or sampled")
    p.add_argument("spec", nargs="?")
    p.add_argument("--family")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exhaustive enumeration (default)")
    mode.add_argument("--sample", type=int, metavar="N", help="draw N uniform rotation systems")
    p.add_argument("--chunk-size", type=int, default=1 << 16, help="checkpoint granularity")
    p.add_argument("--max-chunks", type=int, help="stop after this many chunks (with --checkpoint)")
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("check", parents=[common], help="topological predicates on an embedded graph")
    p.add_argument("predicate", choices=PREDICATES)
    p.add_argument("--map", help=".cmap file")
    p.add_argument("--family", help="inline family spec (uses its canonical map)")
    p.add_argument("--cycle", action="append", help='cycle as a vertex list, e.g. "0 1 2"')
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("claim1", parents=[common], help="generate and verify a flip family")
    for name in ("m", "k", "b", "d"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--limit", type=int, default=1 << 16)
    p.add_argument("--chunk-size", type=int, default=4096, help="checkpoint granularity")
    p.add_argument("--max-chunks", type=int, help="stop after this many chunks (with --checkpoint)")
    p.set_defaults(func=cmd_claim1)

    p = sub.add_parser("analyze", parents=[common], help="log-concavity report of an integer sequence")
    p.add_argument("--sequence", required=True, help="comma-separated non-negative integers")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("certify", parents=[common], help="connector-length and log-convexity certificate")
    for name in ("g", "k", "d", "nu", "r"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("inequalities", parents=[common], help="exact check of the coefficient inequalities")
    p.add_argument("--k-max", type=int, default=100)
    p.set_defaults(func=cmd_inequalities)

    p = sub.add_parser("selftest", parents=[common], help="run the lemma, oracle and inequality suites")
    p.add_argument("--quick", action="store_true", help="truncate the exhaustive sweeps")
    p.add_argument("--fault", help="inject a fault (sigma) to exercise failure reporting")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg, out)
    except (UsageError, fam.ParameterError, MapError, TopologyError, PlanError, LimitExceeded,
            BudgetExceeded, ValueError, OSError) as exc:
        print(f"genus-lab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
