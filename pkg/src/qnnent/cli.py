"""Command-line front end: build states, run entropy sweeps, toric and image demos.

Exit codes: 0 success, 1 a requested check failed, 2 bad input, 3 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from . import __version__
from .entanglement import (
    EntropyReport,
    RegionFamily,
    entropy_sweep,
    make_region,
    make_regions,
    parse_region_spec,
    rectangle_regions,
    topological_entropy,
    toric_fan_partition,
)
from .errors import QnnentError, ResourceError
from .geometry import LatticeGeometry, validate_k_local
from .images import (
    SmoothContext,
    enumerate_cycles,
    pixel_grid,
    random_target_set,
    target_state,
)
from .io import atomic_write_bytes, atomic_write_text, fmt
from .networks import DbmSpec, RbmSpec, rbm_to_quasi_product
from .quasi_product import (
    ClusterCover,
    build_cluster_state_1d,
    build_graph_state,
    build_toric_ground,
    toric_cover,
    toric_quasi_product_state,
    toric_stabilizers,
    verify_stabilizers,
)
from .specio import load_network
from .state import DenseState, check_size, dumps_qns, normalize, read_qns

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3
DEMOS = ("cluster", "toric", "graph", "circles")
SECTORS = ("00", "01", "10", "11")


class UsageError(QnnentError):
    """Bad command-line usage detected after argument parsing."""


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    inputs: list[str] = field(default_factory=list)
    seed: int | None = None
    tool_version: str = __version__
    started_at: str = ""
    wall_clock_s: float = 0.0
    outputs: list[str] = field(default_factory=list)
    checks: dict[str, bool] = field(default_factory=dict)


# -- helpers ------------------------------------------------------------------------------


def _parse_alphas(text: str) -> list[float]:
    try:
        alphas = [float(a) for a in text.split(",") if a.strip()]
    except ValueError as exc:
        raise UsageError(f"--alpha expects a comma-separated list of numbers, got {text!r}") from exc
    if not alphas:
        raise UsageError("--alpha needs at least one value")
    bad = [a for a in alphas if not a > 0 or not math.isfinite(a)]
    if bad:
        raise UsageError(f"Renyi index must be positive and finite, got {bad[0]}")
    return alphas


def _parse_lattice(text: str, n: int) -> LatticeGeometry:
    """``chain``, ``chain-open``, ``square:WxH[:open]`` or ``torus:L``."""
    parts = text.split(":")
    try:
        if parts[0] == "chain":
            return LatticeGeometry.chain(n, "periodic")
        if parts[0] == "chain-open":
            return LatticeGeometry.chain(n, "open")
        if parts[0] == "square":
            w, h = (int(x) for x in parts[1].lower().split("x"))
            return LatticeGeometry.square(w, h, boundary=parts[2] if len(parts) > 2 else "periodic")
        if parts[0] == "torus":
            return LatticeGeometry.torus_edges(int(parts[1]), int(parts[1]))
    except (IndexError, ValueError) as exc:
        raise UsageError(f"bad --lattice value {text!r}") from exc
    raise UsageError(f"unknown --lattice kind {parts[0]!r}")


def _table(rows: list[dict], fields: Sequence[str], kind: str) -> str:
    if kind == "json":
        return json.dumps([{k: r[k] for k in fields} for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([_cell(r[k]) for k in fields])
    return buf.getvalue()


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def _report_text(report: EntropyReport, kind: str) -> str:
    return report.to_json() + "\n" if kind == "json" else report.to_csv()


class _Outputs:
    """Collects written files; the manifest goes last, next to the primary output."""

    def __init__(self, args: argparse.Namespace, command: str) -> None:
        self.manifest = RunManifest(command, list(args.argv),
                                    started_at=datetime.now(timezone.utc).isoformat(timespec="seconds"))
        self._t0 = time.perf_counter()
        self.primary: Path | None = None

    def write(self, path: str | Path | None, text: str | bytes) -> None:
        if path is None:
            sys.stdout.write(text if isinstance(text, str) else "")
            return
        path = Path(path)
        if isinstance(text, bytes):
            atomic_write_bytes(path, text)
        else:
            atomic_write_text(path, text)
        self.manifest.outputs.append(str(path))
        self.primary = self.primary or path

    def finish(self, manifest_path: str | None) -> None:
        if manifest_path is None and self.primary is None:
            return
        target = Path(manifest_path) if manifest_path else self.primary.with_name(self.primary.name + ".manifest.json")
        self.manifest.wall_clock_s = round(time.perf_counter() - self._t0, 6)
        atomic_write_text(target, json.dumps(asdict(self.manifest), indent=1, sort_keys=True) + "\n")


# -- demos --------------------------------------------------------------------------------


@dataclass
class Prepared:
    state: DenseState
    geometry: LatticeGeometry
    context: object | None
    spec: object | None = None


def demo(name: str, n: int | None, threads: int | None) -> Prepared:
    if name == "cluster":
        n = 8 if n is None else n
        cover = build_cluster_state_1d(n)
        return Prepared(normalize(cover.to_state(threads)), LatticeGeometry.chain(n), cover, cover)
    if name == "graph":
        n = 8 if n is None else n
        if n < 3:
            raise UsageError("graph demo needs --n >= 3")
        cover = build_graph_state([(i, (i + 1) % n) for i in range(n)], n)
        return Prepared(normalize(cover.to_state(threads)), LatticeGeometry.chain(n), cover, cover)
    if name == "toric":
        L = 3 if n is None else n
        _toric_range(L)
        cover = toric_cover(L)
        return Prepared(toric_quasi_product_state(L), LatticeGeometry.torus_edges(L), cover, cover)
    if name == "circles":
        L = 2 if n is None else n
        _toric_range(L)
        g = LatticeGeometry.torus_edges(L)
        return Prepared(target_state(enumerate_cycles(L)), g, SmoothContext(g, 1))
    raise UsageError(f"unknown demo {name!r}")


def _toric_range(L: int) -> None:
    if L < 2:
        raise UsageError(f"torus size must be at least 2, got {L}")
    check_size(2 * L * L, f"L={L} torus")


def _spec_context(spec):
    if isinstance(spec, ClusterCover):
        return spec
    if isinstance(spec, RbmSpec):
        return rbm_to_quasi_product(spec)
    if isinstance(spec, DbmSpec):
        return spec
    return None


def _spec_state(spec, threads: int | None) -> DenseState:
    if isinstance(spec, ClusterCover):
        return normalize(spec.to_state(threads))
    return spec.to_state()


def _default_regions(g: LatticeGeometry, text: str | None):
    if text is None:
        return make_regions(g, RegionFamily("contiguous-1d")) if g.dimensionality == 1 else rectangle_regions(g)
    if text == "rect:all":
        return rectangle_regions(g)
    regions = []
    for piece in text.split(","):
        regions.extend(make_regions(g, parse_region_spec(piece.strip(), g)))
    return regions


# -- commands -----------------------------------------------------------------------------


def cmd_build(args: argparse.Namespace) -> int:
    out = _Outputs(args, "build")
    if args.demo:
        prep = demo(args.demo, args.n, args.threads)
        state = prep.state
    else:
        if not args.spec:
            raise UsageError("build needs --spec or --demo")
        spec = load_network(args.spec)
        out.manifest.inputs.append(args.spec)
        n = spec.n_sites if isinstance(spec, ClusterCover) else spec.n_visible
        check_size(n, "network state")
        g = getattr(spec, "geometry", None)
        if g is not None and not isinstance(spec, ClusterCover):
            doc = json.loads(Path(args.spec).read_text())
            eps = doc.get("locality", {}).get("eps", math.inf)
            rep = validate_k_local(spec, g, eps)
            print(f"locality: is_local={str(rep.is_local).lower()} K={rep.K} violations={len(rep.violations)}",
                  file=sys.stderr)
            out.manifest.checks["k_local"] = rep.is_local
            out.manifest.seed = doc.get("random", {}).get("seed")
        state = _spec_state(spec, args.threads)
    out.write(args.out, dumps_qns(state))
    print(f"wrote {state.n_sites}-site state ({len(state)} amplitudes) to {args.out}", file=sys.stderr)
    out.finish(args.manifest)
    return EXIT_OK


def cmd_entropy(args: argparse.Namespace) -> int:
    out = _Outputs(args, "entropy")
    alphas = _parse_alphas(args.alpha)
    spec = demo_context = None
    if args.demo:
        prep = demo(args.demo, args.n, args.threads)
        state, g, spec, demo_context = prep.state, prep.geometry, prep.spec, prep.context
    else:
        if not args.state:
            raise UsageError("entropy needs --state or --demo")
        state = read_qns(args.state)
        out.manifest.inputs.append(args.state)
        if not state.normalized:
            state = normalize(state)
        if args.spec:
            spec = load_network(args.spec)
            out.manifest.inputs.append(args.spec)
        g = getattr(spec, "geometry", None)
        if args.lattice:
            g = _parse_lattice(args.lattice, state.n_sites)
        g = g or LatticeGeometry.chain(state.n_sites)
        if g.n_sites != state.n_sites:
            raise UsageError(f"lattice has {g.n_sites} sites, state has {state.n_sites}")
    context = None
    if args.bounds == "cover":
        context = demo_context if demo_context is not None else _spec_context(spec)
        if context is None or isinstance(context, DbmSpec):
            raise UsageError("--bounds cover needs a quasi-product or RBM spec (--spec) or a demo")
    elif args.bounds == "dbm":
        if not isinstance(spec, DbmSpec):
            raise UsageError("--bounds dbm needs a DBM spec (--spec)")
        context = spec
    regions = _default_regions(g, args.regions)
    report = entropy_sweep(state, regions, alphas, context)
    out.write(args.out, _report_text(report, args.format))
    failures = report.failures()
    out.manifest.checks["bounds"] = not failures
    for row in failures:
        print(f"bound violated: region {row.region} alpha={fmt(row.alpha)} S={fmt(row.entropy_nats)} "
              f"rank={row.rank} log2_bound={row.rank_bound_log2}", file=sys.stderr)
    out.finish(args.manifest)
    return EXIT_CHECK if failures else EXIT_OK


def cmd_toric(args: argparse.Namespace) -> int:
    out = _Outputs(args, "toric")
    L = args.L
    _toric_range(L)
    sectors = SECTORS if args.sector == "all" else (args.sector,)
    for s in sectors:
        if s not in SECTORS:
            raise UsageError(f"sector must be one of {', '.join(SECTORS)} or all, got {s!r}")
    verts, plaqs = toric_stabilizers(L)
    rows, states = [], {}
    for s in sectors:
        st = build_toric_ground(L, (int(s[0]), int(s[1])))
        states[s] = st
        rv, rp = verify_stabilizers(st, verts), verify_stabilizers(st, plaqs)
        rows.append({"sector": s, "n_vertex": len(verts), "n_plaquette": len(plaqs),
                     "min_fidelity": float(min(rv.fidelities + rp.fidelities)),
                     "all_pass": rv.all_pass and rp.all_pass})
        out.manifest.checks[f"stabilizers_{s}"] = rv.all_pass and rp.all_pass
    overlap = 0.0
    keys = list(states)
    for i, a in enumerate(keys):
        for b in keys[i + 1:]:
            overlap = max(overlap, abs(states[a].inner(states[b])))
    for r in rows:
        r["max_sector_overlap"] = float(overlap)
    if len(keys) > 1:
        out.manifest.checks["sectors_orthogonal"] = overlap <= 1e-10
    fields = ["sector", "n_vertex", "n_plaquette", "min_fidelity", "all_pass", "max_sector_overlap"]
    text = _table(rows, fields, args.format)
    ok = all(r["all_pass"] for r in rows) and overlap <= 1e-10
    if args.topo:
        if L < 3:
            raise UsageError("--topo needs L >= 3 for the fan partition")
        a, b, c = toric_fan_partition(L)
        s_top = topological_entropy(toric_quasi_product_state(L), a, b, c)
        topo = [{"s_top_printed": s_top, "kitaev_preskill_convention": -s_top, "ln2": math.log(2),
                 "abs_deviation_from_ln2": abs(abs(s_top) - math.log(2))}]
        text += _table(topo, list(topo[0]), args.format)
        out.manifest.checks["topological_entropy"] = abs(abs(s_top) - math.log(2)) <= 5e-2
    out.write(args.out, text)
    out.finish(args.manifest)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_image(args: argparse.Namespace) -> int:
    out = _Outputs(args, "image")
    alphas = _parse_alphas(args.alpha)
    if args.task == "circles":
        L = 2 if args.L is None else args.L
        _toric_range(L)
        targets = enumerate_cycles(L)
        g = LatticeGeometry.torus_edges(L)
        context = SmoothContext(g, args.B)
        regions = rectangle_regions(g)
    else:
        if args.pixels is None or args.count is None or args.seed is None:
            raise UsageError("random task needs --pixels, --count and --seed")
        check_size(args.pixels, "image target state")
        targets = random_target_set(args.pixels, args.count, args.seed)
        out.manifest.seed = args.seed
        g = pixel_grid(args.pixels)
        context = None
        half = make_region(g, range(args.pixels // 2), "half")
        regions = sorted({r.sites: r for r in [half] + _default_regions(g, None)}.values(),
                         key=lambda r: (r.volume, r.sites))
    print(f"target set {targets.provenance}: {len(targets)} images of {targets.n_pixels} pixels", file=sys.stderr)
    report = entropy_sweep(target_state(targets), regions, alphas, context)
    out.write(args.out, _report_text(report, args.format))
    out.manifest.checks["n_targets"] = True
    failures = report.failures()
    if context is not None:
        out.manifest.checks["smooth_rank_bound"] = not failures
    for row in failures:
        print(f"bound violated: region {row.region} alpha={fmt(row.alpha)} rank={row.rank}", file=sys.stderr)
    out.finish(args.manifest)
    return EXIT_CHECK if failures else EXIT_OK


# -- parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qnnent", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker threads (default: all cores)")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="report format")
    p.add_argument("--version", action="version", version=f"qnnent {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser, out_required: bool = False) -> None:
        sp.add_argument("--out", required=out_required, help="output file (stdout when omitted)")
        sp.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")

    b = sub.add_parser("build", help="build a dense state from a network spec or demo")
    b.add_argument("--spec")
    b.add_argument("--demo", choices=DEMOS)
    b.add_argument("--n", type=int, help="demo size (sites, or L for toric/circles)")
    common(b, out_required=True)
    b.set_defaults(func=cmd_build)

    e = sub.add_parser("entropy", help="Renyi entropy sweep with optional bound checks")
    e.add_argument("--state")
    e.add_argument("--spec", help="network spec supplying geometry and bound context")
    e.add_argument("--demo", choices=DEMOS)
    e.add_argument("--n", type=int)
    e.add_argument("--lattice", help="chain | chain-open | square:WxH[:open] | torus:L")
    e.add_argument("--regions", help="contiguous | rect:WxH | rect:all (comma-separated)")
    e.add_argument("--alpha", default="1", help="comma-separated Renyi indices")
    e.add_argument("--bounds", choices=("cover", "dbm"))
    common(e)
    e.set_defaults(func=cmd_entropy)

    t = sub.add_parser("toric", help="toric code ground states and topological entropy")
    t.add_argument("--L", type=int, required=True)
    t.add_argument("--sector", default="all", help="00, 01, 10, 11 or all")
    t.add_argument("--topo", action="store_true", help="also compute the topological entropy")
    common(t)
    t.set_defaults(func=cmd_toric)

    i = sub.add_parser("image", help="circle determination and random image target sets")
    i.add_argument("--task", choices=("circles", "random"), required=True)
    i.add_argument("--L", type=int)
    i.add_argument("--pixels", type=int)
    i.add_argument("--count", type=int)
    i.add_argument("--seed", type=int)
    i.add_argument("--B", type=int, default=1, help="boundary range for the smooth rank bound")
    i.add_argument("--alpha", default="1,2")
    common(i)
    i.set_defaults(func=cmd_image)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    args.argv = argv
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (QnnentError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
