"""Command-line entry points.

One executable with subcommands for scoring, attribution, ingestion, the
HTTP service, and the synthetic benchmark harness. Outputs are JSON
documents (written to --out or stdout) plus a short human summary on
stderr so pipelines can consume stdout directly.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import bench
from .config import ScoringConfig, make_context
from .errors import PqgraphError
from .exposure import score_report
from .ingest import ingest
from .snapshot import parse_snapshot, serialize_snapshot, to_graph


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
        _say(f"wrote {out}")
    else:
        sys.stdout.write(text)


def _load_graph(path: str):
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise PqgraphError(f"cannot read snapshot {path}: {exc}") from None
    return to_graph(parse_snapshot(raw))


def _cmd_score(args) -> int:
    graph = _load_graph(args.snapshot)
    config = ScoringConfig(
        mode=args.mode,
        max_path_nodes=args.max_path_len,
        katz_kappa=args.kappa,
    )
    report = score_report(graph, config, attribution_method=args.method, seed=args.seed)
    _emit(report.to_dict(), args.out)
    _say(f"PQRI {report.pqri:.1f} (mode={report.mode}, E={report.raw:.6g}, E_hat={report.normalized:.6g})")
    return 0


def _cmd_attribute(args) -> int:
    graph = _load_graph(args.snapshot)
    report = score_report(
        graph,
        ScoringConfig(mode=args.mode),
        attribution_method=args.method,
        permutations=args.permutations,
        seed=args.seed,
    )
    _emit(report.to_dict(), args.out)
    att = report.attribution
    if att is None:
        _say("no domains on this graph; nothing to attribute")
    else:
        top = max(att.phi, key=att.phi.get)
        _say(f"{len(att.phi)} domains attributed via {att.method}; largest share: {top}")
    return 0


def _iter_scan_records(scan_dir: Path):
    for path in sorted(scan_dir.glob("**/*.json")):
        obj = json.loads(path.read_text(encoding="utf-8"))
        yield from obj if isinstance(obj, list) else [obj]
    for path in sorted(scan_dir.glob("**/*.jsonl")):
        for line in path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                yield json.loads(line)


def _cmd_ingest(args) -> int:
    scan_dir = Path(args.scan_dir)
    if not scan_dir.is_dir():
        raise PqgraphError(f"scan directory {scan_dir} does not exist")
    feed = Path(args.vuln_feed).read_text(encoding="utf-8") if args.vuln_feed else ""
    graph, report = ingest(_iter_scan_records(scan_dir), feed)
    generated_at = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    from .snapshot import from_graph

    doc = from_graph(graph, generated_at=generated_at, provenance={"tool": "pqgraph-ingest"})
    Path(args.out).write_bytes(serialize_snapshot(doc))
    _say(
        f"wrote {args.out}: {report.assets} nodes, {len(graph.edges)} edges "
        f"({len(report.conflicts)} conflicts, {len(report.rejected)} rejected, "
        f"{len(report.orphans)} orphan CVEs)"
    )
    for line in report.conflicts + report.rejected + report.orphans:
        _say(f"  - {line}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app
    from .validation.store import Store

    app = create_app(
        Store(args.store),
        auth_token=args.token,
        static_dir=args.static_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _gen_spec(args) -> bench.GenSpec:
    fields = {}
    if args.spec:
        fields = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    if args.seed is not None:
        fields["seed"] = args.seed
    return bench.GenSpec(**fields)


def _bench_graph(args):
    if args.snapshot:
        return _load_graph(args.snapshot)
    return bench.generate_graph(_gen_spec(args))


def _cmd_bench(args) -> int:
    if args.experiment == "gen":
        doc = bench.generate(_gen_spec(args))
        raw = serialize_snapshot(doc)
        if args.out:
            Path(args.out).write_bytes(raw)
            _say(f"wrote {args.out}: {len(doc.nodes)} nodes, {len(doc.edges)} edges")
        else:
            sys.stdout.write(raw.decode("utf-8"))
        return 0

    if args.experiment == "oracle":
        graph = _bench_graph(args)
        ctx = make_context(graph)
        est = bench.mc_compromise(graph, ctx, samples=args.samples, seed=args.seed or 0)
        _emit(dataclasses.asdict(est), args.out)
        _say(f"compromise {est.estimate:.6f} +- {est.standard_error:.6f} ({est.samples} samples)")
        return 0

    if args.experiment == "correlate":
        template = bench.GenSpec(**json.loads(Path(args.spec).read_text())) if args.spec else None
        result = bench.experiment_correlation(
            n_graphs=args.graphs, base_seed=args.seed or 0, template=template
        )
        _emit(
            {"spearman": result.spearman, "pairs": list(result.pairs), "note": result.note},
            args.out,
        )
        shown = "undefined" if result.spearman is None else f"{result.spearman:.4f}"
        _say(f"spearman over {len(result.pairs)} graphs: {shown} {result.note}")
        return 0

    if args.experiment == "sensitivity":
        graph = _bench_graph(args)
        ctx = make_context(graph)
        report = bench.experiment_sensitivity(
            graph,
            ctx,
            trials=args.trials,
            seed=args.seed or 0,
            delta=args.delta,
            backend=args.backend,
            check_impact=args.check_impact,
        )
        _emit(dataclasses.asdict(report), args.out)
        _say(f"{report.trials} trials, {report.violations} violations, worst {report.worst:.3g}")
        return 0

    result = bench.kernel_benchmark(seed=args.seed or 0, samples=args.samples)
    _emit(result, args.out)
    if result.get("numba_available"):
        _say(
            f"backend speedups (compiled/numpy): "
            f"survival x{result['survival_speedup']:.2f}, mc x{result['mc_speedup']:.2f}"
        )
    else:
        _say("compiled backend unavailable; timed the array backend only")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pqgraph", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="exposure report for a snapshot")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--mode", default="auto", choices=["exact", "exact_paths", "katz", "auto"])
    p.add_argument("--kappa", type=float, default=0.5)
    p.add_argument("--max-path-len", type=int, default=8)
    p.add_argument("--method", default="auto", choices=["exact", "mc", "auto"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("attribute", help="domain attribution for a snapshot")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--method", default="auto", choices=["exact", "mc", "auto"])
    p.add_argument("--mode", default="auto", choices=["exact", "exact_paths", "katz", "auto"])
    p.add_argument("--permutations", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_attribute)

    p = sub.add_parser("ingest", help="build a snapshot from scanner output")
    p.add_argument("--scan-dir", required=True)
    p.add_argument("--vuln-feed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--store", default="pqgraph.db")
    p.add_argument("--token", default=None, help="require this bearer token on /api routes")
    p.add_argument("--static-dir", default=None, help="serve a built UI from this directory")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("bench", help="generator, oracle, and experiment harness")
    p.add_argument("experiment", choices=["gen", "oracle", "correlate", "sensitivity", "kernels"])
    p.add_argument("--spec", help="JSON file with generator fields")
    p.add_argument("--snapshot", help="score an existing snapshot instead of generating")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--graphs", type=int, default=50)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--backend", default="exact", choices=["exact", "katz"])
    p.add_argument("--check-impact", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PqgraphError as exc:
        _say(f"error: {exc}")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
