"""Command-line front end: ``biconf check|classify|dump|corpus|nbound``.

Exit status: 0 when evaluation succeeded (whatever the verdicts), 2 on input
errors (missing file, parse or validation failure, bad options), 1 when a
corpus expectation is not met.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import corpus
from .analysis import (DEFAULT_POINTS, DEFAULT_SEED, DEFAULT_THRESHOLD, TENSORS, canonical_json,
                       canonical_tensor_id, classify, dimension_bound, evaluate_tensors, narrative,
                       obstruction_document, sample_points)
from .biconformal import PointGeometry
from .dsl import parse_manifold, validate_spec
from .errors import BiconfError, DslSyntaxError


@dataclass(frozen=True)
class RunConfig:
    points: int = DEFAULT_POINTS
    seed: int = DEFAULT_SEED
    threshold: float = DEFAULT_THRESHOLD
    tensors: tuple = ()
    fmt: str = "text"

    def __post_init__(self):
        if self.points < 1:
            raise ValueError("--points must be at least 1")
        if not self.threshold > 0:
            raise ValueError("--tol must be positive")


class InputError(Exception):
    pass


def _read_source(name: str) -> str:
    p = Path(name)
    if p.is_file():
        return p.read_text()
    stem = p.name[:-4] if p.name.endswith(".man") else p.name
    if not p.parent.parts or p.parent == Path("."):
        try:
            return corpus.get(stem).source
        except KeyError:
            pass
    raise InputError(f"no such file: {name}")


def _load(name: str):
    return validate_spec(parse_manifold(_read_source(name)))


def _config(args) -> RunConfig:
    tensors = tuple(t.strip() for t in (args.tensor or "").split(",") if t.strip())
    return RunConfig(args.points, args.seed, args.tol, tensors, args.format)


def _emit_validation(vm, out):
    for w in vm.warnings:
        print(f"# warning: {w}", file=out)
    for n in vm.notes:
        print(f"# note: {n}", file=out)


def cmd_check(args, out) -> int:
    cfg = _config(args)
    vm = _load(args.file)
    ids = [canonical_tensor_id(t) for t in cfg.tensors] or ["T_abc"]
    samples = sample_points(vm.spec.domain, cfg.points, cfg.seed)
    reps = evaluate_tensors(vm, ids, samples, cfg.threshold)
    if cfg.fmt == "canonical":
        out.write(canonical_json(obstruction_document(vm.spec.name, samples, cfg.threshold,
                                                      reps.values())))
        return 0
    _emit_validation(vm, out)
    print(f"manifold {vm.spec.name}  n={vm.n} p={vm.p}  points={cfg.points} seed={cfg.seed:#x} "
          f"threshold={cfg.threshold:.1e}", file=out)
    print(f"scale {next(iter(reps.values())).scale:.6e}", file=out)
    for r in reps.values():
        print(f"{r.tensor:<20s} {r.max_scaled_residual:.6e}  {r.verdict}", file=out)
    return 0


def cmd_classify(args, out) -> int:
    cfg = _config(args)
    vm = _load(args.file)
    samples = sample_points(vm.spec.domain, cfg.points, cfg.seed)
    rep = classify(vm, samples, cfg.threshold)
    if cfg.fmt == "canonical":
        out.write(canonical_json(rep.as_dict()))
        return 0
    _emit_validation(vm, out)
    print(f"manifold {vm.spec.name}  n={vm.n} p={vm.p}  points={cfg.points} seed={cfg.seed:#x} "
          f"threshold={cfg.threshold:.1e}", file=out)
    for r in rep.reports.values():
        print(f"  {r.tensor:<20s} {r.max_scaled_residual:.6e}  {r.verdict}", file=out)
    for line in narrative(rep):
        print(line, file=out)
    b = rep.bound
    print(f"dimension bound: N_statement={b.N_statement} N_proof={b.N_proof} "
          f"finite={'yes' if b.finite else 'no'}", file=out)
    print(f"# {b.note}", file=out)
    return 0


def _parse_point(text: str, coords) -> np.ndarray:
    vals = {}
    for item in text.split(","):
        if "=" not in item:
            raise InputError(f"--at expects name=value pairs, got {item!r}")
        k, v = item.split("=", 1)
        k = k.strip()
        if k not in coords:
            raise InputError(f"unknown coordinate {k!r}")
        try:
            vals[k] = float(v)
        except ValueError:
            raise InputError(f"bad value for {k}: {v!r}") from None
    missing = [c for c in coords if c not in vals]
    if missing:
        raise InputError(f"--at is missing coordinates: {', '.join(missing)}")
    return np.array([vals[c] for c in coords])


def _dump_fields(geo: PointGeometry):
    out = {"g": geo.metric.g, "Gamma": geo.conn.gamma, "R": geo.curv.riemann,
           "Ricci": geo.curv.ricci}
    for src in (geo.proj.fields, geo.basis.fields, geo.bar.fields, geo.bar_curv.fields,
                geo.foliation.fields):
        for k, f in src.items():
            if f is not None and k not in out:
                out[k] = f.value
    return out


def cmd_dump(args, out) -> int:
    vm = _load(args.file)
    x = _parse_point(args.at, vm.spec.coords)
    geo = PointGeometry.from_spec(vm, x)
    fields = _dump_fields(geo)
    if args.format == "canonical":
        doc = {"manifold": vm.spec.name, "point": x.tolist(),
               "tensors": {k: np.asarray(v).tolist() for k, v in fields.items()}}
        out.write(canonical_json(doc))
        return 0
    print(f"manifold {vm.spec.name} at {dict(zip(vm.spec.coords, x.tolist()))}", file=out)
    for k, v in fields.items():
        v = np.asarray(v)
        print(f"{k} shape={v.shape}", file=out)
        for idx in np.ndindex(*v.shape):
            print(f"  {k}[{','.join(map(str, idx))}] = {v[idx]: .12e}", file=out)
    return 0


def cmd_corpus(args, out) -> int:
    if args.action == "list":
        for e in corpus.entries():
            print(f"{e.id:<22s} {e.note}", file=out)
        return 0
    only = set(args.only.split(",")) if args.only else None
    status = 0
    for e in corpus.entries():
        if only is not None and e.id not in only:
            continue
        n_ok = 0
        for c in corpus.run_entry(e, points=args.points, seed=args.seed, threshold=args.tol):
            if not c.ok:
                print(f"FAIL {e.id}: {c.name}: {c.detail}", file=out)
                return 1
            n_ok += 1
        print(f"ok   {e.id} ({n_ok} checks)", file=out)
    return status


def cmd_nbound(args, out) -> int:
    b = dimension_bound(args.n, args.p)
    if args.format == "canonical":
        out.write(canonical_json(b.as_dict()))
        return 0
    print(f"n={b.n} p={b.p} N_statement={b.N_statement} N_proof={b.N_proof} "
          f"finite={'yes' if b.finite else 'no'}", file=out)
    print(f"# {b.note}", file=out)
    return 0


def _seed(text: str) -> int:
    return int(text, 0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="biconf", description="bi-conformal obstruction checks")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="DSL source file, or the id of a built-in corpus entry")
        p.add_argument("--tensor", help=f"comma-separated ids from: {', '.join(TENSORS)}")
        p.add_argument("--points", type=int, default=DEFAULT_POINTS)
        p.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
        p.add_argument("--tol", type=float, default=DEFAULT_THRESHOLD)
        p.add_argument("--format", choices=("text", "canonical"), default="text")

    common(sub.add_parser("check", help="obstruction reports for selected tensors"))
    common(sub.add_parser("classify", help="separability tiers and dimension bounds"))

    d = sub.add_parser("dump", help="every tensor component at one point")
    d.add_argument("file")
    d.add_argument("--at", required=True, help="point as name=value,name=value,...")
    d.add_argument("--format", choices=("text", "canonical"), default="text")

    c = sub.add_parser("corpus", help="list or run the built-in corpus")
    c.add_argument("action", choices=("list", "run"))
    c.add_argument("--only", help="comma-separated entry ids")
    c.add_argument("--points", type=int, default=DEFAULT_POINTS)
    c.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    c.add_argument("--tol", type=float, default=DEFAULT_THRESHOLD)

    nb = sub.add_parser("nbound", help="dimension bounds for the bi-conformal algebra")
    nb.add_argument("--n", type=int, required=True)
    nb.add_argument("--p", type=int, required=True)
    nb.add_argument("--format", choices=("text", "canonical"), default="text")
    return ap


COMMANDS = {"check": cmd_check, "classify": cmd_classify, "dump": cmd_dump,
            "corpus": cmd_corpus, "nbound": cmd_nbound}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return COMMANDS[args.command](args, out)
    except DslSyntaxError as exc:
        print(f"error: {args.file}:{exc}", file=err)
    except (InputError, BiconfError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
    return 2


if __name__ == "__main__":
    sys.exit(main())
