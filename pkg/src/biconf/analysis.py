"""Sampling, vanishing verdicts, the separability tiers and related counting.

Every "vanishes" verdict here means: the tensor is below the threshold at all
sampled points of the chart, after dividing by a common scale
``1 + max(|Rbar|, |g|)`` taken over the same samples.  It is evidence on the
sampled region, not a proof of global vanishing.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .biconformal import PointGeometry, _witness
from .dsl import ManifoldSpec, PointEvaluator, ensure_validated, evaluate_value, parse_expression
from .errors import EmptyDomain, NonPositiveRescale, NotABCVF, RankExcluded, UnknownTensor
from .jets import Field, fscalar_mul

DEFAULT_THRESHOLD = 1e-7
DEFAULT_POINTS = 16
DEFAULT_SEED = 0xB1C0
INDETERMINATE = "indeterminate: rank excluded"

# tensor id -> (layer, key) inside PointGeometry
TENSORS = {
    "M": ("basis", "M"),
    "T_abc": ("basis", "T"),
    "T4": ("bar_curv", "T4"),
    "Cpar": ("bar_curv", "Cpar"),
    "Cperp": ("bar_curv", "Cperp"),
    "cotton0": ("foliation", "cotton0"),
    "cotton0_projected": ("foliation", "cotton0_projected"),
    "cotton1": ("foliation", "cotton1"),
    "cotton1_projected": ("foliation", "cotton1_projected"),
    "du": ("foliation", "du"),
    "gradP": ("basis", "nablaP"),
}
ALIASES = {"Tabc": "T_abc", "T": "T_abc", "nablaP": "gradP"}

TIERS = ("decomposable", "conformally_separable", "conformally_reducible",
         "biconformally_flat", "leaf_P_conformally_flat", "leaf_Pi_conformally_flat")


def canonical_tensor_id(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in TENSORS:
        raise UnknownTensor(f"unknown tensor id {name!r}; known: {', '.join(TENSORS)}")
    return name


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleSet:
    points: np.ndarray
    seed: int
    margin: float = 0.1

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def _shrunk_box(domain, margin):
    lo = np.array([a for a, _ in domain], dtype=float)
    hi = np.array([b for _, b in domain], dtype=float)
    width = hi - lo
    lo2, hi2 = lo + margin * width, hi - margin * width
    if np.any(hi2 <= lo2):
        raise EmptyDomain("domain box is empty after shrinking by the sampling margin")
    return lo2, hi2


def sample_points(domain, count: int, seed: int = DEFAULT_SEED, margin: float = 0.1) -> SampleSet:
    """Uniform points in the margin-shrunk domain box.

    The generator is numpy's PCG64 (``numpy.random.default_rng(seed)``), so
    the same ``(domain, count, seed)`` always yields the same points.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if isinstance(domain, ManifoldSpec):
        domain = domain.domain
    lo, hi = _shrunk_box(domain, margin)
    rng = np.random.default_rng(seed)
    u = rng.random((count, len(lo)))
    return SampleSet(lo + (hi - lo) * u, seed, margin)


def _as_samples(spec, samples) -> SampleSet:
    if samples is None:
        return sample_points(spec.domain, DEFAULT_POINTS, DEFAULT_SEED)
    if isinstance(samples, SampleSet):
        return samples
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    return SampleSet(pts, -1, 0.0)


# ---------------------------------------------------------------------------
# obstruction reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ObstructionReport:
    tensor: str
    per_point: tuple
    max_scaled_residual: float
    scale: float
    threshold: float

    @property
    def verdict(self) -> str:
        return "vanishes" if self.max_scaled_residual < self.threshold else "nonzero"

    @property
    def vanishes(self) -> bool:
        return self.verdict == "vanishes"


def _tensor_value(geo: PointGeometry, tid: str) -> np.ndarray:
    layer, key = TENSORS[tid]
    f = getattr(geo, layer).fields[key]
    if f is None:
        raise RankExcluded(f"{tid} is not defined for p={geo.p}, n-p={geo.n - geo.p}")
    return f.value


def _rank_ok(tid: str, n: int, p: int) -> bool:
    q = n - p
    return {
        "T4": p not in (1, 2) and q not in (1, 2),
        "Cpar": p not in (1, 2),
        "Cperp": q not in (1, 2),
        "cotton0": p not in (1, 2),
        "cotton0_projected": p not in (1, 2),
        "cotton1": q not in (1, 2),
        "cotton1_projected": q not in (1, 2),
    }.get(tid, True)


def evaluate_tensors(spec, ids, samples=None, threshold: float = DEFAULT_THRESHOLD):
    """Reports for several tensors sharing one pass over the sample points."""
    vm = ensure_validated(spec)
    samples = _as_samples(vm.spec, samples)
    ids = [canonical_tensor_id(t) for t in ids]
    for t in ids:
        if not _rank_ok(t, vm.n, vm.p):
            raise RankExcluded(f"{t} is not defined for p={vm.p}, n-p={vm.n - vm.p}")
    raw = {t: [] for t in ids}
    scale = 1.0
    for x in samples:
        geo = PointGeometry.from_spec(vm, x)
        scale = max(scale, 1.0 + np.abs(geo.bar_curv.Rbar).max(), 1.0 + np.abs(geo.metric.g).max())
        for t in ids:
            raw[t].append(float(np.abs(_tensor_value(geo, t)).max(initial=0.0)))
    out = {}
    for t in ids:
        per = tuple(v / scale for v in raw[t])
        out[t] = ObstructionReport(t, per, max(per), scale, threshold)
    return out


def obstruction_report(spec, tensor: str, samples=None,
                       threshold: float = DEFAULT_THRESHOLD) -> ObstructionReport:
    tid = canonical_tensor_id(tensor)
    return evaluate_tensors(spec, [tid], samples, threshold)[tid]


# ---------------------------------------------------------------------------
# dimension bound
# ---------------------------------------------------------------------------

OPEN_QUESTION = (
    "open question: two upper bounds are in circulation for the dimension of the "
    "bi-conformal Lie algebra, N_statement = p(p+1)/2 + (n-p)(n-p+1)/2 and "
    "N_proof = (p+1)(p+2)/2 + (n-p+1)(n-p+2)/2; they differ by n + 2. The flat "
    "3+3 corpus entry carries 20 independent generators, which matches N_proof(6, 3). "
    "Both values are reported; neither is asserted as the bound.")


@dataclass(frozen=True)
class DimensionBound:
    n: int
    p: int
    N_statement: int
    N_proof: int
    finite: bool
    note: str = OPEN_QUESTION

    def as_dict(self):
        return {"n": self.n, "p": self.p, "N_statement": self.N_statement,
                "N_proof": self.N_proof, "finite": self.finite, "note": self.note}


def dimension_bound(n: int, p: int) -> DimensionBound:
    if not (1 <= p <= n - 1):
        raise ValueError(f"need 1 <= p <= n-1, got n={n}, p={p}")
    q = n - p
    stmt = p * (p + 1) // 2 + q * (q + 1) // 2
    proof = (p + 1) * (p + 2) // 2 + (q + 1) * (q + 2) // 2
    finite = p not in (1, 2) and q not in (1, 2)
    return DimensionBound(n, p, stmt, proof, finite)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def _and(*flags):
    """Three-valued conjunction: False wins, then indeterminate, then True."""
    if any(f is False for f in flags):
        return False
    if any(f == INDETERMINATE for f in flags):
        return INDETERMINATE
    return True


@dataclass(frozen=True)
class ClassificationReport:
    manifold: str
    n: int
    p: int
    seed: int
    points: int
    threshold: float
    reports: dict
    tiers: dict
    bound: DimensionBound
    leaf_criteria: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "manifold": self.manifold,
            "seed": self.seed,
            "points": self.points,
            "threshold": self.threshold,
            "tensors": [{"id": r.tensor, "max_scaled_residual": r.max_scaled_residual,
                         "verdict": r.verdict} for r in self.reports.values()],
            "tiers": dict(self.tiers),
            "bounds": self.bound.as_dict(),
        }


def _leaf_criterion(rank: int, weyl_id: str, cotton_id: str):
    if rank in (1, 2):
        return None
    return cotton_id if rank == 3 else weyl_id


def classify(spec, samples=None, threshold: float = DEFAULT_THRESHOLD) -> ClassificationReport:
    vm = ensure_validated(spec)
    samples = _as_samples(vm.spec, samples)
    n, p = vm.n, vm.p
    crit = {"P": _leaf_criterion(p, "Cpar", "cotton0_projected"),
            "Pi": _leaf_criterion(n - p, "Cperp", "cotton1_projected")}
    ids = ["gradP", "T_abc", "du"]
    if _rank_ok("T4", n, p):
        ids.append("T4")
    ids += [c for c in crit.values() if c is not None]
    reps = evaluate_tensors(vm, ids, samples, threshold)

    def flag(t):
        return INDETERMINATE if t is None or t not in reps else reps[t].vanishes

    sep = flag("T_abc")
    leaf_p, leaf_pi = flag(crit["P"]), flag(crit["Pi"])
    tiers = {
        "decomposable": _and(flag("gradP"), sep),
        "conformally_separable": sep,
        "conformally_reducible": _and(sep, flag("du")),
        "biconformally_flat": _and(sep, flag("T4") if "T4" in reps else INDETERMINATE,
                                   leaf_p, leaf_pi),
        "leaf_P_conformally_flat": leaf_p,
        "leaf_Pi_conformally_flat": leaf_pi,
    }
    return ClassificationReport(vm.spec.name, n, p, samples.seed, len(samples), threshold,
                                reps, tiers, dimension_bound(n, p), crit)


NARRATIVE = {
    "decomposable": "decomposable (projector parallel: nabla P = 0)",
    "conformally_separable": "conformally separable (T_abc = 0)",
    "conformally_reducible": "conformally reducible (T_abc = 0 and du = 0)",
    "biconformally_flat": "bi-conformally flat (T_abc = 0, T4 = 0, both leaves conformally flat)",
    "leaf_P_conformally_flat": "P-leaf conformally flat",
    "leaf_Pi_conformally_flat": "Pi-leaf conformally flat",
}


def narrative(report: ClassificationReport) -> list[str]:
    lines = []
    for tier in TIERS:
        v = report.tiers[tier]
        text = NARRATIVE[tier]
        if tier.startswith("leaf_"):
            c = report.leaf_criteria["P" if tier == "leaf_P_conformally_flat" else "Pi"]
            if c is not None:
                text += f" [criterion: {c}]"
        if v is True:
            lines.append(f"yes   {text}")
        elif v is False:
            lines.append(f"no    {text}")
        else:
            lines.append(f"n/a   {text}: {INDETERMINATE}")
    return lines


# ---------------------------------------------------------------------------
# rescale invariance
# ---------------------------------------------------------------------------

RESCALE_TENSORS = ("Cpar", "Cperp", "nablabar_P_ud", "nablabar_Pi_ud", "Lambda", "Lambdabar")


@dataclass(frozen=True)
class RescaleResult:
    deviation: float
    scale: float
    per_tensor: dict

    @property
    def scaled_deviation(self) -> float:
        return self.deviation / self.scale


def _as_expr(e, spec):
    return parse_expression(e, spec) if isinstance(e, str) else e


def _check_positive(exprs, spec, points):
    lo, hi = _shrunk_box(spec.domain, 0.1)
    grid = itertools.product(*[(a, (a + b) / 2.0, b) for a, b in zip(lo, hi)])
    for x in itertools.chain(grid, points):
        for label, e in exprs:
            try:
                v = evaluate_value(e, spec, x)
            except (ValueError, ZeroDivisionError, OverflowError) as exc:
                raise NonPositiveRescale(f"{label} cannot be evaluated at {list(map(float, x))}: {exc}")
            if not v > 0.0:
                raise NonPositiveRescale(f"{label} = {v!r} <= 0 at {list(map(float, x))}")


def rescaled_geometry(geo: PointGeometry, Z: Field, X: Field) -> PointGeometry:
    """Geometry of ``g' = Z P + X Pi`` with leaf projector ``Z P``."""
    P, Pi = geo.proj.fields["P_dd"], geo.proj.fields["Pi_dd"]
    zp = fscalar_mul(Z, P)
    return PointGeometry.from_fields(zp + fscalar_mul(X, Pi), zp, geo.point)


def rescale_invariance_check(spec, Z, X, samples=None) -> RescaleResult:
    """Compare rescale-invariant tensors of ``(g, P)`` and ``(Z P + X Pi, Z P)``."""
    vm = ensure_validated(spec)
    raw = vm.spec
    q = vm.n - vm.p
    if vm.p in (1, 2) or q in (1, 2):
        raise RankExcluded("rescale invariance needs both leaf ranks outside {1, 2}")
    samples = _as_samples(raw, samples)
    ze, xe = _as_expr(Z, raw), _as_expr(X, raw)
    _check_positive([("Z", ze), ("X", xe)], raw, samples.points)
    per = {t: 0.0 for t in RESCALE_TENSORS}
    scale = 1.0
    for x in samples:
        geo = PointGeometry.from_spec(vm, x)
        ev = geo.evaluator or PointEvaluator(raw, x)
        zf = Field.from_jets(ev.space, np.array(ev.jet(ze), dtype=object))
        xf = Field.from_jets(ev.space, np.array(ev.jet(xe), dtype=object))
        prim = rescaled_geometry(geo, zf, xf)
        scale = max(scale, 1.0 + np.abs(geo.bar_curv.Rbar).max(), 1.0 + np.abs(geo.metric.g).max())
        for t in RESCALE_TENSORS:
            a = geo.bar_curv.fields[t].value
            b = prim.bar_curv.fields[t].value
            per[t] = max(per[t], float(np.abs(a - b).max()))
    return RescaleResult(max(per.values()), scale, per)


# ---------------------------------------------------------------------------
# BCVF independence
# ---------------------------------------------------------------------------

def independence_rank(spec, names, samples=None, threshold: float = DEFAULT_THRESHOLD) -> int:
    """Numerical rank of the named vector fields sampled at the given points."""
    names = list(names)
    if not names:
        return 0
    vm = ensure_validated(spec)
    samples = _as_samples(vm.spec, samples)
    rows = [[] for _ in names]
    bad = set()
    for x in samples:
        geo = PointGeometry.from_spec(vm, x)
        for k, name in enumerate(names):
            w = _witness(geo, name)
            if w.residual > threshold:
                bad.add(name)
            rows[k].append(w.xi)
    if bad:
        raise NotABCVF(f"not bi-conformal on the samples: {', '.join(sorted(bad))}")
    mat = np.array([np.concatenate(r) for r in rows])
    s = np.linalg.svd(mat, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > 1e-8 * s[0]))


# ---------------------------------------------------------------------------
# canonical serialization
# ---------------------------------------------------------------------------

def _canon(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.6e}")
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj) -> str:
    """Stable text form: sorted keys, floats rounded to seven significant digits."""
    return json.dumps(_canon(obj), sort_keys=True, indent=2) + "\n"


def obstruction_document(manifold: str, samples: SampleSet, threshold: float, reports) -> dict:
    return {
        "manifold": manifold,
        "seed": samples.seed,
        "points": len(samples),
        "threshold": threshold,
        "tensors": [{"id": r.tensor, "max_scaled_residual": r.max_scaled_residual,
                     "verdict": r.verdict} for r in reports],
    }
