"""Built-in corpus of manifolds with their expected classification.

Each entry pairs a DSL source file shipped next to this module with the
results it must reproduce.  ``origin`` records how an expectation is known:
``"published"`` (stated for that metric in the literature the package
follows), ``"derived"`` (follows from the construction of the metric and was
confirmed by an independent computation) or ``"trivial"``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from ..analysis import classify, evaluate_tensors, rescale_invariance_check, sample_points
from ..biconformal import PointGeometry, _identities, _witness, structure_identities
from ..dsl import ValidatedManifold, parse_manifold, validate_spec

T, F = True, False
IND = "indeterminate: rank excluded"


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    note: str
    tiers: dict
    nonzero: tuple = ()
    vanishing: tuple = ()
    bcvfs: tuple = ()
    rescale: tuple = ()
    origin: dict = field(default_factory=dict)

    @property
    def filename(self) -> str:
        return f"{self.id}.man"

    @property
    def source(self) -> str:
        return resources.files(__name__).joinpath(self.filename).read_text()

    def manifold(self) -> ValidatedManifold:
        return validate_spec(parse_manifold(self.source))


def _tiers(dec, sep, red, bcf, lp, lpi):
    return {"decomposable": dec, "conformally_separable": sep, "conformally_reducible": red,
            "biconformally_flat": bcf, "leaf_P_conformally_flat": lp,
            "leaf_Pi_conformally_flat": lpi}


_FLAT_GENERATORS = tuple(
    f"{kind}_{leaf}{i}" for leaf in "AB"
    for kind, idx in (("trans", "123"), ("rot", ("12", "13", "23")), ("dil", ("",)), ("sct", "123"))
    for i in idx)

ENTRIES = (
    CorpusEntry(
        "flat_3x3",
        "flat R^6 split into two flat 3-planes; carries the 20 conformal generators of both "
        "factors (translations, rotations, dilation, special conformal)",
        _tiers(T, T, T, T, T, T),
        vanishing=("gradP", "T_abc", "T4", "Cpar", "Cperp", "cotton0", "cotton1"),
        bcvfs=_FLAT_GENERATORS,
        rescale=(("exp(x1+x4)", "1 + x2^2"), ("1 + 0.5*sin(x3*x5)", "exp(0.3*x1*x6)")),
        origin={"tiers": "trivial", "bcvfs": "derived", "rescale": "published"},
    ),
    CorpusEntry(
        "biconf_flat_3x3",
        "two flat 3-planes, each multiplied by its own exponential factor of all six "
        "coordinates: the bi-conformally flat canonical form",
        _tiers(F, T, F, T, T, T),
        nonzero=("gradP",),
        vanishing=("T_abc", "T4", "Cpar", "Cperp", "cotton0_projected", "cotton1_projected"),
        bcvfs=("dil_A", "sct_A1", "rot_B45"),
        rescale=(("exp(0.3*x2 - 0.2*x5)", "2 + x1*x6"),),
        origin={"tiers": "published", "bcvfs": "derived"},
    ),
    CorpusEntry(
        "conf_separable_3x2",
        "3 + 2 split; curved block metrics of the leaf coordinates, each with a conformal "
        "factor of all coordinates; the 3-block has non-zero Cotton tensor",
        _tiers(F, T, F, F, F, IND),
        nonzero=("gradP", "du", "cotton0"),
        vanishing=("T_abc",),
        origin={"tiers": "published"},
    ),
    CorpusEntry(
        "conf_reducible_3x2",
        "product of two curved metrics (3 + 2) times one common conformal factor of all "
        "coordinates",
        _tiers(F, T, T, F, F, IND),
        nonzero=("gradP", "cotton0"),
        vanishing=("T_abc", "du"),
        origin={"tiers": "published"},
    ),
    CorpusEntry(
        "conf_separable_4x3",
        "7 dimensions split 4 + 3; conformally separable with a 4-leaf that is not "
        "conformally flat, so T4 carries twice the leaf Weyl tensor",
        _tiers(F, T, F, F, F, F),
        nonzero=("gradP", "T4", "Cpar", "cotton1_projected"),
        vanishing=("T_abc", "Cperp"),
        origin={"tiers": "published", "T4": "published"},
    ),
    CorpusEntry(
        "decomposable_3x2",
        "direct product of a curved 3-metric and a curved 2-metric (parallel projector)",
        _tiers(T, T, T, F, F, IND),
        nonzero=("cotton0",),
        vanishing=("gradP", "T_abc", "du"),
        origin={"tiers": "published"},
    ),
    CorpusEntry(
        "flat_2x2",
        "flat R^4 split into two flat planes; both leaf ranks are excluded from the "
        "Weyl-type obstructions",
        _tiers(T, T, T, IND, IND, IND),
        vanishing=("gradP", "T_abc"),
        bcvfs=("rot_A",),
        origin={"tiers": "trivial"},
    ),
    CorpusEntry(
        "nonseparable_3x3",
        "generic perturbation of a bi-conformally flat 3 + 3 metric; not conformally separable",
        _tiers(F, F, F, F, F, F),
        nonzero=("gradP", "T_abc", "T4"),
        origin={"tiers": "derived"},
    ),
    CorpusEntry(
        "example81_generic",
        "stationary axisymmetric line element foliated by t = const with Phi = r, Psi = r^2, "
        "alpha = 1, B = 1; not conformally separable",
        _tiers(F, F, F, F, T, IND),
        nonzero=("T_abc",),
        vanishing=("cotton0_projected",),
        bcvfs=("time", "axial"),
        origin={"tiers": "published"},
    ),
    CorpusEntry(
        "example81_special",
        "the same axisymmetric family with Phi = Psi = k sin(theta), alpha = k sin^2(theta), "
        "B = 1; conformally separable",
        _tiers(F, T, T, F, F, IND),
        nonzero=("cotton0_projected",),
        vanishing=("T_abc",),
        bcvfs=("time", "axial"),
        origin={"tiers": "published"},
    ),
    CorpusEntry(
        "example82",
        "Phi (dx1^2 + dx2^2 + dx3^2) + 2 beta_i dx^i dx4 + Psi dx4^2 with three non-zero "
        "shifts; cotton0 is non-zero while its projection onto the leaf vanishes",
        _tiers(F, F, F, F, T, IND),
        nonzero=("T_abc", "cotton0"),
        vanishing=("cotton0_projected",),
        origin={"tiers": "published", "cotton0_projected": "published"},
    ),
    CorpusEntry(
        "example82_flat_leaf",
        "shift-free member of the same family: conformally separable with a conformally "
        "flat 3-leaf",
        _tiers(F, T, F, IND, T, IND),
        nonzero=("gradP", "du"),
        vanishing=("T_abc", "cotton0"),
        origin={"tiers": "published"},
    ),
)


def entries() -> tuple[CorpusEntry, ...]:
    return tuple(sorted(ENTRIES, key=lambda e: e.id))


def get(entry_id: str) -> CorpusEntry:
    for e in ENTRIES:
        if e.id == entry_id:
            return e
    raise KeyError(f"no corpus entry {entry_id!r}")


def path(entry_id: str):
    """Filesystem path of the DSL source for an entry."""
    return resources.files(__name__).joinpath(get(entry_id).filename)


# ---------------------------------------------------------------------------
# expectation runner
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    entry: str
    name: str
    ok: bool
    detail: str


def run_entry(entry: CorpusEntry, points: int = 16, seed: int = 0xB1C0,
              threshold: float = 1e-7, identity_points: int = 3, bcvf_points: int = 2,
              identity_tol: float = 1e-9, bcvf_tol: float = 1e-9, bcvf_identity_tol: float = 1e-8,
              rescale_tol: float = 1e-8):
    """Yield one :class:`Check` per expectation, in a fixed order."""
    vm = entry.manifold()
    samples = sample_points(vm.spec.domain, points, seed)
    rep = classify(vm, samples, threshold)
    for tier, want in entry.tiers.items():
        got = rep.tiers[tier]
        yield Check(entry.id, f"tier {tier}", got == want, f"expected {want!r}, got {got!r}")

    reps = evaluate_tensors(vm, entry.nonzero + entry.vanishing, samples, threshold)
    for t in entry.nonzero:
        r = reps[t]
        yield Check(entry.id, f"nonzero {t}", not r.vanishes,
                    f"max scaled residual {r.max_scaled_residual:.3e}")
    for t in entry.vanishing:
        r = reps[t]
        yield Check(entry.id, f"vanishes {t}", r.vanishes,
                    f"max scaled residual {r.max_scaled_residual:.3e}")

    t_zero = rep.tiers["conformally_separable"] is True
    worst, worst_id = 0.0, ""
    for x in samples.points[:identity_points]:
        for ident, res in structure_identities(PointGeometry.from_spec(vm, x), t_zero):
            if res > worst:
                worst, worst_id = res, ident
    yield Check(entry.id, "identity suite", worst < identity_tol,
                f"worst {worst_id or '-'} {worst:.3e}")

    for x in samples.points[:bcvf_points] if entry.bcvfs else ():
        geo = PointGeometry.from_spec(vm, x)
        for name in entry.bcvfs:
            w = _witness(geo, name)
            devs = [d for d in (w.phi_declared_deviation, w.chi_declared_deviation) if d is not None]
            dev = max(devs, default=0.0)
            yield Check(entry.id, f"bcvf {name}", w.residual < bcvf_tol and dev < bcvf_tol,
                        f"residual {w.residual:.3e}, declared gauge deviation {dev:.3e}")
            if w.residual < bcvf_tol:
                ids = _identities(geo, w)
                bad = max(ids, key=lambda r: r[1])
                yield Check(entry.id, f"bcvf identities {name}", bad[1] < bcvf_identity_tol,
                            f"worst {bad[0]} {bad[1]:.3e}")

    for Z, X in entry.rescale:
        r = rescale_invariance_check(vm, Z, X, sample_points(vm.spec.domain, identity_points, seed))
        yield Check(entry.id, f"rescale Z={Z} X={X}", r.scaled_deviation < rescale_tol,
                    f"scaled deviation {r.scaled_deviation:.3e}")


__all__ = ["CorpusEntry", "ENTRIES", "Check", "entries", "get", "path", "run_entry"]
