"""Riemannian quantities at a point, carried as order-3 jets.

Every quantity is held as a :class:`~biconf.jets.Field`, so its coordinate
derivatives come for free: the metric enters with three derivative orders,
the Christoffel symbols with two, curvature with one.  The plain numpy
arrays exposed on the result objects are the values (and derivative arrays)
at the base point.

Index conventions
-----------------
* metric derivatives: ``dg[a, b, c] = d_c g_ab`` (derivative indices last)
* ``gamma[a, b, c] = Gamma^a_bc``
* ``riemann[a, b, c, d] = R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb
  + Gamma^a_rc Gamma^r_db - Gamma^a_rd Gamma^r_cb``;  Ricci ``R_bd = R^a_bad``
* covariant derivatives put the derivative index first:
  ``covariant_derivative(T)[c, ...] = nabla_c T...``
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dsl import (
    BlockSplit, Explicit, ManifoldSpec, Normals, PointEvaluator, check_inside,
)
from .errors import (
    BlockSplitCrossTerms, DegenerateNormals, DimensionTooSmall, SingularMetric,
    UnknownVector, ValenceMismatch,
)
from .jets import Field, finv, fmul, jet_space

_IDX = "abcdefgh"


# ---------------------------------------------------------------------------
# metric
# ---------------------------------------------------------------------------

@dataclass
class MetricEval:
    point: np.ndarray
    g: np.ndarray
    ginv: np.ndarray
    dg: np.ndarray
    d2g: np.ndarray
    d3g: np.ndarray
    field: Field
    inverse_field: Field

    @property
    def n(self):
        return self.g.shape[0]


def _metric_field(spec: ManifoldSpec, ev: PointEvaluator) -> Field:
    n = spec.dim
    jets = np.empty((n, n), dtype=object)
    for a in range(n):
        for b in range(a, n):
            jets[a, b] = jets[b, a] = ev.jet(spec.metric[a][b])
    return Field.from_jets(ev.space, jets)


def metric_from_field(gf: Field, point) -> MetricEval:
    g0 = gf.value
    n = g0.shape[0]
    scale = max(1.0, float(np.abs(g0).max())) ** n
    det = float(np.linalg.det(g0))
    if abs(det) < 1e-12 * scale:
        raise SingularMetric(f"det g = {det:.3e} at {np.asarray(point).tolist()}")
    gi = finv(gf)
    return MetricEval(np.asarray(point, dtype=float), g0, gi.value,
                      gf.partials(1), gf.partials(2), gf.partials(3), gf, gi)


def eval_metric(spec: ManifoldSpec, x, evaluator: PointEvaluator | None = None) -> MetricEval:
    """Metric, inverse and three orders of metric derivatives at ``x``."""
    x = np.asarray(x, dtype=float)
    check_inside(spec, x)
    ev = evaluator or PointEvaluator(spec, x)
    return metric_from_field(_metric_field(spec, ev), x)


# ---------------------------------------------------------------------------
# connection and curvature
# ---------------------------------------------------------------------------

@dataclass
class ConnectionEval:
    gamma: np.ndarray
    dgamma: np.ndarray       # [a, b, c, d] = d_d Gamma^a_bc
    d2gamma: np.ndarray      # [a, b, c, d, e] = d_d d_e Gamma^a_bc
    field: Field


def christoffel_field(gf: Field, ginv: Field) -> Field:
    dg = gf.grad()                                   # [c, a, b] = d_c g_ab
    lowered = dg.transpose("bdc->dbc") + dg.transpose("cdb->dbc") - dg  # [d, b, c]
    return fmul("ad,dbc->abc", ginv, lowered) * 0.5


def christoffel(m: MetricEval) -> ConnectionEval:
    gam = christoffel_field(m.field, m.inverse_field)
    return ConnectionEval(gam.value, gam.partials(1), gam.partials(2), gam)


def riemann_from_connection(gam: Field) -> Field:
    """``R^a_bcd`` of an arbitrary (not necessarily metric) connection field."""
    d = gam.grad()                                   # [e, a, b, c] = d_e Gamma^a_bc
    quad = fmul("arc,rdb->abcd", gam, gam)
    return (d.transpose("cadb->abcd") - d.transpose("dacb->abcd")
            + quad - quad.transpose("abdc->abcd"))


def weyl_tensor(riem, ricci, scalar, g) -> np.ndarray:
    """Trace-free part ``C^a_bcd`` of a Riemann tensor (values only)."""
    n = g.shape[0]
    if n < 3:
        raise DimensionTooSmall(f"the Weyl tensor needs dimension >= 3, got {n}")
    if n == 3:
        return np.zeros_like(riem)
    ginv = np.linalg.inv(g)
    delta = np.eye(n)
    ric_up = ginv @ ricci                            # R^a_c
    c = riem.copy()
    c -= (np.einsum("ac,bd->abcd", delta, ricci) - np.einsum("ad,bc->abcd", delta, ricci)
          + np.einsum("bd,ac->abcd", g, ric_up) - np.einsum("bc,ad->abcd", g, ric_up)) / (n - 2)
    c += scalar / ((n - 1) * (n - 2)) * (np.einsum("ac,bd->abcd", delta, g)
                                         - np.einsum("ad,bc->abcd", delta, g))
    return c


@dataclass
class CurvatureEval:
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float
    g: np.ndarray
    field: Field             # R^a_bcd with one derivative order left
    ricci_field: Field
    scalar_field: Field

    @property
    def weyl(self) -> np.ndarray:
        return weyl_tensor(self.riemann, self.ricci, self.scalar, self.g)


def curvature(c: ConnectionEval, m: MetricEval) -> CurvatureEval:
    rf = riemann_from_connection(c.field)
    ric = rf.transpose("abad->bd")
    sc = fmul("ab,ab->", m.inverse_field, ric)
    return CurvatureEval(rf.value, ric.value, float(sc.value), m.g, rf, ric, sc)


# ---------------------------------------------------------------------------
# derivatives of tensor fields
# ---------------------------------------------------------------------------

def _check_valence(t: Field, valence: str):
    if len(valence) != t.ndim or set(valence) - set("ud"):
        raise ValenceMismatch(f"valence {valence!r} does not describe a rank-{t.ndim} tensor")


def covariant_derivative(t: Field, valence: str, gam: Field) -> Field:
    """``nabla_q T`` for the connection ``gam``; result index ``q`` comes first.

    ``valence`` lists each index of ``t`` as ``'u'`` (contravariant) or ``'d'``.
    The connection need not be symmetric; its lower-left slot is the
    differentiation slot, ``nabla_q v^a = d_q v^a + gam^a_qr v^r``.
    """
    _check_valence(t, valence)
    idx = _IDX[: t.ndim]
    out = t.grad()
    for i, kind in enumerate(valence):
        swapped = idx[:i] + "r" + idx[i + 1:]
        if kind == "u":
            out = out + fmul(f"{idx[i]}qr,{swapped}->q{idx}", gam, t)
        else:
            out = out - fmul(f"rq{idx[i]},{swapped}->q{idx}", gam, t)
    return out


def lie_derivative(t: Field, valence: str, xi: Field) -> Field:
    """Lie derivative of a tensor field along the vector field ``xi`` (coordinate partials)."""
    _check_valence(t, valence)
    idx = _IDX[: t.ndim]
    dxi = xi.grad()                                  # [q, a] = d_q xi^a
    out = fmul(f"q,q{idx}->{idx}", xi, t.grad())
    for i, kind in enumerate(valence):
        swapped = idx[:i] + "r" + idx[i + 1:]
        if kind == "u":
            out = out - fmul(f"{swapped},r{idx[i]}->{idx}", t, dxi)
        else:
            out = out + fmul(f"{swapped},{idx[i]}r->{idx}", t, dxi)
    return out


def lie_derivative_connection(gam: Field, xi: Field) -> Field:
    """Lie derivative of a connection: tensorial part plus ``d_b d_c xi^a``."""
    tensorial = lie_derivative(gam, "udd", xi)
    second = xi.grad().grad()                        # [b, c, a]
    return tensorial + second.transpose("bca->abc")


# ---------------------------------------------------------------------------
# projector
# ---------------------------------------------------------------------------

@dataclass
class ProjectorEval:
    p: int
    P_dd: np.ndarray
    P_ud: np.ndarray
    P_uu: np.ndarray
    Pi_dd: np.ndarray
    Pi_ud: np.ndarray
    Pi_uu: np.ndarray
    S_dd: np.ndarray
    dP: np.ndarray           # [a, b, c] = d_c P_ab
    d2P: np.ndarray
    fields: dict             # name -> Field for every variant above


def _is_zero(e) -> bool:
    return e is None or (e.kind == "num" and e.value == 0.0)


def projector_field(spec: ManifoldSpec, m: MetricEval, ev: PointEvaluator) -> Field:
    """Covariant ``P_ab`` as a field, built from the manifold's projector form."""
    n = spec.dim
    pr = spec.projector
    sp = m.field.space
    if isinstance(pr, BlockSplit):
        leaf = [spec.coords.index(c) for c in pr.leaf]
        for a in leaf:
            for b in range(n):
                if b not in leaf and not _is_zero(spec.metric[a][b]):
                    raise BlockSplitCrossTerms(
                        f"metric couples leaf coordinate {spec.coords[a]} to {spec.coords[b]}")
        mask = np.zeros((n, n))
        mask[np.ix_(leaf, leaf)] = 1.0
        return Field(sp, m.field.c * mask[..., None], m.field.order)
    if isinstance(pr, Normals):
        jets = np.empty((len(pr.covectors), n), dtype=object)
        for i, row in enumerate(pr.covectors):
            for a, e in enumerate(row):
                jets[i, a] = ev.jet(e)
        nlow = Field.from_jets(sp, jets)
        nup = fmul("ab,ib->ia", m.inverse_field, nlow)
        gram = fmul("ia,ja->ij", nup, nlow)
        g0 = gram.value
        scale = max(1.0, float(np.abs(g0).max())) ** g0.shape[0]
        if abs(np.linalg.det(g0)) < 1e-12 * scale:
            raise DegenerateNormals("the normal covectors have a singular Gram matrix")
        pi = fmul("ia,ij,jb->ab", nlow, finv(gram), nlow)
        return m.field - pi
    if isinstance(pr, Explicit):
        jets = np.empty((n, n), dtype=object)
        for a in range(n):
            for b in range(a, n):
                jets[a, b] = jets[b, a] = ev.jet(pr.P[a][b])
        return Field.from_jets(sp, jets)
    raise TypeError(f"unknown projector form {type(pr).__name__}")


def projector_from_field(m: MetricEval, pf: Field) -> ProjectorEval:
    gi = m.inverse_field
    pif = m.field - pf
    fields = {
        "P_dd": pf,
        "P_ud": fmul("ac,cb->ab", gi, pf),
        "P_uu": fmul("ac,cd,db->ab", gi, pf, gi),
        "Pi_dd": pif,
        "Pi_ud": fmul("ac,cb->ab", gi, pif),
        "Pi_uu": fmul("ac,cd,db->ab", gi, pif, gi),
    }
    fields["S_dd"] = pf - pif
    fields["S_ud"] = fields["P_ud"] - fields["Pi_ud"]
    fields["S_uu"] = fields["P_uu"] - fields["Pi_uu"]
    p = int(round(float(np.trace(fields["P_ud"].value))))
    vals = {k: f.value for k, f in fields.items()}
    return ProjectorEval(p, vals["P_dd"], vals["P_ud"], vals["P_uu"], vals["Pi_dd"],
                         vals["Pi_ud"], vals["Pi_uu"], vals["S_dd"],
                         pf.partials(1), pf.partials(2), fields)


def projector_eval(spec: ManifoldSpec, m: MetricEval, check: bool = True,
                   evaluator: PointEvaluator | None = None) -> ProjectorEval:
    ev = evaluator or PointEvaluator(spec, m.point)
    out = projector_from_field(m, projector_field(spec, m, ev))
    if check:
        from .dsl import validate_spec
        validate_spec(spec, m.point)
    return out


# ---------------------------------------------------------------------------
# vector fields
# ---------------------------------------------------------------------------

def vector_field(spec: ManifoldSpec, name: str, evaluator: PointEvaluator) -> Field:
    if name not in spec.vectors:
        raise UnknownVector(f"manifold {spec.name!r} declares no vector {name!r}")
    comps = spec.vectors[name].components
    jets = np.empty(spec.dim, dtype=object)
    for a, e in enumerate(comps):
        jets[a] = evaluator.jet(e)
    return Field.from_jets(evaluator.space, jets)


def metric_compatibility(m: MetricEval, c: ConnectionEval) -> np.ndarray:
    """``nabla_c g_ab`` (should vanish for the Levi-Civita connection)."""
    return covariant_derivative(m.field, "dd", c.field).value


def second_bianchi(curv: CurvatureEval, c: ConnectionEval) -> np.ndarray:
    """Cyclic sum ``nabla_e R^a_bcd + nabla_c R^a_bde + nabla_d R^a_bec``."""
    dr = covariant_derivative(curv.field, "uddd", c.field).value   # [e, a, b, c, d]
    return (dr + np.einsum("cabde->eabcd", dr) + np.einsum("dabec->eabcd", dr))


def space_for(spec: ManifoldSpec):
    return jet_space(spec.dim)
