"""Bi-conformal calculus for a metric with an orthogonal projector pair.

Given the metric ``g`` and the projector ``P`` (with complement
``Pi = g - P`` of ranks ``p`` and ``n - p``), this module builds

* the first-order basis ``M, E, W, T, A, B`` out of ``nabla P``,
* the connection ``gammabar = Gamma + L`` for which the projectors are
  covariantly constant up to trace terms,
* its curvature ``Rbar`` and the derived tensors ``L0, L1, T4, Cpar, Cperp``,
  ``Lambda``, ``Upsilon`` and their complements,
* the Cotton-type obstructions ``cotton0, cotton1`` and the one-form ``u``.

All tensors are :class:`~biconf.jets.Field` objects, so the same code
produces values and the derivatives needed downstream.  Index layouts:

* ``M[a, b, c] = M_abc``,  ``T[a, b, c] = T_abc``
* ``L[a, b, c] = L^a_bc``, ``gammabar[a, b, c]``
* ``Rbar[a, b, c, d] = Rbar^a_bcd`` with the same convention as ``R``
* ``T4[d, c, a, b] = T^d_cab``
* ``Lambda[d, b, c] = Lambda^d_bc``, ``Upsilon[b, s, c] = Upsilon_b^sc``
* ``cotton0[a, b, c] = nablabar_[a L0_b]c``

Tensors that divide by ``p - 1``, ``p - 2`` (or their complements) are
``None`` when the rank forbids them; :meth:`BarCurvatureEval.require`
turns that into :class:`~biconf.errors.RankExcluded`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .dsl import ManifoldSpec, PointEvaluator, ValidatedManifold, check_inside, ensure_validated
from .errors import NotABCVF, RankExcluded
from .geometry import (
    ConnectionEval, MetricEval, ProjectorEval, christoffel, covariant_derivative, curvature,
    eval_metric, lie_derivative, lie_derivative_connection, metric_from_field,
    projector_field, projector_from_field, riemann_from_connection, vector_field,
)
from .jets import Field, fmul, fscalar_mul


def _outer(a: Field, b: Field, spec: str) -> Field:
    return fmul(spec, a, b)


# ---------------------------------------------------------------------------
# first-order basis
# ---------------------------------------------------------------------------

@dataclass
class BiconfBasis:
    p: int
    n: int
    M: np.ndarray
    E: np.ndarray
    W: np.ndarray
    T: np.ndarray
    A: np.ndarray
    B: np.ndarray
    fields: dict


def biconf_basis(m: MetricEval, proj: ProjectorEval, conn: ConnectionEval | None = None) -> BiconfBasis:
    conn = conn or christoffel(m)
    n, p = m.n, proj.p
    f = proj.fields
    P, Pi = f["P_dd"], f["Pi_dd"]
    nabla_p = covariant_derivative(P, "dd", conn.field)          # [c, a, b]
    M = nabla_p.transpose("bac->abc") + nabla_p.transpose("cab->abc") - nabla_p
    E = fmul("acb,cb->a", M, f["P_uu"])
    W = -fmul("acb,cb->a", M, f["Pi_uu"])
    T = M + _outer(W, Pi, "a,bc->abc") / (n - p) - _outer(E, P, "a,bc->abc") / p
    A = fmul("da,dbc->abc", f["P_ud"], T)
    B = fmul("da,dbc->abc", f["Pi_ud"], T)
    fields = {"nablaP": nabla_p, "M": M, "E": E, "W": W, "T": T, "A": A, "B": B}
    return BiconfBasis(p, n, M.value, E.value, W.value, T.value, A.value, B.value, fields)


# ---------------------------------------------------------------------------
# connection
# ---------------------------------------------------------------------------

@dataclass
class BarConnectionEval:
    L: np.ndarray
    gamma_bar: np.ndarray
    dgamma_bar: np.ndarray       # [a, b, c, d] = d_d gammabar^a_bc
    d2gamma_bar: np.ndarray
    fields: dict


def difference_tensor(proj: ProjectorEval, basis: BiconfBasis) -> Field:
    """``L^a_bc``: the difference between the bar connection and Levi-Civita."""
    n, p = basis.n, basis.p
    f, b = proj.fields, basis.fields
    E, W, M = b["E"], b["W"], b["M"]
    Pud, Piud = f["P_ud"], f["Pi_ud"]
    out = (_outer(E, Pud, "b,ac->abc") + _outer(E, Pud, "c,ab->abc")) / (2 * p)
    out = out + (_outer(W, Piud, "b,ac->abc") + _outer(W, Piud, "c,ab->abc")) / (2 * (n - p))
    out = out + fmul("ar,rbc->abc", f["S_uu"], M) * 0.5
    # symmetric by construction; averaging removes rounding asymmetry
    return (out + out.transpose("acb->abc")) * 0.5


def bar_connection(m: MetricEval, proj: ProjectorEval, basis: BiconfBasis,
                   conn: ConnectionEval | None = None) -> BarConnectionEval:
    conn = conn or christoffel(m)
    L = difference_tensor(proj, basis)
    gb = conn.field + L
    return BarConnectionEval(L.value, gb.value, gb.partials(1), gb.partials(2),
                             {"L": L, "gamma_bar": gb, "gamma": conn.field})


def bar_covd(t: Field, valence: str, bconn: BarConnectionEval) -> Field:
    """Covariant derivative with the bar connection (derivative index first).

    Index positions are part of the input: ``nablabar`` does not commute with
    raising or lowering, so ``P_ab``, ``P^a_b`` and ``P^ab`` must each be
    differentiated in the placement that is wanted.
    """
    return covariant_derivative(t, valence, bconn.fields["gamma_bar"])


# ---------------------------------------------------------------------------
# curvature and derived tensors
# ---------------------------------------------------------------------------

def _l_tensor(rb: Field, pud: Field, pdd: Field, puu: Field, p: int):
    """Trace-adjusted Ricci-type contraction of ``Rbar`` with one projector."""
    x = fmul("rq,qrdb->db", pud, rb)
    t1 = fmul("dr,rcdb->bc", pud, rb)
    t2 = fmul("dc,db->bc", pud, x) + fmul("db,dc->bc", pud, x) - x
    r0 = fmul("rcdb,dr,cb->", rb, pud, puu)
    return (t1 - t2 / p) * 2.0 + fscalar_mul(r0, pdd) / (1 - p), r0


def _weyl_half(pud: Field, pdd: Field, puu: Field, l: Field, p: int) -> Field:
    """Projector-weighted correction to ``2 Rbar`` inside ``T4`` (one leaf's share)."""
    la = (l - l.transpose("ab->ba")) * 0.5
    t1 = fmul("dc,ab->dcab", pud, la)
    t2 = (fmul("db,ac->dcab", pud, l) - fmul("da,bc->dcab", pud, l)) * 0.5
    lq = fmul("bq,qd->bd", l, puu)
    t3 = (fmul("ca,bd->dcab", pdd, lq) - fmul("cb,ad->dcab", pdd, lq)) * 0.5
    return (t1 + t2 + t3) * (2.0 / (2 - p))


def _project4(t: Field, pud: Field) -> Field:
    return fmul("rstq,dr,sc,ta,qb->dcab", t, pud, pud, pud, pud)


class BarCurvatureEval:
    """Curvature of the bar connection and everything built from it."""

    def __init__(self, fields: dict, p: int, n: int):
        self.fields = fields
        self.p = p
        self.n = n
        for k, v in fields.items():
            setattr(self, k, None if v is None else v.value)

    def require(self, name: str) -> Field:
        f = self.fields.get(name)
        if f is None:
            raise RankExcluded(f"{name} is not defined for leaf ranks p={self.p}, n-p={self.n - self.p}")
        return f


def bar_curvature(bconn: BarConnectionEval, m: MetricEval, proj: ProjectorEval,
                  basis: BiconfBasis) -> BarCurvatureEval:
    n, p = basis.n, basis.p
    q = n - p
    f = proj.fields
    gb = bconn.fields["gamma_bar"]
    rb = riemann_from_connection(gb)
    out: dict[str, Field | None] = {"Rbar": rb}

    L0 = L1 = half0 = half1 = None
    if p != 1:
        L0, r0 = _l_tensor(rb, f["P_ud"], f["P_dd"], f["P_uu"], p)
        out["Rbar0"] = r0
    else:
        out["Rbar0"] = None
    if q != 1:
        L1, r1 = _l_tensor(rb, f["Pi_ud"], f["Pi_dd"], f["Pi_uu"], q)
        out["Rbar1"] = r1
    else:
        out["Rbar1"] = None
    out["L0"], out["L1"] = L0, L1

    if p not in (1, 2):
        half0 = _weyl_half(f["P_ud"], f["P_dd"], f["P_uu"], L0, p)
        # the complementary share is annihilated by four P projections
        out["Cpar"] = _project4(rb * 2.0 - half0, f["P_ud"])
    else:
        out["Cpar"] = None
    if q not in (1, 2):
        half1 = _weyl_half(f["Pi_ud"], f["Pi_dd"], f["Pi_uu"], L1, q)
        out["Cperp"] = _project4(rb * 2.0 - half1, f["Pi_ud"])
    else:
        out["Cperp"] = None
    out["T4"] = rb * 2.0 - half0 - half1 if (half0 is not None and half1 is not None) else None

    nbp = covariant_derivative(f["P_dd"], "dd", gb)        # [r, b, c]
    nbpi = covariant_derivative(f["Pi_dd"], "dd", gb)
    out["Lambda"] = fmul("dr,rbc->dbc", f["P_uu"], nbp) * 2.0
    out["Lambdabar"] = fmul("dr,rbc->dbc", f["Pi_uu"], nbpi) * 2.0
    nbpuu = covariant_derivative(f["P_uu"], "uu", gb)      # [b, s, c]
    nbpiuu = covariant_derivative(f["Pi_uu"], "uu", gb)
    out["Upsilon"] = fmul("rqb,sr,cq->bsc", nbp, f["P_uu"], f["P_uu"]) * 2.0 + nbpuu * (2 - p)
    out["Upsilonbar"] = fmul("rqb,sr,cq->bsc", nbpi, f["Pi_uu"], f["Pi_uu"]) * 2.0 + nbpiuu * (2 - q)
    out["nablabar_P_dd"] = nbp
    out["nablabar_Pi_dd"] = nbpi
    out["nablabar_P_uu"] = nbpuu
    out["nablabar_Pi_uu"] = nbpiuu
    out["nablabar_P_ud"] = covariant_derivative(f["P_ud"], "ud", gb)
    out["nablabar_Pi_ud"] = covariant_derivative(f["Pi_ud"], "ud", gb)
    return BarCurvatureEval(out, p, n)


# ---------------------------------------------------------------------------
# foliation obstructions
# ---------------------------------------------------------------------------

@dataclass
class FoliationObstructions:
    cotton0: np.ndarray | None
    cotton0_projected: np.ndarray | None
    cotton1: np.ndarray | None
    cotton1_projected: np.ndarray | None
    u: np.ndarray
    du: np.ndarray
    fields: dict


def _cotton(l: Field, gb: Field) -> Field:
    nl = covariant_derivative(l, "dd", gb)                # [a, b, c]
    return (nl - nl.transpose("bac->abc")) * 0.5


def one_form_u(basis: BiconfBasis) -> Field:
    n, p = basis.n, basis.p
    return basis.fields["E"] / (2 * p) + basis.fields["W"] / (2 * (n - p))


def foliation_obstructions(bconn: BarConnectionEval, bcurv: BarCurvatureEval,
                           basis: BiconfBasis, m: MetricEval, proj: ProjectorEval,
                           strict: bool = False) -> FoliationObstructions:
    """Cotton-type obstructions and the exactness defect of ``u``.

    With ``strict=True`` a missing ``L0`` (rank 1 or 2 leaf) raises
    :class:`RankExcluded`; otherwise the affected entries are ``None``.
    """
    gb = bconn.fields["gamma_bar"]
    f = proj.fields
    fields: dict[str, Field | None] = {}
    L0, L1 = bcurv.fields.get("L0"), bcurv.fields.get("L1")
    if strict and (L0 is None or basis.p == 2):
        raise RankExcluded(f"cotton0 needs a leaf rank other than 1 and 2, got p={basis.p}")
    for tag, l, pud, rank in (("0", L0, f["P_ud"], basis.p), ("1", L1, f["Pi_ud"], basis.n - basis.p)):
        if l is None or rank == 2:
            fields["cotton" + tag] = fields[f"cotton{tag}_projected"] = None
            continue
        c = _cotton(l, gb)
        fields["cotton" + tag] = c
        fields[f"cotton{tag}_projected"] = fmul("rsq,ra,sb,qc->abc", c, pud, pud, pud)
    u = one_form_u(basis)
    du = u.grad()                                         # [a, b] = d_a u_b
    du = (du - du.transpose("ab->ba")) * 0.5
    fields["u"], fields["du"] = u, du
    val = {k: (None if v is None else v.value) for k, v in fields.items()}
    return FoliationObstructions(val["cotton0"], val["cotton0_projected"], val["cotton1"],
                                 val["cotton1_projected"], val["u"], val["du"], fields)


# ---------------------------------------------------------------------------
# one-stop evaluation at a point
# ---------------------------------------------------------------------------

class PointGeometry:
    """Lazily computed geometry at one point, from a spec or from raw fields."""

    def __init__(self, metric: MetricEval, P: Field, spec: ManifoldSpec | None = None,
                 evaluator: PointEvaluator | None = None):
        self.metric = metric
        self._P = P
        self.spec = spec
        self.evaluator = evaluator

    @classmethod
    def from_spec(cls, spec, x) -> "PointGeometry":
        raw = spec.spec if isinstance(spec, ValidatedManifold) else spec
        x = np.asarray(x, dtype=float)
        check_inside(raw, x)
        ev = PointEvaluator(raw, x)
        m = eval_metric(raw, x, ev)
        return cls(m, projector_field(raw, m, ev), raw, ev)

    @classmethod
    def from_fields(cls, g: Field, P: Field, point) -> "PointGeometry":
        return cls(metric_from_field(g, point), P)

    @property
    def point(self):
        return self.metric.point

    @property
    def n(self):
        return self.metric.n

    @property
    def p(self):
        return self.proj.p

    @cached_property
    def conn(self) -> ConnectionEval:
        return christoffel(self.metric)

    @cached_property
    def curv(self):
        return curvature(self.conn, self.metric)

    @cached_property
    def proj(self) -> ProjectorEval:
        return projector_from_field(self.metric, self._P)

    @cached_property
    def basis(self) -> BiconfBasis:
        return biconf_basis(self.metric, self.proj, self.conn)

    @cached_property
    def bar(self) -> BarConnectionEval:
        return bar_connection(self.metric, self.proj, self.basis, self.conn)

    @cached_property
    def bar_curv(self) -> BarCurvatureEval:
        return bar_curvature(self.bar, self.metric, self.proj, self.basis)

    @cached_property
    def foliation(self) -> FoliationObstructions:
        return foliation_obstructions(self.bar, self.bar_curv, self.basis, self.metric, self.proj)

    def field(self, name: str) -> Field:
        """Look a named tensor field up across all layers."""
        for src in (lambda: self.proj.fields, lambda: self.basis.fields,
                    lambda: self.bar.fields, lambda: self.bar_curv.fields,
                    lambda: self.foliation.fields):
            d = src()
            if name in d:
                if d[name] is None:
                    raise RankExcluded(f"{name} is not defined for p={self.p}, n-p={self.n - self.p}")
                return d[name]
        if name == "g":
            return self.metric.field
        if name == "ginv":
            return self.metric.inverse_field
        if name == "R":
            return self.curv.field
        raise KeyError(name)

    def vector(self, name: str) -> Field:
        if self.spec is None:
            raise ValueError("vector fields need a spec-backed geometry")
        return vector_field(self.spec, name, self.evaluator)


# ---------------------------------------------------------------------------
# leaf-intrinsic oracle
# ---------------------------------------------------------------------------

def leaf_spec(spec: ManifoldSpec, x, which: str = "P") -> ManifoldSpec:
    """The induced metric on the block leaf through ``x`` as a standalone spec.

    Coordinates outside the leaf are frozen at their values in ``x`` and
    become named constants.  Only block-split projectors have such a leaf.
    """
    from .dsl import BlockSplit
    from .errors import NotBlockSplit

    if not isinstance(spec.projector, BlockSplit):
        raise NotBlockSplit("leaf metrics are only available for block-split projectors")
    leaf = list(spec.projector.leaf)
    if which != "P":
        leaf = [c for c in spec.coords if c not in leaf]
    idx = [spec.coords.index(c) for c in leaf]
    consts = dict(spec.constants)
    for i, c in enumerate(spec.coords):
        if c not in leaf:
            consts[c] = float(x[i])
    metric = tuple(tuple(spec.metric[a][b] for b in idx) for a in idx)
    frozen = _freeze(spec, set(leaf))
    metric = tuple(tuple(None if e is None else frozen(e) for e in row) for row in metric)
    subs = {k: frozen(v) for k, v in spec.subexprs.items()}
    from .dsl import ManifoldSpec as _MS
    return _MS(f"{spec.name}_leaf", len(idx), tuple(leaf), consts, subs, metric,
               BlockSplit((leaf[0],)), tuple(spec.domain[i] for i in idx), {})


def _freeze(spec, leaf: set):
    from .dsl import ExprNode

    def rec(e):
        if e.kind == "coord" and e.value not in leaf:
            return ExprNode("const", e.value)
        if e.children:
            return ExprNode(e.kind, e.value, tuple(rec(c) for c in e.children))
        return e
    return rec


def leaf_cotton_oracle(spec, x, which: str = "P") -> np.ndarray:
    """``nabla_[a L_b]c`` of the 3-dimensional block leaf, from its own metric.

    ``L = 2 Ric - (R/2) g`` (twice the Schouten tensor in dimension 3), so the
    result matches the leaf block of ``cotton0`` for conformally separable
    metrics.  Uses only the Levi-Civita machinery of the leaf metric.
    """
    from .errors import LeafNotRank3

    raw = spec.spec if isinstance(spec, ValidatedManifold) else spec
    ls = leaf_spec(raw, x, which)
    if ls.dim != 3:
        raise LeafNotRank3(f"the {which} leaf has dimension {ls.dim}, not 3")
    idx = [raw.coords.index(c) for c in ls.coords]
    m = eval_metric(ls, np.asarray(x, dtype=float)[idx])
    c = christoffel(m)
    cv = curvature(c, m)
    schouten2 = cv.ricci_field * 2.0 - fscalar_mul(cv.scalar_field, m.field) * 0.5
    nl = covariant_derivative(schouten2, "dd", c.field)
    return ((nl - nl.transpose("bac->abc")) * 0.5).value


def leaf_weyl(spec, x, which: str = "P") -> np.ndarray:
    """Weyl tensor ``C^a_bcd`` of the block leaf through ``x``."""
    raw = spec.spec if isinstance(spec, ValidatedManifold) else spec
    ls = leaf_spec(raw, x, which)
    idx = [raw.coords.index(c) for c in ls.coords]
    m = eval_metric(ls, np.asarray(x, dtype=float)[idx])
    return curvature(christoffel(m), m).weyl


# ---------------------------------------------------------------------------
# bi-conformal vector fields
# ---------------------------------------------------------------------------

def scaled_residual(lhs, rhs) -> float:
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    mag = max(np.abs(lhs).max(initial=0.0), np.abs(rhs).max(initial=0.0))
    return float(np.abs(lhs - rhs).max(initial=0.0) / (1.0 + mag))


@dataclass
class BCVFWitness:
    name: str
    point: np.ndarray
    xi: np.ndarray
    dxi: np.ndarray
    d2xi: np.ndarray
    phi: float
    chi: float
    phi_bar: np.ndarray
    phi_star: np.ndarray
    chi_star: np.ndarray
    chi_bar: np.ndarray
    r_P: np.ndarray
    r_Pi: np.ndarray
    residual_P: float
    residual_Pi: float
    phi_declared_deviation: float | None
    chi_declared_deviation: float | None
    fields: dict = field(repr=False, default_factory=dict)

    @property
    def residual(self) -> float:
        return max(self.residual_P, self.residual_Pi)


def _witness(geo: PointGeometry, name: str) -> BCVFWitness:
    xi = geo.vector(name)
    f = geo.proj.fields
    n, p = geo.n, geo.p
    lp = lie_derivative(f["P_dd"], "dd", xi)
    lpi = lie_derivative(f["Pi_dd"], "dd", xi)
    phi = fmul("ab,ab->", f["P_uu"], lp) / p
    chi = fmul("ab,ab->", f["Pi_uu"], lpi) / (n - p)
    rp = lp - fscalar_mul(phi, f["P_dd"])
    rpi = lpi - fscalar_mul(chi, f["Pi_dd"])
    dphi, dchi = phi.grad(), chi.grad()
    phi_bar = fmul("ca,c->a", f["P_ud"], dphi)
    phi_star = fmul("ca,c->a", f["Pi_ud"], dphi)
    chi_star = fmul("ca,c->a", f["P_ud"], dchi)
    chi_bar = fmul("ca,c->a", f["Pi_ud"], dchi)
    spec_vec = geo.spec.vectors[name]
    devs = []
    for decl, got in ((spec_vec.phi, phi), (spec_vec.chi, chi)):
        if decl is None:
            devs.append(None)
        else:
            want = geo.evaluator.jet(decl).value
            devs.append(abs(want - float(got.value)) / (1.0 + abs(float(got.value))))
    fields = {"xi": xi, "phi": phi, "chi": chi, "dphi": dphi, "dchi": dchi,
              "phi_bar": phi_bar, "phi_star": phi_star, "chi_star": chi_star, "chi_bar": chi_bar,
              "LP": lp, "LPi": lpi}
    return BCVFWitness(
        name, geo.point, xi.value, xi.partials(1), xi.partials(2),
        float(phi.value), float(chi.value), phi_bar.value, phi_star.value, chi_star.value,
        chi_bar.value, rp.value, rpi.value, scaled_residual(lp.value, fscalar_mul(phi, f["P_dd"]).value),
        scaled_residual(lpi.value, fscalar_mul(chi, f["Pi_dd"]).value), devs[0], devs[1], fields)


def bcvf_check(spec, name: str, x) -> BCVFWitness:
    """Lie-derive both projectors along the named vector and extract the gauges."""
    vm = ensure_validated(spec)
    geo = PointGeometry.from_spec(vm, x)
    return _witness(geo, name)


def bcvf_identity_suite(spec, name: str, x, threshold: float = 1e-7,
                        geometry: PointGeometry | None = None) -> list[tuple[str, float]]:
    """Scaled residuals of the transformation laws every BCVF must satisfy."""
    vm = ensure_validated(spec)
    geo = geometry or PointGeometry.from_spec(vm, x)
    w = _witness(geo, name)
    if w.residual > threshold:
        raise NotABCVF(f"vector {name!r} is not bi-conformal at {list(map(float, geo.point))}: "
                       f"residual {w.residual:.3e}")
    return _identities(geo, w)


def _identities(geo: PointGeometry, w: BCVFWitness) -> list[tuple[str, float]]:
    n, p = geo.n, geo.p
    q = n - p
    f = geo.proj.fields
    b = geo.basis.fields
    gb = geo.bar.fields["gamma_bar"]
    bc = geo.bar_curv.fields
    wf = w.fields
    xi, phi, chi = wf["xi"], wf["phi"], wf["chi"]
    g, ginv = geo.metric.field, geo.metric.inverse_field
    P, Pi, S = f["P_dd"], f["Pi_dd"], f["S_dd"]
    phi_up = fmul("pq,q->p", ginv, wf["dphi"])
    chi_up = fmul("pq,q->p", ginv, wf["dchi"])
    out = []

    def check(name, lhs: Field, rhs: Field):
        out.append((name, scaled_residual(lhs.value, rhs.value)))

    def sm(s, t):
        return fscalar_mul(s, t)

    M = b["M"]
    m_up = fmul("pq,qbc->pbc", ginv, M)
    rhs = (sm(phi, M) + sm(chi - phi, fmul("ap,pbc->abc", P, m_up))
           - fmul("bc,a->abc", P, wf["phi_star"]) + fmul("cb,a->abc", Pi, wf["chi_star"]))
    check("lie_M", lie_derivative(M, "ddd", xi), rhs)
    check("lie_E", lie_derivative(b["E"], "d", xi), wf["phi_star"] * (-p))
    check("lie_W", lie_derivative(b["W"], "d", xi), wf["chi_star"] * (p - n))
    T = b["T"]
    t_up = fmul("rq,qbc->rbc", ginv, T)
    rhs = sm(phi, fmul("ar,rbc->abc", Pi, t_up)) + sm(chi, fmul("ar,rbc->abc", P, t_up))
    check("lie_T", lie_derivative(T, "ddd", xi), rhs)
    a_up = fmul("ad,dbc->abc", ginv, b["A"])
    b_up = fmul("ad,dbc->abc", ginv, b["B"])
    check("lie_A", lie_derivative(a_up, "udd", xi), sm(chi - phi, a_up))
    check("lie_B", lie_derivative(b_up, "udd", xi), sm(phi - chi, b_up))

    lie_gb = lie_derivative_connection(gb, xi)
    pb_up = fmul("ab,b->a", ginv, wf["phi_bar"])
    cb_up = fmul("ab,b->a", ginv, wf["chi_bar"])
    Pud, Piud = f["P_ud"], f["Pi_ud"]
    rhs = (fmul("b,ac->abc", wf["phi_bar"], Pud) + fmul("c,ab->abc", wf["phi_bar"], Pud)
           - fmul("a,cb->abc", pb_up, P)
           + fmul("b,ac->abc", wf["chi_bar"], Piud) + fmul("c,ab->abc", wf["chi_bar"], Piud)
           - fmul("a,cb->abc", cb_up, Pi)) * 0.5
    check("lie_gammabar_gauge", lie_gb, rhs)
    dxi = covariant_derivative(xi, "u", gb)                   # [c, a]
    ddxi = covariant_derivative(dxi, "du", gb)                # [b, c, a]
    rhs = ddxi.transpose("bca->abc") + fmul("d,acdb->abc", xi, bc["Rbar"])
    check("lie_gammabar_curvature", lie_gb, rhs)

    alpha = (phi + chi) * 0.5
    beta = (phi - chi) * 0.5
    check("lie_g", lie_derivative(g, "dd", xi), sm(alpha, g) + sm(beta, S))
    check("lie_S", lie_derivative(S, "dd", xi), sm(alpha, S) + sm(beta, g))
    zero2 = Field.constant(g.space, np.zeros((n, n)))
    check("lie_P_mixed", lie_derivative(Pud, "ud", xi), zero2)
    check("lie_Pi_mixed", lie_derivative(Piud, "ud", xi), zero2)
    check("lie_P_up", lie_derivative(f["P_uu"], "uu", xi), sm(phi, f["P_uu"]) * -1.0)
    check("lie_Pi_up", lie_derivative(f["Pi_uu"], "uu", xi), sm(chi, f["Pi_uu"]) * -1.0)

    zero3 = Field.constant(g.space, np.zeros((n, n, n)))
    check("lie_nablabar_P_dd", lie_derivative(bc["nablabar_P_dd"], "ddd", xi),
          sm(phi, bc["nablabar_P_dd"]) + fmul("c,ab->cab", wf["phi_star"], P))
    check("lie_nablabar_Pi_dd", lie_derivative(bc["nablabar_Pi_dd"], "ddd", xi),
          sm(chi, bc["nablabar_Pi_dd"]) + fmul("c,ab->cab", wf["chi_star"], Pi))
    check("lie_nablabar_P_mixed", lie_derivative(bc["nablabar_P_ud"], "dud", xi), zero3)
    check("lie_nablabar_Pi_mixed", lie_derivative(bc["nablabar_Pi_ud"], "dud", xi), zero3)
    check("lie_Lambda", lie_derivative(bc["Lambda"], "udd", xi), zero3)
    check("lie_Lambdabar", lie_derivative(bc["Lambdabar"], "udd", xi), zero3)
    zero4 = Field.constant(g.space, np.zeros((n,) * 4))
    if bc.get("Cpar") is not None:
        check("lie_Cpar", lie_derivative(bc["Cpar"], "uddd", xi), zero4)
    if bc.get("Cperp") is not None:
        check("lie_Cperp", lie_derivative(bc["Cperp"], "uddd", xi), zero4)
    check("gauge_split", wf["phi_bar"] + wf["phi_star"], wf["dphi"])
    return out


# ---------------------------------------------------------------------------
# structural identities (hold for every metric / projector pair)
# ---------------------------------------------------------------------------

def _antisym_cd(t: Field) -> Field:
    return t - t.transpose("abdc->abcd")


def structure_identities(geo: PointGeometry, t_vanishes: bool | None = None) -> list[tuple[str, float]]:
    """Scaled residuals of pointwise identities of the bar calculus.

    Identities that only hold when ``T_abc = 0`` are included when
    ``t_vanishes`` is true (by default decided from ``T`` at this point).
    """
    n, p = geo.n, geo.p
    q = n - p
    f = geo.proj.fields
    b = geo.basis.fields
    bar = geo.bar.fields
    bc = geo.bar_curv.fields
    g, ginv = geo.metric.field, geo.metric.inverse_field
    gam, gb, L = bar["gamma"], bar["gamma_bar"], bar["L"]
    out = []

    def check(name, lhs: Field, rhs: Field):
        out.append((name, scaled_residual(lhs.value, rhs.value)))

    rb = bc["Rbar"]
    R = geo.curv.field
    # curvature of gamma + L assembled from R, nabla L and L L
    nl = covariant_derivative(L, "udd", gam)                 # [c, a, d, b]
    ll = fmul("arc,rdb->abcd", L, L)
    check("rbar_from_metric_connection", rb,
          R + _antisym_cd(nl.transpose("cadb->abcd")) + _antisym_cd(ll))
    nbl = covariant_derivative(L, "udd", gb)
    check("rbar_from_bar_connection", rb,
          R + _antisym_cd(nbl.transpose("cadb->abcd")) - _antisym_cd(ll))
    check("rbar_first_bianchi", rb + rb.transpose("acdb->abcd") + rb.transpose("adbc->abcd"),
          Field.constant(g.space, np.zeros((n,) * 4)))

    M, E, W = b["M"], b["E"], b["W"]
    for tag, Pdd, Pud, Puu, rank, e_, w_, m_ in (
            ("P", f["P_dd"], f["P_ud"], f["P_uu"], p, E, W, M),
            ("Pi", f["Pi_dd"], f["Pi_ud"], f["Pi_uu"], q, W, E, -M)):
        m_up = fmul("pq,qbc->pbc", ginv, m_)
        nabla_dd = covariant_derivative(Pdd, "dd", gam)
        rhs = (nabla_dd - fmul("a,bc->abc", e_, Pdd) / rank
               - (fmul("b,ac->abc", e_, Pdd) + fmul("c,ab->abc", e_, Pdd)) / (2 * rank)
               - (fmul("cp,pab->abc", Pdd, m_up) + fmul("bp,pac->abc", Pdd, m_up)) * 0.5)
        check(f"nablabar_{tag}_dd_expansion", bc[f"nablabar_{tag}_dd"], rhs)

        oPud = f["Pi_ud"] if tag == "P" else f["P_ud"]
        oPuu = f["Pi_uu"] if tag == "P" else f["P_uu"]
        mq = m_                                               # M_qra
        nabla_ud = covariant_derivative(Pud, "ud", gam)       # [a, b, c]
        rhs = (nabla_ud * 2.0 + fmul("bq,rc,qra->abc", Puu, Pud, mq)
               - fmul("bq,rc,qra->abc", oPuu, Pud, mq)
               - fmul("bq,qac->abc", Pud, m_up)
               + fmul("c,ba->abc", w_, oPud) / (n - rank) - fmul("c,ba->abc", e_, Pud) / rank)
        check(f"nablabar_{tag}_ud_expansion", bc[f"nablabar_{tag}_ud"] * 2.0, rhs)

        w_up = fmul("bq,q->b", ginv, w_)
        nabla_uu = covariant_derivative(Puu, "uu", gam)
        m_mid = fmul("bq,qar->bar", ginv, m_)                 # M^b_ar
        rhs = (nabla_uu + fmul("a,bc->abc", e_, Puu) / rank
               + (fmul("c,ba->abc", w_up, oPud) + fmul("b,ca->abc", w_up, oPud)) / (2 * (n - rank))
               - (fmul("bar,rc->abc", m_mid, Puu) + fmul("car,rb->abc", m_mid, Puu)) * 0.5)
        check(f"nablabar_{tag}_uu_expansion", bc[f"nablabar_{tag}_uu"], rhs)

        z1 = Field.constant(g.space, np.zeros(n))
        check(f"divergence_{tag}_uu", bc[f"nablabar_{tag}_uu"].transpose("aab->b"), z1)
        check(f"divergence_{tag}_ud", bc[f"nablabar_{tag}_ud"].transpose("aab->b"), z1)
        check(f"trace_{tag}_dd", fmul("bc,abc->a", Puu, bc[f"nablabar_{tag}_dd"]), -e_)
        check(f"trace_{tag}_uu", fmul("bc,abc->a", Pdd, bc[f"nablabar_{tag}_uu"]), e_)
        check(f"cross_trace_{tag}", fmul("dr,brd->b", Pud, bc[f"nablabar_{'Pi' if tag == 'P' else 'P'}_ud"]), z1)
        check(f"contracted_{tag}_dd", fmul("dr,drb->b", Puu, bc[f"nablabar_{tag}_dd"]), z1)

    for tag, Lx, Pud, rank in (("0", bc.get("L0"), f["P_ud"], p), ("1", bc.get("L1"), f["Pi_ud"], q)):
        if Lx is None:
            continue
        x = fmul("rq,qrab->ab", Pud, rb)
        check(f"L{tag}_antisymmetric_part", Lx - Lx.transpose("ab->ba"), x * (2.0 * (2 - rank) / rank))

    if t_vanishes is None:
        t_vanishes = bool(np.abs(geo.basis.T).max() < 1e-9 * (1.0 + np.abs(geo.basis.M).max()))
    if t_vanishes:
        check("separable_nablabar_P_dd", bc["nablabar_P_dd"], fmul("a,bc->abc", E, f["P_dd"]) / -p)
        check("separable_nablabar_Pi_dd", bc["nablabar_Pi_dd"], fmul("a,bc->abc", W, f["Pi_dd"]) / -q)
        z3 = Field.constant(g.space, np.zeros((n, n, n)))
        check("separable_nablabar_P_ud", bc["nablabar_P_ud"], z3)
        check("separable_nablabar_Pi_ud", bc["nablabar_Pi_ud"], z3)
        check("separable_nablabar_P_uu", bc["nablabar_P_uu"], fmul("c,ab->cab", E, f["P_uu"]) / p)
        check("separable_nablabar_Pi_uu", bc["nablabar_Pi_uu"], fmul("c,ab->cab", W, f["Pi_uu"]) / q)
    return out


def conjecture_residual(geo: PointGeometry) -> float | None:
    """Size of ``L0_[ab]/(2-p) - nablabar_[a E_b]/p`` (reported, never asserted)."""
    p = geo.p
    L0 = geo.bar_curv.fields.get("L0")
    if L0 is None or p == 2:
        return None
    ne = covariant_derivative(geo.basis.fields["E"], "d", geo.bar.fields["gamma_bar"])
    lhs = (L0 - L0.transpose("ab->ba")) * (0.5 / (2 - p)) - (ne - ne.transpose("ab->ba")) * (0.5 / p)
    return float(np.abs(lhs.value).max())
