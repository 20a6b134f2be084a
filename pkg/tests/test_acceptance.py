"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (the lines are printed even when
output is captured) or ``python3 tests/test_acceptance.py``.
"""
import math
import sys
import time
from pathlib import Path

import numpy as np
import sympy

sys.path.insert(0, str(Path(__file__).parent))

from biconf import corpus  # noqa: E402
from biconf.analysis import (classify, dimension_bound, evaluate_tensors,  # noqa: E402
                             independence_rank, obstruction_report, rescale_invariance_check,
                             sample_points)
from biconf.biconformal import (PointGeometry, bcvf_check, bcvf_identity_suite,  # noqa: E402
                                leaf_cotton_oracle, leaf_weyl, scaled_residual,
                                structure_identities)
from biconf.dsl import PointEvaluator, evaluate_value, parse_expression  # noqa: E402

from helpers import (THREE_D, manifold, random_expression, random_polynomial,  # noqa: E402
                     richardson_partial)

POINTS = 16
SEED = 0xB1C0

_LINES = []


def report(number, ok, detail, capsys=None):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
    _LINES.append(line)
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    assert ok, line


def samples(entry, count=POINTS):
    return sample_points(manifold(entry).spec.domain, count, SEED)


def obstruction_scale(geo):
    return 1.0 + max(np.abs(geo.bar_curv.Rbar).max(), np.abs(geo.metric.g).max())


# 1 ---------------------------------------------------------------------------------

def test_criterion_01_separability_obstruction(capsys):
    t0 = time.perf_counter()
    sep = {e: obstruction_report(manifold(e), "T_abc", samples(e)).max_scaled_residual
           for e in ("conf_separable_3x2", "biconf_flat_3x3", "conf_separable_4x3")}
    generic = obstruction_report(manifold("nonseparable_3x3"), "T_abc",
                                 samples("nonseparable_3x3")).max_scaled_residual
    elapsed = time.perf_counter() - t0
    dims = sorted(manifold(e).n for e in sep)
    ok = (dims == [5, 6, 7] and max(sep.values()) < 1e-7 and generic > 1e-3 and elapsed < 5.0)
    report(1, ok, f"separable |T_abc| max {max(sep.values()):.2e} (n={dims}), generic "
                  f"{generic:.2e}, {elapsed:.2f} s", capsys)


# 2 ---------------------------------------------------------------------------------

def test_criterion_02_biconformal_flatness(capsys):
    flat = obstruction_report(manifold("biconf_flat_3x3"), "T4", samples("biconf_flat_3x3"))
    curved = evaluate_tensors(manifold("conf_separable_4x3"), ["T4", "T_abc"],
                              samples("conf_separable_4x3"))
    ok = (flat.max_scaled_residual < 1e-7 and curved["T4"].max_scaled_residual > 1e-3
          and curved["T_abc"].max_scaled_residual < 1e-7)
    report(2, ok, f"flat |T4| {flat.max_scaled_residual:.2e}; curved 4-leaf |T4| "
                  f"{curved['T4'].max_scaled_residual:.2e}, |T_abc| "
                  f"{curved['T_abc'].max_scaled_residual:.2e}", capsys)


# 3 ---------------------------------------------------------------------------------

def test_criterion_03_leaf_weyl_identity(capsys):
    vm = manifold("conf_separable_4x3")
    dev = mixed = 0.0
    weyl = 0.0
    for x in samples("conf_separable_4x3"):
        geo = PointGeometry.from_spec(vm, x)
        t4 = geo.bar_curv.T4
        s = obstruction_scale(geo)
        cw = leaf_weyl(vm, x, "P")
        weyl = max(weyl, np.abs(cw).max())
        dev = max(dev, np.abs(t4[:4, :4, :4, :4] - 2 * cw).max() / s)
        idx = np.indices(t4.shape).reshape(4, -1)
        in_leaf = idx < 4
        is_mixed = in_leaf.any(axis=0) & ~in_leaf.all(axis=0)
        mixed = max(mixed, np.abs(t4.reshape(-1)[is_mixed]).max() / s)
    ok = dev < 1e-8 and mixed < 1e-8 and weyl > 1e-3
    report(3, ok, f"|T4 - 2 C_leaf| {dev:.2e}, mixed |T4| {mixed:.2e} (leaf Weyl {weyl:.2e})",
           capsys)


# 4 ---------------------------------------------------------------------------------

def test_criterion_04_rank_three_cotton(capsys):
    shift_free = obstruction_report(manifold("example82_flat_leaf"), "cotton0",
                                    samples("example82_flat_leaf")).max_scaled_residual
    vm = manifold("conf_separable_3x2")
    dev = oracle_size = 0.0
    for x in samples("conf_separable_3x2"):
        geo = PointGeometry.from_spec(vm, x)
        oracle = leaf_cotton_oracle(vm, x)
        oracle_size = max(oracle_size, np.abs(oracle).max())
        dev = max(dev, scaled_residual(geo.foliation.cotton0[:3, :3, :3], oracle))
    ok = shift_free < 1e-7 and dev < 1e-8 and oracle_size > 1e-3
    report(4, ok, f"flat 3-leaf |cotton0| {shift_free:.2e}; curved 3-leaf vs oracle {dev:.2e} "
                  f"(oracle {oracle_size:.2e})", capsys)


# 5 ---------------------------------------------------------------------------------

def test_criterion_05_nonseparable_necessary_condition(capsys):
    reps = evaluate_tensors(manifold("example82"), ["cotton0", "cotton0_projected"],
                            samples("example82"))
    lo = min(reps["cotton0"].per_point)
    hi = max(reps["cotton0_projected"].per_point)
    ok = lo > 1e-4 and hi < 1e-7
    report(5, ok, f"min |cotton0| {lo:.2e}, max |cotton0_projected| {hi:.2e}", capsys)


# 6 ---------------------------------------------------------------------------------

def test_criterion_06_axisymmetric_endpoint(capsys):
    generic = obstruction_report(manifold("example81_generic"), "T_abc",
                                 samples("example81_generic"))
    special = classify(manifold("example81_special"), samples("example81_special"))
    t = special.reports["T_abc"].max_scaled_residual
    ok = (not generic.vanishes and t < 1e-7
          and special.tiers["conformally_separable"] is True)
    report(6, ok, f"generic |T_abc| {generic.max_scaled_residual:.2e}; special |T_abc| {t:.2e}, "
                  f"conformally separable = {special.tiers['conformally_separable']}", capsys)


# 7 ---------------------------------------------------------------------------------

REQUIRED_IDENTITIES = {"rbar_from_metric_connection", "rbar_from_bar_connection",
                       "rbar_first_bianchi", "nablabar_P_dd_expansion", "nablabar_P_ud_expansion",
                       "nablabar_P_uu_expansion", "divergence_P_uu", "trace_P_dd"}


def test_criterion_07_identity_suite(capsys):
    worst, where = 0.0, ""
    seen, separable_checked = set(), 0
    for e in corpus.entries():
        vm = manifold(e.id)
        t_zero = e.tiers["conformally_separable"] is True
        for x in samples(e.id, 4):
            res = structure_identities(PointGeometry.from_spec(vm, x), t_zero)
            for name, r in res:
                seen.add(name)
                if r > worst:
                    worst, where = r, f"{e.id}/{name}"
            separable_checked += t_zero
    ok = (worst < 1e-9 and REQUIRED_IDENTITIES <= seen and "L0_antisymmetric_part" in seen
          and "separable_nablabar_P_ud" in seen and separable_checked > 0)
    report(7, ok, f"{len(seen)} identities on {len(corpus.entries())} metrics, worst {worst:.2e} "
                  f"({where})", capsys)


# 8 ---------------------------------------------------------------------------------

def test_criterion_08_invariance_suite(capsys):
    e = corpus.get("flat_3x3")
    pairs = list(e.rescale)
    rescale = max(rescale_invariance_check(manifold("flat_3x3"), Z, X, samples("flat_3x3", 4))
                  .scaled_deviation for Z, X in pairs)
    lie, count = 0.0, 0
    for entry in corpus.entries():
        vm = manifold(entry.id)
        for x in samples(entry.id, 2):
            geo = PointGeometry.from_spec(vm, x)
            for name in entry.bcvfs:
                res = dict(bcvf_identity_suite(vm, name, x, geometry=geo))
                lie = max(lie, res["lie_nablabar_P_mixed"], res["lie_nablabar_Pi_mixed"])
                count += 1
    ok = len(set(pairs)) >= 2 and rescale < 1e-8 and lie < 1e-8 and count > 0
    report(8, ok, f"rescale ({len(pairs)} pairs) {rescale:.2e}; Lie derivative of nablabar P "
                  f"along {count} BCVF samples {lie:.2e}", capsys)


# 9 ---------------------------------------------------------------------------------

def test_criterion_09_bcvf_suite(capsys):
    vm = manifold("flat_3x3")
    names = corpus.get("flat_3x3").bcvfs
    check = ident = 0.0
    for x in samples("flat_3x3", 2):
        for name in names:
            check = max(check, bcvf_check(vm, name, x).residual)
            ident = max(ident, max(r for _, r in bcvf_identity_suite(vm, name, x)))
    rank = independence_rank(vm, names, samples("flat_3x3", 4))
    bound = dimension_bound(6, 3).N_proof
    finite_4_2 = dimension_bound(4, 2).finite
    ok = (len(names) == 20 and check < 1e-9 and ident < 1e-8 and rank == 20 == bound
          and finite_4_2 is False)
    report(9, ok, f"{len(names)} generators: check {check:.2e}, identities {ident:.2e}, "
                  f"rank {rank} (N_proof {bound}), finite(4,2) = {finite_4_2}", capsys)


# 10 --------------------------------------------------------------------------------

def test_criterion_10_jet_engine(capsys):
    rng = np.random.default_rng(2024)
    err = {1: 0.0, 2: 0.0, 3: 0.0}
    for _ in range(50):
        e = parse_expression(random_expression(rng), THREE_D)
        x0 = rng.uniform(-0.8, 0.8, 3)
        jet = PointEvaluator(THREE_D, x0).jet(e)
        f = lambda y: evaluate_value(e, THREE_D, y)
        for a, c in zip(jet.space.alphas, jet.coeffs):
            k = sum(a)
            if k == 0:
                continue
            fd = richardson_partial(f, x0, a) / math.prod(math.factorial(i) for i in a)
            err[k] = max(err[k], abs(c - fd))
    xs = sympy.symbols("x y z")
    poly_err = 0.0
    for _ in range(20):
        text = random_polynomial(rng)
        poly = sympy.sympify(text.replace("^", "**"), locals=dict(zip("xyz", xs)))
        pt = [sympy.Rational(int(v), 8) for v in rng.integers(-8, 9, 3)]
        jet = PointEvaluator(THREE_D, [float(v) for v in pt]).jet(parse_expression(text, THREE_D))
        for a in jet.space.alphas:
            d = poly
            for s, k in zip(xs, a):
                d = sympy.diff(d, s, k)
            want = float(d.subs(dict(zip(xs, pt))))
            poly_err = max(poly_err, abs(jet.partial(a) - want) / max(1.0, abs(want)))
    ok = err[1] < 1e-5 and err[2] < 1e-5 and err[3] < 1e-3 and poly_err < 1e-13
    report(10, ok, f"FD deviation order1 {err[1]:.1e}, order2 {err[2]:.1e}, order3 {err[3]:.1e}; "
                   f"polynomial {poly_err:.1e}", capsys)


if __name__ == "__main__":
    failed = 0
    for _name, _fn in sorted(globals().items()):
        if _name.startswith("test_criterion_"):
            try:
                _fn(None)
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
