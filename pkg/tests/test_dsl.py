import math

import numpy as np
import pytest
import sympy

from biconf import corpus
from biconf.dsl import (Explicit, Normals, PointEvaluator, compile_expr, evaluate_value,
                        format_expr, format_manifold, parse_expression, parse_manifold,
                        validate_spec)
from biconf.errors import (DimensionMismatch, DomainError, DslSyntaxError, DuplicateDefinition,
                           EmptyDomain, MissingDiagonal, NonIntegerRank, NotAProjector,
                           UnknownIdentifier)

from helpers import THREE_D, random_expression, random_polynomial, richardson_partial

PLANE = ("manifold m {{ dim 2; coords x,y; {extra} metric {{ {metric} }} "
         "projector {proj} domain {{ x in [0,1]; y in [0,1]; }} }}")


def plane(metric="g[x,x]=1; g[y,y]=1;", proj="block { leaf = x; }", extra=""):
    return PLANE.format(metric=metric, proj=proj, extra=extra)


# --- parsing ------------------------------------------------------------------

def test_minimal_flat_plane():
    spec = parse_manifold(plane())
    assert spec.dim == 2 and spec.coords == ("x", "y")
    vm = validate_spec(spec)
    assert vm.p == 1
    assert evaluate_value(spec.metric[0][0], spec, [0.5, 0.5]) == 1.0
    assert spec.metric[0][1] is None


def test_axisymmetric_metric_entries():
    spec = corpus.get("example81_generic").manifold().spec
    i = {c: k for k, c in enumerate(spec.coords)}
    x = np.array([0.2, 1.3, 0.9, 2.0])
    r, th = x[i["r"]], x[i["theta"]]
    psi, alpha = r ** 2, 1.0
    gtt = evaluate_value(spec.metric[i["t"]][i["t"]], spec, x)
    gtp = evaluate_value(spec.metric[i["t"]][i["phi"]], spec, x)
    assert gtt == pytest.approx(psi ** 2 * math.sin(th) ** 2 - alpha ** 2, rel=1e-14)
    assert gtp == pytest.approx(psi ** 2 * math.sin(th) ** 2, rel=1e-14)
    assert spec.metric[i["phi"]][i["t"]] is spec.metric[i["t"]][i["phi"]]


def test_component_index_out_of_range():
    with pytest.raises(DimensionMismatch):
        parse_manifold(plane("g[x,z]=1; g[x,x]=1; g[y,y]=1;"))


def test_syntax_error_reports_position_and_expected():
    with pytest.raises(DslSyntaxError) as exc:
        parse_manifold(plane("g[x,x]=1 g[y,y]=1;"))
    assert exc.value.line == 1 and exc.value.col > 0
    assert "';'" in exc.value.expected


@pytest.mark.parametrize("text,err", [
    (plane(extra="const a = 1; const a = 2;"), DuplicateDefinition),
    (plane(extra="func x = 1;"), DuplicateDefinition),
    (plane("g[x,x]=w; g[y,y]=1;"), UnknownIdentifier),
    (plane("g[x,x]=1;"), MissingDiagonal),
    (plane().replace("x in [0,1]", "x in [1,1]"), EmptyDomain),
])
def test_definition_errors(text, err):
    with pytest.raises(err):
        parse_manifold(text)


def test_functions_must_precede_use():
    with pytest.raises(UnknownIdentifier):
        parse_manifold(plane(extra="func a = b; func b = 1;"))


def test_precedence_and_associativity():
    ev = lambda t: evaluate_value(parse_expression(t, THREE_D), THREE_D, [2.0, 3.0, 0.5])
    assert ev("-x^2") == 4.0                 # unary minus binds tighter than pow
    assert ev("1 + 2*3") == 7.0
    assert ev("8 / 2 / 2") == 2.0            # left-associative
    assert ev("7 - 2 - 1") == 4.0
    assert ev("x^(1/2)") == pytest.approx(math.sqrt(2.0))
    assert ev("y ** 2") == 9.0
    with pytest.raises(DslSyntaxError):     # right-assoc: x^(2^2) has a non-literal exponent
        parse_expression("x^2^2", THREE_D)
    with pytest.raises(DslSyntaxError):
        parse_expression("x^(1/5)", THREE_D)


def test_comments_and_normals_forms():
    text = plane(proj="normals { n1[y] = 1; }").replace("metric", "# comment\n metric")
    spec = parse_manifold(text)
    assert isinstance(spec.projector, Normals)
    assert validate_spec(spec).p == 1


@pytest.mark.parametrize("entry", [e.id for e in corpus.entries()])
def test_round_trip(entry):
    spec = parse_manifold(corpus.get(entry).source)
    again = parse_manifold(format_manifold(spec))
    assert again == spec


def test_round_trip_expression():
    rng = np.random.default_rng(11)
    for _ in range(30):
        e = parse_expression(random_expression(rng), THREE_D)
        assert parse_expression(format_expr(e), THREE_D) == e


# --- validation ---------------------------------------------------------------

def test_rank_two_warning():
    text = ("manifold f { dim 4; coords x1,x2,x3,x4; metric { g[x1,x1]=1; g[x2,x2]=1; "
            "g[x3,x3]=1; g[x4,x4]=1; } projector block { leaf = x1, x2; } domain { x1 in [0,1]; "
            "x2 in [0,1]; x3 in [0,1]; x4 in [0,1]; } }")
    vm = validate_spec(parse_manifold(text))
    assert vm.p == 2
    assert "rank-2 projector: Lie algebra may be infinite dimensional" in vm.warnings


def test_explicit_projector_equal_to_metric_is_rejected():
    spec = parse_manifold(plane(proj="explicit { P[x,x] = 1; P[y,y] = 1; }"))
    assert isinstance(spec.projector, Explicit)
    with pytest.raises(NotAProjector):
        validate_spec(spec)


def test_explicit_projector_axioms():
    ok = parse_manifold(plane(proj="explicit { P[x,x] = 1; }"))
    assert validate_spec(ok).p == 1
    with pytest.raises(NotAProjector):
        validate_spec(parse_manifold(plane(proj="explicit { P[x,x] = 0.5; }")))


def test_non_integer_rank():
    # idempotency residual stays inside the validation tolerance, the trace does not
    spec = parse_manifold(plane(proj="explicit { P[x,x] = 1.0000000015; }"))
    with pytest.raises(NonIntegerRank):
        validate_spec(spec)


def test_rank_three_note():
    vm = corpus.get("example82_flat_leaf").manifold()
    assert vm.p == 3
    assert any("rank-3 leaf" in n and "Cotton" in n for n in vm.notes)
    assert any("rank-1 complementary" in w for w in vm.warnings)


# --- compilation ----------------------------------------------------------------

def test_polynomial_jet():
    spec = parse_manifold(plane())
    j = compile_expr(parse_expression("x*y + x", spec), spec)(np.array([2.0, 3.0]))
    assert j.value == 8.0
    assert j.partial((1, 0)) == 4.0 and j.partial((0, 1)) == 2.0
    assert j.partial((1, 1)) == 1.0
    for a in j.space.alphas:
        if sum(a) == 3 or a in ((2, 0), (0, 2)):
            assert j.partial(a) == 0.0


def test_sine_jet_against_fd():
    spec = parse_manifold(plane().replace("x,y", "theta,y").replace("x", "theta"))
    e = parse_expression("sin(theta)", spec)
    x0 = np.array([math.pi / 6, 0.5])
    j = compile_expr(e, spec)(x0)
    assert j.value == pytest.approx(0.5, abs=1e-15)
    f = lambda x: evaluate_value(e, spec, x)
    for k in (1, 2, 3):
        assert abs(j.partial((k, 0)) - richardson_partial(f, x0, (k, 0))) < 1e-6


def test_log_at_zero_is_domain_error():
    e = parse_expression("log(x)", THREE_D)
    with pytest.raises(DomainError):
        compile_expr(e, THREE_D)(np.array([0.0, 0.1, 0.1]))


def test_division_by_vanishing_expression():
    e = parse_expression("1 / (x - y)", THREE_D)
    with pytest.raises(DomainError):
        PointEvaluator(THREE_D, [0.3, 0.3, 0.0]).jet(e)


def test_repeated_evaluation_is_bit_identical():
    e = parse_expression("exp(x*y) / (2 + sin(z))", THREE_D)
    f = compile_expr(e, THREE_D)
    x0 = np.array([0.1, -0.4, 0.8])
    assert np.array_equal(f(x0).coeffs, f(x0).coeffs)


def test_linearity():
    rng = np.random.default_rng(5)
    for _ in range(20):
        a, b = random_expression(rng), random_expression(rng)
        x0 = rng.uniform(-0.8, 0.8, 3)
        ev = PointEvaluator(THREE_D, x0)
        ja, jb = ev.jet(parse_expression(a, THREE_D)), ev.jet(parse_expression(b, THREE_D))
        js = PointEvaluator(THREE_D, x0).jet(parse_expression(f"({a}) + ({b})", THREE_D))
        scale = 1 + np.abs(ja.coeffs).max() + np.abs(jb.coeffs).max()
        assert np.abs(js.coeffs - (ja + jb).coeffs).max() < 1e-14 * scale


def test_polynomials_exact_against_sympy():
    rng = np.random.default_rng(9)
    xs = sympy.symbols("x y z")
    for _ in range(10):
        text = random_polynomial(rng)
        poly = sympy.sympify(text.replace("^", "**"), locals=dict(zip("xyz", xs)))
        pt = [sympy.Rational(int(v), 8) for v in rng.integers(-8, 9, 3)]
        j = PointEvaluator(THREE_D, [float(v) for v in pt]).jet(parse_expression(text, THREE_D))
        for a in j.space.alphas:
            d = poly
            for s, k in zip(xs, a):
                d = sympy.diff(d, s, k)
            want = float(d.subs(dict(zip(xs, pt))))
            assert abs(j.partial(a) - want) <= 1e-13 * max(1.0, abs(want))
