"""Shared oracles for the test-suite: finite differences, random expressions, corpus cache."""
from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from biconf import corpus
from biconf.dsl import parse_manifold

# central stencils (offset multiples of h, weight) for derivative orders 0..3
_STENCILS = {
    0: ((0, 1.0),),
    1: ((1, 0.5), (-1, -0.5)),
    2: ((1, 1.0), (0, -2.0), (-1, 1.0)),
    3: ((2, 0.5), (1, -1.0), (-1, 1.0), (-2, -0.5)),
}


def central_partial(f, x, alpha, h):
    """Tensor-product central difference for the raw partial d^alpha f at x."""
    x = np.asarray(x, dtype=float)
    total = 0.0
    for combo in itertools.product(*[_STENCILS[a] for a in alpha]):
        shift = np.array([o for o, _ in combo], dtype=float) * h
        w = math.prod(wt for _, wt in combo)
        total += w * f(x + shift)
    return total / h ** sum(alpha)


def richardson_partial(f, x, alpha, h=None):
    """One Richardson step on top of the O(h^2) central stencil."""
    if h is None:
        h = {0: 1e-3, 1: 1e-3, 2: 1e-3, 3: 2e-2}[sum(alpha)]
    d1 = central_partial(f, x, alpha, h)
    d2 = central_partial(f, x, alpha, h / 2)
    return (4.0 * d2 - d1) / 3.0


def plain_metric_fn(spec, a, b):
    from biconf.dsl import evaluate_value
    e = spec.metric[a][b]
    return lambda x: evaluate_value(e, spec, x)


# ---------------------------------------------------------------------------
# random expressions over x, y, z that stay finite near the unit box
# ---------------------------------------------------------------------------

THREE_D = parse_manifold("""
manifold probe3 {
  dim 3;
  coords x, y, z;
  const c = 0.7;
  metric { g[x,x] = 1; g[y,y] = 1; g[z,z] = 1; }
  projector block { leaf = x; }
  domain { x in [-1, 1]; y in [-1, 1]; z in [-1, 1]; }
}
""")


def random_expression(rng, depth=3) -> str:
    """A random DSL expression whose value and derivatives are tame on [-1, 1]^3."""
    if depth == 0 or rng.random() < 0.2:
        r = rng.random()
        if r < 0.6:
            return str(rng.choice(["x", "y", "z"]))
        if r < 0.8:
            return "c"
        return f"{rng.uniform(-2, 2):.3f}"
    a = random_expression(rng, depth - 1)
    b = random_expression(rng, depth - 1)
    kind = rng.integers(0, 11)
    return [
        f"({a} + {b})",
        f"({a} - {b})",
        f"({a} * {b})",
        f"({a}) / (2 + ({b})^2)",
        f"sin({a})",
        f"cos({a})",
        f"exp(0.5*({a}))",
        f"log(1.5 + ({a})^2)",
        f"sqrt(1 + ({a})^2)",
        f"tan(0.3*({a}) / (1 + ({b})^2))",
        f"(1.2 + ({a})^2)^(3/4)",
    ][kind]


def random_polynomial(rng, n_terms=6):
    """Random polynomial of total degree <= 3 with small integer coefficients (DSL text)."""
    terms = []
    for _ in range(n_terms):
        coef = int(rng.integers(-5, 6)) or 1
        exps = rng.multinomial(int(rng.integers(0, 4)), [1 / 3] * 3)
        mono = "*".join(f"{v}^{e}" for v, e in zip("xyz", exps) if e)
        terms.append(f"{coef}" + (f"*{mono}" if mono else ""))
    return " + ".join(f"({t})" for t in terms)


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def manifold(entry_id):
    return corpus.get(entry_id).manifold()


def interior_points(vm, count, seed=7):
    from biconf.analysis import sample_points
    return sample_points(vm.spec.domain, count, seed).points
