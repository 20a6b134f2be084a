"""Numerical bi-conformal geometry: jets, curvature, obstruction tensors and classification."""

from .analysis import (ClassificationReport, DimensionBound, ObstructionReport, SampleSet,
                       classify, dimension_bound, independence_rank, obstruction_report,
                       rescale_invariance_check, sample_points)
from .biconformal import (PointGeometry, bcvf_check, bcvf_identity_suite, leaf_cotton_oracle,
                          leaf_spec, scaled_residual, structure_identities)
from .dsl import (ManifoldSpec, ValidatedManifold, load_manifold, parse_expression,
                  parse_manifold, validate_spec)
from .errors import *  # noqa: F401,F403
from .geometry import christoffel, curvature, eval_metric
from .jets import Field, Jet, fmul, jet_space

__version__ = "0.1.0"
