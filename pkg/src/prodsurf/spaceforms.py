"""Flat models of the product of a constant-curvature space with a line.

The curved factor is realized as a level set inside a flat (possibly
Minkowski) space: a sphere of radius 1/sqrt(kappa) for kappa > 0, the upper
sheet of the hyperboloid <x,x> = 1/kappa for kappa < 0, and plain Euclidean
space for kappa = 0.  The line factor is always the last flat coordinate and
never participates in the level-set constraint.

The product's Levi-Civita connection is realized as componentwise flat
differentiation followed by :func:`project_to_product_tangent`; no ambient
Christoffel symbols are ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jets import Jet2

CONSTRAINT_TOL = 1e-10


class ConstraintError(ValueError):
    """A point violates the space-form membership constraint."""


@dataclass(frozen=True)
class AmbientModel:
    """Flat-space model of an n-dimensional space form crossed with a line."""

    kappa: float
    n: int
    flat_dim: int
    signature: tuple[float, ...]
    t_index: int


def make_ambient(kappa: float, n: int) -> AmbientModel:
    """Model for curvature ``kappa`` and space-form dimension ``n`` >= 2."""
    if n < 2:
        raise ValueError(f"space-form dimension must be >= 2, got {n}")
    if kappa == 0:
        flat_dim = n + 1
        signature = (1.0,) * flat_dim
    else:
        flat_dim = n + 2
        if kappa < 0:
            signature = (-1.0,) + (1.0,) * (flat_dim - 1)
        else:
            signature = (1.0,) * flat_dim
    return AmbientModel(kappa, n, flat_dim, signature, flat_dim - 1)


def flat_inner(model: AmbientModel, x, y):
    """Signed inner product sum_i sig_i x_i y_i; works on floats or jets."""
    if len(x) != model.flat_dim or len(y) != model.flat_dim:
        raise ValueError("vector length does not match flat dimension")
    acc = None
    for s, xi, yi in zip(model.signature, x, y):
        term = xi * yi if s > 0 else -(xi * yi)
        acc = term if acc is None else acc + term
    return acc


def space_inner(model: AmbientModel, x, y):
    """Inner product of the space-form block only (line coordinate dropped)."""
    acc = None
    for k in range(model.flat_dim - 1):
        term = x[k] * y[k] if model.signature[k] > 0 else -(x[k] * y[k])
        acc = term if acc is None else acc + term
    return acc


def constraint_residual(model: AmbientModel, p) -> float:
    """<p_M, p_M> - 1/kappa, zero exactly on the model; kappa must be nonzero."""
    if model.kappa == 0:
        raise ValueError("flat model has no membership constraint")
    if len(p) != model.flat_dim:
        raise ValueError("vector length does not match flat dimension")
    return space_inner(model, p, p) - 1.0 / model.kappa


def project_to_product_tangent(model: AmbientModel, p, w):
    """Project w onto the tangent space of the product at p.

    Strips the component along the space-form position normal: on the block,
    w - kappa <w, p_M> p_M; the line component passes through.  Accepts float
    vectors (validated against the constraint) or jet vectors (validated at
    the constant term).
    """
    if model.kappa == 0:
        return list(w)
    inner = space_inner(model, w, p)
    pos_val = [c.value if isinstance(c, Jet2) else c for c in p]
    res = constraint_residual(model, pos_val)
    if abs(res) > CONSTRAINT_TOL:
        raise ConstraintError(f"point off the model by {res!r}")
    k = model.kappa
    out = [w[i] - (k * inner) * p[i] for i in range(model.flat_dim - 1)]
    out.append(w[model.t_index])
    return out


def vertical_axis(model: AmbientModel) -> np.ndarray:
    """Unit flat vector generating the line factor."""
    e = np.zeros(model.flat_dim)
    e[model.t_index] = 1.0
    return e
