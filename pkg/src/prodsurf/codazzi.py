"""Traceless Codazzi operators and the identities they satisfy.

Two operators are provided as fields of 2x2 chart-basis matrices with
jet-valued entries:

* the PMC operator ``2 A_H - kappa <T,.> T + (kappa |T|^2 / 2) Id - 2|H|^2 Id``
  attached to a non-minimal surface with parallel mean curvature, and
* the angle operator ``-<T,.> T + (|T|^2 / 2) Id`` attached to a minimal
  surface, built purely from the tangential part of the vertical field.

On top of these live the Codazzi residual (vanishing of the antisymmetrized
covariant derivative), the Simons-type identities for the operator norm, the
norm/determinant identity ``|S|^2 = -2 det S`` for traceless operators, and
the metric-change construction (new metric ``<S., S.>`` whose curvature is
``K / det S``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jets
from .geometry import (
    GeomPoint,
    MinimalSurfaceError,
    SurfaceSpec,
    christoffels,
    gauss_curvature_brioschi,
    grad_norm_sq,
    laplace_at,
    MINIMAL_TOL,
)
from .jets import Jet2
from .spaceforms import flat_inner

SINGULAR_TOL = 1e-8
S_NORM_FLOOR = 1e-6


class SingularOperatorError(ArithmeticError):
    """Operator determinant too close to zero for the requested construction."""


class OperatorShapeError(ValueError):
    """Operator fails a structural precondition (tracelessness, self-adjointness)."""


class NormFloorError(ArithmeticError):
    """Operator norm below the floor where a logarithmic identity is defined."""


@dataclass
class CodazziField:
    """A candidate Codazzi operator as a field of chart-basis matrices."""

    kind: str
    spec: SurfaceSpec
    matrix_at: Callable[[float, float], list[list[Jet2]]]


def pmc_operator_jets(gp: GeomPoint, kappa: float | None = None) -> list[list[Jet2]]:
    """Chart-basis matrix (jet entries) of the PMC operator at a point."""
    if gp.normH <= MINIMAL_TOL:
        raise MinimalSurfaceError(
            f"PMC operator undefined at minimal point (|H| = {gp.normH!r})"
        )
    if kappa is None:
        kappa = gp.spec.ambient.kappa
    model = gp.spec.ambient
    m = [[flat_inner(model, gp.alpha_flat[a][b], gp.H) for b in range(2)] for a in range(2)]
    a_h = [[gp.ginv[a][0] * m[0][b] + gp.ginv[a][1] * m[1][b] for b in range(2)]
           for a in range(2)]
    t_low = [gp.g[b][0] * gp.T_up[0] + gp.g[b][1] * gp.T_up[1] for b in range(2)]
    diag = 0.5 * kappa * gp.normT2 - 2.0 * gp.normH2
    out = [[None, None], [None, None]]
    for a in range(2):
        for b in range(2):
            entry = 2.0 * a_h[a][b] - kappa * (gp.T_up[a] * t_low[b])
            if a == b:
                entry = entry + diag
            out[a][b] = entry
    return out


def angle_operator_jets(gp: GeomPoint) -> list[list[Jet2]]:
    """Chart-basis matrix (jet entries) of the angle operator at a point."""
    t_low = [gp.g[b][0] * gp.T_up[0] + gp.g[b][1] * gp.T_up[1] for b in range(2)]
    half = 0.5 * gp.normT2
    out = [[None, None], [None, None]]
    for a in range(2):
        for b in range(2):
            entry = -(gp.T_up[a] * t_low[b])
            if a == b:
                entry = entry + half
            out[a][b] = entry
    return out


def matrix_values(s: list[list[Jet2]]) -> np.ndarray:
    return np.array([[s[0][0].value, s[0][1].value], [s[1][0].value, s[1][1].value]])


def pmc_operator(gp: GeomPoint, kappa: float | None = None) -> np.ndarray:
    return matrix_values(pmc_operator_jets(gp, kappa))


def angle_operator(gp: GeomPoint) -> np.ndarray:
    return matrix_values(angle_operator_jets(gp))


def field_for(spec: SurfaceSpec, kind: str) -> CodazziField:
    """Operator field over a chart; kind 'pmc' or 'angle'.

    Matrices are memoized per point so a sweep of many identities builds each
    operator once.
    """
    if kind == "pmc":
        build = lambda u, v: pmc_operator_jets(spec.geom(u, v))  # noqa: E731
    elif kind == "angle":
        build = lambda u, v: angle_operator_jets(spec.geom(u, v))  # noqa: E731
    else:
        raise ValueError(f"unknown operator kind {kind!r}")
    memo: dict[tuple[float, float], list[list[Jet2]]] = {}

    def matrix_at(u: float, v: float):
        key = (u, v)
        s = memo.get(key)
        if s is None:
            s = build(u, v)
            memo[key] = s
        return s

    return CodazziField(kind, spec, matrix_at)


def norm_sq_jet(s: list[list[Jet2]]) -> Jet2:
    """|S|^2 = trace(S S) for a g-self-adjoint endomorphism (basis-free)."""
    return s[0][0] * s[0][0] + 2.0 * (s[0][1] * s[1][0]) + s[1][1] * s[1][1]


def det_jet(s: list[list[Jet2]]) -> Jet2:
    return s[0][0] * s[1][1] - s[0][1] * s[1][0]


def codazzi_residual(spec: SurfaceSpec, u: float, v: float, field: CodazziField) -> float:
    """g-norm of the antisymmetrized covariant derivative of the operator.

    Coordinate fields commute, so the bracket term is absent:
    residual = | nabla_u (S d_v) - nabla_v (S d_u) |_g.
    """
    gp = spec.geom(u, v)
    s = field.matrix_at(u, v)
    if min(s[a][b].order for a in range(2) for b in range(2)) < 1:
        raise ValueError("operator entries must carry jets of order >= 1")
    gam = gp.gamma_val
    res = np.zeros(2)
    for a in range(2):
        cov_u = s[a][1].du + sum(gam[a][0][c] * s[c][1].value for c in range(2))
        cov_v = s[a][0].dv + sum(gam[a][1][c] * s[c][0].value for c in range(2))
        res[a] = cov_u - cov_v
    return gp.chart_norm(res)


def grad_tensor_norm_sq(spec: SurfaceSpec, u: float, v: float,
                        field: CodazziField) -> float:
    """Full covariant-gradient norm |nabla S|^2 of the operator at a point.

    (nabla_a S)^b_c = d_a S^b_c + Gamma^b_{ae} S^e_c - Gamma^e_{ac} S^b_e,
    contracted with g^{aa'} g_{bb'} g^{cc'}.  For a traceless Codazzi operator
    on a surface this equals 2 |grad |S||^2 away from zeros of |S| (the Kato
    equality), but it is polynomial in the entries and therefore global.
    """
    gp = spec.geom(u, v)
    s = field.matrix_at(u, v)
    s_val = matrix_values(s)
    gam = gp.gamma_val
    nabla = np.zeros((2, 2, 2))
    for a in range(2):
        for b in range(2):
            for c in range(2):
                val = s[b][c].du if a == 0 else s[b][c].dv
                val += sum(gam[b][a][e] * s_val[e, c] for e in range(2))
                val -= sum(gam[e][a][c] * s_val[b, e] for e in range(2))
                nabla[a, b, c] = val
    g, ginv = gp.g_val, gp.ginv_val
    return float(np.einsum("abc,xyz,ax,by,cz->", nabla, nabla, ginv, g, ginv))


def simons_residuals(spec: SurfaceSpec, u: float, v: float, field: CodazziField,
                     floor: float = S_NORM_FLOOR) -> tuple[float, float]:
    """Residuals of the quadratic and logarithmic Simons-type identities.

    r_sq  = | 1/2 Lap|S|^2 - |nabla S|^2 - 2 K |S|^2 |   (global)
    r_log = | Lap ln|S| - 2 K |                           (needs |S| > floor)
    """
    return (simons_quadratic_residual(spec, u, v, field),
            simons_log_residual(spec, u, v, field, floor))


def simons_log_residual(spec, u, v, field, floor=S_NORM_FLOOR) -> float:
    """Residual of Lap ln|S| = 2 K, defined away from zeros of |S|."""
    gp = spec.geom(u, v)
    s2 = norm_sq_jet(field.matrix_at(u, v))
    if s2.value <= floor * floor:
        raise NormFloorError(f"|S| = {math.sqrt(max(s2.value, 0.0))!r} below floor {floor}")
    log_s = 0.5 * jets.log(s2)
    return abs(laplace_at(log_s, gp) - 2.0 * gp.K_val)


def simons_quadratic_residual(spec, u, v, field) -> float:
    """The globally valid Simons residual alone (no floor requirement)."""
    gp = spec.geom(u, v)
    s2 = norm_sq_jet(field.matrix_at(u, v))
    lap = laplace_at(s2, gp)
    grad_full = grad_tensor_norm_sq(spec, u, v, field)
    return abs(0.5 * lap - grad_full - 2.0 * gp.K_val * s2.value)


def simons_reduced_residual(spec, u, v, field, floor=S_NORM_FLOOR) -> float:
    """Residual of |S| Lap|S| - 2 K |S|^2 = |grad |S||^2, away from zeros of |S|."""
    gp = spec.geom(u, v)
    s2 = norm_sq_jet(field.matrix_at(u, v))
    if s2.value <= floor * floor:
        raise NormFloorError(f"|S| = {math.sqrt(max(s2.value, 0.0))!r} below floor {floor}")
    s_norm = jets.sqrt(s2)
    lap = laplace_at(s_norm, gp)
    grad = grad_norm_sq(s_norm, gp.g)
    return abs(s_norm.value * lap - 2.0 * gp.K_val * s2.value - grad)


def s_norm_det_identity(s_val: np.ndarray, g_val: np.ndarray) -> float:
    """| trace(S^2) + 2 det S | for a traceless g-self-adjoint operator."""
    s_val = np.asarray(s_val, dtype=float)
    g_val = np.asarray(g_val, dtype=float)
    scale = max(1.0, float(np.abs(s_val).max()))
    if abs(s_val[0, 0] + s_val[1, 1]) > 1e-8 * scale:
        raise OperatorShapeError(f"operator not traceless: trace {s_val.trace()!r}")
    gs = g_val @ s_val
    if abs(gs[0, 1] - gs[1, 0]) > 1e-8 * scale * max(1.0, float(np.abs(g_val).max())):
        raise OperatorShapeError("operator not self-adjoint for the supplied metric")
    return abs(float(np.trace(s_val @ s_val)) + 2.0 * float(np.linalg.det(s_val)))


def new_metric_jets(spec: SurfaceSpec, u: float, v: float,
                    field: CodazziField) -> list[list[Jet2]]:
    """Entries of the changed metric <S . , S .> as jets."""
    gp = spec.geom(u, v)
    s = field.matrix_at(u, v)
    out = [[None, None], [None, None]]
    for a in range(2):
        for b in range(a, 2):
            acc = None
            for c in range(2):
                for d in range(2):
                    term = s[c][a] * s[d][b] * gp.g[c][d]
                    acc = term if acc is None else acc + term
            out[a][b] = acc
            out[b][a] = acc
    return out


def metric_change(spec: SurfaceSpec, u: float, v: float, field: CodazziField):
    """Changed metric, its intrinsic curvature, and the curvature-law residual.

    The new curvature is computed from the changed metric through the same
    intrinsic (Brioschi) path used for the original metric, so the law
    Ktilde = K / det S is a genuine cross-check.  The residual is stated
    multiplicatively, |Ktilde det S - K|, to stay meaningful for small det S.
    """
    gp = spec.geom(u, v)
    s = field.matrix_at(u, v)
    det_val = det_jet(s).value
    if abs(det_val) <= SINGULAR_TOL:
        raise SingularOperatorError(f"det S = {det_val!r} at ({u}, {v})")
    gs = new_metric_jets(spec, u, v, field)
    ktilde = gauss_curvature_brioschi(gs).value
    residual = abs(ktilde * det_val - gp.K_val)
    return gs, ktilde, residual


def inverse_codazzi_residual(spec: SurfaceSpec, u: float, v: float,
                             field: CodazziField) -> float:
    """Codazzi residual of S^{-1} with respect to the changed metric.

    The connection of the changed metric is recomputed independently from its
    own Christoffel symbols (not through the S-conjugation formula), so this
    checks that S^{-1} really is Codazzi for the new geometry.
    """
    s = field.matrix_at(u, v)
    det = det_jet(s)
    if abs(det.value) <= SINGULAR_TOL:
        raise SingularOperatorError(f"det S = {det.value!r} at ({u}, {v})")
    p = [[s[1][1] / det, -s[0][1] / det], [-s[1][0] / det, s[0][0] / det]]
    gs = new_metric_jets(spec, u, v, field)
    gam = christoffels(gs)
    res = np.zeros(2)
    for a in range(2):
        cov_u = p[a][1].du + sum(gam[a][0][c].value * p[c][1].value for c in range(2))
        cov_v = p[a][0].dv + sum(gam[a][1][c].value * p[c][0].value for c in range(2))
        res[a] = cov_u - cov_v
    gs_val = np.array([[gs[0][0].value, gs[0][1].value],
                       [gs[0][1].value, gs[1][1].value]])
    return math.sqrt(max(float(res @ gs_val @ res), 0.0))


def trace_residual(spec: SurfaceSpec, u: float, v: float, field: CodazziField) -> float:
    s = field.matrix_at(u, v)
    return abs(s[0][0].value + s[1][1].value)
