"""Pointwise extrinsic and intrinsic geometry of an immersed chart.

Everything is derived from order-4 jets of the flat coordinates of the
immersion: first fundamental form, Christoffel symbols, second fundamental
form (as the surface-normal part of projected flat second derivatives),
mean curvature vector, the tangential/normal split of the vertical field,
orthonormal normal frames, shape operators, and intrinsic Gaussian
curvature via the Brioschi formula.

The intrinsic curvature is computed purely from the metric so that the
structure equations checked elsewhere (Gauss equation, curvature formula)
are genuine cross-checks rather than tautologies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets
from .jets import Jet2
from .spaceforms import (
    AmbientModel,
    ConstraintError,
    constraint_residual,
    flat_inner,
    project_to_product_tangent,
)

MINIMAL_TOL = 1e-8
MINIMAL_WARN_BAND = 1e-6
FRAME_DROP_TOL = 1e-10
NORMALITY_TOL = 1e-10


class DegenerateMetricError(ArithmeticError):
    """Chart fails to be an immersion (det g too small or non-positive)."""


class NotNormalError(ValueError):
    """A vector claimed normal to the surface is not."""


class MinimalSurfaceError(ValueError):
    """Operation requires |H| above the minimality threshold."""


class FrameError(ArithmeticError):
    """Gram-Schmidt failed to produce a full normal frame."""


@dataclass
class SurfaceSpec:
    """A chart domain plus an immersion formula into a product model."""

    catalog_id: str
    params: dict[str, float]
    domain: tuple[tuple[float, float], tuple[float, float]]
    ambient: AmbientModel
    chart: Callable[[Jet2, Jet2], list[Jet2]]
    expected: dict[str, float] = field(default_factory=dict)
    minimal: bool = False
    _geom_cache: dict = field(default_factory=dict, repr=False)

    def geom(self, u: float, v: float, order: int = 4) -> "GeomPoint":
        key = (u, v, order)
        gp = self._geom_cache.get(key)
        if gp is None:
            if len(self._geom_cache) > 2500:
                self._geom_cache.clear()
            gp = evaluate_chart(self, u, v, order)
            self._geom_cache[key] = gp
        return gp

    def clear_cache(self) -> None:
        self._geom_cache.clear()


@dataclass
class GeomPoint:
    """All pointwise geometry of a chart at (u, v).

    Jets keep the orders implied by differentiating an order-4 immersion:
    metric entries order 3, Christoffels and second-fundamental-form data
    order 2, intrinsic curvature order 1.
    """

    spec: SurfaceSpec
    u: float
    v: float
    order: int
    f: list[Jet2]
    fu: list[Jet2]
    fv: list[Jet2]
    g: list[list[Jet2]]
    ginv: list[list[Jet2]]
    detg: Jet2
    gamma: list[list[list[Jet2]]]
    alpha_flat: list[list[list[Jet2]]]
    H: list[Jet2]
    normH2: Jet2
    normH: float
    T_up: list[Jet2]
    T_flat: list[Jet2]
    eta: list[Jet2]
    normT2: Jet2
    K: Jet2
    xi: list[np.ndarray]
    h: np.ndarray
    A: list[np.ndarray]
    g_val: np.ndarray
    ginv_val: np.ndarray
    gamma_val: np.ndarray
    K_val: float
    normT: float
    T_val: np.ndarray
    eta_val: np.ndarray
    H_val: np.ndarray
    alpha_val: np.ndarray
    _frame_jets: list[list[Jet2]] | None = None
    _t_field: tuple[float, float] | None = None

    @property
    def tangent_vals(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.array([c.value for c in self.fu]), np.array([c.value for c in self.fv]))

    def chart_norm(self, w) -> float:
        """g-norm of a chart-components vector."""
        w = np.asarray(w, dtype=float)
        return math.sqrt(max(float(w @ self.g_val @ w), 0.0))


def christoffels(g: list[list[Jet2]], ginv: list[list[Jet2]] | None = None):
    """Gamma^k_ij = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij}) as jets."""
    if ginv is None:
        ginv = invert_metric_jets(g)
    dg = [[[g[i][j].d(l) for j in range(2)] for i in range(2)] for l in range(2)]
    gamma = [[[None, None], [None, None]], [[None, None], [None, None]]]
    for k in range(2):
        for i in range(2):
            for j in range(i, 2):
                acc = None
                for l in range(2):
                    term = ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j])
                    acc = term if acc is None else acc + term
                gamma[k][i][j] = 0.5 * acc
                gamma[k][j][i] = gamma[k][i][j]
    return gamma


def invert_metric_jets(g: list[list[Jet2]]):
    det = g[0][0] * g[1][1] - g[0][1] * g[0][1]
    if det.value <= 1e-12:
        raise DegenerateMetricError(f"det g = {det.value!r}")
    return [[g[1][1] / det, -g[0][1] / det], [-g[0][1] / det, g[0][0] / det]]


def _det3(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def gauss_curvature_brioschi(g: list[list[Jet2]]) -> Jet2:
    """Intrinsic Gaussian curvature from the metric alone (Brioschi formula).

    Input metric entries must carry order >= 2; the result loses two orders.
    """
    E, F, G = g[0][0], g[0][1], g[1][1]
    if min(E.order, F.order, G.order) < 2:
        raise ValueError("metric jets must have order >= 2 for curvature")
    det = E * G - F * F
    if det.value <= 0.0:
        raise DegenerateMetricError(f"non-positive det g = {det.value!r}")
    Eu, Ev = E.d_u(), E.d_v()
    Gu, Gv = G.d_u(), G.d_v()
    Fu, Fv = F.d_u(), F.d_v()
    Evv = Ev.d_v()
    Guu = Gu.d_u()
    Fuv = Fu.d_v()
    m1 = [
        [-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev],
        [Fv - 0.5 * Gu, E, F],
        [0.5 * Gv, F, G],
    ]
    m2 = [
        [Jet2.constant(0.0, E.order), 0.5 * Ev, 0.5 * Gu],
        [0.5 * Ev, E, F],
        [0.5 * Gu, F, G],
    ]
    return (_det3(m1) - _det3(m2)) / (det * det)


def laplace_beltrami(phi: Jet2, g: list[list[Jet2]]) -> float:
    """Laplace-Beltrami of a scalar jet: g^{ab} (d_a d_b phi - Gamma^k_ab d_k phi)."""
    ginv = invert_metric_jets(g)
    gamma = christoffels(g, ginv)
    ginv_val = np.array([[ginv[0][0].value, ginv[0][1].value],
                         [ginv[0][1].value, ginv[1][1].value]])
    gamma_val = np.array(
        [[[gamma[k][i][j].value for j in range(2)] for i in range(2)] for k in range(2)]
    )
    return laplace_beltrami_values(phi, ginv_val, gamma_val)


def laplace_beltrami_values(phi: Jet2, ginv_val: np.ndarray,
                            gamma_val: np.ndarray) -> float:
    """Laplacian from precomputed inverse-metric and Christoffel values."""
    if phi.order < 2:
        raise ValueError("laplace_beltrami needs a jet of order >= 2")
    d1 = (phi.du, phi.dv)
    d2 = ((phi.duu, phi.duv), (phi.duv, phi.dvv))
    acc = 0.0
    for a in range(2):
        for b in range(2):
            corr = gamma_val[0][a][b] * d1[0] + gamma_val[1][a][b] * d1[1]
            acc += ginv_val[a][b] * (d2[a][b] - corr)
    return acc


def laplace_at(phi: Jet2, gp: "GeomPoint") -> float:
    """Laplacian of a scalar jet using the chart point's cached metric data."""
    return laplace_beltrami_values(phi, gp.ginv_val, gp.gamma_val)


def grad_norm_sq(phi: Jet2, g: list[list[Jet2]]) -> float:
    """Squared gradient norm g^{ab} d_a phi d_b phi at the chart point."""
    if phi.order < 1:
        raise ValueError("grad_norm_sq needs a jet of order >= 1")
    gv = np.array([[g[0][0].value, g[0][1].value], [g[0][1].value, g[1][1].value]])
    ginv = np.linalg.inv(gv)
    d = np.array([phi.du, phi.dv])
    return float(d @ ginv @ d)


def _fix_sign_floats(w: np.ndarray) -> np.ndarray:
    for c in w:
        if abs(c) > 1e-9:
            return -w if c < 0 else w
    return w


def _fix_sign_jets(w: list[Jet2]) -> list[Jet2]:
    for c in w:
        if abs(c.value) > 1e-9:
            return [-x for x in w] if c.value < 0 else w
    return w


def _normal_frame_values(model: AmbientModel, f_val, fu_val, fv_val, ginv_val,
                         H_val, normH) -> list[np.ndarray]:
    """Orthonormal frame of the normal space inside the product tangent space.

    Seeded with H/|H| when the point is non-minimal, then canonical flat axes
    in fixed order; near-dependent candidates are dropped.  Auxiliary vectors
    get a deterministic sign (first component above threshold made positive).
    """
    dim = model.flat_dim
    sig = np.asarray(model.signature)
    tang = (fu_val, fv_val)
    need = model.n - 1

    def strip(w):
        w = w.astype(float).copy()
        if model.kappa != 0:
            inner = float(np.dot(sig[:-1] * w[:-1], f_val[:-1]))
            w[:-1] -= model.kappa * inner * f_val[:-1]
        coeff = ginv_val @ np.array([np.dot(sig * w, tang[0]), np.dot(sig * w, tang[1])])
        w -= coeff[0] * tang[0] + coeff[1] * tang[1]
        return w

    frame: list[np.ndarray] = []
    if normH > MINIMAL_TOL:
        frame.append(H_val / normH)
    for axis in range(dim):
        if len(frame) == need:
            break
        w = strip(np.eye(dim)[axis])
        for xi in frame:
            w -= float(np.dot(sig * w, xi)) * xi
        nrm = math.sqrt(max(float(np.dot(sig * w, w)), 0.0))
        if nrm < FRAME_DROP_TOL:
            continue
        frame.append(_fix_sign_floats(w / nrm))
    if len(frame) != need:
        raise FrameError(f"normal frame incomplete: {len(frame)} of {need}")
    return frame


def normal_frame_jets(gp: GeomPoint) -> list[list[Jet2]]:
    """Jet-valued normal frame (same construction as the pointwise frame).

    The candidate selection is decided by constant terms, so locally the
    frame is a smooth field and its jets are honest derivatives.  Used only
    where an explicit normal field is needed; covariant normal derivatives
    elsewhere go through projections, never through frame differences.
    """
    if gp._frame_jets is not None:
        return gp._frame_jets
    model = gp.spec.ambient
    dim = model.flat_dim
    need = model.n - 1

    def strip(w):
        w = project_to_product_tangent(model, gp.f, w)
        c0 = flat_inner(model, w, gp.fu)
        c1 = flat_inner(model, w, gp.fv)
        t0 = gp.ginv[0][0] * c0 + gp.ginv[0][1] * c1
        t1 = gp.ginv[1][0] * c0 + gp.ginv[1][1] * c1
        return [w[i] - t0 * gp.fu[i] - t1 * gp.fv[i] for i in range(dim)]

    frame: list[list[Jet2]] = []
    # H seeding needs |H| well clear of zero for the jet square root.
    if gp.normH2.value > 1e-12:
        inv = 1.0 / jets.sqrt(gp.normH2)
        frame.append([c * inv for c in gp.H])
    for axis in range(dim):
        if len(frame) == need:
            break
        w = strip([Jet2.constant(1.0 if i == axis else 0.0, gp.order) for i in range(dim)])
        for xi in frame:
            c = flat_inner(model, w, xi)
            w = [w[i] - c * xi[i] for i in range(dim)]
        nrm2 = flat_inner(model, w, w)
        if nrm2.value < FRAME_DROP_TOL ** 2:
            continue
        inv = 1.0 / jets.sqrt(nrm2)
        frame.append(_fix_sign_jets([c * inv for c in w]))
    if len(frame) != need:
        raise FrameError(f"normal frame incomplete: {len(frame)} of {need}")
    gp._frame_jets = frame
    return frame


def evaluate_chart(spec: SurfaceSpec, u: float, v: float, order: int = 4) -> GeomPoint:
    """Evaluate all pointwise geometry of the chart at (u, v)."""
    if order < 3:
        raise ValueError("chart evaluation needs jet order >= 3 for intrinsic curvature")
    (u0, u1), (v0, v1) = spec.domain
    slack = 1e-9 * (1 + abs(u1 - u0) + abs(v1 - v0))
    if not (u0 - slack <= u <= u1 + slack and v0 - slack <= v <= v1 + slack):
        raise ValueError(f"({u}, {v}) outside chart domain {spec.domain}")
    model = spec.ambient
    dim = model.flat_dim

    uj = Jet2.variable("u", u, order)
    vj = Jet2.variable("v", v, order)
    f = spec.chart(uj, vj)
    f_val = np.array([c.value for c in f])
    if model.kappa != 0:
        res = constraint_residual(model, f_val)
        if abs(res) > 1e-10:
            raise ConstraintError(f"chart point off the model by {res!r}")

    fu = [c.d_u() for c in f]
    fv = [c.d_v() for c in f]
    tang = (fu, fv)
    g = [[flat_inner(model, tang[a], tang[b]) for b in range(2)] for a in range(2)]
    detg = g[0][0] * g[1][1] - g[0][1] * g[0][1]
    if detg.value <= 1e-12:
        raise DegenerateMetricError(f"det g = {detg.value!r} at ({u}, {v})")
    ginv = [[g[1][1] / detg, -g[0][1] / detg], [-g[0][1] / detg, g[0][0] / detg]]
    gamma = christoffels(g, ginv)

    d2 = [[[c.d_u() for c in fu], [c.d_v() for c in fu]],
          [[c.d_v() for c in fu], [c.d_v() for c in fv]]]

    alpha_flat = [[None, None], [None, None]]
    for a in range(2):
        for b in range(a, 2):
            w = project_to_product_tangent(model, f, d2[a][b])
            c0 = flat_inner(model, w, fu)
            c1 = flat_inner(model, w, fv)
            t0 = ginv[0][0] * c0 + ginv[0][1] * c1
            t1 = ginv[1][0] * c0 + ginv[1][1] * c1
            alpha_flat[a][b] = [w[i] - t0 * fu[i] - t1 * fv[i] for i in range(dim)]
            alpha_flat[b][a] = alpha_flat[a][b]

    H = [
        0.5
        * (
            ginv[0][0] * alpha_flat[0][0][i]
            + 2.0 * ginv[0][1] * alpha_flat[0][1][i]
            + ginv[1][1] * alpha_flat[1][1][i]
        )
        for i in range(dim)
    ]
    normH2 = flat_inner(model, H, H)
    normH = math.sqrt(max(normH2.value, 0.0))

    # Vertical field split: T^a = g^{ab} <e_t, f_b>; eta = e_t - T.
    tcomp = (fu[model.t_index], fv[model.t_index])
    T_up = [ginv[a][0] * tcomp[0] + ginv[a][1] * tcomp[1] for a in range(2)]
    T_flat = [T_up[0] * fu[i] + T_up[1] * fv[i] for i in range(dim)]
    eta = [-T_flat[i] if i != model.t_index else 1.0 - T_flat[i] for i in range(dim)]
    normT2 = flat_inner(model, T_flat, T_flat)

    K = gauss_curvature_brioschi(g)

    g_val = np.array([[g[0][0].value, g[0][1].value], [g[0][1].value, g[1][1].value]])
    ginv_val = np.array(
        [[ginv[0][0].value, ginv[0][1].value], [ginv[0][1].value, ginv[1][1].value]]
    )
    gamma_val = np.array(
        [[[gamma[k][i][j].value for j in range(2)] for i in range(2)] for k in range(2)]
    )
    fu_val = np.array([c.value for c in fu])
    fv_val = np.array([c.value for c in fv])
    H_val = np.array([c.value for c in H])
    alpha_val = np.array(
        [[[alpha_flat[a][b][i].value for i in range(dim)] for b in range(2)] for a in range(2)]
    )
    T_val = np.array([c.value for c in T_up])
    eta_val = np.array([c.value for c in eta])

    xi = _normal_frame_values(model, f_val, fu_val, fv_val, ginv_val, H_val, normH)
    sig = np.asarray(model.signature)
    h = np.array(
        [[[float(np.dot(sig * alpha_val[a][b], x)) for b in range(2)] for a in range(2)]
         for x in xi]
    )
    A = [ginv_val @ h[i] for i in range(len(xi))]

    return GeomPoint(
        spec=spec, u=u, v=v, order=order,
        f=f, fu=fu, fv=fv, g=g, ginv=ginv, detg=detg, gamma=gamma,
        alpha_flat=alpha_flat, H=H, normH2=normH2, normH=normH,
        T_up=T_up, T_flat=T_flat, eta=eta, normT2=normT2, K=K,
        xi=xi, h=h, A=A,
        g_val=g_val, ginv_val=ginv_val, gamma_val=gamma_val,
        K_val=K.value, normT=math.sqrt(max(normT2.value, 0.0)),
        T_val=T_val, eta_val=eta_val, H_val=H_val, alpha_val=alpha_val,
    )


def shape_operator(gp: GeomPoint, xi: np.ndarray) -> np.ndarray:
    """Matrix of A_xi in the chart basis: g^{-1} [ <alpha(d_a, d_b), xi> ].

    xi must be normal to the surface inside the product tangent space.
    """
    model = gp.spec.ambient
    xi = np.asarray(xi, dtype=float)
    sig = np.asarray(model.signature)
    fu_val, fv_val = gp.tangent_vals
    scale = max(1.0, float(np.linalg.norm(xi)))
    f_val = np.array([c.value for c in gp.f])
    if model.kappa != 0:
        radial = model.kappa * float(np.dot(sig[:-1] * xi[:-1], f_val[:-1]))
        if abs(radial) > NORMALITY_TOL * scale:
            raise NotNormalError(f"vector has radial component {radial!r}")
    for t in (fu_val, fv_val):
        comp = float(np.dot(sig * xi, t))
        if abs(comp) > NORMALITY_TOL * scale * max(1.0, float(np.linalg.norm(t))):
            raise NotNormalError(f"vector has tangential component {comp!r}")
    m = np.array(
        [[float(np.dot(sig * gp.alpha_val[a][b], xi)) for b in range(2)] for a in range(2)]
    )
    return gp.ginv_val @ m


def normal_connection_derivative(
    spec: SurfaceSpec,
    u: float,
    v: float,
    normal_field: Callable[[GeomPoint], list[Jet2]],
    direction: str,
) -> np.ndarray:
    """Normal-connection derivative of a normal field along a chart direction.

    Computed as the surface-normal part (inside the product tangent space) of
    the projected flat derivative of the field; the field is supplied as a
    jet-valued function of the chart point.
    """
    if direction not in ("u", "v"):
        raise ValueError(f"direction must be 'u' or 'v', got {direction!r}")
    gp = spec.geom(u, v)
    model = spec.ambient
    sig = np.asarray(model.signature)
    w = normal_field(gp)
    w_val = np.array([c.value for c in w])
    fu_val, fv_val = gp.tangent_vals
    scale = max(1.0, float(np.linalg.norm(w_val)))
    for t in (fu_val, fv_val):
        comp = float(np.dot(sig * w_val, t))
        if abs(comp) > NORMALITY_TOL * scale * max(1.0, float(np.linalg.norm(t))):
            raise NotNormalError(f"field not normal at ({u}, {v}): component {comp!r}")
    dw = np.array([c.du if direction == "u" else c.dv for c in w])
    return _normal_part(gp, dw)


def _normal_part(gp: GeomPoint, w_val: np.ndarray) -> np.ndarray:
    """Project a flat vector at gp onto the surface-normal space (values)."""
    model = gp.spec.ambient
    sig = np.asarray(model.signature)
    f_val = np.array([c.value for c in gp.f])
    w = w_val.astype(float).copy()
    if model.kappa != 0:
        inner = float(np.dot(sig[:-1] * w[:-1], f_val[:-1]))
        w[:-1] -= model.kappa * inner * f_val[:-1]
    fu_val, fv_val = gp.tangent_vals
    coeff = gp.ginv_val @ np.array(
        [float(np.dot(sig * w, fu_val)), float(np.dot(sig * w, fv_val))]
    )
    return w - coeff[0] * fu_val - coeff[1] * fv_val


def endo_eigenvalues(m: np.ndarray) -> tuple[float, float]:
    """Eigenvalues of a 2x2 endomorphism that is self-adjoint for some metric."""
    tr = float(m[0, 0] + m[1, 1])
    det = float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    disc = math.sqrt(max(tr * tr - 4.0 * det, 0.0))
    return ((tr - disc) / 2.0, (tr + disc) / 2.0)


def aux_det_sum(gp: GeomPoint) -> float:
    """Sum of det A_i over the auxiliary normal directions (frame minus H/|H|).

    Requires a non-minimal point, where the first frame vector is H/|H|.
    """
    if gp.normH <= MINIMAL_TOL:
        raise MinimalSurfaceError(f"|H| = {gp.normH!r} below threshold")
    return float(sum(np.linalg.det(a) for a in gp.A[1:]))


def grid_points(spec: SurfaceSpec, nu: int, nv: int, margin: float = 0.02):
    """Interior sample grid, excluding a margin fraction near the chart edge."""
    (u0, u1), (v0, v1) = spec.domain
    du, dv = u1 - u0, v1 - v0
    us = [u0 + margin * du + i * (1 - 2 * margin) * du / (nu - 1) for i in range(nu)]
    vs = [v0 + margin * dv + j * (1 - 2 * margin) * dv / (nv - 1) for j in range(nv)]
    return [(u, v) for u in us for v in vs]
