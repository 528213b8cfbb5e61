"""Built-in surface charts with closed-form geometry.

Each entry stores its expected quantities (curvature, vertical angle, mean
curvature, operator determinant) computed from classical closed forms, so
tests compare the numerical pipeline against independent hand results, never
against itself.

Chart domains avoid coordinate seams and parameterization degeneracies; the
sampling margin applied by grid sweeps handles the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from . import jets
from .geometry import SurfaceSpec
from .jets import Jet2
from .spaceforms import make_ambient

TWO_PI = 2.0 * math.pi


class CatalogError(ValueError):
    """Unknown catalog id or parameter out of its valid range."""


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    required_params: dict[str, str]
    optional_params: dict[str, float]
    ambient_rule: str
    expected_formulas: dict[str, str]
    build: Callable[[dict[str, float]], SurfaceSpec] = field(repr=False)

    def expected(self, params: dict[str, float]) -> dict[str, float]:
        full = dict(self.optional_params)
        full.update({k: float(v) for k, v in params.items()})
        return self.build(full).expected


def _cosh(a: Jet2) -> Jet2:
    return 0.5 * (jets.exp(a) + jets.exp(-a))


def _sinh(a: Jet2) -> Jet2:
    return 0.5 * (jets.exp(a) - jets.exp(-a))


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise CatalogError(msg)


def _curve_curvature(kappa: float, r: float) -> float:
    """Geodesic curvature of the distance-r circle in the curvature-kappa plane."""
    if kappa > 0:
        return math.sqrt(kappa) / math.tan(math.sqrt(kappa) * r)
    if kappa < 0:
        return math.sqrt(-kappa) / math.tanh(math.sqrt(-kappa) * r)
    return 1.0 / r


def _build_slice(p: dict[str, float]) -> SurfaceSpec:
    kappa, t0 = p["kappa"], p["t0"]
    ambient = make_ambient(kappa, 2)
    if kappa > 0:
        radius = 1.0 / math.sqrt(kappa)

        def chart(uj, vj):
            t = Jet2.constant(t0, uj.order)
            return [
                radius * jets.cos(uj) * jets.cos(vj),
                radius * jets.sin(uj) * jets.cos(vj),
                radius * jets.sin(vj),
                t,
            ]

        domain = ((0.0, TWO_PI), (-1.2, 1.2))
    elif kappa < 0:
        radius = 1.0 / math.sqrt(-kappa)

        def chart(uj, vj):
            t = Jet2.constant(t0, uj.order)
            return [
                radius * _cosh(uj),
                radius * _sinh(uj) * jets.cos(vj),
                radius * _sinh(uj) * jets.sin(vj),
                t,
            ]

        domain = ((0.2, 1.8), (0.0, TWO_PI))
    else:

        def chart(uj, vj):
            return [uj, vj, Jet2.constant(t0, uj.order)]

        domain = ((-1.0, 1.0), (-1.0, 1.0))
    expected = {"K": kappa, "normT": 0.0, "normH": 0.0, "detS_tilde": 0.0,
                "normS_tilde2": 0.0}
    return SurfaceSpec("slice", dict(p), domain, ambient, chart, expected, minimal=True)


def _build_vertical_cylinder(p: dict[str, float]) -> SurfaceSpec:
    kappa = p["kappa"]
    ambient = make_ambient(kappa, 2)
    if kappa > 0:
        radius = 1.0 / math.sqrt(kappa)

        def chart(uj, vj):
            zero = Jet2.constant(0.0, uj.order)
            return [radius * jets.cos(uj), radius * jets.sin(uj), zero, vj]

        domain = ((0.0, TWO_PI), (-1.0, 1.0))
    elif kappa < 0:
        radius = 1.0 / math.sqrt(-kappa)

        def chart(uj, vj):
            zero = Jet2.constant(0.0, uj.order)
            return [radius * _cosh(uj), radius * _sinh(uj), zero, vj]

        domain = ((-1.5, 1.5), (-1.0, 1.0))
    else:

        def chart(uj, vj):
            return [uj, Jet2.constant(0.0, uj.order), vj]

        domain = ((-1.0, 1.0), (-1.0, 1.0))
    expected = {"K": 0.0, "normT": 1.0, "normH": 0.0, "detS_tilde": -0.25,
                "normS_tilde2": 0.5}
    return SurfaceSpec("vertical_geodesic_cylinder", dict(p), domain, ambient, chart,
                       expected, minimal=True)


def _circle_profile(kappa: float, r: float):
    """Flat-block coordinates of the distance-r circle point at angle w (jets)."""
    if kappa > 0:
        radius = 1.0 / math.sqrt(kappa)
        a = radius * math.sin(math.sqrt(kappa) * r)
        c = radius * math.cos(math.sqrt(kappa) * r)
        return lambda w: [a * jets.cos(w), a * jets.sin(w),
                          Jet2.constant(c, w.order)]
    if kappa < 0:
        radius = 1.0 / math.sqrt(-kappa)
        a = radius * math.sinh(math.sqrt(-kappa) * r)
        c = radius * math.cosh(math.sqrt(-kappa) * r)
        return lambda w: [Jet2.constant(c, w.order), a * jets.cos(w), a * jets.sin(w)]
    return lambda w: [r * jets.cos(w), r * jets.sin(w)]


def _check_circle_radius(kappa: float, r: float, slack: float = 1.0) -> None:
    _require(r > 0, f"r must be positive, got {r}")
    if kappa > 0:
        _require(r * slack < math.pi / (2 * math.sqrt(kappa)),
                 f"r must stay below pi/(2 sqrt(kappa)), got {r}")


def _build_circle_cylinder(p: dict[str, float]) -> SurfaceSpec:
    kappa, r = p["kappa"], p["r"]
    pad, warp = int(p["pad"]), p["warp"]
    _check_circle_radius(kappa, r)
    _require(pad in (0, 2), f"pad must be 0 or 2, got {pad}")
    _require(abs(warp) < 1.0, f"|warp| must be < 1 for an immersion, got {warp}")
    ambient = make_ambient(kappa, 2 + pad)
    profile = _circle_profile(kappa, r)

    def chart(uj, vj):
        # warp reparameterizes the angle with a u-v coupled term; the surface
        # itself is unchanged, only the chart (and hence Gamma, T^a, the
        # operator matrix) becomes genuinely non-diagonal.
        w = uj + warp * jets.sin(uj) * jets.cos(vj) if warp else uj
        zero = Jet2.constant(0.0, uj.order)
        return profile(w) + [zero] * pad + [vj]

    domain = ((0.0, TWO_PI), (-1.0, 1.0))
    cc = _curve_curvature(kappa, r)
    eig = (cc * cc + kappa) / 2.0
    expected = {
        "K": 0.0,
        "normT": 1.0,
        "normH": cc / 2.0,
        "detS": -eig * eig,
        "normS2": 2.0 * eig * eig,
        "principal_max": cc,
        "principal_min": 0.0,
    }
    return SurfaceSpec("circle_cylinder", dict(p), domain, ambient, chart, expected,
                       minimal=False)


def _build_cor32(p: dict[str, float]) -> SurfaceSpec:
    kappa, theta = p["kappa"], p["theta"]
    _require(kappa > 0, f"kappa must be positive, got {kappa}")
    _require(0 < theta < math.pi / 2, f"theta must lie in (0, pi/2), got {theta}")
    b = math.sqrt(kappa + kappa * math.cos(theta) ** 2)
    ct, st = math.cos(theta), math.sin(theta)
    ambient = make_ambient(kappa, 4)

    def chart(uj, vj):
        bu, bv = b * uj, b * vj
        zero = Jet2.constant(0.0, uj.order)
        return [
            (ct / b) * jets.cos(bu),
            (ct / b) * jets.sin(bu),
            jets.sin(bv) / b,
            jets.cos(bv) / b,
            zero,
            st * uj,
        ]

    domain = ((0.0, TWO_PI / b), (0.0, TWO_PI / b))
    expected = {
        "K": 0.0,
        "normT": st,
        "normH": 0.0,
        "b": b,
        "detS_tilde": -(st ** 4) / 4.0,
        "normS_tilde2": (st ** 4) / 2.0,
    }
    return SurfaceSpec("cor32_flat_minimal", dict(p), domain, ambient, chart, expected,
                       minimal=True)


def _build_perturbed_control(p: dict[str, float]) -> SurfaceSpec:
    kappa, r, amp = p["kappa"], p["r"], p["amp"]
    _require(0 < abs(amp) < 0.5, f"amp must be in (0, 0.5), got {amp}")
    _check_circle_radius(kappa, r, slack=1.0 + abs(amp))
    ambient = make_ambient(kappa, 2)
    if kappa > 0:
        radius = 1.0 / math.sqrt(kappa)
        rho0 = math.sqrt(kappa) * r

        def chart(uj, vj):
            rho = rho0 * (1.0 + amp * jets.sin(vj))
            return [
                radius * jets.sin(rho) * jets.cos(uj),
                radius * jets.sin(rho) * jets.sin(uj),
                radius * jets.cos(rho),
                vj,
            ]

    elif kappa < 0:
        radius = 1.0 / math.sqrt(-kappa)
        rho0 = math.sqrt(-kappa) * r

        def chart(uj, vj):
            rho = rho0 * (1.0 + amp * jets.sin(vj))
            return [
                radius * _cosh(rho),
                radius * _sinh(rho) * jets.cos(uj),
                radius * _sinh(rho) * jets.sin(uj),
                vj,
            ]

    else:

        def chart(uj, vj):
            rho = r * (1.0 + amp * jets.sin(vj))
            return [rho * jets.cos(uj), rho * jets.sin(uj), vj]

    domain = ((0.0, TWO_PI), (0.0, TWO_PI))
    expected = {"pmc_residual_exceeds": 1e-3, "constraint_residual": 0.0}
    return SurfaceSpec("perturbed_control", dict(p), domain, ambient, chart, expected,
                       minimal=False)


_ENTRIES: list[CatalogEntry] = [
    CatalogEntry(
        id="slice",
        required_params={"kappa": "any real"},
        optional_params={"t0": 0.0},
        ambient_rule="M^2(kappa) x R at fixed height t0",
        expected_formulas={"K": "kappa", "normT": "0", "normH": "0"},
        build=_build_slice,
    ),
    CatalogEntry(
        id="vertical_geodesic_cylinder",
        required_params={"kappa": "any real"},
        optional_params={},
        ambient_rule="M^2(kappa) x R, cylinder over a complete geodesic",
        expected_formulas={"K": "0", "normT": "1", "normH": "0",
                           "detS_tilde": "-1/4"},
        build=_build_vertical_cylinder,
    ),
    CatalogEntry(
        id="circle_cylinder",
        required_params={"kappa": "any real",
                         "r": "0 < r (< pi/(2 sqrt(kappa)) when kappa > 0)"},
        optional_params={"pad": 0.0, "warp": 0.0},
        ambient_rule="M^2(kappa) x R; pad=2 embeds totally geodesically in M^4(kappa) x R",
        expected_formulas={
            "K": "0",
            "normT": "1",
            "normH": "cot_kappa(r)/2",
            "detS": "-((cot_kappa(r)^2 + kappa)/2)^2",
        },
        build=_build_circle_cylinder,
    ),
    CatalogEntry(
        id="cor32_flat_minimal",
        required_params={"kappa": "kappa > 0", "theta": "0 < theta < pi/2"},
        optional_params={},
        ambient_rule="M^4(kappa) x R, flat helical minimal surface",
        expected_formulas={"K": "0", "normT": "sin(theta)", "normH": "0",
                           "b": "sqrt(kappa (1 + cos(theta)^2))",
                           "detS_tilde": "-sin(theta)^4/4"},
        build=_build_cor32,
    ),
    CatalogEntry(
        id="perturbed_control",
        required_params={"kappa": "any real",
                         "r": "0 < r (1+amp) (< pi/(2 sqrt(kappa)) when kappa > 0)"},
        optional_params={"amp": 0.1},
        ambient_rule="M^2(kappa) x R, circle cylinder with height-modulated radius",
        expected_formulas={"pmc_residual_exceeds": "1e-3"},
        build=_build_perturbed_control,
    ),
]
_BY_ID = {e.id: e for e in _ENTRIES}


def catalog_list() -> list[CatalogEntry]:
    return list(_ENTRIES)


def instantiate(catalog_id: str, params: dict[str, float]) -> SurfaceSpec:
    """Build the chart for a catalog id, validating parameter names and ranges."""
    entry = _BY_ID.get(catalog_id)
    if entry is None:
        raise CatalogError(f"unknown catalog id {catalog_id!r}")
    known = set(entry.required_params) | set(entry.optional_params)
    unknown = set(params) - known
    if unknown:
        raise CatalogError(f"unknown parameter(s) {sorted(unknown)} for {catalog_id!r}")
    missing = set(entry.required_params) - set(params)
    if missing:
        raise CatalogError(f"missing parameter(s) {sorted(missing)} for {catalog_id!r}")
    full = dict(entry.optional_params)
    full.update({k: float(v) for k, v in params.items()})
    return entry.build(full)
