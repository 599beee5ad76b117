"""Surrounding loop family for the epsilon-isometric relation in codimension one.

Given a jet ``sigma`` and a target average ``w`` in the interior of the
convex hull of its slice, :func:`build_loop` returns a loop with average
``w`` lying in the annulus of the slice, shaped by the pattern ``c``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from corrugate import pattern as pat
from corrugate.errors import DegenerateInput, NotNormalized, PathEscapesSlice
from corrugate.jets import Jet, SliceGeometry, other_index, slice_geometry

NORMALIZED_TOL = 1e-10
ETA_CAP = 0.49
AXIS_TOL = 1e-12


class AxisOrder(enum.Enum):
    """Which slice direction carries the real part of the pattern."""

    NORMAL_FIRST = "normal-first"    # real axis along the unit normal of L(TM)
    TANGENT_FIRST = "tangent-first"  # real axis along the tangential part of L(u)


@dataclass(frozen=True)
class SurroundingInput:
    sigma: Jet
    w: np.ndarray
    g: np.ndarray
    eps: float
    u_index: int = 1

    def __post_init__(self):
        object.__setattr__(self, "w", np.asarray(self.w, dtype=float).reshape(3))
        object.__setattr__(self, "g", np.asarray(self.g, dtype=float).reshape(2, 2))

    @property
    def geometry(self) -> SliceGeometry:
        return slice_geometry(self.sigma, self.g, self.eps, self.w, self.u_index)


@dataclass(frozen=True)
class SurroundingLoop:
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    pattern: pat.PatternParams
    r_tilde: float
    geometry: SliceGeometry

    def __call__(self, t):
        z = pat.shape(self.pattern, t).z
        z = np.asarray(z)
        return z.real[..., None] * self.e1 + z.imag[..., None] * self.e2 + self.e3

    def average(self) -> np.ndarray:
        zbar = pat.shape_average(self.pattern).z
        return zbar.real * self.e1 + zbar.imag * self.e2 + self.e3

    def primitive(self, t):
        """int_0^t gamma(s) - mean(gamma) ds."""
        C = np.asarray(pat.shape_primitive(self.pattern, t))
        return C.real[..., None] * self.e1 + C.imag[..., None] * self.e2


def _distances(inp: SurroundingInput, geo: SliceGeometry) -> tuple[float, float, float, float]:
    """(rho_Lu, rho_w, d1, d2): in-plane radii of L(u) and w and their margins."""
    Lu = inp.sigma.column(inp.u_index)
    rho_Lu = float(np.linalg.norm(Lu - geo.frame.center))
    rho_w = float(np.linalg.norm(inp.w - geo.frame.plane_offset))
    d1 = geo.r_max - rho_w
    d2 = min(abs(rho_Lu - geo.r_min), abs(geo.r_max - rho_Lu))
    return rho_Lu, rho_w, d1, d2


def _require_normalized(inp: SurroundingInput, geo: SliceGeometry) -> None:
    gap = np.linalg.norm(geo.frame.center - geo.frame.plane_offset)
    if gap > NORMALIZED_TOL:
        raise NotNormalized(f"proj_P L(u) and proj_P w differ by {gap:.3e}; run normalize_w first")


def disk_radius(inp: SurroundingInput) -> float:
    geo = inp.geometry
    _require_normalized(inp, geo)
    rho_Lu, rho_w, d1, _ = _distances(inp, geo)
    return max(rho_Lu, rho_w + d1 / 3.0)


def eta_selection(inp: SurroundingInput, r_tilde: float) -> float:
    """eta = min(d1, d2) / 3 expressed in pattern units (divided by r_tilde)."""
    _, _, d1, d2 = _distances(inp, inp.geometry)
    m = min(d1, d2)
    if m <= 0.0:
        raise DegenerateInput(f"w or L(u) is not inside the slice (min distance {m:.3e})")
    return min(m / (3.0 * r_tilde), ETA_CAP)


def invert_disk_parametrization(w_plane: complex, r_tilde: float) -> tuple[float, float]:
    """(theta, beta) with beta r e^{i theta} + (1 - beta) r e^{-i theta} = w_plane."""
    x = w_plane.real / r_tilde
    theta = math.acos(min(1.0, max(-1.0, x)))
    s = math.sin(theta)
    if s <= AXIS_TOL or abs(w_plane.imag) <= AXIS_TOL * r_tilde:
        return theta, 0.5
    beta = 0.5 * (1.0 + w_plane.imag / (r_tilde * s))
    return theta, min(1.0, max(0.0, beta))


def disk_parametrization(theta: float, beta: float, r_tilde: float) -> complex:
    return beta * r_tilde * np.exp(1j * theta) + (1.0 - beta) * r_tilde * np.exp(-1j * theta)


def _axes(geo: SliceGeometry, order: AxisOrder) -> tuple[np.ndarray, np.ndarray]:
    if order is AxisOrder.NORMAL_FIRST:
        return geo.frame.e_normal, geo.frame.e_tangent
    return geo.frame.e_tangent, geo.frame.e_normal


def build_loop(
    inp: SurroundingInput,
    axis_order: AxisOrder = AxisOrder.NORMAL_FIRST,
    eta: float | None = None,
) -> SurroundingLoop:
    """Surrounding loop gamma(t) = c1(t) e1 + c2(t) e2 + e3 with average w.

    ``eta`` overrides the automatic choice (used by the cone application,
    where eta is a user parameter). The automatic eta is additionally capped
    by min(beta, 1 - beta) so the pattern parameters stay admissible.
    """
    geo = inp.geometry
    _require_normalized(inp, geo)
    r_tilde = disk_radius(inp)
    a1, a2 = _axes(geo, axis_order)
    d = inp.w - geo.frame.center
    theta, beta = invert_disk_parametrization(complex(d @ a1, d @ a2), r_tilde)
    if eta is None:
        eta = min(eta_selection(inp, r_tilde), beta, 1.0 - beta)
        if eta <= 0.0:
            raise DegenerateInput("w sits on the boundary of the parametrized disk")
    p = pat.PatternParams(eta, theta, beta)
    return SurroundingLoop(r_tilde * a1, r_tilde * a2, geo.frame.center.copy(), p, r_tilde, geo)


@dataclass(frozen=True)
class Normalization:
    """Sampled homotopy of L(u) moving proj_P L(u) onto proj_P w."""

    pre_vectors: np.ndarray   # (k, 3), empty when |L(u)| >= |w|
    main_vectors: np.ndarray  # (n, 3)
    jet: Jet
    u_index: int

    @property
    def vectors(self) -> np.ndarray:
        return np.concatenate([self.pre_vectors, self.main_vectors])

    @property
    def path(self) -> list[Jet]:
        return [self.jet.replace_column(self.u_index, v) for v in self.vectors]


def normalize_w(sigma: Jet, w, u_index: int = 1, samples: int = 64) -> Normalization:
    w = np.asarray(w, dtype=float)
    k = sigma.column(other_index(u_index))
    p_dir = k / np.linalg.norm(k)

    def proj(v):
        return (v @ p_dir) * p_dir

    v0 = sigma.column(u_index).copy()
    ts = np.linspace(0.0, 1.0, samples)
    pre = np.empty((0, 3))
    V0 = v0
    if np.linalg.norm(v0) < np.linalg.norm(w):
        pv0 = proj(v0)
        perp = v0 - pv0
        scale = math.sqrt(w @ w - pv0 @ pv0) / np.linalg.norm(perp)
        pre = pv0 + ((1.0 - ts) + ts * scale)[:, None] * perp
        V0 = pre[-1]
    pV, pw = proj(V0), proj(w)
    perp = V0 - pV
    base = ts[:, None] * pw + (1.0 - ts)[:, None] * pV
    num = V0 @ V0 - np.einsum("ij,ij->i", base, base)
    phi = np.sqrt(np.maximum(num, 0.0) / (perp @ perp))
    main = base + phi[:, None] * perp
    main[-1] = pw + phi[-1] * perp
    return Normalization(pre, main, sigma.replace_column(u_index, main[-1]), u_index)


def base_point_homotopy(loop: SurroundingLoop, sigma: Jet, u_index: int = 1, samples: int = 64) -> np.ndarray:
    """Path from gamma(0) to L(u) inside the slice annulus.

    A circular arc of radius r_tilde (offset by eta cos(theta) e1) turns
    from angle 0 to the direction of L(u) - e3, then a segment reaches L(u).
    """
    p = loop.pattern
    Lu = sigma.column(u_index)
    d = Lu - loop.e3
    r2 = loop.r_tilde ** 2
    phi_end = math.atan2(d @ loop.e2 / r2, d @ loop.e1 / r2)
    shift = p.eta * math.cos(p.theta) * loop.e1
    s = np.linspace(0.0, phi_end, samples)
    arc = np.cos(s)[:, None] * loop.e1 + np.sin(s)[:, None] * loop.e2 + shift + loop.e3
    tau = np.linspace(0.0, 1.0, samples)[1:, None]
    seg = (1.0 - tau) * arc[-1] + tau * Lu
    seg[-1] = Lu
    path = np.concatenate([arc, seg])

    geo = loop.geometry
    offsets = (path - geo.frame.plane_offset) @ geo.p_direction
    radial = np.linalg.norm(path - geo.frame.plane_offset - offsets[:, None] * geo.p_direction, axis=1)
    bad = (np.abs(offsets) > 1e-9) | (radial <= geo.r_min) | (radial >= geo.r_max)
    if np.any(bad):
        raise PathEscapesSlice(f"{int(bad.sum())} of {len(path)} homotopy samples leave the slice annulus")
    return path
