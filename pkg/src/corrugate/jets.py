"""1-jets of maps from a 2D domain into Euclidean 3-space.

A jet is stored as ``(x, y, L)`` where ``L`` is a ``(3, 2)`` array whose
columns are the images of the coordinate vectors d/dx1 and d/dx2.
Everything here is a pure function of its inputs.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from corrugate.errors import DegeneratePlane, EmptySlice

RANK_TOL = 1e-10


class DefectNorm(enum.Enum):
    MAX_ENTRY = "max-entry"
    OPERATOR_G = "operator-norm-wrt-g"


@dataclass(frozen=True)
class DomainPoint:
    x1: float
    x2: float

    def __post_init__(self):
        object.__setattr__(self, "x1", float(self.x1) % 1.0)
        object.__setattr__(self, "x2", float(self.x2))

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2])


@dataclass(frozen=True)
class Jet:
    x: DomainPoint
    y: np.ndarray
    L: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).reshape(3)
        L = np.asarray(self.L, dtype=float)
        if L.shape != (3, 2):
            raise ValueError(f"L must have shape (3, 2), got {L.shape}")
        if not (np.all(np.isfinite(L)) and np.all(np.isfinite(y))):
            raise ValueError("jet entries must be finite")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "L", L)

    def column(self, index: int) -> np.ndarray:
        """Image L(d/dx_index) for ``index`` in {1, 2}."""
        return self.L[:, index - 1]

    def replace_column(self, index: int, v) -> "Jet":
        """The jet L + (v - L(u)) (x) dx_index, i.e. ``L`` with column u set to v."""
        L = self.L.copy()
        L[:, index - 1] = v
        return Jet(self.x, self.y, L)


@dataclass(frozen=True)
class SliceFrame:
    center: np.ndarray
    e_normal: np.ndarray
    e_tangent: np.ndarray
    plane_offset: np.ndarray


@dataclass(frozen=True)
class SliceGeometry:
    frame: SliceFrame
    r_min: float
    r_max: float
    r_exact: float
    # unit vector spanning P = L(ker lambda)
    p_direction: np.ndarray = field(repr=False)

    def in_plane(self, v) -> np.ndarray:
        """Coordinates of ``v - plane_offset`` along (e_normal, e_tangent)."""
        d = np.asarray(v, dtype=float) - self.frame.plane_offset
        return np.stack([d @ self.frame.e_normal, d @ self.frame.e_tangent], axis=-1)


def other_index(u_index: int) -> int:
    if u_index not in (1, 2):
        raise ValueError(f"u_index must be 1 or 2, got {u_index}")
    return 3 - u_index


def basis_vector(index: int) -> np.ndarray:
    e = np.zeros(2)
    e[index - 1] = 1.0
    return e


def pullback_metric(L) -> np.ndarray:
    L = np.asarray(L, dtype=float)
    return L.T @ L


def metric_defect(g, L, norm: DefectNorm = DefectNorm.MAX_ENTRY) -> float:
    g = np.asarray(g, dtype=float)
    diff = g - pullback_metric(L)
    if norm is DefectNorm.MAX_ENTRY:
        return float(np.max(np.abs(diff)))
    # |g - L*h| measured against g: largest generalized eigenvalue in modulus
    eig = linalg.eigvalsh(diff, g)
    return float(np.max(np.abs(eig)))


def _check_rank(L: np.ndarray) -> None:
    s = np.linalg.svd(L, compute_uv=False)
    if s[0] == 0.0 or s[-1] <= RANK_TOL * s[0]:
        raise DegeneratePlane("L is rank deficient; L(ker lambda) or the normal is undefined")


def unit_normal(L) -> np.ndarray:
    """Right-handed unit normal L(d1) x L(d2) / |.| of the image plane."""
    L = np.asarray(L, dtype=float)
    _check_rank(L)
    n = np.cross(L[:, 0], L[:, 1])
    return n / np.linalg.norm(n)


def project_on_line(v, direction) -> np.ndarray:
    d = np.asarray(direction, dtype=float)
    return (np.asarray(v, dtype=float) @ d) / (d @ d) * d


def subsolution_radius(g, u, kerlam_direction) -> float:
    """Radius sqrt(|u|_g^2 - |proj_0 u|_g^2), proj_0 g-orthogonal onto ker lambda."""
    g = np.asarray(g, dtype=float)
    u = np.asarray(u, dtype=float)
    k = np.asarray(kerlam_direction, dtype=float)
    uu = u @ g @ u
    uk = u @ g @ k
    kk = k @ g @ k
    return math.sqrt(max(uu - uk * uk / kk, 0.0))


def slice_geometry(sigma: Jet, g, eps: float, w, u_index: int = 1) -> SliceGeometry:
    """Frame and radii of the epsilon-slice of the isometric relation in P_u(w).

    The slice lives in the plane through ``proj_P w`` orthogonal to
    ``P = L(ker dx_u)``. Radii follow the thickened sphere |v| in
    (|u|_g - eps, |u|_g + eps); the inner radius is clamped at zero.
    """
    g = np.asarray(g, dtype=float)
    w = np.asarray(w, dtype=float)
    L = sigma.L
    _check_rank(L)
    k_idx = other_index(u_index)
    k = sigma.column(k_idx)
    p_dir = k / np.linalg.norm(k)
    Lu = sigma.column(u_index)

    center = (Lu @ p_dir) * p_dir
    tangential = Lu - center
    e_tangent = tangential / np.linalg.norm(tangential)
    e_normal = unit_normal(L)
    offset = (w @ p_dir) * p_dir

    u = basis_vector(u_index)
    u_norm = math.sqrt(u @ g @ u)
    pw2 = float(offset @ offset)
    inner = max(u_norm - eps, 0.0)
    r_min2 = max(inner * inner - pw2, 0.0)
    r_max2 = (u_norm + eps) ** 2 - pw2
    if r_max2 <= 0.0:
        raise EmptySlice(f"r_max^2 = {r_max2:.3e} <= 0")
    r_exact = subsolution_radius(g, u, basis_vector(k_idx))
    frame = SliceFrame(center=center, e_normal=e_normal, e_tangent=e_tangent, plane_offset=offset)
    return SliceGeometry(frame, math.sqrt(r_min2), math.sqrt(r_max2), r_exact, p_dir)


def is_subsolution(sigma: Jet, f0_derivative_u, g, eps: float, u_index: int = 1) -> bool:
    """Whether df0(u) lies in the interior of the convex hull of the eps-slice.

    That hull is the slab of half-width eps around P_u intersected with the
    open ball of radius |u|_g + eps; in P_u(w) it is the disk D(r_max).
    """
    w = np.asarray(f0_derivative_u, dtype=float)
    geo = slice_geometry(sigma, g, eps, w, u_index)
    shift = np.linalg.norm(geo.frame.plane_offset - geo.frame.center)
    if shift >= eps:
        return False
    radial = np.linalg.norm(w - geo.frame.plane_offset)
    return bool(radial < geo.r_max)
