"""Desingularizing a cone into a surface eps-isometric to the flat cylinder.

The cylinder is R/Z x [-0.1, 0.1] with metric dx^2 + dy^2. The base map is
the cone f0(x, y) = (y cos 2 pi x, y sin 2 pi x, y) / sqrt(2), and the formal
solution replaces d1 f0 by the unit vector v1. A single corrugation in x
with loops in the (v1, n) plane yields f1.
"""
from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from corrugate import pattern as pat
from corrugate.corrugation import Subsolution
from corrugate.errors import OutOfSubsolution
from corrugate.jets import DomainPoint, Jet
from corrugate.surrounding import AxisOrder

log = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
SQRT2_PI = SQRT2 * math.pi
Y_BOUND = 1.0 / SQRT2_PI  # subsolution condition |y| < 1 / (sqrt(2) pi)


def cone_map(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = 2 * math.pi * x
    return np.stack(np.broadcast_arrays(y * np.cos(a), y * np.sin(a), y), axis=-1) / SQRT2


def cone_d1(x, y):
    """d/dx of the cone: sqrt(2) pi y v1."""
    return SQRT2_PI * np.asarray(y, dtype=float)[..., None] * v1_field(x, y)


def cone_d2(x, y):
    x = np.asarray(x, dtype=float)
    a = 2 * math.pi * x
    one = np.ones_like(a) + 0.0 * np.asarray(y, dtype=float)
    return np.stack(np.broadcast_arrays(np.cos(a), np.sin(a), one), axis=-1) / SQRT2


def v1_field(x, y=0.0):
    x = np.asarray(x, dtype=float)
    a = 2 * math.pi * x
    zero = np.zeros_like(a) + 0.0 * np.asarray(y, dtype=float)
    return np.stack(np.broadcast_arrays(-np.sin(a), np.cos(a), zero), axis=-1)


def normal_field(x, y=0.0):
    """n = v1 x d2 f0 = (cos 2 pi x, sin 2 pi x, -1) / sqrt(2)."""
    x = np.asarray(x, dtype=float)
    a = 2 * math.pi * x
    minus = -np.ones_like(a) + 0.0 * np.asarray(y, dtype=float)
    return np.stack(np.broadcast_arrays(np.cos(a), np.sin(a), minus), axis=-1) / SQRT2


def _dx_v1(x):
    a = 2 * math.pi * np.asarray(x, dtype=float)
    return -2 * math.pi * np.stack([np.cos(a), np.sin(a), np.zeros_like(a)], axis=-1)


def _dx_normal(x):
    a = 2 * math.pi * np.asarray(x, dtype=float)
    return 2 * math.pi * np.stack([-np.sin(a), np.cos(a), np.zeros_like(a)], axis=-1) / SQRT2


def cone_formal_solution(x: float, y: float) -> Jet:
    L = np.column_stack([v1_field(x, y), cone_d2(x, y)])
    return Jet(DomainPoint(x, y), cone_map(x, y), L)


def cone_pattern_params(y: float, eta: float) -> pat.PatternParams:
    if abs(y) >= Y_BOUND:
        raise OutOfSubsolution(f"|y| = {abs(y)} must be below 1/(sqrt(2) pi) = {Y_BOUND:.6f}")
    return pat.PatternParams(eta, math.acos(SQRT2_PI * y), 0.5)


def cone_loop(x, y: float, eta: float, t):
    """gamma(x, y, t) = (cos g + eta cos(theta)) v1 + sin g n, theta = arccos(sqrt(2) pi y)."""
    p = cone_pattern_params(y, eta)
    z = np.asarray(pat.shape(p, t).z)
    return z.real[..., None] * v1_field(x, y) + z.imag[..., None] * normal_field(x, y)


def cone_subsolution(eta: float, eps: float) -> Subsolution:
    """The cone formal solution packaged for the generic corrugation path."""
    return Subsolution(
        base_map=lambda p: cone_map(p.x1, p.x2),
        jet=lambda p: cone_formal_solution(p.x1, p.x2),
        g=np.eye(2),
        eps=eps,
        u_index=1,
        axis_order=AxisOrder.TANGENT_FIRST,
        eta=eta,
        base_derivative=lambda p: cone_d1(p.x1, p.x2),
    )


@dataclass(frozen=True)
class ConeConfig:
    N: int
    eta: float = 0.2
    eps: float = 0.5
    grid: tuple[int, int] | None = None  # (n_x, n_y); default (40 N, 100)
    y_range: tuple[float, float] = (-0.1, 0.1)
    threads: int = 1

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N <= 0:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        if not 0.0 < self.eta < 0.5:
            raise ValueError(f"eta must lie in (0, 1/2), got {self.eta}")
        if not self.eps > self.eta:
            raise ValueError(f"eps must exceed eta (eta={self.eta}, eps={self.eps})")
        if self.grid is None:
            object.__setattr__(self, "grid", (40 * self.N, 100))
        nx, ny = self.grid
        if nx < 8 * self.N:
            raise ValueError(f"grid needs at least 8 N = {8 * self.N} columns, got {nx}")
        if ny < 1:
            raise ValueError("grid needs at least one row interval")
        lo, hi = self.y_range
        if not lo < hi:
            raise ValueError("y_range must be increasing")
        if max(abs(lo), abs(hi)) >= Y_BOUND:
            raise OutOfSubsolution(f"y_range {self.y_range} leaves the subsolution region |y| < 1/(sqrt(2) pi) = {Y_BOUND:.6f}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class MapSample:
    """f1 on the grid x_i = i / n_x (i < n_x), y_j = lo + j (hi - lo) / n_y (j <= n_y).

    Arrays are indexed ``[j, i, :]`` (row = y, column = x).
    """

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    base: np.ndarray
    gamma: np.ndarray = field(repr=False)


@dataclass
class DefectReport:
    N: int
    eta: float
    eps: float
    grid: list[int]
    max_e11: float
    max_e12: float
    max_e22: float
    c0_distance: float
    min_immersion_margin: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "DefectReport":
        d = json.loads(text)
        return cls(**d)

    @property
    def max_defect(self) -> float:
        return max(self.max_e11, self.max_e12, self.max_e22)


@dataclass
class _Row:
    f1: np.ndarray
    f0: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    gamma: np.ndarray


def corrugated_row(x: np.ndarray, y: float, N: float, eta: float, theta_step: float = 1e-6) -> _Row:
    """f1 and its analytic partial derivatives along one row y = const."""
    p = cone_pattern_params(y, eta)
    t = N * x
    z = np.asarray(pat.shape(p, t).z)
    C = np.asarray(pat.shape_primitive(p, t))
    dC = np.asarray(pat.shape_primitive_dtheta(p, t, theta_step))
    dtheta_dy = -SQRT2_PI / math.sqrt(1.0 - (SQRT2_PI * y) ** 2)

    v1 = v1_field(x, y)
    n = normal_field(x, y)
    f0 = cone_map(x, y)
    gamma = z.real[:, None] * v1 + z.imag[:, None] * n
    f1 = f0 + (C.real[:, None] * v1 + C.imag[:, None] * n) / N
    d1 = gamma + (C.real[:, None] * _dx_v1(x) + C.imag[:, None] * _dx_normal(x)) / N
    # frames do not depend on y; only the pattern parameter theta(y) does
    dCy = dC * dtheta_dy
    d2 = cone_d2(x, y) + (dCy.real[:, None] * v1 + dCy.imag[:, None] * n) / N
    return _Row(f1, f0, d1, d2, gamma)


def corrugated_point(x: float, y: float, N: float, eta: float) -> np.ndarray:
    return corrugated_row(np.array([x]), y, N, eta).f1[0]


def _grid_axes(cfg: ConeConfig) -> tuple[np.ndarray, np.ndarray]:
    nx, ny = cfg.grid
    x = np.arange(nx) / nx
    lo, hi = cfg.y_range
    y = lo + (hi - lo) * np.arange(ny + 1) / ny
    return x, y


def sample_surface(cfg: ConeConfig) -> MapSample:
    x, y = _grid_axes(cfg)
    work = lambda yj: corrugated_row(x, float(yj), cfg.N, cfg.eta)
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            rows = list(pool.map(work, y))
    else:
        rows = [work(yj) for yj in y]
    if cfg.y_range[0] < 0.0:
        log.info("loop offset uses signed eta cos(theta); it differs in sign from eta |d1 f0| for y < 0")
    stack = lambda name: np.stack([getattr(r, name) for r in rows])
    return MapSample(x, y, stack("f1"), stack("d1"), stack("d2"), stack("f0"), stack("gamma"))


def defect_report(cfg: ConeConfig, sample: MapSample) -> DefectReport:
    d1, d2 = sample.d1, sample.d2
    e11 = 1.0 - np.einsum("...k,...k", d1, d1)
    e12 = -np.einsum("...k,...k", d1, d2)
    e22 = 1.0 - np.einsum("...k,...k", d2, d2)
    c0 = np.linalg.norm(sample.values - sample.base, axis=-1)
    margin = np.linalg.norm(np.cross(d1, d2), axis=-1)
    return DefectReport(
        N=cfg.N,
        eta=float(cfg.eta),
        eps=float(cfg.eps),
        grid=list(cfg.grid),
        max_e11=float(np.max(np.abs(e11))),
        max_e12=float(np.max(np.abs(e12))),
        max_e22=float(np.max(np.abs(e22))),
        c0_distance=float(np.max(c0)),
        min_immersion_margin=float(np.min(margin)),
    )


def build_cone_surface(cfg: ConeConfig) -> tuple[MapSample, DefectReport]:
    sample = sample_surface(cfg)
    return sample, defect_report(cfg, sample)


def seam_mismatch(cfg: ConeConfig) -> float:
    """max_y |f1(1, y) - f1(0, y)| evaluated without reducing x modulo 1."""
    _, y = _grid_axes(cfg)
    out = 0.0
    for yj in y:
        row = corrugated_row(np.array([0.0, 1.0]), float(yj), cfg.N, cfg.eta)
        out = max(out, float(np.linalg.norm(row.f1[1] - row.f1[0])))
    return out


def max_second_difference(sample: MapSample) -> float:
    """Largest |f(x+h) - 2 f(x) + f(x-h)| along x over the periodic grid."""
    f = sample.values
    dd = np.roll(f, -1, axis=1) - 2 * f + np.roll(f, 1, axis=1)
    return float(np.max(np.linalg.norm(dd, axis=-1)))


def corrugation_sign_changes(sample: MapSample, row: int) -> int:
    """Sign changes of <d1 f1 - d1 f0, v1> around the closed row ``row``."""
    x, y = sample.x, sample.y[row]
    s = np.einsum("ik,ik->i", sample.d1[row] - cone_d1(x, y), v1_field(x, y))
    sgn = np.sign(s)
    sgn = sgn[sgn != 0]
    return int(np.count_nonzero(sgn != np.roll(sgn, 1)))


def fd_crosscheck(cfg: ConeConfig, sample: MapSample, fraction: float = 0.01, seed: int = 0, step: float = 1e-7) -> float:
    """Max deviation between analytic and finite-difference partials on a random subset."""
    rng = np.random.default_rng(seed)
    ny1, nx = sample.values.shape[:2]
    count = max(1, int(fraction * nx * ny1))
    js = rng.integers(0, ny1, count)
    is_ = rng.integers(0, nx, count)
    lo, hi = cfg.y_range
    worst = 0.0
    for j, i in zip(js, is_):
        x, y = sample.x[i], sample.y[j]
        xs = np.array([x - step, x + step])
        fx = corrugated_row(xs, y, cfg.N, cfg.eta).f1
        d1 = (fx[1] - fx[0]) / (2 * step)
        yp, ym = min(y + step, hi), max(y - step, lo)
        fy = [corrugated_row(np.array([x]), v, cfg.N, cfg.eta).f1[0] for v in (ym, yp)]
        d2 = (fy[1] - fy[0]) / (yp - ym)
        worst = max(worst, float(np.linalg.norm(d1 - sample.d1[j, i])), float(np.linalg.norm(d2 - sample.d2[j, i])))
    return worst
