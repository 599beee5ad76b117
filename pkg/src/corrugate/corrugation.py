"""The Corrugation Process

    f1(x) = f0(x) + (1/N) int_0^{N x_j} gamma(x, s) - mean(gamma)(x) ds

in a generic quadrature form and in the closed form available for
pattern-shaped loop families. The integrand is mean free and 1-periodic, so
the integral over [0, N x_j] equals the periodic primitive at frac(N x_j).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from corrugate import pattern as pat
from corrugate.errors import QuadratureFailure
from corrugate.jets import DomainPoint, Jet
from corrugate.surrounding import AxisOrder, SurroundingInput, SurroundingLoop, build_loop

Map = Callable[[DomainPoint], np.ndarray]
LoopFn = Callable[[DomainPoint, float], np.ndarray]


@dataclass(frozen=True)
class CorrugationConfig:
    N: float
    direction: int = 1
    quadrature_nodes: int = 200  # subinterval budget of the adaptive quadrature

    def __post_init__(self):
        if not self.N > 0:
            raise ValueError(f"N must be positive, got {self.N}")
        if self.direction not in (1, 2):
            raise ValueError(f"direction must be 1 or 2, got {self.direction}")
        if self.quadrature_nodes < 64:
            raise ValueError("quadrature_nodes must be at least 64")

    def phase(self, x: DomainPoint) -> float:
        xj = x.x1 if self.direction == 1 else x.x2
        return self.N * xj


def _quad(fn, a: float, b: float, cfg: CorrugationConfig, tol: float, points=()) -> np.ndarray:
    if b == a:
        return np.zeros(3)
    inner = [p for p in points if a < p < b] or None
    val, err = integrate.quad_vec(fn, a, b, epsabs=tol, epsrel=0.0, limit=cfg.quadrature_nodes, points=inner)
    if not np.all(np.isfinite(val)) or err > 10 * tol:
        raise QuadratureFailure(f"quadrature on [{a}, {b}] stalled with error estimate {err:.2e}")
    return np.asarray(val, dtype=float)


def corrugate_generic(
    f0: Map,
    gamma: LoopFn,
    cfg: CorrugationConfig,
    x: DomainPoint,
    tol: float = 1e-11,
    kinks: Callable[[DomainPoint], Sequence[float]] | None = None,
) -> np.ndarray:
    """Corrugation by adaptive quadrature of an arbitrary loop family.

    ``kinks(x)`` may list the parameters in [0, 1) where t -> gamma(x, t)
    fails to be smooth; the quadrature then splits there.
    """
    loop = lambda s: np.asarray(gamma(x, s), dtype=float)
    points = list(kinks(x)) if kinks is not None else []
    mean = _quad(loop, 0.0, 1.0, cfg, tol, points)
    frac = cfg.phase(x) % 1.0
    prim = _quad(lambda s: loop(s) - mean, 0.0, frac, cfg, tol, points)
    return np.asarray(f0(x), dtype=float) + prim / cfg.N


@dataclass(frozen=True)
class Subsolution:
    """A formal solution x -> (x, f0(x), L(x)) plus the data needed to corrugate it.

    ``eta`` fixes the pattern width instead of deriving it from the slice.
    """

    base_map: Map
    jet: Callable[[DomainPoint], Jet]
    g: np.ndarray
    eps: float
    u_index: int = 1
    axis_order: AxisOrder = AxisOrder.NORMAL_FIRST
    eta: float | None = None
    base_derivative: Callable[[DomainPoint], np.ndarray] | None = None

    def derivative_u(self, x: DomainPoint) -> np.ndarray:
        if self.base_derivative is not None:
            return np.asarray(self.base_derivative(x), dtype=float)
        return derivative_along(self.base_map, x, self.u_index)

    def loop_at(self, x: DomainPoint) -> SurroundingLoop:
        inp = SurroundingInput(self.jet(x), self.derivative_u(x), self.g, self.eps, self.u_index)
        return build_loop(inp, self.axis_order, self.eta)

    def loop_family(self) -> LoopFn:
        return lambda x, t: self.loop_at(x)(t)


def corrugate_analytic(sub: Subsolution, cfg: CorrugationConfig, x: DomainPoint) -> np.ndarray:
    """f1(x) = f0(x) + (1/N) sum_i C_i(a(x), N pi(x)) e_i(x)."""
    loop = sub.loop_at(x)
    C = pat.shape_primitive(loop.pattern, cfg.phase(x))
    return np.asarray(sub.base_map(x), dtype=float) + (C.real * loop.e1 + C.imag * loop.e2) / cfg.N


def derivative_along(f: Map, x: DomainPoint, direction: int, step: float = 1e-6) -> np.ndarray:
    if not step > 0:
        raise ValueError("step must be positive")
    dx = (step, 0.0) if direction == 1 else (0.0, step)
    # DomainPoint wraps x1, so f must be 1-periodic in x1
    xp = DomainPoint(x.x1 + dx[0], x.x2 + dx[1])
    xm = DomainPoint(x.x1 - dx[0], x.x2 - dx[1])
    fp = np.asarray(f(xp), dtype=float)
    fm = np.asarray(f(xm), dtype=float)
    return (fp - fm) / (2.0 * step)


def update_formal_solution(L0, df1_u, u_index: int = 1) -> np.ndarray:
    """L1 = L0 + (df1(u) - L0(u)) (x) dpi, with dpi = dx_u."""
    L1 = np.array(L0, dtype=float, copy=True)
    L1[:, u_index - 1] = np.asarray(df1_u, dtype=float)
    return L1


def rate_ratio(sup_n: float, sup_2n: float) -> float:
    """Ratio of a measured sup at 2N to the one at N (0.5 for an O(1/N) quantity)."""
    return sup_2n / sup_n if sup_n else math.nan
