"""Loop pattern c(eta, theta, beta, t) = (exp(i g(t)) + eta cos(theta), 1).

The angular function g is piecewise linear and mirror symmetric,
g(t) = g(1 - t). On [0, 1/2] it ramps 0 -> theta, holds theta, ramps to
2 pi - theta, holds, and ramps to 2 pi. Every ramp has slope 4 pi / eta.
All functions accept scalar or array ``t`` and reduce it modulo 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from corrugate.errors import InvalidParams

TWO_PI = 2.0 * math.pi
MIN_SEGMENT = 1e-15


@dataclass(frozen=True)
class AngularBreakpoints:
    t: np.ndarray
    value: np.ndarray


@dataclass(frozen=True)
class PatternValue:
    z: complex | np.ndarray
    s: float = 1.0


@dataclass(frozen=True)
class PatternParams:
    eta: float
    theta: float
    beta: float

    def __post_init__(self):
        eta, theta, beta = float(self.eta), float(self.theta), float(self.beta)
        if not 0.0 < eta < 0.5:
            raise InvalidParams(f"eta must lie in (0, 1/2), got {eta}")
        if not 0.0 <= theta <= math.pi:
            raise InvalidParams(f"theta must lie in [0, pi], got {theta}")
        if not eta <= beta <= 1.0 - eta:
            raise InvalidParams(f"beta must lie in [eta, 1 - eta] = [{eta}, {1 - eta}], got {beta}")
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "beta", beta)

    @property
    def beta_prime(self) -> float:
        return self.beta - self.eta / 2.0

    @cached_property
    def breakpoints(self) -> AngularBreakpoints:
        return angular_breakpoints(self)

    @cached_property
    def _segments(self):
        bp = self.breakpoints
        t0, t1 = bp.t[:-1], bp.t[1:]
        g0, g1 = bp.value[:-1], bp.value[1:]
        dt = t1 - t0
        slope = (g1 - g0) / dt
        # integral of exp(i g) over each full segment, in sinc form so flat and tiny ramps stay finite
        seg = dt * np.exp(0.5j * (g0 + g1)) * np.sinc((g1 - g0) / TWO_PI)
        cum = np.concatenate([[0.0 + 0.0j], np.cumsum(seg)])
        return t0, g0, slope, cum

    @cached_property
    def mean_exp(self) -> complex:
        """Average of exp(i g) over one period."""
        return (
            self.beta * np.exp(1j * self.theta)
            + (1.0 - self.beta) * np.exp(-1j * self.theta)
            - self.eta * math.cos(self.theta)
        )


def angular_breakpoints(p: PatternParams) -> AngularBreakpoints:
    eta, th = p.eta, p.theta
    half_t = [
        0.0,
        eta * th / (4 * math.pi),
        p.beta_prime / 2 + eta * th / (4 * math.pi),
        p.beta_prime / 2 + eta * (TWO_PI - th) / (4 * math.pi),
        0.5 - eta * th / (4 * math.pi),
        0.5,
    ]
    half_g = [0.0, th, th, TWO_PI - th, TWO_PI - th, TWO_PI]
    t = half_t + [1.0 - s for s in reversed(half_t[:-1])]
    g = half_g + list(reversed(half_g[:-1]))
    t = np.array(t)
    g = np.array(g)
    # segments shorter than MIN_SEGMENT carry a jump below slope * MIN_SEGMENT
    keep = np.concatenate([[True], np.diff(t) > MIN_SEGMENT])
    keep[-1] = True
    if len(t) > 1 and t[-1] - t[keep][-2] <= MIN_SEGMENT:
        keep[np.flatnonzero(keep)[-2]] = False
    return AngularBreakpoints(t[keep], g[keep])


def _segment_index(p: PatternParams, tm: np.ndarray) -> np.ndarray:
    t0 = p._segments[0]
    return np.clip(np.searchsorted(t0, tm, side="right") - 1, 0, len(t0) - 1)


def angular_function(p: PatternParams, t):
    tm = np.mod(np.asarray(t, dtype=float), 1.0)
    t0, g0, slope, _ = p._segments
    idx = _segment_index(p, tm)
    out = g0[idx] + slope[idx] * (tm - t0[idx])
    return out if out.ndim else float(out)


def shape(p: PatternParams, t) -> PatternValue:
    z = np.exp(1j * angular_function(p, t)) + p.eta * math.cos(p.theta)
    return PatternValue(z if np.ndim(z) else complex(z), 1.0)


def shape_average(p: PatternParams) -> PatternValue:
    z = p.beta * np.exp(1j * p.theta) + (1.0 - p.beta) * np.exp(-1j * p.theta)
    return PatternValue(complex(z), 1.0)


def shape_primitive(p: PatternParams, t):
    """Periodic primitive int_0^t c(s) - mean(c) ds of the planar component.

    Exact per-segment antiderivatives of exp(i g); the third component of c
    is constant so its primitive vanishes identically.
    """
    t = np.asarray(t, dtype=float)
    tm = np.mod(t, 1.0)
    t0, g0, slope, cum = p._segments
    idx = _segment_index(p, tm)
    s = tm - t0[idx]
    dg = slope[idx] * s
    partial = s * np.exp(1j * (g0[idx] + 0.5 * dg)) * np.sinc(dg / TWO_PI)
    out = cum[idx] + partial - tm * p.mean_exp
    return out if out.ndim else complex(out)


def shape_primitive_dtheta(p: PatternParams, t, step: float = 1e-6):
    """d/dtheta of shape_primitive by central differences (C^1 in theta)."""
    lo = max(p.theta - step, 0.0)
    hi = min(p.theta + step, math.pi)
    plo = PatternParams(p.eta, lo, p.beta)
    phi = PatternParams(p.eta, hi, p.beta)
    return (shape_primitive(phi, t) - shape_primitive(plo, t)) / (hi - lo)
