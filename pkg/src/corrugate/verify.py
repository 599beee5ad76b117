"""Seeded property checks over random instances of the cone configuration."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from corrugate import cone
from corrugate import pattern as pat
from corrugate.corrugation import CorrugationConfig, corrugate_analytic, corrugate_generic
from corrugate.jets import DomainPoint, Jet, metric_defect
from corrugate.surrounding import AxisOrder, SurroundingInput, SurroundingLoop, build_loop, normalize_w

FAULTS = ("rmin-sign",)


@dataclass
class Instance:
    jet: Jet        # normalized: proj_P L(u) = proj_P w
    w: np.ndarray
    eps: float
    loop: SurroundingLoop
    holonomic: bool  # True when w = d1 f0 of the cone itself


def random_instance(rng: np.random.Generator, cone_case: bool = False) -> Instance:
    """A jet of the cone formal solution with a random admissible average w.

    Generic instances shift w off P_u by less than eps/2 along L(d2) and pick
    its in-plane part uniformly in 90% of the convex-hull disk, then apply the
    normalizing homotopy. Cone-case instances use w = d1 f0 and put the real
    axis of the pattern along v1, as in the explicit cone loop.
    """
    x = rng.uniform(0.0, 1.0)
    y = rng.uniform(-0.1, 0.1)
    eps = rng.uniform(0.05, 0.3)
    sigma = cone.cone_formal_solution(x, y)
    if cone_case:
        w = cone.cone_d1(x, y)
    else:
        k = sigma.column(2)
        a = rng.uniform(-0.5, 0.5) * eps
        r_max = math.sqrt((1.0 + eps) ** 2 - a * a)
        rho = 0.9 * r_max * math.sqrt(rng.uniform())
        phi = rng.uniform(0.0, 2 * math.pi)
        w = a * k + rho * (math.cos(phi) * cone.normal_field(x, y) + math.sin(phi) * cone.v1_field(x, y))
    jet = normalize_w(sigma, w).jet
    order = AxisOrder.TANGENT_FIRST if cone_case else AxisOrder.NORMAL_FIRST
    loop = build_loop(SurroundingInput(jet, w, np.eye(2), eps), order)
    return Instance(jet, np.asarray(w, dtype=float), eps, loop, cone_case)


def quadrature_average(loop: SurroundingLoop, order: int = 24) -> np.ndarray:
    """Mean of the loop by Gauss-Legendre on each piece where it is smooth."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    knots = loop.pattern.breakpoints.t
    a, b = knots[:-1], knots[1:]
    half = 0.5 * (b - a)
    t = (0.5 * (a + b))[:, None] + half[:, None] * nodes
    vals = loop(t.ravel()).reshape(t.shape + (3,))
    return np.einsum("ij,ijk->k", half[:, None] * weights, vals)


def check_loop_average(seed: int = 0, count: int = 1000, tol: float = 1e-8) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        inst = random_instance(rng)
        worst = max(worst, float(np.linalg.norm(quadrature_average(inst.loop) - inst.w)))
    return {"name": "loop_average", "passed": worst < tol, "max_error": worst, "tol": tol, "count": count}


def _annulus(inst: Instance, fault: str | None) -> tuple[float, float]:
    geo = inst.loop.geometry
    if fault == "rmin-sign":
        pw2 = float(geo.frame.plane_offset @ geo.frame.plane_offset)
        return math.sqrt(max((1.0 + inst.eps) ** 2 - pw2, 0.0)), geo.r_max
    return geo.r_min, geo.r_max


def check_containment(seed: int = 0, instances: int = 100, samples: int = 1000, fault: str | None = None) -> dict:
    """Loop samples lie in the slice annulus; cone-case samples also have defect < eps."""
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    rng = np.random.default_rng(seed)
    outside = 0
    defect_violations = 0
    worst_defect_ratio = 0.0
    for i in range(instances):
        inst = random_instance(rng, cone_case=bool(i % 2))
        geo = inst.loop.geometry
        pts = inst.loop(rng.uniform(0.0, 1.0, samples))
        rel = pts - geo.frame.plane_offset
        off = rel @ geo.p_direction
        radial = np.linalg.norm(rel - off[:, None] * geo.p_direction, axis=1)
        r_min, r_max = _annulus(inst, fault)
        outside += int(np.count_nonzero((np.abs(off) > 1e-9) | (radial <= r_min) | (radial >= r_max)))
        if inst.holonomic:
            for v in pts:
                d = metric_defect(np.eye(2), inst.jet.replace_column(1, v).L)
                worst_defect_ratio = max(worst_defect_ratio, d / inst.eps)
                defect_violations += d >= inst.eps
    total = instances * samples
    return {
        "name": "containment",
        "passed": outside == 0 and defect_violations == 0,
        "samples": total,
        "outside_annulus": outside,
        "defect_violations": int(defect_violations),
        "max_defect_over_eps": worst_defect_ratio,
    }


def rate_sups(N: int, eta: float = 0.2, ny: int = 20) -> dict:
    """sup |f1 - f0|, sup |d2 f1 - d2 f0| and sup |d1 f1 - gamma(., N .)| on the cone."""
    cfg = cone.ConeConfig(N=N, eta=eta, eps=max(0.5, 2 * eta), grid=(40 * N, ny))
    s = cone.sample_surface(cfg)
    d2f0 = cone.cone_d2(s.x[None, :], s.y[:, None])
    return {
        "c0": float(np.max(np.linalg.norm(s.values - s.base, axis=-1))),
        "d2": float(np.max(np.linalg.norm(s.d2 - d2f0, axis=-1))),
        "d1": float(np.max(np.linalg.norm(s.d1 - s.gamma, axis=-1))),
    }


def check_rates(Ns=(50, 100, 200), eta: float = 0.2) -> dict:
    sups = {N: rate_sups(N, eta) for N in Ns}
    ratios = {key: [sups[b][key] / sups[a][key] for a, b in zip(Ns, Ns[1:])] for key in ("c0", "d2", "d1")}
    bands = {"c0": (0.45, 0.55), "d2": (0.4, 0.6), "d1": (0.4, 0.6)}
    passed = all(lo <= r <= hi for key, (lo, hi) in bands.items() for r in ratios[key])
    return {"name": "rates", "passed": passed, "N": list(Ns), "ratios": ratios}


def check_oracle(seed: int = 0, count: int = 1000, N: int = 6, eta: float = 0.2, tol: float = 1e-6) -> dict:
    rng = np.random.default_rng(seed)
    sub = cone.cone_subsolution(eta, eps=0.5)
    cfg = CorrugationConfig(N=N)
    f0 = lambda p: cone.cone_map(p.x1, p.x2)
    worst = 0.0
    for _ in range(count):
        p = DomainPoint(rng.uniform(0.0, 1.0), rng.uniform(-0.1, 0.1))
        params = cone.cone_pattern_params(p.x2, eta)
        v1, n = cone.v1_field(p.x1), cone.normal_field(p.x1)

        def gamma(_, t):
            z = pat.shape(params, t).z
            return z.real * v1 + z.imag * n

        kinks = lambda _: params.breakpoints.t[1:-1]
        a = corrugate_analytic(sub, cfg, p)
        b = corrugate_generic(f0, gamma, cfg, p, kinks=kinks)
        worst = max(worst, float(np.linalg.norm(a - b)))
    return {"name": "oracle_equivalence", "passed": worst < tol, "max_error": worst, "tol": tol, "count": count}


def run_all(seed: int = 0, fault: str | None = None, quick: bool = True) -> dict:
    n = 200 if quick else 1000
    checks = [
        check_loop_average(seed, count=n),
        check_containment(seed, instances=n // 10 if quick else 100, fault=fault),
        check_rates(),
        check_oracle(seed, count=n // 2 if quick else 1000),
    ]
    return {"seed": seed, "fault": fault, "passed": all(c["passed"] for c in checks), "checks": checks}
