"""Multi-start maximization of total MUB entropy over pure states.

Each restart runs Nelder-Mead on a real chart of the unit sphere (global
phase removed). Even-numbered restarts start from a scrambled Halton point
of the chart's parameter box; odd-numbered ones from a Haar-random vector
drawn from PRNG stream ``(seed, restart index)``. Restart ``i`` therefore
does the same work whatever the total restart count or worker layout, and
the best restart (ties to the lowest index) is identical serially and in
parallel.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import entr
from scipy.stats import qmc

from .bounds import h_t_plus
from .errors import DimensionError
from .measure import ProbabilityTable, outcome_probabilities, probabilities, total_entropy
from .mub import MubSet
from .numerics import check_unit
from .serialize import dumps17
from .state import DensityMatrix, density_to_dict, pure_vector_d2, pure_vector_d3, random_pure_vector

VERDICT_COHERENT = "coherent-state-found"
VERDICT_BOUND = "bound-not-exceeded"
VERDICT_INCONCLUSIVE = "inconclusive"


# -- charts -----------------------------------------------------------------------

def _fix_global_phase(psi: np.ndarray) -> np.ndarray:
    c = psi[0]
    if abs(c) > 0:
        psi = psi * (np.conj(c) / abs(c))
    return psi


class GenericChart:
    """2d-2 real parameters: d-1 hyperspherical angles for the moduli and
    d-1 relative phases; the first amplitude is real."""

    name = "generic"

    def __init__(self, d: int):
        self.d = d
        self.n_params = 2 * d - 2

    def to_vector(self, x: np.ndarray) -> np.ndarray:
        d = self.d
        theta, phases = x[: d - 1], x[d - 1 :]
        mags = np.empty(d)
        s = 1.0
        for i in range(d - 1):
            mags[i] = s * math.cos(theta[i])
            s *= math.sin(theta[i])
        mags[-1] = s
        psi = mags.astype(complex)
        psi[1:] *= np.exp(1j * phases)
        return psi

    def from_vector(self, psi: np.ndarray) -> np.ndarray:
        psi = _fix_global_phase(np.asarray(psi, dtype=complex))
        mags = np.abs(psi)
        tails = np.sqrt(np.cumsum((mags**2)[::-1])[::-1])
        theta = np.arctan2(tails[1:], mags[:-1])
        return np.concatenate([theta, np.angle(psi[1:])])

    def from_unit_cube(self, u: np.ndarray) -> np.ndarray:
        d = self.d
        return np.concatenate([u[: d - 1] * (np.pi / 2), u[d - 1 :] * (2 * np.pi)])


class QubitAmplitudeChart:
    """(t, phi) with r = sin^2 t; amplitudes as in :func:`pure_vector_d2`."""

    name = "amplitude"
    d = 2
    n_params = 2

    def to_vector(self, x):
        return pure_vector_d2(math.sin(x[0]) ** 2, x[1])

    def from_vector(self, psi):
        psi = _fix_global_phase(np.asarray(psi, dtype=complex))
        r = min(abs(psi[0]) ** 2, 1.0)
        return np.array([math.asin(math.sqrt(r)), -np.angle(psi[1])])

    def from_unit_cube(self, u):
        return np.array([u[0] * np.pi / 2, u[1] * 2 * np.pi])

    @staticmethod
    def named_params(x) -> dict:
        return {"r": math.sin(x[0]) ** 2, "phi": float(x[1]) % (2 * np.pi)}


class QutritAmplitudeChart:
    """(a, b, phi1, phi2) with r = cos^2 a, q = sin^2 a cos^2 b."""

    name = "amplitude"
    d = 3
    n_params = 4

    @staticmethod
    def _rq(x):
        sa = math.sin(x[0]) ** 2
        return 1.0 - sa, sa * math.cos(x[1]) ** 2

    def to_vector(self, x):
        r, q = self._rq(x)
        return pure_vector_d3(r, q, x[2], x[3])

    def from_vector(self, psi):
        psi = _fix_global_phase(np.asarray(psi, dtype=complex))
        m = np.abs(psi)
        a = math.atan2(math.hypot(m[1], m[2]), m[0])
        b = math.atan2(m[2], m[1])
        return np.array([a, b, np.angle(psi[1]), np.angle(psi[2])])

    def from_unit_cube(self, u):
        return np.array([u[0] * np.pi / 2, u[1] * np.pi / 2, u[2] * 2 * np.pi, u[3] * 2 * np.pi])

    def named_params(self, x) -> dict:
        r, q = self._rq(x)
        return {"r": r, "q": q, "phi1": float(x[2]) % (2 * np.pi), "phi2": float(x[3]) % (2 * np.pi)}


def make_chart(name: str, d: int):
    if name == "generic":
        return GenericChart(d)
    if name == "amplitude":
        if d == 2:
            return QubitAmplitudeChart()
        if d == 3:
            return QutritAmplitudeChart()
        raise DimensionError("the amplitude charts exist only for d = 2 and d = 3")
    raise ValueError(f"unknown chart {name!r}")


# -- configuration and results ------------------------------------------------------

@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 128
    max_iterations: int = 2000
    convergence_tol: float = 1e-12
    seed: int = 42
    parallel: bool = False
    workers: int | None = None
    chart: str = "generic"
    # defect-refinement stage of the coherent-state search
    defect_tol: float = 1e-15

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.convergence_tol <= 0:
            raise ValueError("convergence_tol must be positive")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")


@dataclass(frozen=True)
class SearchResult:
    best_value: float
    best_state: DensityMatrix
    best_table: ProbabilityTable
    best_vector: np.ndarray
    restarts_run: int
    converged_fraction: float
    best_restart: int
    values: tuple[float, ...] = field(repr=False)
    best_params: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "best_value": self.best_value,
            "restarts_run": self.restarts_run,
            "converged_fraction": self.converged_fraction,
            "best_restart": self.best_restart,
            "best_table": self.best_table.p,
            "best_state": density_to_dict(self.best_state),
        }
        if self.best_params is not None:
            out["best_params"] = self.best_params
        return out

    def to_json(self) -> str:
        return dumps17(self.to_dict())


@dataclass(frozen=True)
class ExtendibilityReport:
    n_bases: int
    dim: int
    n_ln_d: float
    h_t_plus_pure: float
    achieved_max: float
    min_coherence_defect: float
    verdict: str
    maximizer: SearchResult = field(repr=False)
    coherent_state: DensityMatrix = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "n_bases": self.n_bases,
            "dim": self.dim,
            "n_ln_d": self.n_ln_d,
            "h_t_plus_pure": self.h_t_plus_pure,
            "achieved_max": self.achieved_max,
            "min_coherence_defect": self.min_coherence_defect,
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return dumps17(self.to_dict())


# -- restart machinery ----------------------------------------------------------------

def _neg_entropy(x, chart, stacked, shape):
    amps = stacked @ chart.to_vector(x)
    p = amps.real**2 + amps.imag**2
    return -float(np.sum(entr(p)))


def _squared_deviation(x, chart, stacked, shape):
    amps = stacked @ chart.to_vector(x)
    p = amps.real**2 + amps.imag**2
    return float(np.sum((p - 1.0 / shape[1]) ** 2))


def _max_deviation(x, chart, stacked, shape):
    amps = stacked @ chart.to_vector(x)
    p = amps.real**2 + amps.imag**2
    return float(np.max(np.abs(p - 1.0 / shape[1])))


_OBJECTIVES = {
    "entropy": _neg_entropy,
    "sq_dev": _squared_deviation,
    "max_dev": _max_deviation,
}


def _nelder_mead(fun, x0, args, maxiter, fatol, xatol=np.inf, step=0.3):
    n = x0.size
    simplex = np.vstack([x0, x0 + step * np.eye(n)])
    return minimize(
        fun,
        x0,
        args=args,
        method="Nelder-Mead",
        options={
            "maxiter": maxiter,
            "fatol": fatol,
            "xatol": xatol,
            "initial_simplex": simplex,
            "adaptive": n > 6,
        },
    )


def _run_restart(task):
    """One restart: returns (objective value, parameters, converged)."""
    stages, chart, stacked, shape, x0 = task
    args = (chart, stacked, shape)
    x = x0
    converged = True
    fun = None
    for kind, maxiter, fatol, xatol, step in stages:
        res = _nelder_mead(_OBJECTIVES[kind], x, args, maxiter, fatol, xatol, step)
        x, fun = res.x, float(res.fun)
        converged = converged and bool(res.success)
    return fun, x, converged


def _start_points(chart, restarts: int, seed: int) -> list[np.ndarray]:
    n_halton = (restarts + 1) // 2
    cube = qmc.Halton(d=chart.n_params, scramble=True, seed=seed).random(n_halton)
    points = []
    for i in range(restarts):
        if i % 2 == 0:
            points.append(chart.from_unit_cube(cube[i // 2]))
        else:
            points.append(chart.from_vector(random_pure_vector(chart.d, seed, stream=i)))
    return points


def _multistart(m: MubSet, cfg: SearchConfig, stages):
    chart = make_chart(cfg.chart, m.dim)
    stacked = np.ascontiguousarray(m.stacked().conj())
    shape = (m.n_bases, m.dim)
    tasks = [(stages, chart, stacked, shape, x0) for x0 in _start_points(chart, cfg.restarts, cfg.seed)]
    if cfg.parallel and cfg.restarts > 1:
        workers = cfg.workers or os.cpu_count() or 1
        chunk = max(1, len(tasks) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_restart, tasks, chunksize=chunk))
    else:
        results = [_run_restart(t) for t in tasks]
    return chart, results


def _best_index(values) -> int:
    best = 0
    for i, v in enumerate(values):
        if v < values[best]:
            best = i
    return best


# -- public operations ---------------------------------------------------------------

def maximize_total_entropy(m: MubSet, cfg: SearchConfig | None = None) -> SearchResult:
    """Largest total entropy over pure states found by the multi-start search."""
    cfg = cfg or SearchConfig()
    stages = (("entropy", cfg.max_iterations, cfg.convergence_tol, np.inf, 0.3),)
    chart, results = _multistart(m, cfg, stages)
    objective = [r[0] for r in results]
    best = _best_index(objective)
    x = results[best][1]
    psi = chart.to_vector(x)
    psi = _fix_global_phase(psi / np.linalg.norm(psi))
    state = DensityMatrix.from_vector(psi)
    table = probabilities(state, m)
    return SearchResult(
        best_value=total_entropy(table),
        best_state=state,
        best_table=table,
        best_vector=psi,
        restarts_run=len(results),
        converged_fraction=sum(r[2] for r in results) / len(results),
        best_restart=best,
        values=tuple(-v for v in objective),
        best_params=chart.named_params(x) if hasattr(chart, "named_params") else None,
    )


def coherence_defect(psi, m: MubSet) -> float:
    """max_{n,k} |p_nk - 1/d| for the pure state psi; zero iff mutually coherent."""
    psi = check_unit(psi)
    if psi.shape[0] != m.dim:
        raise DimensionError(f"psi has length {psi.shape[0]}, bases have d={m.dim}")
    return float(np.max(np.abs(outcome_probabilities(psi, m) - 1.0 / m.dim)))


def find_coherent_state(m: MubSet, cfg: SearchConfig | None = None) -> tuple[DensityMatrix, float]:
    """Pure state closest to mutually coherent, and its coherence defect.

    Each restart first minimizes the summed squared deviation from 1/d and
    then refines on the max-deviation defect itself (the squared sum can be
    constant on pure states, e.g. for a complete qubit set). The restart with
    the smallest defect wins.
    """
    cfg = cfg or SearchConfig()
    stages = (
        ("sq_dev", cfg.max_iterations, cfg.convergence_tol, np.inf, 0.3),
        ("max_dev", cfg.max_iterations, cfg.defect_tol, 1e-13, 0.05),
    )
    chart, results = _multistart(m, cfg, stages)
    best = _best_index([r[0] for r in results])
    psi = chart.to_vector(results[best][1])
    psi = _fix_global_phase(psi / np.linalg.norm(psi))
    return DensityMatrix.from_vector(psi), coherence_defect(psi, m)


def extendibility_report(
    m: MubSet,
    cfg: SearchConfig | None = None,
    *,
    coherent_tol: float = 1e-6,
    separation_tol: float = 1e-3,
    bound_slack: float = 1e-6,
) -> ExtendibilityReport:
    """Search for evidence on whether the N bases extend to N+1.

    ``coherent-state-found`` when a state with defect below ``coherent_tol``
    exists; ``bound-not-exceeded`` when the maximal entropy stays within
    ``bound_slack`` of the pure-state certainty bound and the defect stays
    above ``separation_tol``; ``inconclusive`` otherwise.
    """
    cfg = cfg or SearchConfig()
    result = maximize_total_entropy(m, cfg)
    coherent, defect = find_coherent_state(m, cfg)
    bound = h_t_plus(m.n_bases, m.dim, 1.0)
    if defect < coherent_tol:
        verdict = VERDICT_COHERENT
    elif result.best_value <= bound + bound_slack and defect >= separation_tol:
        verdict = VERDICT_BOUND
    else:
        verdict = VERDICT_INCONCLUSIVE
    return ExtendibilityReport(
        n_bases=m.n_bases,
        dim=m.dim,
        n_ln_d=m.n_bases * math.log(m.dim),
        h_t_plus_pure=bound,
        achieved_max=result.best_value,
        min_coherence_defect=defect,
        verdict=verdict,
        maximizer=result,
        coherent_state=coherent,
    )
