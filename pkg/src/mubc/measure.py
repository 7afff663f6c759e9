"""Measurement statistics for MUB measurements.

Probability tables, Shannon entropies (nats), observable purities, the
purity-sum identity for MUB-diagonal states, the ``p = T lambda`` expansion
map, and the closed-form qubit/qutrit tables used as an independent oracle
on the trace pipeline.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, MubcError
from .mub import MubSet
from .serialize import fmt17
from .state import DensityMatrix, PureStateParamsD2, PureStateParamsD3, purity

PROB_TOL = 1e-12
ROW_SUM_TOL = 1e-10
EQUALITY_TOL = 1e-9
INEQUALITY_TOL = 1e-10


@dataclass(frozen=True)
class ProbabilityTable:
    """``p[n, k]``: probability of outcome k for basis n.

    ``clamped`` records that tiny negative roundoff was set to zero.
    """

    p: np.ndarray
    clamped: bool = False

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 2:
            raise DimensionError(f"probability table must be 2-d, got shape {p.shape}")
        if np.any(p < -PROB_TOL) or np.any(p > 1 + PROB_TOL):
            raise MubcError("probability entries outside [0, 1]")
        sums = p.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
            raise MubcError(f"rows do not sum to one (worst {np.max(np.abs(sums - 1)):.3e})")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def shape(self) -> tuple[int, int]:
        return self.p.shape


def _as_array(t) -> np.ndarray:
    return t.p if isinstance(t, ProbabilityTable) else np.asarray(t, dtype=float)


def outcome_probabilities(psi: np.ndarray, m: MubSet) -> np.ndarray:
    """Raw ``(N, d)`` probabilities of a pure state vector (no validation)."""
    amps = m.stacked().conj() @ psi
    return (amps.real**2 + amps.imag**2).reshape(m.n_bases, m.dim)


def probabilities(rho: DensityMatrix, m: MubSet) -> ProbabilityTable:
    if rho.dim != m.dim:
        raise DimensionError(f"state has d={rho.dim}, bases have d={m.dim}")
    vecs = m.stacked()
    p = np.real(np.einsum("ai,ij,aj->a", vecs.conj(), rho.mat, vecs)).reshape(m.n_bases, m.dim)
    if np.any(p < -PROB_TOL):
        raise MubcError(f"negative probability {p.min():.3e}; inconsistent state or bases")
    clamped = bool(np.any(p < 0))
    if clamped:
        p = np.where(p < 0, 0.0, p)
    return ProbabilityTable(p, clamped)


def shannon_entropy(row) -> float:
    """-sum p ln p in nats, with 0 ln 0 = 0."""
    row = np.asarray(row, dtype=float)
    if np.any(row < -PROB_TOL):
        raise MubcError("negative probability in distribution")
    if abs(row.sum() - 1.0) > ROW_SUM_TOL:
        raise MubcError(f"distribution sums to {row.sum()!r}")
    pos = row[row > 0]
    return float(-np.sum(pos * np.log(pos)))


def total_entropy(t) -> float:
    return float(sum(shannon_entropy(row) for row in _as_array(t)))


def purities(t) -> np.ndarray:
    """Observable purities C_n = sum_k p_nk^2."""
    return np.sum(_as_array(t) ** 2, axis=1)


@dataclass(frozen=True)
class PuritySumReport:
    total: float
    purity: float
    equality_rhs: float
    inequality_rhs: float
    inequality_slack: float
    equality_holds: bool

    @property
    def inequality_holds(self) -> bool:
        return self.inequality_slack <= INEQUALITY_TOL

    @property
    def equality_deviation(self) -> float:
        return abs(self.total - self.equality_rhs)


def purity_sum_check(rho: DensityMatrix, m: MubSet) -> PuritySumReport:
    """Compare sum_n C_n with tr(rho^2) + (N-1)/d and tr(rho^2) + 1."""
    table = probabilities(rho, m)
    total = float(np.sum(purities(table)))
    pi = purity(rho)
    eq_rhs = pi + (m.n_bases - 1) / m.dim
    ineq_rhs = pi + 1.0
    return PuritySumReport(
        total=total,
        purity=pi,
        equality_rhs=eq_rhs,
        inequality_rhs=ineq_rhs,
        inequality_slack=total - ineq_rhs,
        equality_holds=abs(total - eq_rhs) < EQUALITY_TOL,
    )


@dataclass(frozen=True)
class ExpansionMap:
    """Block matrix taking MUB mixture weights to outcome probabilities.

    Diagonal blocks are ``I_d``; off-diagonal blocks are the all-``1/d``
    matrix ``D_d``.
    """

    n_bases: int
    dim: int
    T: np.ndarray

    @property
    def D(self) -> np.ndarray:
        return np.full((self.dim, self.dim), 1.0 / self.dim)

    def smallest_singular_value(self) -> float:
        return float(np.linalg.svd(self.T, compute_uv=False)[-1])

    @property
    def rank_deficient(self) -> bool:
        sv = np.linalg.svd(self.T, compute_uv=False)
        return bool(sv[-1] < 1e-10 * sv[0])

    def apply(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float).ravel()
        if lam.size != self.T.shape[0]:
            raise DimensionError(f"expected {self.T.shape[0]} weights, got {lam.size}")
        return self.T @ lam


def expansion_map(n_bases: int, d: int) -> ExpansionMap:
    blocks = np.ones((n_bases, n_bases)) - np.eye(n_bases)
    T = np.kron(blocks, np.full((d, d), 1.0 / d)) + np.eye(n_bases * d)
    T.setflags(write=False)
    return ExpansionMap(n_bases, d, T)


# -- closed-form tables -------------------------------------------------------

def probs_d2_closed_form(p: PureStateParamsD2) -> ProbabilityTable:
    r, phi = p.r, p.phi
    g = 2.0 * math.sqrt(r * (1.0 - r))
    return ProbabilityTable(
        np.array(
            [
                [r, 1.0 - r],
                [0.5 * (1 + g * math.cos(phi)), 0.5 * (1 - g * math.cos(phi))],
                [0.5 * (1 - g * math.sin(phi)), 0.5 * (1 + g * math.sin(phi))],
            ]
        )
    )


def _f_table_d3(r: float, q: float, a: float, b: float) -> np.ndarray:
    t = max(1.0 - (r + q), 0.0)
    x, y, z = math.sqrt(r * q), math.sqrt(r * t), math.sqrt(q * t)
    c = math.cos
    u, v = 2 * math.pi / 3, 4 * math.pi / 3
    return np.array(
        [
            [
                x * c(a) + y * c(b) + z * c(a - b),
                x * c(a - u) + y * c(b - v) + z * c(a - b + u),
                x * c(a - v) + y * c(b - u) + z * c(a - b + v),
            ],
            [
                x * c(a - u) + y * c(b - u) + z * c(a - b),
                x * c(a - v) + y * c(b) + z * c(a - b + u),
                x * c(a) + y * c(b - v) + z * c(a - b + v),
            ],
            [
                x * c(a - v) + y * c(b - v) + z * c(a - b),
                x * c(a - u) + y * c(b) + z * c(a - b + v),
                x * c(a) + y * c(b - u) + z * c(a - b + u),
            ],
        ]
    )


def probs_d3_closed_form(p: PureStateParamsD3) -> ProbabilityTable:
    first = [p.r, p.q, max(1.0 - (p.r + p.q), 0.0)]
    rest = (1.0 + 2.0 * _f_table_d3(p.r, p.q, p.phi1, p.phi2)) / 3.0
    return ProbabilityTable(np.vstack([first, rest]))


# -- export ---------------------------------------------------------------------

def table_to_csv(t) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in _as_array(t):
        writer.writerow([fmt17(x) for x in row])
    return buf.getvalue()


def table_to_dict(t) -> dict:
    return {"p": [[float(x) for x in row] for row in _as_array(t)]}
