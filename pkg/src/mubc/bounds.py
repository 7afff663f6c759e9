"""Closed-form entropic certainty bounds for N mutually unbiased bases.

All entropies are in nats. Inputs are the number of bases ``N``, the
dimension ``d``, the state purity ``purity = tr(rho^2)`` and, for states
mixed with a mutually coherent vector, its weight ``r``.

The maximizing table has one entry ``b+`` per row and ``(1 - b+)/(d - 1)``
in the other ``d - 1`` slots, with

    alpha = sqrt((d - 1) [d (purity + 1) - (d + 1)])
    b+-   = (sqrt(N) +- alpha) / (d sqrt(N)).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InadmissibleError
from .measure import ProbabilityTable, total_entropy
from .serialize import dumps17, fmt17

RADICAND_TOL = 1e-12
RANGE_TOL = 1e-12

CSV_HEADER = "N,d,purity,alpha,b_plus,h_t_plus,lower_q,mi_bound"


def _check_inputs(n_bases: int, d: int, purity: float) -> None:
    if d < 2:
        raise InadmissibleError(f"dimension must be at least 2, got {d}")
    if not 1 <= n_bases <= d + 1:
        raise InadmissibleError(f"need 1 <= N <= d+1, got N={n_bases}, d={d}")
    if not 1.0 / d - RANGE_TOL <= purity <= 1.0 + RANGE_TOL:
        raise InadmissibleError(f"purity {purity!r} outside [1/d, 1] = [{1.0 / d!r}, 1]")


def _sqrt_radicand(rad: float, what: str) -> float:
    # values this close to zero are roundoff at purity = 1/d
    if abs(rad) <= RADICAND_TOL:
        return 0.0
    if rad < 0:
        raise InadmissibleError(f"{what} radicand {rad!r} is negative")
    return math.sqrt(rad)


def alpha(d: int, purity: float) -> float:
    return _sqrt_radicand((d - 1) * (d * (purity + 1) - (d + 1)), "alpha")


def alpha_bar(d: int, purity: float, r: float) -> float:
    """``alpha`` for a state carrying weight ``r`` on a mutually coherent vector."""
    if not 0.0 <= r <= 1.0:
        raise InadmissibleError(f"coherent weight {r!r} outside [0, 1]")
    return _sqrt_radicand((d - 1) * (d * (purity + 1) - (d + 1) - r * r * (d - 1)), "alpha-bar")


def _b(n_bases: int, d: int, a: float, sign: int) -> float:
    sn = math.sqrt(n_bases)
    return (sn + sign * a) / (d * sn)


def b_plus(n_bases: int, d: int, purity: float) -> float:
    _check_inputs(n_bases, d, purity)
    return _b(n_bases, d, alpha(d, purity), +1)


def b_minus(n_bases: int, d: int, purity: float) -> tuple[float, bool]:
    """The other root and whether it is a stationary point.

    It is only stationary in the degenerate case alpha = 0 (purity = 1/d),
    where it coincides with ``b_plus``.
    """
    _check_inputs(n_bases, d, purity)
    a = alpha(d, purity)
    return _b(n_bases, d, a, -1), a == 0.0


def _h_from_alpha(n_bases: int, d: int, a: float) -> float:
    sn = math.sqrt(n_bases)
    denom = (d - 1) * sn - a
    if n_bases == 1 and abs(denom) <= RADICAND_TOL:
        # single basis, pure state: b+ = 1, a deterministic outcome
        return 0.0
    if denom <= 0:
        raise InadmissibleError(f"(d-1) sqrt(N) - alpha = {denom!r} is not positive")
    first = n_bases * math.log(d * (d - 1) * sn / denom)
    second = (n_bases + sn * a) / d * math.log((d - 1) * (sn + a) / denom)
    return first - second


def h_t_plus(n_bases: int, d: int, purity: float) -> float:
    """Optimal upper bound on the sum of the N Shannon entropies."""
    _check_inputs(n_bases, d, purity)
    return _h_from_alpha(n_bases, d, alpha(d, purity))


def h_t_plus_bar(n_bases: int, d: int, purity: float, r: float) -> float:
    _check_inputs(n_bases, d, purity)
    return _h_from_alpha(n_bases, d, alpha_bar(d, purity, r))


def extremal_distribution(n_bases: int, d: int, purity: float) -> ProbabilityTable:
    """Maximizing table: ``b+`` in the last slot of each row."""
    b = b_plus(n_bases, d, purity)
    row = np.full(d, (1.0 - b) / (d - 1))
    row[-1] = b
    return ProbabilityTable(np.tile(row, (n_bases, 1)))


def constraint_residual(table, d: int, purity: float) -> float:
    """Residual of sum_n (d b_n^2 - 2 b_n) = ((d-1)[d(purity+1) - (d+1)] - N) / d.

    ``b_n`` is read from the last column.
    """
    p = table.p if isinstance(table, ProbabilityTable) else np.asarray(table)
    b = p[:, -1]
    n_bases = p.shape[0]
    lhs = float(np.sum(d * b * b - 2 * b))
    rhs = ((d - 1) * (d * (purity + 1) - (d + 1)) - n_bases) / d
    return lhs - rhs


def lower_bound_rastegin(d: int, purity: float) -> float:
    """Entropy lower bound for a complete set of d+1 MUBs."""
    if not 1.0 / d - RANGE_TOL <= purity <= 1.0 + RANGE_TOL:
        raise InadmissibleError(f"purity {purity!r} outside [1/d, 1]")
    return (d + 1) * math.log((d + 1) / (purity + 1))


def lower_bound_qubit(bloch_norm: float) -> float:
    """Qubit lower bound for sigma_x, sigma_y, sigma_z given |r|."""
    if not 0.0 <= bloch_norm <= 1.0:
        raise InadmissibleError(f"Bloch norm {bloch_norm!r} outside [0, 1]")
    bracket = 0.0
    for x in ((1 + bloch_norm) / 2, (1 - bloch_norm) / 2):
        if x > 0:
            bracket += x * math.log(x)
    return math.log(4) - bracket


def mutual_info_bound(d: int, purity: float) -> float:
    """Upper bound on sum_n I(A_n : Y) for d+1 MUBs and a classical memory Y.

    Computed as ``h_t_plus(d+1, d, purity) - lower_bound_rastegin(d, purity)``.
    """
    return h_t_plus(d + 1, d, purity) - lower_bound_rastegin(d, purity)


def mutual_info_bound_alternative(d: int, purity: float) -> float:
    """A second closed form of the mutual-information bound.

    Its coefficients do not reduce to ``h_t_plus(d+1) - q``; it is kept only
    as a diagnostic, see :func:`mutual_info_discrepancy`.
    """
    a = alpha(d, purity)
    n = d + 1
    sn = math.sqrt(n)
    first = n * math.log(d * (d - 1) * (purity + 1) * sn / (n * (n * sn - a)))
    second = (n + sn * a) / d * math.log(((d - 1) * sn + a) / ((d - 1) * sn - a))
    return first - second


@dataclass(frozen=True)
class MutualInfoDiagnostic:
    d: int
    purity: float
    composed: float
    alternative: float

    @property
    def discrepancy(self) -> float:
        return self.alternative - self.composed


def mutual_info_discrepancy(d: int, purity: float) -> MutualInfoDiagnostic:
    return MutualInfoDiagnostic(d, purity, mutual_info_bound(d, purity), mutual_info_bound_alternative(d, purity))


@dataclass(frozen=True)
class BoundReport:
    n_bases: int
    dim: int
    purity: float
    coherent_weight: float
    alpha: float
    b_plus: float
    b_minus: float
    b_minus_stationary: bool
    h_t_plus: float
    n_ln_d: float
    lower_q: float | None
    mutual_info_bound: float | None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return dumps17(self.to_dict())

    def csv_row(self) -> str:
        def cell(x):
            return "" if x is None else fmt17(x)

        return ",".join(
            [
                str(self.n_bases),
                str(self.dim),
                fmt17(self.purity),
                fmt17(self.alpha),
                fmt17(self.b_plus),
                fmt17(self.h_t_plus),
                cell(self.lower_q),
                cell(self.mutual_info_bound),
            ]
        )


def bound_report(n_bases: int, d: int, purity: float, r: float = 0.0) -> BoundReport:
    """All bounds for one parameter point.

    With ``r > 0`` alpha is replaced by alpha-bar throughout. The lower bound
    and the mutual-information bound are only defined for N = d + 1.
    """
    _check_inputs(n_bases, d, purity)
    a = alpha_bar(d, purity, r) if r else alpha(d, purity)
    complete = n_bases == d + 1
    return BoundReport(
        n_bases=n_bases,
        dim=d,
        purity=purity,
        coherent_weight=r,
        alpha=a,
        b_plus=_b(n_bases, d, a, +1),
        b_minus=_b(n_bases, d, a, -1),
        b_minus_stationary=a == 0.0,
        h_t_plus=_h_from_alpha(n_bases, d, a),
        n_ln_d=n_bases * math.log(d),
        lower_q=lower_bound_rastegin(d, purity) if complete else None,
        mutual_info_bound=mutual_info_bound(d, purity) if complete else None,
    )


def extremal_entropy_gap(n_bases: int, d: int, purity: float) -> float:
    """|total_entropy(extremal table) - h_t_plus|; zero up to roundoff."""
    return abs(total_entropy(extremal_distribution(n_bases, d, purity)) - h_t_plus(n_bases, d, purity))


def constrained_perturbation(table, direction, step: float) -> np.ndarray:
    """Move ``table`` by ``step`` along ``direction`` while keeping every row
    sum and the total sum of squares fixed.

    Within the row-sum plane, sum p^2 = |p - 1/d|^2 + N/d, so the sum-of-squares
    surface is a sphere about the uniform table: the direction is projected
    onto that sphere's tangent space and the trial point is scaled back onto it.
    """
    p = table.p if isinstance(table, ProbabilityTable) else np.asarray(table, dtype=float)
    d = p.shape[1]
    x = p - 1.0 / d
    v = np.asarray(direction, dtype=float).reshape(p.shape)
    v = v - v.mean(axis=1, keepdims=True)
    radius = np.linalg.norm(x)
    if radius == 0:
        # zero-radius sphere: the uniform table is the only feasible point
        return p.copy()
    v = v - np.sum(v * x) / radius**2 * x
    nv = np.linalg.norm(v)
    if nv == 0:
        return p.copy()
    trial = x + step * v / nv
    trial *= radius / np.linalg.norm(trial)
    return trial + 1.0 / d
