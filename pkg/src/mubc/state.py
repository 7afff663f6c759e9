"""Density matrices and the constructors used throughout the package."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError, InvalidStateError, MubcError, NormalizationError
from .mub import MubSet, projectors
from .numerics import HERMITIAN_TOL, as_square, check_unit, hermiticity_defect, hermitian_eigenvalues

TRACE_TOL = 1e-10
PSD_TOL = -1e-9
WEIGHT_TOL = 1e-12


class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite ``d x d`` matrix.

    ``check_psd=False`` skips the eigenvalue test; constructors use it only
    when positivity holds by construction (rank-one outer products).
    """

    __slots__ = ("mat",)

    def __init__(self, mat, *, check_psd: bool = True):
        mat = np.array(as_square(mat), dtype=complex)
        defect = hermiticity_defect(mat)
        if defect >= HERMITIAN_TOL:
            raise InvalidStateError(f"not Hermitian (max |rho - rho^H| = {defect:.3e})")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace is {tr!r}, expected 1")
        if check_psd:
            lo = hermitian_eigenvalues(mat)[-1]
            if lo < PSD_TOL:
                raise InvalidStateError(f"minimum eigenvalue {lo:.3e} is negative")
        mat.setflags(write=False)
        self.mat = mat

    @classmethod
    def from_vector(cls, psi) -> "DensityMatrix":
        psi = check_unit(psi)
        return cls(np.outer(psi, psi.conj()), check_psd=False)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def purity(self) -> float:
        return purity(self)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim}, purity={self.purity:.6g})"


@dataclass(frozen=True)
class PureStateParamsD2:
    r: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"r must lie in [0, 1], got {self.r}")


@dataclass(frozen=True)
class PureStateParamsD3:
    r: float
    q: float
    phi1: float
    phi2: float

    def __post_init__(self):
        if self.r < 0 or self.q < 0 or self.r + self.q > 1.0 + 1e-15:
            raise ValueError(f"need r, q >= 0 and r + q <= 1, got r={self.r}, q={self.q}")


@dataclass(frozen=True)
class CoherentMixtureSpec:
    """Weights ``lam`` (total ``1 - r``) on the MUB projectors plus ``r |psi><psi|``."""

    lam: np.ndarray
    r: float
    psi: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"coherent weight must lie in [0, 1], got {self.r}")
        lam = np.asarray(self.lam, dtype=float)
        if np.any(lam < 0):
            raise ValueError("mixture weights must be nonnegative")
        if abs(lam.sum() + self.r - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {lam.sum()!r} + r={self.r!r}, expected 1")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "psi", check_unit(self.psi))


def rng_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """PCG64 generator for stream ``stream`` of root ``seed``.

    Streams come from ``SeedSequence(seed, spawn_key=(stream,))`` so that
    stream ``i`` is the same object whether produced serially or in a
    worker process.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def pure_vector_d2(r: float, phi: float) -> np.ndarray:
    # conjugate phase: the S_y row is ((1 - g sin phi)/2, (1 + g sin phi)/2) for the basis (1, +-i)/sqrt(2)
    return np.array([np.sqrt(r), np.sqrt(1.0 - r) * np.exp(-1j * phi)])


def pure_vector_d3(r: float, q: float, phi1: float, phi2: float) -> np.ndarray:
    rest = max(1.0 - r - q, 0.0)
    return np.array(
        [np.sqrt(r), np.sqrt(q) * np.exp(1j * phi1), np.sqrt(rest) * np.exp(1j * phi2)]
    )


def pure_from_params_d2(p: PureStateParamsD2) -> DensityMatrix:
    """Qubit pure state with amplitudes ``sqrt(r)`` and ``sqrt(1-r)``.

    The relative phase is applied so that ``rho[0, 1] = sqrt(r(1-r)) e^{i phi}``,
    the convention under which the closed-form qubit table holds for the
    built-in ``S_y`` basis.
    """
    return DensityMatrix.from_vector(pure_vector_d2(p.r, p.phi))


def pure_from_params_d3(p: PureStateParamsD3) -> DensityMatrix:
    return DensityMatrix.from_vector(pure_vector_d3(p.r, p.q, p.phi1, p.phi2))


def random_pure_vector(d: int, seed: int, stream: int = 0) -> np.ndarray:
    if d < 2:
        raise DimensionError(f"dimension must be at least 2, got {d}")
    rng = rng_stream(seed, stream)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def random_pure(d: int, seed: int, stream: int = 0) -> DensityMatrix:
    """Haar-random pure state (normalized complex Gaussian vector)."""
    return DensityMatrix.from_vector(random_pure_vector(d, seed, stream))


def random_simplex_weights(shape, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the probability simplex, reshaped to ``shape``."""
    n = int(np.prod(shape))
    return rng.dirichlet(np.ones(n)).reshape(shape)


def signed_weights(lam, rng: np.random.Generator) -> np.ndarray:
    """Shift row n of ``lam`` by ``c_n / d`` with ``sum c_n = 0``.

    Each basis resolves the identity, so the mixture is unchanged while some
    weights turn negative (for N >= 2).
    """
    lam = np.asarray(lam, dtype=float)
    n, d = lam.shape
    if n < 2:
        return lam.copy()
    c = rng.standard_normal(n)
    c -= c.mean()
    c *= 2.0 / np.max(np.abs(c))
    return lam + c[:, None] / d


def _check_weights(m: MubSet, lam, allow_signed: bool) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (m.n_bases, m.dim):
        raise DimensionError(f"weights have shape {lam.shape}, expected {(m.n_bases, m.dim)}")
    if not allow_signed and np.any(lam < 0):
        raise ValueError("negative mixture weight")
    if abs(lam.sum() - 1.0) > WEIGHT_TOL:
        raise ValueError(f"mixture weights sum to {lam.sum()!r}, expected 1")
    return lam


def mub_diagonal_mixture(m: MubSet, lam, *, allow_signed: bool = False) -> DensityMatrix:
    """rho = sum_nk lam_nk |nk><nk|.

    With ``allow_signed`` the weights may be negative; the result is then
    checked for positivity and rejected if it is not a state.
    """
    lam = _check_weights(m, lam, allow_signed)
    mat = np.einsum("nk,nkij->ij", lam, projectors(m))
    return DensityMatrix(mat, check_psd=allow_signed)


def coherent_mixture(spec: CoherentMixtureSpec, m: MubSet) -> DensityMatrix:
    lam = np.asarray(spec.lam, dtype=float)
    if lam.shape != (m.n_bases, m.dim):
        raise DimensionError(f"weights have shape {lam.shape}, expected {(m.n_bases, m.dim)}")
    if spec.psi.shape[0] != m.dim:
        raise DimensionError(f"psi has length {spec.psi.shape[0]}, bases have d={m.dim}")
    mat = np.einsum("nk,nkij->ij", lam, projectors(m))
    mat = mat + spec.r * np.outer(spec.psi, spec.psi.conj())
    return DensityMatrix(mat, check_psd=False)


PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def bloch_density(b) -> DensityMatrix:
    """Qubit state (I + b . sigma) / 2 from a Bloch vector ``(rx, ry, rz)``."""
    b = np.asarray(b, dtype=float)
    if b.shape != (3,):
        raise DimensionError("Bloch vector must have three components")
    if np.linalg.norm(b) > 1.0 + 1e-12:
        raise NormalizationError(f"Bloch vector norm {np.linalg.norm(b)!r} exceeds 1")
    mat = 0.5 * (np.eye(2) + sum(c * s for c, s in zip(b, PAULI)))
    return DensityMatrix(mat, check_psd=False)


def bloch_vector(rho: DensityMatrix) -> np.ndarray:
    if rho.dim != 2:
        raise DimensionError("Bloch vectors exist only for d=2")
    return np.array([np.real(np.trace(rho.mat @ s)) for s in PAULI])


def purity(rho: DensityMatrix) -> float:
    """tr(rho^2), clamped into [1/d, 1] when roundoff pushes it just outside."""
    mat = rho.mat
    val = float(np.real(np.sum(mat * mat.T)))
    lo, hi = 1.0 / rho.dim, 1.0
    if val < lo - TRACE_TOL or val > hi + TRACE_TOL:
        raise InvalidStateError(f"purity {val!r} outside [1/d, 1]; input is not a state")
    return min(max(val, lo), hi)


def density_to_dict(rho: DensityMatrix) -> dict:
    return {
        "dim": rho.dim,
        "rho": [[[float(z.real), float(z.imag)] for z in row] for row in rho.mat],
    }


def density_from_dict(data: dict) -> DensityMatrix:
    try:
        d = int(data["dim"])
        arr = np.asarray(data["rho"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise MubcError(f"malformed density document: {exc}") from exc
    if arr.shape != (d, d, 2):
        raise DimensionError(f"expected rho of shape ({d}, {d}, 2), got {arr.shape}")
    return DensityMatrix(arr[..., 0] + 1j * arr[..., 1])


def save_density(rho: DensityMatrix, path: str | Path) -> None:
    Path(path).write_text(json.dumps(density_to_dict(rho), indent=1))


def load_density(path: str | Path) -> DensityMatrix:
    return density_from_dict(json.loads(Path(path).read_text()))
