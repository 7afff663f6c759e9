"""Mutually unbiased bases: construction, validation and JSON I/O.

A basis is stored as a ``(d, d)`` complex array whose *rows* are the basis
vectors. Built-in families:

* ``d = 2``: eigenbases of sigma_z, sigma_x, sigma_y.
* ``d = 3``: the four bases of the explicit qutrit unitaries (computational,
  Fourier and the two quadratic-phase bases, in that column order).
* odd prime ``d >= 5``: computational basis followed by the quadratic-phase
  bases ``|b, k>_l = w^(b l^2 + k l) / sqrt(d)``, ``b = 0..d-1``.

Other dimensions must be read from a bases file.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionError, MubcError, MubValidationError, UnsupportedDimensionError

MUB_TOL = 1e-10
INGEST_TOL = 1e-8
PHASE_EPS = 1e-12


@dataclass(frozen=True)
class OrthonormalBasis:
    vectors: np.ndarray
    label: str = ""

    def __post_init__(self):
        vecs = np.array(self.vectors, dtype=complex)
        if vecs.ndim != 2 or vecs.shape[0] != vecs.shape[1]:
            raise DimensionError(f"a basis needs d vectors of length d, got shape {vecs.shape}")
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def orthonormality_defect(self) -> float:
        gram = self.vectors.conj() @ self.vectors.T
        return float(np.max(np.abs(gram - np.eye(self.dim))))

    def projectors(self) -> np.ndarray:
        v = self.vectors
        return np.einsum("ki,kj->kij", v, v.conj())

    def same_as(self, other: "OrthonormalBasis", tol: float = MUB_TOL) -> bool:
        """Phase-insensitive comparison through the projectors."""
        if other.dim != self.dim:
            return False
        return bool(np.max(np.abs(self.projectors() - other.projectors())) < tol)


@dataclass(frozen=True)
class ValidationReport:
    max_deviation: float
    offending_pair: tuple[int, int] | None
    max_orthonormality_defect: float
    passed: bool


@dataclass(frozen=True)
class MubSet:
    """N validated, pairwise unbiased orthonormal bases in dimension d.

    Build through :func:`make_mub_set`, :func:`standard_mubs` or
    :func:`load_bases`; the constructor does not re-run validation.
    """

    bases: tuple[OrthonormalBasis, ...]
    max_unbiasedness_deviation: float
    _stacked: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        stacked = np.concatenate([b.vectors for b in self.bases], axis=0)
        stacked.setflags(write=False)
        object.__setattr__(self, "_stacked", stacked)

    @property
    def dim(self) -> int:
        return self.bases[0].dim

    @property
    def n_bases(self) -> int:
        return len(self.bases)

    @property
    def labels(self) -> list[str]:
        return [b.label for b in self.bases]

    def stacked(self) -> np.ndarray:
        """All basis vectors as rows of an ``(N*d, d)`` array."""
        return self._stacked

    def subset(self, n: int) -> "MubSet":
        if not 1 <= n <= self.n_bases:
            raise ValueError(f"subset size {n} outside 1..{self.n_bases}")
        return make_mub_set(self.bases[:n])


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    # first nonzero amplitude made real and nonnegative
    nz = np.flatnonzero(np.abs(vec) > PHASE_EPS)
    if nz.size == 0:
        return vec
    c = vec[nz[0]]
    if c.imag == 0.0 and c.real > 0.0:
        return vec
    out = vec * (np.conj(c) / abs(c))
    out[nz[0]] = abs(c)
    return out


def _root_of_unity(power: int, d: int) -> complex:
    return complex(np.exp(2j * np.pi * (power % d) / d))


def _qubit_bases() -> list[OrthonormalBasis]:
    s = 1 / np.sqrt(2)
    u_z = np.eye(2, dtype=complex)
    u_x = s * np.array([[1, 1], [1, -1]], dtype=complex)
    u_y = s * np.array([[1, 1], [1j, -1j]], dtype=complex)
    # unitary columns are the basis vectors
    return [
        OrthonormalBasis(u_z.T, "S_z"),
        OrthonormalBasis(u_x.T, "S_x"),
        OrthonormalBasis(u_y.T, "S_y"),
    ]


def _qutrit_bases() -> list[OrthonormalBasis]:
    w = _root_of_unity(1, 3)
    w2 = _root_of_unity(2, 3)
    s = 1 / np.sqrt(3)
    unitaries = [
        np.eye(3, dtype=complex),
        s * np.array([[1, 1, 1], [1, w, w2], [1, w2, w]]),
        s * np.array([[1, 1, 1], [w, w2, 1], [w, 1, w2]]),
        s * np.array([[1, 1, 1], [w2, w, 1], [w2, 1, w]]),
    ]
    return [OrthonormalBasis(u.T, f"A_{i + 1}") for i, u in enumerate(unitaries)]


def _odd_prime_bases(d: int) -> list[OrthonormalBasis]:
    bases = [OrthonormalBasis(np.eye(d, dtype=complex), "A_1")]
    ls = np.arange(d)
    for b in range(d):
        vecs = np.array(
            [[_root_of_unity(b * l * l + k * l, d) for l in ls] for k in range(d)]
        ) / np.sqrt(d)
        bases.append(OrthonormalBasis(vecs, f"A_{b + 2}"))
    return bases


def standard_mubs(d: int, n: int | None = None) -> MubSet:
    """First ``n`` of the built-in d+1 MUBs for prime ``d`` (all of them by default)."""
    if not _is_prime(d):
        raise UnsupportedDimensionError(
            f"no built-in MUB construction for d={d}; supply the bases in a file"
        )
    if n is None:
        n = d + 1
    if not 1 <= n <= d + 1:
        raise MubcError(f"number of bases must lie in 1..{d + 1}, got {n}")
    if d == 2:
        bases = _qubit_bases()
    elif d == 3:
        bases = _qutrit_bases()
    else:
        bases = _odd_prime_bases(d)
    return make_mub_set(bases[:n])


def product_mubs(first: MubSet, second: MubSet) -> MubSet:
    """Tensor-product bases ``B_n (x) C_n`` for the first ``min(N_1, N_2)`` indices.

    For coprime dimensions this gives e.g. three MUBs in d = 6.
    """
    n = min(first.n_bases, second.n_bases)
    bases = []
    for b1, b2 in zip(first.bases[:n], second.bases[:n]):
        vecs = np.array([np.kron(u, v) for u in b1.vectors for v in b2.vectors])
        bases.append(OrthonormalBasis(vecs, f"{b1.label}*{b2.label}"))
    return make_mub_set(bases)


def validate_mub_set(bases: Sequence[OrthonormalBasis]) -> ValidationReport:
    if len(bases) == 0:
        raise ValueError("empty basis list")
    d = bases[0].dim
    if any(b.dim != d for b in bases):
        raise DimensionError("bases have mixed dimensions")
    ortho = max(b.orthonormality_defect() for b in bases)
    worst = 0.0
    pair = None
    for i in range(len(bases)):
        for j in range(i + 1, len(bases)):
            overlaps = np.abs(bases[i].vectors.conj() @ bases[j].vectors.T) ** 2
            dev = float(np.max(np.abs(overlaps - 1.0 / d)))
            if pair is None or dev > worst:
                worst, pair = dev, (i, j)
    passed = worst < MUB_TOL and ortho < MUB_TOL
    return ValidationReport(worst, pair, ortho, passed)


def make_mub_set(bases: Sequence[OrthonormalBasis]) -> MubSet:
    bases = tuple(bases)
    d = bases[0].dim if bases else 0
    if not 1 <= len(bases) <= d + 1:
        raise MubValidationError(f"need between 1 and d+1 bases, got {len(bases)} for d={d}")
    report = validate_mub_set(bases)
    if not report.passed:
        raise MubValidationError(
            f"bases fail validation: unbiasedness deviation {report.max_deviation:.3e}"
            f" (pair {report.offending_pair}), orthonormality defect"
            f" {report.max_orthonormality_defect:.3e}"
        )
    return MubSet(bases, report.max_deviation)


def projectors(m: MubSet) -> np.ndarray:
    """Array of shape ``(N, d, d, d)``: ``[n, k]`` is the projector onto ``|nk>``."""
    return np.stack([b.projectors() for b in m.bases])


# -- bases file ---------------------------------------------------------------

def _gram_schmidt(vecs: np.ndarray) -> np.ndarray:
    out = np.zeros_like(vecs)
    for k, v in enumerate(vecs):
        w = v - out[:k].T @ (out[:k].conj() @ v)
        out[k] = w / np.linalg.norm(w)
    return out


def bases_to_dict(m: MubSet) -> dict:
    return {
        "dim": m.dim,
        "bases": [
            {
                "label": b.label,
                "vectors": [[[float(z.real), float(z.imag)] for z in vec] for vec in b.vectors],
            }
            for b in m.bases
        ],
    }


def bases_from_dict(data: dict) -> MubSet:
    """Parse and re-validate a bases document.

    Files within the 1e-8 ingestion tolerance are accepted; any basis whose
    orthonormality defect exceeds the internal 1e-10 tolerance is
    re-orthonormalized before the final check.
    """
    try:
        d = int(data["dim"])
        raw = data["bases"]
        parsed = []
        for i, entry in enumerate(raw):
            arr = np.asarray(entry["vectors"], dtype=float)
            if arr.shape != (d, d, 2):
                raise DimensionError(f"basis {i}: expected shape ({d}, {d}, 2), got {arr.shape}")
            parsed.append((entry.get("label", f"B_{i + 1}"), arr[..., 0] + 1j * arr[..., 1]))
    except (KeyError, TypeError) as exc:
        raise MubValidationError(f"malformed bases document: {exc}") from exc
    if not parsed:
        raise MubValidationError("bases document lists no bases")

    loose = validate_mub_set([OrthonormalBasis(v, lab) for lab, v in parsed])
    if loose.max_deviation >= INGEST_TOL or loose.max_orthonormality_defect >= INGEST_TOL:
        raise MubValidationError(
            f"bases exceed ingestion tolerance {INGEST_TOL}: deviation"
            f" {loose.max_deviation:.3e}, orthonormality {loose.max_orthonormality_defect:.3e}"
        )
    bases = []
    for label, vecs in parsed:
        if OrthonormalBasis(vecs).orthonormality_defect() >= MUB_TOL:
            vecs = _gram_schmidt(vecs)
        vecs = np.array([_fix_phase(v) for v in vecs])
        bases.append(OrthonormalBasis(vecs, label))
    return make_mub_set(bases)


def dumps_bases(m: MubSet) -> str:
    return json.dumps(bases_to_dict(m), indent=1)


def save_bases(m: MubSet, path: str | Path) -> None:
    Path(path).write_text(dumps_bases(m))


def load_bases(path: str | Path) -> MubSet:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MubValidationError(f"{path}: not valid JSON ({exc})") from exc
    return bases_from_dict(data)
