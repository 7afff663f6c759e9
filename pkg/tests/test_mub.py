import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mubc.errors import DimensionError, MubValidationError, UnsupportedDimensionError
from mubc.mub import (
    OrthonormalBasis,
    bases_from_dict,
    bases_to_dict,
    dumps_bases,
    load_bases,
    make_mub_set,
    product_mubs,
    projectors,
    standard_mubs,
    validate_mub_set,
)
from mubc.numerics import trace_product

W = np.exp(2j * np.pi / 3)
S2, S3 = 1 / np.sqrt(2), 1 / np.sqrt(3)

# explicit unitaries; basis vectors are their columns
U_QUBIT = [
    np.eye(2),
    S2 * np.array([[1, 1], [1, -1]]),
    S2 * np.array([[1, 1], [1j, -1j]]),
]
U_QUTRIT = [
    np.eye(3),
    S3 * np.array([[1, 1, 1], [1, W, W**2], [1, W**2, W]]),
    S3 * np.array([[1, 1, 1], [W, W**2, 1], [W, 1, W**2]]),
    S3 * np.array([[1, 1, 1], [W**2, W, 1], [W**2, 1, W]]),
]


@pytest.mark.parametrize("d, unitaries", [(2, U_QUBIT), (3, U_QUTRIT)])
def test_builtin_sets_match_explicit_unitaries(d, unitaries):
    m = standard_mubs(d, d + 1)
    assert m.n_bases == d + 1
    for basis, u in zip(m.bases, unitaries):
        assert basis.same_as(OrthonormalBasis(u.T))
        # global phase is already trivial for these columns
        assert_allclose(basis.vectors, u.T, atol=1e-15)


@pytest.mark.parametrize("d", [5, 7, 11, 13])
def test_odd_prime_construction_validates(d):
    m = standard_mubs(d)
    assert m.n_bases == d + 1
    report = validate_mub_set(m.bases)
    assert report.passed
    assert report.max_deviation < 1e-12
    assert m.max_unbiasedness_deviation == report.max_deviation


@pytest.mark.parametrize("d", [1, 4, 6, 8, 9])
def test_non_prime_rejected(d):
    with pytest.raises(UnsupportedDimensionError):
        standard_mubs(d)


@pytest.mark.parametrize("n", [0, 4])
def test_count_out_of_range(n):
    with pytest.raises(ValueError):
        standard_mubs(2, n)


def test_prefix_counts():
    m = standard_mubs(5, 3)
    assert m.n_bases == 3
    assert m.labels == ["A_1", "A_2", "A_3"]


def test_validate_pauli_trio_exact(pauli_trio):
    assert validate_mub_set(pauli_trio.bases).max_deviation < 1e-15


@pytest.mark.parametrize("d", [2, 3, 5])
def test_duplicate_basis_fails(d):
    comp = OrthonormalBasis(np.eye(d))
    report = validate_mub_set([comp, comp])
    assert not report.passed
    assert report.max_deviation == pytest.approx(1 - 1 / d, abs=1e-15)
    assert report.offending_pair == (0, 1)
    with pytest.raises(MubValidationError):
        make_mub_set([comp, comp])


def test_validate_explicit_qutrit_unitaries(qutrit_set):
    report = validate_mub_set([OrthonormalBasis(u.T) for u in U_QUTRIT])
    assert report.passed and report.max_deviation < 1e-12


def test_mixed_dimensions():
    with pytest.raises(DimensionError):
        validate_mub_set([OrthonormalBasis(np.eye(2)), OrthonormalBasis(np.eye(3))])


def test_pauli_projector_overlaps(pauli_trio):
    proj = projectors(pauli_trio)
    assert proj.shape == (3, 2, 2, 2)
    for k in range(2):
        for l in range(2):
            assert trace_product(proj[0, k], proj[1, l]) == pytest.approx(0.5, abs=1e-15)
    assert trace_product(proj[1, 0], proj[1, 0]) == pytest.approx(1)
    assert trace_product(proj[1, 0], proj[1, 1]) == pytest.approx(0, abs=1e-15)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_overlap_law_and_completeness(d):
    m = standard_mubs(d)
    proj = projectors(m)
    n = m.n_bases
    flat = proj.reshape(n * d, d, d)
    gram = np.real(np.einsum("aij,bji->ab", flat, flat))
    idx_n = np.repeat(np.arange(n), d)
    idx_k = np.tile(np.arange(d), n)
    same_n = idx_n[:, None] == idx_n[None, :]
    same_k = idx_k[:, None] == idx_k[None, :]
    expected = (1 + (d * same_k - 1) * same_n) / d
    assert np.max(np.abs(gram - expected)) < 1e-10
    for b in range(n):
        assert np.max(np.abs(proj[b].sum(axis=0) - np.eye(d))) < 1e-12


@pytest.mark.parametrize("d", [2, 3, 5])
def test_round_trip_bit_exact(d, tmp_path):
    m = standard_mubs(d)
    path = tmp_path / "bases.json"
    path.write_text(dumps_bases(m))
    back = load_bases(path)
    for a, b in zip(m.bases, back.bases):
        assert np.array_equal(a.vectors, b.vectors)
        assert a.label == b.label


def test_ingestion_fixes_phase_and_small_noise(rng):
    m = standard_mubs(3)
    doc = bases_to_dict(m)
    vecs = np.array(doc["bases"][2]["vectors"])
    cvec = vecs[..., 0] + 1j * vecs[..., 1]
    cvec = cvec * np.exp(1j * rng.uniform(0, 2 * np.pi, size=(3, 1)))
    cvec = cvec + 1e-12 * rng.normal(size=cvec.shape)
    doc["bases"][2]["vectors"] = np.stack([cvec.real, cvec.imag], axis=-1).tolist()
    back = bases_from_dict(doc)
    assert validate_mub_set(back.bases).passed
    fixed = back.bases[2].vectors
    assert np.all(fixed[:, 0].imag == 0) and np.all(fixed[:, 0].real > 0)
    assert back.bases[2].same_as(m.bases[2], tol=1e-9)


def test_ingestion_between_tolerances_rejected_after_recheck():
    # accepted by the 1e-8 screen, but an unbiasedness error of 5e-9 survives re-orthonormalization
    doc = bases_to_dict(standard_mubs(2))
    doc["bases"][1]["vectors"][0][0][0] += 5e-9
    with pytest.raises(MubValidationError):
        bases_from_dict(doc)


def test_ingestion_rejects_corrupted(tmp_path):
    doc = bases_to_dict(standard_mubs(2))
    doc["bases"][1]["vectors"][0][0] = [0.9, 0.0]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(MubValidationError):
        load_bases(path)


def test_ingestion_rejects_bad_shape():
    with pytest.raises(DimensionError):
        bases_from_dict({"dim": 2, "bases": [{"label": "x", "vectors": [[[1, 0]]]}]})


def test_product_triple_in_dimension_six():
    m = product_mubs(standard_mubs(2), standard_mubs(3))
    assert m.dim == 6 and m.n_bases == 3
    assert m.max_unbiasedness_deviation < 1e-12
