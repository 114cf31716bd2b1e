import numpy as np
import pytest

from mwgraph.errors import (
    DimMismatchError,
    NonFiniteError,
    NotPsdError,
    NotSymmetricError,
)
from mwgraph.linalg import (
    DEFAULT_TOL,
    Tolerances,
    as_symmetric,
    eigh,
    is_psd,
    kernel_dim,
    loewner_leq,
    pseudo_sqrt_inv,
    rank_psd,
)

from conftest import FRAME_A, FRAME_B, FRAME_C, random_psd


def test_tolerances_defaults():
    tol = Tolerances()
    assert tol.psd_tol == 1e-9
    assert tol.loewner_tol == 1e-9
    assert tol.resid_tol == 1e-8
    assert tol.ortho_tol == 1e-8
    assert tol.rank_rel_tol == 1e-10
    assert tol.sym_tol == 1e-9


def test_tolerances_reject_negative():
    with pytest.raises(ValueError):
        Tolerances(psd_tol=-1.0)
    with pytest.raises(ValueError):
        Tolerances(resid_tol=float("nan"))


def test_as_symmetric_averages_within_tolerance():
    m = np.array([[1.0, 2.0 + 1e-12], [2.0, 3.0]])
    sym = as_symmetric(m)
    assert np.allclose(sym, sym.T)
    assert sym[0, 1] == pytest.approx(2.0 + 5e-13)


def test_as_symmetric_rejects_asymmetry():
    with pytest.raises(NotSymmetricError):
        as_symmetric([[0.0, 1.0], [0.0, 0.0]])


def test_as_symmetric_rejects_nonsquare():
    with pytest.raises(DimMismatchError):
        as_symmetric(np.zeros((2, 3)))


def test_eigh_identity():
    spec = eigh(np.eye(2))
    assert np.allclose(spec.values, [1.0, 1.0])


def test_eigh_swap_matrix():
    spec = eigh([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(spec.values, [-1.0, 1.0])


def test_eigh_rank_one_projection():
    spec = eigh(FRAME_B)
    assert np.allclose(spec.values, [0.0, 1.0], atol=1e-14)


def test_eigh_rejects_nan():
    with pytest.raises(NonFiniteError):
        eigh([[np.nan, 0.0], [0.0, 1.0]])


def test_eigh_reconstructs(rng):
    for _ in range(50):
        dim = int(rng.integers(1, 7))
        m = rng.normal(size=(dim, dim))
        m = (m + m.T) / 2
        spec = eigh(m)
        rebuilt = spec.vectors @ np.diag(spec.values) @ spec.vectors.T
        scale = max(1.0, float(np.abs(m).max()))
        assert np.abs(rebuilt - m).max() <= DEFAULT_TOL.resid_tol * scale
        gram = spec.vectors.T @ spec.vectors
        assert np.abs(gram - np.eye(dim)).max() <= DEFAULT_TOL.ortho_tol
        assert np.all(np.diff(spec.values) >= -1e-12)


def test_eigh_deterministic():
    m = np.array([[2.0, -1.0, 0.5], [-1.0, 1.0, 0.25], [0.5, 0.25, 3.0]])
    first = eigh(m)
    second = eigh(m.copy())
    assert np.array_equal(first.values, second.values)
    assert np.array_equal(first.vectors, second.vectors)


def test_is_psd_zero():
    assert is_psd(np.zeros((3, 3)))


def test_is_psd_indefinite():
    assert not is_psd(np.diag([1.0, -1.0]))


def test_is_psd_frame_matrices():
    for mat in (FRAME_A, FRAME_B, FRAME_C):
        assert is_psd(mat)


def test_pseudo_sqrt_inv_identity():
    assert np.allclose(pseudo_sqrt_inv(np.eye(3)), np.eye(3))


def test_pseudo_sqrt_inv_diag():
    out = pseudo_sqrt_inv(np.diag([4.0, 0.0]))
    assert np.allclose(out, np.diag([0.5, 0.0]))


def test_pseudo_sqrt_inv_scalar_multiple():
    out = pseudo_sqrt_inv(1.5 * np.eye(2))
    assert np.allclose(out, np.sqrt(2.0 / 3.0) * np.eye(2))


def test_pseudo_sqrt_inv_rejects_indefinite():
    with pytest.raises(NotPsdError):
        pseudo_sqrt_inv(np.diag([1.0, -1.0]))


def test_pseudo_sqrt_inv_projector_property(rng):
    # M^(+/2) M M^(+/2) is the orthogonal projector onto im(M)
    for _ in range(40):
        k = int(rng.integers(1, 5))
        rank = int(rng.integers(0, k + 1))
        m = random_psd(rng, k, rank) if rank else np.zeros((k, k))
        half = pseudo_sqrt_inv(m)
        proj = half @ m @ half
        assert np.abs(proj @ proj - proj).max() <= 1e-8
        assert rank_psd(proj) == rank_psd(m)


def test_loewner_zero_below_psd(rng):
    for _ in range(20):
        m = random_psd(rng, 3)
        assert loewner_leq(np.zeros((3, 3)), m)


def test_loewner_identity_cases():
    assert loewner_leq(np.eye(2), 2 * np.eye(2))
    assert not loewner_leq(2 * np.eye(2), np.eye(2))


def test_loewner_incomparable_pair():
    a = np.diag([1.0, 0.0])
    b = np.diag([0.0, 1.0])
    assert not loewner_leq(a, b)
    assert not loewner_leq(b, a)


def test_loewner_dim_mismatch():
    with pytest.raises(DimMismatchError):
        loewner_leq(np.eye(2), np.eye(3))


def test_loewner_reflexive_transitive(rng):
    for _ in range(30):
        k = int(rng.integers(1, 4))
        a = random_psd(rng, k)
        assert loewner_leq(a, a)
        b = a + random_psd(rng, k)
        c = b + random_psd(rng, k)
        assert loewner_leq(a, b) and loewner_leq(b, c)
        assert loewner_leq(a, c)


def test_kernel_dim_identity():
    assert kernel_dim(np.eye(4)) == 0


def test_kernel_dim_zero_matrix():
    assert kernel_dim(np.zeros((4, 4))) == 4


def test_kernel_dim_single_edge_laplacian():
    # L = [[W, -W], [-W, W]] with W = a; oracle: direct eigendecomposition
    L = np.block([[FRAME_A, -FRAME_A], [-FRAME_A, FRAME_A]])
    values = np.linalg.eigvalsh(L)
    oracle = int(np.sum(values <= 1e-10 * max(1.0, values[-1])))
    assert oracle == 3
    assert kernel_dim(L) == 3


def test_kernel_plus_rank(rng):
    for _ in range(40):
        k = int(rng.integers(1, 6))
        rank = int(rng.integers(0, k + 1))
        m = random_psd(rng, k, rank) if rank else np.zeros((k, k))
        assert kernel_dim(m) + rank_psd(m) == k
        assert rank_psd(m) == rank


def test_rank_cutoff_is_relative():
    # scaling must not change the detected rank
    m = np.diag([1.0, 1e-16])
    assert kernel_dim(m) == 1
    assert kernel_dim(1e12 * m) == 1
