import numpy as np
import pytest

from blockpoly import linalg
from blockpoly.errors import NotMonic
from blockpoly.polynomial import (
    MatrixPolynomial,
    SolventSet,
    SpectralFactorChain,
    block_vandermonde,
    companion_c3,
    companion_left,
    companion_right,
    eval_left,
    eval_right,
    is_complete_set,
    latent_roots,
    reconstruct,
    scalar_polynomial,
    synthetic_div_left,
    synthetic_div_right,
)

RNG = np.random.default_rng(11)


def linear_poly(c):
    return MatrixPolynomial([np.eye(len(c)), -np.asarray(c, dtype=float)])


def test_eval_right_linear_at_root():
    c = RNG.standard_normal((2, 2))
    assert np.allclose(eval_right(linear_poly(c), c), 0.0)


def test_eval_left_linear_at_root():
    c = RNG.standard_normal((2, 2))
    assert np.allclose(eval_left(linear_poly(c), c), 0.0)


def test_eval_scalar_case():
    p = scalar_polynomial([1.0, -3.0, 2.0])
    assert eval_right(p, [[2.0]])[0, 0] == pytest.approx(0.0)
    assert eval_left(p, [[2.0]])[0, 0] == pytest.approx(0.0)


def test_eval_right_example3_base_matrix(example3):
    w = np.array([[-7.1230, -6.3246], [5.9279, 5.1230]])
    # coefficients carry 4 printed digits, so the residual is O(1e-3)
    assert linalg.frob_norm(eval_right(example3, w)) < 2e-3


def test_eval_left_example1_left_solvent(example1):
    l1 = np.array([[32.443, -3.5284], [286.622, -31.2773]])
    rel = linalg.frob_norm(eval_left(example1, l1)) / linalg.frob_norm(
        example1.coeffs[3]
    )
    assert rel < 1e-2


def test_synthetic_div_right_two_factor():
    c = RNG.standard_normal((2, 2))
    d = RNG.standard_normal((2, 2))
    p = MatrixPolynomial([np.eye(2), -(c + d), d @ c])
    q, rem = synthetic_div_right(p, c)
    assert np.allclose(rem, 0.0, atol=1e-12)
    assert np.allclose(q.coeffs[0], np.eye(2))
    assert np.allclose(q.coeffs[1], -d)


def test_synthetic_div_remainder_is_eval():
    for _ in range(5):
        p = MatrixPolynomial([np.eye(2)] + [RNG.standard_normal((2, 2)) for _ in range(3)])
        x = RNG.standard_normal((2, 2))
        _, rem_r = synthetic_div_right(p, x)
        _, rem_l = synthetic_div_left(p, x)
        assert np.allclose(rem_r, eval_right(p, x))
        assert np.allclose(rem_l, eval_left(p, x))


def test_division_identity_at_scalars():
    for _ in range(3):
        p = MatrixPolynomial([np.eye(2)] + [RNG.standard_normal((2, 2)) for _ in range(3)])
        x = RNG.standard_normal((2, 2))
        q, rem = synthetic_div_right(p, x)
        s, rem_l = synthetic_div_left(p, x)
        for lam in RNG.standard_normal(10):
            a_lam = p.eval_scalar(lam)
            q_lam = q.eval_scalar(lam)
            s_lam = s.eval_scalar(lam)
            assert (
                linalg.frob_norm(a_lam - (q_lam @ (lam * np.eye(2) - x) + rem)) < 1e-8
            )
            assert (
                linalg.frob_norm(a_lam - ((lam * np.eye(2) - x) @ s_lam + rem_l)) < 1e-8
            )


def test_scalar_division_left_right_agree():
    p = scalar_polynomial([1.0, 2.0, -5.0, 1.0])
    x = [[0.7]]
    qr, rr = synthetic_div_right(p, x)
    ql, rl = synthetic_div_left(p, x)
    assert np.allclose(rr, rl)
    for a, b in zip(qr.coeffs, ql.coeffs):
        assert np.allclose(a, b)


def test_companion_scalar():
    p = scalar_polynomial([1.0, -3.0, 2.0])
    assert np.allclose(companion_right(p), [[0.0, 1.0], [-2.0, 3.0]])
    got = np.sort_complex(linalg.eigvals(companion_right(p)))
    assert np.allclose(got, [1.0, 2.0])


def test_companion_left_is_block_transpose(example1):
    a_r = companion_right(example1)
    a_l = companion_left(example1)
    m, l = example1.m, example1.l
    for i in range(l):
        for j in range(l):
            blk_r = a_r[i * m:(i + 1) * m, j * m:(j + 1) * m]
            blk_l = a_l[j * m:(j + 1) * m, i * m:(i + 1) * m]
            assert np.allclose(blk_l, blk_r)


def test_companion_c3_structure(example1):
    c3 = companion_c3(example1)
    m, l = example1.m, example1.l
    for i in range(l):
        blk = c3[i * m:(i + 1) * m, 0:m]
        assert np.allclose(blk, -example1.coeffs[i + 1])
    # same spectrum as the right companion form
    assert np.allclose(
        np.sort_complex(linalg.eigvals(c3)),
        np.sort_complex(linalg.eigvals(companion_right(example1))),
    )


def test_companion_requires_monic():
    p = MatrixPolynomial([2 * np.eye(2), np.eye(2)])
    with pytest.raises(NotMonic):
        companion_right(p)


def test_block_vandermonde_trivial():
    s = SolventSet("right", [RNG.standard_normal((3, 3))])
    assert np.allclose(block_vandermonde(s), np.eye(3))


def test_block_vandermonde_scalar():
    s = SolventSet("right", [[[1.0]], [[2.0]]])
    assert np.allclose(block_vandermonde(s), [[1.0, 1.0], [1.0, 2.0]])


def test_is_complete_set_scalar():
    p = scalar_polynomial([1.0, -3.0, 2.0])
    good = is_complete_set(p, SolventSet("right", [[[1.0]], [[2.0]]]))
    assert good.complete
    bad = is_complete_set(p, SolventSet("right", [[[1.0]], [[1.0]]]))
    assert not bad.pairwise_disjoint
    assert abs(bad.vandermonde_det) < 1e-12
    assert not bad.complete


def test_reconstruct_single_factor():
    q = RNG.standard_normal((2, 2))
    p = reconstruct(SpectralFactorChain([q]))
    assert np.allclose(p.coeffs[0], np.eye(2))
    assert np.allclose(p.coeffs[1], -q)


def test_reconstruct_two_factor_expansion():
    c = RNG.standard_normal((2, 2))
    d = RNG.standard_normal((2, 2))
    p = reconstruct(SpectralFactorChain([c, d]))  # (λI-D)(λI-C)
    assert np.allclose(p.coeffs[1], -(c + d))
    assert np.allclose(p.coeffs[2], d @ c)


def test_rightmost_factor_is_right_solvent():
    chain = SpectralFactorChain([RNG.standard_normal((2, 2)) for _ in range(3)])
    p = reconstruct(chain)
    assert linalg.frob_norm(eval_right(p, chain.factors[0])) < 1e-10
    assert linalg.frob_norm(eval_left(p, chain.factors[-1])) < 1e-10


def test_latent_roots_trivial():
    p = linear_poly(np.diag([1.0, 2.0]))
    assert np.allclose(np.sort_complex(latent_roots(p)), [1.0, 2.0])


def test_latent_roots_scalar_complex():
    p = scalar_polynomial([1.0, 0.0, 1.0])
    assert np.allclose(np.sort_complex(latent_roots(p)), [-1j, 1j])


def test_latent_roots_union_of_factor_spectra():
    from conftest import random_chain, spectrum_pair_error

    chain = random_chain(2, 3, np.random.default_rng(5))
    union = np.concatenate([np.linalg.eigvals(q) for q in chain.factors])
    got = latent_roots(reconstruct(chain))
    assert spectrum_pair_error(got, union) < 1e-6


def test_latent_roots_example3_repeated(example3):
    w_eigs = np.linalg.eigvals(np.array([[-7.1230, -6.3246], [5.9279, 5.1230]]))
    got = np.sort_complex(latent_roots(example3))
    want = np.sort_complex(np.concatenate([w_eigs, w_eigs]))
    assert np.max(np.abs(got - want)) < 0.1  # 4-digit data, defective eigenvalues
