"""Similarity-transform conversions between chains and solvent sets.

Chain storage is rightmost-first throughout (``factors[0]`` is the rightmost
factor of the product).  The chain→solvent transforms process the chain from
its LEFTMOST factor inward: factor Q is pulled out of the current polynomial
by synthetic division on the matching side, the remaining (deflated)
coefficients A_{ji} build an m² x m² Kronecker system

    G = Σ_j kron((Q^{d-j})^T, A_{ji})        (right solvents)
    H = Σ_j kron(A_{ji}^T, Q^{d-j})          (left solvents)

whose solution against vec(I) gives the similarity P with R = P Q P^{-1}
(resp. L = S^{-1} Q S).  Output solvent sets are indexed so that R_i and L_i
share spectrum (index 1 carries the leftmost factor's spectrum, matching the
worked-example ordering R_l = rightmost factor = right solvent).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    DeflationResidualLarge,
    IncompleteSet,
    InputNotSolvent,
    RankDeficientTransformer,
    ResidualTooLarge,
    SingularKroneckerSystem,
    SingularMatrix,
    SpectrumOverlap,
)
from .polynomial import (
    MatrixPolynomial,
    SolventSet,
    SpectralFactorChain,
    eval_left,
    eval_right,
    residual_left,
    residual_right,
    synthetic_div_left,
    synthetic_div_right,
)

#: Default relative-residual gate for matrices claimed to be solvents/factors.
SOLVENT_GATE = 1e-6

#: |det| below this (relative to norm scale) fails the rank-m check.
RANK_TOL = 1e-10


@dataclass
class TransformResult:
    """A transform output together with its similarity matrix and residual."""

    output: object
    transformer: np.ndarray
    rank_ok: bool
    residual: float


def _rank_check(t: np.ndarray) -> bool:
    scale = max(1.0, linalg.frob_norm(t) ** t.shape[0])
    return abs(linalg.det(t)) > RANK_TOL * scale


def right_to_left_solvent(p: MatrixPolynomial, r, gate: float = SOLVENT_GATE) -> TransformResult:
    """Convert a right solvent R into a left solvent L = Q^{-1} R Q.

    vec(Q) solves (Σ B_i^T ⊗ R^{l-1-i}) vec(Q) = vec(I) with B_i the quotient
    coefficients of A(λ) divided by (λI - R) on the right.
    """
    p.require_monic()
    r = linalg.as_matrix(r)
    if residual_right(p, r) > gate:
        raise InputNotSolvent(
            f"right-solvent residual {residual_right(p, r):.3e} exceeds gate {gate:.1e}"
        )
    quotient, _ = synthetic_div_right(p, r)
    m, l = p.m, p.l
    powers = [np.eye(m)]
    for _ in range(l - 1):
        powers.append(powers[-1] @ r)
    system = np.zeros((m * m, m * m))
    for i in range(l):
        system += linalg.kron(quotient.coeffs[i].T, powers[l - 1 - i])
    try:
        vec_q = linalg.solve(system, linalg.vec(np.eye(m)))
    except SingularMatrix as exc:
        raise SingularKroneckerSystem(str(exc)) from exc
    q = linalg.unvec(vec_q, m, m)
    if not _rank_check(q):
        raise RankDeficientTransformer(0, "similarity matrix Q is rank deficient")
    left = linalg.solve(q, r @ q)
    return TransformResult(
        output=left,
        transformer=q,
        rank_ok=True,
        residual=residual_left(p, left),
    )


def _check_disjoint(chain: SpectralFactorChain, tol: float = 1e-6):
    spectra = [linalg.eigvals(f) for f in chain.factors]
    scale = max(1.0, max(float(np.max(np.abs(s))) for s in spectra))
    for i in range(len(spectra)):
        for j in range(i + 1, len(spectra)):
            d = np.min(np.abs(spectra[i][:, None] - spectra[j][None, :]))
            if d <= tol * scale:
                raise SpectrumOverlap(
                    f"factors {i} and {j} share spectrum (min gap {d:.3e})"
                )


def chain_to_right_solvents(p: MatrixPolynomial, chain: SpectralFactorChain,
                            gate: float = SOLVENT_GATE) -> SolventSet:
    """Recover the complete right solvent set from a factor chain.

    Processes the chain leftmost-first; each step left-divides the current
    polynomial by (λI - Q), solves the G-system for P, and emits
    R = P Q P^{-1}.  Output index 1 carries the leftmost factor's spectrum;
    the last output equals the rightmost factor (P = I there).
    """
    p.require_monic()
    _check_disjoint(chain)
    current = p
    solvents = []
    scale = p.coefficient_scale()
    for step, q in enumerate(reversed(chain.factors)):
        d = current.l - 1
        if d == 0:
            solvents.append(np.array(q))
            break
        quotient, remainder = synthetic_div_left(current, q)
        rem = linalg.frob_norm(remainder) / scale
        if rem > max(gate, 1e-6):
            raise DeflationResidualLarge(step, rem)
        m = p.m
        powers = [np.eye(m)]
        for _ in range(d):
            powers.append(powers[-1] @ q)
        g = np.zeros((m * m, m * m))
        for j in range(d + 1):
            g += linalg.kron(powers[d - j].T, quotient.coeffs[j])
        try:
            vec_p = linalg.solve(g, linalg.vec(np.eye(m)))
        except SingularMatrix as exc:
            raise SingularKroneckerSystem(str(exc)) from exc
        pmat = linalg.unvec(vec_p, m, m)
        if not _rank_check(pmat):
            raise RankDeficientTransformer(step)
        solvents.append(pmat @ q @ linalg.invert(pmat))
        current = quotient
    return SolventSet("right", solvents)


def chain_to_left_solvents(p: MatrixPolynomial, chain: SpectralFactorChain,
                           gate: float = SOLVENT_GATE) -> SolventSet:
    """Recover the complete left solvent set from a factor chain.

    Mirror of :func:`chain_to_right_solvents`: processes rightmost-first with
    right synthetic division and the H-system, emitting L = S^{-1} Q S.  The
    output is reversed at the end so L_i pairs in spectrum with R_i.
    """
    p.require_monic()
    _check_disjoint(chain)
    current = p
    solvents = []
    scale = p.coefficient_scale()
    for step, q in enumerate(chain.factors):
        d = current.l - 1
        if d == 0:
            solvents.append(np.array(q))
            break
        quotient, remainder = synthetic_div_right(current, q)
        rem = linalg.frob_norm(remainder) / scale
        if rem > max(gate, 1e-6):
            raise DeflationResidualLarge(step, rem)
        m = p.m
        powers = [np.eye(m)]
        for _ in range(d):
            powers.append(powers[-1] @ q)
        h = np.zeros((m * m, m * m))
        for j in range(d + 1):
            h += linalg.kron(quotient.coeffs[j].T, powers[d - j])
        try:
            vec_s = linalg.solve(h, linalg.vec(np.eye(m)))
        except SingularMatrix as exc:
            raise SingularKroneckerSystem(str(exc)) from exc
        smat = linalg.unvec(vec_s, m, m)
        if not _rank_check(smat):
            raise RankDeficientTransformer(step)
        solvents.append(linalg.solve(smat, q @ smat))
        current = quotient
    return SolventSet("left", list(reversed(solvents)))


def right_solvents_to_chain(p: MatrixPolynomial, s: SolventSet) -> SpectralFactorChain:
    """Build a factor chain from a complete right solvent set.

    Runs the recursion N_0(R_j) = I,
    Q_k = N_{k-1}(R_k) R_k N_{k-1}(R_k)^{-1},
    N_k(R_j) = N_{k-1}(R_j) R_j - Q_k N_{k-1}(R_j); Q_1 = R_1 becomes the
    rightmost factor, so the chain is emitted in recursion order.
    """
    p.require_monic()
    if s.side != "right" or len(s) != p.l:
        raise IncompleteSet(
            f"need a complete right set of {p.l} solvents, got {len(s)} ({s.side})"
        )
    m = p.m
    n_mats = [np.eye(m) for _ in range(p.l)]
    factors = []
    for k in range(p.l):
        nk = n_mats[k]
        if not _rank_check(nk):
            raise RankDeficientTransformer(k)
        qk = nk @ s.solvents[k] @ linalg.invert(nk)
        factors.append(qk)
        for j in range(k + 1, p.l):
            n_mats[j] = n_mats[j] @ s.solvents[j] - qk @ n_mats[j]
    return SpectralFactorChain(factors)


def left_solvents_to_chain(p: MatrixPolynomial, s: SolventSet) -> SpectralFactorChain:
    """Mirror of :func:`right_solvents_to_chain` for a complete left set.

    Recursion M_0(L_j) = I, Q_k = M_{k-1}(L_k)^{-1} L_k M_{k-1}(L_k),
    M_k(L_j) = L_j M_{k-1}(L_j) - M_{k-1}(L_j) Q_k; Q from L_1 is the
    LEFTMOST factor, so the collected factors are reversed into
    rightmost-first storage.
    """
    p.require_monic()
    if s.side != "left" or len(s) != p.l:
        raise IncompleteSet(
            f"need a complete left set of {p.l} solvents, got {len(s)} ({s.side})"
        )
    m = p.m
    m_mats = [np.eye(m) for _ in range(p.l)]
    factors = []
    for k in range(p.l):
        mk = m_mats[k]
        if not _rank_check(mk):
            raise RankDeficientTransformer(k)
        qk = linalg.solve(mk, s.solvents[k] @ mk)
        factors.append(qk)
        for j in range(k + 1, p.l):
            m_mats[j] = s.solvents[j] @ m_mats[j] - m_mats[j] @ qk
    return SpectralFactorChain(list(reversed(factors)))


def deflate_right(p: MatrixPolynomial, q, gate_rtol: float = SOLVENT_GATE) -> MatrixPolynomial:
    """Divide out a rightmost factor, gating on the discarded remainder."""
    rel = residual_right(p, q)
    if rel > gate_rtol:
        raise ResidualTooLarge(
            f"deflation gate: relative remainder {rel:.3e} exceeds {gate_rtol:.1e}"
        )
    quotient, _ = synthetic_div_right(p, q)
    return quotient
