"""Iterative extraction of a rightmost factor / right solvent.

Three schemes share one stopping contract (relative step δ in percent must
fall below η AND the relative residual must fall below the residual guard):

* plain Block Horner: the fixed-point map X' = -inv(B_{l-1}(X)) A_l, where
  B_{l-1} is the last quotient coefficient of right synthetic division by
  (λI - X); linear convergence;
* Newton-Horner: a true Newton step on A_R(X) = 0 through the explicit
  m² x m² Fréchet matrix; quadratic convergence near simple solvents;
* two-stage Block Horner: double synthetic division producing B_l = A_R(X)
  and C_{l-1} (the matrix analogue of p'(x)); X' = X - B_l inv(C_{l-1}).
  At m = 1 this is exactly scalar Newton; for matrices the one-sided C_{l-1}
  differs from the Fréchet derivative, so convergence is linear.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    InsufficientTrace,
    NoConvergence,
    SingularALast,
    SingularFrechet,
    SingularMatrix,
    SingularStep,
    StagnantWithoutResidual,
)
from .polynomial import MatrixPolynomial, eval_right

#: Relative residual guard: an iterate only counts as converged below this.
RESIDUAL_GUARD = 1e-8

#: Residual above which a δ-stall is reported as false convergence.
STAGNATION_RESIDUAL = 1e-4

#: Consecutive small-δ, non-improving iterations before declaring stagnation.
STAGNATION_WINDOW = 25


@dataclass
class IterConfig:
    """Initial guess and stopping thresholds for the iterative solvers."""

    x0: np.ndarray | None = None
    eta: float = 1e-8          # percent threshold on δ
    max_iterations: int = 500

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class ConvergenceTrace:
    """Per-iteration record shared by the Horner-family solvers."""

    iterates: list = field(default_factory=list)
    deltas: list = field(default_factory=list)       # δ_k in percent
    residuals: list = field(default_factory=list)    # ||A_R(X_k)||_F
    ratios: list = field(default_factory=list)       # successive δ ratios

    def append(self, x, delta_pct, residual):
        self.iterates.append(np.array(x))
        if self.deltas and self.deltas[-1] > 0:
            self.ratios.append(delta_pct / self.deltas[-1])
        else:
            self.ratios.append(float("nan"))
        self.deltas.append(delta_pct)
        self.residuals.append(residual)


def default_guess(p: MatrixPolynomial, jitter_seed: int = 0) -> np.ndarray:
    """ε-perturbed scaled identity: (-trace(A_1)/(l·m)) I plus 1e-3 jitter."""
    scale = -float(np.trace(p.coeffs[1])) / (p.l * p.m)
    rng = np.random.default_rng(jitter_seed)
    jitter = 1e-3 * max(1.0, abs(scale)) * rng.standard_normal((p.m, p.m))
    return scale * np.eye(p.m) + jitter


def _delta_pct(x_new, x_old) -> float:
    denom = max(linalg.frob_norm(x_old), 1e-300)
    return 100.0 * linalg.frob_norm(x_new - x_old) / denom


def _run_iteration(p, cfg, step, step_error):
    """Shared driver: apply ``step`` until the dual stopping criterion holds."""
    p.require_monic()
    x = linalg.as_matrix(cfg.x0) if cfg.x0 is not None else default_guess(p)
    if x.shape != (p.m, p.m):
        raise DimensionMismatch(f"x0 must be {p.m}x{p.m}")
    scale = p.coefficient_scale()
    trace = ConvergenceTrace()
    res = linalg.frob_norm(eval_right(p, x))
    trace.append(x, float("nan"), res)
    if res / scale <= RESIDUAL_GUARD:
        return x, trace
    stagnant = 0
    best_res = res
    for _ in range(cfg.max_iterations):
        try:
            x_new = step(x)
        except SingularMatrix as exc:
            raise step_error(str(exc)) from exc
        delta = _delta_pct(x_new, x)
        res = linalg.frob_norm(eval_right(p, x_new))
        trace.append(x_new, delta, res)
        x = x_new
        rel = res / scale
        if delta <= cfg.eta and rel <= RESIDUAL_GUARD:
            return x, trace
        if delta <= cfg.eta:
            # δ says converged but the residual does not: only flag false
            # convergence once the residual also stops improving.
            if res >= best_res * 0.99:
                stagnant += 1
            else:
                stagnant = 0
            if stagnant >= STAGNATION_WINDOW and rel > STAGNATION_RESIDUAL:
                raise StagnantWithoutResidual(
                    f"step sizes below η={cfg.eta}% but relative residual "
                    f"stuck at {rel:.3e}",
                    trace=trace,
                )
        best_res = min(best_res, res)
    raise NoConvergence(
        f"no convergence in {cfg.max_iterations} iterations "
        f"(last δ={trace.deltas[-1]:.3e}%, relative residual "
        f"{trace.residuals[-1] / scale:.3e})",
        trace=trace,
    )


def horner_b_coefficients(p: MatrixPolynomial, x):
    """Quotient coefficients B_0..B_{l-1} and remainder B_l = A_R(X)."""
    b = [p.coeffs[0].copy()]
    for k in range(1, p.l + 1):
        b.append(p.coeffs[k] + b[-1] @ x)
    return b


def horner_iterate(p: MatrixPolynomial, cfg: IterConfig | None = None):
    """Plain Block Horner fixed-point iteration X' = -inv(B_{l-1}(X)) A_l."""
    cfg = cfg or IterConfig()

    def step(x):
        b = horner_b_coefficients(p, x)
        return -linalg.solve(b[p.l - 1], p.coeffs[p.l])

    return _run_iteration(p, cfg, step, SingularStep)


def frechet_matrix(p: MatrixPolynomial, x) -> np.ndarray:
    """The m² x m² matrix J with vec(dA_R(X; H)) = J vec(H).

    Assembled from the product rule on Σ A_i X^{l-i}:
    J = Σ_{i=0}^{l-1} Σ_{j=0}^{l-i-1} kron((X^{l-i-1-j})^T, A_i X^j).
    """
    x = linalg.as_matrix(x)
    if x.shape != (p.m, p.m):
        raise DimensionMismatch(f"x must be {p.m}x{p.m}")
    m, l = p.m, p.l
    powers = [np.eye(m)]
    for _ in range(l):
        powers.append(powers[-1] @ x)
    j = np.zeros((m * m, m * m))
    for i in range(l):
        for k in range(l - i):
            j += linalg.kron(powers[l - i - 1 - k].T, p.coeffs[i] @ powers[k])
    return j


def newton_horner(p: MatrixPolynomial, cfg: IterConfig | None = None):
    """Newton iteration on A_R(X) = 0 via the explicit Fréchet matrix.

    Quadratic residual decay near a solvent with nonsingular Fréchet
    derivative.
    """
    cfg = cfg or IterConfig()
    p.require_monic()
    try:
        linalg.invert(p.coeffs[p.l])
    except SingularMatrix as exc:
        raise SingularALast(str(exc)) from exc

    def step(x):
        residual = eval_right(p, x)
        try:
            correction = linalg.solve(frechet_matrix(p, x), linalg.vec(residual))
        except SingularMatrix as exc:
            raise SingularFrechet(str(exc)) from exc
        return x - linalg.unvec(correction, p.m, p.m)

    return _run_iteration(p, cfg, step, SingularStep)


def two_stage_c_coefficient(p: MatrixPolynomial, x):
    """(B_l, C_{l-1}) from the double synthetic-division table."""
    b = horner_b_coefficients(p, x)
    c = b[0].copy()
    for k in range(1, p.l):
        c = b[k] + c @ x
    return b[p.l], c


def two_stage_delta(p: MatrixPolynomial, x) -> np.ndarray:
    """Δ(X) = l X^{l-1} + (l-1) A_1 X^{l-2} + ... + A_{l-1}."""
    m, l = p.m, p.l
    powers = [np.eye(m)]
    for _ in range(l - 1):
        powers.append(powers[-1] @ x)
    d = np.zeros((m, m))
    for i in range(l):
        d += (l - i) * p.coeffs[i] @ powers[l - 1 - i]
    return d


def two_stage(p: MatrixPolynomial, cfg: IterConfig | None = None,
              variant: str = "qchain"):
    """Two-stage Block Horner: X' = X - A_R(X) inv(C_{l-1}(X)).

    ``variant`` selects the divisor: "qchain" uses the double-division
    C_{l-1}; "delta" uses the closed-form Δ(X).  The two coincide for the
    right-power coefficient layout used here; both reduce to scalar Newton
    at m = 1.
    """
    cfg = cfg or IterConfig()
    if variant not in ("qchain", "delta"):
        raise ValueError("variant must be 'qchain' or 'delta'")

    def step(x):
        if variant == "qchain":
            bl, c = two_stage_c_coefficient(p, x)
        else:
            bl = eval_right(p, x)
            c = two_stage_delta(p, x)
        return x - bl @ linalg.invert(c)

    return _run_iteration(p, cfg, step, SingularStep)


@dataclass
class BoundsReport:
    """Residual sandwich check on the tail of a plain-Horner trace."""

    gamma: float = 0.0           # ||A_l^{-1}||
    delta_norm: float = 0.0      # ||A_l||
    m_sup: float = 0.0           # sup ||X_k|| over the tail
    n_sup: float = 0.0           # sup ||X_k^{-1}|| over the tail
    sandwich_holds: bool = False
    lower_margins: list = field(default_factory=list)
    upper_margins: list = field(default_factory=list)
    ratio_trend: list = field(default_factory=list)


def convergence_bounds_check(p: MatrixPolynomial, trace: ConvergenceTrace,
                             tail: int = 5) -> BoundsReport:
    """Verify the residual sandwich ξ_k/(γ M) style bounds on a trace tail.

    The exact identity behind the bounds: for the plain Horner step,
    X_{k+1} - X_k = X_k inv(A_l - A_R(X_k)) A_R(X_k), hence with
    ξ_k = ||X_{k+1} - X_k||,

        ξ_k / (||X_k|| ||inv(A_l - A_R)||)  <=  ||A_R(X_k)||
                                            <=  ||A_l - A_R|| ||X_k^{-1}|| ξ_k.

    Also reports the successive-error ratio trend (→ 1 for the linear plain
    scheme, well below 1 for Newton).
    """
    if len(trace.iterates) < max(tail, 5):
        raise InsufficientTrace(
            f"need at least {max(tail, 5)} iterates, got {len(trace.iterates)}"
        )
    report = BoundsReport()
    report.delta_norm = linalg.frob_norm(p.coeffs[p.l])
    report.gamma = linalg.frob_norm(linalg.invert(p.coeffs[p.l]))
    xs = trace.iterates[-tail - 1:]
    report.m_sup = max(linalg.frob_norm(x) for x in xs)
    report.n_sup = max(linalg.frob_norm(linalg.invert(x)) for x in xs)
    ok = True
    for k in range(len(xs) - 1):
        xk, xk1 = xs[k], xs[k + 1]
        xi = linalg.frob_norm(xk1 - xk)
        residual = linalg.frob_norm(eval_right(p, xk))
        shifted = p.coeffs[p.l] - eval_right(p, xk)
        lower = xi / (linalg.frob_norm(xk) * linalg.frob_norm(linalg.invert(shifted)))
        upper = (linalg.frob_norm(shifted) * linalg.frob_norm(linalg.invert(xk)) * xi)
        slack = 1e-9 * max(1.0, residual)
        report.lower_margins.append(residual - lower)
        report.upper_margins.append(upper - residual)
        if residual + slack < lower or residual > upper + slack:
            ok = False
    report.sandwich_holds = ok
    tail_deltas = [d for d in trace.deltas[-tail:] if np.isfinite(d) and d > 0]
    report.ratio_trend = [
        tail_deltas[i + 1] / tail_deltas[i] for i in range(len(tail_deltas) - 1)
    ]
    return report
