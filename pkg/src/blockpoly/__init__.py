"""blockpoly: spectral factorization of monic matrix polynomials.

Factorizes λ-matrices into complete sets of spectral factors and solvents via
the block quotient-difference algorithm and block Horner iterations, converts
between factor chains and solvent sets by similarity transforms, and applies
the machinery to block-pole-placement decoupling of MIMO systems.
"""

from .polynomial import (
    MatrixPolynomial,
    SolventSet,
    SpectralFactorChain,
    eval_left,
    eval_right,
    latent_roots,
    reconstruct,
)
from .qd import QDConfig, qd_run
from .horner import IterConfig, frechet_matrix, horner_iterate, newton_horner, two_stage
from .transforms import (
    chain_to_left_solvents,
    chain_to_right_solvents,
    left_solvents_to_chain,
    right_solvents_to_chain,
    right_to_left_solvent,
)
from .pipeline import PipelineConfig, full_factorize, full_solvent_sets, verify
from .decoupler import MFDSystem, closed_loop_eval, controller_form, design_decoupling

__version__ = "0.1.0"

__all__ = [
    "MatrixPolynomial", "SpectralFactorChain", "SolventSet",
    "eval_right", "eval_left", "reconstruct", "latent_roots",
    "QDConfig", "qd_run",
    "IterConfig", "horner_iterate", "newton_horner", "two_stage",
    "frechet_matrix",
    "chain_to_right_solvents", "chain_to_left_solvents",
    "right_solvents_to_chain", "left_solvents_to_chain",
    "right_to_left_solvent",
    "PipelineConfig", "full_factorize", "full_solvent_sets", "verify",
    "MFDSystem", "design_decoupling", "closed_loop_eval", "controller_form",
]
