"""Langevin diffusion matrix from the generalized Einstein relation.

The force correlations are anti-normally ordered over the flat operator
index, <f_p f_r^dag> = (L/N) 2 D[p, r] delta delta, and D follows from the
drift matrix and the stationary mean values alone:

    2 D[ij, kl] = - sum_m A[ij, km] <sigma_lm>
                  - sum_m A[lk, mi] <sigma_mj>
                  - gamma (sigma0_ij <sigma_lk> + <sigma_ij> sigma0_lk)

(the drift mean of the contracted product sigma_ij sigma_kl^dag vanishes by
stationarity).  D is Hermitian in the pair indices; the raw assembly is
symmetrized and the floating-point residual logged.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .liouville import LiouvilleSystem, SteadyState, _sigma0

__all__ = ["DiffusionMatrix", "diffusion_matrix"]

log = logging.getLogger(__name__)

# Stationarity is an assumption of the Einstein relation, not a convenience.
BLOCH_RESIDUAL_TOL = 1e-8


def _assemble_diffusion(a: np.ndarray, rho: np.ndarray, s0: np.ndarray, gamma: float) -> np.ndarray:
    """Raw Einstein-relation matrix; linear in the mean values rho."""
    d = rho.shape[0]
    a4 = a.reshape(d, d, d, d)
    two_d = -np.einsum("ijkm,lm->ijkl", a4, rho)
    two_d -= np.einsum("lkmi,mj->ijkl", a4, rho)
    two_d -= gamma * np.einsum("ij,lk->ijkl", s0.astype(complex), rho)
    two_d -= gamma * np.einsum("ij,lk->ijkl", rho, s0.astype(complex))
    return two_d.reshape(d * d, d * d) / 2.0


@dataclass(frozen=True)
class DiffusionMatrix:
    """n x n diffusion matrix over the shared flat operator indexing."""

    D: np.ndarray = field(repr=False)
    hermitization_residual: float = 0.0

    @property
    def matrix(self) -> np.ndarray:
        return self.D


def diffusion_matrix(sys: LiouvilleSystem, steady: SteadyState) -> DiffusionMatrix:
    """Evaluate the diffusion matrix at the steady state of the system.

    Raises ``ValueError`` if the supplied mean values are not stationary to
    within ``BLOCH_RESIDUAL_TOL`` (the Einstein relation assumes a vanishing
    drift mean for every operator product).
    """
    x = steady.sigma_mean
    residual = np.max(np.abs(sys.A @ x + sys.pump))
    if residual > BLOCH_RESIDUAL_TOL:
        raise ValueError(
            f"mean values are not stationary (Bloch residual {residual:.2e} "
            f"> {BLOCH_RESIDUAL_TOL:.0e}); the Einstein relation does not apply"
        )

    d = sys.spec.dim
    raw = _assemble_diffusion(
        sys.A, steady.rho, _sigma0(sys.spec), sys.spec.gamma * sys.spec.Gamma
    )
    sym_residual = float(np.max(np.abs(raw - raw.conj().T)))
    if sym_residual > 1e-12 * max(1.0, float(np.max(np.abs(raw)))):
        log.debug("diffusion matrix hermitization residual %.3e", sym_residual)
    matrix = (raw + raw.conj().T) / 2.0
    return DiffusionMatrix(D=matrix, hermitization_residual=sym_residual)
