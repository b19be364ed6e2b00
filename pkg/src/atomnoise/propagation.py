"""Propagation of the 4x4 field spectral-density matrix through the medium.

The spectral density S is expressed over the field-operator basis
(a1, a1^dag, a2, a2^dag) in shot-noise units (vacuum/coherent input has
S = diag(1, 0, 1, 0)).  With the medium length and Gamma scaled out, the
output at noise frequency omega is

    S(L) = E S(0) E^dag + C (X - E X E^dag),      E = expm(Kh),

where Kh = C * Gamma * G V is the dimensionless gain/absorption exponent,
G = W M^{-1} with M = -(i omega I + A), and X solves the Sylvester equation

    -(Kh X + X Kh^dag) = 2 Gamma G D G^dag.

The first term is the semiclassical response to the mean atomic
polarization (it alone can squeeze); the second is the noise added by the
atomic quantum fluctuations and is always positive semidefinite.  The free
i*omega/c phase proportional to the identity commutes with everything and
cancels between the exponential pairs, so it is dropped from the exponent.

Doppler averaging replaces G V and G D G^dag by fixed-quadrature velocity
averages over the thermal distribution; Langevin forces of distinct
velocity classes are uncorrelated, so the same assembly applies to the
averaged matrices.  The velocity quadrature is composite Gauss-Legendre on
a +/-6 sigma truncation of the Gaussian (renormalized to unit weight): the
velocity response has Lorentzian-like tails whose near-axis poles defeat
Gauss-Hermite convergence, while panelized Gauss-Legendre converges
geometrically once the panel width resolves the power-broadened features.
The node count is doubled until the scan is stable.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import expm, lu_factor, lu_solve
from scipy.linalg.lapack import zgecon
from scipy.special import roots_legendre

from .atomic import AtomSpec
from .diffusion import diffusion_matrix
from .liouville import DriveSpec, LiouvilleSystem, SteadyState, build_system, steady_state

__all__ = [
    "MediumSpec",
    "DopplerSpec",
    "PropagationResult",
    "IllConditionedResponseError",
    "SylvesterNearSingularError",
    "QuadratureConvergenceError",
    "vacuum_input",
    "response_G",
    "sylvester_solve",
    "output_spectrum",
    "VelocityFamily",
    "doppler_spectrum",
    "doppler_scan_converged",
    "velocity_quadrature",
]

log = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12


class IllConditionedResponseError(RuntimeError):
    """M = -(i omega I + A) too ill-conditioned for a reliable response."""


class SylvesterNearSingularError(RuntimeError):
    """An eigenvalue pair of K sums to (nearly) zero with its conjugate."""


class QuadratureConvergenceError(RuntimeError):
    def __init__(self, message: str, suggested_nodes: int):
        super().__init__(message)
        self.suggested_nodes = suggested_nodes


@dataclass(frozen=True)
class DopplerSpec:
    """Thermal velocity averaging parameters.

    width_fwhm is the FWHM of the Gaussian distribution of Doppler shifts
    k*v_z, in units of Gamma.  ``nodes`` is the initial velocity-quadrature
    node count; it is doubled until the scan changes by less than
    ``rel_tol`` (relative, Frobenius) or ``max_nodes`` is exceeded.
    """

    width_fwhm: float
    nodes: int = 96
    rel_tol: float = 1e-4
    max_nodes: int = 6144

    def __post_init__(self) -> None:
        if self.width_fwhm <= 0:
            raise ValueError("Doppler width_fwhm must be positive")
        if self.nodes < 1:
            raise ValueError("node count must be >= 1")


@dataclass(frozen=True)
class MediumSpec:
    """Optically thick medium: cooperativity and optional Doppler settings."""

    C: float
    doppler: DopplerSpec | None = None

    def __post_init__(self) -> None:
        if self.C < 0:
            raise ValueError("cooperativity C must be >= 0")


@dataclass(frozen=True)
class PropagationResult:
    """Output spectral density and its semiclassical/quantum split."""

    total: np.ndarray = field(repr=False)
    semiclassical: np.ndarray = field(repr=False)
    quantum: np.ndarray = field(repr=False)
    sylvester_fallback: bool = False
    has_gain: bool = False


def vacuum_input() -> np.ndarray:
    """Input spectral density of a coherent/vacuum field pair (white noise)."""
    return np.diag([1.0, 0.0, 1.0, 0.0]).astype(complex)


def _response(a: np.ndarray, w: np.ndarray, omega: float, gamma_unit: float) -> np.ndarray:
    """G = W M^{-1} with M = -(i omega I + A); omega in units of Gamma."""
    n = a.shape[0]
    m = -(1j * omega * gamma_unit * np.eye(n) + a)
    anorm = np.linalg.norm(m, 1)
    lu, piv = lu_factor(m)
    rcond, info = zgecon(lu, anorm)
    if info != 0 or rcond <= 0 or 1.0 / rcond > CONDITION_LIMIT:
        cond = np.inf if rcond <= 0 else 1.0 / rcond
        raise IllConditionedResponseError(
            f"response matrix condition {cond:.2e} exceeds {CONDITION_LIMIT:.0e} "
            f"at omega={omega!r}; gamma is too small for this frequency resolution"
        )
    # Solve M^T G^T = W^T so a single factorization serves all four rows.
    return lu_solve((lu, piv), w.T, trans=1).T


def response_G(sys: LiouvilleSystem, omega: float) -> np.ndarray:
    """Field response matrix G(omega) = W M^{-1} of a single velocity class."""
    return _response(sys.A, sys.W, omega, sys.spec.Gamma)


def sylvester_solve(k: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Solve -(K X + X K^dag) = J by vectorization to a 16 x 16 system.

    Raises SylvesterNearSingularError when an eigenvalue pair of K sums to
    (nearly) zero with its conjugate partner, or when the solve residual
    exceeds 1e-10 * ||J||.
    """
    k = np.asarray(k, dtype=complex)
    j = np.asarray(j, dtype=complex)
    m = k.shape[0]
    jnorm = np.linalg.norm(j)
    if jnorm == 0.0:
        return np.zeros_like(j)
    evals = np.linalg.eigvals(k)
    pair_sums = np.abs(evals[:, None] + evals.conj()[None, :])
    scale = max(1.0, float(np.max(np.abs(evals))))
    if pair_sums.min() < 1e-12 * scale:
        raise SylvesterNearSingularError(
            f"eigenvalue pair sum {pair_sums.min():.2e} is numerically zero"
        )
    eye = np.eye(m)
    op = -(np.kron(k, eye) + np.kron(eye, k.conj()))
    x = np.linalg.solve(op, j.ravel()).reshape(m, m)
    residual = np.linalg.norm(k @ x + x @ k.conj().T + j)
    if residual > 1e-10 * jnorm:
        raise SylvesterNearSingularError(
            f"Sylvester residual {residual:.2e} exceeds 1e-10 * ||J|| = {1e-10 * jnorm:.2e}"
        )
    return x


def _gram_integral(k: np.ndarray, j: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    """Composite-Simpson evaluation of int_0^1 e^{-K z} J e^{-K^dag z} dz.

    Panel count doubles until the result is stable to rel_tol; used as the
    fallback when the Sylvester operator is near singular.
    """
    def simpson(panels: int) -> np.ndarray:
        zs = np.linspace(0.0, 1.0, panels + 1)
        weights = np.ones(panels + 1)
        weights[1:-1:2] = 4.0
        weights[2:-1:2] = 2.0
        weights *= (zs[1] - zs[0]) / 3.0
        acc = np.zeros_like(j)
        for wgt, z in zip(weights, zs):
            e = expm(-k * z)
            acc += wgt * (e @ j @ e.conj().T)
        return acc

    panels = 64
    prev = simpson(panels)
    while panels < 65536:
        panels *= 2
        cur = simpson(panels)
        denom = max(np.linalg.norm(cur), 1e-300)
        if np.linalg.norm(cur - prev) <= rel_tol * denom:
            return cur
        prev = cur
    return prev


def _assemble(kh: np.ndarray, j_rhs: np.ndarray, s0: np.ndarray, c: float) -> PropagationResult:
    """Evaluate the output spectral density from the dimensionless blocks.

    kh is the propagation exponent (K L), j_rhs = 2 Gamma <G D G^dag> is the
    Sylvester right-hand side.
    """
    has_gain = bool(np.max(np.linalg.eigvals(kh).real) > 1e-12)
    if has_gain:
        # Recorded per-point on the result (and in scan manifests); callers
        # aggregating a sweep emit one warning instead of one per frequency.
        log.info(
            "propagation exponent has gain (Re eigenvalue > 0); the decay "
            "interpretation of the Sylvester solution does not hold, result kept"
        )
    e = expm(kh)
    semiclassical = e @ s0 @ e.conj().T
    fallback = False
    try:
        x = sylvester_solve(kh, j_rhs)
        quantum = c * (x - e @ x @ e.conj().T)
    except SylvesterNearSingularError as exc:
        log.info("Sylvester solve near singular (%s); using direct quadrature", exc)
        fallback = True
        integral = _gram_integral(kh, j_rhs)
        quantum = c * (e @ integral @ e.conj().T)
    total = semiclassical + quantum
    herm = np.max(np.abs(total - total.conj().T))
    if herm > 1e-10 * max(1.0, float(np.linalg.norm(total))):
        log.warning("output spectral density hermiticity residual %.3e", herm)
    total = (total + total.conj().T) / 2.0
    return PropagationResult(
        total=total,
        semiclassical=semiclassical,
        quantum=quantum,
        sylvester_fallback=fallback,
        has_gain=has_gain,
    )


def output_spectrum(
    sys: LiouvilleSystem,
    steady: SteadyState,
    diffusion,
    medium: MediumSpec,
    s0: np.ndarray,
    omega: float,
) -> PropagationResult:
    """Output spectral density after the medium, atoms at rest.

    ``diffusion`` accepts a DiffusionMatrix or a bare n x n array.  With
    C = 0 the input is returned unchanged.
    """
    s0 = np.asarray(s0, dtype=complex)
    if medium.C == 0.0:
        return PropagationResult(
            total=s0.copy(),
            semiclassical=s0.copy(),
            quantum=np.zeros_like(s0),
        )
    dmat = getattr(diffusion, "matrix", diffusion)
    gamma_unit = sys.spec.Gamma
    g = response_G(sys, omega)
    gv = g @ sys.V
    gdg = g @ dmat @ g.conj().T
    kh = (medium.C * gamma_unit) * gv
    j_rhs = (2.0 * gamma_unit) * gdg
    return _assemble(kh, j_rhs, s0, medium.C)


_PANEL_ORDER = 10
_TRUNCATION_SIGMAS = 6.0


def velocity_quadrature(width_fwhm: float, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Velocity-average quadrature for a Gaussian of the given FWHM.

    Composite Gauss-Legendre (10-point panels) on [-6 sigma, 6 sigma],
    weighted by the Gaussian and renormalized so the weights sum to exactly
    one (the tail mass beyond the truncation is ~2e-9).  ``count`` is the
    approximate total node count; the panel count is count/10.

    Returns Doppler-shift samples (units of Gamma) and their weights.
    """
    sigma = width_fwhm / (2.0 * np.sqrt(2.0 * np.log(2.0)))
    half = _TRUNCATION_SIGMAS * sigma
    panels = max(1, round(count / _PANEL_ORDER))
    x, w = roots_legendre(_PANEL_ORDER)
    edges = np.linspace(-half, half, panels + 1)
    mids = (edges[:-1] + edges[1:]) / 2.0
    hw = (edges[1] - edges[0]) / 2.0
    shifts = (mids[:, None] + hw * x[None, :]).ravel()
    gauss = np.exp(-(shifts**2) / (2.0 * sigma**2)) / (sigma * np.sqrt(2.0 * np.pi))
    weights = (hw * np.tile(w, panels)) * gauss
    return shifts, weights / weights.sum()


@dataclass(frozen=True)
class VelocityFamily:
    """Per-velocity-class systems sharing one atom/drive description.

    Holds the drift, coupling, and diffusion matrices of every velocity
    class; the detuning of class i is delta - shift[i] (Doppler shift of the
    co-moving laser frequency).
    """

    spec: AtomSpec
    drive: DriveSpec
    shifts: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    A_stack: np.ndarray = field(repr=False)
    V_stack: np.ndarray = field(repr=False)
    D_stack: np.ndarray = field(repr=False)
    W: np.ndarray = field(repr=False)

    @classmethod
    def from_nodes(
        cls, spec: AtomSpec, drive: DriveSpec, shifts: np.ndarray, weights: np.ndarray
    ) -> "VelocityFamily":
        shifts = np.asarray(shifts, dtype=float)
        weights = np.asarray(weights, dtype=float)
        a_list, v_list, d_list = [], [], []
        w_mat = None
        for shift in shifts:
            sysv = build_system(spec, replace(drive, delta=drive.delta - shift))
            stv = steady_state(sysv)
            a_list.append(sysv.A)
            v_list.append(sysv.V)
            d_list.append(diffusion_matrix(sysv, stv).matrix)
            w_mat = sysv.W
        return cls(
            spec=spec,
            drive=drive,
            shifts=shifts,
            weights=weights,
            A_stack=np.array(a_list),
            V_stack=np.array(v_list),
            D_stack=np.array(d_list),
            W=w_mat,
        )

    @classmethod
    def from_thermal(
        cls, spec: AtomSpec, drive: DriveSpec, width_fwhm: float, count: int
    ) -> "VelocityFamily":
        shifts, weights = velocity_quadrature(width_fwhm, count)
        return cls.from_nodes(spec, drive, shifts, weights)

    @property
    def node_count(self) -> int:
        return len(self.shifts)

    def averaged_blocks(self, omega: float) -> tuple[np.ndarray, np.ndarray]:
        """Velocity averages <G V> and <G D G^dag> at one noise frequency."""
        gamma_unit = self.spec.Gamma
        gv = np.zeros((len(self.shifts), 4, 4), dtype=complex)
        gdg = np.zeros((len(self.shifts), 4, 4), dtype=complex)
        for i in range(len(self.shifts)):
            g = _response(self.A_stack[i], self.W, omega, gamma_unit)
            gv[i] = g @ self.V_stack[i]
            gdg[i] = g @ self.D_stack[i] @ g.conj().T
        return (
            np.tensordot(self.weights, gv, axes=1),
            np.tensordot(self.weights, gdg, axes=1),
        )


def doppler_spectrum(
    family: VelocityFamily, medium: MediumSpec, s0: np.ndarray, omega: float
) -> PropagationResult:
    """Doppler-averaged output spectral density with fixed quadrature nodes.

    With a single node at zero shift this reproduces ``output_spectrum``
    exactly (the distribution collapses to a delta).
    """
    s0 = np.asarray(s0, dtype=complex)
    if medium.C == 0.0:
        return PropagationResult(
            total=s0.copy(), semiclassical=s0.copy(), quantum=np.zeros_like(s0)
        )
    gamma_unit = family.spec.Gamma
    gv_avg, gdg_avg = family.averaged_blocks(omega)
    kh = (medium.C * gamma_unit) * gv_avg
    j_rhs = (2.0 * gamma_unit) * gdg_avg
    return _assemble(kh, j_rhs, s0, medium.C)


def doppler_scan_converged(
    spec: AtomSpec,
    drive: DriveSpec,
    medium: MediumSpec,
    s0: np.ndarray,
    omegas: np.ndarray,
) -> tuple[list[PropagationResult], int]:
    """Doppler-averaged scan with automatic node doubling.

    Evaluates the whole frequency grid at the configured node count and at
    twice that count, doubling until the maximum relative change of the
    output matrices drops below the tolerance.  Raises
    QuadratureConvergenceError (with a suggested node count) when the cap is
    reached without convergence.
    """
    if medium.doppler is None:
        raise ValueError("medium has no Doppler settings")
    dop = medium.doppler

    def scan(count: int) -> list[PropagationResult]:
        family = VelocityFamily.from_thermal(spec, drive, dop.width_fwhm, count)
        return [doppler_spectrum(family, medium, s0, w) for w in omegas]

    nodes = dop.nodes
    prev = scan(nodes)
    while True:
        cur = scan(2 * nodes)
        rel = 0.0
        for a, b in zip(prev, cur):
            denom = max(np.linalg.norm(b.total), 1e-300)
            rel = max(rel, float(np.linalg.norm(a.total - b.total)) / denom)
        if rel <= dop.rel_tol:
            log.info("Doppler quadrature converged at %d nodes (rel %.2e)", 2 * nodes, rel)
            return cur, 2 * nodes
        nodes *= 2
        prev = cur
        if 2 * nodes > dop.max_nodes:
            raise QuadratureConvergenceError(
                f"velocity quadrature not converged at {nodes} nodes "
                f"(relative change {rel:.2e} > {dop.rel_tol:.0e}); "
                f"retry with at least {4 * nodes} nodes",
                suggested_nodes=4 * nodes,
            )
