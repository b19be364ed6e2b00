"""Liouville-space form of the atomic fluctuation dynamics.

The single-atom operator array sigma = {sigma_ij} (sigma_ij = |j><i|, so the
mean <sigma_ij> is the ordinary density-matrix element rho_ij) is flattened
into an n-vector with n = 4(Fg+Fe+1)^2 using the row-major index
k = i*dim + j.  States are ordered ground m = -Fg..Fg, then excited
m = -Fe..Fe.

In this representation the drift of the Heisenberg-Langevin equation acts as
an n x n matrix A assembled from left/right multiplications:

    d sigma/dt = A sigma + gamma sigma0 + (field fluctuation terms) + forces

with A = -i[H, .] + b*Gamma*(2Fe+1) sum_q Q^q . Q^q
         - (Gamma/2){P_e, .} - gamma,

where H = Delta*P_e + H_B - (Omega_r/2)(C + C^dag) folds the mean driving
field into the reduced Rabi frequency Omega_r = 2*alpha*eta (taken real) and
C is the lowering block for the drive polarization.

The field-fluctuation coupling V (n x 4) and the radiated-field source
W (4 x n) use the field-operator ordering (a1, a1^dag, a2, a2^dag), with
mode 1 the drive polarization and mode 2 the orthogonal one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .atomic import (
    AtomSpec,
    DipoleSet,
    build_dipole_operators,
    build_zeeman_hamiltonian,
    orthogonal_polarization,
)

__all__ = [
    "DriveSpec",
    "LiouvilleIndex",
    "LiouvilleSystem",
    "SteadyState",
    "build_system",
    "steady_state",
    "build_V",
]


@dataclass(frozen=True)
class DriveSpec:
    """Mean driving field: optical detuning and reduced Rabi frequency.

    delta is omega_0 - omega_L in units of Gamma; omega_r = 2*alpha*eta is
    the reduced Rabi frequency (before any Clebsch-Gordan projection), taken
    real and nonnegative.  The drive polarization defaults to linear x; the
    vacuum mode 2 is the orthogonal transverse polarization.
    """

    delta: float = 0.0
    omega_r: float = 0.0
    polarization: tuple = (1.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if self.omega_r < 0:
            raise ValueError("omega_r must be >= 0 (phase belongs to the field basis)")

    @property
    def pol_vector(self) -> np.ndarray:
        return np.asarray(self.polarization, dtype=complex)


class LiouvilleIndex:
    """Bijection between operator pairs (i, j) and flat indices.

    i, j run over the sublevels ordered ground m = -Fg..Fg then excited
    m = -Fe..Fe; the flat index is k = i*dim + j.
    """

    def __init__(self, spec: AtomSpec):
        self.spec = spec
        self.dim = spec.dim
        self.n = spec.dim**2
        self.labels = [("g", float(m)) for m in spec.m_ground] + [
            ("e", float(m)) for m in spec.m_excited
        ]

    def flat(self, i: int, j: int) -> int:
        return i * self.dim + j

    def pair(self, k: int) -> tuple[int, int]:
        return divmod(k, self.dim)

    @property
    def ground(self) -> range:
        return range(self.spec.dim_g)

    @property
    def excited(self) -> range:
        return range(self.spec.dim_g, self.dim)

    def trace_vector(self) -> np.ndarray:
        """Row functional extracting the trace from a flattened array."""
        v = np.zeros(self.n)
        for i in range(self.dim):
            v[self.flat(i, i)] = 1.0
        return v


@dataclass(frozen=True)
class SteadyState:
    """Stationary mean values <sigma> of the Bloch equations."""

    sigma_mean: np.ndarray
    dim: int

    @property
    def rho(self) -> np.ndarray:
        """Mean values as a density matrix over all sublevels."""
        return self.sigma_mean.reshape(self.dim, self.dim)

    def hermiticity_residual(self) -> float:
        rho = self.rho
        return float(np.max(np.abs(rho - rho.conj().T)))


@dataclass(frozen=True)
class LiouvilleSystem:
    """Drift matrix, pump, and field couplings of one atom/drive combination.

    All arrays share the flat indexing of ``index``.  V is evaluated at the
    steady state of the Bloch equations (it is linear in the mean values).
    """

    spec: AtomSpec
    drive: DriveSpec
    index: LiouvilleIndex
    dipoles: DipoleSet = field(repr=False)
    A: np.ndarray = field(repr=False)
    pump: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)
    W: np.ndarray = field(repr=False)
    coupling_1: np.ndarray = field(repr=False)  # drive-polarization lowering block, embedded
    coupling_2: np.ndarray = field(repr=False)  # orthogonal-polarization block, embedded

    @property
    def n(self) -> int:
        return self.index.n


def _embed_ge(spec: AtomSpec, block: np.ndarray) -> np.ndarray:
    """Embed a (dim_g x dim_e) lowering block into the full sublevel space."""
    full = np.zeros((spec.dim, spec.dim), dtype=complex)
    full[: spec.dim_g, spec.dim_g :] = block
    return full


def _projector_excited(spec: AtomSpec) -> np.ndarray:
    p = np.zeros((spec.dim, spec.dim))
    p[spec.dim_g :, spec.dim_g :] = np.eye(spec.dim_e)
    return p


def _sigma0(spec: AtomSpec) -> np.ndarray:
    """Isotropic ground-state pump target (unit trace over the ground level)."""
    s0 = np.zeros((spec.dim, spec.dim))
    s0[: spec.dim_g, : spec.dim_g] = np.eye(spec.dim_g) / spec.dim_g
    return s0


def _drift_matrix(
    spec: AtomSpec,
    drive: DriveSpec,
    dipoles: DipoleSet,
    gamma: float,
) -> np.ndarray:
    """Assemble the n x n drift from Kronecker products (row-major vec)."""
    d = spec.dim
    eye = np.eye(d)
    c1 = _embed_ge(spec, dipoles.coupling_ge(drive.pol_vector))
    p_e = _projector_excited(spec)
    h = (
        spec.Gamma * drive.delta * p_e
        + spec.Gamma * build_zeeman_hamiltonian(spec)
        - spec.Gamma * (drive.omega_r / 2.0) * (c1 + c1.conj().T)
    )
    a = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    feed = np.zeros((d * d, d * d), dtype=complex)
    for q in range(3):
        qm = _embed_ge(spec, dipoles.q_ge[q])
        feed += np.kron(qm, qm.conj())
    a += spec.b * spec.Gamma * spec.dim_e * feed
    a -= (spec.Gamma / 2.0) * (np.kron(p_e, eye) + np.kron(eye, p_e.T))
    a -= gamma * spec.Gamma * np.eye(d * d)
    return a


def _radiated_field_matrix(spec: AtomSpec, c1: np.ndarray, c2: np.ndarray) -> np.ndarray:
    """4 x n source matrix W: projections of the optical coherences.

    Row ordering (a1, a1^dag, a2, a2^dag); the component of d(delta a_j)/dz
    sourced by delta sigma_kl (k excited, l ground) is +i * C_j[l, k], and
    the adjoint rows carry -i * conj(C_j[l, k]) on the (l, k) components.
    """
    d = spec.dim
    w = np.zeros((4, d * d), dtype=complex)
    for li in range(spec.dim_g):
        for ki in range(spec.dim_g, d):
            w[0, ki * d + li] = 1j * c1[li, ki]
            w[1, li * d + ki] = -1j * np.conj(c1[li, ki])
            w[2, ki * d + li] = 1j * c2[li, ki]
            w[3, li * d + ki] = -1j * np.conj(c2[li, ki])
    return w


def _field_coupling(c1: np.ndarray, c2: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """n x 4 coupling of (delta a1, delta a1^dag, delta a2, delta a2^dag).

    Column k is the flattened commutator i[X_k, rho] with X_k the conjugate
    coupling block of the corresponding field operator.
    """
    cols = [
        1j * (c1.conj().T @ rho - rho @ c1.conj().T),
        1j * (c1 @ rho - rho @ c1),
        1j * (c2.conj().T @ rho - rho @ c2.conj().T),
        1j * (c2 @ rho - rho @ c2),
    ]
    return np.column_stack([c.ravel() for c in cols])


def _solve_steady(a: np.ndarray, pump: np.ndarray) -> np.ndarray:
    return np.linalg.solve(a, -pump)


def build_system(spec: AtomSpec, drive: DriveSpec) -> LiouvilleSystem:
    """Assemble drift, pump, and field-coupling matrices for one drive.

    The steady state is solved internally to evaluate the V coupling (it is
    linear in the stationary mean values).
    """
    if spec.gamma <= 0:
        raise ValueError("gamma must be positive (response singular otherwise)")
    dipoles = build_dipole_operators(spec)
    index = LiouvilleIndex(spec)
    pol1 = drive.pol_vector
    pol2 = orthogonal_polarization(pol1)
    c1 = _embed_ge(spec, dipoles.coupling_ge(pol1))
    c2 = _embed_ge(spec, dipoles.coupling_ge(pol2))
    a = _drift_matrix(spec, drive, dipoles, spec.gamma)
    pump = spec.gamma * spec.Gamma * _sigma0(spec).ravel().astype(complex)
    rho = _solve_steady(a, pump).reshape(spec.dim, spec.dim)
    v = _field_coupling(c1, c2, rho)
    w = _radiated_field_matrix(spec, c1, c2)
    return LiouvilleSystem(
        spec=spec,
        drive=drive,
        index=index,
        dipoles=dipoles,
        A=a,
        pump=pump,
        V=v,
        W=w,
        coupling_1=c1,
        coupling_2=c2,
    )


def steady_state(sys: LiouvilleSystem, *, check: bool = True) -> SteadyState:
    """Stationary solution of A<x> + pump = 0.

    With gamma > 0 the drift is strictly stable, so the solve cannot be
    singular; a failure here indicates an internal inconsistency.  The result
    is checked for Hermiticity, positivity, and (for a closed transition)
    unit trace.
    """
    x = _solve_steady(sys.A, sys.pump)
    st = SteadyState(sigma_mean=x, dim=sys.spec.dim)
    if check:
        rho = st.rho
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > 1e-10:
            raise RuntimeError(f"steady state not Hermitian (residual {herm:.2e})")
        evals = np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)
        if evals.min() < -1e-10:
            raise RuntimeError(f"steady state not PSD (min eigenvalue {evals.min():.2e})")
        tr = np.real(np.trace(rho))
        # An open transition (b < 1) leaks population to external states;
        # only the gamma pump replaces it, so the trace is 1 only at b = 1.
        if sys.spec.b == 1.0 and abs(tr - 1.0) > 1e-10:
            raise RuntimeError(f"steady-state trace {tr} != 1 for closed transition")
        if tr > 1.0 + 1e-10:
            raise RuntimeError(f"steady-state trace {tr} exceeds 1")
    return st


def build_V(sys: LiouvilleSystem, steady: SteadyState) -> np.ndarray:
    """Field-fluctuation coupling evaluated at a given set of mean values.

    Linear in the mean values; columns ordered (a1, a1^dag, a2, a2^dag).
    """
    return _field_coupling(sys.coupling_1, sys.coupling_2, steady.rho)
