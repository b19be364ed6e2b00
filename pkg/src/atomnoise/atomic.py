"""Angular-momentum machinery for a single Fg -> Fe dipole transition.

Conventions used throughout the package:

* Quantization axis is z (the light propagation axis).
* Spherical unit vectors: e_{+1} = -(x + iy)/sqrt(2), e_{-1} = +(x - iy)/sqrt(2),
  e_0 = z.  Hence x = (e_{-1} - e_{+1})/sqrt(2) and y = i(e_{-1} + e_{+1})/sqrt(2).
* The dimensionless lowering dipole blocks Q[q] (q = -1, 0, +1) have matrix
  elements Q^q[mg, me], nonzero only for mg = me + q, all real
  (Condon-Shortley phases, real reduced matrix element).  The overall sign is
  fixed so that the pi coupling of Fg=0 -> Fe=1 equals +1/sqrt(3).
* Normalization: sum_{q,mg} |Q^q[mg, me]|^2 = 1/(2Fe+1) for every me, which
  makes the spontaneous-feeding term b*Gamma*(2Fe+1)*sum_q Q sigma Q^dag
  trace preserving for a closed transition (b = 1).

All rates and frequencies are expressed in units of the excited-state
radiative rate Gamma (Gamma = 1 unless explicitly overridden).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AtomSpec",
    "DipoleSet",
    "build_dipole_operators",
    "build_zeeman_hamiltonian",
    "polarization_components",
    "orthogonal_polarization",
    "X_POL",
    "Y_POL",
]

# Linear polarization unit vectors (Cartesian components, complex allowed).
X_POL = np.array([1.0, 0.0, 0.0], dtype=complex)
Y_POL = np.array([0.0, 1.0, 0.0], dtype=complex)

# Spherical basis e_q as rows (q = -1, 0, +1), Cartesian columns.
_SPHERICAL = np.array(
    [
        [1.0 / np.sqrt(2.0), -1.0j / np.sqrt(2.0), 0.0],   # e_{-1}
        [0.0, 0.0, 1.0],                                   # e_0
        [-1.0 / np.sqrt(2.0), -1.0j / np.sqrt(2.0), 0.0],  # e_{+1}
    ],
    dtype=complex,
)


def _is_half_integer(f: float) -> bool:
    return abs(2.0 * f - round(2.0 * f)) < 1e-12


def atom_validation_errors(
    Fg: float,
    Fe: float,
    b: float = 1.0,
    Gamma: float = 1.0,
    gamma: float = 0.01,
    **_ignored,
) -> list[str]:
    """Invariant violations of an atom description (empty when valid)."""
    errs = []
    if Fg < 0 or Fe < 0:
        errs.append("Fg and Fe must be >= 0")
    if not (_is_half_integer(Fg) and _is_half_integer(Fe)):
        errs.append("Fg and Fe must be integer or half-integer")
    elif (round(2 * Fg) - round(2 * Fe)) % 2 != 0:
        errs.append("Fg and Fe must both be integer or both half-integer")
    if abs(Fe - Fg) > 1 + 1e-12:
        errs.append("|Fe - Fg| <= 1 required (dipole selection rule)")
    if Fg == 0 and Fe == 0:
        errs.append("Fg = Fe = 0 transition is dipole forbidden")
    if not 0.0 <= b <= 1.0:
        errs.append("branching ratio b must lie in [0, 1]")
    if Gamma <= 0:
        errs.append("Gamma must be positive")
    if gamma <= 0:
        errs.append("gamma must be positive (drift invertibility)")
    return errs


@dataclass(frozen=True)
class AtomSpec:
    """Level structure and relaxation rates of one dipole transition.

    Parameters
    ----------
    Fg, Fe : float
        Total angular momenta of the ground and excited levels.  Must both be
        integer or both half-integer with |Fe - Fg| <= 1 (and not both zero).
    b : float
        Branching ratio of the excited state back into the ground manifold,
        in [0, 1].  b = 1 is a closed (cycling) transition.
    Gamma : float
        Excited-state radiative rate; the global frequency unit (default 1).
    gamma : float
        Transit relaxation rate (fresh ground-state atoms arrive at this
        rate), in units of Gamma.  Must be positive: it guarantees a unique
        steady state and an invertible response at every noise frequency.
    zeeman_g, zeeman_e : float
        Zeeman splitting per unit m of ground and excited sublevels
        (gyromagnetic factor times magnetic field), in units of Gamma.
    """

    Fg: float
    Fe: float
    b: float = 1.0
    Gamma: float = 1.0
    gamma: float = 0.01
    zeeman_g: float = 0.0
    zeeman_e: float = 0.0

    def __post_init__(self) -> None:
        errors = self.validation_errors()
        if errors:
            raise ValueError("invalid AtomSpec: " + "; ".join(errors))

    def validation_errors(self) -> list[str]:
        """All invariant violations (empty list when the spec is valid)."""
        return atom_validation_errors(
            Fg=self.Fg,
            Fe=self.Fe,
            b=self.b,
            Gamma=self.Gamma,
            gamma=self.gamma,
        )

    @property
    def dim_g(self) -> int:
        return round(2 * self.Fg) + 1

    @property
    def dim_e(self) -> int:
        return round(2 * self.Fe) + 1

    @property
    def dim(self) -> int:
        return self.dim_g + self.dim_e

    @property
    def m_ground(self) -> np.ndarray:
        return -self.Fg + np.arange(self.dim_g)

    @property
    def m_excited(self) -> np.ndarray:
        return -self.Fe + np.arange(self.dim_e)


@dataclass(frozen=True)
class DipoleSet:
    """Spherical dipole blocks of one transition.

    ``q_ge[q + 1]`` is the (2Fg+1) x (2Fe+1) lowering block for spherical
    component q; ``q_eg`` holds the adjoint (raising) blocks in the same
    order.  Entries are real; the selection rule is mg = me + q.
    """

    spec: AtomSpec
    q_ge: tuple = field(repr=False)
    q_eg: tuple = field(repr=False)

    def coupling_ge(self, polarization: np.ndarray) -> np.ndarray:
        """Lowering block e.Q_ge for a (complex) polarization vector e.

        The dot product is the bilinear Cartesian one, i.e. for
        e = sum_q c_q e_q the result is sum_q c_q Q^q with c_q the spherical
        expansion coefficients of e.
        """
        c = polarization_components(polarization)
        return sum(c[k] * self.q_ge[k] for k in range(3))


def polarization_components(polarization: np.ndarray) -> np.ndarray:
    """Spherical expansion coefficients c_q of a polarization vector.

    Returns [c_{-1}, c_0, c_{+1}] such that e = sum_q c_q e_q (coefficients
    under the Hermitian inner product, c_q = e_q^dag . e).
    """
    e = np.asarray(polarization, dtype=complex)
    if e.shape != (3,):
        raise ValueError("polarization must be a 3-vector")
    return _SPHERICAL.conj() @ e


def orthogonal_polarization(polarization: np.ndarray) -> np.ndarray:
    """Transverse unit vector orthogonal (Hermitian sense) to the input.

    Both vectors must be transverse to z; for linear x input this returns y.
    """
    e = np.asarray(polarization, dtype=complex)
    if abs(e[2]) > 1e-12:
        raise ValueError("drive polarization must be transverse to z")
    norm = np.sqrt(np.real(np.vdot(e, e)))
    if not np.isclose(norm, 1.0, atol=1e-10):
        raise ValueError("polarization must be a unit vector")
    return np.array([-np.conj(e[1]), np.conj(e[0]), 0.0], dtype=complex)


def _lowering_coeff(j: float, m: float) -> float:
    """Matrix element <j, m-1| J_- |j, m> (hbar = 1)."""
    return np.sqrt(j * (j + 1) - m * (m - 1))


def _coupled_block(j1: float, j2: float, J: float) -> np.ndarray:
    """Clebsch-Gordan coefficients <j1 m1; j2 m2 | J M> for one target J.

    Returns an array ``cg[Mi, m1i, m2i]`` indexed by M = -J..J,
    m1 = -j1..j1, m2 = -j2..j2.  Built by ladder lowering from the top
    states, orthogonalizing against all higher-J towers, with the
    Condon-Shortley convention (the coefficient of the maximal-m1 product
    state in |J, J> is positive).
    """
    d1, d2 = round(2 * j1) + 1, round(2 * j2) + 1
    m1s = -j1 + np.arange(d1)
    m2s = -j2 + np.arange(d2)

    def apply_lowering(vec: np.ndarray) -> np.ndarray:
        """(J1- + J2-) acting on a product-basis coefficient array."""
        out = np.zeros_like(vec)
        for i1, m1 in enumerate(m1s):
            for i2, m2 in enumerate(m2s):
                c = vec[i1, i2]
                if c == 0.0:
                    continue
                if i1 > 0:
                    out[i1 - 1, i2] += c * _lowering_coeff(j1, m1)
                if i2 > 0:
                    out[i1, i2 - 1] += c * _lowering_coeff(j2, m2)
        return out

    def top_state(Jp: float, towers: dict) -> np.ndarray:
        if abs(Jp - (j1 + j2)) < 1e-9:
            top = np.zeros((d1, d2))
            top[-1, -1] = 1.0
            return top
        basis = [
            (i1, i2)
            for i1, m1 in enumerate(m1s)
            for i2, m2 in enumerate(m2s)
            if abs(m1 + m2 - Jp) < 1e-9
        ]
        # The M = Jp member of every higher tower; towers run M = Jh..-Jh.
        higher = [towers[Jh][round(Jh - Jp)] for Jh in towers]
        mat = np.array([[h[i1, i2] for (i1, i2) in basis] for h in higher])
        _, _, vt = np.linalg.svd(mat)
        null = vt[-1]
        vec = np.zeros((d1, d2))
        for coeff, (i1, i2) in zip(null, basis):
            vec[i1, i2] = coeff
        i_max = max(basis, key=lambda p: m1s[p[0]])
        if vec[i_max] < 0:
            vec = -vec
        return vec / np.linalg.norm(vec)

    towers: dict[float, list[np.ndarray]] = {}
    Jp = j1 + j2
    while Jp >= J - 1e-9 and Jp >= abs(j1 - j2) - 1e-9:
        tower = [top_state(Jp, towers)]
        M = Jp
        while M > -Jp + 1e-9:
            tower.append(apply_lowering(tower[-1]) / _lowering_coeff(Jp, M))
            M -= 1.0
        towers[Jp] = tower
        Jp -= 1.0

    dJ = round(2 * J) + 1
    cg = np.zeros((dJ, d1, d2))
    for Mi in range(dJ):
        # cg index Mi is M = -J + Mi; the tower list runs M = J .. -J.
        cg[Mi] = towers[J][dJ - 1 - Mi]
    return cg


def build_dipole_operators(spec: AtomSpec) -> DipoleSet:
    """Construct the spherical dipole blocks Q^q of a transition.

    The returned blocks satisfy the selection rule mg = me + q, are real,
    and obey the sum rule sum_{q,mg} |Q^q[mg, me]|^2 = 1/(2Fe+1) for every
    excited sublevel me.
    """
    dg, de = spec.dim_g, spec.dim_e
    # Couple Fe (x) 1 -> Fg; cg[mg, me, q] = <Fe me; 1 q | Fg mg>.
    cg = _coupled_block(spec.Fe, 1.0, spec.Fg)
    scale = -1.0 / np.sqrt(2 * spec.Fg + 1)
    q_ge = []
    for qi in range(3):  # q = -1, 0, +1
        block = scale * cg[:, :, qi].copy()
        block.setflags(write=False)
        q_ge.append(block)
    q_eg = tuple(b.T.copy() for b in q_ge)
    for b in q_eg:
        b.setflags(write=False)
    return DipoleSet(spec=spec, q_ge=tuple(q_ge), q_eg=q_eg)


def build_zeeman_hamiltonian(spec: AtomSpec) -> np.ndarray:
    """Diagonal Zeeman Hamiltonian over all sublevels (ground then excited).

    The entry for a ground sublevel |g, m> is m * zeeman_g and for an excited
    sublevel |e, m> is m * zeeman_e, in units of Gamma.
    """
    diag = np.concatenate(
        [spec.zeeman_g * spec.m_ground, spec.zeeman_e * spec.m_excited]
    )
    return np.diag(diag.astype(float))
