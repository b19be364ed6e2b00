import numpy as np
import pytest

from atomnoise.atomic import AtomSpec
from atomnoise.diffusion import _assemble_diffusion, diffusion_matrix
from atomnoise.liouville import DriveSpec, SteadyState, _sigma0, build_system, steady_state

from oracles import einstein_oracle


def make(fg, fe, delta, om, gamma=0.01, b=1.0):
    spec = AtomSpec(Fg=fg, Fe=fe, gamma=gamma, b=b)
    sys = build_system(spec, DriveSpec(delta=delta, omega_r=om))
    st = steady_state(sys)
    return spec, sys, st


def test_contraction_rule_on_explicit_matrices():
    """sigma_ij^dag sigma_kl = sigma_ik^dag delta_jl with literal matrices."""
    d = 3
    def sigma(i, j):  # |j><i|
        m = np.zeros((d, d))
        m[j, i] = 1.0
        return m

    for i in range(d):
        for j in range(d):
            for k in range(d):
                for l in range(d):
                    left = sigma(i, j).T.conj() @ sigma(k, l)
                    right = (1.0 if j == l else 0.0) * sigma(i, k).T.conj()
                    assert np.array_equal(left, right)


@pytest.mark.parametrize(
    "fg,fe,delta,om,b",
    [(0, 1, 0.0, 0.8, 1.0), (0, 1, 10.0, 10.0, 1.0), (0.5, 0.5, 2.0, 5.0, 0.6), (1, 2, 3.0, 8.0, 1.0)],
)
def test_matches_operator_algebra_oracle(fg, fe, delta, om, b):
    spec, sys, st = make(fg, fe, delta, om, b=b)
    built = diffusion_matrix(sys, st).matrix
    ref = einstein_oracle(spec, sys.A, sys.pump, st.rho) / 1.0
    ref = (ref + ref.conj().T) / 2.0
    scale = max(1.0, float(np.max(np.abs(ref))))
    assert np.max(np.abs(built - ref)) <= 1e-11 * scale


def test_two_level_optical_coherence_coefficient():
    """Undriven ground atoms: <f f^dag> of the optical coherence is Gamma+2gamma."""
    spec, sys, st = make(0, 1, 0.0, 0.0, gamma=0.01)
    d2 = diffusion_matrix(sys, st).matrix
    idx = sys.index
    for e in idx.excited:
        k = idx.flat(e, 0)
        assert 2.0 * d2[k, k].real == pytest.approx(1.0 + 2 * spec.gamma, abs=1e-12)


def test_ground_sector_vanishes_without_transit():
    """gamma -> 0, no drive: forces among ground-state operators vanish."""
    spec, sys, st = make(1, 2, 0.0, 0.0, gamma=1e-9)
    dmat = diffusion_matrix(sys, st).matrix
    idx = sys.index
    ground_pairs = [idx.flat(i, j) for i in idx.ground for j in idx.ground]
    block = dmat[np.ix_(ground_pairs, ground_pairs)]
    assert np.max(np.abs(block)) <= 1e-8  # O(gamma)


@pytest.mark.parametrize(
    "fg,fe,delta,om",
    [(0, 1, 0.0, 0.3), (0, 1, 10.0, 10.0), (0.5, 0.5, 10.0, 10.0), (1, 0, 10.0, 10.0), (1, 2, 10.0, 40.0)],
)
def test_positive_semidefinite(fg, fe, delta, om):
    _, sys, st = make(fg, fe, delta, om)
    dmat = diffusion_matrix(sys, st).matrix
    evals = np.linalg.eigvalsh(2.0 * (dmat + dmat.conj().T) / 2.0)
    assert evals.min() >= -1e-10


def test_hermitian_pair_symmetry():
    _, sys, st = make(1, 2, 5.0, 20.0)
    result = diffusion_matrix(sys, st)
    assert np.max(np.abs(result.matrix - result.matrix.conj().T)) == 0.0
    assert result.hermitization_residual <= 1e-13


def test_linear_in_mean_values():
    spec, sys, st = make(0.5, 0.5, 1.0, 6.0)
    s0 = _sigma0(spec)
    gamma = spec.gamma
    base = _assemble_diffusion(sys.A, st.rho, s0, gamma)
    scaled = _assemble_diffusion(sys.A, 3.0 * st.rho, s0, gamma)
    assert np.allclose(scaled, 3.0 * base, atol=1e-14)


def test_rejects_nonstationary_means():
    _, sys, st = make(0, 1, 0.0, 2.0)
    bad = SteadyState(sigma_mean=st.sigma_mean * 1.5, dim=st.dim)
    with pytest.raises(ValueError, match="stationary"):
        diffusion_matrix(sys, bad)
