import numpy as np
import pytest

from atomnoise.spectra import (
    AnalysisBasis,
    NoiseRecord,
    cross_correlation,
    duan_witness,
    noise_powers,
    quadrature_phase_matrix,
    record_from_spectrum,
    rotate,
)


def random_physical_spectrum(seed=0):
    rng = np.random.default_rng(seed)
    b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    return b @ b.conj().T


def test_identity_rotation_is_noop():
    s = random_physical_spectrum()
    out = rotate(s, AnalysisBasis(theta=0.0))
    assert np.allclose(out, s, atol=1e-14)


def test_rotation_preserves_hermiticity_and_trace():
    s = random_physical_spectrum(1)
    basis = AnalysisBasis.diagonal_45(theta=0.9)
    out = rotate(s, basis)
    assert np.max(np.abs(out - out.conj().T)) <= 1e-12
    assert np.trace(out) == pytest.approx(np.trace(s), abs=1e-12)


def test_pi_periodicity_of_noise_powers():
    s = random_physical_spectrum(2)
    p0 = noise_powers(rotate(s, AnalysisBasis(theta=0.0)))
    p_pi = noise_powers(rotate(s, AnalysisBasis(theta=np.pi)))
    assert p0 == pytest.approx(p_pi, abs=1e-12)


def test_basis_roundtrip():
    u = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    fwd = AnalysisBasis.from_jones(u)
    back = AnalysisBasis.from_jones(u.conj().T)
    s = random_physical_spectrum(3)
    roundtrip = rotate(rotate(s, fwd), back)
    assert np.max(np.abs(roundtrip - s)) <= 1e-12


def test_vacuum_gives_unit_noise_any_angle():
    s = np.diag([1.0, 0.0, 1.0, 0.0]).astype(complex)
    for theta in np.linspace(0.0, 2 * np.pi, 17):
        s1, s2 = noise_powers(rotate(s, AnalysisBasis(theta=theta)))
        assert s1 == pytest.approx(1.0, abs=1e-14)
        assert s2 == pytest.approx(1.0, abs=1e-14)


def test_global_phase_relabels_quadrature_angle():
    """A common phase on both modes is exactly a quadrature-angle shift.

    T(theta) R_phi = T(theta - phi), so the full theta sweep of the noise
    powers is invariant under a global phase redefinition.
    """
    s = random_physical_spectrum(4)
    phi = 0.456
    u = np.exp(1j * phi) * np.eye(2)
    for theta in (0.0, 0.3, 1.2):
        with_phase = rotate(s, AnalysisBasis.from_jones(u, theta=theta))
        shifted = rotate(s, AnalysisBasis(theta=theta - phi))
        assert np.max(np.abs(with_phase - shifted)) <= 1e-12
        p1 = noise_powers(with_phase)
        p2 = noise_powers(shifted)
        assert p1 == pytest.approx(p2, abs=1e-12)


def test_theta_sweep_is_sinusoidal():
    s = random_physical_spectrum(5)
    thetas = np.linspace(0.0, np.pi, 40, endpoint=False)
    values = np.array(
        [noise_powers(rotate(s, AnalysisBasis(theta=t)))[0] for t in thetas]
    )
    design = np.column_stack([np.ones_like(thetas), np.cos(2 * thetas), np.sin(2 * thetas)])
    coeffs, *_ = np.linalg.lstsq(design, values, rcond=None)
    residual = np.max(np.abs(design @ coeffs - values))
    assert residual <= 1e-8


def test_noise_positive_for_psd_input():
    for seed in range(10):
        s = random_physical_spectrum(seed)
        for theta in (0.0, 0.4, 1.1):
            s1, s2 = noise_powers(rotate(s, AnalysisBasis(theta=theta)))
            assert s1 >= 0.0 and s2 >= 0.0


def test_negative_power_flagged():
    s = -np.eye(4, dtype=complex)
    with pytest.raises(ValueError, match="negative noise power"):
        noise_powers(s)


def test_imaginary_power_flagged():
    s = np.zeros((4, 4), dtype=complex)
    s[0, 1] = 1.0j  # not Hermitian: block sum picks up an imaginary part
    with pytest.raises(ValueError, match="imaginary"):
        noise_powers(s)


def test_quadrature_phase_matrix_values():
    t = quadrature_phase_matrix(np.pi / 2)
    assert np.allclose(np.diag(t), [-1j, 1j, -1j, 1j])


def test_nonunitary_basis_rejected():
    with pytest.raises(ValueError, match="unitary"):
        AnalysisBasis(R=np.diag([1.0, 1.0, 1.0, 2.0]).astype(complex))


def test_duan_two_vacuum_modes_is_boundary():
    s = np.diag([1.0, 0.0, 1.0, 0.0]).astype(complex)
    rec = record_from_spectrum(s, omega=1.0)
    assert rec.duan_sum == pytest.approx(2.0, abs=1e-12)
    flagged, margin = duan_witness(rec)
    assert not flagged
    assert margin == pytest.approx(0.0, abs=1e-12)


def test_duan_flags_squeezed_mode():
    rec = NoiseRecord(
        omega=1.0, s1_amp=1.5, s1_phase=0.7, s2_amp=1.0, s2_phase=1.0,
        cross_corr=0j, duan_sum=1.7,
    )
    flagged, margin = duan_witness(rec)
    assert flagged
    assert margin == pytest.approx(0.3)


def test_cross_correlation_reads_off_diagonal_block():
    s = np.zeros((4, 4), dtype=complex)
    s[0, 2] = 0.25
    s[1, 3] = 0.5j
    assert cross_correlation(s) == pytest.approx(0.25 + 0.5j)


def test_record_from_spectrum_fields():
    s = random_physical_spectrum(6)
    rec = record_from_spectrum(s, omega=2.5)
    amp = rotate(s, AnalysisBasis(theta=0.0))
    phase = rotate(s, AnalysisBasis(theta=np.pi / 2))
    assert rec.omega == 2.5
    assert rec.s1_amp == pytest.approx(noise_powers(amp)[0])
    assert rec.s2_phase == pytest.approx(noise_powers(phase)[1])
    assert rec.duan_sum == pytest.approx(rec.s1_phase + rec.s2_amp)
