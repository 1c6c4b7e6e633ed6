import math

import numpy as np
import pytest
from scipy.special import factorial

from gaussfock import (
    CapacityError,
    GaussianState,
    InvalidDimensionError,
    InvalidInputError,
    InvalidParameterError,
    TailModel,
    apply_gaussian_symmetry,
    beam_splitter_mix,
    characteristic_function,
    coherent_state,
    displace,
    shale_conjugate,
    spectrum,
    thermal_state,
    vacuum,
)
from gaussfock import fock
from gaussfock.fock import (
    FockBasis,
    exponential_vector,
    gaussian_density,
    ladder,
    number,
    oracle_char_fn,
    oracle_spectrum,
    quadratures,
    random_disk,
    second_quantize_diag,
    second_quantize_unitary,
    shale_action_residual,
    shale_unitary,
    squeeze_matrix,
    thermal_density,
    thermal_trace_deficit,
    verify_gaussian,
    verify_shale_action,
    weyl_matrix,
    weyl_relation_residual,
)
from gaussfock.sampling import random_orthogonal_symplectic, random_symplectic, random_valid_covariance
from gaussfock.symplectic import block_to_complex


# -- basis -------------------------------------------------------------------------


def test_basis_shape_and_cap(monkeypatch):
    b = FockBasis((3, 4))
    assert b.dim == 12 and b.modes == 2
    assert b.occupations()[5].tolist() == [1, 1]
    with pytest.raises(InvalidDimensionError):
        FockBasis((1,))
    with pytest.raises(CapacityError):
        FockBasis((100, 100))
    monkeypatch.setenv("GAUSSFOCK_MEM_CAP", "10")
    with pytest.raises(CapacityError):
        FockBasis((4, 4))


def test_low_block():
    b = FockBasis((4, 6))
    idx = b.low_block()
    assert len(idx) == 2 * 3
    assert np.all(b.occupations()[idx] < [2, 3])


# -- ladder and quadratures ----------------------------------------------------------------


def test_ladder_small_and_number():
    a, adag = ladder(2)
    assert np.array_equal(a, [[0, 1], [0, 0]])
    a, adag = ladder(6)
    assert np.allclose(adag @ a, number(6))
    assert np.allclose(np.diag(adag @ a).real, np.arange(6))


def test_commutator_deficit_only_in_corner():
    N = 8
    a, adag = ladder(N)
    C = a @ adag - adag @ a
    D = np.eye(N)
    D[N - 1, N - 1] = 1 - N
    assert np.allclose(C, D)


def test_quadratures():
    N = 10
    q, p = quadratures(N)
    assert np.abs(q - q.conj().T).max() < 1e-15 and np.abs(p - p.conj().T).max() < 1e-15
    C = q @ p - p @ q
    assert np.allclose(C[: N - 1, : N - 1], 1j * np.eye(N - 1))
    a, _ = ladder(N)
    assert np.allclose((q + 1j * p) / math.sqrt(2), a)


def test_ladder_rejects_small_cutoff():
    with pytest.raises(InvalidDimensionError):
        ladder(1)


# -- Weyl operators and exponential vectors ------------------------------------------------------


def test_weyl_zero_is_identity():
    assert np.allclose(weyl_matrix(FockBasis((5, 3)), [0, 0]), np.eye(15))


def test_weyl_vacuum_amplitude(rng):
    b = FockBasis((40,))
    for z in random_disk(rng, 10, 1):
        W = weyl_matrix(b, z)
        assert abs(W[0, 0] - math.exp(-0.5 * abs(z[0]) ** 2)) <= 1e-8


def test_weyl_relation(rng):
    b = FockBasis((40,))
    for f, g in zip(random_disk(rng, 10, 1), random_disk(rng, 10, 1)):
        assert weyl_relation_residual(b, f, g) <= 1e-6


def test_weyl_relation_two_modes(rng):
    b = FockBasis((16, 16))
    f, g = random_disk(rng, 2, 2, radius=0.8)
    assert weyl_relation_residual(b, f, g, levels=6) <= 1e-6


def test_weyl_relation_fails_near_cutoff(rng):
    # the projection is what makes the check meaningful
    b = FockBasis((40,))
    assert weyl_relation_residual(b, 0.9, 0.9j, levels=40) > 1e-3


def test_exponential_vector_coefficients():
    b = FockBasis((6,))
    f = 0.7 - 0.3j
    expect = np.array([f**k / math.sqrt(factorial(k)) for k in range(6)])
    assert np.allclose(exponential_vector(b, [f]), expect)
    e0 = exponential_vector(b, [0])
    assert np.array_equal(e0, np.eye(6)[0])


def test_exponential_vector_identities(rng):
    b = FockBasis((40,))
    for f, g in zip(random_disk(rng, 10, 1), random_disk(rng, 10, 1)):
        assert fock.exponential_inner_residual(b, f, g) <= 1e-8
        assert fock.weyl_action_residual(b, f, g) <= 1e-6


def test_coherent_state_density_matches_closed_form(rng):
    # W(f)|0> = e^{-|f|^2/2} e(f) is the coherent state of amplitude f
    b = FockBasis((40,))
    f = 0.6 - 0.4j
    psi = math.exp(-0.5 * abs(f) ** 2) * exponential_vector(b, [f])
    rho = np.outer(psi, psi.conj())
    for z in random_disk(rng, 10, 1):
        assert abs(oracle_char_fn(rho, b, z) - characteristic_function(coherent_state([f]), z)) <= 1e-8


# -- thermal densities and second quantization --------------------------------------------------


def test_thermal_density_diagonal():
    b = FockBasis((30,))
    rho = thermal_density(b, math.log(2))
    assert np.allclose(np.diag(rho).real, 0.5 * 2.0 ** -np.arange(30), rtol=1e-12)
    assert thermal_trace_deficit(b, math.log(2)) == pytest.approx(2.0**-30, rel=1e-9)
    assert 1 - np.trace(rho).real == pytest.approx(2.0**-30, rel=1e-6)


def test_thermal_density_rejects_nonpositive_s():
    with pytest.raises(InvalidParameterError):
        thermal_density(FockBasis((5,)), 0.0)


def test_trace_of_second_quantized_contraction():
    s = 0.8
    b = FockBasis((80,))
    G = second_quantize_diag(b, math.exp(-s))
    assert np.trace(G).real == pytest.approx(1 / (1 - math.exp(-s)), rel=1e-12)
    assert np.allclose(G * (1 - math.exp(-s)), thermal_density(b, s))
    assert np.allclose(second_quantize_diag(b, 1.0), np.eye(80))


def test_second_quantize_diag_on_exponential_vectors(rng):
    b = FockBasis((40, 40))
    lam = np.array([0.3 * np.exp(0.4j), np.exp(-1.1j)])
    for f in random_disk(rng, 5, 2):
        lhs = second_quantize_diag(b, lam) @ exponential_vector(b, f)
        assert np.abs(lhs - exponential_vector(b, lam * f)).max() <= 1e-8
    with pytest.raises(InvalidParameterError):
        second_quantize_diag(b, [2.0, 1.0])


def test_second_quantize_unitary_on_exponential_vectors(rng):
    b = FockBasis((12, 12))
    U = block_to_complex(random_orthogonal_symplectic(2, rng))
    f = np.array([0.3 + 0.1j, -0.2j])
    lhs = second_quantize_unitary(b, U) @ exponential_vector(b, f)
    assert np.abs(lhs - exponential_vector(b, U @ f)).max() <= 1e-6


# -- squeezing and Shale unitaries -------------------------------------------------------------


def test_squeeze_zero_is_identity():
    assert np.allclose(squeeze_matrix(10, 0.0), np.eye(10))


def test_squeezed_vacuum_amplitudes():
    # closed-form squeezed vacuum: <2k|S|0> = (-tanh r / 2)^k sqrt((2k)!) / k! / sqrt(cosh r)
    r, N = 0.5, 60
    col = squeeze_matrix(N, r)[:, 0]
    assert col[0].real == pytest.approx(math.cosh(r) ** -0.5, abs=1e-6)
    for k in range(8):
        expect = (-math.tanh(r) / 2) ** k * math.sqrt(factorial(2 * k)) / factorial(k) / math.sqrt(math.cosh(r))
        assert abs(col[2 * k] - expect) <= 1e-8
        assert abs(col[2 * k + 1]) <= 1e-12


@pytest.mark.parametrize("u", [0.8, -0.5, 0.6j, 0.7 + 0.7j])
def test_squeeze_conjugation(u):
    rep = verify_shale_action(40, 0.5, u, tol=1e-5)
    assert rep["passed"], rep
    assert verify_shale_action(120, 1.0, u, tol=1e-5, levels=5)["passed"]


def test_shale_unitary_single_and_two_mode(rng):
    L = np.diag([math.exp(-0.4), math.exp(0.4)])
    assert shale_action_residual(FockBasis((40,)), L, [0.6 - 0.3j], levels=5) <= 1e-6
    L2 = random_symplectic(2, rng, max_squeeze=0.3)
    assert shale_action_residual(FockBasis((22, 22)), L2, [0.3 + 0.2j, -0.1 + 0.4j], levels=4) <= 1e-4


def test_shale_unitary_is_unitary_on_low_block(rng):
    b = FockBasis((30,))
    G = shale_unitary(b, random_symplectic(1, rng, max_squeeze=0.3))
    assert fock.unitarity_residual(b, G, levels=8) <= 1e-8


# -- densities and characteristic functions -------------------------------------------------------


def test_vacuum_projector_characteristic_function(rng):
    b = FockBasis((40,))
    rho = gaussian_density(vacuum(1), b)
    assert np.allclose(rho[0, 0], 1) and np.abs(rho).sum() == pytest.approx(1)
    for z in random_disk(rng, 10, 1):
        assert abs(oracle_char_fn(rho, b, z) - math.exp(-0.5 * abs(z[0]) ** 2)) <= 1e-8
    assert oracle_char_fn(rho, b, [0]) == pytest.approx(1.0)


def test_thermal_oracle_real_axis():
    b = FockBasis((60,))
    rho = thermal_density(b, math.log(2))
    for x in np.linspace(-1, 1, 9):
        assert abs(oracle_char_fn(rho, b, [x]) - math.exp(-1.5 * x**2)) <= 1e-6


def test_verify_gaussian_examples(rng):
    zs = random_disk(rng, 20, 1)
    assert verify_gaussian(vacuum(1), FockBasis((30,)), zs, 1e-6).passed
    assert verify_gaussian(thermal_state([3.0]), FockBasis((60,)), zs, 1e-6).passed
    r, alpha = 0.5, 0.3 * np.exp(0.9j)
    sq = displace(shale_conjugate(vacuum(1), np.diag([math.exp(-r), math.exp(r)])), [alpha])
    rep = verify_gaussian(sq, FockBasis((60,)), zs, 1e-5)
    assert rep.passed and rep.trace_deficit < 1e-10 and rep.min_eigenvalue > -1e-10


def test_verify_gaussian_random_two_mode(rng):
    S = random_valid_covariance(2, rng, d_max=1.6, max_squeeze=0.3)
    s = GaussianState(0.4 * (rng.normal(size=2) + 1j * rng.normal(size=2)), S)
    rep = verify_gaussian(s, FockBasis((24, 24)), random_disk(rng, 10, 2), 1e-4)
    assert rep.passed, rep.max_deviation


def test_verify_gaussian_detects_wrong_state(rng):
    # density of d = 3 compared against the formula for d = 2 must fail
    b = FockBasis((60,))
    rho = gaussian_density(thermal_state([3.0]), b)
    z = np.array([0.8])
    assert abs(oracle_char_fn(rho, b, z) - characteristic_function(thermal_state([2.0]), z)) > 1e-2


def test_symmetry_action_matches_operator_conjugation(rng):
    # U rho U^* with U = W(alpha) Gamma_s(L) built from matrices
    b = FockBasis((30,))
    L = random_symplectic(1, rng, max_squeeze=0.2)
    alpha = np.array([0.25 - 0.1j])
    s = thermal_state([1.4])
    U = weyl_matrix(b, alpha) @ shale_unitary(b, L)
    rho = U @ gaussian_density(s, b) @ U.conj().T
    target = apply_gaussian_symmetry(s, alpha, L)
    for z in random_disk(rng, 8, 1, radius=0.8):
        assert abs(oracle_char_fn(rho, b, z) - characteristic_function(target, z)) <= 1e-6


def test_oracle_refuses_tails_and_mismatch():
    with pytest.raises(InvalidInputError):
        gaussian_density(GaussianState(np.zeros(1), np.eye(2), TailModel.geometric(1, 0.5)), FockBasis((5,)))
    with pytest.raises(InvalidInputError):
        gaussian_density(vacuum(2), FockBasis((5,)))


# -- spectra -------------------------------------------------------------------------------


def test_oracle_spectrum_thermal():
    b = FockBasis((30,))
    got = oracle_spectrum(thermal_density(b, math.log(2)), 12)
    assert np.allclose(got, 0.5 * 2.0 ** -np.arange(12), atol=1e-9, rtol=0)


def test_oracle_spectrum_pure_projector():
    b = FockBasis((10,))
    got = oracle_spectrum(gaussian_density(vacuum(1), b), 3)
    assert np.allclose(got, [1, 0, 0], atol=1e-12)


def test_oracle_spectrum_two_mode_matches_closed_form():
    b = FockBasis((30, 30))
    s = thermal_state([3.0, 1.5])
    oracle = oracle_spectrum(gaussian_density(s, b), 15)
    closed = [p for p, _ in spectrum(s, 15)][:15]
    assert np.allclose(oracle, closed, atol=1e-8)


def test_oracle_spectrum_of_mixed_state():
    b = FockBasis((20, 20))
    s = beam_splitter_mix(thermal_state([2.0, 1.2]), shale_conjugate(vacuum(2), np.diag([1.2, 0.9, 1 / 1.2, 1 / 0.9])), 0.5)
    oracle = oracle_spectrum(gaussian_density(s, b), 8)
    closed = [p for p, _ in spectrum(s, 8)][:8]
    assert np.allclose(oracle, closed, atol=1e-6)


def test_verify_weyl_report():
    rep = fock.verify_weyl(40, 5, 1e-6, seed=3)
    assert rep["passed"] and rep["levels"] == 20
