import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from toeplitz_lab import symbols
from toeplitz_lab.errors import EvaluationAtAtom, TailNotResolved

E = math.exp(-1)
# e * (Taylor coefficients of exp((1 + z)/(z - 1))), from a symbolic series expansion
PHI1_SCALED = [1, -2, 0, 2 / 3, 2 / 3, 2 / 5, 4 / 45]


def test_phi1_coefficients_match_series_expansion():
    coeffs = symbols.fourier_coeffs(symbols.singular(1.0), 7).coeffs
    assert np.allclose(coeffs, E * np.array(PHI1_SCALED), atol=1e-14)


def test_phi1_value_at_origin():
    assert symbols.singular(1.0)(0) == pytest.approx(E, abs=1e-15)
    assert symbols.evaluate(symbols.singular(2.5), 0.0) == pytest.approx(math.exp(-2.5))


def test_blaschke_factor_coefficients():
    coeffs = symbols.blaschke_factor_coeffs(0.5, 5)
    expected = [0.5] + [-0.75 * 0.5 ** (k - 1) for k in range(1, 5)]
    assert np.allclose(coeffs, expected, atol=1e-15)


def test_blaschke_normalisation_positive_at_origin():
    phi = symbols.blaschke(0.5j)
    assert phi(0) == pytest.approx(0.5)
    assert abs(phi(0.5j)) < 1e-15


def test_unimodular_on_circle_away_from_atom():
    phi = symbols.blaschke(0.3, 0.5j) * symbols.singular(0.7, cmath.exp(1j))
    theta = np.linspace(0.1, 0.9, 50)
    assert np.allclose(np.abs(phi(np.exp(1j * theta))), 1.0, atol=1e-12)


def test_evaluation_at_atom_raises():
    with pytest.raises(EvaluationAtAtom):
        symbols.singular(1.0)(1.0)
    with pytest.raises(EvaluationAtAtom):
        symbols.singular(1.0, 1j)(np.array([1.0, 1j]))


def test_radial_limit_at_atom_is_zero():
    assert abs(symbols.singular(1.0)(0.999999)) < 1e-300


def test_evaluation_outside_disk_rejected():
    with pytest.raises(ValueError):
        symbols.monomial(1)(1.5)


def test_invalid_construction():
    with pytest.raises(ValueError):
        symbols.blaschke(1.2)
    with pytest.raises(ValueError):
        symbols.InnerFunction(singular_atoms=((2.0, 1.0),))
    with pytest.raises(ValueError):
        symbols.singular(-1.0)
    with pytest.raises(OverflowError):
        symbols.singular(1000.0)


def test_zero_at_origin_becomes_monomial():
    phi = symbols.blaschke(0.0, 0.0, 0.5)
    assert phi.monomial_order == 2
    assert phi.blaschke_zeros == ((0.5 + 0j, 1),)


def test_multiply_adds_masses_and_merges_atoms():
    phi = symbols.multiply(symbols.singular(0.5), symbols.singular(0.25))
    assert phi.singular_atoms == ((1 + 0j, 0.75),)
    assert symbols.power(symbols.singular(0.5), 4).singular_atoms == ((1 + 0j, 2.0),)


def test_classify():
    assert symbols.classify(symbols.blaschke(0.3)) is symbols.SymbolClass.FINITE_BLASCHKE
    assert symbols.classify(symbols.monomial(3)) is symbols.SymbolClass.FINITE_BLASCHKE
    assert symbols.classify(symbols.singular(1.0)) is symbols.SymbolClass.HAS_SINGULAR_PART


def test_json_round_trip():
    phi = symbols.InnerFunction(2, ((0.3 + 0.1j, 2),), ((1j, 0.5),))
    back = symbols.InnerFunction.from_json(phi.to_json())
    assert back == phi
    assert json.loads(phi.to_json())["monomial_order"] == 2


def test_tail_bound_of_monomial_is_zero():
    series = symbols.fourier_coeffs(symbols.monomial(3), 8)
    assert series.tail_bound == 0.0
    assert np.array_equal(series.coeffs, np.eye(8)[3])


def test_effective_degree_monomial():
    assert symbols.effective_degree(symbols.monomial(3), 1e-8, 100) == 3


def test_effective_degree_blaschke_closed_form():
    # tail beyond D is sqrt(0.75) / 2^D for b_{1/2}; first D with tail <= 1e-8 is 27
    assert symbols.effective_degree(symbols.blaschke(0.5), 1e-8, 200) == 27


def test_effective_degree_singular_unresolved():
    with pytest.raises(TailNotResolved):
        symbols.effective_degree(symbols.singular(1.0), 1e-8, 1024)


def test_singular_tail_decays_slowly():
    tails = [symbols.fourier_coeffs(symbols.singular(1.0), n).tail_bound for n in (64, 256, 1024)]
    assert tails[0] > tails[1] > tails[2] > 0.01


def test_sampled_oracle_matches_recurrence():
    phi = symbols.singular(1.0) * symbols.blaschke(0.3)
    direct = symbols.fourier_coeffs(phi, 64).coeffs
    sampled = symbols.fourier_coeffs_sampled(phi, 64)
    assert np.max(np.abs(direct - sampled)) < 1e-10


def test_half_masses_convolve_to_unit_mass():
    half = symbols.atom_coeffs(0.5, 256)
    conv = symbols.truncated_convolution(half, half, 256)
    assert np.linalg.norm(conv - symbols.atom_coeffs(1.0, 256)) < 1e-12


def test_rotated_atom():
    xi = cmath.exp(0.4j)
    coeffs = symbols.fourier_coeffs(symbols.singular(1.0, xi), 7).coeffs
    expected = E * np.array(PHI1_SCALED) * np.conj(xi) ** np.arange(7)
    assert np.allclose(coeffs, expected, atol=1e-14)


def test_tail_energies_include_beyond_array():
    tail = symbols.tail_energies(np.array([0.6, 0.0]))
    assert tail == pytest.approx([0.64, 0.64])


zeros = st.complex_numbers(max_magnitude=0.85, allow_nan=False, allow_infinity=False).filter(
    lambda a: abs(a) > 1e-3
)


@given(st.lists(zeros, min_size=1, max_size=3), st.floats(0.05, 2.0))
def test_energy_never_exceeds_one(zs, mass):
    phi = symbols.blaschke(*zs) * symbols.singular(mass)
    series = symbols.fourier_coeffs(phi, 128)
    assert series.energy <= 1 + 1e-12


@given(st.lists(zeros, min_size=1, max_size=3))
def test_blaschke_coefficients_match_sampling(zs):
    phi = symbols.blaschke(*zs)
    direct = symbols.fourier_coeffs(phi, 32).coeffs
    sampled = symbols.fourier_coeffs_sampled(phi, 32, radius=0.95)
    assert np.max(np.abs(direct - sampled)) < 1e-9


@given(st.floats(0.05, 3.0), st.floats(0.05, 3.0))
def test_atom_masses_add(s, t):
    conv = symbols.truncated_convolution(symbols.atom_coeffs(s, 128), symbols.atom_coeffs(t, 128), 128)
    assert np.linalg.norm(conv - symbols.atom_coeffs(s + t, 128)) < 1e-11
