"""Tests for the random Euler-product torus model: exact moments against a
brute-force product-quadrature oracle, the product-form characteristic
function against both Monte Carlo and the truncated moment expansion, and
the moment bound reports."""

import math

import numpy as np
import pytest

from zetalab.errors import CapacityError, DomainError, QuadratureError
from zetalab.torus import (
    chf_by_moments,
    chf_moments_envelope,
    chf_montecarlo,
    chf_product,
    eval_S,
    make_torus_model,
    moment_bound_check,
    torus_moment_exact,
    _eval_S_block,
)


def _moment_bruteforce(model, m, k, K=16):
    """E[S^m conj(S)^k] by the midpoint product rule over the full torus.

    The integrand is a trigonometric polynomial of per-prime degree at most
    3 (m + k), so the rule is exact once K exceeds that; completely
    independent of the coefficient-matching route.
    """
    n_p = model.n_primes()
    grids = np.meshgrid(
        *[(np.arange(K) + 0.5) / K for _ in range(n_p)], indexing="ij"
    )
    theta = np.stack([g.ravel() for g in grids], axis=1)
    S = _eval_S_block(model, theta)
    return complex(np.mean(S**m * np.conj(S) ** k))


@pytest.fixture(scope="module")
def model_10():
    return make_torus_model(0.75, 10.0)


def test_second_moment_is_two_exactly(model_10, model_075_300):
    for model in (model_10, model_075_300):
        got = torus_moment_exact(model, 1, 1)
        assert got.imag == 0.0
        assert abs(got.real - 2.0) <= 1e-14
        # Same diagonal sum, computed directly from the term table.
        diag = math.fsum(float(c) * float(c) for c in model.term_coeff)
        assert abs(got.real - diag) <= 1e-14


def test_first_moments_vanish(model_10, model_075_300):
    for model in (model_10, model_075_300):
        assert torus_moment_exact(model, 1, 0) == 0.0
        assert torus_moment_exact(model, 0, 1) == 0.0
    assert torus_moment_exact(model_10, 0, 0) == 1.0


def test_moments_match_bruteforce_quadrature(model_10):
    # Includes the off-diagonal (2, 1), nonzero because p * p matches the
    # prime-square term p^2 <= x under unique factorization.
    for m, k in [(1, 1), (2, 0), (2, 1), (2, 2), (0, 2), (1, 2)]:
        exact = torus_moment_exact(model_10, m, k)
        brute = _moment_bruteforce(model_10, m, k)
        assert abs(exact - brute) <= 1e-12, (m, k)
    assert abs(torus_moment_exact(model_10, 2, 1).real - 0.3589665091334) <= 1e-12


def test_fourth_moment_against_montecarlo(model_075_300):
    report = moment_bound_check(model_075_300, 2, 100_000, seed=11)
    assert report["mc_matches_exact"]
    exact = torus_moment_exact(model_075_300, 2, 2).real
    assert report["exact"] == exact
    assert abs(report["mc_estimate"] - exact) <= 3.0 * report["mc_std_error"]


def test_moment_bounds_through_k3(model_075_300):
    for k in range(4):
        report = moment_bound_check(model_075_300, k, 30_000, seed=5)
        assert report["bound"] == 18.0**k * math.factorial(k)
        assert report["exact_within_bound"]
        assert report["mc_within_bound"]
        assert report["mc_matches_exact"]
    # k = 0 is the normalization sanity row.
    base = moment_bound_check(model_075_300, 0, 30_000, seed=5)
    assert base["exact"] == 1.0
    assert base["mc_estimate"] == 1.0


def test_explicit_V_rescales_moments(model_10):
    scaled = make_torus_model(0.75, 10.0, V=2.0 * model_10.V)
    got = torus_moment_exact(scaled, 1, 1).real
    assert abs(got - 1.0) <= 1e-14


def test_chf_product_basics(model_10):
    assert chf_product(model_10, 0.0, 0.0) == 1.0 + 0.0j
    a = chf_product(model_10, 0.3, -0.2)
    # theta -> -theta sends S to conj(S), so the chf is even in v; plain
    # conjugation inverts both arguments. (The chf is genuinely complex at
    # small x: the third-order moment E[S^2 conj S] does not vanish.)
    assert abs(a - chf_product(model_10, 0.3, 0.2)) <= 1e-12
    assert abs(a - np.conj(chf_product(model_10, -0.3, 0.2))) <= 1e-12
    assert abs(a.imag) > 1e-3
    assert abs(chf_product(model_10, 0.3, -0.2, quad_points=128) - a) <= 1e-11


def test_chf_product_matches_moment_expansion(model_10):
    u, v = 0.007, 0.003
    prod = chf_product(model_10, u, v)
    trunc = chf_by_moments(model_10, u, v, N=6)
    env = chf_moments_envelope(u, v, 6)
    assert env < 1e-4
    assert abs(prod - trunc) <= env
    # N = 2 keeps only the constant term (odd orders vanish).
    assert chf_by_moments(model_10, u, v, N=2) == 1.0 + 0.0j


def test_chf_product_matches_montecarlo(model_075_300):
    vals = (-1.0, -0.5, 0.0, 0.5, 1.0)
    for u in vals:
        for v in vals:
            exact = chf_product(model_075_300, u, v)
            mc, se = chf_montecarlo(model_075_300, u, v, 20_000, seed=3)
            assert abs(mc - exact) <= 3.0 * se + 1e-12, (u, v)


def test_chf_montecarlo_deterministic_across_workers(model_10):
    a, se_a = chf_montecarlo(model_10, 0.4, 0.1, 9000, seed=42)
    b, se_b = chf_montecarlo(model_10, 0.4, 0.1, 9000, seed=42)
    assert a == b and se_a == se_b
    c, se_c = chf_montecarlo(model_10, 0.4, 0.1, 9000, seed=42, workers=2)
    assert a == c and se_a == se_c
    d, _ = chf_montecarlo(model_10, 0.4, 0.1, 9000, seed=43)
    assert d != a


def test_eval_S_matches_block_route(model_10):
    rng = np.random.Generator(np.random.Philox(key=[9, 0]))
    theta = rng.random((5, model_10.n_primes()))
    block = _eval_S_block(model_10, theta)
    for i in range(5):
        point = {int(p): float(theta[i, j]) for j, p in enumerate(model_10.primes)}
        scalar = eval_S(model_10, point)
        assert abs(scalar - block[i]) <= 1e-13
    # theta = 0 gives the plain coefficient sum.
    zero = eval_S(model_10, {int(p): 0.0 for p in model_10.primes})
    want = math.fsum(float(c) for c in model_10.term_coeff)
    assert abs(zero - want) <= 1e-15


def test_model_structure(model_075_300):
    m = model_075_300
    assert m.n_primes() == int(np.count_nonzero(m.term_exponent == 1))
    values = m.primes[m.term_prime_index].astype(np.float64) ** m.term_exponent
    assert np.array_equal(values.astype(np.int64), m.term_value)
    assert np.all(m.term_value <= m.x)
    assert np.all(m.term_coeff > 0.0)


def test_domain_and_capacity_errors(model_10):
    with pytest.raises(DomainError):
        make_torus_model(0.5, 100.0)
    with pytest.raises(DomainError):
        make_torus_model(0.75, 100.0, V=-1.0)
    with pytest.raises(DomainError):
        torus_moment_exact(model_10, 4, 3)
    with pytest.raises(DomainError):
        torus_moment_exact(model_10, -1, 1)
    with pytest.raises(CapacityError):
        torus_moment_exact(model_10, 3, 3, max_keys=10)
    with pytest.raises(DomainError):
        chf_product(model_10, 0.1, 0.1, quad_points=32)
    with pytest.raises(DomainError):
        chf_montecarlo(model_10, 0.1, 0.1, 500, seed=0)
    with pytest.raises(DomainError):
        chf_by_moments(model_10, 0.1, 0.1, N=3)
    with pytest.raises(DomainError):
        chf_by_moments(model_10, 0.1, 0.1, N=8)
    with pytest.raises(DomainError):
        eval_S(model_10, {2: 0.1, 3: 0.2, 5: 0.3})


def test_chf_product_quadrature_failure(model_10):
    # Oscillation far beyond any reachable midpoint resolution.
    with pytest.raises(QuadratureError):
        chf_product(model_10, 3e5, 0.0)
