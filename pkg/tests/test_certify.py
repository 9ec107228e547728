import random
from fractions import Fraction

import pytest
import sympy

from conftest import rational_rank

from operadim.certify import (
    RankCertificate,
    certify_rank,
    is_prime_u63,
    probe_prime,
    select_primes,
)
from operadim.consequences import SparseRowMatrix, canonical_row

PROBE = 2**63 - 25


# --- primality ---------------------------------------------------------------

def test_is_prime_small_values():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41}
    for m in range(43):
        assert is_prime_u63(m) == (m in primes)


def test_is_prime_matches_sympy_near_top_of_range():
    for m in range(2**63 - 1000, 2**63, 7):
        assert is_prime_u63(m) == sympy.isprime(m)


def test_is_prime_matches_sympy_randomized():
    rng = random.Random(3)
    for _ in range(300):
        m = rng.randrange(2, 2**63)
        assert is_prime_u63(m) == sympy.isprime(m)


def test_is_prime_known_strong_pseudoprimes():
    # strong pseudoprimes to base 2 must still be rejected
    for m in [2047, 3277, 4033, 1373653, 3215031751, 3825123056546413051]:
        assert not is_prime_u63(m)


def test_is_prime_range_check():
    with pytest.raises(ValueError):
        is_prime_u63(2**63)
    with pytest.raises(ValueError):
        is_prime_u63(-1)


# --- prime selection ---------------------------------------------------------

def test_probe_prime_is_largest_below_2_63():
    p = probe_prime()
    assert p == 2**63 - 25
    assert is_prime_u63(p)
    assert not any(is_prime_u63(m) for m in range(p + 1, 2**63))


def test_select_primes_exact_for_r_60():
    assert select_primes(60) == (2**63 - 25, 2**63 - 165, 2**63 - 259)


def test_select_primes_counts():
    assert len(select_primes(3)) == 1
    assert len(select_primes(32)) == 2
    assert len(select_primes(60)) == 3
    assert len(select_primes(175)) == 11
    assert len(select_primes(530)) == 39
    assert len(select_primes(1080)) == 87


def test_select_primes_bound_holds_and_is_minimal():
    for r in [3, 32, 60, 175, 530]:
        primes = select_primes(r)
        product = 1
        for p in primes:
            product *= p
        assert product**2 > r**r
        shorter = 1
        for p in primes[:-1]:
            shorter *= p
        assert shorter**2 <= r**r  # one fewer prime would not meet the bound
        assert list(primes) == sorted(primes, reverse=True)
        assert all(is_prime_u63(p) for p in primes)


def test_select_primes_consecutive_largest():
    # the chosen primes are consecutive: nothing prime lies between them
    primes = select_primes(60)
    for hi, lo in zip(primes, primes[1:]):
        assert not any(is_prime_u63(m) for m in range(lo + 1, hi))


def test_select_primes_edge_cases():
    assert select_primes(0) == ()
    assert len(select_primes(1)) == 1
    with pytest.raises(ValueError):
        select_primes(-1)


# --- certification -----------------------------------------------------------

def _unit_matrix(rows, n_cols) -> SparseRowMatrix:
    sparse = [canonical_row((j, v) for j, v in enumerate(r) if v) for r in rows]
    return SparseRowMatrix.from_rows([r for r in sparse if r], n_cols, 3)


def test_certify_empty_matrix_is_rank_zero():
    cert = certify_rank(SparseRowMatrix.from_rows([], 4, 3))
    assert cert.r == 0
    assert cert.primes == ()
    assert cert.verdict == "certified"
    assert cert.bound_ok


def test_certify_rejects_non_unit_entries():
    m = _unit_matrix([[2, 0], [0, 1]], 2)
    with pytest.raises(ValueError, match="Hadamard"):
        certify_rank(m)


def test_certify_random_unit_matrices_match_rational_rank():
    rng = random.Random(77)
    for _ in range(100):
        n_rows, n_cols = rng.randint(1, 8), rng.randint(1, 8)
        dense = [
            [rng.choice([-1, 0, 0, 1]) for _ in range(n_cols)]
            for _ in range(n_rows)
        ]
        matrix = _unit_matrix(dense, n_cols)
        cert = certify_rank(matrix)
        expected = rational_rank([[Fraction(v) for v in r] for r in dense])
        assert cert.verdict == "certified"
        assert cert.r == expected
        assert cert.bound_ok
        corank = n_cols - cert.r
        if matrix.n_rows == 0:
            assert cert.primes == ()
        elif corank == 0:
            assert len(cert.primes) == 1  # full modular rank certifies alone
        else:
            assert len(cert.primes) == len(select_primes(corank))
        assert all(rk == cert.r for rk in cert.ranks)


def test_certify_uses_probe_prime_first():
    m = _unit_matrix([[1, 0], [0, 1]], 2)
    cert = certify_rank(m)
    assert cert.primes[0] == probe_prime()


def _wide_matrix(n_cols=100) -> SparseRowMatrix:
    # content is irrelevant once a fake rank_fn is supplied; only n_cols and
    # the unit-entry precondition matter
    return _unit_matrix([[1] + [0] * (n_cols - 1)], n_cols)


def test_certify_disagreement_yields_lower_bound_only():
    # corank 40 needs two primes, so a second opinion exists to disagree
    m = _wide_matrix()

    def flaky(matrix, p):  # a later prime sees a lower rank than the probe
        return 60 if p == probe_prime() else 59

    cert = certify_rank(m, rank_fn=flaky)
    assert cert.verdict == "lower_bound_only"
    assert cert.r == 60  # the maximum observed rank is a valid lower bound


def test_certify_re_probes_a_larger_observed_rank():
    m = _wide_matrix()

    def staged(matrix, p):  # the probe prime is unlucky and drops rank
        return 60 if p == probe_prime() else 61

    cert = certify_rank(m, rank_fn=staged)
    assert cert.r == 61  # re-probed up to the larger observation
    assert cert.verdict == "lower_bound_only"
    assert max(cert.ranks) <= cert.r


def test_certify_full_corank_zero_uses_single_prime():
    m = _unit_matrix([[1, 0], [0, 1]], 2)
    cert = certify_rank(m)
    assert cert.r == 2
    assert cert.primes == (probe_prime(),)
    assert cert.verdict == "certified"


def test_certify_prime_count_keyed_to_corank():
    # rank 3 inside a 12-column space: the claim is corank 9, one prime
    rows = [[0] * 12 for _ in range(3)]
    for i in range(3):
        rows[i][i] = 1
    cert = certify_rank(_unit_matrix(rows, 12))
    assert cert.r == 3
    assert len(cert.primes) == len(select_primes(9)) == 1


def test_certificate_json_round_trip():
    cert = RankCertificate(
        degree=4, r=60,
        primes=select_primes(60), ranks=(60, 60, 60),
        bound_ok=True, verdict="certified", timings_ms=(1.0, 2.0, 3.0),
    )
    again = RankCertificate.from_json(cert.to_json())
    assert again == cert
    assert set(cert.to_json().replace('"', " ").split()) >= {
        "degree", "r", "primes", "ranks", "bound_ok", "verdict", "timings_ms"
    }
