from __future__ import annotations

import math
import sys
import unittest
from fractions import Fraction
from pathlib import Path

import numpy as np
from sympy import legendre_symbol, primerange

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from elliptic_density.errors import DomainError  # noqa: E402
from elliptic_density.numtheory import (  # noqa: E402
    gamma_l,
    iter_prime_segments,
    jacobi,
    legendre_table,
    log_radical_table,
    odd_primes_upto,
    r_integral_quadrature,
    radical,
    sieve,
    theta_and_r_integral,
)

# sum_{p <= x} log p / p - log x tends to this constant
MERTENS_E = -1.332582275733221


class SieveTests(unittest.TestCase):
    def test_small_sieve(self) -> None:
        primes = sieve(100)

        self.assertEqual(len(primes), 25)
        self.assertEqual(primes.tolist()[:5], [2, 3, 5, 7, 11])
        self.assertIn(97, primes)
        self.assertNotIn(91, primes)

    def test_prime_count_to_one_million(self) -> None:
        self.assertEqual(len(sieve(10**6)), 78498)

    def test_segments_match_sympy(self) -> None:
        streamed = np.concatenate(list(iter_prime_segments(100_003, segment_size=1024))).tolist()

        self.assertEqual(streamed, list(primerange(2, 100_004)))

    def test_sieve_arrays_are_read_only(self) -> None:
        primes = sieve(1000).primes
        with self.assertRaises(ValueError):
            primes[0] = 4
        self.assertEqual(odd_primes_upto(10).tolist(), [3, 5, 7])

    def test_limit_below_two_is_rejected(self) -> None:
        with self.assertRaises(DomainError):
            sieve(1)


class SymbolTests(unittest.TestCase):
    def test_jacobi_values(self) -> None:
        self.assertEqual(jacobi(1, 9), 1)
        self.assertEqual(jacobi(3, 9), 0)
        self.assertEqual(jacobi(2, 15), 1)
        self.assertEqual(jacobi(7, 15), -1)
        for m in range(1, 80, 2):
            for n in range(0, 90):
                self.assertEqual(jacobi(n, m) == 0, math.gcd(n, m) > 1, msg=f"({n}/{m})")

    def test_jacobi_is_multiplicative(self) -> None:
        for m in range(1, 100, 2):
            for n1 in range(m):
                for n2 in range(m):
                    self.assertEqual(jacobi(n1 * n2, m), jacobi(n1, m) * jacobi(n2, m), msg=f"({n1}*{n2}/{m})")
        for m1 in range(1, 100, 2):
            for m2 in range(1, 99 // m1 + 1, 2):
                for n in range(m1 * m2):
                    self.assertEqual(jacobi(n, m1 * m2), jacobi(n, m1) * jacobi(n, m2), msg=f"({n}/{m1}*{m2})")

    def test_jacobi_negative_numerator(self) -> None:
        self.assertEqual(jacobi(-1, 7), -1)
        self.assertEqual(jacobi(-1, 5), 1)
        self.assertEqual(jacobi(-2, 3), 1)

    def test_jacobi_rejects_even_modulus(self) -> None:
        with self.assertRaises(DomainError):
            jacobi(3, 8)
        with self.assertRaises(DomainError):
            jacobi(3, -5)

    def test_legendre_table(self) -> None:
        for p in (3, 5, 7, 31, 101):
            chi = legendre_table(p)
            expected = [0] + [int(legendre_symbol(x, p)) for x in range(1, p)]
            self.assertEqual(chi.tolist(), expected)

    def test_half_the_units_are_squares(self) -> None:
        for p in primerange(3, 200):
            chi = legendre_table(p)
            self.assertEqual(int(np.count_nonzero(chi == 1)), (p - 1) // 2)
            self.assertEqual(int(np.count_nonzero(chi == -1)), (p - 1) // 2)


class RadicalTests(unittest.TestCase):
    def test_radical(self) -> None:
        self.assertEqual(radical(72), 6)
        self.assertEqual(radical(1), 1)
        self.assertEqual(radical(-45), 15)
        with self.assertRaises(DomainError):
            radical(0)

    def test_log_radical_table(self) -> None:
        table = log_radical_table(200)
        for n in (1, 2, 72, 97, 128, 180):
            self.assertAlmostEqual(table[n], math.log(radical(n)), places=12)

    def test_radical_is_multiplicative_on_coprime_pairs(self) -> None:
        n = np.arange(1, 1001, dtype=np.int64)
        left, right = np.meshgrid(n, n, indexing="ij")
        coprime = np.gcd(left, right) == 1
        table = log_radical_table(10**6)

        np.testing.assert_allclose(
            table[left[coprime] * right[coprime]], table[left[coprime]] + table[right[coprime]], rtol=0, atol=1e-9
        )
        for m, k in ((12, 35), (8, 999), (1, 997), (625, 81)):
            self.assertEqual(radical(m * k), radical(m) * radical(k))

    def test_gamma_l_is_multiplicative(self) -> None:
        for m in range(1, 61):
            for k in range(1, 61):
                if math.gcd(m, k) == 1:
                    self.assertEqual(gamma_l(m * k), gamma_l(m) * gamma_l(k), msg=f"{m}*{k}")

    def test_gamma_l(self) -> None:
        self.assertEqual(gamma_l(1), Fraction(1))
        self.assertEqual(gamma_l(9), Fraction(1, 8))
        self.assertEqual(gamma_l(15), Fraction(1, 15) * Fraction(9, 8) * Fraction(25, 24))
        with self.assertRaises(DomainError):
            gamma_l(0)


class ThetaIntegralTests(unittest.TestCase):
    def test_theta_at_one_hundred(self) -> None:
        result = theta_and_r_integral(100)
        expected = math.fsum(math.log(p) for p in primerange(2, 101))

        self.assertAlmostEqual(result.theta_T, expected, places=12)

    def test_small_cutoffs(self) -> None:
        self.assertAlmostEqual(theta_and_r_integral(2).r_integral, -math.log(2.0), places=14)
        self.assertAlmostEqual(theta_and_r_integral(10).r_integral, -1.5246, delta=1e-4)
        self.assertAlmostEqual(theta_and_r_integral(10).r_integral, r_integral_quadrature(10), delta=1e-8)

    def test_closed_form_matches_quadrature(self) -> None:
        closed = theta_and_r_integral(100).r_integral
        direct = r_integral_quadrature(100)

        self.assertAlmostEqual(closed, direct, delta=1e-8)

    def test_integral_settles_within_tail_estimate(self) -> None:
        lower = theta_and_r_integral(10**6)
        upper = theta_and_r_integral(10**7)

        self.assertLess(abs(upper.r_integral - lower.r_integral), lower.tail_estimate)
        self.assertLess(abs(upper.r_integral - (MERTENS_E - 1.0)), lower.tail_estimate)
        self.assertGreater(lower.tail_estimate, upper.tail_estimate)


if __name__ == "__main__":
    unittest.main()
