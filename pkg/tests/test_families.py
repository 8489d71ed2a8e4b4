from __future__ import annotations

import math
import random
import sys
import unittest
from pathlib import Path

from sympy import primerange

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from elliptic_density.config_schema import WeightConfig  # noqa: E402
from elliptic_density.errors import AdmissibilityError, DomainError, UnsupportedError  # noqa: E402
from elliptic_density.families import (  # noqa: E402
    F1,
    F2,
    check_curve,
    conductor,
    count_nonsingular_points,
    cross_check_bad_prime,
    enumerate_family,
    family_by_name,
    is_bad_residue,
    lambda_p,
    lambda_prime_power,
    make_weight,
    predicted_family_size,
    reduction_type,
    scale_family,
    trace_of_frobenius,
    validate_and_residues,
)
from elliptic_density.types import Curve  # noqa: E402


def random_curves(family, count: int, seed: int) -> list[Curve]:
    rng = random.Random(seed)
    modulus = family.residue_modulus
    curves = []
    while len(curves) < count:
        a = modulus * rng.randrange(0, 500) + 1
        b = modulus * rng.randrange(0, 500) + 1
        if math.gcd(a, b) == 1:
            curves.append(Curve(a=a, b=b))
    return curves


class ParameterTests(unittest.TestCase):
    def test_family_lookup(self) -> None:
        self.assertIs(family_by_name("f1"), F1)
        self.assertIs(family_by_name("F2"), F2)
        with self.assertRaises(DomainError):
            family_by_name("f3")

    def test_residues_lift_the_congruence_class(self) -> None:
        params = validate_and_residues(F1, 3, 1, 2)

        self.assertEqual(params.modulus, 6)
        self.assertEqual((params.r % 3, params.r % 2), (1, 1))
        self.assertEqual((params.t % 3, params.t % 2), (2, 1))

        params = validate_and_residues(F2, 5, 2, 3)
        self.assertEqual(params.modulus, 20)
        self.assertEqual((params.r % 5, params.r % 4), (2, 1))
        self.assertEqual((params.t % 5, params.t % 4), (3, 1))

    def test_shared_prime_is_named(self) -> None:
        with self.assertRaises(AdmissibilityError) as ctx:
            validate_and_residues(F1, 3, 1, 1)
        self.assertEqual(ctx.exception.prime, 3)

        with self.assertRaises(AdmissibilityError) as ctx:
            validate_and_residues(F2, 5, 2, 1)
        self.assertEqual(ctx.exception.prime, 5)

    def test_even_modulus_is_rejected(self) -> None:
        with self.assertRaises(DomainError):
            validate_and_residues(F1, 4, 1, 1)

    def test_check_curve(self) -> None:
        check_curve(F1, Curve(3, 5))
        with self.assertRaises(AdmissibilityError):
            check_curve(F1, Curve(2, 1))
        with self.assertRaises(AdmissibilityError):
            check_curve(F2, Curve(3, 1))
        with self.assertRaises(AdmissibilityError):
            check_curve(F1, Curve(3, 9))


class ScalingTests(unittest.TestCase):
    def test_scalings(self) -> None:
        f1 = scale_family(validate_and_residues(F1, 1, 1, 1), 1.0e6)
        f2 = scale_family(validate_and_residues(F2, 1, 1, 1), 1.0e6)

        self.assertEqual((f1.A, f1.B), (100.0, 100.0))
        self.assertAlmostEqual(f2.A, 1.0e6**0.25, places=9)
        self.assertEqual(f2.B, 1000.0)
        with self.assertRaises(DomainError):
            scale_family(validate_and_residues(F1, 1, 1, 1), 50)

    def test_predicted_size(self) -> None:
        scaled = scale_family(validate_and_residues(F1, 1, 1, 1), 1.0e6)

        self.assertAlmostEqual(predicted_family_size(scaled), 1.0e4 / (3.0 * math.pi**2 / 6.0), places=9)
        self.assertAlmostEqual(predicted_family_size(scaled), 2026.4, delta=0.1)

        thinned = scale_family(validate_and_residues(F1, 3, 1, 2), 1.0e6)
        ratio = predicted_family_size(thinned) / predicted_family_size(scaled)
        self.assertAlmostEqual(ratio, 1.0 / 8.0, places=12)

    def test_enumeration_respects_invariants(self) -> None:
        params = validate_and_residues(F1, 3, 1, 2)
        scaled = scale_family(params, 1.0e5)
        curves = list(enumerate_family(scaled))

        self.assertGreater(len(curves), 0)
        for curve, weight in curves:
            check_curve(F1, curve, params)
            self.assertGreaterEqual(weight, 0.0)
        keys = [(curve.a, curve.b) for curve, _weight in curves]
        self.assertEqual(keys, sorted(keys))

    def test_enumeration_matches_a_naive_scan(self) -> None:
        cases = ((F1, 1, 1, 1, 1.0e6), (F1, 3, 1, 2, 1.0e6), (F2, 1, 1, 1, 4.0e4), (F2, 5, 1, 1, 4.0e4))
        for family, q, a0, b0, X in cases:
            params = validate_and_residues(family, q, a0, b0)
            scaled = scale_family(params, X)
            weight = scaled.weight
            modulus = family.residue_modulus
            self.assertLessEqual(max(scaled.A, scaled.B), 200)
            expected = [
                (a, b)
                for a in range(math.ceil(scaled.A * weight.x_lo), math.floor(scaled.A * weight.x_hi) + 1)
                for b in range(math.ceil(scaled.B * weight.y_lo), math.floor(scaled.B * weight.y_hi) + 1)
                if math.gcd(a, b) == 1
                and a % modulus == 1
                and b % modulus == 1
                and (a - a0) % q == 0
                and (b - b0) % q == 0
            ]
            actual = [(curve.a, curve.b) for curve, _weight in enumerate_family(scaled)]

            self.assertEqual(actual, expected, msg=f"{family.id} q={q}")
            self.assertEqual(len(set(actual)), len(actual))

    def test_box_weight_has_unit_mass(self) -> None:
        box = make_weight(WeightConfig(kind="box", x_lo=1.0, x_hi=2.0, y_lo=1.0, y_hi=3.0))
        self.assertAlmostEqual(box.mass(), 1.0, places=7)
        self.assertAlmostEqual(make_weight().mass(), 1.0, places=6)


class CurveInvariantTests(unittest.TestCase):
    def test_conductor_examples(self) -> None:
        self.assertEqual(conductor(F1, Curve(1, 1)), 96)
        self.assertEqual(conductor(F1, Curve(3, 5)), 6240)
        self.assertEqual(conductor(F2, Curve(1, 5)), 1920)

    def test_reduction_type(self) -> None:
        self.assertEqual(reduction_type(F1, Curve(1, 1), 3), "multiplicative")
        self.assertEqual(reduction_type(F1, Curve(1, 1), 5), "good")
        with self.assertRaises(UnsupportedError):
            reduction_type(F1, Curve(1, 1), 2)

    def test_hasse_bound_and_point_counts(self) -> None:
        for family in (F1, F2):
            for curve in random_curves(family, 20, seed=7):
                for p in primerange(3, 32):
                    trace = trace_of_frobenius(family, curve.a, curve.b, p)
                    points = count_nonsingular_points(family, curve.a, curve.b, p)
                    if is_bad_residue(family, curve.a, curve.b, p):
                        self.assertIn(trace, (-1, 1))
                        self.assertEqual(points, p - trace)
                    else:
                        self.assertLessEqual(trace * trace, 4 * p)
                        self.assertEqual(points, p + 1 - trace)

    def test_bad_primes_depend_only_on_residues(self) -> None:
        for family in (F1, F2):
            step = family.residue_modulus
            for curve in random_curves(family, 40, seed=11):
                for p in (3, 5, 7, 11, 13):
                    bad = is_bad_residue(family, curve.a, curve.b, p)
                    self.assertEqual(bad, conductor(family, curve) % p == 0, msg=f"{family.id} {curve} p={p}")
                    for k in (1, 2, 3):
                        shifted = Curve(a=curve.a + 3 * k * p * step, b=curve.b + 5 * k * p * step)
                        self.assertEqual(is_bad_residue(family, shifted.a, shifted.b, p), bad)
                        if math.gcd(shifted.a, shifted.b) == 1:
                            self.assertEqual(conductor(family, shifted) % p == 0, bad)

    def test_hecke_relation(self) -> None:
        curve = Curve(3, 5)
        for p in (7, 11, 17):
            lam = lambda_p(F1, curve, p)
            self.assertAlmostEqual(lambda_prime_power(F1, curve, p, 2), lam * lam - 1.0, places=12)
            self.assertAlmostEqual(
                lambda_prime_power(F1, curve, p, 3), lam * lambda_prime_power(F1, curve, p, 2) - lam, places=12
            )
        self.assertEqual(lambda_p(F1, curve, 2), 0.0)

    def test_bad_prime_table_cross_check(self) -> None:
        disagreements = 0
        for family in (F1, F2):
            for curve in random_curves(family, 100, seed=11):
                for p in primerange(3, 32):
                    if not is_bad_residue(family, curve.a, curve.b, p):
                        continue
                    check = cross_check_bad_prime(family, curve, p)
                    if family is F1 and check.case == "p|(a+2b)" and p % 4 == 3:
                        self.assertFalse(check.agrees)
                        self.assertEqual(check.character_sum_trace, -check.table_trace)
                        disagreements += 1
                    else:
                        self.assertTrue(check.agrees, msg=f"{family.id} {curve} p={p} {check.case}")
        self.assertGreater(disagreements, 0)


if __name__ == "__main__":
    unittest.main()
