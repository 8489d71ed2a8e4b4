"""Biased congruence families built from extremal a_p choices at the small primes."""

from __future__ import annotations

import logging
import math

import numpy as np
from sympy.ntheory.modular import crt

from .charsums import DEFAULT_PRIME_CAP, ap_table
from .constants import e_constant
from .errors import DomainError
from .numtheory import odd_primes_upto
from .types import BiasChoice, BiasSign, BiasSpec, FamilyId

logger = logging.getLogger(__name__)

BIAS_MAX_N = 97


def _extremal_class(family: FamilyId, p: int, sign: BiasSign, cap: int) -> BiasChoice:
    table = ap_table(family, p, cap)
    good = ~table.bad
    traces = table.traces.astype(np.int64)
    # sign "+" drives lambda(p) as negative as possible, sign "-" as positive as possible
    target = int(traces[good].min()) if sign == "+" else int(traces[good].max())
    a_p, b_p = (int(v) for v in np.argwhere(good & (traces == target))[0])
    return BiasChoice(p=p, a_p=a_p, b_p=b_p, trace=target, lam=target / math.sqrt(p))


def small_lambda_estimate(per_prime: tuple[BiasChoice, ...]) -> float:
    """Second-order expansion of e in u = lambda(p)/sqrt(p)."""

    terms = []
    for choice in per_prime:
        u = choice.lam / math.sqrt(choice.p)
        terms.append(-2.0 * math.log(choice.p) * (1.0 - 1.0 / choice.p) * (u + u * u))
    return math.fsum(terms)


def bias_builder(
    family: FamilyId,
    n: int,
    sign: BiasSign,
    cap: int = DEFAULT_PRIME_CAP,
    max_n: int = BIAS_MAX_N,
) -> BiasSpec:
    """Combine the extremal residue pair at every odd p <= n into (q_n, a0n, b0n)."""

    if sign not in ("+", "-"):
        raise DomainError(f"bias sign must be '+' or '-', got '{sign}'")
    if n < 3:
        raise DomainError(f"bias needs n >= 3 so that the product of odd primes is non-empty, got {n}")
    if n > max_n:
        raise DomainError(f"bias n={n} exceeds the configured maximum {max_n}")

    per_prime = tuple(_extremal_class(family, int(p), sign, cap) for p in odd_primes_upto(n))
    moduli = [choice.p for choice in per_prime]
    q_n = math.prod(moduli)
    a0n = int(crt(moduli, [choice.a_p for choice in per_prime])[0])
    b0n = int(crt(moduli, [choice.b_p for choice in per_prime])[0])
    e_value = e_constant(family, q_n, a0n, b0n)
    log_q = math.log(q_n)
    logger.info("%s bias n=%d sign=%s: q=%d e=%.6g", family.id, n, sign, q_n, e_value)
    return BiasSpec(
        family=family.id,
        n=n,
        sign=sign,
        q_n=q_n,
        a0n=a0n,
        b0n=b0n,
        per_prime=per_prime,
        e_value=e_value,
        log_q=log_q,
        growth_ratio=abs(e_value) / math.sqrt(log_q),
        e_small_lambda=small_lambda_estimate(per_prime),
    )
