"""Constants derived from zeta(3), computed by series summation at import."""

import math

__all__ = ["zeta3", "ZETA3", "INV_ZETA3", "SANDWICH_LOWER", "SANDWICH_UPPER", "CONJECTURED_TILDE"]


def zeta3(n_terms: int = 2000) -> tuple[float, float]:
    """zeta(3) by direct summation with an Euler-Maclaurin tail.

    Returns ``(value, tail_bound)``.  The tail ``sum_{n >= N} n^-3`` is
    ``1/(2N^2) + 1/(2N^3) + 1/(4N^4) + R`` with ``|R| <= 1/N^6``.
    """
    N = n_terms
    head = math.fsum(1.0 / (n * n * n) for n in range(1, N))
    tail = math.fsum((1 / (2 * N**2), 1 / (2 * N**3), 1 / (4 * N**4)))
    return head + tail, 1.0 / N**6


ZETA3, _TAIL = zeta3()
assert _TAIL <= 1e-15
INV_ZETA3 = 1.0 / ZETA3
SANDWICH_UPPER = INV_ZETA3
SANDWICH_LOWER = 2 * math.sqrt(3) / (9 * ZETA3)
CONJECTURED_TILDE = 2 / (3 * ZETA3)
