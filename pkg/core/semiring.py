"""Log semiring: product is real addition, sum is log-add."""

import math

ZERO = -math.inf
ONE = 0.0


def logadd(a, b):
    if a == ZERO:
        return b
    if b == ZERO:
        return a
    return max(a, b) + math.log1p(math.exp(-abs(a - b)))


class LogSemiring:

    zero = ZERO
    one = ONE

    @staticmethod
    def plus(x, y):
        return logadd(x, y)

    @staticmethod
    def times(x, y):
        return x + y

    @staticmethod
    def sums(xs):
        """Pairwise (tree) log-add reduction; -inf for an empty sequence."""
        values = list(xs)
        if not values:
            return ZERO
        while len(values) > 1:
            paired = [logadd(values[i], values[i + 1]) for i in range(0, len(values) - 1, 2)]
            if len(values) % 2:
                paired.append(values[-1])
            values = paired
        return values[0]

    @staticmethod
    def products(xs):
        return ONE + math.fsum(xs)


def close(a, b, rel_tol=1e-4):
    """Log-domain comparison used by the oracle suites (semiring zeros compare equal)."""
    if a == ZERO or b == ZERO:
        return a == b
    return math.isclose(a, b, rel_tol=rel_tol, abs_tol=rel_tol)
