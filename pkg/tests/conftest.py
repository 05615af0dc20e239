import itertools

import pytest

from padic_iwasawa.padic import integer_det


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log(request):
    return request.config._acceptance_lines


def int_valuation_exact(x, p):
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def smith_valuations_by_minors(rows, p, a):
    """Oracle: Smith valuations from determinantal divisors of the integer lift."""
    m, n = len(rows), len(rows[0]) if rows else 0
    prev = 0
    out = []
    for k in range(1, min(m, n) + 1):
        best = None
        for R in itertools.combinations(range(m), k):
            for C in itertools.combinations(range(n), k):
                v = int_valuation_exact(integer_det([[rows[r][c] for c in C] for r in R]), p)
                if v is not None and (best is None or v < best):
                    best = v
        if best is None:
            out.extend([a] * (min(m, n) - k + 1))
            break
        out.append(min(best - prev, a))
        prev = best
    return out
