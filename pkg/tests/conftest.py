import numpy as np
import pytest

from mvframe.space import MatFn, SpaceSpec, coordinate_basis


def literal_mat_inner(f: MatFn, g: MatFn) -> np.ndarray:
    """sum_x f(x) g(x)^* written out entry by entry."""
    s, r, n = f.spec.shape
    out = np.zeros((s, s), dtype=complex)
    for x in range(n):
        for i in range(s):
            for j in range(s):
                for l in range(r):
                    out[i, j] += f.values[i, l, x] * np.conj(g.values[j, l, x])
    return out


def brute_adjointness_gap(op) -> float:
    """max over coordinate basis pairs of |<A a, b> - <a, A* b>|, A* the trace adjoint."""
    basis = coordinate_basis(op.spec)
    A = op.matrix
    Ah = A.conj().T
    worst = 0.0
    for a in basis:
        Aa = MatFn(op.spec, A @ a.vector)
        for b in basis:
            Ahb = MatFn(op.spec, Ah @ b.vector)
            gap = np.abs(literal_mat_inner(Aa, b) - literal_mat_inner(a, Ahb)).max()
            worst = max(worst, gap)
    return worst


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def z4_22():
    return SpaceSpec.of((4,), 2, 2)


# acceptance results, printed as one line per criterion at the end of the run
ACCEPTANCE = {}


def pytest_sessionstart(session):
    import time
    session.config._mvframe_t0 = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    import time
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    elapsed = time.perf_counter() - config._mvframe_t0
    terminalreporter.write_line(f"whole test session: {elapsed:.1f} s")
