import numpy as np
import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.module.__name__.endswith("test_acceptance"):
        reporter = item.config.pluginmanager.get_plugin("terminalreporter")
        if reporter is not None:
            reporter.write_line(f"[acceptance] {item.name}: {'PASS' if rep.passed else 'FAIL'}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_density(rng, dim):
    """Ginibre-induced random density matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + g.conj().T)


def random_unitary(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def ptrace_bruteforce(mat, n_spins, keep):
    """Index-summation partial trace, independent of the production einsum."""
    keep = sorted(keep)
    traced = [q for q in range(n_spins) if q not in keep]
    d_out = 2 ** len(keep)
    out = np.zeros((d_out, d_out), dtype=complex)
    for row in range(d_out):
        rbits = [(row >> (len(keep) - 1 - k)) & 1 for k in range(len(keep))]
        for col in range(d_out):
            cbits = [(col >> (len(keep) - 1 - k)) & 1 for k in range(len(keep))]
            for summed in range(2 ** len(traced)):
                sbits = [(summed >> (len(traced) - 1 - k)) & 1 for k in range(len(traced))]
                full_r = 0
                full_c = 0
                for q in range(n_spins):
                    if q in keep:
                        bit_r = rbits[keep.index(q)]
                        bit_c = cbits[keep.index(q)]
                    else:
                        bit_r = bit_c = sbits[traced.index(q)]
                    full_r = (full_r << 1) | bit_r
                    full_c = (full_c << 1) | bit_c
                out[row, col] += mat[full_r, full_c]
    return out
