import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

SEED = int(os.environ.get("TOPOTELEPORT_SEED", "20240611"))


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def random_density_matrix(rng, dim, rank=None):
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_x_state(rng):
    """Random valid X state: two independent 2x2 PSD blocks on (0,3) and (1,2)."""
    w = rng.dirichlet(np.ones(2))
    rho = np.zeros((4, 4), dtype=complex)
    for weight, idx in zip(w, ((0, 3), (1, 2))):
        blk = random_density_matrix(rng, 2) * weight
        rho[np.ix_(idx, idx)] = blk
    return rho


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    setattr(item, f"rep_{rep.when}", rep)


@pytest.fixture
def criterion(request):
    """Print one PASS/FAIL line for an acceptance criterion once its test finishes.

    Tests store a short measured summary in ``info["detail"]``.
    """
    info = {"detail": ""}
    yield info
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    marker = request.node.get_closest_marker("criterion")
    num, title = marker.args if marker else ("?", request.node.name)
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num:>2}: {title}"
    if info["detail"]:
        line += f" ({info['detail']})"
    capman = request.config.pluginmanager.getplugin("capturemanager")
    with capman.global_and_fixture_disabled():
        print("\n" + line, flush=True)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
