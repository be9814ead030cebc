import numpy as np
import pytest

from hamrec.models import assemble_dense, enumerate_terms, random_instance
from hamrec.pipeline import spec_from_profile
from hamrec.spectral import build_steady_state, eigendecompose


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_state(rng, dim, k=None):
    shape = (dim,) if k is None else (dim, k)
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def instance(kind, L, q, seed=0):
    """Basis, coefficients, dense H, rho and the exact construction blocks."""
    basis = enumerate_terms(kind, L)
    a = random_instance(kind, L, seed)
    H = assemble_dense(basis, a)
    rho, blocks = build_steady_state(spec_from_profile(q), eigendecompose(H))
    return basis, a, H, rho, blocks


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, label): acceptance criterion check")


_CRITERIA = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = report.user_properties and dict(report.user_properties).get("criterion")
    if not marker:
        return
    key = marker
    ok = _CRITERIA.get(key, True) and report.outcome == "passed"
    _CRITERIA[key] = ok


@pytest.fixture(autouse=True)
def _record_criterion(request):
    m = request.node.get_closest_marker("criterion")
    if m:
        request.node.user_properties.append(("criterion", f"{m.args[0]}. {m.args[1]}"))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA):
        terminalreporter.write_line(f"{'PASS' if _CRITERIA[key] else 'FAIL'}  criterion {key}")
