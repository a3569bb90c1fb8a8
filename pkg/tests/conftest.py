import contextlib
import time

import pytest

from vasrsim.catalog import generate_synthetic_catalog, load_catalog
from vasrsim.config import DATA_DIR
from vasrsim.netmodel import BandwidthTrace, Path, Topology, load_scenario

TABLE3_KBPS = [354, 472, 638, 882, 1234, 1779, 2588, 3823, 5613, 8028, 11156, 15227]


@pytest.fixture(scope="session")
def ladder():
    """Table 3 averages as a constant-bitrate catalog."""
    return generate_synthetic_catalog(0, 12, 20, TABLE3_KBPS, 0.0)


@pytest.fixture(scope="session")
def bundled_catalog():
    return load_catalog(DATA_DIR / "elephants_dream.catalog.json")


@pytest.fixture(scope="session")
def bundled_topology():
    return load_scenario(DATA_DIR / "fig6_like.scenario.json")


def constant_topology(rates, horizon=2000.0):
    """Chain topology with one constant-rate path per entry of ``rates``."""
    switches = ("a", "z") + tuple(f"m{k}" for k in range(len(rates)))
    paths = []
    for k, rate in enumerate(rates):
        hops = ("a",) + tuple(f"m{j}" for j in range(k)) + ("z",)
        paths.append(Path(k, hops, BandwidthTrace.from_pairs([(0, rate)], horizon)))
    return Topology(switches, tuple(paths), "a", "z")


def stepped_topology(pair_lists, horizon=2000.0):
    switches = ("a", "z") + tuple(f"m{k}" for k in range(len(pair_lists)))
    paths = []
    for k, pairs in enumerate(pair_lists):
        hops = ("a",) + tuple(f"m{j}" for j in range(k)) + ("z",)
        paths.append(Path(k, hops, BandwidthTrace.from_pairs(pairs, horizon)))
    return Topology(switches, tuple(paths), "a", "z")


_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    """Context manager recording one PASS/FAIL line with its runtime."""

    @contextlib.contextmanager
    def record(number, title, limit_s=None):
        t0 = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            _ACCEPTANCE.append(f"FAIL  [{number}] {title} ({time.perf_counter() - t0:.2f} s): {exc}".splitlines()[0])
            raise
        elapsed = time.perf_counter() - t0
        if limit_s is not None and elapsed >= limit_s:
            _ACCEPTANCE.append(f"FAIL  [{number}] {title} ({elapsed:.2f} s, limit {limit_s} s)")
            raise AssertionError(f"criterion {number} took {elapsed:.2f} s, limit {limit_s} s")
        _ACCEPTANCE.append(f"PASS  [{number}] {title} ({elapsed:.2f} s)")

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
