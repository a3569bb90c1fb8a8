import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vasrsim.netmodel import (
    BandwidthTrace,
    LinkStalledError,
    Path,
    Topology,
    TopologyError,
    TraceError,
    average_bandwidth,
    bandwidth_at,
    enumerate_paths,
    integrate,
    load_scenario,
    load_trace_csv,
    transfer_finish_time,
    write_trace_csv,
)

from oracles import discretized_finish, step_integral


def trace(pairs, horizon=100.0):
    return BandwidthTrace.from_pairs(pairs, horizon)


def test_bandwidth_lookup_is_left_closed():
    tr = trace([(0, 1000), (10, 3000)])
    assert bandwidth_at(trace([(0, 1000)]), 5) == 1000
    assert bandwidth_at(tr, 10) == 3000
    assert bandwidth_at(tr, 9.999) == 1000
    with pytest.raises(TraceError):
        bandwidth_at(tr, 100.5)


@pytest.mark.parametrize(
    "pairs, window, expected",
    [
        ([(0, 1000)], (3, 17), 1000.0),
        ([(0, 1000), (1, 3000)], (0, 2), 2000.0),
        ([(0, 500), (1, 500), (2, 8000)], (0, 3), 3000.0),
    ],
)
def test_average_bandwidth(pairs, window, expected):
    assert average_bandwidth(trace(pairs), *window) == pytest.approx(expected, rel=1e-12)


def test_average_bandwidth_rejects_bad_windows():
    tr = trace([(0, 1000)])
    for window in [(5, 5), (6, 5), (-1, 3), (50, 101)]:
        with pytest.raises(TraceError):
            average_bandwidth(tr, *window)


def test_transfer_examples():
    assert transfer_finish_time(trace([(0, 1000)]), 0, 2000) == pytest.approx(2.0)
    assert transfer_finish_time(trace([(0, 1000), (1, 3000)]), 0, 4000) == pytest.approx(2.0)


def test_transfer_skips_zero_bandwidth_gap():
    tr = trace([(0, 1000), (1, 0), (5, 2000)])
    assert transfer_finish_time(tr, 0.5, 1500) == pytest.approx(5.5)


def test_transfer_past_horizon_is_an_error():
    with pytest.raises(LinkStalledError):
        transfer_finish_time(trace([(0, 10)], horizon=10), 0, 101)
    with pytest.raises(ValueError):
        transfer_finish_time(trace([(0, 10)]), 0, 0)


def test_trace_validation():
    with pytest.raises(TraceError):
        trace([(1, 100)])
    with pytest.raises(TraceError):
        trace([(0, 100), (0, 200)])
    with pytest.raises(TraceError):
        trace([(0, -1)])
    with pytest.raises(TraceError):
        trace([(0, 1), (50, 2)], horizon=40)


def random_trace(rng, horizon=60.0):
    n = rng.randint(1, 12)
    times = sorted({0.0} | {round(rng.uniform(0.01, horizon - 1), 3) for _ in range(n - 1)})
    rates = [rng.choice([0.0, rng.uniform(50, 30000)]) for _ in times]
    rates[-1] = rng.uniform(50, 30000)
    return list(zip(times, rates))


def test_transfer_matches_millisecond_oracle():
    rng = random.Random(2024)
    for _ in range(100):
        pairs = random_trace(rng)
        tr = trace(pairs, horizon=1e6)
        start = rng.uniform(0, 30)
        size = rng.uniform(10, 200_000)
        got = transfer_finish_time(tr, start, size)
        ref = discretized_finish([t for t, _ in pairs], [b for _, b in pairs], start, size)
        assert abs(got - ref) <= 1e-3 * (ref - start) + 1e-9


def test_round_trip_identity():
    rng = random.Random(7)
    for _ in range(200):
        tr = trace(random_trace(rng), horizon=60.0)
        s = rng.uniform(0, 40)
        t = rng.uniform(s + 0.01, 60)
        size = average_bandwidth(tr, s, t) * (t - s)
        if size <= 0:
            continue
        finish = transfer_finish_time(tr, s, size)
        # a zero-rate tail before t lets the transfer end earlier; it cannot end later
        assert finish <= t + 1e-9
        assert integrate(tr, s, finish) == pytest.approx(size, rel=1e-9)
        if bandwidth_at(tr, min(t, 60.0) - 1e-9) > 0:
            assert finish == pytest.approx(t, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.tuples(st.floats(0.1, 50), st.floats(0, 20000)), min_size=0, max_size=6),
    st.floats(0, 20000),
    st.floats(0, 59),
    st.floats(0.001, 1),
)
def test_average_times_width_is_exact_integral(extra, first, t0, frac):
    times = sorted({round(t, 3) for t, _ in extra})
    pairs = [(0.0, first)] + [(t, b) for t, (_, b) in zip(times, extra)]
    tr = trace(pairs, horizon=60.0)
    t1 = t0 + frac * (60.0 - t0)
    if t1 <= t0:
        return
    ref = step_integral([p[0] for p in pairs], [p[1] for p in pairs], t0, t1)
    got = average_bandwidth(tr, t0, t1) * (t1 - t0)
    assert got == pytest.approx(ref, rel=1e-3, abs=20000 * (t1 - t0) / 200_000 * 4)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 99.99), st.floats(0, 99.99))
def test_lookup_constant_between_breakpoints(a, b):
    tr = trace([(0, 100), (20, 200), (70, 300)])
    same_step = (a < 20) == (b < 20) and (a < 70) == (b < 70)
    if same_step:
        assert bandwidth_at(tr, a) == bandwidth_at(tr, b)


def fig5(paths):
    return Topology(
        ("s1", "s2", "s3", "s4", "s5"),
        tuple(Path(k, tuple(h), trace([(0, 1000)])) for k, h in enumerate(paths)),
        "s2",
        "s1",
    )


def test_bundled_topology_has_fig5_paths(bundled_topology):
    paths = enumerate_paths(bundled_topology)
    assert len(paths) == 4
    assert paths[0].hops == ("s2", "s3", "s1")
    assert [p.hops for p in bundled_topology.paths] == [
        ("s2", "s3", "s1"),
        ("s2", "s3", "s4", "s1"),
        ("s2", "s5", "s3", "s1"),
        ("s2", "s5", "s3", "s4", "s1"),
    ]


def test_enumerate_single_and_ties():
    single = fig5([["s2", "s3", "s1"]])
    assert enumerate_paths(single)[0].id == 0
    tied = fig5([["s2", "s3", "s4", "s1"], ["s2", "s5", "s3", "s1"]])
    assert [p.id for p in enumerate_paths(tied)] == [0, 1]
    longer_first = fig5([["s2", "s3", "s4", "s1"], ["s2", "s3", "s1"]])
    assert enumerate_paths(longer_first)[0].id == 1


def test_topology_validation():
    with pytest.raises(TopologyError, match="must run"):
        fig5([["s3", "s1"]])
    with pytest.raises(TopologyError, match="duplicates"):
        fig5([["s2", "s3", "s1"], ["s2", "s3", "s1"]])
    with pytest.raises(TopologyError, match="unknown"):
        fig5([["s2", "s9", "s1"]])
    with pytest.raises(TopologyError, match="at least one"):
        Topology(("s1",), (), "s1", "s1")


def test_trace_csv_round_trip(tmp_path):
    tr = trace([(0, 1000), (12.5, 250), (40, 9000)])
    p = tmp_path / "t.csv"
    write_trace_csv(tr, p)
    assert p.read_text().splitlines()[0] == "time_s,bandwidth_kbps"
    assert load_trace_csv(p, 100.0) == tr


def test_trace_csv_bad_header(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("t,bw\n0,1\n")
    with pytest.raises(TraceError, match="header"):
        load_trace_csv(p, 10)


def test_bundled_scenario_congestion_shape(bundled_topology):
    """Path 0 stays under 500 kbps through the middle; an alternative keeps >= 12000."""
    p0 = bundled_topology.paths[0].trace
    for t in range(150, 560):
        assert bandwidth_at(p0, t) < 500
        assert max(bandwidth_at(p.trace, t) for p in bundled_topology.paths[1:]) >= 12000
    for t in range(560, 700):
        assert min(bandwidth_at(p.trace, t) for p in bundled_topology.paths) >= 12000


def test_missing_scenario_file(tmp_path):
    with pytest.raises(TopologyError):
        load_scenario(tmp_path / "nope.json")
