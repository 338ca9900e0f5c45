import pytest

from wsan_recover.metrics import (
    BoundError,
    MetricSet,
    check_bounds,
    compute_metrics,
    overhead_verdict,
    relative_gap,
    summarize_rows,
)
from wsan_recover.recovery import Strategy, run_recovery
from wsan_recover.topology import Topology


def metrics(**kw):
    base = dict(
        total_distance=0.0, relocated_nodes=0, exchanged_messages=0,
        extended_paths=0, paths_not_extended=0, max_node_distance=0.0,
    )
    base.update(kw)
    return MetricSet(**base)


def test_zero_relocation_report():
    tri = Topology.from_points([(0, 0), (1, 0), (0.5, 0.8)], 1)
    m = compute_metrics(run_recovery(tri, 0, Strategy.LEDIR))
    assert (m.total_distance, m.relocated_nodes, m.exchanged_messages) == (0.0, 0, 0)
    assert m.extended_paths == 0 and m.paths_not_extended == 1
    assert isinstance(m.total_distance, float)


def test_rim_line3_metrics(line3):
    m = compute_metrics(run_recovery(line3, 1, Strategy.RIM))
    assert m.total_distance == 2.0
    assert m.relocated_nodes == 2
    assert m.max_node_distance == 1.0
    assert m.max_inward_offset == 1.0
    assert m.exchanged_messages == 4
    # 0 and 2 went from 2 hops (via 1) to a direct link
    assert m.extended_paths == 0 and m.paths_not_extended == 1


def test_ledir_line3_metrics(line3):
    m = compute_metrics(run_recovery(line3, 1, Strategy.LEDIR))
    assert (m.total_distance, m.relocated_nodes, m.extended_paths) == (2.0, 1, 0)
    assert m.max_replacement_move == 2.0


def test_unrecovered_pairs_count_as_extended():
    t = Topology.from_points([(0, 0), (1, 0), (2, 0), (3, 0)], 1)
    # a skipped run leaves the network split: 0 is cut off from 2 and 3
    from wsan_recover.recovery import skipped_report

    m = compute_metrics(skipped_report(t, 1, Strategy.DARA2C, "skip"))
    assert m.extended_paths == 2 and m.paths_not_extended == 1


def test_check_bounds_examples():
    assert check_bounds(metrics(relocated_nodes=4), Strategy.LEDIR, 9, 100).nodes_bound_ok
    assert not check_bounds(metrics(relocated_nodes=5), Strategy.LEDIR, 9, 100).nodes_bound_ok
    b = check_bounds(metrics(relocated_nodes=1, max_inward_offset=50.5), "rim", 10, 100)
    assert not b.node_distance_bound_ok
    assert check_bounds(metrics(max_inward_offset=50.0 + 1e-10), "rim", 10, 100).node_distance_bound_ok
    assert not check_bounds(metrics(relocated_nodes=8), Strategy.DARA1C, 10, 100).nodes_bound_ok
    assert check_bounds(metrics(relocated_nodes=7), "dara-1c", 10, 100).nodes_bound_ok
    b = check_bounds(metrics(total_distance=450.0), Strategy.RIM, 10, 100)
    assert b.total_distance_bound_ok
    assert not check_bounds(metrics(total_distance=450.1), Strategy.RIM, 10, 100).total_distance_bound_ok


def test_check_bounds_rejects_bad_input():
    with pytest.raises(BoundError):
        check_bounds(metrics(), Strategy.DARA1C, 3, 100)
    with pytest.raises(BoundError):
        check_bounds(metrics(), Strategy.LEDIR, 0, 100)
    with pytest.raises(BoundError):
        check_bounds(metrics(), Strategy.LEDIR, 5, 0)
    with pytest.raises(ValueError):
        check_bounds(metrics(), "nope", 5, 1)


def _row(algo, rel, dist, rec=True):
    return {
        "algorithm": algo, "relocated_nodes": rel, "total_distance": dist, "max_node_distance": dist,
        "messages": 2 * rel, "extended_paths": 0, "paths_not_extended": 3, "recovered": rec,
    }


def test_summarize_rows():
    s = summarize_rows([_row("rim", 2, 10.0), _row("rim", 4, 30.0, False), _row("ledir", 1, 5.0)])
    assert list(s) == ["ledir", "rim"]
    assert s["rim"]["relocated_nodes"] == (3.0, 1.0)
    assert s["rim"]["total_distance"] == (20.0, 10.0)
    assert s["rim"]["recovered"][0] == 0.5
    assert s["ledir"]["runs"] == (1.0, 0.0)
    assert s["ledir"]["messages"] == (2.0, 0.0)


@pytest.mark.parametrize(
    "ledir, rim, verdict",
    [(10, 11, "equal"), (10, 11.7, "equal"), (5, 10, "outperforms"), (10, 5, "underperforms"), (0, 0, "equal")],
)
def test_overhead_verdict(ledir, rim, verdict):
    assert overhead_verdict(ledir, rim) == verdict


def test_relative_gap():
    assert relative_gap(0, 0) == 0
    assert relative_gap(1, 2) == 0.5
    assert relative_gap(3, 4) == 0.25
