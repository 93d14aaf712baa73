import csv
import io
import math

import pytest

import cachelb


def test_geometry():
    geo = cachelb.TorusGeometry(3)
    assert geo.size == 9
    assert geo.distance(geo.node(0, 0), geo.node(2, 2)) == 2
    assert len(geo.ball(4, 1)) == 5
    assert geo.bfs_distances(0)[8] == 2
    with pytest.raises(IndexError):
        geo.distance(0, 9)
    with pytest.raises(ValueError):
        cachelb.TorusGeometry(1)


def test_profile_and_placement():
    prof = cachelb.make_profile(2, "zipf", 1.0)
    assert prof.pmf == pytest.approx([2 / 3, 1 / 3])
    assert cachelb.harmonic_lambda(4, 1.0) == pytest.approx(25 / 12)

    p = cachelb.place(16, 3, cachelb.make_profile(5), 7)
    assert (p.n, p.M, p.K) == (16, 3, 5)
    assert all(len(p.slots(u)) == 3 for u in range(16))
    for f in range(1, 6):
        for u in p.replicas(f):
            assert p.holds(u, f)
    count, files = p.overlap(0, 1)
    assert count == len(files)
    assert cachelb.Placement.from_text(p.to_text()).to_text() == p.to_text()


def test_run_strategies():
    geo = cachelb.TorusGeometry(10)
    prof = cachelb.make_profile(20)
    p = cachelb.place(100, 2, prof, 1)
    s = cachelb.generate(100, 100, prof, 2)
    assert len(s) == 100
    assert sum(cachelb.per_node_counts(s, 100)) == 100

    nearest = cachelb.run(s, p, geo, cachelb.StrategyConfig("nearest"), 3)
    two = cachelb.run(s, p, geo, cachelb.StrategyConfig("two_choices", radius=2), 3)
    for m in (nearest, two):
        assert m.served + m.rejected == 100
        assert len(m.load_histogram) == m.max_load + 1
    with pytest.raises(ValueError):
        cachelb.StrategyConfig("two_choices", radius=0)


def test_analysis():
    geo = cachelb.TorusGeometry(8)
    p = cachelb.place(64, 2, cachelb.make_profile(6), 5)
    f = next(f for f in range(1, 7) if p.replicas(f))
    t = cachelb.voronoi(f, p, geo, 11)
    assert sum(t["cell_sizes"]) == 64
    assert t["centers"] == p.replicas(f)

    g = cachelb.build_config_graph(p, geo, 1)
    assert sum(g.degrees()) == 2 * g.edge_count

    rep = cachelb.goodness_check(p, 0.3)
    assert rep["mu"] == 13
    assert cachelb.predicted_cost(cachelb.make_profile(100), 1) == pytest.approx(10.0)
    label, term = cachelb.cost_regime(400, 4, 0.5)
    assert label == "0<gamma<1"
    assert term == pytest.approx(10.0)


def test_fit():
    xs = [1.0, 2.0, 4.0, 8.0]
    slope, _, r2 = cachelb.fit_loglog(xs, [2 * math.log(x) for x in xs], "ln")
    assert slope == pytest.approx(2.0)
    assert r2 == pytest.approx(1.0)


def test_run_experiment_is_deterministic():
    spec = {
        "name": "py",
        "geometry": {"n": 100},
        "K": 10,
        "M": [1, 3],
        "strategy": {"kind": ["nearest", "two_choices"], "radius": "unbounded"},
        "replications": 3,
        "base_seed": 5,
    }
    a = cachelb.run_experiment(spec)
    b = cachelb.run_experiment(spec, threads=2)
    assert a["runs_csv"] == b["runs_csv"]
    assert a["conservation_violations"] == 0
    rows = list(csv.DictReader(io.StringIO(a["runs_csv"])))
    assert len(rows) == 4 * 3
    assert len(a["aggregates"]) == 4
    bad = dict(spec, replications=0)
    with pytest.raises(ValueError):
        cachelb.run_experiment(bad)


def test_selftest():
    ok, log = cachelb.selftest()
    assert ok, log
