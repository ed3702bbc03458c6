import math

import pytest
from helpers import build, flow_doc, minimal_doc, user_doc

from fogmig import (Metrics, NetworkModel, ProgressState, RunConfig, Schedule,
                    SweepError, advance_slot, emit_results, incoming_traffic,
                    run_simulation, sweep, with_connected_vnfs,
                    with_user_connections)
from fogmig.harness import _run_once
from fogmig.makespan import request_makespan
from fogmig.planner import make_planner


def _busy_minimal_doc():
    doc = minimal_doc()
    doc["users"] = [user_doc("u1")]
    doc["requests"][0]["user_flows"] = [flow_doc("u1", "a", 2.0)]
    return doc


# ---------------------------------------------------------------------------
# run_simulation


def test_single_node_no_migration_run():
    scenario = build(_busy_minimal_doc())
    metrics = run_simulation(RunConfig(scenario=scenario, planner="none", seed=1))
    row = metrics.rows[0]
    assert row.migrations == 0
    assert row.mean_migrations_per_slot == 0.0
    assert math.isfinite(row.makespan) and row.makespan > 0
    assert row.completed


def test_same_config_and_seed_is_byte_identical(app1):
    a = run_simulation(RunConfig(scenario=app1, planner="acm", seed=12))
    b = run_simulation(RunConfig(scenario=app1, planner="acm", seed=12))
    assert a.to_csv() == b.to_csv()
    assert a.rows[0].report == b.rows[0].report


def test_single_node_zero_migrations_under_every_planner():
    scenario = build(_busy_minimal_doc())
    for planner in ("acm", "none", "random"):
        row = run_simulation(RunConfig(scenario=scenario, planner=planner,
                                       seed=2)).rows[0]
        assert row.migrations == 0


def test_slots_override_caps_run():
    scenario = build(_busy_minimal_doc())  # needs 16 slots on the cloud node
    row = run_simulation(RunConfig(scenario=scenario, planner="none", seed=1,
                                   slots=4)).rows[0]
    assert not row.completed
    assert math.isinf(row.makespan)
    assert row.slots == 4


def test_run_collects_check_report(app1):
    row = run_simulation(RunConfig(scenario=app1, planner="acm", seed=1,
                                   check=True)).rows[0]
    assert row.check_report is not None
    assert row.check_report.to_csv().startswith("slot,constraint")
    assert len(row.check_report.violations) == 0


def test_fast_forward_matches_stepped_no_migration():
    # dyadic numbers keep both paths exact, so the reports agree bit for bit
    scenario = build(_busy_minimal_doc())
    ff = _run_once(scenario, make_planner("none"), seed=3)

    net = NetworkModel(scenario, seed=3)
    schedule = Schedule(net)
    from fogmig.planner import initial_placement
    sl0 = initial_placement(scenario, 3, net)
    progress = ProgressState(scenario)
    stepped = Schedule(net)
    stepped.append(sl0)
    advance_slot(progress, stepped, 0)
    tau = 1
    while not progress.all_complete():
        stepped.append(stepped.at(tau - 1).copy())
        advance_slot(progress, stepped, tau)
        tau += 1
    report = request_makespan(scenario, stepped, progress=progress)
    assert ff.report.rows == report.rows
    assert ff.slots == tau - 1


def test_validate_rejects_bad_reps():
    with pytest.raises(ValueError, match="replication"):
        run_simulation(RunConfig(scenario=build(minimal_doc()), reps=0))


# ---------------------------------------------------------------------------
# sweep rewrites


def test_with_user_connections_round_robin(app1):
    rewired = with_user_connections(app1, 6)
    r = rewired.requests[0]
    ew_flows = [fl for fl in r.user_flows if fl.vnf == "EW"]
    hs_flows = [fl for fl in r.user_flows if fl.vnf == "HS"]
    assert len(ew_flows) == 4 and len(hs_flows) == 4
    # 6 connections over 4 devices: two devices carry doubled traffic
    loads = sorted(fl.traffic for fl in ew_flows)
    assert loads == pytest.approx([0.08, 0.08, 0.16, 0.16])
    assert incoming_traffic(r, "EW") == pytest.approx(6 * 0.08)


def test_with_user_connections_leaves_interior_untouched(app1):
    rewired = with_user_connections(app1, 1)
    r = rewired.requests[0]
    assert all(fl.vnf in ("EW", "HS") for fl in r.user_flows)
    assert incoming_traffic(r, "EW") == pytest.approx(0.08)


def test_with_connected_vnfs_sets_are_nested(app2):
    previous = set()
    for m in range(2, 7):
        rewired = with_connected_vnfs(app2, m)
        connected = {fl.vnf for fl in rewired.requests[0].user_flows}
        assert len(connected) == m
        assert previous <= connected
        previous = connected
        for vnf_id in connected:
            flows = [fl for fl in rewired.requests[0].user_flows
                     if fl.vnf == vnf_id]
            assert len(flows) == 4  # one connection per device


def test_with_connected_vnfs_range_check(app2):
    with pytest.raises(SweepError, match="outside"):
        with_connected_vnfs(app2, 7)


# ---------------------------------------------------------------------------
# sweep


def _small_sweep_config(scenario, **kwargs):
    defaults = dict(scenario=scenario, planners=("acm", "none", "random"),
                    seed=0, reps=1, sweep_param="user-connections",
                    sweep_values=(1, 2, 3))
    defaults.update(kwargs)
    return RunConfig(**defaults)


def test_sweep_produces_one_row_per_combination(app1):
    metrics = sweep(_small_sweep_config(app1, reps=2))
    assert len(metrics.rows) == 3 * 3 * 2
    combos = {(r.planner, r.sweep_value, r.seed) for r in metrics.rows}
    assert len(combos) == len(metrics.rows)


def test_sweep_fig4_shape(app1):
    metrics = sweep(_small_sweep_config(app1, sweep_values=tuple(range(1, 16))))
    assert len(metrics.rows) == 45  # 15 values, three planners, one rep


def test_sweep_single_value_degenerates_to_plain_runs(app1):
    metrics = sweep(_small_sweep_config(app1, planners=("acm",),
                                        sweep_values=(2,)))
    direct = _run_once(with_user_connections(app1, 2), make_planner("acm"),
                       seed=0)
    row = metrics.rows[0]
    assert row.makespan == direct.makespan
    assert row.migrations == direct.migrations


def test_sweep_unknown_parameter(app1):
    with pytest.raises(SweepError, match="unknown sweep parameter"):
        sweep(_small_sweep_config(app1, sweep_param="link-count"))


def test_sweep_requires_values(app1):
    with pytest.raises(SweepError, match="non-empty"):
        sweep(_small_sweep_config(app1, sweep_values=()))


def test_mean_of_means_equals_pooled_mean(app1):
    metrics = sweep(_small_sweep_config(app1, planners=("acm",),
                                        sweep_values=(1, 2), reps=4))
    summary = metrics.summary()
    for point in summary:
        rows = [r for r in metrics.rows if r.sweep_value == point.sweep_value]
        pooled = sum(r.makespan for r in rows) / len(rows)
        assert point.mean_makespan == pytest.approx(pooled, rel=1e-12)
    pooled_all = sum(r.makespan for r in metrics.rows) / len(metrics.rows)
    mean_of_means = sum(p.mean_makespan for p in summary) / len(summary)
    assert mean_of_means == pytest.approx(pooled_all, rel=1e-12)


# ---------------------------------------------------------------------------
# emit_results


def test_emit_empty_metrics_writes_header_only(tmp_path):
    written = emit_results(Metrics(), tmp_path)
    results = [p for p in written if p.name == "results.csv"][0]
    lines = results.read_text().strip().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith("planner,scenario,seed")
    assert not any(p.suffix == ".png" for p in written)


def test_emit_sweep_writes_plots_and_sorted_csv(app1, tmp_path):
    metrics = sweep(_small_sweep_config(app1))
    written = emit_results(metrics, tmp_path)
    names = {p.name for p in written}
    assert {"results.csv", "summary.csv", "makespan.png", "migrations.png"} <= names
    lines = (tmp_path / "results.csv").read_text().strip().splitlines()[1:]
    keys = []
    for line in lines:
        parts = line.split(",")
        keys.append((parts[0], float(parts[4]), int(parts[2])))
    assert keys == sorted(keys)


def test_emit_honours_output_env_var(app1, tmp_path, monkeypatch):
    monkeypatch.setenv("FOGMIG_OUT", str(tmp_path / "envout"))
    metrics = run_simulation(RunConfig(scenario=app1, planner="none", seed=0))
    written = emit_results(metrics)
    assert all(str(p).startswith(str(tmp_path / "envout")) for p in written)


def test_emit_merged_apps_gives_one_series_per_application(app1, app2, app3,
                                                           tmp_path):
    from fogmig.harness import plot_series
    merged = Metrics()
    for scenario in (app1, app2, app3):
        merged.extend(sweep(RunConfig(scenario=scenario, planners=("acm",),
                                      seed=0, reps=1,
                                      sweep_param="connected-vnfs",
                                      sweep_values=(2, 3))))
    series = plot_series(merged.summary(),
                         lambda s: s.mean_migrations_per_slot)
    assert set(series) == {"app1/acm", "app2/acm", "app3/acm"}
    written = emit_results(merged, tmp_path)
    assert any(p.name == "migrations.png" for p in written)


def test_metrics_rows_sorted_deterministically():
    def row(planner, value, seed):
        from fogmig.harness import RunRow
        return RunRow(planner=planner, scenario="s", seed=seed,
                      sweep_param="user-connections", sweep_value=value,
                      m_proc=0.0, m_com=0.0, m_mig=0.0, makespan=1.0,
                      migrations=0, mean_migrations_per_slot=0.0, slots=1,
                      completed=True)

    metrics = Metrics([row("b", 2, 0), row("a", 2, 1), row("a", 1, 0),
                       row("a", 2, 0)])
    ordered = [(r.planner, r.sweep_value, r.seed) for r in metrics.sorted_rows()]
    assert ordered == [("a", 1, 0), ("a", 2, 0), ("a", 2, 1), ("b", 2, 0)]
