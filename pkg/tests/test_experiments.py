"""Batches, sweeps, the seeding scheme, and named replication campaigns."""

import dataclasses

import numpy as np
import pytest
from scipy import stats as sp_stats

from votfield import (CONDITIONS_BBG2009, Condition, ConfigError,
                      IntegrationDivergedError, TrialResult, aggregate_trials,
                      default_config, example_trajectory, readout_argmax,
                      replicate_named, run_batch, run_trials, sweep_1d,
                      sweep_2d, trial_metrics, trial_seed)


def test_trial_seed_is_a_stable_pure_function():
    assert trial_seed(1, 0) == trial_seed(1, 0)
    assert trial_seed(2, 0) != trial_seed(1, 0)
    assert trial_seed(1, 1) != trial_seed(1, 0)
    seeds = {trial_seed(1, i) for i in range(500)}
    assert len(seeds) == 500  # injective in practice
    assert all(isinstance(s, int) and s >= 0 for s in list(seeds)[:5])


def test_run_trials_deterministic_and_in_trial_order():
    a = run_trials(condition=Condition(6.0, -3.0), n_trials=10, master_seed=7)
    b = run_trials(condition=Condition(6.0, -3.0), n_trials=10, master_seed=7)
    assert [r.seed for r in a] == [trial_seed(7, i) for i in range(10)]
    assert [r.seed for r in a] == [r.seed for r in b]
    assert [r.vot_target for r in a] == [r.vot_target for r in b]
    for ra, rb in zip(a, b):
        assert np.array_equal(ra.final_u, rb.final_u)
        assert ra.readout_method == "argmax"


def test_trial_prefix_independent_of_batch_size():
    few = run_trials(n_trials=5, master_seed=3)
    many = run_trials(n_trials=9, master_seed=3)
    for rf, rm in zip(few, many):
        assert rf.seed == rm.seed
        assert np.array_equal(rf.final_u, rm.final_u)  # per-trial noise streams


def test_recorded_seed_reproduces_trial_standalone():
    trials = run_trials(condition=Condition(6.0, -3.0), n_trials=4, master_seed=11)
    traj = example_trajectory(None, Condition(6.0, -3.0), 11, trial_index=2)
    assert np.array_equal(trials[2].final_u, traj.final.u)
    res = trial_metrics(traj, "argmax", seed=trials[2].seed)
    assert res.vot_target == trials[2].vot_target
    assert res.time_to_threshold == trials[2].time_to_threshold
    assert res.stabilized == trials[2].stabilized


def test_aggregate_statistics_match_numpy_reference():
    trials = run_trials(condition=Condition(6.0, -3.0), n_trials=40, master_seed=5)
    stats = run_batch(condition=Condition(6.0, -3.0), n_trials=40, master_seed=5)
    vots = np.array([t.vot_target for t in trials])
    assert stats.n_trials == 40
    assert stats.mean_vot == pytest.approx(vots.mean(), abs=1e-12)
    assert stats.sd_vot == pytest.approx(vots.std(ddof=1), abs=1e-12)
    assert stats.sem_vot == pytest.approx(vots.std(ddof=1) / np.sqrt(40), abs=1e-12)
    assert stats.skewness == pytest.approx(sp_stats.skew(vots, bias=False), abs=1e-12)
    assert stats.ch_ms == stats.mean_vot - 70.0  # identity, exact
    assert stats.frac_stabilized == sum(t.stabilized for t in trials) / 40
    crossed = [t.time_to_threshold for t in trials if t.time_to_threshold is not None]
    assert stats.mean_time_to_threshold == pytest.approx(np.mean(crossed), abs=1e-12)


def test_aggregate_degenerate_batches():
    one = [TrialResult(vot_target=70.0, time_to_threshold=30, stabilized=True,
                       readout_method="argmax")]
    s = aggregate_trials(one, Condition(6.0, 0.0), 70.0)
    assert s.mean_vot == 70.0 and s.ch_ms == 0.0
    assert np.isnan(s.sd_vot) and np.isnan(s.sem_vot) and np.isnan(s.skewness)
    assert s.mean_time_to_threshold == 30.0

    nothing = [TrialResult(vot_target=None, time_to_threshold=None, stabilized=False,
                           readout_method="first_to_threshold")] * 2
    s2 = aggregate_trials(nothing, Condition(6.0, -6.0), 70.0)
    assert np.isnan(s2.mean_vot) and np.isnan(s2.ch_ms)
    assert s2.frac_stabilized == 0.0
    assert s2.mean_time_to_threshold is None

    with pytest.raises(ConfigError, match="empty"):
        aggregate_trials([], Condition(6.0, 0.0), 70.0)


def test_sweep_1d_default_grid_and_metadata():
    cfg = default_config()
    res = sweep_1d(cfg, n_trials=4)
    assert res.a_mp_values == tuple(-6.0 + 0.5 * k for k in range(21))
    assert res.a_target_values == (6.0,)
    assert len(res.cells) == 21
    assert res.master_seed == 1 and res.readout_method == "argmax"
    assert res.p_target == 70.0
    assert res.config is cfg


def test_degenerate_sweep_equals_plain_batch():
    single = sweep_1d(a_mp_range=(0.0, 0.0, 1.0), n_trials=6)
    batch = run_batch(condition=Condition(6.0, 0.0), n_trials=6)
    cell = single.cells[0]
    assert cell.mean_vot == batch.mean_vot
    assert cell.sd_vot == batch.sd_vot
    assert cell.mean_time_to_threshold == batch.mean_time_to_threshold
    assert single.cell(6.0, 0.0) is cell
    assert single.baseline_mean_vot() == batch.mean_vot
    with pytest.raises(KeyError):
        single.cell(6.0, 2.0)


def test_sweep_2d_row_major_grid():
    res = sweep_2d(n_trials=2, a_mp_range=(-1.0, 0.0, 0.5),
                   a_target_range=(5.0, 6.0, 1.0))
    assert res.a_mp_values == (-1.0, -0.5, 0.0)
    assert res.a_target_values == (5.0, 6.0)
    flat = [(c.condition.a_target, c.condition.a_mp) for c in res.cells]
    assert flat == [(5.0, -1.0), (5.0, -0.5), (5.0, 0.0),
                    (6.0, -1.0), (6.0, -0.5), (6.0, 0.0)]


def test_sweep_cells_share_trial_noise_streams():
    # common random numbers: cell trials reuse the same per-index seeds
    res = sweep_1d(a_mp_range=(-1.0, 0.0, 1.0), n_trials=3, master_seed=9)
    assert res.cells[0].n_trials == res.cells[1].n_trials == 3
    t_a = run_trials(condition=Condition(6.0, -1.0), n_trials=3, master_seed=9)
    t_b = run_trials(condition=Condition(6.0, 0.0), n_trials=3, master_seed=9)
    assert [t.seed for t in t_a] == [t.seed for t in t_b]


def test_replicate_fig6_structure():
    rep = replicate_named("fig6", master_seed=2, n_trials=3)
    assert rep.name == "fig6"
    assert len(rep.sweep.cells) == 21
    assert set(rep.trajectories) == {"amp0", "amp-3", "amp-6"}
    for traj in rep.trajectories.values():
        assert traj.states is not None and len(traj) == 121


def test_replicate_fig7_runs_highlighted_conditions_only():
    rep = replicate_named("fig7", master_seed=2, n_trials=2)
    assert sorted(c.condition.a_mp for c in rep.sweep.cells) == [-6.0, -3.0, 0.0]
    assert set(rep.trajectories) == {"amp0", "amp-3", "amp-6"}


def test_replicate_fig12_full_grid_dimensions():
    rep = replicate_named("fig12", master_seed=2, n_trials=1)
    assert len(rep.sweep.a_mp_values) == 23
    assert len(rep.sweep.a_target_values) == 11
    assert len(rep.sweep.cells) == 253
    assert rep.trajectories == {}


def test_replicate_named_conditions_and_alias():
    rep = replicate_named("conditions", master_seed=2, n_trials=2)
    assert rep.name == "conditions_bbg2009"
    assert CONDITIONS_BBG2009 == {"no_competitor": 0.0, "pseudoword": -1.5,
                                  "no_context": -3.0, "context": -6.0}
    assert set(rep.trajectories) == set(CONDITIONS_BBG2009)
    amps = sorted(c.condition.a_mp for c in rep.sweep.cells)
    assert amps == [-6.0, -3.0, -1.5, 0.0]


def test_replicate_unknown_name_rejected():
    with pytest.raises(ConfigError, match="fig6"):
        replicate_named("fig99")


def test_example_trajectories_match_frozen_single_trial_reads():
    # frozen trial-0 observations at master seed 1: argmax 70 / 75 / 81
    for a_mp, lo, hi in [(0.0, 65.0, 75.0), (-3.0, 70.0, 80.0), (-6.0, 76.0, 86.0)]:
        traj = example_trajectory(None, Condition(6.0, a_mp), 1)
        assert lo <= readout_argmax(traj.final) <= hi


def test_example_trajectory_crossing_windows():
    t0 = example_trajectory(None, Condition(6.0, 0.0), 1)
    assert 25 <= t0.first_cross_step <= 55  # frozen observation: step 33
    t3 = example_trajectory(None, Condition(6.0, -3.0), 1)
    assert 45 <= t3.first_cross_step <= 85  # frozen observation: step 52
    t6 = example_trajectory(None, Condition(6.0, -6.0), 1)
    assert t6.first_cross_step is None or t6.first_cross_step > 55  # frozen: never


def test_divergence_carries_the_failing_trial_seed():
    cfg = default_config()
    cfg = dataclasses.replace(cfg, field=dataclasses.replace(cfg.field, tau=0.01))
    with pytest.raises(IntegrationDivergedError) as err:
        run_trials(cfg, Condition(1e308, 0.0), n_trials=2, master_seed=1)
    assert err.value.seed == trial_seed(1, 0)
    assert err.value.step == 1
    assert "seed" in str(err.value)


def test_condition_requires_target_and_mp_labels():
    from votfield import GaussianInput, RunConfig
    cfg = RunConfig(inputs=(GaussianInput(6.0, 70.0, 30.0, "target"),))
    with pytest.raises(ConfigError, match="mp"):
        run_trials(cfg, Condition(6.0, 0.0), n_trials=1)


def test_invalid_run_arguments_rejected():
    with pytest.raises(ConfigError, match="n_trials"):
        run_batch(n_trials=0)
    with pytest.raises(ConfigError, match="readout"):
        run_batch(n_trials=1, method="best")
