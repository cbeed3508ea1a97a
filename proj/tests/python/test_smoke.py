import numpy as np
import pytest

import anoseqs


def test_env_episode_runs_to_truncation():
    env = anoseqs.make_env("corridor_run", "target", max_steps=20)
    state = env.reset(7)
    assert len(state) == env.state_dim == 5
    steps = 0
    while True:
        out = env.step([0.0, 0.0])
        steps += 1
        if out["terminated"] or out["truncated"]:
            break
    assert steps == 20
    assert out["truncated"]
    assert out["reward_used"] == out["reward"]


def test_env_reset_is_deterministic():
    a = anoseqs.make_env("hazard_point_goal", "target", layout_seed=3)
    b = anoseqs.make_env("hazard_point_goal", "target", layout_seed=3)
    assert a.reset(11) == b.reset(11)
    assert a.step([0.5, -0.5]) == b.step([0.5, -0.5])


def test_bad_arguments_raise():
    with pytest.raises(anoseqs.AnoseqsError):
        anoseqs.make_env("cartpole")
    with pytest.raises(RuntimeError):
        anoseqs.RunConfig.parse("no.such_key = 1\n")


def test_metric_formulas():
    assert anoseqs.episodic_return([1.0, 2.0, -0.5]) == pytest.approx(2.5)
    assert anoseqs.episodic_cost_rate(3, 12) == pytest.approx(0.25)
    assert anoseqs.total_cost_rate(10, 1000) == pytest.approx(0.01)
    ms = anoseqs.mean_std([2.0])
    assert ms == {"mean": 2.0, "std": 0.0}
    assert anoseqs.mean_std([1.0, 3.0])["std"] == pytest.approx(np.std([1.0, 3.0], ddof=1))


def test_tiny_pipeline(tmp_path):
    cfg = anoseqs.RunConfig()
    for k, v in {
        "out_dir": str(tmp_path),
        "run_id": "py",
        "seeds": "1",
        "collect.steps": "600",
        "collect.warmup_steps": "300",
        "policy.steps": "400",
        "eval.interval": "200",
        "eval.episodes": "2",
        "agent.hidden": "8,8",
        "agent.batch_size": "16",
        "agent.warmup_steps": "200",
        "sequences.T": "4",
        "sequences.horizon": "4",
        "detector.d_model": "8",
        "detector.blocks": "1",
        "detector.ff_width": "8",
        "detector.epochs": "1",
        "detector.max_train_windows": "200",
    }.items():
        cfg.set(k, v)
    p = anoseqs.Pipeline(cfg)
    assert p.collect()
    assert p.build_dataset()
    assert p.train_detector()
    assert not anoseqs.Pipeline(cfg).collect()

    det = anoseqs.Detector.load(p.run_dir / "detector" / "detector.ckpt")
    assert (det.window_length, det.state_dim) == (4, 8)
    window = np.zeros((4, 8))
    assert det.reconstruct(window).shape == (4, 8)
    assert det.score(window) >= 0.0
    assert anoseqs.read_threshold(p.run_dir / "detector" / "calibration.txt") > 0.0

    out = p.train_policy("anoseqs", 1)
    curve = anoseqs.read_curve_csv(out / "metrics.csv")
    assert [row["step"] for row in curve] == [200, 400]
    summary = p.evaluate("anoseqs", 1, 3)
    assert summary["count"] == 3
