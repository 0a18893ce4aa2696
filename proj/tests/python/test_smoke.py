import json
import math

import numpy as np
import pytest

import bezierflow as bf


def test_bezier_basics():
    assert bf.bernstein(1, 3, 0.25) == pytest.approx(0.421875)
    assert bf.bezier_eval([0.0, 0.0, 1.0], 0.5) == pytest.approx(0.25)
    pts = bf.monotone_points_from_logits([1.0, 1.0, 1.0, 1.0])
    assert pts == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
    with pytest.raises(ValueError):
        bf.bezier_eval([0.0, 0.7, 0.2, 1.0], 0.5)


def test_scheduler_round_trip():
    s = bf.Scheduler.bezier([0.3, -1.0, 2.0], [0.0, 0.5, 1.0])
    back = bf.Scheduler.from_json(s.to_json())
    assert back.kind == "bezier"
    for t in np.linspace(0.0, 1.0, 11):
        assert back.eval(t).alpha == pytest.approx(s.eval(t).alpha, abs=1e-14)
    lin = bf.Scheduler.linear()
    assert lin.invert_snr(3.0) == pytest.approx(0.75)
    with pytest.raises(bf.SchedulerFormatError):
        bf.Scheduler.from_json(json.dumps({"kind": "cubic"}))


def test_transform_and_endpoints():
    ctx = bf.TransformContext(bf.Scheduler.vp(), bf.Scheduler.linear())
    assert ctx.time_map(0.5) == pytest.approx(0.5)
    assert ctx.time_map_derivative(0.5) == pytest.approx(4.0 / math.pi)

    field = bf.VelocityField(bf.GmmSpec.ring(), bf.Scheduler.linear())
    x0 = np.array([0.4, -1.1])
    teacher = bf.teacher_endpoint(field, x0, rtol=1e-8, atol=1e-10)
    target = bf.Scheduler.bezier([0.5, -0.2, 1.0, 0.1], [0.0, 0.3, -0.4, 0.2])
    # Many student steps approach the shared endpoint.
    student = bf.student_endpoint(field, target, x0, steps=2000, method="rk2")
    assert np.linalg.norm(student - teacher) < 1e-3


def test_single_gaussian_flow_map():
    mu = np.array([1.0, 2.0])
    gmm = bf.GmmSpec([1.0], [mu], [0.25])
    field = bf.VelocityField(gmm, bf.Scheduler.linear())
    for x0 in bf.sample_source(2, 5, 3):
        end = bf.teacher_endpoint(field, x0, rtol=1e-8, atol=1e-10)
        assert np.allclose(end, mu + 0.5 * x0, atol=1e-4)


def test_fit_and_train():
    fit = bf.fit_scheduler_to_timesteps(bf.Scheduler.linear(), [0.0, 0.2, 0.7, 1.0])
    assert fit.converged
    assert fit.residual < 1e-4

    config = {
        "gmm": {"preset": "ring", "modes": 8, "radius": 8.0, "stddev": 0.5},
        "degree": 6,
        "train": {"nfe": 3, "train_count": 16, "val_count": 16, "epochs": 2, "batch_size": 8, "lr": 0.05},
    }
    report = bf.train(json.dumps(config))
    assert len(report["val_loss"]) == 3
    assert min(report["val_loss"]) < report["val_loss"][0]
    assert report["scheduler"].kind == "bezier"
    with pytest.raises(bf.ConfigError):
        bf.train(json.dumps({"train": {}}))
