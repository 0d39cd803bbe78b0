"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. The benchmark criteria (6-9) run the shipped synthetic scenes at
full scale with fixed seeds.
"""

import json
import time
from contextlib import contextmanager

import numpy as np
import pytest

from tasnsc.cli import main as cli_main
from tasnsc.geometry import (
    curbside_transform,
    frame_from_curbs,
    frame_to_config,
    from_curbside,
    to_curbside,
)
from tasnsc.gp import Kernel, fit, posterior
from tasnsc.metrics import classification_accuracy, evaluate, mhd
from tasnsc.predictor import PipelineConfig, train
from tasnsc.sparse_coding import learn_dictionary
from tasnsc.synthgen import generate, scene_a, scene_b, scene_to_config, with_seed

N_TRAIN = 150
N_TEST = 30


@contextmanager
def criterion(num, text):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {num} FAIL - {text}")
        raise
    print(f"ACCEPTANCE {num} PASS - {text}")


def random_frame(rng):
    origin = rng.uniform(-20, 20, 2)
    phi = rng.uniform(0, 2 * np.pi)
    alpha = np.radians(rng.uniform(10.0, 170.0))
    return frame_from_curbs(
        origin,
        (np.cos(phi), np.sin(phi)),
        (np.cos(phi + alpha), np.sin(phi + alpha)),
    )


@pytest.fixture(scope="module")
def bench():
    """Full-scale benchmark on the shipped scenes, everything timed."""
    sa, sb = scene_a(), scene_b()
    out = {}

    tic = time.perf_counter()
    train_a = generate(sa, N_TRAIN, tag="a-train")
    test_a = generate(with_seed(sa, 1007), N_TEST, tag="a-test")
    frame_a = sa.frame()
    model_a = train(train_a, frame_a, PipelineConfig())
    model_a_base = train(train_a, frame_a, PipelineConfig(mode="baseline"))
    out["rep_a_tasnsc"] = evaluate(model_a, test_a, frame_a)
    out["rep_a_baseline"] = evaluate(model_a_base, test_a, frame_a)
    out["scene_a_seconds"] = time.perf_counter() - tic

    train_b = generate(sb, N_TRAIN, tag="b-train")
    frame_b = sb.frame()
    model_b = train(train_b, frame_b, PipelineConfig())
    model_b_base = train(train_b, frame_b, PipelineConfig(mode="baseline"))
    out["rep_ba_tasnsc"] = evaluate(model_b, test_a, frame_a)
    out["rep_ba_baseline"] = evaluate(model_b_base, test_a, frame_a)
    return out


def test_criterion_1_transform_correctness():
    with criterion(1, "contravariant transform matches the linear-system oracle; round trip exact"):
        rng = np.random.default_rng(2024)
        frames = [random_frame(rng) for _ in range(100)]
        points = [rng.uniform(-50, 50, (100, 2)) for _ in frames]

        tic = time.perf_counter()
        forward = [to_curbside(f, p) for f, p in zip(frames, points)]
        back = [from_curbside(f, c) for f, c in zip(frames, forward)]
        elapsed = time.perf_counter() - tic

        for f, pts, comps, pts_back in zip(frames, points, forward, back):
            # Independent oracle: Cramer's rule on x'*e1 + y'*e2 = p - origin.
            d = pts - f.origin
            det = f.e1[0] * f.e2[1] - f.e1[1] * f.e2[0]
            cx = (d[:, 0] * f.e2[1] - d[:, 1] * f.e2[0]) / det
            cy = (f.e1[0] * d[:, 1] - f.e1[1] * d[:, 0]) / det
            assert np.max(np.abs(comps - np.column_stack((cx, cy)))) < 1e-9
            assert np.max(np.abs(pts_back - pts)) < 1e-9
        assert elapsed < 1.0, f"transform pass took {elapsed:.3f}s"


def test_criterion_2_affine_property_suite():
    with criterion(2, "collinearity/midpoint/parallelism preserved; orthogonal skew part exactly identity"):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            f = random_frame(rng)
            a, b, c = rng.uniform(-20, 20, (3, 2))
            ta, tb, tc = (to_curbside(f, p) for p in (a, b, c))
            scale = max(1.0, float(np.linalg.norm(tb - ta)))
            m = to_curbside(f, a + 0.37 * (b - a))
            assert abs((tb - ta)[0] * (m - ta)[1] - (tb - ta)[1] * (m - ta)[0]) < 1e-9 * scale
            assert np.max(np.abs(to_curbside(f, 0.5 * (a + b)) - 0.5 * (ta + tb))) < 1e-9
            td = to_curbside(f, c + (b - a))
            assert abs((tb - ta)[0] * (td - tc)[1] - (tb - ta)[1] * (td - tc)[0]) < 1e-9 * scale
        ortho = frame_from_curbs((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
        assert np.array_equal(curbside_transform(ortho).linear, np.eye(2))


def test_criterion_3_sparse_coding():
    with criterion(3, "objective non-increasing every sweep; planted atoms recovered (|cos| >= 0.9)"):
        tic = time.perf_counter()
        rng = np.random.default_rng(5)
        dim = 16
        planted = [np.zeros(dim), np.zeros(dim)]
        planted[0][:8] = 1 / np.sqrt(8)
        planted[1][8:] = 1 / np.sqrt(8)
        X = np.vstack([p + rng.normal(0.0, 0.01, (50, dim)) for p in planted])
        dictionary, codes = learn_dictionary(X, k_atoms=2, lam=0.01, iters=200, seed=3)

        diffs = np.diff(codes.objective)
        assert np.all(diffs <= 1e-9 * (1.0 + abs(codes.objective[0]))), "objective increased"
        for p in planted:
            cos = np.max(np.abs(dictionary.atoms @ p) / np.linalg.norm(dictionary.atoms, axis=1))
            assert cos >= 0.9, f"planted atom matched at |cos|={cos:.3f}"
        elapsed = time.perf_counter() - tic
        assert elapsed < 10.0, f"sparse coding criterion took {elapsed:.1f}s"


def test_criterion_4_gp_regression():
    with criterion(4, "GP reproduces training targets and interpolates the linear flow field"):
        rng = np.random.default_rng(11)
        pts = rng.uniform(-3, 3, (30, 2))
        targets = np.cos(pts[:, 0]) - 0.5 * pts[:, 1]
        model = fit(pts, targets, Kernel(noise_sd=1e-6))
        mean, _ = posterior(model, pts)
        assert np.max(np.abs(mean - targets)) < 1e-3

        g = np.linspace(0, 4, 5)
        gx, gy = np.meshgrid(g, g)
        grid_pts = np.column_stack((gx.ravel(), gy.ravel()))
        flow = fit(grid_pts, 0.5 * grid_pts[:, 0], Kernel(noise_sd=0.01))
        queries = rng.uniform(0.5, 3.5, (20, 2))
        mean, _ = posterior(flow, queries)
        true = 0.5 * queries[:, 0]
        rms = float(np.sqrt(np.mean((mean - true) ** 2)) / np.sqrt(np.mean(true**2)))
        assert rms < 0.05, f"linear field RMS error {rms:.3%}"


def test_criterion_5_metric_oracles():
    with criterion(5, "MHD matches brute force within 1e-12; weighted accuracy example exact"):
        rng = np.random.default_rng(13)
        for _ in range(100):
            a = rng.uniform(-10, 10, (rng.integers(1, 51), 2))
            b = rng.uniform(-10, 10, (rng.integers(1, 51), 2))
            directed_ab = np.mean([min(np.linalg.norm(x - y) for y in b) for x in a])
            directed_ba = np.mean([min(np.linalg.norm(y - x) for x in a) for y in b])
            assert abs(mhd(a, b) - max(directed_ab, directed_ba)) < 1e-12

        from tasnsc.predictor import PredictedCandidate, PredictionSet
        from tasnsc.trajectory import Trajectory

        def cand(endpoint, weight):
            xy = np.linspace((0.0, 0.0), endpoint, 4)
            traj = Trajectory(id="c", dt=0.5, times=0.5 * np.arange(4), xy=xy)
            return PredictedCandidate(traj, weight, (0, 0), np.zeros(4))

        truth = Trajectory(id="g", dt=0.5, times=0.5 * np.arange(4), xy=np.linspace((0, 0), (1.0, 0.0), 4))
        pset = PredictionSet(candidates=[cand((1.0, 0.1), 0.7), cand((0.0, 1.0), 0.3)])
        acc = classification_accuracy([(pset, truth, (0.0, 0.0))], threshold=40.0)
        assert acc == pytest.approx(70.0, abs=1e-12)


def test_criterion_6_same_intersection(bench):
    with criterion(6, "scene A: transferable model at least matches the baseline and reaches 80%"):
        acc_t = bench["rep_a_tasnsc"].classification_accuracy
        acc_b = bench["rep_a_baseline"].classification_accuracy
        print(f"  [scene A] tasnsc={acc_t:.2f}% baseline={acc_b:.2f}% ({bench['scene_a_seconds']:.1f}s)")
        assert acc_t >= acc_b, f"tasnsc {acc_t:.2f}% below baseline {acc_b:.2f}%"
        assert acc_t >= 80.0, f"tasnsc accuracy {acc_t:.2f}% below 80%"
        assert bench["scene_a_seconds"] < 120.0


def test_criterion_7_transfer(bench):
    with criterion(7, "train on B, test on A: beats no-transform baseline by 10 points, near same-scene accuracy"):
        acc_transfer = bench["rep_ba_tasnsc"].classification_accuracy
        acc_baseline = bench["rep_ba_baseline"].classification_accuracy
        acc_same = bench["rep_a_tasnsc"].classification_accuracy
        print(f"  [transfer] tasnsc B->A={acc_transfer:.2f}% baseline B->A={acc_baseline:.2f}% tasnsc A->A={acc_same:.2f}%")
        assert acc_transfer >= acc_baseline + 10.0
        assert abs(acc_same - acc_transfer) <= 15.0


def test_criterion_8_prediction_timing(bench):
    with criterion(8, "mean per-trajectory prediction time under 0.1 s"):
        t = bench["rep_a_tasnsc"].mean_predict_time
        print(f"  [timing] mean predict {t * 1000:.1f} ms")
        assert t < 0.1


def test_criterion_9_compare_grid_determinism(tmp_path):
    with criterion(9, "repeated compare grids are identical apart from timing"):
        scenes = {"a": scene_a(), "b": scene_b()}
        paths = {}
        for name, scene in scenes.items():
            sp = tmp_path / f"scene_{name}.json"
            sp.write_text(json.dumps(scene_to_config(scene)))
            fp = tmp_path / f"frame_{name}.json"
            fp.write_text(json.dumps(frame_to_config(scene.frame())))
            tr = tmp_path / f"train_{name}.jsonl"
            te = tmp_path / f"test_{name}.jsonl"
            assert cli_main(["generate", "--scene", str(sp), "--n", "60", "--out", str(tr)]) == 0
            assert cli_main(
                ["generate", "--scene", str(sp), "--n", "12", "--out", str(te), "--seed", "1007", "--tag", "test"]
            ) == 0
            paths[name] = (tr, te, fp)

        reports = []
        for run in (1, 2):
            out = tmp_path / f"compare_{run}.json"
            rc = cli_main(
                ["compare",
                 "--train-a", str(paths["a"][0]), "--test-a", str(paths["a"][1]),
                 "--train-b", str(paths["b"][0]), "--test-b", str(paths["b"][1]),
                 "--frame-a", str(paths["a"][2]), "--frame-b", str(paths["b"][2]),
                 "--out", str(out), "--seed", "0"]
            )
            assert rc == 0
            reports.append(json.loads(out.read_text()))
        for doc in reports:
            for row in doc["rows"]:
                row["time"] = 0.0
        assert reports[0] == reports[1]
