"""Evaluation metrics: Modified Hausdorff Distance, angular correctness, Eq.-style
likelihood-weighted classification accuracy, and the full benchmark report.

A prediction counts as correct when the direction from the last observed
point to its endpoint deviates from the ground-truth direction by at most a
threshold (40 degrees by default). Accuracy pools every candidate across
the test set, weighting each by its prediction likelihood:

    accuracy % = 100 * sum(l_i for correct i) / sum(l_k for all k)
"""

import csv
import json
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .predictor import PredictionSet, TasnscModel, predict
from .trajectory import Dataset, Trajectory, split_horizon

__all__ = [
    "EvalReport",
    "mhd",
    "angular_deviation",
    "classification_accuracy",
    "evaluate",
    "format_table",
    "write_candidate_csv",
]


def _points(seq) -> np.ndarray:
    if isinstance(seq, Trajectory):
        return seq.xy
    return np.asarray(seq, dtype=float).reshape(-1, 2)


def mhd(a, b) -> float:
    """Modified Hausdorff Distance between two point sequences (meters).

    The larger of the two directed mean nearest-neighbor distances.
    """
    pa, pb = _points(a), _points(b)
    if len(pa) == 0 or len(pb) == 0:
        raise ValueError("MHD needs two nonempty point sequences")
    d = cdist(pa, pb)
    return float(max(d.min(axis=1).mean(), d.min(axis=0).mean()))


def angular_deviation(predicted, truth, anchor) -> float:
    """Unsigned angle in degrees between the two endpoint displacements.

    Displacements run from ``anchor`` (the last observed point) to the
    final point of each sequence. Raises if either displacement is shorter
    than 1e-9 m.
    """
    anchor = np.asarray(anchor, dtype=float)
    dp = _points(predicted)[-1] - anchor
    dt_ = _points(truth)[-1] - anchor
    np_, nt = np.linalg.norm(dp), np.linalg.norm(dt_)
    if np_ < 1e-9 or nt < 1e-9:
        raise ValueError("endpoint displacement is zero, direction undefined")
    cosang = np.clip(dp @ dt_ / (np_ * nt), -1.0, 1.0)
    return float(np.degrees(np.arccos(cosang)))


def _candidate_correct(candidate_traj, truth, anchor, threshold: float) -> bool:
    # Degenerate displacements (a rollout that went nowhere, or a stationary
    # ground truth) never fall inside the cone.
    try:
        return angular_deviation(candidate_traj, truth, anchor) <= threshold
    except ValueError:
        return False


def classification_accuracy(results, threshold: float = 40.0) -> float:
    """Likelihood-weighted percentage of correct predictions.

    ``results`` is a sequence of ``(PredictionSet, truth, anchor)`` triples;
    every candidate of every set is pooled with its likelihood as weight.
    """
    num = 0.0
    den = 0.0
    for pset, truth, anchor in results:
        for cand in pset.candidates:
            den += cand.likelihood
            if _candidate_correct(cand.trajectory, truth, anchor, threshold):
                num += cand.likelihood
    if den == 0.0:
        raise ValueError("no predictions to score")
    return 100.0 * num / den


@dataclass
class EvalReport:
    """Benchmark summary plus one row per test trajectory."""

    classification_accuracy: float
    mean_mhd: float
    mean_predict_time: float
    threshold_deg: float
    n_trajectories: int
    rows: list = field(default_factory=list)
    mean_weighted_mhd: float | None = None

    def to_dict(self) -> dict:
        d = {
            "classification_accuracy": self.classification_accuracy,
            "mean_mhd": self.mean_mhd,
            "mean_predict_time": self.mean_predict_time,
            "threshold_deg": self.threshold_deg,
            "n_trajectories": self.n_trajectories,
            "rows": self.rows,
        }
        if self.mean_weighted_mhd is not None:
            d["mean_weighted_mhd"] = self.mean_weighted_mhd
        return d

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def evaluate(
    model: TasnscModel,
    test: Dataset,
    test_frame,
    t_obs: float | None = None,
    t_pred: float | None = None,
    threshold: float = 40.0,
    weighted_mhd: bool = False,
    collect_predictions: list | None = None,
) -> EvalReport:
    """Run the full benchmark protocol over a test dataset.

    Each trajectory is split into observation and ground-truth horizons,
    predicted, and scored. Timing covers ``predict`` only. When a list is
    passed as ``collect_predictions`` it receives one
    ``(observed, truth, PredictionSet)`` triple per trajectory, for plot
    export.
    """
    if len(test) == 0:
        raise ValueError("empty test set")
    t_obs = model.config.t_obs if t_obs is None else t_obs
    t_pred = model.config.t_pred if t_pred is None else t_pred

    results = []
    rows = []
    mhds = []
    weighted = []
    times = []
    for traj in test:
        observed, truth = split_horizon(traj, t_obs, t_pred)
        tic = time.perf_counter()
        pset = predict(model, test_frame, observed)
        elapsed = time.perf_counter() - tic
        anchor = observed.xy[-1]
        results.append((pset, truth, anchor))
        if collect_predictions is not None:
            collect_predictions.append((observed, truth, pset))
        times.append(elapsed)

        top = pset.top()
        top_mhd = mhd(top.trajectory, truth)
        mhds.append(top_mhd)
        if weighted_mhd:
            weighted.append(sum(c.likelihood * mhd(c.trajectory, truth) for c in pset.candidates))
        correct_weight = sum(
            c.likelihood
            for c in pset.candidates
            if _candidate_correct(c.trajectory, truth, anchor, threshold)
        )
        rows.append(
            {
                "id": traj.id,
                "intent": traj.intent,
                "top_pattern": list(top.atoms),
                "top_likelihood": top.likelihood,
                "correct_weight": correct_weight,
                "top_mhd": top_mhd,
                "predict_time": elapsed,
            }
        )

    return EvalReport(
        classification_accuracy=classification_accuracy(results, threshold),
        mean_mhd=float(np.mean(mhds)),
        mean_predict_time=float(np.mean(times)),
        threshold_deg=threshold,
        n_trajectories=len(test),
        rows=rows,
        mean_weighted_mhd=float(np.mean(weighted)) if weighted_mhd else None,
    )


_COLUMNS = ("Algorithm", "Classification Accuracy (%)", "MHD (m)", "Time (sec)", "Train In", "Test In")


def format_table(rows) -> str:
    """Aligned text table with the benchmark comparison columns.

    ``rows`` is a list of dicts with keys algorithm, accuracy, mhd, time,
    train_in, test_in.
    """
    body = [
        (
            r["algorithm"],
            f"{r['accuracy']:.2f}",
            f"{r['mhd']:.3f}",
            f"{r['time']:.4f}",
            r["train_in"],
            r["test_in"],
        )
        for r in rows
    ]
    widths = [max(len(c), *(len(row[i]) for row in body)) for i, c in enumerate(_COLUMNS)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*_COLUMNS), fmt.format(*("-" * w for w in widths))]
    lines += [fmt.format(*row) for row in body]
    return "\n".join(lines)


def write_candidate_csv(path, observed: Trajectory, truth: Trajectory, pset: PredictionSet) -> None:
    """Per-trajectory plot data: observed, ground truth, and each candidate."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["role", "candidate", "likelihood", "t", "x", "y"])
        for t, x, y in observed.points:
            writer.writerow(["observed", "", "", f"{t:.3f}", repr(x), repr(y)])
        for t, x, y in truth.points:
            writer.writerow(["truth", "", "", f"{t:.3f}", repr(x), repr(y)])
        for k, cand in enumerate(pset.candidates):
            for t, x, y in cand.trajectory.points:
                writer.writerow(["candidate", k, f"{cand.likelihood:.6f}", f"{t:.3f}", repr(x), repr(y)])
