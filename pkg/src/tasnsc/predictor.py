"""The transferable prediction pipeline (TASNSC) and its no-transform baseline.

Training maps all trajectories into the curbside frame of their
intersection, learns a motion-primitive dictionary there, segments the
trajectories, counts atom-pair transitions and fits one GP flow field per
observed transition. Prediction maps an observed trajectory into the *test*
intersection's curbside frame, ranks the patterns by likelihood, integrates
the top flow fields forward and maps the rollouts back into the test
intersection's local frame.

Baseline mode (``mode="baseline"``) runs the identical pipeline with the
identity frame substituted for both intersections, i.e. classic
local-frame learning with no transfer.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    CurbsideFrame,
    frame_from_curbs,
    frame_to_config,
    from_curbside,
    identity_frame,
    transform_trajectory,
)
from .gp import GPModel, Kernel, MotionPattern, pattern_log_likelihood, posterior
from .sparse_coding import (
    DegenerateMotionError,
    Dictionary,
    GridSpec,
    build_transitions,
    featurize,
    learn_dictionary,
    segment,
)
from .trajectory import Dataset, Trajectory, TrajectoryError, velocities

__all__ = [
    "MODEL_VERSION",
    "PipelineError",
    "PipelineConfig",
    "TasnscModel",
    "PredictedCandidate",
    "PredictionSet",
    "train",
    "predict",
    "save_model",
    "load_model",
]

MODEL_VERSION = 1

MODES = ("tasnsc", "baseline")


class PipelineError(RuntimeError):
    """Raised when training or prediction cannot proceed on the given data."""


@dataclass(frozen=True)
class PipelineConfig:
    """All tunable pipeline parameters with their defaults."""

    dt: float = 0.5
    t_obs: float = 2.5
    t_pred: float = 5.0
    k_atoms: int = 12
    sparsity: float = 0.1
    iters: int = 200
    grid_cell: float = 1.0
    min_segment: int = 3
    top_m: int = 3
    max_gp_points: int = 800
    # 0.15 m position jitter at dt=0.5 s puts ~0.4 m/s of noise on the
    # forward-difference velocities; the GP noise floor has to match it.
    kernel: Kernel = field(default_factory=lambda: Kernel(noise_sd=0.4))
    seed: int = 0
    mode: str = "tasnsc"
    grid: GridSpec | None = None  # None: fit bounds to the training data

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        for name in ("dt", "t_pred", "grid_cell"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.t_obs < 0 or self.sparsity < 0 or self.iters < 0:
            raise ValueError("t_obs, sparsity and iters must be nonnegative")
        if self.top_m < 1 or self.k_atoms < 1 or self.min_segment < 1 or self.max_gp_points < 1:
            raise ValueError("top_m, k_atoms, min_segment and max_gp_points must be at least 1")

    def to_dict(self) -> dict:
        d = {
            f: getattr(self, f)
            for f in self.__dataclass_fields__
            if f not in ("kernel", "grid")
        }
        d["kernel"] = self.kernel.to_dict()
        d["grid"] = self.grid.to_dict() if self.grid is not None else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        d = dict(d)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "kernel" in d and d["kernel"] is not None and not isinstance(d["kernel"], Kernel):
            d["kernel"] = Kernel.from_dict(d["kernel"])
        if "grid" in d and d["grid"] is not None and not isinstance(d["grid"], GridSpec):
            d["grid"] = GridSpec.from_dict(d["grid"])
        return cls(**d)


@dataclass(frozen=True, eq=False)
class TasnscModel:
    """Everything needed to predict: frame provenance, primitives, flow fields."""

    frame: CurbsideFrame
    grid: GridSpec
    dictionary: Dictionary
    transitions: np.ndarray
    patterns: list
    config: PipelineConfig
    final_objective: float

    def __post_init__(self):
        for pat in self.patterns:
            i, j = pat.atoms
            if self.transitions[i, j] <= 0:
                raise ValueError(f"pattern {pat.atoms} has no supporting transitions")


@dataclass(frozen=True, eq=False)
class PredictedCandidate:
    """One rolled-out future with its normalized likelihood."""

    trajectory: Trajectory
    likelihood: float
    atoms: tuple
    step_variance: np.ndarray


@dataclass(frozen=True, eq=False)
class PredictionSet:
    """Candidate futures in the test intersection's local frame."""

    candidates: list

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("prediction set cannot be empty")
        weights = np.array([c.likelihood for c in self.candidates])
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError("candidate likelihoods must be nonnegative and sum to 1")
        lengths = {len(c.trajectory) for c in self.candidates}
        if len(lengths) > 1:
            raise ValueError(f"candidates have mixed lengths: {sorted(lengths)}")

    def top(self) -> PredictedCandidate:
        """Highest-likelihood candidate (first on ties)."""
        return max(self.candidates, key=lambda c: c.likelihood)


def _fit_grid(trajectories, cell: float) -> GridSpec:
    stacks = [t.xy for t in trajectories if len(t)]
    if not stacks:
        raise PipelineError("no trajectory points to fit a grid to")
    xy = np.vstack(stacks)
    lo = np.floor((xy.min(axis=0) - cell) / cell) * cell
    hi = np.ceil((xy.max(axis=0) + cell) / cell) * cell
    return GridSpec(x_min=lo[0], x_max=hi[0], y_min=lo[1], y_max=hi[1], cell=cell)


def _effective_frame(frame: CurbsideFrame, mode: str) -> CurbsideFrame:
    return frame if mode == "tasnsc" else identity_frame()


def _transition_blocks(traj: Trajectory, segments: list) -> list:
    """(i, j, velocity block) per adjacent segment pair; self pair if single."""
    vel = velocities(traj)
    if len(segments) == 1:
        s = segments[0]
        return [(s.atom, s.atom, vel[s.start : min(s.stop, len(vel))])]
    blocks = []
    for a, b in zip(segments[:-1], segments[1:]):
        block = vel[a.start : min(b.stop, len(vel))]
        if len(block):
            blocks.append((a.atom, b.atom, block))
    return blocks


def _subsample(samples: np.ndarray, cap: int) -> np.ndarray:
    if len(samples) <= cap:
        return samples
    idx = np.unique(np.round(np.linspace(0, len(samples) - 1, cap)).astype(int))
    return samples[idx]


def train(dataset: Dataset, frame: CurbsideFrame, config: PipelineConfig | None = None) -> TasnscModel:
    """Fit the full pipeline on a training dataset.

    ``frame`` is the curbside frame of the training intersection, expressed
    in the same local coordinates as the data.
    """
    config = config if config is not None else PipelineConfig()
    if len(dataset) < 2:
        raise PipelineError(f"training needs at least 2 trajectories, got {len(dataset)}")
    eff = _effective_frame(frame, config.mode)
    curbside = [transform_trajectory(eff, t) for t in dataset]
    grid = config.grid if config.grid is not None else _fit_grid(curbside, config.grid_cell)

    features, kept = [], []
    for traj in curbside:
        try:
            features.append(featurize(traj, grid))
        except (DegenerateMotionError, TrajectoryError):
            continue
        kept.append(traj)
    if len(kept) < 2:
        raise PipelineError("fewer than 2 trajectories survived featurization")

    dictionary, codes = learn_dictionary(
        np.stack(features), config.k_atoms, config.sparsity, config.iters, config.seed
    )
    seglists = [segment(t, dictionary, grid, config.min_segment) for t in kept]
    transitions = build_transitions(seglists, config.k_atoms)

    blocks: dict = {}
    for traj, segs in zip(kept, seglists):
        for i, j, block in _transition_blocks(traj, segs):
            blocks.setdefault((i, j), []).append(block)

    total = transitions.sum()
    patterns = []
    for (i, j) in sorted(blocks):
        if transitions[i, j] <= 0:
            continue
        samples = _subsample(np.vstack(blocks[(i, j)]), config.max_gp_points)
        gp_x = GPModel(samples[:, :2], samples[:, 2], config.kernel)
        gp_y = GPModel(samples[:, :2], samples[:, 3], config.kernel)
        patterns.append(
            MotionPattern(atoms=(i, j), gp_x=gp_x, gp_y=gp_y, prior_weight=transitions[i, j] / total)
        )
    if not patterns:
        raise PipelineError("no motion patterns could be fit")

    return TasnscModel(
        frame=frame,
        grid=grid,
        dictionary=dictionary,
        transitions=transitions,
        patterns=patterns,
        config=config,
        final_objective=float(codes.objective[-1]) if len(codes.objective) else float("nan"),
    )


def _guard_box(grid: GridSpec) -> tuple:
    # Rollouts stopping box: the grid bounds scaled 3x about their center.
    cx, cy = 0.5 * (grid.x_min + grid.x_max), 0.5 * (grid.y_min + grid.y_max)
    hx, hy = 1.5 * (grid.x_max - grid.x_min), 1.5 * (grid.y_max - grid.y_min)
    return cx - hx, cx + hx, cy - hy, cy + hy


def _rollout(pattern: MotionPattern, start: np.ndarray, dt: float, n_steps: int, box: tuple):
    """Euler-integrate the posterior mean flow; hold position after exiting the box."""
    p = np.array(start, dtype=float)
    points = np.empty((n_steps, 2))
    variances = np.empty(n_steps)
    step_var = 0.0
    alive = True
    for k in range(n_steps):
        if alive:
            mean_x, var_x = posterior(pattern.gp_x, p)
            mean_y, var_y = posterior(pattern.gp_y, p)
            p = p + dt * np.array([mean_x, mean_y])
            step_var = var_x + var_y
            if not (box[0] <= p[0] <= box[1] and box[2] <= p[1] <= box[3]):
                alive = False
        points[k] = p
        variances[k] = step_var
    return points, variances


def predict(model: TasnscModel, test_frame: CurbsideFrame, observed: Trajectory) -> PredictionSet:
    """Predict candidate futures for an observation in a test intersection.

    Returns the top-M motion patterns by observation likelihood, each
    rolled out ``t_pred / dt`` Euler steps along its posterior mean flow and
    mapped back into the test intersection's local frame; candidate
    likelihoods are the softmax of the pattern log-likelihoods.
    """
    if not model.patterns:
        raise PipelineError("model has no motion patterns")
    cfg = model.config
    if observed.duration + 1e-9 < 2 * cfg.dt:
        raise TrajectoryError(
            f"observation {observed.id!r} spans {observed.duration}s, needs at least {2 * cfg.dt}s"
        )
    eff = _effective_frame(test_frame, cfg.mode)
    obs_curb = transform_trajectory(eff, observed)
    samples = velocities(obs_curb)

    loglik = np.array([pattern_log_likelihood(p, samples) for p in model.patterns])
    order = np.argsort(-loglik, kind="stable")[: min(cfg.top_m, len(loglik))]
    scores = loglik[order]
    weights = np.exp(scores - scores.max())
    weights /= weights.sum()

    n_steps = int(round(cfg.t_pred / cfg.dt))
    box = _guard_box(model.grid)
    start = obs_curb.xy[-1]
    times = obs_curb.times[-1] + cfg.dt * np.arange(1, n_steps + 1)

    candidates = []
    for idx, weight in zip(order, weights):
        pattern = model.patterns[idx]
        points, variances = _rollout(pattern, start, cfg.dt, n_steps, box)
        local = from_curbside(eff, points)
        traj = Trajectory(
            id=f"{observed.id}#pattern-{pattern.atoms[0]}-{pattern.atoms[1]}",
            dt=cfg.dt,
            times=times,
            xy=local,
        )
        candidates.append(
            PredictedCandidate(
                trajectory=traj, likelihood=float(weight), atoms=pattern.atoms, step_variance=variances
            )
        )
    return PredictionSet(candidates=candidates)


def _model_to_dict(model: TasnscModel) -> dict:
    return {
        "version": MODEL_VERSION,
        "config": model.config.to_dict(),
        "frame": frame_to_config(model.frame),
        "grid": model.grid.to_dict(),
        "dictionary": {
            "k": model.dictionary.k,
            "lambda": model.config.sparsity,
            "seed": model.config.seed,
            "atoms": model.dictionary.atoms.tolist(),
        },
        "transitions": model.transitions.tolist(),
        "final_objective": model.final_objective,
        "patterns": [
            {
                "atoms": list(p.atoms),
                "prior_weight": p.prior_weight,
                "kernel": p.gp_x.kernel.to_dict(),
                "inputs": p.gp_x.inputs.tolist(),
                "vx": p.gp_x.targets.tolist(),
                "vy": p.gp_y.targets.tolist(),
            }
            for p in model.patterns
        ],
    }


def save_model(model: TasnscModel, path) -> None:
    """Write the model as a single JSON document (version field mandatory)."""
    with open(path, "w") as fh:
        json.dump(_model_to_dict(model), fh)
        fh.write("\n")


def load_model(path) -> TasnscModel:
    """Read a model file; GP factorizations are rebuilt from the stored data."""
    with open(path) as fh:
        doc = json.load(fh)
    version = doc.get("version")
    if version != MODEL_VERSION:
        raise ValueError(f"unsupported model version {version!r} in {path}")
    config = PipelineConfig.from_dict(doc["config"])
    frame_cfg = doc["frame"]
    frame = frame_from_curbs(frame_cfg["origin"], frame_cfg["curb1"], frame_cfg["curb2"])
    grid = GridSpec.from_dict(doc["grid"])
    dictionary = Dictionary(atoms=np.asarray(doc["dictionary"]["atoms"], dtype=float))
    transitions = np.asarray(doc["transitions"], dtype=int)
    patterns = []
    for rec in doc["patterns"]:
        kernel = Kernel.from_dict(rec["kernel"])
        inputs = np.asarray(rec["inputs"], dtype=float)
        patterns.append(
            MotionPattern(
                atoms=tuple(rec["atoms"]),
                gp_x=GPModel(inputs, np.asarray(rec["vx"], dtype=float), kernel),
                gp_y=GPModel(inputs, np.asarray(rec["vy"], dtype=float), kernel),
                prior_weight=float(rec["prior_weight"]),
            )
        )
    return TasnscModel(
        frame=frame,
        grid=grid,
        dictionary=dictionary,
        transitions=transitions,
        patterns=patterns,
        config=config,
        final_objective=float(doc.get("final_objective", float("nan"))),
    )
