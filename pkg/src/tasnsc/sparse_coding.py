"""Motion-primitive learning by semi-nonnegative sparse coding.

Trajectories are encoded on a discretized grid with four motion-direction
channels (+x, -x, +y, -y) per cell. Dictionary atoms are real-valued
feature vectors, codes are constrained nonnegative, and the two are fit by
alternating minimization of

    0.5 * ||X - D A||_F^2 + lam * sum(A),    A >= 0,  ||d_k|| = 1.

Each coordinate-descent code update soft-thresholds at ``lam`` and clamps
at zero; each atom update is the exact least-squares minimizer renormalized
to the unit sphere, so the objective never increases across a sweep.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .trajectory import Trajectory, TrajectoryError, velocities

__all__ = [
    "DegenerateMotionError",
    "GridSpec",
    "Dictionary",
    "SparseCodes",
    "Segment",
    "featurize",
    "learn_dictionary",
    "sparse_objective",
    "segment",
    "build_transitions",
]

logger = logging.getLogger(__name__)

N_CHANNELS = 4  # +x, -x, +y, -y


class DegenerateMotionError(ValueError):
    """Raised when a trajectory carries no usable motion (all velocities zero)."""


@dataclass(frozen=True)
class GridSpec:
    """Discretization of the plane into square cells with 4 direction channels."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    cell: float = 1.0

    def __post_init__(self):
        if self.cell <= 0:
            raise ValueError(f"cell size must be positive, got {self.cell}")
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise ValueError("grid bounds are empty")

    @property
    def nx(self) -> int:
        return max(1, int(np.ceil((self.x_max - self.x_min) / self.cell - 1e-9)))

    @property
    def ny(self) -> int:
        return max(1, int(np.ceil((self.y_max - self.y_min) / self.cell - 1e-9)))

    @property
    def dim(self) -> int:
        """Feature dimension: nx * ny * 4 channels."""
        return self.nx * self.ny * N_CHANNELS

    def to_dict(self) -> dict:
        return {
            "x_min": self.x_min,
            "x_max": self.x_max,
            "y_min": self.y_min,
            "y_max": self.y_max,
            "cell": self.cell,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        return cls(d["x_min"], d["x_max"], d["y_min"], d["y_max"], d["cell"])


@dataclass(frozen=True, eq=False)
class Dictionary:
    """K learned motion primitives, one unit-norm feature vector per row."""

    atoms: np.ndarray  # (K, dim)

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        if atoms.ndim != 2:
            raise ValueError("atoms must be a (K, dim) array")
        norms = np.linalg.norm(atoms, axis=1)
        if np.any(norms < 1e-12):
            raise ValueError("dictionary contains a zero atom")
        atoms = atoms.copy()
        atoms.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)

    @property
    def k(self) -> int:
        return self.atoms.shape[0]


@dataclass(frozen=True, eq=False)
class SparseCodes:
    """Nonnegative coefficients (K, n) plus the objective value per sweep."""

    matrix: np.ndarray
    objective: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if np.any(m < 0):
            raise ValueError("sparse codes must be nonnegative")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "objective", np.asarray(self.objective, dtype=float))


def _channel(vx: float, vy: float) -> int | None:
    """Direction channel of the dominant velocity component; None if still."""
    ax, ay = abs(vx), abs(vy)
    if ax == 0.0 and ay == 0.0:
        return None
    if ax >= ay:
        return 0 if vx > 0 else 1
    return 2 if vy > 0 else 3


def _feature_index(grid: GridSpec, x: float, y: float, channel: int) -> tuple[int, bool]:
    ix = int(np.floor((x - grid.x_min) / grid.cell))
    iy = int(np.floor((y - grid.y_min) / grid.cell))
    clipped = not (0 <= ix < grid.nx and 0 <= iy < grid.ny)
    ix = min(max(ix, 0), grid.nx - 1)
    iy = min(max(iy, 0), grid.ny - 1)
    return (iy * grid.nx + ix) * N_CHANNELS + channel, clipped


def featurize(traj: Trajectory, grid: GridSpec) -> np.ndarray:
    """Encode a trajectory as a unit-norm occupancy vector over (cell, channel).

    Each consecutive point pair votes for the cell containing the segment
    midpoint, in the channel of its dominant velocity direction. Midpoints
    outside the grid are clipped to the border cell (counted and logged).
    Pairs with zero velocity vote for nothing.
    """
    if len(traj) < 2:
        raise TrajectoryError(f"{traj.id!r} is too short to featurize")
    samples = velocities(traj)
    mids = 0.5 * (traj.xy[:-1] + traj.xy[1:])
    feat = np.zeros(grid.dim)
    n_clipped = 0
    for (x, y), (_, _, vx, vy) in zip(mids, samples):
        ch = _channel(vx, vy)
        if ch is None:
            continue
        idx, clipped = _feature_index(grid, x, y, ch)
        n_clipped += clipped
        feat[idx] += 1.0
    if n_clipped:
        logger.warning("%s: %d segment midpoints outside grid bounds were clipped", traj.id, n_clipped)
    norm = np.linalg.norm(feat)
    if norm == 0.0:
        raise DegenerateMotionError(f"{traj.id!r} has no net motion to featurize")
    return feat / norm


def sparse_objective(features: np.ndarray, atoms: np.ndarray, codes: np.ndarray, lam: float) -> float:
    """0.5 * ||X - D A||_F^2 + lam * sum(A).

    ``features`` holds one sample per row (as in :func:`learn_dictionary`),
    ``atoms`` one primitive per row, ``codes`` is (K, n).
    """
    resid = features.T - atoms.T @ codes
    return float(0.5 * np.sum(resid * resid) + lam * np.sum(codes))


def learn_dictionary(
    features,
    k_atoms: int,
    lam: float = 0.1,
    iters: int = 200,
    seed: int = 0,
) -> tuple[Dictionary, SparseCodes]:
    """Alternating minimization for the semi-nonnegative sparse coding model.

    ``features`` is an (n, dim) array with one sample per row. Returns the
    learned dictionary and the codes; ``codes.objective`` records the
    objective after every full sweep and is non-increasing.
    """
    X = np.asarray(features, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("features must be a nonempty (n, dim) array")
    if k_atoms < 1:
        raise ValueError(f"need at least one atom, got {k_atoms}")
    if lam < 0:
        raise ValueError(f"sparsity weight must be nonnegative, got {lam}")
    X = X.T  # columns are samples
    dim, n = X.shape
    if k_atoms > dim:
        logger.warning("k_atoms=%d exceeds feature dimension %d", k_atoms, dim)

    rng = np.random.default_rng(seed)
    if n >= k_atoms:
        picks = rng.choice(n, size=k_atoms, replace=False)
        D = X[:, picks].copy()
    else:
        D = np.vstack((X.T, rng.standard_normal((k_atoms - n, dim)))).T
    norms = np.linalg.norm(D, axis=0)
    dead = norms < 1e-12
    if np.any(dead):
        D[:, dead] = rng.standard_normal((dim, int(dead.sum())))
        norms = np.linalg.norm(D, axis=0)
    D /= norms

    A = np.zeros((k_atoms, n))
    history = np.empty(iters)
    R = X - D @ A
    for it in range(iters):
        # Code pass: exact nonnegative coordinate minimization per atom row.
        for k in range(k_atoms):
            a_old = A[k]
            corr = D[:, k] @ R + a_old  # residual with atom k's own term restored
            a_new = np.maximum(corr - lam, 0.0)
            delta = a_old - a_new
            if np.any(delta):
                R += np.outer(D[:, k], delta)
                A[k] = a_new
        # Atom pass: sphere-constrained least squares, one atom at a time.
        for k in range(k_atoms):
            ak = A[k]
            weight = ak @ ak
            if weight == 0.0:
                # Unused atom contributes nothing; reseat it on the worst
                # reconstructed sample without changing the objective.
                j = int(np.argmax(np.sum(R * R, axis=0)))
                cand = X[:, j]
                if np.linalg.norm(cand) < 1e-12:
                    cand = rng.standard_normal(dim)
                D[:, k] = cand / np.linalg.norm(cand)
                continue
            g = R @ ak + D[:, k] * weight
            g_norm = np.linalg.norm(g)
            if g_norm < 1e-12:
                continue
            d_new = g / g_norm
            R += np.outer(D[:, k] - d_new, ak)
            D[:, k] = d_new
        # Refresh the residual to keep incremental rank-1 drift out of the
        # objective trace.
        R = X - D @ A
        history[it] = 0.5 * np.sum(R * R) + lam * np.sum(A)

    return Dictionary(atoms=D.T), SparseCodes(matrix=A, objective=history)


@dataclass(frozen=True)
class Segment:
    """A maximal run of trajectory points explained by one atom.

    ``stop`` is exclusive. ``low_confidence`` flags runs whose points had no
    positive support under any atom.
    """

    atom: int
    start: int
    stop: int
    low_confidence: bool = False

    def __len__(self) -> int:
        return self.stop - self.start


def _point_scores(traj: Trajectory, dictionary: Dictionary, grid: GridSpec) -> np.ndarray:
    """(n, K) score of each point's cell/channel feature under each atom."""
    samples = velocities(traj)
    mids = 0.5 * (traj.xy[:-1] + traj.xy[1:])
    scores = np.zeros((len(traj), dictionary.k))
    for i, ((x, y), (_, _, vx, vy)) in enumerate(zip(mids, samples)):
        ch = _channel(vx, vy)
        if ch is None:
            continue
        idx, _ = _feature_index(grid, x, y, ch)
        scores[i] = dictionary.atoms[:, idx]
    scores[-1] = scores[-2]  # last point inherits its incoming motion
    return scores


def _runs(labels: np.ndarray) -> list[tuple[int, int, int]]:
    runs = []
    start = 0
    for i in range(1, len(labels) + 1):
        if i == len(labels) or labels[i] != labels[start]:
            runs.append((int(labels[start]), start, i))
            start = i
    return runs


def segment(traj: Trajectory, dictionary: Dictionary, grid: GridSpec, min_len: int = 3) -> list[Segment]:
    """Assign each point to its best atom and merge runs shorter than ``min_len``.

    A short run joins whichever neighboring run's atom scores higher on the
    short run's own points (left neighbor on ties). Ties in the per-point
    argmax go to the lower atom index.
    """
    if len(traj) < 2:
        raise TrajectoryError(f"{traj.id!r} is too short to segment")
    scores = _point_scores(traj, dictionary, grid)
    labels = np.argmax(scores, axis=1)  # argmax takes the first (lowest) index on ties

    runs = _runs(labels)
    while len(runs) > 1:
        short = [r for r in runs if r[2] - r[1] < min_len]
        if not short:
            break
        atom, start, stop = min(short, key=lambda r: (r[2] - r[1], r[1]))
        pos = runs.index((atom, start, stop))
        neighbors = []
        if pos > 0:
            neighbors.append(runs[pos - 1][0])
        if pos + 1 < len(runs):
            neighbors.append(runs[pos + 1][0])
        # Strength of a neighbor: how well its atom explains the short run.
        # max() keeps the first maximal entry, so ties go to the left one.
        best = max(neighbors, key=lambda a: scores[start:stop, a].sum())
        labels[start:stop] = best
        runs = _runs(labels)

    segments = []
    for atom, start, stop in runs:
        support = float(scores[start:stop, atom].sum())
        segments.append(Segment(atom=atom, start=start, stop=stop, low_confidence=support <= 0.0))
    return segments


def build_transitions(segmentations, k_atoms: int) -> np.ndarray:
    """Count trajectories transitioning between atom pairs.

    ``segmentations`` is one atom-index sequence per trajectory. Each
    distinct adjacent pair (i, j) in a sequence bumps ``T[i, j]`` once for
    that trajectory; a single-segment trajectory bumps its self pair.
    """
    T = np.zeros((k_atoms, k_atoms), dtype=int)
    for seq in segmentations:
        atoms = [s.atom if isinstance(s, Segment) else int(s) for s in seq]
        if not atoms:
            continue
        if any(a < 0 or a >= k_atoms for a in atoms):
            raise ValueError(f"atom index out of range for K={k_atoms}: {atoms}")
        if len(atoms) == 1:
            T[atoms[0], atoms[0]] += 1
            continue
        for i, j in set(zip(atoms[:-1], atoms[1:])):
            T[i, j] += 1
    return T
