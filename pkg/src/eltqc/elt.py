"""Ensemble of Lindbladian trajectories evaluated through dilated circuits.

Each trajectory is an amplitude-damping Kraus map applied to a fixed initial
state, with its effective time argument derived from the lab time either by a
rate multiplier or by a history lag.  Trajectory populations are read out
from the first system-block amplitudes of ``U_{M_i} v_j`` and combined with
per-time convex weights.
"""
from __future__ import annotations

import csv
import enum
import io
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channels import ChannelSpec, KrausMap
from .circuit import sample_state, simulate
from .dilation import dilate_channel
from .exceptions import DimensionMismatch, EmptyFamily, WeightGridMismatch
from .stateprep import VectorEnsemble
from .synthesis import prep_and_apply, synthesize_2q

SIMPLEX_TOL = 1e-12


class Mode(enum.Enum):
    RATE_SCALED = "RateScaled"
    LAG_SHIFTED = "LagShifted"


@dataclass(frozen=True)
class TrajectorySpec:
    index: int
    rate_multiplier: float = 1.0
    lag: float = 0.0

    def __post_init__(self):
        if not (self.rate_multiplier >= 0 and self.lag >= 0):
            raise ValueError("rate multiplier and lag must be nonnegative")


def trajectory_gamma_t(spec: TrajectorySpec, mode: Mode, t) -> float:
    """Effective damping argument of one trajectory at lab time ``t`` (units of 1/gamma)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if Mode(mode) is Mode.RATE_SCALED:
        return spec.rate_multiplier * t
    return max(0.0, t - spec.lag)


@dataclass
class TrajectoryFamily:
    trajectories: list
    mode: Mode = Mode.RATE_SCALED
    base_channel: ChannelSpec = field(default_factory=ChannelSpec)

    def __post_init__(self):
        self.mode = Mode(self.mode)
        if not self.trajectories:
            raise EmptyFamily("a trajectory family needs at least one member")

    def __len__(self):
        return len(self.trajectories)

    def has_identity_member(self, t_max) -> bool:
        if self.mode is Mode.RATE_SCALED:
            return any(s.rate_multiplier == 0 for s in self.trajectories)
        return any(s.lag >= t_max for s in self.trajectories)

    def validate(self, t_max):
        if not self.has_identity_member(t_max):
            raise ValueError("family lacks an identity-capable member (kappa = 0 or lag >= t_max)")

    def gamma_ts(self, t):
        return [trajectory_gamma_t(s, self.mode, t) for s in self.trajectories]

    @classmethod
    def rate_scaled(cls, kappas) -> "TrajectoryFamily":
        return cls([TrajectorySpec(i, float(k)) for i, k in enumerate(kappas)], Mode.RATE_SCALED)

    @classmethod
    def lag_shifted(cls, lags) -> "TrajectoryFamily":
        return cls([TrajectorySpec(i, 1.0, float(l)) for i, l in enumerate(lags)], Mode.LAG_SHIFTED)

    def to_json(self) -> dict:
        return {
            "mode": self.mode.value,
            "trajectories": [
                {"index": s.index, "rate_multiplier": s.rate_multiplier, "lag": s.lag} for s in self.trajectories
            ],
        }


def default_kappas(n=25, low=1e-2, high=1e1):
    """``{0}`` plus ``n - 1`` log-spaced rate multipliers."""
    return np.concatenate([[0.0], np.logspace(np.log10(low), np.log10(high), n - 1)])


def default_family() -> TrajectoryFamily:
    return TrajectoryFamily.rate_scaled(default_kappas())


def default_grid(t_max=10.0, n=101):
    return np.linspace(0.0, t_max, n)


@dataclass
class WeightSchedule:
    times: np.ndarray
    weights: np.ndarray  # (n_times, n_trajectories)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.weights = np.atleast_2d(np.asarray(self.weights, dtype=float))
        if self.weights.shape[0] != self.times.size:
            raise WeightGridMismatch(f"{self.weights.shape[0]} weight rows for {self.times.size} times")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")
        if np.any(np.abs(self.weights.sum(axis=1) - 1) > SIMPLEX_TOL):
            raise ValueError("each weight slice must sum to 1")

    @classmethod
    def constant(cls, times, w) -> "WeightSchedule":
        times = np.asarray(times, dtype=float)
        return cls(times, np.tile(np.asarray(w, dtype=float), (times.size, 1)))

    def to_json(self) -> dict:
        return {"times": [float(t) for t in self.times], "weights": [[float(x) for x in row] for row in self.weights]}

    @classmethod
    def from_json(cls, obj) -> "WeightSchedule":
        return cls(np.asarray(obj["times"], dtype=float), np.asarray(obj["weights"], dtype=float))


@dataclass(frozen=True)
class Source:
    kind: str
    shots: int | None = None
    seed: int | None = None

    @classmethod
    def exact(cls):
        return cls("Exact")

    @classmethod
    def statevector(cls):
        return cls("Statevector")

    @classmethod
    def from_shots(cls, shots, seed):
        return cls("Shots", int(shots), seed)

    def __str__(self):
        if self.kind == "Shots":
            return f"Shots({self.shots};{self.seed})"
        return self.kind


@dataclass
class PopulationSeries:
    times: np.ndarray
    ground: np.ndarray
    excited: np.ndarray
    source: Source = field(default_factory=Source.statevector)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.ground = np.asarray(self.ground, dtype=float)
        self.excited = np.asarray(self.excited, dtype=float)
        if not (self.times.shape == self.ground.shape == self.excited.shape):
            raise DimensionMismatch("times, ground and excited must share a shape")

    def to_csv(self, fh=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["gamma_t", "rho_00", "rho_11", "source"])
        for t, g, e in zip(self.times, self.ground, self.excited):
            w.writerow([repr(float(t)), repr(float(g)), repr(float(e)), str(self.source)])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text

    @classmethod
    def from_csv(cls, text) -> "PopulationSeries":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty population CSV")
        arr = lambda key: np.array([float(r[key]) for r in rows])
        return cls(arr("gamma_t"), arr("rho_00"), arr("rho_11"), Source(rows[0]["source"].split("(")[0]))


@dataclass(frozen=True)
class Backend:
    """``kind`` is ``"statevector"`` or ``"shots"``; shots backends carry a base seed."""

    kind: str = "statevector"
    shots: int = 8192
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("statevector", "shots"):
            raise ValueError(f"unknown backend {self.kind!r}")
        if self.kind == "shots" and self.shots < 1:
            raise ValueError("shots backend needs shots >= 1")

    @property
    def source(self) -> Source:
        if self.kind == "shots":
            return Source.from_shots(self.shots, self.seed)
        return Source.statevector()


STATEVECTOR = Backend("statevector")


class _SynthesisCache:
    """Synthesized dilation circuits keyed by the Kraus operator bytes."""

    def __init__(self):
        self._data = {}
        self._lock = threading.Lock()

    def get(self, dilated):
        key = dilated.matrix.tobytes()
        hit = self._data.get(key)
        if hit is None:
            hit = synthesize_2q(dilated.matrix)
            with self._lock:
                self._data[key] = hit
        return hit

    def clear(self):
        with self._lock:
            self._data.clear()


SYNTHESIS_CACHE = _SynthesisCache()


def _task_rng(backend, key):
    return np.random.default_rng(np.random.SeedSequence([int(backend.seed), *(int(k) for k in key)]))


def populations_from_dilation(kmap: KrausMap, ensemble: VectorEnsemble, backend=STATEVECTOR, key=()):
    """System populations ``rho_k = sum_j w_j sum_i |(U_{M_i} v_j)[k]|^2``.

    Every ``(i, j)`` term is a separate two-qubit circuit: prepare ``v_j`` from
    ``|00>`` and apply the synthesized dilation of ``M_i``.  With the shots
    backend each circuit is sampled with its own generator seeded from
    ``(backend.seed, *key, i, j)``.
    """
    n = ensemble.system_dim
    if kmap.dim != n:
        raise DimensionMismatch("Kraus map and ensemble dimensions disagree")
    if n != 2:
        raise DimensionMismatch("the circuit path supports a two-level system only")
    rho = np.zeros(n)
    for i, U in enumerate(dilate_channel(kmap)):
        synth = SYNTHESIS_CACHE.get(U)
        for j, (w, v) in enumerate(zip(ensemble.weights, ensemble.vectors)):
            state = simulate(prep_and_apply(U, v, synth))
            if backend.kind == "statevector":
                rho += w * np.abs(state[:n]) ** 2
            else:
                counts = sample_state(state, backend.shots, _task_rng(backend, (*key, i, j)))
                rho += w * np.array([counts.get(k, 0) for k in range(n)]) / backend.shots
    return rho


def populations_matrix_path(kmap: KrausMap, ensemble: VectorEnsemble):
    """Same quantity as :func:`populations_from_dilation` via dense products, any ``n``."""
    n = ensemble.system_dim
    rho = np.zeros(n)
    for U in dilate_channel(kmap):
        for w, v in zip(ensemble.weights, ensemble.vectors):
            rho += w * np.abs((U.matrix @ v)[:n]) ** 2
    return rho


def evaluate_family(family: TrajectoryFamily, times, ensemble: VectorEnsemble, backend=STATEVECTOR, threads=1):
    """Trajectory populations, shape ``(n_times, n_trajectories, n)``."""
    times = np.asarray(times, dtype=float)
    tasks = [(a, b, g) for a, t in enumerate(times) for b, g in enumerate(family.gamma_ts(t))]
    kraus = family.base_channel.kraus

    def run(task):
        a, b, g = task
        return populations_from_dilation(kraus(g), ensemble, backend, key=(a, b))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]
    return np.asarray(results).reshape(times.size, len(family), ensemble.system_dim)


def combine(P, schedule: WeightSchedule, times=None, source=None) -> PopulationSeries:
    """Weighted sum over trajectories of a populations array from :func:`evaluate_family`."""
    P = np.asarray(P, dtype=float)
    times = schedule.times if times is None else np.asarray(times, dtype=float)
    if P.shape[0] != times.size or schedule.times.size != times.size or not np.allclose(schedule.times, times):
        raise WeightGridMismatch("weight schedule times do not match the evaluation grid")
    if schedule.weights.shape[1] != P.shape[1]:
        raise WeightGridMismatch("weight schedule and family sizes differ")
    rho = np.einsum("ti,tik->tk", schedule.weights, P)
    return PopulationSeries(times, rho[:, 0], rho[:, 1], source or Source.statevector())


def elt_evolve(family, schedule, ensemble, backend=STATEVECTOR, threads=1) -> PopulationSeries:
    """Ensemble populations on the schedule's grid, one circuit per (time, trajectory, Kraus op, vector)."""
    if schedule.weights.shape[1] != len(family):
        raise WeightGridMismatch("weight schedule and family sizes differ")
    P = evaluate_family(family, schedule.times, ensemble, backend, threads)
    return combine(P, schedule, source=backend.source)
