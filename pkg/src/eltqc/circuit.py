"""Gate-level circuits, exact statevector simulation and seeded shot sampling.

Basis convention: the computational basis index of an ``n``-qubit state is
``sum_k b_k * 2**k`` where ``b_k`` is the bit of qubit ``k``.  For two qubits,
index 1 means q0 excited and q1 in its ground state.  The same convention is
used inside multi-qubit gate matrices: the first listed qubit is the least
significant bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionMismatch, NonUnitGate, TooWide
from .linalg import as_vector, is_unitary, matrix_from_literal, matrix_to_literal

_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
# control = qubit listed first = least significant bit
_CNOT = np.array(
    [[1, 0, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0],
     [0, 1, 0, 0]],
    dtype=np.complex128,
)

GATE_NAMES = ("X", "Z", "H", "RY", "RZ", "CNOT", "U")


def ry(theta) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rz(theta) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple
    params: tuple = ()
    unitary: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.name not in GATE_NAMES:
            raise ValueError(f"unknown gate {self.name!r}")
        q = tuple(int(x) for x in self.qubits)
        if len(set(q)) != len(q):
            raise ValueError(f"gate {self.name} repeats a qubit: {q}")
        arity = {"CNOT": 2}.get(self.name, 1)
        if self.name == "U":
            if self.unitary is None:
                raise ValueError("gate U needs a matrix")
            U = np.asarray(self.unitary, dtype=np.complex128)
            if U.shape != (2 ** len(q), 2 ** len(q)):
                raise DimensionMismatch(f"U matrix {U.shape} does not fit {len(q)} qubits")
            if not is_unitary(U, 1e-10):
                raise NonUnitGate("gate U matrix is not unitary within 1e-10")
            object.__setattr__(self, "unitary", U)
        elif len(q) != arity:
            raise ValueError(f"gate {self.name} acts on {arity} qubit(s), got {q}")
        if self.name in ("RY", "RZ"):
            if len(self.params) != 1 or not np.isfinite(self.params[0]):
                raise ValueError(f"{self.name} needs one finite angle")
            object.__setattr__(self, "params", (float(self.params[0]),))
        object.__setattr__(self, "qubits", q)

    def matrix(self) -> np.ndarray:
        if self.name == "X":
            return _X
        if self.name == "Z":
            return _Z
        if self.name == "H":
            return _H
        if self.name == "RY":
            return ry(self.params[0])
        if self.name == "RZ":
            return rz(self.params[0])
        if self.name == "CNOT":
            return _CNOT
        return self.unitary

    def to_json(self) -> dict:
        out = {"name": self.name, "qubits": list(self.qubits), "params": list(self.params)}
        if self.name == "U":
            out["matrix"] = matrix_to_literal(self.unitary)
        return out

    @classmethod
    def from_json(cls, obj) -> "Gate":
        U = matrix_from_literal(obj["matrix"]) if obj.get("matrix") is not None else None
        return cls(obj["name"], tuple(obj["qubits"]), tuple(obj.get("params", ())), U)


@dataclass
class Circuit:
    width: int
    gates: list = field(default_factory=list)

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("circuit width must be >= 1")
        for g in self.gates:
            self._check(g)

    def _check(self, gate):
        if any(q < 0 or q >= self.width for q in gate.qubits):
            raise ValueError(f"gate {gate.name} on {gate.qubits} outside width {self.width}")

    def append(self, gate: Gate) -> "Circuit":
        self._check(gate)
        self.gates.append(gate)
        return self

    def extend(self, gates) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def cnot_count(self) -> int:
        return sum(g.name == "CNOT" for g in self.gates)

    def to_json(self) -> dict:
        return {"width": self.width, "gates": [g.to_json() for g in self.gates]}

    @classmethod
    def from_json(cls, obj) -> "Circuit":
        return cls(int(obj["width"]), [Gate.from_json(g) for g in obj["gates"]])


def _apply(state, gate_matrix, qubits, width):
    k = len(qubits)
    G = gate_matrix.reshape((2,) * (2 * k))
    # state axis for qubit q is width-1-q; gate axes run most-significant first
    axes = [width - 1 - q for q in reversed(qubits)]
    out = np.tensordot(G, state, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def zero_state(width) -> np.ndarray:
    v = np.zeros(2 ** width, dtype=np.complex128)
    v[0] = 1
    return v


def simulate(c: Circuit, input=None) -> np.ndarray:
    """Exact output statevector of ``c`` acting on ``input`` (default ``|0...0>``)."""
    v = zero_state(c.width) if input is None else as_vector(input, "input state")
    if v.size != 2 ** c.width:
        raise DimensionMismatch(f"input has dim {v.size}, circuit needs {2 ** c.width}")
    if abs(np.linalg.norm(v) - 1) > 1e-10:
        raise ValueError("input state must have unit norm")
    state = v.reshape((2,) * c.width)
    for g in c.gates:
        state = _apply(state, g.matrix(), g.qubits, c.width)
    return state.reshape(-1)


def circuit_unitary(c: Circuit) -> np.ndarray:
    if c.width > 4:
        raise TooWide(f"circuit_unitary supports width <= 4, got {c.width}")
    d = 2 ** c.width
    state = np.eye(d, dtype=np.complex128).reshape((2,) * c.width + (d,))
    for g in c.gates:
        # trailing column axis is untouched by _apply's index arithmetic
        state = _apply(state, g.matrix(), g.qubits, c.width)
    return state.reshape(d, d)


@dataclass(frozen=True)
class ShotResult:
    counts: dict
    shots: int
    seed: object
    width: int = 2

    def frequency(self, index) -> float:
        return self.counts.get(index, 0) / self.shots

    def to_json(self) -> dict:
        return {
            "shots": self.shots,
            "seed": self.seed,
            "counts": {format(k, f"0{self.width}b"): int(v) for k, v in sorted(self.counts.items())},
        }


def sample_state(state, shots, rng) -> dict:
    p = np.abs(state) ** 2
    p = p / p.sum()
    draws = rng.multinomial(int(shots), p)
    return {int(k): int(n) for k, n in enumerate(draws) if n}


def sample(c: Circuit, input=None, shots=1024, seed=None) -> ShotResult:
    """Draw ``shots`` computational-basis outcomes from the exact output state.

    ``seed`` may be an int, a sequence of ints, or a ``numpy.random.SeedSequence``.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    state = simulate(c, input)
    rng = np.random.default_rng(seed)
    return ShotResult(sample_state(state, shots, rng), int(shots), seed, c.width)
