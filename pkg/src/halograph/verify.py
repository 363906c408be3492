"""Independent checks of state-creation graphs and gate graphs.

Gate graphs carry input-role vertices (incoming photons).  Fixing the mode of
every input and keeping only matching edges gives an ordinary graph whose
post-selected state is the gate's output for that basis input.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from halograph.errors import ShapeMismatch, UnassignedInput
from halograph.graph import INPUT, Graph, Ket, MatchingTable
from halograph.optimize import Objective, check_shape
from halograph.states import TargetSpec, ket_to_string


@dataclass(frozen=True)
class Violation:
    input: tuple[int, ...] | None
    observed: Ket | None
    amplitude: complex
    expected: Ket | None

    def to_dict(self) -> dict[str, Any]:
        amp = complex(self.amplitude)
        return {
            "input": list(self.input) if self.input is not None else None,
            "observed": ket_to_string(self.observed) if self.observed is not None else None,
            "amplitude": amp.real if amp.imag == 0 else [amp.real, amp.imag],
            "expected": ket_to_string(self.expected) if self.expected is not None else None,
        }


@dataclass(frozen=True)
class VerificationReport:
    """PASS/FAIL plus the evidence behind it.

    ``amplitudes`` is keyed by basis input for gate reports and holds the
    single entry ``()`` for state reports.
    """

    status: str
    fidelity: float | None = None
    residual: float = 0.0
    zero_state: bool = False
    violations: tuple[Violation, ...] = ()
    amplitudes: dict[tuple[int, ...], complex] = field(default_factory=dict)
    herald: Ket | None = None
    uniformity: float | None = None
    projections: int = 0

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    def to_dict(self) -> dict[str, Any]:
        def num(a):
            a = complex(a)
            return a.real if a.imag == 0 else [a.real, a.imag]

        return {
            "status": self.status,
            "fidelity": self.fidelity,
            "residual": self.residual,
            "zero_state": self.zero_state,
            "herald": list(self.herald) if self.herald is not None else None,
            "uniformity": self.uniformity,
            "projections": self.projections,
            "amplitudes": [{"input": list(k), "amplitude": num(a)}
                           for k, a in self.amplitudes.items()],
            "violations": [v.to_dict() for v in self.violations],
        }


def verify_state(g: Graph, target: TargetSpec, tol: float = 1e-9) -> VerificationReport:
    """PASS iff ``1 - fidelity(g, target) <= tol``.

    On failure the violations list every ket whose normalized amplitude is
    off the best-matching multiple of the target, largest first.
    """
    check_shape(g, target)
    obj = Objective.for_graph(g, target)
    amps = obj.table.amplitudes(g.weights)
    norm = math.sqrt(float(amps @ amps))
    if norm <= 1e-12:
        return VerificationReport("FAIL", fidelity=0.0, residual=1.0, zero_state=True,
                                  violations=(Violation(None, None, 0.0, None),),
                                  projections=1)
    f = obj.fidelity(g.weights)
    residual = max(0.0, 1.0 - f)
    psi = amps / norm
    if residual <= tol:
        return VerificationReport("PASS", fidelity=f, residual=residual,
                                  amplitudes={(): complex(np.vdot(obj.tvec, psi))},
                                  projections=1)
    overlap = np.vdot(obj.tvec, psi)
    wanted = target.as_dict()
    deviations = []
    for ket, a, t in zip(obj.table.kets, psi, obj.tvec):
        dev = a - overlap * t
        if abs(dev) > 1e-12:
            deviations.append(Violation(None, ket, complex(a), ket if ket in wanted else None))
    covered = set(obj.table.kets)
    for ket, t in wanted.items():
        if ket not in covered:
            deviations.append(Violation(None, None, 0.0, ket))
    deviations.sort(key=lambda v: -abs(v.amplitude))
    return VerificationReport("FAIL", fidelity=f, residual=residual,
                              violations=tuple(deviations),
                              amplitudes={(): complex(overlap)}, projections=1)


def project_inputs(g: Graph, assignment: Mapping[int, int]) -> Graph:
    """Keep only edges whose input-side endpoint uses the assigned mode.

    Edges between detectors are untouched; the input vertices stay in the
    graph and must still be covered by every perfect matching.
    """
    for v in g.inputs:
        if v not in assignment:
            raise UnassignedInput(f"input vertex {v} has no assigned mode")
        m = assignment[v]
        if not 0 <= m < g.dimensions[v]:
            raise UnassignedInput(f"mode {m} outside dimension {g.dimensions[v]} of input {v}")

    def keep(e) -> bool:
        for end, mode in ((e.u, e.mode_u), (e.v, e.mode_v)):
            if g.roles[end] == INPUT and assignment[end] != mode:
                return False
        return True

    return g.with_edges(e for e in g.edges if keep(e))


@dataclass(frozen=True)
class GateSpec:
    """CNOT(d1, d2): |m, n> -> |m, (n + m) mod d2>."""

    d1: int
    d2: int
    logical_inputs: tuple[int, int] = (0, 1)
    logical_outputs: tuple[int, int] = (2, 3)
    ancilla_outputs: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "logical_inputs", tuple(self.logical_inputs))
        object.__setattr__(self, "logical_outputs", tuple(self.logical_outputs))
        object.__setattr__(self, "ancilla_outputs", tuple(self.ancilla_outputs))
        if self.d1 < 1 or self.d2 < 1:
            raise ShapeMismatch("gate dimensions must be positive")
        if set(self.logical_inputs) & (set(self.logical_outputs) | set(self.ancilla_outputs)):
            raise ShapeMismatch("gate outputs overlap the inputs")

    def rule(self, m: int, n: int) -> tuple[int, int]:
        return m, (n + m) % self.d2

    def basis(self) -> list[tuple[int, int]]:
        return [(m, n) for m in range(self.d1) for n in range(self.d2)]

    def to_dict(self) -> dict[str, Any]:
        return {"d1": self.d1, "d2": self.d2, "logical_inputs": list(self.logical_inputs),
                "logical_outputs": list(self.logical_outputs),
                "ancilla_outputs": list(self.ancilla_outputs)}

    @classmethod
    def for_graph(cls, g: Graph, d1: int, d2: int) -> GateSpec:
        """Standard layout: inputs 0, 1; outputs 2, 3; every later vertex an ancilla."""
        return cls(d1, d2, (0, 1), (2, 3), tuple(range(4, g.vertex_count)))


def verify_gate(g: Graph, spec: GateSpec, tol: float = 1e-9) -> VerificationReport:
    """Check the CNOT rule on every basis input.

    Each projected graph must produce ``c |m, (n+m) mod d2> |herald>`` with
    one constant ``c`` shared by all inputs (so superpositions are mapped
    coherently) and one herald pattern, read off the (0, 0) input.  Other
    terms must stay below ``tol`` relative to ``|c|``.
    """
    in1, in2 = spec.logical_inputs
    if sorted(g.inputs) != sorted(spec.logical_inputs):
        raise ShapeMismatch(f"graph inputs {g.inputs} differ from gate inputs {spec.logical_inputs}")
    if g.dimensions[in1] != spec.d1 or g.dimensions[in2] != spec.d2:
        raise ShapeMismatch("input dimensions differ from the gate dimensions")
    detectors = g.detectors
    pos = {v: i for i, v in enumerate(detectors)}
    out1, out2 = spec.logical_outputs
    for v in spec.logical_outputs:
        if v not in pos:
            raise ShapeMismatch(f"output {v} is not a detector")
    ancillas = list(spec.ancilla_outputs) or [v for v in detectors if v not in spec.logical_outputs]
    if g.dimensions[out1] < spec.d1 or g.dimensions[out2] < spec.d2:
        raise ShapeMismatch("output dimensions too small for the gate")

    states = {}
    for m, n in spec.basis():
        proj = project_inputs(g, {in1: m, in2: n})
        states[(m, n)] = MatchingTable(proj).state()

    def ancilla_part(ket: Ket) -> Ket:
        return tuple(ket[pos[v]] for v in ancillas)

    def expected_ket(m: int, n: int, herald: Ket) -> Ket:
        ket = [0] * len(detectors)
        o1, o2 = spec.rule(m, n)
        ket[pos[out1]], ket[pos[out2]] = o1, o2
        for v, h in zip(ancillas, herald):
            ket[pos[v]] = h
        return tuple(ket)

    herald = None
    first = states[(0, 0)]
    candidates = [k for k, _ in sorted(first.items(), key=lambda kv: -abs(kv[1]))
                  if k[pos[out1]] == 0 and k[pos[out2]] == 0]
    if candidates:
        herald = ancilla_part(candidates[0])
    violations = []
    amps = {}
    residual = 0.0
    if herald is None:
        violations.append(Violation((0, 0), None, 0.0, None))
    else:
        c0 = first[expected_ket(0, 0, herald)]
        for (m, n), state in states.items():
            want = expected_ket(m, n, herald)
            c = state[want]
            amps[(m, n)] = c
            if abs(c - c0) > tol * abs(c0):
                violations.append(Violation((m, n), want, c, want))
            for ket, a in state.items():
                if ket != want:
                    rel = abs(a) / abs(c0)
                    residual = max(residual, rel)
                    if rel > tol:
                        violations.append(Violation((m, n), ket, a, want))
    mags = [abs(a) for a in amps.values()]
    uniformity = (max(mags) / min(mags) - 1.0) if mags and min(mags) > 0 else None
    return VerificationReport("FAIL" if violations else "PASS", residual=residual,
                              violations=tuple(violations), amplitudes=amps,
                              herald=herald, uniformity=uniformity,
                              zero_state=all(s.is_zero for s in states.values()),
                              projections=len(states))


def gate_target(d1: int, d2: int, ancillas: int) -> TargetSpec:
    """Input-output correlation state used to discover a CNOT(d1, d2) graph.

    Particles are (in1, in2, out1, out2, ancillas...); every basis input
    appears once with its CNOT output and the ancillas in mode 0.
    """
    kets = tuple(((m, n, m, (n + m) % d2) + (0,) * ancillas, 1.0)
                 for m in range(d1) for n in range(d2))
    return TargetSpec(kets, (d1, d2, d1, d2) + (1,) * ancillas)
