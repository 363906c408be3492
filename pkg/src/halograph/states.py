"""Target states: GHZ families, ancilla padding, AME(4,3) and parsed ket lists."""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from halograph.errors import DuplicateKet, InvalidParam, ParseError, ZeroState
from halograph.graph import AMPLITUDE_EPSILON, Ket, StateVector


@dataclass(frozen=True)
class TargetSpec:
    """A normalized target state.

    ``kets`` pairs each ket (a tuple of modes, one per particle) with its
    amplitude; ``dimensions`` gives the mode count of every particle.
    Construction normalizes the amplitudes and rejects malformed kets.
    """

    kets: tuple[tuple[Ket, complex], ...]
    dimensions: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dimensions)
        seen = set()
        cleaned = []
        for ket, amp in self.kets:
            ket = tuple(int(m) for m in ket)
            if len(ket) != len(dims):
                raise ParseError(f"ket {ket} has {len(ket)} particles, expected {len(dims)}")
            if any(not 0 <= m < d for m, d in zip(ket, dims)):
                raise ParseError(f"ket {ket} exceeds dimensions {dims}")
            if ket in seen:
                raise DuplicateKet(f"ket {ket} listed twice")
            seen.add(ket)
            cleaned.append((ket, complex(amp)))
        norm = math.sqrt(sum(abs(a) ** 2 for _, a in cleaned))
        if norm <= AMPLITUDE_EPSILON:
            raise ZeroState("target has zero norm")
        object.__setattr__(self, "kets", tuple((k, a / norm) for k, a in cleaned))
        object.__setattr__(self, "dimensions", dims)

    @property
    def particle_count(self) -> int:
        return len(self.dimensions)

    def as_dict(self) -> dict[Ket, complex]:
        return dict(self.kets)

    def as_state(self) -> StateVector:
        return StateVector(self.as_dict(), self.dimensions, unnormalized=False)

    def __len__(self) -> int:
        return len(self.kets)

    def to_dict(self) -> dict[str, Any]:
        def amp(a: complex):
            return a.real if a.imag == 0 else [a.real, a.imag]

        return {
            "kets": [ket_to_string(k) for k, _ in self.kets],
            "amplitudes": [amp(a) for _, a in self.kets],
            "dimensions": list(self.dimensions),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> TargetSpec:
        try:
            kets = data["kets"]
            raw = data.get("amplitudes") or [1.0] * len(kets)
            amps = [complex(a[0], a[1]) if isinstance(a, (list, tuple)) else complex(a)
                    for a in raw]
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ParseError(f"malformed target: {exc}") from exc
        return parse_target(kets, amps, data.get("dimensions"))


def ket_to_string(ket: Ket) -> str:
    """Digits for modes below 10; wider modes go in parentheses, e.g. ``0(12)1``."""
    return "".join(str(m) if m < 10 else f"({m})" for m in ket)


def ket_from_string(text: str) -> Ket:
    modes = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            j = text.find(")", i)
            if j < 0:
                raise ParseError(f"unclosed mode group in {text!r}")
            token, i = text[i + 1:j], j + 1
        else:
            token, i = ch, i + 1
        if not token.isdigit():
            raise ParseError(f"invalid mode {token!r} in ket {text!r}")
        modes.append(int(token))
    return tuple(modes)


def ghz(n: int, d: int) -> TargetSpec:
    """``n``-particle, ``d``-dimensional GHZ state, sum of |i...i> for i < d."""
    if n < 2 or d < 2:
        raise InvalidParam(f"ghz needs n >= 2 and d >= 2, got n={n}, d={d}")
    return TargetSpec(tuple(((i,) * n, 1.0) for i in range(d)), (d,) * n)


def ghz_with_ancillas(n: int, d: int, a: int) -> TargetSpec:
    """GHZ state times ``a`` ancillas fixed in mode 0 (dimension 1 each)."""
    if a < 0:
        raise InvalidParam("ancilla count must be non-negative")
    return with_ancillas(ghz(n, d), a)


def with_ancillas(target: TargetSpec, a: int) -> TargetSpec:
    if a < 0:
        raise InvalidParam("ancilla count must be non-negative")
    return TargetSpec(tuple((k + (0,) * a, amp) for k, amp in target.kets),
                      target.dimensions + (1,) * a)


def bell(d: int = 2) -> TargetSpec:
    """Two-particle maximally entangled state in ``d`` dimensions."""
    return ghz(2, d)


def ame43() -> TargetSpec:
    """Absolutely maximally entangled state of four qutrits.

    Sum over i, j of |i, j, i+j, i+2j> (mod 3), amplitude 1/3 each.
    """
    kets = tuple(((i, j, (i + j) % 3, (i + 2 * j) % 3), 1.0)
                 for i in range(3) for j in range(3))
    return TargetSpec(kets, (3, 3, 3, 3))


def parse_target(kets: Sequence[str | Sequence[int]], amplitudes: Sequence[complex],
                 dims: Sequence[int] | None = None) -> TargetSpec:
    """Build a normalized target from ket strings and amplitudes.

    When ``dims`` is omitted each particle gets one more mode than the
    largest digit it carries.
    """
    if len(kets) != len(amplitudes):
        raise ParseError(f"{len(kets)} kets but {len(amplitudes)} amplitudes")
    if not kets:
        raise ParseError("target needs at least one ket")
    parsed = [ket_from_string(k) if isinstance(k, str) else tuple(int(m) for m in k)
              for k in kets]
    width = len(parsed[0])
    if any(len(k) != width for k in parsed):
        raise ParseError("kets have unequal lengths")
    if dims is None:
        dims = [max(k[i] for k in parsed) + 1 for i in range(width)]
    return TargetSpec(tuple(zip(parsed, amplitudes)), tuple(dims))


def reduced_density_matrix(target: TargetSpec, keep: Sequence[int]) -> np.ndarray:
    """Partial trace of the pure target onto the particles listed in ``keep``."""
    dims = target.dimensions
    psi = np.zeros(dims, dtype=complex)
    for ket, amp in target.kets:
        psi[ket] = amp
    keep = list(keep)
    rest = [i for i in range(len(dims)) if i not in keep]
    mat = np.transpose(psi, keep + rest).reshape(
        math.prod(dims[i] for i in keep), math.prod(dims[i] for i in rest))
    return mat @ mat.conj().T
