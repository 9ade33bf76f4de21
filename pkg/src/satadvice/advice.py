"""Subset and label advice derived from a known optimal assignment.

Randomness is counter-based: index i always consumes the i-th draw of a
Philox stream keyed by (seed, stream tag), so advice for the same seed is
reproducible and nested across epsilon (S at a smaller epsilon is a subset
of S at a larger one).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

_SUBSET_STREAM = 0x5B
_LABEL_STREAM = 0x1A
_COIN_STREAM = 0xC0


def index_uniforms(seed: int, stream: int, n: int) -> np.ndarray:
    """Uniforms u[0..n-1]; u[i] depends only on (seed, stream, i)."""
    bitgen = np.random.Philox(key=np.array([seed, stream], dtype=np.uint64))
    return np.random.Generator(bitgen).random(n)


def _check_eps(epsilon: float):
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")


@dataclass(frozen=True)
class SubsetAdvice:
    num_vars: int
    epsilon: float
    seed: int
    revealed: dict[int, int] = field(default_factory=dict)

    def __len__(self):
        return len(self.revealed)

    def to_json(self) -> str:
        entries = [[i, b] for i, b in sorted(self.revealed.items())]
        return json.dumps({"model": "subset", "epsilon": self.epsilon, "seed": self.seed,
                           "num_vars": self.num_vars, "entries": entries})


@dataclass(frozen=True)
class LabelAdvice:
    epsilon: float
    seed: int
    labels: tuple[int, ...]

    @property
    def num_vars(self) -> int:
        return len(self.labels)

    def to_json(self) -> str:
        return json.dumps({"model": "label", "epsilon": self.epsilon, "seed": self.seed,
                           "entries": "".join(map(str, self.labels))})


def gen_subset_advice(x_star: Sequence[int], epsilon: float, seed: int) -> SubsetAdvice:
    _check_eps(epsilon)
    u = index_uniforms(seed, _SUBSET_STREAM, len(x_star))
    revealed = {int(i) + 1: int(x_star[i]) for i in np.flatnonzero(u < epsilon)}
    return SubsetAdvice(len(x_star), float(epsilon), seed, revealed)


def gen_label_advice(x_star: Sequence[int], epsilon: float, seed: int) -> LabelAdvice:
    _check_eps(epsilon)
    x = np.asarray(x_star, dtype=np.int64)
    u = index_uniforms(seed, _LABEL_STREAM, len(x))
    flip = u >= (1.0 + epsilon) / 2.0
    return LabelAdvice(float(epsilon), seed, tuple(int(b) for b in np.where(flip, 1 - x, x)))


def subset_to_label(sub: SubsetAdvice, seed: int) -> LabelAdvice:
    """Simulate label advice: keep revealed bits, fair coins elsewhere."""
    coins = index_uniforms(seed, _COIN_STREAM, sub.num_vars) < 0.5
    labels = [sub.revealed.get(i + 1, int(coins[i])) for i in range(sub.num_vars)]
    return LabelAdvice(sub.epsilon, seed, tuple(labels))


def parse_advice(text: str) -> SubsetAdvice | LabelAdvice:
    data = json.loads(text)
    model = data.get("model")
    eps, seed = float(data["epsilon"]), int(data["seed"])
    if model == "subset":
        revealed = {int(i): int(b) for i, b in data["entries"]}
        n = int(data.get("num_vars", max(revealed, default=0)))
        if any(not 1 <= i <= n for i in revealed) or any(b not in (0, 1) for b in revealed.values()):
            raise ValueError("subset advice entries out of range")
        return SubsetAdvice(n, eps, seed, revealed)
    if model == "label":
        entries = data["entries"]
        if set(entries) - {"0", "1"}:
            raise ValueError("label advice entries must be a 0/1 string")
        return LabelAdvice(eps, seed, tuple(int(c) for c in entries))
    raise ValueError(f"unknown advice model {model!r}")


def read_advice(path) -> SubsetAdvice | LabelAdvice:
    with open(path) as fh:
        return parse_advice(fh.read())


def write_advice(advice: SubsetAdvice | LabelAdvice, path) -> None:
    with open(path, "w") as fh:
        fh.write(advice.to_json() + "\n")
