"""Representation cost of univariate functions in infinite-width 2-layer ReLU nets.

The cost of a function f is max(total variation of f', |f'(-inf) + f'(inf)|).
This module computes that closed form, constructs an optimal representing
measure over threshold-parametrized ReLUs [w(x-b)]_+ with w in {-1, +1}, and
converts measures back to piecewise-linear functions and finite networks.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from . import pwl
from .net2 import TwoLayerNet
from .pwl import PwlFunction

# masses below this (relative) are treated as exact zeros when assembling atoms
_MASS_TOL = 1e-15


class LagrangeCase(enum.Enum):
    """Which multiplier branch is active in the optimal-measure construction."""

    ZERO = "zero"
    NEGATIVE = "negative"
    POSITIVE = "positive"


@dataclass(frozen=True)
class CostReport:
    tv: float
    end_sum: float
    cost: float
    lagrange_case: LagrangeCase
    upper_bound: float

    def to_dict(self) -> dict:
        return {"tv": self.tv, "end_sum": self.end_sum, "cost": self.cost,
                "lagrange_case": self.lagrange_case.value,
                "upper_bound": self.upper_bound}


@dataclass(frozen=True)
class ThresholdMeasure1D:
    """Discrete signed measure over {-1,+1} x R in the threshold parametrization.

    An atom (w, b, mass) contributes mass * [w(x-b)]_+ to the induced
    function; c is the output offset.
    """

    atoms: tuple[tuple[int, float, float], ...]
    c: float = 0.0

    def __post_init__(self):
        atoms = tuple((int(w), float(b), float(m)) for w, b, m in self.atoms)
        if any(w not in (-1, 1) for w, _, _ in atoms):
            raise ValueError("atom signs must be -1 or +1")
        if any(m == 0.0 for _, _, m in atoms):
            raise ValueError("atom masses must be nonzero")
        keys = [(b, w) for w, b, _ in atoms]
        if len(set(keys)) != len(keys):
            raise ValueError("at most one atom per (w, b) pair")
        atoms = tuple(sorted(atoms, key=lambda a: (a[1], a[0])))
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "c", float(self.c))

    def to_dict(self) -> dict:
        return {"atoms": [{"w": w, "b": b, "mass": m} for w, b, m in self.atoms],
                "c": self.c}

    @classmethod
    def from_dict(cls, d: dict) -> "ThresholdMeasure1D":
        return cls(tuple((a["w"], a["b"], a["mass"]) for a in d["atoms"]),
                   d.get("c", 0.0))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "ThresholdMeasure1D":
        return cls.from_dict(json.loads(s))


def measure_norm(alpha: ThresholdMeasure1D) -> float:
    """Total variation norm: sum of absolute atom masses."""
    return float(sum(abs(m) for _, _, m in alpha.atoms))


def measure_eval(alpha: ThresholdMeasure1D, x):
    """Induced function h(x) = sum mass * [w(x-b)]_+ + c."""
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    vals = np.full(xs.shape, alpha.c)
    for w, b, m in alpha.atoms:
        vals += m * np.maximum(w * (xs - b), 0.0)
    return float(vals[0]) if scalar else vals


def representation_cost(f: PwlFunction) -> CostReport:
    """Closed-form cost max(tv, |end sum|) with the active multiplier case."""
    tv = pwl.tv_fprime(f)
    s = pwl.end_slope_sum(f)
    if s > tv:
        case = LagrangeCase.NEGATIVE
    elif s < -tv:
        case = LagrangeCase.POSITIVE
    else:
        case = LagrangeCase.ZERO
    upper = tv + 2.0 * min(abs(sl) for sl in f.slopes)
    return CostReport(tv, s, max(tv, abs(s)), case, upper)


def _assemble(locs, plus, end_sum, tv, anchor_x, anchor_y) -> ThresholdMeasure1D:
    """Build the minimum-norm measure with given alpha_plus atoms.

    ``plus`` holds the alpha_plus mass (the second-derivative atom) at each
    location; alpha_minus is chosen per the multiplier case so that it sums
    to ``end_sum``.  The offset c pins the induced function at the anchor.
    """
    locs = np.asarray(locs, dtype=float)
    plus = np.asarray(plus, dtype=float)
    s = float(end_sum)
    m = locs.size
    if m == 0:
        if s == 0.0:
            minus = np.array([])
        else:
            locs = np.array([0.0])
            plus = np.array([0.0])
            minus = np.array([s])
    elif abs(s) <= tv:
        minus = (s / tv) * np.abs(plus) if tv > 0.0 else np.zeros(m)
    elif s > tv:
        minus = np.abs(plus) + (s - tv) / m
    else:
        minus = -np.abs(plus) + (s + tv) / m
    scale = 1.0 + tv + abs(s)
    atoms = []
    for b, p, q in zip(locs, plus, minus):
        for w, mass in ((1, 0.5 * (p + q)), (-1, 0.5 * (p - q))):
            if abs(mass) > _MASS_TOL * scale:
                atoms.append((w, float(b), float(mass)))
    partial = ThresholdMeasure1D(tuple(atoms), 0.0)
    c = anchor_y - measure_eval(partial, anchor_x)
    return ThresholdMeasure1D(partial.atoms, c)


def optimal_alpha(f: PwlFunction) -> ThresholdMeasure1D:
    """A measure representing f whose norm attains representation_cost(f).cost."""
    atoms = pwl.second_derivative_measure(f)
    return _assemble(atoms.locations, atoms.masses, pwl.end_slope_sum(f),
                     pwl.tv_fprime(f), f.anchor[0], f.anchor[1])


def measure_to_pwl(alpha: ThresholdMeasure1D) -> PwlFunction:
    """Exact piecewise-linear function induced by a discrete measure."""
    left_slope = -sum(m for w, _, m in alpha.atoms if w == -1)
    jumps = [(b, m) for _, b, m in alpha.atoms]
    anchor = (0.0, measure_eval(alpha, 0.0))
    return pwl.from_jumps(left_slope, jumps, anchor)


def measure_to_net(alpha: ThresholdMeasure1D) -> TwoLayerNet:
    """One balanced unit per atom; C(theta) equals the measure norm exactly."""
    w1, b1, w2 = [], [], []
    for w, b, m in alpha.atoms:
        r = np.sqrt(abs(m))
        w1.append(w * r)
        b1.append(-w * r * b)
        w2.append(np.sign(m) * r)
    return TwoLayerNet(w1, b1, w2, alpha.c)


def discretize_smooth(fpp, support, n_atoms: int, end_slope_left: float,
                      anchor) -> ThresholdMeasure1D:
    """Midpoint-quadrature measure for a smooth second derivative.

    ``fpp`` is continuous on ``support = (a, b)`` and zero outside; the
    returned measure has atoms of mass fpp(b_i) * db at the grid midpoints,
    realizes the prescribed left end slope, and its norm converges to
    max(int |f''|, |2*end_slope_left + int f''|) as n_atoms grows.
    """
    a, b = float(support[0]), float(support[1])
    if a >= b:
        raise ValueError(f"invalid support [{a}, {b}]")
    if n_atoms < 2:
        raise ValueError("n_atoms must be at least 2")
    db = (b - a) / n_atoms
    locs = a + (np.arange(n_atoms) + 0.5) * db
    masses = np.array([fpp(x) for x in locs], dtype=float) * db
    keep = masses != 0.0
    locs, masses = locs[keep], masses[keep]
    end_sum = 2.0 * end_slope_left + masses.sum()
    tv = float(np.abs(masses).sum())
    return _assemble(locs, masses, end_sum, tv, anchor[0], anchor[1])
