"""Exact arithmetic on continuous piecewise-linear functions of one variable.

A function is stored as its sorted breakpoints, the slope on every segment
(including the two unbounded end segments) and a single anchor point fixing
the additive constant.  All operations are pure; values are immutable after
construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

# Two breakpoints closer than this (relative) are considered coincident.
BREAKPOINT_MERGE_TOL = 1e-12
# Slope jumps below 1e-12 * (1 + total variation) are dropped.
SLOPE_JUMP_TOL = 1e-12


@dataclass(frozen=True)
class PwlFunction:
    """Continuous piecewise-linear function on the real line.

    ``slopes[j]`` is the slope on the j-th segment: ``slopes[0]`` on
    ``(-inf, breakpoints[0])`` and ``slopes[-1]`` on ``(breakpoints[-1], inf)``.
    ``anchor = (x_ref, y_ref)`` pins the function value at one abscissa.
    """

    breakpoints: tuple[float, ...]
    slopes: tuple[float, ...]
    anchor: tuple[float, float]

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        sl = tuple(float(s) for s in self.slopes)
        anchor = (float(self.anchor[0]), float(self.anchor[1]))
        if len(sl) != len(bp) + 1:
            raise ValueError("need exactly one more slope than breakpoints")
        if any(b2 < b1 for b1, b2 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be sorted")
        if not all(np.isfinite(bp + sl + anchor)):
            raise ValueError("non-finite breakpoint, slope or anchor")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "slopes", sl)
        object.__setattr__(self, "anchor", anchor)

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "breakpoints": list(self.breakpoints),
            "slopes": list(self.slopes),
            "anchor": list(self.anchor),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PwlFunction":
        return cls(tuple(d["breakpoints"]), tuple(d["slopes"]),
                   (d["anchor"][0], d["anchor"][1]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "PwlFunction":
        return cls.from_dict(json.loads(s))


@dataclass(frozen=True)
class AtomList1D:
    """Purely atomic distribution: point masses at strictly increasing locations."""

    atoms: tuple[tuple[float, float], ...]  # (location, mass), masses nonzero

    def __post_init__(self):
        atoms = tuple((float(x), float(m)) for x, m in self.atoms)
        locs = [x for x, _ in atoms]
        if any(b <= a for a, b in zip(locs, locs[1:])):
            raise ValueError("atom locations must be strictly increasing")
        if any(m == 0.0 for _, m in atoms):
            raise ValueError("atom masses must be nonzero")
        object.__setattr__(self, "atoms", atoms)

    @property
    def locations(self) -> np.ndarray:
        return np.array([x for x, _ in self.atoms])

    @property
    def masses(self) -> np.ndarray:
        return np.array([m for _, m in self.atoms])

    def total_mass(self) -> float:
        return float(sum(m for _, m in self.atoms))

    def to_dict(self) -> dict:
        return {"atoms": [[x, m] for x, m in self.atoms]}

    @classmethod
    def from_dict(cls, d: dict) -> "AtomList1D":
        return cls(tuple((x, m) for x, m in d["atoms"]))


def _raw_values(f: PwlFunction, x: np.ndarray) -> np.ndarray:
    """Antiderivative of the slope profile, zero at the first breakpoint."""
    bp = np.asarray(f.breakpoints)
    sl = np.asarray(f.slopes)
    if bp.size == 0:
        return sl[0] * x
    # cumulative value at each breakpoint, relative to bp[0]
    cum = np.concatenate(([0.0], np.cumsum(sl[1:-1] * np.diff(bp))))
    seg = np.searchsorted(bp, x, side="right")
    left = np.clip(seg - 1, 0, bp.size - 1)
    base = np.where(seg == 0, 0.0, cum[left])
    ref = np.where(seg == 0, bp[0], bp[left])
    return base + sl[seg] * (x - ref)


def pwl_eval(f: PwlFunction, x):
    """Evaluate f at a scalar or array of points."""
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    xr, yr = f.anchor
    vals = _raw_values(f, xs) - _raw_values(f, np.array([xr]))[0] + yr
    return float(vals[0]) if scalar else vals


def second_derivative_measure(f: PwlFunction) -> AtomList1D:
    """Distributional second derivative: one atom per slope jump."""
    jumps = np.diff(f.slopes)
    atoms = tuple((b, float(j)) for b, j in zip(f.breakpoints, jumps) if j != 0.0)
    return AtomList1D(atoms)


def tv_fprime(f: PwlFunction) -> float:
    """Total variation of the derivative: sum of absolute slope jumps."""
    return float(np.abs(np.diff(f.slopes)).sum())


def end_slope_sum(f: PwlFunction) -> float:
    """Sum of the two limiting slopes."""
    return f.slopes[0] + f.slopes[-1]


def add_constant(f: PwlFunction, c: float) -> PwlFunction:
    return PwlFunction(f.breakpoints, f.slopes, (f.anchor[0], f.anchor[1] + c))


def scale(f: PwlFunction, c: float) -> PwlFunction:
    """Scale function values by c."""
    return PwlFunction(f.breakpoints, tuple(c * s for s in f.slopes),
                       (f.anchor[0], c * f.anchor[1]))


def translate(f: PwlFunction, dx: float) -> PwlFunction:
    """Shift the graph right by dx."""
    return PwlFunction(tuple(b + dx for b in f.breakpoints), f.slopes,
                       (f.anchor[0] + dx, f.anchor[1]))


def reflect(f: PwlFunction) -> PwlFunction:
    """Mirror the graph about the y axis: g(x) = f(-x)."""
    return PwlFunction(tuple(-b for b in reversed(f.breakpoints)),
                       tuple(-s for s in reversed(f.slopes)),
                       (-f.anchor[0], f.anchor[1]))


def from_jumps(left_slope: float, atoms, anchor) -> PwlFunction:
    """Build a PwlFunction from its leftmost slope and slope-jump atoms.

    ``atoms`` is an iterable of (location, jump) pairs, in any order;
    coincident locations have their jumps summed.
    """
    merged: dict[float, float] = {}
    for b, j in atoms:
        merged[b] = merged.get(b, 0.0) + j
    locs = sorted(merged)
    slopes = [float(left_slope)]
    for b in locs:
        slopes.append(slopes[-1] + merged[b])
    return canonicalize(PwlFunction(tuple(locs), tuple(slopes), anchor))


def canonicalize(f: PwlFunction) -> PwlFunction:
    """Merge near-coincident breakpoints and drop negligible slope jumps.

    Evaluation is preserved up to the dropped-jump tolerance; applying
    canonicalize twice gives the same object as applying it once.
    """
    bp = list(f.breakpoints)
    jumps = list(np.diff(f.slopes))
    # cluster breakpoints that coincide up to relative tolerance
    merged_bp: list[float] = []
    merged_j: list[float] = []
    for b, j in zip(bp, jumps):
        if merged_bp and b - merged_bp[-1] <= BREAKPOINT_MERGE_TOL * (1.0 + abs(b)):
            merged_j[-1] += j
        else:
            merged_bp.append(b)
            merged_j.append(j)
    tv = float(np.abs(merged_j).sum()) if merged_j else 0.0
    cut = SLOPE_JUMP_TOL * (1.0 + tv)
    kept = [(b, j) for b, j in zip(merged_bp, merged_j) if abs(j) >= cut]
    slopes = [f.slopes[0]]
    for _, j in kept:
        slopes.append(slopes[-1] + j)
    return PwlFunction(tuple(b for b, _ in kept), tuple(slopes), f.anchor)


def relu() -> PwlFunction:
    return PwlFunction((0.0,), (0.0, 1.0), (0.0, 0.0))


def absval() -> PwlFunction:
    return PwlFunction((0.0,), (-1.0, 1.0), (0.0, 0.0))


def linear(slope: float, intercept: float = 0.0) -> PwlFunction:
    return PwlFunction((), (float(slope),), (0.0, float(intercept)))
