"""Depth-L parallel ReLU architectures and the bridge-penalty equivalence.

A parallel net sums k independent bias-free ReLU chains, each scaled by a
top coefficient.  By positive homogeneity each chain factors into unit-norm
matrices times a single coefficient alpha_i, the averaged squared-weight
cost of the best realization of alpha is sum |alpha_i|^(2/L), and any
coefficient vector with more than N active entries admits a perturbation
that preserves all N predictions without increasing that penalty.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

_SVD_TOL = 1e-10
_UNIT_TOL = 1e-12


def _as_matrices(mats):
    return tuple(np.atleast_2d(np.asarray(m, dtype=float)) for m in mats)


def _check_chain(mats, d, m):
    """Shapes m x d, then m x m repeated, then 1 x m (single 1 x d when L=2)."""
    if len(mats) == 1:
        if mats[0].shape[0] != 1:
            raise ValueError("single-matrix subnet must have one output row")
        return
    if mats[0].shape != (m, d):
        raise ValueError(f"first matrix must be {m}x{d}")
    for w in mats[1:-1]:
        if w.shape != (m, m):
            raise ValueError(f"middle matrices must be {m}x{m}")
    if mats[-1].shape != (1, m):
        raise ValueError(f"last matrix must be 1x{m}")


@dataclass(frozen=True)
class ParallelDeepNet:
    """k parallel chains of L-1 bias-free matrices plus top coefficients."""

    subnets: tuple[tuple[np.ndarray, ...], ...]
    top: np.ndarray

    def __post_init__(self):
        subnets = tuple(_as_matrices(s) for s in self.subnets)
        top = np.asarray(self.top, dtype=float)
        if top.ndim != 1 or top.size != len(subnets):
            raise ValueError("need one top coefficient per subnet")
        if subnets:
            depth = len(subnets[0])
            d = subnets[0][0].shape[1]
            m = subnets[0][0].shape[0]
            for s in subnets:
                if len(s) != depth:
                    raise ValueError("all subnets must have the same depth")
                _check_chain(s, d, m)
                if s[0].shape != subnets[0][0].shape:
                    raise ValueError("inconsistent first-layer shape")
        for s in subnets:
            for w in s:
                if not np.all(np.isfinite(w)):
                    raise ValueError("non-finite weight matrix")
                w.setflags(write=False)
        if not np.all(np.isfinite(top)):
            raise ValueError("non-finite top coefficient")
        top.setflags(write=False)
        object.__setattr__(self, "subnets", subnets)
        object.__setattr__(self, "top", top)

    @property
    def k(self) -> int:
        return len(self.subnets)

    @property
    def depth(self) -> int:
        """Number of weight layers L, counting the top coefficients."""
        return len(self.subnets[0]) + 1 if self.subnets else 2

    @property
    def input_dim(self) -> int:
        return self.subnets[0][0].shape[1] if self.subnets else 0

    def to_dict(self) -> dict:
        return {"subnets": [[w.tolist() for w in s] for s in self.subnets],
                "top": self.top.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "ParallelDeepNet":
        return cls(tuple(tuple(w for w in s) for s in d["subnets"]), d["top"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "ParallelDeepNet":
        return cls.from_dict(json.loads(s))


@dataclass(frozen=True)
class SphereFactoredNet:
    """Parallel net with every matrix on the Frobenius unit sphere."""

    subnets: tuple[tuple[np.ndarray, ...], ...]
    alpha: np.ndarray

    def __post_init__(self):
        base = ParallelDeepNet(self.subnets, self.alpha)
        for s in base.subnets:
            for w in s:
                if abs(np.linalg.norm(w) - 1.0) > _UNIT_TOL:
                    raise ValueError("subnet matrices must have unit Frobenius norm")
        object.__setattr__(self, "subnets", base.subnets)
        object.__setattr__(self, "alpha", base.top)

    @property
    def depth(self) -> int:
        return len(self.subnets[0]) + 1 if self.subnets else 2


def _chain_eval(mats, x) -> float:
    z = np.asarray(x, dtype=float)
    for w in mats:
        z = np.maximum(w @ z, 0.0)
    return float(z[0])


def parallel_eval(net, x) -> float:
    """Sum over subnets of the top coefficient times the ReLU chain value."""
    top = net.top if isinstance(net, ParallelDeepNet) else net.alpha
    x = np.asarray(x, dtype=float)
    if net.subnets and x.shape != (net.subnets[0][0].shape[1],):
        raise ValueError("input dimension mismatch")
    return float(sum(t * _chain_eval(s, x) for t, s in zip(top, net.subnets)))


def cost_CL(net: ParallelDeepNet) -> float:
    """Squared weight norm averaged over the L layers."""
    total = float(net.top @ net.top)
    total += sum(float(np.sum(w * w)) for s in net.subnets for w in s)
    return total / net.depth


def align_to_sphere(net: ParallelDeepNet) -> SphereFactoredNet:
    """Factor each chain into unit-norm matrices times one coefficient.

    Homogeneity of the ReLU chain keeps the function unchanged; a subnet
    containing a zero matrix computes zero and gets alpha = 0.
    """
    subnets, alpha = [], []
    for t, s in zip(net.top, net.subnets):
        norms = [np.linalg.norm(w) for w in s]
        if min(norms) == 0.0:
            unit = []
            for w in s:
                e = np.zeros_like(w)
                e.flat[0] = 1.0
                unit.append(e)
            subnets.append(tuple(unit))
            alpha.append(0.0)
        else:
            subnets.append(tuple(w / n for w, n in zip(s, norms)))
            alpha.append(t * float(np.prod(norms)))
    return SphereFactoredNet(tuple(subnets), alpha)


def from_alpha(s: SphereFactoredNet) -> ParallelDeepNet:
    """Spread |alpha_i|^(1/L) over every layer of subnet i.

    The resulting net computes the same function and its cost_CL equals
    bridge_penalty(alpha, L) exactly.
    """
    L = s.depth
    subnets, top = [], []
    for a, mats in zip(s.alpha, s.subnets):
        r = abs(a) ** (1.0 / L)
        subnets.append(tuple(r * w for w in mats))
        top.append(np.sign(a) * r)
    return ParallelDeepNet(tuple(subnets), top)


def bridge_penalty(alpha, L: int) -> float:
    """Sum of |alpha_i|^(2/L); the sparsity-inducing penalty equivalent to cost_CL."""
    if L < 2:
        raise ValueError("depth must be at least 2")
    a = np.asarray(alpha, dtype=float)
    return float(np.sum(np.abs(a) ** (2.0 / L)))


@dataclass(frozen=True)
class AlignmentReport:
    """Per-subnet spread of the squared layer norms (0 means perfectly aligned)."""

    deviations: tuple[float, ...]

    @property
    def max_deviation(self) -> float:
        return max(self.deviations, default=0.0)

    @property
    def aligned(self) -> bool:
        return self.max_deviation < 1e-10


def check_alignment(net: ParallelDeepNet) -> AlignmentReport:
    """Max - min of the per-layer squared norms within each subnet."""
    devs = []
    for t, s in zip(net.top, net.subnets):
        sq = [float(np.sum(w * w)) for w in s] + [float(t * t)]
        devs.append(max(sq) - min(sq))
    return AlignmentReport(tuple(devs))


def _null_vector(m: np.ndarray):
    """Deterministic unit vector in the null space of m, or None."""
    _, sv, vt = np.linalg.svd(m, full_matrices=True)
    tol = _SVD_TOL * (sv[0] if sv.size else 1.0)
    rank = int(np.sum(sv > tol))
    if rank >= m.shape[1]:
        return None
    beta = vt[-1]
    nz = np.flatnonzero(beta)
    if nz.size and beta[nz[0]] < 0:
        beta = -beta
    return beta


def _design_matrix(s: SphereFactoredNet, X, active) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.array([[_chain_eval(s.subnets[i], x) for i in active] for x in X])


def sparsify_support(s: SphereFactoredNet, X) -> SphereFactoredNet:
    """Reduce the active coefficients to at most N without moving predictions.

    ``X`` holds the N inputs as rows.  Requires depth 2, where the penalty
    is the l1 norm: null-space moves of the prediction map are walked to the
    nearest zero crossing in whichever direction does not increase the norm.
    """
    if s.depth != 2:
        raise ValueError("support sparsification implemented for depth 2 only")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = X.shape[0]
    alpha = np.array(s.alpha)
    while True:
        active = np.flatnonzero(alpha)
        if active.size <= n:
            break
        beta = _null_vector(_design_matrix(s, X, active))
        if beta is None:
            break
        if float(np.sign(alpha[active]) @ beta) > 0:
            beta = -beta
        crossing = np.full(beta.shape, np.inf)
        opposing = np.sign(beta) == -np.sign(alpha[active])
        crossing[opposing] = -alpha[active][opposing] / beta[opposing]
        t = crossing.min()
        alpha[active] = alpha[active] + t * beta
        alpha[active[crossing <= t]] = 0.0
    return SphereFactoredNet(s.subnets, alpha)


def improving_direction(s: SphereFactoredNet, X):
    """A certified penalty-decreasing perturbation for depth at least 3.

    When more than N coefficients are active, returns (beta, rho) with beta
    in the null space of the prediction map on the first N+1 active subnets
    and rho small enough that alpha + rho*beta and alpha - rho*beta keep
    every active sign.  Strict concavity of |.|^(2/L) then makes the smaller
    of the two perturbed penalties strictly below the current one.  Returns
    None when N or fewer coefficients are active.
    """
    if s.depth < 3:
        raise ValueError("use sparsify_support for depth 2")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = X.shape[0]
    active = np.flatnonzero(s.alpha)
    if active.size <= n:
        return None
    sub = active[:n + 1]
    beta_sub = _null_vector(_design_matrix(s, X, sub))
    if beta_sub is None:
        return None
    nz = beta_sub != 0.0
    rho = 0.5 * float(np.min(np.abs(s.alpha[sub][nz]) / np.abs(beta_sub[nz])))
    beta = np.zeros(len(s.alpha))
    beta[sub] = beta_sub
    return beta, rho
