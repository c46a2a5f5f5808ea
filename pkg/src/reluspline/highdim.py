"""d-dimensional infinite-network functions from discrete measures.

Contains the atom-measure evaluator and gradient, a Monte-Carlo estimator
of the normalized Laplacian surface flux, the radial "bump" induced by the
uniform second-difference measure on the sphere, and a Monte-Carlo
finite-difference estimator showing its normalized Hessian mass vanishes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import beta as beta_fn
from scipy.special import betainc, gamma

_UNIT_TOL = 1e-12


def ball_volume(m: int) -> float:
    """Volume of the unit ball in m dimensions."""
    return float(np.pi ** (m / 2) / gamma(m / 2 + 1))


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere bounding the d-dimensional ball."""
    return float(2 * np.pi ** (d / 2) / gamma(d / 2))


@dataclass(frozen=True)
class SphereConstants:
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be at least 1")

    @property
    def unit_sphere_area(self) -> float:
        return sphere_area(self.d)

    def unit_ball_volume(self, m: int | None = None) -> float:
        return ball_volume(self.d if m is None else m)


@dataclass(frozen=True)
class AtomMeasureDD:
    """Discrete measure of ReLU atoms mass * [<w,x> + b]_+ with unit w."""

    atoms: tuple[tuple[tuple[float, ...], float, float], ...]
    c: float = 0.0
    d: int = 2

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("dimension must be at least 2")
        atoms = []
        for w, b, m in self.atoms:
            w = tuple(float(v) for v in w)
            if len(w) != self.d:
                raise ValueError("atom direction has wrong dimension")
            if abs(np.linalg.norm(w) - 1.0) > _UNIT_TOL:
                raise ValueError("atom directions must be unit vectors")
            atoms.append((w, float(b), float(m)))
        object.__setattr__(self, "atoms", tuple(atoms))
        object.__setattr__(self, "c", float(self.c))

    def directions(self) -> np.ndarray:
        return np.array([w for w, _, _ in self.atoms]).reshape(-1, self.d)

    def biases(self) -> np.ndarray:
        return np.array([b for _, b, _ in self.atoms])

    def masses(self) -> np.ndarray:
        return np.array([m for _, _, m in self.atoms])

    def to_dict(self) -> dict:
        return {"atoms": [{"w": list(w), "b": b, "mass": m}
                          for w, b, m in self.atoms],
                "c": self.c, "d": self.d}

    @classmethod
    def from_dict(cls, data: dict) -> "AtomMeasureDD":
        return cls(tuple((tuple(a["w"]), a["b"], a["mass"])
                         for a in data["atoms"]),
                   data.get("c", 0.0), data["d"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "AtomMeasureDD":
        return cls.from_dict(json.loads(s))


def eval_dd(alpha: AtomMeasureDD, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (alpha.d,):
        raise ValueError("input dimension mismatch")
    pre = alpha.directions() @ x + alpha.biases()
    return float(alpha.masses() @ np.maximum(pre, 0.0) + alpha.c)


def grad_dd(alpha: AtomMeasureDD, x) -> np.ndarray:
    """Sum of mass * w over active atoms; exactly at a kink the atom contributes 0."""
    x = np.asarray(x, dtype=float)
    if x.shape != (alpha.d,):
        raise ValueError("input dimension mismatch")
    pre = alpha.directions() @ x + alpha.biases()
    act = (pre > 0.0).astype(float)
    return (alpha.masses() * act) @ alpha.directions()


@dataclass(frozen=True)
class FluxEstimate:
    value: float
    std_error: float


def _sphere_samples(rng, n: int, d: int) -> np.ndarray:
    g = rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def laplacian_flux_estimate(source, r: float, n_samples: int,
                            seed: int = 0, d: int | None = None) -> FluxEstimate:
    """Monte-Carlo surface flux (A_d / V_{d-1}) * E_u <grad f(r u), u>.

    ``source`` is an AtomMeasureDD or a callable returning the gradient at a
    point (then ``d`` is required).  For a nonnegative measure the estimate
    converges to the total mass as r grows.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    if n_samples < 2:
        raise ValueError("need at least two samples")
    if isinstance(source, AtomMeasureDD):
        d = source.d
        dirs, biases, masses = (source.directions(), source.biases(),
                                source.masses())

        def radial_flux(u):
            proj = u @ dirs.T
            pre = r * proj + biases
            return np.einsum("nk,nk->n", (pre > 0.0) * masses, proj)
    else:
        if d is None:
            raise ValueError("d is required for a callable gradient")

        def radial_flux(u):
            return np.array([float(np.dot(source(r * ui), ui)) for ui in u])

    rng = np.random.Generator(np.random.Philox(seed))
    scale = sphere_area(d) / ball_volume(d - 1)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n_samples:
        batch = min(100_000, n_samples - done)
        vals = scale * radial_flux(_sphere_samples(rng, batch, d))
        total += float(vals.sum())
        total_sq += float(vals @ vals)
        done += batch
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0)
    return FluxEstimate(mean, float(np.sqrt(var / n_samples)))


def _tent(z: np.ndarray) -> np.ndarray:
    """[z+1]_+ - 2[z]_+ + [z-1]_+ = max(0, 1 - |z|)."""
    return np.maximum(0.0, 1.0 - np.abs(z))


def _bump_radial(radii: np.ndarray, d: int, n: int) -> np.ndarray:
    """Bump values at the given radii by panelled Gauss-Legendre quadrature.

    Reduces the sphere integral to int_0^pi tent(r cos t) (sin t)^(d-2) dt
    times the area of the (d-2)-sphere, splitting the range at the tent
    kinks so every panel integrand is smooth.
    """
    nodes, weights = leggauss(max(8, n // 4))
    area = sphere_area(d - 1)
    out = np.empty(radii.shape)
    for idx, r in np.ndenumerate(radii):
        if r == 0.0:
            out[idx] = sphere_area(d)
            continue
        s = min(1.0, 1.0 / r)
        cuts = np.arccos([s, 0.0, -s])
        edges = np.unique(np.concatenate(([0.0], cuts, [np.pi])))
        total = 0.0
        for a, b in zip(edges, edges[1:]):
            t = 0.5 * (b - a) * nodes + 0.5 * (a + b)
            vals = _tent(r * np.cos(t)) * np.sin(t) ** (d - 2)
            total += 0.5 * (b - a) * float(weights @ vals)
        out[idx] = area * total
    return out


def bump_eval(x, d: int | None = None, quadrature_n: int = 4096) -> float:
    """The radial bump h(x) = integral over unit directions w of tent(<w,x>).

    ``x`` is a d-vector, or a radius when ``d`` is given.  h(0) equals the
    sphere area A_d and h decays like (area of the (d-2)-sphere)/radius.
    """
    if quadrature_n < 8:
        raise ValueError("quadrature_n must be at least 8")
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        if d is None:
            raise ValueError("d is required for a radius argument")
        r = abs(float(x))
    else:
        d = x.size if d is None else d
        r = float(np.linalg.norm(x))
    if d < 2:
        raise ValueError("dimension must be at least 2")
    return float(_bump_radial(np.array(r), d, quadrature_n))


def bump_tail_closed_form(r: float, d: int) -> float:
    """Exact bump value for radius greater than 1.

    h(r) = area(S^{d-2}) * [ (2r/(d-1)) * ((1 - 1/r^2)^((d-1)/2) - 1)
                             + int_{-1/r}^{1/r} (1-t^2)^((d-3)/2) dt ],
    the even integral expressed through the regularized incomplete beta
    function.  Leading behavior is area(S^{d-2}) / r.
    """
    if r <= 1:
        raise ValueError("closed form valid for radius greater than 1")
    s2 = 1.0 / (r * r)
    a, b = 0.5, (d - 1) / 2.0
    even = beta_fn(a, b) * betainc(a, b, s2)
    slope_term = (2.0 * r / (d - 1)) * ((1.0 - s2) ** ((d - 1) / 2.0) - 1.0)
    return float(sphere_area(d - 1) * (slope_term + even))


def _fd_hessian_norms(radial, points: np.ndarray, h: float) -> np.ndarray:
    """Frobenius norms of central-difference Hessians of a radial function.

    One call to ``radial`` on the stacked stencil radii evaluates every
    sample point at once.
    """
    n, d = points.shape
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    stencil = [np.zeros(d)]
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        stencil += [e, -e]
    for i, j in pairs:
        e = np.zeros(d)
        e[i] = h
        f = np.zeros(d)
        f[j] = h
        stencil += [e + f, e - f, -e + f, -e - f]
    offsets = np.array(stencil)
    radii = np.linalg.norm(points[:, None, :] + offsets[None, :, :], axis=2)
    vals = radial(radii)
    norms = np.empty(n)
    for s in range(n):
        v = vals[s]
        hess = np.empty((d, d))
        for i in range(d):
            hess[i, i] = (v[1 + 2 * i] - 2.0 * v[0] + v[2 + 2 * i]) / (h * h)
        base = 1 + 2 * d
        for p, (i, j) in enumerate(pairs):
            q = base + 4 * p
            hess[i, j] = hess[j, i] = (
                v[q] - v[q + 1] - v[q + 2] + v[q + 3]) / (4.0 * h * h)
        norms[s] = np.linalg.norm(hess)
    return norms


def hessian_decay_estimate(d: int, r: float, n_samples: int,
                           fd_step: float = 1e-2, seed: int = 0,
                           radial_fn=None, quadrature_n: int = 4096) -> float:
    """Monte-Carlo estimate of (1/r^(d-1)) * integral of |Hessian|_F over the r-ball.

    Defaults to the radial bump; ``radial_fn`` (vectorized radius -> value)
    substitutes any other radial function, e.g. rho**2/2 as a non-decaying
    control whose exact value is ball_volume(d) * r * sqrt(d).
    """
    if r <= 2:
        raise ValueError("radius must exceed 2")
    if n_samples < 2:
        raise ValueError("need at least two samples")
    if fd_step < 1e-3:
        raise ValueError("fd_step below 1e-3 amplifies quadrature noise")
    if radial_fn is None:
        def radial_fn(radii):
            return _bump_radial(radii, d, quadrature_n)
    rng = np.random.Generator(np.random.Philox(seed))
    u = _sphere_samples(rng, n_samples, d)
    radii = r * rng.random(n_samples) ** (1.0 / d)
    points = u * radii[:, None]
    norms = _fd_hessian_norms(radial_fn, points, fd_step)
    # (1/r^(d-1)) * V_d r^d * mean = V_d * r * mean
    return float(ball_volume(d) * r * norms.mean())
