"""Hopf-type coincidences: chords of fixed length with equal images.

On the circle a function ``g`` and a length ``delta`` give the roots of
``g(x + delta) - g(x)``.  On the flat torus ``R^2/Z^2`` a map ``f`` and a
length ``delta`` give pairs ``p, p + delta*u`` with ``f`` equal at both ends;
the direction map ``u -> V/|V|`` with ``V = f(p + (s+delta)u) - f(p + s*u)``
carries the degree argument.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from .geometry import TWO_PI


class HopfError(ValueError):
    pass


class _AllX:
    """Marker returned when ``g(x + delta) == g(x)`` for every x."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "ALL_X"


ALL_X = _AllX()


# ---------------------------------------------------------------- circle


@dataclass(frozen=True)
class CircleFunction:
    """Samples of a real function on the circle, linear between samples.

    When ``func`` is given it is used for evaluation and the samples only seed
    the root bracketing.
    """

    params: np.ndarray
    values: np.ndarray
    func: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        t = np.asarray(self.params, float)
        v = np.asarray(self.values, float)
        if t.ndim != 1 or t.shape != v.shape:
            raise HopfError("params and values must be 1-d arrays of one length")
        if t.size < 8:
            raise HopfError("need at least 8 samples")
        if np.any(np.diff(t) <= 0) or t[0] < 0 or t[-1] >= TWO_PI:
            raise HopfError("params must increase strictly inside [0, 2*pi)")
        object.__setattr__(self, "params", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, func: Callable, n: int = 4096) -> CircleFunction:
        t = np.arange(n) * (TWO_PI / n)
        return cls(t, np.asarray(func(t), float) * np.ones(n), func)

    def __call__(self, x):
        if self.func is not None:
            return np.asarray(self.func(x), float) * np.ones_like(np.asarray(x, float))
        return np.interp(np.mod(x, TWO_PI), self.params, self.values, period=TWO_PI)


NAMED_FUNCTIONS: dict[str, Callable] = {
    "cos": np.cos,
    "sin": np.sin,
    "cos2": lambda x: np.cos(2 * x),
    "const": lambda x: np.zeros_like(np.asarray(x, float)),
}


def hopf_pairs_circle(g: CircleFunction, delta: float, grid: int | None = None, xtol: float = 1e-12):
    """Parameters x in [0, 2*pi) with ``g(x + delta) == g(x)``.

    Sign changes of ``h(x) = g(x + delta) - g(x)`` on a uniform grid are
    refined by Brent's method; grid points where h vanishes are kept as they
    are.  Returns ``ALL_X`` when h vanishes identically.
    """
    if not 0 < delta < TWO_PI:
        raise HopfError("delta must lie in (0, 2*pi)")
    n = grid or max(4 * g.params.size, 4096)
    x = np.arange(n) * (TWO_PI / n)
    if g.func is None:
        # sample breakpoints of both g(x) and g(x + delta)
        x = np.unique(np.mod(np.concatenate([x, g.params, g.params - delta]), TWO_PI))

    def h(t):
        return g(t + delta) - g(t)

    hx = h(x)
    scale = max(float(np.max(np.abs(g.values))), 1.0)
    if np.max(np.abs(hx)) <= 1e-13 * scale:
        return ALL_X
    zero = np.abs(hx) <= 1e-15 * scale
    roots = list(x[zero])
    xn = np.append(x[1:], TWO_PI)
    hn = np.roll(hx, -1)
    for i in np.nonzero((hx * hn < 0) & ~zero & ~np.roll(zero, -1))[0]:
        roots.append(brentq(h, x[i], xn[i], xtol=xtol, rtol=4 * np.finfo(float).eps))
    return sorted(float(np.mod(r, TWO_PI)) for r in roots)


# ---------------------------------------------------------------- torus


@dataclass(frozen=True)
class TorusMap:
    """Trigonometric polynomial ``R^2/Z^2 -> R^2``.

    Each term row ``(amp, kx, ky, phase)`` of ``terms[c]`` adds
    ``amp * sin(2*pi*(kx*x + ky*y) + phase)`` to output coordinate c.
    """

    terms: tuple[np.ndarray, np.ndarray]
    const: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        rows = []
        for t in self.terms:
            t = np.atleast_2d(np.asarray(t, float)).reshape(-1, 4)
            if not np.all(t[:, 1:3] == np.round(t[:, 1:3])):
                raise HopfError("frequencies must be integers")
            rows.append(t)
        if len(rows) != 2:
            raise HopfError("need term lists for two output coordinates")
        object.__setattr__(self, "terms", tuple(rows))

    @classmethod
    def sin_sin(cls) -> TorusMap:
        """``(sin 2*pi*x, sin 2*pi*y)``."""
        return cls(([1.0, 1, 0, 0.0], [1.0, 0, 1, 0.0]))

    @classmethod
    def constant(cls, c=(0.0, 0.0)) -> TorusMap:
        return cls((np.zeros((0, 4)), np.zeros((0, 4))), tuple(c))

    @classmethod
    def random(cls, terms: int = 4, max_freq: int = 2, seed: int = 0) -> TorusMap:
        rng = np.random.default_rng(seed)
        out = []
        for _ in range(2):
            k = rng.integers(-max_freq, max_freq + 1, size=(terms, 2))
            k[np.all(k == 0, axis=1)] = (1, 0)
            amp = rng.normal(size=terms) / np.arange(1, terms + 1)
            out.append(np.column_stack([amp, k, rng.uniform(0, TWO_PI, terms)]))
        return cls(tuple(out))

    def to_dict(self) -> dict:
        return {"terms": [t.tolist() for t in self.terms], "const": list(self.const)}

    @classmethod
    def from_dict(cls, d: dict) -> TorusMap:
        return cls(tuple(np.asarray(t, float).reshape(-1, 4) for t in d["terms"]), tuple(d.get("const", (0.0, 0.0))))

    def __call__(self, p) -> np.ndarray:
        p = np.asarray(p, float)
        out = np.empty(p.shape)
        for c, t in enumerate(self.terms):
            arg = TWO_PI * (p[..., :1] * t[:, 1] + p[..., 1:2] * t[:, 2]) + t[:, 3]
            out[..., c] = self.const[c] + np.sin(arg) @ t[:, 0]
        return out

    def jacobian(self, p) -> np.ndarray:
        """``J[..., c, k] = d f_c / d x_k``."""
        p = np.asarray(p, float)
        out = np.empty(p.shape + (2,))
        for c, t in enumerate(self.terms):
            arg = TWO_PI * (p[..., :1] * t[:, 1] + p[..., 1:2] * t[:, 2]) + t[:, 3]
            w = np.cos(arg) * (TWO_PI * t[:, 0])
            out[..., c, 0] = w @ t[:, 1]
            out[..., c, 1] = w @ t[:, 2]
        return out


@dataclass
class CoincidencePair:
    p: np.ndarray
    u: np.ndarray
    delta: float
    residual: float

    @property
    def endpoint(self) -> np.ndarray:
        return np.mod(self.p + self.delta * self.u, 1.0)

    def to_dict(self) -> dict:
        return {"p": self.p.tolist(), "u": self.u.tolist(), "delta": self.delta, "residual": self.residual}


class CoincidenceFound(HopfError):
    """The direction vector vanished: the chord is itself a coincidence."""

    def __init__(self, msg: str, pair: CoincidencePair):
        super().__init__(msg)
        self.pair = pair


def _unit(theta) -> np.ndarray:
    theta = np.asarray(theta, float)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def direction_vectors(f: TorusMap, p, s: float, delta: float, u) -> np.ndarray:
    """``V(u) = f(p + (s+delta)*u) - f(p + s*u)`` for an array of directions."""
    p = np.asarray(p, float)
    u = np.asarray(u, float)
    return f(p + (s + delta) * u) - f(p + s * u)


def direction_map(f: TorusMap, p, s: float, delta: float, u, v_min: float = 1e-10) -> np.ndarray:
    u = np.asarray(u, float)
    if abs(np.hypot(*u) - 1.0) > 1e-12:
        raise HopfError("u must be a unit vector")
    v = direction_vectors(f, p, s, delta, u)
    nv = float(np.hypot(*v))
    if nv <= v_min:
        a = np.mod(np.asarray(p, float) + s * u, 1.0)
        raise CoincidenceFound("coincidence encountered", CoincidencePair(a, u, delta, nv))
    return v / nv


def direction_map_degree(f: TorusMap, p, s: float, delta: float, m: int = 720, v_min: float = 1e-10) -> int:
    """Winding number of ``u -> V(u)/|V(u)|`` as u runs once around the circle.

    Consecutive image angles are unwrapped; a jump over a quarter turn means
    the sampling is too coarse to trust the count.
    """
    u = _unit(np.arange(m) * (TWO_PI / m))
    v = direction_vectors(f, p, s, delta, u)
    nv = np.hypot(v[:, 0], v[:, 1])
    k = int(np.argmin(nv))
    if nv[k] <= v_min:
        a = np.mod(np.asarray(p, float) + s * u[k], 1.0)
        raise CoincidenceFound("degree undefined, coincidence found", CoincidencePair(a, u[k], delta, float(nv[k])))
    ang = np.arctan2(v[:, 1], v[:, 0])
    step = np.angle(np.exp(1j * (np.roll(ang, -1) - ang)))
    if np.max(np.abs(step)) >= 0.25 * TWO_PI:
        raise HopfError("direction circle undersampled, increase M")
    turns = step.sum() / TWO_PI
    deg = round(turns)
    if abs(turns - deg) >= 0.25:
        raise HopfError("degree residual too large, increase M")
    return int(deg)


def grid_maximizer(f: TorusMap, coord: int = 1, n: int = 256) -> np.ndarray:
    """Point of an ``n x n`` torus grid where output ``coord`` is largest."""
    g = np.arange(n) / n
    pts = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1)
    vals = f(pts)[..., coord]
    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    return pts[i, j].copy()


COARSE = (32, 32, 64)
DAMPING = 0.5
MAX_ITER = 50
DEDUPE = 1e-3


def _residual(f: TorusMap, x: np.ndarray, delta: float) -> np.ndarray:
    p = x[:, :2]
    return f(p + delta * _unit(x[:, 2])) - f(p)


def refine_coincidences(
    f: TorusMap, delta: float, seeds: np.ndarray, tol: float = 1e-10,
    damping: float = DAMPING, max_iter: int = MAX_ITER,
) -> tuple[np.ndarray, np.ndarray]:
    """Damped Gauss-Newton on ``F(x, y, theta) = f(p + delta*u) - f(p)``.

    The system has two equations in three unknowns, so each step is the
    minimum-norm solution of the linearisation.  Returns the final
    ``(x, y, theta)`` rows and their residual norms.
    """
    x = np.array(seeds, float, copy=True)
    done = np.zeros(len(x), bool)
    for _ in range(max_iter):
        r = _residual(f, x, delta)
        nr = np.hypot(r[:, 0], r[:, 1])
        done = nr <= tol
        if done.all():
            break
        a = ~done
        xa = x[a]
        u = _unit(xa[:, 2])
        jq = f.jacobian(xa[:, :2] + delta * u)
        jp = f.jacobian(xa[:, :2])
        jac = np.empty((a.sum(), 2, 3))
        jac[:, :, :2] = jq - jp
        jac[:, :, 2] = delta * np.einsum("nck,nk->nc", jq, np.stack([-u[:, 1], u[:, 0]], axis=1))
        jjt = jac @ jac.transpose(0, 2, 1)
        det = jjt[:, 0, 0] * jjt[:, 1, 1] - jjt[:, 0, 1] * jjt[:, 1, 0]
        ok = np.abs(det) > 1e-300
        w = np.zeros((a.sum(), 2))
        ra = r[a][ok]
        m = jjt[ok]
        w[ok, 0] = (m[:, 1, 1] * ra[:, 0] - m[:, 0, 1] * ra[:, 1]) / det[ok]
        w[ok, 1] = (m[:, 0, 0] * ra[:, 1] - m[:, 1, 0] * ra[:, 0]) / det[ok]
        step = np.einsum("nck,nc->nk", jac, w)
        x[a] -= damping * step
    x[:, :2] = np.mod(x[:, :2], 1.0)
    x[:, 2] = np.mod(x[:, 2], TWO_PI)
    r = _residual(f, x, delta)
    return x, np.hypot(r[:, 0], r[:, 1])


def _seed_grid(coarse) -> np.ndarray:
    nx, ny, nt = coarse
    gx = (np.arange(nx) + 0.5) / nx
    gy = (np.arange(ny) + 0.5) / ny
    gt = (np.arange(nt) + 0.5) * (TWO_PI / nt)
    return np.stack(np.meshgrid(gx, gy, gt, indexing="ij"), axis=-1).reshape(-1, 3)


def _dedupe(pu: np.ndarray, radius: float) -> np.ndarray:
    """Greedy keep-first thinning in ``(p, u)`` space, p periodic in both axes."""
    # shift u into [0, 4) so all four coordinates fit a periodic box
    data = pu.copy()
    data[:, 2:] += 2.0
    tree = cKDTree(data, boxsize=[1.0, 1.0, 8.0, 8.0])
    keep = np.ones(len(pu), bool)
    for i, nb in enumerate(tree.query_ball_point(data, radius)):
        if keep[i]:
            for j in nb:
                if j > i:
                    keep[j] = False
    return keep


def find_coincidence_family(
    f: TorusMap, delta: float, coarse=COARSE, refine_tol: float = 1e-10, cap: int = 5000,
) -> list[CoincidencePair]:
    """Coincidence pairs ``f(p) == f(p + delta*u)`` seeded from a coarse grid.

    Seeds over ``T^2 x S^1`` are refined independently; converged points are
    sorted by ``(p, u)``, thinned at distance 1e-3 and truncated to ``cap``.
    """
    if not delta > 0:
        raise HopfError("delta must be > 0")
    if isinstance(coarse, int):
        coarse = (coarse, coarse, 2 * coarse)
    x, res = refine_coincidences(f, delta, _seed_grid(coarse), refine_tol)
    good = res <= refine_tol
    x, res = x[good], res[good]
    pu = np.column_stack([x[:, :2], _unit(x[:, 2])])
    order = np.lexsort(pu.T[::-1])
    pu, res = pu[order], res[order]
    keep = _dedupe(pu, DEDUPE) if len(pu) else np.zeros(0, bool)
    pu, res = pu[keep][:cap], res[keep][:cap]
    return [CoincidencePair(r[:2].copy(), r[2:].copy(), float(delta), float(e)) for r, e in zip(pu, res)]


def family_neighbors(pairs: list[CoincidencePair]) -> np.ndarray:
    """Distance from each pair to its nearest other pair in ``(p, u)`` space."""
    if len(pairs) < 2:
        return np.full(len(pairs), np.inf)
    data = np.array([np.concatenate([c.p, c.u + 2.0]) for c in pairs])
    d, _ = cKDTree(data, boxsize=[1.0, 1.0, 8.0, 8.0]).query(data, k=2)
    return d[:, 1]


def delta_conjugacy_probe(a, b, delta: float, rtol: float = 1e-12) -> int:
    """Geodesics of length ``delta`` joining a and b on the flat torus.

    Each lattice vector v with ``|b - a + v| == delta`` gives one oriented
    geodesic from a to b, and its reverse runs from b to a.  For distinct
    points both orientations are counted; when a and b coincide the two sets
    are the same loops and are counted once.  The count is always finite.
    """
    if not delta > 0:
        raise HopfError("delta must be > 0")
    d = np.mod(np.asarray(b, float) - np.asarray(a, float), 1.0)
    d[d > 0.5] -= 1.0
    rmax = int(math.ceil(delta + 1.0))
    k = np.arange(-rmax, rmax + 1)
    v = np.stack(np.meshgrid(k, k, indexing="ij"), axis=-1).reshape(-1, 2)
    lengths = np.hypot(d[0] + v[:, 0], d[1] + v[:, 1])
    n = int(np.count_nonzero(np.abs(lengths - delta) <= rtol * max(1.0, delta)))
    same = bool(np.all(np.abs(d) <= rtol))
    return n if same else 2 * n
