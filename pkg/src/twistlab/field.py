"""Sampled complex fields on uniform cube grids in R^{2d}.

A Grid fixes the half-width R and the (even) point count n per axis;
sample points are x_i = -R + i*h with h = 2R/n, so differences of grid
points land back on the lattice and the direct twisted-convolution sum
needs no interpolation.  Fields are immutable arrays of complex samples
indexed in row-major axis order (x_1, ..., x_d, y_1, ..., y_d).

Out-of-cube values are zero: all intended inputs decay like Gaussians,
and the tail error is controlled by grid-refinement checks rather than
by boundary modeling.
"""

from __future__ import annotations

import base64
import json
import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG


class BudgetError(RuntimeError):
    """An operation would exceed the configured memory/time budget."""


@dataclass(frozen=True)
class Grid:
    d: int
    R: float
    n: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.R <= 0:
            raise ValueError("R must be positive")
        if self.n % 2 != 0 or self.n < 4:
            raise ValueError("n must be even and >= 4")
        if self.n ** (2 * self.d) > DEFAULT_CONFIG.max_grid_points:
            raise BudgetError(
                f"grid with {self.n}^{2*self.d} points exceeds the budget"
            )

    @property
    def h(self) -> float:
        return 2.0 * self.R / self.n

    @property
    def shape(self):
        return (self.n,) * (2 * self.d)

    @property
    def cell_volume(self) -> float:
        return self.h ** (2 * self.d)

    def axis(self) -> np.ndarray:
        return -self.R + self.h * np.arange(self.n)

    def meshgrid(self):
        """Axes broadcast to the full grid shape, ordered x_1..x_d, y_1..y_d."""
        return np.meshgrid(*([self.axis()] * (2 * self.d)), indexing="ij")

    def resolves(self, mu: float) -> bool:
        """Oscillation-resolution rule h <= pi / (osc_factor * sqrt(mu))."""
        return self.h <= math.pi / (DEFAULT_CONFIG.osc_factor * math.sqrt(mu)) + 1e-12

    @classmethod
    def for_eigenvalue(cls, mu: float, d: int = 1, n_cap: int | None = None) -> "Grid":
        """Default grid for eigenvalue mu: covers the kernel support and
        resolves its oscillation.

        R = 2 sqrt(mu) + margin and h <= min(pi/(4 sqrt(mu)), R/64).
        """
        cfg = DEFAULT_CONFIG
        R = 2.0 * math.sqrt(mu) + cfg.grid_margin
        h = min(math.pi / (cfg.osc_factor * math.sqrt(mu)), R / cfg.min_divisions)
        n = int(math.ceil(2.0 * R / h))
        n += n % 2
        if n_cap is not None:
            n = min(n, n_cap)
        return cls(d, R, n)


@dataclass(frozen=True)
class Field:
    grid: Grid
    samples: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.samples, dtype=complex)
        if arr.shape != self.grid.shape:
            raise ValueError(f"samples shape {arr.shape} != grid shape {self.grid.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "Field":
        """Sample fn(x_1, ..., x_d, y_1, ..., y_d) on the grid."""
        return cls(grid, np.asarray(fn(*grid.meshgrid()), dtype=complex))

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    def map(self, fn) -> "Field":
        return Field(self.grid, fn(self.samples))

    def __add__(self, other: "Field") -> "Field":
        _check_same_grid(self, other)
        return Field(self.grid, self.samples + other.samples)

    def __sub__(self, other: "Field") -> "Field":
        _check_same_grid(self, other)
        return Field(self.grid, self.samples - other.samples)

    def __mul__(self, c) -> "Field":
        return Field(self.grid, self.samples * c)

    __rmul__ = __mul__


def _check_same_grid(f: Field, g: Field):
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def lp_norm(f: Field, p) -> float:
    """Riemann-sum L^p norm; p = math.inf gives the max modulus."""
    a = np.abs(f.samples)
    if p == math.inf:
        return float(a.max())
    p = float(p)
    if p < 1:
        raise ValueError("p must be >= 1")
    return float((f.grid.cell_volume * np.sum(a**p)) ** (1.0 / p))


def inner(f: Field, g: Field) -> complex:
    """<f, g> = h^{2d} sum f conj(g)."""
    _check_same_grid(f, g)
    return complex(f.grid.cell_volume * np.sum(f.samples * np.conj(g.samples)))


def _sorted_moduli(f: Field) -> np.ndarray:
    a = np.abs(f.samples).ravel()
    a = a[a > 0]
    a.sort()
    return a[::-1]


def lorentz_weak_norm(f: Field, q: float) -> float:
    """Weak-L^q quasinorm sup_lambda lambda |{|f| > lambda}|^{1/q}.

    Computed exactly from the sample distribution: with moduli sorted
    decreasingly, the supremum is max_m a_m (m * cellvol)^{1/q}.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    a = _sorted_moduli(f)
    if a.size == 0:
        return 0.0
    m = np.arange(1, a.size + 1)
    return float(np.max(a * (m * f.grid.cell_volume) ** (1.0 / q)))


def lorentz_p1_norm(f: Field, p: float) -> float:
    """L^{p,1} norm int_0^inf |{|f| > lambda}|^{1/p} d lambda (layer cake)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    a = _sorted_moduli(f)
    if a.size == 0:
        return 0.0
    v = f.grid.cell_volume
    m = np.arange(1, a.size + 1)
    drops = a - np.append(a[1:], 0.0)  # a_m - a_{m+1}
    return float(np.sum((m * v) ** (1.0 / p) * drops))


# ---------------------------------------------------------------------------
# twisted convolution
# ---------------------------------------------------------------------------

def twisted_convolution(f: Field, g: Field, block: int = 96) -> Field:
    """Direct quadrature of (f x g)(z) = int f(z-w) g(w) e^{(i/2) Im z.conj(w)} dw.

    The symplectic phase uses Im z.conj(w) = sum_j (y_j u_j - x_j v_j)
    for w = u + iv.  The double sum runs over all pairs of grid points
    with f extended by zero outside the cube; cost is O(N^2) in the
    sample count N, evaluated in blocks of output points.
    """
    _check_same_grid(f, g)
    grid = f.grid
    n, d = grid.n, grid.d
    N = n ** (2 * d)
    if float(N) * float(N) > DEFAULT_CONFIG.max_conv_ops:
        raise BudgetError(
            f"direct twisted convolution needs {N}^2 ops, over the budget"
        )
    axis = grid.axis()
    h2d = grid.cell_volume

    # zero-padded copy of f; index n per axis addresses a guaranteed-zero
    # sentinel, so out-of-cube shifts need no masking
    pad = np.zeros((2 * n,) * (2 * d), dtype=complex)
    pad[(slice(0, n),) * (2 * d)] = f.samples
    pad_flat = pad.ravel()

    # multi-indices of every grid point, flattened
    idx = np.unravel_index(np.arange(N), grid.shape)
    idx = np.stack(idx, axis=0)  # (2d, N)
    g_flat = g.samples.ravel()

    # lattice index of the difference along one axis: i - j + n/2, with
    # invalid entries routed to the zero sentinel
    half = n // 2
    m = np.arange(n)[:, None] - np.arange(n)[None, :] + half
    m = np.where((m >= 0) & (m < n), m, n)
    strides = [(2 * n) ** (2 * d - 1 - ax) for ax in range(2 * d)]
    m_tables = [(m * s).astype(np.int64) for s in strides]

    # unit-phase tables: exp(i/2 a_i a_j) indexed by lattice indices; the
    # symplectic phase is then a product of gathered factors, which is much
    # cheaper than exponentiating per pair
    e_plus = np.exp(0.5j * np.multiply.outer(axis, axis))
    e_minus = e_plus.conj()

    out = np.empty(N, dtype=complex)
    for start in range(0, N, block):
        sl = slice(start, min(start + block, N))
        zi = idx[:, sl]  # (2d, B)
        flat = m_tables[0][np.ix_(zi[0], idx[0])].copy()
        for ax in range(1, 2 * d):
            flat += m_tables[ax][np.ix_(zi[ax], idx[ax])]
        kernel = pad_flat[flat]
        # phase: (1/2) sum_j (y_j^z u_j^w - x_j^z v_j^w)
        for j in range(d):
            kernel *= e_plus[np.ix_(zi[d + j], idx[j])]
            kernel *= e_minus[np.ix_(zi[j], idx[d + j])]
        out[sl] = np.einsum("bn,n->b", kernel, g_flat) * h2d
    return Field(grid, out.reshape(grid.shape))


def reflect_y(f: Field) -> Field:
    """The field z = x + iy -> f(x, -y), using the lattice's reflection.

    Index 0 per y-axis (the sample at -R, whose mirror +R is not on the
    grid) is wrapped periodically; for decaying fields this is a
    boundary-level effect.
    """
    d = f.grid.d
    arr = f.samples
    for j in range(d):
        ax = d + j
        arr = np.roll(np.flip(arr, axis=ax), 1, axis=ax)
    return Field(f.grid, arr)


def relabel_scale(f: Field, factor: float) -> Field:
    """Reinterpret the samples on a grid dilated by `factor` (pure relabel)."""
    return Field(Grid(f.grid.d, f.grid.R * factor, f.grid.n), f.samples)


# ---------------------------------------------------------------------------
# serialization: the .twf JSON envelope
# ---------------------------------------------------------------------------

TWF_MAGIC = "TWF1"
TWF_ENCODING = "le-f64-interleaved"


def save_twf(f: Field, path: str):
    """Write the field as a self-describing, bit-exact JSON envelope."""
    data = np.ascontiguousarray(f.samples, dtype="<c16").tobytes()
    doc = {
        "magic": TWF_MAGIC,
        "d": f.grid.d,
        "R": f.grid.R,
        "n": f.grid.n,
        "encoding": TWF_ENCODING,
        "data": base64.b64encode(data).decode("ascii"),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_twf(path: str) -> Field:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("magic") != TWF_MAGIC or doc.get("encoding") != TWF_ENCODING:
        raise ValueError(f"{path} is not a {TWF_MAGIC} field file")
    grid = Grid(int(doc["d"]), float(doc["R"]), int(doc["n"]))
    raw = base64.b64decode(doc["data"])
    arr = np.frombuffer(raw, dtype="<c16").reshape(grid.shape)
    return Field(grid, arr.astype(complex))
