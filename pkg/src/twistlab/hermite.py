"""Hermite functions and special Hermite functions.

The 1-D Hermite functions used here are orthonormal in L^2(R), with
h_0(x) = pi^{-1/4} exp(-x^2/2).  The special Hermite functions are their
Fourier-Wigner transforms,

  Phi_{a,b}(z) = (2 pi)^{-d/2} int e^{i x.xi} Phi_a(xi + y/2) Phi_b(xi - y/2) dxi,

z = x + iy, which factor coordinatewise and form a complete orthonormal
system in L^2(C^d).  They are joint eigenfunctions of the twisted
Laplacian (eigenvalue 2|b| + d) and of the Hermite operator
-Laplacian + |z|^2/4 (eigenvalue |a| + |b| + d).

The Fourier-Wigner integral is evaluated by Gauss-Hermite quadrature
after completing the square in the exponent: shifting the integration
variable by i x/2 absorbs the oscillation exactly and leaves a
polynomial-times-Gaussian integrand, so the node rule below is exact in
degree (a plain rule with the same node count would fail badly once
|x| ~ 10).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_hermite

from .field import Field, Grid

QUADRATURE_MARGIN = 20


class QuadratureNodesError(ValueError):
    """Requested orders exceed what the node count can integrate."""


@dataclass(frozen=True)
class MultiIndex:
    components: tuple

    def __post_init__(self):
        comps = tuple(int(c) for c in self.components)
        if any(c < 0 for c in comps):
            raise ValueError("multi-index components must be >= 0")
        object.__setattr__(self, "components", comps)

    @property
    def order(self) -> int:
        return sum(self.components)

    def __len__(self):
        return len(self.components)


@dataclass(frozen=True)
class HermiteBasisTruncation:
    """Per-axis cap on the free index of an eigen-expansion."""

    alpha_max: int
    d: int = 1


def _as_multi(a, d=None) -> MultiIndex:
    if isinstance(a, MultiIndex):
        return a
    if isinstance(a, int):
        return MultiIndex((a,) * (d or 1))
    return MultiIndex(tuple(a))


def hermite_fn(n: int, x):
    """Orthonormal Hermite function h_n(x), by the stable recurrence
    h_{n+1} = sqrt(2/(n+1)) x h_n - sqrt(n/(n+1)) h_{n-1}."""
    x = np.asarray(x, dtype=float)
    h_prev = math.pi**-0.25 * np.exp(-0.5 * x * x)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = math.sqrt(2.0) * x * h_prev
    for j in range(1, n):
        h, h_prev = (
            math.sqrt(2.0 / (j + 1)) * x * h - math.sqrt(j / (j + 1.0)) * h_prev,
            h,
        )
    return h if h.ndim else float(h)


def _scaled_hermite_polys(n_max: int, u: np.ndarray) -> np.ndarray:
    """Hermite polynomials carrying the orthonormal scaling but not the
    Gaussian: p_n(u) = h_n(u) e^{u^2/2}.  Valid for complex u.

    Returns an array of shape (n_max + 1,) + u.shape.
    """
    out = np.empty((n_max + 1,) + u.shape, dtype=complex)
    out[0] = math.pi**-0.25
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * u * out[0]
    for j in range(1, n_max):
        out[j + 1] = (
            math.sqrt(2.0 / (j + 1)) * u * out[j]
            - math.sqrt(j / (j + 1.0)) * out[j - 1]
        )
    return out


@lru_cache(maxsize=8)
def _gh_nodes(count: int):
    x, w = roots_hermite(count)
    return x, w


def default_node_count(order: int) -> int:
    return max(40, 2 * order + QUADRATURE_MARGIN)


def special_hermite_1d(a: int, b: int, x, y, nodes: int | None = None):
    """One coordinate factor of the Fourier-Wigner transform.

    F_{a,b}(x, y) = (2 pi)^{-1/2} e^{-(x^2+y^2)/4}
                    int p_a(u + ix/2 + y/2) p_b(u + ix/2 - y/2) e^{-u^2} du,

    evaluated with Gauss-Hermite nodes; exact for the polynomial part.
    """
    if nodes is None:
        nodes = default_node_count(a + b)
    if nodes < a + b + QUADRATURE_MARGIN // 2:
        raise QuadratureNodesError(
            f"{nodes} nodes insufficient for orders a+b={a+b}"
        )
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u, w = _gh_nodes(nodes)
    acc = np.zeros(np.broadcast(x, y).shape, dtype=complex)
    shift = 0.5j * x
    for ui, wi in zip(u, w):
        arg1 = ui + shift + 0.5 * y
        arg2 = ui + shift - 0.5 * y
        pa = _scaled_hermite_polys(a, np.atleast_1d(arg1))[a]
        pb = _scaled_hermite_polys(b, np.atleast_1d(arg2))[b]
        acc += wi * (pa * pb).reshape(acc.shape)
    pref = (2 * math.pi) ** -0.5 * np.exp(-0.25 * (x * x + y * y))
    out = pref * acc
    return out if out.ndim else complex(out)


def special_hermite_1d_table(
    a_max: int, b: int, x: np.ndarray, y: np.ndarray, nodes: int | None = None
) -> np.ndarray:
    """F_{a,b}(x, y) for all a <= a_max at fixed b; shape (a_max+1,) + x.shape.

    Shares the recurrence across orders, which is what makes eigen
    expansions with large caps affordable.
    """
    if nodes is None:
        nodes = default_node_count(a_max + b)
    if nodes < a_max + b + QUADRATURE_MARGIN // 2:
        raise QuadratureNodesError(
            f"{nodes} nodes insufficient for orders up to {a_max + b}"
        )
    u, w = _gh_nodes(nodes)
    acc = np.zeros((a_max + 1,) + x.shape, dtype=complex)
    shift = 0.5j * x
    for ui, wi in zip(u, w):
        pa = _scaled_hermite_polys(a_max, ui + shift + 0.5 * y)
        pb = _scaled_hermite_polys(b, ui + shift - 0.5 * y)[b]
        acc += wi * pa * pb[None, ...]
    pref = (2 * math.pi) ** -0.5 * np.exp(-0.25 * (x * x + y * y))
    return pref[None, ...] * acc


def special_hermite(alpha, beta, z, nodes: int | None = None):
    """Phi_{alpha,beta} at points z of C^d; z has shape (..., d) complex.

    Scalars / plain complex numbers are accepted for d = 1.
    """
    alpha = _as_multi(alpha)
    beta = _as_multi(beta, d=len(alpha))
    if len(alpha) != len(beta):
        raise ValueError("alpha and beta must have the same length")
    d = len(alpha)
    z = np.asarray(z, dtype=complex)
    if d == 1 and (z.ndim == 0 or z.shape[-1] != 1):
        z = z[..., None]
    if z.shape[-1] != d:
        raise ValueError(f"z must have {d} components")
    out = np.ones(z.shape[:-1], dtype=complex)
    for j in range(d):
        out = out * special_hermite_1d(
            alpha.components[j], beta.components[j], z[..., j].real, z[..., j].imag,
            nodes=nodes,
        )
    return out if out.ndim else complex(out)


def special_hermite_field(alpha, beta, grid: Grid, nodes: int | None = None) -> Field:
    """Phi_{alpha,beta} sampled on a cube grid."""
    alpha = _as_multi(alpha, grid.d)
    beta = _as_multi(beta, grid.d)
    mesh = grid.meshgrid()
    d = grid.d
    out = np.ones(grid.shape, dtype=complex)
    for j in range(d):
        out = out * special_hermite_1d(
            alpha.components[j], beta.components[j], mesh[j], mesh[d + j], nodes=nodes
        )
    return Field(grid, out)


# ---------------------------------------------------------------------------
# differential operators and the eigenrelation check
# ---------------------------------------------------------------------------

# 4th-order centered stencils
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def _apply_stencil(arr: np.ndarray, axis: int, coeffs: np.ndarray, h: float, power: int):
    """Apply a centered stencil along one axis with zero extension."""
    out = np.zeros_like(arr)
    r = len(coeffs) // 2
    for o, c in enumerate(coeffs, start=-r):
        if c == 0.0:
            continue
        shifted = np.zeros_like(arr)
        src = [slice(None)] * arr.ndim
        dst = [slice(None)] * arr.ndim
        if o > 0:
            src[axis] = slice(o, None)
            dst[axis] = slice(None, -o)
        elif o < 0:
            src[axis] = slice(None, o)
            dst[axis] = slice(-o, None)
        shifted[tuple(dst)] = arr[tuple(src)]
        out += c * shifted
    return out / h**power


def twisted_laplacian_apply(f: Field) -> Field:
    """The twisted Laplacian by 4th-order centered differences.

    In real coordinates the operator expands to
      -Laplacian + |z|^2/4 + i sum_j (y_j d/dx_j - x_j d/dy_j).
    """
    grid = f.grid
    d, h = grid.d, grid.h
    arr = f.samples
    mesh = grid.meshgrid()
    out = np.zeros_like(arr)
    r2 = np.zeros(grid.shape)
    for j in range(d):
        xj, yj = mesh[j], mesh[d + j]
        out -= _apply_stencil(arr, j, _D2, h, 2)
        out -= _apply_stencil(arr, d + j, _D2, h, 2)
        out += 1j * (
            yj * _apply_stencil(arr, j, _D1, h, 1)
            - xj * _apply_stencil(arr, d + j, _D1, h, 1)
        )
        r2 += xj * xj + yj * yj
    out += 0.25 * r2 * arr
    return Field(grid, out)


def hermite_operator_apply(f: Field) -> Field:
    """-Laplacian + |z|^2/4 by the same stencils."""
    grid = f.grid
    d, h = grid.d, grid.h
    arr = f.samples
    mesh = grid.meshgrid()
    out = np.zeros_like(arr)
    r2 = np.zeros(grid.shape)
    for j in range(d):
        out -= _apply_stencil(arr, j, _D2, h, 2)
        out -= _apply_stencil(arr, d + j, _D2, h, 2)
        r2 += mesh[j] ** 2 + mesh[d + j] ** 2
    out += 0.25 * r2 * arr
    return Field(grid, out)


def verify_eigenrelation(alpha, beta, grid: Grid, operator: str = "twisted") -> float:
    """Relative residual ||A Phi - lambda Phi||_2 / ||Phi||_2 on the grid.

    operator = "twisted" uses the twisted Laplacian with eigenvalue
    2|beta| + d; operator = "hermite" uses -Laplacian + |z|^2/4 with
    eigenvalue |alpha| + |beta| + d.  A grid that under-resolves the
    function is rejected.
    """
    alpha = _as_multi(alpha, grid.d)
    beta = _as_multi(beta, grid.d)
    mu_h = alpha.order + beta.order + grid.d
    if not grid.resolves(mu_h):
        raise ValueError(
            f"grid step {grid.h:.4f} does not resolve eigenvalue {mu_h}"
        )
    phi = special_hermite_field(alpha, beta, grid)
    if operator == "twisted":
        lam = 2 * beta.order + grid.d
        applied = twisted_laplacian_apply(phi)
    elif operator == "hermite":
        lam = alpha.order + beta.order + grid.d
        applied = hermite_operator_apply(phi)
    else:
        raise ValueError(f"unknown operator {operator!r}")
    num = np.linalg.norm(applied.samples - lam * phi.samples)
    den = np.linalg.norm(phi.samples)
    return float(num / den)
