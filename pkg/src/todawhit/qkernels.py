"""Recursion kernels, elementary intertwiners, and affine Baxter kernels.

Thirteen kernel kinds share one representation: a :class:`Potential` over
named arguments x_i / y_i plus (for composite kinds) inner integration
variables t_i.  Closed-form kinds evaluate as exp(F); composite kinds run
the inner integral through the certified quadrature engine.

``intertwining_residual`` measures the defining exchange relation
H2_left K = K H2_right + shift K with both Hamiltonians applied by
finite differences; ``degeneration_gap`` measures how fast the shifted
affine kernel approaches its modified recursion kernel as eps -> 0 with
the winding coupling g -> 0 faster than eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import _kernelparts as kp
from . import quadrature as qd
from .evaluator import TodaSpec, h2_apply
from .potentials import Potential, _assemble

CLOSED_KINDS = {
    "GL_REC",
    "GL_REC_MOD",
    "GL_AFFINE",
    "B_BC",
    "BC_B",
    "C_D",
    "D_C",
    "C_D_ELEM",
    "D_C_ELEM",
}
COMPOSITE_KINDS = {"B_REC", "C_REC", "D_REC", "B1_AFFINE", "A2_AFFINE", "D1_AFFINE"}
ALL_KINDS = CLOSED_KINDS | COMPOSITE_KINDS


@dataclass(frozen=True)
class KernelSpec:
    kind: str
    rank: int
    lam: float = 0.0
    g: float = 0.0

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")

    @property
    def x_dim(self) -> int:
        n = self.rank
        return {
            "GL_REC": n + 1,
            "GL_REC_MOD": n + 1,
            "GL_AFFINE": n,
            "B_BC": n,
            "BC_B": n,
            "C_D": n,
            "C_D_ELEM": n,
            "D_C": n,
            "D_C_ELEM": n,
            "B_REC": n,
            "C_REC": n,
            "D_REC": n,
            "B1_AFFINE": n,
            "A2_AFFINE": n,
            "D1_AFFINE": n,
        }[self.kind]

    @property
    def y_dim(self) -> int:
        n = self.rank
        return {
            "GL_REC": n,
            "GL_REC_MOD": n + 1,
            "GL_AFFINE": n,
            "B_BC": n,
            "BC_B": n - 1,
            "C_D": n,
            "C_D_ELEM": n,
            "D_C": n - 1,
            "D_C_ELEM": n - 1,
            "B_REC": n - 1,
            "C_REC": n - 1,
            "D_REC": n - 1,
            "B1_AFFINE": n,
            "A2_AFFINE": n,
            "D1_AFFINE": n,
        }[self.kind]

    @property
    def inner_dims(self) -> int:
        n = self.rank
        return {
            "B_REC": n,
            "C_REC": n,
            "D_REC": n - 1,
            "B1_AFFINE": n,
            "A2_AFFINE": n,
            "D1_AFFINE": n - 1,
        }.get(self.kind, 0)


def _names(prefix: str, count: int) -> List[str]:
    return [f"{prefix}_{i}" for i in range(1, count + 1)]


def kernel_potential(spec: KernelSpec) -> Potential:
    """Potential whose exp is the kernel integrand (inner vars internal)."""
    n, lam, g = spec.rank, spec.lam, spec.g
    x = _names("x", spec.x_dim)
    y = _names("y", spec.y_dim)
    t = _names("t", spec.inner_dims)
    kind = spec.kind
    if kind == "GL_REC":
        parts = [kp.glrec_terms(x, y, lam)]
    elif kind == "GL_REC_MOD":
        parts = [kp.glrec_mod_terms(x, y, lam)]
    elif kind == "GL_AFFINE":
        parts = [kp.glaff_terms(x, y, lam, g)]
    elif kind == "B_BC":
        parts = [kp.bbc_terms(x, y)]
    elif kind == "BC_B":
        parts = [kp.bcb_terms(x, y)]
    elif kind in ("C_D", "C_D_ELEM"):
        parts = [kp.cd_terms(x, y)]
    elif kind in ("D_C", "D_C_ELEM"):
        parts = [kp.dc_terms(x, y)]
    elif kind == "B_REC":
        parts = [kp.brec_terms(x, y, t, lam)]
    elif kind == "C_REC":
        parts = [kp.crec_terms(x, y, t, lam)]
    elif kind == "D_REC":
        parts = [kp.drec_terms(x, y, t, lam)]
    elif kind == "B1_AFFINE":
        parts = [kp.b1aff_terms(x, y, t, lam, g)]
    elif kind == "A2_AFFINE":
        parts = [kp.a2aff_terms(x, y, t, lam, g)]
    else:  # D1_AFFINE
        parts = [kp.d1aff_terms(x, y, t, lam, g)]
    return _assemble(t, x + y, parts)


def kernel_exponent(spec: KernelSpec, x: Sequence[float], y: Sequence[float]) -> Potential:
    """The kernel's Potential with argument values folded in (inner vars kept)."""
    pot = kernel_potential(spec)
    if len(x) != spec.x_dim or len(y) != spec.y_dim:
        raise ValueError("argument dimension mismatch")
    return pot


_INNER_SPEC = qd.QuadratureSpec(tol=1e-9, base_nodes=24, max_refine=3)


def eval_kernel(spec: KernelSpec, x: Sequence[float], y: Sequence[float],
                quad: qd.QuadratureSpec | None = None) -> complex:
    """Kernel value: exact exponential or certified inner quadrature."""
    pot = kernel_exponent(spec, x, y)
    ext = _ext_point(spec, x, y)
    if spec.inner_dims == 0:
        return complex(np.exp(pot.bind(ext).value(np.zeros(0))))
    return qd.integrate(pot, ext, quad or _INNER_SPEC).value


def _ext_point(spec: KernelSpec, x, y) -> Dict[str, float]:
    ext = {f"x_{i + 1}": float(v) for i, v in enumerate(x)}
    ext.update({f"y_{i + 1}": float(v) for i, v in enumerate(y)})
    return ext


class FrozenKernel:
    """Kernel evaluation smooth under small argument shifts (for FD)."""

    def __init__(self, spec: KernelSpec, x, y, quad: qd.QuadratureSpec | None = None):
        self.spec = spec
        self.pot = kernel_potential(spec)
        if spec.inner_dims:
            self.grid = qd.FrozenGrid(self.pot, _ext_point(spec, x, y), quad or _INNER_SPEC)
        else:
            self.grid = None

    def __call__(self, x, y) -> complex:
        ext = _ext_point(self.spec, x, y)
        if self.grid is None:
            return complex(np.exp(self.pot.bind(ext).value(np.zeros(0))))
        return self.grid(ext)


def hamiltonian_pair(spec: KernelSpec) -> Tuple[TodaSpec, TodaSpec, float]:
    """Left/right Toda chains and the exchange shift for asserting kinds."""
    n, lam, g = spec.rank, spec.lam, spec.g
    kind = spec.kind
    if kind == "GL_REC":
        return TodaSpec("GL", n), TodaSpec("GL", n - 1), 0.5 * lam * lam
    if kind == "GL_AFFINE":
        return TodaSpec("GL_AFF", n - 1, g), TodaSpec("GL_AFF", n - 1, g), 0.0
    if kind == "B_BC":
        return TodaSpec("B", n), TodaSpec("BC", n), 0.0
    if kind == "BC_B":
        return TodaSpec("BC", n), TodaSpec("B", n - 1), 0.0
    if kind in ("C_D", "C_D_ELEM"):
        return TodaSpec("C", n), TodaSpec("D", n), 0.0
    if kind in ("D_C", "D_C_ELEM"):
        return TodaSpec("D", n), TodaSpec("C", n - 1), 0.0
    if kind == "B_REC":
        return TodaSpec("B", n), TodaSpec("B", n - 1), 0.5 * lam * lam
    if kind == "C_REC":
        return TodaSpec("C", n), TodaSpec("C", n - 1), 0.5 * lam * lam
    if kind == "D_REC":
        return TodaSpec("D", n), TodaSpec("D", n - 1), 0.5 * lam * lam
    if kind == "B1_AFFINE":
        return TodaSpec("B1_AFF", n, g), TodaSpec("B1_AFF", n, g), 0.0
    if kind == "A2_AFFINE":
        return TodaSpec("A2_AFF", n, g), TodaSpec("A2_AFF", n, g), 0.0
    if kind == "D1_AFFINE":
        return TodaSpec("D1_AFF", n, g), TodaSpec("D1_AFF", n, g), 0.0
    raise ValueError(f"no Hamiltonian pairing for {kind}")


def intertwining_residual(spec: KernelSpec, n_points: int = 10, fd_step: float = 1e-3,
                          seed: int = 0, quad: qd.QuadratureSpec | None = None,
                          scale: float = 0.5) -> float:
    """sup |H2_left K - K H2_right - shift K| / |K| over sampled points."""
    left, right, shift = hamiltonian_pair(spec)
    if spec.kind == "GL_REC_MOD":
        raise ValueError("GL_REC_MOD intertwines a direct sum; use GL_REC")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        x = scale * rng.standard_normal(spec.x_dim)
        y = scale * rng.standard_normal(spec.y_dim)
        K = FrozenKernel(spec, x, y, quad)
        kval = K(x, y)
        hx = h2_apply(left, lambda xx: K(xx, y), x, fd_step, richardson=True)
        hy = h2_apply(right, lambda yy: K(x, yy), y, fd_step, richardson=True)
        resid = abs(hx - hy - shift * kval) / abs(kval)
        worst = max(worst, resid)
    return worst


# ---------------------------------------------------------------------------
# degeneration of affine kernels onto modified recursion kernels


def _modified_target(kind: str, rank: int, lam: float):
    """The eps -> 0 limit kernel of the shifted affine family."""
    if kind == "GL_AFFINE":
        # shifting x_n leaves the dressed recursion kernel with the argument
        # roles swapped and the spectral parameter negated: the dressing
        # e^{i lam x_n} sits on the shifted coordinate.
        rec = KernelSpec("GL_REC", rank - 1, -lam)

        def target(x, y):
            dress = np.exp(1j * lam * x[-1])
            return dress * eval_kernel(rec, list(y), list(x)[:-1])

        return target
    rec_kind = {"B1_AFFINE": "B_REC", "A2_AFFINE": "C_REC", "D1_AFFINE": "D_REC"}[kind]
    rec = KernelSpec(rec_kind, rank, lam)

    def target(x, y):
        dress = np.exp(1j * lam * y[-1])
        return dress * eval_kernel(rec, x, list(y)[:-1])

    return target


def degeneration_gap(spec: KernelSpec, eps: float, g: float, n_points: int = 10,
                     seed: int = 0, scale: float = 0.5,
                     quad: qd.QuadratureSpec | None = None) -> float:
    """max |eps^{-i lam} K_affine(shifted) - K_modified| over sampled points."""
    if spec.kind not in ("GL_AFFINE", "B1_AFFINE", "A2_AFFINE", "D1_AFFINE"):
        raise ValueError("degeneration defined for affine kinds only")
    lam = spec.lam
    aff = KernelSpec(spec.kind, spec.rank, lam, g)
    target = _modified_target(spec.kind, spec.rank, lam)
    rng = np.random.default_rng(seed)
    worst = 0.0
    pref = complex(eps) ** complex(0, -lam)
    for _ in range(n_points):
        x = scale * rng.standard_normal(spec.x_dim)
        y = scale * rng.standard_normal(spec.y_dim)
        xs, ys = list(x), list(y)
        if spec.kind == "GL_AFFINE":
            xs[-1] += math.log(eps)
        else:
            ys[-1] += math.log(eps)
        val = pref * eval_kernel(aff, xs, ys, quad)
        worst = max(worst, abs(val - target(x, y)))
    return worst


# ---------------------------------------------------------------------------
# grid convolution (the recursion Psi_n = Q Psi_{n-1})


def apply_kernel(spec: KernelSpec, f_on_grid: np.ndarray,
                 y_axes: Sequence[np.ndarray], y_weights: Sequence[np.ndarray],
                 x_points: Sequence[Sequence[float]],
                 quad: qd.QuadratureSpec | None = None) -> np.ndarray:
    """Deterministic tensor-quadrature convolution over the y-grid.

    ``f_on_grid`` holds f at the tensor product of ``y_axes`` (C order).
    Returns the vector of (Q f)(x) over ``x_points``.  Summation order is
    fixed (C-order over the grid), so results are reproducible.
    """
    mesh = np.meshgrid(*y_axes, indexing="ij")
    ypts = np.stack([m.ravel() for m in mesh], axis=-1)
    wmesh = np.meshgrid(*y_weights, indexing="ij")
    wts = np.ones(len(ypts))
    for w in wmesh:
        wts = wts * w.ravel()
    fvals = np.asarray(f_on_grid, dtype=complex).ravel()
    if fvals.shape[0] != ypts.shape[0]:
        raise ValueError("f_on_grid shape does not match the y grid")
    out = np.empty(len(x_points), dtype=complex)
    for j, x in enumerate(x_points):
        acc = 0.0 + 0.0j
        for yv, w, fv in zip(ypts, wts, fvals):
            acc += w * fv * eval_kernel(spec, x, yv, quad)
        out[j] = acc
    return out
