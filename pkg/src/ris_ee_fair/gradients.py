"""Analytic complex gradients of the lower-bound rates, fairness penalty and
augmented Lagrangian with respect to each design block.

Gradient convention: the returned arrays are ascent directions in the real
inner product, i.e. for a real-valued objective f and a complex perturbation
v, d/dt f(x + t v) = Re(<g, v>) = Re(sum(conj(g) * v)). The finite-difference
oracle in `verification` pins this convention.

Ratios in the printed gradient forms divide by |c^H G A d| and ||d||; below
`GUARD` those denominators are floored (the objective is nonsmooth there) and
the activation count is reported.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _assembly as asm
from . import _kernels as kern
from .channel_model import ChannelRealization
from .objectives import (
    EE_SCALE,
    DesignVariables,
    FairnessSpec,
    PowerModel,
    penalty_from_rates,
    total_power,
)

GUARD = 1e-12
BLOCKS = ("d", "a", "theta", "c")


@dataclass
class GradientBundle:
    """Gradients of one scalar objective w.r.t. all four blocks."""

    d: np.ndarray
    a: np.ndarray
    theta: np.ndarray
    c: np.ndarray
    guard_hits: int = 0


class RatePoint:
    """Lower-bound rate terms and lazily-built block features at one point.

    Reused across the per-block gradient calls so S, the denominators and the
    robustness rows are computed once.
    """

    def __init__(self, vars: DesignVariables, ch: ChannelRealization, noise_power: float):
        self.vars = vars
        self.ch = ch
        self.dims = ch.dims
        self.ustream = asm.user_of_stream(ch.dims)
        self.G = asm.effective_channels(ch, vars.theta, estimated=True)
        self.S = asm.stream_matrix(self.G, vars.a, vars.d, vars.c, ch.dims, self.ustream)
        self.dnorm = np.linalg.norm(vars.d, axis=0)
        self.dsn, self.rho = asm.robustness_rows(ch, self.ustream)
        noise = np.full(ch.dims.n_streams, float(noise_power))
        self.rates, self.f, self.g = kern.stream_rates(
            self.S, self.dnorm, self.dsn, self.rho, noise, GUARD)

    def user_rates(self) -> np.ndarray:
        return self.rates.reshape(self.dims.k, self.dims.l).sum(axis=1)

    def grad(self, block: str, lam: np.ndarray):
        """Gradient of sum_r lam_r * rate_r w.r.t. one block."""
        v, dims = self.vars, self.dims
        args = (self.dnorm, self.dsn, self.rho, self.f, self.g, lam, GUARD)
        if block == "d":
            B = asm.b_rows(self.G, v.a, v.c, dims, self.ustream)
            return kern.grad_d(self.S, B, v.d, *args)
        if block == "a":
            P = asm.e_tensor(self.G, v.d, v.c, dims, self.ustream)
            return kern.grad_vec(self.S, P, *args)
        if block == "theta":
            P = asm.f_tensor(self.ch, v.a, v.d, v.c, dims, self.ustream)
            return kern.grad_vec(self.S, P, *args)
        if block == "c":
            J = asm.j_tensor(self.G, v.a, v.d, dims)
            return kern.grad_c(self.S, J, self.ustream, *args)
        raise ValueError(f"unknown block {block!r}")


def _one_hot(dims, k: int, l: int) -> np.ndarray:
    lam = np.zeros(dims.n_streams)
    lam[k * dims.l + l] = 1.0
    return lam


def _emit(grad_and_count, on_guard: str):
    grad, hits = grad_and_count
    if hits and on_guard == "warn":
        warnings.warn(f"singularity guard floored {hits} ratio terms", RuntimeWarning,
                      stacklevel=3)
    return grad


def grad_rate_wrt_d(vars, ch, noise_power, k, l, on_guard="warn") -> np.ndarray:
    """Gradient of the (k, l) lower-bound rate w.r.t. the full digital
    precoder; the (k, l) column carries the desired-signal case, every other
    column the two-fraction interference case."""
    pt = RatePoint(vars, ch, noise_power)
    return _emit(pt.grad("d", _one_hot(ch.dims, k, l)), on_guard)


def grad_rate_wrt_a(vars, ch, noise_power, k, l, on_guard="warn") -> np.ndarray:
    pt = RatePoint(vars, ch, noise_power)
    return _emit(pt.grad("a", _one_hot(ch.dims, k, l)), on_guard)


def grad_rate_wrt_theta(vars, ch, noise_power, k, l, on_guard="warn") -> np.ndarray:
    pt = RatePoint(vars, ch, noise_power)
    return _emit(pt.grad("theta", _one_hot(ch.dims, k, l)), on_guard)


def grad_rate_wrt_c(vars, ch, noise_power, k, l, on_guard="warn") -> np.ndarray:
    """Gradient of the (k, l) lower-bound rate w.r.t. the combiner matrix;
    only column (k, l) is nonzero."""
    pt = RatePoint(vars, ch, noise_power)
    return _emit(pt.grad("c", _one_hot(ch.dims, k, l)), on_guard)


def penalty_user_coeffs(user_rates: np.ndarray, spec: FairnessSpec) -> np.ndarray:
    """d penalty / d R_k = (2/w_k) * (rho*K*r_k - sum_j r_j), r = R/w."""
    r = user_rates / spec.weights
    return (2.0 / spec.weights) * (spec.rho * r.size * r - r.sum())


def grad_penalty(vars, ch, noise_power, spec: FairnessSpec, block: str,
                 on_guard="warn") -> np.ndarray:
    """Gradient of the fairness penalty (at fixed slack mu) w.r.t. one block."""
    pt = RatePoint(vars, ch, noise_power)
    coeffs = penalty_user_coeffs(pt.user_rates(), spec)
    return _emit(pt.grad(block, coeffs[pt.ustream]), on_guard)


def grad_lagrangian(vars, ch, pm: PowerModel, spec: FairnessSpec,
                    gamma: float, omega: float, block: str,
                    on_guard="warn") -> np.ndarray:
    """Gradient of the augmented Lagrangian w.r.t. one block. Only the digital
    precoder sees the power quotient term (the other blocks leave P_tot
    unchanged)."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    pt = RatePoint(vars, ch, pm.noise_power)
    grad, hits = lagrangian_block_grad(pt, vars, pm, spec, gamma, omega, block)
    return _emit((grad, hits), on_guard)


def lagrangian_block_grad(pt: RatePoint, vars: DesignVariables, pm: PowerModel,
                          spec: FairnessSpec, gamma: float, omega: float,
                          block: str):
    """Shared fast path: one weighted kernel call per block plus the quotient
    term for the digital precoder."""
    user_rates = pt.user_rates()
    g_val = penalty_from_rates(user_rates / spec.weights, spec.rho, vars.mu)
    p_tot = total_power(vars, pm)
    esc = EE_SCALE * pm.bandwidth_hz
    lam_pen = gamma + g_val / omega
    lam = np.full(pt.dims.n_streams, esc / p_tot)
    lam -= lam_pen * penalty_user_coeffs(user_rates, spec)[pt.ustream]
    grad, hits = pt.grad(block, lam)
    if block == "d":
        r_sum = float(pt.rates.sum())
        grad = grad - esc * r_sum * (2.0 * pm.amp_factor) * vars.d / p_tot**2
    return grad, hits


def lagrangian_gradient_bundle(vars, ch, pm, spec, gamma, omega) -> GradientBundle:
    """All four block gradients of the augmented Lagrangian at one point."""
    pt = RatePoint(vars, ch, pm.noise_power)
    outs = {}
    hits = 0
    for block in BLOCKS:
        outs[block], h = lagrangian_block_grad(pt, vars, pm, spec, gamma, omega, block)
        hits += h
    return GradientBundle(d=outs["d"], a=outs["a"], theta=outs["theta"],
                          c=outs["c"], guard_hits=hits)
