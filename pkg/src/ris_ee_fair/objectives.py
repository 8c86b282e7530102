"""Scalar objectives: stream rates, robust lower-bound rates, power, energy
efficiency, Jain's fairness index, the fairness penalty and the augmented
Lagrangian.

Energy efficiency is reported in Mbit per Joule (bandwidth-scaled sum rate
over total consumed power); the lower-bound variants evaluate the robust rate
bound on the estimated channel in place of the true rate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _assembly as asm
from . import _kernels as kern
from .channel_model import ChannelRealization, SystemDims

# EE values are expressed in Mbit/J so the penalty terms and the objective
# live on comparable scales with the reference penalty weight omega = 10.
EE_SCALE = 1e-6


@dataclass
class DesignVariables:
    """The four optimization blocks plus the fairness slack.

    d: digital precoder (M x K*L), columns ordered user-major;
    a: stacked analog precoder (M*N_T,), entries of modulus 1/sqrt(N_T);
    theta: RIS coefficients (N_RIS,), unit modulus;
    c: normalized combiners (N_R x K*L), unit-norm columns;
    mu: nonnegative slack of the fairness penalty.
    """

    d: np.ndarray
    a: np.ndarray
    theta: np.ndarray
    c: np.ndarray
    mu: float = 0.0

    def copy(self) -> "DesignVariables":
        return DesignVariables(self.d.copy(), self.a.copy(), self.theta.copy(),
                               self.c.copy(), self.mu)

    def validate(self, dims: SystemDims, p_max: float | None = None, rtol: float = 1e-9):
        r = dims.n_streams
        if self.d.shape != (dims.m, r):
            raise ValueError(f"d must be (M, K*L) = ({dims.m}, {r})")
        if self.a.shape != (dims.n_bs,):
            raise ValueError(f"a must have length M*N_T = {dims.n_bs}")
        if self.theta.shape != (dims.n_ris,):
            raise ValueError(f"theta must have length N_RIS = {dims.n_ris}")
        if self.c.shape != (dims.n_r, r):
            raise ValueError(f"c must be (N_R, K*L) = ({dims.n_r}, {r})")
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")
        if p_max is not None and np.linalg.norm(self.d) ** 2 > p_max * (1 + rtol):
            raise ValueError("digital precoder exceeds the transmit power budget")
        if np.max(np.abs(np.abs(self.a) * np.sqrt(dims.n_t) - 1.0)) > rtol:
            raise ValueError("analog precoder violates the constant-modulus constraint")
        if np.max(np.abs(np.abs(self.theta) - 1.0)) > rtol:
            raise ValueError("RIS coefficients must be unit modulus")
        if np.max(np.abs(np.linalg.norm(self.c, axis=0) - 1.0)) > rtol:
            raise ValueError("combiner columns must be unit norm")


@dataclass
class PowerModel:
    """Every power constant of the consumption model plus noise and bandwidth.

    All powers in watts: p_bs static BS power, amp_factor the amplifier
    inefficiency multiplying ||D||_F^2, p_rf_t per BS phase shifter, p_theta
    per RIS element, p_ue/p_r per-user static and receive powers, p_max the
    transmit budget, noise_power the per-receive-antenna AWGN power.
    """

    p_bs: float
    amp_factor: float
    p_rf_t: float
    p_theta: float
    p_ue: np.ndarray
    p_r: np.ndarray
    p_max: float
    noise_power: float
    bandwidth_hz: float

    def __post_init__(self):
        self.p_ue = np.atleast_1d(np.asarray(self.p_ue, dtype=float))
        self.p_r = np.atleast_1d(np.asarray(self.p_r, dtype=float))
        vals = [self.p_bs, self.p_rf_t, self.p_theta, self.p_max,
                self.noise_power, self.bandwidth_hz]
        if any(v < 0 for v in vals) or np.any(self.p_ue < 0) or np.any(self.p_r < 0):
            raise ValueError("power-model constants must be nonnegative")
        if self.amp_factor < 1.0:
            raise ValueError("the amplifier factor cannot be below 1")


@dataclass
class FairnessSpec:
    """Fairness target rho and per-user QoS weights.

    Jain's index lives in [1/K, 1], so rho at or below 1/K is vacuous (always
    satisfied); values up to 1 demand progressively flatter weighted rates.
    """

    rho: float
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        if not 0.0 < self.rho <= 1.0:
            raise ValueError("rho must lie in (0, 1]")
        if self.weights is None:
            raise ValueError("per-user weights are required")
        self.weights = np.asarray(self.weights, dtype=float)
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")


def _stream_index(dims: SystemDims, k: int, l: int) -> int:
    if not (0 <= k < dims.k and 0 <= l < dims.l):
        raise IndexError("stream index out of range")
    return k * dims.l + l


def _lb_inputs(vars: DesignVariables, ch: ChannelRealization):
    dims = ch.dims
    ustream = asm.user_of_stream(dims)
    G = asm.effective_channels(ch, vars.theta, estimated=True)
    S = asm.stream_matrix(G, vars.a, vars.d, vars.c, dims, ustream)
    dnorm = np.linalg.norm(vars.d, axis=0)
    dsn, rho = asm.robustness_rows(ch, ustream)
    return S, dnorm, dsn, rho


def lb_stream_rates(vars: DesignVariables, ch: ChannelRealization,
                    noise_power: float) -> np.ndarray:
    """All K*L robust lower-bound stream rates (bits/s/Hz), user-major."""
    S, dnorm, dsn, rho = _lb_inputs(vars, ch)
    noise = np.full(ch.dims.n_streams, float(noise_power))
    rates, _, _ = kern.stream_rates(S, dnorm, dsn, rho, noise, 1e-12)
    return rates


def robust_rate_lb(vars: DesignVariables, ch: ChannelRealization,
                   noise_power: float, k: int, l: int) -> float:
    """Robust lower bound on the rate of stream (k, l): the desired signal is
    deflated by rho_k, each interference term inflated by delta*sqrt(N_RIS)
    times the interferer's precoder norm."""
    return float(lb_stream_rates(vars, ch, noise_power)[_stream_index(ch.dims, k, l)])


def true_rate(vars: DesignVariables, ch: ChannelRealization, noise_power: float,
              k: int, l: int) -> float:
    """Achievable rate of stream (k, l) on the true channel. The combiner
    column may carry any positive scale; the rate is scale-invariant because
    the noise term is ||c||^2 * sigma^2."""
    dims = ch.dims
    r = _stream_index(dims, k, l)
    c_col = vars.c[:, r]
    cn2 = float(np.real(np.vdot(c_col, c_col)))
    if cn2 == 0.0:
        raise ValueError("zero combiner")
    G = asm.effective_channels(ch, vars.theta, estimated=False)
    row = (c_col.conj() @ G[k]) @ (asm.analog_matrix(vars.a, dims) @ vars.d)
    p = np.abs(row) ** 2
    sig = p[r]
    interf = float(p.sum() - sig)
    return float(np.log2(1.0 + sig / (interf + cn2 * noise_power)))


def sum_rate_lb(vars: DesignVariables, ch: ChannelRealization, noise_power: float) -> float:
    return float(lb_stream_rates(vars, ch, noise_power).sum())


def total_power(vars: DesignVariables, pm: PowerModel) -> float:
    """P_BS + xi*||D||_F^2 + M*N_T*P_RF + N_RIS*P_theta + sum_k(P_UE + P_R)."""
    return float(
        pm.p_bs
        + pm.amp_factor * np.linalg.norm(vars.d) ** 2
        + vars.a.size * pm.p_rf_t
        + vars.theta.size * pm.p_theta
        + pm.p_ue.sum() + pm.p_r.sum()
    )


def ee_lb(vars: DesignVariables, ch: ChannelRealization, pm: PowerModel) -> float:
    """Lower bound on the energy efficiency, Mbit per Joule."""
    rate_bits = pm.bandwidth_hz * sum_rate_lb(vars, ch, pm.noise_power)
    return EE_SCALE * rate_bits / total_power(vars, pm)


def ee_true(vars: DesignVariables, ch: ChannelRealization, pm: PowerModel) -> float:
    """True energy efficiency on the true channel, Mbit per Joule."""
    dims = ch.dims
    total = 0.0
    for k in range(dims.k):
        for l in range(dims.l):
            total += true_rate(vars, ch, pm.noise_power, k, l)
    return EE_SCALE * pm.bandwidth_hz * total / total_power(vars, pm)


def jain_index(weighted_rates: np.ndarray) -> float:
    """(sum r)^2 / (K sum r^2) in [1/K, 1]; an all-zero vector is defined as
    perfectly fair (degenerate 0/0 case)."""
    r = np.asarray(weighted_rates, dtype=float)
    denom = r.size * float(r @ r)
    if denom == 0.0:
        return 1.0
    return float(r.sum() ** 2 / denom)


def weighted_user_rates(vars: DesignVariables, ch: ChannelRealization,
                        noise_power: float, spec: FairnessSpec) -> np.ndarray:
    """Per-user weighted lower-bound rates r_k = (1/w_k) sum_l R_{k,l}."""
    rates = lb_stream_rates(vars, ch, noise_power)
    return rates.reshape(ch.dims.k, ch.dims.l).sum(axis=1) / spec.weights


def penalty_from_rates(user_rates: np.ndarray, rho: float, mu: float) -> float:
    """rho*K*sum(r^2) - (sum r)^2 + mu; nonpositive iff the Jain constraint
    holds with slack mu = 0."""
    r = np.asarray(user_rates, dtype=float)
    return float(rho * r.size * (r @ r) - r.sum() ** 2 + mu)


def penalty_value(vars: DesignVariables, ch: ChannelRealization,
                  noise_power: float, spec: FairnessSpec) -> float:
    return penalty_from_rates(
        weighted_user_rates(vars, ch, noise_power, spec), spec.rho, vars.mu)


def augmented_lagrangian(vars: DesignVariables, ch: ChannelRealization,
                         pm: PowerModel, spec: FairnessSpec,
                         gamma: float, omega: float) -> float:
    """ee_lb - gamma*G - G^2/(2*omega) with G the fairness penalty."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    g = penalty_value(vars, ch, pm.noise_power, spec)
    return ee_lb(vars, ch, pm) - gamma * g - g * g / (2.0 * omega)
