"""Saleh-Valenzuela channel synthesis for a BS -> RIS -> UE mmWave downlink.

Generates the BS-RIS channel H_T (N_RIS x M*N_T), the per-user RIS-UE
channels H_R[k] (N_R x N_RIS), the cascaded channels
H_k = H_T^T (Khatri-Rao) H_R[k] of shape (N_R*M*N_T) x N_RIS, and a
norm-bounded channel-estimation error on the cascaded channel.

Conventions used throughout:
  * vec() stacks columns (column-major), so vec(X @ diag(t) @ Y) = (Y^T kr X) t.
  * BS subarray elements are stacked element-fastest: index (m-1)*N_T + (n-1).
  * RIS elements are stacked row-fastest: index (ny-1)*n_x + (nx-1).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class SystemDims:
    """Array and stream dimensions of one downlink instance.

    m: RF chains / subarrays at the BS, n_t: antenna elements per subarray,
    (n_x, n_y): RIS grid, k: users, l: streams per user, n_r: UE antennas,
    d_sa: spacing between the first elements of adjacent subarrays in
    half-wavelength units (defaults to n_t, i.e. contiguous subarrays).
    """

    m: int
    n_t: int
    n_x: int
    n_y: int
    k: int
    l: int
    n_r: int
    d_sa: float | None = None

    def __post_init__(self):
        for name in ("m", "n_t", "n_x", "n_y", "k", "l", "n_r"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        # Stream-count feasibility: L*K streams through M RF chains, L per UE.
        if self.l * self.k > self.m:
            raise ValueError(f"need L*K <= M, got L*K={self.l * self.k}, M={self.m}")
        if self.l > self.n_r:
            raise ValueError(f"need L <= N_R, got L={self.l}, N_R={self.n_r}")
        if self.d_sa is None:
            object.__setattr__(self, "d_sa", float(self.n_t))
        elif self.d_sa <= 0:
            raise ValueError("d_sa must be positive")

    @property
    def n_ris(self) -> int:
        return self.n_x * self.n_y

    @property
    def n_bs(self) -> int:
        """Total BS antenna elements M*N_T."""
        return self.m * self.n_t

    @property
    def n_streams(self) -> int:
        return self.k * self.l

    @property
    def cascade_rows(self) -> int:
        """Rows of the cascaded channel: N_R * M * N_T."""
        return self.n_r * self.n_bs


@dataclass(frozen=True)
class PathSet:
    """Gains and angles of one multipath link; index 0 is the LoS path.

    `ula_angle` is the angle at the linear-array end of the link (AoD at the
    BS for the BS-RIS link, AoA at the UE for the RIS-UE link); `ris_az` and
    `ris_el` are the azimuth/elevation at the RIS end.
    """

    gains: np.ndarray
    ula_angle: np.ndarray
    ris_az: np.ndarray
    ris_el: np.ndarray

    def __post_init__(self):
        n = len(self.gains)
        if n < 1:
            raise ValueError("a link needs at least one path")
        for name in ("gains", "ula_angle", "ris_az", "ris_el"):
            arr = np.asarray(getattr(self, name))
            if arr.shape != (n,):
                raise ValueError(f"{name} must have shape ({n},)")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")


@dataclass(frozen=True)
class ScenarioGeometry:
    """Node placement and path statistics for channel synthesis.

    Positions are 3D in meters. UE positions are drawn uniformly in the box
    [ue_box_min, ue_box_max]. Path gains follow `gain_model`:
      * "scaled-distance": LoS amplitude ref_gain * ref_distance / d with a
        uniform random phase (normalized units, keeps link SNRs in the
        operating range of the power model),
      * "fspl": LoS amplitude lambda_c / (4 pi d) at `carrier_ghz`.
    NLoS path gains are complex Gaussian, `nlos_extra_loss_db` below the LoS
    power of the same link. NLoS azimuth angles are uniform on [0, pi),
    elevations at the RIS uniform on [0, pi/2].
    """

    bs_pos: tuple = (0.0, 0.0, 10.0)
    ris_pos: tuple = (15.0, -15.0, 5.0)
    ue_box_min: tuple = (15.0, -15.0, 0.0)
    ue_box_max: tuple = (30.0, 15.0, 2.0)
    paths_bs_ris: int = 4
    paths_ris_ue: int = 4
    gain_model: str = "scaled-distance"
    ref_gain: float = 1e-2
    ref_distance: float = 10.0
    nlos_extra_loss_db: float = 10.0
    carrier_ghz: float = 28.0

    def __post_init__(self):
        if self.paths_bs_ris < 1 or self.paths_ris_ue < 1:
            raise ValueError("path counts must be >= 1")
        if self.gain_model not in ("scaled-distance", "fspl"):
            raise ValueError(f"unknown gain_model {self.gain_model!r}")
        if self.ref_gain <= 0 or self.ref_distance <= 0 or self.carrier_ghz <= 0:
            raise ValueError("gains, distances and carrier frequency must be positive")

    def los_amplitude(self, distance: float) -> float:
        if distance <= 0:
            raise ValueError("node distances must be positive")
        if self.gain_model == "fspl":
            lam = SPEED_OF_LIGHT / (self.carrier_ghz * 1e9)
            return lam / (4.0 * np.pi * distance)
        return self.ref_gain * self.ref_distance / distance


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of all channels plus the bounded-error CSI model.

    h_cascade[k] is the cascaded channel H_k = H_T^T (Khatri-Rao) H_R[k];
    h_cascade_est[k] its estimate with ||delta[k]||_F <= delta_radius[k].
    With no estimation error applied, estimate == truth and the radii are 0.
    """

    dims: SystemDims
    h_t: np.ndarray            # (N_RIS, M*N_T)
    h_r: np.ndarray            # (K, N_R, N_RIS)
    h_cascade: np.ndarray      # (K, N_R*M*N_T, N_RIS)
    h_cascade_est: np.ndarray  # (K, N_R*M*N_T, N_RIS)
    delta: np.ndarray | None   # (K, N_R*M*N_T, N_RIS) true error, or None
    delta_radius: np.ndarray = field(default=None)  # (K,)

    def __post_init__(self):
        if self.delta_radius is None:
            object.__setattr__(self, "delta_radius", np.zeros(self.dims.k))

    def est_frobenius(self, k: int) -> float:
        return float(np.linalg.norm(self.h_cascade_est[k], "fro"))


def bs_steering(dims: SystemDims, phi: float) -> np.ndarray:
    """BS array response, element n of subarray m at phase
    pi*((n-1) + (m-1)*d_sa)*cos(phi); stacked element-fastest."""
    n = np.arange(dims.n_t)
    m = np.arange(dims.m)
    offsets = (n[None, :] + m[:, None] * dims.d_sa).ravel()  # (M*N_T,)
    return np.exp(1j * np.pi * offsets * np.cos(phi))


def ris_steering(n_x: int, n_y: int, theta_az: float, phi_el: float) -> np.ndarray:
    """UPA response of an n_x-by-n_y RIS, phase
    pi*[(nx-1)cos(az)sin(el) + (ny-1)sin(az)sin(el)]; stacked row-fastest."""
    if n_x < 1 or n_y < 1:
        raise ValueError("RIS grid dimensions must be >= 1")
    ix = np.arange(n_x)
    iy = np.arange(n_y)
    phase = (
        ix[None, :] * np.cos(theta_az) * np.sin(phi_el)
        + iy[:, None] * np.sin(theta_az) * np.sin(phi_el)
    ).ravel()
    return np.exp(1j * np.pi * phase)


def ue_steering(n_r: int, xi: float) -> np.ndarray:
    """UE linear-array response, element i at phase pi*(i-1)*cos(xi)."""
    if n_r < 1:
        raise ValueError("n_r must be >= 1")
    return np.exp(1j * np.pi * np.arange(n_r) * np.cos(xi))


def khatri_rao(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Columnwise Khatri-Rao product: column n is kron(a[:, n], b[:, n])."""
    if a.shape[1] != b.shape[1]:
        raise ValueError("column counts must match")
    return (a[:, None, :] * b[None, :, :]).reshape(a.shape[0] * b.shape[0], a.shape[1])


def cascade_channel(h_t: np.ndarray, h_r_k: np.ndarray) -> np.ndarray:
    """Cascaded channel H_k = H_T^T (Khatri-Rao) H_R[k], so that
    vec(H_R[k] @ diag(theta) @ H_T) = H_k @ theta (column-major vec)."""
    return khatri_rao(h_t.T, h_r_k)


def scale_to_ball(x: np.ndarray, radius: float) -> np.ndarray:
    """Project x onto the Frobenius ball of the given radius."""
    nrm = np.linalg.norm(x)
    if nrm <= radius:
        return x.copy()
    return x * (radius / nrm)


def _ula_angle(direction: np.ndarray) -> float:
    """Polar angle of a unit direction w.r.t. the global x-axis (array axis)."""
    return float(np.arccos(np.clip(direction[0], -1.0, 1.0)))


def _ris_angles(direction: np.ndarray) -> tuple[float, float]:
    """(azimuth, elevation) of a unit direction in the RIS local frame; the
    panel lies in the global x-z plane with its normal along +y."""
    az = float(np.arctan2(direction[2], direction[0]))
    el = float(np.arccos(np.clip(direction[1], -1.0, 1.0)))
    return az, el


def _unit(vec: np.ndarray) -> tuple[np.ndarray, float]:
    d = float(np.linalg.norm(vec))
    if d <= 0:
        raise ValueError("coincident node positions give a non-physical geometry")
    return vec / d, d


def _draw_link_paths(
    rng: np.random.Generator,
    geometry: ScenarioGeometry,
    n_paths: int,
    distance: float,
    los_ula: float,
    los_az: float,
    los_el: float,
) -> PathSet:
    los_amp = geometry.los_amplitude(distance)
    gains = np.empty(n_paths, dtype=complex)
    gains[0] = los_amp * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
    if n_paths > 1:
        sigma = los_amp * 10.0 ** (-geometry.nlos_extra_loss_db / 20.0)
        gains[1:] = sigma * (
            rng.standard_normal(n_paths - 1) + 1j * rng.standard_normal(n_paths - 1)
        ) / np.sqrt(2.0)
    ula = np.concatenate(([los_ula], rng.uniform(0.0, np.pi, n_paths - 1)))
    az = np.concatenate(([los_az], rng.uniform(0.0, np.pi, n_paths - 1)))
    el = np.concatenate(([los_el], rng.uniform(0.0, np.pi / 2.0, n_paths - 1)))
    return PathSet(gains=gains, ula_angle=ula, ris_az=az, ris_el=el)


def bs_ris_channel(dims: SystemDims, paths: PathSet) -> np.ndarray:
    """H_T = sum_l gain_l * a_ris(az_l, el_l) @ a_bs(ula_l)^H."""
    h = np.zeros((dims.n_ris, dims.n_bs), dtype=complex)
    for g, ang, az, el in zip(paths.gains, paths.ula_angle, paths.ris_az, paths.ris_el):
        h += g * np.outer(ris_steering(dims.n_x, dims.n_y, az, el), bs_steering(dims, ang).conj())
    return h


def ris_ue_channel(dims: SystemDims, paths: PathSet) -> np.ndarray:
    """H_R[k] = sum_l gain_l * a_ue(ula_l) @ a_ris(az_l, el_l)^H."""
    h = np.zeros((dims.n_r, dims.n_ris), dtype=complex)
    for g, ang, az, el in zip(paths.gains, paths.ula_angle, paths.ris_az, paths.ris_el):
        h += g * np.outer(ue_steering(dims.n_r, ang), ris_steering(dims.n_x, dims.n_y, az, el).conj())
    return h


def draw_scenario_paths(
    dims: SystemDims, geometry: ScenarioGeometry, rng: np.random.Generator
) -> tuple[PathSet, list[PathSet], np.ndarray]:
    """Draw UE positions and per-link path sets for one realization."""
    bs = np.asarray(geometry.bs_pos, dtype=float)
    ris = np.asarray(geometry.ris_pos, dtype=float)
    lo = np.asarray(geometry.ue_box_min, dtype=float)
    hi = np.asarray(geometry.ue_box_max, dtype=float)
    if np.any(hi < lo):
        raise ValueError("ue_box_max must dominate ue_box_min")

    dir_bs_to_ris, d_t = _unit(ris - bs)
    # arrival direction at the RIS points from the RIS towards the BS
    az_t, el_t = _ris_angles(-dir_bs_to_ris)
    paths_t = _draw_link_paths(
        rng, geometry, geometry.paths_bs_ris, d_t,
        los_ula=_ula_angle(dir_bs_to_ris), los_az=az_t, los_el=el_t,
    )

    ue_pos = rng.uniform(lo, hi, size=(dims.k, 3))
    paths_r = []
    for k in range(dims.k):
        dir_ris_to_ue, d_r = _unit(ue_pos[k] - ris)
        az_r, el_r = _ris_angles(dir_ris_to_ue)
        # AoA at the UE points from the UE back towards the RIS
        paths_r.append(
            _draw_link_paths(
                rng, geometry, geometry.paths_ris_ue, d_r,
                los_ula=_ula_angle(-dir_ris_to_ue), los_az=az_r, los_el=el_r,
            )
        )
    return paths_t, paths_r, ue_pos


def synthesize_channels(
    dims: SystemDims, geometry: ScenarioGeometry, rng_seed
) -> ChannelRealization:
    """Draw one channel realization; deterministic for a given seed."""
    rng = np.random.default_rng(rng_seed)
    paths_t, paths_r, _ = draw_scenario_paths(dims, geometry, rng)
    h_t = bs_ris_channel(dims, paths_t)
    h_r = np.stack([ris_ue_channel(dims, p) for p in paths_r])
    h_cascade = np.stack([cascade_channel(h_t, h_r[k]) for k in range(dims.k)])
    return ChannelRealization(
        dims=dims,
        h_t=h_t,
        h_r=h_r,
        h_cascade=h_cascade,
        h_cascade_est=h_cascade.copy(),
        delta=None,
        delta_radius=np.zeros(dims.k),
    )


def _error_draw(
    rng: np.random.Generator, h_k: np.ndarray, beta: float, mode: str
) -> np.ndarray:
    """One error matrix Delta with ||Delta||_F = frac * beta * ||H - Delta||_F.

    `frac` is 1 in "boundary" mode; in "ball" mode it is u^(1/(2*dim)) for
    uniform u, which makes the radius fraction uniform-in-ball over the
    2*dim-real-dimensional error space. Solving for the norm jointly with the
    estimate keeps ||Delta||_F <= beta*||H_hat||_F exact by construction.
    """
    shape = h_k.shape
    dim = h_k.size
    u0 = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    u0 /= np.linalg.norm(u0)
    frac = 1.0 if mode == "boundary" else float(rng.uniform()) ** (1.0 / (2.0 * dim))
    fb = frac * beta
    if fb == 0.0:
        return np.zeros(shape, dtype=complex)
    # t = fb*||H - t*U0||_F is quadratic in t with a unique positive root.
    b = float(np.real(np.vdot(u0, h_k)))
    c2 = 1.0 / fb**2 - 1.0
    h2 = float(np.linalg.norm(h_k)) ** 2
    t = (-b + np.sqrt(b * b + c2 * h2)) / c2
    return t * u0


def apply_csi_error(
    ch: ChannelRealization, beta: float, rng_seed, mode: str = "ball"
) -> ChannelRealization:
    """Attach a bounded estimation error: per user, delta_k = beta*||H_hat_k||_F
    and a random error matrix inside (mode="ball") or on (mode="boundary") the
    Frobenius sphere of that radius, with H_hat_k = H_k - Delta_k.

    beta must be < 1 so that ||H_hat_k||_F >= delta_k (a reliable estimator).
    """
    if not 0.0 <= beta < 1.0:
        raise ValueError("beta must lie in [0, 1)")
    if mode not in ("ball", "boundary"):
        raise ValueError(f"unknown error mode {mode!r}")
    rng = np.random.default_rng(rng_seed)
    k_users = ch.dims.k
    delta = np.zeros_like(ch.h_cascade)
    est = ch.h_cascade.copy()
    radius = np.zeros(k_users)
    for k in range(k_users):
        delta[k] = _error_draw(rng, ch.h_cascade[k], beta, mode)
        est[k] = ch.h_cascade[k] - delta[k]
        radius[k] = beta * np.linalg.norm(est[k], "fro")
    return replace(ch, h_cascade_est=est, delta=delta, delta_radius=radius)


def unvec_channel(vec: np.ndarray, dims: SystemDims) -> np.ndarray:
    """Inverse of the column-major vec: (N_R*M*N_T,) -> (N_R, M*N_T)."""
    return vec.reshape(dims.n_r, dims.n_bs, order="F")


def effective_channel(
    ch: ChannelRealization, theta: np.ndarray, k: int, estimated: bool = False
) -> np.ndarray:
    """Overall user-k channel G_k = H_R[k] @ diag(theta) @ H_T, either from the
    true factors or reconstructed from the estimated cascaded channel."""
    theta = np.asarray(theta)
    if theta.shape != (ch.dims.n_ris,):
        raise ValueError("theta has the wrong length")
    if np.max(np.abs(np.abs(theta) - 1.0)) > 1e-9:
        raise ValueError("RIS coefficients must be unit modulus")
    if estimated:
        return unvec_channel(ch.h_cascade_est[k] @ theta, ch.dims)
    return (ch.h_r[k] * theta[None, :]) @ ch.h_t
