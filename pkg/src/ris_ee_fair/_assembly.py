"""Shared assembly of effective channels, per-block feature vectors and the
stream-gain matrix S[r, c] = c_r^H G_{user(r)} A d_c.

Streams are flattened user-major, r = k*L + l. The four per-block feature
families (b for the digital precoder, e for the analog precoder, f for the
RIS coefficients, J for the combiners) reproduce the same scalars S through
four different inner products; the tests pin that equivalence.
"""

from __future__ import annotations

import numpy as np

from .channel_model import ChannelRealization, SystemDims


def user_of_stream(dims: SystemDims) -> np.ndarray:
    """Stream index r = k*L + l -> user k."""
    return np.repeat(np.arange(dims.k), dims.l)


def analog_matrix(a: np.ndarray, dims: SystemDims) -> np.ndarray:
    """Block-diagonal analog precoder A (M*N_T x M) from the stacked vector."""
    A = np.zeros((dims.n_bs, dims.m), dtype=complex)
    for m in range(dims.m):
        A[m * dims.n_t:(m + 1) * dims.n_t, m] = a[m * dims.n_t:(m + 1) * dims.n_t]
    return A


def effective_channels(ch: ChannelRealization, theta: np.ndarray,
                       estimated: bool = True) -> np.ndarray:
    """All user channels G_u(theta), shape (K, N_R, M*N_T), via column-major
    de-vectorization of H_u @ theta."""
    h = ch.h_cascade_est if estimated else ch.h_cascade
    vecs = h @ theta  # (K, N_R*M*N_T)
    dims = ch.dims
    return vecs.reshape(dims.k, dims.n_bs, dims.n_r).transpose(0, 2, 1)


def combined_rows(G: np.ndarray, C: np.ndarray, ustream: np.ndarray) -> np.ndarray:
    """Rows E[r, :] = c_r^H G_{user(r)}, shape (R, M*N_T)."""
    return np.einsum("nr,rnb->rb", C.conj(), G[ustream])


def stream_matrix(G: np.ndarray, a: np.ndarray, D: np.ndarray, C: np.ndarray,
                  dims: SystemDims, ustream: np.ndarray) -> np.ndarray:
    """S[r, c] = c_r^H G_{user(r)} A d_c, shape (R, R)."""
    return combined_rows(G, C, ustream) @ analog_matrix(a, dims) @ D


def robustness_rows(ch: ChannelRealization, ustream: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(dsn, rho) per receiving stream: dsn = delta*sqrt(N_RIS), and the
    desired-signal deflation rho = (1 - delta/||H_hat||_F)^2."""
    delta = ch.delta_radius
    est_norms = np.linalg.norm(ch.h_cascade_est, axis=(1, 2))
    if np.any(delta > est_norms * (1.0 + 1e-12)):
        raise ValueError("error radius exceeds ||H_hat||_F; estimator not reliable")
    safe = np.where(est_norms > 0, est_norms, 1.0)
    rho_u = (1.0 - delta / safe) ** 2
    dsn_u = delta * np.sqrt(ch.dims.n_ris)
    return dsn_u[ustream], rho_u[ustream]


# --- per-block feature builders; see the kernel docstrings for how each is
# consumed. All satisfy feature^H x == S for their own variable x. -----------

def b_rows(G: np.ndarray, a: np.ndarray, C: np.ndarray, dims: SystemDims,
           ustream: np.ndarray) -> np.ndarray:
    """b_r = A^H G_{u(r)}^H c_r as rows, shape (R, M); S = conj(B) @ D."""
    return (combined_rows(G, C, ustream) @ analog_matrix(a, dims)).conj()


def e_tensor(G: np.ndarray, D: np.ndarray, C: np.ndarray, dims: SystemDims,
             ustream: np.ndarray) -> np.ndarray:
    """e_{r,c} = D_tilde_c^H G_{u(r)}^H c_r, shape (R, R, M*N_T); D_tilde_c is
    the diagonal of d_c replicated per subarray, so S[r,c] = e_{r,c}^H a."""
    E = combined_rows(G, C, ustream)  # (R, MNT)
    d_rep = np.repeat(D, dims.n_t, axis=0)  # (MNT, R)
    return np.conj(E[:, None, :] * d_rep.T[None, :, :])


def f_tensor(ch: ChannelRealization, a: np.ndarray, D: np.ndarray, C: np.ndarray,
             dims: SystemDims, ustream: np.ndarray, estimated: bool = True) -> np.ndarray:
    """f_{r,c} = H_{u(r)}^H kron(conj(A d_c), c_r), shape (R, R, N_RIS), so
    that S[r,c] = f_{r,c}^H theta (scalar-vectorization identity)."""
    AD = analog_matrix(a, dims) @ D  # (MNT, R)
    kt = np.einsum("ic,jr->rcij", AD.conj(), C)
    kt = kt.reshape(dims.n_streams, dims.n_streams, dims.cascade_rows)
    h = ch.h_cascade_est if estimated else ch.h_cascade
    hH = h.conj().transpose(0, 2, 1)  # (K, N_RIS, N_R*M*N_T)
    return np.einsum("rnq,rcq->rcn", hH[ustream], kt)


def j_tensor(G: np.ndarray, a: np.ndarray, D: np.ndarray, dims: SystemDims) -> np.ndarray:
    """J[u, :, c] = G_u A d_c, shape (K, N_R, R); S[r,c] = J[u(r),:,c]^H c_r
    conjugated appropriately (the combiner block reads c_r^H J)."""
    return G @ (analog_matrix(a, dims) @ D)


# --- S evaluation from cached features (used by the solver line searches) ---

def s_from_b(B: np.ndarray, D: np.ndarray) -> np.ndarray:
    return B.conj() @ D


def s_from_e(P: np.ndarray, a: np.ndarray) -> np.ndarray:
    return np.einsum("rcn,n->rc", P.conj(), a)


def s_from_f(P: np.ndarray, theta: np.ndarray) -> np.ndarray:
    return P.conj() @ theta


def s_from_j(J: np.ndarray, C: np.ndarray, ustream: np.ndarray) -> np.ndarray:
    return np.einsum("nr,rnc->rc", C.conj(), J[ustream])
