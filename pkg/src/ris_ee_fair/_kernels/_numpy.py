"""Pure-NumPy reference implementation of the hot rate/gradient kernels.

All kernels work on a flattened stream index r = k*L + l (user-major). Inputs:
  S     (R, R) complex: S[r, c] = c_r^H G_{user(r)} A d_c
  dnorm (R,)   float:   ||d_c||_2
  dsn   (R,)   float:   delta_{user(r)} * sqrt(N_RIS), per receiving stream
  rho   (R,)   float:   (1 - delta/||H_hat||_F)^2, per receiving stream
  noise (R,)   float:   per-stream noise power in the SINR denominator
F is the full log argument of the lower-bound rate, G the interference-plus-
noise part, so rate = log2(F) - log2(G). Ratios whose denominators fall below
`guard` are floored there; each kernel reports how many entries were floored.
"""

import numpy as np

LN2 = float(np.log(2.0))


def stream_rates(S, dnorm, dsn, rho, noise, guard):
    a = np.abs(S)
    sig = rho * np.diag(a) ** 2
    cross = (a + dsn[:, None] * dnorm[None, :]) ** 2
    np.fill_diagonal(cross, 0.0)
    g = cross.sum(axis=1) + noise
    f = g + sig
    return np.log2(f / g), f, g


def _weights(S, dnorm, dsn, rho, f, g, lam, guard):
    """Per-(r, c) scalar weight on the feature-vector term of the gradient:
    off-diagonal (1 + dsn_r*dnorm_c/|S_rc|)*(1/f_r - 1/g_r)*S_rc*lam_r, the
    diagonal carrying the desired-signal term rho_r*S_rr/f_r*lam_r."""
    a = np.abs(S)
    a_cl = np.maximum(a, guard)
    num = dsn[:, None] * dnorm[None, :]
    n_guard = int(np.count_nonzero((a < guard) & (num > 0.0))
                  - np.count_nonzero((np.diag(a) < guard) & (np.diag(num) > 0.0)))
    coef1 = 1.0 + num / a_cl
    w = (lam * (1.0 / f - 1.0 / g))[:, None] * coef1 * S
    np.fill_diagonal(w, lam * rho * np.diag(S) / f)
    return (2.0 / LN2) * w, n_guard


def grad_d(S, B, D, dnorm, dsn, rho, f, g, lam, guard):
    """Gradient of sum_r lam_r * rate_r w.r.t. the digital precoder.

    B (R, M) holds the rows b_r = A^H G_hat_{user(r)}^H c_r, so that
    S = conj(B) @ D. Output shape (M, R)."""
    w, n_guard = _weights(S, dnorm, dsn, rho, f, g, lam, guard)
    out = B.T @ w
    # identity-term coefficients of the interference case
    a = np.abs(S)
    dn_cl = np.maximum(dnorm, guard)
    n_guard += int(np.count_nonzero((dnorm < guard)[None, :] & (dsn[:, None] * a > 0.0)))
    coef2 = dsn[:, None] ** 2 + dsn[:, None] * a / dn_cl[None, :]
    wid = (lam * (1.0 / f - 1.0 / g))[:, None] * coef2
    np.fill_diagonal(wid, 0.0)
    out += (2.0 / LN2) * D * wid.sum(axis=0)[None, :]
    return out, n_guard


def grad_vec(S, P, dnorm, dsn, rho, f, g, lam, guard):
    """Gradient of sum_r lam_r * rate_r w.r.t. a stacked vector block (analog
    precoder or RIS coefficients). P (R, R, n) holds the feature vectors with
    S[r, c] = P[r, c, :]^H x. Output shape (n,)."""
    w, n_guard = _weights(S, dnorm, dsn, rho, f, g, lam, guard)
    return np.einsum("rc,rcn->n", w, P), n_guard


def grad_c(S, J, ustream, dnorm, dsn, rho, f, g, lam, guard):
    """Gradient of sum_r lam_r * rate_r w.r.t. the normalized combiners.

    J (K, N_R, R) holds J[u, :, c] = G_hat_u @ A @ d_c; the rate of stream r
    depends on its own combiner only, so column r of the output collects
    exactly the stream-r terms. Output shape (N_R, R)."""
    w, n_guard = _weights(S, dnorm, dsn, rho, f, g, lam, guard)
    return np.einsum("rc,rnc->nr", w, J[ustream]), n_guard
