"""Convergent Frobenius expansions of r f' = (N + r P) f about r = 0.

P is constant, so the expansions are entire in r; they are summed until the
terms drop below machine precision relative to the partial sum.  Exponents
s of the expansions never differ by a positive integer here (the branches
are r^{+-gamma} with gamma < 1/2, r^{+-i gamma}, or the recessive branch
r^{gamma} with gamma >= 1/2), so no resonant log terms appear except in the
critical case where N is nilpotent.
"""

from __future__ import annotations

import numpy as np

MAX_TERMS = 400
_EPS = 1e-17


def _n_terms_needed(coeff_norms, r_max):
    total = 0.0
    for n, c in enumerate(coeff_norms):
        term = c * r_max**n
        total = max(total, term)
        if n > 2 and term <= _EPS * total:
            return n + 1
    return None


def power_series(N, P, s, c0, r, order: int | None = None) -> np.ndarray:
    """Values of r^s * sum_n c_n r^n with (s + n - N) c_n = P c_{n-1}.

    ``order=0`` returns the leading term only; ``order=None`` sums to
    machine precision on the given radii.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    c = np.asarray(c0, dtype=complex)
    coeffs = [c]
    if order != 0:
        r_max = float(r.max())
        eye = np.eye(2)
        limit = MAX_TERMS if order is None else order
        for n in range(1, limit + 1):
            c = np.linalg.solve((s + n) * eye - N, P @ c)
            coeffs.append(c)
            if order is None:
                done = _n_terms_needed([np.linalg.norm(x) for x in coeffs], r_max)
                if done is not None:
                    break
        else:
            if order is None:
                raise RuntimeError("Frobenius series did not converge; radius too large")
    coeffs = np.array(coeffs)
    # Horner in r
    acc = np.zeros((r.size, 2), dtype=complex)
    for c in coeffs[::-1]:
        acc = acc * r[:, None] + c[None, :]
    return acc * np.exp(s * np.log(r))[:, None]


def log_series(N, P, a0, r, order: int | None = None) -> np.ndarray:
    """Critical case (N^2 = 0): sum_n r^n (c_n + d_n log r) with c_0 = a0,
    d_0 = N a0, (n - N) d_n = P d_{n-1}, (n - N) c_n = P c_{n-1} - d_n."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    c = np.asarray(a0, dtype=complex)
    d = N @ c
    cs, ds = [c], [d]
    if order != 0:
        r_max = float(r.max())
        eye = np.eye(2)
        lg = max(1.0, abs(np.log(r_max)))
        limit = MAX_TERMS if order is None else order
        for n in range(1, limit + 1):
            lhs = n * eye - N
            d = np.linalg.solve(lhs, P @ d)
            c = np.linalg.solve(lhs, P @ c - d)
            cs.append(c)
            ds.append(d)
            if order is None:
                norms = [np.linalg.norm(x) + lg * np.linalg.norm(y) for x, y in zip(cs, ds)]
                if _n_terms_needed(norms, r_max) is not None:
                    break
        else:
            if order is None:
                raise RuntimeError("Frobenius series did not converge; radius too large")
    log_r = np.log(r)[:, None]
    acc_c = np.zeros((r.size, 2), dtype=complex)
    acc_d = np.zeros((r.size, 2), dtype=complex)
    for c, d in zip(cs[::-1], ds[::-1]):
        acc_c = acc_c * r[:, None] + c[None, :]
        acc_d = acc_d * r[:, None] + d[None, :]
    return acc_c + acc_d * log_r
