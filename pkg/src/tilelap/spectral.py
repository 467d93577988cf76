"""Eigenvalue computations and analytic reference spectra.

The rescaled spectrum n^2 * Spec(Delta_n) of the discretized Laplacian
approximates the spectrum of the (Friedrichs/Neumann) Laplacian of the
continuum surface; this module computes discrete eigenpairs
deterministically, provides closed-form reference spectra for flat tori
and rectangles, and fits empirical convergence orders.
"""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import minimize_scalar

DENSE_CUTOFF = 2000


def lowest_eigenpairs(mat, k, seed=0, dense_cutoff=DENSE_CUTOFF,
                      residual_tol=1e-8):
    """The k smallest eigenpairs of a sparse Hermitian matrix.

    Uses a dense solver below ``dense_cutoff`` and shift-invert Lanczos with
    a deterministic seeded start vector above it.  Returns (values, vectors,
    residuals) with values ascending and vectors in columns; raises if any
    residual |A v - lambda v| exceeds ``residual_tol``.
    """
    dim = mat.shape[0]
    if k >= dim:
        raise ValueError("need k < matrix dimension")
    if dim <= dense_cutoff:
        dense = mat.toarray() if sp.issparse(mat) else np.asarray(mat)
        vals, vecs = np.linalg.eigh(dense)
        vals, vecs = vals[:k], vecs[:, :k]
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(dim)
        vals, vecs = spla.eigsh(mat.tocsc(), k=k, sigma=-1e-2, which="LM",
                                v0=v0)
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    residuals = np.array([
        np.linalg.norm(mat @ vecs[:, i] - vals[i] * vecs[:, i])
        for i in range(k)])
    if residuals.max() > residual_tol:
        raise RuntimeError(
            "eigenpair residual %.3e exceeds tolerance" % residuals.max())
    return vals, vecs, residuals


def rescaled_spectrum(disc, k, seed=0):
    """First k eigenvalues of n^2 * Delta_n, plus the eigenvectors."""
    from .operators import laplacian

    vals, vecs, _ = lowest_eigenpairs(laplacian(disc), k, seed=seed)
    return disc.n ** 2 * vals, vecs


def reference_spectrum(kind, params, k):
    """First k continuum eigenvalues for an analytically solvable surface.

    kind "rectangle": params (a, b); Neumann spectrum
        pi^2 (p^2 / a^2 + q^2 / b^2), p, q >= 0.
    kind "torus": params (a, b, alpha, beta); flat torus with a rank-1
        bundle of holonomies e^{i alpha}, e^{i beta}:
        4 pi^2 ((p + alpha / 2 pi)^2 / a^2 + (q + beta / 2 pi)^2 / b^2).
    """
    if kind == "rectangle":
        a, b = params
        cut = int(np.ceil(np.sqrt(k) + 2)) * max(1, int(max(a, b))) + 2
        vals = [np.pi ** 2 * (p ** 2 / a ** 2 + q ** 2 / b ** 2)
                for p in range(cut) for q in range(cut)]
    elif kind == "torus":
        a, b, alpha, beta = params
        cut = int(np.ceil(np.sqrt(k))) + 3
        vals = [4 * np.pi ** 2 * ((p + alpha / (2 * np.pi)) ** 2 / a ** 2
                                  + (q + beta / (2 * np.pi)) ** 2 / b ** 2)
                for p in range(-cut, cut + 1) for q in range(-cut, cut + 1)]
    else:
        raise ValueError("unknown reference kind %r" % (kind,))
    return np.sort(np.array(vals))[:k]


def discrete_torus_spectrum(n, alpha=0.0, beta=0.0):
    """All n^2 eigenvalues of the twisted Laplacian on the n x n torus,
    from the Fourier closed form (independent of matrix assembly)."""
    p = np.arange(n)
    lam_x = 2 - 2 * np.cos(2 * np.pi * (p + alpha / (2 * np.pi)) / n)
    lam_y = 2 - 2 * np.cos(2 * np.pi * (p + beta / (2 * np.pi)) / n)
    return np.sort((lam_x[:, None] + lam_y[None, :]).ravel())


def discrete_rectangle_spectrum(nx, ny):
    """All eigenvalues of the free-boundary Laplacian on an nx x ny grid,
    as the tensor sum of path-graph spectra 2 - 2 cos(pi p / n)."""
    lam_x = 2 - 2 * np.cos(np.pi * np.arange(nx) / nx)
    lam_y = 2 - 2 * np.cos(np.pi * np.arange(ny) / ny)
    return np.sort((lam_x[:, None] + lam_y[None, :]).ravel())


def convergence_table(ns, computed, reference):
    """Tabulate eigenvalue errors and observed orders over mesh sizes.

    ``computed`` maps n -> array of rescaled eigenvalues; ``reference`` is
    the array of continuum targets.  Returns a list of dict rows with keys
    n, i, value, reference, error, order (order compares to the previous n
    and is None on the first row of each eigenvalue).
    """
    rows = []
    ns = list(ns)
    k = len(reference)
    for i in range(k):
        prev_err = None
        prev_n = None
        for n in ns:
            val = computed[n][i]
            err = abs(val - reference[i])
            order = None
            if prev_err is not None and err > 0 and prev_err > 0:
                order = np.log(prev_err / err) / np.log(n / prev_n)
            rows.append({"n": n, "i": i, "value": val,
                         "reference": reference[i], "error": err,
                         "order": order})
            prev_err, prev_n = err, n
    return rows


def rectangle_modes(a, b, k):
    """First k Neumann modes of an a x b rectangle as (value, p, q)."""
    cut = int(np.ceil(np.sqrt(k) + 2)) * max(1, int(max(a, b))) + 2
    modes = sorted((np.pi ** 2 * (p ** 2 / a ** 2 + q ** 2 / b ** 2), p, q)
                   for p in range(cut) for q in range(cut))
    return modes[:k]


def rectangle_eigenfunction(layout, a, b, p, q):
    """L^2-normalized Neumann eigenfunction cos(p pi x / a) cos(q pi y / b)
    as a vectorized chart callable using the surface ``layout`` offsets."""
    scale = np.sqrt((2.0 if p else 1.0) * (2.0 if q else 1.0) / (a * b))

    def func(sq, x, y):
        ox, oy = layout[sq]
        return (scale * np.cos(p * np.pi * (ox + x) / a)
                * np.cos(q * np.pi * (oy + y) / b))

    return func


def eigenvalue_groups(values, rel_tol=1e-6, abs_tol=1e-9):
    """Split a sorted eigenvalue list into clusters of (near-)equal values,
    returned as lists of indices."""
    groups = []
    for i, v in enumerate(values):
        if groups and abs(v - values[groups[-1][-1]]) <= max(
                abs_tol, rel_tol * max(abs(v), 1.0)):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def richardson_extrapolate(ns, values, order_guess=2.0):
    """Fit values(n) ~ limit + c * n^(-p) by least squares.

    Returns (limit, p, residual).  The order p is optimized around the
    guess; limit and c are solved linearly for each trial p.
    """
    ns = np.asarray(ns, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(ns) < 3:
        raise ValueError("need at least three mesh sizes")

    def fit(p):
        basis = np.column_stack([np.ones_like(ns), ns ** (-p)])
        coeffs, res, _, _ = np.linalg.lstsq(basis, values, rcond=None)
        resid = np.linalg.norm(basis @ coeffs - values)
        return coeffs, resid

    def objective(p):
        return fit(p)[1]

    res = minimize_scalar(objective, bounds=(order_guess / 4,
                                             order_guess * 4),
                          method="bounded",
                          options={"xatol": 1e-8})
    p = float(res.x)
    coeffs, resid = fit(p)
    return float(coeffs[0]), p, float(resid)
