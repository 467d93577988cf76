"""Bundle-twisted combinatorial operators on a discretized surface.

For a section f (one C^r value per vertex) the Laplacian is

    (Delta f)(v) = sum over edges (v, v') of  f(v) - U_{v' -> v} f(v'),

the gradient assigns to each edge e = (t, h) the tail-frame value
(grad f)(e) = f(t) - U_{h -> t} f(h), and the divergence is the exact
adjoint of the gradient, so Delta = div grad holds as a matrix identity.
Self-loops (which occur for subdivision 1) contribute both orientations.
"""

import numpy as np
import scipy.sparse as sp


def _block_coo(entries, shape, rank):
    """Assemble a sparse matrix from (row, col, rank x rank block) entries."""
    rows, cols, vals = [], [], []
    idx = np.arange(rank)
    ii, jj = np.meshgrid(idx, idx, indexing="ij")
    for r, c, block in entries:
        rows.append((r * rank + ii).ravel())
        cols.append((c * rank + jj).ravel())
        vals.append(np.asarray(block, dtype=complex).ravel())
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    mat = sp.coo_matrix((vals, (rows, cols)),
                        shape=(shape[0] * rank, shape[1] * rank))
    return mat.tocsr()


def laplacian(disc):
    """Sparse Hermitian bundle Laplacian, (n_vertices * rank) square."""
    rank = disc.bundle.rank
    eye = np.eye(rank, dtype=complex)
    entries = []
    for e in disc.edges:
        u = e.transport  # head frame -> tail frame
        if e.tail == e.head:
            entries.append((e.tail, e.tail, 2 * eye - u - u.conj().T))
            continue
        entries.append((e.tail, e.tail, eye))
        entries.append((e.head, e.head, eye))
        entries.append((e.tail, e.head, -u))
        entries.append((e.head, e.tail, -u.conj().T))
    n = disc.n_vertices
    return _block_coo(entries, (n, n), rank)


def gradient(disc):
    """Sparse gradient, mapping sections to edge-indexed (tail-frame) data."""
    rank = disc.bundle.rank
    eye = np.eye(rank, dtype=complex)
    entries = []
    for k, e in enumerate(disc.edges):
        if e.tail == e.head:
            entries.append((k, e.tail, eye - e.transport))
        else:
            entries.append((k, e.tail, eye))
            entries.append((k, e.head, -e.transport))
    return _block_coo(entries, (len(disc.edges), disc.n_vertices), rank)


def divergence(disc):
    """Adjoint of the gradient (so that laplacian == divergence @ gradient)."""
    return gradient(disc).conj().T.tocsr()


def rayleigh(mat, f):
    """Rayleigh quotient <f, A f> / <f, f> (real part)."""
    f = np.asarray(f, dtype=complex).ravel()
    denom = np.vdot(f, f).real
    if denom == 0:
        raise ValueError("Rayleigh quotient of the zero vector")
    return float(np.vdot(f, mat @ f).real / denom)


def hermitian_defect(mat):
    diff = (mat - mat.conj().T).tocoo()
    if diff.nnz == 0:
        return 0.0
    return float(np.max(np.abs(diff.data)))


def edge_differences(disc, f):
    """Per-edge norms |f(t) - U_{h->t} f(h)| of a section."""
    rank = disc.bundle.rank
    f = np.asarray(f, dtype=complex).reshape(disc.n_vertices, rank)
    out = np.empty(len(disc.edges))
    for k, e in enumerate(disc.edges):
        diff = f[e.tail] - e.transport @ f[e.head]
        out[k] = np.linalg.norm(diff)
    return out


def dirichlet_form(disc, f, g=None):
    """<grad f, grad g> summed over edges (g defaults to f)."""
    rank = disc.bundle.rank
    f = np.asarray(f, dtype=complex).reshape(disc.n_vertices, rank)
    g = f if g is None else np.asarray(g, dtype=complex).reshape(
        disc.n_vertices, rank)
    total = 0j
    for e in disc.edges:
        df = f[e.tail] - e.transport @ f[e.head]
        dg = g[e.tail] - e.transport @ g[e.head]
        total += np.vdot(dg, df)
    return complex(total)
