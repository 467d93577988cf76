"""Determinants of rank-1 connection Laplacians versus forest sums.

For a multigraph with unitary complex edge weights (a rank-1 unitary
connection), the determinant of the connection Laplacian equals the sum
over cycle-rooted spanning forests (spanning subgraphs in which every
component contains exactly one cycle) of the product over component cycles
of 2 - w(gamma) - w(gamma)^{-1}, where w(gamma) is the cycle monodromy.
Both sides are computed independently here, the determinant numerically
and the forest sum by brute-force enumeration (intended for graphs with at
most a dozen edges).
"""

from itertools import combinations

import numpy as np


class ConnectionGraph:
    """Multigraph with unit-modulus complex weights on directed edges."""

    def __init__(self, n_vertices, edges):
        """``edges`` is a list of (tail, head, weight) with |weight| = 1;
        parallel edges and self-loops are allowed."""
        self.n_vertices = n_vertices
        self.edges = []
        for (u, v, w) in edges:
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise ValueError("edge endpoint out of range")
            w = complex(w)
            if abs(abs(w) - 1.0) > 1e-12:
                raise ValueError("edge weight must have modulus 1")
            self.edges.append((u, v, w))

    def laplacian(self):
        """Dense connection Laplacian Delta f(v) = deg f(v) - sum w f(v')."""
        n = self.n_vertices
        mat = np.zeros((n, n), dtype=complex)
        for (u, v, w) in self.edges:
            if u == v:
                mat[u, u] += 2 - w - np.conj(w)
                continue
            mat[u, u] += 1
            mat[v, v] += 1
            mat[v, u] -= w
            mat[u, v] -= np.conj(w)
        return mat

    def determinant(self):
        return float(np.linalg.det(self.laplacian()).real)

    def gauged(self, phases):
        """Gauge-transformed copy: weight w on (u, v) becomes
        e^{i phi_v} w e^{-i phi_u}."""
        edges = [(u, v, np.exp(1j * phases[v]) * w * np.exp(-1j * phases[u]))
                 for (u, v, w) in self.edges]
        return ConnectionGraph(self.n_vertices, edges)

    # ---- forest enumeration -------------------------------------------

    def _component_split(self, edge_ids):
        parent = list(range(self.n_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for k in edge_ids:
            u, v, _ = self.edges[k]
            parent[find(u)] = find(v)
        comps = {}
        for k in edge_ids:
            u, _, _ = self.edges[k]
            comps.setdefault(find(u), []).append(k)
        vert_count = {}
        for v in range(self.n_vertices):
            root = find(v)
            vert_count[root] = vert_count.get(root, 0) + 1
        return comps, vert_count

    def _cycle_monodromy(self, edge_ids):
        """Monodromy of the unique cycle of a component with #edges ==
        #vertices, or None when the component has no such cycle structure."""
        from collections import defaultdict

        incident = defaultdict(list)
        alive = set(edge_ids)
        for k in edge_ids:
            u, v, _ = self.edges[k]
            incident[u].append(k)
            if u != v:
                incident[v].append(k)
        degree = {v: 0 for v in incident}
        for k in edge_ids:
            u, v, _ = self.edges[k]
            degree[u] += 1
            degree[v] += 1  # self-loop counts twice
        # strip trees hanging off the cycle
        stack = [v for v, d in degree.items() if d == 1]
        while stack:
            v = stack.pop()
            for k in incident[v]:
                if k not in alive:
                    continue
                alive.discard(k)
                u, w, _ = self.edges[k]
                other = w if u == v else u
                degree[v] -= 1
                degree[other] -= 1
                if degree[other] == 1:
                    stack.append(other)
        if not alive:
            return None
        # remaining edges form disjoint cycles; valid only if a single one
        start_edge = min(alive)
        u0, v0, w0 = self.edges[start_edge]
        mon = w0
        used = {start_edge}
        cur = v0
        while cur != u0:
            nxt = None
            for k in incident[cur]:
                if k in alive and k not in used:
                    nxt = k
                    break
            if nxt is None:
                return None
            u, v, w = self.edges[nxt]
            if u == cur:
                mon = w * mon
                cur = v
            else:
                mon = np.conj(w) * mon
                cur = u
            used.add(nxt)
        if used != alive:
            return None  # more than one cycle in this component
        return mon

    def forest_sum(self):
        """Sum over cycle-rooted spanning forests of
        prod over cycles (2 - w(gamma) - conj(w(gamma)))."""
        n = self.n_vertices
        total = 0.0
        for subset in combinations(range(len(self.edges)), n):
            comps, vert_count = self._component_split(subset)
            # every vertex must be covered and every component must carry
            # exactly as many edges as vertices
            covered = sum(vert_count[root] for root in comps)
            if covered != n:
                continue
            ok = True
            weight = 1.0
            for root, ids in comps.items():
                if len(ids) != vert_count[root]:
                    ok = False
                    break
                mon = self._cycle_monodromy(ids)
                if mon is None:
                    ok = False
                    break
                weight *= 2.0 - 2.0 * mon.real
            if ok:
                total += weight
        return total


def random_connection_graph(rng, max_vertices=7, max_edges=12):
    """Random small multigraph with unit weights, for identity testing."""
    n = int(rng.integers(1, max_vertices + 1))
    m = int(rng.integers(0, max_edges + 1))
    edges = []
    for _ in range(m):
        u = int(rng.integers(n))
        v = int(rng.integers(n))
        theta = float(rng.uniform(0, 2 * np.pi))
        edges.append((u, v, np.exp(1j * theta)))
    return ConnectionGraph(n, edges)
