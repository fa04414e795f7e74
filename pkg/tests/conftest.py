import numpy as np
import pytest

from defensedyn import AttackGraph


def dense_matrix(g: AttackGraph, diag=None, weight: float = 1.0) -> np.ndarray:
    """Dense D + w*A with A[v, u] = 1 iff u -> v; independent of the CSR kernels."""
    m = np.zeros((g.n, g.n))
    for v in range(g.n):
        for u in g.in_neighbors(v):
            m[v, u] = weight
    if diag is not None:
        m[np.diag_indices(g.n)] += np.asarray(diag, dtype=float)
    return m


def brute_sccs(g: AttackGraph) -> list[frozenset]:
    """SCCs via boolean reachability closure; oracle for the Tarjan path."""
    n = g.n
    reach = np.eye(n, dtype=bool)
    for v in range(n):
        for u in g.in_neighbors(v):
            reach[u, v] = True  # edge u -> v
    for _ in range(n):
        new = reach | (reach @ reach)
        if np.array_equal(new, reach):
            break
        reach = new
    mutual = reach & reach.T
    seen = set()
    comps = []
    for v in range(n):
        if v in seen:
            continue
        comp = frozenset(np.nonzero(mutual[v])[0].tolist())
        seen |= comp
        comps.append(comp)
    return comps


def random_digraph(rng: np.random.Generator, n_max: int = 8) -> AttackGraph:
    n = int(rng.integers(1, n_max + 1))
    p = float(rng.uniform(0.05, 0.6))
    return AttackGraph.erdos_renyi(n, p, seed=int(rng.integers(0, 2**31)), directed=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240810)
