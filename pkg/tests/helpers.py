"""Shared test fixtures: the worked 5x5 CSR example and random test systems."""
import numpy as np

from zlinalg import CooMatrix, ZVector, coo_to_csr

# The classic worked CSR example: nz = 11 entries over a 5x5 pattern.
GOLDEN_5X5_DENSE = [
    [3, 14, 0, 0, 0],
    [0, 8, 1, 0, 0],
    [2, 0, 6, 0, 0],
    [0, 4, 0, 2, -1],
    [0, 0, 9, 0, 7],
]

GOLDEN_AA = [3, 14, 8, 1, 2, 6, 4, 2, -1, 9, 7]
GOLDEN_JA_1BASED = [1, 2, 2, 3, 1, 3, 2, 4, 5, 3, 5]
GOLDEN_IA_1BASED = [1, 3, 5, 7, 10, 12]


def golden_5x5_coo() -> CooMatrix:
    coo = CooMatrix(5, 5)
    for i, row in enumerate(GOLDEN_5X5_DENSE):
        for j, v in enumerate(row):
            if v:
                coo.add(i, j, v)
    return coo


def golden_5x5():
    return coo_to_csr(golden_5x5_coo())


def dense_to_coo(dense: np.ndarray) -> CooMatrix:
    n_rows, n_cols = dense.shape
    coo = CooMatrix(n_rows, n_cols)
    for i, j in zip(*np.nonzero(dense)):
        coo.add(int(i), int(j), complex(dense[i, j]))
    return coo


def random_sparse_dense(n_rows, n_cols, density, rng) -> np.ndarray:
    """Random complex matrix with roughly the requested fill ratio."""
    dense = np.zeros((n_rows, n_cols), dtype=np.complex128)
    mask = rng.random((n_rows, n_cols)) < density
    count = int(mask.sum())
    dense[mask] = rng.standard_normal(count) + 1j * rng.standard_normal(count)
    return dense


def random_dominant_system(n, density, seed):
    """Strictly diagonally dominant random complex system.

    Returns (A_csr, dense_copy, b); the dense copy feeds the LU oracle.
    """
    rng = np.random.default_rng(seed)
    dense = random_sparse_dense(n, n, density, rng)
    np.fill_diagonal(dense, 0)
    off_row_sum = np.sum(np.abs(dense), axis=1)
    phase = np.exp(1j * rng.uniform(-0.4, 0.4, n))
    np.fill_diagonal(dense, (off_row_sum + 2.0) * phase)
    b = ZVector(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return coo_to_csr(dense_to_coo(dense)), dense, b
