"""Sparse matrices: COO ingestion, CSR storage, SpMV, sketch statistics, I/O.

CSR keeps three arrays: ``aa`` (nonzero values in row-major order), ``ja``
(their column indices) and ``ia`` (row pointers, length n+1). Indices are
zero-based in memory; Matrix Market files and the classic printed rendering
are one-based, and conversion happens only at those boundaries.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, FormatError, ParseError
from .vecops import ZVector

__all__ = [
    "CooMatrix",
    "CsrMatrix",
    "MatrixStats",
    "coo_to_csr",
    "spmv",
    "stats",
    "read_matrix_market",
    "write_matrix_market",
    "write_csr_binary",
    "read_csr_binary",
]


@dataclass
class CooMatrix:
    """Coordinate-format matrix: a bag of (row, col, value) triples.

    Duplicate coordinates are legal and are summed when converting to CSR,
    matching finite-element assembly semantics.
    """

    n_rows: int
    n_cols: int
    entries: list = field(default_factory=list)

    def __post_init__(self):
        if self.n_rows < 0 or self.n_cols < 0:
            raise FormatError(f"negative dimensions ({self.n_rows}, {self.n_cols})")

    def add(self, i: int, j: int, value) -> None:
        if not (0 <= i < self.n_rows and 0 <= j < self.n_cols):
            raise FormatError(
                f"entry ({i}, {j}) outside {self.n_rows}x{self.n_cols} matrix"
            )
        self.entries.append((i, j, complex(value)))

    @property
    def nnz(self) -> int:
        return len(self.entries)


class CsrMatrix:
    """Compressed sparse row matrix over complex128 values.

    Within each row the column indices are strictly increasing; ``ia`` is
    nondecreasing with ``ia[0] == 0`` and ``ia[-1] == nnz``. Instances are
    treated as immutable after construction.
    """

    __slots__ = ("n_rows", "n_cols", "aa", "ja", "ia")

    def __init__(self, n_rows, n_cols, aa, ja, ia, validate=True):
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self.aa = np.ascontiguousarray(np.asarray(aa, dtype=np.complex128))
        self.ja = np.ascontiguousarray(np.asarray(ja, dtype=np.int64))
        self.ia = np.ascontiguousarray(np.asarray(ia, dtype=np.int64))
        if validate:
            self._validate()

    def _validate(self):
        nnz = self.aa.shape[0]
        if self.ja.shape[0] != nnz:
            raise FormatError(f"aa has {nnz} values but ja has {self.ja.shape[0]} indices")
        if self.ia.shape[0] != self.n_rows + 1:
            raise FormatError(f"ia must have n_rows+1 = {self.n_rows + 1} pointers, got {self.ia.shape[0]}")
        if self.n_rows == 0:
            if nnz:
                raise FormatError("nonzeros in a 0-row matrix")
            return
        if self.ia[0] != 0 or self.ia[-1] != nnz:
            raise FormatError(f"row pointers must span [0, {nnz}], got [{self.ia[0]}, {self.ia[-1]}]")
        if np.any(np.diff(self.ia) < 0):
            raise FormatError("row pointers are not nondecreasing")
        if nnz:
            if self.ja.min() < 0 or self.ja.max() >= self.n_cols:
                raise FormatError("column index out of range")
            # strictly increasing columns inside each row
            if nnz > 1:
                within_row = np.ones(nnz - 1, dtype=bool)
                boundary = np.zeros(nnz + 1, dtype=bool)
                boundary[self.ia[1:-1]] = True
                within_row &= ~boundary[1:nnz]
                if np.any(np.diff(self.ja)[within_row] <= 0):
                    raise FormatError("column indices are not strictly increasing within a row")

    @property
    def n(self) -> int:
        """Square dimension; raises for rectangular matrices."""
        if self.n_rows != self.n_cols:
            raise DimensionError(f"matrix is {self.n_rows}x{self.n_cols}, not square")
        return self.n_rows

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return self.aa.shape[0]

    def row(self, i: int):
        """(column indices, values) slices of row i; views, do not mutate."""
        lo, hi = self.ia[i], self.ia[i + 1]
        return self.ja[lo:hi], self.aa[lo:hi]

    def diagonal(self) -> np.ndarray:
        """Stored main-diagonal entries (structural zeros read as 0)."""
        n = min(self.n_rows, self.n_cols)
        diag = np.zeros(n, dtype=np.complex128)
        for i in range(n):
            cols, vals = self.row(i)
            pos = np.searchsorted(cols, i)
            if pos < cols.shape[0] and cols[pos] == i:
                diag[i] = vals[pos]
        return diag

    def to_dense(self) -> np.ndarray:
        """Materialize as a dense array (test/oracle use; quadratic memory)."""
        dense = np.zeros((self.n_rows, self.n_cols), dtype=np.complex128)
        rows = np.repeat(np.arange(self.n_rows), np.diff(self.ia))
        dense[rows, self.ja] = self.aa
        return dense

    def to_coo(self) -> CooMatrix:
        rows = np.repeat(np.arange(self.n_rows), np.diff(self.ia))
        entries = list(zip(rows.tolist(), self.ja.tolist(), self.aa.tolist()))
        return CooMatrix(self.n_rows, self.n_cols, entries)

    def one_based(self):
        """(AA, JA, IA) with one-based indices, the classic printed rendering:
        JA[j] is the 1-based column of AA[j] and IA[n+1] == nnz + 1."""
        return (self.aa.tolist(), (self.ja + 1).tolist(), (self.ia + 1).tolist())

    @classmethod
    def identity(cls, n: int) -> "CsrMatrix":
        return cls(n, n, np.ones(n, dtype=np.complex128), np.arange(n), np.arange(n + 1))

    def __repr__(self):
        return f"CsrMatrix({self.n_rows}x{self.n_cols}, nnz={self.nnz})"


@dataclass(frozen=True)
class MatrixStats:
    """Sketch of a sparse matrix: size, fill, bandwidth and row-density figures."""

    h: int
    nz: int
    density: float  # percent: 100 * nz / (rows * cols)
    bandwidth: int  # max |i - j| over stored entries
    max_row: int
    nz_per_h: float
    nz_per_h_stddev: float  # population standard deviation of row counts


def coo_to_csr(m: CooMatrix) -> CsrMatrix:
    """Convert COO to CSR: sort by (row, col), sum duplicates, build pointers.

    Exact zeros produced by duplicate summation are retained, not pruned.

    Raises
    ------
    FormatError
        If any entry index falls outside the stated dimensions.
    """
    n_rows, n_cols = m.n_rows, m.n_cols
    nnz_in = len(m.entries)
    if nnz_in == 0:
        return CsrMatrix(
            n_rows, n_cols,
            np.zeros(0, dtype=np.complex128),
            np.zeros(0, dtype=np.int64),
            np.zeros(n_rows + 1, dtype=np.int64),
        )
    rows = np.fromiter((e[0] for e in m.entries), dtype=np.int64, count=nnz_in)
    cols = np.fromiter((e[1] for e in m.entries), dtype=np.int64, count=nnz_in)
    vals = np.fromiter((complex(e[2]) for e in m.entries), dtype=np.complex128, count=nnz_in)
    if rows.min() < 0 or rows.max() >= n_rows or cols.min() < 0 or cols.max() >= n_cols:
        bad = np.flatnonzero(
            (rows < 0) | (rows >= n_rows) | (cols < 0) | (cols >= n_cols)
        )[0]
        raise FormatError(
            f"entry ({rows[bad]}, {cols[bad]}) outside {n_rows}x{n_cols} matrix"
        )
    keys = rows * np.int64(n_cols) + cols
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    vals = vals[order]
    first = np.flatnonzero(np.concatenate(([True], keys[1:] != keys[:-1])))
    summed = np.add.reduceat(vals, first)
    ukeys = keys[first]
    urows = ukeys // n_cols
    ucols = ukeys % n_cols
    counts = np.bincount(urows, minlength=n_rows)
    ia = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
    return CsrMatrix(n_rows, n_cols, summed, ucols, ia)


def spmv(A: CsrMatrix, x: ZVector) -> ZVector:
    """Sparse matrix-vector product y = A x; 8 flops per stored nonzero.

    Each output element is an independent fixed-order sum over its own row,
    so results are deterministic and independent of how rows are scheduled.
    """
    if len(x) != A.n_cols:
        raise DimensionError(f"matrix has {A.n_cols} columns, vector has {len(x)} elements")
    y = np.zeros(A.n_rows, dtype=np.complex128)
    if A.nnz:
        prod = A.aa * x.data[A.ja]
        starts = A.ia[:-1]
        nonempty = A.ia[:-1] < A.ia[1:]
        if np.any(nonempty):
            y[nonempty] = np.add.reduceat(prod, starts[nonempty])
    return ZVector(y)


def stats(A: CsrMatrix) -> MatrixStats:
    """Sketch statistics of a CSR matrix (Table-style row-density figures).

    ``density`` is the percentage of stored entries over the full h*h grid;
    the row-count standard deviation is the population one (divide by h).
    """
    counts = np.diff(A.ia)
    nz = A.nnz
    h = A.n_rows
    if nz:
        rows = np.repeat(np.arange(A.n_rows), counts)
        bandwidth = int(np.abs(rows - A.ja).max())
        max_row = int(counts.max())
    else:
        bandwidth = 0
        max_row = int(counts.max()) if h else 0
    cells = A.n_rows * A.n_cols
    density = 100.0 * nz / cells if cells else 0.0
    nz_per_h = nz / h if h else 0.0
    stddev = float(np.std(counts)) if h else 0.0
    return MatrixStats(
        h=h,
        nz=nz,
        density=density,
        bandwidth=bandwidth,
        max_row=max_row,
        nz_per_h=nz_per_h,
        nz_per_h_stddev=stddev,
    )


# ---------------------------------------------------------------------------
# Matrix Market coordinate files
# ---------------------------------------------------------------------------

_MM_BANNER = "%%matrixmarket"


def read_matrix_market(path) -> CooMatrix:
    """Parse a Matrix Market coordinate file into a CooMatrix.

    Accepts ``real`` or ``complex`` fields and ``general`` or ``symmetric``
    symmetry. Real values are promoted to complex with zero imaginary part;
    symmetric files are expanded to full storage by mirroring off-diagonal
    entries. Indices in the file are one-based.

    Raises
    ------
    ParseError
        On a malformed banner, header, or entry; the message carries the
        offending line number.
    """
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("empty file", line=1)
    banner = lines[0].strip().lower().split()
    if len(banner) != 5 or banner[0] != _MM_BANNER or banner[1] != "matrix":
        raise ParseError(f"bad banner {lines[0]!r}", line=1)
    fmt, field_kind, symmetry = banner[2], banner[3], banner[4]
    if fmt != "coordinate":
        raise ParseError(f"unsupported format {fmt!r} (only coordinate)", line=1)
    if field_kind not in ("real", "complex"):
        raise ParseError(f"unsupported field {field_kind!r} (only real/complex)", line=1)
    if symmetry not in ("general", "symmetric"):
        raise ParseError(f"unsupported symmetry {symmetry!r} (only general/symmetric)", line=1)

    lineno = 1
    header = None
    body_start = None
    for k in range(1, len(lines)):
        stripped = lines[k].strip()
        if not stripped or stripped.startswith("%"):
            continue
        header = stripped
        lineno = k + 1
        body_start = k + 1
        break
    if header is None:
        raise ParseError("missing size header", line=len(lines))
    parts = header.split()
    if len(parts) != 3:
        raise ParseError(f"size header needs 'rows cols nnz', got {header!r}", line=lineno)
    try:
        n_rows, n_cols, nnz = (int(p) for p in parts)
    except ValueError:
        raise ParseError(f"non-integer size header {header!r}", line=lineno) from None
    if n_rows < 0 or n_cols < 0 or nnz < 0:
        raise ParseError(f"negative size header {header!r}", line=lineno)

    want = 4 if field_kind == "complex" else 3
    coo = CooMatrix(n_rows, n_cols)
    seen = 0
    for k in range(body_start, len(lines)):
        stripped = lines[k].strip()
        if not stripped or stripped.startswith("%"):
            continue
        parts = stripped.split()
        if len(parts) != want:
            raise ParseError(f"expected {want} fields, got {len(parts)}", line=k + 1)
        try:
            i = int(parts[0])
            j = int(parts[1])
            re = float(parts[2])
            im = float(parts[3]) if field_kind == "complex" else 0.0
        except ValueError:
            raise ParseError(f"malformed entry {stripped!r}", line=k + 1) from None
        if not (1 <= i <= n_rows and 1 <= j <= n_cols):
            raise ParseError(f"index ({i}, {j}) out of range for {n_rows}x{n_cols}", line=k + 1)
        seen += 1
        if seen > nnz:
            raise ParseError(f"more than the declared {nnz} entries", line=k + 1)
        value = complex(re, im)
        coo.add(i - 1, j - 1, value)
        if symmetry == "symmetric" and i != j:
            coo.add(j - 1, i - 1, value)
    if seen != nnz:
        raise ParseError(f"declared {nnz} entries but found {seen}", line=len(lines))
    return coo


def write_matrix_market(A: CsrMatrix, path) -> None:
    """Write a CSR matrix as a Matrix Market coordinate complex general file.

    Values are printed with 17 significant digits so a read-back reproduces
    them exactly.
    """
    with open(path, "w", encoding="ascii") as fh:
        fh.write("%%MatrixMarket matrix coordinate complex general\n")
        fh.write(f"{A.n_rows} {A.n_cols} {A.nnz}\n")
        for i in range(A.n_rows):
            cols, vals = A.row(i)
            for j, v in zip(cols.tolist(), vals.tolist()):
                fh.write(f"{i + 1} {j + 1} {v.real:.17g} {v.imag:.17g}\n")


# ---------------------------------------------------------------------------
# Binary dump: u64 n, u64 nz, IA (n+1 u64), JA (nz u64), AA (nz re/im pairs)
# ---------------------------------------------------------------------------

_BIN_HEADER = struct.Struct("<QQ")


def write_csr_binary(A: CsrMatrix, path) -> None:
    """Little-endian binary dump of a square CSR matrix."""
    n = A.n  # raises for rectangular
    with open(path, "wb") as fh:
        fh.write(_BIN_HEADER.pack(n, A.nnz))
        fh.write(A.ia.astype("<u8").tobytes())
        fh.write(A.ja.astype("<u8").tobytes())
        fh.write(A.aa.astype("<c16", copy=False).tobytes())


def read_csr_binary(path) -> CsrMatrix:
    with open(path, "rb") as fh:
        header = fh.read(_BIN_HEADER.size)
        if len(header) != _BIN_HEADER.size:
            raise ParseError(f"{path}: truncated header")
        n, nnz = _BIN_HEADER.unpack(header)
        raw_ia = fh.read(8 * (n + 1))
        raw_ja = fh.read(8 * nnz)
        raw_aa = fh.read(16 * nnz)
        if len(raw_ia) != 8 * (n + 1) or len(raw_ja) != 8 * nnz or len(raw_aa) != 16 * nnz:
            raise ParseError(f"{path}: truncated arrays")
    ia = np.frombuffer(raw_ia, dtype="<u8")
    ja = np.frombuffer(raw_ja, dtype="<u8")
    aa = np.frombuffer(raw_aa, dtype="<c16")
    return CsrMatrix(n, n, aa.astype(np.complex128), ja.astype(np.int64), ia.astype(np.int64))
