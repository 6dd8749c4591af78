"""Level-1 complex vector kernels: ZASSIGN, ZSCAL, ZAXPY, ZAXMY, ZDOT, ZNORM.

The mutating kernels overwrite their second (or only) vector operand, the way
the corresponding device kernels do; ``*_copy`` variants operate on a fresh
copy instead. Reductions (dot, norm) run under a ``ReductionPlan``: per-block
partial sums followed by a final pass over the partials in ascending block
index, so results are identical from run to run.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .cnum import Cplx
from .errors import DimensionError, ParameterError

__all__ = [
    "ZVector",
    "ReductionPlan",
    "SEQUENTIAL",
    "BLOCKED",
    "DEFAULT_PLAN",
    "zassign",
    "zscal",
    "zaxpy",
    "zaxmy",
    "zdot",
    "znorm2",
    "zscal_copy",
    "zaxpy_copy",
    "zaxmy_copy",
    "write_zvector",
    "read_zvector",
]

SEQUENTIAL = "sequential"
BLOCKED = "blocked"

_LEN_HEADER = struct.Struct("<Q")


class ZVector:
    """Dense complex128 vector; a thin contiguous-array wrapper.

    Constructing from an existing complex128 array wraps it without copying,
    so kernels can share storage; use :meth:`copy` for an independent vector.
    """

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.asarray(data, dtype=np.complex128)
        if arr.ndim != 1:
            raise DimensionError(f"ZVector needs 1-D data, got shape {arr.shape}")
        self.data = np.ascontiguousarray(arr)

    @classmethod
    def zeros(cls, n: int) -> "ZVector":
        return cls(np.zeros(int(n), dtype=np.complex128))

    @classmethod
    def from_values(cls, values) -> "ZVector":
        return cls(np.array([complex(v) for v in values], dtype=np.complex128))

    def copy(self) -> "ZVector":
        return ZVector(self.data.copy())

    def __len__(self) -> int:
        return self.data.shape[0]

    def __getitem__(self, i: int) -> Cplx:
        z = self.data[int(i)]
        return Cplx(z.real, z.imag)

    def __setitem__(self, i: int, value) -> None:
        self.data[int(i)] = complex(value)

    def __iter__(self):
        for z in self.data:
            yield Cplx(z.real, z.imag)

    def __repr__(self) -> str:
        return f"ZVector(len={len(self)})"


@dataclass(frozen=True)
class ReductionPlan:
    """How dot/norm accumulate: block size and summation mode.

    ``blocked`` sums each block of ``block_size`` elements, then folds the
    partial sums left to right; ``sequential`` is a plain left-to-right loop
    over scalars (bit-reproducible against a reference loop).
    """

    block_size: int = 4096
    mode: str = BLOCKED

    def __post_init__(self):
        bs = self.block_size
        if not (isinstance(bs, int) and 64 <= bs <= 65536 and (bs & (bs - 1)) == 0):
            raise ParameterError(f"block_size must be a power of two in [64, 65536], got {bs!r}")
        if self.mode not in (SEQUENTIAL, BLOCKED):
            raise ParameterError(f"mode must be {SEQUENTIAL!r} or {BLOCKED!r}, got {self.mode!r}")


DEFAULT_PLAN = ReductionPlan()


def _check_same_length(a: ZVector, b: ZVector) -> None:
    if len(a) != len(b):
        raise DimensionError(f"vector lengths differ: {len(a)} vs {len(b)}")


def zassign(dst: ZVector, src: ZVector) -> ZVector:
    """dst[i] = src[i]; 1 flop per element."""
    _check_same_length(dst, src)
    dst.data[:] = src.data
    return dst


def zscal(alpha, x: ZVector) -> ZVector:
    """x[i] = alpha * x[i] in place; 6 flops per element."""
    x.data *= complex(alpha)
    return x


def zaxpy(alpha, x: ZVector, y: ZVector) -> ZVector:
    """y[i] = alpha * x[i] + y[i] in place; 8 flops per element."""
    _check_same_length(x, y)
    y.data += complex(alpha) * x.data
    return y


def zaxmy(x: ZVector, y: ZVector) -> ZVector:
    """y[i] = x[i] * y[i] in place (element-wise product); 6 flops per element."""
    _check_same_length(x, y)
    y.data *= x.data
    return y


def zscal_copy(alpha, x: ZVector) -> ZVector:
    return zscal(alpha, x.copy())


def zaxpy_copy(alpha, x: ZVector, y: ZVector) -> ZVector:
    return zaxpy(alpha, x, y.copy())


def zaxmy_copy(x: ZVector, y: ZVector) -> ZVector:
    return zaxmy(x, y.copy())


def _fold_blocks(values: np.ndarray, block_size: int):
    starts = np.arange(0, values.shape[0], block_size)
    partials = np.add.reduceat(values, starts)
    total = partials[0].item()
    for p in partials[1:].tolist():
        total = total + p
    return total


def zdot(x: ZVector, y: ZVector, conjugate: bool = True, plan: ReductionPlan = DEFAULT_PLAN) -> Cplx:
    """Dot product sum_i cbar(x[i]) * y[i]; cbar = conj when ``conjugate``.

    Computed in two phases: element products, then block partial sums folded
    in ascending block index. 8 flops per element.
    """
    _check_same_length(x, y)
    n = len(x)
    if n == 0:
        return Cplx(0.0, 0.0)
    if plan.mode == SEQUENTIAL:
        acc = complex(0.0, 0.0)
        if conjugate:
            for px, py in zip(x.data.tolist(), y.data.tolist()):
                acc += px.conjugate() * py
        else:
            for px, py in zip(x.data.tolist(), y.data.tolist()):
                acc += px * py
        return Cplx(acc.real, acc.imag)
    prod = (np.conj(x.data) * y.data) if conjugate else (x.data * y.data)
    total = _fold_blocks(prod, plan.block_size)
    return Cplx(total.real, total.imag)


def znorm2(x: ZVector, plan: ReductionPlan = DEFAULT_PLAN) -> float:
    """Euclidean norm sqrt(sum_i |x[i]|^2); 5 flops per element."""
    n = len(x)
    if n == 0:
        return 0.0
    if plan.mode == SEQUENTIAL:
        acc = 0.0
        for z in x.data.tolist():
            acc += z.real * z.real + z.imag * z.imag
        return math.sqrt(acc)
    sq = x.data.real * x.data.real + x.data.imag * x.data.imag
    return math.sqrt(_fold_blocks(sq, plan.block_size))


def write_zvector(v: ZVector, path) -> None:
    """Dump a vector: u64 little-endian length, then len (re, im) double pairs."""
    with open(path, "wb") as fh:
        fh.write(_LEN_HEADER.pack(len(v)))
        fh.write(v.data.astype("<c16", copy=False).tobytes())


def read_zvector(path) -> ZVector:
    with open(path, "rb") as fh:
        header = fh.read(_LEN_HEADER.size)
        if len(header) != _LEN_HEADER.size:
            raise ParameterError(f"{path}: truncated vector header")
        (n,) = _LEN_HEADER.unpack(header)
        raw = fh.read(16 * n)
        if len(raw) != 16 * n:
            raise ParameterError(f"{path}: expected {n} elements, file is short")
    return ZVector(np.frombuffer(raw, dtype="<c16").astype(np.complex128))
