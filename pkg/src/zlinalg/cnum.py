"""Complex double-precision scalar arithmetic and the real-flop accounting model.

``Cplx`` is the arithmetic atom of the library: a pair of IEEE-754 binary64
values (real part first, imaginary part second) with no padding, so a vector
of them can be dumped to disk as a flat little-endian double stream.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass

__all__ = ["Cplx", "cadd", "csub", "cmul", "cdiv", "conj", "cabs2", "FlopModel", "FLOPS"]

_PAIR = struct.Struct("<dd")


@dataclass(frozen=True, slots=True)
class Cplx:
    """Double-precision complex value with explicit (re, im) fields."""

    re: float = 0.0
    im: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "re", float(self.re))
        object.__setattr__(self, "im", float(self.im))

    @classmethod
    def from_complex(cls, z) -> "Cplx":
        z = complex(z)
        return cls(z.real, z.imag)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def conj(self) -> "Cplx":
        return Cplx(self.re, -self.im)

    def abs2(self) -> float:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    # -- operators; the right-hand side may be a Cplx, complex, or real number
    def __add__(self, other):
        o = _lift(other)
        return Cplx(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _lift(other)
        return Cplx(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        return cmul(self, _lift(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return cdiv(self, _lift(other))

    def __rtruediv__(self, other):
        return cdiv(_lift(other), self)

    def __neg__(self):
        return Cplx(-self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, Cplx):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, float, complex)):
            z = complex(other)
            return self.re == z.real and self.im == z.imag
        return NotImplemented

    def __hash__(self):
        return hash(complex(self.re, self.im))

    # -- binary layout: two consecutive little-endian binary64, re then im
    def to_bytes(self) -> bytes:
        return _PAIR.pack(self.re, self.im)

    @classmethod
    def from_bytes(cls, raw: bytes) -> "Cplx":
        return cls(*_PAIR.unpack(raw))


def _lift(value) -> Cplx:
    if isinstance(value, Cplx):
        return value
    if isinstance(value, (int, float)):
        return Cplx(float(value), 0.0)
    z = complex(value)
    return Cplx(z.real, z.imag)


def cadd(a: Cplx, b: Cplx) -> Cplx:
    """Componentwise sum (2 real flops)."""
    return Cplx(a.re + b.re, a.im + b.im)


def csub(a: Cplx, b: Cplx) -> Cplx:
    """Componentwise difference (2 real flops)."""
    return Cplx(a.re - b.re, a.im - b.im)


def cmul(a: Cplx, b: Cplx) -> Cplx:
    """Complex product (a.re*b.re - a.im*b.im, a.re*b.im + a.im*b.re); 6 real flops."""
    return Cplx(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re)


def cdiv(a: Cplx, b: Cplx) -> Cplx:
    """Complex quotient a/b by Smith's algorithm.

    The components of b are compared by magnitude and the smaller one is
    divided by the larger before forming the denominator, which avoids the
    spurious overflow/underflow a naive (c^2 + d^2) denominator produces.
    """
    c, d = b.re, b.im
    if abs(c) >= abs(d):
        if c == 0.0 and d == 0.0:
            raise ZeroDivisionError("complex division by zero")
        r = d / c
        den = c + d * r
        return Cplx((a.re + a.im * r) / den, (a.im - a.re * r) / den)
    r = c / d
    den = c * r + d
    return Cplx((a.re * r + a.im) / den, (a.im * r - a.re) / den)


def conj(a: Cplx) -> Cplx:
    """Complex conjugate (sign flip of the imaginary part)."""
    return Cplx(a.re, -a.im)


def cabs2(a: Cplx) -> float:
    """Squared modulus re^2 + im^2 (3 real flops)."""
    return a.re * a.re + a.im * a.im


_OP_FIELD = {
    "assign": "assign",
    "zassign": "assign",
    "scal": "scal",
    "zscal": "scal",
    "axpy": "axpy",
    "zaxpy": "axpy",
    "axmy": "axmy",
    "zaxmy": "axmy",
    "dot": "dot",
    "zdot": "dot",
    "norm": "norm2",
    "znorm": "norm2",
    "norm2": "norm2",
    "znorm2": "norm2",
    "spmv": "spmv_per_nz",
}


@dataclass(frozen=True)
class FlopModel:
    """Per-element real-flop counts for every kernel.

    A complex multiply is 6 real flops and a complex add 2; assign moves one
    element for 1. Gflops for a run follows as
    ``count * size / (time_seconds * 1e9)``.
    """

    assign: int = 1
    scal: int = 6
    axpy: int = 8
    axmy: int = 6
    dot: int = 8
    norm2: int = 5
    spmv_per_nz: int = 8

    def __post_init__(self):
        for name in ("assign", "scal", "axpy", "axmy", "dot", "norm2", "spmv_per_nz"):
            count = getattr(self, name)
            if not isinstance(count, int) or count <= 0:
                raise ValueError(f"flop count {name} must be a positive integer, got {count!r}")

    def flops(self, op_name: str, size: int) -> int:
        """Total real flops for one run of ``op_name`` over ``size`` elements
        (nonzeros for spmv)."""
        try:
            field = _OP_FIELD[op_name]
        except KeyError:
            raise KeyError(f"no flop count for operation {op_name!r}") from None
        return getattr(self, field) * size

    def gflops(self, op_name: str, size: int, time_ms: float) -> float:
        """Gflops for one run taking ``time_ms`` milliseconds."""
        return self.flops(op_name, size) / (time_ms * 1e6)


FLOPS = FlopModel()
