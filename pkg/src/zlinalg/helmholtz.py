"""Structured-grid finite-difference discretization of the Helmholtz equation.

Builds desk-scale acoustic test systems -laplacian(u) - k^2 u = g on a box
with Dirichlet boundary values, where k = 2*pi*F / c is the wavenumber for
drive frequency F and sound speed c. Second-order central differences on a
uniform grid produce the standard (2*dim + 1)-point stencil over the interior
nodes, with boundary values folded into the right-hand side; unknowns are
ordered lexicographically with the first axis fastest.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError, ParseError
from .sparse import CooMatrix, coo_to_csr
from .vecops import ZVector

__all__ = [
    "HelmholtzProblem",
    "assemble",
    "manufactured_solution",
    "manufactured_problem",
    "load_problem_config",
]


@dataclass(frozen=True)
class HelmholtzProblem:
    """One box-domain acoustic problem.

    ``cells_per_axis`` counts grid cells (intervals), so the spacing is
    ``domain_length / cells_per_axis`` and each axis carries
    ``cells_per_axis - 1`` interior unknowns. ``dirichlet_value`` and
    ``source`` may be constants or callables of the node coordinate tuple.
    A ``velocity_field`` callable overrides the uniform ``velocity``, giving
    a spatially varying wavenumber.
    """

    dim: int
    cells_per_axis: int
    domain_length: float = 1.0
    frequency: float = 0.0
    velocity: float = 1.0
    dirichlet_value: object = 0j
    source: object = 0j
    velocity_field: object = None

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ParameterError(f"dim must be 1, 2, or 3, got {self.dim!r}")
        if self.cells_per_axis < 3:
            raise ParameterError(
                f"cells_per_axis must be at least 3, got {self.cells_per_axis!r}"
            )
        if not (self.domain_length > 0 and math.isfinite(self.domain_length)):
            raise ParameterError(f"domain_length must be positive, got {self.domain_length!r}")
        if not (self.velocity > 0 and math.isfinite(self.velocity)):
            raise ParameterError(f"velocity must be positive, got {self.velocity!r}")
        if not (self.frequency >= 0 and math.isfinite(self.frequency)):
            raise ParameterError(f"frequency must be nonnegative, got {self.frequency!r}")

    @classmethod
    def from_wavelength(cls, dim, cells_per_axis, domain_length, wavelength, **kwargs):
        """Convenience constructor fixing the wavelength directly (c = 1)."""
        if not (wavelength > 0 and math.isfinite(wavelength)):
            raise ParameterError(f"wavelength must be positive, got {wavelength!r}")
        return cls(
            dim=dim,
            cells_per_axis=cells_per_axis,
            domain_length=domain_length,
            frequency=1.0 / wavelength,
            velocity=1.0,
            **kwargs,
        )

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi * self.frequency / self.velocity

    @property
    def spacing(self) -> float:
        return self.domain_length / self.cells_per_axis

    @property
    def interior_per_axis(self) -> int:
        return self.cells_per_axis - 1

    @property
    def n_unknowns(self) -> int:
        return self.interior_per_axis**self.dim

    def interior_point(self, flat: int) -> tuple:
        """Coordinates of interior node ``flat`` (first axis fastest)."""
        m = self.interior_per_axis
        h = self.spacing
        coords = []
        rest = flat
        for _ in range(self.dim):
            coords.append((rest % m + 1) * h)
            rest //= m
        return tuple(coords)


def _as_field(value):
    if callable(value):
        return value
    const = complex(value)
    return lambda _point: const


def assemble(p: HelmholtzProblem):
    """Assemble the interior system (A, b) for problem ``p``.

    A is the (2*dim + 1)-point central-difference stencil of
    -laplacian - k^2 on the interior nodes (complex symmetric by
    construction); b collects the source samples plus the Dirichlet boundary
    contributions of boundary-adjacent rows.

    Returns
    -------
    (CsrMatrix, ZVector)
    """
    dim = p.dim
    m = p.interior_per_axis
    h = p.spacing
    inv_h2 = 1.0 / (h * h)
    n = p.n_unknowns
    strides = [m**a for a in range(dim)]
    source = _as_field(p.source)
    dirichlet = _as_field(p.dirichlet_value)
    if p.velocity_field is None:
        k2_at = None
        k2_const = p.wavenumber**2
    else:
        field = p.velocity_field
        two_pi_f = 2.0 * math.pi * p.frequency

        def k2_at(point):
            c = float(field(point))
            if not (c > 0 and math.isfinite(c)):
                raise ParameterError(f"velocity_field({point}) = {c!r} is not positive")
            return (two_pi_f / c) ** 2

    entries = []
    rhs = np.zeros(n, dtype=np.complex128)
    for flat in range(n):
        point = p.interior_point(flat)
        k2 = k2_const if k2_at is None else k2_at(point)
        entries.append((flat, flat, complex(2 * dim * inv_h2 - k2)))
        rest = flat
        for axis in range(dim):
            ix = rest % m
            rest //= m
            for step in (-1, +1):
                neighbor = ix + step
                if 0 <= neighbor < m:
                    entries.append((flat, flat + step * strides[axis], complex(-inv_h2)))
                else:
                    bpoint = list(point)
                    bpoint[axis] = 0.0 if step < 0 else p.domain_length
                    rhs[flat] += inv_h2 * complex(dirichlet(tuple(bpoint)))
        rhs[flat] += complex(source(point))
    A = coo_to_csr(CooMatrix(n, n, entries))
    return A, ZVector(rhs)


def manufactured_solution(p: HelmholtzProblem):
    """Plane-wave verification pair for problem ``p``.

    Picks the exact solution u*(x) = exp(i k x1) along the first axis, for
    which the continuous source -laplacian(u*) - k^2 u* vanishes identically.
    Returns (exact solution on the interior grid, source samples); pair it
    with :func:`manufactured_problem` to assemble the matching system, whose
    solve recovers u* up to the O(h^2) discretization error.
    """
    if p.velocity_field is not None:
        raise ParameterError("manufactured plane wave needs a uniform velocity")
    k = p.wavenumber
    n = p.n_unknowns
    exact = np.empty(n, dtype=np.complex128)
    for flat in range(n):
        exact[flat] = cmath.exp(1j * k * p.interior_point(flat)[0])
    return ZVector(exact), ZVector.zeros(n)


def manufactured_problem(p: HelmholtzProblem) -> HelmholtzProblem:
    """Copy of ``p`` with source and boundary data matching the plane wave."""
    if p.velocity_field is not None:
        raise ParameterError("manufactured plane wave needs a uniform velocity")
    k = p.wavenumber
    return replace(
        p,
        source=0j,
        dirichlet_value=lambda point: cmath.exp(1j * k * point[0]),
    )


_CONFIG_KEYS = {
    "dim": int,
    "cells": int,
    "length": float,
    "frequency": float,
    "velocity": float,
}


def load_problem_config(path) -> HelmholtzProblem:
    """Read a key=value problem description.

    Recognized keys: dim, cells, length, frequency, velocity ('#' starts a
    comment; length/frequency/velocity default to 1.0/0.0/1.0). The loaded
    problem carries a unit interior source so the assembled right-hand side
    is nontrivial.
    """
    values = {}
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            stripped = raw.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ParseError(f"expected key=value, got {stripped!r}", line=lineno)
            key, _, text = stripped.partition("=")
            key = key.strip().lower()
            text = text.strip()
            if key not in _CONFIG_KEYS:
                raise ParseError(f"unknown key {key!r}", line=lineno)
            try:
                values[key] = _CONFIG_KEYS[key](text)
            except ValueError:
                raise ParseError(f"bad value for {key}: {text!r}", line=lineno) from None
    for required in ("dim", "cells"):
        if required not in values:
            raise ParseError(f"missing required key {required!r}")
    try:
        return HelmholtzProblem(
            dim=values["dim"],
            cells_per_axis=values["cells"],
            domain_length=values.get("length", 1.0),
            frequency=values.get("frequency", 0.0),
            velocity=values.get("velocity", 1.0),
            source=1 + 0j,
        )
    except ParameterError as exc:
        raise ParseError(str(exc)) from exc
