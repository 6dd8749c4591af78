"""Benchmark harness: repeated timed kernel runs reported as ms and Gflops.

Level-1 kernels and SpMV are timed over at least 100 repetitions (or enough
to dwarf the clock resolution a hundredfold, whichever binds) after one
untimed warm-up, and the mean is reported; solver runs are timed once, since
iteration count rather than timer noise dominates them. Input data is drawn
uniformly from the complex unit square with a fixed seed, so contents are
identical across runs.

The module doubles as the ``bench`` command-line tool::

    bench kernel --op zaxpy --size 1000000 --reps 100
    bench spmv --matrix path.mtx
    bench solve --method tfqmr --matrix path.mtx --tol 1e-9 --precond jacobi
    bench solve --problem problem.cfg --method bicgstab_l --l 8

Exit codes: 0 success, 2 non-convergence, 3 parse/usage error, 4 breakdown.
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

import numpy as np

from .cnum import FLOPS
from .errors import (
    BreakdownError,
    DimensionError,
    FormatError,
    ParameterError,
    ParseError,
    SingularPreconditionerError,
)
from .helmholtz import assemble, load_problem_config
from .krylov import Preconditioner, SolverConfig, build_jacobi, solve_bicgstab, solve_bicgstab_l, solve_tfqmr
from .sparse import coo_to_csr, read_matrix_market, spmv
from .vecops import DEFAULT_PLAN, ZVector, zassign, zaxmy, zaxpy, zdot, znorm2, zscal

__all__ = [
    "BenchRecord",
    "KERNEL_OPS",
    "REFERENCE_CPU_KERNELS",
    "bench_kernel",
    "bench_spmv",
    "bench_solver",
    "emit_report",
    "read_report_csv",
    "random_zvector",
    "main",
]

KERNEL_OPS = ("zassign", "zscal", "zaxpy", "zaxmy", "zdot", "znorm")

SOLVER_METHODS = {
    "bicgstab": solve_bicgstab,
    "bicgstab_l": solve_bicgstab_l,
    "tfqmr": solve_tfqmr,
}

# Published CPU baselines (Intel Core i7 920, complex double precision) for
# the six level-1 kernels: size -> (mean time in ms, Gflops). Shown beside
# fresh measurements for context; never a pass/fail target.
REFERENCE_CPU_KERNELS = {
    "zassign": {
        100_000: (0.10, 0.96),
        500_000: (0.75, 0.67),
        1_000_000: (2.04, 0.49),
        8_000_000: (15.71, 0.51),
        10_000_000: (20.00, 0.50),
        15_000_000: (27.50, 0.55),
    },
    "zscal": {
        100_000: (0.81, 0.74),
        500_000: (4.17, 0.72),
        1_000_000: (8.33, 0.72),
        8_000_000: (65.00, 0.74),
        10_000_000: (85.00, 0.71),
        15_000_000: (120.00, 0.75),
    },
    "zaxpy": {
        100_000: (0.83, 0.97),
        500_000: (4.17, 0.96),
        1_000_000: (8.33, 0.96),
        8_000_000: (65.00, 0.98),
        10_000_000: (85.00, 0.94),
        15_000_000: (130.00, 0.92),
    },
    "zaxmy": {
        100_000: (1.37, 0.44),
        500_000: (6.25, 0.48),
        1_000_000: (13.75, 0.44),
        8_000_000: (100.00, 0.48),
        10_000_000: (130.00, 0.46),
        15_000_000: (190.00, 0.47),
    },
    "zdot": {
        100_000: (0.88, 0.91),
        500_000: (4.55, 0.88),
        1_000_000: (9.09, 0.88),
        8_000_000: (70.00, 0.91),
        10_000_000: (90.00, 0.89),
        15_000_000: (130.00, 0.92),
    },
    "znorm": {
        100_000: (1.72, 0.29),
        500_000: (7.69, 0.33),
        1_000_000: (16.67, 0.30),
        8_000_000: (140.00, 0.29),
        10_000_000: (170.00, 0.29),
        15_000_000: (260.00, 0.29),
    },
}

_CLOCK_RESOLUTION = time.get_clock_info("perf_counter").resolution


@dataclass
class BenchRecord:
    """One row of a benchmark table."""

    op_name: str
    size: int
    repetitions: int
    mean_time_ms: float
    gflops: float | None = None
    iterations: int | None = None
    residual: float | None = None
    converged: bool | None = None
    ref_cpu_ms: float | None = None
    ref_gflops: float | None = None
    note: str | None = None


def random_zvector(n: int, rng) -> ZVector:
    """Vector with entries uniform in the complex unit square [0,1) x [0,1)i."""
    return ZVector(rng.random(n) + 1j * rng.random(n))


def _timed_mean_ms(fn, repetitions: int):
    """Warm up once, then time; escalate repetitions until either the
    requested floor of 100 or the 100x-clock-resolution floor is met."""
    fn()
    reps = max(1, int(repetitions))
    min_total = 100.0 * _CLOCK_RESOLUTION
    while True:
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        total = time.perf_counter() - t0
        if total > 0 and (reps >= 100 or total >= min_total):
            return total / reps * 1e3, reps
        reps *= 2


def bench_kernel(op_name: str, size: int, repetitions: int = 100, seed: int = 42,
                 plan=DEFAULT_PLAN) -> BenchRecord:
    """Time one level-1 kernel at the given size and average over repetitions."""
    if op_name not in KERNEL_OPS:
        raise ParameterError(f"unknown kernel {op_name!r}; choose from {KERNEL_OPS}")
    if size < 1:
        raise ParameterError(f"size must be >= 1, got {size}")
    rng = np.random.default_rng(seed)
    x = random_zvector(size, rng)
    y = random_zvector(size, rng)
    alpha = complex(rng.random(), rng.random())
    if op_name == "zassign":
        fn = lambda: zassign(y, x)
    elif op_name == "zscal":
        fn = lambda: zscal(alpha, x)
    elif op_name == "zaxpy":
        fn = lambda: zaxpy(alpha, x, y)
    elif op_name == "zaxmy":
        fn = lambda: zaxmy(x, y)
    elif op_name == "zdot":
        fn = lambda: zdot(x, y, True, plan)
    else:
        fn = lambda: znorm2(x, plan)
    mean_ms, reps = _timed_mean_ms(fn, repetitions)
    ref = REFERENCE_CPU_KERNELS[op_name].get(size)
    return BenchRecord(
        op_name=op_name,
        size=size,
        repetitions=reps,
        mean_time_ms=mean_ms,
        gflops=FLOPS.flops(op_name, size) / (mean_ms * 1e6),
        ref_cpu_ms=ref[0] if ref else None,
        ref_gflops=ref[1] if ref else None,
    )


def bench_spmv(matrix_path, repetitions: int = 100, seed: int = 42) -> BenchRecord:
    """Time the CSR matrix-vector product of a Matrix Market file."""
    A = coo_to_csr(read_matrix_market(matrix_path))
    rng = np.random.default_rng(seed)
    x = random_zvector(A.n_cols, rng)
    mean_ms, reps = _timed_mean_ms(lambda: spmv(A, x), repetitions)
    return BenchRecord(
        op_name="spmv",
        size=A.nnz,
        repetitions=reps,
        mean_time_ms=mean_ms,
        gflops=FLOPS.flops("spmv", A.nnz) / (mean_ms * 1e6),
    )


def bench_solver(method: str, matrix_path=None, problem_path=None, cfg: SolverConfig | None = None,
                 precond: str = "jacobi", seed: int = 42) -> BenchRecord:
    """Run one timed solve and record iterations plus the final residual.

    The system comes either from a Matrix Market file (with a fixed-seed
    random right-hand side) or from an assembled problem config. Solver
    breakdown is reported in the record's ``note`` rather than raised.
    """
    if (matrix_path is None) == (problem_path is None):
        raise ParameterError("provide exactly one of matrix_path / problem_path")
    if method not in SOLVER_METHODS:
        raise ParameterError(f"unknown method {method!r}; choose from {sorted(SOLVER_METHODS)}")
    if matrix_path is not None:
        A = coo_to_csr(read_matrix_market(matrix_path))
        rng = np.random.default_rng(seed)
        b = random_zvector(A.n, rng)
    else:
        A, b = assemble(load_problem_config(problem_path))
    if precond == "jacobi":
        M = build_jacobi(A)
    elif precond in ("identity", "none"):
        M = Preconditioner.identity()
    else:
        raise ParameterError(f"unknown preconditioner {precond!r}")
    cfg = cfg or SolverConfig()
    try:
        _, report = SOLVER_METHODS[method](A, b, M, cfg)
        note = None
    except BreakdownError as exc:
        report = exc.report
        note = f"breakdown: {exc}"
    return BenchRecord(
        op_name=method,
        size=A.n,
        repetitions=1,
        mean_time_ms=report.elapsed_ms,
        gflops=None,
        iterations=report.iterations,
        residual=report.final_relative_residual,
        converged=report.converged,
        note=note,
    )


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

_CSV_HEADER = "op,size,reps,time_ms,gflops,iterations,residual,converged"


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_report(records, format: str = "csv") -> str:
    """Render records as CSV or a markdown table (h / time / Gflops shape)."""
    if format == "csv":
        lines = [_CSV_HEADER]
        for r in records:
            lines.append(",".join(_csv_cell(v) for v in (
                r.op_name, r.size, r.repetitions, r.mean_time_ms, r.gflops,
                r.iterations, r.residual, r.converged,
            )))
        return "\n".join(lines) + "\n"
    if format in ("md", "markdown-table"):
        records = list(records)
        with_ref = any(r.ref_cpu_ms is not None for r in records)
        with_solve = any(r.iterations is not None for r in records)
        with_note = any(r.note for r in records)
        head = ["op", "h", "time (ms)", "Gflops"]
        if with_ref:
            head += ["ref cpu (ms)", "ref Gflops"]
        if with_solve:
            head += ["iters", "residual", "converged"]
        if with_note:
            head += ["note"]
        rows = [head, ["---"] * len(head)]
        for r in records:
            row = [
                r.op_name,
                f"{r.size:,}",
                f"{r.mean_time_ms:.6g}",
                "" if r.gflops is None else f"{r.gflops:.4g}",
            ]
            if with_ref:
                row += [
                    "" if r.ref_cpu_ms is None else f"{r.ref_cpu_ms:.6g}",
                    "" if r.ref_gflops is None else f"{r.ref_gflops:.4g}",
                ]
            if with_solve:
                row += [
                    "" if r.iterations is None else str(r.iterations),
                    "" if r.residual is None else f"{r.residual:.6g}",
                    "" if r.converged is None else ("yes" if r.converged else "no"),
                ]
            if with_note:
                row += [r.note or ""]
            rows.append(row)
        return "\n".join("| " + " | ".join(row) + " |" for row in rows) + "\n"
    raise ParameterError(f"unknown report format {format!r} (csv, md)")


def read_report_csv(text: str):
    """Parse :func:`emit_report` CSV output back into records."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != _CSV_HEADER:
        raise ParseError(f"unexpected CSV header {lines[0] if lines else ''!r}", line=1)
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 8:
            raise ParseError(f"expected 8 fields, got {len(parts)}", line=lineno)
        op, size, reps, time_ms, gflops, iterations, residual, converged = parts
        records.append(BenchRecord(
            op_name=op,
            size=int(size),
            repetitions=int(reps),
            mean_time_ms=float(time_ms),
            gflops=float(gflops) if gflops else None,
            iterations=int(iterations) if iterations else None,
            residual=float(residual) if residual else None,
            converged=None if not converged else converged == "true",
        ))
    return records


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # usage problems share exit code 3 with file parse errors; 2 is reserved
    # for non-converged solves
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bench", description="Complex sparse linear algebra benchmarks")
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("csv", "md"), default="md", help="report format")
    common.add_argument("--seed", type=int, default=42, help="data generation seed")
    common.add_argument("--threads", type=int, default=1,
                        help="requested parallel width (kernels currently run "
                             "single-threaded and deterministic; accepted for compatibility)")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")

    sub = parser.add_subparsers(dest="command", required=True)

    kern = sub.add_parser("kernel", parents=[common], help="time one level-1 kernel")
    kern.add_argument("--op", required=True, choices=KERNEL_OPS)
    kern.add_argument("--size", required=True, type=int)
    kern.add_argument("--reps", type=int, default=100)

    spmv_p = sub.add_parser("spmv", parents=[common], help="time the CSR matrix-vector product")
    spmv_p.add_argument("--matrix", required=True)
    spmv_p.add_argument("--reps", type=int, default=100)

    solve = sub.add_parser("solve", parents=[common], help="run one timed Krylov solve")
    solve.add_argument("--method", required=True, choices=sorted(SOLVER_METHODS))
    src = solve.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", help="Matrix Market file (random fixed-seed rhs)")
    src.add_argument("--problem", help="key=value problem config to assemble")
    solve.add_argument("--tol", type=float, default=1e-9)
    solve.add_argument("--maxit", type=int, default=1000)
    solve.add_argument("--l", type=int, default=8, help="polynomial degree for bicgstab_l")
    solve.add_argument("--precond", choices=("jacobi", "identity", "none"), default="jacobi")
    return parser


def _write_out(text: str, out) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error(f"--threads must be >= 1, got {args.threads}")
    fmt = args.format
    try:
        if args.command == "kernel":
            record = bench_kernel(args.op, args.size, repetitions=args.reps, seed=args.seed)
        elif args.command == "spmv":
            record = bench_spmv(args.matrix, repetitions=args.reps, seed=args.seed)
        else:
            cfg = SolverConfig(tolerance=args.tol, max_iterations=args.maxit, l=args.l)
            record = bench_solver(
                args.method,
                matrix_path=args.matrix,
                problem_path=args.problem,
                cfg=cfg,
                precond=args.precond,
                seed=args.seed,
            )
    except (ParseError, FormatError, ParameterError, DimensionError, OSError) as exc:
        print(f"bench: error: {exc}", file=sys.stderr)
        return 3
    except SingularPreconditionerError as exc:
        print(f"bench: error: {exc}", file=sys.stderr)
        return 4
    _write_out(emit_report([record], fmt), args.out)
    if record.note:
        return 4
    if record.converged is False:
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
