"""Complex double-precision sparse linear algebra for acoustic systems.

Level-1 vector kernels, CSR sparse matrix-vector product, preconditioned
Krylov solvers (BiCGSTAB, BiCGSTAB(l), TFQMR), a structured-grid Helmholtz
problem generator, and a benchmark CLI (`bench`).
"""

from .cnum import FLOPS, Cplx, FlopModel, cabs2, cadd, cdiv, cmul, conj, csub
from .errors import (
    BreakdownError,
    DimensionError,
    FormatError,
    ParameterError,
    ParseError,
    SingularPreconditionerError,
)
from .vecops import (
    BLOCKED,
    DEFAULT_PLAN,
    SEQUENTIAL,
    ReductionPlan,
    ZVector,
    read_zvector,
    write_zvector,
    zassign,
    zaxmy,
    zaxmy_copy,
    zaxpy,
    zaxpy_copy,
    zdot,
    znorm2,
    zscal,
    zscal_copy,
)
from .sparse import (
    CooMatrix,
    CsrMatrix,
    MatrixStats,
    coo_to_csr,
    read_csr_binary,
    read_matrix_market,
    spmv,
    stats,
    write_csr_binary,
    write_matrix_market,
)
from .krylov import (
    Preconditioner,
    SolveReport,
    SolverConfig,
    build_jacobi,
    solve_bicgstab,
    solve_bicgstab_l,
    solve_tfqmr,
)
from .helmholtz import (
    HelmholtzProblem,
    assemble,
    load_problem_config,
    manufactured_problem,
    manufactured_solution,
)
from .bench import (
    BenchRecord,
    REFERENCE_CPU_KERNELS,
    bench_kernel,
    bench_solver,
    bench_spmv,
    emit_report,
    random_zvector,
    read_report_csv,
)

__version__ = "0.1.0"

__all__ = [
    "Cplx", "FlopModel", "FLOPS", "cadd", "csub", "cmul", "cdiv", "conj", "cabs2",
    "ZVector", "ReductionPlan", "SEQUENTIAL", "BLOCKED", "DEFAULT_PLAN",
    "zassign", "zscal", "zaxpy", "zaxmy", "zdot", "znorm2",
    "zscal_copy", "zaxpy_copy", "zaxmy_copy", "write_zvector", "read_zvector",
    "CooMatrix", "CsrMatrix", "MatrixStats", "coo_to_csr", "spmv", "stats",
    "read_matrix_market", "write_matrix_market", "write_csr_binary", "read_csr_binary",
    "SolverConfig", "Preconditioner", "SolveReport", "build_jacobi",
    "solve_bicgstab", "solve_bicgstab_l", "solve_tfqmr",
    "HelmholtzProblem", "assemble", "manufactured_solution", "manufactured_problem",
    "load_problem_config",
    "BenchRecord", "REFERENCE_CPU_KERNELS", "bench_kernel", "bench_spmv", "bench_solver",
    "emit_report", "read_report_csv", "random_zvector",
    "DimensionError", "FormatError", "ParseError", "ParameterError",
    "SingularPreconditionerError", "BreakdownError",
]
