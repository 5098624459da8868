"""Fast QMC matrix-vector products with reordered lattice point sets.

Rows ``1..N-1`` of the point matrix of a prime-``N`` rank-1 lattice rule,
enumerated through the powers of a primitive root, are columns of one
circulant matrix. Products ``Y a`` and ``Y A`` then cost FFTs of length
``N - 1`` instead of a dense ``O(N s)`` pass per column.

Modules
-------
modular   primality, primitive roots, discrete logarithms
spectral  arbitrary-length DFTs and circulant operators
lattice   lattice orderings, Korobov p-sets, transforms, CBC construction
fastmv    fast and naive point-matrix products
gauss     normally distributed points with general covariance
fem1d     parametric 1D finite elements with fast stiffness assembly
bench     benchmark harness with CSV records
selftest  built-in verification suites
cli       command-line front end
"""

from .fastmv import (
    FastLatticeMatrix,
    KorobovFastMatrix,
    SelectionMap,
    fast_matmat,
    fast_matvec,
    korobov_fast_matmat,
    korobov_naive_matmat,
    naive_matmat,
    naive_matvec,
    naive_points,
)
from .fem1d import lognormal_table, solve_lognormal, solve_uniform, uniform_table
from .gauss import (
    GaussianSpec,
    cholesky_upper,
    generate_normal,
    generate_normal_naive,
    inv_normal_cdf,
    normal_cdf,
)
from .lattice import (
    GeneratingVector,
    KorobovPSet,
    ReorderedLattice,
    Transform,
    cbc_construct,
    korobov_pset,
    parse_generating_vector,
    reorder_lattice,
    worst_case_error,
)
from .modular import is_prime, primitive_root
from .spectral import CirculantOperator, circulant_apply, dft, make_circulant

__version__ = "0.1.0"

__all__ = [
    "CirculantOperator",
    "FastLatticeMatrix",
    "GaussianSpec",
    "GeneratingVector",
    "KorobovFastMatrix",
    "KorobovPSet",
    "ReorderedLattice",
    "SelectionMap",
    "Transform",
    "cbc_construct",
    "cholesky_upper",
    "circulant_apply",
    "dft",
    "fast_matmat",
    "fast_matvec",
    "generate_normal",
    "generate_normal_naive",
    "inv_normal_cdf",
    "is_prime",
    "korobov_fast_matmat",
    "korobov_naive_matmat",
    "korobov_pset",
    "lognormal_table",
    "make_circulant",
    "naive_matmat",
    "naive_matvec",
    "naive_points",
    "normal_cdf",
    "parse_generating_vector",
    "primitive_root",
    "reorder_lattice",
    "solve_lognormal",
    "solve_uniform",
    "uniform_table",
    "worst_case_error",
]
