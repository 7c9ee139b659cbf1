"""cxlin: complex-linearizability toolkit for pairs of second-order equations.

The package decides whether a coupled pair of real second-order ODEs or PDEs
is equivalent, under the complex join u = f + i*g, to a single scalar
cubic-semilinear equation satisfying the classical point-linearizability
conditions, and numerically verifies linearizing transformations and
closed-form solutions.
"""

from cxlin.symexpr import (  # noqa: F401
    Expr,
    C,
    sym,
    normalize,
    differentiate,
    substitute,
    eval_complex,
    is_identically_zero,
    collect_polynomial,
)

__version__ = "0.1.0"
