"""Fixed-precision p-adic numerics on chart groups: filtrations, power maps,
log/exp as limits, Trotter sums, second-kind coordinates and Lazard audits."""

from .errors import (
    ConvergenceFailure,
    NonContraction,
    NotAUnit,
    NotDivisible,
    OutOfChart,
    OutOfDomain,
    PadicError,
    PrecisionExhausted,
    SingularBasis,
    UsageError,
)
from .explog import (
    ConvergenceReport,
    exp_chart,
    log_chart,
    one_param,
    second_kind,
    second_kind_inverse,
    standard_basis,
    trotter_sum,
)
from .groups import (
    ChartGroup,
    ChartVector,
    GLCongruence,
    Heisenberg,
    Multiplicative,
    audit_filtration,
    commutator,
    inv,
    mul,
    parse_group,
    power_int,
)
from .padic import NormExp, QpScalar, ZpInt, div_pow_p, val, zp_add, zp_inv, zp_mul, zp_random
from .powermaps import PthRootResult, power_padic, pth_root, tau_p

__version__ = "0.1.0"
