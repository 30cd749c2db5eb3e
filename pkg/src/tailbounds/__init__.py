"""Tail bounds, certificates and exact oracles for sums of i.i.d. geometric
and exponential random variables."""
from .bounds import (
    BoundMethod, BoundReport, CertMode, Direction, agrawal_bound, certificate_bound,
    compare_all, janson_bound, janson_quadratic, thm1_bound,
)
from .chernoff import (
    ExponentCurve, Family, OptimumReport, closed_form_optimum, exponent, mgf, numeric_optimum,
)
from .distributions import (
    ExponentialSpec, GeometricSpec, Kind, Side, TailQuery, density, make_spec, sample,
)
from .errors import (
    BudgetExceeded, DomainError, NonConvergence, PreconditionError, SideMismatch,
    TailBoundError,
)
from .exact import LogProb, McEstimate, brute_force_tail, exact_tail, mc_tail
from .numerics import (
    StirlingBracket, ln_binomial, ln_factorial, log_sum_exp, stirling_bounds,
)
from .rates import (
    delta_terms, grad_H, hess_diag_H, prop_lower_bound, rate_G, rate_H, rate_H1H2,
)
from .verify import Counterexample, GridSpec, Suite, SuiteReport, asymptotic_ratio, run_suite

__version__ = "0.1.0"
