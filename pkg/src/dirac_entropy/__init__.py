"""Traces of entropy-type operator differences for free Dirac fermions on
unions of intervals: closed forms, U coefficients, and independent
numerical routes (cutoff spectra, block words, Widom symbols, Herglotz
representation)."""

__version__ = "0.1.0"

from .closedform import (ClosedFormResult, intersecting_trace, n_interval, renyi_coefficient,  # noqa: E402
                         renyi_ee, separation_expansion, two_interval_trace)
from .errors import (ArgumentError, EntropyToolkitError, FunctionSpecError, GeometryError,  # noqa: E402
                     NumericalError, ResourceError, TouchingClosuresError)
from .geometry import (Interval, IntervalSet, Partition, apply_mobius, cross_ratio_log,  # noqa: E402
                       multi_cross_ratio_log)
from .herglotz import b_alpha, f_alpha, herglotz_eval, von_neumann_eval  # noqa: E402
from .testfns import TestFunction, monomial, parse_function, polynomial, renyi, renyi_eval, u_coefficient  # noqa: E402
from .traces import (SweepConfig, TraceEstimate, delta_trace_cutoff, delta_trace_poly,  # noqa: E402
                     f_trace_cutoff, f_trace_poly_limit)
from .widom import widom_combination, widom_limit  # noqa: E402
