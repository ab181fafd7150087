"""Shared numeric conventions and thresholds.

Every tolerance or limit that more than one module relies on lives here so
the values are documented once. Test tolerances that only the test suite
uses are frozen inside the tests instead.
"""
from __future__ import annotations

# Desk conventions for the bundled scenarios. These are toolkit defaults,
# chosen to give a lightly damped small servo axis, not measurements of any
# particular rig.
DEFAULT_INERTIA = 5e-3          # kg m^2
DEFAULT_VISCOUS_FRICTION = 1e-2  # N m s / rad
DEFAULT_SAMPLING_TIME = 1e-3    # s

# Dimensionless friction-times-sampling product below which the phi-function
# family is summed as a series. Above it the expm1-based upward recurrence
# is used. Both branches deliver machine accuracy at the boundary; the
# series branch reduces to the frictionless limits as b*Ts -> 0.
SERIES_SWITCH = 1.0

# Composite-Simpson panels for the exact disturbance increment.
DEFAULT_SUBSTEPS = 64

# Largest supported Taylor order for the generalized observer family.
MAX_TAYLOR_ORDER = 4

# A simulated state or observer magnitude beyond this is divergence.
DIVERGENCE_LIMIT = 1e6

# An eigenvalue within this distance of +1 counts as the structural
# marginal mode of the inner loop.
UNIT_EIGEN_TOL = 1e-9

# The analytic inner-loop eigenvalue set assumes the plant and the nominal
# model share the friction-to-inertia ratio to within this relative bound.
FRICTION_RATIO_TOL = 1e-9

# Change-of-basis matrices with a condition number above this are rejected
# in favor of the numeric eigenvector fallback.
CONDITION_LIMIT = 1e12

# Incremental quadrature encoder: lines per revolution, read in x4 mode.
ENCODER_LINES = 2500
ENCODER_QUADRATURE = 4
