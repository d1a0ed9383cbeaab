"""Exception hierarchy for the weakmeter package.

Every error raised deliberately by this package derives from
:class:`WeakMeterError`, so callers can catch one base class.  The CLI maps
subclasses onto exit codes (see ``weakmeter.cli``).
"""

from __future__ import annotations


class WeakMeterError(Exception):
    """Base class for all weakmeter errors."""


class ValidationError(WeakMeterError):
    """An input failed a structural invariant (shape, hermiticity, norm, range)."""


class OrthogonalSelectionError(WeakMeterError):
    """Pre- and postselection are (numerically) orthogonal.

    Raised when a selection probability falls at or below 1e-14, where the
    conditional pointer statistics stop being well defined in double
    precision.
    """


class DegenerateDenominatorError(WeakMeterError):
    """The second-order shift denominator vanished (|D| <= 1e-12)."""


class ContractError(WeakMeterError):
    """An operation was called outside its stated contract (e.g. a
    projector-only formula applied to a non-projector observable)."""


class RegimeError(WeakMeterError):
    """A weak-coupling-only check was requested outside the weak regime."""


class UndefinedExtremeError(WeakMeterError):
    """Extreme pointer shifts are undefined for the requested parameters
    (the g -> 0 envelope diverges as a relative quantity: both extremes
    collapse to zero shift while their ratio to g diverges)."""


class InternalConsistencyError(WeakMeterError):
    """Two routes that must agree disagreed, or a proven inequality was
    violated numerically.  This indicates a bug, not bad input."""
