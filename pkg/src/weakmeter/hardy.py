"""Which-path weak measurements in the interaction-free double interferometer.

Two particles (electron first slot, positron second; single-particle basis
ordered (O, NO) for "overlapping" / "non-overlapping" arm) are preselected
in

    |psi_i> = (|O,NO> + |NO,O> + |NO,NO>) / sqrt(3)

— the |O,O> component is removed by the annihilation channel — and
postselected on both dark ports,

    |psi_f> = (|O> - |NO>)(x)(|O> - |NO>) / 2.

Weakly measuring the four arm-pair projectors and reading the inferred
occupation probability delta_q / g off the pointer reproduces the paradox:
the two single-overlap pairs read 1, the double-overlap pair reads 0, and
the double-non-overlap pair reads -1 at weak coupling, rising monotonically
to +1/5 at strong coupling.  Every point is computed twice — through the
exact engine and through the closed forms below — and the two must agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InternalConsistencyError, ValidationError
from .exactengine import GaussianPointer, MeasurementSetup, exact_shifts
from .qcore import (
    DensityOperator,
    HermitianObservable,
    ProjectionOperator,
    StateVector,
    tensor_product,
)

#: Arm-pair labels, electron arm first: O = overlapping, NO = non-overlapping.
PATH_LABELS = ("OO", "ONO", "NOO", "NONO")


@dataclass(frozen=True)
class HardyScenario:
    """The fixed pre/postselection and the four which-path projectors."""

    preselection: StateVector
    postselection: ProjectionOperator
    operators: dict[str, ProjectionOperator]


@dataclass(frozen=True)
class ProbabilityPoint:
    """Inferred arm-pair occupation probabilities at one coupling strength."""

    g: float
    prob_oo: float
    prob_ono: float
    prob_noo: float
    prob_nono: float


def build_hardy() -> HardyScenario:
    """Construct the scenario in the 4-dimensional two-particle space.

    Basis order: index 0 = |O,O>, 1 = |O,NO>, 2 = |NO,O>, 3 = |NO,NO>
    (electron slot most significant).
    """
    pre = StateVector(np.array([0.0, 1.0, 1.0, 1.0], dtype=complex) / np.sqrt(3.0))
    post = StateVector(np.array([1.0, -1.0, -1.0, 1.0], dtype=complex) / 2.0).projector()
    p_o = ProjectionOperator(np.diag([1.0, 0.0]).astype(complex))
    p_no = p_o.complement()
    ops = {
        "OO": tensor_product(p_o, p_o),
        "ONO": tensor_product(p_o, p_no),
        "NOO": tensor_product(p_no, p_o),
        "NONO": tensor_product(p_no, p_no),
    }
    total = sum(p.matrix for p in ops.values())
    assert float(np.max(np.abs(total - np.eye(4)))) == 0.0
    return HardyScenario(pre, post, ops)


def closed_form_shifts(g: float, delta: float) -> dict[str, float]:
    """Exact position shifts of the four which-path pointers, closed form.

    With G = exp(-g^2 / (8 delta^2)):

        OO:   0           (the annihilation channel empties this branch)
        ONO:  g            NOO: g      (single-branch selections)
        NONO: g (1 - 2 G) / (5 - 4 G)
    """
    if delta <= 0.0:
        raise ValidationError(f"delta must be positive, got {delta!r}")
    overlap = float(np.exp(-(g**2) / (8.0 * delta**2)))
    return {
        "OO": 0.0,
        "ONO": g,
        "NOO": g,
        "NONO": g * (1.0 - 2.0 * overlap) / (5.0 - 4.0 * overlap),
    }


def infer_probability(delta_q: float, g: float) -> float:
    """Occupation probability read off the pointer: delta_q / g.

    Interprets the position record of a weak which-path coupling; can be
    negative or exceed the eigenvalue range for postselected ensembles.

    Raises
    ------
    ValidationError
        If g <= 0 (the ratio is undefined without a kick).
    """
    if not np.isfinite(g) or g <= 0.0:
        raise ValidationError(f"inferred probability requires g > 0, got {g!r}")
    return delta_q / g


@lru_cache(maxsize=1)
def _cached_pieces() -> tuple[DensityOperator, ProjectionOperator, dict[str, HermitianObservable]]:
    sc = build_hardy()
    observables = {
        label: HermitianObservable.from_projector(proj) for label, proj in sc.operators.items()
    }
    return sc.preselection.density(), sc.postselection, observables


def hardy_probabilities(g: float, delta: float = 1.0) -> ProbabilityPoint:
    """All four inferred probabilities at coupling g, engine-vs-closed-form checked.

    Each shift is computed through :func:`weakmeter.exactengine.exact_shifts`
    and through :func:`closed_form_shifts`; the routes must agree within
    relative 1e-12 (with a 1e-14 * max(g, delta) absolute floor so the
    NO-NO zero crossing near g = delta * sqrt(8 ln 2) stays well-posed).

    Raises
    ------
    InternalConsistencyError
        If the two routes disagree.
    """
    if not np.isfinite(g) or g <= 0.0:
        raise ValidationError(f"coupling g must be positive, got {g!r}")
    rho, post, observables = _cached_pieces()
    pointer = GaussianPointer(delta)
    expected = closed_form_shifts(g, delta)
    probs: dict[str, float] = {}
    floor = 1e-14 * max(g, delta)
    for label in PATH_LABELS:
        outcome = exact_shifts(MeasurementSetup(observables[label], rho, post, g, pointer))
        gap = abs(outcome.delta_q - expected[label])
        if gap > 1e-12 * abs(expected[label]) + floor:
            raise InternalConsistencyError(
                f"engine and closed-form shifts disagree for {label} at g = {g!r}: "
                f"{outcome.delta_q!r} vs {expected[label]!r}"
            )
        probs[label] = infer_probability(outcome.delta_q, g)
    return ProbabilityPoint(g, probs["OO"], probs["ONO"], probs["NOO"], probs["NONO"])


def probability_curve(
    g_min: float,
    g_max: float,
    points: int,
    delta: float = 1.0,
    spacing: str = "log",
) -> list[ProbabilityPoint]:
    """Sweep the inferred probabilities over a coupling range.

    spacing is "log" (default) or "lin".  The NO-NO probability is checked
    to be non-decreasing along the curve; it is strictly increasing
    everywhere the overlap G has not underflowed (g below ~12 delta).
    """
    if not np.isfinite(g_min) or not np.isfinite(g_max) or g_min <= 0.0 or g_max <= g_min:
        raise ValidationError(f"need 0 < g_min < g_max, got {g_min!r}, {g_max!r}")
    if points < 2:
        raise ValidationError(f"points must be >= 2, got {points!r}")
    if spacing == "log":
        gs = np.geomspace(g_min, g_max, points)
    elif spacing == "lin":
        gs = np.linspace(g_min, g_max, points)
    else:
        raise ValidationError(f"spacing must be 'lin' or 'log', got {spacing!r}")
    curve = [hardy_probabilities(float(g), delta) for g in gs]
    for prev, here in zip(curve, curve[1:]):
        if here.prob_nono < prev.prob_nono:
            raise InternalConsistencyError(
                f"NO-NO probability decreased between g = {prev.g!r} and {here.g!r}"
            )
    return curve
