"""Compartmental models, kinetic validation and reaction-network correspondence.

A :class:`CompartmentalModel` is the linear system ``c' = A c + b``; with
complex lengths ``y`` it stands for the generalized system
``c_m' = sum_p a_mp c_p**y_p + b_m``. :func:`induce_reaction_network` builds
an inducing generalized compartmental network and :func:`derive_ode`
recovers the model from a network.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._arrays import as_real_array, is_exact
from .errors import DimensionMismatch, InvalidNetwork, NotCompartmentalShape, NotKinetic

# relative slack used for float models; exact (Fraction) models use zero
FLOAT_RTOL = 1e-12


@dataclass(frozen=True)
class CompartmentalModel:
    """The system ``c' = A c + b`` over labelled species.

    ``A`` and ``b`` are float arrays, or object arrays of Fractions when any
    input entry is a Fraction. ``y`` holds the complex lengths (all ones for an
    ordinary compartmental system).
    """

    A: np.ndarray
    b: np.ndarray | None = None
    y: tuple[int, ...] | None = None
    species: tuple[str, ...] | None = None

    def __post_init__(self):
        A = as_real_array(self.A, 2, "A")
        n = A.shape[0]
        if A.shape != (n, n):
            raise DimensionMismatch(f"A must be square, got {A.shape}")
        exact = is_exact(A)
        if self.b is None:
            b = as_real_array([Fraction(0)] * n if exact else [0.0] * n, 1, "b")
        else:
            b = as_real_array(self.b, 1, "b")
        if exact != is_exact(b):
            # mixed exact/float input: promote the float side
            A = as_real_array([[Fraction(v) for v in row] for row in A], 2, "A")
            b = as_real_array([Fraction(v) for v in b], 1, "b")
        y = tuple(int(v) for v in self.y) if self.y is not None else (1,) * n
        if self.y is not None and any(int(v) != v for v in self.y):
            raise ValueError("complex lengths y must be integers")
        species = tuple(self.species) if self.species is not None else tuple(f"X{i + 1}" for i in range(n))
        if not (len(b) == len(y) == len(species) == n):
            raise DimensionMismatch(
                f"A is {n}x{n} but len(b)={len(b)}, len(y)={len(y)}, len(species)={len(species)}"
            )
        if any(v < 1 for v in y):
            raise ValueError("complex lengths y must be positive")
        if any(v > 1 for v in y) and len(set(y)) != len(y):
            raise ValueError("complex lengths must be pairwise distinct when any exceeds 1")
        if len(set(species)) != len(species):
            raise ValueError("species labels must be unique")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "species", species)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def exact(self) -> bool:
        return is_exact(self.A)

    def float_A(self) -> np.ndarray:
        return self.A.astype(float)

    def float_b(self) -> np.ndarray:
        return self.b.astype(float)

    def to_dict(self) -> dict:
        return {
            "species": list(self.species),
            "A": [[_encode_scalar(v) for v in row] for row in self.A],
            "b": [_encode_scalar(v) for v in self.b],
            "y": list(self.y),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CompartmentalModel":
        if "A" not in data:
            raise ValueError("model JSON needs an 'A' entry")
        A = [[_decode_scalar(v) for v in row] for row in data["A"]]
        b = [_decode_scalar(v) for v in data["b"]] if data.get("b") is not None else None
        return cls(A=A, b=b, y=data.get("y"), species=data.get("species"))


def _encode_scalar(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    return float(v)


def _decode_scalar(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError(f"expected a number or a 'p/q' string, got {v!r}")
    return v


# ---------------------------------------------------------------------------
# kinetic validation


@dataclass(frozen=True)
class Violation:
    """One failed inequality: ``condition`` id, the indices involved, and the offending value."""

    condition: str
    index: tuple[int, ...]
    value: object


OFFDIAG_NEGATIVE = "offdiagonal-negative"
INFLOW_NEGATIVE = "inflow-negative"
COLUMN_DOMINANCE = "column-dominance"
COMPLEX_VALUED = "complex-valued"


@dataclass(frozen=True)
class KineticReport:
    is_kinetic: bool
    is_compartmental: bool
    violations: tuple[Violation, ...] = ()

    def to_dict(self) -> dict:
        return {
            "is_kinetic": self.is_kinetic,
            "is_compartmental": self.is_compartmental,
            "violations": [
                {"condition": v.condition, "index": list(v.index), "value": _json_value(v.value)}
                for v in self.violations
            ],
        }


def _json_value(v):
    if isinstance(v, complex) or np.iscomplexobj(v):
        return [float(np.real(v)), float(np.imag(v))]
    return _encode_scalar(v)


def _default_tol(A: np.ndarray, b: np.ndarray, tol: float | None) -> float:
    if tol is not None:
        return tol
    if is_exact(A):
        return 0.0
    scale = max(np.abs(A.astype(float)).max(initial=0.0), np.abs(b.astype(float)).max(initial=0.0))
    return FLOAT_RTOL * scale


def kinetic_report(A: np.ndarray, b: np.ndarray | None = None, tol: float | None = None) -> KineticReport:
    """Check the kinetic and compartmental sign conditions on raw arrays.

    Complex input with a non-negligible imaginary part is reported as
    non-kinetic with a single ``complex-valued`` violation.
    """
    A = np.asarray(A)
    n = A.shape[0]
    b = np.zeros(n) if b is None else np.asarray(b)
    if np.iscomplexobj(A) or np.iscomplexobj(b):
        scale = max(np.abs(A).max(initial=0.0), np.abs(b).max(initial=0.0))
        imag_tol = tol if tol is not None else FLOAT_RTOL * scale
        worst = max(np.abs(A.imag).max(initial=0.0), np.abs(b.imag).max(initial=0.0))
        if worst > imag_tol:
            return KineticReport(False, False, (Violation(COMPLEX_VALUED, (), float(worst)),))
        A, b = A.real, b.real
    tol = _default_tol(A, b, tol)

    violations = []
    for m in range(n):
        for p in range(n):
            if m != p and A[m, p] < -tol:
                violations.append(Violation(OFFDIAG_NEGATIVE, (m, p), A[m, p]))
    for m in range(n):
        if b[m] < -tol:
            violations.append(Violation(INFLOW_NEGATIVE, (m,), b[m]))
    kinetic = not violations
    for m in range(n):
        off = [A[p, m] for p in range(n) if p != m]
        margin = -A[m, m] - (sum(off) if is_exact(A) else math.fsum(off))
        if margin < -tol:
            violations.append(Violation(COLUMN_DOMINANCE, (m,), margin))
    return KineticReport(kinetic, not violations, tuple(violations))


def validate_kinetic(model: CompartmentalModel, tol: float | None = None) -> KineticReport:
    """Report whether ``model`` is kinetic (off-diagonal A and b nonnegative) and compartmental.

    ``tol`` defaults to 0 for exact models and to ``1e-12`` times the largest
    coefficient magnitude for float models.
    """
    return kinetic_report(model.A, model.b, tol)


# ---------------------------------------------------------------------------
# reaction networks


@dataclass(frozen=True)
class Complex:
    """A formal linear combination of species; ``terms`` pairs are (species index, coefficient)."""

    terms: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        terms = tuple(sorted((int(s), int(c)) for s, c in self.terms if c != 0))
        if any(c < 0 for _, c in terms):
            raise InvalidNetwork("stoichiometric coefficients must be nonnegative")
        if len({s for s, _ in terms}) != len(terms):
            raise InvalidNetwork("a species is listed twice in one complex")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, species: int, coefficient: int = 1) -> "Complex":
        return cls(((species, coefficient),))

    @property
    def is_empty(self) -> bool:
        return not self.terms

    @property
    def length(self) -> int:
        return sum(c for _, c in self.terms)

    def label(self, names: Sequence[str]) -> str:
        if self.is_empty:
            return "O"
        return " + ".join(names[s] if c == 1 else f"{c}{names[s]}" for s, c in self.terms)


EMPTY = Complex()


@dataclass(frozen=True)
class Step:
    reactant: Complex
    product: Complex
    rate: object


class Openness(str, enum.Enum):
    CLOSED = "closed"
    STRICTLY_HALF_OPEN = "strictly-half-open"
    STRICTLY_OPEN = "strictly-open"


@dataclass(frozen=True)
class ReactionNetwork:
    """A reaction mechanism: species labels plus elementary steps with rate coefficients.

    Steps with rate exactly zero are dropped on construction.
    """

    species: tuple[str, ...]
    steps: tuple[Step, ...] = field(default_factory=tuple)

    def __post_init__(self):
        species = tuple(self.species)
        kept = []
        seen = set()
        for step in self.steps:
            if step.rate < 0:
                raise InvalidNetwork(f"negative rate {step.rate}")
            if step.rate == 0:
                continue
            if step.reactant == step.product:
                raise InvalidNetwork("reactant and product complexes coincide")
            key = (step.reactant, step.product)
            if key in seen:
                raise InvalidNetwork("duplicate reaction step")
            seen.add(key)
            for cplx in (step.reactant, step.product):
                if any(s >= len(species) or s < 0 for s, _ in cplx.terms):
                    raise InvalidNetwork("complex refers to an unknown species")
            kept.append(step)
        used = {s for st in kept for cplx in (st.reactant, st.product) for s, _ in cplx.terms}
        missing = [species[i] for i in range(len(species)) if i not in used]
        if missing:
            raise InvalidNetwork(f"species never take part in a step: {missing}")
        object.__setattr__(self, "species", species)
        object.__setattr__(self, "steps", tuple(kept))

    @property
    def classification(self) -> Openness:
        if any(st.reactant.is_empty for st in self.steps):
            return Openness.STRICTLY_OPEN
        if any(st.product.is_empty for st in self.steps):
            return Openness.STRICTLY_HALF_OPEN
        return Openness.CLOSED

    def describe(self) -> list[str]:
        return [
            f"{st.reactant.label(self.species)} -> {st.product.label(self.species)}  [{st.rate}]"
            for st in self.steps
        ]

    def to_dict(self) -> dict:
        return {
            "species": list(self.species),
            "classification": self.classification.value,
            "steps": [
                {
                    "reactant": [list(t) for t in st.reactant.terms],
                    "product": [list(t) for t in st.product.terms],
                    "rate": _encode_scalar(st.rate),
                }
                for st in self.steps
            ],
        }


def induce_reaction_network(model: CompartmentalModel, tol: float | None = None) -> ReactionNetwork:
    """Construct a generalized compartmental network whose induced ODE is ``model``.

    Steps: ``y_p X_p -> y_m X_m`` at rate ``a_mp / y_m``; outflow
    ``y_p X_p -> O`` at rate ``d_p = -sum_m a_mp / y_m``; inflow
    ``O -> y_m X_m`` at rate ``b_m / y_m``.

    Raises:
        NotKinetic: a required rate would be negative.
        InvalidNetwork: some species would take part in no step.
    """
    A, b, y = model.A, model.b, model.y
    n = model.n
    exact = model.exact
    if tol is None:
        tol = 0.0 if exact else FLOAT_RTOL * max(np.abs(model.float_A()).max(initial=0.0), 1.0)
    steps = []
    for p in range(n):
        for m in range(n):
            if m == p:
                continue
            a = A[m, p]
            if a < -tol:
                raise NotKinetic(f"off-diagonal coefficient a[{m},{p}] = {a} is negative")
            if a > tol:
                steps.append(Step(Complex.of(p, y[p]), Complex.of(m, y[m]), a / y[m]))
        terms = [A[m, p] / y[m] for m in range(n)]
        d = -(sum(terms) if exact else math.fsum(terms))
        if d < -tol:
            raise NotKinetic(f"outflow rate of {model.species[p]} would be negative ({d})")
        if d > tol:
            steps.append(Step(Complex.of(p, y[p]), EMPTY, d))
    for m in range(n):
        if b[m] < -tol:
            raise NotKinetic(f"inflow b[{m}] = {b[m]} is negative")
        if b[m] > tol:
            steps.append(Step(EMPTY, Complex.of(m, y[m]), b[m] / y[m]))
    return ReactionNetwork(model.species, tuple(steps))


def _species_lengths(network: ReactionNetwork) -> list[int]:
    lengths: dict[int, int] = {}
    for st in network.steps:
        for cplx in (st.reactant, st.product):
            if len(cplx.terms) > 1:
                raise NotCompartmentalShape(f"complex {cplx.label(network.species)} holds several species")
            for s, c in cplx.terms:
                if lengths.setdefault(s, c) != c:
                    raise NotCompartmentalShape(
                        f"species {network.species[s]} appears in complexes of lengths {lengths[s]} and {c}"
                    )
    return [lengths[i] for i in range(len(network.species))]


def derive_ode(network: ReactionNetwork) -> CompartmentalModel:
    """Mass-action ODE of a generalized compartmental network, as a model.

    Raises:
        NotCompartmentalShape: a complex contains two species, or one species
            appears with two different coefficients.
    """
    y = _species_lengths(network)
    n = len(network.species)
    exact = any(isinstance(st.rate, Fraction) for st in network.steps)
    zero = Fraction(0) if exact else 0.0
    A = [[zero] * n for _ in range(n)]
    b = [zero] * n
    for st in network.steps:
        rate = Fraction(st.rate) if exact else float(st.rate)
        if st.reactant.is_empty:
            (m, ym), = st.product.terms
            b[m] += ym * rate
            continue
        (p, yp), = st.reactant.terms
        A[p][p] -= yp * rate
        if not st.product.is_empty:
            (m, ym), = st.product.terms
            A[m][p] += ym * rate
    return CompartmentalModel(A=A, b=b, y=tuple(y), species=network.species)


def is_mass_conserving(network: ReactionNetwork) -> bool:
    """True iff the generalized compartmental ``network`` is closed.

    General mechanisms (complexes with several species) are rejected with
    :class:`NotCompartmentalShape`.
    """
    _species_lengths(network)
    return network.classification is Openness.CLOSED
