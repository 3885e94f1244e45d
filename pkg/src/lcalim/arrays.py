"""Triangular-array specifications and the exact per-row statistics that
appear in the limit-theorem hypotheses: character-moment products,
local-mean sums, variance sums and tail sums.

Row-count and parameter rules are closed-form schedules of the row index n
(constant / linear / power / explicit table), so every reported number is
reproducible from the experiment description alone.  For i.i.d. rows the
K_n-fold quantities are evaluated in closed form; no loop of length K_n is
ever run, which keeps K_n up to 1e9 cheap.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .groups import (
    PADIC,
    TORUS,
    Character,
    GroupElement,
    GroupId,
    GroupMismatchError,
    Neighborhood,
    add,
    arg_of,
    cyclic_subgroup,
    elements_close,
    from_angle,
    from_base_angle,
    full_subgroup,
    identity,
    lambda_subgroup,
    local_inner,
    neg,
    scale,
)
from .measures import (
    DiscreteMeasure,
    LimitLaw,
    compound_poisson_law,
    cylinder_mass,
    dirac_law,
    discrete_measure,
    gauss_law,
    haar_law,
    local_mean,
    measure_ft,
    point_mass,
    scale_measure,
    tail_mass_measure,
)


@dataclass(frozen=True)
class Schedule:
    """A closed-form rule n -> value: c (constant), c*n (linear), c*n^e
    (power), or an explicit table keyed by n."""

    kind: str
    coef: float = 0.0
    exp: float = 0.0
    table: tuple[tuple[int, float], ...] = ()

    def __call__(self, n: int) -> float:
        if self.kind == "constant":
            return self.coef
        if self.kind == "linear":
            return self.coef * n
        if self.kind == "power":
            return self.coef * float(n) ** self.exp
        values = dict(self.table)
        if n not in values:
            raise KeyError(f"schedule table has no entry for n={n}")
        return values[n]

    def describe(self) -> str:
        if self.kind == "constant":
            return f"{self.coef:g}"
        if self.kind == "linear":
            return f"{self.coef:g}*n"
        if self.kind == "power":
            return f"{self.coef:g}*n^{self.exp:g}"
        return f"table({len(self.table)} entries)"


def constant(value: float) -> Schedule:
    return Schedule("constant", coef=value)


def linear(coef: float) -> Schedule:
    return Schedule("linear", coef=coef)


def power(coef: float, exponent: float) -> Schedule:
    return Schedule("power", coef=coef, exp=exponent)


def table(values: dict[int, float]) -> Schedule:
    return Schedule("table", table=tuple(sorted(values.items())))


@dataclass(frozen=True)
class RowDistribution:
    """Distribution of one entry of the array: a discrete probability
    measure."""

    measure: DiscreteMeasure

    def __post_init__(self) -> None:
        if not self.measure.is_probability():
            raise ValueError(
                f"row distribution has total mass {self.measure.total_mass()!r}, expected 1"
            )

    @property
    def group(self) -> GroupId:
        return self.measure.group

    @property
    def atoms(self):
        return self.measure.atoms

    def is_symmetric(self, tol_turns: float = 1e-12) -> bool:
        """Invariance under x -> -x, atom by atom."""
        for x, w in self.atoms:
            matched = False
            for y, v in self.atoms:
                if elements_close(neg(x), y, tol_turns) and abs(w - v) <= 1e-12:
                    matched = True
                    break
            if not matched:
                return False
        return True


def row_distribution(group: GroupId, atoms) -> RowDistribution:
    return RowDistribution(discrete_measure(group, atoms))


def _positive_k(value: float, n: int) -> int:
    k = round(value)
    if k < 1 or abs(value - k) > 1e-9 * max(1.0, abs(value)):
        raise ValueError(f"row count K_n must be a positive integer; got {value} at n={n}")
    return int(k)


@dataclass(frozen=True)
class RademacherArray:
    """Rows put mass 1/2 on x_n and 1/2 on -x_n.

    On the torus and solenoid x_n is given by an angle schedule (for the
    solenoid the schedule drives arg of the base coordinate y_0, on the
    branch-0 tower); on padic groups x_n comes from an explicit element
    table.
    """

    group: GroupId
    K: Schedule
    angle: Schedule | None = None
    elements: tuple[tuple[int, GroupElement], ...] = ()

    def __post_init__(self) -> None:
        if self.group.kind == PADIC:
            if self.angle is not None or not self.elements:
                raise ValueError("padic Rademacher arrays need an element table")
        elif self.angle is None:
            raise ValueError("angle schedule required on torus/solenoid")

    def is_iid(self) -> bool:
        return True

    def row_count(self, n: int) -> int:
        return _positive_k(self.K(n), n)

    def x_of(self, n: int) -> GroupElement:
        if self.group.kind == PADIC:
            for m, x in self.elements:
                if m == n:
                    return x
            raise KeyError(f"no Rademacher element for n={n}")
        theta = self.angle(n)
        if self.group.kind == TORUS:
            return from_angle(self.group, theta)
        return from_base_angle(self.group, theta)

    def iid_dist(self, n: int) -> RowDistribution:
        x = self.x_of(n)
        return row_distribution(self.group, [(x, 0.5), (neg(x), 0.5)])


@dataclass(frozen=True)
class BernoulliArray:
    """Rows put mass p_n on a fixed x != e and 1 - p_n on the identity."""

    group: GroupId
    x: GroupElement
    p: Schedule
    K: Schedule

    def __post_init__(self) -> None:
        if self.x.group != self.group:
            raise GroupMismatchError("Bernoulli atom on a different group")
        if elements_close(self.x, identity(self.group)):
            raise ValueError("Bernoulli atom must differ from the identity")

    def is_iid(self) -> bool:
        return True

    def row_count(self, n: int) -> int:
        return _positive_k(self.K(n), n)

    def p_of(self, n: int) -> float:
        p = self.p(n)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"Bernoulli rate p_n={p} outside [0, 1] at n={n}")
        return p

    def iid_dist(self, n: int) -> RowDistribution:
        p = self.p_of(n)
        return row_distribution(
            self.group, [(self.x, p), (identity(self.group), 1.0 - p)]
        )


@dataclass(frozen=True)
class IIDSymmetricArray:
    """Rows are i.i.d. with a symmetric distribution produced by a rule."""

    group: GroupId
    dist_rule: Callable[[int], RowDistribution]
    K: Schedule

    def is_iid(self) -> bool:
        return True

    def row_count(self, n: int) -> int:
        return _positive_k(self.K(n), n)

    def iid_dist(self, n: int) -> RowDistribution:
        dist = self.dist_rule(n)
        if dist.group != self.group:
            raise GroupMismatchError("row rule produced a distribution on another group")
        if not dist.is_symmetric():
            raise ValueError(f"row distribution at n={n} is not symmetric")
        return dist


@dataclass(frozen=True)
class GeneralArray:
    """Arbitrary rowwise-independent rows from a rule n -> list of row
    distributions (one per k)."""

    group: GroupId
    rows_rule: Callable[[int], tuple[RowDistribution, ...]]

    def is_iid(self) -> bool:
        return False

    def row_count(self, n: int) -> int:
        return len(self.rows_rule(n))

    def iid_dist(self, n: int) -> RowDistribution:
        raise ValueError("general arrays are not i.i.d.")

    def rows(self, n: int) -> tuple[RowDistribution, ...]:
        rows = tuple(self.rows_rule(n))
        for dist in rows:
            if dist.group != self.group:
                raise GroupMismatchError(
                    "row rule produced a distribution on another group"
                )
        return rows


TriangularArraySpec = RademacherArray | BernoulliArray | IIDSymmetricArray | GeneralArray


def is_symmetric_array(array: TriangularArraySpec) -> bool:
    return isinstance(array, (RademacherArray, IIDSymmetricArray))


def row_dist(array: TriangularArraySpec, n: int, k: int) -> RowDistribution:
    """Distribution of the k-th entry of row n, 1 <= k <= K_n."""
    K = array.row_count(n)
    if not 1 <= k <= K:
        raise IndexError(f"row index k={k} outside 1..{K}")
    if array.is_iid():
        return array.iid_dist(n)
    return array.rows(n)[k - 1]


def char_moment(dist: RowDistribution, chi: Character) -> complex:
    """Expected character value under one row distribution."""
    return measure_ft(dist.measure, chi)


def row_ft_exact(array: TriangularArraySpec, n: int, chi: Character) -> complex:
    """FT of the row sum: the product of the per-entry character moments.

    For i.i.d. rows this is a K_n-th power, evaluated through the
    principal logarithm (real moments take a sign-exact real path); a
    vanishing moment yields exactly 0.
    """
    if array.is_iid():
        z = char_moment(array.iid_dist(n), chi)
        K = array.row_count(n)
        if z == 0:
            return complex(0.0)
        if z.imag == 0.0:
            mag = math.exp(K * math.log(abs(z.real))) if abs(z.real) > 0 else 0.0
            if z.real < 0.0 and K % 2 == 1:
                mag = -mag
            return complex(mag)
        return cmath.exp(K * cmath.log(z))
    out = complex(1.0)
    for dist in array.rows(n):
        out *= char_moment(dist, chi)
    return out


def sum_local_means(array: TriangularArraySpec, n: int) -> GroupElement:
    """Group sum of the local means of row n, in closed form for i.i.d.
    rows."""
    if array.is_iid():
        return scale(array.row_count(n), local_mean(array.iid_dist(n).measure))
    s = identity(array.group)
    for dist in array.rows(n):
        s = add(s, local_mean(dist.measure))
    return s


def _var_local_inner(dist: RowDistribution, chi: Character) -> float:
    m1 = sum(w * local_inner(x, chi) for x, w in dist.atoms)
    m2 = sum(w * local_inner(x, chi) ** 2 for x, w in dist.atoms)
    return m2 - m1 * m1


def sum_var_g(array: TriangularArraySpec, n: int, chi: Character) -> float:
    """Sum over row n of the variances of g(X, chi)."""
    if array.is_iid():
        return array.row_count(n) * _var_local_inner(array.iid_dist(n), chi)
    return sum(_var_local_inner(dist, chi) for dist in array.rows(n))


def sum_tail(array: TriangularArraySpec, n: int, U: Neighborhood) -> float:
    """Sum over row n of the probabilities of landing outside U."""
    if array.is_iid():
        return array.row_count(n) * tail_mass_measure(array.iid_dist(n).measure, U)
    return sum(tail_mass_measure(dist.measure, U) for dist in array.rows(n))


def sum_cylinder(array: TriangularArraySpec, n: int, x0: GroupElement, r: int) -> float:
    """Sum over row n of the probabilities of the padic cylinder
    x0 + lambda(r)."""
    if array.is_iid():
        return array.row_count(n) * cylinder_mass(array.iid_dist(n).measure, x0, r)
    return sum(cylinder_mass(dist.measure, x0, r) for dist in array.rows(n))


def infinitesimality_stat(array: TriangularArraySpec, n: int, U: Neighborhood) -> float:
    """Largest tail probability in row n; the array is infinitesimal when
    this tends to 0 for every U."""
    if array.is_iid():
        return tail_mass_measure(array.iid_dist(n).measure, U)
    return max(
        (tail_mass_measure(dist.measure, U) for dist in array.rows(n)), default=0.0
    )


def symmetric_stat(array: TriangularArraySpec, n: int, chi: Character) -> float:
    """K_n * (1 - Re E chi(X_n1)) for i.i.d. rows: the quantity whose limit
    decides between Gauss and Haar behaviour of symmetric arrays."""
    if not array.is_iid():
        raise ValueError("symmetric_stat needs i.i.d. rows")
    z = char_moment(array.iid_dist(n), chi)
    return array.row_count(n) * (1.0 - z.real)


def bernoulli_rate(array: TriangularArraySpec, n: int) -> float:
    """K_n * p_n of a Bernoulli array."""
    if not isinstance(array, BernoulliArray):
        raise ValueError("bernoulli_rate needs a Bernoulli array")
    return array.row_count(n) * array.p_of(n)


def generating_subgroup(x: GroupElement):
    """Smallest closed subgroup containing x, where determinable.

    padic: lambda(r) with r the index of the first nonzero digit; torus:
    the cyclic group of order r when the turn count is (numerically) a
    reduced fraction j/r, the full torus otherwise.  Returns None on the
    solenoid (not determinable in this representation).
    """
    from .groups import trivial_subgroup

    g = x.group
    if g.kind == PADIC:
        if x.residue == 0:
            return trivial_subgroup(g)
        return lambda_subgroup(g, _first_nonzero_digit(x))
    if g.kind == TORUS:
        if x.turns == 0.0:
            return trivial_subgroup(g)
        frac = Fraction(x.turns).limit_denominator(10**6)
        if frac != 0 and abs(x.turns - float(frac)) <= 1e-12:
            return cyclic_subgroup(g, frac.denominator)
        return full_subgroup(g)
    return None


def check_null_rule(array: TriangularArraySpec, grid) -> None:
    """Reject Rademacher rules whose elements do not tend to the identity
    and Bernoulli rules whose rate does not tend to 0 along the grid.

    The gauge sequence (distance of x_n to the identity, or p_n) must end
    at its minimum and strictly below its start, or be null already; slow
    decay is fine, flat or rising rules are not.
    """
    grid = tuple(grid)
    if isinstance(array, RademacherArray):
        from .groups import identity as _identity, padic_metric

        e = _identity(array.group)
        values = []
        for n in grid:
            x = array.x_of(n)
            if array.group.kind == PADIC:
                values.append(padic_metric(x, e))
            else:
                values.append(abs(x.turns - e.turns))
    elif isinstance(array, BernoulliArray):
        values = [array.p_of(n) for n in grid]
    else:
        return
    if values[-1] <= 1e-9:
        return
    if values[-1] < values[0] and values[-1] == min(values):
        return
    kind = "x_n" if isinstance(array, RademacherArray) else "p_n"
    raise ValueError(
        f"array rule is not null along the grid: {kind} ends at {values[-1]:.6g} "
        f"(started at {values[0]:.6g})"
    )


@dataclass(frozen=True)
class Prediction:
    """Outcome of trend-based limit classification."""

    law: LimitLaw | None
    theorem: str
    reason: str = ""

    def classified(self) -> bool:
        return self.law is not None


def predict_limit(
    array: TriangularArraySpec,
    grid,
    tol: float = 1e-3,
    window: int = 3,
    divergence_threshold: float = 1e3,
) -> Prediction:
    """Classify the driving sequence of a Rademacher or Bernoulli array on
    an n-grid and return the theorem-predicted limit law.

    Unclassifiable trends are reported as such, never guessed.
    """
    from .verify import trend_classify

    grid = tuple(grid)
    g = array.group
    if isinstance(array, RademacherArray):
        if g.kind == PADIC:
            # the local inner product vanishes, so x_n -> e forces the
            # limit to be the point mass at e
            from .groups import padic_metric

            seq = [(n, padic_metric(array.x_of(n), identity(g))) for n in grid]
            verdict = trend_classify(seq, tol, window, divergence_threshold)
            if verdict.kind == "converges" and abs(verdict.value) <= tol:
                return Prediction(dirac_law(identity(g)), "rademacher-dirac")
            return Prediction(
                None,
                "unclassified",
                "padic Rademacher elements do not tend to the identity",
            )
        seq = []
        for n in grid:
            x = array.x_of(n)
            a0 = arg_of(x) if g.kind == TORUS else _base_arg(x)
            seq.append((n, array.row_count(n) * a0 * a0))
        verdict = trend_classify(seq, tol, window, divergence_threshold)
        if verdict.kind == "converges":
            return Prediction(gauss_law(g, max(verdict.value, 0.0)), "rademacher-clt")
        if verdict.kind == "diverges":
            return Prediction(haar_law(full_subgroup(g)), "rademacher-haar")
        return Prediction(None, "unclassified", "driving sequence K_n*arg(x_n)^2 has no clear trend")
    if isinstance(array, BernoulliArray):
        seq = [(n, bernoulli_rate(array, n)) for n in grid]
        verdict = trend_classify(seq, tol, window, divergence_threshold)
        if verdict.kind == "converges":
            lam = max(verdict.value, 0.0)
            eta = scale_measure(point_mass(array.x), lam)
            return Prediction(compound_poisson_law(eta), "bernoulli-poisson")
        if verdict.kind == "diverges":
            H = generating_subgroup(array.x)
            if H is None:
                return Prediction(
                    None,
                    "unclassified",
                    "closure of the cyclic group of x is not determinable here",
                )
            return Prediction(haar_law(H), "bernoulli-haar")
        return Prediction(None, "unclassified", "rate sequence K_n*p_n has no clear trend")
    return Prediction(None, "unclassified", "only Rademacher/Bernoulli arrays are classified")


def _base_arg(x: GroupElement) -> float:
    from .groups import coordinate_arg

    return coordinate_arg(x, 0)


def _first_nonzero_digit(x: GroupElement) -> int:
    r, v = 0, x.residue
    while v % x.group.p == 0:
        v //= x.group.p
        r += 1
    return r
