"""Core data model: populations, risk assignments, and exact group statistics.

Everything numeric is a `fractions.Fraction`. Two fixed groups, identified as
1 and 2, share one feature space; a feature carries a single probability of a
positive outcome that is common to both groups, while per-group masses say how
many people of each group hold the feature. Masses are nonnegative rationals,
not necessarily integers.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .errors import DomainError, InvalidAssignmentError, InvalidInstanceError

GROUPS = (1, 2)

RationalLike = Union[Fraction, int, str, float]


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce to an exact Fraction.

    Accepts Fractions, ints, floats (converted at their exact binary value),
    and strings in either "a/b" or decimal form ("0.25" becomes 1/4 exactly).
    """
    if isinstance(value, bool):
        raise TypeError("bool is not a rational value")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


@dataclass(frozen=True)
class FeatureVector:
    """One feature: an id, a shared positive-outcome probability, per-group masses."""

    id: str
    p: Fraction
    n1: Fraction
    n2: Fraction

    def count(self, group: int) -> Fraction:
        if group == 1:
            return self.n1
        if group == 2:
            return self.n2
        raise DomainError(f"unknown group {group!r}; groups are 1 and 2")

    @property
    def total(self) -> Fraction:
        return self.n1 + self.n2


def feature(fid: str, p: RationalLike, n1: RationalLike, n2: RationalLike) -> FeatureVector:
    """Convenience constructor coercing all numeric fields."""
    return FeatureVector(str(fid), as_fraction(p), as_fraction(n1), as_fraction(n2))


@dataclass(frozen=True)
class Instance:
    """An ordered collection of features describing both groups at once.

    Construction does not enforce semantic validity; `validate_instance`
    reports violations and operations that need a valid instance call
    `require_valid`.
    """

    features: tuple[FeatureVector, ...]

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(f.id for f in self.features)

    def by_id(self, fid: str) -> FeatureVector:
        for f in self.features:
            if f.id == fid:
                return f
        raise KeyError(fid)

    def group_total(self, group: int) -> Fraction:
        return sum((f.count(group) for f in self.features), Fraction(0))


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of structural validation. Never raised; inspect `ok`."""

    ok: bool
    violations: tuple[str, ...]


def validate_instance(inst: Instance) -> ValidationReport:
    """Check instance invariants and report every violation found.

    Checks: unique feature ids, probabilities in [0, 1], nonnegative masses,
    and strictly positive total mass in each group.
    """
    violations: list[str] = []
    seen: set[str] = set()
    for f in inst.features:
        if f.id in seen:
            violations.append(f"duplicate feature id {f.id!r}")
        seen.add(f.id)
        if not (0 <= f.p <= 1):
            violations.append(f"feature {f.id!r}: probability {f.p} outside [0, 1]")
        if f.n1 < 0:
            violations.append(f"feature {f.id!r}: negative group-1 mass {f.n1}")
        if f.n2 < 0:
            violations.append(f"feature {f.id!r}: negative group-2 mass {f.n2}")
    for t in GROUPS:
        if inst.group_total(t) <= 0:
            violations.append(f"group {t} has no mass")
    return ValidationReport(ok=not violations, violations=tuple(violations))


def require_valid(inst: Instance) -> Instance:
    report = validate_instance(inst)
    if not report.ok:
        raise InvalidInstanceError(report.violations)
    return inst


@dataclass(frozen=True)
class GroupStats:
    """Exact per-group aggregates; index 0 holds group 1, index 1 holds group 2."""

    population: tuple[Fraction, Fraction]
    positive_mass: tuple[Fraction, Fraction]
    base_rate: tuple[Fraction, Fraction]

    def for_group(self, group: int) -> tuple[Fraction, Fraction, Fraction]:
        i = _group_index(group)
        return self.population[i], self.positive_mass[i], self.base_rate[i]


def _group_index(group: int) -> int:
    if group not in GROUPS:
        raise DomainError(f"unknown group {group!r}; groups are 1 and 2")
    return group - 1


def derived_stats(inst: Instance) -> GroupStats:
    """Population size, expected positive mass, and base rate per group."""
    require_valid(inst)
    pop = []
    pos = []
    for t in GROUPS:
        n = sum((f.count(t) for f in inst.features), Fraction(0))
        mu = sum((f.count(t) * f.p for f in inst.features), Fraction(0))
        pop.append(n)
        pos.append(mu)
    rate = tuple(pos[i] / pop[i] for i in range(2))
    return GroupStats(
        population=(pop[0], pop[1]),
        positive_mass=(pos[0], pos[1]),
        base_rate=rate,  # type: ignore[arg-type]
    )


@dataclass(frozen=True)
class Record:
    """One observed person: which feature they hold, their group, their outcome."""

    feature_id: str
    group: int
    positive: bool


@dataclass(frozen=True)
class RecordTable:
    """A nonempty table of records covering both groups."""

    rows: tuple[Record, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if not self.rows:
            raise DomainError("record table is empty")
        for r in self.rows:
            if r.group not in GROUPS:
                raise DomainError(f"record for {r.feature_id!r}: unknown group {r.group}")
        present = {r.group for r in self.rows}
        for t in GROUPS:
            if t not in present:
                raise DomainError(f"group {t} has no records")


@dataclass(frozen=True)
class DivergenceEntry:
    feature_id: str
    group: int
    group_rate: Fraction
    deviation: Fraction


@dataclass(frozen=True)
class DivergenceReport:
    """Per-feature, per-group gap between the group's empirical positive rate
    and the pooled rate the instance was built with."""

    entries: tuple[DivergenceEntry, ...]

    @property
    def max_deviation(self) -> Fraction:
        return max((e.deviation for e in self.entries), default=Fraction(0))


def ingest_records(table: RecordTable) -> tuple[Instance, DivergenceReport]:
    """Build an instance from outcome records.

    The feature probability is the pooled positive rate across both groups;
    the divergence report records how far each group's own empirical rate
    sits from that pooled value.
    """
    order: list[str] = []
    pos: dict[tuple[str, int], int] = {}
    tot: dict[tuple[str, int], int] = {}
    for r in table.rows:
        if r.feature_id not in order:
            order.append(r.feature_id)
        key = (r.feature_id, r.group)
        tot[key] = tot.get(key, 0) + 1
        pos[key] = pos.get(key, 0) + (1 if r.positive else 0)

    features = []
    entries = []
    for fid in order:
        n1 = tot.get((fid, 1), 0)
        n2 = tot.get((fid, 2), 0)
        pooled = Fraction(pos.get((fid, 1), 0) + pos.get((fid, 2), 0), n1 + n2)
        features.append(FeatureVector(fid, pooled, Fraction(n1), Fraction(n2)))
        for t in GROUPS:
            key = (fid, t)
            if key in tot:
                rate = Fraction(pos.get(key, 0), tot[key])
                entries.append(DivergenceEntry(fid, t, rate, abs(rate - pooled)))
    inst = require_valid(Instance(tuple(features)))
    return inst, DivergenceReport(tuple(entries))


def split_by_group(inst: Instance) -> Instance:
    """Split every feature into single-group features.

    A feature with mass in both groups becomes two features (id suffixed with
    "@1" and "@2"); a feature with mass in one group keeps that side only.
    Zero-mass features are dropped. Group statistics are unchanged.
    """
    require_valid(inst)
    out: list[FeatureVector] = []
    for f in inst.features:
        if f.n1 > 0:
            out.append(FeatureVector(f"{f.id}@1", f.p, f.n1, Fraction(0)))
        if f.n2 > 0:
            out.append(FeatureVector(f"{f.id}@2", f.p, Fraction(0), f.n2))
    return require_valid(Instance(tuple(out)))


@dataclass(frozen=True)
class RiskAssignment:
    """Bins with scores plus a row-stochastic allocation of features to bins.

    `rows[i][b]` is the fraction of feature `feature_ids[i]` sent to bin `b`.
    Rows must sum to exactly 1 (no tolerance); scores and allocation entries
    must lie in [0, 1]. A bin may receive zero mass.
    """

    feature_ids: tuple[str, ...]
    scores: tuple[Fraction, ...]
    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "feature_ids", tuple(self.feature_ids))
        object.__setattr__(self, "scores", tuple(self.scores))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        if not self.scores:
            raise InvalidAssignmentError("assignment has no bins")
        if len(set(self.feature_ids)) != len(self.feature_ids):
            raise InvalidAssignmentError("duplicate feature id in assignment")
        if len(self.rows) != len(self.feature_ids):
            raise InvalidAssignmentError("one allocation row per feature required")
        for v in self.scores:
            if not (0 <= v <= 1):
                raise InvalidAssignmentError(f"score {v} outside [0, 1]")
        for fid, row in zip(self.feature_ids, self.rows):
            if len(row) != len(self.scores):
                raise InvalidAssignmentError(
                    f"allocation row for {fid!r} has {len(row)} entries, expected {len(self.scores)}"
                )
            for x in row:
                if not (0 <= x <= 1):
                    raise InvalidAssignmentError(f"allocation entry {x} for {fid!r} outside [0, 1]")
            if sum(row, Fraction(0)) != 1:
                raise InvalidAssignmentError(
                    f"allocation row for {fid!r} sums to {sum(row, Fraction(0))}, expected exactly 1"
                )

    @property
    def bin_count(self) -> int:
        return len(self.scores)

    def row(self, fid: str) -> tuple[Fraction, ...]:
        try:
            return self.rows[self.feature_ids.index(fid)]
        except ValueError:
            raise KeyError(fid) from None


def assignment_rows_for(inst: Instance, asg: RiskAssignment) -> tuple[tuple[Fraction, ...], ...]:
    """Allocation rows reordered to the instance's feature order.

    Raises when the feature id sets differ.
    """
    if set(asg.feature_ids) != {f.id for f in inst.features}:
        missing = {f.id for f in inst.features} - set(asg.feature_ids)
        extra = set(asg.feature_ids) - {f.id for f in inst.features}
        parts = []
        if missing:
            parts.append(f"missing features {sorted(missing)}")
        if extra:
            parts.append(f"unknown features {sorted(extra)}")
        raise InvalidAssignmentError("assignment does not match instance: " + ", ".join(parts))
    return tuple(asg.row(f.id) for f in inst.features)
