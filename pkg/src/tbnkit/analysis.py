"""Higher-level analyses: entropy gaps, TBN distance, amplifier
verification, and closed-form bound evaluators.

The entropy gap of a TBN is the minimum distance to stability over
saturated configurations that are neither stable nor able to split to
a stable configuration; if no such configuration exists the gap is
infinite.  Every saturated configuration splits into one composed
entirely of basis polymers, with strictly fewer extra polymers needed
to reach stability, so enumerating basis-composed configurations
suffices for the exact gap (and is far cheaper than enumerating raw
partitions).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from . import constructions
from .basis import PolymerBasis, enumerate_basis
from .core import (
    BudgetExceededError,
    Configuration,
    MonomerType,
    Polymer,
    Tbn,
    config_distance,
    feed_forward_order,
    melt,
    splits_to,
)
from .solver import (
    StableReport,
    brute_force_stable,
    certify_stable_feed_forward,
    iter_conservation_solutions,
    solve_stable,
)


@dataclass(frozen=True)
class TbnStats:
    """Size parameters of a TBN: d domain types, m monomer types, at
    most a domains per monomer, and n = max of the three."""

    d: int
    m: int
    a: int

    def __post_init__(self):
        if min(self.d, self.m, self.a) < 0:
            raise ValueError("stats must be non-negative")

    @property
    def n(self) -> int:
        return max(self.d, self.m, self.a)

    @classmethod
    def from_tbn(cls, tbn: Tbn) -> "TbnStats":
        names = set()
        largest = 0
        types = tbn.support or tbn.monomer_types
        for m in types:
            largest = max(largest, m.size)
            for s in m.sites:
                names.add(s.name)
        return cls(d=len(names), m=len(types), a=largest)


def polymer_size_bound(stats: TbnStats) -> int:
    """Exact value of 2 (m + d) (a d)^(2d + 3): an upper bound on the
    size of any polymer appearing in a stable configuration."""
    d, m, a = stats.d, stats.m, stats.a
    return 2 * (m + d) * (a * d) ** (2 * d + 3)


@dataclass(frozen=True)
class DistanceBoundLog10:
    """log10 of the closed-form bound n^(8 n^(7 n^2)) on how far stable
    configurations can move when one monomer copy is added.

    For large n even the log10 overflows a float; then ``value`` holds
    log10(log10(bound)) and ``log_of_log`` is set.  ``comparable``
    is always log10(log10(bound)), usable for monotonicity checks.
    """

    n: int
    value: float
    log_of_log: bool

    @property
    def comparable(self) -> float:
        return self.value if self.log_of_log else math.log10(self.value)


def upper_bound_log10(stats: TbnStats, *, digit_budget: int = 4096) -> DistanceBoundLog10:
    """Evaluate log10 of n^(8 n^(7 n^2)).

    Computed as 8 * n^(7 n^2) * log10(n), with the inner power taken as
    an exact big integer when its decimal size fits the digit budget;
    otherwise (or when the product overflows a float) the logarithmic
    form log10(8) + 7 n^2 log10(n) + log10(log10(n)) is returned with
    the log_of_log flag set.  The bound is degenerate at n < 2 (1^x = 1)
    and rejected.
    """
    n = stats.n
    if n < 2:
        raise ValueError("bound is degenerate for n < 2")
    inner_digits = 7 * n * n * math.log10(n)
    if inner_digits <= digit_budget:
        inner = n ** (7 * n * n)
        try:
            return DistanceBoundLog10(n, 8 * inner * math.log10(n), False)
        except OverflowError:
            pass
    value = math.log10(8) + 7 * n * n * math.log10(n) + math.log10(math.log10(n))
    return DistanceBoundLog10(n, value, True)


@dataclass(frozen=True)
class Budget:
    """Resource limits for the exhaustive analyses."""

    max_nodes: int = 2_000_000
    max_configurations: int = 500_000
    max_brute_force_monomers: int = 12


@dataclass(frozen=True)
class EntropyGapReport:
    """Exhaustive (or budget-truncated) entropy-gap computation.

    ``gap`` is the minimum distance to stability over saturated
    configurations that neither are stable nor split to a stable
    configuration; math.inf when no such configuration exists.  When
    the budget ran out, ``exhaustive`` is False and the reported gap is
    only an upper bound (more configurations could only lower it).
    """

    gap: float
    witness: Optional[Configuration]
    exhaustive: bool
    configurations_seen: int

    @property
    def infinite(self) -> bool:
        return math.isinf(self.gap)


def entropy_gap(
    tbn: Tbn,
    report: StableReport,
    *,
    budget: Budget = Budget(),
    basis: PolymerBasis | None = None,
) -> EntropyGapReport:
    """Compute the entropy gap exactly by exhausting basis-composed
    saturated configurations.

    Requires a report with the complete set of optima.  Every saturated
    configuration either is basis-composed or splits to a basis-composed
    one with strictly smaller distance to stability, so the minimum over
    basis-composed configurations is the true gap.
    """
    if not (report.exact and report.all_optima_complete):
        raise ValueError("entropy gap needs a complete, exact set of stable configurations")
    if basis is None:
        basis = enumerate_basis(tbn, restrict_to_counts=True, node_budget=budget.max_nodes)
    if not (basis.complete or basis.restricted_to_counts):
        raise ValueError("entropy gap needs a complete basis for the TBN")

    stable_set = set(report.all_optima)
    optimum = report.optimum
    best: Optional[int] = None
    witness: Optional[Configuration] = None
    seen = 0
    exhausted = True
    try:
        for config in iter_conservation_solutions(tbn, basis, node_budget=budget.max_nodes):
            seen += 1
            if seen > budget.max_configurations:
                exhausted = False
                break
            if config in stable_set:
                continue
            if any(splits_to(config, stable) for stable in stable_set):
                continue
            distance = optimum - config.polymer_count
            if best is None or distance < best:
                best, witness = distance, config
                if best == 1:
                    break  # distance 1 is the global minimum for non-stable configurations
    except BudgetExceededError:
        exhausted = False

    gap = math.inf if best is None else float(best)
    return EntropyGapReport(gap=gap, witness=witness, exhaustive=exhausted, configurations_seen=seen)


def tbn_distance(t: Tbn, t_prime: Tbn, report: StableReport, report_prime: StableReport) -> int:
    """Distance between two TBNs: the minimum configuration distance over
    pairs of stable configurations.  Not a metric (no triangle
    inequality is claimed); requires both optima sets complete, since a
    minimum over a truncated set bounds nothing."""
    for r in (report, report_prime):
        if not (r.exact and r.all_optima_complete):
            raise ValueError("TBN distance needs complete, exact optima on both sides")
    return min(
        config_distance(a, b)
        for a in report.all_optima
        for b in report_prime.all_optima
    )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: Optional[bool]  # None = skipped (out of budget)
    detail: str = ""

    @property
    def skipped(self) -> bool:
        return self.passed is None


@dataclass(frozen=True)
class AmplifierReport:
    """Outcome of the amplifier verification suite for one (n, k)."""

    n: int
    k: int
    translators: bool
    checks: tuple[CheckResult, ...]
    distance: Optional[int]

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _reporter_monomers(tbn: Tbn) -> list[MonomerType]:
    return [
        m
        for m in tbn.support
        if m.label and (m.label.startswith("u_") or m.label.startswith("u'_"))
    ]


def _singleton_count(config: Configuration, monomer: MonomerType) -> int:
    return config.counts.get(Polymer((monomer,)), 0)


def verify_amplifier(
    n: int,
    k: int,
    *,
    translators: bool = False,
    budget: Budget = Budget(),
) -> AmplifierReport:
    """Run the desk-scale verification suite for one amplifier instance.

    Checks, in order: both TBNs are star-limiting and feed-forward; the
    reference configurations are saturated; the analyte-side reference
    is certified stable by the feed-forward merge bound; all reporter
    monomers (u and u') are bound without the analyte and free with it,
    with at least 2^n freed; the exact type/size counts hold; the
    configuration distance is at least 2^n; and, when the instance is
    small enough for the budget, the brute-force oracle and the IP
    solver confirm the optimum and its uniqueness on both sides.
    Checks that exceed the budget are reported as skipped, not passed.
    """
    spec_plain = constructions.AmplifierSpec(n, k, False, translators)
    spec_analyte = constructions.AmplifierSpec(n, k, True, translators)
    t = constructions.build_amplifier(spec_plain)
    t_a = constructions.build_amplifier(spec_analyte)
    ref = constructions.reference_configuration(spec_plain)
    ref_a = constructions.reference_configuration(spec_analyte)

    checks: list[CheckResult] = []

    def add(name: str, passed: Optional[bool], detail: str = "") -> None:
        checks.append(CheckResult(name, passed, detail))

    add(
        "star_limiting",
        t.is_star_limiting and t_a.is_star_limiting,
        "both TBNs star-limiting",
    )
    ff = feed_forward_order(melt(t)) is not None
    ff_a = feed_forward_order(melt(t_a)) is not None
    add("feed_forward", ff and ff_a, "binding digraphs acyclic")

    add(
        "references_saturated",
        ref.is_saturated and ref_a.is_saturated,
        f"{ref.polymer_count} and {ref_a.polymer_count} polymers",
    )

    certified = certify_stable_feed_forward(ref_a)
    add(
        "analyte_reference_certified_stable",
        certified,
        f"merginess {ref_a.merginess} == melt starriness {melt(t_a).starriness}",
    )

    reporters = _reporter_monomers(t)
    expected_reporters = 2 * k * (2**n - 1)
    bound_ok = all(_singleton_count(ref, m) == 0 for m in reporters)
    freed = sum(_singleton_count(ref_a, m) for m in reporters) if reporters else 0
    free_ok = freed == sum(t_a.count(m) for m in reporters)
    add(
        "reporter_property",
        bound_ok and free_ok and len(reporters) * 0 + freed >= 2**n,
        f"{freed} reporters freed (expected {expected_reporters}, need >= {2**n})",
    )

    add(
        "monomer_type_count",
        len(t.support) == constructions.monomer_type_count(spec_plain)
        and len(t_a.support) == constructions.monomer_type_count(spec_analyte),
        f"{len(t.support)} types without analyte, {len(t_a.support)} with",
    )
    names = {s.name for m in t_a.support for s in m.sites}
    add(
        "domain_type_count",
        len(names) == constructions.domain_type_count(spec_analyte),
        f"{len(names)} domain names",
    )
    largest = max(m.size for m in t_a.support)
    add(
        "max_monomer_size",
        largest == constructions.max_monomer_size(spec_analyte),
        f"largest monomer has {largest} domains",
    )

    distance = config_distance(ref, ref_a)
    add("reference_distance", distance >= 2**n, f"distance {distance} >= {2 ** n}")

    if translators:
        largest_polymer = max(p.size for p, _ in ref_a.polymers)
        add(
            "translator_largest_polymer",
            largest_polymer <= k + 3,
            f"largest analyte-side polymer has {largest_polymer} monomers (cap {k + 3})",
        )

    if t_a.total_monomers <= budget.max_brute_force_monomers:
        oracle = brute_force_stable(t, max_monomers=budget.max_brute_force_monomers)
        oracle_a = brute_force_stable(t_a, max_monomers=budget.max_brute_force_monomers)
        solved = solve_stable(t, enumerate_basis(t, restrict_to_counts=True))
        solved_a = solve_stable(t_a, enumerate_basis(t_a, restrict_to_counts=True))
        ok = (
            oracle.unique
            and oracle_a.unique
            and oracle.all_optima == (ref,)
            and oracle_a.all_optima == (ref_a,)
            and solved.optimum == oracle.optimum
            and solved_a.optimum == oracle_a.optimum
            and set(solved.all_optima) == set(oracle.all_optima)
            and set(solved_a.all_optima) == set(oracle_a.all_optima)
        )
        add(
            "exhaustive_uniqueness",
            ok,
            f"unique optima {oracle.optimum} and {oracle_a.optimum} on both routes",
        )
    else:
        add(
            "exhaustive_uniqueness",
            None,
            f"{t_a.total_monomers} monomers exceed the brute-force budget "
            f"of {budget.max_brute_force_monomers}",
        )

    return AmplifierReport(
        n=n, k=k, translators=translators, checks=tuple(checks), distance=distance
    )
