"""Exact stable-configuration solving.

A configuration corresponds to a choice of non-negative integer counts
x_P over basis polymers P subject to monomer conservation: for every
monomer type m, sum_P P(m) * x_P equals the TBN's count of m.  Stable
configurations are exactly the conservation-feasible count vectors that
maximize the total polymer count, so solving is an integer program over
the polymer basis.

Solving is a depth-first branch and bound over the basis polymers in
canonical order, trying larger counts first, with the upper bound
"polymers so far plus remaining monomer copies" (every polymer consumes
at least one monomer).  All optimal solutions are collected, up to a
configurable cap with an explicit truncation flag.

``brute_force_stable`` is an independent oracle: it enumerates set
partitions of the monomer multiset directly (in canonical form, so
duplicate partitions of identical monomers are never produced), keeps
the saturated ones, and reports the maxima.  It shares no search code
with the basis/IP route.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

from .basis import PolymerBasis
from .core import (
    BudgetExceededError,
    Configuration,
    MonomerType,
    NotFeedForwardError,
    Polymer,
    Tbn,
    TbnError,
    feed_forward_order,
    melt,
)

DEFAULT_ALL_OPTIMA_CAP = 10_000
DEFAULT_BRUTE_FORCE_CAP = 12

CERT_IP_EXACT = "ip_exact"
CERT_FEED_FORWARD = "feed_forward_merge_bound"
CERT_BRUTE_FORCE = "brute_force"


@dataclass(frozen=True)
class StableReport:
    """Solver output.

    ``optimum`` is the maximum polymer count over saturated
    configurations; it is exact when ``exact`` is True and a lower
    bound otherwise (incomplete basis).  ``all_optima`` lists every
    optimal configuration found, complete iff ``all_optima_complete``;
    ``lex_earliest`` is the member minimal under the solver's fixed
    polymer ordering.
    """

    optimum: int
    all_optima: tuple[Configuration, ...]
    all_optima_complete: bool
    lex_earliest: Configuration
    certificate: str
    exact: bool

    @property
    def unique(self) -> bool:
        return self.all_optima_complete and len(self.all_optima) == 1


class _IpProblem:
    """Conservation system for a TBN over a fixed list of polymer variables."""

    def __init__(
        self,
        tbn: Tbn,
        polymers: Sequence[Polymer],
        flip_bounds: Mapping[Polymer, int] | None = None,
    ):
        self.tbn = tbn
        index: dict[MonomerType, int] = {}
        for m in tbn.monomer_types:
            index.setdefault(m, len(index))
        for p in polymers:
            for m in p.monomer_counts:
                index.setdefault(m, len(index))
        self.mono_index = index
        self.target = [0] * len(index)
        for m, c in tbn.entries:
            self.target[index[m]] = c

        flip_bounds = flip_bounds or {}
        self.variables: list[Polymer] = []
        self.vectors: list[list[tuple[int, int]]] = []
        self.upper: list[int | None] = []
        for p in polymers:
            # A variable that cannot reach count 1 within the TBN is dead.
            if any(c > self.target[index[m]] for m, c in p.monomer_counts.items()):
                continue
            self.variables.append(p)
            self.vectors.append(sorted((index[m], c) for m, c in p.monomer_counts.items()))
            self.upper.append(flip_bounds.get(p))

        n = len(self.variables)
        self.suffix_cover: list[frozenset[int]] = [frozenset()] * (n + 1)
        for i in range(n - 1, -1, -1):
            self.suffix_cover[i] = self.suffix_cover[i + 1] | frozenset(
                mi for mi, _ in self.vectors[i]
            )

    def max_count(self, var: int, remaining: Sequence[int]) -> int:
        cap = None
        for mi, c in self.vectors[var]:
            fit = remaining[mi] // c
            cap = fit if cap is None else min(cap, fit)
            if cap == 0:
                return 0
        cap = cap if cap is not None else 0
        if self.upper[var] is not None:
            cap = min(cap, self.upper[var])
        return cap

    def stranded(self, var: int, remaining: Sequence[int]) -> bool:
        """True if some leftover monomer cannot be covered by variables >= var."""
        cover = self.suffix_cover[var]
        return any(r > 0 and mi not in cover for mi, r in enumerate(remaining) if r)

    def configuration(self, assignment: Sequence[int]) -> Configuration:
        counts = {
            self.variables[i]: v for i, v in enumerate(assignment) if v
        }
        return Configuration.from_counts(self.tbn, counts)


def _require_usable_basis(tbn: Tbn, basis: PolymerBasis) -> None:
    tbn.require_star_limiting()
    for p in basis.polymers:
        if not p.is_self_saturated:
            raise ValueError(f"basis polymer {p} is not self-saturated")


def solve_stable(
    tbn: Tbn,
    basis: PolymerBasis,
    flip_bounds: Mapping[Polymer, int] | None = None,
    *,
    all_optima_cap: int = DEFAULT_ALL_OPTIMA_CAP,
    node_budget: int | None = None,
) -> StableReport:
    """Maximize the polymer count subject to monomer conservation.

    Returns the optimum with every optimal configuration (canonical
    variable order, larger counts tried first).  If the basis is not
    complete the report is flagged inexact: the optimum is then only a
    lower bound and uniqueness claims are suppressed.
    """
    _require_usable_basis(tbn, basis)
    problem = _IpProblem(tbn, basis.polymers, flip_bounds)
    n = len(problem.variables)
    remaining = list(problem.target)
    remaining_sum = sum(remaining)

    best = -1
    solutions: list[tuple[int, ...]] = []
    truncated = False
    assignment = [0] * n
    nodes = 0

    def record() -> None:
        nonlocal best, truncated, solutions
        value = sum(assignment)
        if value > best:
            best = value
            solutions = [tuple(assignment)]
            truncated = False
        elif value == best:
            if len(solutions) < all_optima_cap:
                solutions.append(tuple(assignment))
            else:
                truncated = True

    def dfs(i: int, polymers_so_far: int) -> None:
        nonlocal remaining_sum, nodes
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise BudgetExceededError(f"solver exceeded node budget of {node_budget}")
        if polymers_so_far + remaining_sum < best:
            return
        if i == n:
            if remaining_sum == 0:
                record()
            return
        if problem.stranded(i, remaining):
            return
        cap = problem.max_count(i, remaining)
        vec = problem.vectors[i]
        size = sum(c for _, c in vec)
        for value in range(cap, -1, -1):
            if value:
                for mi, c in vec:
                    remaining[mi] -= c * value
                remaining_sum -= size * value
            assignment[i] = value
            dfs(i + 1, polymers_so_far + value)
            assignment[i] = 0
            if value:
                for mi, c in vec:
                    remaining[mi] += c * value
                remaining_sum += size * value

    dfs(0, 0)

    if best < 0:
        if basis.complete:
            raise TbnError(
                "internal consistency error: a star-limiting TBN with a complete "
                "basis must have a saturated configuration"
            )
        raise TbnError(
            "no saturated configuration found with the provided incomplete basis; "
            "increase the size cap"
        )

    solutions.sort()
    optima = tuple(problem.configuration(a) for a in solutions)
    return StableReport(
        optimum=best,
        all_optima=optima,
        all_optima_complete=not truncated,
        lex_earliest=optima[0],
        certificate=CERT_IP_EXACT,
        exact=basis.complete,
    )


def iter_conservation_solutions(
    tbn: Tbn,
    basis: PolymerBasis,
    *,
    node_budget: int | None = None,
) -> Iterator[Configuration]:
    """Yield every configuration composed of basis polymers (every
    conservation-feasible count vector), not just the optimal ones.

    This is the exact-cover style enumeration behind the entropy-gap
    search.  Raises BudgetExceededError when the node budget runs out.
    """
    _require_usable_basis(tbn, basis)
    problem = _IpProblem(tbn, basis.polymers)
    n = len(problem.variables)
    remaining = list(problem.target)
    remaining_sum = sum(remaining)
    assignment = [0] * n
    nodes = 0

    def dfs(i: int) -> Iterator[Configuration]:
        nonlocal remaining_sum, nodes
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise BudgetExceededError(
                f"configuration enumeration exceeded node budget of {node_budget}"
            )
        if i == n:
            if remaining_sum == 0:
                yield problem.configuration(assignment)
            return
        if problem.stranded(i, remaining):
            return
        cap = problem.max_count(i, remaining)
        vec = problem.vectors[i]
        size = sum(c for _, c in vec)
        for value in range(cap, -1, -1):
            if value:
                for mi, c in vec:
                    remaining[mi] -= c * value
                remaining_sum -= size * value
            assignment[i] = value
            yield from dfs(i + 1)
            assignment[i] = 0
            if value:
                for mi, c in vec:
                    remaining[mi] += c * value
                remaining_sum += size * value

    if remaining_sum == 0 and n == 0:
        yield Configuration((), tbn)
        return
    yield from dfs(0)


def lex_earliest(
    tbn: Tbn,
    basis: PolymerBasis,
    ordering: Sequence[Polymer] | None = None,
    flip_bounds: Mapping[Polymer, int] | None = None,
    *,
    node_budget: int | None = None,
) -> Configuration:
    """Lexicographically earliest stable configuration under an ordering.

    Fixes each polymer count in order to its minimum feasible value
    subject to the total equalling the stable optimum, monomer
    conservation, and the previously fixed values, re-running the
    branch-and-bound feasibility search with the fixed prefix.  The
    default ordering lists flip-bounded polymers first (canonically
    among themselves), then the rest canonically.
    """
    _require_usable_basis(tbn, basis)
    if ordering is None:
        flipped = sorted(flip_bounds or (), key=lambda p: p.sort_key)
        rest = sorted(set(basis.polymers) - set(flipped), key=lambda p: p.sort_key)
        ordering = flipped + rest
    else:
        if sorted(ordering, key=lambda p: p.sort_key) != list(basis.polymers):
            raise ValueError("ordering must be a permutation of the basis")

    p_tot = solve_stable(
        tbn, basis, flip_bounds, all_optima_cap=1, node_budget=node_budget
    ).optimum

    problem = _IpProblem(tbn, list(ordering), flip_bounds)
    n = len(problem.variables)
    remaining = list(problem.target)
    remaining_sum = sum(remaining)
    prefix: list[int] = []
    nodes = 0

    def feasible(i: int, polymers_so_far: int) -> bool:
        nonlocal remaining_sum, nodes
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise BudgetExceededError(f"solver exceeded node budget of {node_budget}")
        if polymers_so_far > p_tot or polymers_so_far + remaining_sum < p_tot:
            return False
        if i == n:
            return remaining_sum == 0 and polymers_so_far == p_tot
        if problem.stranded(i, remaining):
            return False
        cap = problem.max_count(i, remaining)
        vec = problem.vectors[i]
        size = sum(c for _, c in vec)
        for value in range(cap, -1, -1):
            if value:
                for mi, c in vec:
                    remaining[mi] -= c * value
                remaining_sum -= size * value
            ok = feasible(i + 1, polymers_so_far + value)
            if value:
                for mi, c in vec:
                    remaining[mi] += c * value
                remaining_sum += size * value
            if ok:
                return True
        return False

    for i in range(n):
        cap = problem.max_count(i, remaining)
        chosen = None
        for value in range(0, cap + 1):
            for mi, c in problem.vectors[i]:
                remaining[mi] -= c * value
            remaining_sum = sum(remaining)
            ok = feasible(i + 1, sum(prefix) + value)
            for mi, c in problem.vectors[i]:
                remaining[mi] += c * value
            remaining_sum = sum(remaining)
            if ok:
                chosen = value
                break
        if chosen is None:
            raise TbnError("no stable configuration consistent with the fixed prefix")
        prefix.append(chosen)
        for mi, c in problem.vectors[i]:
            remaining[mi] -= c * chosen
        remaining_sum = sum(remaining)

    return problem.configuration(prefix)


def certify_stable_feed_forward(config: Configuration) -> bool:
    """Stability certificate for feed-forward TBNs, no basis needed.

    In a feed-forward TBN every saturated configuration needs at least
    one merge per melt polymer that carries an uncovered starred site,
    so a saturated configuration whose merginess equals the melt's
    starriness is stable.  True output certifies stability; false
    output proves nothing.  Raises NotFeedForwardError if the owning
    TBN is not feed-forward.
    """
    melted = melt(config.tbn)
    if feed_forward_order(melted) is None:
        raise NotFeedForwardError("the owning TBN is not feed-forward")
    return config.is_saturated and config.merginess == melted.starriness


def _iter_submultisets(items: list[tuple[MonomerType, int]]):
    for take in product(*(range(c + 1) for _, c in items)):
        yield take


def iter_saturated_partitions(
    tbn: Tbn,
    *,
    max_monomers: int = DEFAULT_BRUTE_FORCE_CAP,
) -> Iterator[Configuration]:
    """Enumerate every saturated configuration by direct set partition.

    Partitions are generated in canonical form: the polymer containing
    the least remaining monomer type is chosen first, so no partition is
    produced twice even with identical monomers.  Branches are cut as
    soon as a polymer is not self-saturated.
    """
    total = tbn.total_monomers
    if total > max_monomers:
        raise BudgetExceededError(
            f"partition enumeration capped at {max_monomers} monomers, TBN has {total}"
        )
    if total == 0:
        yield Configuration((), tbn)
        return

    def net_of(counts: list[tuple[MonomerType, int]]) -> bool:
        net: dict[str, int] = {}
        for m, c in counts:
            for name, delta in m.net_sites.items():
                net[name] = net.get(name, 0) + c * delta
        return all(v >= 0 for v in net.values())

    def rec(remaining: Counter, chosen: list[Polymer]) -> Iterator[Configuration]:
        if not remaining:
            yield Configuration.from_polymers(tbn, chosen)
            return
        first = min(remaining, key=lambda m: m.sort_key)
        rest = remaining - Counter({first: 1})
        rest_items = sorted(rest.items(), key=lambda kv: kv[0].sort_key)
        for take in _iter_submultisets(rest_items):
            counts = [(first, 1)] + [
                (m, t) for (m, _), t in zip(rest_items, take) if t
            ]
            if not net_of(counts):
                continue
            monomers: list[MonomerType] = []
            for m, c in counts:
                monomers.extend([m] * c)
            polymer = Polymer(tuple(monomers))
            new_remaining = rest.copy()
            for (m, _), t in zip(rest_items, take):
                if t:
                    new_remaining[m] -= t
                    if new_remaining[m] == 0:
                        del new_remaining[m]
            chosen.append(polymer)
            yield from rec(new_remaining, chosen)
            chosen.pop()

    yield from rec(Counter({m: c for m, c in tbn.entries if c}), [])


def brute_force_stable(
    tbn: Tbn,
    *,
    max_monomers: int = DEFAULT_BRUTE_FORCE_CAP,
    all_optima_cap: int = DEFAULT_ALL_OPTIMA_CAP,
) -> StableReport:
    """Ground-truth solver by exhaustive canonical partition enumeration.

    Independent of the basis/IP route; intended as the oracle for
    cross-checking.  Only for small TBNs (the cap guards the Bell-number
    blowup).  Branch and bound: partitions whose best possible polymer
    count falls below the incumbent are cut.
    """
    tbn.require_star_limiting()
    total = tbn.total_monomers
    if total > max_monomers:
        raise BudgetExceededError(
            f"brute force capped at {max_monomers} monomers, TBN has {total}"
        )
    if total == 0:
        empty = Configuration((), tbn)
        return StableReport(0, (empty,), True, empty, CERT_BRUTE_FORCE, True)

    melted = melt(tbn)
    if melted.is_saturated:
        # Only the melt has one polymer per monomer, so it is the unique optimum.
        return StableReport(
            total, (melted,), True, melted, CERT_BRUTE_FORCE, True
        )

    best = -1
    solutions: list[Configuration] = []
    truncated = False

    def rec(remaining: Counter, remaining_total: int, chosen: list[Polymer]) -> None:
        nonlocal best, truncated, solutions
        if len(chosen) + remaining_total < best:
            return
        if not remaining:
            config = Configuration.from_polymers(tbn, chosen)
            value = config.polymer_count
            if value > best:
                best = value
                solutions = [config]
                truncated = False
            elif value == best:
                if len(solutions) < all_optima_cap:
                    solutions.append(config)
                else:
                    truncated = True
            return
        first = min(remaining, key=lambda m: m.sort_key)
        rest = remaining - Counter({first: 1})
        rest_items = sorted(rest.items(), key=lambda kv: kv[0].sort_key)

        candidates = []
        for take in _iter_submultisets(rest_items):
            monomers = [first]
            for (m, _), t in zip(rest_items, take):
                monomers.extend([m] * t)
            net: dict[str, int] = {}
            for m in monomers:
                for name, delta in m.net_sites.items():
                    net[name] = net.get(name, 0) + delta
            if any(v < 0 for v in net.values()):
                continue
            candidates.append((len(monomers), take, monomers))
        # Small polymers first: finds many-polymer configurations early,
        # tightening the incumbent for pruning.
        candidates.sort(key=lambda item: (item[0], item[1]))

        for size, take, monomers in candidates:
            polymer = Polymer(tuple(monomers))
            new_remaining = rest.copy()
            for (m, _), t in zip(rest_items, take):
                if t:
                    new_remaining[m] -= t
                    if new_remaining[m] == 0:
                        del new_remaining[m]
            chosen.append(polymer)
            rec(new_remaining, remaining_total - size, chosen)
            chosen.pop()

    rec(Counter({m: c for m, c in tbn.entries if c}), total, [])

    if best < 0:
        raise TbnError(
            "internal consistency error: a star-limiting TBN must have a "
            "saturated configuration"
        )
    seen = sorted(
        {p for s in solutions for p, _ in s.polymers}, key=lambda p: p.sort_key
    )
    solutions.sort(key=lambda cfg: cfg.counts_in(seen))
    return StableReport(
        optimum=best,
        all_optima=tuple(solutions),
        all_optima_complete=not truncated,
        lex_earliest=solutions[0],
        certificate=CERT_BRUTE_FORCE,
        exact=True,
    )
