"""Core domain model for thermodynamic binding networks (TBNs).

A TBN is a multiset of monomer types; a monomer type is a multiset of
binding sites.  Sites come in complementary pairs: the unstarred site
``a`` binds the starred site ``a*``.  A configuration partitions the
monomers of a TBN into polymers.  A site type is *covered* within a
polymer when the polymer holds at least as many unstarred as starred
copies of it; a polymer with no uncovered site type is *self-saturated*,
and a configuration whose polymers are all self-saturated is
*saturated*.  A saturated configuration with the maximum possible
number of polymers is *stable*.

This module holds the value types plus the predicates and metrics the
rest of the package is built on: coverage, saturation, merginess,
starriness, split reachability, configuration distance, distance to
stability, and feed-forward orderings.

All types are immutable, hashable, and carry a total canonical order,
so multisets of them can be stored as sorted tuples and serialized
deterministically.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property, total_ordering
from typing import Iterable, Iterator, Mapping, Optional


class TbnError(Exception):
    """Base class for domain errors raised by this package."""


class NotStarLimitingError(TbnError):
    """An analysis required a star-limiting TBN but some site type has
    more starred than unstarred copies overall."""


class NotFeedForwardError(TbnError):
    """A certificate that only applies to feed-forward TBNs was asked
    about a TBN that is not feed-forward."""


class ConservationError(TbnError):
    """A configuration's polymers do not exactly use up the monomers of
    the TBN it claims to partition."""


class BudgetExceededError(TbnError):
    """An exact search exceeded its configured budget; no partial answer
    is implied unless the caller explicitly handles one."""


@total_ordering
@dataclass(frozen=True)
class SiteType:
    """A named binding domain with a star polarity.

    ``SiteType("a", False)`` binds ``SiteType("a", True)``; the starred
    version renders as ``a*``.
    """

    name: str
    starred: bool = False

    def __post_init__(self):
        if not self.name:
            raise ValueError("site name must be non-empty")
        if any(ch.isspace() for ch in self.name):
            raise ValueError(f"site name {self.name!r} contains whitespace")
        if "*" in self.name:
            raise ValueError(f"site name {self.name!r} contains '*'")

    @property
    def complement(self) -> "SiteType":
        return SiteType(self.name, not self.starred)

    @property
    def unstarred(self) -> "SiteType":
        return SiteType(self.name, False)

    @property
    def sort_key(self):
        return (self.name, self.starred)

    def __lt__(self, other: "SiteType") -> bool:
        return self.sort_key < other.sort_key

    @classmethod
    def from_string(cls, text: str) -> "SiteType":
        """Parse ``a`` or ``a*`` into a site type."""
        if text.endswith("*"):
            return cls(text[:-1], True)
        return cls(text, False)

    def __str__(self) -> str:
        return self.name + ("*" if self.starred else "")


@total_ordering
@dataclass(frozen=True)
class MonomerType:
    """A multiset of site types, stored as a canonically sorted tuple.

    Two monomer types are equal iff their site multisets are equal; the
    optional label is for display only and never participates in
    equality or ordering.
    """

    sites: tuple[SiteType, ...]
    label: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.sites:
            raise ValueError("monomer type needs at least one site")
        object.__setattr__(self, "sites", tuple(sorted(self.sites)))

    @classmethod
    def from_string(cls, text: str, label: str | None = None) -> "MonomerType":
        """Parse a whitespace-separated site list such as ``"a a b*"``."""
        tokens = text.split()
        if not tokens:
            raise ValueError("monomer type needs at least one site")
        return cls(tuple(SiteType.from_string(t) for t in tokens), label)

    @property
    def size(self) -> int:
        return len(self.sites)

    @cached_property
    def site_counts(self) -> Counter:
        return Counter(self.sites)

    @cached_property
    def net_sites(self) -> dict[str, int]:
        """Per site name: unstarred copies minus starred copies."""
        net: dict[str, int] = {}
        for s in self.sites:
            net[s.name] = net.get(s.name, 0) + (-1 if s.starred else 1)
        return net

    @cached_property
    def unstarred_supply(self) -> Counter:
        return Counter(s.name for s in self.sites if not s.starred)

    @cached_property
    def has_starred(self) -> bool:
        return any(s.starred for s in self.sites)

    @property
    def sort_key(self):
        return tuple(s.sort_key for s in self.sites)

    def __lt__(self, other: "MonomerType") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        body = " ".join(str(s) for s in self.sites)
        return f"{self.label}: {body}" if self.label else body


@total_ordering
@dataclass(frozen=True)
class Polymer:
    """A non-empty multiset of monomers bound into one complex."""

    monomers: tuple[MonomerType, ...]

    def __post_init__(self):
        if not self.monomers:
            raise ValueError("polymer must contain at least one monomer")
        object.__setattr__(self, "monomers", tuple(sorted(self.monomers)))

    @classmethod
    def of(cls, monomers: Iterable[MonomerType]) -> "Polymer":
        return cls(tuple(monomers))

    @property
    def size(self) -> int:
        return len(self.monomers)

    @cached_property
    def monomer_counts(self) -> Counter:
        return Counter(self.monomers)

    @cached_property
    def net_sites(self) -> dict[str, int]:
        """Per site name: unstarred minus starred copies over the whole polymer."""
        net: dict[str, int] = {}
        for m in self.monomers:
            for name, delta in m.net_sites.items():
                net[name] = net.get(name, 0) + delta
        return net

    @cached_property
    def uncovered_names(self) -> frozenset[str]:
        """Site names whose starred copies outnumber unstarred copies here."""
        return frozenset(name for name, net in self.net_sites.items() if net < 0)

    @cached_property
    def is_self_saturated(self) -> bool:
        return not self.uncovered_names

    def is_covered(self, site: SiteType) -> bool:
        """Whether the given unstarred site type is covered in this polymer.

        A site type is uncovered when starred copies exceed unstarred
        copies.  Callers must pass the unstarred representative.
        """
        if site.starred:
            raise ValueError("is_covered expects the unstarred representative of a site type")
        return self.net_sites.get(site.name, 0) >= 0

    @property
    def sort_key(self):
        return tuple(m.sort_key for m in self.monomers)

    def __lt__(self, other: "Polymer") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return "{" + ", ".join(m.label or str(m) for m in self.monomers) + "}"


class Tbn:
    """A multiset of monomer types.

    Counts of zero are permitted so that analyses comparing a TBN with
    and without an extra monomer can refer to the absent type; equality
    and hashing ignore zero-count entries.
    """

    __slots__ = ("_entries", "_counts", "__weakref__", "_cache")

    def __init__(self, counts: Mapping[MonomerType, int] | Iterable[tuple[MonomerType, int]]):
        items = counts.items() if isinstance(counts, Mapping) else counts
        merged: dict[MonomerType, int] = {}
        for monomer, count in items:
            if count < 0:
                raise ValueError(f"negative count {count} for monomer {monomer}")
            if monomer in merged:
                merged[monomer] += count
            else:
                merged[monomer] = count
        self._entries = tuple(sorted(merged.items(), key=lambda kv: kv[0].sort_key))
        self._counts = dict(self._entries)
        self._cache: dict[str, object] = {}

    @classmethod
    def of(cls, monomers: Iterable[MonomerType]) -> "Tbn":
        """Build from an iterable of monomers, repeats meaning copies."""
        acc: dict[MonomerType, int] = {}
        for m in monomers:
            acc[m] = acc.get(m, 0) + 1
        return cls(acc)

    @property
    def entries(self) -> tuple[tuple[MonomerType, int], ...]:
        return self._entries

    @property
    def monomer_types(self) -> tuple[MonomerType, ...]:
        """All monomer types, including any explicit zero-count entries."""
        return tuple(m for m, _ in self._entries)

    @property
    def support(self) -> tuple[MonomerType, ...]:
        """Monomer types present with count >= 1."""
        return tuple(m for m, c in self._entries if c > 0)

    def count(self, monomer: MonomerType) -> int:
        return self._counts.get(monomer, 0)

    @property
    def total_monomers(self) -> int:
        return sum(c for _, c in self._entries)

    def monomers(self) -> Iterator[MonomerType]:
        """Iterate monomers with multiplicity."""
        for m, c in self._entries:
            for _ in range(c):
                yield m

    @property
    def site_balance(self) -> dict[str, int]:
        """Per site name: total unstarred minus total starred copies."""
        cached = self._cache.get("site_balance")
        if cached is None:
            balance: dict[str, int] = {}
            for m, c in self._entries:
                if c == 0:
                    continue
                for name, delta in m.net_sites.items():
                    balance[name] = balance.get(name, 0) + c * delta
            cached = balance
            self._cache["site_balance"] = cached
        return cached  # type: ignore[return-value]

    @property
    def is_star_limiting(self) -> bool:
        """Every site name has at least as many unstarred as starred copies."""
        return all(net >= 0 for net in self.site_balance.values())

    def require_star_limiting(self) -> None:
        bad = sorted(name for name, net in self.site_balance.items() if net < 0)
        if bad:
            raise NotStarLimitingError(
                "TBN is not star-limiting; starred copies exceed unstarred for: "
                + ", ".join(bad)
            )

    def add_monomer(self, monomer: MonomerType, copies: int = 1) -> "Tbn":
        counts = dict(self._counts)
        counts[monomer] = counts.get(monomer, 0) + copies
        return Tbn(counts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tbn):
            return NotImplemented
        return self._nonzero() == other._nonzero()

    def __hash__(self) -> int:
        return hash(self._nonzero())

    def _nonzero(self) -> tuple[tuple[MonomerType, int], ...]:
        return tuple((m, c) for m, c in self._entries if c > 0)

    def __repr__(self) -> str:
        inner = ", ".join(f"{c} x {m}" for m, c in self._entries)
        return f"Tbn({inner})"


@dataclass(frozen=True)
class Configuration:
    """A partition of a TBN's monomers into polymers.

    Stored as canonically sorted (polymer, count) pairs.  Construction
    verifies monomer conservation: summing each polymer's monomer
    multiset times its count must reproduce the TBN exactly.  Equality
    and hashing look at the polymer counts only.
    """

    polymers: tuple[tuple[Polymer, int], ...]
    tbn: Tbn = field(compare=False)

    def __post_init__(self):
        object.__setattr__(
            self,
            "polymers",
            tuple(sorted(self.polymers, key=lambda kv: kv[0].sort_key)),
        )
        used: Counter = Counter()
        for polymer, count in self.polymers:
            if count < 1:
                raise ValueError("polymer counts must be >= 1")
            for m, c in polymer.monomer_counts.items():
                used[m] += c * count
        expected = Counter({m: c for m, c in self.tbn.entries if c > 0})
        if used != expected:
            raise ConservationError(
                "configuration does not partition its TBN: "
                f"uses {dict(used)} but TBN holds {dict(expected)}"
            )

    @classmethod
    def from_counts(cls, tbn: Tbn, counts: Mapping[Polymer, int]) -> "Configuration":
        return cls(tuple((p, c) for p, c in counts.items() if c), tbn)

    @classmethod
    def from_polymers(cls, tbn: Tbn, polymers: Iterable[Polymer]) -> "Configuration":
        acc: Counter = Counter(polymers)
        return cls.from_counts(tbn, acc)

    @cached_property
    def counts(self) -> dict[Polymer, int]:
        return dict(self.polymers)

    @property
    def polymer_count(self) -> int:
        """Total number of polymers, counted with multiplicity."""
        return sum(c for _, c in self.polymers)

    @cached_property
    def monomer_counts(self) -> Counter:
        used: Counter = Counter()
        for polymer, count in self.polymers:
            for m, c in polymer.monomer_counts.items():
                used[m] += c * count
        return used

    @property
    def is_saturated(self) -> bool:
        return all(p.is_self_saturated for p, _ in self.polymers)

    @property
    def merginess(self) -> int:
        """Merges needed to reach this configuration from the melt:
        total monomer copies minus total polymer count."""
        return self.tbn.total_monomers - self.polymer_count

    @property
    def starriness(self) -> int:
        """Number of polymers (with multiplicity) carrying an uncovered
        starred site."""
        return sum(c for p, c in self.polymers if p.uncovered_names)

    def counts_in(self, order: Iterable[Polymer]) -> tuple[int, ...]:
        """Count vector under a fixed polymer ordering (for lexicographic
        comparison of configurations)."""
        return tuple(self.counts.get(p, 0) for p in order)

    def __str__(self) -> str:
        return "; ".join(f"{c} * {p}" for p, c in self.polymers)


def melt(tbn: Tbn) -> Configuration:
    """The all-singleton configuration: every monomer copy is alone."""
    counts: Counter = Counter()
    for m, c in tbn.entries:
        if c:
            counts[Polymer((m,))] += c
    return Configuration.from_counts(tbn, counts)


def merginess(config: Configuration) -> int:
    return config.merginess


def starriness(config: Configuration) -> int:
    return config.starriness


def is_saturated(config: Configuration) -> bool:
    return config.is_saturated


def config_distance(alpha: Configuration, beta: Configuration) -> int:
    """L1 distance between polymer count vectors.

    The configurations may belong to different TBNs over shared monomer
    types; the distance sums |count difference| over all polymer types.
    """
    a, b = alpha.counts, beta.counts
    keys = set(a) | set(b)
    return sum(abs(a.get(p, 0) - b.get(p, 0)) for p in keys)


def distance_to_stability(config: Configuration, optimum: int) -> int:
    """Stable polymer count minus this configuration's polymer count.

    Only defined for saturated configurations; raises ValueError
    otherwise, and raises if the claimed optimum is below this
    configuration's own polymer count (an inconsistent optimum).
    """
    if not config.is_saturated:
        raise ValueError("distance to stability is only defined for saturated configurations")
    distance = optimum - config.polymer_count
    if distance < 0:
        raise ValueError(
            f"claimed optimum {optimum} is below the configuration's "
            f"polymer count {config.polymer_count}"
        )
    return distance


def splits_to(alpha: Configuration, beta: Configuration) -> bool:
    """True iff ``beta`` is reachable from ``alpha`` by zero or more splits.

    Decided exactly: beta's polymer multiset must admit a grouping into
    disjoint sub-multisets, each summing (as a monomer multiset) to one
    polymer of alpha.  Alpha's polymers are tried largest-first and the
    search memoizes on the remaining beta multiset.
    """
    if alpha.monomer_counts != beta.monomer_counts:
        raise ValueError("configurations partition different monomer multisets")
    if beta.polymer_count < alpha.polymer_count:
        return False
    if alpha == beta:
        return True

    alpha_list: list[Polymer] = []
    for polymer, count in sorted(alpha.polymers, key=lambda kv: (-kv[0].size, kv[0].sort_key)):
        alpha_list.extend([polymer] * count)

    memo: dict[tuple[int, tuple[tuple[Polymer, int], ...]], bool] = {}

    def assign(ai: int, remaining: tuple[tuple[Polymer, int], ...]) -> bool:
        if ai == len(alpha_list):
            return not remaining
        key = (ai, remaining)
        hit = memo.get(key)
        if hit is not None:
            return hit
        target = alpha_list[ai].monomer_counts
        rem_list = list(remaining)
        chosen = [0] * len(rem_list)

        def fill(ti: int, left: Counter, left_size: int) -> bool:
            if left_size == 0:
                nxt = tuple(
                    (p, c - chosen[i])
                    for i, (p, c) in enumerate(rem_list)
                    if c - chosen[i] > 0
                )
                return assign(ai + 1, nxt)
            if ti == len(rem_list):
                return False
            polymer, avail = rem_list[ti]
            fit = avail
            for m, c in polymer.monomer_counts.items():
                fit = min(fit, left.get(m, 0) // c)
                if fit == 0:
                    break
            for take in range(fit, -1, -1):
                if take:
                    for m, c in polymer.monomer_counts.items():
                        left[m] -= c * take
                chosen[ti] = take
                if fill(ti + 1, left, left_size - take * polymer.size):
                    chosen[ti] = 0
                    if take:
                        for m, c in polymer.monomer_counts.items():
                            left[m] += c * take
                    return True
                chosen[ti] = 0
                if take:
                    for m, c in polymer.monomer_counts.items():
                        left[m] += c * take
            return False

        result = fill(0, Counter(target), alpha_list[ai].size)
        memo[key] = result
        return result

    return assign(0, tuple((p, c) for p, c in beta.polymers))


def feed_forward_order(config: Configuration) -> list[Polymer] | None:
    """Topological order of the binding digraph, or None if it has a cycle.

    The digraph has one node per polymer type and an edge from P to Q
    for every site name that P holds in unstarred excess and Q holds in
    starred excess.  A configuration is feed-forward iff this graph is
    acyclic; a TBN is feed-forward iff its melt is.  The returned order
    lists polymers with multiplicity and breaks ties canonically.
    """
    types = [p for p, _ in config.polymers]
    counts = config.counts
    index = {p: i for i, p in enumerate(types)}

    succ: list[set[int]] = [set() for _ in types]
    indegree = [0] * len(types)
    names = set()
    for p in types:
        names.update(p.net_sites)
    for name in names:
        plus = [index[p] for p in types if p.net_sites.get(name, 0) > 0]
        minus = [index[p] for p in types if p.net_sites.get(name, 0) < 0]
        for i in plus:
            for j in minus:
                if j not in succ[i]:
                    succ[i].add(j)
                    indegree[j] += 1

    import heapq

    ready = [i for i in range(len(types)) if indegree[i] == 0]
    heapq.heapify(ready)
    order: list[Polymer] = []
    done = 0
    while ready:
        i = heapq.heappop(ready)
        done += 1
        order.extend([types[i]] * counts[types[i]])
        for j in succ[i]:
            indegree[j] -= 1
            if indegree[j] == 0:
                heapq.heappush(ready, j)
    if done < len(types):
        return None
    return order


def normalize_polarity(tbn: Tbn) -> Tbn:
    """Rename site types (swapping starred and unstarred) so the result
    is star-limiting.

    Applied greedily per site name: any name with more starred than
    unstarred copies overall gets its polarity flipped everywhere.
    Returns the TBN unchanged if it is already star-limiting.
    """
    flipped = {name for name, net in tbn.site_balance.items() if net < 0}
    if not flipped:
        return tbn
    counts: dict[MonomerType, int] = {}
    for m, c in tbn.entries:
        sites = tuple(
            s.complement if s.name in flipped else s for s in m.sites
        )
        new = MonomerType(sites, m.label)
        counts[new] = counts.get(new, 0) + c
    return Tbn(counts)
