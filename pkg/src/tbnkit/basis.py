"""Polymer basis enumeration.

The polymer basis of a star-limiting TBN is the set of polymers over
its monomer types that are (a) self-saturated and (b) minimal: no
proper, non-empty sub-multiset is self-saturated with a self-saturated
complement.  Only basis polymers can appear in stable configurations,
which is what makes the basis the variable set for exact solving.

Enumeration is a depth-first extension of monomer multisets in a fixed
type order (types carrying starred sites first).  Branches are pruned
when a starred-site deficit can no longer be repaired by the unstarred
supply of the remaining types, and a monomer with only unstarred sites
is added only when it covers a current deficit (a pure-unstarred
extension that covers nothing can always be split off, so it never
leads to a minimal polymer).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .core import (
    BudgetExceededError,
    MonomerType,
    NotStarLimitingError,
    Polymer,
    Tbn,
)

DEFAULT_SIZE_CAP = 20
DEFAULT_NODE_BUDGET = 5_000_000


@dataclass(frozen=True)
class PolymerBasis:
    """Result of a basis enumeration.

    ``complete`` is True only when the enumeration provably found every
    basis polymer in scope: either the size cap reached the theoretical
    polymer-size bound, or no search branch was ever cut off by the
    cap.  ``restricted_to_counts`` marks enumerations confined to
    polymers realizable within the TBN's own monomer counts (sufficient
    for solving that TBN, cheaper than the unrestricted definition).
    """

    polymers: tuple[Polymer, ...]
    size_cap_used: int
    complete: bool
    restricted_to_counts: bool = False

    def __len__(self) -> int:
        return len(self.polymers)

    def __iter__(self):
        return iter(self.polymers)

    def __contains__(self, polymer: Polymer) -> bool:
        return polymer in set(self.polymers)


def is_minimal_self_saturated(polymer: Polymer) -> bool:
    """Exhaustive 2-split minimality test.

    A self-saturated polymer is minimal iff no proper non-empty
    sub-multiset is self-saturated with a self-saturated complement.
    Splitting into three or more self-saturated parts implies a valid
    2-split (self-saturation is preserved under union), so checking
    2-splits is exact.
    """
    if not polymer.is_self_saturated:
        return False
    items = list(polymer.monomer_counts.items())
    if polymer.size == 1:
        return True
    nets = [m.net_sites for m, _ in items]
    totals = polymer.net_sites
    names = list(totals)

    for sub in product(*(range(c + 1) for _, c in items)):
        total_taken = sum(sub)
        if total_taken == 0 or total_taken == polymer.size:
            continue
        ok = True
        for name in names:
            part = sum(take * nets[i].get(name, 0) for i, take in enumerate(sub))
            if part < 0 or totals[name] - part < 0:
                ok = False
                break
        if ok:
            return False
    return True


def theoretical_size_cap(tbn: Tbn) -> int:
    """Evaluate the closed-form bound on the size of any polymer that can
    appear in a stable configuration, from the TBN's own statistics."""
    from .analysis import TbnStats, polymer_size_bound

    stats = TbnStats.from_tbn(tbn)
    if stats.d == 0 or stats.m == 0:
        return 0
    return polymer_size_bound(stats)


def enumerate_basis(
    tbn: Tbn,
    size_cap: int | None = None,
    *,
    restrict_to_counts: bool = False,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> PolymerBasis:
    """Enumerate the polymer basis of a star-limiting TBN.

    Returns every polymer over the TBN's monomer types with at most
    ``size_cap`` monomers that is self-saturated and minimal.  With
    ``restrict_to_counts`` the search only visits polymers whose
    monomer usage fits within the TBN's own counts, which loses nothing
    for solving that TBN (a polymer used at least once must fit) and is
    exhaustive whenever the cap is not hit.

    The default cap is min(theoretical size bound, 20) — or the total
    monomer count in restricted mode.  Raises NotStarLimitingError for
    non-star-limiting input and BudgetExceededError when the node
    budget runs out.
    """
    tbn.require_star_limiting()

    bound = theoretical_size_cap(tbn)
    if size_cap is None:
        if restrict_to_counts:
            size_cap = min(bound, tbn.total_monomers)
        else:
            size_cap = min(bound, DEFAULT_SIZE_CAP)
    if size_cap < 0:
        raise ValueError("size_cap must be >= 0")

    types = sorted(tbn.monomer_types, key=lambda m: (not m.has_starred, m.sort_key))
    n_types = len(types)
    limits = [tbn.count(t) if restrict_to_counts else None for t in types]

    # Per suffix of the type order: which site names can still gain
    # unstarred copies, and the largest unstarred supply of any single
    # remaining monomer (for the deficit-repair bounds).
    suffix_supply: list[frozenset[str]] = [frozenset()] * (n_types + 1)
    suffix_max_unstarred = [0] * (n_types + 1)
    for i in range(n_types - 1, -1, -1):
        supply = frozenset(types[i].unstarred_supply)
        suffix_supply[i] = suffix_supply[i + 1] | supply
        suffix_max_unstarred[i] = max(
            suffix_max_unstarred[i + 1], sum(types[i].unstarred_supply.values())
        )

    counts = [0] * n_types
    net: dict[str, int] = {}
    found: list[Polymer] = []
    state = {"nodes": 0, "cap_hit": False}

    def current_polymer() -> Polymer:
        monomers: list[MonomerType] = []
        for i, c in enumerate(counts):
            monomers.extend([types[i]] * c)
        return Polymer(tuple(monomers))

    def rec(last: int, size: int, deficit: set[str]) -> None:
        for t in range(last, n_types):
            mono = types[t]
            if limits[t] is not None and counts[t] >= limits[t]:
                continue
            if size > 0 and not mono.has_starred and not (deficit & frozenset(mono.unstarred_supply)):
                continue
            if size == size_cap:
                state["cap_hit"] = True
                break
            state["nodes"] += 1
            if state["nodes"] > node_budget:
                raise BudgetExceededError(
                    f"basis enumeration exceeded node budget of {node_budget}"
                )
            counts[t] += 1
            new_deficit = set(deficit)
            for name, delta in mono.net_sites.items():
                before = net.get(name, 0)
                after = before + delta
                net[name] = after
                if after < 0:
                    new_deficit.add(name)
                else:
                    new_deficit.discard(name)

            repairable = new_deficit <= suffix_supply[t]
            if repairable and new_deficit:
                needed = sum(-net[name] for name in new_deficit)
                room = (size_cap - size - 1) * suffix_max_unstarred[t]
                repairable = needed <= room
            if repairable:
                if not new_deficit:
                    candidate = current_polymer()
                    if is_minimal_self_saturated(candidate):
                        found.append(candidate)
                rec(t, size + 1, new_deficit)

            counts[t] -= 1
            for name, delta in mono.net_sites.items():
                after = net.get(name, 0) - delta
                if after == 0:
                    del net[name]
                else:
                    net[name] = after

    if n_types and size_cap > 0:
        rec(0, 0, set())

    complete = (size_cap >= bound) or not state["cap_hit"]
    return PolymerBasis(
        polymers=tuple(sorted(found, key=lambda p: p.sort_key)),
        size_cap_used=size_cap,
        complete=complete,
        restricted_to_counts=restrict_to_counts,
    )


def merged_basis(
    t: Tbn,
    t_prime: Tbn,
    size_cap: int | None = None,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> tuple[PolymerBasis, dict[Polymer, int]]:
    """Union of the two polymer bases for a TBN and the same TBN plus one
    monomer, with per-polymer count bounds for the asymmetric members.

    ``t_prime`` must equal ``t`` plus exactly one copy of one monomer.
    A polymer appearing in only one of the two bases must have count 0
    in the excluding TBN (its monomer usage is unavailable there) and,
    when the added monomer carries starred sites, can appear at most
    |added monomer| times in any saturated configuration of the other;
    those upper bounds are returned as the second element.  When the
    added monomer has no starred sites, no site's limiting direction can
    tighten, so no flip bounds are recorded.
    """
    added = _added_monomer(t, t_prime)
    basis_t = enumerate_basis(t, size_cap, node_budget=node_budget)
    basis_tp = enumerate_basis(t_prime, size_cap, node_budget=node_budget)

    union = sorted(set(basis_t.polymers) | set(basis_tp.polymers), key=lambda p: p.sort_key)
    flip_constrained: dict[Polymer, int] = {}
    if added.has_starred:
        sym_diff = set(basis_t.polymers) ^ set(basis_tp.polymers)
        for polymer in sorted(sym_diff, key=lambda p: p.sort_key):
            flip_constrained[polymer] = added.size

    merged = PolymerBasis(
        polymers=tuple(union),
        size_cap_used=max(basis_t.size_cap_used, basis_tp.size_cap_used),
        complete=basis_t.complete and basis_tp.complete,
    )
    return merged, flip_constrained


def _added_monomer(t: Tbn, t_prime: Tbn) -> MonomerType:
    all_types = set(t.monomer_types) | set(t_prime.monomer_types)
    diffs = {m: t_prime.count(m) - t.count(m) for m in all_types}
    extra = [m for m, d in diffs.items() if d != 0]
    if len(extra) != 1 or diffs[extra[0]] != 1:
        raise ValueError("second TBN must be the first plus exactly one copy of one monomer")
    return extra[0]
