"""Generators for the layered signal-amplifier TBN families.

The amplifier is parameterized by the number of layers ``n`` (the
amplification factor: roughly 2^n reporter monomers change state) and
a robustness parameter ``k`` (how far from stable any misreporting
saturated configuration must be).  Domains are triples (i, j, l) with
1 <= i <= n+1 and 1 <= j, l <= k, in an unprimed family for the
amplifying half and a primed family for the converging half.

Amplifying half, per layer i and index j:
  u[i,j]  = one copy of each (i,j,l),                     2^(i-1) copies
  s[i,j]  = starred copy of each u[i,j] domain plus two
            copies of each (i+1,l,j),                     2^(i-1) copies
Converging half (primed domains; layer n uses the unprimed
(n+1,*,*) domains so the two halves meet):
  u'[i,j] = two copies of each (i+1,j,l)',                2^(i-1) copies
  s'[i,j] = starred copy of each u'[i,j] domain plus one
            copy of each (i,l,j)',                        2^(i-1) copies
Payoff:
  p*      = one copy, all k^2 starred primed domains (1,l1,l2)'*
  p[j]    = covers p* two columns at a time, j = 1..ceil(k/2)
            (for odd k the last p monomer covers a single column)
Analyte:
  a       = one copy of each unstarred (1,j,l); adding this single
            monomer flips the unique stable configuration.

Translator gadgets keep stable polymers O(k)-sized by mediating
between consecutive layers instead of letting one giant polymer form:
  g[i], g[i]* (2 <= i <= n):   one copy of each (i,j,l), resp. all
                               starred; 2^(i-1) copies each
  h[i], h[i]* (2 <= i <= n+1): two copies of each (i,j,l)' resp. one
                               starred copy of each; 2^(i-1) copies of
                               h[i] and 2^i copies of h[i]*.  Level
                               n+1 uses the unprimed domain family,
                               matching the layer-n monomers.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .core import Configuration, MonomerType, Polymer, SiteType, Tbn


@dataclass(frozen=True)
class AmplifierSpec:
    """Parameters for one member of the amplifier family."""

    n: int
    k: int
    with_analyte: bool = False
    with_translators: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one layer (n >= 1)")
        if self.k < 2:
            raise ValueError("robustness parameter k must be >= 2")


def _domain(i: int, j: int, l: int, primed: bool = False, starred: bool = False) -> SiteType:
    name = f"d_{i}_{j}_{l}" + ("_p" if primed else "")
    return SiteType(name, starred)


def _payoff_columns(k: int, j: int) -> list[int]:
    cols = [2 * j - 1]
    if 2 * j <= k:
        cols.append(2 * j)
    return cols


class _Family:
    """Monomer inventory for one (n, k) choice."""

    def __init__(self, spec: AmplifierSpec):
        self.spec = spec
        n, k = spec.n, spec.k
        rng = range(1, k + 1)

        self.u: dict[tuple[int, int], MonomerType] = {}
        self.s: dict[tuple[int, int], MonomerType] = {}
        self.up: dict[tuple[int, int], MonomerType] = {}
        self.sp: dict[tuple[int, int], MonomerType] = {}
        for i in range(1, n + 1):
            boundary = i == n  # layer n primes borrow the unprimed (n+1,*,*) family
            for j in rng:
                u_sites = [_domain(i, j, l) for l in rng]
                self.u[i, j] = MonomerType(tuple(u_sites), f"u_{i}_{j}")
                s_sites = [site.complement for site in u_sites]
                for l in rng:
                    s_sites += [_domain(i + 1, l, j)] * 2
                self.s[i, j] = MonomerType(tuple(s_sites), f"s_{i}_{j}")

                up_sites = []
                for l in rng:
                    up_sites += [_domain(i + 1, j, l, primed=not boundary)] * 2
                self.up[i, j] = MonomerType(tuple(up_sites), f"u'_{i}_{j}")
                sp_sites = [site.complement for site in up_sites]
                sp_sites += [_domain(i, l, j, primed=True) for l in rng]
                self.sp[i, j] = MonomerType(tuple(sp_sites), f"s'_{i}_{j}")

        self.p_star = MonomerType(
            tuple(
                _domain(1, l1, l2, primed=True, starred=True)
                for l1 in rng
                for l2 in rng
            ),
            "p*",
        )
        self.p: dict[int, MonomerType] = {}
        for j in range(1, (k + 1) // 2 + 1):
            sites = [
                _domain(1, c, l, primed=True)
                for c in _payoff_columns(k, j)
                for l in rng
            ]
            self.p[j] = MonomerType(tuple(sites), f"p_{j}")

        self.analyte = MonomerType(
            tuple(_domain(1, j, l) for j in rng for l in rng), "a"
        )

        self.g: dict[int, MonomerType] = {}
        self.g_star: dict[int, MonomerType] = {}
        for i in range(2, n + 1):
            sites = tuple(_domain(i, j, l) for j in rng for l in rng)
            self.g[i] = MonomerType(sites, f"g{i}")
            self.g_star[i] = MonomerType(
                tuple(s.complement for s in sites), f"g{i}*"
            )

        self.h: dict[int, MonomerType] = {}
        self.h_star: dict[int, MonomerType] = {}
        for i in range(2, n + 2):
            primed = i <= n
            single = [_domain(i, j, l, primed=primed) for j in rng for l in rng]
            self.h[i] = MonomerType(tuple(single) * 2, f"h{i}")
            self.h_star[i] = MonomerType(
                tuple(s.complement for s in single), f"h{i}*"
            )

    def tbn(self) -> Tbn:
        spec = self.spec
        n, k = spec.n, spec.k
        counts: dict[MonomerType, int] = {}
        for i in range(1, n + 1):
            copies = 2 ** (i - 1)
            for j in range(1, k + 1):
                counts[self.u[i, j]] = copies
                counts[self.s[i, j]] = copies
                counts[self.up[i, j]] = copies
                counts[self.sp[i, j]] = copies
        counts[self.p_star] = 1
        for mono in self.p.values():
            counts[mono] = 1
        if spec.with_analyte:
            counts[self.analyte] = 1
        if spec.with_translators:
            for i in range(2, n + 1):
                counts[self.g[i]] = 2 ** (i - 1)
                counts[self.g_star[i]] = 2 ** (i - 1)
            for i in range(2, n + 2):
                counts[self.h[i]] = 2 ** (i - 1)
                counts[self.h_star[i]] = 2 ** i
        return Tbn(counts)


def build_amplifier(spec: AmplifierSpec) -> Tbn:
    """Emit the exact monomer multiset for one family member."""
    return _Family(spec).tbn()


def reference_configuration(spec: AmplifierSpec) -> Configuration:
    """The intended stable configuration for one family member.

    Without the analyte: every s-monomer pairs with its u-partner, the
    payoff monomers sit on p*, and translator gadgets idle as g/g*
    pairs and h/h*/h* triples.  With the analyte (no translators): one
    giant polymer holds the analyte, every s and s', and p*, freeing
    all u, u', and payoff monomers.  With the analyte and translators:
    the gadget halves mediate between layers, so no polymer exceeds
    k + 3 monomers.
    """
    fam = _Family(spec)
    tbn = fam.tbn()
    n, k = spec.n, spec.k
    rng = range(1, k + 1)
    counts: Counter = Counter()

    def add(monomers: list[MonomerType], copies: int = 1) -> None:
        counts[Polymer(tuple(monomers))] += copies

    if not spec.with_analyte:
        for i in range(1, n + 1):
            copies = 2 ** (i - 1)
            for j in rng:
                add([fam.u[i, j], fam.s[i, j]], copies)
                add([fam.up[i, j], fam.sp[i, j]], copies)
        add([fam.p_star] + list(fam.p.values()))
        if spec.with_translators:
            for i in range(2, n + 1):
                add([fam.g[i], fam.g_star[i]], 2 ** (i - 1))
            for i in range(2, n + 2):
                add([fam.h[i], fam.h_star[i], fam.h_star[i]], 2 ** (i - 1))
        return Configuration.from_counts(tbn, counts)

    if not spec.with_translators:
        giant = [fam.analyte, fam.p_star]
        for i in range(1, n + 1):
            copies = 2 ** (i - 1)
            for j in rng:
                giant += [fam.s[i, j]] * copies
                giant += [fam.sp[i, j]] * copies
                add([fam.u[i, j]], copies)
                add([fam.up[i, j]], copies)
        add(giant)
        for mono in fam.p.values():
            add([mono])
        return Configuration.from_counts(tbn, counts)

    # Analyte plus translators: the shifted configuration in which each
    # layer's s-set binds one gadget half instead of the next layer.
    s_set = lambda i: [fam.s[i, j] for j in rng]
    sp_set = lambda i: [fam.sp[i, j] for j in rng]

    if n == 1:
        add([fam.analyte] + s_set(1) + [fam.h_star[2], fam.h_star[2]])
    else:
        add([fam.analyte] + s_set(1) + [fam.g_star[2], fam.g_star[2]])
        for i in range(2, n):
            add([fam.g[i]] + s_set(i) + [fam.g_star[i + 1]] * 2, 2 ** (i - 1))
        add([fam.g[n]] + s_set(n) + [fam.h_star[n + 1]] * 2, 2 ** (n - 1))
    for i in range(2, n + 1):
        add([fam.h[i + 1]] + sp_set(i) + [fam.h_star[i]], 2 ** (i - 1))
    add([fam.h[2]] + sp_set(1) + [fam.p_star])
    # Gadget stock not consumed by the cascade stays in idle triples.
    for i in range(2, n + 1):
        add([fam.h[i], fam.h_star[i], fam.h_star[i]], 2 ** (i - 2))
    add([fam.h[n + 1], fam.h_star[n + 1], fam.h_star[n + 1]], 2 ** (n - 1))

    for i in range(1, n + 1):
        copies = 2 ** (i - 1)
        for j in rng:
            add([fam.u[i, j]], copies)
            add([fam.up[i, j]], copies)
    for mono in fam.p.values():
        add([mono])
    return Configuration.from_counts(tbn, counts)


def monomer_type_count(spec: AmplifierSpec) -> int:
    """Exact number of monomer types in the family member."""
    n, k = spec.n, spec.k
    count = 4 * n * k + 1 + (k + 1) // 2
    if spec.with_analyte:
        count += 1
    if spec.with_translators:
        count += 2 * (n - 1) + 2 * n
    return count


def domain_type_count(spec: AmplifierSpec) -> int:
    """Exact number of distinct domain names: (2n+1) k^2."""
    return (2 * spec.n + 1) * spec.k * spec.k


def max_monomer_size(spec: AmplifierSpec) -> int:
    """Largest monomer, exactly: k^2 for the analyte and p*, 3k for the
    s monomers (which wins for k = 2), 2k^2 for the h gadgets."""
    k = spec.k
    best = max(k * k, 3 * k)
    if spec.with_translators:
        best = max(best, 2 * k * k)
    return best


@dataclass(frozen=True)
class FigureExample:
    """A small worked TBN with its illustrative configurations."""

    name: str
    tbn: Tbn
    configurations: tuple[Configuration, ...]


def figure_examples() -> dict[str, FigureExample]:
    """Small worked examples used throughout the tests and docs.

    ``four_monomer``: four monomers whose melt is unsaturated, with a
    pictured two-polymer saturated configuration and a three-polymer
    stable one.  ``feed_forward_chain``: three monomers admitting a
    feed-forward order.  ``mutual_pair``: two monomers that cover each
    other, stabilized by a single merge but not feed-forward.
    """
    m1 = MonomerType.from_string("a", "m1")
    m2 = MonomerType.from_string("b", "m2")
    m3 = MonomerType.from_string("a* b", "m3")
    m4 = MonomerType.from_string("a b*", "m4")
    four = Tbn.of([m1, m2, m3, m4])
    four_melt = Configuration.from_polymers(
        four, [Polymer.of([m]) for m in (m1, m2, m3, m4)]
    )
    four_two = Configuration.from_polymers(
        four, [Polymer.of([m1, m3]), Polymer.of([m2, m4])]
    )
    four_stable = Configuration.from_polymers(
        four, [Polymer.of([m1]), Polymer.of([m2]), Polymer.of([m3, m4])]
    )

    c1 = MonomerType.from_string("a b", "x1")
    c2 = MonomerType.from_string("a* c", "x2")
    c3 = MonomerType.from_string("b* c*", "x3")
    chain = Tbn.of([c1, c2, c3])
    chain_melt = Configuration.from_polymers(chain, [Polymer.of([m]) for m in (c1, c2, c3)])

    p1 = MonomerType.from_string("a b*", "y1")
    p2 = MonomerType.from_string("a* b", "y2")
    pair = Tbn.of([p1, p2])
    pair_melt = Configuration.from_polymers(pair, [Polymer.of([p1]), Polymer.of([p2])])
    pair_merged = Configuration.from_polymers(pair, [Polymer.of([p1, p2])])

    return {
        "four_monomer": FigureExample(
            "four_monomer", four, (four_melt, four_two, four_stable)
        ),
        "feed_forward_chain": FigureExample(
            "feed_forward_chain", chain, (chain_melt,)
        ),
        "mutual_pair": FigureExample(
            "mutual_pair", pair, (pair_melt, pair_merged)
        ),
    }
