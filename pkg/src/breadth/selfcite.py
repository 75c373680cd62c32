"""Self-citation networks and the three indicators derived from them.

The self-citation network of an author links two of their papers whenever one
cites the other. Specialized authors tend to produce densely connected
networks; broad authors leave more papers unlinked. Three indicators capture
this:

* self-reference rate (srr): self-references over all cited references.
* realized self-reference rate: self-references over the number of own prior
  papers that could have been cited.
* component indicator: reciprocal of the connected-component count, i.e. the
  normalized average component size; 1 for a connected network, 1/P for an
  edgeless one.

All papers of an author are included, isolates and small components alike.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import AuthorProfile
from .errors import NoPriorPapersError, NoReferencesError

INDICATOR_COLUMNS = ("author_id", "n_papers", "srr", "realized_srr", "component_indicator")


@dataclass(frozen=True)
class SelfCiteNetwork:
    """Undirected citation links between one author's own papers."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    components: tuple[tuple[str, ...], ...]

    @property
    def n_components(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class SelfCiteIndicators:
    """The three indicator values for one author; srr is None when undefined."""

    author_id: str
    n_papers: int
    srr: float | None
    realized_srr: float | None
    component_indicator: float

    def csv_row(self) -> str:
        def fmt(v):
            return "NA" if v is None else f"{v:.6f}"

        return ",".join(
            [
                self.author_id,
                str(self.n_papers),
                fmt(self.srr),
                fmt(self.realized_srr),
                f"{self.component_indicator:.6f}",
            ]
        )


def build_network(profile: AuthorProfile) -> SelfCiteNetwork:
    """Link every pair of own papers where either cites the other.

    All papers appear as nodes; papers never self-cited stay as singleton
    components.
    """
    own_ids = set(profile.paper_ids())
    nodes = profile.paper_ids()
    edges = set()
    for rec, _ in profile.papers:
        for ref in rec.references:
            if ref in own_ids and ref != rec.paper_id:
                edges.add(tuple(sorted((rec.paper_id, ref))))

    parent = {pid: pid for pid in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    groups: dict[str, list[str]] = {}
    for pid in nodes:
        groups.setdefault(find(pid), []).append(pid)
    components = tuple(
        tuple(sorted(members)) for members in sorted(groups.values(), key=lambda m: sorted(m)[0])
    )
    return SelfCiteNetwork(nodes=nodes, edges=tuple(sorted(edges)), components=components)


def self_reference_rate(profile: AuthorProfile) -> float:
    """Fraction of the author's cited references that point to their own papers.

    Dangling references (ids outside the corpus) count in the denominator
    only. Undefined, and an error, when the profile cites nothing at all.
    """
    own_ids = set(profile.paper_ids())
    total = 0
    self_refs = 0
    for rec, _ in profile.papers:
        for ref in rec.references:
            total += 1
            if ref in own_ids and ref != rec.paper_id:
                self_refs += 1
    if total == 0:
        raise NoReferencesError(
            f"author {profile.author_id!r} has no cited references; rate undefined"
        )
    return self_refs / total


def realized_self_reference_rate(profile: AuthorProfile, *, per_paper: bool = False) -> float:
    """Self-references relative to the own prior papers that could have been cited.

    The default is one aggregate quotient per author: total self-references
    divided by the summed citable-opportunity counts. Same-year own papers
    count as citable opportunities, and repeated self-references to the same
    target within one paper count once. ``per_paper=True`` switches to the
    mean of per-paper quotients (papers with no citable prior work are
    skipped), kept only for sensitivity analysis.
    """
    own_years = {rec.paper_id: rec.year for rec, _ in profile.papers}
    own_ids = set(own_years)
    numerator = 0
    denominator = 0
    quotients = []
    for rec, _ in profile.papers:
        cited_own = {r for r in rec.references if r in own_ids and r != rec.paper_id}
        citable = sum(
            1
            for pid, year in own_years.items()
            if pid != rec.paper_id and year <= rec.year
        )
        numerator += len(cited_own)
        denominator += citable
        if citable > 0:
            quotients.append(len(cited_own) / citable)
    if per_paper:
        if not quotients:
            raise NoPriorPapersError(
                f"author {profile.author_id!r} has no paper with citable prior own work"
            )
        return sum(quotients) / len(quotients)
    if denominator == 0:
        raise NoPriorPapersError(
            f"author {profile.author_id!r} has no citable prior own papers"
        )
    return numerator / denominator


def component_indicator(network: SelfCiteNetwork) -> float:
    """Normalized average component size: (P / C) / P, which reduces to 1 / C."""
    if not network.nodes:
        raise ValueError("empty network")
    return 1.0 / network.n_components


def compute_indicators(
    profile: AuthorProfile, *, realized_per_paper: bool = False
) -> SelfCiteIndicators:
    """All three indicators for one author; undefined rates become None."""
    network = build_network(profile)
    try:
        srr = self_reference_rate(profile)
    except NoReferencesError:
        srr = None
    try:
        realized = realized_self_reference_rate(profile, per_paper=realized_per_paper)
    except NoPriorPapersError:
        realized = None
    return SelfCiteIndicators(
        author_id=profile.author_id,
        n_papers=profile.n_papers,
        srr=srr,
        realized_srr=realized,
        component_indicator=component_indicator(network),
    )
