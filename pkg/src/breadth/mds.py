"""Classical (Torgerson) scaling of distance matrices to 2D plus plot export.

The layout pipeline double-centers the squared distance matrix, takes the
top eigenpairs, and scales eigenvectors by the square roots of their
eigenvalues. (1 - cosine) distances are generally not Euclidean, so negative
eigenvalues can appear; they are truncated to zero and their magnitude is
reported rather than hidden. Plots are standalone SVG files written with a
fixed element order and fixed number formatting, so identical input yields
byte-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import AuthorProfile, Corpus
from .knowledge_space import DistanceMatrix, similarity_among, to_distance
from .measures import CreditWeights, harmonic_credit

CANVAS = 640.0
MARGIN = 40.0
# text glyphs; area scales with font-size squared
BASE_FONT = 16.0
GLYPH_FILL = {"T": "#b03a2e", "C": "#21618c"}
DEFAULT_FILL = "#444444"


@dataclass(frozen=True)
class Layout2D:
    paper_ids: tuple[str, ...]
    coords: np.ndarray
    eigenvalues: tuple[float, ...]
    residual: float
    negative_mass: float
    stress_note: str

    def __post_init__(self):
        if self.coords.shape[0] != len(self.paper_ids):
            raise ValueError("one coordinate row per paper required")
        if not np.all(np.isfinite(self.coords)):
            raise ValueError("non-finite coordinates")

    @property
    def points(self) -> list[tuple[str, float, float]]:
        xy = _xy(self)
        return [
            (pid, float(x), float(y))
            for pid, (x, y) in zip(self.paper_ids, xy)
        ]


def _xy(layout: "Layout2D") -> np.ndarray:
    """First two coordinate columns, zero-padded when the layout has fewer."""
    n, k = layout.coords.shape
    if k >= 2:
        return layout.coords[:, :2]
    xy = np.zeros((n, 2))
    xy[:, :k] = layout.coords
    return xy


def classical_mds(dist: DistanceMatrix, k: int = 2) -> Layout2D:
    """Torgerson scaling of a distance matrix into k dimensions.

    B = -1/2 J D^2 J with J the centering projector; coordinates are the top-k
    eigenvectors of B scaled by sqrt(eigenvalue), negatives truncated to zero.
    ``residual`` is the positive eigenvalue mass left out of the k kept axes,
    ``negative_mass`` the total magnitude of negative eigenvalues (non-Euclidean
    distortion). k may not exceed the matrix order.
    """
    n = dist.order
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise ValueError(f"k={k} exceeds matrix order {n}")
    d2 = dist.values.astype(np.float64) ** 2
    j = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * j @ d2 @ j
    b = (b + b.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(b)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    kept = np.clip(eigvals[:k], 0.0, None)
    coords = eigvecs[:, :k] * np.sqrt(kept)[None, :]
    coords = coords - coords.mean(axis=0)
    _fix_signs(coords)
    positive = eigvals[eigvals > 0.0]
    residual = float(positive[k:].sum()) if positive.size > k else 0.0
    negative_mass = float(-eigvals[eigvals < 0.0].sum())
    coords.setflags(write=False)
    return Layout2D(
        paper_ids=dist.paper_ids,
        coords=coords,
        eigenvalues=tuple(float(v) for v in eigvals),
        residual=residual,
        negative_mass=negative_mass,
        stress_note=(
            f"discarded positive eigenvalue mass {residual:.6g}; "
            f"negative eigenvalue mass {negative_mass:.6g}"
        ),
    )


def _fix_signs(coords: np.ndarray) -> None:
    """Flip each axis so its largest-magnitude entry is positive.

    Eigenvector signs are arbitrary; pinning them keeps layouts comparable
    across calls with permuted input.
    """
    for j in range(coords.shape[1]):
        col = coords[:, j]
        if col.size == 0:
            continue
        pivot = int(np.argmax(np.abs(col)))
        if col[pivot] < 0:
            coords[:, j] = -col


@dataclass(frozen=True)
class PairLayout:
    """Joint layout of two authors' papers on their union distance matrix."""

    layout: Layout2D
    labels: tuple[str, ...]
    weights: CreditWeights


def author_layout(profile: AuthorProfile, corpus: Corpus, k: int = 2) -> PairLayout:
    """Layout of a single author's embedded papers, tagged "T" throughout."""
    sim = similarity_among(corpus, [rec.paper_id for rec, _ in profile.papers])
    layout = classical_mds(to_distance(sim), k=k)
    credit = _credit_lookup(profile)
    return PairLayout(
        layout=layout,
        labels=tuple("T" for _ in layout.paper_ids),
        weights=CreditWeights(
            paper_ids=layout.paper_ids,
            values=tuple(credit[pid] for pid in layout.paper_ids),
        ),
    )


def pair_layout(
    treatment: AuthorProfile, control: AuthorProfile, corpus: Corpus, k: int = 2
) -> PairLayout:
    """Joint layout over the union of both authors' embedded papers.

    A paper appearing in both profiles is tagged "T" and weighted by the
    treatment author's credit share.
    """
    t_ids = [rec.paper_id for rec, _ in treatment.papers]
    c_ids = [rec.paper_id for rec, _ in control.papers]
    sim = similarity_among(corpus, t_ids + c_ids)
    layout = classical_mds(to_distance(sim), k=k)
    t_credit = _credit_lookup(treatment)
    c_credit = _credit_lookup(control)
    labels = tuple("T" if pid in t_credit else "C" for pid in layout.paper_ids)
    weights = tuple(
        t_credit[pid] if pid in t_credit else c_credit[pid]
        for pid in layout.paper_ids
    )
    return PairLayout(
        layout=layout,
        labels=labels,
        weights=CreditWeights(paper_ids=layout.paper_ids, values=weights),
    )


def _credit_lookup(profile: AuthorProfile) -> dict[str, float]:
    return {
        rec.paper_id: harmonic_credit(pos, len(rec.authors))
        for rec, pos in profile.papers
    }


def emit_plot(layout: Layout2D, labels, out_path, weights: CreditWeights | None = None) -> None:
    """Write a deterministic SVG scatter of one layout.

    One text glyph per paper, glyph character = its group tag, glyph area
    proportional to weight when weights are given (font size scales with the
    square root of the weight), uniform size otherwise. Fixed canvas, margins,
    and float formatting keep the bytes stable across reruns.
    """
    labels = tuple(labels)
    if len(labels) != len(layout.paper_ids):
        raise ValueError("one label per point required")
    if weights is not None:
        if weights.paper_ids != layout.paper_ids:
            raise ValueError("weights must cover exactly the layout's papers")
        w = np.asarray(weights.values, dtype=np.float64)
        sizes = BASE_FONT * np.sqrt(w / w.max())
    else:
        sizes = np.full(len(labels), BASE_FONT * 0.75)

    xy = _xy(layout)
    span = float(
        max(
            xy[:, 0].max() - xy[:, 0].min(),
            xy[:, 1].max() - xy[:, 1].min(),
            1e-9,
        )
    )
    scale = (CANVAS - 2 * MARGIN) / span
    cx = (xy[:, 0].max() + xy[:, 0].min()) / 2.0
    cy = (xy[:, 1].max() + xy[:, 1].min()) / 2.0
    px = (xy[:, 0] - cx) * scale + CANVAS / 2.0
    # SVG y axis points down
    py = (cy - xy[:, 1]) * scale + CANVAS / 2.0

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS:.0f}" '
        f'height="{CANVAS:.0f}" viewBox="0 0 {CANVAS:.0f} {CANVAS:.0f}">',
        f'<rect width="{CANVAS:.0f}" height="{CANVAS:.0f}" fill="#ffffff"/>',
    ]
    for pid, tag, x, y, size in zip(layout.paper_ids, labels, px, py, sizes):
        fill = GLYPH_FILL.get(tag, DEFAULT_FILL)
        lines.append(
            f'<text x="{x:.3f}" y="{y:.3f}" font-size="{size:.3f}" '
            f'font-family="sans-serif" text-anchor="middle" fill="{fill}">'
            f"{tag}<title>{pid}</title></text>"
        )
    lines.append("</svg>")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_coordinates(path, layout: Layout2D, labels=None, weights: CreditWeights | None = None) -> None:
    """Export layout points as CSV: paper_id, group, x, y, weight."""
    labels = tuple(labels) if labels is not None else ("-",) * len(layout.paper_ids)
    if len(labels) != len(layout.paper_ids):
        raise ValueError("one label per point required")
    if weights is not None and weights.paper_ids != layout.paper_ids:
        raise ValueError("weights must cover exactly the layout's papers")
    values = weights.values if weights is not None else (1.0,) * len(labels)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("paper_id,group,x,y,weight\n")
        for pid, tag, (x, y), w in zip(layout.paper_ids, labels, _xy(layout), values):
            # + 0.0 turns IEEE negative zero into plain 0.0
            fh.write(f"{pid},{tag},{x + 0.0:.6f},{y + 0.0:.6f},{w:.6f}\n")
