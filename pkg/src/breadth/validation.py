"""Matched-pair control selection and the validation statistics.

Treatment authors are paired with controls of the same field, a publication
count within a fractional tolerance, and first/last publishing years within a
year tolerance. Group separation is quantified with Cohen's d (pooled-SD
denominator) plus a large-sample normal confidence interval, converted to a
correlation-scale value for context; author-level indicator agreement uses
Pearson correlations with Fisher-transform confidence intervals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .corpus import AuthorProfile
from .errors import DegenerateDataError


@dataclass(frozen=True)
class MatchCriteria:
    """Eligibility rules for control selection.

    ``pub_tolerance`` is fractional (0.10 means publication counts within
    10% of the treatment author's), ``year_tolerance`` bounds both the first
    and last publishing year differences.
    """

    pub_tolerance: float = 0.10
    year_tolerance: int = 1
    field_exact: bool = True
    rng_seed: int = 0

    def __post_init__(self):
        if self.pub_tolerance < 0:
            raise ValueError("pub_tolerance must be >= 0")
        if self.year_tolerance < 0:
            raise ValueError("year_tolerance must be >= 0")


@dataclass(frozen=True)
class MatchedPair:
    treatment_id: str
    control_id: str
    satisfied: dict = field(default_factory=dict)


@dataclass(frozen=True)
class EffectSize:
    d: float
    ci_low: float
    ci_high: float
    n_treatment: int
    n_control: int


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    ci_low: float
    ci_high: float
    n: int
    p_note: str
    p: float


@dataclass(frozen=True)
class DominanceResult:
    """Share of pairs where the control's score strictly exceeds the treatment's."""

    fraction: float
    n_pairs: int
    n_control_greater: int
    n_ties: int


def eligible_control(
    treatment: AuthorProfile, candidate: AuthorProfile, criteria: MatchCriteria
) -> bool:
    """Check all matching criteria for one candidate control."""
    if candidate.author_id == treatment.author_id:
        return False
    if criteria.field_exact:
        if treatment.field_code is None or candidate.field_code is None:
            return False
        if treatment.field_code != candidate.field_code:
            return False
    if abs(candidate.n_papers - treatment.n_papers) > criteria.pub_tolerance * treatment.n_papers:
        return False
    if abs(candidate.first_year - treatment.first_year) > criteria.year_tolerance:
        return False
    if abs(candidate.last_year - treatment.last_year) > criteria.year_tolerance:
        return False
    return True


def find_match(
    treatment: AuthorProfile,
    pool,
    criteria: MatchCriteria,
    *,
    rng: np.random.Generator | None = None,
    exclude=frozenset(),
) -> MatchedPair | None:
    """Pick one eligible control uniformly at random, or None if none exists.

    The eligible set is sorted by author id before the draw, so the outcome
    depends only on the seed and on which authors are eligible, never on
    pool ordering. ``exclude`` removes already-used controls
    (matching without replacement).
    """
    if rng is None:
        rng = np.random.default_rng(criteria.rng_seed)
    eligible = sorted(
        (
            c
            for c in pool
            if c.author_id not in exclude and eligible_control(treatment, c, criteria)
        ),
        key=lambda c: c.author_id,
    )
    if not eligible:
        return None
    control = eligible[int(rng.integers(len(eligible)))]
    return MatchedPair(
        treatment_id=treatment.author_id,
        control_id=control.author_id,
        satisfied={
            "field_code": control.field_code,
            "pub_diff": control.n_papers - treatment.n_papers,
            "first_year_diff": control.first_year - treatment.first_year,
            "last_year_diff": control.last_year - treatment.last_year,
        },
    )


def match_pairs(treatments, pool, criteria: MatchCriteria):
    """Match each treatment author to a distinct control, in treatment order.

    Controls come only from pool entries outside the treatment set, and each
    control is used at most once. Returns (pairs, unmatched treatment ids);
    failing to match is a valid outcome, not an error.
    """
    treatment_ids = {t.author_id for t in treatments}
    pool = [c for c in pool if c.author_id not in treatment_ids]
    rng = np.random.default_rng(criteria.rng_seed)
    used: set[str] = set()
    pairs = []
    unmatched = []
    for treatment in treatments:
        pair = find_match(treatment, pool, criteria, rng=rng, exclude=used)
        if pair is None:
            unmatched.append(treatment.author_id)
        else:
            used.add(pair.control_id)
            pairs.append(pair)
    return pairs, unmatched


def cohens_d(treatment_values, control_values, level: float = 0.95) -> EffectSize:
    """Standardized mean difference (treatment minus control) in pooled-SD units.

    d = (mean_t - mean_c) / s_pooled with the usual (n-1)-weighted pooled
    variance; the confidence interval uses the large-sample standard error
    sqrt((n_t + n_c) / (n_t * n_c) + d^2 / (2 (n_t + n_c))).
    """
    t = np.asarray(treatment_values, dtype=np.float64)
    c = np.asarray(control_values, dtype=np.float64)
    n_t, n_c = t.size, c.size
    if n_t < 2 or n_c < 2:
        raise DegenerateDataError("both groups need at least 2 values")
    var_t = t.var(ddof=1)
    var_c = c.var(ddof=1)
    pooled = np.sqrt(((n_t - 1) * var_t + (n_c - 1) * var_c) / (n_t + n_c - 2))
    if pooled == 0.0:
        raise DegenerateDataError("zero pooled variance; d undefined")
    d = float((t.mean() - c.mean()) / pooled)
    return _d_with_ci(d, n_t, n_c, level)


def _d_with_ci(d: float, n_t: int, n_c: int, level: float = 0.95) -> EffectSize:
    z = stats.norm.ppf(0.5 + level / 2)
    se = np.sqrt((n_t + n_c) / (n_t * n_c) + d * d / (2 * (n_t + n_c)))
    return EffectSize(
        d=d,
        ci_low=float(d - z * se),
        ci_high=float(d + z * se),
        n_treatment=n_t,
        n_control=n_c,
    )


def d_to_r(d: float, n_t: int, n_c: int) -> float:
    """Convert an effect size d to a correlation-scale value.

    r = d / sqrt(d^2 + (n_t + n_c)^2 / (n_t * n_c)); for equal group sizes
    this reduces to d / sqrt(d^2 + 4). Strictly increasing in d, bounded in
    (-1, 1).
    """
    if n_t < 1 or n_c < 1:
        raise ValueError("group sizes must be >= 1")
    correction = (n_t + n_c) ** 2 / (n_t * n_c)
    return float(d / np.sqrt(d * d + correction))


def _p_note(p: float) -> str:
    if p < 0.001:
        return "p<0.001"
    if p < 0.01:
        return "p<0.01"
    if p < 0.05:
        return "p<0.05"
    return f"p={p:.3f}"


def pearson_with_ci(x, y, level: float = 0.95) -> CorrelationResult:
    """Product-moment correlation with a Fisher-transform confidence interval.

    CI: atanh(r) +/- z / sqrt(n - 3), back-transformed with tanh. The p note
    comes from the two-sided t test on r with n - 2 degrees of freedom.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size != y.size:
        raise DegenerateDataError(f"length mismatch: {x.size} vs {y.size}")
    n = x.size
    if n < 4:
        raise DegenerateDataError("need at least 4 paired values for a Fisher CI")
    if x.std() == 0.0 or y.std() == 0.0:
        raise DegenerateDataError("zero variance; correlation undefined")
    xc = x - x.mean()
    yc = y - y.mean()
    r = float(np.dot(xc, yc) / np.sqrt(np.dot(xc, xc) * np.dot(yc, yc)))
    r = max(-1.0, min(1.0, r))
    z = stats.norm.ppf(0.5 + level / 2)
    with np.errstate(divide="ignore"):
        fisher = np.arctanh(r)
    half_width = z / np.sqrt(n - 3)
    ci_low = float(np.tanh(fisher - half_width))
    ci_high = float(np.tanh(fisher + half_width))
    if abs(r) < 1.0:
        t_stat = r * np.sqrt((n - 2) / (1.0 - r * r))
        p = float(2 * stats.t.sf(abs(t_stat), df=n - 2))
    else:
        p = 0.0
    return CorrelationResult(
        r=r, ci_low=ci_low, ci_high=ci_high, n=n, p_note=_p_note(p), p=p
    )


def pair_dominance(pairs, scores) -> DominanceResult:
    """Per-pair comparison of control vs treatment scores.

    ``scores`` maps author id to a measure value and must cover both members
    of every pair. Ties count against dominance and are reported separately.
    """
    greater = 0
    ties = 0
    for pair in pairs:
        try:
            t_score = scores[pair.treatment_id]
            c_score = scores[pair.control_id]
        except KeyError as exc:
            raise KeyError(f"no score for author {exc.args[0]!r}") from None
        if c_score > t_score:
            greater += 1
        elif c_score == t_score:
            ties += 1
    n = len(pairs)
    if n == 0:
        raise DegenerateDataError("no pairs to compare")
    return DominanceResult(
        fraction=greater / n, n_pairs=n, n_control_greater=greater, n_ties=ties
    )


def pair_dominance_fraction(pairs, scores) -> float:
    """Fraction of pairs whose control score strictly exceeds the treatment's."""
    return pair_dominance(pairs, scores).fraction
