"""Command-line pipeline for breadth scoring and validation.

Subcommands: measure (per-author breadth scores), selfcite (self-citation
indicators), validate (matched-pair effect sizes), mds (2D layouts and
plots), synth (synthetic cohorts), correlate (scores vs indicators). Every
flag can also be supplied through an environment variable named
BREADTH_<FLAG> with dashes as underscores (explicit flags win). Exit codes:
0 success, 1 input or data error, 2 usage error, 3 ran fine but produced an
empty result.
"""

from __future__ import annotations

import argparse
import csv
import multiprocessing
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .corpus import Corpus, build_author_profile, load_corpus
from .errors import (
    BelowMinPapersError,
    BreadthError,
    DegenerateDataError,
    NotEnoughEmbeddingsError,
)
from .knowledge_space import similarity_matrix, to_distance
from .measures import (
    SCORE_COLUMNS,
    avg_shortest_path,
    credit_weights,
    furthest_neighbor_avg,
    mean_pairwise,
    nearest_neighbor_avg,
    weighted_furthest_neighbor_avg,
)
from .mds import author_layout, emit_plot, pair_layout, write_coordinates
from .selfcite import INDICATOR_COLUMNS, compute_indicators
from .synth import SynthConfig, generate_cohort, write_cohort
from .validation import MatchCriteria, cohens_d, d_to_r, match_pairs, pair_dominance, pearson_with_ci

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_USAGE = 2
EXIT_EMPTY = 3

MEASURE_ALIASES = {
    "mean": "mean_pairwise",
    "fn": "fn_avg",
    "wfn": "wfn_avg",
    "nn": "nn_avg",
    "aspl": "aspl",
}
MEASURE_ORDER = ("mean_pairwise", "fn_avg", "wfn_avg", "nn_avg", "aspl")
INDICATOR_NAMES = ("srr", "realized_srr", "component_indicator")


class _UsageError(Exception):
    pass


def _parse_measures(text: str):
    chosen = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if token not in MEASURE_ALIASES:
            raise argparse.ArgumentTypeError(
                f"unknown measure {token!r}; choose from {', '.join(MEASURE_ALIASES)}"
            )
        name = MEASURE_ALIASES[token]
        if name not in chosen:
            chosen.append(name)
    if not chosen:
        raise argparse.ArgumentTypeError("no measures selected")
    return tuple(chosen)


def _parse_years(text: str):
    years: set[int] = set()
    try:
        for token in text.split(","):
            token = token.strip()
            if not token:
                continue
            if "-" in token[1:]:
                lo_text, hi_text = token.split("-", 1)
                lo, hi = int(lo_text), int(hi_text)
                if hi < lo:
                    raise argparse.ArgumentTypeError(f"empty year range {token!r}")
                years.update(range(lo, hi + 1))
            else:
                years.add(int(token))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"cannot parse years {text!r}; use e.g. 1996,1997 or 1996-1997"
        ) from None
    return frozenset(years)


def _parse_author_range(text: str):
    try:
        lo_text, hi_text = text.split(",", 1)
        return int(lo_text), int(hi_text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"cannot parse {text!r}; expected LO,HI"
        ) from None


# (cast, hard default) per flag dest; None defaults stay None (required-ness
# is checked by the handlers so BREADTH_* variables can fill them in)
_FLAG_SPECS = {
    "papers": (str, None),
    "embeddings": (str, None),
    "out": (str, None),
    "out_dir": (str, None),
    "min_papers": (int, 10),
    "measures": (_parse_measures, tuple(MEASURE_ORDER)),
    "seed": (int, 0),
    "treatment": (str, None),
    "exclude_first_years": (_parse_years, frozenset()),
    "jobs": (int, 0),
    "scores": (str, None),
    "indicators": (str, None),
}


def _apply_env(args: argparse.Namespace) -> None:
    for dest, (cast, fallback) in _FLAG_SPECS.items():
        if not hasattr(args, dest) or getattr(args, dest) is not None:
            continue
        raw = os.environ.get("BREADTH_" + dest.upper())
        if raw is not None:
            setattr(args, dest, cast(raw))
        else:
            setattr(args, dest, fallback)


def _require(args: argparse.Namespace, dest: str):
    value = getattr(args, dest)
    if value is None:
        flag = "--" + dest.replace("_", "-")
        raise _UsageError(f"{flag} is required (or set BREADTH_{dest.upper()})")
    return value


def _print_table(headers, rows) -> None:
    widths = [
        max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(str(h))
        for i, h in enumerate(headers)
    ]
    print("  ".join(str(h).ljust(w) for h, w in zip(headers, widths)).rstrip())
    for row in rows:
        print("  ".join(str(c).ljust(w) for c, w in zip(row, widths)).rstrip())


def _fmt(value) -> str:
    return "NA" if value is None else f"{value:.6f}"


# ---------------------------------------------------------------- measure

def _jobs_count(requested: int) -> int:
    if requested < 0:
        raise _UsageError("--jobs must be >= 0")
    if requested == 0:
        return os.cpu_count() or 1
    return requested


@dataclass
class _ScoreTask:
    corpus: Corpus
    min_papers: int
    selected: tuple[str, ...]
    excluded_years: frozenset


# shared with forked workers; set before the pool is created
_TASK: _ScoreTask | None = None


def _measure_values(profile, sim, selected) -> dict[str, float]:
    values: dict[str, float] = {}
    if "mean_pairwise" in selected:
        values["mean_pairwise"] = mean_pairwise(sim)
    if "fn_avg" in selected:
        values["fn_avg"] = furthest_neighbor_avg(sim)
    if "wfn_avg" in selected:
        values["wfn_avg"] = weighted_furthest_neighbor_avg(
            sim, credit_weights(profile, sim.paper_ids)
        )
    if "nn_avg" in selected:
        values["nn_avg"] = nearest_neighbor_avg(sim)
    if "aspl" in selected:
        values["aspl"] = avg_shortest_path(to_distance(sim))
    return values


def _score_one(author_id: str):
    task = _TASK
    try:
        profile = build_author_profile(task.corpus, author_id, task.min_papers)
    except BelowMinPapersError:
        return author_id, None, "below-min-papers"
    if profile.first_year in task.excluded_years:
        return author_id, None, "first-year-excluded"
    try:
        sim = similarity_matrix(profile, task.corpus)
    except NotEnoughEmbeddingsError:
        return author_id, None, "not-enough-embeddings"
    values = _measure_values(profile, sim, task.selected)
    row = ",".join(
        [author_id, str(sim.order)]
        + [_fmt(values.get(m)) for m in MEASURE_ORDER]
    )
    return author_id, row, None


def _run_scores(corpus, author_ids, min_papers, selected, excluded_years, jobs):
    global _TASK
    _TASK = _ScoreTask(
        corpus=corpus,
        min_papers=min_papers,
        selected=selected,
        excluded_years=excluded_years,
    )
    can_fork = "fork" in multiprocessing.get_all_start_methods()
    if jobs > 1 and can_fork and len(author_ids) >= 2 * jobs:
        ctx = multiprocessing.get_context("fork")
        chunk = max(1, len(author_ids) // (jobs * 4))
        with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
            results = list(pool.map(_score_one, author_ids, chunksize=chunk))
    else:
        results = [_score_one(a) for a in author_ids]
    _TASK = None
    return results


def _write_skips(path, skips) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("author_id,reason\n")
        for author_id, reason in skips:
            fh.write(f"{author_id},{reason}\n")


def cmd_measure(args) -> int:
    papers = _require(args, "papers")
    embeddings = _require(args, "embeddings")
    out = _require(args, "out")
    corpus = load_corpus(papers, embeddings)
    author_ids = sorted(corpus.by_author)
    results = _run_scores(
        corpus,
        author_ids,
        args.min_papers,
        args.measures,
        args.exclude_first_years,
        _jobs_count(args.jobs),
    )
    rows = [(a, row) for a, row, _ in results if row is not None]
    skips = [(a, reason) for a, _, reason in results if reason is not None]
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(",".join(SCORE_COLUMNS) + "\n")
        for _, row in rows:
            fh.write(row + "\n")
    _write_skips(out + ".skips.csv", skips)
    if not rows:
        print("no author passed the eligibility filters", file=sys.stderr)
        return EXIT_EMPTY
    print(f"wrote {len(rows)} score rows to {out} ({len(skips)} authors skipped)")
    return EXIT_OK


# ---------------------------------------------------------------- selfcite

def cmd_selfcite(args) -> int:
    papers = _require(args, "papers")
    out = _require(args, "out")
    corpus = load_corpus(papers)
    rows = []
    skips = []
    for author_id in sorted(corpus.by_author):
        try:
            profile = build_author_profile(corpus, author_id, args.min_papers)
        except BelowMinPapersError:
            skips.append((author_id, "below-min-papers"))
            continue
        if profile.first_year in args.exclude_first_years:
            skips.append((author_id, "first-year-excluded"))
            continue
        indicators = compute_indicators(
            profile, realized_per_paper=args.realized_per_paper
        )
        rows.append(indicators.csv_row())
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(",".join(INDICATOR_COLUMNS) + "\n")
        for row in rows:
            fh.write(row + "\n")
    _write_skips(out + ".skips.csv", skips)
    if not rows:
        print("no author passed the eligibility filters", file=sys.stderr)
        return EXIT_EMPTY
    print(f"wrote {len(rows)} indicator rows to {out} ({len(skips)} authors skipped)")
    return EXIT_OK


# ---------------------------------------------------------------- validate

def _read_treatment_ids(path) -> list[str]:
    with open(path, "r", encoding="utf-8") as fh:
        ids = [line.strip() for line in fh if line.strip()]
    seen = dict.fromkeys(ids)
    return list(seen)


def cmd_validate(args) -> int:
    papers = _require(args, "papers")
    embeddings = _require(args, "embeddings")
    treatment_path = _require(args, "treatment")
    out_dir = _require(args, "out")
    corpus = load_corpus(papers, embeddings)
    treatment_ids = _read_treatment_ids(treatment_path)
    if not treatment_ids:
        print("error: treatment list is empty", file=sys.stderr)
        return EXIT_INPUT
    missing = [t for t in treatment_ids if t not in corpus.by_author]
    if missing:
        print(
            f"error: treatment authors not in corpus: {', '.join(missing[:5])}",
            file=sys.stderr,
        )
        return EXIT_INPUT

    profiles = {}
    values = {}
    skips = []
    for author_id in sorted(corpus.by_author):
        try:
            profile = build_author_profile(corpus, author_id, args.min_papers)
            sim = similarity_matrix(profile, corpus)
        except BelowMinPapersError:
            skips.append((author_id, "below-min-papers"))
            continue
        except NotEnoughEmbeddingsError:
            skips.append((author_id, "not-enough-embeddings"))
            continue
        profiles[author_id] = profile
        values[author_id] = _measure_values(profile, sim, args.measures)

    treatment_set = set(treatment_ids)
    treatments = [profiles[t] for t in treatment_ids if t in profiles]
    unscorable = [(t, "not-scorable") for t in treatment_ids if t not in profiles]
    pool = [p for a, p in sorted(profiles.items()) if a not in treatment_set]
    criteria = MatchCriteria(rng_seed=args.seed)
    pairs, unmatched = match_pairs(treatments, pool, criteria)

    os.makedirs(out_dir, exist_ok=True)
    pairs_path = os.path.join(out_dir, "pairs.csv")
    with open(pairs_path, "w", encoding="utf-8") as fh:
        fh.write("treatment_id,control_id\n")
        for pair in pairs:
            fh.write(f"{pair.treatment_id},{pair.control_id}\n")
    with open(os.path.join(out_dir, "unmatched.csv"), "w", encoding="utf-8") as fh:
        fh.write("author_id,reason\n")
        for author_id in unmatched:
            fh.write(f"{author_id},no-eligible-control\n")
        for author_id, reason in unscorable:
            fh.write(f"{author_id},{reason}\n")
    _write_skips(os.path.join(out_dir, "skips.csv"), skips)

    report_path = os.path.join(out_dir, "report.csv")
    report_rows = []
    if pairs:
        for measure in (m for m in MEASURE_ORDER if m in args.measures):
            t_vec = [values[p.treatment_id][measure] for p in pairs]
            c_vec = [values[p.control_id][measure] for p in pairs]
            per_measure = {
                p.treatment_id: values[p.treatment_id][measure] for p in pairs
            }
            per_measure.update(
                {p.control_id: values[p.control_id][measure] for p in pairs}
            )
            try:
                es = cohens_d(t_vec, c_vec)
                r = d_to_r(es.d, es.n_treatment, es.n_control)
                dom = pair_dominance(pairs, per_measure)
                report_rows.append(
                    (
                        measure,
                        str(len(pairs)),
                        _fmt(es.d),
                        _fmt(es.ci_low),
                        _fmt(es.ci_high),
                        _fmt(r),
                        _fmt(dom.fraction),
                    )
                )
            except DegenerateDataError:
                report_rows.append(
                    (measure, str(len(pairs)), "NA", "NA", "NA", "NA", "NA")
                )
    headers = ("measure", "n_pairs", "d", "ci_low", "ci_high", "r", "dominance")
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(",".join(headers) + "\n")
        for row in report_rows:
            fh.write(",".join(row) + "\n")

    print(f"matched {len(pairs)} of {len(treatment_ids)} treatment authors")
    if not pairs:
        print("no matched pairs; report is empty", file=sys.stderr)
        return EXIT_EMPTY
    _print_table(headers, report_rows)
    return EXIT_OK


# ---------------------------------------------------------------- mds

def cmd_mds(args) -> int:
    papers = _require(args, "papers")
    embeddings = _require(args, "embeddings")
    out_dir = _require(args, "out")
    corpus = load_corpus(papers, embeddings)
    if args.pair:
        t_id, _, c_id = args.pair.partition(",")
        t_id, c_id = t_id.strip(), c_id.strip()
        if not t_id or not c_id:
            raise _UsageError("--pair expects TREATMENT_ID,CONTROL_ID")
        t_profile = build_author_profile(corpus, t_id, args.min_papers)
        c_profile = build_author_profile(corpus, c_id, args.min_papers)
        result = pair_layout(t_profile, c_profile, corpus)
        name = f"{t_id}-{c_id}"
    else:
        profile = build_author_profile(corpus, args.author, args.min_papers)
        result = author_layout(profile, corpus)
        name = args.author
    os.makedirs(out_dir, exist_ok=True)
    coords_path = os.path.join(out_dir, name + ".coords.csv")
    plot_path = os.path.join(out_dir, name + ".svg")
    write_coordinates(coords_path, result.layout, result.labels, result.weights)
    emit_plot(result.layout, result.labels, plot_path, result.weights)
    print(f"{name}: {result.layout.stress_note}")
    print(f"wrote {coords_path} and {plot_path}")
    return EXIT_OK


# ---------------------------------------------------------------- synth

def cmd_synth(args) -> int:
    out_dir = _require(args, "out_dir")
    try:
        base = SynthConfig(
            n_papers=max(args.n_topics, 12),
            n_topics=args.n_topics,
            topic_separation=args.topic_separation,
            within_topic_spread=args.within_topic_spread,
            dim=args.dim,
            authors_per_paper=args.authors_per_paper,
            selfcite_p_within=args.selfcite_p_within,
            selfcite_p_cross=args.selfcite_p_cross,
            n_external_refs=args.external_refs,
        )
        cohort = generate_cohort(args.broad, args.narrow, base, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    paths = write_cohort(cohort, out_dir)
    for key in sorted(paths):
        print(f"{key}: {paths[key]}")
    return EXIT_OK


# ---------------------------------------------------------------- correlate

def _read_csv_indexed(path, key: str) -> dict[str, dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        rows = {}
        for row in reader:
            if key not in row or row[key] is None:
                raise BreadthError(f"{path}: missing {key!r} column")
            rows[row[key]] = row
    return rows


def cmd_correlate(args) -> int:
    scores_path = _require(args, "scores")
    indicators_path = _require(args, "indicators")
    out = _require(args, "out")
    scores = _read_csv_indexed(scores_path, "author_id")
    indicators = _read_csv_indexed(indicators_path, "author_id")
    shared = sorted(set(scores) & set(indicators))
    if not shared:
        print("empty join: no author id present in both files", file=sys.stderr)
        return EXIT_EMPTY

    headers = ("indicator", "n", "r", "ci_low", "ci_high", "p")
    report_rows = []
    for name in INDICATOR_NAMES:
        xs, ys = [], []
        for author_id in shared:
            try:
                wfn_text = scores[author_id]["wfn_avg"]
                ind_text = indicators[author_id][name]
            except KeyError as exc:
                raise BreadthError(f"missing column {exc.args[0]!r}") from None
            if wfn_text == "NA" or ind_text == "NA":
                continue
            xs.append(float(wfn_text))
            ys.append(float(ind_text))
        try:
            res = pearson_with_ci(xs, ys)
            report_rows.append(
                (
                    name,
                    str(res.n),
                    _fmt(res.r),
                    _fmt(res.ci_low),
                    _fmt(res.ci_high),
                    res.p_note,
                )
            )
        except DegenerateDataError:
            report_rows.append((name, str(len(xs)), "NA", "NA", "NA", "NA"))
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(",".join(headers) + "\n")
        for row in report_rows:
            fh.write(",".join(row) + "\n")
    _print_table(headers, report_rows)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="breadth",
        description="Breadth measures for researcher publication portfolios.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, *, embeddings=False, out=False, exclude=False, jobs=False):
        p.add_argument("--papers", help="papers JSONL file")
        if embeddings:
            p.add_argument("--embeddings", help="embeddings file (JSONL or packed)")
        if out:
            p.add_argument("--out", help="output path")
        p.add_argument("--min-papers", type=int, help="eligibility threshold (default 10)")
        if exclude:
            p.add_argument(
                "--exclude-first-years",
                type=_parse_years,
                help="skip authors whose first paper year falls in this list/range",
            )
        if jobs:
            p.add_argument("--jobs", type=int, help="worker processes (0 = all cores)")

    p = sub.add_parser("measure", help="compute per-author breadth scores")
    add_common(p, embeddings=True, out=True, exclude=True, jobs=True)
    p.add_argument(
        "--measures",
        type=_parse_measures,
        help="comma list from: mean,fn,wfn,nn,aspl (default all)",
    )
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("selfcite", help="compute self-citation indicators")
    add_common(p, out=True, exclude=True)
    p.add_argument(
        "--realized-per-paper",
        action="store_true",
        help="average per-paper realized rates instead of the aggregate quotient",
    )
    p.set_defaults(func=cmd_selfcite)

    p = sub.add_parser("validate", help="matched-pair effect-size report")
    add_common(p, embeddings=True, out=True)
    p.add_argument("--treatment", help="file with one treatment author id per line")
    p.add_argument("--seed", type=int, help="match selection seed (default 0)")
    p.add_argument(
        "--measures",
        type=_parse_measures,
        help="comma list from: mean,fn,wfn,nn,aspl (default all)",
    )
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("mds", help="2D layout and plot for an author or a pair")
    add_common(p, embeddings=True, out=True)
    who = p.add_mutually_exclusive_group(required=True)
    who.add_argument("--author", help="author id for a single layout")
    who.add_argument("--pair", help="TREATMENT_ID,CONTROL_ID for a joint layout")
    p.set_defaults(func=cmd_mds)

    p = sub.add_parser("synth", help="generate a synthetic cohort")
    p.add_argument("--out-dir", help="directory for the generated files")
    p.add_argument("--broad", type=int, default=100, help="broad (treatment) authors")
    p.add_argument("--narrow", type=int, default=100, help="narrow (control) authors")
    p.add_argument("--seed", type=int, help="generation seed (default 0)")
    p.add_argument("--n-topics", type=int, default=4, help="topics per broad author")
    p.add_argument("--topic-separation", type=float, default=1.5)
    p.add_argument("--within-topic-spread", type=float, default=0.5)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument(
        "--authors-per-paper", type=_parse_author_range, default=(1, 4), metavar="LO,HI"
    )
    p.add_argument("--selfcite-p-within", type=float, default=0.0)
    p.add_argument("--selfcite-p-cross", type=float, default=0.0)
    p.add_argument("--external-refs", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("correlate", help="correlate wfn scores with indicators")
    p.add_argument("--scores", help="scores CSV from the measure subcommand")
    p.add_argument("--indicators", help="indicators CSV from the selfcite subcommand")
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_correlate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_env(args)
    except (argparse.ArgumentTypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BreadthError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
