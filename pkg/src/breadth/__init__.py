"""Breadth measures for researcher publication portfolios.

Computes how widely a researcher's papers spread in an embedding-derived
knowledge space (similarity-based and graph-distance measures), plus the
self-citation indicators and matched-pair statistics used to validate them,
a classical-MDS layout exporter, and a synthetic ground-truth generator.
"""

from .corpus import (
    AuthorProfile,
    Corpus,
    Embedding,
    LoadReport,
    PaperRecord,
    build_author_profile,
    build_corpus,
    derive_field_code,
    load_corpus,
    load_embeddings,
    load_papers,
    write_embeddings,
    write_papers,
)
from .errors import (
    BelowMinPapersError,
    BreadthError,
    CorpusFormatError,
    DegenerateDataError,
    NoFieldLabelError,
    NoPriorPapersError,
    NoReferencesError,
    NotEnoughEmbeddingsError,
    UnknownAuthorError,
)
from .knowledge_space import (
    DistanceMatrix,
    SimilarityMatrix,
    cosine,
    similarity_among,
    similarity_matrix,
    to_distance,
)
from .measures import (
    SCORE_COLUMNS,
    BreadthScores,
    CreditWeights,
    avg_shortest_path,
    credit_weights,
    furthest_neighbor_avg,
    harmonic_credit,
    mean_pairwise,
    nearest_neighbor_avg,
    score_author,
    shortest_path_matrix,
    weighted_furthest_neighbor_avg,
)
from .mds import (
    Layout2D,
    PairLayout,
    author_layout,
    classical_mds,
    emit_plot,
    pair_layout,
    write_coordinates,
)
from .selfcite import (
    INDICATOR_COLUMNS,
    SelfCiteIndicators,
    SelfCiteNetwork,
    build_network,
    component_indicator,
    compute_indicators,
    realized_self_reference_rate,
    self_reference_rate,
)
from .synth import Cohort, GroundTruth, SynthConfig, generate_author, generate_cohort, write_cohort
from .validation import (
    CorrelationResult,
    DominanceResult,
    EffectSize,
    MatchCriteria,
    MatchedPair,
    cohens_d,
    d_to_r,
    eligible_control,
    find_match,
    match_pairs,
    pair_dominance,
    pair_dominance_fraction,
    pearson_with_ci,
)

__version__ = "0.1.0"
