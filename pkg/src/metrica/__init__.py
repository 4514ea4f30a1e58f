"""Rule-based scansion, rhyme and stanza analysis for verse, with corpus and evaluation tools."""

from .corpus import (
    CorpusRecord,
    CorpusStats,
    corpus_stats,
    dedup_corpus,
    normalize_verse,
    split_dataset,
)
from .errors import InputError, MetricaError
from .evaluation import (
    LabeledPattern,
    PredictionRecord,
    RocCurve,
    classification_report,
    mlm_accuracy,
    pattern_accuracy,
    pseudo_perplexity,
    roc_auc_one_vs_rest,
)
from .phonology import LANGUAGES, WordPhonology, stress_position, syllabify_word
from .rhyme import RhymeEnding, RhymeScheme, detect_rhyme_scheme, rhyme_ending, rhyme_match
from .scansion import (
    MetricalPattern,
    ScannedVerse,
    enumerate_scansions,
    metrical_length_rule,
    phonological_syllables,
    scan_verse,
)
from .stanza import (
    StanzaAnalysis,
    StanzaTypeRule,
    analyze_stanza,
    classify_stanza,
    default_catalog,
    load_catalog,
    synthesize_stanza,
)

__version__ = "0.1.0"
