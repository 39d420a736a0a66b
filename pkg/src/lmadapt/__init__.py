"""Domain adaptation toolkit for n-gram language models and their lexica:
seed-word corpus selection, frequency-interpolation adaptation, and
keyword-aware benchmark scoring."""

from .arpa import ArpaFormatError, export_arpa, import_arpa
from .corpus import (
    DEFAULT_TOKENIZER,
    Document,
    FrequencyTable,
    Lexicon,
    OOVRate,
    TokenizerConfig,
    build_frequency_table,
    build_lexicon,
    iter_corpus,
    iter_documents,
    oov_curve,
    oov_rate,
    tokenize,
)
from .evaluate import (
    AlignmentResult,
    AnnotatedTranscript,
    BenchmarkReport,
    PRFReport,
    TranscriptFormatError,
    align,
    isolate,
    iw_prf,
    minimal_iw_set,
    parse_transcript,
    regenerate,
    score_benchmark,
    strip_non_iw,
    wer,
)
from .lm import (
    BOS,
    EOS,
    UNK,
    AdaptationWeight,
    NGramCounts,
    NGramModel,
    PerplexityResult,
    adapt_model,
    build_adapted_lexicon,
    count_ngrams,
    estimate_model,
    perplexity,
    prune_model,
)
from .pipeline import PipelineConfig, ValidationError, emit_report, load_config, run_pipeline
from .seeds import (
    EmbeddingFormatError,
    EmbeddingTable,
    MorphConfig,
    SeedSet,
    SemanticConfig,
    cosine_similarity,
    expand_morphological,
    expand_semantic,
    extract_seeds,
    load_embeddings,
    nearest_neighbors,
)
from .selection import SelectionReport, extract_context_snippets, select_documents

__version__ = "0.1.0"
