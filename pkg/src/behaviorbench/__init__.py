"""behaviorbench: benchmark multimodal chat-completions models on anticipating
human-scene interaction labels from short observation histories."""

from .client import (
    CompletionResult,
    MllmClient,
    MockProvider,
    MockScript,
    ModelEndpoint,
    RemoteEmbedder,
    complete,
    mock_complete,
    provider_for,
)
from .dataset import (
    DatasetStats,
    EvalSequence,
    FrameRecord,
    IclExample,
    Recording,
    SequenceFrame,
    dataset_stats,
    load_dataset,
    sample_icl,
    sample_sequences,
)
from .labels import Behavior, InteractionLabel, normalize_label, render_behavior
from .metrics import (
    MetricReport,
    TrigramEmbedder,
    accuracy_score,
    cosine_similarity,
    edit_distance,
    levenshtein,
    score_sequence,
)
from .parsing import ParsedPrediction, parse_prediction
from .prompts import (
    MessagePart,
    PromptSpec,
    PromptTemplate,
    Representation,
    UNBOUNDED,
    build_caption_request,
    build_prediction_prompt,
    max_icl_examples,
)
from .runner import (
    AggregateReport,
    ExperimentConfig,
    RunRecord,
    RunSpec,
    aggregate,
    build_embedder,
    emit_report,
    load_results,
    load_run_config,
    rescore_record,
    run_experiment,
    run_grid,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateReport",
    "Behavior",
    "CompletionResult",
    "DatasetStats",
    "EvalSequence",
    "ExperimentConfig",
    "FrameRecord",
    "IclExample",
    "InteractionLabel",
    "MessagePart",
    "MetricReport",
    "MllmClient",
    "MockProvider",
    "MockScript",
    "ModelEndpoint",
    "ParsedPrediction",
    "PromptSpec",
    "PromptTemplate",
    "Recording",
    "RemoteEmbedder",
    "Representation",
    "RunRecord",
    "RunSpec",
    "SequenceFrame",
    "TrigramEmbedder",
    "UNBOUNDED",
    "accuracy_score",
    "aggregate",
    "build_caption_request",
    "build_embedder",
    "build_prediction_prompt",
    "complete",
    "cosine_similarity",
    "dataset_stats",
    "edit_distance",
    "emit_report",
    "levenshtein",
    "load_dataset",
    "load_results",
    "load_run_config",
    "max_icl_examples",
    "mock_complete",
    "normalize_label",
    "parse_prediction",
    "provider_for",
    "render_behavior",
    "rescore_record",
    "run_experiment",
    "run_grid",
    "sample_icl",
    "sample_sequences",
    "score_sequence",
]
