"""Experiment grid execution over the evaluation set, with append-only JSONL
persistence (crash-safe resume), aggregation, and CSV/markdown reports."""

from __future__ import annotations

import csv
import dataclasses
import datetime as _dt
import itertools
import json
import logging
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import yaml

from .client import ModelEndpoint, RemoteEmbedder, provider_for
from .dataset import (
    EvalSequence,
    IclExample,
    load_dataset,
    sample_icl,
    sample_sequences,
)
from .errors import ConfigError, ResultsError
from .hashing import canonical_json, derive_seed, sha256_hex
from .labels import Behavior, normalize_label, render_behavior
from .metrics import (
    MetricReport,
    TrigramEmbedder,
    accuracy_score,
    cosine_similarity,
    edit_distance,
    score_sequence,
)
from .parsing import PARSE_FAILED, ParsedPrediction, parse_prediction
from .prompts import (
    PromptTemplate,
    Representation,
    build_caption_request,
    build_prediction_prompt,
    max_icl_examples,
)

logger = logging.getLogger(__name__)

ICL_MODES = ("per_query", "global")
DEFAULT_ICL_GRID = [0, 1, 5, 10, 15]


@dataclass(frozen=True)
class ExperimentConfig:
    """One grid cell: endpoint x representation x ICL count x autoregression.

    `worker_count` is operational and excluded from the config hash, so
    changing it never invalidates a resumable results file.
    """

    endpoint: str
    representation: Representation
    n_icl: int
    autoregressive: bool
    seed: int
    manifest: str
    stride_s: float = 1.5
    history_s: float = 2.0
    horizon_s: float = 3.0
    icl_mode: str = "per_query"
    embedder: str = "trigram"
    template_hash: str = ""
    temperature: float = 0.0
    caption_endpoint: str = ""  # "" = caption with the prediction endpoint
    worker_count: int = 4

    def __post_init__(self):
        if self.n_icl < 0:
            raise ConfigError("n_icl must be >= 0")
        if self.icl_mode not in ICL_MODES:
            raise ConfigError(f"icl_mode must be one of {ICL_MODES}, got {self.icl_mode!r}")
        if self.worker_count < 1:
            raise ConfigError("worker_count must be >= 1")

    def semantic_dict(self) -> dict[str, Any]:
        return {
            "endpoint": self.endpoint,
            "representation": self.representation.value,
            "n_icl": self.n_icl,
            "autoregressive": self.autoregressive,
            "seed": self.seed,
            "manifest": self.manifest,
            "stride_s": self.stride_s,
            "history_s": self.history_s,
            "horizon_s": self.horizon_s,
            "icl_mode": self.icl_mode,
            "embedder": self.embedder,
            "template_hash": self.template_hash,
            "temperature": self.temperature,
            "caption_endpoint": self.caption_endpoint,
        }

    @property
    def config_hash(self) -> str:
        return sha256_hex(self.semantic_dict())


@dataclass
class RunRecord:
    """One model invocation: request hashes, raw response, parsed prediction,
    per-item metrics, and enough ground truth for an independent re-score."""

    sequence_id: str
    config_hash: str
    endpoint: str
    representation: str
    n_icl: int
    autoregressive: bool
    seed: int
    prompt_hash: str
    template_hash: str
    raw_response: str
    prediction: list[str]
    intermediates: list[list[str]] | None
    parse_status: str
    accuracy: float
    cosine: float
    edit: float
    target: list[str]
    target_changed: bool
    target_multilabel: bool
    caption_text: str | None = None
    latency_ms: float = 0.0
    prompt_tokens: int | None = None
    completion_tokens: int | None = None
    timestamp: str | None = None
    error: str | None = None

    def to_json_line(self) -> str:
        return canonical_json(dataclasses.asdict(self))

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunRecord":
        known = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})

    @property
    def key(self) -> tuple[str, str]:
        return (self.config_hash, self.sequence_id)


@dataclass(frozen=True)
class MetricMeans:
    n: int
    accuracy: float | None
    cosine: float | None
    edit: float | None


@dataclass(frozen=True)
class ConfigAggregate:
    config_hash: str
    endpoint: str
    representation: str
    n_icl: int
    autoregressive: bool
    parse_fail_rate: float
    overall: MetricMeans
    changed: MetricMeans
    multilabel: MetricMeans

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class AggregateReport:
    rows: tuple[ConfigAggregate, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"rows": [row.to_dict() for row in self.rows]}


def build_embedder(descriptor: str, endpoints: Mapping[str, ModelEndpoint] | None = None, **kwargs):
    """"trigram" for the offline embedder, "remote:<endpoint-name>" for HTTPS."""
    if descriptor == "trigram":
        return TrigramEmbedder()
    if descriptor.startswith("remote:"):
        name = descriptor.split(":", 1)[1]
        if not endpoints or name not in endpoints:
            raise ConfigError(f"embedder endpoint {name!r} is not configured")
        return RemoteEmbedder(endpoints[name], **kwargs)
    raise ConfigError(f"unknown embedder descriptor {descriptor!r}")


def load_results(results_path: str | Path) -> list[RunRecord]:
    """Read a JSONL results file, enforcing (config_hash, sequence_id) uniqueness."""
    path = Path(results_path)
    if not path.exists():
        raise ResultsError(f"results file {path} does not exist")
    records: list[RunRecord] = []
    seen: set[tuple[str, str]] = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except ValueError as exc:
                raise ResultsError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(data, dict):
                raise ResultsError(f"{path}:{lineno}: record line is not a JSON object")
            record = RunRecord.from_dict(data)
            if record.key in seen:
                raise ResultsError(
                    f"{path}:{lineno}: duplicate record for {record.key}"
                )
            seen.add(record.key)
            records.append(record)
    return records


def _existing_keys(results_path: Path) -> set[tuple[str, str]]:
    if not results_path.exists():
        return set()
    return {record.key for record in load_results(results_path)}


def _behavior_from_canonical(labels: Iterable[str]) -> Behavior:
    return Behavior(frozenset(normalize_label(s) for s in labels))


def rescore_record(record: RunRecord, embedder) -> MetricReport:
    """Recompute the metrics from the stored raw response and ground truth.

    Used by the audit property: stored metrics must match this exactly.
    """
    parsed = parse_prediction(record.raw_response, record.autoregressive)
    truth = _behavior_from_canonical(record.target)
    pred_text = render_behavior(parsed.final)
    truth_text = render_behavior(truth)
    return MetricReport(
        accuracy=accuracy_score(parsed.final, truth),
        cosine=cosine_similarity(pred_text, truth_text, embedder),
        edit=edit_distance(pred_text, truth_text),
    )


def _utc_now_iso() -> str:
    return _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _failed_record(
    config: ExperimentConfig,
    sequence: EvalSequence,
    template_hash: str,
    embedder,
    error: str,
    deterministic: bool,
) -> RunRecord:
    parsed = ParsedPrediction(Behavior(), None, PARSE_FAILED)
    report = score_sequence(parsed, sequence, embedder)
    return RunRecord(
        sequence_id=sequence.sequence_id,
        config_hash=config.config_hash,
        endpoint=config.endpoint,
        representation=config.representation.value,
        n_icl=config.n_icl,
        autoregressive=config.autoregressive,
        seed=config.seed,
        prompt_hash="",
        template_hash=template_hash,
        raw_response="",
        prediction=[],
        intermediates=None,
        parse_status=PARSE_FAILED,
        accuracy=report.accuracy,
        cosine=report.cosine,
        edit=report.edit,
        target=sequence.target.sorted_canonical(),
        target_changed=sequence.target_changed,
        target_multilabel=sequence.target_multilabel,
        timestamp=None if deterministic else _utc_now_iso(),
        error=error,
    )


def _select_icl(
    config: ExperimentConfig,
    sequence: EvalSequence,
    pool: Sequence[EvalSequence],
    global_examples: list[IclExample] | None,
) -> list[IclExample]:
    if config.n_icl == 0:
        return []
    if config.icl_mode == "global":
        assert global_examples is not None
        return [
            ex for ex in global_examples if ex.source_sequence_id != sequence.sequence_id
        ]
    return sample_icl(
        pool,
        config.n_icl,
        seed=derive_seed(config.seed, sequence.sequence_id),
        exclude_id=sequence.sequence_id,
    )


def _evaluate_sequence(
    config: ExperimentConfig,
    sequence: EvalSequence,
    pool: Sequence[EvalSequence],
    global_examples: list[IclExample] | None,
    provider,
    caption_provider,
    embedder,
    template: PromptTemplate,
    image_limit: int,
) -> RunRecord:
    deterministic = bool(getattr(provider, "deterministic", False))
    try:
        icl = _select_icl(config, sequence, pool, global_examples)
        caption_text = None
        if config.representation is Representation.CAPTION:
            caption_prompt = build_caption_request(sequence)
            caption_text = caption_provider.complete(caption_prompt, sequence).raw_text
        prompt = build_prediction_prompt(
            sequence,
            config.representation,
            icl,
            autoregressive=config.autoregressive,
            caption_text=caption_text,
            template=template,
            image_limit=image_limit,
        )
        result = provider.complete(prompt, sequence)
        parsed = parse_prediction(result.raw_text, config.autoregressive)
        report = score_sequence(parsed, sequence, embedder)
        return RunRecord(
            sequence_id=sequence.sequence_id,
            config_hash=config.config_hash,
            endpoint=config.endpoint,
            representation=config.representation.value,
            n_icl=config.n_icl,
            autoregressive=config.autoregressive,
            seed=config.seed,
            prompt_hash=prompt.prompt_hash,
            template_hash=template.fingerprint,
            raw_response=result.raw_text,
            prediction=parsed.final.sorted_canonical(),
            intermediates=(
                [b.sorted_canonical() for b in parsed.intermediates]
                if parsed.intermediates is not None
                else None
            ),
            parse_status=parsed.parse_status,
            accuracy=report.accuracy,
            cosine=report.cosine,
            edit=report.edit,
            target=sequence.target.sorted_canonical(),
            target_changed=sequence.target_changed,
            target_multilabel=sequence.target_multilabel,
            caption_text=caption_text,
            latency_ms=result.latency_ms,
            prompt_tokens=result.prompt_tokens,
            completion_tokens=result.completion_tokens,
            timestamp=None if deterministic else _utc_now_iso(),
            error=None,
        )
    except Exception as exc:  # per-sequence failure: record and continue
        logger.warning("sequence %s failed: %s", sequence.sequence_id, exc)
        return _failed_record(
            config,
            sequence,
            template.fingerprint,
            embedder,
            f"{type(exc).__name__}: {exc}",
            deterministic,
        )


def _load_sequences(config: ExperimentConfig) -> list[EvalSequence]:
    recordings = load_dataset(config.manifest)
    return [
        seq
        for recording in recordings
        for seq in sample_sequences(
            recording,
            stride_s=config.stride_s,
            history_s=config.history_s,
            horizon_s=config.horizon_s,
            include_intermediates=True,
        )
    ]


def run_experiment(
    config: ExperimentConfig,
    results_path: str | Path,
    *,
    endpoints: Mapping[str, ModelEndpoint] | None = None,
    sequences: Sequence[EvalSequence] | None = None,
    provider=None,
    caption_provider=None,
    embedder=None,
    template: PromptTemplate | None = None,
    max_records: int | None = None,
    progress_every: int = 50,
) -> Path:
    """Evaluate every sequence under one config, appending RunRecords.

    Already-recorded (config_hash, sequence_id) pairs are skipped, so an
    interrupted run resumes exactly. `max_records` caps how many new records
    this invocation may append (useful for cost caps and resume tests).
    """
    template = template or PromptTemplate.default()
    if config.template_hash and config.template_hash != template.fingerprint:
        raise ConfigError("config.template_hash does not match the active template")
    if not config.template_hash:
        config = dataclasses.replace(config, template_hash=template.fingerprint)

    endpoint: ModelEndpoint | None = None
    if endpoints is not None:
        if config.endpoint not in endpoints:
            raise ConfigError(f"endpoint {config.endpoint!r} is not configured")
        endpoint = endpoints[config.endpoint]
    owns_provider = provider is None
    if provider is None:
        if endpoint is None:
            raise ConfigError("run_experiment needs either a provider or endpoints")
        provider = provider_for(endpoint)
    owns_caption_provider = False
    if caption_provider is None:
        if config.caption_endpoint:
            if not endpoints or config.caption_endpoint not in endpoints:
                raise ConfigError(
                    f"caption endpoint {config.caption_endpoint!r} is not configured"
                )
            caption_provider = provider_for(endpoints[config.caption_endpoint])
            owns_caption_provider = True
        else:
            caption_provider = provider
    image_limit = endpoint.max_images_per_request if endpoint else 50

    budget = max_icl_examples(config.representation, image_limit)
    if config.n_icl > budget:
        raise ConfigError(
            f"n_icl={config.n_icl} exceeds the {config.representation.value} budget "
            f"({budget}) under a {image_limit}-image limit"
        )
    if endpoint is not None and not endpoint.supports_interleaving and config.n_icl > 0:
        raise ConfigError(
            f"endpoint {endpoint.name} cannot interleave images with text; "
            "run it with n_icl=0"
        )

    if embedder is None:
        embedder = build_embedder(config.embedder, endpoints)
    if sequences is None:
        sequences = _load_sequences(config)
    if config.n_icl > max(len(sequences) - 1, 0):
        raise ConfigError(
            f"n_icl={config.n_icl} cannot be drawn from a pool of {len(sequences)} "
            "sequences after excluding the query"
        )

    global_examples: list[IclExample] | None = None
    if config.icl_mode == "global" and config.n_icl > 0:
        global_examples = sample_icl(sequences, config.n_icl, seed=config.seed)

    results_path = Path(results_path)
    results_path.parent.mkdir(parents=True, exist_ok=True)
    done = _existing_keys(results_path)
    todo = [s for s in sequences if (config.config_hash, s.sequence_id) not in done]
    if max_records is not None:
        todo = todo[:max_records]
    logger.info(
        "config %s: %d sequences to evaluate (%d already recorded)",
        config.config_hash[:12], len(todo), len(done),
    )
    if not todo:
        return results_path

    write_lock = threading.Lock()
    written = 0
    try:
        with results_path.open("a", encoding="utf-8") as fh:
            with ThreadPoolExecutor(max_workers=config.worker_count) as pool_exec:
                futures = [
                    pool_exec.submit(
                        _evaluate_sequence,
                        config,
                        seq,
                        sequences,
                        global_examples,
                        provider,
                        caption_provider,
                        embedder,
                        template,
                        image_limit,
                    )
                    for seq in todo
                ]
                for future in as_completed(futures):
                    record = future.result()
                    with write_lock:
                        fh.write(record.to_json_line() + "\n")
                        fh.flush()
                        written += 1
                        if progress_every and written % progress_every == 0:
                            logger.info(
                                "config %s: %d/%d records written",
                                config.config_hash[:12], written, len(todo),
                            )
    finally:
        if owns_provider and hasattr(provider, "close"):
            provider.close()
        if owns_caption_provider and hasattr(caption_provider, "close"):
            caption_provider.close()
    return results_path


def _means(records: Sequence[RunRecord]) -> MetricMeans:
    n = len(records)
    if n == 0:
        return MetricMeans(0, None, None, None)
    return MetricMeans(
        n=n,
        accuracy=sum(r.accuracy for r in records) / n,
        cosine=sum(r.cosine for r in records) / n,
        edit=sum(r.edit for r in records) / n,
    )


def aggregate(results: str | Path | Sequence[RunRecord]) -> AggregateReport:
    """Group records per config and compute overall and per-stratum means."""
    if isinstance(results, (str, Path)):
        records = load_results(results)
    else:
        records = list(results)
    if not records:
        raise ResultsError("results are empty; nothing to aggregate")

    groups: dict[str, list[RunRecord]] = {}
    for record in records:
        groups.setdefault(record.config_hash, []).append(record)

    rows = []
    for config_hash, group in groups.items():
        first = group[0]
        failures = sum(1 for r in group if r.parse_status == PARSE_FAILED)
        rows.append(
            ConfigAggregate(
                config_hash=config_hash,
                endpoint=first.endpoint,
                representation=first.representation,
                n_icl=first.n_icl,
                autoregressive=first.autoregressive,
                parse_fail_rate=failures / len(group),
                overall=_means(group),
                changed=_means([r for r in group if r.target_changed]),
                multilabel=_means([r for r in group if r.target_multilabel]),
            )
        )
    order = {rep.value: i for i, rep in enumerate(Representation)}
    rows.sort(key=lambda r: (order.get(r.representation, 99), r.endpoint, r.n_icl, r.autoregressive))
    return AggregateReport(rows=tuple(rows))


REPORT_COLUMNS = [
    "representation",
    "model",
    "n_icl",
    "autoregressive",
    "accuracy",
    "cosine",
    "edit",
    "parse_fail_rate",
    "n",
]


def _report_rows(report: AggregateReport) -> list[dict[str, str]]:
    def fmt(value: float | None) -> str:
        return "" if value is None else f"{value:.3f}"

    rows = []
    for agg in report.rows:
        rows.append(
            {
                "representation": agg.representation,
                "model": agg.endpoint,
                "n_icl": str(agg.n_icl),
                "autoregressive": "true" if agg.autoregressive else "false",
                "accuracy": fmt(agg.overall.accuracy),
                "cosine": fmt(agg.overall.cosine),
                "edit": fmt(agg.overall.edit),
                "parse_fail_rate": fmt(agg.parse_fail_rate),
                "n": str(agg.overall.n),
            }
        )
    return rows


def emit_report(
    report: AggregateReport,
    csv_path: str | Path | None = None,
    markdown_path: str | Path | None = None,
) -> list[dict[str, str]]:
    """Write the per-config table as CSV and/or markdown; values match to 3 decimals."""
    rows = _report_rows(report)
    if csv_path is not None:
        with Path(csv_path).open("w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS)
            writer.writeheader()
            writer.writerows(rows)
    if markdown_path is not None:
        lines = [
            "| " + " | ".join(REPORT_COLUMNS) + " |",
            "| " + " | ".join("---" for _ in REPORT_COLUMNS) + " |",
        ]
        for row in rows:
            lines.append("| " + " | ".join(row[col] for col in REPORT_COLUMNS) + " |")
        Path(markdown_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return rows


@dataclass
class RunSpec:
    """A parsed run-config file: endpoints, the experiment grid, shared settings."""

    manifest: str
    results: str
    endpoints: dict[str, ModelEndpoint]
    grid: list[ExperimentConfig]
    template: PromptTemplate = field(default_factory=PromptTemplate.default)


_ENDPOINT_FIELDS = {f.name for f in dataclasses.fields(ModelEndpoint)}


def _as_list(value: Any) -> list[Any]:
    return value if isinstance(value, list) else [value]


def load_run_config(path: str | Path) -> RunSpec:
    """Parse a YAML/JSON run config and expand its grid into ExperimentConfigs."""
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read run config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("run config must be a mapping")
    for required in ("manifest", "endpoints", "grid"):
        if required not in data:
            raise ConfigError(f"run config is missing {required!r}")

    endpoints: dict[str, ModelEndpoint] = {}
    for entry in data["endpoints"]:
        unknown = set(entry) - _ENDPOINT_FIELDS
        if unknown:
            raise ConfigError(f"unknown endpoint fields: {sorted(unknown)}")
        endpoint = ModelEndpoint(**entry)
        if endpoint.name in endpoints:
            raise ConfigError(f"duplicate endpoint name {endpoint.name!r}")
        endpoints[endpoint.name] = endpoint

    template = (
        PromptTemplate.from_file(data["template"])
        if data.get("template")
        else PromptTemplate.default()
    )
    caption_endpoint = str(data.get("caption_endpoint", "") or "")
    if caption_endpoint and caption_endpoint not in endpoints:
        raise ConfigError(f"caption_endpoint {caption_endpoint!r} is not configured")
    sampling = data.get("sampling", {}) or {}
    shared = {
        "seed": int(data.get("seed", 0)),
        "manifest": str(data["manifest"]),
        "stride_s": float(sampling.get("stride_s", 1.5)),
        "history_s": float(sampling.get("history_s", 2.0)),
        "horizon_s": float(sampling.get("horizon_s", 3.0)),
        "icl_mode": str(data.get("icl_mode", "per_query")),
        "embedder": str(data.get("embedder", "trigram")),
        "worker_count": int(data.get("worker_count", 4)),
        "template_hash": template.fingerprint,
        "caption_endpoint": caption_endpoint,
    }

    grid_spec = data["grid"]
    configs: dict[str, ExperimentConfig] = {}
    for endpoint_name, rep_value, n_icl, autoregressive in itertools.product(
        _as_list(grid_spec.get("endpoint", list(endpoints))),
        _as_list(grid_spec.get("representation", [r.value for r in Representation])),
        _as_list(grid_spec.get("n_icl", DEFAULT_ICL_GRID)),
        _as_list(grid_spec.get("autoregressive", [False])),
    ):
        if endpoint_name not in endpoints:
            raise ConfigError(f"grid endpoint {endpoint_name!r} is not configured")
        endpoint = endpoints[endpoint_name]
        try:
            representation = Representation(str(rep_value).lower())
        except ValueError:
            raise ConfigError(f"unknown representation {rep_value!r}") from None
        n_icl = int(n_icl)
        if not endpoint.supports_interleaving and n_icl > 0:
            logger.warning(
                "endpoint %s cannot interleave images with text; dropping ICL "
                "for this cell (n_icl %d -> 0)", endpoint.name, n_icl,
            )
            n_icl = 0
        budget = max_icl_examples(representation, endpoint.max_images_per_request)
        if n_icl > budget:
            raise ConfigError(
                f"grid cell ({endpoint_name}, {representation.value}, n_icl={n_icl}) "
                f"exceeds the image budget (max n_icl={budget})"
            )
        config = ExperimentConfig(
            endpoint=endpoint_name,
            representation=representation,
            n_icl=n_icl,
            autoregressive=bool(autoregressive),
            temperature=endpoint.temperature,
            **shared,
        )
        configs.setdefault(config.config_hash, config)

    return RunSpec(
        manifest=str(data["manifest"]),
        results=str(data.get("results", "results.jsonl")),
        endpoints=endpoints,
        grid=list(configs.values()),
        template=template,
    )


def run_grid(
    spec: RunSpec,
    results_path: str | Path | None = None,
    max_records: int | None = None,
) -> Path:
    """Run every grid cell into one results file, loading the dataset once.

    Providers are shared per endpoint so the rate limiter spans grid cells.
    """
    results = Path(results_path or spec.results)
    if not spec.grid:
        raise ConfigError("run config expands to an empty grid")
    sequences = _load_sequences(spec.grid[0])
    embedders: dict[str, Any] = {}
    providers: dict[str, Any] = {}
    try:
        for config in spec.grid:
            embedder = embedders.get(config.embedder)
            if embedder is None:
                embedder = build_embedder(config.embedder, spec.endpoints)
                embedders[config.embedder] = embedder

            def shared_provider(name: str):
                if name not in providers:
                    providers[name] = provider_for(spec.endpoints[name])
                return providers[name]

            run_experiment(
                config,
                results,
                endpoints=spec.endpoints,
                sequences=sequences,
                provider=shared_provider(config.endpoint),
                caption_provider=(
                    shared_provider(config.caption_endpoint)
                    if config.caption_endpoint
                    else None
                ),
                embedder=embedder,
                template=spec.template,
                max_records=max_records,
            )
    finally:
        for provider in providers.values():
            if hasattr(provider, "close"):
                provider.close()
        for embedder in embedders.values():
            if hasattr(embedder, "close"):
                embedder.close()
    return results
