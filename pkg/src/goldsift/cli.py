"""Command-line entry point.

Subcommands: ``filter``, ``aggregate``, ``train``, ``curve``, ``report``,
``serve``, ``run-all``. Flags mirror the experiment config fields; a
``key = value`` config file can supply any of them, with flags taking
precedence. Exit codes: 0 success, 1 input error, 2 internal error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import __version__, reports
from .annotation import (
    MODEL_NAMES,
    VARIANTS,
    BinaryClass,
    DatasetVariant,
    GoldStandard,
    aggregate,
    build_variant,
    cohen_kappa,
    load_annotations,
    write_gold_labels,
)
from .corpus import Message, default_ruleset, filter_match, load_corpus, load_ruleset, sample_matched, write_corpus
from .errors import InputError
from .evaluation import (
    DEFAULT_CURVE_SIZES,
    DEFAULT_GRID,
    CrossValidationResult,
    cross_validate,
    grid_search_class_weights,
    learning_curve,
    stratified_kfold,
)
from .rng import derive_seed
from .svm import TrainConfig, save_model, top_features, train
from .textprep import (
    build_vocabulary,
    default_lexicon,
    lemmatize,
    load_lexicon,
    tokenize,
    vectorize,
    write_vocabulary,
)

TOP_FEATURE_COUNT = 20


@dataclass(frozen=True)
class ExperimentConfig:
    corpus_path: Path
    annotations_path: Path
    output_dir: Path
    ruleset_path: Path | None = None
    lexicon_path: Path | None = None
    vocab_size: int = 10_000
    k: int = 10
    seed: int = 0
    grid: tuple[tuple[float, float], ...] = DEFAULT_GRID
    variants: tuple[str, ...] = VARIANTS
    curve_sizes: tuple[float, ...] = DEFAULT_CURVE_SIZES
    reg_c: float = 1.0
    workers: int = 1
    allow_pending: bool = False

    def __post_init__(self) -> None:
        if self.vocab_size < 1:
            raise InputError("vocab_size must be at least 1")
        if self.k < 2:
            raise InputError("k must be at least 2")
        unknown = [v for v in self.variants if v not in VARIANTS]
        if unknown:
            raise InputError(f"unknown variants {unknown}; expected subset of {list(VARIANTS)}")


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def config_hash(config: ExperimentConfig) -> str:
    """Hash of the experiment identity: parameter values plus input contents.

    The output directory and the location of input files are deliberately
    excluded; two runs of the same experiment hash identically wherever
    they read from or write to.
    """
    payload = {
        "vocab_size": config.vocab_size,
        "k": config.k,
        "seed": config.seed,
        "grid": [list(pair) for pair in config.grid],
        "variants": list(config.variants),
        "curve_sizes": list(config.curve_sizes),
        "reg_c": config.reg_c,
        "corpus_sha256": _sha256_file(config.corpus_path),
        "annotations_sha256": _sha256_file(config.annotations_path),
        "ruleset_sha256": None
        if config.ruleset_path is None
        else _sha256_file(config.ruleset_path),
        "lexicon_sha256": None
        if config.lexicon_path is None
        else _sha256_file(config.lexicon_path),
    }
    blob = json.dumps(payload, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def _prepare_docs(messages: list[Message], lexicon: dict[str, str]) -> dict[str, list[str]]:
    return {m.id: lemmatize(tokenize(m.anon_text), lexicon) for m in messages}


@dataclass
class VariantOutcome:
    name: str
    status: str
    reason: str | None = None
    size: int = 0
    positives: int = 0
    best_weights: tuple[float, float] | None = None
    grid_table: list[dict] = field(default_factory=list)
    fold_plan_digest: str | None = None
    cv: CrossValidationResult | None = None
    curve: list = field(default_factory=list)
    model: object = None
    vocab: object = None


def _run_variant(
    name: str,
    gold: GoldStandard,
    docs: dict[str, list[str]],
    config: ExperimentConfig,
) -> tuple[DatasetVariant, VariantOutcome]:
    variant = build_variant(name, gold)
    items = variant.binary_items()
    outcome = VariantOutcome(
        name=name,
        status="ok",
        size=variant.size,
        positives=sum(1 for _, c in items if c is BinaryClass.POSITIVE),
    )
    variant_seed = derive_seed(config.seed, "variant", name)
    base = TrainConfig(reg_c=config.reg_c, seed=derive_seed(variant_seed, "solver"))
    try:
        search = grid_search_class_weights(
            items, docs, config.grid, config.k, variant_seed,
            config=base, vocab_size=config.vocab_size,
        )
        outcome.best_weights = search.best
        outcome.grid_table = [
            {
                "class_weight_pos": p.class_weight_pos,
                "class_weight_neg": p.class_weight_neg,
                "mean_roc_auc": p.mean_roc_auc,
                "valid_folds": p.valid_folds,
            }
            for p in search.table
        ]
        best_config = replace(
            base, class_weight_pos=search.best[0], class_weight_neg=search.best[1]
        )
        plan = stratified_kfold(items, config.k, derive_seed(variant_seed, "folds"))
        outcome.fold_plan_digest = plan.digest()
        outcome.cv = cross_validate(variant, docs, plan, best_config, config.vocab_size)
        outcome.curve = learning_curve(
            items, docs, config.curve_sizes, config.k, variant_seed,
            config=best_config, vocab_size=config.vocab_size,
        )
        ids = sorted(i for i, _ in items)
        labels = dict(items)
        outcome.vocab = build_vocabulary([docs[i] for i in ids], config.vocab_size)
        outcome.model = train(
            [(vectorize(docs[i], outcome.vocab), labels[i]) for i in ids], best_config
        )
    except InputError as exc:
        outcome.status = "skipped"
        outcome.reason = str(exc)
    return variant, outcome


def run_experiment(config: ExperimentConfig) -> dict:
    """Run the whole pipeline and write all reports; returns the manifest."""
    for path in (config.corpus_path, config.annotations_path):
        if not path.exists():
            raise InputError(f"input file not found: {path}")
    messages = load_corpus(config.corpus_path)
    annotations = load_annotations(config.annotations_path)
    _check_items_known(messages, annotations)
    lexicon = (
        default_lexicon() if config.lexicon_path is None else load_lexicon(config.lexicon_path)
    )
    gold = aggregate(annotations)
    if gold.pending and not config.allow_pending:
        raise InputError(
            f"{len(gold.pending)} queue items lack expert labels (first: "
            f"{list(gold.pending[:3])}); adjudicate them or pass --allow-pending"
        )
    docs = _prepare_docs(messages, lexicon)

    requested = tuple(name for name in VARIANTS if name in config.variants)
    out_dir = config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    def job(name: str) -> tuple[DatasetVariant, VariantOutcome]:
        return _run_variant(name, gold, docs, config)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = dict(zip(requested, pool.map(job, requested)))
    else:
        results = {name: job(name) for name in requested}

    summary_rows = []
    manifest_variants: dict[str, dict] = {}
    for name in requested:  # canonical order regardless of worker scheduling
        variant, outcome = results[name]
        model_name = MODEL_NAMES[name]
        summary_rows.append((name, model_name, variant))
        variant_dir = out_dir / name
        variant_dir.mkdir(exist_ok=True)
        write_gold_labels([gl for _, gl in variant.items], variant_dir / "gold_labels.csv")
        if outcome.status == "ok":
            reports.write_metrics_csv(variant_dir / "metrics.csv", model_name, outcome.cv)
            reports.write_learning_curve_csv(
                variant_dir / "learning_curve.csv", model_name, outcome.curve
            )
            k_top = min(TOP_FEATURE_COUNT, outcome.model.dimension)
            positive, negative = top_features(outcome.model, outcome.vocab, k_top)
            reports.write_top_features_csv(
                variant_dir / "top_features.csv", positive, negative
            )
        manifest_variants[name] = {
            "model": model_name,
            "status": outcome.status,
            "reason": outcome.reason,
            "size": outcome.size,
            "positives": outcome.positives,
            "best_class_weights": None
            if outcome.best_weights is None
            else list(outcome.best_weights),
            "grid": outcome.grid_table,
            "fold_plan_sha256": outcome.fold_plan_digest,
            "cv_mean": None if outcome.cv is None else outcome.cv.mean,
            "cv_std": None if outcome.cv is None else outcome.cv.std,
        }

    reports.write_variant_summary_csv(out_dir / "variant_summary.csv", summary_rows)
    manifest = {
        "package_version": __version__,
        "config_hash": config_hash(config),
        "seed": config.seed,
        "k": config.k,
        "vocab_size": config.vocab_size,
        "reg_c": config.reg_c,
        "grid": [list(pair) for pair in config.grid],
        "curve_sizes": list(config.curve_sizes),
        "requested_variants": list(requested),
        "corpus_items": len(messages),
        "annotated_items": len(gold.item_ids),
        "unanimous_items": len(gold.unanimous),
        "round2_queue": len(gold.round2_queue),
        "dropped_items": list(gold.dropped),
        "pending_items": list(gold.pending),
        "percent_unanimous": gold.percent_unanimous,
        "variants": manifest_variants,
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest


# -- argument plumbing ---------------------------------------------------


def _parse_grid(text: str) -> tuple[tuple[float, float], ...]:
    pairs = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) != 2:
            raise InputError(f"grid entry {chunk!r} is not of the form POS:NEG")
        try:
            pairs.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise InputError(f"grid entry {chunk!r}: {exc}") from exc
    if not pairs:
        raise InputError("grid is empty")
    return tuple(pairs)


def load_config_file(path: Path) -> dict[str, str]:
    """Parse a ``key = value`` config file (``#`` comments allowed)."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


_CONFIG_KEYS = {
    "corpus": "corpus_path",
    "annotations": "annotations_path",
    "rules": "ruleset_path",
    "lexicon": "lexicon_path",
    "output_dir": "output_dir",
    "vocab_size": "vocab_size",
    "k": "k",
    "seed": "seed",
    "grid": "grid",
    "variants": "variants",
    "curve_sizes": "curve_sizes",
    "reg_c": "reg_c",
    "workers": "workers",
    "allow_pending": "allow_pending",
}


def build_experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    values: dict[str, object] = {}
    if getattr(args, "config", None):
        raw = load_config_file(Path(args.config))
        unknown = sorted(set(raw) - set(_CONFIG_KEYS))
        if unknown:
            raise InputError(f"unknown config keys: {unknown}")
        values.update({_CONFIG_KEYS[k]: v for k, v in raw.items()})

    def override(field_name: str, flag_value):
        if flag_value is not None:
            values[field_name] = flag_value

    override("corpus_path", args.corpus)
    override("annotations_path", args.annotations)
    override("ruleset_path", getattr(args, "rules", None))
    override("lexicon_path", getattr(args, "lexicon", None))
    override("output_dir", args.out_dir)
    override("vocab_size", getattr(args, "vocab_size", None))
    override("k", getattr(args, "k", None))
    override("seed", getattr(args, "seed", None))
    override("grid", getattr(args, "grid", None))
    override("variants", getattr(args, "variants", None))
    override("reg_c", getattr(args, "reg_c", None))
    override("workers", getattr(args, "workers", None))
    if getattr(args, "allow_pending", False):
        values["allow_pending"] = True

    for required in ("corpus_path", "annotations_path", "output_dir"):
        if required not in values:
            raise InputError(f"missing required setting {required!r} (flag or config file)")

    def as_tuple_of_str(v):
        return tuple(s.strip() for s in v.split(",")) if isinstance(v, str) else tuple(v)

    def as_bool(v) -> bool:
        if isinstance(v, bool):
            return v
        text = str(v).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise InputError(f"expected a boolean, got {v!r}")

    return ExperimentConfig(
        corpus_path=Path(values["corpus_path"]),
        annotations_path=Path(values["annotations_path"]),
        output_dir=Path(values["output_dir"]),
        ruleset_path=Path(values["ruleset_path"]) if values.get("ruleset_path") else None,
        lexicon_path=Path(values["lexicon_path"]) if values.get("lexicon_path") else None,
        vocab_size=int(values.get("vocab_size", 10_000)),
        k=int(values.get("k", 10)),
        seed=int(values.get("seed", 0)),
        grid=_parse_grid(values["grid"]) if isinstance(values.get("grid"), str) else values.get("grid", DEFAULT_GRID),
        variants=as_tuple_of_str(values.get("variants", VARIANTS)),
        curve_sizes=tuple(float(x) for x in str(values["curve_sizes"]).split(","))
        if "curve_sizes" in values and isinstance(values["curve_sizes"], str)
        else DEFAULT_CURVE_SIZES,
        reg_c=float(values.get("reg_c", 1.0)),
        workers=int(values.get("workers", 1)),
        allow_pending=as_bool(values.get("allow_pending", False)),
    )


def _load_ruleset_arg(rules: str | None):
    return load_ruleset(Path(rules)) if rules else default_ruleset()


def _check_items_known(messages: list[Message], annotations) -> None:
    known = {m.id for m in messages}
    for ann in annotations:
        if ann.item_id not in known:
            raise InputError(f"annotation references unknown item {ann.item_id!r}")


def _prepare_variant_inputs(args: argparse.Namespace):
    messages = load_corpus(Path(args.corpus))
    annotations = load_annotations(Path(args.annotations))
    _check_items_known(messages, annotations)
    lexicon = load_lexicon(Path(args.lexicon)) if getattr(args, "lexicon", None) else default_lexicon()
    gold = aggregate(annotations)
    variant = build_variant(args.variant, gold)
    docs = _prepare_docs(messages, lexicon)
    return variant, docs


# -- subcommand handlers ---------------------------------------------------


def cmd_filter(args: argparse.Namespace) -> int:
    messages = load_corpus(Path(args.corpus))
    ruleset = _load_ruleset_arg(args.rules)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    matched_count = 0
    with (out_dir / "filter_matches.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "matched", "rule_ids"])
        for msg in messages:
            result = filter_match(ruleset, msg)
            matched_count += result.matched
            writer.writerow([msg.id, int(result.matched), ";".join(result.rule_ids)])
    print(f"{matched_count}/{len(messages)} messages matched")
    if args.sample is not None:
        picked = sample_matched(messages, ruleset, args.sample, args.seed or 0)
        write_corpus(picked, out_dir / "sampled_corpus.jsonl")
        print(f"sampled {len(picked)} matched messages")
    return 0


def cmd_aggregate(args: argparse.Namespace) -> int:
    messages = load_corpus(Path(args.corpus))
    annotations = load_annotations(Path(args.annotations))
    _check_items_known(messages, annotations)
    gold = aggregate(annotations)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for name in VARIANTS:
        variant = build_variant(name, gold)
        rows.append((name, MODEL_NAMES[name], variant))
        variant_dir = out_dir / name
        variant_dir.mkdir(exist_ok=True)
        write_gold_labels([gl for _, gl in variant.items], variant_dir / "gold_labels.csv")
    reports.write_variant_summary_csv(out_dir / "variant_summary.csv", rows)
    audit = {
        "items": len(gold.item_ids),
        "unanimous": len(gold.unanimous),
        "round2_queue": len(gold.round2_queue),
        "majority_ties": list(gold.majority_ties),
        "dropped": list(gold.dropped),
        "pending": list(gold.pending),
        "percent_unanimous": gold.percent_unanimous,
        "expert_kappa": cohen_kappa(
            {i: p[0] for i, p in gold.expert_pairs.items()},
            {i: p[1] for i, p in gold.expert_pairs.items()},
        ).kappa
        if len(gold.expert_pairs) >= 2
        else None,
    }
    (out_dir / "aggregate_audit.json").write_text(
        json.dumps(audit, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(
        f"aggregated {len(gold.item_ids)} items: {len(gold.unanimous)} unanimous, "
        f"{len(gold.round2_queue)} queued, {len(gold.dropped)} dropped, "
        f"{len(gold.pending)} pending"
    )
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    variant, docs = _prepare_variant_inputs(args)
    labels = dict(variant.binary_items())
    ids = sorted(labels)
    vocab = build_vocabulary([docs[i] for i in ids], args.vocab_size)
    config = TrainConfig(
        reg_c=args.reg_c,
        class_weight_pos=args.c_pos,
        class_weight_neg=args.c_neg,
        seed=args.seed or 0,
    )
    model = train([(vectorize(docs[i], vocab), labels[i]) for i in ids], config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_model(model, out_dir / "model.json")
    write_vocabulary(vocab, out_dir / "vocabulary.csv")
    k_top = min(TOP_FEATURE_COUNT, model.dimension)
    positive, negative = top_features(model, vocab, k_top)
    reports.write_top_features_csv(out_dir / "top_features.csv", positive, negative)
    print(
        f"trained {MODEL_NAMES[args.variant]} on {len(ids)} items "
        f"(objective {model.objective_value:.6g})"
    )
    return 0


def cmd_curve(args: argparse.Namespace) -> int:
    variant, docs = _prepare_variant_inputs(args)
    items = variant.binary_items()
    config = TrainConfig(
        reg_c=args.reg_c,
        class_weight_pos=args.c_pos,
        class_weight_neg=args.c_neg,
        seed=derive_seed(args.seed or 0, "solver"),
    )
    points = learning_curve(
        items, docs, args.sizes, args.k, args.seed or 0,
        config=config, vocab_size=args.vocab_size,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model_name = MODEL_NAMES[args.variant]
    reports.write_learning_curve_csv(out_dir / "learning_curve.csv", model_name, points)
    if args.svg:
        reports.render_learning_curve_svg(out_dir / "learning_curve.svg", model_name, points)
    print(f"learning curve: {len(points)} points written")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    variant, docs = _prepare_variant_inputs(args)
    items = variant.binary_items()
    seed = args.seed or 0
    base = TrainConfig(reg_c=args.reg_c, seed=derive_seed(seed, "solver"))
    search = grid_search_class_weights(
        items, docs, args.grid or DEFAULT_GRID, args.k, seed,
        config=base, vocab_size=args.vocab_size,
    )
    best_config = replace(base, class_weight_pos=search.best[0], class_weight_neg=search.best[1])
    plan = stratified_kfold(items, args.k, derive_seed(seed, "folds"))
    cv = cross_validate(variant, docs, plan, best_config, args.vocab_size)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model_name = MODEL_NAMES[args.variant]
    reports.write_metrics_csv(out_dir / "metrics.csv", model_name, cv)
    (out_dir / "metrics.json").write_text(
        json.dumps(
            {"model": model_name, "mean": cv.mean, "std": cv.std},
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    (out_dir / "grid_search.json").write_text(
        json.dumps(
            {
                "best_class_weights": list(search.best),
                "table": [
                    {
                        "class_weight_pos": p.class_weight_pos,
                        "class_weight_neg": p.class_weight_neg,
                        "mean_roc_auc": p.mean_roc_auc,
                        "valid_folds": p.valid_folds,
                    }
                    for p in search.table
                ],
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    auc = cv.mean["roc_auc"]
    print(
        f"{model_name}: best class weights {search.best}, "
        f"mean roc auc {'NA' if auc is None else f'{auc:.4f}'}"
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve  # deferred: uvicorn/fastapi import cost

    experts = tuple(s.strip() for s in args.experts.split(","))
    if len(experts) != 2:
        raise InputError("exactly two experts required, e.g. --experts expert1,expert2")
    serve(
        corpus_path=Path(args.corpus),
        annotations_path=Path(args.annotations),
        state_dir=Path(args.state_dir),
        host=args.host,
        port=args.port,
        experts=experts,  # type: ignore[arg-type]
        ui_dir=Path(args.ui_dir) if args.ui_dir else None,
        order_seed=args.shuffle_seed,
    )
    return 0


def cmd_run_all(args: argparse.Namespace) -> int:
    config = build_experiment_config(args)
    manifest = run_experiment(config)
    ok = sum(1 for v in manifest["variants"].values() if v["status"] == "ok")
    skipped = len(manifest["variants"]) - ok
    print(
        f"run complete: {ok} variants trained, {skipped} skipped; "
        f"outputs in {config.output_dir}"
    )
    return 0


# -- parser ----------------------------------------------------------------


def _add_io_flags(parser: argparse.ArgumentParser, annotations: bool = True) -> None:
    parser.add_argument("--corpus", required=True, help="corpus JSONL file")
    if annotations:
        parser.add_argument("--annotations", required=True, help="annotations JSONL file")
    parser.add_argument("--out-dir", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=None)


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--variant", required=True, choices=VARIANTS)
    parser.add_argument("--lexicon", default=None, help="lemma lexicon TSV (default: bundled)")
    parser.add_argument("--vocab-size", type=int, default=10_000)
    parser.add_argument("--reg-c", type=float, default=1.0)
    parser.add_argument("--c-pos", type=float, default=1.0, help="positive class weight")
    parser.add_argument("--c-neg", type=float, default=1.0, help="negative class weight")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="goldsift",
        description="Gold-label construction and classifier pipeline for short texts.",
    )
    parser.add_argument("--version", action="version", version=f"goldsift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filter", help="run the candidate filter over a corpus")
    _add_io_flags(p, annotations=False)
    p.add_argument("--rules", default=None, help="rule file (default: bundled)")
    p.add_argument("--sample", type=int, default=None, help="sample N matched messages")
    p.set_defaults(handler=cmd_filter)

    p = sub.add_parser("aggregate", help="build gold labels and the variant summary")
    _add_io_flags(p)
    p.set_defaults(handler=cmd_aggregate)

    p = sub.add_parser("train", help="train one model on one variant")
    _add_io_flags(p)
    _add_model_flags(p)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("curve", help="learning curve for one variant")
    _add_io_flags(p)
    _add_model_flags(p)
    p.add_argument("--k", type=int, default=10)
    p.add_argument(
        "--sizes",
        type=lambda s: tuple(float(x) for x in s.split(",")),
        default=DEFAULT_CURVE_SIZES,
        help="comma-separated training fractions",
    )
    p.add_argument("--svg", action="store_true", help="also render an SVG plot")
    p.set_defaults(handler=cmd_curve)

    p = sub.add_parser("report", help="grid search + cross-validated metrics for one variant")
    _add_io_flags(p)
    _add_model_flags(p)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--grid", type=_parse_grid, default=None, help="e.g. 1:1,2:1,4:1")
    p.set_defaults(handler=cmd_report)

    p = sub.add_parser("serve", help="run the expert adjudication service")
    p.add_argument("--corpus", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--state-dir", required=True, help="event log directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--experts", default="expert1,expert2")
    p.add_argument("--ui-dir", default=None, help="static UI bundle to serve at /")
    p.add_argument(
        "--shuffle-seed", type=int, default=None,
        help="serve items in a seeded random order instead of id order",
    )
    p.set_defaults(handler=cmd_serve)

    p = sub.add_parser("run-all", help="full pipeline: aggregate, grid search, CV, curves")
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--corpus", default=None)
    p.add_argument("--annotations", default=None)
    p.add_argument("--rules", default=None)
    p.add_argument("--lexicon", default=None)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--vocab-size", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--grid", type=_parse_grid, default=None)
    p.add_argument("--variants", default=None, help="comma-separated subset of variants")
    p.add_argument("--reg-c", type=float, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--allow-pending", action="store_true")
    p.set_defaults(handler=cmd_run_all)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; those count as input errors here
        code = exc.code if isinstance(exc.code, int) else 0
        return 1 if code == 2 else code
    try:
        return args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
