"""Command-line interface.

Subcommands:

    dataset validate   check a manifest, reporting every violation
    dataset stats      dataset composition counts
    eval seg           localization metrics vs ground-truth masks
    eval text          explanation metrics (ROUGE-L, embedding CSS)
    eval detect        detection accuracy per generator group
    refine regen       iterative regeneration with feedback memory
    refine inpaint     iterative region-wise inpainting
    robustness         analyzer quality across the degradation grid
    curate cluster     feature clustering of manifest images
    curate sample      per-cluster uniform sampling
    curate filter      judge filtering with the packaged prompt
    backends ping      reachability + conformance probes

Every subcommand accepts ``--config conf.json`` (JSON defaults; flags
override) and most accept ``--backends``, ``--out``, and ``--seed``.
Reports embed a config echo sufficient to reproduce the run with mocks.

Exit codes: 0 success; 1 validation failure; 2 backend, transport, or
configuration failure; 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from forgeline import __version__
from forgeline.annotations.images import load_manifest_images
from forgeline.annotations.manifest import (
    load_manifest,
    save_manifest,
    validate_manifest_file,
)
from forgeline.annotations.raster import rasterize_regions
from forgeline.annotations.stats import dataset_stats
from forgeline.annotations.types import BinaryMask, DatasetManifest
from forgeline.backends.conformance import probe_suite
from forgeline.backends.suite import BackendSuite, load_backends
from forgeline.curation.cluster import kmeans_cluster
from forgeline.curation.features import extract_features
from forgeline.curation.judge import judge_filter
from forgeline.curation.sample import stratified_sample
from forgeline.errors import (
    CodecError,
    ConfigError,
    ForgelineError,
    ManifestIOError,
    ProtocolError,
    TransportError,
    ValidationError,
)
from forgeline.metrics.detection import DetectionRecord, detection_accuracy, growth_rate
from forgeline.metrics.segmentation import aggregate_scores, segmentation_scores
from forgeline.metrics.text import cosine_sim, css_from_cosine, rouge_l
from forgeline.perturb.robustness import parse_grid, run_robustness
from forgeline.refine.runlog import run_and_log_inpainting, run_and_log_regeneration

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_BACKEND = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """argparse that exits with the usage code instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_json(path: str | Path, what: str) -> dict | list:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ManifestIOError(f"cannot read {what} {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what} {path!r} is not valid JSON: {exc}") from exc


def _read_jsonl(path: str | Path, what: str) -> list[dict]:
    rows = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValidationError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
                if not isinstance(row, dict):
                    raise ValidationError(f"{path}:{lineno}: expected a JSON object")
                rows.append(row)
    except OSError as exc:
        raise ManifestIOError(f"cannot read {what} {path!r}: {exc}") from exc
    return rows


class _Run:
    """Resolved parameters for one invocation: defaults < config < flags."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config: dict = {}
        config_path = getattr(args, "config", None)
        if config_path:
            loaded = _read_json(config_path, "config file")
            if not isinstance(loaded, dict):
                raise ValidationError(f"config file {config_path!r} must hold a JSON object")
            self.config = loaded

    def param(self, name: str, default=None):
        flag = getattr(self.args, name, None)
        if flag is not None:
            return flag
        return self.config.get(name, default)

    def echo(self, command: str, params: dict, suite: BackendSuite | None = None) -> dict:
        block = {
            "schema_version": 1,
            "command": command,
            "package_version": __version__,
            "params": params,
        }
        if suite is not None:
            block["backends"] = suite.describe()
        return block


def _emit(payload: dict, out_dir: str | None, filename: str) -> None:
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        target = path / filename
        with open(target, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        print(f"report written to {target}")


def _load_manifest_checked(path: str) -> DatasetManifest:
    if not path:
        raise ValidationError("--manifest is required")
    return load_manifest(path)


def _suite_for(run: _Run, manifest: DatasetManifest | None = None) -> BackendSuite:
    return load_backends(run.param("backends"), manifest=manifest)


# ---------------------------------------------------------------- dataset


def cmd_dataset_validate(args) -> int:
    run = _Run(args)
    report = validate_manifest_file(args.manifest)
    payload = {
        "config": run.echo("dataset validate", {"manifest": args.manifest}),
        "ok": report.ok,
        "violations": [v.to_dict() for v in report.violations],
    }
    _emit(payload, run.param("out"), "validation_report.json")
    if report.ok:
        print(f"{args.manifest}: OK")
        return EXIT_OK
    print(f"{args.manifest}: {len(report.violations)} violation(s)")
    for violation in report.violations:
        print(f"  {violation.entry_id}/{violation.field_path}: {violation.message}")
    return EXIT_VALIDATION


def cmd_dataset_stats(args) -> int:
    run = _Run(args)
    manifest = _load_manifest_checked(args.manifest)
    stats = dataset_stats(manifest)
    payload = {
        "config": run.echo("dataset stats", {"manifest": args.manifest}),
        "stats": stats.to_dict(),
    }
    _emit(payload, run.param("out"), "dataset_stats.json")
    print(f"images: {stats.total_images} "
          f"(by label: {stats.images_by_label}; by content: {stats.images_by_content_type})")
    print(f"artifact regions: {stats.total_regions} (by type: {stats.regions_by_artifact_type})")
    return EXIT_OK


# ------------------------------------------------------------------- eval


def _pred_masks_from_file(path: str, manifest: DatasetManifest) -> dict[str, BinaryMask]:
    by_id = manifest.by_id()
    masks: dict[str, BinaryMask] = {}
    for row in _read_jsonl(path, "predictions file"):
        try:
            image_id = row["id"]
            mask = BinaryMask.from_rle(row["mask"])
        except KeyError as exc:
            raise ValidationError(f"prediction row missing key: {exc}") from exc
        except CodecError as exc:
            raise ValidationError(f"prediction for {row.get('id')!r}: {exc}") from exc
        if image_id not in by_id:
            raise ValidationError(f"prediction for unknown id {image_id!r}")
        masks[image_id] = mask
    if not masks:
        raise ValidationError(f"predictions file {path!r} holds no rows")
    return masks


def cmd_eval_seg(args) -> int:
    run = _Run(args)
    manifest = _load_manifest_checked(args.manifest)
    images = load_manifest_images(manifest, Path(args.manifest).parent)
    entries = [e for e in manifest.entries if e.label == "fake" and e.regions]
    if not entries:
        raise ValidationError("manifest holds no fake entries with regions to score")

    pred_path = run.param("pred")
    suite = None
    if pred_path:
        predictions = _pred_masks_from_file(pred_path, manifest)
    else:
        suite = _suite_for(run, manifest)
        suite.require("analyzer")
        predictions = {}
        for entry in entries:
            image = images[entry.id]
            report = suite.analyzer.analyze(image, image_id=entry.id)
            union = np.zeros(image.shape[:2], dtype=bool)
            for region in report.regions:
                union |= region.mask.bits.astype(bool)
            predictions[entry.id] = BinaryMask(union.astype(np.uint8))

    per_image = {}
    counts = {}
    for entry in entries:
        image = images[entry.id]
        height, width = image.shape[:2]
        gt = rasterize_regions(entry.regions, width, height)
        if entry.id not in predictions:
            raise ValidationError(f"no prediction supplied for entry {entry.id!r}")
        pred = predictions[entry.id]
        if (pred.height, pred.width) != (height, width):
            raise ValidationError(
                f"prediction for {entry.id!r} is {pred.width}x{pred.height}, "
                f"image is {width}x{height}"
            )
        score = segmentation_scores(pred, gt)
        per_image[entry.id] = score
        from forgeline.kernels import confusion_counts

        counts[entry.id] = confusion_counts(pred.bits, gt.bits)

    aggregates = aggregate_scores(per_image, counts)
    payload = {
        "config": run.echo(
            "eval seg",
            {"manifest": args.manifest, "pred": pred_path, "n": len(entries)},
            suite,
        ),
        "per_image": {k: {m: 100.0 * v for m, v in s.to_dict().items()}
                      for k, s in per_image.items()},
        "macro": {m: 100.0 * v for m, v in aggregates["macro"].items()},
        "micro": {m: 100.0 * v for m, v in aggregates["micro"].items()},
        "n": len(entries),
    }
    _emit(payload, run.param("out"), "seg_report.json")
    macro = payload["macro"]
    print(f"n={len(entries)}  macro mIoU={macro['miou']:.2f}  "
          f"IoU_fg={macro['iou_fg']:.2f}  IoU_bg={macro['iou_bg']:.2f}  F1={macro['f1']:.2f}")
    return EXIT_OK


def cmd_eval_text(args) -> int:
    run = _Run(args)
    rows = _read_jsonl(args.input, "text pairs file")
    if not rows:
        raise ValidationError(f"text pairs file {args.input!r} holds no rows")
    suite = _suite_for(run)
    suite.require("embedder")
    embedder = suite.embedder

    per_item = []
    for row in rows:
        try:
            item_id, cand, ref = row["id"], row["candidate"], row["reference"]
        except KeyError as exc:
            raise ValidationError(f"text pair row missing key: {exc}") from exc
        cos = cosine_sim(embedder.embed(cand), embedder.embed(ref))
        per_item.append({
            "id": item_id,
            "rouge_l": rouge_l(cand, ref),
            "cosine": cos,
            "css": css_from_cosine(cos),
        })
    mean_rouge = float(np.mean([r["rouge_l"] for r in per_item]))
    mean_css = float(np.mean([r["css"] for r in per_item]))
    payload = {
        "config": run.echo("eval text", {"input": args.input, "n": len(per_item)}, suite),
        "per_item": per_item,
        "mean_rouge_l": mean_rouge,
        "mean_css": mean_css,
        "n": len(per_item),
    }
    _emit(payload, run.param("out"), "text_report.json")
    print(f"n={len(per_item)}  ROUGE-L={mean_rouge:.2f}  CSS={mean_css:.2f}")
    return EXIT_OK


def cmd_eval_detect(args) -> int:
    run = _Run(args)
    rows = _read_jsonl(args.input, "detection records file")
    try:
        records = [
            DetectionRecord(
                id=row["id"],
                fake_prob=float(row["fake_prob"]),
                label=row["label"],
                group=row["group"],
            )
            for row in rows
        ]
    except KeyError as exc:
        raise ValidationError(f"detection row missing key: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad detection row: {exc}") from exc
    threshold = float(run.param("threshold", 0.5))
    try:
        result = detection_accuracy(records, threshold)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    payload = {
        "config": run.echo(
            "eval detect", {"input": args.input, "threshold": threshold}
        ),
        **result,
    }
    _emit(payload, run.param("out"), "detect_report.json")
    print(f"n={result['n']}  overall={result['overall']:.2f}  threshold={threshold}")
    for group, acc in result["per_group"].items():
        print(f"  {group}: {acc:.2f}")
    return EXIT_OK


# ----------------------------------------------------------------- refine


def _refine_batch(args, kind: str) -> int:
    run = _Run(args)
    manifest = _load_manifest_checked(args.manifest)
    base_dir = Path(args.manifest).parent
    images = load_manifest_images(manifest, base_dir)
    suite = _suite_for(run, manifest)
    out_dir = run.param("out")
    if not out_dir:
        raise ValidationError("--out is required for refine runs")

    targets = [e for e in manifest.entries if e.label == "fake"]
    if not targets:
        raise ValidationError("manifest holds no fake entries to refine")

    params: dict = {"manifest": args.manifest, "seed": run.param("seed", 0)}
    if kind == "regen":
        params["max_iters"] = int(run.param("iters", 2))
    else:
        params["iters"] = int(run.param("iters", 3))
        params["mode"] = run.param("mode", "paper_faithful")

    runs = []
    pre_scores: list[float] = []
    post_scores: list[float] = []
    for entry in targets:
        entry_dir = Path(out_dir) / entry.id
        if kind == "regen":
            result, log_path = run_and_log_regeneration(
                suite,
                images[entry.id],
                None,
                image_id=entry.id,
                max_iters=params["max_iters"],
                out_dir=entry_dir,
            )
        else:
            result, log_path = run_and_log_inpainting(
                suite,
                images[entry.id],
                image_id=entry.id,
                iters=params["iters"],
                mode=params["mode"],
                out_dir=entry_dir,
            )
        first, last = result.iterations[0], result.iterations[-1]
        runs.append({
            "id": entry.id,
            "log": str(log_path),
            "iterations": len(result.iterations),
            "converged": result.converged,
            "initial_artifact_pixels": first.artifact_pixels,
            "final_artifact_pixels": last.artifact_pixels,
            "initial_score": first.score,
            "final_score": last.score,
        })
        if first.score is not None and last.score is not None:
            pre_scores.append(first.score)
            post_scores.append(last.score)

    payload = {
        "config": run.echo(f"refine {kind}", params, suite),
        "runs": runs,
        "n": len(runs),
        "converged": sum(r["converged"] for r in runs),
    }
    if pre_scores and len(pre_scores) == len(runs):
        try:
            payload["growth"] = growth_rate(pre_scores, post_scores).to_dict()
        except ValueError:
            payload["growth"] = None
    _emit(payload, out_dir, "summary.json")
    print(f"{kind}: {len(runs)} run(s), {payload['converged']} converged; "
          f"logs under {out_dir}")
    if payload.get("growth"):
        g = payload["growth"]
        print(f"score growth: ratio-of-means {g['growth_ratio_of_means']:.2f}% / "
              f"per-sample {g['growth_per_sample_mean']:.2f}%")
    return EXIT_OK


def cmd_refine_regen(args) -> int:
    return _refine_batch(args, "regen")


def cmd_refine_inpaint(args) -> int:
    return _refine_batch(args, "inpaint")


# ------------------------------------------------------------- robustness


def cmd_robustness(args) -> int:
    run = _Run(args)
    manifest = _load_manifest_checked(args.manifest)
    images = load_manifest_images(manifest, Path(args.manifest).parent)
    suite = _suite_for(run, manifest)
    suite.require("analyzer")
    grid = parse_grid(str(run.param("grid", "default")))
    seed = int(run.param("seed", 0))
    report = run_robustness(suite.analyzer, manifest, images, grid=grid, seed=seed)
    payload = {
        "config": run.echo(
            "robustness",
            {"manifest": args.manifest, "seed": seed,
             "grid": [c.label for c in grid]},
            suite,
        ),
        **report.to_dict(),
    }
    _emit(payload, run.param("out"), "robustness_report.json")
    for row in report.rows:
        if row.error:
            print(f"  {row.label:28s} FAILED: {row.error}")
        else:
            print(f"  {row.label:28s} mIoU={row.miou:6.2f}  F1={row.f1:6.2f}")
    return EXIT_OK


# ----------------------------------------------------------------- curate


def cmd_curate_cluster(args) -> int:
    run = _Run(args)
    manifest = _load_manifest_checked(args.manifest)
    images = load_manifest_images(manifest, Path(args.manifest).parent)
    suite = _suite_for(run, manifest)
    suite.require("embedder")
    k = int(run.param("k", 8))
    seed = int(run.param("seed", 0))
    features = extract_features(suite.embedder, images)
    result = kmeans_cluster(features, k, seed=seed)
    payload = {
        "config": run.echo(
            "curate cluster", {"manifest": args.manifest, "k": k, "seed": seed}, suite
        ),
        **result.to_dict(),
    }
    _emit(payload, run.param("out"), "cluster_report.json")
    print(f"k={k} n={len(features)} inertia={result.inertia:.4f} "
          f"iters={result.n_iter} converged={result.converged}")
    print(f"cluster sizes: {result.cluster_sizes()}")
    return EXIT_OK


def cmd_curate_sample(args) -> int:
    run = _Run(args)
    data = _read_json(args.assignments, "assignments file")
    if isinstance(data, dict) and "assignments" in data:
        data = data["assignments"]
    if not isinstance(data, dict) or not data:
        raise ValidationError(
            f"assignments file {args.assignments!r} holds no id->cluster mapping"
        )
    try:
        assignments = {str(k): int(v) for k, v in data.items()}
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad assignments mapping: {exc}") from exc
    n_per_cluster = int(run.param("n_per_cluster", 10))
    seed = int(run.param("seed", 0))
    selected = stratified_sample(assignments, n_per_cluster, seed=seed)
    payload = {
        "config": run.echo(
            "curate sample",
            {"assignments": args.assignments, "n_per_cluster": n_per_cluster, "seed": seed},
        ),
        "selected": selected,
        "n": len(selected),
    }
    _emit(payload, run.param("out"), "sample_report.json")
    print(f"selected {len(selected)} of {len(assignments)} ids")
    return EXIT_OK


def cmd_curate_filter(args) -> int:
    run = _Run(args)
    manifest = _load_manifest_checked(args.manifest)
    images = load_manifest_images(manifest, Path(args.manifest).parent)
    suite = _suite_for(run, manifest)
    suite.require("captioner")
    result = judge_filter(images, suite.captioner)
    payload = {
        "config": run.echo("curate filter", {"manifest": args.manifest}, suite),
        **result.to_dict(),
    }
    out_dir = run.param("out")
    _emit(payload, out_dir, "filter_report.json")
    if out_dir:
        kept_ids = set(result.kept)
        kept = DatasetManifest(
            entries=[e for e in manifest.entries if e.id in kept_ids],
            split=manifest.split,
        )
        kept_path = Path(out_dir) / "kept_manifest.jsonl"
        save_manifest(kept, kept_path)
        print(f"kept manifest written to {kept_path}")
    print(f"kept {len(result.kept)} of {len(result.decisions)} image(s)")
    return EXIT_OK


# --------------------------------------------------------------- backends


def cmd_backends_ping(args) -> int:
    run = _Run(args)
    manifest = None
    sample = None
    if args.manifest:
        manifest = _load_manifest_checked(args.manifest)
        images = load_manifest_images(manifest, Path(args.manifest).parent)
        first = manifest.entries[0]
        sample = (images[first.id], first.id)
    suite = _suite_for(run, manifest)
    results = probe_suite(suite, sample=sample)
    payload = {
        "config": run.echo("backends ping", {"manifest": args.manifest}, suite),
        "probes": [r.to_dict() for r in results],
        "ok": all(r.ok for r in results),
    }
    _emit(payload, run.param("out"), "ping_report.json")
    for r in results:
        status = "OK" if r.ok else "FAIL"
        print(f"  {r.role:9s} {status:4s} {r.target}  {r.detail}  ({r.elapsed_ms:.1f} ms)")
    return EXIT_OK if payload["ok"] else EXIT_BACKEND


# ------------------------------------------------------------------ parser


def _add_common(parser: argparse.ArgumentParser, *, manifest: bool = False) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its keys")
    parser.add_argument("--out", help="output directory for reports and logs")
    if manifest:
        parser.add_argument("--manifest", help="annotation manifest (JSONL)")


def build_parser() -> _Parser:
    parser = _Parser(prog="forgeline", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"forgeline {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    dataset = commands.add_parser("dataset", help="manifest validation and statistics")
    dataset_sub = dataset.add_subparsers(dest="subcommand", required=True)
    p = dataset_sub.add_parser("validate", help="report every manifest violation")
    _add_common(p, manifest=True)
    p.set_defaults(func=cmd_dataset_validate)
    p = dataset_sub.add_parser("stats", help="dataset composition counts")
    _add_common(p, manifest=True)
    p.set_defaults(func=cmd_dataset_stats)

    evaluate = commands.add_parser("eval", help="metric evaluation")
    eval_sub = evaluate.add_subparsers(dest="subcommand", required=True)
    p = eval_sub.add_parser("seg", help="localization metrics vs ground truth")
    _add_common(p, manifest=True)
    p.add_argument("--pred", help="JSONL of {id, mask} predictions; omit to run the analyzer")
    p.add_argument("--backends", help="backend config JSON")
    p.set_defaults(func=cmd_eval_seg)
    p = eval_sub.add_parser("text", help="ROUGE-L and embedding CSS over text pairs")
    _add_common(p)
    p.add_argument("--input", required=True, help="JSONL of {id, candidate, reference}")
    p.add_argument("--backends", help="backend config JSON")
    p.set_defaults(func=cmd_eval_text)
    p = eval_sub.add_parser("detect", help="detection accuracy per group")
    _add_common(p)
    p.add_argument("--input", required=True,
                   help="JSONL of {id, fake_prob, label, group}")
    p.add_argument("--threshold", type=float, help="decision threshold (default 0.5)")
    p.set_defaults(func=cmd_eval_detect)

    refine = commands.add_parser("refine", help="iterative refinement pipelines")
    refine_sub = refine.add_subparsers(dest="subcommand", required=True)
    p = refine_sub.add_parser("regen", help="regeneration with feedback memory")
    _add_common(p, manifest=True)
    p.add_argument("--backends", help="backend config JSON")
    p.add_argument("--iters", type=int, help="regeneration rounds (default 2)")
    p.add_argument("--seed", type=int, help="run seed (default 0)")
    p.set_defaults(func=cmd_refine_regen)
    p = refine_sub.add_parser("inpaint", help="region-wise inpainting")
    _add_common(p, manifest=True)
    p.add_argument("--backends", help="backend config JSON")
    p.add_argument("--iters", type=int, help="inpainting rounds (default 3)")
    p.add_argument("--mode", choices=["paper_faithful", "sequential"],
                   help="patch composition mode")
    p.add_argument("--seed", type=int, help="run seed (default 0)")
    p.set_defaults(func=cmd_refine_inpaint)

    p = commands.add_parser("robustness", help="degradation-grid sweep")
    _add_common(p, manifest=True)
    p.add_argument("--backends", help="backend config JSON")
    p.add_argument("--grid", help='grid spec, e.g. "jpeg:50,35;noise:0.1" or "default"')
    p.add_argument("--seed", type=int, help="noise seed (default 0)")
    p.set_defaults(func=cmd_robustness)

    curate = commands.add_parser("curate", help="dataset curation pipeline")
    curate_sub = curate.add_subparsers(dest="subcommand", required=True)
    p = curate_sub.add_parser("cluster", help="cluster image features")
    _add_common(p, manifest=True)
    p.add_argument("--backends", help="backend config JSON")
    p.add_argument("--k", type=int, help="number of clusters (default 8)")
    p.add_argument("--seed", type=int, help="clustering seed (default 0)")
    p.set_defaults(func=cmd_curate_cluster)
    p = curate_sub.add_parser("sample", help="uniform per-cluster sampling")
    _add_common(p)
    p.add_argument("--assignments", required=True,
                   help="cluster report JSON (or plain id->cluster mapping)")
    p.add_argument("--n-per-cluster", dest="n_per_cluster", type=int,
                   help="sample quota per cluster (default 10)")
    p.add_argument("--seed", type=int, help="sampling seed (default 0)")
    p.set_defaults(func=cmd_curate_sample)
    p = curate_sub.add_parser("filter", help="judge filtering")
    _add_common(p, manifest=True)
    p.add_argument("--backends", help="backend config JSON")
    p.set_defaults(func=cmd_curate_filter)

    backends = commands.add_parser("backends", help="backend management")
    backends_sub = backends.add_subparsers(dest="subcommand", required=True)
    p = backends_sub.add_parser("ping", help="reachability and conformance probes")
    _add_common(p, manifest=True)
    p.add_argument("--backends", help="backend config JSON")
    p.set_defaults(func=cmd_backends_ping)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TransportError, ProtocolError, ConfigError) as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (ValidationError, ManifestIOError, CodecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ForgelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
