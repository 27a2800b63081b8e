"""Command-line surface: synth, train, align, eval, inspect.

Exit codes: 0 success, 1 usage, 2 data error (unreadable or invalid inputs),
3 internal error. Set PHONALIGN_LOG_LEVEL (DEBUG/INFO/WARNING) to change log
verbosity; there is no other environment configuration.
"""

import argparse
import json
import logging
import os
import sys
import traceback
from pathlib import Path

from .corpus import ALIGNMENT_SUFFIXES, load_alignment, write_alignment_json
from .corpus.textgrid import write_textgrid
from .errors import FormatError, ParseError
from .metrics import evaluate_corpus, pair_alignments, pearson_boundary_times
from .pipeline import (
    PipelineConfig,
    align_corpus,
    load_model,
    save_model,
    train_model,
)
from .embeddings import read_manifest, validate_manifest
from .synth import generate_corpus

log = logging.getLogger("phonalign")

VARIANCE_CHOICES = ["0.9", "0.95", "0.99", "none"]


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract wants 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def _per_class(value):
    if value == "min":
        return value
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'min' or an integer, got {value!r}")
    if n < 1:
        raise argparse.ArgumentTypeError(f"per-class count must be >= 1, got {n}")
    return n


def _variance(value):
    return None if value == "none" else float(value)


def build_parser():
    parser = _Parser(prog="phonalign", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic embedding corpus")
    p.add_argument("--out", required=True, help="output corpus directory")
    p.add_argument("--classes", type=int, default=10)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--utterances", type=int, default=50)
    p.add_argument("--frames", type=int, default=200, help="frames per utterance")
    p.add_argument("--separation", type=float, default=20.0,
                   help="centroid sphere radius; noise has unit variance")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="fit PCA + balanced KNN from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="model directory to write")
    p.add_argument("--alignments", default=None,
                   help="directory of reference alignments named by utterance id "
                        "(default: the manifest's alignment_path entries)")
    p.add_argument("--variance", choices=VARIANCE_CHOICES, default="0.95")
    p.add_argument("--k", type=int, default=10, help="KNN neighbors")
    p.add_argument("--per-class", type=_per_class, default="min",
                   help="training frames kept per class: 'min' or a count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stride", type=float, default=None,
                   help="override the manifest frame stride (seconds)")
    p.add_argument("--threshold", type=float, default=0.5,
                   help="default decoding threshold stored with the model")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("align", help="align a manifest with a trained model")
    p.add_argument("--model", required=True, help="model directory")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=["textgrid", "json"], default="textgrid")
    p.add_argument("--threshold", type=float, default=None,
                   help="override the model's stored threshold")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("eval", help="boundary metrics: hypothesis vs reference")
    p.add_argument("--ref", required=True,
                   help="directory of alignments, or a manifest JSON")
    p.add_argument("--hyp", required=True,
                   help="directory of alignments, or a manifest JSON")
    p.add_argument("--tolerance", type=float, default=0.02,
                   help="boundary match window in seconds")
    p.add_argument("--macro", action="store_true",
                   help="average per-utterance scores instead of pooling counts")
    p.add_argument("--exclude-endpoints", action="store_true",
                   help="drop each utterance's first and last boundary")
    p.add_argument("--pearson", action="store_true",
                   help="also report Pearson correlation of matched boundary times")
    p.add_argument("--report", default=None, help="write the result as JSON here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("inspect", help="summarize a model directory or manifest")
    p.add_argument("path", help="model directory, corpus directory, or manifest JSON")
    p.set_defaults(func=cmd_inspect)

    return parser


def cmd_synth(args):
    manifest = generate_corpus(
        args.out,
        classes=args.classes,
        dim=args.dim,
        utterances=args.utterances,
        frames=args.frames,
        separation=args.separation,
        seed=args.seed,
    )
    print(f"wrote {len(manifest)} utterances to {args.out}")
    return 0


def _config_from_args(args):
    return PipelineConfig(
        variance_target=_variance(args.variance),
        knn_k=args.k,
        threshold=args.threshold,
        per_class=args.per_class,
        seed=args.seed,
        stride=args.stride,
    )


def _collect_references(alignments_dir, manifest):
    refs = {}
    root = Path(alignments_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"alignments directory not found: {root}")
    missing = []
    for entry in manifest.entries:
        for suffix in ALIGNMENT_SUFFIXES:
            path = root / f"{entry.utterance_id}{suffix}"
            if path.is_file():
                refs[entry.utterance_id] = load_alignment(path)
                break
        else:
            missing.append(entry.utterance_id)
    if missing:
        raise FileNotFoundError(
            f"no reference alignment in {root} for: {', '.join(missing)}"
        )
    return refs


def cmd_train(args):
    manifest = read_manifest(args.manifest)
    references = None
    if args.alignments is not None:
        references = _collect_references(args.alignments, manifest)
    model, report = train_model(manifest, _config_from_args(args), references)
    save_model(model, args.out, report=report)
    pca = report["pca"]
    print(
        f"trained on {report['n_frames_trained']} frames "
        f"({report['n_utterances']} utterances, "
        f"{len(model.inventory)} phones); "
        f"PCA {pca['input_dim']} -> {pca['n_components']} "
        f"({pca['explained_variance_retained']:.4f} variance); "
        f"KNN k={report['knn']['k']}, "
        f"self-consistency {report['train_self_consistency']:.4f}"
    )
    print(f"model written to {args.out}")
    return 0


def cmd_align(args):
    model = load_model(args.model)
    manifest = read_manifest(args.manifest)
    alignments = align_corpus(
        model, manifest, threshold=args.threshold, jobs=args.jobs
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for alignment in alignments:
        if args.format == "textgrid":
            path = out_dir / f"{alignment.utterance_id}.TextGrid"
            path.write_text(write_textgrid(alignment))
        else:
            path = out_dir / f"{alignment.utterance_id}.json"
            write_alignment_json(alignment, path)
        log.info("aligned %s (%d segments)", alignment.utterance_id,
                 len(alignment.segments))
    print(f"aligned {len(alignments)} utterances to {out_dir}")
    return 0


def _load_alignment_set(path):
    """A directory of alignment files, or a manifest whose entries carry
    alignment_path. Returns dict utterance_id -> Alignment.
    """
    path = Path(path)
    if path.is_dir():
        found = {}
        for child in sorted(path.iterdir()):
            if child.suffix.lower() in ALIGNMENT_SUFFIXES:
                a = load_alignment(child)
                if a.utterance_id in found:
                    raise ValueError(
                        f"{path}: duplicate alignments for {a.utterance_id!r}"
                    )
                found[a.utterance_id] = a
        if not found:
            raise FileNotFoundError(f"no alignment files in {path}")
        return found
    if path.is_file() and path.suffix.lower() == ".json":
        payload = json.loads(path.read_text())
        if isinstance(payload, dict) and "entries" in payload:
            manifest = read_manifest(path)
            refs = {}
            for entry in manifest.entries:
                if entry.alignment_path is None:
                    raise ValueError(
                        f"{entry.utterance_id}: manifest entry has no alignment_path"
                    )
                refs[entry.utterance_id] = load_alignment(
                    manifest.resolve(entry.alignment_path)
                )
            return refs
        a = load_alignment(path)
        return {a.utterance_id: a}
    raise FileNotFoundError(f"not a directory or JSON file: {path}")


def cmd_eval(args):
    refs = _load_alignment_set(args.ref)
    hyps = _load_alignment_set(args.hyp)
    pairs = pair_alignments(refs.values(), hyps.values())
    result = evaluate_corpus(
        pairs,
        tolerance=args.tolerance,
        include_endpoints=not args.exclude_endpoints,
        macro=args.macro,
    )
    payload = result.to_dict()
    payload["averaging"] = "macro" if args.macro else "micro"
    payload["n_utterances"] = len(pairs)
    if args.pearson:
        payload["pearson"] = pearson_boundary_times(
            pairs,
            tolerance=args.tolerance,
            include_endpoints=not args.exclude_endpoints,
        )

    print(f"{'utterances':<12}{len(pairs)}")
    for key in ("n_ref", "n_hyp", "n_hit"):
        print(f"{key:<12}{payload[key]}")
    for key in ("precision", "recall", "f1", "r_value"):
        print(f"{key:<12}{payload[key]:.4f}")
    print(f"{'tolerance':<12}{payload['tolerance']:g}")
    if args.pearson:
        print(f"{'pearson':<12}{payload['pearson']:.4f}")
    if args.report:
        Path(args.report).parent.mkdir(parents=True, exist_ok=True)
        Path(args.report).write_text(json.dumps(payload, indent=2) + "\n")
    return 0


def cmd_inspect(args):
    path = Path(args.path)
    if path.is_dir() and (path / "config.json").is_file() and (path / "pca.json").is_file():
        model = load_model(path)
        print(f"model directory {path}")
        print(f"  pca: {model.pca.input_dim} -> {model.pca.n_components} dims "
              f"(target {model.pca.variance_target}, "
              f"retained {float(model.pca.explained_ratio.sum()):.4f})")
        print(f"  knn: k={model.knn.k}, {model.knn.n_train} training frames")
        symbols = list(model.inventory.symbols)
        head = ", ".join(symbols[:8]) + (", ..." if len(symbols) > 8 else "")
        print(f"  phones ({len(symbols)}): {head}")
        print(f"  threshold: {model.config.threshold}, seed: {model.config.seed}")
        return 0

    manifest_path = path / "manifest.json" if path.is_dir() else path
    manifest = read_manifest(manifest_path)
    total = sum(e.frames for e in manifest.entries)
    dims = sorted({e.dim for e in manifest.entries})
    print(f"manifest {manifest_path}")
    print(f"  {len(manifest)} utterances, {total} frames, "
          f"dim {dims[0] if len(dims) == 1 else dims}")
    with_refs = sum(1 for e in manifest.entries if e.alignment_path)
    print(f"  {with_refs} entries carry reference alignments")
    problems = validate_manifest(manifest)
    if problems:
        print("  invalid:")
        for msg in problems:
            print(f"    {msg}")
        return 2
    print("  valid")
    return 0


def main(argv=None):
    logging.basicConfig(
        level=os.environ.get("PHONALIGN_LOG_LEVEL", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 3


def main_entry():
    sys.exit(main())
