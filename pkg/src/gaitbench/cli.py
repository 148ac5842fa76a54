"""Command-line interface: extract, learn, classify, evaluate."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .asfamc import mean_skeleton, parse_amc, parse_asf, write_amc
from .classifiers import (
    build_classifier,
    load_classifier,
    probe_template,
    rank_gallery,
    save_classifier,
)
from .errors import GaitBenchError
from .evaluation import SetupConfig, evaluate_methods
from .features import method_ids
from .kinematics import normalize_root
from .plotting import render_figures
from .report import write_metadata, write_report
from .segmentation import (
    WindowSearch,
    extract_gait_cycles,
    load_database,
    save_database,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaitbench",
        description="Gait-cycle extraction and gait-recognition evaluation "
        "for ASF/AMC motion capture archives.",
    )
    parser.add_argument("--version", action="version", version=f"gaitbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract an experimental gait database")
    p.add_argument("--input-dir", required=True, help="directory of AMC motion files")
    p.add_argument("--skeleton", required=True,
                   help="ASF file, or a directory of ASF files to average into "
                        "the prototypical skeleton")
    p.add_argument("--exemplar", required=True, help="AMC file with one exemplary gait cycle")
    p.add_argument("--distance-threshold", type=float, default=302.0,
                   help="DTW acceptance threshold (default 302.0)")
    p.add_argument("--db-dir", required=True, help="output database directory")
    p.add_argument("--min-samples", type=int, default=10,
                   help="minimum surviving cycles per subject (default 10)")

    p = sub.add_parser("learn", help="learn classifiers for selected methods")
    p.add_argument("--db-dir", required=True, help="extracted database directory")
    p.add_argument("--output", required=True, help="directory for classifier files")
    p.add_argument("--methods", default="all",
                   help="comma-separated method ids or 'all' (default)")

    p = sub.add_parser("classify", help="classify a probe motion on a gallery")
    p.add_argument("--classifier", required=True, help="classifier .npz file")
    p.add_argument("--probe", required=True, help="probe AMC file (one gait cycle)")
    p.add_argument("--gallery", help="optional directory of gallery AMC cycles; "
                                     "defaults to the classifier's own gallery")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("evaluate", help="evaluate methods and emit the report")
    p.add_argument("--db-dir", required=True, help="extracted database directory")
    p.add_argument("--methods", default="all",
                   help="comma-separated method ids or 'all' (default)")
    p.add_argument("--setup", default="homogeneous:",
                   help="'homogeneous:<C>' or 'heterogeneous:<CL>,<CE>' "
                        "(default: homogeneous over all classes)")
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="report file; omit to print to standard output")
    p.add_argument("--figures-dir", help="directory for rendered figures "
                                         "(default: <output>.figures next to the report)")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    return parser


def _select_methods(spec: str) -> list:
    if spec.strip() == "all":
        return method_ids()
    chosen = [m.strip() for m in spec.split(",") if m.strip()]
    unknown = [m for m in chosen if m not in method_ids()]
    if unknown:
        raise GaitBenchError(
            f"unknown methods: {', '.join(unknown)}; available: {', '.join(method_ids())}"
        )
    return chosen


def _load_skeleton(path: Path):
    if path.is_dir():
        asf_files = sorted(path.glob("*.asf"))
        if not asf_files:
            raise GaitBenchError(f"no ASF files in {path}")
        return mean_skeleton(parse_asf(f.read_text()) for f in asf_files)
    return parse_asf(path.read_text())


def cmd_extract(args) -> int:
    input_dir = Path(args.input_dir)
    if not input_dir.is_dir():
        raise GaitBenchError(f"input directory not found: {input_dir}")
    skeleton = _load_skeleton(Path(args.skeleton))
    exemplar = normalize_root(parse_amc(Path(args.exemplar).read_text(), skeleton))

    outdir = Path(args.db_dir)
    normalized_dir = outdir / "normalized"
    normalized_dir.mkdir(parents=True, exist_ok=True)

    motions = []
    amc_files = sorted(input_dir.glob("*.amc"))
    for amc in amc_files:
        try:
            motion = parse_amc(amc.read_text(), skeleton)
        except GaitBenchError as exc:
            raise GaitBenchError(f"{amc}: {exc}") from None
        subject = amc.stem.split("_")[0]
        motion = normalize_root(motion)
        motion = type(motion)(
            skeleton=motion.skeleton,
            values=motion.values,
            frame_rate=motion.frame_rate,
            subject_id=subject,
            source_file=amc.name,
        )
        (normalized_dir / amc.name).write_text(write_amc(motion))
        motions.append(motion)
    if not amc_files:
        print(f"warning: no AMC files found in {input_dir}", file=sys.stderr)

    db = extract_gait_cycles(
        motions,
        exemplar,
        args.distance_threshold,
        search=WindowSearch(),
        skeleton=skeleton,
        min_samples=args.min_samples,
    )
    save_database(db, outdir)
    print(
        f"extracted {len(db.samples)} gait cycles from {len(db.subjects)} subjects "
        f"at threshold {args.distance_threshold:g} -> {outdir}"
    )
    return 0


def cmd_learn(args) -> int:
    db = load_database(args.db_dir)
    if not db.samples:
        raise GaitBenchError(f"database {args.db_dir} contains no samples")
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    for method_id in _select_methods(args.methods):
        classifier = build_classifier(db, method_id)
        written = save_classifier(classifier, outdir / f"{method_id}.npz")
        print(f"learned {method_id} -> {written}")
    return 0


def cmd_classify(args) -> int:
    classifier = load_classifier(args.classifier)
    probe_motion = parse_amc(Path(args.probe).read_text(), classifier.skeleton)

    if args.gallery:
        gallery_dir = Path(args.gallery)
        gallery = []
        for amc in sorted(gallery_dir.glob("*.amc")):
            motion = parse_amc(amc.read_text(), classifier.skeleton)
            motion = type(motion)(
                skeleton=motion.skeleton,
                values=motion.values,
                frame_rate=motion.frame_rate,
                subject_id=amc.stem.split("_")[0],
                source_file=amc.name,
            )
            gallery.append(probe_template(classifier, motion))
        if not gallery:
            raise GaitBenchError(f"no AMC files in gallery directory {gallery_dir}")
        classifier.gallery = gallery

    probe = probe_template(classifier, probe_motion)
    ranking = rank_gallery(classifier, probe, rng=np.random.default_rng(args.seed))
    print(f"method: {classifier.method_id}")
    for rank, (identity, distance) in enumerate(ranking, start=1):
        print(f"{rank}\t{identity}\t{distance:.6g}")
    return 0


def cmd_evaluate(args) -> int:
    db = load_database(args.db_dir)
    if not db.samples:
        raise GaitBenchError(f"database {args.db_dir} contains no samples")
    methods = _select_methods(args.methods)
    cfg = SetupConfig.parse(args.setup, repetitions=args.repetitions, seed=args.seed)
    reports = evaluate_methods(db, methods, cfg)
    text = write_report(reports)

    if args.output:
        out = Path(args.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        write_metadata(
            out.with_suffix(out.suffix + ".meta.json"), cfg, methods, db.threshold
        )
        print(f"report written to {out}")
    else:
        sys.stdout.write(text)

    if not args.no_figures:
        figures_dir = args.figures_dir
        if figures_dir is None and args.output:
            figures_dir = str(Path(args.output)) + ".figures"
        if figures_dir:
            written = render_figures(reports, figures_dir)
            print(f"rendered {len(written)} figures in {figures_dir}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "extract": cmd_extract,
        "learn": cmd_learn,
        "classify": cmd_classify,
        "evaluate": cmd_evaluate,
    }
    try:
        return handlers[args.command](args)
    except GaitBenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
