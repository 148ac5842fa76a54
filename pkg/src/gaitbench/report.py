"""Delimited report output and its parser.

Per method the report contains a header line with the method name and
the extraction distance threshold, the ten headline coefficients, the
CMC sequence (one value per rank) and thirty rows of the six threshold
sequences.  Sub-millisecond distance-computation times are printed as
"<1", everything else with six significant digits, so a parse/re-emit
round trip is byte-stable.
"""

from __future__ import annotations

import io
import json
from pathlib import Path

import numpy as np

from .evaluation import MetricsReport

HEADLINE_COLUMNS = "DBI DI SC FDR CCR EER AUC MAP DCT TD"
SEQUENCE_COLUMNS = "FAR FRR TAR FAR RCL PCN"


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def _fmt_dct(ms: float) -> str:
    if not np.isfinite(ms):
        return "nan"
    if ms < 1.0:
        return "<1"
    return str(int(round(ms)))


def _parse_dct(token: str) -> float:
    return 0.0 if token == "<1" else float(token)


def write_report(reports, stream=None) -> str:
    """Emit the delimited evaluation report for a list of method results."""
    out = stream or io.StringIO()
    for r in reports:
        out.write(f"{r.method_id}, {_fmt(r.threshold)}\n")
        out.write(HEADLINE_COLUMNS + "\n")
        headline = [
            _fmt(r.dbi), _fmt(r.di), _fmt(r.sc), _fmt(r.fdr), _fmt(r.ccr),
            _fmt(r.eer), _fmt(r.auc), _fmt(r.map), _fmt_dct(r.dct_ms), _fmt(r.td),
        ]
        out.write(" ".join(headline) + "\n")
        out.write("CMC\n")
        for v in r.cmc:
            out.write(_fmt(v) + "\n")
        out.write(SEQUENCE_COLUMNS + "\n")
        for row in zip(r.far, r.frr, r.tar, r.roc_far, r.rcl, r.pcn):
            out.write(" ".join(_fmt(v) for v in row) + "\n")
    return out.getvalue() if stream is None else ""


def parse_report(text: str) -> list:
    """Parse a report back into MetricsReport values.

    Numeric values are recovered exactly at printed precision; "<1"
    distance times parse as 0.
    """
    lines = text.splitlines()
    reports = []
    i = 0
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        name, _, threshold = lines[i].rpartition(", ")
        if lines[i + 1].strip() != HEADLINE_COLUMNS:
            raise ValueError(f"line {i + 2}: expected '{HEADLINE_COLUMNS}'")
        tokens = lines[i + 2].split()
        if len(tokens) != 10:
            raise ValueError(f"line {i + 3}: expected 10 headline values")
        dbi, di, sc, fdr, ccr, eer, auc, map_ = (float(t) for t in tokens[:8])
        dct = _parse_dct(tokens[8])
        td = float(tokens[9])
        if lines[i + 3].strip() != "CMC":
            raise ValueError(f"line {i + 4}: expected 'CMC'")
        i += 4
        cmc = []
        while i < len(lines) and lines[i].strip() != SEQUENCE_COLUMNS:
            cmc.append(float(lines[i]))
            i += 1
        if i >= len(lines):
            raise ValueError("report block ends before its sequence table")
        i += 1
        rows = []
        while i < len(lines) and lines[i].strip() and len(lines[i].split()) == 6:
            rows.append([float(t) if t != "<1" else 0.0 for t in lines[i].split()])
            i += 1
        seq = np.array(rows) if rows else np.zeros((0, 6))
        reports.append(
            MetricsReport(
                method_id=name,
                threshold=float(threshold),
                dbi=dbi, di=di, sc=sc, fdr=fdr, ccr=ccr, eer=eer, auc=auc, map=map_,
                dct_ms=dct, td=td,
                cmc=np.array(cmc),
                far=seq[:, 0], frr=seq[:, 1], tar=seq[:, 2],
                roc_far=seq[:, 3], rcl=seq[:, 4], pcn=seq[:, 5],
            )
        )
    return reports


def write_metadata(path, cfg, methods, threshold, extra=None):
    """Machine-readable sidecar describing one evaluation run."""
    meta = {
        "format": "gaitbench-report-meta/1",
        "seed": cfg.seed,
        "setup": cfg.describe(),
        "repetitions": cfg.repetitions,
        "outer_folds": cfg.outer_folds,
        "inner_folds": cfg.inner_folds,
        "fineness": cfg.fineness,
        "methods": list(methods),
        "distance_threshold": threshold,
        "conventions": {
            "pair_construction": "all unordered evaluation-template pairs",
            "eer": "linear interpolation at the FAR/FRR crossing",
            "retrieval": "micro-averaged precision/recall over probes",
            "averaging": "arithmetic over repetitions and outer folds",
            "mahalanobis_covariance": "learning templates in feature space",
            "gavrilova_signals": "20 root-relative joint distances + 14 joint "
                                 "angles + 2 foot-axis angles (features.geometric)",
            "kumar_distance": "Frobenius norm of trajectory covariance difference",
        },
    }
    if extra:
        meta.update(extra)
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
