"""Evaluation harness: data splits, separability, classifier metrics.

The homogeneous setup draws a set of identity classes, splits each class
one third for learning and two thirds for evaluation and rotates that
split through an outer 3-fold loop.  The heterogeneous setup learns on
all samples of one random class set and evaluates on all samples of a
disjoint one, so no identity ever appears on both sides.  Either way the
frozen model is scored with four class-separability coefficients and
then with rank-based classifier metrics from an inner 10-fold loop where
one dis-labeled fold is probed against the remaining nine as gallery.

All randomness flows from per-(repetition, fold) seeds derived from the
configured seed, so results are reproducible bit for bit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.spatial.distance import cdist

from .errors import EmptyGallery, InsufficientClasses
from .features import Template, get_method, method_centroid, template_distance
from .features.base import MethodDescriptor, dtw_bundle_distance, trajectory_covariance
from .learning import (
    LabeledDataset,
    MahalanobisClassifier,
    apply_transform,
    fit_mahalanobis,
    learn_mmc,
    learn_pcalda,
)
from .sample import resample_linear
from .segmentation import GaitDatabase

_SPLIT_STREAM = 101
_FOLD_STREAM = 202
_RANDOM_STREAM = 303


@dataclass(frozen=True)
class SetupConfig:
    """Evaluation setup: homogeneous(C) or heterogeneous(C_L, C_E)."""

    kind: str = "homogeneous"
    num_classes: Optional[int] = None       # homogeneous class count
    learn_classes: Optional[int] = None     # heterogeneous learning classes
    eval_classes: Optional[int] = None      # heterogeneous evaluation classes
    repetitions: int = 3
    seed: int = 0
    outer_folds: int = 3
    inner_folds: int = 10
    fineness: int = 30

    @classmethod
    def parse(cls, text: str, **kwargs) -> "SetupConfig":
        """Parse 'homogeneous:<C>' or 'heterogeneous:<CL>,<CE>'."""
        kind, _, args = text.partition(":")
        kind = kind.strip().lower()
        if kind == "homogeneous":
            num = int(args) if args.strip() else None
            return cls(kind="homogeneous", num_classes=num, **kwargs)
        if kind == "heterogeneous":
            try:
                cl, ce = (int(v) for v in args.split(","))
            except ValueError:
                raise ValueError(
                    "heterogeneous setup needs two class counts, e.g. "
                    "'heterogeneous:2,4'"
                ) from None
            return cls(kind="heterogeneous", learn_classes=cl, eval_classes=ce, **kwargs)
        raise ValueError(f"unknown setup kind '{kind}'")

    def describe(self) -> str:
        if self.kind == "homogeneous":
            return f"homogeneous:{self.num_classes or 'all'}"
        return f"heterogeneous:{self.learn_classes},{self.eval_classes}"


def split_data(db: GaitDatabase, cfg: SetupConfig, repetition: int, fold: int = 0):
    """Deterministic (learning, evaluation) index split for one run.

    Homogeneous: the same classes appear on both sides and each class'
    samples are partitioned into outer folds, the indexed fold learning
    and the rest evaluating.  Heterogeneous: disjoint class sets, all
    samples of each side.
    """
    rng = np.random.default_rng([cfg.seed, _SPLIT_STREAM, repetition])
    labels = db.labels
    classes = db.class_labels
    if cfg.kind == "homogeneous":
        wanted = cfg.num_classes or len(classes)
        if len(classes) < wanted or wanted < 2:
            raise InsufficientClasses(
                f"setup needs {wanted} classes, database has {len(classes)}"
            )
        chosen = sorted(rng.choice(classes, size=wanted, replace=False).tolist())
        learn, evaluate = [], []
        for cls in chosen:
            idx = np.flatnonzero(labels == cls)
            perm = idx[rng.permutation(idx.size)]
            folds = np.array_split(perm, cfg.outer_folds)
            for f, part in enumerate(folds):
                (learn if f == fold % cfg.outer_folds else evaluate).extend(part.tolist())
        return np.array(sorted(learn)), np.array(sorted(evaluate))

    if cfg.kind == "heterogeneous":
        cl, ce = cfg.learn_classes, cfg.eval_classes
        if cl is None or ce is None or cl < 1 or ce < 2:
            raise InsufficientClasses("heterogeneous setup needs C_L >= 1, C_E >= 2")
        if cl + ce > len(classes):
            raise InsufficientClasses(
                f"setup needs {cl}+{ce} disjoint classes, database has {len(classes)}"
            )
        perm = rng.permutation(classes)
        learn_cls = set(perm[:cl].tolist())
        eval_cls = set(perm[cl : cl + ce].tolist())
        learn = np.flatnonzero(np.isin(labels, sorted(learn_cls)))
        evaluate = np.flatnonzero(np.isin(labels, sorted(eval_cls)))
        return learn, evaluate

    raise ValueError(f"unknown setup kind '{cfg.kind}'")


# ---------------------------------------------------------------------------
# class separability


@dataclass(frozen=True)
class SeparabilityScores:
    dbi: float
    di: float
    sc: float
    fdr: float


def class_separability(
    templates, distance: Callable, pairwise: Optional[np.ndarray] = None
) -> SeparabilityScores:
    """Four class-separability coefficients of a labeled template set.

    distance compares two templates; pairwise optionally supplies the
    precomputed template distance matrix (used for the silhouette).
    Coincident class centroids are reported as infinite Davies-Bouldin
    and zero Dunn index rather than raised.
    """
    labels = [t.label for t in templates]
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise InsufficientClasses("separability needs at least 2 classes")
    by_class = {c: [i for i, l in enumerate(labels) if l == c] for c in classes}

    centroids = {c: method_centroid([templates[i] for i in idx]) for c, idx in by_class.items()}
    sigma = {
        c: float(np.mean([distance(templates[i], centroids[c]) for i in idx]))
        for c, idx in by_class.items()
    }
    inter = {}
    for i, c in enumerate(classes):
        for c2 in classes[i + 1 :]:
            inter[(c, c2)] = inter[(c2, c)] = distance(centroids[c], centroids[c2])

    ratios = []
    for c in classes:
        worst = 0.0
        for c2 in classes:
            if c2 == c:
                continue
            d = inter[(c, c2)]
            ratio = np.inf if d == 0 else (sigma[c] + sigma[c2]) / d
            worst = max(worst, ratio)
        ratios.append(worst)
    dbi = float(np.mean(ratios))

    min_inter = min(inter.values())
    max_sigma = max(sigma.values())
    if min_inter == 0:
        di = 0.0
    elif max_sigma == 0:
        di = np.inf
    else:
        di = float(min_inter / max_sigma)

    n = len(templates)
    if pairwise is None:
        pairwise = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                pairwise[i, j] = pairwise[j, i] = distance(templates[i], templates[j])
    silhouettes = []
    for i, label in enumerate(labels):
        a = float(np.mean(pairwise[i, by_class[label]]))
        b = min(
            float(np.mean(pairwise[i, by_class[c]])) for c in classes if c != label
        )
        denom = max(a, b)
        silhouettes.append(0.0 if denom == 0 else (b - a) / denom)
    sc = float(np.mean(silhouettes))

    overall = method_centroid(list(templates))
    numer = float(np.mean([distance(centroids[c], overall) for c in classes]))
    denom = float(np.mean([distance(templates[i], centroids[labels[i]]) for i in range(n)]))
    fdr = np.inf if denom == 0 else numer / denom

    return SeparabilityScores(dbi=dbi, di=di, sc=sc, fdr=float(fdr))


# ---------------------------------------------------------------------------
# classification


def classify_wta(probe: Template, gallery, distance: Callable):
    """Winner-takes-all: label of the nearest gallery template.

    Ties resolve to the lowest gallery index, making the result
    deterministic.
    """
    if not gallery:
        raise EmptyGallery("cannot classify against an empty gallery")
    best_i = 0
    best_d = distance(probe, gallery[0])
    for i, g in enumerate(gallery[1:], start=1):
        d = distance(probe, g)
        if d < best_d:
            best_i, best_d = i, d
    return gallery[best_i].label


@dataclass
class DistanceMatrix:
    """Symmetric pairwise template distances over an evaluation set."""

    values: np.ndarray
    labels: np.ndarray
    dct_ms: float = 0.0

    @property
    def num_templates(self) -> int:
        return self.values.shape[0]


def build_distance_matrix(
    templates, method: MethodDescriptor, classifier: Optional[MahalanobisClassifier] = None
) -> DistanceMatrix:
    """Populate the evaluation distance matrix, timing the mean cost.

    Vector methods go through batched routines equivalent to the
    per-pair distance functions; bundle methods fall back to explicit
    pair loops.
    """
    n = len(templates)
    labels = np.array([t.label for t in templates])
    start = time.perf_counter()
    if method.distance == "euclidean":
        x = np.stack([t.values.ravel() for t in templates])
        values = cdist(x, x)
    elif method.distance == "mahalanobis":
        if classifier is None:
            raise ValueError("mahalanobis matrix requires a fitted classifier")
        x = np.stack([t.values.ravel() for t in templates])
        vals, vecs = np.linalg.eigh(classifier.cov_pinv)
        whitener = vecs * np.sqrt(np.clip(vals, 0.0, None))
        xw = x @ whitener
        values = cdist(xw, xw)
    elif method.distance == "covariance":
        covs = np.stack([trajectory_covariance(t).ravel() for t in templates])
        values = cdist(covs, covs)
    elif method.distance == "dtw":
        values = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                values[i, j] = values[j, i] = dtw_bundle_distance(templates[i], templates[j])
    else:
        raise ValueError(f"method '{method.method_id}' has no distance")
    elapsed = time.perf_counter() - start
    np.fill_diagonal(values, 0.0)
    pairs = max(1, n * (n - 1) // 2)
    return DistanceMatrix(values=values, labels=labels, dct_ms=elapsed / pairs * 1000.0)


def stratified_folds(labels: np.ndarray, k: int, rng) -> list:
    """Per-class round-robin fold assignment; deterministic under rng."""
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in sorted(set(labels.tolist())):
        idx = np.flatnonzero(labels == cls)
        perm = idx[rng.permutation(idx.size)]
        offset = int(rng.integers(k))
        for j, i in enumerate(perm):
            folds[(j + offset) % k].append(int(i))
    return [np.array(sorted(f)) for f in folds if f]


@dataclass
class MetricsFragment:
    """Classifier metrics of one evaluation run."""

    ccr: float
    eer: float
    auc: float
    map: float
    cmc: np.ndarray
    far: np.ndarray
    frr: np.ndarray
    tar: np.ndarray
    roc_far: np.ndarray
    rcl: np.ndarray
    pcn: np.ndarray


def _mann_whitney_auc(genuine: np.ndarray, impostor: np.ndarray) -> float:
    """Exact area under the ROC curve: P(genuine < impostor) + ties/2."""
    sg = np.sort(genuine)
    lt = np.searchsorted(sg, impostor, side="left").sum()
    le = np.searchsorted(sg, impostor, side="right").sum()
    return float((lt + 0.5 * (le - lt)) / (genuine.size * impostor.size))


def _interpolated_eer(genuine: np.ndarray, impostor: np.ndarray) -> float:
    """Equal error rate at the linearly interpolated FAR/FRR crossing."""
    ts = np.unique(np.concatenate([genuine, impostor]))
    sg, si = np.sort(genuine), np.sort(impostor)
    far = np.concatenate([[0.0], np.searchsorted(si, ts, side="right") / si.size])
    frr = np.concatenate([[1.0], 1.0 - np.searchsorted(sg, ts, side="right") / sg.size])
    diff = far - frr
    k = int(np.argmax(diff >= 0))
    if diff[k] == 0:
        return float(far[k])
    t = diff[k - 1] / (diff[k - 1] - diff[k])
    return float(far[k - 1] + t * (far[k] - far[k - 1]))


def _precision_recall(distances: np.ndarray, relevant: np.ndarray):
    """Threshold-swept micro-averaged precision/recall over pairs."""
    order = np.argsort(distances, kind="stable")
    d_sorted = distances[order]
    rel_sorted = relevant[order]
    tp = np.cumsum(rel_sorted)
    retrieved = np.arange(1, distances.size + 1)
    ends = np.flatnonzero(np.diff(d_sorted, append=np.inf) != 0)
    total = tp[-1]
    rcl = tp[ends] / total
    pcn = tp[ends] / retrieved[ends]
    return rcl, pcn


def classifier_metrics(
    dm: DistanceMatrix, inner_folds: int = 10, fineness: int = 30, rng=None
) -> MetricsFragment:
    """Rank and threshold metrics of one frozen model.

    The CMC comes from the inner cross-validation loop; the error-rate
    and retrieval sequences come from a 30-point threshold sweep over all
    unordered evaluation-template pairs, anchored so FAR starts at 0 and
    FRR at 1, the ROC at (0,0)/(1,1) and recall spanning 0 to 1.  EER,
    AUC and MAP are computed on the full empirical curves, not the
    30-point renderings.
    """
    rng = rng or np.random.default_rng(0)
    labels = dm.labels
    classes = sorted(set(labels.tolist()))
    num_classes = len(classes)
    if num_classes < 2:
        raise InsufficientClasses("classifier metrics need at least 2 classes")

    rank_hits = np.zeros(num_classes)
    probes = 0
    for fold in stratified_folds(labels, inner_folds, rng):
        in_fold = np.zeros(labels.size, dtype=bool)
        in_fold[fold] = True
        gallery = np.flatnonzero(~in_fold)
        if gallery.size == 0:
            continue
        gallery_labels = labels[gallery]
        for p in fold:
            d = dm.values[p, gallery]
            best: dict = {}
            for gi in range(gallery.size):
                c = gallery_labels[gi]
                key = (d[gi], gi)
                if c not in best or key < best[c]:
                    best[c] = key
            order = sorted(classes, key=lambda c: best.get(c, (np.inf, np.inf)))
            rank_hits[order.index(labels[p])] += 1
            probes += 1
    cmc = np.cumsum(rank_hits) / max(1, probes)

    iu = np.triu_indices(dm.num_templates, 1)
    d = dm.values[iu]
    genuine_mask = labels[iu[0]] == labels[iu[1]]
    gen = d[genuine_mask]
    imp = d[~genuine_mask]

    if gen.size == 0 or imp.size == 0:
        nan_seq = np.full(fineness, np.nan)
        return MetricsFragment(
            ccr=float(cmc[0]), eer=np.nan, auc=np.nan, map=np.nan, cmc=cmc,
            far=nan_seq, frr=nan_seq.copy(), tar=nan_seq.copy(),
            roc_far=nan_seq.copy(), rcl=nan_seq.copy(), pcn=nan_seq.copy(),
        )

    eer = _interpolated_eer(gen, imp)
    auc = _mann_whitney_auc(gen, imp)

    thresholds = np.linspace(d.min(), d.max(), fineness)
    far = np.array([np.mean(imp <= t) for t in thresholds])
    frr = np.array([np.mean(gen > t) for t in thresholds])
    far[0], frr[0] = 0.0, 1.0
    tar = 1.0 - frr
    roc_far = far.copy()
    tar[0] = roc_far[0] = 0.0
    tar[-1] = roc_far[-1] = 1.0

    rcl_full, pcn_full = _precision_recall(d, genuine_mask)
    area_rcl = np.concatenate([[0.0], rcl_full])
    area_pcn = np.concatenate([[pcn_full[0]], pcn_full])
    mean_ap = float(np.trapezoid(area_pcn, area_rcl))
    grid = np.linspace(0.0, 1.0, fineness)
    uniq, first = np.unique(rcl_full, return_index=True)
    xs = np.concatenate([[0.0], uniq]) if uniq[0] > 0 else uniq
    ys = np.concatenate([[pcn_full[first[0]]], pcn_full[first]]) if uniq[0] > 0 else pcn_full[first]
    pcn30 = np.interp(grid, xs, ys)

    return MetricsFragment(
        ccr=float(cmc[0]), eer=eer, auc=auc, map=mean_ap, cmc=cmc,
        far=far, frr=frr, tar=tar, roc_far=roc_far, rcl=grid, pcn=pcn30,
    )


def random_baseline_metrics(
    labels: np.ndarray, inner_folds: int = 10, fineness: int = 30, rng=None
) -> MetricsFragment:
    """Metrics of the featureless baseline that picks a uniformly random
    gallery identity for every probe."""
    rng = rng or np.random.default_rng(0)
    classes = sorted(set(labels.tolist()))
    num_classes = len(classes)
    rank_hits = np.zeros(num_classes)
    probes = 0
    for fold in stratified_folds(labels, inner_folds, rng):
        in_fold = np.zeros(labels.size, dtype=bool)
        in_fold[fold] = True
        gallery_classes = sorted(set(labels[~in_fold].tolist()))
        for p in fold:
            order = [gallery_classes[i] for i in rng.permutation(len(gallery_classes))]
            order += [c for c in classes if c not in gallery_classes]
            rank_hits[order.index(labels[p])] += 1
            probes += 1
    cmc = np.cumsum(rank_hits) / max(1, probes)
    nan_seq = np.full(fineness, np.nan)
    return MetricsFragment(
        ccr=float(cmc[0]), eer=np.nan, auc=np.nan, map=np.nan, cmc=cmc,
        far=nan_seq, frr=nan_seq.copy(), tar=nan_seq.copy(),
        roc_far=nan_seq.copy(), rcl=nan_seq.copy(), pcn=nan_seq.copy(),
    )


# ---------------------------------------------------------------------------
# full pipeline


@dataclass
class MetricsReport:
    """Averaged evaluation results of one method."""

    method_id: str
    threshold: float
    dbi: float
    di: float
    sc: float
    fdr: float
    ccr: float
    eer: float
    auc: float
    map: float
    dct_ms: float
    td: float
    cmc: np.ndarray
    far: np.ndarray
    frr: np.ndarray
    tar: np.ndarray
    roc_far: np.ndarray
    rcl: np.ndarray
    pcn: np.ndarray
    metadata: dict = field(default_factory=dict)


def vectorize_samples(samples, representation: str, target_length: int) -> np.ndarray:
    """Length-normalize samples and flatten them into row vectors."""
    rows = []
    for s in samples:
        r = resample_linear(s, target_length)
        if representation == "br":
            rows.append(r.require_rotations().ravel())
        else:
            rows.append(r.require_positions().reshape(target_length, -1).ravel())
    return np.stack(rows)


def _learned_run(db, desc, learn_idx, eval_idx, target_length):
    samples = db.samples
    x_learn = vectorize_samples([samples[i] for i in learn_idx], desc.representation, target_length)
    labels_learn = np.array([samples[i].label for i in learn_idx])
    dataset = LabeledDataset(x_learn, labels_learn)
    transform = learn_mmc(dataset) if desc.method_id.startswith("mmc") else learn_pcalda(dataset)
    learn_templates = apply_transform(transform, x_learn)
    classifier = fit_mahalanobis(learn_templates, transform=transform)
    x_eval = vectorize_samples([samples[i] for i in eval_idx], desc.representation, target_length)
    feats = apply_transform(transform, x_eval)
    templates = [
        Template(desc.method_id, feats[k], label=samples[i].label)
        for k, i in enumerate(eval_idx)
    ]
    return templates, classifier


def evaluate_methods(
    db: GaitDatabase, methods, cfg: SetupConfig, progress: Optional[Callable] = None
) -> list:
    """Evaluate a list of registered methods on an extracted database.

    Per method and repetition the data is split, models are learned where
    applicable and frozen, separability is computed on the evaluation
    templates and the classifier metrics come from the inner fold loop.
    Headline values and sequences are averaged over repetitions and
    outer folds.
    """
    target_length = max(2, int(round(db.mean_length())))
    cache: dict[str, list] = {}
    reports = []
    for method_id in methods:
        desc = get_method(method_id)
        if desc.kind in ("geometric", "bundle", "raw") and method_id not in cache:
            from .features import extract_template

            cache[method_id] = [extract_template(method_id, s) for s in db.samples]

        fragments, seps, dcts, tds = [], [], [], []
        outer = cfg.outer_folds if cfg.kind == "homogeneous" else 1
        for rep in range(cfg.repetitions):
            for fold in range(outer):
                learn_idx, eval_idx = split_data(db, cfg, rep, fold)
                fold_rng = np.random.default_rng([cfg.seed, _FOLD_STREAM, rep, fold])
                if desc.kind == "random":
                    eval_labels = db.labels[eval_idx]
                    rand_rng = np.random.default_rng([cfg.seed, _RANDOM_STREAM, rep, fold])
                    fragments.append(
                        random_baseline_metrics(eval_labels, cfg.inner_folds, cfg.fineness, rand_rng)
                    )
                    seps.append(SeparabilityScores(np.nan, np.nan, np.nan, np.nan))
                    dcts.append(0.0)
                    tds.append(0.0)
                else:
                    if desc.kind == "learned":
                        templates, classifier = _learned_run(
                            db, desc, learn_idx, eval_idx, target_length
                        )
                    else:
                        templates = [cache[method_id][i] for i in eval_idx]
                        classifier = None
                    dm = build_distance_matrix(templates, desc, classifier)
                    dist = lambda a, b: template_distance(desc, a, b, classifier)
                    seps.append(class_separability(templates, dist, pairwise=dm.values))
                    fragments.append(
                        classifier_metrics(dm, cfg.inner_folds, cfg.fineness, fold_rng)
                    )
                    dcts.append(dm.dct_ms)
                    tds.append(float(np.mean([t.dimension for t in templates])))
                if progress:
                    progress(method_id, rep, fold)

        reports.append(
            MetricsReport(
                method_id=method_id,
                threshold=db.threshold,
                dbi=float(np.mean([s.dbi for s in seps])),
                di=float(np.mean([s.di for s in seps])),
                sc=float(np.mean([s.sc for s in seps])),
                fdr=float(np.mean([s.fdr for s in seps])),
                ccr=float(np.mean([f.ccr for f in fragments])),
                eer=float(np.mean([f.eer for f in fragments])),
                auc=float(np.mean([f.auc for f in fragments])),
                map=float(np.mean([f.map for f in fragments])),
                dct_ms=float(np.mean(dcts)),
                td=float(np.mean(tds)),
                cmc=np.mean([f.cmc for f in fragments], axis=0),
                far=np.mean([f.far for f in fragments], axis=0),
                frr=np.mean([f.frr for f in fragments], axis=0),
                tar=np.mean([f.tar for f in fragments], axis=0),
                roc_far=np.mean([f.roc_far for f in fragments], axis=0),
                rcl=np.mean([f.rcl for f in fragments], axis=0),
                pcn=np.mean([f.pcn for f in fragments], axis=0),
                metadata={
                    "setup": cfg.describe(),
                    "repetitions": cfg.repetitions,
                    "seed": cfg.seed,
                    "runs": len(fragments),
                    "target_length": target_length,
                },
            )
        )
    return reports
