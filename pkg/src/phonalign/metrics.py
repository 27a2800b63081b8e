"""Boundary-level evaluation: precision, recall, F1, and segmentation R-value.

Boundaries are the deduplicated segment edge times of an alignment. A greedy
in-order one-to-one matcher pairs reference and hypothesis boundaries that
fall within a tolerance window (default 20 ms). Corpus scores pool counts
over utterances (micro-average); a macro-average is available behind a flag,
as is the Pearson correlation of matched boundary times.
"""

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_TOLERANCE = 0.02


@dataclass
class BoundaryEvalResult:
    n_ref: int
    n_hyp: int
    n_hit: int
    precision: float
    recall: float
    f1: float
    r_value: float
    tolerance: float

    def __post_init__(self):
        if min(self.n_ref, self.n_hyp, self.n_hit) < 0:
            raise ValueError("counts must be non-negative")
        if self.n_hit > min(self.n_ref, self.n_hyp):
            raise ValueError(
                f"n_hit {self.n_hit} exceeds min(n_ref={self.n_ref}, n_hyp={self.n_hyp})"
            )
        if self.r_value > 1.0 + 1e-12:
            raise ValueError(f"r_value {self.r_value} exceeds 1")

    def to_dict(self):
        return {
            "n_ref": self.n_ref,
            "n_hyp": self.n_hyp,
            "n_hit": self.n_hit,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "r_value": self.r_value,
            "tolerance": self.tolerance,
        }


def extract_boundaries(alignment, include_endpoints=True):
    """Sorted, deduplicated segment start and end times.

    Shared edges between adjacent segments appear once. With
    include_endpoints=False the first and last boundary (the utterance
    edges) are dropped.
    """
    times = sorted({t for s in alignment.segments for t in (s.start, s.end)})
    if not include_endpoints:
        times = times[1:-1]
    return times


def match_boundary_pairs(ref, hyp, tolerance=DEFAULT_TOLERANCE):
    """Greedy in-order one-to-one matching of two sorted boundary lists.

    Walks both lists; a ref/hyp pair within tolerance is matched and both
    are consumed, otherwise the earlier time advances. Returns the matched
    (ref_time, hyp_time) pairs in time order.
    """
    if tolerance < 0:
        raise ValueError(f"tolerance must be non-negative, got {tolerance}")
    pairs = []
    i = j = 0
    while i < len(ref) and j < len(hyp):
        if abs(ref[i] - hyp[j]) <= tolerance:
            pairs.append((ref[i], hyp[j]))
            i += 1
            j += 1
        elif ref[i] < hyp[j]:
            i += 1
        else:
            j += 1
    return pairs


def match_boundaries(ref, hyp, tolerance=DEFAULT_TOLERANCE):
    """Number of matched boundaries (see match_boundary_pairs)."""
    return len(match_boundary_pairs(ref, hyp, tolerance))


def over_segmentation(n_ref, n_hyp):
    """OS = n_hyp/n_ref - 1; positive when the hypothesis over-segments."""
    if n_ref <= 0:
        raise ValueError("over-segmentation undefined for n_ref = 0")
    return n_hyp / n_ref - 1.0


def r_value(hit_rate, os):
    """Segmentation R-value from hit rate (recall) and over-segmentation.

    r1 = sqrt((1-HR)^2 + OS^2), r2 = (-OS + HR - 1)/sqrt(2),
    R = 1 - (|r1| + |r2|)/2. Equals 1 exactly at HR=1, OS=0.
    """
    r1 = math.sqrt((1.0 - hit_rate) ** 2 + os**2)
    r2 = (-os + hit_rate - 1.0) / math.sqrt(2.0)
    return 1.0 - (abs(r1) + abs(r2)) / 2.0


def _scores(n_ref, n_hyp, n_hit, tolerance):
    if n_ref <= 0:
        raise ValueError(
            "no reference boundaries; recall and R-value are undefined"
        )
    precision = n_hit / n_hyp if n_hyp else 0.0
    recall = n_hit / n_ref
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    rv = r_value(recall, over_segmentation(n_ref, n_hyp))
    return BoundaryEvalResult(n_ref, n_hyp, n_hit, precision, recall, f1, rv, tolerance)


def evaluate_pair(ref, hyp, tolerance=DEFAULT_TOLERANCE, include_endpoints=True):
    """Score one hypothesis Alignment against its reference."""
    rb = extract_boundaries(ref, include_endpoints)
    hb = extract_boundaries(hyp, include_endpoints)
    n_hit = match_boundaries(rb, hb, tolerance)
    return _scores(len(rb), len(hb), n_hit, tolerance)


def pair_alignments(refs, hyps):
    """Pair reference and hypothesis alignments by utterance_id.

    Raises ValueError listing ids present on only one side. Pairs come back
    sorted by utterance_id.
    """
    ref_by_id = {a.utterance_id: a for a in refs}
    hyp_by_id = {a.utterance_id: a for a in hyps}
    only_ref = sorted(set(ref_by_id) - set(hyp_by_id))
    only_hyp = sorted(set(hyp_by_id) - set(ref_by_id))
    if only_ref or only_hyp:
        parts = []
        if only_ref:
            parts.append(f"missing hypotheses for: {', '.join(only_ref)}")
        if only_hyp:
            parts.append(f"missing references for: {', '.join(only_hyp)}")
        raise ValueError("unpaired utterance ids: " + "; ".join(parts))
    return [(ref_by_id[u], hyp_by_id[u]) for u in sorted(ref_by_id)]


def evaluate_corpus(
    pairs, tolerance=DEFAULT_TOLERANCE, include_endpoints=True, macro=False
):
    """Score a corpus of (ref, hyp) Alignment pairs.

    Micro-average by default: boundary counts are pooled over utterances and
    the scores computed once from the pooled counts. macro=True instead
    averages per-utterance precision/recall/F1/R-value arithmetically
    (counts in the result stay pooled).
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("no alignment pairs to evaluate")
    mismatched = [
        f"{r.utterance_id!r} vs {h.utterance_id!r}"
        for r, h in pairs
        if r.utterance_id != h.utterance_id
    ]
    if mismatched:
        raise ValueError("mispaired utterance ids: " + "; ".join(mismatched))

    if not macro:
        n_ref = n_hyp = n_hit = 0
        for ref, hyp in pairs:
            rb = extract_boundaries(ref, include_endpoints)
            hb = extract_boundaries(hyp, include_endpoints)
            n_ref += len(rb)
            n_hyp += len(hb)
            n_hit += match_boundaries(rb, hb, tolerance)
        return _scores(n_ref, n_hyp, n_hit, tolerance)

    results = [
        evaluate_pair(ref, hyp, tolerance, include_endpoints) for ref, hyp in pairs
    ]
    n = len(results)
    return BoundaryEvalResult(
        n_ref=sum(r.n_ref for r in results),
        n_hyp=sum(r.n_hyp for r in results),
        n_hit=sum(r.n_hit for r in results),
        precision=sum(r.precision for r in results) / n,
        recall=sum(r.recall for r in results) / n,
        f1=sum(r.f1 for r in results) / n,
        r_value=sum(r.r_value for r in results) / n,
        tolerance=tolerance,
    )


def pearson_boundary_times(pairs, tolerance=DEFAULT_TOLERANCE, include_endpoints=True):
    """Pearson correlation of matched (ref, hyp) boundary times, pooled.

    Needs at least two matched pairs and nonzero variance on both sides.
    """
    ref_times = []
    hyp_times = []
    for ref, hyp in pairs:
        rb = extract_boundaries(ref, include_endpoints)
        hb = extract_boundaries(hyp, include_endpoints)
        for rt, ht in match_boundary_pairs(rb, hb, tolerance):
            ref_times.append(rt)
            hyp_times.append(ht)
    if len(ref_times) < 2:
        raise ValueError("need at least 2 matched boundary pairs for correlation")
    r = np.asarray(ref_times)
    h = np.asarray(hyp_times)
    if r.std() == 0 or h.std() == 0:
        raise ValueError("boundary times have zero variance; correlation undefined")
    return float(np.corrcoef(r, h)[0, 1])
