"""
Scoring hypothesis boundaries against a reference
=================================================

Boundary precision/recall counts a hypothesis boundary as a hit when it
falls within a time tolerance of an unclaimed reference boundary. The
R-value additionally punishes over-segmentation, which F1 lets slide.
"""

from phonalign.corpus.types import Alignment, PhoneSegment
from phonalign.metrics import evaluate_pair

ref = Alignment("utt", [
    PhoneSegment("sil", 0.00, 0.10),
    PhoneSegment("ah", 0.10, 0.30),
    PhoneSegment("s", 0.30, 0.50),
    PhoneSegment("sil", 0.50, 0.60),
])

# close on the first two boundaries, wild on the third
hyp = Alignment("utt", [
    PhoneSegment("sil", 0.00, 0.105),
    PhoneSegment("ah", 0.105, 0.31),
    PhoneSegment("s", 0.31, 0.70),
    PhoneSegment("sil", 0.70, 0.80),
])

for tol in [0.008, 0.02, 0.05]:
    r = evaluate_pair(ref, hyp, tolerance=tol)
    print(f"tolerance {tol:g}: hit {r.n_hit}/{r.n_ref}, "
          f"P={r.precision:.3f} R={r.recall:.3f} F1={r.f1:.3f} "
          f"R-value={r.r_value:.3f}")

# an over-segmenting hypothesis: every reference boundary is hit, so
# recall is perfect and F1 stays positive, but R-value goes negative
chopped = Alignment("utt", [
    PhoneSegment("x", t / 50, (t + 1) / 50) for t in range(30)
])
r = evaluate_pair(ref, chopped, tolerance=0.02)
print(f"\n30 uniform slices: P={r.precision:.3f} R={r.recall:.3f} "
      f"F1={r.f1:.3f} R-value={r.r_value:.3f}")
