"""Praat TextGrid (long text format) writing and reading.

Only interval tiers are handled. The writer emits one tier whose intervals
are contiguous: gaps between alignment segments become empty-label fillers,
which the reader skips again, so write -> read round-trips the segment list.

Quotes inside labels are escaped the Praat way (doubled). Labels containing
newlines are not supported.
"""

import re

from ..errors import ParseError
from .types import Alignment, PhoneSegment, TIME_EPS

DEFAULT_TIER = "phones"


def _fmt(t):
    # 1e-12 absolute precision; trim trailing zeros for readability
    s = format(float(t), ".12f").rstrip("0").rstrip(".")
    return s if s else "0"


def _quote(text):
    return '"%s"' % text.replace('"', '""')


def write_textgrid(alignment, tier_name=DEFAULT_TIER):
    """Render an Alignment as a long-format TextGrid string."""
    if "\n" in tier_name:
        raise ValueError("tier name must not contain newlines")
    for seg in alignment.segments:
        if "\n" in seg.label:
            raise ValueError(f"label contains newline: {seg.label!r}")

    xmin = 0.0
    last_end = max((s.end for s in alignment.segments), default=0.0)
    xmax = alignment.duration if alignment.duration is not None else last_end

    intervals = []
    cursor = xmin
    for seg in alignment.segments:
        if seg.start > cursor + TIME_EPS:
            intervals.append((cursor, seg.start, ""))
        intervals.append((seg.start, seg.end, seg.label))
        cursor = seg.end
    if xmax > cursor + TIME_EPS or not intervals:
        if xmax > cursor:
            intervals.append((cursor, xmax, ""))

    lines = [
        'File type = "ooTextFile"',
        'Object class = "TextGrid"',
        "",
        f"xmin = {_fmt(xmin)}",
        f"xmax = {_fmt(xmax)}",
        "tiers? <exists>",
        "size = 1",
        "item []:",
        "    item [1]:",
        '        class = "IntervalTier"',
        f"        name = {_quote(tier_name)}",
        f"        xmin = {_fmt(xmin)}",
        f"        xmax = {_fmt(xmax)}",
        f"        intervals: size = {len(intervals)}",
    ]
    for i, (lo, hi, label) in enumerate(intervals, start=1):
        lines += [
            f"        intervals [{i}]:",
            f"            xmin = {_fmt(lo)}",
            f"            xmax = {_fmt(hi)}",
            f"            text = {_quote(label)}",
        ]
    return "\n".join(lines) + "\n"


_KV_RE = re.compile(r'^\s*([A-Za-z?!\[\]][^=]*?)\s*=\s*(.*?)\s*$')
_ITEM_RE = re.compile(r"^\s*(item|intervals|points)\s*\[\d+\]\s*:\s*$")


def _unquote(value, lineno):
    value = value.strip()
    if len(value) >= 2 and value.startswith('"') and value.endswith('"'):
        return value[1:-1].replace('""', '"')
    raise ParseError(f"expected quoted string, line {lineno}")


def read_textgrid(text, tier=None, utterance_id=""):
    """Parse a long-format TextGrid back into an Alignment.

    `tier` selects the interval tier by name (default: the first interval
    tier). Empty-label intervals are skipped. The file-level xmax becomes the
    alignment duration.
    """
    lines = text.splitlines()
    header = [ln for ln in lines[:4] if ln.strip()]
    if len(header) < 2 or "ooTextFile" not in header[0] or "TextGrid" not in header[1]:
        raise ParseError("not an ooTextFile TextGrid, line 1")

    file_xmax = None
    tiers = []  # list of dicts: name, class, intervals=[(xmin, xmax, text)]
    current_tier = None
    current_interval = None
    in_intervals = False

    def close_interval():
        nonlocal current_interval
        if current_interval is not None:
            missing = {"xmin", "xmax", "text"} - set(current_interval)
            if missing:
                raise ParseError(
                    f"interval missing fields {sorted(missing)} near line {current_interval['_line']}"
                )
            current_tier["intervals"].append(
                (current_interval["xmin"], current_interval["xmax"], current_interval["text"])
            )
            current_interval = None

    for lineno, raw in enumerate(lines[2:], start=3):
        line = raw.strip()
        if not line:
            continue
        m = _ITEM_RE.match(line)
        if m:
            kind = m.group(1)
            if kind == "item":
                close_interval()
                in_intervals = False
            elif kind == "intervals":
                close_interval()
                in_intervals = True
                current_interval = {"_line": lineno}
            continue
        m = _KV_RE.match(line)
        if not m:
            continue
        key, value = m.group(1).strip(), m.group(2)
        if key == "class":
            close_interval()
            in_intervals = False
            cls = _unquote(value, lineno)
            current_tier = {"class": cls, "name": "", "intervals": []}
            tiers.append(current_tier)
        elif key == "name" and current_tier is not None:
            current_tier["name"] = _unquote(value, lineno)
        elif key in ("xmin", "xmax"):
            try:
                t = float(value)
            except ValueError:
                raise ParseError(f"bad number {value!r}, line {lineno}") from None
            if current_interval is not None and in_intervals:
                current_interval[key] = t
            elif current_tier is None and key == "xmax":
                file_xmax = t
        elif key == "text" and current_interval is not None:
            current_interval["text"] = _unquote(value, lineno)
    close_interval()

    interval_tiers = [t for t in tiers if t["class"] == "IntervalTier"]
    if not interval_tiers:
        raise ParseError("no interval tier found")
    if tier is None:
        selected = interval_tiers[0]
    else:
        by_name = [t for t in interval_tiers if t["name"] == tier]
        if not by_name:
            available = [t["name"] for t in interval_tiers]
            raise ParseError(f"tier {tier!r} not found; available tiers: {available}")
        selected = by_name[0]

    segments = [
        PhoneSegment(label, lo, hi)
        for lo, hi, label in sorted(selected["intervals"])
        if label.strip()
    ]
    return Alignment(utterance_id, segments, duration=file_xmax)
