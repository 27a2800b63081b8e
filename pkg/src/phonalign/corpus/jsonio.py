"""JSON alignment interchange format.

Schema: {"utterance_id": str, "duration": number|null,
         "segments": [{"label", "start", "end", "confidence"?}]}
This is the canonical format consumed and produced by the eval command.
"""

import json
from pathlib import Path

from ..errors import ParseError
from .types import Alignment, PhoneSegment


def alignment_to_dict(alignment):
    segments = []
    for seg in alignment.segments:
        d = {"label": seg.label, "start": seg.start, "end": seg.end}
        if seg.confidence is not None:
            d["confidence"] = seg.confidence
        segments.append(d)
    return {
        "utterance_id": alignment.utterance_id,
        "duration": alignment.duration,
        "segments": segments,
    }


def alignment_from_dict(data):
    try:
        segments = [
            PhoneSegment(
                s["label"], float(s["start"]), float(s["end"]),
                float(s["confidence"]) if "confidence" in s else None,
            )
            for s in data["segments"]
        ]
        duration = data.get("duration")
        return Alignment(
            data["utterance_id"], segments,
            float(duration) if duration is not None else None,
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed alignment JSON: {exc}") from exc


def write_alignment_json(alignment, path):
    Path(path).write_text(json.dumps(alignment_to_dict(alignment), indent=2) + "\n")


def read_alignment_json(path):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    return alignment_from_dict(data)
