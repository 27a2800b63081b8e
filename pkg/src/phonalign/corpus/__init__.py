"""Corpus parsing, phone symbol sets, and alignment serialization."""

from pathlib import Path

from .jsonio import (
    alignment_from_dict,
    alignment_to_dict,
    read_alignment_json,
    write_alignment_json,
)
from .sampa import ARPABET_SYMBOLS, arpabet_inventory, load_sampa_table, sampa_to_arpabet
from .scribe import SCRIBE_SAMPLE_RATE, parse_scribe_labels
from .textgrid import read_textgrid, write_textgrid
from .timit import (
    TIMIT_SAMPLE_RATE,
    fold_alignment,
    load_timit_folding,
    load_timit_phn,
    parse_timit_phn,
)
from .types import Alignment, PhoneInventory, PhoneSegment

ALIGNMENT_SUFFIXES = (".json", ".textgrid", ".phn")


def load_alignment(path, tier=None):
    """Load an alignment file, dispatching on the extension
    (.json / .TextGrid / .PHN). The utterance id is the file stem.
    """
    p = Path(path)
    suffix = p.suffix.lower()
    if suffix == ".json":
        alignment = read_alignment_json(p)
        if not alignment.utterance_id:
            alignment.utterance_id = p.stem
        return alignment
    if suffix == ".textgrid":
        return read_textgrid(p.read_text(), tier=tier, utterance_id=p.stem)
    if suffix == ".phn":
        return load_timit_phn(p)
    raise ValueError(f"unrecognized alignment format: {p.name!r} "
                     f"(expected one of {ALIGNMENT_SUFFIXES})")


__all__ = [
    "ALIGNMENT_SUFFIXES",
    "ARPABET_SYMBOLS",
    "Alignment",
    "PhoneInventory",
    "PhoneSegment",
    "SCRIBE_SAMPLE_RATE",
    "TIMIT_SAMPLE_RATE",
    "alignment_from_dict",
    "alignment_to_dict",
    "arpabet_inventory",
    "fold_alignment",
    "load_alignment",
    "load_sampa_table",
    "load_timit_folding",
    "load_timit_phn",
    "parse_scribe_labels",
    "parse_timit_phn",
    "read_alignment_json",
    "read_textgrid",
    "sampa_to_arpabet",
    "write_alignment_json",
    "write_textgrid",
]
