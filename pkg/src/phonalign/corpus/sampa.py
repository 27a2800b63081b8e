"""SAMPA -> ARPABET symbol mapping.

The table ships as a versioned CSV (`corpus/data/sampa_arpabet.csv`) so it can
be audited or replaced without touching code. Symbols with no ARPABET
equivalent map to None; callers filter those out and report them.
"""

import csv
from functools import lru_cache
from importlib import resources

from .types import PhoneInventory

# CMU 39-phone ARPABET set: the image of the mapping is a subset of this.
ARPABET_SYMBOLS = (
    "AA AE AH AO AW AY B CH D DH EH ER EY F G HH IH IY JH K L M N NG "
    "OW OY P R S SH T TH UH UW V W Y Z ZH"
).split()


def arpabet_inventory():
    return PhoneInventory(ARPABET_SYMBOLS)


@lru_cache(maxsize=1)
def load_sampa_table():
    """SAMPA symbol -> ARPABET symbol (None for known-unmappable symbols)."""
    table = {}
    ref = resources.files("phonalign.corpus") / "data" / "sampa_arpabet.csv"
    with ref.open("r", encoding="utf-8") as f:
        rows = (line for line in f if line.strip() and not line.lstrip().startswith("#"))
        for row in csv.reader(rows):
            sampa = row[0].strip()
            arpabet = row[1].strip() if len(row) > 1 else ""
            table[sampa] = arpabet or None
    return table


def sampa_to_arpabet(symbol):
    """Map one SAMPA symbol to ARPABET, or None when unmappable.

    Unknown symbols are unmappable, not errors. Pure: the table is fixed for
    the life of the process.
    """
    if not symbol:
        raise ValueError("empty SAMPA symbol")
    return load_sampa_table().get(symbol)
