#!/usr/bin/env python3
"""Regenerate src/tweetprep/data/emoji_lexicon.tsv from the stdlib Unicode tables.

The bundled lexicon maps each emoji codepoint sequence to a snake_case
English name derived from its official Unicode character name
(e.g. U+1F917 "HUGGING FACE" -> hugging_face).  Regional-indicator pairs
get mechanical flag names (t + r -> flag_tr).  ZWJ sequences are not
bundled; user lexicon files can add them.

Run from the repository root:  python tools/gen_emoji_lexicon.py
"""

import re
import sys
import unicodedata
from pathlib import Path

# Emoji-presentation blocks of the SMP.  Skin-tone modifiers (1F3FB-1F3FF)
# are excluded: they modify a preceding emoji and are not standalone entries.
SMP_RANGES = [
    (0x1F300, 0x1F3FA),
    (0x1F400, 0x1F5FF),
    (0x1F600, 0x1F64F),
    (0x1F680, 0x1F6FF),
    (0x1F7E0, 0x1F7EB),
    (0x1F90C, 0x1F9FF),
    (0x1FA70, 0x1FAFF),
]

# BMP symbols with emoji usage; curated because the surrounding blocks mix
# in plain-text punctuation that must never be rewritten.
BMP_CODEPOINTS = [
    0x231A, 0x231B, 0x2328, 0x23CF,
    *range(0x23E9, 0x23F4), *range(0x23F8, 0x23FB),
    0x25AA, 0x25AB, 0x25B6, 0x25C0, *range(0x25FB, 0x25FF),
    *range(0x2600, 0x2605), 0x260E, 0x2611, 0x2614, 0x2615, 0x2618,
    0x261D, 0x2620, 0x2622, 0x2623, 0x2626, 0x262A, 0x262E, 0x262F,
    *range(0x2638, 0x263B), 0x2640, 0x2642, *range(0x2648, 0x2654),
    0x265F, 0x2660, 0x2663, 0x2665, 0x2666, 0x2668, 0x267B, 0x267E,
    0x267F, *range(0x2692, 0x2698), 0x2699, 0x269B, 0x269C, 0x26A0,
    0x26A1, 0x26A7, 0x26AA, 0x26AB, 0x26B0, 0x26B1, 0x26BD, 0x26BE,
    0x26C4, 0x26C5, 0x26C8, 0x26CE, 0x26CF, 0x26D1, 0x26D3, 0x26D4,
    0x26E9, 0x26EA, *range(0x26F0, 0x26F6), *range(0x26F7, 0x26FB),
    0x26FD, 0x2702, 0x2705, *range(0x2708, 0x270E), 0x270F, 0x2712,
    0x2714, 0x2716, 0x271D, 0x2721, 0x2728, 0x2733, 0x2734, 0x2744,
    0x2747, 0x274C, 0x274E, *range(0x2753, 0x2756), 0x2757, 0x2763,
    0x2764, *range(0x2795, 0x2798), 0x27A1, 0x27B0, 0x27BF, 0x2934,
    0x2935, *range(0x2B05, 0x2B08), 0x2B1B, 0x2B1C, 0x2B50, 0x2B55,
    0x3030, 0x303D, 0x3297, 0x3299,
    0x1F004, 0x1F0CF, 0x1F170, 0x1F171, 0x1F17E, 0x1F17F, 0x1F18E,
    *range(0x1F191, 0x1F19B), 0x1F201, 0x1F202, 0x1F21A, 0x1F22F,
    *range(0x1F232, 0x1F23B), 0x1F250, 0x1F251,
]

REGIONAL_INDICATOR_A = 0x1F1E6


def snake_name(cp: int) -> str | None:
    try:
        name = unicodedata.name(chr(cp))
    except ValueError:
        return None
    name = re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_")
    return name or None


def main() -> int:
    rows: list[tuple[str, str]] = []
    codepoints = set(BMP_CODEPOINTS)
    for lo, hi in SMP_RANGES:
        codepoints.update(range(lo, hi + 1))
    for cp in sorted(codepoints):
        name = snake_name(cp)
        if name is not None:
            rows.append((chr(cp), name))
    for a in range(26):
        for b in range(26):
            seq = chr(REGIONAL_INDICATOR_A + a) + chr(REGIONAL_INDICATOR_A + b)
            rows.append((seq, "flag_%s%s" % (chr(ord("a") + a), chr(ord("a") + b))))

    out = Path(__file__).resolve().parent.parent / "src" / "tweetprep" / "data" / "emoji_lexicon.tsv"
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as f:
        for seq, name in rows:
            f.write(f"{seq}\t{name}\n")
    print(f"wrote {len(rows)} entries to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
