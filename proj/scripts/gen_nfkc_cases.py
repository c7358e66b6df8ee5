#!/usr/bin/env python3
"""Regenerate tests/data/nfkc_cases.tsv.

Each line: <hex of input UTF-8> TAB <hex of NFKC(input) UTF-8>.
Expected values come from Python's unicodedata, an implementation
independent of the library under test. Only codepoints assigned in this
interpreter's Unicode version are used, so the expectations stay valid for
any newer Unicode table (normalization of assigned codepoints is frozen by
the Unicode stability policy).
"""

import random
import sys
import unicodedata
from pathlib import Path

FIXED = [
    "",
    "abc",
    "ﬁle ﬂow oﬀice",           # latin ligatures
    "ＡＢＣ１２３",                # fullwidth forms
    "①②③⑩",                  # circled digits
    "x² + y³ = z¹",             # superscripts
    "Ⅰ Ⅳ Ⅷ ⅸ",              # roman numerals
    "é ä õ",  # combining marks -> precomposed
    "õäöüšž ÕÄÖÜŠŽ",           # Estonian letters are fixed points
    "½ ¼ ¾",                    # vulgar fractions
    "Ångström Ωhm",  # Angstrom sign, Ohm sign
    "㎒ ㎞ ㎡ ㍿",               # squared/abbreviation compatibility forms
    "한국어 조합",                 # Hangul syllables (already composed)
    "각",       # Hangul jamo -> composed syllable
    "ｶﾀｶﾅ",                     # halfwidth katakana
    "…",                        # ellipsis is an NFKC fixed point
    " space",              # NBSP -> space under NFKC
    "ﬁﬁﬁ",       # repeated ligature
    "Tere\ntulemast\tkoju",     # control whitespace untouched
]


def assigned_codepoints(rng: random.Random, n: int) -> str:
    out = []
    while len(out) < n:
        cp = rng.randrange(0x20, 0x2FA20)
        ch = chr(cp)
        if 0xD800 <= cp <= 0xDFFF:
            continue
        if unicodedata.category(ch) in ("Cn", "Co", "Cc"):
            continue
        out.append(ch)
    return "".join(out)


def main() -> None:
    rng = random.Random(20260817)
    cases = list(FIXED)
    for _ in range(200):
        cases.append(assigned_codepoints(rng, rng.randrange(1, 40)))

    out_path = Path(__file__).resolve().parent.parent / "tests" / "data" / "nfkc_cases.tsv"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("w", encoding="ascii") as f:
        f.write("# input_hex<TAB>nfkc_hex; regenerate with scripts/gen_nfkc_cases.py\n")
        for case in cases:
            expected = unicodedata.normalize("NFKC", case)
            f.write(case.encode("utf-8").hex() + "\t" + expected.encode("utf-8").hex() + "\n")
    print(f"wrote {len(cases)} cases to {out_path}", file=sys.stderr)


if __name__ == "__main__":
    main()
