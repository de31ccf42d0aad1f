"""Text tokenization for the lexical ranker.

Two schemes:
  "unicode-basic"  -- built-in: split on whitespace/punctuation, lowercase,
                      character bigrams for Han/Hiragana/Katakana runs.
  "pretokenized"   -- text is already space-separated by an external
                      morphological analyzer; we only split and lowercase.
"""

from __future__ import annotations

SCHEMES = ("unicode-basic", "pretokenized")

# Han (incl. extensions), Hiragana, Katakana code-point ranges
_CJK_RANGES = (
    (0x3041, 0x309F),  # Hiragana
    (0x30A0, 0x30FF),  # Katakana
    (0x31F0, 0x31FF),  # Katakana phonetic extensions
    (0x3400, 0x4DBF),  # CJK extension A
    (0x4E00, 0x9FFF),  # CJK unified ideographs
    (0xF900, 0xFAFF),  # CJK compatibility ideographs
    (0x20000, 0x2EBEF),  # CJK extensions B..F
)


def _is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_RANGES)


def _emit_cjk_run(run: str, out: list[str]) -> None:
    # single character runs carry no bigram; keep the character itself
    if len(run) == 1:
        out.append(run)
    else:
        out.extend(run[i : i + 2] for i in range(len(run) - 1))


def tokenize(text: str, scheme: str = "unicode-basic") -> list[str]:
    if scheme == "pretokenized":
        return [tok.lower() for tok in text.split()]
    if scheme != "unicode-basic":
        raise ValueError(f"unknown tokenizer scheme {scheme!r}")

    out: list[str] = []
    word: list[str] = []
    cjk: list[str] = []
    for ch in text:
        if _is_cjk(ch):
            if word:
                out.append("".join(word).lower())
                word = []
            cjk.append(ch)
        elif ch.isalnum():
            if cjk:
                _emit_cjk_run("".join(cjk), out)
                cjk = []
            word.append(ch)
        else:
            if word:
                out.append("".join(word).lower())
                word = []
            if cjk:
                _emit_cjk_run("".join(cjk), out)
                cjk = []
    if word:
        out.append("".join(word).lower())
    if cjk:
        _emit_cjk_run("".join(cjk), out)
    return out
