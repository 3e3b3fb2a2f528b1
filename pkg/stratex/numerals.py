"""Numeral extraction and number rendering shared by realizer, enrichment and validation."""

import re
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

NUMERAL_RE = re.compile(
    r"(?<![\w.])[-−]?(?:\d+(?:\.\d+)?|\.\d+)(?:[eE][-+]?\d+)?%?"
)

_WORDS = (
    "zero one two three four five six seven eight nine ten eleven twelve thirteen "
    "fourteen fifteen sixteen seventeen eighteen nineteen"
).split()
_TENS = "_ _ twenty thirty forty fifty sixty seventy eighty ninety".split()
_SCALES = ((10**9, "billion"), (10**6, "million"), (1000, "thousand"), (100, "hundred"))
_ORDINALS = {
    "one": "first",
    "two": "second",
    "three": "third",
    "five": "fifth",
    "eight": "eighth",
    "nine": "ninth",
    "twelve": "twelfth",
}


@dataclass(frozen=True)
class Numeral:
    text: str
    value: float
    percent: bool

    @property
    def recovered(self) -> float:
        """The fraction the numeral stands for (percentages divided by 100)."""
        return self.value / 100.0 if self.percent else self.value


def extract_numerals(text: str) -> list[Numeral]:
    found = []
    for match in NUMERAL_RE.finditer(text):
        raw = match.group()
        percent = raw.endswith("%")
        number = raw.rstrip("%").replace("−", "-")
        found.append(Numeral(raw, float(number), percent))
    return found


def round_half_up(value: float, places: int = 2) -> Decimal:
    quantum = Decimal(1).scaleb(-places)
    return Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_UP)


def percent_value(fraction: float) -> float:
    """100·fraction rounded half-up to 2 decimals (0.0361 -> 3.61)."""
    return float(round_half_up(float(Decimal(repr(float(fraction))) * 100)))


def percent_text(percent: float) -> str:
    """Minimal rendering of a percentage: 3.61, 0, 100, 33.79."""
    text = format(round_half_up(percent).normalize(), "f")
    return "0" if text in ("-0", "") else text


def two_decimals(value: float) -> str:
    """Layperson rendering: -0.20, 0.22, 1.00."""
    text = format(round_half_up(value), "f")
    return "0.00" if text == "-0.00" else text


def number_word(n: int) -> str:
    """Cardinal in words, so counts never show up as numerals: 13 -> thirteen."""
    if n < 0:
        return f"minus {number_word(-n)}"
    if n < 20:
        return _WORDS[n]
    if n < 100:
        tens, units = divmod(n, 10)
        return _TENS[tens] + (f"-{_WORDS[units]}" if units else "")
    scale, name = next((s, w) for s, w in _SCALES if n >= s)
    head, rest = divmod(n, scale)
    text = f"{number_word(head)} {name}"
    return f"{text} {number_word(rest)}" if rest else text


def ordinal_word(n: int) -> str:
    """Ordinal in words: 1 -> first, 21 -> twenty-first, 100 -> one hundredth."""
    words = number_word(n)
    head, sep, last = words.rpartition("-") if "-" in words else words.rpartition(" ")
    if last in _ORDINALS:
        last = _ORDINALS[last]
    elif last.endswith("y"):
        last = last[:-1] + "ieth"
    else:
        last += "th"
    return head + sep + last
