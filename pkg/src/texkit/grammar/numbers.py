"""Number recognition over token runs: digits, decimals, English number
words (compositional to 999,999), and Chinese numerals."""

from __future__ import annotations

_EN_UNITS = {
    "zero": 0, "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11,
    "twelve": 12, "thirteen": 13, "fourteen": 14, "fifteen": 15,
    "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19,
}
_EN_TENS = {
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50,
    "sixty": 60, "seventy": 70, "eighty": 80, "ninety": 90,
}
_EN_SCALES = {"hundred": 100, "thousand": 1000}

_CHS_DIGITS = {
    "零": 0, "〇": 0, "一": 1, "二": 2, "两": 2, "三": 3, "四": 4,
    "五": 5, "六": 6, "七": 7, "八": 8, "九": 9,
}
_CHS_SCALES = {"十": 10, "百": 100, "千": 1000, "万": 10000}


def _is_digit_token(tok: str) -> bool:
    return bool(tok) and all(ch.isdigit() for ch in tok)


def parse_en_words(words: list[str]) -> int | None:
    """['three','hundred','twenty','five'] -> 325; None when not a number."""
    if not words:
        return None
    if words == ["zero"]:
        return 0
    total = 0  # completed thousand group
    current = 0  # hundreds of the running group
    sub = 0  # sub-hundred accumulator
    has_unit = has_tens = has_hundred = False
    last = "start"
    for w in words:
        if w == "and":
            if last != "scale":
                return None
            last = "and"
            continue
        if w in _EN_UNITS:
            v = _EN_UNITS[w]
            if v == 0 or has_unit or (has_tens and v >= 10):
                return None
            sub += v
            has_unit = True
            if v >= 10:
                has_tens = True  # teens occupy both slots
            last = "unit"
        elif w in _EN_TENS:
            if has_tens or has_unit:
                return None
            sub += _EN_TENS[w]
            has_tens = True
            last = "ten"
        elif w == "hundred":
            if has_hundred or not has_unit or has_tens or not (1 <= sub <= 9):
                return None
            current = sub * 100
            sub = 0
            has_unit = has_tens = False
            has_hundred = True
            last = "scale"
        elif w == "thousand":
            value = current + sub
            if value < 1 or total:
                return None
            total = value * 1000
            current = sub = 0
            has_unit = has_tens = has_hundred = False
            last = "scale"
        else:
            return None
    if last == "and":
        return None
    return total + current + sub


def _split_number_words(tok: str) -> list[str]:
    """Lowercase a token and break hyphenated compounds (twenty-two)."""
    return [p for p in tok.lower().replace("’", "'").split("-") if p]


def parse_number_token(tok: str) -> int | float | None:
    """A single token as a number: digits or (possibly hyphenated) words."""
    if _is_digit_token(tok):
        return int(tok)
    words = _split_number_words(tok)
    if words and all(w in _EN_UNITS or w in _EN_TENS or w in _EN_SCALES or w == "and" for w in words):
        return parse_en_words(words)
    if tok and all(ch in _CHS_DIGITS or ch in _CHS_SCALES for ch in tok):
        return parse_chs_number(tok)
    return None


def parse_chs_number(text: str) -> int | None:
    """Compositional Chinese numerals: 三百二十五 -> 325, 十五 -> 15."""
    if not text:
        return None
    total = 0
    section = 0  # value below the current 万 scale
    number = 0
    seen_any = False
    for ch in text:
        if ch in _CHS_DIGITS:
            if number:
                return None
            number = _CHS_DIGITS[ch]
            seen_any = True
        elif ch in _CHS_SCALES:
            scale = _CHS_SCALES[ch]
            seen_any = True
            if scale == 10000:
                section = (section + number) or 0
                if section == 0:
                    return None
                total += section * scale
                section = 0
                number = 0
            else:
                if number == 0:
                    if scale == 10 and section == 0:
                        number = 1  # bare 十 means ten
                    else:
                        return None
                section += number * scale
                number = 0
        else:
            return None
    if not seen_any:
        return None
    return total + section + number


def number_runs(surfaces: list[str], start: int, max_run: int = 8) -> list[tuple[int, int | float]]:
    """All (token-count, value) readings of a number starting at ``start``.

    Covers single tokens, multi-token word numbers (``twenty two``,
    ``three hundred and five``), decimals split as D . D, and digit strings
    with comma grouping split as D , DDD.
    """
    runs: list[tuple[int, int | float]] = []
    n = len(surfaces)
    if start >= n:
        return runs
    first = surfaces[start]
    single = parse_number_token(first)
    if single is not None:
        runs.append((1, single))
    # word-number runs
    words = _split_number_words(first)
    if words and all(w in _EN_UNITS or w in _EN_TENS or w in _EN_SCALES for w in words):
        acc = list(words)
        length = 1
        while start + length < n and length < max_run:
            more = _split_number_words(surfaces[start + length])
            if not more or not all(
                w in _EN_UNITS or w in _EN_TENS or w in _EN_SCALES or w == "and" for w in more
            ):
                break
            acc.extend(more)
            length += 1
            value = parse_en_words(acc)
            if value is not None:
                runs.append((length, value))
    # digit-based composites
    if _is_digit_token(first):
        # decimal: D . D
        if (
            start + 2 < n
            and surfaces[start + 1] == "."
            and _is_digit_token(surfaces[start + 2])
        ):
            runs.append((3, float(f"{first}.{surfaces[start + 2]}")))
        # comma grouping: D(,DDD)+
        digits = first
        length = 1
        while (
            start + length + 1 < n
            and surfaces[start + length] == ","
            and _is_digit_token(surfaces[start + length + 1])
            and len(surfaces[start + length + 1]) == 3
        ):
            digits += surfaces[start + length + 1]
            length += 2
            runs.append((length, int(digits)))
    return runs
