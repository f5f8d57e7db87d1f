"""Reduction of time/quantity parse trees to structured JSON values.

Each rule label of the bundled grammars has a registered composition
function; evaluation is bottom-up. Time points serialize as
``{"value": [year[, month[, day[, hour]]]]}`` with precision encoded by the
array length, durations as ``{"delta": {unit: count}}``, and quantities as
``{"value": n, "unit": name-or-null}``. Relative expressions shift the
explicit reference time; month shifts clamp day-of-month overflow.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass
from typing import Callable

from ..errors import NormalizationError
from .earley import Leaf, ParseTree

KIND_TIME_POINT = "time_point"
KIND_TIME_DELTA = "time_delta"
KIND_QUANTITY = "quantity"


@dataclass(frozen=True)
class ReferenceTime:
    year: int
    month: int
    day: int
    hour: int = 0

    def __post_init__(self):
        _dt.datetime(self.year, self.month, self.day, self.hour)  # validates

    @classmethod
    def from_iso(cls, text: str) -> "ReferenceTime":
        dt = _dt.datetime.fromisoformat(text)
        return cls(dt.year, dt.month, dt.day, dt.hour)

    @classmethod
    def now(cls) -> "ReferenceTime":
        dt = _dt.datetime.now()
        return cls(dt.year, dt.month, dt.day, dt.hour)

    def date(self) -> _dt.date:
        return _dt.date(self.year, self.month, self.day)

    def datetime(self) -> _dt.datetime:
        return _dt.datetime(self.year, self.month, self.day, self.hour)


@dataclass(frozen=True)
class SemanticValue:
    kind: str
    payload: dict

    def to_json(self) -> dict:
        return self.payload


def days_in_month(year: int, month: int) -> int:
    if month == 12:
        nxt = _dt.date(year + 1, 1, 1)
    else:
        nxt = _dt.date(year, month + 1, 1)
    return (nxt - _dt.date(year, month, 1)).days


def shift_months(year: int, month: int, count: int) -> tuple[int, int]:
    index = year * 12 + (month - 1) + count
    return index // 12, index % 12 + 1


def shift_date_by_months(date: _dt.date, count: int) -> _dt.date:
    year, month = shift_months(date.year, date.month, count)
    return _dt.date(year, month, min(date.day, days_in_month(year, month)))


# ---------------------------------------------------------------------------
# unit lexicons
# ---------------------------------------------------------------------------

TIME_UNITS = {
    "year": "year", "years": "year", "年": "year",
    "month": "month", "months": "month", "个月": "month",
    "week": "week", "weeks": "week", "周": "week", "星期": "week",
    "day": "day", "days": "day", "天": "day",
    "hour": "hour", "hours": "hour", "小时": "hour",
    "minute": "minute", "minutes": "minute", "分钟": "minute",
    "second": "second", "seconds": "second", "秒": "second",
}

QUANTITY_UNITS = {
    "kg": "kilogram", "kilogram": "kilogram", "kilograms": "kilogram",
    "公斤": "kilogram", "千克": "kilogram",
    "g": "gram", "gram": "gram", "grams": "gram", "克": "gram",
    "mg": "milligram", "milligram": "milligram", "milligrams": "milligram",
    "ton": "ton", "tons": "ton", "tonne": "ton", "tonnes": "ton", "吨": "ton",
    "lb": "pound", "lbs": "pound", "pound": "pound", "pounds": "pound",
    "oz": "ounce", "ounce": "ounce", "ounces": "ounce",
    "km": "kilometer", "kilometer": "kilometer", "kilometers": "kilometer",
    "kilometre": "kilometer", "kilometres": "kilometer", "公里": "kilometer", "千米": "kilometer",
    "m": "meter", "meter": "meter", "meters": "meter",
    "metre": "meter", "metres": "meter", "米": "meter",
    "cm": "centimeter", "centimeter": "centimeter", "centimeters": "centimeter", "厘米": "centimeter",
    "mm": "millimeter", "millimeter": "millimeter", "millimeters": "millimeter", "毫米": "millimeter",
    "mi": "mile", "mile": "mile", "miles": "mile", "英里": "mile",
    "ft": "foot", "foot": "foot", "feet": "foot", "英尺": "foot",
    "inch": "inch", "inches": "inch", "英寸": "inch",
    "yd": "yard", "yard": "yard", "yards": "yard",
    "l": "liter", "liter": "liter", "liters": "liter",
    "litre": "liter", "litres": "liter", "升": "liter",
    "ml": "milliliter", "milliliter": "milliliter", "milliliters": "milliliter", "毫升": "milliliter",
    "gal": "gallon", "gallon": "gallon", "gallons": "gallon",
    "%": "percent", "percent": "percent", "百分点": "percent",
    "dollar": "dollar", "dollars": "dollar", "美元": "dollar",
    "euro": "euro", "euros": "euro", "欧元": "euro",
    "yuan": "yuan", "元": "yuan",
    "degree": "degree", "degrees": "degree", "度": "degree",
    "celsius": "celsius", "摄氏度": "celsius", "fahrenheit": "fahrenheit",
    "byte": "byte", "bytes": "byte", "字节": "byte",
    "kb": "kilobyte", "kilobyte": "kilobyte", "kilobytes": "kilobyte",
    "mb": "megabyte", "megabyte": "megabyte", "megabytes": "megabyte",
    "gb": "gigabyte", "gigabyte": "gigabyte", "gigabytes": "gigabyte",
    "tb": "terabyte", "terabyte": "terabyte", "terabytes": "terabyte",
    "岁": "year", "斤": "jin",
}


# ---------------------------------------------------------------------------
# composition registry
# ---------------------------------------------------------------------------

_REGISTRY: dict[str, Callable] = {}


def composes(*labels: str):
    def deco(fn):
        for label in labels:
            _REGISTRY[label] = fn
        return fn
    return deco


def registered_labels() -> set[str]:
    return set(_REGISTRY)


def _leaf_number(node) -> int | float:
    if isinstance(node, Leaf) and node.value is not None:
        return node.value
    raise NormalizationError("expected a number leaf")


def _find(children: list, tag: str) -> dict:
    for c in children:
        if isinstance(c, dict) and c.get("t") == tag:
            return c
    raise NormalizationError(f"expected a {tag} child")


def _point(values: list[int]) -> dict:
    return {"t": KIND_TIME_POINT, "value": values}


# -- units and deltas --------------------------------------------------------

for _label, _unit in [
    ("u_year", "year"), ("u_years", "year"), ("u_month", "month"),
    ("u_months", "month"), ("u_week", "week"), ("u_weeks", "week"),
    ("u_day", "day"), ("u_days", "day"), ("u_hour", "hour"),
    ("u_hours", "hour"), ("u_minute", "minute"), ("u_minutes", "minute"),
    ("u_second", "second"), ("u_seconds", "second"),
    ("cu_year", "year"), ("cu_month", "month"), ("cu_week", "week"),
    ("cu_week2", "week"), ("cu_day", "day"), ("cu_hour", "hour"),
    ("cu_minute", "minute"), ("cu_second", "second"),
]:
    def _make_unit(unit):
        def fn(children, ref):
            return {"t": "unit", "name": unit}
        return fn
    _REGISTRY[_label] = _make_unit(_unit)


@composes("delta_count", "c_delta")
def _delta_count(children, ref):
    count = _leaf_number(children[0])
    unit = _find(children, "unit")["name"]
    if count != int(count):
        raise NormalizationError("time deltas need whole counts")
    return {"t": "delta", "unit": unit, "count": int(count)}


@composes("delta_a", "delta_an")
def _delta_one(children, ref):
    unit = _find(children, "unit")["name"]
    return {"t": "delta", "unit": unit, "count": 1}


def _point_from_delta(delta: dict, ref: ReferenceTime, sign: int) -> dict:
    unit = delta["unit"]
    count = delta["count"] * sign
    if unit == "year":
        return _point([ref.year + count])
    if unit == "month":
        year, month = shift_months(ref.year, ref.month, count)
        return _point([year, month])
    if unit in ("week", "day"):
        days = count * (7 if unit == "week" else 1)
        d = ref.date() + _dt.timedelta(days=days)
        return _point([d.year, d.month, d.day])
    if unit in ("hour", "minute", "second"):
        seconds = {"hour": 3600, "minute": 60, "second": 1}[unit] * count
        dt = ref.datetime() + _dt.timedelta(seconds=seconds)
        return _point([dt.year, dt.month, dt.day, dt.hour])
    raise NormalizationError(f"unsupported time unit {unit!r}")


@composes("time_ago", "time_earlier", "c_ago", "c_ago2")
def _time_ago(children, ref):
    return _point_from_delta(_find(children, "delta"), ref, -1)


@composes("time_later", "time_from_now", "time_in", "c_later", "c_later2")
def _time_later(children, ref):
    return _point_from_delta(_find(children, "delta"), ref, +1)


@composes("time_duration", "c_duration")
def _time_duration(children, ref):
    delta = _find(children, "delta")
    return {"t": KIND_TIME_DELTA, "delta": {delta["unit"]: delta["count"]}}


# -- day names ----------------------------------------------------------------

for _label, _offset in [
    ("day_today", 0), ("day_tomorrow", 1), ("day_yesterday", -1),
    ("day_after_tomorrow", 2), ("day_before_yesterday", -2),
    ("cd_today", 0), ("cd_tomorrow", 1), ("cd_yesterday", -1),
    ("cd_day_after_tomorrow", 2), ("cd_day_before_yesterday", -2),
]:
    def _make_day(offset):
        def fn(children, ref):
            return {"t": "dayoff", "offset": offset}
        return fn
    _REGISTRY[_label] = _make_day(_offset)


@composes("time_dayname", "c_dayname")
def _time_dayname(children, ref):
    off = _find(children, "dayoff")["offset"]
    d = ref.date() + _dt.timedelta(days=off)
    return _point([d.year, d.month, d.day])


# -- clocks -------------------------------------------------------------------


def _clock(hour: int, minute: int = 0) -> dict:
    if not (0 <= hour <= 23 and 0 <= minute <= 59):
        raise NormalizationError(f"invalid clock time {hour}:{minute:02d}")
    return {"t": "clock", "hour": hour, "minute": minute}


@composes("clock_pm")
def _clock_pm(children, ref):
    h = int(_leaf_number(children[0]))
    if not (1 <= h <= 12):
        raise NormalizationError(f"bad pm hour {h}")
    return _clock(h % 12 + 12)


@composes("clock_am")
def _clock_am(children, ref):
    h = int(_leaf_number(children[0]))
    if not (1 <= h <= 12):
        raise NormalizationError(f"bad am hour {h}")
    return _clock(h % 12)


@composes("clock_hm")
def _clock_hm(children, ref):
    nums = [c for c in children if isinstance(c, Leaf) and c.value is not None]
    return _clock(int(nums[0].value), int(nums[1].value))


@composes("clock_hm_pm")
def _clock_hm_pm(children, ref):
    nums = [c for c in children if isinstance(c, Leaf) and c.value is not None]
    h = int(nums[0].value)
    if not (1 <= h <= 12):
        raise NormalizationError(f"bad pm hour {h}")
    return _clock(h % 12 + 12, int(nums[1].value))


@composes("clock_hm_am")
def _clock_hm_am(children, ref):
    nums = [c for c in children if isinstance(c, Leaf) and c.value is not None]
    h = int(nums[0].value)
    if not (1 <= h <= 12):
        raise NormalizationError(f"bad am hour {h}")
    return _clock(h % 12, int(nums[1].value))


@composes("clock_oclock", "c_clock")
def _clock_oclock(children, ref):
    h = int(_leaf_number(children[0]))
    return _clock(h)


@composes("time_clock_only", "c_clock_only")
def _time_clock_only(children, ref):
    clock = _find(children, "clock")
    return _point([ref.year, ref.month, ref.day, clock["hour"]])


@composes("time_clock_day", "time_day_clock", "c_day_clock")
def _time_clock_day(children, ref):
    clock = _find(children, "clock")
    off = _find(children, "dayoff")["offset"]
    d = ref.date() + _dt.timedelta(days=off)
    return _point([d.year, d.month, d.day, clock["hour"]])


# -- absolute dates -----------------------------------------------------------


def _checked_date(year: int, month: int, day: int) -> dict:
    try:
        _dt.date(year, month, day)
    except ValueError as exc:
        raise NormalizationError(f"invalid date {year}-{month}-{day}: {exc}")
    return _point([year, month, day])


@composes("date_iso")
def _date_iso(children, ref):
    nums = [int(_leaf_number(c)) for c in children if isinstance(c, Leaf) and c.value is not None]
    year, month, day = nums
    if year < 1000:
        raise NormalizationError("ISO dates need 4-digit years")
    return _checked_date(year, month, day)


MONTH_NUMBERS = {
    "mon_jan": 1, "mon_feb": 2, "mon_mar": 3, "mon_apr": 4, "mon_may": 5,
    "mon_jun": 6, "mon_jul": 7, "mon_aug": 8, "mon_sep": 9, "mon_oct": 10,
    "mon_nov": 11, "mon_dec": 12,
}

for _label, _num in MONTH_NUMBERS.items():
    def _make_month(num):
        def fn(children, ref):
            return {"t": "monthname", "month": num}
        return fn
    _REGISTRY[_label] = _make_month(_num)


@composes("date_mdy")
def _date_mdy(children, ref):
    month = _find(children, "monthname")["month"]
    nums = [int(_leaf_number(c)) for c in children if isinstance(c, Leaf) and c.value is not None]
    day, year = nums[0], nums[1]
    return _checked_date(year, month, day)


@composes("date_md")
def _date_md(children, ref):
    month = _find(children, "monthname")["month"]
    nums = [int(_leaf_number(c)) for c in children if isinstance(c, Leaf) and c.value is not None]
    return _checked_date(ref.year, month, nums[0])


@composes("time_date")
def _time_date(children, ref):
    return _find(children, KIND_TIME_POINT)


@composes("c_date_ymd")
def _c_date_ymd(children, ref):
    nums = [int(_leaf_number(c)) for c in children if isinstance(c, Leaf) and c.value is not None]
    year, month, day = nums
    return _checked_date(year, month, day)


@composes("c_date_md")
def _c_date_md(children, ref):
    nums = [int(_leaf_number(c)) for c in children if isinstance(c, Leaf) and c.value is not None]
    return _checked_date(ref.year, nums[0], nums[1])


@composes("c_day_of_month")
def _c_day_of_month(children, ref):
    day = int(_leaf_number(children[0]))
    return _checked_date(ref.year, ref.month, day)


@composes("c_last_month_day")
def _c_last_month_day(children, ref):
    year, month = shift_months(ref.year, ref.month, -1)
    nums = [int(_leaf_number(c)) for c in children if isinstance(c, Leaf) and c.value is not None]
    day = min(nums[0], days_in_month(year, month))
    if nums[0] < 1:
        raise NormalizationError("day of month must be positive")
    return _point([year, month, day])


# -- quantities ---------------------------------------------------------------


@composes("qunit_word", "cqunit_word")
def _qunit_word(children, ref):
    leaf = children[0]
    if not isinstance(leaf, Leaf):
        raise NormalizationError("expected a unit token")
    canonical = QUANTITY_UNITS.get(leaf.text.lower())
    if canonical is None:
        raise NormalizationError(f"unknown unit {leaf.text!r}")
    return {"t": "qunit", "name": canonical}


@composes("qty_unit", "cq_unit")
def _qty_unit(children, ref):
    value = _leaf_number(children[0])
    return {"t": KIND_QUANTITY, "value": value, "unit": _find(children, "qunit")["name"]}


@composes("qty_bare", "cq_bare")
def _qty_bare(children, ref):
    return {"t": KIND_QUANTITY, "value": _leaf_number(children[0]), "unit": None}


_FINAL_KINDS = (KIND_TIME_POINT, KIND_TIME_DELTA, KIND_QUANTITY)


def evaluate(node, ref: ReferenceTime):
    """Bottom-up evaluation of one tree node."""
    if isinstance(node, Leaf):
        return node
    fn = _REGISTRY.get(node.rule_label)
    if fn is None:
        raise NormalizationError(
            f"no composition function registered for rule label {node.rule_label!r}"
        )
    children = [evaluate(c, ref) for c in node.children]
    return fn(children, ref)


def normalize(tree: ParseTree, ref: ReferenceTime) -> SemanticValue:
    """Reduce a parse tree to its final semantic value."""
    value = evaluate(tree, ref)
    if not isinstance(value, dict) or value.get("t") not in _FINAL_KINDS:
        raise NormalizationError(
            f"rule {tree.rule_label!r} does not produce a final semantic value"
        )
    payload = {k: v for k, v in value.items() if k != "t"}
    return SemanticValue(kind=value["t"], payload=payload)
