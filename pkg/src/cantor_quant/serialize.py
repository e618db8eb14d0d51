"""JSON/CSV encodings of exact rationals and codebook files."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any


def rational_to_json(x: Fraction | int) -> dict[str, Any]:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator), "approx": float(x)}


def rational_str(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(value: Any) -> Fraction:
    """Exact rational from ``{"num", "den"}``, an int, or a string like ``"7/12"``, ``"0.1"``, ``"1e-12"``.

    Floats are rejected: their binary value is rarely the number that was meant.
    """
    if isinstance(value, dict):
        try:
            return Fraction(int(value["num"]), int(value["den"]))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad rational object {value!r}") from exc
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"use a string or {{num, den}} for {value!r}, not a JSON float")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse rational {value!r}") from exc
    raise ValueError(f"cannot parse rational {value!r}")


def codebook_from_json(data: Any) -> list[Fraction]:
    """Accept a bare JSON array, or the output envelope of ``sets``."""
    if isinstance(data, dict):
        try:
            data = data["results"]["canonical"]["codebook"]
        except (KeyError, TypeError):
            raise ValueError("JSON object is not a 'sets' envelope with a canonical codebook") from None
    if not isinstance(data, list) or not data:
        raise ValueError("codebook must be a non-empty JSON array")
    return [parse_rational(v) for v in data]


def loads_exact(text: str) -> Any:
    """``json.loads`` that reads JSON numbers like ``0.1`` as exact decimals."""
    return json.loads(text, parse_float=Fraction)


def load_codebook(path: str | Path) -> list[Fraction]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = loads_exact(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    return codebook_from_json(data)
