"""
JSON storage for filter banks.

A float bank is stored as

    {"schema_version": 1, "kind": "float", "beta2": ..., "sample_rate": ...,
     "step_sizes": [...], "T": 25, "filters": [[[re, im], ...], ...],
     "nonlinear_scales": [...]}

with the K+1 unique taps of each filter. A quantized bank has kind
"quantized" and per filter {"word_bits", "scale_exp", "taps"} where taps are
integer [re, im] code pairs. Floats are written with repr precision, so a
save/load cycle is bit-exact.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Optional

import numpy as np

from ..core.exceptions import SerializationError
from ..core.models import (
    FilterBank,
    FirFilter,
    FixedFormat,
    QuantizedFilter,
    QuantizedFilterBank,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
_COMMON_KEYS = ("schema_version", "kind", "beta2", "sample_rate", "step_sizes", "T", "filters")


def _header(bank: FilterBank | QuantizedFilterBank, kind: str) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "beta2": float(bank.beta2),
        "sample_rate": float(bank.sample_rate),
        "step_sizes": [float(s) for s in bank.step_sizes],
        "T": bank.num_taps,
    }


def bank_to_dict(bank: FilterBank) -> dict[str, Any]:
    """Float bank -> JSON-ready dict."""
    data = _header(bank, "float")
    data["filters"] = [
        [[float(tap.real), float(tap.imag)] for tap in fir.unique_taps] for fir in bank.filters
    ]
    data["nonlinear_scales"] = [float(s) for s in bank.nonlinear_scales]
    return data


def quantized_bank_to_dict(bank: QuantizedFilterBank) -> dict[str, Any]:
    """Quantized bank -> JSON-ready dict with integer taps."""
    data = _header(bank, "quantized")
    data["filters"] = [
        {
            "word_bits": q.fmt.word_bits,
            "scale_exp": q.fmt.scale_exp,
            "taps": [[int(re), int(im)] for re, im in zip(q.re_codes, q.im_codes)],
        }
        for q in bank.filters
    ]
    data["nonlinear_scales"] = [float(s) for s in bank.nonlinear_scales]
    return data


def _require(condition: bool, source: str, message: str) -> None:
    if not condition:
        raise SerializationError(source, message)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _check_common(data: Any, kind: str, source: str) -> None:
    _require(isinstance(data, dict), source, "document must be a JSON object")
    missing = [key for key in _COMMON_KEYS if key not in data]
    _require(not missing, source, f"missing keys: {', '.join(missing)}")
    _require(
        data["schema_version"] == SCHEMA_VERSION,
        source,
        f"unsupported schema_version {data['schema_version']!r}",
    )
    _require(data["kind"] == kind, source, f"expected a {kind} bank, found {data['kind']!r}")
    _require(_is_number(data["beta2"]), source, "beta2 must be a number")
    _require(_is_number(data["sample_rate"]) and data["sample_rate"] > 0, source, "sample_rate must be positive")
    _require(
        isinstance(data["step_sizes"], list) and all(_is_number(s) for s in data["step_sizes"]),
        source,
        "step_sizes must be a list of numbers",
    )
    _require(_is_int(data["T"]) and data["T"] % 2 == 1, source, "T must be an odd integer")
    _require(isinstance(data["filters"], list) and data["filters"], source, "filters must be a nonempty list")
    scales = data.get("nonlinear_scales")
    _require(
        scales is None or (isinstance(scales, list) and all(_is_number(s) for s in scales)),
        source,
        "nonlinear_scales must be a list of numbers",
    )


def _check_pairs(pairs: Any, num_unique: int, is_valid: Any, source: str, index: int) -> None:
    _require(
        isinstance(pairs, list) and len(pairs) == num_unique,
        source,
        f"filter {index} must hold {num_unique} unique taps",
    )
    for pair in pairs:
        _require(
            isinstance(pair, list) and len(pair) == 2 and all(is_valid(v) for v in pair),
            source,
            f"filter {index} has a malformed tap {pair!r}",
        )


def bank_from_dict(data: Any, source: str = "<dict>") -> FilterBank:
    """Validate and build a float bank."""
    _check_common(data, "float", source)
    num_unique = data["T"] // 2 + 1
    filters = []
    for index, pairs in enumerate(data["filters"]):
        _check_pairs(pairs, num_unique, _is_number, source, index)
        taps = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
        filters.append(FirFilter(unique_taps=taps))
    try:
        return FilterBank(
            filters=tuple(filters),
            step_sizes=tuple(float(s) for s in data["step_sizes"]),
            beta2=float(data["beta2"]),
            sample_rate=float(data["sample_rate"]),
            nonlinear_scales=data.get("nonlinear_scales"),
        )
    except ValueError as e:
        raise SerializationError(source, str(e)) from e


def quantized_bank_from_dict(data: Any, source: str = "<dict>") -> QuantizedFilterBank:
    """Validate and build a quantized bank."""
    _check_common(data, "quantized", source)
    num_unique = data["T"] // 2 + 1
    filters = []
    for index, entry in enumerate(data["filters"]):
        _require(
            isinstance(entry, dict) and _is_int(entry.get("word_bits")) and _is_int(entry.get("scale_exp")),
            source,
            f"filter {index} needs integer word_bits and scale_exp",
        )
        _check_pairs(entry.get("taps"), num_unique, _is_int, source, index)
        codes = np.array(entry["taps"], dtype=np.int64)
        try:
            filters.append(
                QuantizedFilter(
                    re_codes=codes[:, 0],
                    im_codes=codes[:, 1],
                    fmt=FixedFormat(word_bits=entry["word_bits"], scale_exp=entry["scale_exp"]),
                )
            )
        except ValueError as e:
            raise SerializationError(source, f"filter {index}: {e}") from e
    try:
        return QuantizedFilterBank(
            filters=tuple(filters),
            step_sizes=tuple(float(s) for s in data["step_sizes"]),
            beta2=float(data["beta2"]),
            sample_rate=float(data["sample_rate"]),
            nonlinear_scales=data.get("nonlinear_scales"),
        )
    except ValueError as e:
        raise SerializationError(source, str(e)) from e


def _read_json(path: Path) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise SerializationError(str(path), "file not found") from e
    except json.JSONDecodeError as e:
        raise SerializationError(str(path), f"invalid JSON: {e}") from e


def _write_json(data: dict[str, Any], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2)
    return path


def save_bank(bank: FilterBank, path: Path | str) -> Path:
    return _write_json(bank_to_dict(bank), Path(path))


def load_bank(path: Path | str) -> FilterBank:
    return bank_from_dict(_read_json(Path(path)), str(path))


def save_quantized_bank(bank: QuantizedFilterBank, path: Path | str) -> Path:
    return _write_json(quantized_bank_to_dict(bank), Path(path))


def load_quantized_bank(path: Path | str) -> QuantizedFilterBank:
    return quantized_bank_from_dict(_read_json(Path(path)), str(path))


def load_any_bank(path: Path | str) -> FilterBank | QuantizedFilterBank:
    """Load a bank of either kind, dispatching on the ``kind`` field."""
    data = _read_json(Path(path))
    if isinstance(data, dict) and data.get("kind") == "quantized":
        return quantized_bank_from_dict(data, str(path))
    return bank_from_dict(data, str(path))


class BankStore:
    """
    Directory of named filter banks.

    Usage:
        store = BankStore(out_dir)
        store.save("lsco_T25", bank)
        bank = store.load("lsco_T25")
    """

    def __init__(self, data_dir: Optional[Path] = None):
        """Initialize store with a data directory."""
        if data_dir is None:
            data_dir = Path(__file__).parent.parent.parent / "data" / "banks"

        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)

    def _get_path(self, name: str) -> Path:
        return self.data_dir / f"{name}.json"

    def save(self, name: str, bank: FilterBank | QuantizedFilterBank) -> Path:
        """Save a bank; returns the file path."""
        path = self._get_path(name)
        if isinstance(bank, QuantizedFilterBank):
            save_quantized_bank(bank, path)
        else:
            save_bank(bank, path)
        logger.info(f"Saved bank {name} -> {path}")
        return path

    def load(self, name: str) -> Optional[FilterBank | QuantizedFilterBank]:
        """Load a bank; returns None if it does not exist."""
        path = self._get_path(name)
        if not path.exists():
            return None
        return load_any_bank(path)

    def exists(self, name: str) -> bool:
        return self._get_path(name).exists()

    def list_all(self) -> list[str]:
        """Names of all stored banks."""
        return sorted(p.stem for p in self.data_dir.glob("*.json"))
