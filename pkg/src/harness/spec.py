"""Experiment spec loading and provenance hashing."""

import hashlib
import json
import logging
from pathlib import Path

from pydantic import ValidationError as PydanticValidationError

from ..core.exceptions import SerializationError, SpecError
from ..core.models import ExperimentSpec
from ..core.types import BankSource
from ..storage.bank_store import load_any_bank

logger = logging.getLogger(__name__)

HASH_LENGTH = 12


def spec_hash(spec: ExperimentSpec) -> str:
    """Short sha256 of the canonical JSON form."""
    canonical = json.dumps(spec.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:HASH_LENGTH]


def resolve_bank_path(spec_dir: Path, path: str) -> Path:
    """Bank paths are relative to the spec file unless absolute."""
    candidate = Path(path)
    return candidate if candidate.is_absolute() else spec_dir / candidate


def load_spec(path: Path | str) -> ExperimentSpec:
    """
    Read and validate an experiment spec.

    File-sourced banks are opened and schema-checked here so a bad spec
    fails before any simulation runs.

    Raises:
        SpecError: for unreadable JSON, schema violations or bad bank files
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise SpecError(str(path), f"cannot read file: {e}") from e
    except json.JSONDecodeError as e:
        raise SpecError(str(path), f"invalid JSON: {e}") from e

    try:
        spec = ExperimentSpec.model_validate(data)
    except PydanticValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()
        )
        raise SpecError(str(path), problems) from e

    for variant in spec.variants:
        if variant.source is BankSource.FILE:
            bank_path = resolve_bank_path(path.parent, variant.path)
            try:
                load_any_bank(bank_path)
            except SerializationError as e:
                raise SpecError(str(path), f"variant {variant.name!r}: {e.message}") from e

    logger.info(f"Loaded spec {spec.name!r} ({spec_hash(spec)}): {len(spec.variants)} variants")
    return spec


def with_seed(spec: ExperimentSpec, seed: int) -> ExperimentSpec:
    """Spec whose seed list is replaced by a single seed."""
    return ExperimentSpec.model_validate({**spec.model_dump(), "seeds": (seed,)})
