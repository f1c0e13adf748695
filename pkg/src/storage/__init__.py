"""Storage module for filter banks."""

from .bank_store import (
    BankStore,
    bank_from_dict,
    bank_to_dict,
    load_any_bank,
    load_bank,
    load_quantized_bank,
    save_bank,
    save_quantized_bank,
)

__all__ = [
    "BankStore",
    "bank_from_dict",
    "bank_to_dict",
    "load_any_bank",
    "load_bank",
    "load_quantized_bank",
    "save_bank",
    "save_quantized_bank",
]
