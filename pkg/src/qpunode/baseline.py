"""Minimal energy of brute-force search on a conventional processor.

Only two costs are counted: an n-bit comparison per inspected element, and
(optionally) fetching that element from main memory. On average N/2 elements
are inspected.

The comparator is either a fixed-width word comparator (``compare_word_bits``
set: a key of n bits costs ceil(n / word_bits) word compares) or an idealized
n-bit circuit whose energy scales as n**compare_exponent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Mapping


@dataclass(frozen=True)
class CpuModel:
    compare_base_zJ_per_bit: int
    fetch_zJ_per_element: int
    words_per_element: int = 1
    compare_exponent: int = 1
    compare_word_bits: int | None = None
    include_memory: bool = True

    def __post_init__(self):
        if min(self.compare_base_zJ_per_bit, self.fetch_zJ_per_element) < 0:
            raise ValueError("energies must be nonnegative")
        if self.words_per_element < 1 or self.compare_exponent < 0:
            raise ValueError("words_per_element must be >= 1 and compare_exponent >= 0")
        if self.compare_word_bits is not None and self.compare_word_bits < 1:
            raise ValueError("compare_word_bits must be positive")

    def energy_per_compare(self, n: int) -> int:
        if self.compare_word_bits is not None:
            words = -(-n // self.compare_word_bits)
            return self.compare_base_zJ_per_bit * self.compare_word_bits * words
        return self.compare_base_zJ_per_bit * n**self.compare_exponent

    @property
    def energy_per_fetch(self) -> int:
        # fetch_zJ_per_element is the cost of a one-word element
        return self.fetch_zJ_per_element * self.words_per_element

    def without_memory(self) -> "CpuModel":
        return replace(self, include_memory=False)

    @classmethod
    def from_dict(cls, data: Mapping) -> "CpuModel":
        keys = ("compare_base_zJ_per_bit", "fetch_zJ_per_element", "words_per_element",
                "compare_exponent", "compare_word_bits", "include_memory")
        missing = [k for k in keys[:2] if k not in data]
        if missing:
            raise ValueError(f"CPU model config lacks {missing}")
        return cls(**{k: data[k] for k in keys if k in data})


def load_cpu_model(path: str | Path | None = None) -> CpuModel:
    """Shipped defaults are illustrative CMOS figures, not the paper's i7 constants."""
    if path is None:
        text = resources.files("qpunode").joinpath("data/cpu_model.json").read_text()
    else:
        text = Path(path).read_text()
    return CpuModel.from_dict(json.loads(text))


def cpu_search_energy(N: int, model: CpuModel) -> int:
    if N < 2 or N & (N - 1):
        raise ValueError(f"database size must be a power of two >= 2, got {N}")
    n = N.bit_length() - 1
    per_element = model.energy_per_compare(n)
    if model.include_memory:
        per_element += model.energy_per_fetch
    return (N // 2) * per_element
