"""Enumeration caps guarding exact tabulations.

Defaults follow desk-scale budgets: up to a million wiretapper strategies,
ten million observation atoms per exact table, and 4096 sequences per source
(binary sources up to blocklength 12).  Environment variables
``MACWTAP_MAX_STRATEGIES``, ``MACWTAP_MAX_ATOMS`` and ``MACWTAP_MAX_SEQ``
override the defaults process-wide; explicit ``Caps`` instances override both.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import CapExceeded


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    return int(raw)


@dataclass(frozen=True)
class Caps:
    max_strategies: int = 1_000_000
    max_atoms: int = 10_000_000
    max_seq_per_source: int = 4096

    @classmethod
    def from_env(cls) -> "Caps":
        return cls(
            max_strategies=_env_int("MACWTAP_MAX_STRATEGIES", cls.max_strategies),
            max_atoms=_env_int("MACWTAP_MAX_ATOMS", cls.max_atoms),
            max_seq_per_source=_env_int("MACWTAP_MAX_SEQ", cls.max_seq_per_source),
        )

    def check_strategies(self, count: int) -> None:
        if count > self.max_strategies:
            raise CapExceeded("strategy enumeration", count, self.max_strategies)

    def check_atoms(self, count: int, what: str = "exact tabulation") -> None:
        if count > self.max_atoms:
            raise CapExceeded(what, count, self.max_atoms)

    def check_sequences(self, count: int) -> None:
        if count > self.max_seq_per_source:
            raise CapExceeded("per-source sequence table", count, self.max_seq_per_source)


DEFAULT_CAPS = Caps.from_env()
