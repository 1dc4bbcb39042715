"""Wiretapper strategies and the observation maps they induce.

A strategy is a sorted set of tapped positions (1-based, mirroring block
indices 1..n) plus, for model1 only, a per-tap decision of which user to
observe.  Observation symbols are tagged unions with a stable canonical
encoding so exact distributions over observation sequences can be tabulated:

=============  =======================================  =====================
model          tapped position                          untapped position
=============  =======================================  =====================
model1         ("user", j, x), code x (j=1) or          ("erased",), code
               alph_x1 + x (j=2)                        alph_x1 + alph_x2
model2         ("sum", s), code s                       ("erased",), code
                                                        alph_x1 + alph_x2 - 1
model3         ("pair", x1, x2), code x1*alph_x2 + x2   ("erased",), code
                                                        alph_x1*alph_x2
generalized    ("pair", x1, x2), code x1*alph_x2 + x2   ("v", w), code
                                                        alph_x1*alph_x2 + w
=============  =======================================  =====================

Sequence-level tables are support-compact: each position contributes a radix
equal to its per-position support (an erased position contributes radix 1),
and the sequence code is the big-endian mixed-radix number of the per-position
codes within their supports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator, Optional, Sequence

import numpy as np

from ._tables import digit_table
from .channels import AuxInput, CondKernel, MacWiretapSpec, Model, concat_aux, sum_kernel
from .errors import DimensionMismatch, ValidationError
from .limits import DEFAULT_CAPS, Caps

ERASED = ("erased",)


@dataclass(frozen=True, slots=True)
class Strategy:
    model: Model
    n: int
    positions: tuple[int, ...]
    decisions: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        prev = 0
        for p in self.positions:
            if p <= prev:
                raise ValidationError("positions must be strictly increasing and >= 1")
            prev = p
        if prev > self.n:
            raise ValidationError(f"positions {self.positions} outside 1..{self.n}")
        dec = self.decisions
        if self.model is Model.MODEL1:
            if dec is None or len(dec) != len(self.positions):
                raise ValidationError("model1 needs one decision per tapped position")
            for d in dec:
                if d != 1 and d != 2:
                    raise ValidationError("decisions must be 1 or 2")
        elif dec is not None:
            raise ValidationError(f"{self.model.value} takes no decision sequence")

    @property
    def mu(self) -> int:
        return len(self.positions)

    def taps_on_user(self, j: int) -> int:
        """Number of positions where user ``j``'s symbol is seen directly."""
        if self.model is Model.MODEL1:
            assert self.decisions is not None
            return sum(1 for d in self.decisions if d == j)
        return self.mu

    def to_jsonable(self) -> dict:
        return {
            "model": self.model.value,
            "n": self.n,
            "positions": list(self.positions),
            "decisions": None if self.decisions is None else list(self.decisions),
        }

    @staticmethod
    def from_jsonable(d: dict) -> "Strategy":
        dec = d.get("decisions")
        return Strategy(
            Model(d["model"]),
            int(d["n"]),
            tuple(int(p) for p in d["positions"]),
            None if dec is None else tuple(int(x) for x in dec),
        )


def strategy_count(model: Model, n: int, mu: int) -> int:
    """Closed-form strategy count: C(n, mu) times 2^mu for model1."""
    if not 0 <= mu <= n:
        raise ValidationError(f"mu={mu} outside 0..{n}")
    base = math.comb(n, mu)
    return base << mu if model is Model.MODEL1 else base


def _trusted_strategy(model: Model, n: int, pos: tuple, dec) -> Strategy:
    # enumeration-internal constructor: inputs valid by construction
    s = object.__new__(Strategy)
    object.__setattr__(s, "model", model)
    object.__setattr__(s, "n", n)
    object.__setattr__(s, "positions", pos)
    object.__setattr__(s, "decisions", dec)
    return s


def enumerate_strategies(
    model: Model, n: int, mu: int, caps: Caps = DEFAULT_CAPS
) -> Iterator[Strategy]:
    """All strategies in lexicographic order (positions major, decisions minor)."""
    caps.check_strategies(strategy_count(model, n, mu))
    make = _trusted_strategy
    if model is Model.MODEL1:
        for pos in combinations(range(1, n + 1), mu):
            for dec in product((1, 2), repeat=mu):
                yield make(model, n, pos, dec)
    else:
        for pos in combinations(range(1, n + 1), mu):
            yield make(model, n, pos, None)


@dataclass(frozen=True)
class Observation:
    """Per-position wiretapper view; symbols follow the module encoding table."""

    symbols: tuple[tuple, ...]


def observe(
    x1: Sequence[int],
    x2: Sequence[int],
    v: Optional[Sequence[int]],
    strat: Strategy,
) -> Observation:
    """Apply a strategy to transmitted sequences (and ``v`` when generalized)."""
    n = strat.n
    if len(x1) != n or len(x2) != n:
        raise DimensionMismatch(f"sequences must have length {n}")
    if strat.model is Model.GENERALIZED:
        if v is None or len(v) != n:
            raise ValidationError("generalized observation needs a v-sequence of length n")
    elif v is not None:
        raise ValidationError(f"{strat.model.value} takes no v-sequence")

    tapped = {p: k for k, p in enumerate(strat.positions)}
    out = []
    for i in range(1, n + 1):
        k = tapped.get(i)
        if k is None:
            out.append(("v", int(v[i - 1])) if strat.model is Model.GENERALIZED else ERASED)
        elif strat.model is Model.MODEL1:
            j = strat.decisions[k]
            out.append(("user", j, int(x1[i - 1] if j == 1 else x2[i - 1])))
        elif strat.model is Model.MODEL2:
            out.append(("sum", int(x1[i - 1]) + int(x2[i - 1])))
        else:
            out.append(("pair", int(x1[i - 1]), int(x2[i - 1])))
    return Observation(tuple(out))


# ---------------------------------------------------------------------------
# observation space and exact kernels


def letter_code(symbol: tuple, spec: MacWiretapSpec) -> int:
    """Canonical single-letter integer code (full alphabet, not support-compact)."""
    kind = symbol[0]
    if kind == "user":
        _, j, x = symbol
        return x if j == 1 else spec.alph_x1 + x
    if kind == "sum":
        return symbol[1]
    if kind == "pair":
        return symbol[1] * spec.alph_x2 + symbol[2]
    if kind == "v":
        return spec.alph_x1 * spec.alph_x2 + symbol[1]
    if kind == "erased":
        if spec.model is Model.MODEL1:
            return spec.alph_x1 + spec.alph_x2
        if spec.model is Model.MODEL2:
            return spec.alph_x1 + spec.alph_x2 - 1
        return spec.alph_x1 * spec.alph_x2
    raise ValidationError(f"unknown symbol {symbol!r}")


@dataclass(frozen=True)
class ZSpace:
    """Support-compact product space of a strategy's observation sequences.

    ``letters[i]`` lists position i's possible symbols; ``encode`` maps a full
    symbol tuple to the big-endian mixed-radix index over those supports.
    """

    letters: tuple[tuple[tuple, ...], ...]

    @property
    def radices(self) -> tuple[int, ...]:
        return tuple(len(ls) for ls in self.letters)

    @property
    def size(self) -> int:
        return int(np.prod([len(ls) for ls in self.letters], dtype=np.int64)) if self.letters else 1

    def encode(self, symbols: Sequence[tuple]) -> int:
        idx = 0
        for ls, s in zip(self.letters, symbols):
            idx = idx * len(ls) + ls.index(s)
        return idx

    def decode(self, idx: int) -> tuple[tuple, ...]:
        out = []
        for ls in reversed(self.letters):
            out.append(ls[idx % len(ls)])
            idx //= len(ls)
        return tuple(reversed(out))


def _position_letters(strat: Strategy, spec: MacWiretapSpec) -> list[tuple[tuple, ...]]:
    tapped = {p: k for k, p in enumerate(strat.positions)}
    letters: list[tuple[tuple, ...]] = []
    for i in range(1, strat.n + 1):
        k = tapped.get(i)
        if k is None:
            if strat.model is Model.GENERALIZED:
                letters.append(tuple(("v", w) for w in range(spec.alph_v)))
            else:
                letters.append((ERASED,))
        elif strat.model is Model.MODEL1:
            j = strat.decisions[k]
            size = spec.alph_x1 if j == 1 else spec.alph_x2
            letters.append(tuple(("user", j, x) for x in range(size)))
        elif strat.model is Model.MODEL2:
            letters.append(tuple(("sum", s) for s in range(spec.sum_alphabet)))
        else:
            letters.append(
                tuple(("pair", a, b) for a in range(spec.alph_x1) for b in range(spec.alph_x2))
            )
    return letters


def zspace_for(strat: Strategy, spec: MacWiretapSpec) -> ZSpace:
    return ZSpace(tuple(_position_letters(strat, spec)))


def letter_tensors(strat: Strategy, aux: AuxInput, spec: MacWiretapSpec) -> list[np.ndarray]:
    """Per-position arrays T_i[u1, u2, z_i] with p(z_i | u1, u2).

    Tapped positions push the auxiliary-to-codeword kernels; untapped
    positions are deterministic erasures (models 1-3) or the concatenated
    noisy observation channel (generalized).  The sequence-level observation
    kernel is the per-position product of these tensors.
    """
    k1, k2 = aux.k_x1_u1.table, aux.k_x2_u2.table
    m1, m2 = aux.sizes
    tapped = {p: k for k, p in enumerate(strat.positions)}

    ones = np.ones((m1, m2, 1))
    if strat.model is Model.GENERALIZED:
        v_t = concat_aux(aux, spec, "wtap").table
    if strat.model is Model.MODEL2:
        sum_t = np.einsum("ua,vb,abs->uvs", k1, k2, sum_kernel(spec.alph_x1, spec.alph_x2))
    pair_t = None
    if strat.model in (Model.MODEL3, Model.GENERALIZED):
        pair_t = np.einsum("ua,vb->uvab", k1, k2).reshape(m1, m2, -1)

    out: list[np.ndarray] = []
    for i in range(1, strat.n + 1):
        k = tapped.get(i)
        if k is None:
            out.append(v_t if strat.model is Model.GENERALIZED else ones)
        elif strat.model is Model.MODEL1:
            j = strat.decisions[k]
            if j == 1:
                out.append(np.broadcast_to(k1[:, None, :], (m1, m2, k1.shape[1])))
            else:
                out.append(np.broadcast_to(k2[None, :, :], (m1, m2, k2.shape[1])))
        elif strat.model is Model.MODEL2:
            out.append(sum_t)
        else:
            out.append(pair_t)
    return out


def zdist_dense(
    strat: Strategy, aux: AuxInput, spec: MacWiretapSpec, caps: Caps = DEFAULT_CAPS
) -> np.ndarray:
    """Dense table p(z | u1seq, u2seq) of shape (M1, M2, zspace.size)."""
    n = strat.n
    m1n = aux.sizes[0] ** n
    m2n = aux.sizes[1] ** n
    zsize = zspace_for(strat, spec).size
    caps.check_atoms(m1n * m2n * zsize, "observation kernel")
    d1 = digit_table(n, aux.sizes[0])
    d2 = digit_table(n, aux.sizes[1])
    tensors = letter_tensors(strat, aux, spec)
    out = np.ones((m1n, m2n, 1))
    for i, t in enumerate(tensors):
        if t.shape[2] == 1 and (t == 1.0).all():
            continue  # erased position, unit factor
        step = t[d1[:, i][:, None], d2[:, i][None, :], :]
        out = (out[:, :, :, None] * step[:, :, None, :]).reshape(m1n, m2n, -1)
    return out


def observation_kernel(
    strat: Strategy,
    aux: AuxInput,
    spec: MacWiretapSpec,
    n: int,
    caps: Caps = DEFAULT_CAPS,
) -> CondKernel:
    """Exact sequence-level kernel from (u1seq, u2seq) to observation codes."""
    if n != strat.n:
        raise DimensionMismatch(f"strategy is for n={strat.n}, not {n}")
    return CondKernel(zdist_dense(strat, aux, spec, caps), atol=1e-9)
