"""Finite probability tables, memoryless channels, and their compositions.

All alphabets are index sets ``0..k-1``.  The "natural addition" used by the
superposition attack model is integer addition of indices, which keeps the
superposed channel deterministic.  Every type is an immutable value after
construction (arrays are frozen), so instances can be shared freely across
parallel workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, ValidationError

#: default absolute tolerance for probability-table validation
PROB_ATOL = 1e-12


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(np.asarray(a, dtype=np.float64))
    a.flags.writeable = False
    return a


class Model(str, Enum):
    """Wiretapper attack models.

    MODEL1: per tapped position, one user's symbol of the wiretapper's choice.
    MODEL2: per tapped position, the integer sum of both symbols.
    MODEL3: per tapped position, both symbols.
    GENERALIZED: both symbols when tapped, a noisy channel output elsewhere.
    """

    MODEL1 = "model1"
    MODEL2 = "model2"
    MODEL3 = "model3"
    GENERALIZED = "generalized"


@dataclass(frozen=True, eq=False)
class Pmf:
    """A probability mass function over a finite (possibly multi-axis) support.

    Parameters
    ----------
    probs : array_like
        Nonnegative entries summing to 1 within ``atol``.
    """

    probs: np.ndarray
    atol: float = field(default=PROB_ATOL, compare=False)

    def __post_init__(self):
        a = np.asarray(self.probs, dtype=np.float64)
        if a.size == 0:
            raise ValidationError("empty pmf")
        if a.min() < -self.atol:
            raise ValidationError(f"negative probability {a.min()!r}")
        a = np.where(a < 0.0, 0.0, a)
        total = a.sum()
        if abs(total - 1.0) > self.atol:
            raise ValidationError(f"pmf sums to {total!r}, not 1")
        object.__setattr__(self, "probs", _freeze(a))

    @property
    def support_size(self) -> int:
        return self.probs.size

    @property
    def shape(self) -> tuple[int, ...]:
        return self.probs.shape

    def marginal(self, keep: tuple[int, ...]) -> "Pmf":
        from ._tables import marginal

        return Pmf(marginal(self.probs, keep), atol=self.atol)

    @staticmethod
    def uniform(k: int) -> "Pmf":
        return Pmf(np.full(k, 1.0 / k))


@dataclass(frozen=True, eq=False)
class CondKernel:
    """Conditional distribution table, last axis = output.

    ``table`` has shape ``(*input_shape, output_size)`` with one or two input
    axes.  Each row must be a valid pmf; an all-zero row marks an unreachable
    input combination and is allowed (deterministic compositions need it).
    """

    table: np.ndarray
    atol: float = field(default=PROB_ATOL, compare=False)

    def __post_init__(self):
        a = np.asarray(self.table, dtype=np.float64)
        if a.ndim not in (2, 3):
            raise DimensionMismatch(f"kernel needs 2 or 3 axes, got {a.ndim}")
        if a.min() < -self.atol:
            raise ValidationError(f"negative probability {a.min()!r}")
        a = np.where(a < 0.0, 0.0, a)
        sums = a.sum(axis=-1)
        ok = (np.abs(sums - 1.0) <= self.atol) | (sums == 0.0)
        if not ok.all():
            bad = sums[~ok].flat[0]
            raise ValidationError(f"kernel row sums to {bad!r}, not 0 or 1")
        object.__setattr__(self, "table", _freeze(a))

    @property
    def input_shape(self) -> tuple[int, ...]:
        return self.table.shape[:-1]

    @property
    def output_size(self) -> int:
        return self.table.shape[-1]

    @staticmethod
    def identity(k: int) -> "CondKernel":
        return CondKernel(np.eye(k))

    @staticmethod
    def constant(*input_shape: int) -> "CondKernel":
        """Kernel onto a single-letter alphabet (output carries no information)."""
        return CondKernel(np.ones((*input_shape, 1)))

    @staticmethod
    def bsc(p: float) -> "CondKernel":
        return CondKernel(np.array([[1.0 - p, p], [p, 1.0 - p]]))


@dataclass(frozen=True, eq=False)
class MacWiretapSpec:
    """Two-transmitter wiretap channel instance.

    ``main`` is p(y|x1,x2) with shape (alph_x1, alph_x2, alph_y); ``wtap`` is
    p(v|x1,x2), present exactly for the generalized model.  ``alpha`` is the
    fraction of channel uses the wiretapper may tap.
    """

    alph_x1: int
    alph_x2: int
    alph_y: int
    alph_v: int
    main: CondKernel
    wtap: Optional[CondKernel]
    model: Model
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValidationError(f"alpha={self.alpha} outside [0, 1]")
        if self.main.table.shape != (self.alph_x1, self.alph_x2, self.alph_y):
            raise DimensionMismatch(
                f"main kernel shape {self.main.table.shape} != "
                f"{(self.alph_x1, self.alph_x2, self.alph_y)}"
            )
        if self.model is Model.GENERALIZED:
            if self.wtap is None:
                raise ValidationError("generalized model requires a wiretap kernel")
            if self.wtap.table.shape != (self.alph_x1, self.alph_x2, self.alph_v):
                raise DimensionMismatch(
                    f"wiretap kernel shape {self.wtap.table.shape} != "
                    f"{(self.alph_x1, self.alph_x2, self.alph_v)}"
                )
        elif self.wtap is not None:
            raise ValidationError(f"{self.model.value} takes no wiretap kernel")

    def with_alpha(self, alpha: float) -> "MacWiretapSpec":
        return replace(self, alpha=alpha)

    def with_model(self, model: Model) -> "MacWiretapSpec":
        wtap = self.wtap if model is Model.GENERALIZED else None
        alph_v = self.alph_v if model is Model.GENERALIZED else 0
        return replace(self, model=model, wtap=wtap, alph_v=alph_v)

    @property
    def sum_alphabet(self) -> int:
        return self.alph_x1 + self.alph_x2 - 1


@dataclass(frozen=True, eq=False)
class AuxInput:
    """Auxiliary inputs: independent blocks p(u1)p(x1|u1) and p(u2)p(x2|u2)."""

    p_u1: Pmf
    k_x1_u1: CondKernel
    p_u2: Pmf
    k_x2_u2: CondKernel

    def __post_init__(self):
        for p, k, name in (
            (self.p_u1, self.k_x1_u1, "user 1"),
            (self.p_u2, self.k_x2_u2, "user 2"),
        ):
            if p.probs.ndim != 1:
                raise DimensionMismatch(f"{name} prior must be one-dimensional")
            if k.table.ndim != 2 or k.table.shape[0] != p.support_size:
                raise DimensionMismatch(
                    f"{name} kernel shape {k.table.shape} incompatible with "
                    f"prior of size {p.support_size}"
                )

    @property
    def sizes(self) -> tuple[int, int]:
        return (self.p_u1.support_size, self.p_u2.support_size)

    @staticmethod
    def identity(spec: MacWiretapSpec) -> "AuxInput":
        """U_j = X_j with uniform priors."""
        return AuxInput(
            Pmf.uniform(spec.alph_x1),
            CondKernel.identity(spec.alph_x1),
            Pmf.uniform(spec.alph_x2),
            CondKernel.identity(spec.alph_x2),
        )

    @staticmethod
    def uniform_outputs(spec: MacWiretapSpec) -> "AuxInput":
        """X_j uniform regardless of U_j (carries no information)."""
        k1 = CondKernel(np.full((spec.alph_x1, spec.alph_x1), 1.0 / spec.alph_x1))
        k2 = CondKernel(np.full((spec.alph_x2, spec.alph_x2), 1.0 / spec.alph_x2))
        return AuxInput(Pmf.uniform(spec.alph_x1), k1, Pmf.uniform(spec.alph_x2), k2)

    def to_jsonable(self) -> dict:
        return {
            "p_u1": self.p_u1.probs.tolist(),
            "k_x1_u1": self.k_x1_u1.table.tolist(),
            "p_u2": self.p_u2.probs.tolist(),
            "k_x2_u2": self.k_x2_u2.table.tolist(),
        }

    @staticmethod
    def from_jsonable(d: dict) -> "AuxInput":
        return AuxInput(
            Pmf(np.asarray(d["p_u1"])),
            CondKernel(np.asarray(d["k_x1_u1"])),
            Pmf(np.asarray(d["p_u2"])),
            CondKernel(np.asarray(d["k_x2_u2"])),
        )


def concat_aux(aux: AuxInput, spec: MacWiretapSpec, which: str = "main") -> CondKernel:
    """Concatenate p(x1|u1)p(x2|u2) with a channel stage.

    Returns p(y|u1,u2) for ``which="main"`` or p(v|u1,u2) for ``which="wtap"``:
    the sum over (x1, x2) of p(x1|u1) p(x2|u2) p(out|x1, x2).
    """
    if which == "main":
        stage = spec.main
    elif which == "wtap":
        if spec.wtap is None:
            raise ValidationError("spec has no wiretap kernel")
        stage = spec.wtap
    else:
        raise ValidationError(f"unknown stage {which!r}")
    k1, k2 = aux.k_x1_u1.table, aux.k_x2_u2.table
    if k1.shape[1] != spec.alph_x1 or k2.shape[1] != spec.alph_x2:
        raise DimensionMismatch(
            f"aux output alphabets {(k1.shape[1], k2.shape[1])} != "
            f"channel inputs {(spec.alph_x1, spec.alph_x2)}"
        )
    out = np.einsum("ua,vb,abz->uvz", k1, k2, stage.table)
    return CondKernel(out)


def joint_full(aux: AuxInput, spec: MacWiretapSpec) -> Pmf:
    """Full joint table over (U1, U2, X1, X2, Y) or (U1, U2, X1, X2, Y, V).

    The product p(u1)p(u2)p(x1|u1)p(x2|u2)p(y|x1,x2)[p(v|x1,x2)]; marginalizing
    any factor back out reproduces the inputs exactly.
    """
    p1, p2 = aux.p_u1.probs, aux.p_u2.probs
    k1, k2 = aux.k_x1_u1.table, aux.k_x2_u2.table
    if k1.shape[1] != spec.alph_x1 or k2.shape[1] != spec.alph_x2:
        raise DimensionMismatch("aux output alphabets do not match channel inputs")
    if spec.wtap is None:
        t = np.einsum("u,v,ua,vb,aby->uvaby", p1, p2, k1, k2, spec.main.table)
    else:
        t = np.einsum(
            "u,v,ua,vb,aby,abw->uvabyw", p1, p2, k1, k2, spec.main.table, spec.wtap.table
        )
    return Pmf(t)


def sum_kernel(k1: int, k2: int) -> np.ndarray:
    """Deterministic table 1{t = x1 + x2} of shape (k1, k2, k1 + k2 - 1)."""
    out = np.zeros((k1, k2, k1 + k2 - 1))
    a = np.arange(k1)[:, None]
    b = np.arange(k2)[None, :]
    out[a, b, a + b] = 1.0
    return out


def superpose(spec: MacWiretapSpec) -> CondKernel:
    """Deterministic kernel (x1, x2) -> x1 + x2 over integer alphabets."""
    if spec.model is not Model.MODEL2:
        raise ValidationError(f"superposition is defined for model2, not {spec.model.value}")
    return CondKernel(sum_kernel(spec.alph_x1, spec.alph_x2))


# ---------------------------------------------------------------------------
# channel-spec files

_SCHEMA_VERSION = 1


def spec_to_jsonable(spec: MacWiretapSpec) -> dict:
    return {
        "schema_version": _SCHEMA_VERSION,
        "model": spec.model.value,
        "alpha": spec.alpha,
        "alphabets": {
            "x1": spec.alph_x1,
            "x2": spec.alph_x2,
            "y": spec.alph_y,
            "v": spec.alph_v,
        },
        "main": spec.main.table.tolist(),
        "wtap": None if spec.wtap is None else spec.wtap.table.tolist(),
    }


def spec_from_jsonable(doc: dict) -> MacWiretapSpec:
    try:
        model = Model(doc["model"])
        alpha = float(doc["alpha"])
        alph = doc["alphabets"]
        kx1, kx2, ky = int(alph["x1"]), int(alph["x2"]), int(alph["y"])
        kv = int(alph.get("v") or 0)
        main = CondKernel(np.asarray(doc["main"], dtype=np.float64))
        wtap_raw = doc.get("wtap")
        wtap = None if wtap_raw is None else CondKernel(np.asarray(wtap_raw, dtype=np.float64))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed channel spec: {exc}") from exc
    return MacWiretapSpec(kx1, kx2, ky, kv, main, wtap, model, alpha)


def load_channel_spec(path) -> MacWiretapSpec:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return spec_from_jsonable(doc)


def bundled_spec(name: str) -> MacWiretapSpec:
    """Load one of the packaged channel definitions (see ``macwtap/data``)."""
    ref = resources.files("macwtap.data").joinpath(f"{name}.json")
    with ref.open("r", encoding="utf-8") as fh:
        return spec_from_jsonable(json.load(fh))
