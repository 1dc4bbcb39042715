"""Random binning of i.i.d. auxiliary sources, joint decoding, exact leakage.

Each source sequence gets two independent uniform bin indices: a key bin and a
public bin.  The receiver decodes both sequences from its channel output plus
the public bins (joint typicality is realized as exact MAP over the
bin-consistent candidate set).  Secrecy is measured exactly: the induced
joint over (key bins, public bins, observation) is tabulated in full and the
divergence from (uniform keys) x (uniform public bins) x (observation
marginal) is evaluated per wiretapper strategy.  Monte Carlo appears only in
the decoding-error estimate; leakage is never sampled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _core
from ._tables import digit_table, sequence_probs
from .adversary import Strategy, enumerate_strategies, letter_tensors, zspace_for
from .channels import AuxInput, MacWiretapSpec, Pmf, concat_aux
from .errors import ValidationError
from .info_measures import total_variation
from .limits import DEFAULT_CAPS, Caps
from .seeds import DOMAIN_BINNING, DOMAIN_TRIAL, stream

_EPS = 1e-9


def _floor_tol(x: float) -> int:
    return int(math.floor(x + _EPS))


def _ceil_tol(x: float) -> int:
    return int(math.ceil(x - _EPS))


@dataclass(frozen=True, eq=False)
class ProtocolParams:
    """Blocklength, binning rates (key1, key2, public1, public2), seed, model."""

    n: int
    rates: tuple[float, float, float, float]
    seed: int
    aux: AuxInput
    spec: MacWiretapSpec

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("blocklength must be >= 1")
        if any(r < 0 for r in self.rates):
            raise ValidationError(f"negative rate in {self.rates}")

    @property
    def mu(self) -> int:
        return _floor_tol(self.spec.alpha * self.n)

    @property
    def bin_bits(self) -> tuple[int, int, int, int]:
        """(key1, key2, public1, public2) bin index widths, ceil(n * rate)."""
        return tuple(_ceil_tol(self.n * r) for r in self.rates)

    @property
    def bin_counts(self) -> tuple[int, int, int, int]:
        return tuple(1 << b for b in self.bin_bits)

    @property
    def effective_rates(self) -> tuple[float, float, float, float]:
        return tuple(b / self.n for b in self.bin_bits)

    @property
    def source_sizes(self) -> tuple[int, int]:
        m1, m2 = self.aux.sizes
        return (m1**self.n, m2**self.n)

    def to_jsonable(self) -> dict:
        from .channels import spec_to_jsonable

        return {
            "n": self.n,
            "rates": list(self.rates),
            "seed": self.seed,
            "aux": self.aux.to_jsonable(),
            "spec": spec_to_jsonable(self.spec),
        }

    @staticmethod
    def from_jsonable(d: dict) -> "ProtocolParams":
        from .channels import spec_from_jsonable

        return ProtocolParams(
            int(d["n"]),
            tuple(float(r) for r in d["rates"]),
            int(d["seed"]),
            AuxInput.from_jsonable(d["aux"]),
            spec_from_jsonable(d["spec"]),
        )


@dataclass(frozen=True, eq=False)
class BinningRealization:
    """Sampled bin maps; ``w*`` are key bins, ``f*`` public bins."""

    params: ProtocolParams
    w1: np.ndarray
    f1: np.ndarray
    w2: np.ndarray
    f2: np.ndarray

    def seq_probs(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.params.n
        return (
            sequence_probs(self.params.aux.p_u1.probs, n),
            sequence_probs(self.params.aux.p_u2.probs, n),
        )

    def bin_tables(self) -> tuple[np.ndarray, np.ndarray]:
        """Exact per-user joint over (key bin, public bin), flat."""
        W1, W2, F1, F2 = self.params.bin_counts
        p1, p2 = self.seq_probs()
        t1 = np.bincount(self.w1 * F1 + self.f1, weights=p1, minlength=W1 * F1)
        t2 = np.bincount(self.w2 * F2 + self.f2, weights=p2, minlength=W2 * F2)
        return t1, t2


def sample_binning(
    params: ProtocolParams, caps: Caps = DEFAULT_CAPS, draw: int = 0
) -> BinningRealization:
    """Uniform i.i.d. bin maps; deterministic in (params.seed, draw)."""
    m1, m2 = params.source_sizes
    caps.check_sequences(m1)
    caps.check_sequences(m2)
    W1, W2, F1, F2 = params.bin_counts
    maps = []
    for j, (m, wcount, fcount) in enumerate(((m1, W1, F1), (m2, W2, F2)), start=1):
        rng = stream(params.seed, DOMAIN_BINNING, j, draw)
        maps.append(rng.integers(0, wcount, size=m, dtype=np.int64))
        maps.append(rng.integers(0, fcount, size=m, dtype=np.int64))
    return BinningRealization(params, maps[0], maps[1], maps[2], maps[3])


def injective_binning(params: ProtocolParams) -> BinningRealization:
    """Deterministic lossless maps: sequence index m -> (m // F, m % F).

    Requires enough bins to separate every sequence of each source.
    """
    m1, m2 = params.source_sizes
    W1, W2, F1, F2 = params.bin_counts
    if W1 * F1 < m1 or W2 * F2 < m2:
        raise ValidationError("injective binning needs bin counts >= sequence counts")
    m1i = np.arange(m1, dtype=np.int64)
    m2i = np.arange(m2, dtype=np.int64)
    return BinningRealization(params, m1i // F1, m1i % F1, m2i // F2, m2i % F2)


# ---------------------------------------------------------------------------
# exact induced distributions


def _joint_table(binning: BinningRealization, strat: Strategy, caps: Caps) -> np.ndarray:
    params = binning.params
    if strat.n != params.n:
        raise ValidationError(f"strategy is for n={strat.n}, not {params.n}")
    W1, W2, F1, F2 = params.bin_counts
    zsize = zspace_for(strat, params.spec).size
    m1, m2 = params.source_sizes
    caps.check_atoms(zsize, "observation space")
    caps.check_atoms(W1 * W2 * F1 * F2 * zsize, "induced joint")
    caps.check_atoms(m1 * m2, "sequence-pair enumeration")
    p1, p2 = binning.seq_probs()
    d1 = digit_table(params.n, params.aux.sizes[0])
    d2 = digit_table(params.n, params.aux.sizes[1])
    letters, zsizes = _core.pack_letters(letter_tensors(strat, params.aux, params.spec))
    flat = _core.joint_wfz(
        p1, p2, binning.w1, binning.f1, binning.w2, binning.f2,
        W1, W2, F1, F2, d1, d2, letters, zsizes,
    )
    return flat.reshape(W1, W2, F1, F2, zsize)


def induced_joint(
    binning: BinningRealization, strat: Strategy, caps: Caps = DEFAULT_CAPS
) -> Pmf:
    """Exact joint over (key1, key2, public1, public2, observation)."""
    return Pmf(_joint_table(binning, strat, caps), atol=1e-9)


def leakage_terms(table: np.ndarray) -> tuple[float, float]:
    """(divergence from uniform x observation marginal, key-observation MI).

    ``table`` is the induced joint over (W1, W2, F1, F2, Z), both in bits.
    """
    W1, W2, F1, F2, zsize = table.shape
    flat = table.reshape(-1, zsize)
    pz = flat.sum(axis=0)
    mask = flat > 0
    logpz = np.zeros(zsize)
    nz = pz > 0
    logpz[nz] = np.log2(pz[nz])
    vals = flat[mask]
    kl = float((vals * np.log2(vals)).sum() - (flat * logpz[None, :])[mask].sum())
    kl += math.log2(W1 * W2 * F1 * F2)

    key_z = table.sum(axis=(2, 3)).reshape(-1, zsize)
    pk = key_z.sum(axis=1)
    maskk = key_z > 0
    logpk = np.zeros(pk.size)
    nzk = pk > 0
    logpk[nzk] = np.log2(pk[nzk])
    valsk = key_z[maskk]
    mi = float(
        (valsk * np.log2(valsk)).sum()
        - (key_z * logpk[:, None])[maskk].sum()
        - (key_z * logpz[None, :])[maskk].sum()
    )
    return kl, mi


@dataclass(frozen=True)
class LeakageReport:
    """Per-strategy exact leakage with the maximizing strategy first-called out."""

    table: tuple[tuple[Strategy, float, float], ...]

    @property
    def max_strategy(self) -> Strategy:
        return max(self.table, key=lambda row: row[1])[0]

    @property
    def max_leakage(self) -> float:
        return max(row[1] for row in self.table)

    @property
    def max_mutual_info(self) -> float:
        return max(row[2] for row in self.table)


def leakage_max(
    binning: BinningRealization,
    caps: Caps = DEFAULT_CAPS,
    jobs: int = 1,
    mu: Optional[int] = None,
) -> tuple[Strategy, float]:
    """Exhaust all strategies; return the maximizer and its divergence."""
    report = leakage_report(binning, caps=caps, jobs=jobs, mu=mu)
    return report.max_strategy, report.max_leakage


def leakage_report(
    binning: BinningRealization,
    caps: Caps = DEFAULT_CAPS,
    jobs: int = 1,
    mu: Optional[int] = None,
) -> LeakageReport:
    params = binning.params
    mu = params.mu if mu is None else mu
    strategies = list(enumerate_strategies(params.spec.model, params.n, mu, caps))

    def one(i: int) -> tuple[int, float, float]:
        kl, mi = leakage_terms(_joint_table(binning, strategies[i], caps))
        return i, kl, mi

    if jobs <= 1:
        rows = [one(i) for i in range(len(strategies))]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(one, range(len(strategies))))
    rows.sort(key=lambda r: r[0])
    # max ties resolve to the earliest strategy in enumeration order
    return LeakageReport(tuple((strategies[i], kl, mi) for i, kl, mi in rows))


def tv_from_uniform(binning: BinningRealization) -> float:
    """Exact total variation of the four bin indices from joint uniformity."""
    t1, t2 = binning.bin_tables()
    prod = np.outer(t1, t2)
    return total_variation(prod, np.full_like(prod, 1.0 / prod.size))


# ---------------------------------------------------------------------------
# decoding


class _Decoder:
    """Precomputed MAP decoding context for one binning realization."""

    def __init__(self, binning: BinningRealization, aux: AuxInput, spec: MacWiretapSpec):
        params = binning.params
        self.n = params.n
        self.d1 = digit_table(self.n, aux.sizes[0])
        self.d2 = digit_table(self.n, aux.sizes[1])
        p1, p2 = binning.seq_probs()
        with np.errstate(divide="ignore"):
            self.logp1 = np.log2(p1)
            self.logp2 = np.log2(p2)
            self.lk = np.log2(concat_aux(aux, spec, "main").table)
        _, _, F1, F2 = params.bin_counts
        self.cands1 = [np.flatnonzero(binning.f1 == f) for f in range(F1)]
        self.cands2 = [np.flatnonzero(binning.f2 == f) for f in range(F2)]
        self.dchunks1 = [np.ascontiguousarray(self.d1[c]) for c in self.cands1]
        self.dchunks2 = [np.ascontiguousarray(self.d2[c]) for c in self.cands2]

    def decode_indices(self, y: Sequence[int], f1_val: int, f2_val: int) -> tuple[int, int]:
        cand1, cand2 = self.cands1[f1_val], self.cands2[f2_val]
        if cand1.size == 0 or cand2.size == 0:
            raise ValidationError("empty bin: no sequence maps to the given public bin")
        ylog = np.ascontiguousarray(self.lk[:, :, list(y)].transpose(2, 0, 1))
        scores = _core.pair_loglik(self.dchunks1[f1_val], self.dchunks2[f2_val], ylog)
        scores = scores + self.logp1[cand1][:, None] + self.logp2[cand2][None, :]
        best = int(np.argmax(scores))
        i1, i2 = divmod(best, cand2.size)
        return int(cand1[i1]), int(cand2[i2])


def sw_decode(
    y: Sequence[int],
    f1_val: int,
    f2_val: int,
    binning: BinningRealization,
    aux: AuxInput,
    spec: MacWiretapSpec,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Exact MAP over the candidate pairs consistent with both public bins.

    Maximizes p(u1seq) p(u2seq) prod_i p(y_i | u1_i, u2_i); ties (including
    all-impossible scores) resolve to the lexicographically smallest pair.
    """
    if len(y) != binning.params.n:
        raise ValidationError(f"received sequence must have length {binning.params.n}")
    dec = _Decoder(binning, aux, spec)
    m1, m2 = dec.decode_indices(y, f1_val, f2_val)
    return tuple(int(x) for x in dec.d1[m1]), tuple(int(x) for x in dec.d2[m2])


# ---------------------------------------------------------------------------
# full protocol runs


@dataclass(frozen=True, eq=False)
class ProtocolRun:
    params: ProtocolParams
    trials: int
    error_prob: float
    error_ci: tuple[float, float]
    tv_uniform: float
    leakage: LeakageReport

    @property
    def max_leakage(self) -> float:
        return self.leakage.max_leakage

    def to_jsonable(self) -> dict:
        return {
            "params": self.params.to_jsonable(),
            "mu": self.params.mu,
            "bin_bits": list(self.params.bin_bits),
            "effective_rates": list(self.params.effective_rates),
            "trials": self.trials,
            "error_prob": self.error_prob,
            "error_ci95": list(self.error_ci),
            "tv_uniform": self.tv_uniform,
            "kernel_backend": _core.BACKEND,
            "leakage_by_strategy": [
                {
                    "strategy": s.to_jsonable(),
                    "kl_bits": kl,
                    "mutual_info_bits": mi,
                }
                for s, kl, mi in self.leakage.table
            ],
            "max_leakage_bits": self.leakage.max_leakage,
            "max_strategy": self.leakage.max_strategy.to_jsonable(),
        }


def _sample_trial(
    rng: np.random.Generator,
    p1cum: np.ndarray,
    p2cum: np.ndarray,
    ycum: np.ndarray,
    d1: np.ndarray,
    d2: np.ndarray,
) -> tuple[int, int, list[int]]:
    k_y = ycum.shape[-1]
    m1 = min(int(np.searchsorted(p1cum, rng.random(), side="right")), p1cum.size - 1)
    m2 = min(int(np.searchsorted(p2cum, rng.random(), side="right")), p2cum.size - 1)
    u = rng.random(d1.shape[1])
    rows = ycum[d1[m1], d2[m2]]
    y = [min(int(np.searchsorted(rows[i], u[i], side="right")), k_y - 1) for i in range(len(u))]
    return m1, m2, y


def decoding_errors(
    binning: BinningRealization,
    trials: int,
    jobs: int = 1,
    trial_offset: int = 0,
) -> int:
    """Count exact-recovery failures over seeded Monte-Carlo trials.

    Trial ``t`` draws from the stream (seed, trial domain, trial_offset + t),
    so results are independent of worker count and chunking.
    """
    params = binning.params
    aux, spec = params.aux, params.spec
    p1, p2 = binning.seq_probs()
    p1cum, p2cum = np.cumsum(p1), np.cumsum(p2)
    ycum = np.cumsum(concat_aux(aux, spec, "main").table, axis=-1)
    dec = _Decoder(binning, aux, spec)

    def run_chunk(lo: int, hi: int) -> int:
        errs = 0
        for t in range(lo, hi):
            rng = stream(params.seed, DOMAIN_TRIAL, trial_offset + t)
            m1, m2, y = _sample_trial(rng, p1cum, p2cum, ycum, dec.d1, dec.d2)
            got = dec.decode_indices(y, int(binning.f1[m1]), int(binning.f2[m2]))
            if got != (m1, m2):
                errs += 1
        return errs

    if jobs <= 1:
        return run_chunk(0, trials)
    bounds = np.linspace(0, trials, jobs + 1, dtype=int)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(run_chunk, int(lo), int(hi)) for lo, hi in zip(bounds, bounds[1:])]
        return sum(f.result() for f in futures)


def run_protocol(
    params: ProtocolParams,
    trials: int,
    caps: Caps = DEFAULT_CAPS,
    jobs: int = 1,
    binning: Optional[BinningRealization] = None,
) -> ProtocolRun:
    """Sample a binning (unless given), measure reliability and exact leakage."""
    if binning is None:
        binning = sample_binning(params, caps)
    errs = decoding_errors(binning, trials, jobs=jobs)
    phat = errs / trials if trials else 0.0
    half = 1.96 * math.sqrt(phat * (1.0 - phat) / trials) if trials else 0.0
    ci = (max(0.0, phat - half), min(1.0, phat + half))
    report = leakage_report(binning, caps=caps, jobs=jobs)
    return ProtocolRun(
        params=params,
        trials=trials,
        error_prob=phat,
        error_ci=ci,
        tv_uniform=tv_from_uniform(binning),
        leakage=report,
    )
