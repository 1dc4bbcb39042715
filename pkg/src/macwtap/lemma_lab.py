"""Numerical verification of the binning analysis: typical-set probabilities,
the two binning lemmas, the Chernoff-variant tail bound, and the closed-form
conditional entropies that drive the threshold choices.

Closed forms for the wiretapper-conditioned sequence entropies (mu tapped
positions out of n):

=============  ==========================================  ==============================================
model          H(Uj^n | Z)                                 H(Ui^n | Uj^n, Z)
=============  ==========================================  ==============================================
model1         mu_j H(Uj|Xj) + (n - mu_j) H(Uj)            mu_i H(Ui|Xi) + (n - mu_i) H(Ui)
model2         mu H(Uj|X1+X2) + (n - mu) H(Uj)             mu H(Ui|Uj, X1+X2) + (n - mu) H(Ui)
model3         mu H(Uj|Xj) + (n - mu) H(Uj)                mu H(Ui|Xi) + (n - mu) H(Ui)
generalized    mu H(Uj|Xj) + (n - mu) H(Uj|V)              mu H(Ui|Xi) + (n - mu) H(Ui|Uj, V)
=============  ==========================================  ==============================================

where mu_j counts model1 taps that picked user j.  Every closed form has a
brute-force companion evaluated on the exact sequence-level observation
kernel; checks that admit a vacuous outcome (a bound above the quantity's
trivial maximum) report it as a first-class state rather than a pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ._tables import sequence_probs
from .adversary import Strategy, enumerate_strategies, strategy_count, zdist_dense, zspace_for
from .binning_sim import ProtocolParams, leakage_terms, sample_binning, tv_from_uniform, _joint_table
from .channels import AuxInput, MacWiretapSpec, Model, concat_aux, sum_kernel
from .errors import ValidationError
from .info_measures import Bits, binary_entropy, cond_entropy, entropy
from .limits import DEFAULT_CAPS, Caps
from .rate_regions import RegionPoly, region_for
from .seeds import DOMAIN_CHERNOFF, stream


@dataclass(frozen=True)
class LemmaParams:
    """Thresholds and slack parameters for the binning-secrecy bound.

    ``gamma12`` is the threshold on the conditional self-information of user
    1's sequence given user 2's (``gamma21`` symmetrically).  ``wf_log2_j`` is
    log2 of user j's total bin count (key times public).  The derived
    threshold ``eps_tilde`` is recomputed on access, never stored.
    """

    gamma1: Bits
    gamma2: Bits
    gamma12: Bits
    gamma21: Bits
    delta: float
    epsilon: float
    wf_log2_1: float
    wf_log2_2: float

    def __post_init__(self):
        if not 0.0 < self.delta < 0.5:
            raise ValidationError(f"delta={self.delta} outside (0, 1/2)")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValidationError(f"epsilon={self.epsilon} outside [0, 1]")

    def eps_tilde_for(self, j: int) -> float:
        wf = self.wf_log2_1 if j == 1 else self.wf_log2_2
        return self.epsilon + (self.delta + self.delta**2) * wf + binary_entropy(self.delta**2)

    @property
    def eps_tilde(self) -> float:
        return max(self.eps_tilde_for(1), self.eps_tilde_for(2))

    def gamma_for(self, kind: str, j: int) -> Bits:
        if kind == "marginal":
            return self.gamma1 if j == 1 else self.gamma2
        if kind == "conditional":
            # threshold for the OTHER user's sequence given user j's
            return self.gamma21 if j == 1 else self.gamma12
        raise ValidationError(f"unknown gamma kind {kind!r}")


# ---------------------------------------------------------------------------
# closed-form and brute-force conditional entropies


def _letter_entropies(aux: AuxInput, spec: MacWiretapSpec) -> dict:
    p1, p2 = aux.p_u1.probs, aux.p_u2.probs
    k1, k2 = aux.k_x1_u1.table, aux.k_x2_u2.table
    out = {
        "H1": entropy(p1),
        "H2": entropy(p2),
        "H1|X1": cond_entropy(p1[:, None] * k1, ((0,), (1,))),
        "H2|X2": cond_entropy(p2[:, None] * k2, ((0,), (1,))),
    }
    if spec.model is Model.MODEL2:
        jt = np.einsum("u,v,ua,vb,abt->uvt", p1, p2, k1, k2,
                       sum_kernel(spec.alph_x1, spec.alph_x2))
        out["H1|T"] = cond_entropy(jt, ((0,), (2,)))
        out["H2|T"] = cond_entropy(jt, ((1,), (2,)))
        out["H1|2T"] = cond_entropy(jt, ((0,), (1, 2)))
        out["H2|1T"] = cond_entropy(jt, ((1,), (0, 2)))
    if spec.model is Model.GENERALIZED:
        jv = p1[:, None, None] * p2[None, :, None] * concat_aux(aux, spec, "wtap").table
        out["H1|V"] = cond_entropy(jv, ((0,), (2,)))
        out["H2|V"] = cond_entropy(jv, ((1,), (2,)))
        out["H1|2V"] = cond_entropy(jv, ((0,), (1, 2)))
        out["H2|1V"] = cond_entropy(jv, ((1,), (0, 2)))
    return out


def _closed_forms(
    aux: AuxInput, spec: MacWiretapSpec, n: int, mu: int, strat: Union[Strategy, str]
) -> dict[str, Bits]:
    ent = _letter_entropies(aux, spec)
    model = spec.model
    if model is Model.MODEL1:
        if isinstance(strat, Strategy):
            mu1, mu2 = strat.taps_on_user(1), strat.taps_on_user(2)
        else:
            mu1 = mu2 = mu  # per-quantity worst case: all taps on that user
        h1 = mu1 * ent["H1|X1"] + (n - mu1) * ent["H1"]
        h2 = mu2 * ent["H2|X2"] + (n - mu2) * ent["H2"]
        return {"h1": h1, "h2": h2, "h1_given2": h1, "h2_given1": h2}
    if model is Model.MODEL2:
        return {
            "h1": mu * ent["H1|T"] + (n - mu) * ent["H1"],
            "h2": mu * ent["H2|T"] + (n - mu) * ent["H2"],
            "h1_given2": mu * ent["H1|2T"] + (n - mu) * ent["H1"],
            "h2_given1": mu * ent["H2|1T"] + (n - mu) * ent["H2"],
        }
    if model is Model.MODEL3:
        h1 = mu * ent["H1|X1"] + (n - mu) * ent["H1"]
        h2 = mu * ent["H2|X2"] + (n - mu) * ent["H2"]
        return {"h1": h1, "h2": h2, "h1_given2": h1, "h2_given1": h2}
    return {
        "h1": mu * ent["H1|X1"] + (n - mu) * ent["H1|V"],
        "h2": mu * ent["H2|X2"] + (n - mu) * ent["H2|V"],
        "h1_given2": mu * ent["H1|X1"] + (n - mu) * ent["H1|2V"],
        "h2_given1": mu * ent["H2|X2"] + (n - mu) * ent["H2|1V"],
    }


def _joint_mz(
    strat: Strategy, aux: AuxInput, spec: MacWiretapSpec, caps: Caps
) -> np.ndarray:
    """Exact table over (u1seq, u2seq, observation code)."""
    n = strat.n
    p1 = sequence_probs(aux.p_u1.probs, n)
    p2 = sequence_probs(aux.p_u2.probs, n)
    zd = zdist_dense(strat, aux, spec, caps)
    zd *= p1[:, None, None]
    zd *= p2[None, :, None]
    return zd


def _brute_entropies(
    strat: Strategy, aux: AuxInput, spec: MacWiretapSpec, caps: Caps
) -> dict[str, Bits]:
    """All four wiretapper-conditioned entropies from one exact table."""
    t3 = _joint_mz(strat, aux, spec, caps)
    h_full = entropy(t3)
    a1 = t3.sum(axis=1)
    a2 = t3.sum(axis=0)
    h_u1z = entropy(a1)
    h_u2z = entropy(a2)
    h_z = entropy(a1.sum(axis=0))
    return {
        "h1": h_u1z - h_z,
        "h2": h_u2z - h_z,
        "h1_given2": h_full - h_u2z,
        "h2_given1": h_full - h_u1z,
    }


def _worst_strategy(model: Model, n: int, mu: int, user: int) -> Strategy:
    positions = tuple(range(1, mu + 1))
    if model is Model.MODEL1:
        return Strategy(model, n, positions, (user,) * mu)
    return Strategy(model, n, positions)


@dataclass(frozen=True)
class EntropyPair:
    closed: Bits
    brute: Optional[Bits]

    @property
    def gap(self) -> Optional[float]:
        return None if self.brute is None else abs(self.closed - self.brute)


@dataclass(frozen=True)
class WiretapEntropies:
    h1: EntropyPair
    h2: EntropyPair
    h1_given2: EntropyPair
    h2_given1: EntropyPair

    def max_gap(self) -> float:
        gaps = [p.gap for p in (self.h1, self.h2, self.h1_given2, self.h2_given1)]
        return max(g for g in gaps if g is not None)


def entropy_given_wiretap(
    aux: AuxInput,
    spec: MacWiretapSpec,
    n: int,
    mu: int,
    strat: Union[Strategy, str] = "worst",
    compute_brute: bool = True,
    caps: Caps = DEFAULT_CAPS,
) -> WiretapEntropies:
    """Closed-form sequence entropies given the wiretapper's view, with
    brute-force companions from the exact observation kernel.

    ``strat`` is a concrete strategy or ``"worst"`` for the per-quantity
    minimizing strategy (all taps aimed at the quantified user).
    """
    closed = _closed_forms(aux, spec, n, mu, strat)
    brute: dict[str, Optional[Bits]] = dict.fromkeys(closed, None)
    if compute_brute:
        if isinstance(strat, Strategy):
            per_target = dict.fromkeys(closed, strat)
        else:
            per_target = {
                "h1": _worst_strategy(spec.model, n, mu, 1),
                "h2": _worst_strategy(spec.model, n, mu, 2),
                "h1_given2": _worst_strategy(spec.model, n, mu, 1),
                "h2_given1": _worst_strategy(spec.model, n, mu, 2),
            }
        cache: dict[Strategy, dict[str, Bits]] = {}
        for key, st in per_target.items():
            if st not in cache:
                cache[st] = _brute_entropies(st, aux, spec, caps)
            brute[key] = cache[st][key]
    return WiretapEntropies(
        h1=EntropyPair(closed["h1"], brute["h1"]),
        h2=EntropyPair(closed["h2"], brute["h2"]),
        h1_given2=EntropyPair(closed["h1_given2"], brute["h1_given2"]),
        h2_given1=EntropyPair(closed["h2_given1"], brute["h2_given1"]),
    )


def worst_case_gammas(
    aux: AuxInput,
    spec: MacWiretapSpec,
    n: int,
    mu: int,
    gamma_slack: float = 0.1,
) -> tuple[Bits, Bits, Bits, Bits]:
    """Thresholds (gamma1, gamma2, gamma12, gamma21) set a factor
    (1 - gamma_slack) below the worst-case closed-form entropies."""
    cf = _closed_forms(aux, spec, n, mu, "worst")
    s = 1.0 - gamma_slack
    return (s * cf["h1"], s * cf["h2"], s * cf["h1_given2"], s * cf["h2_given1"])


# ---------------------------------------------------------------------------
# typical-set probabilities


@dataclass(frozen=True)
class TypicalReport:
    kind: str
    user: int
    strategy: Optional[Strategy]
    gamma: Optional[Bits]
    prob_in_d: float
    bound_rhs: Optional[float]
    satisfied: Optional[bool]


def _dset_masks(
    t3: np.ndarray, j: int, gamma_m: Bits, gamma_c: Bits
) -> tuple[np.ndarray, np.ndarray]:
    """Event indicators over (m1, m2, z) for the marginal and conditional sets.

    Marginal: -log2 p(u_j | z) > gamma_m.  Conditional: -log2 p(u_i | u_j, z)
    > gamma_c with i the other user.  Zero-probability conditionals count as
    infinite self-information (inside the sets).
    """
    pz = t3.sum(axis=(0, 1))
    if j == 1:
        a = t3.sum(axis=1)  # (m1, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            cond_m = np.where(pz[None, :] > 0, a / pz[None, :], 0.0)
        in_m = (cond_m < math.pow(2.0, -gamma_m)) | (cond_m == 0.0)
        in_m = in_m[:, None, :]
        b = a[:, None, :]
    else:
        a = t3.sum(axis=0)  # (m2, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            cond_m = np.where(pz[None, :] > 0, a / pz[None, :], 0.0)
        in_m = (cond_m < math.pow(2.0, -gamma_m)) | (cond_m == 0.0)
        in_m = in_m[None, :, :]
        b = a[None, :, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        cond_c = np.where(b > 0, t3 / b, 0.0)
    in_c = (cond_c < math.pow(2.0, -gamma_c)) | (cond_c == 0.0)
    return np.broadcast_to(in_m, t3.shape), in_c


def _self_info_tail(p_u, n: int, gamma: Bits) -> float:
    """P(-log2 p(U^n) > gamma) for an i.i.d. sequence, by exact enumeration."""
    p = sequence_probs(p_u.probs, n)
    return float(p[p < math.pow(2.0, -gamma)].sum())


def dset_prob(
    kind: str,
    j: int,
    params: LemmaParams,
    aux: AuxInput,
    spec: MacWiretapSpec,
    n: int,
    strat: Optional[Strategy] = None,
    caps: Caps = DEFAULT_CAPS,
) -> TypicalReport:
    """Exact probability of one typical set.

    ``kind``: ``"lemma1"`` (unconditional sequence self-information above
    gamma_j), ``"gamma_j"`` (conditional on the observation), ``"gamma_ij"``
    (the other user's sequence given this user's and the observation), or
    ``"d_j"`` (intersection of the last two).  The intersection report also
    carries the 1 - delta^2 requirement and whether it holds.
    """
    if j not in (1, 2):
        raise ValidationError("user index must be 1 or 2")
    if kind == "lemma1":
        gamma = params.gamma1 if j == 1 else params.gamma2
        prob = _self_info_tail(aux.p_u1 if j == 1 else aux.p_u2, n, gamma)
        return TypicalReport(kind, j, None, gamma, prob, None, None)
    if strat is None:
        raise ValidationError(f"kind {kind!r} needs a strategy")
    t3 = _joint_mz(strat, aux, spec, caps)
    gamma_m = params.gamma_for("marginal", j)
    gamma_c = params.gamma_for("conditional", j)
    in_m, in_c = _dset_masks(t3, j, gamma_m, gamma_c)
    if kind == "gamma_j":
        prob = float(t3[in_m].sum())
        return TypicalReport(kind, j, strat, gamma_m, prob, None, None)
    if kind == "gamma_ij":
        prob = float(t3[in_c].sum())
        return TypicalReport(kind, j, strat, gamma_c, prob, None, None)
    if kind == "d_j":
        prob = float(t3[in_m & in_c].sum())
        rhs = 1.0 - params.delta**2
        return TypicalReport(kind, j, strat, None, prob, rhs, prob >= rhs)
    raise ValidationError(f"unknown typical-set kind {kind!r}")


# ---------------------------------------------------------------------------
# lemma checks


@dataclass(frozen=True)
class Lemma1Report:
    draws: int
    mean_tv: float
    std_err: float
    rhs: float
    miss_probs: tuple[float, float]
    gammas: tuple[Bits, Bits]
    satisfied: bool
    vacuous: bool


def lemma1_check(
    params: ProtocolParams,
    gamma1: Bits,
    gamma2: Bits,
    draws: int,
    caps: Caps = DEFAULT_CAPS,
) -> Lemma1Report:
    """Empirical mean distance of the bins from joint uniformity vs. the
    one-shot bound (miss probability plus half the root bin-count ratio)."""
    bits = params.bin_bits
    wf_log2 = (bits[0] + bits[2], bits[1] + bits[3])
    miss = tuple(
        1.0 - _self_info_tail(params.aux.p_u1 if j == 1 else params.aux.p_u2,
                              params.n, gamma1 if j == 1 else gamma2)
        for j in (1, 2)
    )
    rhs = 0.0
    for j, m in enumerate(miss, start=1):
        g = gamma1 if j == 1 else gamma2
        rhs += m + 0.5 * math.sqrt(math.pow(2.0, wf_log2[j - 1] - g))
    tvs = np.empty(draws)
    for d in range(draws):
        tvs[d] = tv_from_uniform(sample_binning(params, caps, draw=d))
    mean = float(tvs.mean())
    se = float(tvs.std(ddof=1) / math.sqrt(draws)) if draws > 1 else 0.0
    return Lemma1Report(
        draws=draws,
        mean_tv=mean,
        std_err=se,
        rhs=rhs,
        miss_probs=miss,
        gammas=(gamma1, gamma2),
        satisfied=mean <= rhs,
        vacuous=rhs >= 1.0,
    )


@dataclass(frozen=True)
class Lemma2Report:
    draws: int
    violation_freq: float
    rhs: float
    eps_tilde: float
    threshold: float
    gammas: tuple[Bits, Bits, Bits, Bits]
    min_dset_prob: float
    precondition_ok: bool
    vacuous: bool
    satisfied: Optional[bool]
    max_divergence_seen: float


def _chernoff_term(epsilon: float, delta: float, gamma: Bits, wf_log2: float) -> float:
    log2_arg = gamma - wf_log2 - math.log2(3.0)
    if log2_arg > 1000:
        return 0.0
    return math.exp(-(epsilon**2) * (1.0 - delta) * math.pow(2.0, log2_arg))


def lemma2_check(
    params: ProtocolParams,
    delta: float,
    epsilon: float,
    draws: int,
    gamma_slack: float = 0.1,
    gammas: Optional[tuple[Bits, Bits, Bits, Bits]] = None,
    per_user: bool = False,
    caps: Caps = DEFAULT_CAPS,
    jobs: int = 1,
) -> Lemma2Report:
    """Doubly-exponential secrecy bound at finite blocklength.

    Measures, over binning draws, how often the worst-strategy divergence of
    (keys, public bins, observation) from (uniform x uniform x observation
    marginal) reaches twice the derived threshold, and compares against the
    closed-form right-hand side.  The alphabet factor uses the largest
    support-compact observation-space size over strategies; the strategy
    factor is the exact strategy count.  A right-hand side at or above 1 is
    reported vacuous.  The intersection-set precondition is verified exactly
    first; if it fails the report carries no bound claim.

    ``per_user=True`` uses the per-user threshold convention instead of the
    max over users.
    """
    spec, aux, n, mu = params.spec, params.aux, params.n, params.mu
    if gammas is None:
        gammas = worst_case_gammas(aux, spec, n, mu, gamma_slack)
    bits = params.bin_bits
    lp = LemmaParams(*gammas, delta=delta, epsilon=epsilon,
                     wf_log2_1=bits[0] + bits[2], wf_log2_2=bits[1] + bits[3])

    strategies = list(enumerate_strategies(spec.model, n, mu, caps))
    min_prob = 1.0
    for st in strategies:
        for j in (1, 2):
            rep = dset_prob("d_j", j, lp, aux, spec, n, strat=st, caps=caps)
            min_prob = min(min_prob, rep.prob_in_d)
    precondition_ok = min_prob >= 1.0 - delta**2

    # per-user convention sums the two per-user thresholds; default doubles the max
    if per_user:
        threshold = lp.eps_tilde_for(1) + lp.eps_tilde_for(2)
    else:
        threshold = 2.0 * lp.eps_tilde
    eps_tilde_val = lp.eps_tilde

    violations = 0
    worst_seen = 0.0
    for d in range(draws):
        binning = sample_binning(params, caps, draw=d)
        max_d = 0.0
        for st in strategies:
            kl, _ = leakage_terms(_joint_table(binning, st, caps))
            max_d = max(max_d, kl)
        worst_seen = max(worst_seen, max_d)
        if max_d >= threshold:
            violations += 1
    freq = violations / draws if draws else 0.0

    zmax = max(zspace_for(st, spec).size for st in strategies)
    count = strategy_count(spec.model, n, mu)
    g1, g2, g12, g21 = gammas
    order_a = _chernoff_term(epsilon, delta, g1, lp.wf_log2_1) + _chernoff_term(
        epsilon, delta, g21, lp.wf_log2_2
    )
    order_b = _chernoff_term(epsilon, delta, g2, lp.wf_log2_2) + _chernoff_term(
        epsilon, delta, g12, lp.wf_log2_1
    )
    rhs = count * zmax * min(order_a, order_b)
    vacuous = rhs >= 1.0
    satisfied: Optional[bool]
    if not precondition_ok:
        satisfied = None
    elif vacuous:
        satisfied = None
    else:
        satisfied = freq <= rhs
    return Lemma2Report(
        draws=draws,
        violation_freq=freq,
        rhs=rhs,
        eps_tilde=eps_tilde_val,
        threshold=threshold,
        gammas=gammas,
        min_dset_prob=min_prob,
        precondition_ok=precondition_ok,
        vacuous=vacuous,
        satisfied=satisfied,
        max_divergence_seen=worst_seen,
    )


# ---------------------------------------------------------------------------
# Chernoff-variant tail bound


@dataclass(frozen=True)
class BoundedVars:
    """Independent nonnegative variables in [0, bound] with given means.

    ``kind``: "bernoulli" (mass at 0 and bound), "constant", or "uniform"
    (uniform on [0, 2 mean], needing 2 mean <= bound).
    """

    kind: str
    bound: float
    means: tuple[float, ...]
    mbar: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("bernoulli", "constant", "uniform"):
            raise ValidationError(f"unknown variable kind {self.kind!r}")
        if self.bound <= 0:
            raise ValidationError("bound must be positive")
        for m in self.means:
            if m < 0:
                raise ValidationError("means must be nonnegative")
            limit = self.bound / 2 if self.kind == "uniform" else self.bound
            if m > limit + 1e-15:
                raise ValidationError(
                    f"mean {m} incompatible with support [0, {self.bound}] for {self.kind}"
                )
        if self.mbar is not None and self.mbar < sum(self.means) - 1e-12:
            raise ValidationError("mbar must dominate the sum of means")

    @property
    def mean_cap(self) -> float:
        return float(sum(self.means)) if self.mbar is None else float(self.mbar)

    def sample_sums(self, rng: np.random.Generator, trials: int) -> np.ndarray:
        means = np.asarray(self.means)
        if self.kind == "constant":
            return np.full(trials, means.sum())
        if self.kind == "bernoulli":
            hits = rng.random((trials, means.size)) < (means / self.bound)[None, :]
            return hits.sum(axis=1) * self.bound
        draws = rng.random((trials, means.size)) * (2.0 * means)[None, :]
        return draws.sum(axis=1)


@dataclass(frozen=True)
class ChernoffReport:
    trials: int
    tail_freq: float
    bound: float
    threshold: float
    satisfied: bool


def chernoff_variant_check(
    dist: BoundedVars, eps: float, trials: int, seed: int = 0
) -> ChernoffReport:
    """Empirical tail P(sum >= (1+eps) mbar) against exp(-eps^2 mbar / (3 bound))."""
    if not 0.0 <= eps <= 1.0:
        raise ValidationError(f"eps={eps} outside [0, 1]")
    rng = stream(seed, DOMAIN_CHERNOFF, 0)
    sums = dist.sample_sums(rng, trials)
    threshold = (1.0 + eps) * dist.mean_cap
    freq = float((sums >= threshold).mean()) if trials else 0.0
    bound = math.exp(-(eps**2) * dist.mean_cap / (3.0 * dist.bound))
    return ChernoffReport(trials, freq, bound, threshold, freq <= bound)


# ---------------------------------------------------------------------------
# binding rate constraints and elimination


@dataclass(frozen=True)
class ConstraintRow:
    name: str
    kind: str  # "public_min" | "total_max"
    value: Bits
    description: str


@dataclass(frozen=True)
class RateConstraintReport:
    constraints: tuple[ConstraintRow, ...]
    sw_thresholds: tuple[Bits, Bits, Bits]
    secrecy_caps: tuple[Bits, Bits, Optional[Bits]]
    derived_region: RegionPoly
    formula_region: RegionPoly
    max_gap: float


def rate_constraint_report(
    aux: AuxInput, spec: MacWiretapSpec, alpha: float, model: Optional[Model] = None
) -> RateConstraintReport:
    """All binding rate constraints, plus the (R1, R2) region they imply.

    The public rates must clear the joint-decoding thresholds; each user's
    total binning rate (key + public) is capped by the secrecy budget.
    Eliminating the public rates at the binding corner reproduces the
    region formula for the model, bound by bound (reported as ``max_gap``).
    """
    spec = spec.with_alpha(alpha)
    if model is not None:
        spec = spec.with_model(model)
    p1, p2 = aux.p_u1.probs, aux.p_u2.probs
    jy = p1[:, None, None] * p2[None, :, None] * concat_aux(aux, spec, "main").table
    s1 = cond_entropy(jy, ((0,), (1, 2)))
    s2 = cond_entropy(jy, ((1,), (0, 2)))
    s12 = cond_entropy(jy, ((0, 1), (2,)))

    ent = _letter_entropies(aux, spec)
    a = spec.alpha
    if spec.model in (Model.MODEL1, Model.MODEL3):
        k1 = a * ent["H1|X1"] + (1 - a) * ent["H1"]
        k2 = a * ent["H2|X2"] + (1 - a) * ent["H2"]
        k12 = None if spec.model is Model.MODEL1 else k1 + k2
    elif spec.model is Model.MODEL2:
        k1 = a * ent["H1|T"] + (1 - a) * ent["H1"]
        k2 = a * ent["H2|T"] + (1 - a) * ent["H2"]
        jt = np.einsum("u,v,ua,vb,abt->uvt", p1, p2, aux.k_x1_u1.table,
                       aux.k_x2_u2.table, sum_kernel(spec.alph_x1, spec.alph_x2))
        k12 = a * cond_entropy(jt, ((0, 1), (2,))) + (1 - a) * (ent["H1"] + ent["H2"])
    else:
        k1 = a * ent["H1|X1"] + (1 - a) * ent["H1|V"]
        k2 = a * ent["H2|X2"] + (1 - a) * ent["H2|V"]
        jv = (
            p1[:, None, None] * p2[None, :, None] * concat_aux(aux, spec, "wtap").table
        )
        # H(U1,U2|X1,X2) = H(U1|X1) + H(U2|X2) for independent blocks
        k12 = a * (ent["H1|X1"] + ent["H2|X2"]) + (1 - a) * cond_entropy(
            jv, ((0, 1), (2,))
        )

    total_cap = k1 + k2 if k12 is None else min(k1 + k2, k12)
    derived = RegionPoly(
        max(0.0, k1 - s1), max(0.0, k2 - s2), max(0.0, total_cap - s12)
    )
    formula = region_for(aux, spec)
    gaps = [abs(x - y) for x, y in zip(derived.bounds(), formula.bounds())]

    rows = [
        ConstraintRow("public_rate_1", "public_min", s1,
                      "user 1 public rate must cover its conditional ambiguity at the decoder"),
        ConstraintRow("public_rate_2", "public_min", s2,
                      "user 2 public rate must cover its conditional ambiguity at the decoder"),
        ConstraintRow("public_rate_sum", "public_min", s12,
                      "public rates jointly cover the pair ambiguity at the decoder"),
        ConstraintRow("total_rate_1", "total_max", k1,
                      "user 1 key+public rate capped by its secrecy budget"),
        ConstraintRow("total_rate_2", "total_max", k2,
                      "user 2 key+public rate capped by its secrecy budget"),
    ]
    if k12 is not None:
        rows.append(
            ConstraintRow("total_rate_sum", "total_max", k12,
                          "combined key+public rates capped by the joint secrecy budget")
        )
    return RateConstraintReport(
        constraints=tuple(rows),
        sw_thresholds=(s1, s2, s12),
        secrecy_caps=(k1, k2, k12),
        derived_region=derived,
        formula_region=formula,
        max_gap=max(gaps),
    )


def log_slope(ns: np.ndarray, vals: np.ndarray) -> float:
    """Least-squares slope of log2(vals) against ns (empirical decay exponent)."""
    ns = np.asarray(ns, dtype=np.float64)
    logs = np.log2(np.asarray(vals, dtype=np.float64))
    ns_c = ns - ns.mean()
    return float((ns_c * (logs - logs.mean())).sum() / (ns_c**2).sum())
