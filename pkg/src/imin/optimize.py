"""Greedy coverage maximization with adaptive sample-doubling certificates.

Both bound maximizers share one skeleton: grow two independent sample
collections, pick a blocker set greedily on the first, certify it against
the second, and stop as soon as the certified ratio clears 1 - 1/e -
epsilon (or a sample cap derived from a union bound over all candidate
sets is reached).  The certified ratio compares a high-probability lower
bound on the chosen set's objective value with a high-probability upper
bound on the optimum, both obtained by inverting martingale tail bounds on
coverage counts.
"""

from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .diffusion import SpreadEstimate, stopping_rule_spread
from .graph import BlockerSet, UnifiedGraph
from .sampling import CPCollection, LRRCollection, compute_population

E_FRACTION = 1.0 - 1.0 / math.e


@dataclass
class AlgoParams:
    """Budget and error knobs shared by the bound maximizers."""

    k: int
    epsilon: float = 0.2
    delta: float = 0.1
    beta: float = 0.1
    gamma: float = 0.1

    def validate(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        for name in ("epsilon", "delta", "beta", "gamma"):
            val = getattr(self, name)
            if not 0.0 < val < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {val}")
        if 2.0 * self.beta / (1.0 + self.beta) > self.epsilon:
            warnings.warn(
                "2*beta/(1+beta) exceeds epsilon; the stated running-time "
                "bound does not apply (results remain valid)",
                stacklevel=2)


@dataclass
class SampleSchedule:
    """Doubling schedule: start size, cap, round limit and tail log-term."""

    samples_initial: float
    samples_cap: float
    rounds_cap: int
    log_term: float  # ln(3 * rounds_cap / delta), used on both stop sides


@dataclass
class StopCheck:
    """One round's certified bounds and the stop decision."""

    sigma_lower: float
    sigma_upper: float
    ratio: float
    stopped: bool


@dataclass
class BoundCertificate:
    """Diagnostics attached to a maximizer's returned blocker set."""

    side: str
    blockers: BlockerSet
    early_exit: bool = False
    ratio: float = None
    sigma_lower: float = None
    sigma_upper: float = None
    rounds: int = 0
    samples_primary: int = 0
    samples_validation: int = 0
    schedule: SampleSchedule = None
    spread_estimate: SpreadEstimate = None
    population_size: int = None
    opt_lower: float = None
    checks: list = field(default_factory=list, repr=False)
    validation_collection: object = field(default=None, repr=False)

    def as_dict(self):
        return {
            "side": self.side,
            "blockers": list(self.blockers),
            "early_exit": self.early_exit,
            "ratio": self.ratio,
            "sigma_lower": self.sigma_lower,
            "sigma_upper": self.sigma_upper,
            "rounds": self.rounds,
            "samples_primary": self.samples_primary,
            "samples_validation": self.samples_validation,
            "samples_initial": (self.schedule.samples_initial
                                if self.schedule else None),
            "samples_cap": (self.schedule.samples_cap
                            if self.schedule else None),
            "rounds_cap": self.schedule.rounds_cap if self.schedule else None,
            "population_size": self.population_size,
            "opt_lower": self.opt_lower,
        }


@dataclass
class GreedyTrace:
    """Greedy selection order with per-step gains and prefix coverages."""

    selected: list
    gains: list
    coverages: list  # coverage of the empty prefix, then after each pick


def _candidates(g: UnifiedGraph):
    return [v for v in range(g.base.n) if v not in g.seeds]


def max_coverage(collection, k: int, g: UnifiedGraph = None):
    """k rounds of best-marginal selection (lazy evaluation, CELF-style).

    Ties break toward the lowest node id; zero-gain picks are allowed so
    the result always has min(k, #candidates) nodes.  Returns the chosen
    set plus the trace needed by `cov_upper_opt`.
    """
    g = g if g is not None else collection.ug
    cand = _candidates(g)
    state = collection.state()
    gains0 = state.gains_all(g.n_total)
    heap = [(-int(gains0[v]), v, 0) for v in cand]
    heapq.heapify(heap)

    selected, gains, coverages = [], [], [0]
    step = 0
    while heap and len(selected) < k:
        neg, v, at = heapq.heappop(heap)
        if at < step:
            heapq.heappush(heap, (-state.gain(v), v, step))
            continue
        selected.append(v)
        gains.append(-neg)
        state.add(v)
        coverages.append(coverages[-1] + (-neg))
        step += 1
    return (BlockerSet(selected),
            GreedyTrace(selected=selected, gains=gains, coverages=coverages))


def _topk_sum(values: np.ndarray, k: int) -> int:
    k = min(k, len(values))
    if k <= 0:
        return 0
    return int(np.partition(values, len(values) - k)[len(values) - k:].sum())


def cov_upper_opt(collection, trace: GreedyTrace, k: int,
                  g: UnifiedGraph = None) -> float:
    """Coverage upper bound for the unknown optimum k-set.

    For each greedy prefix, the prefix's coverage plus its k largest
    marginal gains bounds any k-set's coverage from above (submodularity);
    the minimum over prefixes is returned.
    """
    g = g if g is not None else collection.ug
    state = collection.state()
    best = math.inf
    for i in range(len(trace.selected) + 1):
        gains = state.gains_all(g.n_total)
        best = min(best, trace.coverages[i] + _topk_sum(gains, k))
        if i < len(trace.selected):
            state.add(trace.selected[i])
    return float(best)


def direct_activation_prob(g: UnifiedGraph, v: int) -> float:
    """One-hop probability that the seed layer activates v directly."""
    base = g.base
    lo, hi = base.in_ptr[v], base.in_ptr[v + 1]
    miss = 1.0
    found = False
    for off in range(lo, hi):
        if int(base.in_src[off]) in g.seeds:
            found = True
            miss *= 1.0 - base.in_p[off]
    if not found:
        raise ValueError(f"node {v} is not an out-neighbor of the seed set")
    return 1.0 - miss


def seed_neighbor_probs(g: UnifiedGraph):
    """(node, one-hop activation probability) for every seed out-neighbor."""
    return [(v, direct_activation_prob(g, v)) for v in g.seed_out_neighbors()]


def opt_lower_bound(g: UnifiedGraph, k: int) -> float:
    """Sum of the k largest one-hop seed-activation probabilities."""
    probs = sorted((p for _, p in seed_neighbor_probs(g)), reverse=True)
    return float(sum(probs[:k]))


def _log_binom(a: int, b: int) -> float:
    a = max(a, b)
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def _make_schedule(scale: float, denom: float, ln_choose: float,
                   ln_tail: float, delta: float) -> SampleSchedule:
    """Common schedule arithmetic for both maximizers.

    samples_cap = 2 * scale * ((1-1/e) sqrt(ln_tail) +
                  sqrt((1-1/e)(ln_choose + ln_tail)))^2 / denom,
    samples_initial = samples_cap * denom / scale.
    """
    core = 2.0 * (E_FRACTION * math.sqrt(ln_tail)
                  + math.sqrt(E_FRACTION * (ln_choose + ln_tail))) ** 2
    samples_cap = scale * core / denom
    samples_initial = samples_cap * denom / scale
    rounds_cap = max(1, math.ceil(math.log2(samples_cap / samples_initial)))
    return SampleSchedule(samples_initial=samples_initial,
                          samples_cap=samples_cap,
                          rounds_cap=rounds_cap,
                          log_term=math.log(3.0 * rounds_cap / delta))


def _sigma_lower_term(cov_scaled: float, a1: float) -> float:
    """Invert the lower-tail bound: high-probability floor for the mean."""
    root = math.sqrt(cov_scaled + 2.0 * a1 / 9.0) - math.sqrt(a1 / 2.0)
    return root * root - a1 / 18.0


def _sigma_upper_term(cov_scaled: float, a2: float) -> float:
    """Invert the upper-tail bound: high-probability cap for the optimum."""
    root = math.sqrt(cov_scaled + a2 / 2.0) + math.sqrt(a2 / 2.0)
    return root * root


def _early_on_return(g, k, side, extra):
    on = g.seed_out_neighbors()
    blockers = BlockerSet(on)
    cert = BoundCertificate(side=side, blockers=blockers, early_exit=True,
                            **extra)
    return blockers, cert


def lsbm(g: UnifiedGraph, params: AlgoParams,
         rng: np.random.Generator) -> tuple:
    """Blocker selection maximizing the lower-bound objective.

    Returns (blockers, certificate).  With probability at least 1 - delta
    the returned set's lower-bound value is within 1 - 1/e - epsilon of the
    best achievable with k blockers.
    """
    params.validate()
    k = params.k
    on = g.seed_out_neighbors()
    if len(on) <= k:
        return _early_on_return(g, k, "lower", {})

    ihat = stopping_rule_spread(g, None, gamma=params.beta,
                                delta=params.delta / 6.0, rng=rng)
    if ihat.exact_zero:
        empty = BlockerSet()
        return empty, BoundCertificate(side="lower", blockers=empty,
                                       early_exit=True, spread_estimate=ihat)
    opt_low = opt_lower_bound(g, k)
    if opt_low <= 0.0:
        raise ValueError("every seed out-edge has zero probability; "
                         "the schedule lower bound is degenerate")

    n, n_seeds = g.base.n, len(g.seeds)
    denom = (1.0 - params.beta) * params.epsilon ** 2 * opt_low
    sched = _make_schedule(scale=ihat.value, denom=denom,
                           ln_choose=_log_binom(n - n_seeds, k),
                           ln_tail=math.log(12.0 / params.delta),
                           delta=params.delta)

    rng_primary, rng_validation = rng.spawn(2)
    primary = CPCollection(g, rng_primary)
    validation = CPCollection(g, rng_validation)
    start = max(1, math.ceil(sched.samples_initial))
    primary.extend(start)
    validation.extend(start)

    a1 = a2 = sched.log_term
    target = E_FRACTION - params.epsilon
    checks = []
    for round_no in range(1, sched.rounds_cap + 1):
        blockers, trace = max_coverage(primary, k, g)
        val_state = validation.state()
        for u in blockers:
            val_state.add(u)
        cov_val = val_state.coverage()

        sigma_low = 0.0
        low_arg = cov_val * (1.0 - params.beta) / ihat.value
        high_arg = cov_val * (1.0 + params.beta) / ihat.value
        if low_arg >= 5.0 * a1 / 18.0:
            sigma_low = _sigma_lower_term(low_arg, a1) / validation.n_samples
        elif high_arg <= 5.0 * a1 / 18.0:
            sigma_low = _sigma_lower_term(high_arg, a1) / validation.n_samples
        sigma_low = max(sigma_low, 0.0)

        cov_opt = cov_upper_opt(primary, trace, k, g)
        sigma_up = _sigma_upper_term(
            cov_opt * (1.0 + params.beta) / ihat.value, a2) \
            / primary.n_samples

        ratio = sigma_low / sigma_up
        stop = ratio >= target or round_no == sched.rounds_cap
        checks.append(StopCheck(sigma_lower=sigma_low, sigma_upper=sigma_up,
                                ratio=ratio, stopped=stop))
        if stop:
            return blockers, BoundCertificate(
                side="lower", blockers=blockers, ratio=ratio,
                sigma_lower=sigma_low, sigma_upper=sigma_up,
                rounds=round_no, samples_primary=primary.n_samples,
                samples_validation=validation.n_samples, schedule=sched,
                spread_estimate=ihat, opt_lower=opt_low, checks=checks,
                validation_collection=validation)
        primary.extend(primary.n_samples)
        validation.extend(validation.n_samples)


def gsbm(g: UnifiedGraph, params: AlgoParams,
         rng: np.random.Generator) -> tuple:
    """Blocker selection maximizing the upper-bound objective.

    Same doubling skeleton as `lsbm` over reverse-reachable samples; the
    population size is known exactly, so the certified bounds carry no
    spread-estimation slack.
    """
    params.validate()
    k = params.k
    on = g.seed_out_neighbors()
    if len(on) <= k:
        return _early_on_return(g, k, "upper", {})

    population = compute_population(g)
    if not population:
        # mirror the lower maximizer's zero-spread path so the combined
        # pipeline degrades gracefully on dead graphs
        empty = BlockerSet()
        return empty, BoundCertificate(side="upper", blockers=empty,
                                       early_exit=True, population_size=0)
    opt_low = opt_lower_bound(g, k)
    if opt_low <= 0.0:
        raise ValueError("every seed out-edge has zero probability; "
                         "the schedule lower bound is degenerate")

    npop = len(population)
    denom = params.epsilon ** 2 * opt_low
    sched = _make_schedule(scale=float(npop), denom=denom,
                           ln_choose=_log_binom(npop - len(g.seeds), k),
                           ln_tail=math.log(6.0 / params.delta),
                           delta=params.delta)

    rng_primary, rng_validation = rng.spawn(2)
    primary = LRRCollection(g, rng_primary, population=population)
    validation = LRRCollection(g, rng_validation, population=population)
    start = max(1, math.ceil(sched.samples_initial))
    primary.extend(start)
    validation.extend(start)

    a1 = a2 = sched.log_term
    target = E_FRACTION - params.epsilon
    checks = []
    for round_no in range(1, sched.rounds_cap + 1):
        blockers, trace = max_coverage(primary, k, g)
        val_state = validation.state()
        for u in blockers:
            val_state.add(u)
        cov_val = val_state.coverage()

        sigma_low = max(0.0, _sigma_lower_term(float(cov_val), a1)) \
            * npop / validation.n_samples
        cov_opt = cov_upper_opt(primary, trace, k, g)
        sigma_up = _sigma_upper_term(cov_opt, a2) * npop / primary.n_samples

        ratio = sigma_low / sigma_up
        stop = ratio >= target or round_no == sched.rounds_cap
        checks.append(StopCheck(sigma_lower=sigma_low, sigma_upper=sigma_up,
                                ratio=ratio, stopped=stop))
        if stop:
            return blockers, BoundCertificate(
                side="upper", blockers=blockers, ratio=ratio,
                sigma_lower=sigma_low, sigma_upper=sigma_up,
                rounds=round_no, samples_primary=primary.n_samples,
                samples_validation=validation.n_samples, schedule=sched,
                population_size=npop, opt_lower=opt_low, checks=checks,
                validation_collection=validation)
        primary.extend(primary.n_samples)
        validation.extend(validation.n_samples)
