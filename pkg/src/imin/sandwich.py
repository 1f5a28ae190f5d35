"""The three-candidate sandwich combiner and its data-dependent ratio.

Three blocker sets are produced — the two certified bound maximizers plus
a one-hop heuristic — and the one whose residual spread estimate is
smallest wins.  Because the upper-bound objective dominates the true
decrease, the ratio of the winner-side estimates yields a computable lower
bound on the approximation ratio actually achieved.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .diffusion import SpreadEstimate, stopping_rule_spread
from .graph import BlockerSet, UnifiedGraph
from .optimize import (AlgoParams, E_FRACTION, gsbm, lsbm,
                       seed_neighbor_probs)
from .sampling import LRRCollection

log = logging.getLogger(__name__)

_FALLBACK_RATIO_SAMPLES = 2048


def lhga(g: UnifiedGraph, k: int) -> BlockerSet:
    """Heuristic blockers: seed out-neighbors scored by one-hop activation
    probability times base out-degree (ties: lowest id)."""
    scored = seed_neighbor_probs(g)
    if k >= len(scored):
        return BlockerSet(v for v, _ in scored)
    outdeg = g.base.out_degree()
    ranked = sorted(scored, key=lambda vp: (-vp[1] * outdeg[vp[0]], vp[0]))
    return BlockerSet(v for v, _ in ranked[:k])


@dataclass
class SandwichResult:
    """Candidates, their residual-spread estimates and the winner."""

    b_lower: BlockerSet
    b_upper: BlockerSet          # None when the upper maximizer was skipped
    b_heuristic: BlockerSet
    base_estimate: SpreadEstimate
    residual_estimates: dict     # candidate name -> SpreadEstimate
    chosen_name: str
    chosen: BlockerSet
    decrease_estimate: float
    empirical_ratio: float       # None when b_upper is absent
    certificates: dict = field(default_factory=dict, repr=False)
    timings: dict = field(default_factory=dict, repr=False)

    def candidate(self, name):
        return {"lower": self.b_lower, "upper": self.b_upper,
                "heuristic": self.b_heuristic}[name]

    def as_dict(self):
        return {
            "candidates": {
                name: (list(self.candidate(name))
                       if self.candidate(name) is not None else None)
                for name in ("lower", "upper", "heuristic")},
            "base_spread_estimate": self.base_estimate.value,
            "residual_estimates": {
                name: est.value
                for name, est in self.residual_estimates.items()},
            "decrease_estimates": {
                name: max(0.0, self.base_estimate.value - est.value)
                for name, est in self.residual_estimates.items()},
            "chosen": self.chosen_name,
            "blockers": list(self.chosen),
            "decrease_estimate": self.decrease_estimate,
            "empirical_ratio": self.empirical_ratio,
            "certificates": {name: cert.as_dict()
                             for name, cert in self.certificates.items()},
            "timings_s": self.timings,
        }


def _upper_bound_estimate(g, blockers, certificate, rng):
    """Estimate the upper-bound value of `blockers` from reverse samples.

    Reuses the maximizer's final validation collection (independent of the
    selection) when available, falling back to a fresh collection after an
    early exit.  A graph whose seeds influence nobody has value 0.
    """
    coll = certificate.validation_collection if certificate else None
    if coll is None:
        from .sampling import compute_population

        if not compute_population(g):
            return 0.0
        coll = LRRCollection(g, rng)
        coll.extend(_FALLBACK_RATIO_SAMPLES)
    state = coll.state()
    for u in blockers:
        state.add(u)
    return len(coll.population) * state.coverage() / coll.n_samples


def empirical_ratio(result: SandwichResult, g: UnifiedGraph,
                    params: AlgoParams, rng: np.random.Generator) -> float:
    """Computable lower bound on the achieved approximation ratio.

    ((1-gamma)/(1+gamma))^2 * (1-1/e-epsilon) * D_hat(B_U) / D_hat^U(B_U),
    clamped to [0, 1]; zero (with a log warning) when the upper-side
    estimate is degenerate.
    """
    if result.b_upper is None:
        raise ValueError("empirical ratio needs the upper-bound candidate")
    dec_upper = max(0.0, result.base_estimate.value
                    - result.residual_estimates["upper"].value)
    upper_val = _upper_bound_estimate(
        g, result.b_upper, result.certificates.get("upper"), rng)
    if upper_val <= 0.0:
        log.warning("degenerate upper-bound estimate (0); ratio set to 0")
        return 0.0
    gamma = params.gamma
    scale = ((1.0 - gamma) / (1.0 + gamma)) ** 2 \
        * (E_FRACTION - params.epsilon)
    return float(min(1.0, max(0.0, scale * dec_upper / upper_val)))


def _combine(g, params, rng, with_upper):
    params.validate()
    rng_low, rng_up, rng_est, rng_ratio = rng.spawn(4)
    timings = {}
    certificates = {}

    t0 = time.perf_counter()
    b_low, cert_low = lsbm(g, params, rng_low)
    timings["lower"] = time.perf_counter() - t0
    certificates["lower"] = cert_low

    b_up = None
    if with_upper:
        t0 = time.perf_counter()
        b_up, cert_up = gsbm(g, params, rng_up)
        timings["upper"] = time.perf_counter() - t0
        certificates["upper"] = cert_up

    t0 = time.perf_counter()
    b_heur = lhga(g, params.k)
    timings["heuristic"] = time.perf_counter() - t0

    names = ["lower"] + (["upper"] if with_upper else []) + ["heuristic"]
    sets = {"lower": b_low, "upper": b_up, "heuristic": b_heur}

    t0 = time.perf_counter()
    base = stopping_rule_spread(g, None, gamma=params.gamma,
                                delta=params.delta, rng=rng_est)
    residuals = {}
    for name in names:
        residuals[name] = stopping_rule_spread(
            g, sets[name], gamma=params.gamma, delta=params.delta,
            rng=rng_est)
    timings["evaluation"] = time.perf_counter() - t0

    chosen_name = min(names, key=lambda nm: residuals[nm].value)
    decrease = max(0.0, base.value - residuals[chosen_name].value)

    result = SandwichResult(
        b_lower=b_low, b_upper=b_up, b_heuristic=b_heur,
        base_estimate=base, residual_estimates=residuals,
        chosen_name=chosen_name, chosen=sets[chosen_name],
        decrease_estimate=decrease, empirical_ratio=None,
        certificates=certificates, timings=timings)

    if with_upper:
        t0 = time.perf_counter()
        result.empirical_ratio = empirical_ratio(result, g, params,
                                                 rng_ratio)
        timings["ratio"] = time.perf_counter() - t0
    return result


def sand_imin(g: UnifiedGraph, params: AlgoParams,
              rng: np.random.Generator) -> SandwichResult:
    """Run all three candidates and return the residual-spread argmin."""
    return _combine(g, params, rng, with_upper=True)


def sand_imin_minus(g: UnifiedGraph, params: AlgoParams,
                    rng: np.random.Generator) -> SandwichResult:
    """The cheaper variant: skip the upper-bound maximizer (no ratio)."""
    return _combine(g, params, rng, with_upper=False)
