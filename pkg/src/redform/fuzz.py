"""Seeded cross-check campaigns between the characterization and the LP oracle."""
from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .characterization import check_cuts, count_cuts
from .core import Implementable, InequalitiesHold, Instance, NotImplementable, reduce
from .generators import (
    gen_compromise,
    gen_mixture,
    gen_package_exchange,
    gen_random_expost,
    gen_random_instance,
    gen_random_interim,
)
from .oracle import cross_check

KINDS = ("expost", "free", "cone", "mixture")
FAMILIES = ("random", "package", "compromise")


@dataclass(frozen=True)
class TrialSpec:
    index: int
    seed: int
    family: str
    t1: int
    t2: int
    alts: int
    kind: str


@dataclass
class TrialResult:
    spec: TrialSpec
    verdict: str
    certificate: str
    oracle_feasible: bool
    agree: bool
    gap: bool
    detail: str
    cuts: int
    violated_cuts: int
    document: Optional[str] = None


def _random_prior(rng: random.Random, n: int, high: int = 6) -> list:
    w = [rng.randint(1, high) for _ in range(n)]
    return [Fraction(x, sum(w)) for x in w]


def build_instance(spec: TrialSpec) -> Instance:
    rng = random.Random(spec.seed)
    if spec.family == "random":
        return gen_random_instance(rng.randrange(2**63), spec.t1, spec.t2, spec.alts)
    if spec.family == "package":
        return gen_package_exchange(spec.t2, _random_prior(rng, 2), _random_prior(rng, spec.t2))
    if spec.family == "compromise":
        return gen_compromise(_random_prior(rng, 2), _random_prior(rng, 2))
    raise ValueError(f"unknown family {spec.family!r}")


def build_rule(inst: Instance, spec: TrialSpec):
    seed = random.Random(spec.seed ^ 0x5DEECE66D).randrange(2**63)
    if spec.kind == "expost":
        return reduce(inst, gen_random_expost(inst, seed))
    if spec.kind in ("free", "cone"):
        return gen_random_interim(inst, seed, mode=spec.kind)
    if spec.kind == "mixture":
        return gen_mixture(inst, seed)
    raise ValueError(f"unknown rule kind {spec.kind!r}")


def plan_trials(trials: int, seed: int, family: str = "random",
                t1_sizes: Sequence[int] = (2,), t2_sizes: Sequence[int] = (2, 3, 4),
                alt_counts: Sequence[int] = (2, 3, 4), kinds: Sequence[str] = KINDS) -> list:
    """Deterministic trial list cycling through sizes and rule generators."""
    if family == "package":
        alt_counts = (4,)
        t1_sizes = (2,)
    elif family == "compromise":
        t1_sizes, t2_sizes, alt_counts = (2,), (2,), (3,)
    combos = list(itertools.product(t1_sizes, t2_sizes, alt_counts))
    rng = random.Random(seed)
    out = []
    for i in range(trials):
        t1, t2, alts = combos[i % len(combos)]
        kind = kinds[(i // len(combos)) % len(kinds)]
        out.append(TrialSpec(i, rng.randrange(2**63), family, t1, t2, alts, kind))
    return out


def run_trial(spec: TrialSpec) -> TrialResult:
    from .io import dumps

    inst = build_instance(spec)
    Q = build_rule(inst, spec)
    mode = "full" if inst.satisfies_assumption else "necessary-only"
    res = cross_check(inst, Q, mode=mode)
    verdict = res.characterization
    if isinstance(verdict, Implementable):
        kind = "implementable"
    elif isinstance(verdict, InequalitiesHold):
        kind = "inequalities-hold"
    else:
        kind = "not-implementable"
    cert = str(verdict.certificate) if isinstance(verdict, NotImplementable) else ""
    return TrialResult(
        spec=spec,
        verdict=kind,
        certificate=cert,
        oracle_feasible=res.oracle is not None,
        agree=res.agree,
        gap=res.gap,
        detail=res.detail,
        cuts=count_cuts(inst),
        violated_cuts=len(check_cuts(inst, Q, mode="all")),
        document=None if res.agree and not res.gap else dumps(inst, Q),
    )


def run_trials(specs: Sequence[TrialSpec], jobs: int = 1) -> list:
    if jobs <= 1:
        return [run_trial(s) for s in specs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_trial, specs, chunksize=max(1, len(specs) // (jobs * 8))))


@dataclass
class FuzzSummary:
    results: list

    @property
    def disagreements(self) -> list:
        return [r for r in self.results if not r.agree]

    @property
    def gaps(self) -> list:
        return [r for r in self.results if r.gap]

    def lines(self) -> list[str]:
        rs = self.results
        n = len(rs)
        impl = sum(r.oracle_feasible for r in rs)
        out = [
            f"trials\t{n}",
            f"agreements\t{n - len(self.disagreements)}",
            f"disagreements\t{len(self.disagreements)}",
            f"oracle_feasible\t{impl}",
            f"implementable_fraction\t{Fraction(impl, n) if n else 0}",
        ]
        for verdict in ("implementable", "not-implementable", "inequalities-hold"):
            out.append(f"verdict.{verdict}\t{sum(r.verdict == verdict for r in rs)}")
        for cert in ("CONIC", "NEGATIVE", "CUT"):
            out.append(f"certificate.{cert}\t{sum(r.certificate.startswith(cert) for r in rs)}")
        out.append(f"necessary_only_gaps\t{len(self.gaps)}")
        if rs:
            out.append(f"cuts_per_trial\tmin={min(r.cuts for r in rs)}\tmax={max(r.cuts for r in rs)}")
            out.append("violated_cuts_per_trial\t"
                       f"min={min(r.violated_cuts for r in rs)}\tmax={max(r.violated_cuts for r in rs)}")
        for r in self.disagreements:
            out.append(f"DISAGREE\ttrial={r.spec.index}\tseed={r.spec.seed}\t{r.detail}")
        return out


def fuzz(trials: int, seed: int, family: str = "random", t1_sizes=(2,), t2_sizes=(2, 3, 4),
         alt_counts=(2, 3, 4), kinds=KINDS, jobs: int = 1) -> FuzzSummary:
    specs = plan_trials(trials, seed, family, t1_sizes, t2_sizes, alt_counts, kinds)
    return FuzzSummary(run_trials(specs, jobs))
