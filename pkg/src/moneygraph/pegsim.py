"""Convertibility and peg analysis.

A gold standard and a currency peg are the same machine: a standing promise
to redeem domestic claims into a finite reserve asset at a fixed rate. The
deterministic side (:func:`redeem`) executes that promise on a balance-sheet
graph until reserves run out; the stochastic side (:func:`simulate`) runs the
reserve level as a random walk under net redemption demand and measures how
often, and how soon, it is absorbed at zero.

Exactness: demand deltas are integers with exact rational probabilities, so
two independent oracles — exhaustive path enumeration and dynamic programming
over reserve levels — compute the depletion probability as an exact Fraction,
against which the Monte Carlo frequency is checked.

Reproducibility: the PRNG is splitmix64; trial ``i`` is seeded with
``seed XOR i``, so every trial is independent of execution order and the
whole run is bit-for-bit reproducible from ``(seed, trials)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .errors import (
    BadDistributionError,
    IndivisibleError,
    InsufficientClaimError,
    MissingAgentError,
    ReservesDepletedError,
    TooLargeError,
    ZeroAmountError,
)
from .ledger import (
    AgentId,
    BalanceGraph,
    CommodityDelta,
    CurrencyId,
    EdgeDelta,
    InstrumentKind,
    UnitId,
    format_rational,
)
from .ops import OpRecord

_MASK = (1 << 64) - 1
_PATH_GUARD = 10**7


class SplitMix64:
    """splitmix64 PRNG; 64-bit outputs, documented constants."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)


@dataclass(frozen=True)
class PegConfig:
    """A defended conversion promise: ``rate`` reserve units per domestic
    minor unit, backed by finite reserves."""

    domestic: CurrencyId
    reserve_asset: UnitId  # commodity (gold standard) or foreign currency (peg)
    rate: Fraction
    initial_reserves: int

    def __post_init__(self):
        if self.rate <= 0:
            raise BadDistributionError("rate must be positive")
        if self.initial_reserves < 0:
            raise BadDistributionError("initial reserves must be nonnegative")


@dataclass(frozen=True)
class DemandProcess:
    """Stochastic net redemption demand: per-step integer deltas with exact
    probabilities summing to one. Positive delta = net redemption."""

    deltas: tuple  # ((step_delta, probability), ...) in declaration order
    horizon: int
    trials: int
    seed: int

    def __post_init__(self):
        if not self.deltas:
            raise BadDistributionError("at least one delta required")
        total = Fraction(0)
        for d, p in self.deltas:
            if not isinstance(d, int):
                raise BadDistributionError(f"delta {d!r} is not an integer")
            p = Fraction(p)
            if p <= 0:
                raise BadDistributionError(f"probability {p} must be positive")
            total += p
        if total != 1:
            raise BadDistributionError(f"probabilities sum to {total}, not 1")
        if self.horizon < 0:
            raise BadDistributionError("horizon must be nonnegative")
        if self.trials <= 0:
            raise BadDistributionError("trials must be positive")


@dataclass(frozen=True)
class RunOutcome:
    """Depletion statistics of a batch of redemption walks."""

    trials: int
    depletion_steps: tuple  # per trial: first step with reserves <= 0, or None
    frequency: Fraction
    mean_survival: Fraction

    @property
    def depleted(self) -> int:
        return sum(1 for s in self.depletion_steps if s is not None)

    def to_json_dict(self) -> dict:
        return {
            "depleted": self.depleted,
            "trials": self.trials,
            "frequency": format_rational(self.frequency),
            "mean_survival": format_rational(self.mean_survival),
        }


# ----------------------------------------------------------------------
# deterministic redemption on the graph
# ----------------------------------------------------------------------

def redeem(g: BalanceGraph, holder: AgentId, amount: int, peg: PegConfig) -> None:
    """Redeem ``amount`` of the holder's convertible claims on the central
    bank for the reserve asset at the pegged rate, atomically.

    Once reserves hit zero every further call fails: the defended rate is
    dead. Conversion must be exact (no fractional reserve units).
    """
    if amount <= 0:
        raise ZeroAmountError("redemption amount must be positive")
    g.agent(holder)
    cb = g.central_bank(peg.domestic)
    if cb is None:
        raise MissingAgentError(f"no central bank issues {peg.domestic}")
    need_frac = amount * peg.rate
    if need_frac.denominator != 1:
        raise IndivisibleError(
            f"{amount} at rate {format_rational(peg.rate)} is not a whole number of reserve units"
        )
    need = need_frac.numerator
    claims = [
        i for i in sorted(g.instruments.values(), key=lambda i: i.id)
        if i.kind is InstrumentKind.CONVERTIBLE_NOTE
        and i.debtor == cb.id and i.creditor == holder
        and i.currency == peg.domestic
        and i.redemption.target == peg.reserve_asset
        and i.redemption.rate == peg.rate
    ]
    held = sum(i.amount for i in claims)
    if held < amount:
        raise InsufficientClaimError(f"holder {holder} holds {held} convertible claims, needs {amount}")
    deltas: list = []
    if peg.reserve_asset in g.commodities:
        reserves = g.holding(cb.id, peg.reserve_asset)
        if reserves < need:
            raise ReservesDepletedError(
                f"reserves {reserves} of {peg.reserve_asset} cannot cover {need}; the peg has failed"
            )
        deltas.append(CommodityDelta(cb.id, peg.reserve_asset, -need))
        deltas.append(CommodityDelta(holder, peg.reserve_asset, need))
    else:
        backing = [
            i for i in sorted(g.instruments.values(), key=lambda i: i.id)
            if i.creditor == cb.id and i.currency == peg.reserve_asset
        ]
        reserves = sum(i.amount for i in backing)
        if reserves < need:
            raise ReservesDepletedError(
                f"reserves {reserves} of {peg.reserve_asset} cannot cover {need}; the peg has failed"
            )
        left = need
        for inst in backing:  # pass reserve claims to the holder, oldest first
            take = min(left, inst.amount)
            deltas.append(EdgeDelta(inst.kind, inst.debtor, cb.id, inst.currency, -take, inst.redemption))
            deltas.append(EdgeDelta(inst.kind, inst.debtor, holder, inst.currency, take, inst.redemption))
            left -= take
            if left == 0:
                break
    remaining = amount
    for inst in claims:  # extinguish claims, oldest first
        take = min(remaining, inst.amount)
        deltas.append(EdgeDelta(inst.kind, cb.id, holder, inst.currency, -take, inst.redemption))
        remaining -= take
        if remaining == 0:
            break
    g.post(deltas)
    if g.record_ops:
        g.log.append(OpRecord(
            seq=len(g.log) + 1,
            name="redeem",
            params={"holder": holder, "amount": amount, "currency": peg.domestic,
                    "asset": peg.reserve_asset, "rate": format_rational(peg.rate)},
            deltas=tuple(deltas),
        ))


# ----------------------------------------------------------------------
# stochastic runs and exact oracles
# ----------------------------------------------------------------------

def _thresholds(deltas: Sequence[tuple]) -> list[tuple[int, int, int]]:
    """Cumulative (num << 64, den, delta) so a uniform u64 draw ``u`` selects
    the first entry with u * den < num << 64. Integer math only."""
    out = []
    cum = Fraction(0)
    for d, p in deltas:
        cum += Fraction(p)
        out.append((cum.numerator << 64, cum.denominator, d))
    return out


def simulate(peg: PegConfig, demand: DemandProcess) -> RunOutcome:
    """Run independent redemption walks R(t+1) = R(t) - delta(t), absorbed
    at R <= 0; record each trial's first depletion step."""
    thresholds = _thresholds(demand.deltas)
    horizon, trials, seed = demand.horizon, demand.trials, demand.seed
    initial = peg.initial_reserves
    steps: list[Optional[int]] = []
    survival_total = 0
    for trial in range(trials):
        rng = SplitMix64(seed ^ trial)
        next_u64 = rng.next_u64
        r = initial
        hit: Optional[int] = None
        if r <= 0:
            hit = 0
        else:
            for step in range(1, horizon + 1):
                u = next_u64()
                for num_shifted, den, d in thresholds:
                    if u * den < num_shifted:
                        r -= d
                        break
                if r <= 0:
                    hit = step
                    break
        steps.append(hit)
        survival_total += horizon if hit is None else hit
    depleted = sum(1 for s in steps if s is not None)
    return RunOutcome(
        trials=trials,
        depletion_steps=tuple(steps),
        frequency=Fraction(depleted, trials),
        mean_survival=Fraction(survival_total, trials),
    )


def absorption_oracle(initial_reserves: int, deltas: Sequence[tuple], horizon: int) -> Fraction:
    """Exact depletion probability by exhaustive path enumeration.

    Independent of both the simulator and the DP oracle; guarded to desk
    scale (at most 10^7 paths before early absorption is accounted for).
    """
    _validate_deltas(deltas)
    if len(deltas) ** horizon > _PATH_GUARD:
        raise TooLargeError(f"{len(deltas)}^{horizon} paths exceed the enumeration guard")
    if initial_reserves <= 0:
        return Fraction(1)
    pairs = [(int(d), Fraction(p)) for d, p in deltas]

    def walk(reserves: int, steps_left: int) -> Fraction:
        if steps_left == 0:
            return Fraction(0)
        absorbed = Fraction(0)
        for d, p in pairs:
            r = reserves - d
            if r <= 0:
                absorbed += p
            else:
                absorbed += p * walk(r, steps_left - 1)
        return absorbed

    return walk(initial_reserves, horizon)


def dp_absorption_oracle(initial_reserves: int, deltas: Sequence[tuple], horizon: int) -> Fraction:
    """Exact depletion probability by dynamic programming over reserve
    levels, scaled to integer weights so long horizons stay exact and fast."""
    _validate_deltas(deltas)
    if initial_reserves <= 0:
        return Fraction(1)
    pairs = [(int(d), Fraction(p)) for d, p in deltas]
    den = 1
    for _, p in pairs:
        den = den * p.denominator // gcd(den, p.denominator)
    weights = [(d, int(p * den)) for d, p in pairs]
    level_num = {initial_reserves: 1}  # numerators over den**step
    absorbed_num = 0
    for _ in range(horizon):
        absorbed_num *= den
        nxt: dict[int, int] = {}
        for level, num in level_num.items():
            for d, w in weights:
                r = level - d
                nw = num * w
                if r <= 0:
                    absorbed_num += nw
                else:
                    nxt[r] = nxt.get(r, 0) + nw
        level_num = nxt
    return Fraction(absorbed_num, den**horizon)


def _validate_deltas(deltas: Sequence[tuple]) -> None:
    if not deltas:
        raise BadDistributionError("at least one delta required")
    total = Fraction(0)
    for d, p in deltas:
        if not isinstance(d, int):
            raise BadDistributionError(f"delta {d!r} is not an integer")
        p = Fraction(p)
        if p <= 0:
            raise BadDistributionError(f"probability {p} must be positive")
        total += p
    if total != 1:
        raise BadDistributionError(f"probabilities sum to {total}, not 1")


def parse_deltas(text: str) -> tuple:
    """Parse a demand spec like ``+1:1/2,-1:1/2`` into delta/probability pairs."""
    pairs = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        d, _, p = part.partition(":")
        try:
            pairs.append((int(d), Fraction(p)))
        except (ValueError, ZeroDivisionError) as e:
            raise BadDistributionError(f"bad delta spec {part!r}: {e}") from None
    if not pairs:
        raise BadDistributionError("empty delta spec")
    return tuple(pairs)
