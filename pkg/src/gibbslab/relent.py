"""Relative entropy between cylinder measures, and two identities about it.

Everything here works on a pair of MeasureProviders queried over finite
windows.  The headline algebraic fact, checked exactly in rational mode by
tv_identity_check: with f_V = d(nu)/d(mu) on the window V,

    mu(|f_D - f_{D minus L}|)
        = E_nu || nu_L(. | rest) - mu_L(. | rest) ||_TV

for L inside D, where the TV norm is the plain L1 sum.  Both sides measure how
much the density ratio still moves when the L-coordinates are revealed, so
either side is a usable "distance from being a conditional identity".

No limits are taken anywhere: density sequences are reported as finite-n
tables and the reader draws the curve.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    Configuration,
    MeasureProvider,
    Prob,
    Window,
    ZeroProbabilityError,
    is_exact,
)

WORD_CAP = 1 << 21


@dataclass(frozen=True)
class RelEntReport:
    """Relative entropy over one window; +inf marks an absolute-continuity
    failure (some cylinder with nu > 0 = mu), which is a value, not an error."""

    window: Window
    value: float
    infinite: bool
    contributions: tuple[tuple[tuple[int, ...], float], ...] | None = None


def window_relative_entropy(nu: MeasureProvider, mu: MeasureProvider,
                            window: Window, keep_contributions: bool = False,
                            cap: int = WORD_CAP) -> RelEntReport:
    """sum over words of nu(w) log(nu(w)/mu(w)), with 0 log 0 = 0."""
    p = nu.distribution(window, cap)
    q = mu.distribution(window, cap)
    if all(p[w] == q[w] for w in p):
        return RelEntReport(window, 0.0, False, () if keep_contributions else None)
    terms: list[tuple[tuple[int, ...], float]] = []
    for w, pw in p.items():
        if pw == 0:
            continue
        qw = q[w]
        if qw == 0:
            return RelEntReport(window, math.inf, True,
                                ((w, math.inf),) if keep_contributions else None)
        ratio = pw / qw if is_exact(pw) and is_exact(qw) else float(pw) / float(qw)
        terms.append((w, float(pw) * math.log(float(ratio))))
    value = math.fsum(t for _, t in terms)
    if -1e-9 < value < 0.0:
        value = 0.0  # roundoff on a sum that is nonnegative by Gibbs' inequality
    return RelEntReport(window, value, False,
                        tuple(terms) if keep_contributions else None)


@dataclass(frozen=True)
class DensityRow:
    n: int
    window_value: float
    per_site: float


def relative_entropy_density(nu: MeasureProvider, mu: MeasureProvider,
                             n_max: int, lo: int = 1,
                             cap: int = WORD_CAP) -> tuple[DensityRow, ...]:
    """Normalized sequence H_[lo, lo+n-1](nu|mu) / n for n = 1..n_max.

    The table is the deliverable; whether it converges is the reader's call.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    rows = []
    for n in range(1, n_max + 1):
        rep = window_relative_entropy(nu, mu, Window(lo, lo + n - 1), cap=cap)
        rows.append(DensityRow(n, rep.value, rep.value / n))
    return tuple(rows)


def density_ratio(nu: MeasureProvider, mu: MeasureProvider,
                  cfg: Configuration) -> Prob:
    """nu(cfg) / mu(cfg); mu-averaging this over any window gives exactly 1."""
    denom = mu.prob(cfg)
    if denom == 0:
        raise ZeroProbabilityError(f"{mu.label}: zero mass on the given cylinder")
    return nu.prob(cfg) / denom


def _split_positions(delta: Window, lam: Window) -> tuple[list[int], list[int]]:
    if not delta.contains_window(lam):
        raise ValueError("lam must sit inside delta")
    lam_ix = [i - delta.lo for i in lam.indices()]
    inside = set(lam_ix)
    rest_ix = [j for j in range(delta.size) if j not in inside]
    if not rest_ix:
        raise ValueError("lam must be a proper subset of delta")
    return lam_ix, rest_ix


@dataclass(frozen=True)
class TvIdentityResult:
    lhs: Prob
    rhs: Prob
    exact: bool
    equal: bool


def tv_identity_check(nu: MeasureProvider, mu: MeasureProvider, lam: Window,
                      delta: Window, cap: int = WORD_CAP) -> TvIdentityResult:
    """Evaluate both sides of the density-increment / conditional-TV identity.

    lam may touch either end of delta or sit strictly inside it; the
    conditioning coordinates are handled as tuples, not intervals.  Requires
    nu << mu on delta (checked word by word).  In rational mode the two sides
    must come out exactly equal; `equal` reports == there and a 1e-12
    comparison in float mode.
    """
    lam_ix, rest_ix = _split_positions(delta, lam)
    p = nu.distribution(delta, cap)
    q = mu.distribution(delta, cap)
    exact = all(is_exact(v) for v in p.values()) and \
        all(is_exact(v) for v in q.values())
    zero = p[next(iter(p))] * 0
    p_rest: dict[tuple[int, ...], Prob] = {}
    q_rest: dict[tuple[int, ...], Prob] = {}
    for w, v in p.items():
        if v != 0 and q[w] == 0:
            raise ZeroProbabilityError(
                "identity needs nu absolutely continuous w.r.t. mu on delta")
        rest = tuple(w[j] for j in rest_ix)
        p_rest[rest] = p_rest.get(rest, zero) + v
        q_rest[rest] = q_rest.get(rest, zero) + q[w]

    lhs = zero
    for w, qw in q.items():
        if qw == 0:
            continue
        rest = tuple(w[j] for j in rest_ix)
        lhs += abs(p[w] - qw * p_rest[rest] / q_rest[rest])

    rhs = zero
    gaps: dict[tuple[int, ...], Prob] = {}
    for w, pw in p.items():
        rest = tuple(w[j] for j in rest_ix)
        if p_rest[rest] == 0:
            continue
        gaps[rest] = gaps.get(rest, zero) + \
            abs(pw / p_rest[rest] - q[w] / q_rest[rest])
    for rest, gap in gaps.items():
        rhs += p_rest[rest] * gap

    equal = lhs == rhs if exact else abs(float(lhs) - float(rhs)) <= 1e-12
    return TvIdentityResult(lhs, rhs, exact, equal)


@dataclass(frozen=True)
class ConditionalGapRow:
    n: int
    mean_gap: float   # nu-weighted average of the TV gaps
    max_gap: float
    conditioned_on: int


def conditional_gap_probe(nu: MeasureProvider, mu: MeasureProvider, lam: Window,
                          n_max: int, cap: int = WORD_CAP) -> tuple[ConditionalGapRow, ...]:
    """TV gap between the two conditionals on lam, given words on (lam.hi, n].

    For measures that agree as conditional families the gaps vanish; the
    nu-weighted mean per n is the headline column.  Conditioning words with
    zero nu-mass carry no weight and are skipped; zero mu-mass under positive
    nu-mass is an absolute-continuity failure and raises.
    """
    if n_max <= lam.hi:
        raise ValueError("n_max must exceed lam.hi")
    rows = []
    for n in range(lam.hi + 1, n_max + 1):
        delta = Window(lam.lo, n)
        lam_ix, rest_ix = _split_positions(delta, lam)
        p = nu.distribution(delta, cap)
        q = mu.distribution(delta, cap)
        zero = p[next(iter(p))] * 0
        p_rest: dict[tuple[int, ...], Prob] = {}
        q_rest: dict[tuple[int, ...], Prob] = {}
        for w, v in p.items():
            rest = tuple(w[j] for j in rest_ix)
            p_rest[rest] = p_rest.get(rest, zero) + v
            q_rest[rest] = q_rest.get(rest, zero) + q[w]
        gaps: dict[tuple[int, ...], Prob] = {}
        for w, pw in p.items():
            rest = tuple(w[j] for j in rest_ix)
            if p_rest[rest] == 0:
                continue
            if q_rest[rest] == 0:
                raise ZeroProbabilityError(
                    "mu puts no mass on a conditioning word nu charges")
            gaps[rest] = gaps.get(rest, zero) + \
                abs(pw / p_rest[rest] - q[w] / q_rest[rest])
        mean = sum((p_rest[r] * g for r, g in gaps.items()), zero)
        biggest = max(gaps.values(), default=zero)
        rows.append(ConditionalGapRow(n, float(mean), float(biggest), len(gaps)))
    return tuple(rows)
