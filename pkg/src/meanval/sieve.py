"""Bulk tabulation via a smallest-prime-factor sieve, and checkpointed sums.

The pipeline is fully vectorized:

1. ``build_spf`` marks the smallest prime factor of every n <= N (int32,
   4 bytes per entry, plus transient masks of about the same size while
   sieving -- budget roughly 24 bytes per entry for a whole summatory run).
2. The spf table is decomposed into, for each n, the exponent of its smallest
   prime and the remaining cofactor n / p**a.
3. Because the cofactor is always at most n/2, one pass over doubling blocks
   [m, 2m) evaluates any multiplicative function with O(N) multiplications:
   value(n) = value(p**a) * value(cofactor).

Summation is segmented (default segment 2**20) and reduced strictly in
segment order, so a run with worker threads is bit-identical to a serial run;
threads only parallelize the per-segment partial sums.  For integer weights k
the sums are exact: per segment the integer divisor counts are aggregated by
omega class, and S(x) * k**W is assembled from those integer class totals.
For non-integer k a compensated (Neumaier) accumulator is used and a rigorous
round-off bound is reported next to every checkpoint.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import IO, Iterator, Optional, Sequence, Union

import numpy as np

from .arith import ArithParams, ExactValue
from .errors import ConfigError, ResourceError

__all__ = [
    "SpfSieve",
    "SummatoryRow",
    "SummatoryTable",
    "ValueTable",
    "build_spf",
    "geometric_checkpoints",
    "summatory",
    "tabulate",
]

_EPS = 2.220446049250313e-16
DEFAULT_SEGMENT = 1 << 20
DEFAULT_MEM_LIMIT_MB = 4096
MEM_ENV_VAR = "MEANVAL_MEM_LIMIT_MB"

# peak transient footprint of a full tabulation, bytes per sieved integer:
# spf(4) + cofactor(4) + exponent(1) + counts(4) + omega(1) + masks/temps(~10)
BYTES_PER_ENTRY = 24


def _mem_limit_mb(explicit: Optional[float]) -> float:
    if explicit is not None:
        return float(explicit)
    env = os.environ.get(MEM_ENV_VAR)
    if env is not None:
        try:
            return float(env)
        except ValueError as exc:
            raise ConfigError(f"{MEM_ENV_VAR}={env!r} is not a number") from exc
    return DEFAULT_MEM_LIMIT_MB


def _check_budget(limit: int, mem_limit_mb: Optional[float]) -> None:
    budget = _mem_limit_mb(mem_limit_mb)
    need_mb = limit * BYTES_PER_ENTRY / 2**20
    if need_mb > budget:
        raise ResourceError(
            f"sieve to {limit} needs ~{need_mb:.0f} MiB "
            f"({BYTES_PER_ENTRY} B/entry) but the budget is {budget:.0f} MiB; "
            f"raise {MEM_ENV_VAR} to allow it"
        )


@dataclass(frozen=True)
class SpfSieve:
    """Smallest-prime-factor table for 2..limit (spf[p] == p iff p prime)."""

    limit: int
    spf: np.ndarray

    def primes(self) -> np.ndarray:
        idx = np.arange(self.limit + 1, dtype=self.spf.dtype)
        hits = np.flatnonzero(self.spf == idx)
        return hits[hits >= 2].astype(np.int64)


def build_spf(limit: int, mem_limit_mb: Optional[float] = None) -> SpfSieve:
    """Sieve smallest prime factors for 2..limit.

    Costs 4 bytes per entry (int32) plus transient masks; exceeding the
    memory budget (MEANVAL_MEM_LIMIT_MB, default 4096) raises ResourceError.
    """
    if limit < 2:
        raise ConfigError(f"sieve limit must be >= 2, got {limit}")
    if limit > 2**31 - 2:
        raise ResourceError(f"sieve limit {limit} exceeds the int32 layout")
    _check_budget(limit, mem_limit_mb)
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            sl = spf[p * p :: p]
            sl[sl == 0] = p
    unmarked = np.flatnonzero(spf == 0)  # primes, plus the slots 0 and 1
    spf[unmarked] = unmarked
    spf[0] = 0
    spf[1] = 1
    return SpfSieve(limit=limit, spf=spf)


def _decompose(sieve: SpfSieve) -> tuple[np.ndarray, np.ndarray]:
    """Per n: exponent of spf(n) in n, and the cofactor n / spf(n)**a."""
    N = sieve.limit
    p = sieve.spf
    n = np.arange(N + 1, dtype=np.int32)
    expo = np.zeros(N + 1, dtype=np.int8)
    cof = n.copy()
    cof[2:] = n[2:] // p[2:]
    expo[2:] = 1
    act = np.arange(2, N + 1, dtype=np.int64)
    act = act[cof[act] % p[act] == 0]
    while act.size:
        cof[act] //= p[act]
        expo[act] += 1
        act = act[cof[act] % p[act] == 0]
    return expo, cof


@dataclass(frozen=True)
class ValueTable:
    """Tabulated divisor data for 1..limit under fixed (r, k).

    ``counts[n]`` is the divisor count of the r-th minimal power of n (an
    exact small integer) and ``omegas[n]`` the number of distinct prime
    factors; together they determine the studied value counts[n] / k**omegas[n].
    """

    params: ArithParams
    limit: int
    counts: np.ndarray  # int32
    omegas: np.ndarray  # int8

    def float_values(self) -> np.ndarray:
        """counts / k**omega as float64 for 0..limit (index 0 is 0)."""
        k = float(self.params.k)
        return self.counts * np.power(k, -self.omegas.astype(np.float64))

    def value(self, n: int) -> ExactValue:
        if not 1 <= n <= self.limit:
            raise ConfigError(f"n={n} outside tabulated range 1..{self.limit}")
        if self.params.exact:
            return Fraction(int(self.counts[n]), self.params.k_int ** int(self.omegas[n]))
        return float(self.counts[n]) / float(self.params.k) ** int(self.omegas[n])

    def __iter__(self) -> Iterator[tuple[int, ExactValue]]:
        """Stream (n, value) in increasing n, starting at n = 1."""
        exact = self.params.exact
        k_int = self.params.k_int if exact else 0
        k = float(self.params.k)
        for n in range(1, self.limit + 1):
            c = int(self.counts[n])
            w = int(self.omegas[n])
            yield n, (Fraction(c, k_int**w) if exact else c / k**w)


def tabulate(sieve: SpfSieve, params: ArithParams) -> ValueTable:
    """Evaluate the studied multiplicative function for every n <= limit.

    Values agree exactly with the single-integer path in ``arith``; the sieve
    recovers each factorization incrementally instead of trial-dividing.
    """
    N = sieve.limit
    expo, cof = _decompose(sieve)
    max_e = int(expo.max())
    r = params.r
    prime_power_counts = np.array(
        [0] + [(a + r - 1) // r + 1 for a in range(1, max_e + 1)], dtype=np.int32
    )
    g = prime_power_counts[expo]
    g[1] = 1
    om = np.zeros(N + 1, dtype=np.int8)
    om[2:] = 1
    lo = 2
    while lo <= N:
        hi = min(2 * lo - 1, N)
        blk = slice(lo, hi + 1)
        c = cof[blk]
        g[blk] *= g[c]
        om[blk] += om[c]
        lo = hi + 1
    return ValueTable(params=params, limit=N, counts=g, omegas=om)


def geometric_checkpoints(limit: int, per_decade: int = 8) -> list[int]:
    """Log-spaced checkpoints round(10**(j/per_decade)) in [10, limit], plus limit."""
    if limit < 1:
        raise ConfigError(f"limit must be >= 1, got {limit}")
    pts = set()
    j = per_decade
    while True:
        x = round(10 ** (j / per_decade))
        if x > limit:
            break
        if x >= 10:
            pts.add(x)
        j += 1
    pts.add(limit)
    return sorted(pts)


def _decimal_str(v: Union[Fraction, float], digits: int = 36) -> str:
    if isinstance(v, Fraction):
        with localcontext() as ctx:
            ctx.prec = digits
            d = Decimal(v.numerator) / Decimal(v.denominator)
        return format(d, "f")
    return repr(float(v))


@dataclass(frozen=True)
class SummatoryRow:
    """One checkpoint: x, the prefix sum S, and its comparison columns.

    ``residual`` is derived from the other two columns by a fixed rule
    (exact-mode: float(S - main) with the subtraction done in rationals;
    float-mode: S - main in doubles) so the columns stay consistent.
    """

    x: int
    value: ExactValue
    main: Optional[float]
    residual: Optional[float]
    err_bound: float


@dataclass(frozen=True)
class SummatoryTable:
    """Checkpointed prefix sums of the studied function, immutable once built."""

    params: ArithParams
    limit: int
    mode: str  # "exact" | "float"
    rows: tuple[SummatoryRow, ...]
    threads: int = 1

    @property
    def final(self) -> ExactValue:
        return self.rows[-1].value

    def to_json_obj(self) -> dict:
        obj = {
            "schema_version": "1",
            "kind": "summatory_table",
            "params": {"r": self.params.r, "k": self.params.k},
            "N": self.limit,
            "mode": self.mode,
            "rows": [],
        }
        for row in self.rows:
            rec = {
                "x": row.x,
                "S": _decimal_str(row.value),
                "main": None if row.main is None else repr(row.main),
                "residual": None if row.residual is None else repr(row.residual),
                "err_bound": repr(row.err_bound),
            }
            if isinstance(row.value, Fraction):
                rec["S_exact"] = f"{row.value.numerator}/{row.value.denominator}"
            obj["rows"].append(rec)
        return obj

    def write_csv(self, fp: IO[str]) -> None:
        fp.write("x,S,main,residual,err_bound\n")
        for row in self.rows:
            main = "" if row.main is None else repr(row.main)
            resid = "" if row.residual is None else repr(row.residual)
            fp.write(
                f"{row.x},{_decimal_str(row.value)},{main},{resid},{repr(row.err_bound)}\n"
            )


def _segment_bounds(limit: int, checkpoints: Sequence[int], segment: int) -> list[tuple[int, int, bool]]:
    """Split [2, limit] at segment multiples and checkpoints.

    Returns (start, end, is_checkpoint_end) with inclusive ends; identical
    for every thread count, which is what makes parallel runs reproducible.
    """
    cuts = {limit}
    cuts.update(x for x in checkpoints if x >= 2)
    s = segment
    while s < limit:
        cuts.add(s)
        s += segment
    marks = sorted(cuts)
    ckpt = set(checkpoints)
    out = []
    start = 2
    for m in marks:
        if m < start:
            continue
        out.append((start, m, m in ckpt))
        start = m + 1
    return out


def summatory(
    params: ArithParams,
    limit: int,
    grid: Optional[Sequence[int]] = None,
    bundle=None,
    threads: int = 1,
    segment: int = DEFAULT_SEGMENT,
    mem_limit_mb: Optional[float] = None,
) -> SummatoryTable:
    """Prefix sums S(x) at the grid checkpoints, with optional main terms.

    ``bundle`` (a ConstantsBundle) fills the asymptotic main-term column
    C*x*ln(x) + K*x and the residual column. Worker threads compute segment
    partial sums concurrently; the ordered merge makes the result identical
    to a serial run, bit for bit.
    """
    if limit < 1:
        raise ConfigError(f"N must be >= 1, got {limit}")
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    checkpoints = list(grid) if grid is not None else geometric_checkpoints(limit)
    if not checkpoints:
        raise ConfigError("checkpoint grid is empty")
    if any((not 1 <= x <= limit) for x in checkpoints):
        raise ConfigError(f"grid points must lie in [1, {limit}]")
    checkpoints = sorted(set(checkpoints))
    if bundle is not None and (bundle.params.r != params.r or bundle.params.k != params.k):
        raise ConfigError(
            f"constants bundle is for (r={bundle.params.r}, k={bundle.params.k}), "
            f"table wants (r={params.r}, k={params.k})"
        )

    exact = params.exact
    rows: list[SummatoryRow] = []

    def finish(x: int, value: ExactValue, err: float) -> None:
        main = resid = None
        if bundle is not None:
            main = bundle.main_term(x)
            if isinstance(value, Fraction):
                resid = float(value - Fraction(main))
            else:
                resid = value - main
        rows.append(SummatoryRow(x=x, value=value, main=main, residual=resid, err_bound=err))

    if limit == 1:
        finish(1, Fraction(1) if exact else 1.0, 0.0)
        return SummatoryTable(params=params, limit=limit, mode="exact" if exact else "float", rows=tuple(rows), threads=threads)

    sieve = build_spf(limit, mem_limit_mb=mem_limit_mb)
    table = tabulate(sieve, params)
    g, om = table.counts, table.omegas
    W = int(om.max())
    segments = _segment_bounds(limit, checkpoints, segment)

    if exact:
        k_int = params.k_int
        k_pows = [k_int**j for j in range(W + 1)]
        k_W = k_pows[W]

        def seg_sums(bounds: tuple[int, int, bool]) -> np.ndarray:
            a, b, _ = bounds
            # integer class totals; float64 bincount is exact here because
            # every partial sum stays far below 2**53
            return np.bincount(
                om[a : b + 1], weights=g[a : b + 1], minlength=W + 1
            ).astype(np.int64)

        totals = [0] * (W + 1)
        totals[0] = 1  # n = 1 contributes count 1 with omega 0
        if 1 in set(checkpoints):
            finish(1, Fraction(1), 0.0)

        with ThreadPoolExecutor(max_workers=threads) as pool:
            for (a, b, is_ckpt), part in zip(segments, pool.map(seg_sums, segments, chunksize=4)):
                for w in range(W + 1):
                    totals[w] += int(part[w])
                if is_ckpt:
                    num = sum(totals[w] * k_pows[W - w] for w in range(W + 1))
                    finish(b, Fraction(num, k_W), 0.0)
        mode = "exact"
    else:
        k = float(params.k)

        def seg_sum(bounds: tuple[int, int, bool]) -> float:
            a, b, _ = bounds
            vals = g[a : b + 1] * np.power(k, -om[a : b + 1].astype(np.float64))
            return float(np.sum(vals))

        # Neumaier compensated accumulator across segments
        acc = 1.0  # n = 1
        comp = 0.0
        if 1 in set(checkpoints):
            finish(1, 1.0, _EPS)
        # rigorous bound: per-term representation error (W+3)*eps, pairwise
        # per-segment summation ceil(log2(seg))*eps, compensated merge 2*eps,
        # all relative to S since every term is positive
        rel_bound = _EPS * (W + 3 + math.ceil(math.log2(max(segment, 2))) + 2) * 2

        with ThreadPoolExecutor(max_workers=threads) as pool:
            for (a, b, is_ckpt), part in zip(segments, pool.map(seg_sum, segments, chunksize=4)):
                t = acc + part
                if abs(acc) >= abs(part):
                    comp += (acc - t) + part
                else:
                    comp += (part - t) + acc
                acc = t
                if is_ckpt:
                    s_val = acc + comp
                    finish(b, s_val, rel_bound * s_val)
        mode = "float"

    return SummatoryTable(params=params, limit=limit, mode=mode, rows=tuple(rows), threads=threads)
