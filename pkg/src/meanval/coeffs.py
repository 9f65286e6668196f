"""Constants of the asymptotic main term, from truncated Euler products.

The mean value of the studied function grows like C * x * ln(x) + K * x. Both
coefficients come from the analytic cofactor

    H(s) = zeta(r*s)/zeta(2*s) * prod_p (1 - 1/(k * (p**(r*s) + p**((r-1)*s))))

through C = H(1) (using zeta(2) = pi^2/6) and K = H'(1) + (2*gamma - 1) * C.
Products are truncated at a prime cutoff P and every returned value carries a
rigorous tail bound: the dropped log-factors are dominated term by term by
n**(-r*s)/k, which an integral comparison turns into an explicit remainder.

The logarithmic derivative of H needs, per prime, the s-derivative of
ln(1 - 1/(k*(p**(r*s) + p**((r-1)*s)))) at s = 1.  With u = k*(p**r + p**(r-1))
and u' = k*ln(p)*(r*p**r + (r-1)*p**(r-1)) that derivative is u'/(u*(u-1)).
Because this closed form was derived by hand, it is gated: the first use for
any (r, k) replays it against central finite differences of the log-factor at
a handful of primes and refuses to proceed on disagreement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import ArithParams
from .errors import ConfigError, ToleranceError
from .primes import primes_up_to
from .zeta import EULER_GAMMA, ZetaValue, zeta, zeta_prime

__all__ = [
    "ConstantsBundle",
    "bundle",
    "cofactor_derivative_at_1",
    "cofactor_value",
    "leading_coefficient",
    "log_factor_derivative",
]

_EPS = 2.220446049250313e-16
DEFAULT_PRIME_CUTOFF = 10**6

_GATE_STEP = 1e-6
_GATE_TOL = 1e-8
_GATE_PRIMES = (2, 3, 5, 101)
_gate_passed: set[tuple[int, float]] = set()


def _product_factors(s: float, params: ArithParams, cutoff: int) -> tuple[float, float]:
    """log of the truncated product over p <= cutoff, and a tail bound on it.

    Tail: each dropped -ln(1 - x_p) with x_p = 1/(k*(p**(r*s)+p**((r-1)*s)))
    is at most x_p/(1 - x_P) <= n**(-r*s)/(k*(1 - x_P)) summed over n > P,
    which the integral comparison bounds by P**(1-r*s)/((r*s-1)*k*(1-x_P)).
    """
    r, k = params.r, float(params.k)
    ps = primes_up_to(cutoff).astype(np.float64)
    x = 1.0 / (k * (ps ** (r * s) + ps ** ((r - 1) * s)))
    log_prod = math.fsum(np.log1p(-x))
    x_at_cut = 1.0 / (k * (float(cutoff) ** (r * s) + float(cutoff) ** ((r - 1) * s)))
    rs = r * s
    tail_log = cutoff ** (1.0 - rs) / ((rs - 1.0) * k * (1.0 - x_at_cut))
    return log_prod, tail_log


def cofactor_value(
    s: float,
    params: ArithParams,
    cutoff: int = DEFAULT_PRIME_CUTOFF,
    zeta_tol: float = 1e-12,
) -> tuple[float, float]:
    """H(s) from the truncated product; returns (value, rigorous tail bound).

    Defined for s > 1/2, where r*s and 2*s stay inside the zeta evaluator's
    range. The bound covers the dropped prime factors, both zeta radii, and
    float round-off.
    """
    if not s > 0.5:
        raise ConfigError(f"s={s} not in the analytic region s > 1/2")
    if cutoff < 2:
        raise ConfigError(f"prime cutoff must be >= 2, got {cutoff}")
    r = params.r
    zr = zeta(r * s, tol=zeta_tol)
    z2 = zeta(2 * s, tol=zeta_tol)
    log_prod, tail_log = _product_factors(s, params, cutoff)
    value = zr.value / z2.value * math.exp(log_prod)
    rel = (
        math.expm1(tail_log)
        + zr.error_radius / abs(zr.value)
        + z2.error_radius / abs(z2.value)
        + 64.0 * _EPS
    )
    return value, abs(value) * rel


def leading_coefficient(
    params: ArithParams, cutoff: int = DEFAULT_PRIME_CUTOFF, zeta_tol: float = 1e-12
) -> tuple[float, float]:
    """C = 6*zeta(r)/pi**2 * truncated product at s = 1, with tail bound.

    Numerically identical to ``cofactor_value`` at s = 1 (zeta(2) = pi^2/6);
    the two are cross-asserted to a few ulps.
    """
    r, k = params.r, float(params.k)
    zr = zeta(float(r), tol=zeta_tol)
    log_prod, tail_log = _product_factors(1.0, params, cutoff)
    value = 6.0 * zr.value / math.pi**2 * math.exp(log_prod)
    rel = math.expm1(tail_log) + zr.error_radius / abs(zr.value) + 64.0 * _EPS
    tail = abs(value) * rel
    h1, h1_tail = cofactor_value(1.0, params, cutoff, zeta_tol=zeta_tol)
    if abs(h1 - value) > 1e-11 * abs(value) + h1_tail + tail:
        raise ToleranceError(
            f"leading coefficient {value!r} disagrees with cofactor at 1 {h1!r}"
        )
    return value, tail


def log_factor_derivative(p: float, params: ArithParams) -> float:
    """d/ds ln(1 - 1/(k*(p**(r*s) + p**((r-1)*s)))) at s = 1, in closed form."""
    r, k = params.r, float(params.k)
    pr = float(p) ** r
    pr1 = float(p) ** (r - 1)
    u = k * (pr + pr1)
    du = k * math.log(p) * (r * pr + (r - 1) * pr1)
    return du / (u * (u - 1.0))


def _log_factor(p: float, s: float, params: ArithParams) -> float:
    r, k = params.r, float(params.k)
    return math.log1p(-1.0 / (k * (float(p) ** (r * s) + float(p) ** ((r - 1) * s))))


def _gate_log_factor_derivative(params: ArithParams) -> None:
    """Replay the closed form against finite differences before first use."""
    key = (params.r, float(params.k))
    if key in _gate_passed:
        return
    h = _GATE_STEP
    for p in _GATE_PRIMES:
        fd = (_log_factor(p, 1.0 + h, params) - _log_factor(p, 1.0 - h, params)) / (2.0 * h)
        cf = log_factor_derivative(p, params)
        if abs(fd - cf) > _GATE_TOL:
            raise ToleranceError(
                f"per-prime derivative gate failed at p={p}, r={params.r}, "
                f"k={params.k}: closed form {cf!r} vs finite difference {fd!r}"
            )
    _gate_passed.add(key)


def cofactor_derivative_at_1(
    params: ArithParams, cutoff: int = DEFAULT_PRIME_CUTOFF, zeta_tol: float = 1e-12
) -> tuple[float, float]:
    """H'(1) = H(1) * (r*zeta'(r)/zeta(r) - 2*zeta'(2)/zeta(2) + prime sum).

    The prime sum collects the per-prime log-factor derivatives up to the
    cutoff; its tail is bounded through |g_p| <= r*ln(p)/(k*p**r - 1) and an
    integral comparison. Returns (value, rigorous tail bound).
    """
    _gate_log_factor_derivative(params)
    r, k = params.r, float(params.k)
    h1, h1_tail = cofactor_value(1.0, params, cutoff, zeta_tol=zeta_tol)
    zr = zeta(float(r), tol=zeta_tol)
    zrp = zeta_prime(float(r), tol=zeta_tol)
    z2 = zeta(2.0, tol=zeta_tol)
    z2p = zeta_prime(2.0, tol=zeta_tol)

    ps = primes_up_to(cutoff).astype(np.float64)
    pr = ps**r
    pr1 = ps ** (r - 1)
    u = k * (pr + pr1)
    du = k * np.log(ps) * (r * pr + (r - 1) * pr1)
    prime_sum = math.fsum(du / (u * (u - 1.0)))

    log_deriv = r * zrp.value / zr.value - 2.0 * z2p.value / z2.value + prime_sum
    value = h1 * log_deriv

    # tail of the prime sum: sum_{n > P} r*ln(n)/(k*n**r - 1)
    shrink = 1.0 - 1.0 / (k * float(cutoff) ** r)
    gp_tail = (
        r
        / (k * shrink)
        * cutoff ** (1.0 - r)
        * (math.log(cutoff) / (r - 1.0) + 1.0 / (r - 1.0) ** 2)
    )

    def _ratio_err(num: ZetaValue, den: ZetaValue) -> float:
        return num.error_radius / abs(den.value) + abs(num.value) * den.error_radius / den.value**2

    log_deriv_err = r * _ratio_err(zrp, zr) + 2.0 * _ratio_err(z2p, z2) + gp_tail
    tail = abs(h1) * log_deriv_err + abs(log_deriv) * h1_tail + 64.0 * _EPS * abs(value)
    return value, tail


@dataclass(frozen=True)
class ConstantsBundle:
    """Main-term constants for one (r, k), each with a rigorous tail bound.

    ``x_coeff`` is assembled as pole_coeff - leading so the three constants
    stay bit-consistent; it agrees with cofactor_deriv + (2*gamma-1)*leading
    to round-off.
    """

    params: ArithParams
    prime_cutoff: int
    leading: float          # coefficient of x*ln(x), = H(1)
    cofactor_deriv: float   # H'(1)
    pole_coeff: float       # coefficient of the simple pole: H'(1) + 2*gamma*H(1)
    x_coeff: float          # coefficient of x: pole_coeff - leading
    tail_bounds: dict[str, float]

    def main_term(self, x: float) -> float:
        """C * x * ln(x) + K * x."""
        return self.leading * x * math.log(x) + self.x_coeff * x

    def to_json_obj(self) -> dict:
        return {
            "schema_version": "1",
            "kind": "constants_bundle",
            "params": {"r": self.params.r, "k": self.params.k},
            "prime_cutoff": self.prime_cutoff,
            "C": repr(self.leading),
            "H1_prime": repr(self.cofactor_deriv),
            "B": repr(self.pole_coeff),
            "K": repr(self.x_coeff),
            "tail_bounds": {name: repr(v) for name, v in sorted(self.tail_bounds.items())},
        }


def bundle(
    params: ArithParams, cutoff: int = DEFAULT_PRIME_CUTOFF, zeta_tol: float = 1e-12
) -> ConstantsBundle:
    """Assemble all main-term constants at one prime cutoff."""
    c, c_tail = leading_coefficient(params, cutoff, zeta_tol=zeta_tol)
    hp, hp_tail = cofactor_derivative_at_1(params, cutoff, zeta_tol=zeta_tol)
    b = hp + 2.0 * EULER_GAMMA * c
    kx = b - c
    b_tail = hp_tail + 2.0 * EULER_GAMMA * c_tail + 4.0 * _EPS * abs(b)
    k_tail = b_tail + c_tail + 4.0 * _EPS * abs(kx)
    return ConstantsBundle(
        params=params,
        prime_cutoff=cutoff,
        leading=c,
        cofactor_deriv=hp,
        pole_coeff=b,
        x_coeff=kx,
        tail_bounds={"C": c_tail, "H1_prime": hp_tail, "B": b_tail, "K": k_tail},
    )
