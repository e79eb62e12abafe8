"""Closed-form evaluators for the expander-percolation bounds.

Every evaluator works in log space; linear-scale returns map underflow to
0.0 and overflow to inf, and each function accepts log=True to return the
natural log instead (the right scale for comparing astronomically small
tails).  Domain checks are hard preconditions: a vacuous bound is an error,
not a number.

Parameter glossary (shared across evaluators):
    n      vertex count
    delta  maximum degree
    b      expansion (isoperimetric) constant
    A      retention closeness margin, p >= 1 - A
    x      probability margin, p in [x, 1-x]
    c      large-component fraction (size >= c*n)
    k      ball-growth target fraction
    omega  sublinear size exponent (size >= n**omega)
    eps    supercriticality in p = (1+eps)/(d-1)
    d      regular degree
    g      girth
    a      target giant fraction
    gamma  ball-event constant (explicit surrogate supplied by the caller)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Optional

from .errors import PreconditionError

_LOG_HALF = math.log(0.5)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise PreconditionError(msg)


def _ceil_tol(x: float) -> int:
    """Ceiling with 1e-9 slack against float noise in log expressions."""
    return math.ceil(x - 1e-9)


def _finish(log_value: float, log: bool) -> float:
    if log:
        return log_value
    if log_value > 700.0:
        return math.inf
    if log_value < -745.0:
        return 0.0
    return math.exp(log_value)


# ---------------------------------------------------------------------------
# Tail bounds for components of intermediate size (dense retention p >= 1-A)
# ---------------------------------------------------------------------------

def midsize_tail_linear(n: int, delta: int, b: float, A: float, c: float, *,
                        log: bool = False) -> float:
    """Bound on P(some component has between c*n and n/2 vertices) for any
    p >= 1-A on an edge b-expander of max degree delta:
    (1/c) * q^(c*n) / (1-q) with q = (delta*e)*A^b, valid when q < 1.
    """
    _require(n >= 1, f"n must be >= 1, got {n}")
    _require(delta >= 1, f"delta must be >= 1, got {delta}")
    _require(b > 0, f"b must be > 0, got {b}")
    _require(0 < A < 1, f"A must be in (0, 1), got {A}")
    _require(0 < c <= 0.5, f"c must be in (0, 1/2], got {c}")
    log_q = math.log(delta) + 1.0 + b * math.log(A)
    _require(log_q < 0, f"(delta*e)*A^b = {math.exp(log_q):.6g} must be < 1; bound is vacuous")
    log_val = -math.log(c) + c * n * log_q - math.log1p(-math.exp(log_q))
    return _finish(log_val, log)


def midsize_tail_power(n: int, delta: int, b: float, A: float, omega: float, *,
                       log: bool = False) -> float:
    """Same tail with the sublinear threshold n**omega:
    n^(1-omega) * q^(n^omega) / (1-q), q = (delta*e)*A^b < 1."""
    _require(n >= 1, f"n must be >= 1, got {n}")
    _require(delta >= 1, f"delta must be >= 1, got {delta}")
    _require(b > 0, f"b must be > 0, got {b}")
    _require(0 < A < 1, f"A must be in (0, 1), got {A}")
    _require(0 < omega <= 1, f"omega must be in (0, 1], got {omega}")
    log_q = math.log(delta) + 1.0 + b * math.log(A)
    _require(log_q < 0, f"(delta*e)*A^b = {math.exp(log_q):.6g} must be < 1; bound is vacuous")
    log_val = (1.0 - omega) * math.log(n) + (n ** omega) * log_q - math.log1p(-math.exp(log_q))
    return _finish(log_val, log)


# ---------------------------------------------------------------------------
# Ball-growth radii
# ---------------------------------------------------------------------------

def ball_growth_radius(b: float, c: float, k: float) -> int:
    """Smallest certified radius r with |B(A, r)| >= k*n whenever |A| >= c*n
    on a vertex b-expander: one more than
    ceil(-log_{1+b}(2(1-k))) + ceil(-log_{1+b}(2c)).
    """
    _require(b > 0, f"b must be > 0, got {b}")
    _require(0 < c < 0.5, f"c must be in (0, 1/2), got {c}")
    _require(0.5 < k < 1, f"k must be in (1/2, 1), got {k}")
    base = math.log(1.0 + b)
    r1 = _ceil_tol(-math.log(2.0 * (1.0 - k)) / base)
    r2 = _ceil_tol(-math.log(2.0 * c) / base)
    return max(r1, 0) + max(r2, 0) + 1


def coverage_radius(n: int, b: float, omega: float) -> int:
    """Radius ceil((1-omega) * log_{1+b} n) used by the sublinear argument."""
    _require(n >= 1, f"n must be >= 1, got {n}")
    _require(b > 0, f"b must be > 0, got {b}")
    _require(0 < omega < 1, f"omega must be in (0, 1), got {omega}")
    return max(_ceil_tol((1.0 - omega) * math.log(n) / math.log(1.0 + b)), 0)


# ---------------------------------------------------------------------------
# Sublinear uniqueness exponent and its decay bound
# ---------------------------------------------------------------------------

def _log_ratio(b: float, delta: int, x: float) -> float:
    return math.log(4.0 * delta ** 3 / (x * x)) / math.log(1.0 + b)


def min_uniqueness_exponent(b: float, delta: int, x: float) -> float:
    """Smallest omega with (1-omega)*L + (1/2-omega) < 0 for
    L = log_{1+b}(4*delta^3/x^2); closed form (L+1/2)/(L+1)."""
    _require(b > 0, f"b must be > 0, got {b}")
    _require(delta >= 1, f"delta must be >= 1, got {delta}")
    _require(0 < x <= 0.5, f"x must be in (0, 1/2], got {x}")
    L = _log_ratio(b, delta, x)
    return (L + 0.5) / (L + 1.0)


def uniqueness_exponent_slack(b: float, delta: int, x: float, omega: float) -> float:
    """(1-omega)*L + 1/2 - omega; negative exactly when the decay condition
    holds at omega."""
    _require(b > 0, f"b must be > 0, got {b}")
    _require(delta >= 1, f"delta must be >= 1, got {delta}")
    _require(0 < x <= 0.5, f"x must be in (0, 1/2], got {x}")
    return (1.0 - omega) * _log_ratio(b, delta, x) + 0.5 - omega


def uniqueness_failure_bound(n: int, delta: int, b: float, x: float, omega: float,
                             gamma: float, *, log: bool = False) -> float:
    """Bound on P(two or more components of size >= n**omega):
    10*gamma * delta^(3r) * x^(-2r) * 2^(2r) * n^(1/2-omega),
    with r the coverage radius for (n, b, omega)."""
    _require(gamma > 0, f"gamma must be > 0, got {gamma}")
    _require(0 < x <= 0.5, f"x must be in (0, 1/2], got {x}")
    _require(delta >= 1, f"delta must be >= 1, got {delta}")
    r = coverage_radius(n, b, omega)
    log_val = (math.log(10.0 * gamma) + 3.0 * r * math.log(delta)
               - 2.0 * r * math.log(x) + 2.0 * r * math.log(2.0)
               + (0.5 - omega) * math.log(n))
    return _finish(log_val, log)


# ---------------------------------------------------------------------------
# Sprinkling constants for the giant-component mechanism
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SprinklingConstants:
    """Constants of the two-phase giant-component argument.

    cluster_term - split_term is the exponential rate C; the mechanism's
    hypothesis is C > 0.  m is the phase-one component-size floor, p the
    total retention, p1/p2 the phase split with (1-p1)(1-p2) = 1-p.
    """

    C: float
    m: float
    p: float
    p1: float
    p2: Optional[float]
    cluster_term: float
    split_term: float
    feasible: bool


def sprinkling_constants(d: int, c: float, g: float, eps: float, a: float) -> SprinklingConstants:
    """Evaluate the two-phase constants:
    C = (c/2) * (eps/(2d))^(d/(c*a)) - 3*ln(2)/(1+eps/3)^(g/2),
    m = (1+eps/3)^(g/2), p = (1+eps)/(d-1), p1 = (1+eps/2)/(d-1).
    """
    _require(d >= 3, f"d must be >= 3, got {d}")
    _require(c > 0, f"c must be > 0, got {c}")
    _require(g >= 3, f"g must be >= 3, got {g}")
    _require(eps >= 0, f"eps must be >= 0, got {eps}")
    _require(a > 0, f"a must be > 0, got {a}")
    log_m = (g / 2.0) * math.log1p(eps / 3.0)
    m = math.inf if log_m > 700.0 else math.exp(log_m)
    if eps == 0.0:
        cluster_term = 0.0  # degenerate evaluation: the mechanism needs eps > 0
    else:
        cluster_log = math.log(c / 2.0) + (d / (c * a)) * math.log(eps / (2.0 * d))
        cluster_term = _finish(cluster_log, log=False)
    split_term = _finish(math.log(3.0 * math.log(2.0)) - log_m, log=False)
    p = (1.0 + eps) / (d - 1)
    p1 = (1.0 + eps / 2.0) / (d - 1)
    p2: Optional[float] = None
    if p1 < 1.0:
        p2 = 1.0 - (1.0 - min(p, 1.0)) / (1.0 - p1)
    elif p >= 1.0:
        p2 = 1.0
    C = cluster_term - split_term
    return SprinklingConstants(C=C, m=m, p=p, p1=p1, p2=p2,
                               cluster_term=cluster_term, split_term=split_term,
                               feasible=C > 0)


# ---------------------------------------------------------------------------
# Branching-process survival
# ---------------------------------------------------------------------------

def gw_survival(d: int, p: float, tol: float = 1e-15, max_iter: int = 400000) -> float:
    """Survival probability of the branching process with Binomial(d-1, p)
    offspring: 1 - q for the smallest fixed point of q = (1-p+p*q)^(d-1),
    found by monotone iteration from 0.

    Subcritical and critical cases (mean offspring <= 1 with p < 1) go
    extinct almost surely and return exactly 0.
    """
    _require(d >= 2, f"d must be >= 2, got {d}")
    _require(0.0 <= p <= 1.0, f"p must be in [0, 1], got {p}")
    if p == 1.0:
        return 1.0  # every individual has d-1 >= 1 children
    if p * (d - 1) <= 1.0:
        return 0.0
    q = 0.0
    for _ in range(max_iter):
        q_next = (1.0 - p + p * q) ** (d - 1)
        if abs(q_next - q) <= tol:
            q = q_next
            break
        q = q_next
    return min(max(1.0 - q, 0.0), 1.0)


# ---------------------------------------------------------------------------
# Expansion of the percolated graph (dense retention)
# ---------------------------------------------------------------------------

def percolated_expansion_tail(n: int, delta: int, b: float, A: float, *,
                              log: bool = False) -> float:
    """Bound on P(the percolated graph is not a 1/log2(n) edge expander) for
    p >= 1-A: (n/log2 n) * q^(ceil(log2 n)) / (1-q) with
    q = (delta*e) * 2^b * A^(b/2), valid when q < 1/2."""
    _require(n >= 2, f"n must be >= 2, got {n}")
    _require(delta >= 1, f"delta must be >= 1, got {delta}")
    _require(b > 0, f"b must be > 0, got {b}")
    _require(0 < A < 1, f"A must be in (0, 1), got {A}")
    log_q = math.log(delta) + 1.0 + b * math.log(2.0) + 0.5 * b * math.log(A)
    _require(log_q < _LOG_HALF,
             f"(delta*e)*2^b*A^(b/2) = {math.exp(log_q):.6g} must be < 1/2; bound is vacuous")
    r0 = _ceil_tol(math.log2(n))
    log_val = math.log(n) - math.log(math.log2(n)) + r0 * log_q - math.log1p(-math.exp(log_q))
    return _finish(log_val, log)


# ---------------------------------------------------------------------------
# Named parameter bundle (CLI-facing)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundParams:
    """Optional bag of named constants parsed from key=value lists."""

    n: Optional[int] = None
    delta: Optional[int] = None
    b: Optional[float] = None
    A: Optional[float] = None
    x: Optional[float] = None
    c: Optional[float] = None
    k: Optional[float] = None
    omega: Optional[float] = None
    eps: Optional[float] = None
    d: Optional[int] = None
    g: Optional[float] = None
    a: Optional[float] = None
    gamma: Optional[float] = None
    p: Optional[float] = None

    @classmethod
    def parse(cls, text: str) -> "BoundParams":
        values = {}
        int_fields = {"n", "delta", "d"}
        valid = {f.name for f in fields(cls)}
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            key, sep, raw = item.partition("=")
            key = key.strip()
            if not sep or key not in valid:
                raise PreconditionError(f"bad bound parameter {item!r}; known keys: {sorted(valid)}")
            try:
                values[key] = int(raw) if key in int_fields else float(raw)
            except ValueError as exc:
                raise PreconditionError(f"bad numeric value in {item!r}") from exc
        return cls(**values)

    def require(self, *names: str) -> list:
        out = []
        for name in names:
            value = getattr(self, name)
            if value is None:
                raise PreconditionError(f"missing bound parameter {name!r}")
            out.append(value)
        return out
