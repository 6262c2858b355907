"""Arbitrary-precision evaluation of modified Bessel functions and
Bessel-moment integrals, with assembly of the numerical moment matrices.

Conventions
-----------
All moments are integrals over t from 0 to infinity:

* ``IKM(a,b;n)``       : I0(t)^a K0(t)^b t^n
* ``IvKM(a,b;n|u)``    : I0(sqrt(u) t) I0(t)^(a-1) K0(t)^b t^n
* ``IKvM(a,b;n|u)``    : I0(t)^a K0(sqrt(u) t) K0(t)^(b-1) t^n
* ``IpKM(a,b;n|u)``    : +I1(sqrt(u) t) I0(t)^(a-1) K0(t)^b t^(n+1)
* ``IKpM(a,b;n|u)``    : -K1(sqrt(u) t) I0(t)^a K0(t)^(b-1) t^(n+1)
* ``IKM_LOG(a,b;n)``   : { I0(t)^a K0(t)^b log(t)
                           - [a==1] K0(t)^(a+b)/(a+b) } t^n

so the first index always counts I-type factors and the second K-type
factors, including the sqrt(u)-argument factor.

Numerical design: K0/K1 from their integral representations
int_0^inf exp(-t cosh v) (cosh v)^j dv by trapezoidal sums with level
doubling (the integrand decays double-exponentially); I0/I1 by their
all-positive power series.  Moment integrals split at t = 1: tanh-sinh
on (0,1) (absorbs the log-power singularity at 0) and a double-
exponential substitution t = 1 + c exp((pi/2) sinh w) on (1,oo) with c
matched to the exponential decay rate.  Each quadrature doubles its
level until two successive levels agree to the target, within a hard
level budget, at a guard precision of ``digits`` + 15.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

import mpmath
from mpmath import mp

from .brmatrices import beta_matrix
from .exactalg import exact_inverse

__all__ = [
    "GUARD_DIGITS",
    "LEVEL_BUDGET",
    "MOMENT_KINDS",
    "MomentCache",
    "MomentKey",
    "QuadratureError",
    "bessel",
    "bologna",
    "default_cache",
    "ibp_sanity",
    "matM",
    "matMring",
    "matN",
    "matNring",
    "matOmega",
    "matomega",
    "moment",
    "moment_value",
    "mu_moment",
    "mu_acute_moment",
    "nu_moment",
    "nu_acute_moment",
    "tolerance",
]

GUARD_DIGITS = 15
LEVEL_BUDGET = 12

_OFFSHELL_KINDS = frozenset({"IvKM", "IKvM", "IpKM", "IKpM"})
_ONSHELL_KINDS = frozenset({"IKM", "IKM_LOG"})
_KINDS = _OFFSHELL_KINDS | _ONSHELL_KINDS

#: Public tuple of the recognized moment kinds.
MOMENT_KINDS = tuple(sorted(_KINDS))


class QuadratureError(ArithmeticError):
    """Raised when a quadrature fails to converge within the level budget."""


def tolerance(digits: int):
    """The pass tolerance for numeric identities at a given precision:
    10^-(digits-10); the 10-digit guard absorbs quadrature error."""
    return mpmath.mpf(10) ** (-(digits - 10))


# ---------------------------------------------------------------------------
# Bessel functions
# ---------------------------------------------------------------------------

_BESSEL_MEMO: dict = {}
_BESSEL_LOCK = threading.Lock()


def _i_series(t, order: int):
    """I0 (order 0) or I1 (order 1) by the all-positive power series."""
    q = t * t / 4
    if order == 0:
        term = mp.mpf(1)
        total = mp.mpf(1)
        m = 1
        while True:
            term *= q / (m * m)
            total += term
            if term < mp.eps * total:
                return total
            m += 1
    term = mp.mpf(1)
    total = mp.mpf(1)
    m = 1
    while True:
        term *= q / (m * (m + 1))
        total += term
        if term < mp.eps * total:
            return total * t / 2
        m += 1


def _k_integral(t, order: int):
    """K0 (order 0) or K1 (order 1) via the integral representation
    int_0^inf exp(-t cosh v) (cosh v)^order dv, trapezoid with level
    doubling."""

    def f(v):
        c = mp.cosh(v)
        val = mp.exp(-t * c)
        return val * c if order else val

    eps = mp.eps
    # a few digits above the rounding-noise floor of the trapezoid sums
    target = mp.mpf(10) ** (5 - mp.dps)
    h = mp.mpf(1) / 2
    # initial level
    total = f(mp.mpf(0)) / 2
    n = 1
    while True:
        val = f(n * h)
        total += val
        if n * h > 1 and val < eps * total:
            break
        n += 1
    prev = total * h
    for _ in range(LEVEL_BUDGET):
        # refine: add midpoints at odd multiples of h/2
        h /= 2
        extra = mp.mpf(0)
        n = 1
        while True:
            val = f(n * h)
            extra += val
            if n * h > 1 and val < eps * extra:
                break
            n += 2
        cur = prev / 2 + extra * h
        if abs(cur - prev) <= target * abs(cur):
            return cur
        prev = cur
    raise QuadratureError(
        f"Bessel K integral did not converge for t={t} at {mp.dps} digits"
    )


def _bessel_at(kind: str, t):
    """Memoized Bessel value at the current working precision."""
    key = (kind, t._mpf_, mp.prec)
    with _BESSEL_LOCK:
        hit = _BESSEL_MEMO.get(key)
    if hit is not None:
        return hit
    if kind == "I0":
        val = _i_series(t, 0)
    elif kind == "I1":
        val = _i_series(t, 1)
    elif kind == "K0":
        val = _k_integral(t, 0)
    elif kind == "K1":
        val = _k_integral(t, 1)
    else:
        raise ValueError(f"unknown Bessel kind {kind!r}")
    with _BESSEL_LOCK:
        _BESSEL_MEMO[key] = val
    return val


def bessel(kind: str, t, digits: int):
    """I0, I1, K0 or K1 at t > 0, with relative error below 10^-digits."""
    if kind not in ("I0", "I1", "K0", "K1"):
        raise ValueError(f"unknown Bessel kind {kind!r}")
    if digits < 1:
        raise ValueError("digits must be positive")
    with mp.workdps(digits + GUARD_DIGITS):
        tt = _to_mpf(t)
        if tt <= 0:
            raise ValueError("bessel requires t > 0")
        val = _bessel_at(kind, tt)
        return +val


def _to_mpf(x):
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / mp.mpf(x.denominator)
    return mp.mpf(x)


# ---------------------------------------------------------------------------
# Moment keys and the convergence guard
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentKey:
    """Identifies one Bessel-moment integral at a requested precision."""

    kind: str
    a: int
    b: int
    n: int
    u: Optional[Fraction]
    digits: int

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown moment kind {self.kind!r}")
        if self.a < 0 or self.b < 0 or self.n < 0:
            raise ValueError("moment indices must be non-negative")
        if self.digits < 1:
            raise ValueError("digits must be positive")
        if self.kind in _OFFSHELL_KINDS:
            if self.u is None:
                raise ValueError(f"{self.kind} requires an exact rational u")
            object.__setattr__(self, "u", Fraction(self.u))
            if self.u <= 0:
                raise ValueError("u must be a positive rational")
        elif self.u is not None:
            raise ValueError(f"{self.kind} does not take u")
        if self.kind in ("IvKM", "IpKM") and self.a < 1:
            raise ValueError(f"{self.kind} requires a >= 1")
        if self.kind in ("IKvM", "IKpM") and self.b < 1:
            raise ValueError(f"{self.kind} requires b >= 1")


def _decay(key: MomentKey) -> tuple[int, int]:
    """The exponential decay rate of the integrand at infinity, written
    delta = c + s*sqrt(u) with integer c and s in {-1, 0, +1}."""
    if key.kind in _ONSHELL_KINDS:
        return key.b - key.a, 0
    if key.kind in ("IvKM", "IpKM"):
        return key.b - (key.a - 1), -1
    # IKvM / IKpM
    return (key.b - 1) - key.a, 1


def _check_convergent(key: MomentKey) -> None:
    c, s = _decay(key)
    if s == 0:
        ok = c > 0
    elif s > 0:
        # c + sqrt(u) > 0  <=>  c >= 0, or u > c^2
        ok = c >= 0 or key.u > c * c
    else:
        # c - sqrt(u) > 0  <=>  c > 0 and c^2 > u
        ok = c > 0 and c * c > key.u
    if not ok:
        raise ValueError(f"divergent moment configuration: {key}")


def _integrand(key: MomentKey) -> Callable:
    a, b, n = key.a, key.b, key.n
    if key.kind in _ONSHELL_KINDS:
        log_weighted = key.kind == "IKM_LOG"

        def f(t):
            val = mp.mpf(1)
            if a:
                val *= _bessel_at("I0", t) ** a
            if b:
                val *= _bessel_at("K0", t) ** b
            if log_weighted:
                val *= mp.log(t)
                if a == 1:
                    val -= _bessel_at("K0", t) ** (a + b) / (a + b)
            return val * t**n

        return f

    su = mp.sqrt(_to_mpf(key.u))
    if key.kind == "IvKM":

        def f(t):
            val = _bessel_at("I0", su * t)
            if a > 1:
                val *= _bessel_at("I0", t) ** (a - 1)
            if b:
                val *= _bessel_at("K0", t) ** b
            return val * t**n

    elif key.kind == "IKvM":

        def f(t):
            val = _bessel_at("K0", su * t)
            if a:
                val *= _bessel_at("I0", t) ** a
            if b > 1:
                val *= _bessel_at("K0", t) ** (b - 1)
            return val * t**n

    elif key.kind == "IpKM":

        def f(t):
            val = _bessel_at("I1", su * t)
            if a > 1:
                val *= _bessel_at("I0", t) ** (a - 1)
            if b:
                val *= _bessel_at("K0", t) ** b
            return val * t ** (n + 1)

    else:  # IKpM

        def f(t):
            val = -_bessel_at("K1", su * t)
            if a:
                val *= _bessel_at("I0", t) ** a
            if b > 1:
                val *= _bessel_at("K0", t) ** (b - 1)
            return val * t ** (n + 1)

    return f


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


def _trapezoid_levels(term, h0, target, what: str):
    """Generic double-exponential trapezoid over integer multiples of h:
    sum_{n in Z} h*term(n*h), refined by level doubling until two
    successive levels agree to ``target`` (relative)."""

    def sweep(h, step, start_pos, start_neg):
        total = mp.mpf(0)
        largest = mp.mpf(0)
        for direction, start in ((1, start_pos), (-1, start_neg)):
            n = start
            tiny = 0
            while True:
                val = term(direction * n * h)
                total += val
                a = abs(val)
                if a > largest:
                    largest = a
                if a < mp.eps * (largest + 1):
                    tiny += 1
                    if tiny >= 3:
                        break
                else:
                    tiny = 0
                n += step
        return total

    h = h0
    prev = (term(mp.mpf(0)) + sweep(h, 1, 1, 1)) * h
    for _ in range(LEVEL_BUDGET):
        h /= 2
        extra = sweep(h, 2, 1, 1) * h
        cur = prev / 2 + extra
        if abs(cur - prev) <= target * (abs(cur) + 1):
            return cur
        prev = cur
    raise QuadratureError(
        f"{what}: quadrature did not converge within the level budget"
    )


def _quad_01(f, target):
    """tanh-sinh quadrature of f over (0,1)."""
    half_pi = mp.pi / 2

    def term(w):
        x = half_pi * mp.sinh(w)
        # t computed so that both t and 1-t stay accurate
        if x >= 0:
            omt = 1 / (1 + mp.exp(2 * x))  # 1 - t
            t = 1 - omt
        else:
            t = 1 / (1 + mp.exp(-2 * x))
            omt = 1 - t
        if t == 0 or omt == 0:
            return mp.mpf(0)
        weight = mp.pi * mp.cosh(w) * t * omt
        return f(t) * weight

    return _trapezoid_levels(term, mp.mpf(1) / 4, target, "interval (0,1)")


def _quad_1_inf(f, delta_float, target):
    """Double-exponential quadrature of f over (1,oo) with substitution
    t = 1 + c*exp((pi/2) sinh w), c matched to the decay rate (rounded
    to a power of two so quadrature grids coincide across moments)."""
    half_pi = mp.pi / 2
    c = mp.mpf(1)
    while c > 1 / mp.mpf(delta_float):
        c /= 2

    def term(w):
        g = mp.exp(half_pi * mp.sinh(w))
        t = 1 + c * g
        weight = c * half_pi * mp.cosh(w) * g
        if weight == 0 or mp.isinf(t):
            return mp.mpf(0)
        return f(t) * weight

    return _trapezoid_levels(term, mp.mpf(1) / 4, target, "interval (1,oo)")


def _compute_moment(key: MomentKey):
    """Evaluate the moment integral at guard precision (caller sets dps)."""
    c, s = _decay(key)
    delta_float = c + s * mp.sqrt(_to_mpf(key.u)) if s else mp.mpf(c)
    f = _integrand(key)
    target = mpmath.mpf(10) ** (-(key.digits + 5))
    return _quad_01(f, target) + _quad_1_inf(f, delta_float, target)


# ---------------------------------------------------------------------------
# Cache
# ---------------------------------------------------------------------------


def _u_str(u: Optional[Fraction]) -> Optional[str]:
    if u is None:
        return None
    return f"{u.numerator}/{u.denominator}"


def _u_parse(s) -> Optional[Fraction]:
    if s is None:
        return None
    return Fraction(s)


class MomentCache:
    """Persistent append-only cache of computed moments, one JSON record
    per line: {"kind","a","b","n","u","digits","value"}.  A lookup hits
    when a stored record has at least the requested digits."""

    def __init__(self, path: Optional[str] = None):
        if path is None:
            path = os.environ.get("BWV_CACHE")
        if path is None:
            path = str(Path.home() / ".cache" / "bwv" / "moments.jsonl")
        self.path = str(path)
        self._lock = threading.Lock()
        self._map: dict = {}
        self._load()

    @staticmethod
    def _map_key(key: MomentKey):
        return (key.kind, key.a, key.b, key.n, _u_str(key.u))

    def _load(self) -> None:
        p = Path(self.path)
        if not p.exists():
            return
        with p.open() as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                mk = (rec["kind"], rec["a"], rec["b"], rec["n"], rec["u"])
                old = self._map.get(mk)
                if old is None or rec["digits"] > old[0]:
                    self._map[mk] = (rec["digits"], rec["value"])

    def get(self, key: MomentKey) -> Optional[str]:
        with self._lock:
            hit = self._map.get(self._map_key(key))
        if hit is not None and hit[0] >= key.digits:
            return hit[1]
        return None

    def put(self, key: MomentKey, value: str) -> None:
        rec = {
            "kind": key.kind,
            "a": key.a,
            "b": key.b,
            "n": key.n,
            "u": _u_str(key.u),
            "digits": key.digits,
            "value": value,
        }
        with self._lock:
            mk = self._map_key(key)
            old = self._map.get(mk)
            if old is None or key.digits > old[0]:
                self._map[mk] = (key.digits, value)
            p = Path(self.path)
            p.parent.mkdir(parents=True, exist_ok=True)
            with p.open("a") as fh:
                fh.write(json.dumps(rec) + "\n")

    def stats(self) -> dict:
        with self._lock:
            entries = len(self._map)
            by_kind: dict = {}
            for (kind, *_rest) in self._map:
                by_kind[kind] = by_kind.get(kind, 0) + 1
        p = Path(self.path)
        return {
            "path": self.path,
            "entries": entries,
            "by_kind": by_kind,
            "file_exists": p.exists(),
            "file_bytes": p.stat().st_size if p.exists() else 0,
        }

    def verify(self) -> dict:
        """Re-parse the backing file and check record well-formedness and
        in-memory consistency."""
        bad = 0
        records = 0
        p = Path(self.path)
        if p.exists():
            with p.open() as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    records += 1
                    try:
                        rec = json.loads(line)
                        assert rec["kind"] in _KINDS
                        assert isinstance(rec["digits"], int)
                        mpmath.mpf(rec["value"])
                        if rec["u"] is not None:
                            Fraction(rec["u"])
                    except Exception:
                        bad += 1
        return {"records": records, "malformed": bad, "ok": bad == 0}


_DEFAULT_CACHE: Optional[MomentCache] = None
_DEFAULT_CACHE_LOCK = threading.Lock()


def default_cache() -> MomentCache:
    """The process-wide cache (honors BWV_CACHE at first use)."""
    global _DEFAULT_CACHE
    with _DEFAULT_CACHE_LOCK:
        if _DEFAULT_CACHE is None or _DEFAULT_CACHE.path != (
            os.environ.get("BWV_CACHE") or _DEFAULT_CACHE.path
        ):
            _DEFAULT_CACHE = MomentCache()
        return _DEFAULT_CACHE


# ---------------------------------------------------------------------------
# moment
# ---------------------------------------------------------------------------


def moment(key: MomentKey, cache: Optional[MomentCache] = None):
    """The Bessel moment named by ``key``, with absolute error below
    10^-digits * max(1, |result|); consults and updates the cache."""
    _check_convergent(key)
    if cache is None:
        cache = default_cache()
    hit = cache.get(key)
    if hit is not None:
        with mp.workdps(key.digits + GUARD_DIGITS):
            return mp.mpf(hit)
    with mp.workdps(key.digits + GUARD_DIGITS):
        val = _compute_moment(key)
        text = mp.nstr(
            val, key.digits + 5, strip_zeros=False, min_fixed=1, max_fixed=0
        )
        cache.put(key, text)
        return +val


def moment_value(
    kind: str,
    a: int,
    b: int,
    n: int,
    u: Optional[Fraction] = None,
    digits: int = 50,
    cache: Optional[MomentCache] = None,
):
    """Convenience wrapper building the MomentKey inline."""
    return moment(MomentKey(kind, a, b, n, u, digits), cache=cache)


# ---------------------------------------------------------------------------
# Normalized moment families (the mu/nu entries)
# ---------------------------------------------------------------------------


def mu_moment(k: int, j: int, ell: int, u: Fraction, digits: int):
    """The odd-family normalized moment at column index j in [1, 3k-1]."""
    u = Fraction(u)
    n = 2 * ell - 1
    with mp.workdps(digits + GUARD_DIGITS):
        if j == 1:
            val = (
                moment_value("IvKM", 1, 2 * k, n, u, digits)
                + 2 * k * moment_value("IKvM", 1, 2 * k, n, u, digits)
            ) / (2 * k + 1)
            return val * mp.pi ** (-k)
        if 2 <= j <= k:
            return mp.pi ** (j - k - 1) * moment_value(
                "IvKM", j, 2 * k + 1 - j, n, u, digits
            )
        if k + 1 <= j <= 3 * k - 1:
            return mp.pi ** (j - 2 * k) * moment_value(
                "IKvM", j - k + 1, 3 * k - j, n, u, digits
            )
    raise ValueError(f"mu_moment index j={j} out of range for k={k}")


def mu_acute_moment(k: int, j: int, ell: int, u: Fraction, digits: int):
    """The differentiated odd-family normalized moment."""
    u = Fraction(u)
    n = 2 * ell - 1
    with mp.workdps(digits + GUARD_DIGITS):
        if j == 1:
            val = (
                moment_value("IpKM", 1, 2 * k, n, u, digits)
                + 2 * k * moment_value("IKpM", 1, 2 * k, n, u, digits)
            ) / (2 * k + 1)
            return val * mp.pi ** (-k)
        if 2 <= j <= k:
            return mp.pi ** (j - k - 1) * moment_value(
                "IpKM", j, 2 * k + 1 - j, n, u, digits
            )
        if k + 1 <= j <= 3 * k - 1:
            return mp.pi ** (j - 2 * k) * moment_value(
                "IKpM", j - k + 1, 3 * k - j, n, u, digits
            )
    raise ValueError(f"mu_acute_moment index j={j} out of range for k={k}")


def nu_moment(k: int, j: int, ell: int, u: Fraction, digits: int):
    """The even-family normalized moment at column index j in [1, 3k+1]."""
    u = Fraction(u)
    n = 2 * ell - 1
    with mp.workdps(digits + GUARD_DIGITS):
        if j == 1:
            val = (
                moment_value("IvKM", 1, 2 * k + 1, n, u, digits)
                + (2 * k + 1) * moment_value("IKvM", 1, 2 * k + 1, n, u, digits)
            ) / (2 * (k + 1))
            return val * mp.pi ** (-k - mp.mpf(1) / 2)
        if 2 <= j <= k + 1:
            return mp.pi ** (j - k - mp.mpf(3) / 2) * moment_value(
                "IvKM", j, 2 * k + 2 - j, n, u, digits
            )
        if k + 2 <= j <= 3 * k + 1:
            return mp.pi ** (j - 2 * k - mp.mpf(3) / 2) * moment_value(
                "IKvM", j - k, 3 * k + 2 - j, n, u, digits
            )
    raise ValueError(f"nu_moment index j={j} out of range for k={k}")


def nu_acute_moment(k: int, j: int, ell: int, u: Fraction, digits: int):
    """The differentiated even-family normalized moment."""
    u = Fraction(u)
    n = 2 * ell - 1
    with mp.workdps(digits + GUARD_DIGITS):
        if j == 1:
            val = (
                moment_value("IpKM", 1, 2 * k + 1, n, u, digits)
                + (2 * k + 1) * moment_value("IKpM", 1, 2 * k + 1, n, u, digits)
            ) / (2 * (k + 1))
            return val * mp.pi ** (-k - mp.mpf(1) / 2)
        if 2 <= j <= k + 1:
            return mp.pi ** (j - k - mp.mpf(3) / 2) * moment_value(
                "IpKM", j, 2 * k + 2 - j, n, u, digits
            )
        if k + 2 <= j <= 3 * k + 1:
            return mp.pi ** (j - 2 * k - mp.mpf(3) / 2) * moment_value(
                "IKpM", j - k, 3 * k + 2 - j, n, u, digits
            )
    raise ValueError(f"nu_acute_moment index j={j} out of range for k={k}")


# ---------------------------------------------------------------------------
# Moment matrices
# ---------------------------------------------------------------------------


def matM(k: int, digits: int):
    """M_k: ((-1)^(b-1) pi^(a-k-1) IKM(a, 2k+1-a; 2b-1)), k x k."""
    if k < 1:
        raise ValueError("matM requires k >= 1")
    with mp.workdps(digits + GUARD_DIGITS):
        out = mp.matrix(k, k)
        for a in range(1, k + 1):
            for b in range(1, k + 1):
                v = moment_value("IKM", a, 2 * k + 1 - a, 2 * b - 1, None, digits)
                out[a - 1, b - 1] = (-1) ** (b - 1) * mp.pi ** (a - k - 1) * v
        return out


def matN(k: int, digits: int):
    """N_k: ((-1)^(b-1) pi^(a-k-3/2) IKM(a, 2k+2-a; 2b-1)), k x k."""
    if k < 1:
        raise ValueError("matN requires k >= 1")
    with mp.workdps(digits + GUARD_DIGITS):
        out = mp.matrix(k, k)
        for a in range(1, k + 1):
            for b in range(1, k + 1):
                v = moment_value("IKM", a, 2 * k + 2 - a, 2 * b - 1, None, digits)
                out[a - 1, b - 1] = (
                    (-1) ** (b - 1) * mp.pi ** (a - k - mp.mpf(3) / 2) * v
                )
        return out


def matMring(k: int, digits: int):
    """Log-weighted companion of M_k built from IKM_LOG moments."""
    if k < 1:
        raise ValueError("matMring requires k >= 1")
    with mp.workdps(digits + GUARD_DIGITS):
        out = mp.matrix(k, k)
        for a in range(1, k + 1):
            for b in range(1, k + 1):
                v = moment_value(
                    "IKM_LOG", a, 2 * k + 1 - a, 2 * b - 1, None, digits
                )
                out[a - 1, b - 1] = (-1) ** (b - 1) * mp.pi ** (a - k - 1) * v
        return out


def matNring(k: int, digits: int):
    """Log-weighted companion of N_k built from IKM_LOG moments."""
    if k < 1:
        raise ValueError("matNring requires k >= 1")
    with mp.workdps(digits + GUARD_DIGITS):
        out = mp.matrix(k, k)
        for a in range(1, k + 1):
            for b in range(1, k + 1):
                v = moment_value(
                    "IKM_LOG", a, 2 * k + 2 - a, 2 * b - 1, None, digits
                )
                out[a - 1, b - 1] = (
                    (-1) ** (b - 1) * mp.pi ** (a - k - mp.mpf(3) / 2) * v
                )
        return out


def _beta_inverse_numeric(m: int, u: Fraction, digits: int):
    """Exact inverse of the beta matrix at rational u, as an mpf matrix."""
    Binv = exact_inverse(beta_matrix(m, Fraction(u)))
    out = mp.matrix(m, m)
    for a in range(m):
        for b in range(m):
            q = Fraction(Binv[a, b])
            out[a, b] = mp.mpf(q.numerator) / mp.mpf(q.denominator)
    return out


def matOmega(k: int, u: Fraction, digits: int):
    """The odd Wronskian matrix Omega_{2k-1}(u), (i,j) entry
    D^(i-1) mu^1_{k,j}(u).  Derivatives are reconstructed exactly through
    the inverse beta matrix applied to signed moment vectors -- no
    numerical differentiation."""
    if k < 1:
        raise ValueError("matOmega requires k >= 1")
    u = Fraction(u)
    if not 0 < u <= 1:
        raise ValueError("matOmega requires rational u in (0, 1]")
    m = 2 * k - 1
    with mp.workdps(digits + GUARD_DIGITS):
        binv = _beta_inverse_numeric(m, u, digits)
        su = mp.sqrt(_to_mpf(u))
        out = mp.matrix(m, m)
        for j in range(1, m + 1):
            vec = mp.matrix(m, 1)
            for ell in range(1, k + 1):
                vec[ell - 1] = (-1) ** (ell - 1) * mu_moment(k, j, ell, u, digits)
            for ell in range(1, k):
                vec[k + ell - 1] = (
                    (-1) ** (ell - 1) * su * mu_acute_moment(k, j, ell, u, digits)
                )
            col = binv * vec
            for i in range(m):
                out[i, j - 1] = col[i]
        return out


def matomega(k: int, u: Fraction, digits: int):
    """The even Wronskian matrix omega_{2k}(u), (i,j) entry
    D^(i-1) nu^1_{k,j}(u), via the inverse beta matrix."""
    if k < 1:
        raise ValueError("matomega requires k >= 1")
    u = Fraction(u)
    if not 0 < u < 1:
        raise ValueError("matomega requires rational u in (0, 1)")
    m = 2 * k
    with mp.workdps(digits + GUARD_DIGITS):
        binv = _beta_inverse_numeric(m, u, digits)
        su = mp.sqrt(_to_mpf(u))
        out = mp.matrix(m, m)
        for j in range(1, m + 1):
            vec = mp.matrix(m, 1)
            for ell in range(1, k + 1):
                vec[ell - 1] = (-1) ** (ell - 1) * nu_moment(k, j, ell, u, digits)
            for ell in range(1, k + 1):
                vec[k + ell - 1] = (
                    (-1) ** (ell - 1) * su * nu_acute_moment(k, j, ell, u, digits)
                )
            col = binv * vec
            for i in range(m):
                out[i, j - 1] = col[i]
        return out


# ---------------------------------------------------------------------------
# Named constants and sanity suites
# ---------------------------------------------------------------------------


def bologna(digits: int):
    """The Bologna constant
    C = Gamma(1/15) Gamma(2/15) Gamma(4/15) Gamma(8/15) / (240 sqrt(5) pi^2)."""
    if digits < 1:
        raise ValueError("digits must be positive")
    with mp.workdps(digits + GUARD_DIGITS):
        num = mp.mpf(1)
        for p in (1, 2, 4, 8):
            num *= mp.gamma(mp.mpf(p) / 15)
        return +(num / (240 * mp.sqrt(mp.mpf(5)) * mp.pi**2))


def ibp_sanity(k: int, digits: int) -> dict:
    """Integration-by-parts relations among odd-family moments at u = 1:

    * mu'_{k,1} = -(2 ell / m) mu_{k,1} with m = 2k+1;
    * mu'_{k,j} = (1 - j/m) mu_{k-1,j-1} - (2 ell / m) mu_{k,j}
      for j in [2,k], ell in [1,k-1].
    """
    if k < 2:
        raise ValueError("ibp_sanity requires k >= 2")
    one = Fraction(1)
    m_odd = 2 * k + 1
    tol = tolerance(digits)
    checks = []
    with mp.workdps(digits + GUARD_DIGITS):
        for ell in range(1, k):
            lhs = mu_acute_moment(k, 1, ell, one, digits)
            rhs = -mp.mpf(2 * ell) / m_odd * mu_moment(k, 1, ell, one, digits)
            checks.append(("j=1", ell, abs(lhs - rhs)))
            for j in range(2, k + 1):
                lhs = mu_acute_moment(k, j, ell, one, digits)
                rhs = (
                    (1 - mp.mpf(j) / m_odd)
                    * mu_moment(k - 1, j - 1, ell, one, digits)
                    - mp.mpf(2 * ell) / m_odd * mu_moment(k, j, ell, one, digits)
                )
                checks.append((f"j={j}", ell, abs(lhs - rhs)))
        worst = max(c[2] for c in checks)
        return {
            "k": k,
            "digits": digits,
            "tolerance": tol,
            "residuals": checks,
            "max_residual": worst,
            "ok": worst < tol,
        }
