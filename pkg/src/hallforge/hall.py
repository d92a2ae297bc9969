"""Hall polynomials by interpolation and their q=1 specializations.

Point counts of the subobject variety are sampled at an ascending schedule
of prime powers; a candidate polynomial is fitted through all but the last
sample and accepted once it has integer coefficients and reproduces the
held-out sample exactly.  Its value at q = 1 is the Euler-characteristic
structure constant.  Accepted polynomials go to a versioned JSON cache.
"""

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import counting, quiver
from .errors import (BackendMismatchError, CapabilityError,
                     NonPolynomialCountError)
from .gf import prime_powers

CACHE_VERSION = 1


@dataclass(frozen=True)
class HallPolynomial:
    """Integer-coefficient polynomial in q, coefficients ascending."""
    coeffs: tuple

    def evaluate(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else -1

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for e in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[e]
            if not c:
                continue
            if e == 0:
                terms.append(f"{c}")
            elif e == 1:
                terms.append("q" if c == 1 else f"{c}*q")
            else:
                terms.append(f"q^{e}" if c == 1 else f"{c}*q^{e}")
        return " + ".join(terms) if terms else "0"


def fit_polynomial(points):
    """Exact polynomial through (x, y) samples via Newton divided
    differences; returns ascending Fraction coefficients."""
    xs = [Fraction(x) for x, _ in points]
    divided = [Fraction(y) for _, y in points]
    n = len(points)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            divided[i] = (divided[i] - divided[i - 1]) / (xs[i] - xs[i - j])
    coeffs = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # multiply accumulated poly by (x - xs[i]) and add divided[i]
        new = [Fraction(0)] * n
        for e in range(n - 1):
            if coeffs[e]:
                new[e + 1] += coeffs[e]
                new[e] -= coeffs[e] * xs[i]
        new[0] += divided[i]
        coeffs = new
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def split_constant(cls):
    """Product of factorials of the summand multiplicities."""
    out = 1
    seen = {}
    for l in cls:
        seen[l] = seen.get(l, 0) + 1
    for m in seen.values():
        out *= math.factorial(m)
    return out


class HallCache:
    """Versioned polynomial store, one per backend."""

    def __init__(self, backend, path=None, *, rebuild_stale=False):
        self.backend = backend
        self.path = Path(path) if path else None
        self.entries = {}
        self.dirty = False
        self.rebuilt = False
        if self.path and self.path.exists():
            try:
                self.load(self.path)
            except ValueError:
                if not rebuild_stale:
                    raise
                # stale version: start over; the next dump overwrites it
                self.entries = {}
                self.dirty = True
                self.rebuilt = True

    def key(self, sub, quot, target, scope=""):
        b = self.backend
        return (scope + quiver.class_name(b, sub) + "|"
                + quiver.class_name(b, quot) + "|" + quiver.class_name(b, target))

    def get(self, key):
        c = self.entries.get(key)
        return HallPolynomial(tuple(c)) if c is not None else None

    def put(self, key, poly):
        old = self.entries.get(key)
        if old is not None and tuple(old) != poly.coeffs:
            raise ValueError(f"cache collision for {key}")
        self.entries[key] = list(poly.coeffs)
        self.dirty = True

    def to_json(self):
        return {
            "version": CACHE_VERSION,
            "backend": self.backend.to_json(),
            "entries": [{"key": k, "coeffs": self.entries[k]}
                        for k in sorted(self.entries)],
        }

    def dump(self, path=None):
        p = Path(path) if path else self.path
        if p is None:
            return
        payload = json.dumps(self.to_json(), sort_keys=True,
                             separators=(",", ":")) + "\n"
        lock = p.with_suffix(p.suffix + ".lock")
        with open(lock, "w") as lk:
            try:
                import fcntl
                fcntl.flock(lk, fcntl.LOCK_EX)
            except ImportError:
                pass
            tmp = p.with_suffix(p.suffix + ".tmp")
            tmp.write_text(payload)
            tmp.replace(p)
        self.dirty = False

    def load(self, path, *, merge=False):
        data = json.loads(Path(path).read_text())
        if data.get("version") != CACHE_VERSION:
            raise ValueError(
                f"cache version {data.get('version')} != {CACHE_VERSION}; "
                "clear the cache or rebuild it with this tool version")
        if data.get("backend") != self.backend.to_json():
            raise BackendMismatchError(
                "cache was built for a different backend definition")
        fresh = {e["key"]: list(e["coeffs"]) for e in data["entries"]}
        if merge:
            for k, v in fresh.items():
                if k in self.entries and self.entries[k] != v:
                    raise ValueError(f"cache collision for {k}")
            self.entries.update(fresh)
        else:
            self.entries = fresh

    def clear(self):
        self.entries = {}
        self.dirty = True

    def stats(self):
        return {"entries": len(self.entries),
                "max_degree": max((len(c) - 1 for c in self.entries.values()),
                                  default=-1)}


class HallEngine:
    """Structure constants for one backend, with caching and bounds."""

    def __init__(self, backend, bounds=counting.DEFAULT_BOUNDS, cache=None):
        self.backend = backend
        self.bounds = bounds
        self.cache = cache if cache is not None else HallCache(backend)
        if backend.kind == quiver.KIND_P1:
            self._local = _loop_delegate(self, bounds)
        else:
            self._local = None

    # -- polynomials --------------------------------------------------------

    def hall_polynomial(self, sub, quot, target):
        """Counting polynomial of the (sub, quot) cell of `target`."""
        if self.backend.kind == quiver.KIND_P1:
            return self._p1_polynomial(sub, quot, target)
        key = self.cache.key(sub, quot, target)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        poly = self._interpolate(sub, quot, target)
        self.cache.put(key, poly)
        return poly

    def euler_constant(self, sub, quot, target):
        return self.hall_polynomial(sub, quot, target).evaluate(1)

    def _interpolate(self, sub, quot, target):
        schedule = prime_powers(self.bounds.max_q)
        samples = []
        for i, q in enumerate(schedule):
            samples.append((q, counting.count_points(
                self.backend, sub, quot, target, q, self.bounds)))
            if i == 0:
                continue
            coeffs = fit_polynomial(samples[:-1])
            if any(c.denominator != 1 for c in coeffs):
                continue
            cand = HallPolynomial(tuple(int(c) for c in coeffs))
            if cand.evaluate(samples[-1][0]) == samples[-1][1]:
                return cand
        raise NonPolynomialCountError(
            f"counts for {quiver.class_name(self.backend, target)} cell "
            f"({quiver.class_name(self.backend, sub)}, "
            f"{quiver.class_name(self.backend, quot)}) did not stabilize "
            f"within q <= {self.bounds.max_q}")

    # -- p1 backend: constants factor over support points -------------------

    def _p1_polynomial(self, sub, quot, target):
        for cls in (sub, quot, target):
            for l in cls:
                if l[0] != "t":
                    raise CapabilityError(
                        "products are defined for torsion classes only")
        key = self.cache.key(sub, quot, target)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        points = sorted({l[1] for l in target} | {l[1] for l in sub}
                        | {l[1] for l in quot})
        coeffs = (1,)
        loop = self._local
        for x in points:
            lsub = _local_class(loop.backend, sub, x)
            lquot = _local_class(loop.backend, quot, x)
            ltar = _local_class(loop.backend, target, x)
            p = loop.hall_polynomial(lsub, lquot, ltar)
            coeffs = _poly_mul(coeffs, p.coeffs)
            if coeffs == (0,) or not coeffs:
                coeffs = (0,)
                break
        poly = HallPolynomial(tuple(coeffs))
        self.cache.put(key, poly)
        return poly

    # -- support enumeration -------------------------------------------------

    def candidate_targets(self, x, z):
        """Classes Y that can carry a conflation with sub x and quotient z:
        dim(Y) = dim(x) + dim(z) and at most summand_count(x) +
        summand_count(z) indecomposable summands."""
        b = self.backend
        if b.kind == quiver.KIND_P1:
            from . import p1
            return p1.candidate_targets(self, x, z)
        dims = quiver.dim_add(quiver.class_dim(b, x), quiver.class_dim(b, z))
        gmax = quiver.summand_count(x) + quiver.summand_count(z)
        return quiver.classes_with_dim(b, dims, gmax)


def _poly_mul(a, b):
    if not a or not b:
        return (0,)
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return tuple(out)


def _local_class(loop_backend, cls, point):
    return quiver.make_class(loop_backend,
                             [("j", l[2]) for l in cls if l[1] == point])


def _loop_delegate(engine, bounds):
    loop = quiver.builtin_backend("loop")
    delegate = HallEngine(loop, bounds, cache=_ScopedCache(engine.cache, loop))
    return delegate


class _ScopedCache:
    """View of a host cache that namespaces keys for the p1 backend's
    internal loop-quiver computations."""

    def __init__(self, host, loop_backend):
        self.host = host
        self.backend = loop_backend

    def key(self, sub, quot, target, scope=""):
        b = self.backend
        return ("local:" + quiver.class_name(b, sub) + "|"
                + quiver.class_name(b, quot) + "|" + quiver.class_name(b, target))

    def get(self, key):
        return self.host.get(key)

    def put(self, key, poly):
        self.host.put(key, poly)
