import json
import math

import pytest

from hallforge import counting, hall, quiver
from hallforge.counting import Bounds
from hallforge.errors import BackendMismatchError, NonPolynomialCountError
from hallforge.gf import prime_powers
from hallforge.hall import (HallCache, HallEngine, HallPolynomial,
                            fit_polynomial, split_constant)
from hallforge.quiver import make_class, parse_class


def test_polynomial_str_and_eval():
    p = HallPolynomial((1, 1))
    assert str(p) == "q + 1"
    assert p.evaluate(1) == 2 and p.evaluate(7) == 8
    assert str(HallPolynomial((1,))) == "1"
    assert HallPolynomial((0, 0, 2)).evaluate(3) == 18


def test_hall_polynomial_examples(a2_engine, loop_engine):
    a2, loop = a2_engine.backend, loop_engine.backend
    p = a2_engine.hall_polynomial(parse_class(a2, "[S2]"),
                                  parse_class(a2, "[S1]"),
                                  parse_class(a2, "[P12]"))
    assert p.coeffs == (1,)
    p = loop_engine.hall_polynomial(parse_class(loop, "[J1]"),
                                    parse_class(loop, "[J1]"),
                                    parse_class(loop, "[J1+J1]"))
    assert p.coeffs == (1, 1)
    p = loop_engine.hall_polynomial(parse_class(loop, "[J1]"),
                                    parse_class(loop, "[J1]"),
                                    parse_class(loop, "[J2]"))
    assert p.coeffs == (1,)


def test_euler_constant_examples(a2_engine, loop_engine):
    a2, loop = a2_engine.backend, loop_engine.backend
    assert loop_engine.euler_constant(parse_class(loop, "[J1]"),
                                      parse_class(loop, "[J1]"),
                                      parse_class(loop, "[J1+J1]")) == 2
    c = parse_class(loop, "[J2+J1]")
    assert loop_engine.euler_constant(c, quiver.ZERO_CLASS, c) == 1
    assert a2_engine.euler_constant(parse_class(a2, "[S2]"),
                                    parse_class(a2, "[S1]"),
                                    parse_class(a2, "[P12]")) == 1


def test_interpolation_reproduces_every_sample(loop_engine):
    loop = loop_engine.backend
    sub = parse_class(loop, "[J1]")
    quot = parse_class(loop, "[J1+J1]")
    target = parse_class(loop, "[J2+J1]")
    p = loop_engine.hall_polynomial(sub, quot, target)
    for q in prime_powers(13):
        assert p.evaluate(q) == counting.count_points(loop, sub, quot, target, q)


def test_interpolation_stability(loop_engine):
    # refitting an accepted polynomial with one more sample cannot change it
    loop = loop_engine.backend
    sub = parse_class(loop, "[J1]")
    target = parse_class(loop, "[J1+J1+J1]")
    quot = parse_class(loop, "[J1+J1]")
    p = loop_engine.hall_polynomial(sub, quot, target)
    pts = [(q, counting.count_points(loop, sub, quot, target, q))
           for q in prime_powers(13)]
    for upto in range(p.degree + 2, len(pts) + 1):
        coeffs = fit_polynomial(pts[:upto])
        assert tuple(int(c) for c in coeffs) == p.coeffs


def test_split_constants():
    loop = quiver.builtin_backend("loop")
    assert split_constant(parse_class(loop, "[J1+J1]")) == 2
    assert split_constant(parse_class(loop, "[J1+J2]")) == 1
    assert split_constant(parse_class(loop, "[J1+J1+J1+J2+J2]")) == 12
    assert split_constant(quiver.ZERO_CLASS) == 1


def test_split_consistency_binomials(loop_engine, a2_engine):
    # the constant on the split middle A+B is a product of binomials
    for engine, dim in ((loop_engine, 4), (a2_engine, 4)):
        backend = engine.backend
        if backend.kind == quiver.KIND_LOOP:
            classes = [c for n in range(3)
                       for c in quiver.classes_with_dim(backend, (n,), n)]
        else:
            classes = [c for da in range(3) for db in range(3 - da)
                       for c in quiver.classes_with_dim(backend, (da, db), 2)]
        for a in classes:
            for b in classes:
                if quiver.class_total_dim(backend, a) \
                        + quiver.class_total_dim(backend, b) > dim:
                    continue
                target = make_class(backend, list(a) + list(b))
                expected = 1
                for label in set(target):
                    ma = sum(1 for l in a if l == label)
                    mb = sum(1 for l in b if l == label)
                    expected *= math.comb(ma + mb, ma)
                assert engine.euler_constant(a, b, target) == expected


def test_non_polynomial_error_when_samples_run_out(loop):
    engine = HallEngine(loop, Bounds(max_dim=6, max_q=3))
    with pytest.raises(NonPolynomialCountError):
        engine.hall_polynomial(parse_class(loop, "[J1]"),
                               parse_class(loop, "[J1]"),
                               parse_class(loop, "[J1+J1]"))


def test_cache_round_trip(loop, tmp_path):
    path = tmp_path / "cache.json"
    e1 = HallEngine(loop, cache=HallCache(loop, path))
    p = e1.hall_polynomial(parse_class(loop, "[J1]"),
                           parse_class(loop, "[J1]"),
                           parse_class(loop, "[J1+J1]"))
    e1.cache.dump()
    raw = json.loads(path.read_text())
    assert raw["version"] == hall.CACHE_VERSION
    assert raw["backend"] == loop.to_json()
    e2 = HallEngine(loop, cache=HallCache(loop, path))
    key = e2.cache.key(parse_class(loop, "[J1]"), parse_class(loop, "[J1]"),
                       parse_class(loop, "[J1+J1]"))
    assert e2.cache.get(key).coeffs == p.coeffs
    assert e2.cache.stats()["entries"] == e1.cache.stats()["entries"]


def test_cache_version_and_backend_mismatch(loop, a2, tmp_path):
    path = tmp_path / "cache.json"
    c = HallCache(loop, path)
    c.entries["x"] = [1]
    c.dump()
    data = json.loads(path.read_text())
    data["version"] = 99
    path.write_text(json.dumps(data))
    with pytest.raises(ValueError, match="version"):
        HallCache(loop, path)
    c.dump()  # restore good version
    with pytest.raises(BackendMismatchError):
        HallCache(a2, path)


def test_cache_write_is_idempotent(loop):
    c = HallCache(loop)
    c.put("k", HallPolynomial((1, 1)))
    c.put("k", HallPolynomial((1, 1)))
    with pytest.raises(ValueError):
        c.put("k", HallPolynomial((2,)))


def test_p1_constants_factor_over_points(p1_engine):
    b = p1_engine.backend
    sub = quiver.make_class(b, [("t", "x", 1), ("t", "y", 1)])
    quot = quiver.make_class(b, [("t", "x", 1)])
    target = quiver.make_class(b, [("t", "x", 1), ("t", "x", 1), ("t", "y", 1)])
    # at x: ((1),(1),(1,1)) -> q+1 ; at y: ((1),0,(1)) -> 1
    p = p1_engine.hall_polynomial(sub, quot, target)
    assert p.coeffs == (1, 1)
    assert p1_engine.euler_constant(sub, quot, target) == 2


def test_candidate_targets(loop_engine, a2_engine):
    loop, a2 = loop_engine.backend, a2_engine.backend
    j1 = parse_class(loop, "[J1]")
    got = {quiver.class_name(loop, c)
           for c in loop_engine.candidate_targets(j1, j1)}
    assert got == {"[J2]", "[J1+J1]"}
    s2, s1 = parse_class(a2, "[S2]"), parse_class(a2, "[S1]")
    got = {quiver.class_name(a2, c)
           for c in a2_engine.candidate_targets(s2, s1)}
    assert got == {"[P12]", "[S2+S1]"}
