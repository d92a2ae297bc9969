import pytest

from hallforge import counting, linalg, quiver
from hallforge.counting import Bounds, count_points, enumerate_subreps
from hallforge.errors import CapabilityError, ResourceLimitError
from hallforge.quiver import (Arrow, Backend, builtin_backend, make_class,
                              parse_class)

import oracles


def cells(backend, hist):
    return {(quiver.class_name(backend, s), quiver.class_name(backend, t)): n
            for (s, t), n in hist.counts.items()}


def test_interval_module_histogram(a2):
    h = enumerate_subreps(a2, parse_class(a2, "[P12]"), 2)
    assert cells(a2, h) == {("[0]", "[P12]"): 1, ("[S2]", "[S1]"): 1,
                            ("[P12]", "[0]"): 1}


def test_simple_module_histogram(a2):
    for q in (2, 5, 9):
        h = enumerate_subreps(a2, parse_class(a2, "[S1]"), q)
        assert cells(a2, h) == {("[0]", "[S1]"): 1, ("[S1]", "[0]"): 1}


def test_two_lines_histogram(loop):
    h = enumerate_subreps(loop, parse_class(loop, "[J1+J1]"), 3)
    assert h.counts[(parse_class(loop, "[J1]"), parse_class(loop, "[J1]"))] == 4


def test_count_points_examples(a2, loop):
    assert count_points(a2, parse_class(a2, "[S2]"), parse_class(a2, "[S1]"),
                        parse_class(a2, "[P12]"), 5) == 1
    assert count_points(a2, parse_class(a2, "[S1]"), parse_class(a2, "[S2]"),
                        parse_class(a2, "[P12]"), 2) == 0
    assert count_points(loop, parse_class(loop, "[J1]"),
                        parse_class(loop, "[J1]"),
                        parse_class(loop, "[J1+J1]"), 4) == 5


def test_monotone_consistency(a2, loop):
    for backend, text in ((a2, "[S1+P12]"), (loop, "[J2+J1]")):
        y = parse_class(backend, text)
        for q in (2, 3):
            assert count_points(backend, quiver.ZERO_CLASS, y, y, q) == 1
            assert count_points(backend, y, quiver.ZERO_CLASS, y, q) == 1


def test_dimension_mismatch_is_zero(loop):
    assert count_points(loop, parse_class(loop, "[J1]"),
                        parse_class(loop, "[J1]"),
                        parse_class(loop, "[J3]"), 3) == 0


def test_gaussian_binomial_sanity_all_routes(loop):
    # generic BFS, flat shortcut and the closed form must agree
    for m in (2, 3, 4):
        target = make_class(loop, [("j", 1)] * m)
        for q in (2, 3, 5):
            generic = counting._loop_survey(loop, target, q, m)
            flat = counting._flat_cells(loop, target, q)
            assert generic == flat
            for k in range(m + 1):
                sub = make_class(loop, [("j", 1)] * k)
                quo = make_class(loop, [("j", 1)] * (m - k))
                assert generic[(sub, quo)] == linalg.gaussian_binomial(m, k, q)


def test_flat_shortcut_matches_tuple_enumeration(a2):
    target = parse_class(a2, "[S1+S1+S2]")
    for q in (2, 3):
        assert counting._quiver_survey(a2, target, q) == \
            counting._flat_cells(a2, target, q)


def test_histogram_total_and_grading(a3, loop):
    for backend, text, q in ((a3, "[P13+S2]", 3), (loop, "[J2+J2]", 2)):
        target = parse_class(backend, text)
        h = enumerate_subreps(backend, target, q)
        dt = quiver.class_dim(backend, target)
        for (s, t), n in h.counts.items():
            assert n > 0
            assert quiver.dim_add(quiver.class_dim(backend, s),
                                  quiver.class_dim(backend, t)) == dt
        assert h.counts[(quiver.ZERO_CLASS, target)] == 1
        assert h.counts[(target, quiver.ZERO_CLASS)] == 1


def test_against_unpruned_brute_force(a2, a3, loop):
    cases = [(a2, "[P12+S1]", 2), (a2, "[P12+S2]", 3), (a3, "[P13]", 2),
             (loop, "[J2+J1]", 2), (loop, "[J3]", 3)]
    for backend, text, q in cases:
        target = parse_class(backend, text)
        cand = {}
        dt = quiver.class_dim(backend, target)
        vecs = [()]
        for d in dt:
            vecs = [v + (k,) for v in vecs for k in range(d + 1)]
        for vec in vecs:
            cand[vec] = list(quiver.classes_with_dim(backend, vec, sum(vec)))
        classify = oracles.classify_by_iso(backend, cand)
        brute = oracles.brute_subrep_histogram(backend, target, q, classify)
        assert enumerate_subreps(backend, target, q).counts == brute


def test_loop_self_duality_of_cells(loop):
    # transpose duality: the (sub, quot) histogram is symmetric
    for text, q in (("[J2+J1]", 2), ("[J2+J2]", 3), ("[J3+J1]", 2)):
        target = parse_class(loop, text)
        h = enumerate_subreps(loop, target, q).counts
        for (s, t), n in h.items():
            assert h.get((t, s)) == n


def test_min_side_flip_agrees_with_full_enumeration(loop):
    for text, q in (("[J2+J1+J1]", 2), ("[J2+J2]", 3)):
        target = parse_class(loop, text)
        full = enumerate_subreps(loop, target, q).counts
        for (s, t), n in full.items():
            assert count_points(loop, s, t, target, q) == n


def test_opposite_orientation_duality():
    a2 = builtin_backend("a2")
    a2op = Backend("a2op", quiver.KIND_DYNKIN, ("1", "2"),
                   (Arrow("a", 1, 0),))
    # interval labels carry over verbatim; duality swaps sub and quot
    for text in ("[P12]", "[P12+S1]", "[P12+S2]", "[S1+S2]"):
        target = parse_class(a2, text)
        h = enumerate_subreps(a2, target, 3).counts
        hop = enumerate_subreps(a2op, target, 3).counts
        assert {(t, s): n for (s, t), n in h.items()} == hop


def test_resource_bounds(loop):
    with pytest.raises(ResourceLimitError):
        enumerate_subreps(loop, make_class(loop, [("j", 1)] * 7), 2)
    with pytest.raises(ResourceLimitError):
        enumerate_subreps(loop, parse_class(loop, "[J1]"), 16)
    b = Bounds(max_dim=9, max_q=13)
    assert count_points(loop, parse_class(loop, "[J1]"),
                        parse_class(loop, "[J1]"),
                        parse_class(loop, "[J2]"), 13, b) == 1


def test_p1_counting_is_capability_error(p1b):
    with pytest.raises(CapabilityError):
        enumerate_subreps(p1b, (("t", "x", 1),), 2)
