import json
import random

import pytest

from hallforge import quiver
from hallforge.errors import CapabilityError
from hallforge.quiver import (Arrow, Backend, class_name,
                              decompose, hom_dim, label_name, make_class,
                              parse_class, positive_roots, realize,
                              realize_class)

import oracles


def test_positive_roots_a2_against_brute_force(a2):
    # oracle: enumerate every rep over F_2 with dims <= (2,2), test
    # indecomposability by idempotent search, collect dim vectors
    found = set()
    for da in range(3):
        for db in range(3):
            if (da, db) == (0, 0):
                continue
            for rep in oracles.all_reps(a2, (da, db), 2):
                if oracles.is_indecomposable(a2, rep):
                    found.add(rep.dims)
    roots = positive_roots(a2, (2, 2))
    assert {quiver.label_dim(a2, r) for r in roots} == found == \
        {(1, 0), (0, 1), (1, 1)}


def test_positive_roots_a1():
    a1 = Backend("a1", quiver.KIND_DYNKIN, ("1",), ())
    assert positive_roots(a1, (3,)) == [("i", 0, 0)]


def test_positive_roots_a3_bound_ones(a3):
    roots = positive_roots(a3, (1, 1, 1))
    assert len(roots) == 6
    assert {label_name(a3, r) for r in roots} == \
        {"S1", "S2", "S3", "P12", "P23", "P13"}


def test_root_count_matches_triangular_number():
    for n in (2, 3, 4):
        vertices = tuple(str(i) for i in range(1, n + 1))
        arrows = tuple(Arrow(f"a{i}", i, i + 1) for i in range(n - 1))
        b = Backend(f"a{n}", quiver.KIND_DYNKIN, vertices, arrows)
        assert len(positive_roots(b, (1,) * n)) == n * (n + 1) // 2


def test_realize_examples(a2, loop):
    r = realize(a2, ("i", 0, 1), 2)
    assert r.dims == (1, 1) and r.mats[0] == (bytes([1]),)
    r = realize(a2, ("i", 0, 0), 3)
    assert r.dims == (1, 0) and r.mats[0] == ()
    r = realize(loop, ("j", 2), 2)
    assert r.mats[0] == (bytes([0, 1]), bytes([0, 0]))


def test_realize_class_examples(a2):
    r = realize_class(a2, parse_class(a2, "[S1+S2]"), 2)
    assert r.dims == (1, 1) and r.mats[0] == (bytes([0]),)
    r = realize_class(a2, quiver.ZERO_CLASS, 2)
    assert r.dims == (0, 0)
    r = realize_class(a2, parse_class(a2, "[P12+P12]"), 3)
    assert r.mats[0] == (bytes([1, 0]), bytes([0, 1]))


def test_hom_dim_examples(a2):
    S1 = realize(a2, ("i", 0, 0), 2)
    S2 = realize(a2, ("i", 1, 1), 2)
    P = realize(a2, ("i", 0, 1), 2)
    assert hom_dim(a2, S1, S1) == 1
    assert hom_dim(a2, S1, S2) == 0
    assert hom_dim(a2, S2, S1) == 0
    assert hom_dim(a2, P, S1) == 1
    assert hom_dim(a2, S1, P) == 0
    assert hom_dim(a2, S2, P) == 1


def test_hom_dim_loop_blocks(loop):
    for a in range(1, 4):
        for b in range(1, 4):
            ra, rb = realize(loop, ("j", a), 3), realize(loop, ("j", b), 3)
            assert hom_dim(loop, ra, rb) == min(a, b)


def test_decompose_zero_and_round_trip_exhaustive(a2, loop):
    assert decompose(a2, realize_class(a2, quiver.ZERO_CLASS, 2)) == ()
    for backend in (a2, loop):
        classes = set()
        if backend is a2:
            for da in range(6):
                for db in range(6 - da):
                    classes |= set(quiver.classes_with_dim(backend, (da, db), 5))
        else:
            for n in range(6):
                classes |= set(quiver.classes_with_dim(backend, (n,), 5))
        for q in (2, 3, 5):
            for cls in classes:
                assert decompose(backend, realize_class(backend, cls, q)) == cls


def test_decompose_round_trip_a3_exhaustive(a3):
    classes = []
    for da in range(6):
        for db in range(6 - da):
            for dc in range(6 - da - db):
                classes.extend(quiver.classes_with_dim(a3, (da, db, dc), 5))
    for cls in classes:
        for q in (2, 3, 5):
            assert decompose(a3, realize_class(a3, cls, q)) == cls


def test_decompose_rank_one_example(a2):
    rep = quiver.MatrixRep(2, (2, 2), ((bytes([1, 0]), bytes([0, 0])),))
    assert decompose(a2, rep) == parse_class(a2, "[S1+S2+P12]")


def test_field_independence_on_permuted_realizations(a2, a3, loop):
    rng = random.Random(11)
    for backend in (a2, a3, loop):
        if backend is loop:
            pool = [make_class(backend, [("j", 2), ("j", 1)]),
                    make_class(backend, [("j", 3), ("j", 1), ("j", 1)])]
        else:
            roots = positive_roots(backend, (2,) * backend.n_vertices)
            pool = [make_class(backend, [rng.choice(roots), rng.choice(roots)])
                    for _ in range(3)]
        for cls in pool:
            rep2 = realize_class(backend, cls, 2)
            perms = [list(range(d)) for d in rep2.dims]
            for p in perms:
                rng.shuffle(p)

            def permuted(q):
                rep = realize_class(backend, cls, q)
                mats = []
                for ai, ar in enumerate(backend.arrows):
                    ps, pt = perms[ar.src], perms[ar.tgt]
                    m = rep.mats[ai]
                    rows = [bytes(m[pt[i]][ps[j]] for j in range(len(ps)))
                            for i in range(len(pt))]
                    mats.append(tuple(rows))
                return quiver.MatrixRep(q, rep.dims, tuple(mats))

            results = {decompose(backend, permuted(q)) for q in (2, 3, 5)}
            assert results == {cls}


def test_gamma_additivity(a2):
    c1 = parse_class(a2, "[S1+P12]")
    c2 = parse_class(a2, "[S2]")
    union = make_class(a2, list(c1) + list(c2))
    assert quiver.summand_count(union) == \
        quiver.summand_count(c1) + quiver.summand_count(c2)


def test_class_parsing_round_trip(a2, loop, p1b):
    for backend, text in ((a2, "[S1+S1+P12]"), (loop, "[J1+J2]"),
                          (a2, "[0]"), (p1b, "[T(x,2)+T(y,1)]")):
        cls = parse_class(backend, text)
        assert parse_class(backend, class_name(backend, cls)) == cls


def test_backend_json_round_trip(a2, tmp_path):
    data = a2.to_json()
    again = quiver.backend_from_json(data)
    assert again == a2
    p = tmp_path / "b.json"
    p.write_text(json.dumps(data))
    loaded, _ = quiver.load_backend(str(p))
    assert loaded == a2


def test_backend_validation_errors():
    with pytest.raises(ValueError):
        Backend("bad", quiver.KIND_DYNKIN, ("1", "2"),
                (Arrow("a", 0, 0),))  # loop in type A
    with pytest.raises(ValueError):
        Backend("bad", quiver.KIND_LOOP, ("1", "2"), (Arrow("a", 0, 0),))
    with pytest.raises(ValueError):
        Backend("bad", quiver.KIND_DYNKIN, ("1", "2", "3"),
                (Arrow("a", 0, 1),))  # disconnected path
    with pytest.raises(ValueError):
        quiver.load_backend("nonexistent-backend")


def test_positive_roots_needs_dynkin(loop):
    with pytest.raises(CapabilityError):
        positive_roots(loop, (2,))


def test_realize_p1_is_capability_error(p1b):
    with pytest.raises(CapabilityError):
        realize(p1b, ("t", "x", 1), 2)


def test_canonical_order_is_total(a3):
    roots = positive_roots(a3, (3, 3, 3))
    keys = [quiver.label_key(a3, r) for r in roots]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)
