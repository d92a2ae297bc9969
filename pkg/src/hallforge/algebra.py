"""The convolution algebra of constructible functions in stratified
Krull-Schmidt form.

A constructible set is a disjoint union of strata; a stratum is a formal
direct sum of pairwise-disjoint indecomposable families with positive
multiplicities.  Elements are exact-rational combinations of
characteristic functions of such sets, kept in a canonical form: terms
are grouped by (stratum summand count, coefficient) over a disjoint
"atom" family basis, which makes equality syntactic and serialization
byte-stable for equal elements.
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

from . import quiver
from .errors import BackendMismatchError, CapabilityError, InternalInvariantError
from .p1sets import P1Set


@dataclass(frozen=True)
class IndecFamily:
    """A constructible family of indecomposables.

    kind "labels": an explicit finite set of labels (quiver backends, and
    line bundles on P^1).  kind "points": the degree-d torsion sheaves
    over a finite or cofinite base of points.
    """
    kind: str
    labels: tuple = ()
    degree: int = 0
    base: P1Set = None

    @staticmethod
    def of_labels(backend, labels):
        labels = tuple(sorted(set(labels), key=lambda l: quiver.label_key(backend, l)))
        if not labels:
            raise ValueError("empty family")
        for l in labels:
            _check_label_kind(backend, l)
        return IndecFamily("labels", labels=labels)

    @staticmethod
    def of_points(degree, base):
        if base.is_empty:
            raise ValueError("empty family")
        return IndecFamily("points", degree=degree, base=base)

    def descriptor(self, backend):
        if self.kind == "labels":
            return (0, tuple(quiver.label_key(backend, l) for l in self.labels))
        return (1, self.degree, self.base.descriptor())

    def member_label_dim(self, backend):
        if self.kind == "labels":
            dims = {quiver.label_dim(backend, l) for l in self.labels}
            return dims.pop() if len(dims) == 1 else None
        return (0, self.degree)

    def summand_dims_mixed(self):
        return False

    def contains_label(self, label):
        if self.kind == "labels":
            return label in self.labels
        return label[0] == "t" and label[2] == self.degree \
            and self.base.contains(label[1])

    def is_disjoint(self, other):
        if self.kind != other.kind:
            if {self.kind, other.kind} == {"labels", "points"}:
                # torsion point families never meet line-bundle label sets;
                # torsion labels sit in point families
                if self.kind == "labels":
                    return all(not other.contains_label(l) for l in self.labels)
                return all(not self.contains_label(l) for l in other.labels)
            return True
        if self.kind == "labels":
            return not set(self.labels) & set(other.labels)
        if self.degree != other.degree:
            return True
        return self.base.is_disjoint(other.base)

    def size(self):
        """Number of member labels, or None when infinite."""
        if self.kind == "labels":
            return len(self.labels)
        return None if self.base.cofinite else len(self.base.points)


def _check_label_kind(backend, label):
    kind = label[0]
    ok = (backend.kind == quiver.KIND_DYNKIN and kind == "i"
          and 0 <= label[1] <= label[2] < backend.n_vertices) \
        or (backend.kind == quiver.KIND_LOOP and kind == "j" and label[1] >= 1) \
        or (backend.kind == quiver.KIND_P1 and kind in ("t", "o"))
    if not ok:
        raise BackendMismatchError(
            f"label {label!r} does not belong to backend {backend.name!r}")


Stratum = tuple  # of (IndecFamily, multiplicity), canonically sorted


def stratum_gamma(stratum):
    return sum(m for _, m in stratum)


def make_stratum(backend, parts):
    parts = [(f, m) for f, m in parts if m]
    for i, (f, _) in enumerate(parts):
        for g, _ in parts[i + 1:]:
            if f is not g and not f.is_disjoint(g):
                raise ValueError("stratum families must be pairwise disjoint")
    merged = {}
    for f, m in parts:
        merged[f] = merged.get(f, 0) + m
    return tuple(sorted(merged.items(), key=lambda fm: fm[0].descriptor(backend)))


@dataclass(frozen=True)
class ConstructibleSet:
    """Finite disjoint union of Krull-Schmidt strata."""
    strata: tuple

    def summand_count(self):
        return max((stratum_gamma(s) for s in self.strata), default=0)

    def is_empty(self):
        return not self.strata

    def contains(self, cls):
        return any(_stratum_contains(s, cls) for s in self.strata)

    def members(self, backend):
        for s in self.strata:
            yield from _stratum_members(backend, s)


def _stratum_contains(stratum, cls):
    counts = [0] * len(stratum)
    for label in cls:
        for i, (f, _) in enumerate(stratum):
            if f.contains_label(label):
                counts[i] += 1
                break
        else:
            return False
    return all(c == m for c, (_, m) in zip(counts, stratum))


def _multisets(items, n):
    if n == 0:
        yield ()
        return
    if not items:
        return
    head = items[0]
    for k in range(n, -1, -1):
        for rest in _multisets(items[1:], n - k):
            yield (head,) * k + rest


def _stratum_members(backend, stratum):
    choices = []
    for f, m in stratum:
        if f.kind == "points":
            if f.base.cofinite:
                raise CapabilityError("cannot enumerate a cofinite family")
            labels = [("t", x, f.degree) for x in sorted(f.base.points)]
        else:
            labels = list(f.labels)
        choices.append(list(_multisets(labels, m)))
    for combo in iproduct(*choices):
        yield quiver.make_class(backend, [l for part in combo for l in part])


def singleton_set(backend, cls):
    return ConstructibleSet((class_stratum(backend, cls),))


def class_stratum(backend, cls):
    counts = {}
    for l in cls:
        _check_label_kind(backend, l)
        counts[l] = counts.get(l, 0) + 1
    parts = []
    for l, m in counts.items():
        if l[0] == "t":
            fam = IndecFamily.of_points(l[2], P1Set.finite([l[1]]))
        else:
            fam = IndecFamily.of_labels(backend, [l])
        parts.append((fam, m))
    return make_stratum(backend, parts)


# ---------------------------------------------------------------------------
# normalization: overlapping families are refined to disjoint atoms and
# multiplicities distributed, so distinct strata denote disjoint sets.

def refine_families(backend, families):
    """Disjoint atoms generating the boolean algebra of the given families.
    Returns (atoms, map family -> list of its atoms)."""
    label_fams = [f for f in families if f.kind == "labels"]
    point_fams = [f for f in families if f.kind == "points"]
    atom_of = {}
    atoms = []
    if label_fams:
        # atomize to singletons: canonical and always available for finite sets
        seen = {}
        for f in label_fams:
            mine = []
            for l in f.labels:
                a = seen.get(l)
                if a is None:
                    a = IndecFamily.of_labels(backend, [l])
                    seen[l] = a
                    atoms.append(a)
                mine.append(a)
            atom_of[f] = mine
    by_degree = {}
    for f in point_fams:
        by_degree.setdefault(f.degree, []).append(f)
    for d in sorted(by_degree):
        fams = by_degree[d]
        mentioned = set()
        for f in fams:
            mentioned |= f.base.points
        degree_atoms = {}
        for x in sorted(mentioned):
            degree_atoms[x] = IndecFamily.of_points(d, P1Set.finite([x]))
        core = P1Set.cofinite_of(mentioned)
        core_atom = IndecFamily.of_points(d, core) if not core.is_empty else None
        for f in fams:
            mine = []
            for x in sorted(mentioned):
                if f.base.contains(x):
                    mine.append(degree_atoms[x])
            if f.base.cofinite:
                mine.append(core_atom)
            atom_of[f] = mine
        atoms.extend(degree_atoms.values())
        if core_atom is not None:
            atoms.append(core_atom)
    return atoms, atom_of


def _distribute(backend, stratum, atom_of):
    """Expand one stratum over the atom refinement: n copies of a family
    split multinomially over its atoms.  Yields atom strata."""
    per_part = []
    for f, m in stratum:
        atoms = atom_of[f]
        options = []
        for split in _compositions(m, len(atoms)):
            opt = []
            ok = True
            for a, k in zip(atoms, split):
                if not k:
                    continue
                sz = a.size()
                if sz is not None and a.kind == "labels" and k > 0 and sz == 0:
                    ok = False
                    break
                opt.append((a, k))
            if ok:
                options.append(opt)
        per_part.append(options)
    for combo in iproduct(*per_part):
        yield make_stratum(backend, [p for opt in combo for p in opt])


def _compositions(n, k):
    if k == 0:
        if n == 0:
            yield ()
        return
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def normalize(backend, strata):
    """Canonical stratified Krull-Schmidt form of a union of strata."""
    strata = [s if isinstance(s, tuple) else tuple(s) for s in strata]
    fams = [f for s in strata for f, _ in s]
    _, atom_of = refine_families(backend, fams)
    out = set()
    for s in strata:
        for a in _distribute(backend, s, atom_of):
            out.add(a)
    return ConstructibleSet(tuple(sorted(out, key=lambda s: _stratum_key(backend, s))))


def _stratum_key(backend, stratum):
    return (stratum_gamma(stratum), tuple(
        (f.descriptor(backend), m) for f, m in stratum))


def direct_sum(backend, a, b):
    """Pointwise direct sum {[X + Y]} of two constructible sets, in
    stratified Krull-Schmidt form."""
    fams = [f for s in list(a.strata) + list(b.strata) for f, _ in s]
    _, atom_of = refine_families(backend, fams)
    out = set()
    for sa in a.strata:
        for sb in b.strata:
            for ra in _distribute(backend, sa, atom_of):
                for rb in _distribute(backend, sb, atom_of):
                    out.add(make_stratum(backend, list(ra) + list(rb)))
    return ConstructibleSet(tuple(sorted(out, key=lambda s: _stratum_key(backend, s))))


# ---------------------------------------------------------------------------
# elements

@dataclass(frozen=True)
class CFElement:
    """Exact rational combination of characteristic functions, canonical."""
    backend_name: str
    terms: tuple  # ((ConstructibleSet, Fraction), ...)

    def is_zero(self):
        return not self.terms

    def summand_count(self):
        return max((s.summand_count() for s, _ in self.terms), default=0)


def char_fn(backend, cset):
    """1_O for a constructible set O (normalizes first)."""
    if isinstance(cset, ConstructibleSet):
        cset = normalize(backend, cset.strata)
    else:
        cset = normalize(backend, cset)
    if cset.is_empty():
        return CFElement(backend.name, ())
    return _canonical(backend, {s: Fraction(1) for s in cset.strata})


def unit_element(backend):
    return char_fn(backend, [()])


def zero_element(backend):
    return CFElement(backend.name, ())


def class_char(backend, cls):
    return char_fn(backend, [class_stratum(backend, cls)])


def _atom_map(backend, element):
    """Element as a value map over atom strata (its own atom basis)."""
    out = {}
    for cset, coeff in element.terms:
        for s in cset.strata:
            out[s] = out.get(s, Fraction(0)) + coeff
    return out


def _common_atoms(backend, maps):
    """Re-express several atom maps over one common refinement."""
    fams = [f for m in maps for s in m for f, _ in s]
    _, atom_of = refine_families(backend, fams)
    outs = []
    for m in maps:
        acc = {}
        for s, v in m.items():
            for a in _distribute(backend, s, atom_of):
                acc[a] = acc.get(a, Fraction(0)) + v
        outs.append({k: v for k, v in acc.items() if v})
    return outs


def _canonical(backend, atom_values):
    atom_values = {s: v for s, v in atom_values.items() if v}
    if backend.kind == quiver.KIND_P1:
        atom_values = _minimize_points(backend, atom_values)
    groups = {}
    for s, v in atom_values.items():
        groups.setdefault((stratum_gamma(s), v), []).append(s)
    terms = []
    for (g, v), strata in sorted(
            groups.items(),
            key=lambda kv: (kv[0][0], kv[0][1].numerator, kv[0][1].denominator)):
        cset = ConstructibleSet(tuple(sorted(strata, key=lambda s: _stratum_key(backend, s))))
        terms.append((cset, v))
    return CFElement(backend.name, tuple(terms))


def _minimize_points(backend, atom_values):
    """Drop mentioned points the function does not treat specially.

    A point x is absorbable when the function is invariant under swapping
    x with a fresh generic point; its singleton atoms then merge into the
    cofinite cores.  The merged map is checked to re-expand to the
    original one, so the rewrite is exact, not heuristic."""
    def mentioned(values):
        out = set()
        for s in values:
            for f, _ in s:
                if f.kind == "points":
                    out |= f.base.points
        return out

    values = atom_values
    changed = True
    while changed:
        changed = False
        for x in sorted(mentioned(values)):
            rest = mentioned(values) - {x}
            merged = {}
            ok = True
            for s, v in values.items():
                image = _absorb_point(backend, s, x, rest)
                if image is None:
                    ok = False
                    break
                if image in merged and merged[image] != v:
                    ok = False
                    break
                merged[image] = v
            if not ok:
                continue
            ma, mb = _common_atoms(backend, [merged, dict(values)])
            if ma == mb:
                values = merged
                changed = True
                break
    return values


def _absorb_point(backend, stratum, x, rest):
    """Stratum with the point x merged into the generic cofinite cores
    over the remaining mentioned set; None when the merge is ill-formed."""
    parts = {}
    for f, m in stratum:
        if f.kind == "points" and x in f.base.points:
            if f.base.cofinite:
                nf = IndecFamily.of_points(
                    f.degree, P1Set.cofinite_of(f.base.points - {x}))
            else:
                nf = IndecFamily.of_points(f.degree, P1Set.cofinite_of(rest))
        else:
            nf = f
        parts[nf] = parts.get(nf, 0) + m
    try:
        return make_stratum(backend, parts.items())
    except ValueError:
        return None


def add(backend, f, g, scale_g=Fraction(1)):
    _check_same(backend, f, g)
    mf, mg = _common_atoms(backend, [_atom_map(backend, f), _atom_map(backend, g)])
    for s, v in mg.items():
        mf[s] = mf.get(s, Fraction(0)) + scale_g * v
    return _canonical(backend, mf)


def scale(backend, f, c):
    c = Fraction(c)
    return _canonical(backend, {s: c * v for s, v in _atom_map(backend, f).items()})


def subtract(backend, f, g):
    return add(backend, f, g, Fraction(-1))


def equal(backend, f, g):
    return subtract(backend, f, g).is_zero()


def evaluate(f, cls):
    """Value of the constructible function at an isomorphism class."""
    total = Fraction(0)
    for cset, coeff in f.terms:
        if cset.contains(cls):
            total += coeff
    return total


def is_indec_supported(f):
    return all(stratum_gamma(s) == 1 for cset, _ in f.terms for s in cset.strata)


def _check_same(backend, *elements):
    for e in elements:
        if e.backend_name != backend.name:
            raise BackendMismatchError(
                f"element over {e.backend_name!r} used with backend {backend.name!r}")


# ---------------------------------------------------------------------------
# convolution

def convolve(engine, f, g):
    """Convolution product f * g."""
    backend = engine.backend
    _check_same(backend, f, g)
    if backend.kind == quiver.KIND_P1:
        from . import p1
        return p1.convolve_family(engine, f, g)
    acc = {}
    fvals = _class_values(backend, f)
    gvals = _class_values(backend, g)
    for x, vx in fvals.items():
        for z, vz in gvals.items():
            w = vx * vz
            for y in engine.candidate_targets(x, z):
                c = engine.euler_constant(x, z, y)
                if c:
                    acc[y] = acc.get(y, Fraction(0)) + w * c
    return from_class_values(backend, acc)


def _class_values(backend, f):
    out = {}
    for cset, coeff in f.terms:
        for cls in cset.members(backend):
            out[cls] = out.get(cls, Fraction(0)) + coeff
    return {k: v for k, v in out.items() if v}


def from_class_values(backend, values):
    return _canonical(backend, {
        class_stratum(backend, cls): v for cls, v in values.items() if v})


def convolution_power(engine, cset, k):
    """k-th convolution power of 1_O for a single indecomposable family O.
    Asserts the leading-term shape: k! on the k-fold sum of O, all other
    terms of strictly smaller summand count."""
    backend = engine.backend
    if isinstance(cset, ConstructibleSet):
        cset = normalize(backend, cset.strata)
    else:
        cset = normalize(backend, cset)
    if len(cset.strata) != 1 or len(cset.strata[0]) != 1 or cset.strata[0][0][1] != 1:
        raise ValueError("power needs a single indecomposable family")
    if k < 1:
        raise ValueError("power exponent must be >= 1")
    fam = cset.strata[0][0][0]
    base = char_fn(backend, cset)
    result = base
    for _ in range(k - 1):
        result = convolve(engine, result, base)
    _assert_power_shape(engine, result, fam, k)
    return result


def _assert_power_shape(engine, result, fam, k):
    import math
    backend = engine.backend
    expected = char_fn(backend, [make_stratum(backend, [(fam, k)])])
    rest = add(backend, result, scale(backend, expected, math.factorial(k)),
               Fraction(-1))
    if rest.summand_count() >= k:
        raise InternalInvariantError(
            f"power of an indecomposable family is not {k}!·1_(k·O) + lower terms")


def lie_bracket(engine, f, g):
    backend = engine.backend
    return subtract(backend, convolve(engine, f, g), convolve(engine, g, f))


# ---------------------------------------------------------------------------
# serialization

def family_to_json(backend, fam):
    if fam.kind == "labels":
        return {"labels": [quiver.label_name(backend, l) for l in fam.labels]}
    return {"degree": fam.degree,
            "base": {"kind": "cofinite" if fam.base.cofinite else "finite",
                     "points": sorted(fam.base.points)}}


def set_to_json(backend, cset):
    return {"strata": [[[family_to_json(backend, f), m] for f, m in s]
                       for s in cset.strata]}


def element_to_json(backend, f):
    return {"backend": backend.name,
            "terms": [{"coeff": str(c), "set": set_to_json(backend, s)}
                      for s, c in f.terms]}


def element_to_text(backend, f):
    if f.is_zero():
        return "0"
    bits = []
    for cset, c in f.terms:
        strata_txt = " u ".join(_stratum_text(backend, s) for s in cset.strata)
        bits.append(f"({c})*1_{{{strata_txt}}}")
    return " + ".join(bits)


def _stratum_text(backend, s):
    if not s:
        return "[0]"
    parts = []
    for f, m in s:
        if f.kind == "labels":
            body = "{" + ",".join(quiver.label_name(backend, l)
                                  for l in f.labels) + "}"
        else:
            b = f.base
            body = (f"O{f.degree}" +
                    ("\\" + "{" + ",".join(sorted(b.points)) + "}"
                     if b.cofinite and b.points else
                     ("" if b.cofinite else "{" + ",".join(sorted(b.points)) + "}")))
        parts.append(body if m == 1 else f"{m}.{body}")
    return "+".join(parts)


def canonical_json(backend, f):
    return json.dumps(element_to_json(backend, f), sort_keys=True,
                      separators=(",", ":"))
