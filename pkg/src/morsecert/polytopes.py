"""Right-angled polytope combinatorics: facets, adjacency, cliques, duals.

The 6-polytope with 27 facets is built from a hard-coded table of integer
Lorentzian normal vectors and cross-validated against an independent labelling
rule; any disagreement aborts, since transcription errors are the dominant
risk.  Faces are realised as cliques of the facet adjacency graph (the flag
property is asserted by `f_vector_check`, not assumed silently).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple

from . import labels as lb
from .complexes import SimplicialComplex
from .errors import InputError, StructuralError

# One row per facet: (label, Lorentzian unit normal in 7 integer coordinates).
TABLE_G6: Tuple[Tuple[str, Tuple[int, ...]], ...] = (
    ("A", (0, 0, 0, 0, 0, -1, 0)),
    ("1+i+j+k", (0, 0, 0, 0, -1, 0, 0)),
    ("-1-i-j-k", (1, 1, 1, 1, 1, 0, 2)),
    ("1+i-j-k", (1, 1, 0, 0, 0, 0, 1)),
    ("1-i+j-k", (1, 0, 1, 0, 0, 0, 1)),
    ("1-i-j+k", (1, 0, 0, 1, 0, 0, 1)),
    ("1-i-j-k", (1, 0, 0, 0, 1, 0, 1)),
    ("-1+i+j-k", (0, 1, 1, 0, 0, 0, 1)),
    ("-1+i-j+k", (0, 1, 0, 1, 0, 0, 1)),
    ("-1+i-j-k", (0, 1, 0, 0, 1, 0, 1)),
    ("-1-i+j+k", (0, 0, 1, 1, 0, 0, 1)),
    ("-1-i+j-k", (0, 0, 1, 0, 1, 0, 1)),
    ("-1-i-j+k", (0, 0, 0, 1, 1, 0, 1)),
    ("-1+i+j+k", (-1, 0, 0, 0, 0, 0, 0)),
    ("1-i+j+k", (0, -1, 0, 0, 0, 0, 0)),
    ("1+i-j+k", (0, 0, -1, 0, 0, 0, 0)),
    ("1+i+j-k", (0, 0, 0, -1, 0, 0, 0)),
    ("1", (1, 0, 0, 0, 0, 1, 1)),
    ("-1", (0, 1, 1, 1, 1, 1, 2)),
    ("i", (0, 1, 0, 0, 0, 1, 1)),
    ("-i", (1, 0, 1, 1, 1, 1, 2)),
    ("j", (0, 0, 1, 0, 0, 1, 1)),
    ("-j", (1, 1, 0, 1, 1, 1, 2)),
    ("k", (0, 0, 0, 1, 0, 1, 1)),
    ("-k", (1, 1, 1, 0, 1, 1, 2)),
    ("C", (0, 0, 0, 0, 1, 1, 1)),
    ("B", (1, 1, 1, 1, 0, 1, 2)),
)


def lorentz_product(u: Sequence[int], v: Sequence[int]) -> int:
    """Signature (+,+,+,+,+,+,-) product, exact integer arithmetic."""
    return sum(a * b for a, b in zip(u[:-1], v[:-1])) - u[-1] * v[-1]


def adjacency_from_lorentz(vectors: Sequence[Sequence[int]]):
    """Pairs (i, j) with zero Lorentzian product; vectors must be unit."""
    for row, v in enumerate(vectors):
        if len(v) != 7:
            raise InputError(f"row {row}: expected 7 coordinates, got {len(v)}")
        if lorentz_product(v, v) != 1:
            raise InputError(
                f"row {row}: vector {tuple(v)!r} has self-product "
                f"{lorentz_product(v, v)}, expected 1"
            )
    pairs = set()
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            if lorentz_product(vectors[i], vectors[j]) == 0:
                pairs.add(frozenset((i, j)))
    return pairs


@dataclass(frozen=True)
class Facet:
    id: str
    label: str
    vector: Optional[Tuple[int, ...]] = None


@dataclass(frozen=True)
class IdealVertex:
    id: str
    label: str
    incident: FrozenSet[str]


@dataclass(frozen=True)
class FaceHandle:
    """A face of the polytope, identified by its set of defining facets.

    The empty set denotes the polytope itself; codimension = |defining|.
    """

    defining: FrozenSet[str]

    @property
    def codim(self) -> int:
        return len(self.defining)

    def sorted_ids(self) -> Tuple[str, ...]:
        return tuple(sorted(self.defining))


class Polytope:
    """Combinatorial right-angled polytope: facets plus adjacency relation.

    Immutable by convention.  Ideal vertices are stored as incidence data and
    are never faces.
    """

    def __init__(
        self,
        dimension: int,
        facets: Sequence[Facet],
        adjacency: Iterable[FrozenSet[str]],
        ideal_vertices: Sequence[IdealVertex] = (),
        moves_hint=None,
        name: str = "",
    ):
        self.dimension = dimension
        self.facets = tuple(facets)
        self.name = name
        self.facet_ids = tuple(f.id for f in self.facets)
        if len(set(self.facet_ids)) != len(self.facet_ids):
            raise InputError("duplicate facet ids")
        self.index = {fid: i for i, fid in enumerate(self.facet_ids)}
        pairs = set()
        for pair in adjacency:
            a, b = sorted(pair)
            if a == b:
                raise InputError(f"adjacency must be irreflexive: {a!r}")
            if a not in self.index or b not in self.index:
                raise InputError(f"adjacency names unknown facet in {(a, b)!r}")
            pairs.add(frozenset((a, b)))
        self.adjacency_pairs = frozenset(pairs)
        masks = [0] * len(self.facets)
        for pair in pairs:
            a, b = sorted(pair)
            ia, ib = self.index[a], self.index[b]
            masks[ia] |= 1 << ib
            masks[ib] |= 1 << ia
        self._nbr_mask = tuple(masks)
        self.ideal_vertices = tuple(ideal_vertices)
        for iv in self.ideal_vertices:
            unknown = iv.incident - set(self.facet_ids)
            if unknown:
                raise InputError(f"ideal vertex {iv.id!r} lists unknown facets")
        self.moves_hint = moves_hint
        self._dual_cache: dict = {}
        self._face_cache: dict = {}

    def __repr__(self):
        return (
            f"Polytope({self.name or 'unnamed'}, dim {self.dimension}, "
            f"{len(self.facets)} facets)"
        )

    def adjacent(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self.adjacency_pairs

    def neighbors(self, a: str) -> Tuple[str, ...]:
        m = self._nbr_mask[self.index[a]]
        return tuple(self.facet_ids[i] for i in range(len(self.facet_ids)) if m >> i & 1)

    def degree(self, a: str) -> int:
        return bin(self._nbr_mask[self.index[a]]).count("1")

    def face(self, defining: Iterable[str]) -> FaceHandle:
        ids = frozenset(defining)
        unknown = ids - set(self.facet_ids)
        if unknown:
            raise InputError(f"unknown facets: {sorted(unknown)!r}")
        for a in ids:
            for b in ids:
                if a < b and not self.adjacent(a, b):
                    raise InputError(
                        f"defining facets must be pairwise adjacent: {a!r}, {b!r}"
                    )
        return FaceHandle(ids)

    def ideal_vertex(self, iv_id: str) -> IdealVertex:
        for iv in self.ideal_vertices:
            if iv.id == iv_id:
                return iv
        raise InputError(f"unknown ideal vertex {iv_id!r}")

    # -- clique machinery ---------------------------------------------------

    def _cliques_of_size(self, k: int):
        n = len(self.facet_ids)
        if k == 0:
            yield ()
            return
        masks = self._nbr_mask

        def extend(clique: tuple, allowed: int, start: int):
            if len(clique) == k:
                yield clique
                return
            for i in range(start, n):
                if allowed >> i & 1:
                    yield from extend(clique + (i,), allowed & masks[i], i + 1)

        yield from extend((), (1 << n) - 1, 0)

    def clique_count(self, k: int) -> int:
        return sum(1 for _ in self._cliques_of_size(k))


def enumerate_faces(P: Polytope, codim: int) -> Tuple[FaceHandle, ...]:
    """All codim-`codim` faces of P, realised as cliques, in canonical order."""
    if codim < 0 or codim > P.dimension:
        raise InputError(f"codim must be in 0..{P.dimension}")
    cached = P._face_cache.get(codim)
    if cached is not None:
        return cached
    handles = [
        FaceHandle(frozenset(P.facet_ids[i] for i in c))
        for c in P._cliques_of_size(codim)
    ]
    handles.sort(key=lambda h: h.sorted_ids())
    out = tuple(handles)
    P._face_cache[codim] = out
    return out


def dual_complex(P: Polytope, F: FaceHandle) -> SimplicialComplex:
    """Clique complex on the facets adjacent to every defining facet of F.

    For F = P (empty handle) this is the full dual boundary complex; vertex
    labels are the originating facet ids.
    """
    cached = P._dual_cache.get(F.defining)
    if cached is not None:
        return cached
    n = len(P.facet_ids)
    allowed = (1 << n) - 1
    for fid in F.defining:
        allowed &= P._nbr_mask[P.index[fid]]
    members = [i for i in range(n) if allowed >> i & 1]
    if not members:
        return SimplicialComplex([])
    # maximal cliques of the induced subgraph (Bron-Kerbosch with pivot)
    masks = P._nbr_mask
    maximal = []

    def bk(r: int, p: int, x: int):
        if p == 0 and x == 0:
            maximal.append(r)
            return
        pivot_pool = p | x
        pivot = (pivot_pool & -pivot_pool).bit_length() - 1
        best, best_mask = -1, 0
        pool = pivot_pool
        while pool:
            v = (pool & -pool).bit_length() - 1
            pool &= pool - 1
            deg = bin(p & masks[v]).count("1")
            if deg > best:
                best, best_mask = deg, masks[v]
                pivot = v
        cand = p & ~best_mask
        while cand:
            v = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            bk(r | (1 << v), p & masks[v], x & masks[v])
            p &= ~(1 << v)
            x |= 1 << v

    bk(0, allowed, 0)
    faces = [
        frozenset(P.facet_ids[i] for i in range(n) if m >> i & 1) for m in maximal
    ]
    out = SimplicialComplex(faces, _trusted=True)
    P._dual_cache[F.defining] = out
    return out


@dataclass(frozen=True)
class FVectorReport:
    clique_counts: Tuple[int, ...]  # counts of cliques of size 1..len
    degrees: Tuple[int, ...]
    checks: Tuple[str, ...]
    passed: bool


def f_vector_check(
    P: Polytope,
    expected_counts: Optional[Mapping[int, int]] = None,
    expected_degree: Optional[int] = None,
) -> FVectorReport:
    """Census of clique counts by size, checked against declared expectations.

    Always asserts there is no clique of size dimension+1 (the clique model
    of faces would otherwise be broken) and aborts on failure.
    """
    counts = tuple(P.clique_count(k) for k in range(1, P.dimension + 2))
    degrees = tuple(P.degree(f) for f in P.facet_ids)
    checks = []
    failed = []

    def check(cond: bool, text: str):
        checks.append(("PASS " if cond else "FAIL ") + text)
        if not cond:
            failed.append(text)

    check(counts[P.dimension] == 0,
          f"no cliques of size {P.dimension + 1} (got {counts[P.dimension]})")
    if expected_counts:
        for size, want in sorted(expected_counts.items()):
            got = counts[size - 1] if size - 1 < len(counts) else P.clique_count(size)
            check(got == want, f"cliques of size {size}: {got} == {want}")
    if expected_degree is not None:
        check(all(d == expected_degree for d in degrees),
              f"uniform facet degree {expected_degree}")
    report = FVectorReport(counts, degrees, tuple(checks), not failed)
    if failed:
        raise StructuralError("face census failed: " + "; ".join(failed))
    return report


# ---------------------------------------------------------------------------
# The 6-polytope with 27 facets


def _validate_p6(P: Polytope):
    def rule(cond: bool, text: str):
        if not cond:
            raise StructuralError(f"labelling rule violated: {text}")

    for a in ("A", "B", "C"):
        for b in ("A", "B", "C"):
            if a < b:
                rule(not P.adjacent(a, b), f"{a} and {b} must be disjoint")
    for a in lb.T24_LABELS:
        for b in lb.T24_LABELS:
            if a < b:
                want = lb.t24_adjacent(a, b)
                rule(
                    P.adjacent(a, b) == want,
                    f"{a}, {b}: vector adjacency {P.adjacent(a, b)} vs "
                    f"4-product rule {want}",
                )
    rule(
        set(P.neighbors("A")) == set(lb.SIGN_LABELS),
        "A adjacent to exactly the sixteen sign-labelled facets",
    )
    for special, parity in (("B", 0), ("C", 1)):
        want = set(lb.UNIT_LABELS) | {
            t for t in lb.SIGN_LABELS if lb.minus_count(t) % 2 == parity
        }
        rule(
            set(P.neighbors(special)) == want,
            f"{special} adjacent to units and sign labels of parity {parity}",
        )
    for iv in P.ideal_vertices:
        rule(len(iv.incident) == 10, f"ideal vertex {iv.id} has 10 incident facets")
        opposed = iv.label
        closed = {opposed} | set(P.neighbors(opposed))
        rule(
            iv.incident == frozenset(P.facet_ids) - closed,
            f"ideal vertex {iv.id} incident exactly to non-neighbours of {opposed}",
        )


def build_p6() -> Polytope:
    """The right-angled hyperbolic 6-polytope with 27 facets.

    Facet normals are the hard-coded integer vectors; adjacency is zero
    Lorentzian product, cross-validated against the quaternion labelling
    rules.  One ideal vertex opposes each facet, incident to the 10 facets
    neither equal nor adjacent to it.
    """
    labels_ = [row[0] for row in TABLE_G6]
    vectors = [row[1] for row in TABLE_G6]
    pairs_idx = adjacency_from_lorentz(vectors)
    pairs = {
        frozenset((labels_[i], labels_[j])) for i, j in map(sorted, pairs_idx)
    }
    facets = [Facet(lbl, lbl, vec) for lbl, vec in TABLE_G6]
    prelim = Polytope(6, facets, pairs, name="P6")
    ideal = []
    for lbl in labels_:
        closed = {lbl} | set(prelim.neighbors(lbl))
        inc = frozenset(set(labels_) - closed)
        ideal.append(IdealVertex(f"cusp:{lbl}", lbl, inc))
    P = Polytope(6, facets, pairs, ideal, name="P6")
    _validate_p6(P)
    return P


def build_p5(p6: Optional[Polytope] = None) -> Polytope:
    """The 5-polytope with 16 facets, realised as the neighbours of facet A.

    Induced adjacency is cross-validated against the sign-vector model (even
    sign patterns; adjacency iff the 4-dot product of labels is non-negative).
    Ideal vertices carry unit and B/C labels; a facet is incident to an ideal
    vertex iff the two labels are adjacent in the ambient 6-polytope.
    """
    if p6 is None:
        p6 = build_p6()
    ids = sorted(lb.SIGN_LABELS)
    facets = [Facet(t, t, None) for t in ids]
    pairs = set()
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            if p6.adjacent(a, b):
                pairs.add(frozenset((a, b)))
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            induced = frozenset((a, b)) in pairs
            model = lb.t24_adjacent(a, b)
            if induced != model:
                raise StructuralError(
                    f"sign-vector cross-validation failed on ({a}, {b})"
                )
    ideal = []
    for q in lb.UNIT_LABELS:
        inc = frozenset(t for t in ids if lb.t24_adjacent(t, q))
        ideal.append(IdealVertex(f"cusp:{q}", q, inc))
    for special, parity in (("B", 0), ("C", 1)):
        inc = frozenset(t for t in ids if lb.minus_count(t) % 2 == parity)
        ideal.append(IdealVertex(f"cusp:{special}", special, inc))
    for iv in ideal:
        if len(iv.incident) != 8:
            raise StructuralError(
                f"ideal vertex {iv.id} of P5 has {len(iv.incident)} incident facets"
            )
    return Polytope(5, facets, pairs, ideal, name="P5")


def build_cusp_section(P: Polytope, cusp_id: str):
    """Horospherical section at an ideal vertex: a combinatorial cube.

    Returns (H, correspondence); H's facets keep the ids of the incident
    facets of the cusp, so the correspondence is the identity on ids.  The
    induced adjacency must split the facets into dimension-1 opposite pairs,
    two facets being adjacent iff they lie in different pairs.
    """
    if not P.ideal_vertices:
        raise InputError("polytope carries no ideal vertex data")
    iv = P.ideal_vertex(cusp_id)
    ids = sorted(iv.incident)
    dim = P.dimension - 1
    if len(ids) != 2 * dim:
        raise StructuralError(
            f"cusp {cusp_id}: {len(ids)} incident facets, expected {2 * dim}"
        )
    opposite = {}
    for a in ids:
        non = [b for b in ids if b != a and not P.adjacent(a, b)]
        if len(non) != 1:
            raise StructuralError(
                f"cusp {cusp_id}: facet {a} has {len(non)} non-neighbours in the "
                "section, expected exactly 1 (cube structure)"
            )
        opposite[a] = non[0]
    for a in ids:
        if opposite[opposite[a]] != a:
            raise StructuralError(f"cusp {cusp_id}: opposition is not an involution")
    pairs = {
        frozenset((a, b))
        for i, a in enumerate(ids)
        for b in ids[i + 1:]
        if P.adjacent(a, b)
    }
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            if (frozenset((a, b)) in pairs) != (opposite[a] != b):
                raise StructuralError(
                    f"cusp {cusp_id}: adjacency of ({a}, {b}) inconsistent with "
                    "pair structure"
                )
    facets = [Facet(a, a, None) for a in ids]
    H = Polytope(dim, facets, pairs, name=f"{P.name}/{cusp_id}")
    correspondence = {a: a for a in ids}
    return H, correspondence


# ---------------------------------------------------------------------------
# Symmetries


@dataclass(frozen=True)
class FacetSymmetry:
    name: str
    mapping: Tuple[Tuple[str, str], ...]

    def as_dict(self) -> Dict[str, str]:
        return dict(self.mapping)


def symmetries_p6(P: Optional[Polytope] = None) -> Tuple[FacetSymmetry, ...]:
    """The 16 facet permutations: unit left multiplications and the involution.

    Each is validated to preserve adjacency, to preserve the move partition
    (unit-class preimages and {A, B, C}), and to commute with the unit-class
    map.  Any failure aborts.
    """
    if P is None:
        P = build_p6()

    def phi(q: str, use_iota: bool):
        out = {}
        for t in lb.T24_LABELS:
            u = lb.iota_label(t) if use_iota else t
            out[t] = lb.quat_label(lb.quat_mul(lb.label_quat(q), lb.label_quat(u)))
        out["A"] = "A"
        out["B"], out["C"] = ("C", "B") if use_iota else ("B", "C")
        return out

    syms = []
    for use_iota in (False, True):
        for q in lb.UNIT_LABELS:
            name = f"mult:{q}" + ("*iota" if use_iota else "")
            mapping = phi(q, use_iota)
            syms.append(
                FacetSymmetry(name, tuple(sorted(mapping.items(), key=lambda kv: kv[0])))
            )
    if len({s.mapping for s in syms}) != 16:
        raise StructuralError("symmetry group does not have 16 distinct elements")
    for s in syms:
        m = s.as_dict()
        if sorted(m.values()) != sorted(P.facet_ids):
            raise StructuralError(f"{s.name} is not a permutation")
        for pair in P.adjacency_pairs:
            a, b = sorted(pair)
            if not P.adjacent(m[a], m[b]):
                raise StructuralError(f"{s.name} does not preserve adjacency")
        # move partition: unit-class pairs {q, -q} and the ABC block
        def block_tag(fid: str) -> str:
            if fid in ("A", "B", "C"):
                return "ABC"
            return lb.base_unit(fid).lstrip("-")

        blocks = {}
        for t in lb.T24_LABELS + lb.SPECIAL_LABELS:
            blocks.setdefault(block_tag(t), set()).add(t)
        image_blocks = {frozenset(m[t] for t in blk) for blk in blocks.values()}
        if image_blocks != {frozenset(b) for b in blocks.values()}:
            raise StructuralError(f"{s.name} does not preserve the move partition")
        # equivariance of the unit-class map
        use_iota = s.name.endswith("*iota")
        q = s.name.split(":")[1].split("*")[0]
        for t in lb.T24_LABELS:
            r = lb.base_unit(t)
            r_img = lb.iota_label(r) if use_iota else r
            want = lb.quat_label(lb.quat_mul(lb.label_quat(q), lb.label_quat(r_img)))
            if lb.base_unit(m[t]) != want:
                raise StructuralError(f"{s.name} breaks unit-class equivariance at {t}")
    return tuple(syms)
