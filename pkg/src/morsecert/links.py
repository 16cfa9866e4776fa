"""Dual-cube models of the lifted circle-valued function, link computations,
and the per-face verdicts (Regular / Critical / Unknown).

The increment at a barycentre is kept symbolic: a lift value is a pair
(base, depth) ordered lexicographically, valid for every sufficiently small
positive increment.  Faces of a k-cube are encoded as partial bit
assignments packed into ints: (fixed_mask << k) | fixed_bits, so the cube
itself is mask 0 and vertices have full mask.  Face f1 is contained in f2
iff fixed(f2) is a sub-assignment of fixed(f1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import total_ordering
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .complexes import (
    CollapseOutcome,
    SimplicialComplex,
    barycentric_subdivision,
    full_subcomplex,
    order_complex,
    try_collapse,
)
from .errors import InputError, InternalError
from .polytopes import FaceHandle, Polytope, build_cusp_section, dual_complex, enumerate_faces
from .states import (
    IN,
    OUT,
    LegalityRecord,
    MoveSystem,
    State,
    bad_face_signature,
    inherited_state,
    is_compatible,
    is_good_face,
    legality,
)


@total_ordering
@dataclass(frozen=True)
class LiftValue:
    """Symbolic lift value base + depth*eps, ordered lexicographically."""

    base: int
    depth: int

    def __lt__(self, other: "LiftValue") -> bool:
        return (self.base, self.depth) < (other.base, other.depth)

    def __add__(self, other: "LiftValue") -> "LiftValue":
        return LiftValue(self.base + other.base, self.depth + other.depth)


# -- face encoding ----------------------------------------------------------


def face_int(k: int, mask: int, bits: int) -> int:
    if bits & ~mask:
        raise InputError("fixed bits outside fixed mask")
    return (mask << k) | bits


def face_parts(k: int, fid: int) -> Tuple[int, int]:
    return fid >> k, fid & ((1 << k) - 1)


def face_contains(k: int, f1: int, f2: int) -> bool:
    """True iff face f1 is contained in face f2 (f2 fixes fewer coordinates)."""
    m1, b1 = face_parts(k, f1)
    m2, b2 = face_parts(k, f2)
    return (m1 & m2) == m2 and (b1 & m2) == b2


def face_dim(k: int, fid: int) -> int:
    return k - bin(fid >> k).count("1")


@dataclass(frozen=True)
class CubeLift:
    """Pure lift data for a combinatorial k-cube.

    `blocks` partitions the coordinate positions by move; `vertex_lift` holds
    the normalised integer lift at each of the 2^k vertices (minimum 0).
    """

    k: int
    blocks: Tuple[Tuple[int, ...], ...]
    vertex_lift: Tuple[int, ...]

    def lift_of_face(self, fid: int) -> LiftValue:
        mask, bits = face_parts(self.k, fid)
        free = ((1 << self.k) - 1) & ~mask
        best = None
        sub = free
        while True:
            v = self.vertex_lift[bits | sub]
            if best is None or v < best:
                best = v
            if sub == 0:
                break
            sub = (sub - 1) & free
        return LiftValue(best, self.k - bin(mask).count("1"))

    def top_value(self) -> LiftValue:
        return LiftValue(0, self.k)

    def proper_faces(self) -> List[int]:
        out = []
        for mask in range(1, 1 << self.k):
            sub = mask
            while True:
                out.append(face_int(self.k, mask, sub))
                if sub == 0:
                    break
                sub = (sub - 1) & mask
        return out

    def monochromatic_factor_mins(self, fid: int) -> Tuple[bool, ...]:
        """Per block: does the face attain that factor's minimum lift?

        Factor lift of block B at vertex w depends only on w's bits in B;
        the face attains the factor minimum iff some allowed assignment of
        the block bits achieves it.
        """
        mask, bits = face_parts(self.k, fid)
        out = []
        for block in self.blocks:
            bmask = 0
            for p in block:
                bmask |= 1 << p
            free_in_block = bmask & ~mask
            # factor values: vary only this block's bits, other blocks pinned
            # at the base vertex; the pinned offset cancels in the comparison
            base_val = {}
            x = 0
            while True:
                base_val[x] = self.vertex_lift[x]
                if x == bmask:
                    break
                x = ((x | ~bmask) + 1) & bmask
            factor_min = min(base_val.values())
            sub = free_in_block
            best = None
            while True:
                x = (bits & bmask) | sub
                v = base_val[x]
                if best is None or v < best:
                    best = v
                if sub == 0:
                    break
                sub = (sub - 1) & free_in_block
            out.append(best == factor_min)
        return tuple(out)


@dataclass(frozen=True)
class CubeModel:
    """Dual cube of a polytope face with its lifted-function data.

    `defining` lists the defining facets in canonical order (one cube
    coordinate each); vertex w of the cube is the copy reached by crossing
    the facets indexed by the bits of w.
    """

    defining: Tuple[str, ...]
    lift: CubeLift
    base_status_out: Tuple[bool, ...]
    polytope: Polytope = field(compare=False, repr=False)
    moves: MoveSystem = field(compare=False, repr=False)
    base_state: State = field(compare=False, repr=False)

    @property
    def k(self) -> int:
        return self.lift.k

    def status_at(self, w: int, position: int) -> str:
        """Status of defining facet `position` at cube vertex w."""
        flips = 0
        my_block = self.moves.block_of(self.defining[position])
        for j in range(self.k):
            if w >> j & 1 and self.moves.block_of(self.defining[j]) == my_block:
                flips ^= 1
        base = OUT if self.base_status_out[position] else IN
        if flips:
            return IN if base == OUT else OUT
        return base

    def vertex_state(self, w: int) -> State:
        """Full polytope state at the copy corresponding to cube vertex w."""
        s = self.base_state
        in_set = set(s.in_facets)
        for j in range(self.k):
            if w >> j & 1:
                in_set ^= self.moves.block(self.defining[j])
        return State(s.universe, frozenset(in_set))

    def vertex_states(self) -> Dict[int, State]:
        return {w: self.vertex_state(w) for w in range(1 << self.k)}


def build_cube_model(P: Polytope, m: MoveSystem, s: State, F: FaceHandle) -> CubeModel:
    """Vertex states by move-flipping, edge orientations from statuses, lift
    values by integrating orientations and normalising the minimum to zero.

    Requires a compatible state; an inconsistent edge orientation cocycle is
    impossible for compatible states and raises InternalError.
    """
    ok, witness = is_compatible(P, m, s)
    if not ok:
        raise InputError(f"state is not compatible: witness pair {witness!r}")
    defining = tuple(sorted(F.defining))
    k = len(defining)
    blocks_by_move: Dict[int, list] = {}
    for pos, fid in enumerate(defining):
        blocks_by_move.setdefault(m.block_of(fid), []).append(pos)
    blocks = tuple(
        tuple(sorted(ps))
        for _, ps in sorted(blocks_by_move.items(), key=lambda kv: min(kv[1]))
    )
    base_out = tuple(s.status(fid) == OUT for fid in defining)

    def status_out_at(w: int, pos: int) -> bool:
        flips = 0
        my_block = m.block_of(defining[pos])
        for j in range(k):
            if w >> j & 1 and m.block_of(defining[j]) == my_block:
                flips ^= 1
        return base_out[pos] ^ bool(flips)

    n = 1 << k
    lift = [None] * n
    lift[0] = 0
    queue = [0]
    while queue:
        w = queue.pop()
        for pos in range(k):
            v = w ^ (1 << pos)
            low = w if not w >> pos & 1 else v
            # the edge points from low to high iff the facet's status at the
            # low end is Out; the lift rises by 1 along the orientation
            step = 1 if status_out_at(low, pos) else -1
            val = lift[w] + step if w == low else lift[w] - step
            if lift[v] is None:
                lift[v] = val
                queue.append(v)
            elif lift[v] != val:
                raise InternalError(
                    "edge orientation cocycle violated for a compatible state"
                )
    lo = min(lift)
    vertex_lift = tuple(x - lo for x in lift)
    return CubeModel(
        defining=defining,
        lift=CubeLift(k, blocks, vertex_lift),
        base_status_out=base_out,
        polytope=P,
        moves=m,
        base_state=s,
    )


# -- face links (the literal oracle) ----------------------------------------


def face_links_oracle(model: CubeModel | CubeLift):
    """Ascending and descending face links as full subcomplexes of the
    barycentric subdivision of the cube's boundary.

    A proper face's barycentre is ascending iff its lift value exceeds the
    top barycentre's, i.e. iff the face misses every minimum vertex.
    """
    lift = model.lift if isinstance(model, CubeModel) else model
    if lift.k < 1:
        raise InputError("cube dimension must be >= 1")
    asc, desc = [], []
    for fid in lift.proper_faces():
        if lift.lift_of_face(fid).base > 0:
            asc.append(fid)
        else:
            desc.append(fid)
    le = lambda a, b: face_contains(lift.k, a, b)
    return order_complex(asc, le), order_complex(desc, le)


def coface_links_fast(P: Polytope, m: MoveSystem, s: State, F: FaceHandle):
    """Ascending and descending coface links from the inherited state.

    Ascending: barycentric subdivision of the Out part of the dual complex.
    Descending: full subcomplex of the subdivided dual spanned by barycentres
    of simplices meeting at least one In vertex.
    """
    D = dual_complex(P, F)
    if D.is_empty:
        return SimplicialComplex([]), SimplicialComplex([])
    inh = inherited_state(P, m, s, F)
    out_ids = [v for v in D.vertices if not inh.is_in(v)]
    in_ids = frozenset(v for v in D.vertices if inh.is_in(v))
    if out_ids:
        asc = barycentric_subdivision(full_subcomplex(D, out_ids))
    else:
        asc = SimplicialComplex([])
    sd = barycentric_subdivision(D)
    meet_in = [v for v in sd.vertices if v & in_ids]
    desc = full_subcomplex(sd, meet_in) if meet_in else SimplicialComplex([])
    return asc, desc


def coface_membership_oracle(
    P: Polytope, m: MoveSystem, s: State, F: FaceHandle, F_prime: FaceHandle
) -> bool:
    """Ascending-membership of a coface barycentre, decided from the larger
    cube's lift: ascending iff the lift minimum is attained on the smaller
    cube (the face fixing the extra coordinates at the base copy)."""
    if not (F.defining < F_prime.defining):
        raise InputError("F' must have strictly more defining facets than F")
    model = build_cube_model(P, m, s, F_prime)
    mask = 0
    for pos, fid in enumerate(model.defining):
        if fid not in F.defining:
            mask |= 1 << pos
    return model.lift.lift_of_face(face_int(model.k, mask, 0)).base == 0


# -- canonical all-pairs cubes and their certificates ------------------------


def synthetic_pairs_lift(ell: int) -> CubeLift:
    """Canonical lift of a 2l-cube that is a product of l monochromatic
    squares on coordinate pairs (0,1), (2,3), ...; minima at pair-equal bits."""
    k = 2 * ell
    blocks = tuple((2 * i, 2 * i + 1) for i in range(ell))
    vertex_lift = tuple(
        sum(1 for i in range(ell) if (w >> (2 * i) & 1) != (w >> (2 * i + 1) & 1))
        for w in range(1 << k)
    )
    return CubeLift(k, blocks, vertex_lift)


def pairs_core_elements(ell: int, kind: str) -> List[int]:
    """Vertex set of the canonical core sphere inside the face link.

    Per coordinate pair the options are: both bits fixed equal (descending,
    the two minima) or fixed unequal (ascending, the two maxima), or left
    free; the all-free face (the cube itself) is excluded.
    """
    k = 2 * ell
    options = []
    for i in range(ell):
        a, b = 2 * i, 2 * i + 1
        m = (1 << a) | (1 << b)
        if kind == "desc":
            options.append(((m, 0), (m, m), (0, 0)))
        else:
            options.append(((m, 1 << a), (m, 1 << b), (0, 0)))
    out: List[int] = []

    def build(i: int, mask: int, bits: int):
        if i == ell:
            if mask:
                out.append(face_int(k, mask, bits))
            return
        for om, ob in options[i]:
            build(i + 1, mask | om, bits | ob)

    build(0, 0, 0)
    return out


def crosspolytope_face_map(ell: int, kind: str) -> Dict[int, FrozenSet[str]]:
    """Order-reversing bijection from core elements to the nonempty faces of
    the l-dimensional cross-polytope boundary (vertices u{i}+ / u{i}-).

    A free pair contributes nothing; a fixed pair contributes its vertex.
    Bigger core elements (more free pairs) map to smaller cross-polytope
    faces, so chains map to flags of the subdivided boundary.
    """
    k = 2 * ell
    out: Dict[int, FrozenSet[str]] = {}
    for fid in pairs_core_elements(ell, kind):
        mask, bits = face_parts(k, fid)
        verts = []
        for i in range(ell):
            a, b = 2 * i, 2 * i + 1
            m = (1 << a) | (1 << b)
            if mask & m:
                two = bits & m
                sign = "+" if two in (0, 1 << a) else "-"
                verts.append(f"u{i}{sign}")
        out[fid] = frozenset(verts)
    return out


@dataclass(frozen=True)
class CriticalCertificate:
    """Shared collapse certificates for the canonical all-pairs 2l-cube."""

    ell: int
    asc_outcome: CollapseOutcome
    desc_outcome: CollapseOutcome
    asc_target: SimplicialComplex
    desc_target: SimplicialComplex

    @property
    def index(self) -> int:
        return self.ell


class CriticalLinkCertifier:
    """Builds and caches, per pair count l, the relative collapses of the
    ascending and descending face links of the canonical all-pairs cube onto
    subdivided cross-polytope boundary cores."""

    def __init__(self, *, seed: int = 0, restarts: int = 64):
        self.seed = seed
        self.restarts = restarts
        self._cache: Dict[int, CriticalCertificate] = {}

    def certificate(self, ell: int) -> CriticalCertificate:
        got = self._cache.get(ell)
        if got is not None:
            return got
        lift = synthetic_pairs_lift(ell)
        asc, desc = face_links_oracle(lift)
        le = lambda a, b: face_contains(lift.k, a, b)
        asc_target = order_complex(pairs_core_elements(ell, "asc"), le)
        desc_target = order_complex(pairs_core_elements(ell, "desc"), le)
        for name, target, kind in (
            ("ascending", asc_target, "asc"),
            ("descending", desc_target, "desc"),
        ):
            fmap = crosspolytope_face_map(ell, kind)
            check_sd_crosspolytope_witness(target, fmap, ell, name)
        asc_out = try_collapse(asc, target=asc_target, seed=self.seed, restarts=self.restarts)
        desc_out = try_collapse(desc, target=desc_target, seed=self.seed, restarts=self.restarts)
        cert = CriticalCertificate(ell, asc_out, desc_out, asc_target, desc_target)
        self._cache[ell] = cert
        return cert


def check_sd_crosspolytope_witness(
    core: SimplicialComplex, fmap: Dict[int, FrozenSet[str]], ell: int, name: str
):
    """Validate that `core` is the subdivided cross-polytope boundary via the
    explicit order-reversing face map (the isomorphism witness)."""
    verts = set(core.vertices)
    if verts != set(fmap):
        raise InternalError(f"{name} core has unexpected vertex set")
    faces = set()
    for i in range(ell):
        faces.add(frozenset([f"u{i}+"]))
        faces.add(frozenset([f"u{i}-"]))
    # all nonempty faces of the cross-polytope: at most one vertex per pair
    images = set(fmap.values())
    want = set()

    def build(i: int, acc: frozenset):
        if i == ell:
            if acc:
                want.add(acc)
            return
        build(i + 1, acc)
        build(i + 1, acc | {f"u{i}+"})
        build(i + 1, acc | {f"u{i}-"})

    build(0, frozenset())
    if images != want:
        raise InternalError(f"{name} face map is not onto the cross-polytope faces")
    if len(fmap) != len(images):
        raise InternalError(f"{name} face map is not injective")
    for chain in core.maximal_faces:
        elems = sorted(chain, key=lambda f: len(fmap[f]), reverse=True)
        for a, b in zip(elems, elems[1:]):
            if not fmap[b] < fmap[a]:
                raise InternalError(f"{name} face map does not reverse a chain")


def canonical_pairs_transform(model: CubeModel):
    """Position permutation and translation mapping an all-pairs cube model
    onto the canonical synthetic one; validated over every vertex.

    Returns (ell, perm, delta) with perm[p] = canonical position of original
    position p and delta a vertex translation in canonical coordinates.
    """
    blocks = model.lift.blocks
    if any(len(b) != 2 for b in blocks):
        raise InputError("not an all-pairs cube")
    ell = len(blocks)
    k = 2 * ell
    perm = [0] * k
    delta = 0
    for i, (p, q) in enumerate(sorted(blocks, key=lambda b: b[0])):
        perm[p] = 2 * i
        perm[q] = 2 * i + 1
        if not model.base_status_out[p]:
            delta |= 1 << (2 * i)

    def apply_vertex(w: int) -> int:
        out = 0
        for p in range(k):
            if w >> p & 1:
                out |= 1 << perm[p]
        return out ^ delta

    synth = synthetic_pairs_lift(ell)
    for w in range(1 << k):
        if model.lift.vertex_lift[w] != synth.vertex_lift[apply_vertex(w)]:
            raise InternalError("all-pairs cube does not match the canonical lift")
    return ell, tuple(perm), delta


def apply_transform_to_face(k: int, perm: Sequence[int], delta: int, fid: int) -> int:
    mask, bits = face_parts(k, fid)
    pmask = pbits = 0
    for p in range(k):
        if mask >> p & 1:
            pmask |= 1 << perm[p]
        if bits >> p & 1:
            pbits |= 1 << perm[p]
    return face_int(k, pmask, pbits ^ (delta & pmask))


# -- link classification ------------------------------------------------------


@dataclass(frozen=True)
class LinkClassification:
    """Verdict for one (face, state) class with replayable evidence.

    branch: "good-face" | "inherited-totally-legal" | "critical-pairs" |
    "unknown"; path is "fast" for the first two and "oracle" for the third.
    """

    verdict: str  # "Regular" | "Critical" | "Unknown"
    index: Optional[int]
    branch: str
    path: str
    witness_move: Optional[int] = None
    legality: Optional[LegalityRecord] = None
    critical: Optional[CriticalCertificate] = field(default=None, repr=False)
    transform: Optional[Tuple[int, Tuple[int, ...], int]] = None
    note: str = ""

    @property
    def is_regular(self) -> bool:
        return self.verdict == "Regular"


def classify_link(
    P: Polytope,
    m: MoveSystem,
    s: State,
    F: FaceHandle,
    *,
    certifier: Optional[CriticalLinkCertifier] = None,
    collapse_cache: Optional[dict] = None,
    seed: int = 0,
    restarts: int = 64,
) -> LinkClassification:
    """Classify the links at the barycentre of the cube dual to F.

    Fast paths: a good face is Regular; a bad face whose inherited state is
    certified totally legal is Regular.  A bad face whose defining facets are
    partitioned into pairs by the moves, with codimension 2l equal to the
    polytope dimension, is Critical(l) via relative collapse of both face
    links onto subdivided cross-polytope cores.  Anything else is Unknown.
    """
    if is_good_face(m, F):
        counts: Dict[int, int] = {}
        for fid in F.defining:
            counts[m.block_of(fid)] = counts.get(m.block_of(fid), 0) + 1
        witness = min(b for b, c in counts.items() if c == 1)
        return LinkClassification(
            "Regular", None, "good-face", "fast", witness_move=witness
        )
    inh = inherited_state(P, m, s, F)
    rec = legality(
        P, F, inh, seed=seed, restarts=restarts, collapse_cache=collapse_cache
    )
    if rec.totally_legal:
        return LinkClassification(
            "Regular", None, "inherited-totally-legal", "fast", legality=rec
        )
    sig = bad_face_signature(m, F)
    if (
        sig
        and all(c == 2 for c in sig)
        and F.codim == 2 * len(sig) == P.dimension
    ):
        if certifier is None:
            certifier = CriticalLinkCertifier(seed=seed, restarts=restarts)
        model = build_cube_model(P, m, s, F)
        ell, perm, delta = canonical_pairs_transform(model)
        cert = certifier.certificate(ell)
        if cert.asc_outcome.success and cert.desc_outcome.success:
            return LinkClassification(
                "Critical",
                ell,
                "critical-pairs",
                "oracle",
                critical=cert,
                transform=(ell, perm, delta),
            )
        return LinkClassification(
            "Unknown", None, "unknown", "oracle",
            note="collapse search failed on the canonical all-pairs cube",
        )
    return LinkClassification(
        "Unknown", None, "unknown", "fast",
        legality=rec,
        note=f"bad face, not totally legal, signature {sig}",
    )


# -- cusp checks --------------------------------------------------------------


@dataclass(frozen=True)
class CuspConditionResult:
    ok: bool
    move_index: Optional[int]
    pair: Optional[Tuple[str, str]]


def check_cusp_condition(
    P: Polytope, s: State, cusp_id: str, m: MoveSystem
) -> CuspConditionResult:
    """First move (canonical order) meeting the cusp's incident facets in
    exactly two facets that are non-adjacent and of opposite status."""
    iv = P.ideal_vertex(cusp_id)
    for bi, block in enumerate(m.blocks):
        hit = sorted(block & iv.incident)
        if len(hit) != 2:
            continue
        a, b = hit
        if P.adjacent(a, b):
            continue
        if s.is_in(a) == s.is_in(b):
            continue
        return CuspConditionResult(True, bi, (a, b))
    return CuspConditionResult(False, None, None)


@dataclass(frozen=True)
class BoundaryCubeCertificate:
    cusp_id: str
    condition: CuspConditionResult
    all_regular: bool
    verdicts: Tuple[Tuple[Tuple[str, ...], LinkClassification], ...]


def certify_boundary_cube(
    P: Polytope,
    m: MoveSystem,
    s: State,
    cusp_id: str,
    *,
    collapse_cache: Optional[dict] = None,
    classify_memo: Optional[dict] = None,
    section: Optional[Polytope] = None,
    seed: int = 0,
    restarts: int = 64,
) -> BoundaryCubeCertificate:
    """Classify every face of the horospherical cube with restricted moves
    and state; the certificate requires every verdict to be Regular.

    `classify_memo` may be shared across the states of one cusp: goodness is
    state independent, and bad faces are keyed by their inherited state.
    """
    cond = check_cusp_condition(P, s, cusp_id, m)
    if not cond.ok:
        raise InputError(f"cusp condition fails at {cusp_id}")
    H = section if section is not None else build_cusp_section(P, cusp_id)[0]
    mH = m.restrict(H.facet_ids)
    sH = s.restrict(H.facet_ids)
    rows = []
    all_regular = True
    for codim in range(0, H.dimension + 1):
        for F in enumerate_faces(H, codim):
            if classify_memo is None:
                lc = classify_link(
                    H, mH, sH, F,
                    collapse_cache=collapse_cache, seed=seed, restarts=restarts,
                )
            else:
                if is_good_face(mH, F):
                    key = (F.sorted_ids(), None)
                else:
                    key = (F.sorted_ids(), inherited_state(H, mH, sH, F).serial())
                lc = classify_memo.get(key)
                if lc is None:
                    lc = classify_link(
                        H, mH, sH, F,
                        collapse_cache=collapse_cache, seed=seed, restarts=restarts,
                    )
                    classify_memo[key] = lc
            rows.append((F.sorted_ids(), lc))
            if not lc.is_regular:
                all_regular = False
    return BoundaryCubeCertificate(cusp_id, cond, all_regular, tuple(rows))
