"""Moves, states, legality, inheritance and good/bad face classification.

A move system is a partition of the facets; crossing a facet flips the status
of its whole block.  States label facets In or Out; the two full subcomplexes
of the dual complex they span drive every legality question.  "Totally legal"
is certified by explicit collapse sequences, never asserted from a failed
search.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Optional, Sequence, Tuple

from . import labels as lb
from .complexes import (
    CollapseOutcome,
    SimplicialComplex,
    betti_mod2,
    full_subcomplex,
    try_collapse,
)
from .errors import InputError, StructuralError
from .polytopes import FaceHandle, Polytope, dual_complex

IN, OUT = "I", "O"


@dataclass(frozen=True)
class MoveSystem:
    """Partition of the facet ids into nonempty blocks."""

    blocks: Tuple[FrozenSet[str], ...]

    def __post_init__(self):
        seen: set = set()
        for b in self.blocks:
            if not b:
                raise InputError("empty move block")
            if seen & b:
                raise InputError("move blocks are not disjoint")
            seen |= b
        object.__setattr__(self, "_block_of", {
            f: i for i, b in enumerate(self.blocks) for f in b
        })

    def covers(self, facet_ids: Iterable[str]) -> bool:
        return set(self._block_of) == set(facet_ids)

    def block_of(self, facet_id: str) -> int:
        try:
            return self._block_of[facet_id]
        except KeyError:
            raise InputError(f"facet {facet_id!r} not covered by any move") from None

    def block(self, facet_id: str) -> FrozenSet[str]:
        return self.blocks[self.block_of(facet_id)]

    def restrict(self, facet_ids: Iterable[str]) -> "MoveSystem":
        """Induced move system on a subset of facets (empty blocks dropped)."""
        keep = frozenset(facet_ids)
        blocks = tuple(b & keep for b in self.blocks if b & keep)
        return MoveSystem(blocks)


@dataclass(frozen=True)
class State:
    """Total In/Out labelling of a facet set, canonically serialisable."""

    universe: Tuple[str, ...]
    in_facets: FrozenSet[str]

    def __post_init__(self):
        extra = self.in_facets - set(self.universe)
        if extra:
            raise InputError(f"status given for unknown facets: {sorted(extra)!r}")

    @property
    def out_facets(self) -> FrozenSet[str]:
        return frozenset(self.universe) - self.in_facets

    def status(self, facet_id: str) -> str:
        if facet_id not in self.universe:
            raise InputError(f"facet {facet_id!r} not in state universe")
        return IN if facet_id in self.in_facets else OUT

    def is_in(self, facet_id: str) -> bool:
        return self.status(facet_id) == IN

    def serial(self) -> str:
        return "".join(IN if f in self.in_facets else OUT for f in self.universe)

    def restrict(self, facet_ids: Sequence[str]) -> "State":
        ids = tuple(sorted(facet_ids))
        unknown = set(ids) - set(self.universe)
        if unknown:
            raise InputError(f"cannot restrict to unknown facets {sorted(unknown)!r}")
        return State(ids, frozenset(f for f in ids if f in self.in_facets))


def state_from_in_set(P: Polytope, in_facets: Iterable[str]) -> State:
    return State(tuple(sorted(P.facet_ids)), frozenset(in_facets))


def act(s: State, m: MoveSystem, facet_id: str) -> State:
    """Flip the status of every facet in the block containing `facet_id`."""
    block = m.block(facet_id)
    return State(s.universe, s.in_facets ^ block)


def orbit(s: State, m: MoveSystem) -> Tuple[State, ...]:
    """Closure of s under all moves, in canonical (serialised) order."""
    seen = {s}
    frontier = [s]
    while frontier:
        cur = frontier.pop()
        for block in m.blocks:
            nxt = State(cur.universe, cur.in_facets ^ block)
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return tuple(sorted(seen, key=State.serial))


def is_compatible(P: Polytope, m: MoveSystem, s: State):
    """Adjacent same-move facets must share status; returns (ok, witness)."""
    for block in m.blocks:
        bl = sorted(block)
        for i, a in enumerate(bl):
            for b in bl[i + 1:]:
                if P.adjacent(a, b) and s.is_in(a) != s.is_in(b):
                    return False, (a, b)
    return True, None


# ---------------------------------------------------------------------------
# The concrete move system of the 27-facet polytope

R_TABLE: Tuple[Tuple[str, Tuple[str, str, str]], ...] = (
    ("1", ("1", "1-i+j-k", "1+i+j-k")),
    ("-1", ("-1", "-1+i-j+k", "-1-i-j+k")),
    ("i", ("i", "1+i+j+k", "-1+i+j+k")),
    ("-i", ("-i", "-1-i-j-k", "1-i-j-k")),
    ("j", ("j", "-1-i+j+k", "-1-i+j-k")),
    ("-j", ("-j", "1+i-j-k", "1+i-j+k")),
    ("k", ("k", "1-i-j+k", "1-i+j+k")),
    ("-k", ("-k", "-1+i+j-k", "-1+i-j-k")),
)

MOVE_ORDER = ("1", "i", "j", "k")


def unit_class_table() -> Dict[str, str]:
    """Hard-coded unit-class of every T24 label, cross-validated by quaternion
    factorisation over the base points."""
    table = {}
    for r, row in R_TABLE:
        for t in row:
            table[t] = r
    if len(table) != 24:
        raise StructuralError("unit-class table does not cover T24")
    for t, r in table.items():
        if lb.base_unit(t) != r:
            raise StructuralError(
                f"unit-class table disagrees with quaternion factorisation at {t}"
            )
    return table


def move_system_p6() -> MoveSystem:
    """Five moves: one per unit pair {q, -q} (six facets each) and {A, B, C}."""
    table = unit_class_table()
    blocks = []
    for q in MOVE_ORDER:
        block = frozenset(t for t, r in table.items() if r.lstrip("-") == q)
        if len(block) != 6:
            raise StructuralError(f"move of {q} has {len(block)} facets, expected 6")
        blocks.append(block)
    blocks.append(frozenset(("A", "B", "C")))
    return MoveSystem(tuple(blocks))


def r_class_triples(q: str) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """The two adjacent triples of the size-6 move of unit q: classes +q, -q."""
    plus = minus = None
    for r, row in R_TABLE:
        if r == q:
            plus = row
        if r == "-" + q:
            minus = row
    if plus is None or minus is None:
        raise InputError(f"not a positive unit: {q!r}")
    return plus, minus


def balanced_states_p6(P: Polytope) -> Tuple[State, ...]:
    """All 32 balanced states: equal status on A, B, C and one full unit-class
    triple In per size-6 move, the other Out."""
    states = []
    for abc_in in (False, True):
        for bits in range(16):
            in_set = set(("A", "B", "C")) if abc_in else set()
            for pos, q in enumerate(MOVE_ORDER):
                plus, minus = r_class_triples(q)
                in_set.update(plus if bits >> pos & 1 else minus)
            states.append(state_from_in_set(P, in_set))
    out = tuple(sorted(states, key=State.serial))
    if len(set(out)) != 32:
        raise StructuralError("balanced state enumeration produced duplicates")
    return out


def balanced_states_p5(P5: Polytope) -> Tuple[State, ...]:
    """The 16 balanced states of the 16-facet polytope: per move, one of the
    two adjacent unit-class pairs is In, the other Out."""
    states = []
    for bits in range(16):
        in_set: set = set()
        for pos, q in enumerate(MOVE_ORDER):
            plus, minus = r_class_triples(q)
            chosen = plus if bits >> pos & 1 else minus
            in_set.update(t for t in chosen if t in P5.index)
        states.append(state_from_in_set(P5, in_set))
    out = tuple(sorted(states, key=State.serial))
    if len(set(out)) != 16:
        raise StructuralError("balanced state enumeration produced duplicates")
    return out


def move_system_p5(P5: Polytope) -> MoveSystem:
    return move_system_p6().restrict(P5.facet_ids)


# ---------------------------------------------------------------------------
# Good and bad faces


def is_good_face(m: MoveSystem, F: FaceHandle) -> bool:
    """Good iff some move contains exactly one defining facet; P itself is bad."""
    if not F.defining:
        return False
    counts: Dict[int, int] = {}
    for fid in F.defining:
        b = m.block_of(fid)
        counts[b] = counts.get(b, 0) + 1
    return any(c == 1 for c in counts.values())


def bad_face_signature(m: MoveSystem, F: FaceHandle) -> Optional[Tuple[int, ...]]:
    """Sorted per-move counts for a bad proper face; None when the face is good."""
    if not F.defining:
        return ()
    counts: Dict[int, int] = {}
    for fid in F.defining:
        b = m.block_of(fid)
        counts[b] = counts.get(b, 0) + 1
    if any(c == 1 for c in counts.values()):
        return None
    return tuple(sorted(counts.values()))


def classify_bad_faces(P: Polytope, m: MoveSystem):
    """All proper bad faces grouped by signature, canonical order throughout."""
    from .polytopes import enumerate_faces

    out: Dict[Tuple[int, ...], list] = {}
    for codim in range(1, P.dimension + 1):
        for F in enumerate_faces(P, codim):
            sig = bad_face_signature(m, F)
            if sig is not None:
                out.setdefault(sig, []).append(F)
    return {sig: tuple(faces) for sig, faces in sorted(out.items())}


# ---------------------------------------------------------------------------
# Inherited states and legality


def inherited_state(P: Polytope, m: MoveSystem, s: State, F: FaceHandle) -> State:
    """State induced on the facets of F (vertices of its dual complex).

    A facet sharing a move with some defining facet gets Out regardless of s;
    all other facets keep their ambient status.  For F = P this is s itself.
    """
    D = dual_complex(P, F)
    blocked = {m.block_of(fid) for fid in F.defining}
    ids = tuple(sorted(D.vertices))
    in_set = frozenset(
        fid for fid in ids if m.block_of(fid) not in blocked and s.is_in(fid)
    )
    return State(ids, in_set)


@dataclass(frozen=True)
class LegalityRecord:
    """Outcome of the legality checks for one (face, state-on-face) pair.

    `totally_legal` is True only when both collapse searches succeeded; None
    means "not certified" (the search is sound but not complete).
    """

    legal: bool
    totally_legal: Optional[bool]
    betti_out: Tuple[int, ...]
    betti_in: Tuple[int, ...]
    collapse_out: Optional[CollapseOutcome]
    collapse_in: Optional[CollapseOutcome]
    out_vertices: Tuple[str, ...]
    in_vertices: Tuple[str, ...]


def legality(
    P: Polytope,
    F: FaceHandle,
    s_on_f: State,
    *,
    seed: int = 0,
    restarts: int = 64,
    collapse_cache: Optional[dict] = None,
) -> LegalityRecord:
    """Connectivity and certified collapsibility of the two state subcomplexes.

    Builds the dual complex of F, splits it by the given state, and reports:
    legal (both parts nonempty and connected), totally legal (both collapse to
    a point, with replayable certificates), and mod-2 Betti numbers for audit.
    """
    D = dual_complex(P, F)
    if set(s_on_f.universe) != set(D.vertices):
        raise InputError("state universe does not match the dual complex vertices")
    out_ids = tuple(sorted(s_on_f.out_facets))
    in_ids = tuple(sorted(s_on_f.in_facets))
    sigma_out = full_subcomplex(D, out_ids) if out_ids else SimplicialComplex([])
    sigma_in = full_subcomplex(D, in_ids) if in_ids else SimplicialComplex([])
    legal = sigma_out.is_connected() and sigma_in.is_connected()
    max_b = max(D.dim, 0)
    betti_out = betti_mod2(sigma_out, max_b)
    betti_in = betti_mod2(sigma_in, max_b)

    def collapse(K: SimplicialComplex) -> CollapseOutcome:
        if collapse_cache is None:
            return try_collapse(K, seed=seed, restarts=restarts)
        key = (K.maximal_faces, None, seed, restarts)
        got = collapse_cache.get(key)
        if got is None:
            got = try_collapse(K, seed=seed, restarts=restarts)
            collapse_cache[key] = got
        return got

    collapse_out = collapse(sigma_out) if not sigma_out.is_empty else None
    collapse_in = collapse(sigma_in) if not sigma_in.is_empty else None
    if (
        collapse_out is not None
        and collapse_in is not None
        and collapse_out.success
        and collapse_in.success
    ):
        totally: Optional[bool] = True
    else:
        totally = None
    return LegalityRecord(
        legal=legal,
        totally_legal=totally,
        betti_out=betti_out,
        betti_in=betti_in,
        collapse_out=collapse_out,
        collapse_in=collapse_in,
        out_vertices=out_ids,
        in_vertices=in_ids,
    )
