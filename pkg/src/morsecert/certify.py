"""End-to-end certification pipelines with replayable evidence tables.

A certificate covers every clique face of the polytope crossed with every
state of the orbit.  Rows are deduplicated by (face, inherited state) with
multiplicities recorded, so coverage accounting stays exact; evidence blobs
are content-addressed, which also deduplicates identical certificates across
states and cusps.  All randomness comes from the root seed, so reports are
reproducible byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import InputError
from .links import (
    CriticalLinkCertifier,
    build_cube_model,
    canonical_pairs_transform,
    certify_boundary_cube,
    check_cusp_condition,
)
from .polytopes import (
    FaceHandle,
    FVectorReport,
    Polytope,
    build_cusp_section,
    build_p5,
    build_p6,
    enumerate_faces,
    f_vector_check,
    TABLE_G6,
)
from .states import (
    MoveSystem,
    State,
    R_TABLE,
    bad_face_signature,
    balanced_states_p5,
    balanced_states_p6,
    classify_bad_faces,
    inherited_state,
    is_compatible,
    is_good_face,
    move_system_p5,
    move_system_p6,
    orbit,
)

VERSION = "1"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _eid(payload: dict) -> str:
    return "e" + hashlib.sha256(canonical_json(payload).encode()).hexdigest()[:16]


def _sequence_json(seq: Iterable) -> list:
    out = []
    for face, cof in seq:
        out.append([_simplex_json(face), _simplex_json(cof)])
    return out


def _simplex_json(s) -> list:
    items = [_simplex_json(v) if isinstance(v, frozenset) else v for v in s]
    return sorted(items)


def legality_evidence_payload(host: dict, face_ids: Tuple[str, ...], rec) -> dict:
    return {
        "kind": "legality",
        "host": host,
        "face": list(face_ids),
        "out_vertices": list(rec.out_vertices),
        "in_vertices": list(rec.in_vertices),
        "betti_out": list(rec.betti_out),
        "betti_in": list(rec.betti_in),
        "out_sequence": _sequence_json(rec.collapse_out.sequence),
        "in_sequence": _sequence_json(rec.collapse_in.sequence),
    }


def critical_shared_payload(cert) -> dict:
    return {
        "kind": "critical-shared",
        "ell": cert.ell,
        "asc_sequence": _sequence_json(cert.asc_outcome.sequence),
        "desc_sequence": _sequence_json(cert.desc_outcome.sequence),
    }


@dataclass(frozen=True)
class VerdictRow:
    face: Tuple[str, ...]
    codim: int
    branch: str
    verdict: str
    class_id: str
    representative_state: int
    state_indices: Tuple[int, ...]
    witness_move: Optional[int] = None
    evidence_id: Optional[str] = None
    transform: Optional[dict] = None


@dataclass(frozen=True)
class CuspRow:
    cusp_id: str
    state_index: int
    ok: bool
    move_index: Optional[int]
    pair: Optional[Tuple[str, str]]
    all_regular: bool
    n_faces: int
    n_good: int
    checked_faces: Tuple[Tuple[Tuple[str, ...], str, Optional[str]], ...]


@dataclass(frozen=True)
class EulerRecord:
    clique_counts: Tuple[int, ...]
    chi_per_copy: Fraction
    critical_count: int
    critical_per_copy: Fraction
    passed: bool


@dataclass
class Certificate:
    subject: str
    mode: str
    passed: bool
    seed: int
    restarts: int
    inputs_digest: str
    polytope_name: str
    dimension: int
    facet_ids: Tuple[str, ...]
    moves_blocks: Tuple[Tuple[str, ...], ...]
    orbit_serials: Tuple[str, ...]
    f_vector: FVectorReport
    bad_faces: Dict[Tuple[int, ...], Tuple[Tuple[str, ...], ...]]
    bad_faces_passed: Optional[bool]
    verdict_rows: Tuple[VerdictRow, ...]
    evidence: Dict[str, dict]
    shared_evidence: Dict[str, dict]
    cusp_rows: Tuple[CuspRow, ...]
    euler: EulerRecord
    failures: Tuple[str, ...]
    timings: Dict[str, float]
    generic_inputs: Optional[dict] = None

    def summary_line(self) -> str:
        tag = {"P6_perfect_morse": "P6", "P5_fibration": "P5"}.get(
            self.subject, "GENERIC"
        )
        if self.passed:
            if self.mode == "perfect":
                idx = self.dimension // 2
                return (
                    f"{tag}: PERFECT MORSE CERTIFIED "
                    f"(all links Regular or Critical({idx}))"
                )
            return f"{tag}: FIBRATION CERTIFIED (all links Regular)"
        first = self.failures[0] if self.failures else "unspecified failure"
        return f"{tag}: CERTIFICATION FAILED ({first})"


# ---------------------------------------------------------------------------
# Euler identity


def euler_identity(P: Polytope, m: MoveSystem) -> EulerRecord:
    """Two independent censuses: alternating clique-count sum versus the
    all-pairs bad vertices, each per copy of the polytope.

    chi = sum_k (-1)^k N_k / 2^k with N_k the number of codim-k clique faces;
    the identity asserts chi == -(number of all-pairs vertices) / 2^dim.
    """
    counts = [1] + [P.clique_count(k) for k in range(1, P.dimension + 1)]
    chi = sum(
        Fraction((-1) ** k * counts[k], 2 ** k) for k in range(P.dimension + 1)
    )
    n_crit = 0
    for F in enumerate_faces(P, P.dimension):
        sig = bad_face_signature(m, F)
        if sig and all(c == 2 for c in sig):
            n_crit += 1
    crit = Fraction(n_crit, 2 ** P.dimension)
    return EulerRecord(tuple(counts), chi, n_crit, crit, chi == -crit)


# ---------------------------------------------------------------------------
# Verdict sweep


def _good_witness(m: MoveSystem, F: FaceHandle) -> int:
    counts: Dict[int, int] = {}
    for fid in F.defining:
        counts[m.block_of(fid)] = counts.get(m.block_of(fid), 0) + 1
    return min(b for b, c in counts.items() if c == 1)


def _classify_group(
    P: Polytope,
    m: MoveSystem,
    states: Sequence[State],
    face_ids: Tuple[str, ...],
    codim: int,
    serial: str,
    members: Tuple[int, ...],
    *,
    certifier: CriticalLinkCertifier,
    collapse_cache: dict,
    seed: int,
    restarts: int,
):
    """Classify one (face, inherited-class) group; returns (row, evidence,
    shared_evidence, failure-or-None)."""
    from .links import classify_link

    F = FaceHandle(frozenset(face_ids))
    rep = members[0]
    lc = classify_link(
        P, m, states[rep], F,
        certifier=certifier,
        collapse_cache=collapse_cache,
        seed=seed,
        restarts=restarts,
    )
    if lc.verdict == "Regular" and lc.branch == "inherited-totally-legal":
        payload = legality_evidence_payload({"type": "ambient"}, face_ids, lc.legality)
        eid = _eid(payload)
        row = VerdictRow(
            face=face_ids,
            codim=codim,
            branch=lc.branch,
            verdict="Regular",
            class_id="legal:" + serial,
            representative_state=rep,
            state_indices=members,
            evidence_id=eid,
        )
        return row, {eid: payload}, {}, None
    if lc.verdict == "Critical":
        sp = critical_shared_payload(lc.critical)
        sid = _eid(sp)
        # validate the canonical transform for every covered state
        for idx in members:
            canonical_pairs_transform(build_cube_model(P, m, states[idx], F))
        ell, perm, delta = lc.transform
        payload = {
            "kind": "critical",
            "face": list(face_ids),
            "ell": ell,
            "shared": sid,
            "perm": list(perm),
            "delta": delta,
        }
        eid = _eid(payload)
        row = VerdictRow(
            face=face_ids,
            codim=codim,
            branch=lc.branch,
            verdict=f"Critical({lc.index})",
            class_id="critical",
            representative_state=rep,
            state_indices=members,
            evidence_id=eid,
            transform={"perm": list(perm), "delta": delta},
        )
        return row, {eid: payload}, {sid: sp}, None
    row = VerdictRow(
        face=face_ids,
        codim=codim,
        branch="unknown",
        verdict="Unknown",
        class_id="unknown:" + serial,
        representative_state=rep,
        state_indices=members,
    )
    failure = f"Unknown verdict at face {face_ids} class {serial!r}: {lc.note}"
    return row, {}, {}, failure


_WORKER_CTX: dict = {}


def _worker_init(P, m, states, seed, restarts):
    _WORKER_CTX["args"] = (P, m, states, seed, restarts)
    _WORKER_CTX["certifier"] = CriticalLinkCertifier(seed=seed, restarts=restarts)
    _WORKER_CTX["cache"] = {}


def _worker_classify(task):
    face_ids, codim, serial, members = task
    P, m, states, seed, restarts = _WORKER_CTX["args"]
    return _classify_group(
        P, m, states, face_ids, codim, serial, members,
        certifier=_WORKER_CTX["certifier"],
        collapse_cache=_WORKER_CTX["cache"],
        seed=seed,
        restarts=restarts,
    )


def _worker_cusp(cusp_id):
    P, m, states, seed, restarts = _WORKER_CTX["args"]
    return _cusp_rows_for(
        P, m, states, cusp_id,
        collapse_cache=_WORKER_CTX["cache"],
        seed=seed,
        restarts=restarts,
    )


def _verdict_sweep(
    P: Polytope,
    m: MoveSystem,
    states: Sequence[State],
    *,
    certifier: CriticalLinkCertifier,
    collapse_cache: dict,
    seed: int,
    restarts: int,
    failures: List[str],
    parallel: int = 1,
):
    rows: List[VerdictRow] = []
    evidence: Dict[str, dict] = {}
    shared: Dict[str, dict] = {}
    all_states = tuple(range(len(states)))
    tasks = []  # bad-face groups, in canonical order
    ordering = {}  # face -> position, to interleave good rows deterministically
    for codim in range(0, P.dimension + 1):
        for F in enumerate_faces(P, codim):
            ids = F.sorted_ids()
            ordering[ids] = len(ordering)
            if is_good_face(m, F):
                rows.append(
                    VerdictRow(
                        face=ids,
                        codim=codim,
                        branch="good-face",
                        verdict="Regular",
                        class_id="good",
                        representative_state=0,
                        state_indices=all_states,
                        witness_move=_good_witness(m, F),
                    )
                )
                continue
            groups: Dict[str, List[int]] = {}
            for idx, s in enumerate(states):
                groups.setdefault(inherited_state(P, m, s, F).serial(), []).append(idx)
            for serial in sorted(groups):
                tasks.append((ids, codim, serial, tuple(groups[serial])))

    if parallel > 1 and tasks:
        import multiprocessing as mp

        ctx = mp.get_context("fork")
        with ctx.Pool(
            parallel, initializer=_worker_init,
            initargs=(P, m, states, seed, restarts),
        ) as pool:
            results = pool.map(_worker_classify, tasks, chunksize=8)
    else:
        results = [
            _classify_group(
                P, m, states, *task,
                certifier=certifier,
                collapse_cache=collapse_cache,
                seed=seed,
                restarts=restarts,
            )
            for task in tasks
        ]
    for row, ev, sh, failure in results:
        rows.append(row)
        evidence.update(ev)
        shared.update(sh)
        if failure:
            failures.append(failure)
    rows.sort(key=lambda r: (ordering[r.face], r.class_id))
    return tuple(rows), evidence, shared


# ---------------------------------------------------------------------------
# Cusp suite


def _cusp_rows_for(
    P: Polytope,
    m: MoveSystem,
    states: Sequence[State],
    cusp_id: str,
    *,
    collapse_cache: dict,
    seed: int,
    restarts: int,
):
    """All per-state rows for one cusp; returns (rows, evidence, failures)."""
    rows: List[CuspRow] = []
    evidence: Dict[str, dict] = {}
    failures: List[str] = []
    section, _ = build_cusp_section(P, cusp_id)
    memo: dict = {}
    payload_ids: dict = {}
    for idx, s in enumerate(states):
        cond = check_cusp_condition(P, s, cusp_id, m)
        if not cond.ok:
            failures.append(f"cusp condition fails at {cusp_id} state {idx}")
            rows.append(CuspRow(cusp_id, idx, False, None, None, False, 0, 0, ()))
            continue
        bc = certify_boundary_cube(
            P, m, s, cusp_id,
            collapse_cache=collapse_cache,
            classify_memo=memo,
            section=section,
            seed=seed,
            restarts=restarts,
        )
        checked = []
        n_good = 0
        for face_ids, lc in bc.verdicts:
            if lc.branch == "good-face":
                n_good += 1
                continue
            eid = None
            if lc.branch == "inherited-totally-legal":
                key = id(lc)
                eid = payload_ids.get(key)
                if eid is None:
                    payload = legality_evidence_payload(
                        {"type": "cusp", "cusp": cusp_id}, face_ids, lc.legality
                    )
                    eid = _eid(payload)
                    evidence[eid] = payload
                    payload_ids[key] = eid
            else:
                failures.append(
                    f"boundary cube at {cusp_id} state {idx}: face {face_ids} "
                    f"verdict {lc.verdict}"
                )
            checked.append((face_ids, lc.branch, eid))
        if not bc.all_regular:
            failures.append(
                f"boundary cube at {cusp_id} state {idx} is not all Regular"
            )
        rows.append(
            CuspRow(
                cusp_id, idx, True, cond.move_index, cond.pair,
                bc.all_regular, len(bc.verdicts), n_good, tuple(checked),
            )
        )
    return tuple(rows), evidence, tuple(failures)


def _cusp_suite(
    P: Polytope,
    m: MoveSystem,
    states: Sequence[State],
    *,
    collapse_cache: dict,
    seed: int,
    restarts: int,
    failures: List[str],
    evidence: Dict[str, dict],
    parallel: int = 1,
):
    cusp_ids = [iv.id for iv in P.ideal_vertices]
    if parallel > 1 and cusp_ids:
        import multiprocessing as mp

        ctx = mp.get_context("fork")
        with ctx.Pool(
            parallel, initializer=_worker_init,
            initargs=(P, m, states, seed, restarts),
        ) as pool:
            results = pool.map(_worker_cusp, cusp_ids, chunksize=1)
    else:
        results = [
            _cusp_rows_for(
                P, m, states, cid,
                collapse_cache=collapse_cache, seed=seed, restarts=restarts,
            )
            for cid in cusp_ids
        ]
    rows: List[CuspRow] = []
    for cusp_rows, ev, fails in results:
        rows.extend(cusp_rows)
        evidence.update(ev)
        failures.extend(fails)
    return tuple(rows)


# ---------------------------------------------------------------------------
# Shared pipeline


def _inputs_digest(tag: str, extra: Optional[dict] = None) -> str:
    data = {
        "tag": tag,
        "table": [[lbl, list(vec)] for lbl, vec in TABLE_G6],
        "r_table": [[r, list(row)] for r, row in R_TABLE],
    }
    if extra is not None:
        data["inputs"] = extra
    return hashlib.sha256(canonical_json(data).encode()).hexdigest()


def run_pipeline(
    P: Polytope,
    m: MoveSystem,
    states: Sequence[State],
    *,
    subject: str,
    mode: str,
    seed: int = 0,
    restarts: int = 64,
    f_expect: Optional[dict] = None,
    f_degree: Optional[int] = None,
    signature_expect: Optional[set] = None,
    expected_orbit: Optional[int] = None,
    inputs_digest: str = "",
    generic_inputs: Optional[dict] = None,
    parallel: int = 1,
) -> Certificate:
    """Full face-by-state classification, cusp suite and consistency identity.

    With parallel > 1 the independent (face, class) groups and the per-cusp
    batches fan out to a process pool; results merge in canonical key order,
    so reports are identical to a sequential run.
    """
    if mode not in ("perfect", "fibration"):
        raise InputError(f"unknown mode {mode!r}")
    failures: List[str] = []
    timings: Dict[str, float] = {}
    t_total = time.perf_counter()

    t0 = time.perf_counter()
    if not m.covers(P.facet_ids):
        raise InputError("move system does not partition the facet set")
    fv = f_vector_check(P, f_expect, f_degree)
    timings["f_vector"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    for idx, s in enumerate(states):
        ok, witness = is_compatible(P, m, s)
        if not ok:
            raise InputError(
                f"state {idx} is incompatible: adjacent same-move pair {witness!r}"
            )
    orb = orbit(states[0], m)
    if set(orb) != set(states):
        failures.append("supplied states are not the orbit of the first state")
    if expected_orbit is not None and len(orb) != expected_orbit:
        failures.append(f"orbit size {len(orb)} != expected {expected_orbit}")
    timings["orbit"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    bad = classify_bad_faces(P, m)
    bad_ids = {
        sig: tuple(F.sorted_ids() for F in faces) for sig, faces in bad.items()
    }
    bad_passed: Optional[bool] = None
    if signature_expect is not None:
        bad_passed = set(bad_ids) == signature_expect
        if not bad_passed:
            failures.append(
                f"bad-face signatures {sorted(bad_ids)} != expected "
                f"{sorted(signature_expect)}"
            )
        if any(sum(sig) == 5 for sig in bad_ids):
            bad_passed = False
            failures.append("found a codimension-5 bad face")
    timings["bad_faces"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    collapse_cache: dict = {}
    certifier = CriticalLinkCertifier(seed=seed, restarts=restarts)
    rows, evidence, shared = _verdict_sweep(
        P, m, states,
        certifier=certifier,
        collapse_cache=collapse_cache,
        seed=seed,
        restarts=restarts,
        failures=failures,
        parallel=parallel,
    )
    timings["verdicts"] = time.perf_counter() - t0

    # coverage: every face x state exactly once
    t0 = time.perf_counter()
    per_face: Dict[Tuple[str, ...], list] = {}
    for row in rows:
        per_face.setdefault(row.face, []).extend(row.state_indices)
    n_faces = sum(
        len(enumerate_faces(P, c)) for c in range(0, P.dimension + 1)
    )
    if len(per_face) != n_faces:
        failures.append("verdict table does not cover every face")
    for face, idxs in per_face.items():
        if sorted(idxs) != list(range(len(states))):
            failures.append(f"verdict table does not cover all states at {face}")
            break
    timings["coverage"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    cusp_rows = _cusp_suite(
        P, m, states,
        collapse_cache=collapse_cache,
        seed=seed,
        restarts=restarts,
        failures=failures,
        evidence=evidence,
        parallel=parallel,
    )
    timings["cusps"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    euler = euler_identity(P, m)
    if not euler.passed:
        failures.append(
            f"consistency identity fails: chi {euler.chi_per_copy} vs "
            f"-{euler.critical_per_copy}"
        )
    timings["euler"] = time.perf_counter() - t0

    half = P.dimension // 2
    for row in rows:
        if row.verdict in ("Regular", "Unknown"):
            continue  # Unknown rows were already recorded as failures
        if mode == "fibration":
            failures.append(f"non-Regular verdict at {row.face} in fibration mode")
        elif row.verdict != f"Critical({half})" or P.dimension % 2 != 0:
            failures.append(f"verdict {row.verdict} at {row.face} not allowed")

    timings["total"] = time.perf_counter() - t_total
    passed = not failures
    return Certificate(
        subject=subject,
        mode=mode,
        passed=passed,
        seed=seed,
        restarts=restarts,
        inputs_digest=inputs_digest,
        polytope_name=P.name,
        dimension=P.dimension,
        facet_ids=tuple(P.facet_ids),
        moves_blocks=tuple(tuple(sorted(b)) for b in m.blocks),
        orbit_serials=tuple(s.serial() for s in states),
        f_vector=fv,
        bad_faces=bad_ids,
        bad_faces_passed=bad_passed,
        verdict_rows=rows,
        evidence=evidence,
        shared_evidence=shared,
        cusp_rows=cusp_rows,
        euler=euler,
        failures=tuple(failures),
        timings=timings,
        generic_inputs=generic_inputs,
    )


def certify_p6(*, seed: int = 0, restarts: int = 64, parallel: int = 1) -> Certificate:
    """Certify the 27-facet 6-polytope: every link Regular or Critical(3)."""
    P = build_p6()
    m = move_system_p6()
    states = balanced_states_p6(P)
    return run_pipeline(
        P, m, states,
        subject="P6_perfect_morse",
        mode="perfect",
        seed=seed,
        restarts=restarts,
        f_expect={1: 27, 2: 216, 6: 72, 7: 0},
        f_degree=16,
        signature_expect={(2,), (3,), (2, 2), (2, 2, 2)},
        expected_orbit=32,
        inputs_digest=_inputs_digest("p6"),
        parallel=parallel,
    )


def certify_p5(*, seed: int = 0, restarts: int = 64, parallel: int = 1) -> Certificate:
    """Certify the 16-facet 5-polytope: a fibration, all links Regular."""
    P = build_p5()
    m = move_system_p5(P)
    states = balanced_states_p5(P)
    return run_pipeline(
        P, m, states,
        subject="P5_fibration",
        mode="fibration",
        seed=seed,
        restarts=restarts,
        f_expect={1: 16, 5: 16, 6: 0},
        expected_orbit=16,
        inputs_digest=_inputs_digest("p5"),
        parallel=parallel,
    )


def certify_generic(
    P: Polytope,
    m: MoveSystem,
    initial_state: State,
    *,
    mode: str = "perfect",
    seed: int = 0,
    restarts: int = 64,
    generic_inputs: Optional[dict] = None,
    parallel: int = 1,
) -> Certificate:
    """Pipeline over the orbit closure of a user-supplied initial state."""
    ok, witness = is_compatible(P, m, initial_state)
    if not ok:
        raise InputError(
            f"initial state is incompatible: adjacent same-move pair {witness!r}"
        )
    states = orbit(initial_state, m)
    digest = _inputs_digest("generic", generic_inputs)
    return run_pipeline(
        P, m, states,
        subject="generic",
        mode=mode,
        seed=seed,
        restarts=restarts,
        inputs_digest=digest,
        generic_inputs=generic_inputs,
        parallel=parallel,
    )
