"""Rendering of certificates: human-readable text and a canonical structured
document (stable key order, exact integers, rationals as [num, den] pairs).

Timing values are stripped from the structured form by default so that two
runs with the same seed produce byte-identical reports; pass
include_timings=True to embed wall-clock data.
"""

from __future__ import annotations

import json
from collections import Counter
from fractions import Fraction
from .certify import Certificate, CuspRow, EulerRecord, VerdictRow

REPORT_VERSION = "1"


def _frac(x: Fraction) -> list:
    return [x.numerator, x.denominator]


def _sig_key(sig) -> str:
    return ",".join(str(c) for c in sig)


def _verdict_row_doc(row: VerdictRow) -> dict:
    return {
        "face": list(row.face),
        "codim": row.codim,
        "branch": row.branch,
        "verdict": row.verdict,
        "class": row.class_id,
        "representative_state": row.representative_state,
        "states": list(row.state_indices),
        "witness_move": row.witness_move,
        "evidence": row.evidence_id,
        "transform": row.transform,
    }


def _cusp_row_doc(row: CuspRow) -> dict:
    return {
        "cusp": row.cusp_id,
        "state": row.state_index,
        "ok": row.ok,
        "move": row.move_index,
        "pair": list(row.pair) if row.pair else None,
        "all_regular": row.all_regular,
        "n_faces": row.n_faces,
        "n_good": row.n_good,
        "checked": [
            [list(face), branch, eid] for face, branch, eid in row.checked_faces
        ],
    }


def _euler_doc(e: EulerRecord) -> dict:
    return {
        "clique_counts": list(e.clique_counts),
        "chi_per_copy": _frac(e.chi_per_copy),
        "critical_count": e.critical_count,
        "critical_per_copy": _frac(e.critical_per_copy),
        "pass": e.passed,
    }


def certificate_to_document(cert: Certificate, *, include_timings: bool = False) -> dict:
    doc = {
        "version": REPORT_VERSION,
        "subject": cert.subject,
        "mode": cert.mode,
        "pass": cert.passed,
        "inputs_digest": cert.inputs_digest,
        "seeds": {"root": cert.seed, "restarts": cert.restarts},
        "polytope": {
            "name": cert.polytope_name,
            "dimension": cert.dimension,
            "facets": list(cert.facet_ids),
        },
        "moves": [list(b) for b in cert.moves_blocks],
        "orbit": list(cert.orbit_serials),
        "f_vector": {
            "clique_counts": list(cert.f_vector.clique_counts),
            "degrees": list(cert.f_vector.degrees),
            "checks": list(cert.f_vector.checks),
            "pass": cert.f_vector.passed,
        },
        "bad_faces": {
            "signatures": {
                _sig_key(sig): [list(f) for f in faces]
                for sig, faces in sorted(cert.bad_faces.items())
            },
            "pass": cert.bad_faces_passed,
        },
        "verdicts": {
            "rows": [_verdict_row_doc(r) for r in cert.verdict_rows],
            "n_faces": len({r.face for r in cert.verdict_rows}),
            "n_states": len(cert.orbit_serials),
        },
        "evidence": {k: cert.evidence[k] for k in sorted(cert.evidence)},
        "shared_evidence": {
            k: cert.shared_evidence[k] for k in sorted(cert.shared_evidence)
        },
        "cusps": {"rows": [_cusp_row_doc(r) for r in cert.cusp_rows]},
        "euler": _euler_doc(cert.euler),
        "failures": list(cert.failures),
        "timings": (
            {k: round(v, 6) for k, v in sorted(cert.timings.items())}
            if include_timings
            else None
        ),
    }
    if cert.generic_inputs is not None:
        doc["inputs"] = cert.generic_inputs
    return doc


def document_to_json(doc: dict) -> str:
    # compact and canonical: fixed key order from document assembly
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=True) + "\n"


def render_text(cert: Certificate) -> str:
    lines = []
    add = lines.append
    add(f"subject: {cert.subject}")
    add(cert.summary_line())
    add("")
    add("-- structure --")
    add(f"polytope: {cert.polytope_name}, dimension {cert.dimension}, "
        f"{len(cert.facet_ids)} facets")
    add(f"clique counts by size: {list(cert.f_vector.clique_counts)}")
    degs = set(cert.f_vector.degrees)
    add(f"facet degrees: {sorted(degs)}")
    for line in cert.f_vector.checks:
        add("  " + line)
    add("")
    add("-- moves and orbit --")
    add(f"moves: {len(cert.moves_blocks)} blocks, sizes "
        f"{[len(b) for b in cert.moves_blocks]}")
    add(f"orbit size: {len(cert.orbit_serials)}")
    add("")
    add("-- bad faces --")
    if cert.bad_faces:
        for sig, faces in sorted(cert.bad_faces.items()):
            add(f"  signature ({_sig_key(sig)}): {len(faces)} faces")
    else:
        add("  none")
    if cert.bad_faces_passed is not None:
        add(f"  signature set check: {'PASS' if cert.bad_faces_passed else 'FAIL'}")
    add("")
    add("-- verdicts --")
    n_faces = len({r.face for r in cert.verdict_rows})
    n_states = len(cert.orbit_serials)
    add(f"coverage: {n_faces} faces x {n_states} states = {n_faces * n_states} "
        f"pairs in {len(cert.verdict_rows)} classes")
    hist = Counter(r.verdict for r in cert.verdict_rows)
    for verdict in sorted(hist):
        add(f"  {verdict}: {hist[verdict]} classes")
    branches = Counter(r.branch for r in cert.verdict_rows)
    for branch in sorted(branches):
        add(f"  via {branch}: {branches[branch]}")
    add("")
    add("-- cusps --")
    if cert.cusp_rows:
        ok = sum(1 for r in cert.cusp_rows if r.ok)
        reg = sum(1 for r in cert.cusp_rows if r.all_regular)
        add(f"condition holds: {ok}/{len(cert.cusp_rows)} (cusp, state) pairs")
        add(f"boundary cubes all Regular: {reg}/{len(cert.cusp_rows)}")
    else:
        add("  no ideal vertices")
    add("")
    add("-- consistency identity --")
    e = cert.euler
    add(f"chi per copy = {e.chi_per_copy}; "
        f"critical vertices = {e.critical_count} "
        f"(per copy {e.critical_per_copy}); "
        f"identity {'holds' if e.passed else 'FAILS'}")
    if cert.failures:
        add("")
        add("-- failures --")
        for f in cert.failures:
            add("  " + f)
    if cert.timings:
        add("")
        add("-- timings (seconds) --")
        for k, v in sorted(cert.timings.items()):
            add(f"  {k}: {v:.2f}")
    add("")
    add(f"result: {'CERTIFIED' if cert.passed else 'NOT CERTIFIED'}")
    return "\n".join(lines) + "\n"


def emit_report(
    cert: Certificate, format: str = "text", *, include_timings: bool = False
) -> str:
    """Render a certificate; `format` is "text" or "structured" (JSON)."""
    if format == "text":
        return render_text(cert)
    if format == "structured":
        return document_to_json(
            certificate_to_document(cert, include_timings=include_timings)
        )
    raise ValueError(f"unknown format {format!r}")
