import json
from fractions import Fraction

import pytest

from morsecert.certify import (
    certify_generic,
    certify_p5,
    euler_identity,
)
from morsecert.cli import main
from morsecert.errors import InputError
from morsecert.io import (
    load_moves,
    load_polytope,
    load_state,
    moves_from_doc,
    p6_input_documents,
    polytope_from_doc,
    state_from_doc,
    write_json,
)
from morsecert.report import certificate_to_document, document_to_json, emit_report
from morsecert.verify import verify_document


def square_inputs():
    """A right-angled square with a sparse move system (a 2-torus fibration)."""
    polytope = {
        "name": "square",
        "dimension": 2,
        "facets": [{"id": f} for f in "abcd"],
        "adjacency": [["a", "b"], ["b", "c"], ["c", "d"], ["d", "a"]],
    }
    moves = [["a", "c"], ["b", "d"]]
    state = {"a": "I", "b": "I", "c": "O", "d": "O"}
    return polytope, moves, state


# -- euler identity ------------------------------------------------------------


def test_euler_identity_p6(P6, M6):
    rec = euler_identity(P6, M6)
    assert rec.chi_per_copy == Fraction(-1, 8)
    assert rec.critical_count == 8
    assert rec.critical_per_copy == Fraction(8, 64)
    assert rec.passed


def test_euler_identity_p5(P5, M5):
    rec = euler_identity(P5, M5)
    assert rec.chi_per_copy == 0
    assert rec.critical_count == 0
    assert rec.passed


def test_euler_identity_sparse_square():
    pol, moves, state = square_inputs()
    P = polytope_from_doc(pol)
    m = moves_from_doc(moves, P)
    rec = euler_identity(P, m)
    assert rec.chi_per_copy == 0 and rec.critical_count == 0 and rec.passed


# -- pipelines -------------------------------------------------------------------


def test_certify_p5_properties(cert_p5):
    assert cert_p5.passed
    assert cert_p5.subject == "P5_fibration"
    assert len(cert_p5.orbit_serials) == 16
    assert all(r.verdict == "Regular" for r in cert_p5.verdict_rows)
    assert len(cert_p5.cusp_rows) == 160
    assert all(r.ok and r.all_regular for r in cert_p5.cusp_rows)


def test_certify_p6_properties(cert_p6):
    assert cert_p6.passed
    assert cert_p6.subject == "P6_perfect_morse"
    assert len(cert_p6.orbit_serials) == 32
    verdicts = {r.verdict for r in cert_p6.verdict_rows}
    assert verdicts == {"Regular", "Critical(3)"}
    crit = [r for r in cert_p6.verdict_rows if r.verdict == "Critical(3)"]
    assert len(crit) == 8
    assert all(len(r.state_indices) == 32 for r in crit)


def test_certify_generic_sparse_square(tmp_path):
    pol, moves, state = square_inputs()
    P = polytope_from_doc(pol)
    m = moves_from_doc(moves, P)
    s = state_from_doc(state, P)
    cert = certify_generic(
        P, m, s, mode="fibration",
        generic_inputs={"polytope": pol, "moves": moves, "state": state},
    )
    assert cert.passed
    assert cert.bad_faces == {}  # sparse moves: no bad proper faces
    assert len(cert.orbit_serials) == 4
    ok, msgs = verify_document(certificate_to_document(cert))
    assert ok, msgs


def test_certify_generic_incompatible_state():
    pol, moves, _ = square_inputs()
    pol["adjacency"].append(["a", "c"])  # make the same-move pair adjacent
    P = polytope_from_doc(pol)
    m = moves_from_doc(moves, P)
    s = state_from_doc({"a": "I", "b": "I", "c": "O", "d": "O"}, P)
    with pytest.raises(InputError, match="incompatible"):
        certify_generic(P, m, s)


def test_parallel_matches_serial():
    serial = certify_p5(restarts=8)
    parallel = certify_p5(restarts=8, parallel=2)
    assert certificate_to_document(serial) == certificate_to_document(parallel)


# -- reports ---------------------------------------------------------------------


def test_summary_lines(cert_p6, cert_p5):
    assert cert_p6.summary_line() == (
        "P6: PERFECT MORSE CERTIFIED (all links Regular or Critical(3))"
    )
    assert cert_p5.summary_line() == "P5: FIBRATION CERTIFIED (all links Regular)"


def test_text_report_sections(cert_p6):
    text = emit_report(cert_p6, "text")
    assert "PERFECT MORSE CERTIFIED" in text
    assert "-- consistency identity --" in text
    assert "chi per copy = -1/8" in text
    assert "result: CERTIFIED" in text


def test_structured_report_fields(cert_p6):
    doc = certificate_to_document(cert_p6)
    for key in (
        "version", "subject", "inputs_digest", "f_vector", "bad_faces",
        "verdicts", "cusps", "euler", "seeds", "timings",
    ):
        assert key in doc
    assert doc["timings"] is None  # byte-reproducible by default
    assert doc["euler"]["chi_per_copy"] == [-1, 8]
    with_t = certificate_to_document(cert_p6, include_timings=True)
    assert isinstance(with_t["timings"], dict)


def test_structured_report_deterministic():
    a = document_to_json(certificate_to_document(certify_p5(restarts=8)))
    b = document_to_json(certificate_to_document(certify_p5(restarts=8)))
    assert a == b


def test_report_json_roundtrip(cert_p5):
    doc = certificate_to_document(cert_p5)
    assert json.loads(document_to_json(doc)) == doc


# -- verify ----------------------------------------------------------------------


def test_verify_passing_reports(cert_p5, cert_p6):
    for cert in (cert_p5, cert_p6):
        ok, msgs = verify_document(
            json.loads(document_to_json(certificate_to_document(cert)))
        )
        assert ok, msgs


def test_verify_detects_tampered_sequence(cert_p5):
    doc = json.loads(document_to_json(certificate_to_document(cert_p5)))
    for eid, ev in doc["evidence"].items():
        if ev["kind"] == "legality" and ev["out_sequence"]:
            ev["out_sequence"] = ev["out_sequence"][1:]  # drop a step
            break
    ok, msgs = verify_document(doc)
    assert not ok
    assert any("replay" in m or "reach a point" in m for m in msgs)


def test_verify_detects_tampered_verdict(cert_p5):
    doc = json.loads(document_to_json(certificate_to_document(cert_p5)))
    row = next(r for r in doc["verdicts"]["rows"] if r["branch"] == "good-face")
    row["face"] = doc["verdicts"]["rows"][0]["face"][:1]  # nonsense face
    ok, _ = verify_document(doc)
    assert not ok


def test_verify_detects_missing_coverage(cert_p5):
    doc = json.loads(document_to_json(certificate_to_document(cert_p5)))
    doc["verdicts"]["rows"] = doc["verdicts"]["rows"][:-1]
    ok, msgs = verify_document(doc)
    assert not ok


def test_verify_rejects_failing_report(cert_p5):
    doc = json.loads(document_to_json(certificate_to_document(cert_p5)))
    doc["pass"] = False
    ok, msgs = verify_document(doc)
    assert not ok


# -- io --------------------------------------------------------------------------


def test_polytope_file_roundtrip(tmp_path, P6):
    pol, moves, state = p6_input_documents()
    write_json(tmp_path / "p.json", pol)
    write_json(tmp_path / "m.json", moves)
    write_json(tmp_path / "s.json", state)
    P = load_polytope(tmp_path / "p.json")
    assert P.facet_ids == P6.facet_ids
    assert P.adjacency_pairs == P6.adjacency_pairs
    assert len(P.ideal_vertices) == 27
    m = load_moves(tmp_path / "m.json", P)
    assert tuple(len(b) for b in m.blocks) == (6, 6, 6, 6, 3)
    s = load_state(tmp_path / "s.json", P)
    assert len(s.universe) == 27


def test_polytope_doc_vector_adjacency_conflict():
    pol, _, _ = p6_input_documents()
    pol["adjacency"] = pol["adjacency"][:-1]  # remove one true pair
    with pytest.raises(InputError, match="disagrees"):
        polytope_from_doc(pol)


def test_polytope_doc_requires_adjacency_or_vectors():
    with pytest.raises(InputError, match="vectors or an adjacency"):
        polytope_from_doc(
            {"dimension": 2, "facets": [{"id": "a"}, {"id": "b"}]}
        )


def test_state_doc_validation():
    pol, _, _ = square_inputs()
    P = polytope_from_doc(pol)
    with pytest.raises(InputError, match="missing"):
        state_from_doc({"a": "I"}, P)
    with pytest.raises(InputError, match="'I' or 'O'"):
        state_from_doc({"a": "I", "b": "X", "c": "O", "d": "O"}, P)


def test_moves_doc_partition_check():
    pol, _, _ = square_inputs()
    P = polytope_from_doc(pol)
    with pytest.raises(InputError, match="partition"):
        moves_from_doc([["a", "b"]], P)


def test_parse_error_is_position_annotated(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dimension": 2,,}')
    with pytest.raises(InputError, match=r":1:\d+:"):
        load_polytope(bad)


# -- cli -------------------------------------------------------------------------


def test_cli_info():
    assert main(["info", "p5"]) == 0


def test_cli_certify_verify_roundtrip(tmp_path, capsys):
    report = tmp_path / "p5.json"
    code = main([
        "certify", "p5", "--restarts", "8",
        "--format", "structured", "--output", str(report),
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "FIBRATION CERTIFIED" in out
    assert main(["verify", str(report)]) == 0


def test_cli_generic_and_exit_codes(tmp_path, capsys):
    pol, moves, state = square_inputs()
    write_json(tmp_path / "p.json", pol)
    write_json(tmp_path / "m.json", moves)
    write_json(tmp_path / "s.json", state)
    code = main([
        "certify", "generic",
        "--polytope", str(tmp_path / "p.json"),
        "--moves", str(tmp_path / "m.json"),
        "--state", str(tmp_path / "s.json"),
        "--mode", "fibration",
    ])
    assert code == 0
    # incompatible state: exit code 2 with the violating pair on stderr
    write_json(tmp_path / "p2.json", {
        "name": "sq",
        "dimension": 2,
        "facets": [{"id": f} for f in "abcd"],
        "adjacency": [["a", "b"], ["b", "c"], ["c", "d"], ["d", "a"], ["a", "c"]],
    })
    code = main([
        "certify", "generic",
        "--polytope", str(tmp_path / "p2.json"),
        "--moves", str(tmp_path / "m.json"),
        "--state", str(tmp_path / "s.json"),
    ])
    assert code == 2
    err = capsys.readouterr().err
    assert "'a'" in err and "'c'" in err
    # unreadable report: exit code 2
    assert main(["verify", str(tmp_path / "nope.json")]) == 2


def test_cli_parallel_flag(tmp_path):
    r1 = tmp_path / "a.json"
    r2 = tmp_path / "b.json"
    assert main(["certify", "p5", "--restarts", "8",
                 "--format", "structured", "--output", str(r1)]) == 0
    assert main(["certify", "p5", "--restarts", "8", "--parallel", "2",
                 "--format", "structured", "--output", str(r2)]) == 0
    assert r1.read_bytes() == r2.read_bytes()


def test_verify_detects_wrong_critical_index(cert_p6):
    doc = json.loads(document_to_json(certificate_to_document(cert_p6)))
    eid = next(
        r["evidence"] for r in doc["verdicts"]["rows"]
        if r["branch"] == "critical-pairs"
    )
    doc["evidence"][eid]["ell"] = 2
    ok, msgs = verify_document(doc)
    assert not ok
    assert any("does not match" in m or "mismatch" in m for m in msgs)


def test_certify_generic_honest_failure(tmp_path):
    """Non-sparse moves on the square: two index-1 classes per copy but zero
    Euler characteristic, so the perfect-Morse identity honestly fails."""
    pol = {
        "name": "square",
        "dimension": 2,
        "facets": [{"id": f} for f in "abcd"],
        "adjacency": [["a", "b"], ["b", "c"], ["c", "d"], ["d", "a"]],
    }
    moves = [["a", "b"], ["c", "d"]]  # adjacent same-move pairs
    state = {"a": "I", "b": "I", "c": "O", "d": "O"}  # compatible
    P = polytope_from_doc(pol)
    m = moves_from_doc(moves, P)
    s = state_from_doc(state, P)
    cert = certify_generic(P, m, s, mode="perfect")
    assert not cert.passed
    assert cert.euler.chi_per_copy == 0 and cert.euler.critical_count == 2
    assert any("identity" in f for f in cert.failures)
    crit = [r for r in cert.verdict_rows if r.verdict == "Critical(1)"]
    assert len(crit) == 2  # the two monochromatic vertices
    # a failing certificate is not verifiable
    ok, _ = verify_document(certificate_to_document(cert))
    assert not ok
    # CLI path: certification failure exits 1
    write_json(tmp_path / "p.json", pol)
    write_json(tmp_path / "m.json", moves)
    write_json(tmp_path / "s.json", state)
    code = main([
        "certify", "generic",
        "--polytope", str(tmp_path / "p.json"),
        "--moves", str(tmp_path / "m.json"),
        "--state", str(tmp_path / "s.json"),
        "--mode", "perfect",
    ])
    assert code == 1
