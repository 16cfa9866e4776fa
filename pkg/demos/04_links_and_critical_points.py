"""Dual-cube lifts, ascending/descending links, and the eight critical classes.

A codimension-6 bad vertex is dual to a 6-cube that splits into three
monochromatic squares.  Its face links are 2-spheres; the engine certifies
the index by collapsing both links onto subdivided cross-polytope cores.
"""

from morsecert import (
    balanced_states_p6,
    betti_mod2,
    build_cube_model,
    build_p6,
    classify_link,
    face_links_oracle,
    move_system_p6,
)
from morsecert.links import CriticalLinkCertifier
from morsecert.states import classify_bad_faces

P = build_p6()
m = move_system_p6()
s = balanced_states_p6(P)[0]

# a monochromatic square: checkerboard lift, barycentre value (0, 2)
F = P.face({"1+i+j+k", "-1+i+j+k"})
model = build_cube_model(P, m, s, F)
print("monochromatic square vertex lifts:", model.lift.vertex_lift)
asc, desc = face_links_oracle(model)
print("ascending face link:", len(asc.vertices), "isolated points;",
      "descending collapses to S^0")

# one of the eight all-pairs vertices
bad = classify_bad_faces(P, m)
V = bad[(2, 2, 2)][0]
print("\nbad vertex:", sorted(V.defining))
model = build_cube_model(P, m, s, V)
print("blocks pair up the coordinates:", model.lift.blocks)
asc, desc = face_links_oracle(model)
print("face links are 2-spheres:", betti_mod2(asc, 2), betti_mod2(desc, 2))

certifier = CriticalLinkCertifier(seed=0, restarts=8)
lc = classify_link(P, m, s, V, certifier=certifier)
print("verdict:", lc.verdict, "of index", lc.index, "via", lc.branch)
shared = lc.critical
print("collapse certificates:",
      len(shared.asc_outcome.sequence), "ascending steps,",
      len(shared.desc_outcome.sequence), "descending steps,",
      "cores are subdivided cross-polytope boundaries")

# good faces and legal bad faces are Regular
good = classify_link(P, m, s, P.face({"A", "1+i+j+k"}), certifier=certifier)
print("\na good face:", good.verdict, "via", good.branch)
ridge = classify_link(P, m, s, F, certifier=certifier)
print("a bad ridge:", ridge.verdict, "via", ridge.branch)
