"""Quaternion label algebra for the facets of the 27- and 16-facet polytopes.

Facets carry string labels: the eight units "1", "-1", "i", ..., "-k", the
sixteen sign patterns "1+i+j+k", ..., "-1-i-j-k" (standing for the half
quaternions (±1±i±j±k)/2), and the three extra symbols "A", "B", "C".  All
arithmetic is exact over Fraction, so every derived relation is integral
truth, not floating point.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Tuple

from .errors import InputError

Quat = Tuple[Fraction, Fraction, Fraction, Fraction]

HALF = Fraction(1, 2)

UNIT_LABELS = ("1", "-1", "i", "-i", "j", "-j", "k", "-k")

_UNIT_QUATS = {
    "1": (1, 0, 0, 0),
    "-1": (-1, 0, 0, 0),
    "i": (0, 1, 0, 0),
    "-i": (0, -1, 0, 0),
    "j": (0, 0, 1, 0),
    "-j": (0, 0, -1, 0),
    "k": (0, 0, 0, 1),
    "-k": (0, 0, 0, -1),
}


def sign_label(signs: Tuple[int, int, int, int]) -> str:
    parts = ["1" if signs[0] > 0 else "-1"]
    for s, sym in zip(signs[1:], "ijk"):
        parts.append(("+" if s > 0 else "-") + sym)
    return "".join(parts)


def _all_sign_labels() -> tuple:
    out = []
    for s0 in (1, -1):
        for s1 in (1, -1):
            for s2 in (1, -1):
                for s3 in (1, -1):
                    out.append(sign_label((s0, s1, s2, s3)))
    return tuple(out)


SIGN_LABELS = _all_sign_labels()
T24_LABELS = UNIT_LABELS + SIGN_LABELS
SPECIAL_LABELS = ("A", "B", "C")
ALL_LABELS = T24_LABELS + SPECIAL_LABELS


def label_signs(label: str) -> Tuple[int, int, int, int]:
    """Sign pattern of a 16-type label like '-1+i-j+k'."""
    if label not in SIGN_LABELS:
        raise InputError(f"not a sign label: {label!r}")
    s0 = -1 if label.startswith("-") else 1
    rest = label[2:] if s0 < 0 else label[1:]
    signs = [s0]
    for sym in "ijk":
        idx = rest.index(sym)
        signs.append(-1 if rest[idx - 1] == "-" else 1)
    return tuple(signs)


def label_quat(label: str) -> Quat:
    """Quaternion of a T24 label; units are integral, sign labels are halves."""
    if label in _UNIT_QUATS:
        return tuple(Fraction(x) for x in _UNIT_QUATS[label])
    return tuple(HALF * s for s in label_signs(label))


def quat_label(q: Quat) -> str:
    for lbl in T24_LABELS:
        if label_quat(lbl) == tuple(q):
            return lbl
    raise InputError(f"quaternion {q!r} is not a T24 element")


def quat_mul(p: Quat, q: Quat) -> Quat:
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return (
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    )


def quat_conj(q: Quat) -> Quat:
    return (q[0], -q[1], -q[2], -q[3])


def euclid4(p: Quat, q: Quat) -> Fraction:
    return sum(a * b for a, b in zip(p, q))


def minus_count(label: str) -> int:
    """Number of minus signs in a 16-type label."""
    return sum(1 for s in label_signs(label) if s < 0)


def iota_label(label: str) -> str:
    """The involution (x1,x2,x3,x4) -> (x1,-x2,-x4,-x3) on labels; swaps B and C."""
    if label == "A":
        return "A"
    if label == "B":
        return "C"
    if label == "C":
        return "B"
    x1, x2, x3, x4 = label_quat(label)
    return quat_label((x1, -x2, -x4, -x3))


BASE_POINT_LABELS = ("1", "1-i+j-k", "1+i+j-k")


def base_unit(label: str) -> str:
    """Unit class of a T24 label: the q in Q8 with label = q * base point.

    The three base points are pairwise adjacent and invariant under the
    involution; every T24 element factors uniquely as q * base with q a unit.
    """
    t = label_quat(label)
    found = None
    for bp in BASE_POINT_LABELS:
        q = quat_mul(t, quat_conj(label_quat(bp)))
        lbl = None
        for u in UNIT_LABELS:
            if label_quat(u) == q:
                lbl = u
                break
        if lbl is not None:
            if found is not None:
                raise InputError(f"{label!r} factors over two base points")
            found = lbl
    if found is None:
        raise InputError(f"{label!r} does not factor over the base points")
    return found


def t24_adjacent(a: str, b: str) -> bool:
    """Adjacency rule for two T24-labelled facets: non-negative 4-dot product."""
    return euclid4(label_quat(a), label_quat(b)) >= 0
