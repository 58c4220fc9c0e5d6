"""Machine-checkable covering certificates.

A certificate proves ``Closure(U) subset Union_b f_b(Interior(U))`` for a
closed box U by exhibiting a finite partition of U into sub-boxes (leaves)
and, per leaf, one witness branch whose exact inverse image fits inside U
shrunk by a positive margin.  The margin is the quantitative robustness
radius: any perturbation of the inverse branches smaller than it keeps the
covering valid.

Certification is semi-decidable by subdivision: success is a proof,
failure (depth exhausted) is inconclusive and reports the offending
sub-box for diagnosis.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

from . import linalg
from .boxes import Box, Interval
from .errors import CertificateFormatError, DegenerateInputError, SingularMatrixError
from .ifs import AffineMap, IFSystem
from .rational import rat, rat_str

DEFAULT_MAX_DEPTH = 24


def inverse_image_box(f: AffineMap, box: Box) -> Box:
    """Box enclosure of f^{-1}(box) by exact interval evaluation.

    The enclosure is the exact inverse image when the inverse matrix is
    diagonal (in particular for every 1-d map); otherwise a superset,
    which keeps the certificate sound.
    """
    if box.dim != f.dim:
        raise DegenerateInputError("box dimension does not match the map")
    try:
        inv = linalg.inverse(f.matrix)
    except SingularMatrixError:
        raise SingularMatrixError("branch matrix is singular") from None
    shifted = [
        Interval(iv.lo - t, iv.hi - t) for iv, t in zip(box.intervals, f.offset)
    ]
    out = []
    for row in inv:
        lo = Fraction(0)
        hi = Fraction(0)
        for a, iv in zip(row, shifted):
            img = iv.scale_add(a, Fraction(0))
            lo += img.lo
            hi += img.hi
        out.append(Interval(lo, hi))
    return Box(out)


@dataclass(frozen=True)
class Certificate:
    system: IFSystem
    target: Box
    margin: Fraction
    max_depth: int
    leaves: Tuple[Tuple[Box, str], ...]

    @property
    def depth_used(self) -> int:
        # leaf depth is recoverable from volumes (each bisection halves);
        # capped by max_depth so hostile zero-volume leaves cannot spin
        v = self.target.volume()
        depths = []
        for leaf, _ in self.leaves:
            d = 0
            lv = leaf.volume()
            while lv < v and d < self.max_depth:
                lv *= 2
                d += 1
            depths.append(d)
        return max(depths, default=0)


@dataclass(frozen=True)
class CoveringFailure:
    """Inconclusive outcome: no single witness at max depth for this box."""

    witness_box: Box
    max_depth: int


CoveringOutcome = Union[Certificate, CoveringFailure]


def certify_covering(
    sys: IFSystem,
    target: Box,
    margin,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> CoveringOutcome:
    """Depth-first subdivision certifier.

    Leaves are emitted in deterministic depth-first order (lower bisection
    half first); the witness is the first alphabet symbol whose inverse
    image fits in the shrunk target.
    """
    margin = rat(margin)
    if margin <= 0:
        raise DegenerateInputError("margin must be positive")
    if target.dim != sys.dim:
        raise DegenerateInputError("target box dimension does not match the system")
    shrunk = target.shrink(margin)  # raises DegenerateInputError if too thin

    leaves: List[Tuple[Box, str]] = []
    stack: List[Tuple[Box, int]] = [(target, 0)]
    while stack:
        box, depth = stack.pop()
        witness = next(
            (
                b
                for b in sys.alphabet
                if shrunk.contains_box(inverse_image_box(sys.maps[b], box))
            ),
            None,
        )
        if witness is not None:
            leaves.append((box, witness))
            continue
        if depth >= max_depth:
            return CoveringFailure(witness_box=box, max_depth=max_depth)
        lo_half, hi_half = box.bisect()
        stack.append((hi_half, depth + 1))
        stack.append((lo_half, depth + 1))
    return Certificate(
        system=sys,
        target=target,
        margin=margin,
        max_depth=max_depth,
        leaves=tuple(leaves),
    )


def _leaves_partition(target: Box, leaves: Sequence[Box]) -> bool:
    """Exact partition check: containment, disjoint interiors, full volume.

    Finitely many closed sub-boxes of U with pairwise disjoint interiors
    and total volume equal to vol(U) cover U entirely, so this is an exact
    verification of the partition claim.
    """
    if not leaves:
        return False
    vol = Fraction(0)
    for leaf in leaves:
        if not target.contains_box(leaf):
            return False
        vol += leaf.volume()
    if vol != target.volume():
        return False
    for i in range(len(leaves)):
        for j in range(i + 1, len(leaves)):
            if not leaves[i].interiors_disjoint(leaves[j]):
                return False
    return True


def check_certificate(cert: Certificate) -> bool:
    """Re-verify a certificate from scratch; True iff every claim holds."""
    if not isinstance(cert, Certificate):
        raise CertificateFormatError("not a certificate")
    if cert.margin <= 0:
        return False
    try:
        shrunk = cert.target.shrink(cert.margin)
    except DegenerateInputError:
        return False
    if not _leaves_partition(cert.target, [leaf for leaf, _ in cert.leaves]):
        return False
    for leaf, witness in cert.leaves:
        if witness not in cert.system.maps:
            return False
        pre = inverse_image_box(cert.system.maps[witness], leaf)
        if not shrunk.contains_box(pre):
            return False
    return True


# --- one-dimensional window covers -----------------------------------------
#
# Same subdivision engine, but the witness test is direct containment of
# the leaf in one of finitely many open windows (shrunk by the margin).
# Used to certify shift-map coverings in pulled-back coordinates, where
# the "branches" are ranges of an affine functional rather than inverse
# maps of a contraction.


@dataclass(frozen=True)
class WindowCoverCertificate:
    target: Interval
    windows: Tuple[Tuple[str, Interval], ...]
    margin: Fraction
    leaves: Tuple[Tuple[Interval, str], ...]


def certify_window_cover(
    target: Interval,
    windows: Sequence[Tuple[str, Interval]],
    margin: Fraction,
    max_depth: int = 40,
) -> Union[WindowCoverCertificate, CoveringFailure]:
    if margin <= 0:
        raise DegenerateInputError("margin must be positive")
    shrunk = [(label, win.shrink(margin)) for label, win in windows]
    leaves: List[Tuple[Interval, str]] = []
    stack: List[Tuple[Interval, int]] = [(target, 0)]
    while stack:
        iv, depth = stack.pop()
        label = next(
            (lb for lb, win in shrunk if win.contains_interval(iv)), None
        )
        if label is not None:
            leaves.append((iv, label))
            continue
        if depth >= max_depth:
            return CoveringFailure(
                witness_box=Box([iv]), max_depth=max_depth
            )
        lo_half, hi_half = iv.bisect()
        stack.append((hi_half, depth + 1))
        stack.append((lo_half, depth + 1))
    return WindowCoverCertificate(
        target=target, windows=tuple(windows), margin=margin, leaves=tuple(leaves)
    )


# --- JSON wire format -------------------------------------------------------


def _affine_to_dict(f: AffineMap) -> dict:
    return {
        "matrix": [[rat_str(e) for e in row] for row in f.matrix],
        "offset": [rat_str(e) for e in f.offset],
        "contraction": rat_str(f.contraction),
    }


def _affine_from_dict(d: dict) -> AffineMap:
    return AffineMap(
        [[rat(e) for e in row] for row in d["matrix"]],
        [rat(e) for e in d["offset"]],
        rat(d["contraction"]),
    )


def system_to_dict(sys: IFSystem) -> dict:
    return {
        "alphabet": list(sys.alphabet),
        "maps": {s: _affine_to_dict(sys.maps[s]) for s in sys.alphabet},
    }


def system_from_dict(d: dict) -> IFSystem:
    return IFSystem(
        tuple(d["alphabet"]),
        {s: _affine_from_dict(m) for s, m in d["maps"].items()},
    )


def box_to_list(box: Box) -> list:
    return [[rat_str(iv.lo), rat_str(iv.hi)] for iv in box.intervals]


def box_from_list(entries: Sequence) -> Box:
    return Box([Interval.of(lo, hi) for lo, hi in entries])


def certificate_to_dict(cert: Certificate, verified: bool) -> dict:
    return {
        "system": system_to_dict(cert.system),
        "box": box_to_list(cert.target),
        "margin": rat_str(cert.margin),
        "depth": cert.max_depth,
        "leaves": [
            {"box": box_to_list(leaf), "witness": witness}
            for leaf, witness in cert.leaves
        ],
        "verified": verified,
    }


def certificate_from_dict(d: dict) -> Certificate:
    try:
        return Certificate(
            system=system_from_dict(d["system"]),
            target=box_from_list(d["box"]),
            margin=rat(d["margin"]),
            max_depth=int(d["depth"]),
            leaves=tuple(
                (box_from_list(leaf["box"]), str(leaf["witness"]))
                for leaf in d["leaves"]
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CertificateFormatError(f"malformed certificate: {exc}") from exc
