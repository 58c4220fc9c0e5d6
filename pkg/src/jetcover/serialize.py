"""Canonical JSON wire formats and atomic file output.

Every JSON document is emitted with sorted keys, two-space indent, ASCII
escapes, and a trailing newline, so identical inputs give byte-identical
files.  Rationals travel as "p/q" strings; only explicitly approximate
payloads (the finite-difference oracle) carry floats.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Optional, Sequence

from .blender import BlenderCoverResult, NearlyAffineReport
from .covering import (
    Certificate,
    CoveringFailure,
    box_to_list,
    certificate_from_dict,
    certificate_to_dict,
)
from .errors import CertificateFormatError
from .flatpoly import FlatPolyResult
from .jetcovering import (
    DeltaCoveringCertificate,
    JetCoveringSystem,
    RealizationResult,
)
from .jets import Jet
from .rational import rat, rat_str


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def write_atomic(path: str, data) -> None:
    """Write bytes or text via a temp file and rename, never a partial file."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    mode = "wb" if isinstance(data, (bytes, bytearray)) else "w"
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".jetcover-")
    try:
        with os.fdopen(fd, mode) as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- jets ---------------------------------------------------------------------


def jet_to_payload(jet: Jet) -> dict:
    if jet.dim == 1:
        coeffs = [rat_str(row[0]) for row in jet.coeffs]
    else:
        coeffs = [[rat_str(e) for e in row] for row in jet.coeffs]
    return {"order": jet.order, "dim": jet.dim, "coeffs": coeffs}


def jet_from_payload(payload: dict) -> Jet:
    try:
        coeffs = payload["coeffs"]
        rows = [
            [rat(e) for e in (row if isinstance(row, list) else [row])]
            for row in coeffs
        ]
        return Jet(rows)
    except (KeyError, TypeError, ValueError) as exc:
        raise CertificateFormatError(f"malformed jet: {exc}") from exc


def approximate_jet_payload(values: Sequence[float]) -> dict:
    return {"approximate": True, "coeffs": [float(v) for v in values]}


# --- covering certificates ------------------------------------------------------


def covering_outcome_payload(outcome) -> dict:
    if isinstance(outcome, Certificate):
        return certificate_to_dict(outcome, verified=True)
    if isinstance(outcome, CoveringFailure):
        return {
            "verified": False,
            "witness_box": box_to_list(outcome.witness_box),
            "depth": outcome.max_depth,
        }
    raise CertificateFormatError("not a covering outcome")


def load_certificate(payload: dict) -> Certificate:
    return certificate_from_dict(payload)


# --- flat polynomials -----------------------------------------------------------


def flat_poly_payload(res: FlatPolyResult) -> dict:
    return {
        "flatness": res.flatness,
        "coeffs": [rat_str(c) for c in res.coeffs],
        "degree": res.degree,
        "optimum": rat_str(res.optimum),
        "l1_nonleading": rat_str(res.l1_nonleading),
        "dual_certificate": [rat_str(y) for y in res.dual],
        "search_degree": res.search_degree,
        "history": [[n, rat_str(v)] for n, v in res.history],
    }


# --- jet covering systems --------------------------------------------------------


def jet_system_payload(
    sys: JetCoveringSystem,
    delta_cover: Optional[DeltaCoveringCertificate] = None,
) -> dict:
    payload = {
        "jet_dim": sys.jet_dim,
        "order": sys.order,
        "lam": rat_str(sys.lam),
        "p_coeffs": [rat_str(c) for c in sys.p_coeffs],
        "branch_matrix": [[rat_str(e) for e in row] for row in sys.branch_matrix],
        "branch_offset": [rat_str(e) for e in sys.branch_offset],
        "projection": [[rat_str(e) for e in row] for row in sys.projection],
        "box_base": rat_str(sys.box_base),
        "pullback_box": box_to_list(sys.pullback_box()),
        "semiconjugacy_exact": True,
    }
    if delta_cover is not None:
        payload["delta_covering"] = {
            "inequality": {
                "lhs": rat_str(delta_cover.inequality_lhs),
                "rhs": rat_str(delta_cover.inequality_rhs),
                "exact": True,
            },
            "functional_range": [
                rat_str(delta_cover.functional_range.lo),
                rat_str(delta_cover.functional_range.hi),
            ],
            "window_leaves": [
                [[rat_str(iv.lo), rat_str(iv.hi)], label]
                for iv, label in delta_cover.window_cover.leaves
            ],
            "margin": rat_str(delta_cover.window_cover.margin),
        }
    return payload


def jet_system_from_payload(payload: dict) -> JetCoveringSystem:
    from .jetcovering import build_system

    try:
        return build_system(
            int(payload["jet_dim"]),
            rat(payload["lam"]),
            [rat(c) for c in payload["p_coeffs"]],
            box_base=rat(payload["box_base"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CertificateFormatError(f"malformed jet system: {exc}") from exc


def realization_payload(res: RealizationResult) -> dict:
    return {
        "itinerary": res.itinerary_string(),
        "steps": res.steps,
        "achieved_residual": rat_str(res.achieved_residual),
        "residual_bound": rat_str(res.residual_bound),
    }


# --- blender reports --------------------------------------------------------------


def blender_cover_payload(res: BlenderCoverResult) -> dict:
    return {
        "ok": res.ok,
        "base_target": [rat_str(res.base_target.lo), rat_str(res.base_target.hi)],
        "base_images": [
            {
                "branch": label,
                "image": [rat_str(iv.lo), rat_str(iv.hi)],
                "contains_target": holds,
            }
            for label, iv, holds in res.base_images
        ],
        "fiber": covering_outcome_payload(res.fiber_outcome),
    }


def nearly_affine_payload(report: NearlyAffineReport) -> dict:
    def branch(b):
        return {
            "c1_deviation": rat_str(b.deviation),
            "boundary_clear": b.boundary_clear,
            "samples": b.samples,
            "boundary_samples": b.boundary_samples,
        }

    return {
        "lam": rat_str(report.lam),
        "plus": branch(report.plus),
        "minus": branch(report.minus),
        "grid_step": rat_str(report.grid_step),
        "certified": report.certified,
    }
