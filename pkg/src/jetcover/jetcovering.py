"""The jet-space covering system and the constructive realizer.

Reversing jet coordinates conjugates the two lifted maps of the standard
family to F_d: X -> J X + d T on R^N (J upper-triangular, diagonal lam,
superdiagonal N-1..1; T = e_N; d = +-1).  A scaled flat polynomial P
supplies a full-rank projection from R^n that intertwines F_d with
explicit shift maps, transporting the easy covering of the box
Delta = (-base^n, base^n) x ... x (-base, base) to an open covered set
A = projection(Delta) in jet space.

Everything here is exact: the semi-conjugacy is checked as an affine-map
identity, the Delta covering gets two independent proofs, membership in A
is an exact LP with an interiority margin, and the realizer's greedy
pullback comes with a certified residual bound that the forward-composed
continuation jet is verified against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .boxes import Box, Interval
from .covering import WindowCoverCertificate, certify_window_cover
from .errors import (
    ConstructionError,
    DegenerateInputError,
    ResourceLimitError,
    ShapeError,
)
from .flatpoly import (
    Coeffs,
    poly_eval,
    poly_nth_derivative,
    projection_matrix,
)
from .jets import Jet, continuation_jet, reverse_jet, standard_families
from .linalg import Mat, Vec
from .rational import rat

ETA_GRID = Fraction(1, 2 ** 10)

Word = Tuple[str, ...]


@dataclass(frozen=True)
class JetCoveringSystem:
    """All certified ingredients of the covered jet-space IFS.

    jet_dim:       N, the dimension of the jet space (order r = N - 1)
    lam:           shared contraction of the two base maps
    p_coeffs:      scaled flat polynomial, monic, constant term nonzero
    branch_matrix: J, linear part shared by both jet-space branches
    branch_offset: T; the branches are X -> J X + T and X -> J X - T
    projection:    N x n full-rank matrix intertwining shifts and branches
    box_base:      base > 1 of the pullback box geometry
    """

    jet_dim: int
    lam: Fraction
    p_coeffs: Coeffs
    branch_matrix: Mat
    branch_offset: Vec
    projection: Mat
    box_base: Fraction

    @property
    def n(self) -> int:
        return len(self.p_coeffs) - 1

    @property
    def order(self) -> int:
        return self.jet_dim - 1

    def coordinate_bounds(self) -> Tuple[Fraction, ...]:
        """Radius of each pullback-box coordinate, outermost first."""
        return tuple(self.box_base ** (self.n - i) for i in range(self.n))

    def pullback_box(self) -> Box:
        return Box([Interval(-r, r) for r in self.coordinate_bounds()])

    def l1_tail(self) -> Fraction:
        return sum((abs(c) for c in self.p_coeffs[:-1]), Fraction(0))


def branch_matrix(jet_dim: int, lam: Fraction) -> Mat:
    rows = []
    for i in range(jet_dim):
        row = [Fraction(0)] * jet_dim
        row[i] = lam
        if i + 1 < jet_dim:
            row[i + 1] = Fraction(jet_dim - 1 - i)
        rows.append(tuple(row))
    return tuple(rows)


def shift_map(sys: JetCoveringSystem, delta: int) -> Tuple[Mat, Vec]:
    """The affine shift on pullback coordinates intertwined with branch delta.

    (v_0, ..., v_{n-1}) -> (w_0, ..., w_{n-1}) with w_k = v_{k-1} for
    k >= 1 and w_0 = (delta - sum_{j=1..n} b_j v_{j-1}) / b_0.
    """
    if delta not in (1, -1):
        raise DegenerateInputError("branch label must be +1 or -1")
    b = sys.p_coeffs
    n = sys.n
    rows = [[Fraction(0)] * n for _ in range(n)]
    for j in range(1, n + 1):
        rows[0][j - 1] = -b[j] / b[0]
    for k in range(1, n):
        rows[k][k - 1] = Fraction(1)
    offset = [Fraction(0)] * n
    offset[0] = Fraction(delta) / b[0]
    return tuple(tuple(r) for r in rows), tuple(offset)


def _validate_polynomial(jet_dim: int, lam: Fraction, b: Coeffs) -> None:
    n = len(b) - 1
    if n < 1:
        raise DegenerateInputError("polynomial must have positive degree")
    if b[0] == 0 or b[-1] != 1:
        raise DegenerateInputError("need a monic polynomial with nonzero constant")
    l1 = sum((abs(c) for c in b[:-1]), Fraction(0))
    if l1 >= 2:
        raise DegenerateInputError(
            f"non-leading L1 norm {l1} is not below 2; contraction too small"
        )
    inv = 1 / lam
    for i in range(jet_dim):
        if poly_eval(poly_nth_derivative(b, i), inv) != 0:
            raise DegenerateInputError(
                f"derivative {i} does not vanish at 1/lam"
            )


def choose_box_base(n: int, l1_tail: Fraction) -> Fraction:
    """Deterministic grid choice of base maximizing (base+1) - base^n * l1_tail.

    The slack is concave in the base and strictly decreasing past 1 for
    admissible polynomials (their L1 tail exceeds 1), so each scan stops
    at the first decrease.  A feasible base always exists arbitrarily
    close to 1 (the inequality is strict at base = 1), but may be nearer
    than one grid step when the contraction sits close to its threshold;
    the resolution ladder 2^-10, 2^-14, ... keeps the choice reproducible
    while never missing it.
    """
    for shift in (10, 14, 18, 22, 26, 30):
        step = Fraction(1, 2 ** shift)
        best = None
        best_slack = None
        j = 1
        while True:
            base = 1 + j * step
            slack = base + 1 - base ** n * l1_tail
            if best_slack is not None and slack <= best_slack:
                break
            best, best_slack = base, slack
            j += 1
            if l1_tail <= 1 and j > 2 ** 12:  # defensive; tail > 1 in practice
                break
        if best_slack is not None and best_slack > 0:
            return best
    raise ConstructionError(
        "no grid base satisfies the covering inequality; "
        "the contraction is too close to its threshold"
    )


def build_system(
    jet_dim: int,
    lam,
    p_coeffs: Sequence[Fraction],
    box_base=None,
) -> JetCoveringSystem:
    """Assemble and exactly verify the full covering system.

    Raises on any violated invariant: the polynomial conditions, the box
    inequality, full projection rank, and the semi-conjugacy identity are
    all rechecked here regardless of how the inputs were produced.
    """
    lam = rat(lam)
    if not 0 < lam < 1:
        raise DegenerateInputError("contraction must lie in (0, 1)")
    b = tuple(rat(c) for c in p_coeffs)
    _validate_polynomial(jet_dim, lam, b)
    n = len(b) - 1
    pi = projection_matrix(b, lam, jet_dim)
    if linalg.rank(pi) != jet_dim:
        raise ConstructionError("projection is rank deficient")
    l1 = sum((abs(c) for c in b[:-1]), Fraction(0))
    base = choose_box_base(n, l1) if box_base is None else rat(box_base)
    if base <= 1:
        raise DegenerateInputError("box base must exceed 1")
    if base ** n * l1 >= base + 1:
        raise ConstructionError(
            f"box inequality fails: {base ** n * l1} >= {base + 1}"
        )
    sys = JetCoveringSystem(
        jet_dim=jet_dim,
        lam=lam,
        p_coeffs=b,
        branch_matrix=branch_matrix(jet_dim, lam),
        branch_offset=tuple(
            Fraction(1 if i == jet_dim - 1 else 0) for i in range(jet_dim)
        ),
        projection=pi,
        box_base=base,
    )
    verify_semiconjugacy(sys)
    return sys


def semiconjugacy_residuals(
    sys: JetCoveringSystem,
) -> Dict[int, Tuple[Mat, Vec]]:
    """Exact residuals of branch o projection - projection o shift, per branch."""
    out = {}
    for delta in (1, -1):
        m_shift, t_shift = shift_map(sys, delta)
        lhs_m = linalg.mat_mul(sys.branch_matrix, sys.projection)
        lhs_t = tuple(delta * e for e in sys.branch_offset)
        rhs_m = linalg.mat_mul(sys.projection, m_shift)
        rhs_t = linalg.mat_vec(sys.projection, t_shift)
        out[delta] = (
            linalg.mat_sub(lhs_m, rhs_m),
            linalg.vec_sub(lhs_t, rhs_t),
        )
    return out


def verify_semiconjugacy(sys: JetCoveringSystem) -> Dict[int, Tuple[Mat, Vec]]:
    """Contract: both residuals identically zero; raises naming the first violation."""
    residuals = semiconjugacy_residuals(sys)
    for delta, (mat_res, vec_res) in residuals.items():
        for i, row in enumerate(mat_res):
            for j, e in enumerate(row):
                if e != 0:
                    raise ConstructionError(
                        f"semi-conjugacy residual matrix[{i}][{j}] = {e} "
                        f"for branch {delta:+d}"
                    )
        for i, e in enumerate(vec_res):
            if e != 0:
                raise ConstructionError(
                    f"semi-conjugacy residual offset[{i}] = {e} "
                    f"for branch {delta:+d}"
                )
    return residuals


@dataclass(frozen=True)
class DeltaCoveringCertificate:
    """Two independent proofs that the shifts cover the pullback box.

    analytic: the exact scalar inequality base^n * l1_tail < base + 1 with
    base > 1 (each point of the closed box then admits a branch whose new
    leading coordinate stays strictly inside).
    subdivision: a window cover of the exact range of the branch
    functional s(u) = sum b_j u_j by the two admissible windows
    (d - base, d + base).
    """

    box_base: Fraction
    l1_tail: Fraction
    inequality_lhs: Fraction
    inequality_rhs: Fraction
    functional_range: Interval
    window_cover: WindowCoverCertificate


def certify_delta_covering(sys: JetCoveringSystem) -> DeltaCoveringCertificate:
    base = sys.box_base
    l1 = sys.l1_tail()
    lhs = base ** sys.n * l1
    rhs = base + 1
    if not (base > 1 and lhs < rhs):
        raise ConstructionError(
            f"analytic covering proof fails: base {base}, {lhs} !< {rhs}"
        )
    bounds = sys.coordinate_bounds()
    reach = sum(
        (abs(sys.p_coeffs[j]) * bounds[j] for j in range(sys.n)), Fraction(0)
    )
    windows = [
        ("+", Interval(1 - base, 1 + base)),
        ("-", Interval(-1 - base, -1 + base)),
    ]
    margin = min((rhs - reach) / 2, (base - 1) / 2)
    if margin <= 0:
        raise ConstructionError("no positive margin for the window cover")
    cover = certify_window_cover(
        Interval(-reach, reach), windows, margin, max_depth=64
    )
    if not isinstance(cover, WindowCoverCertificate):
        raise ConstructionError(
            f"window subdivision failed around {cover.witness_box}"
        )
    return DeltaCoveringCertificate(
        box_base=base,
        l1_tail=l1,
        inequality_lhs=lhs,
        inequality_rhs=rhs,
        functional_range=Interval(-reach, reach),
        window_cover=cover,
    )


# --- membership and realization ----------------------------------------------


@dataclass(frozen=True)
class MembershipResult:
    certified: bool
    witness: Optional[Vec] = None
    margin: Optional[Fraction] = None


def certify_membership(
    sys: JetCoveringSystem, target: Jet, slack=0
) -> MembershipResult:
    """Exact LP: is the reversed jet the projection of an interior box point?

    Maximizes the uniform coordinate margin t of a preimage inside the
    pullback box shrunk by ``slack``.  Not certified does not disprove
    membership: the jet may sit within ``slack`` of the boundary.
    """
    from .simplex import LPProblem, lp_solve  # local import to avoid cycles

    slack = rat(slack)
    if slack < 0:
        raise DegenerateInputError("slack must be >= 0")
    if target.dim != 1 or target.order != sys.order:
        raise ShapeError(
            f"target must be a dim-1 jet of order {sys.order}"
        )
    x = reverse_jet(target).flat()
    n = sys.n
    bounds = sys.coordinate_bounds()
    # variables: u_0..u_{n-1} (free), t, s_0..s_{2n-1} (slacks); minimize -t
    nvars = n + 1 + 2 * n
    objective = [Fraction(0)] * nvars
    objective[n] = Fraction(-1)
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    for i in range(sys.jet_dim):
        row = [Fraction(0)] * nvars
        for k in range(n):
            row[k] = sys.projection[i][k]
        rows.append(row)
        rhs.append(x[i])
    for i in range(n):
        for sign in (1, -1):
            row = [Fraction(0)] * nvars
            row[i] = Fraction(sign)
            row[n] = Fraction(1)
            row[n + 1 + 2 * i + (0 if sign > 0 else 1)] = Fraction(1)
            rows.append(row)
            rhs.append(bounds[i] - slack)
    nonneg = [False] * n + [True] * (1 + 2 * n)
    sol = lp_solve(LPProblem(objective, rows, rhs, nonneg))
    if not sol.is_optimal:
        return MembershipResult(certified=False)
    witness = tuple(sol.primal[:n])
    return MembershipResult(certified=True, witness=witness, margin=sol.primal[n])


@dataclass(frozen=True)
class RealizationResult:
    itinerary: Word  # outermost-first branch labels "+" / "-"
    steps: int
    achieved_residual: Fraction
    residual_bound: Fraction

    def itinerary_string(self) -> str:
        return "".join(self.itinerary)


def projection_reach(sys: JetCoveringSystem) -> Fraction:
    """Exact sup-norm bound of the projected pullback box (it is centered)."""
    bounds = sys.coordinate_bounds()
    return max(
        sum((abs(row[k]) * bounds[k] for k in range(sys.n)), Fraction(0))
        for row in sys.projection
    )


def residual_bound(sys: JetCoveringSystem, k: int) -> Fraction:
    """norm(J^k) * reach: certified distance after k pullback steps."""
    if k < 0:
        raise DegenerateInputError("k must be >= 0")
    power = linalg.identity(sys.jet_dim)
    for _ in range(k):
        power = linalg.mat_mul(power, sys.branch_matrix)
    return linalg.inf_norm_mat(power) * projection_reach(sys)


def greedy_pullback_step(
    sys: JetCoveringSystem, u: Sequence[Fraction]
) -> Tuple[int, Vec]:
    """One inverse-shift step; prefers branch +1, guaranteed feasible.

    Appends u_new = delta - sum b_j u_j and drops the leading coordinate;
    infeasibility of both branches contradicts the certified covering and
    trips the bug trap.
    """
    b = sys.p_coeffs
    base = sys.box_base
    s = sum((b[j] * u[j] for j in range(sys.n)), Fraction(0))
    for delta in (1, -1):
        appended = delta - s
        if abs(appended) < base:
            return delta, tuple(u[1:]) + (appended,)
    raise ConstructionError(
        f"no feasible branch at functional value {s}; covering violated"
    )


def realize_jet(
    sys: JetCoveringSystem,
    target: Jet,
    tol,
    max_steps: int = 10_000,
) -> RealizationResult:
    """Constructively realize a certified-interior jet as a continuation jet.

    Chooses the smallest k whose residual bound meets tol, runs k greedy
    pullback steps from the membership witness, then forward-verifies:
    the continuation jet of the collected word differs from the target by
    at most the certified bound, exactly.
    """
    tol = rat(tol)
    if tol <= 0:
        raise DegenerateInputError("tolerance must be positive")
    membership = certify_membership(sys, target, slack=0)
    if not membership.certified or membership.margin <= 0:
        raise DegenerateInputError(
            "target jet is not certified interior to the covered set"
        )
    reach = projection_reach(sys)
    power = linalg.identity(sys.jet_dim)
    k = 0
    bound = linalg.inf_norm_mat(power) * reach
    while bound > tol:
        if k >= max_steps:
            raise ResourceLimitError(
                f"tolerance {tol} unreachable within {max_steps} steps"
            )
        power = linalg.mat_mul(power, sys.branch_matrix)
        k += 1
        bound = linalg.inf_norm_mat(power) * reach

    u = membership.witness
    word: List[str] = []
    for _ in range(k):
        delta, u = greedy_pullback_step(sys, u)
        word.append("+" if delta == 1 else "-")

    families = standard_families(sys.lam, sys.order)
    if k == 0:
        realized = Jet.zero(sys.order)
    else:
        realized = continuation_jet(families, word, sys.order)
    diff = target - realized
    achieved = max(
        (abs(row[0]) for row in diff.coeffs), default=Fraction(0)
    )
    if achieved > bound:
        raise ConstructionError(
            f"forward verification failed: residual {achieved} > bound {bound}"
        )
    return RealizationResult(
        itinerary=tuple(word),
        steps=k,
        achieved_residual=achieved,
        residual_bound=bound,
    )


def auto_lambda(threshold: Fraction) -> Fraction:
    """Deterministic contraction choice above a threshold: a quarter of the
    way to 1, rounded up to the 2^-10 grid (keeps denominators small)."""
    raw = threshold + (1 - threshold) / 4
    grid = 2 ** 10
    num = -((-raw.numerator * grid) // raw.denominator)  # ceil
    lam = Fraction(num, grid)
    if lam >= 1:
        lam = (threshold + 1) / 2
    return lam
