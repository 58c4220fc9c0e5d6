"""Truncated jets at parameter 0 and lifts of parametric affine families.

A Jet stores raw derivatives (d^i/da^i at a = 0, *not* divided by i!), so
the product rule is the binomial Leibniz convolution and the lifted matrix
of the family a -> (lam + a) x + delta has subdiagonal entries 1..r.  The
reversal map conjugates those lifts to upper-triangular form with
superdiagonal (N-1, ..., 1); see the jet covering module.

Families here are affine in x with jet-valued coefficients, which covers
every system this package constructs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .errors import DegenerateInputError, ShapeError, UnsupportedOrderError
from .linalg import Mat, Vec
from .rational import rat


@dataclass(frozen=True)
class Jet:
    """Raw-derivative vector of a parameter-dependent point of R^dim.

    ``coeffs[i][c]`` is the i-th derivative of component c at a = 0.
    """

    order: int
    dim: int
    coeffs: Tuple[Vec, ...]

    def __init__(self, coeffs: Sequence[Sequence]):
        rows = tuple(linalg.vec(row) for row in coeffs)
        if not rows:
            raise DegenerateInputError("a jet needs at least the order-0 entry")
        if any(len(row) != len(rows[0]) for row in rows):
            raise ShapeError("ragged jet coefficients")
        object.__setattr__(self, "order", len(rows) - 1)
        object.__setattr__(self, "dim", len(rows[0]))
        object.__setattr__(self, "coeffs", rows)

    @staticmethod
    def scalar(values: Sequence) -> "Jet":
        """Dim-1 jet from a flat list of raw derivatives."""
        return Jet([[rat(v)] for v in values])

    def flat(self) -> Vec:
        if self.dim != 1:
            raise ShapeError("flat() is only for dim-1 jets")
        return tuple(row[0] for row in self.coeffs)

    @staticmethod
    def zero(order: int, dim: int = 1) -> "Jet":
        return Jet([[Fraction(0)] * dim for _ in range(order + 1)])

    def __add__(self, other: "Jet") -> "Jet":
        if (self.order, self.dim) != (other.order, other.dim):
            raise ShapeError("jet order/dim mismatch")
        return Jet(
            [linalg.vec_add(a, b) for a, b in zip(self.coeffs, other.coeffs)]
        )

    def __sub__(self, other: "Jet") -> "Jet":
        if (self.order, self.dim) != (other.order, other.dim):
            raise ShapeError("jet order/dim mismatch")
        return Jet(
            [linalg.vec_sub(a, b) for a, b in zip(self.coeffs, other.coeffs)]
        )


def jet_mul(u: Jet, v: Jet) -> Jet:
    """Leibniz product on raw derivatives.

    coeffs[i] = sum_j C(i,j) * u[j] * v[i-j], componentwise; u may be a
    dim-1 jet acting on every component of v, or match v's dim exactly.
    """
    if u.order != v.order:
        raise ShapeError(f"jet orders differ: {u.order} vs {v.order}")
    if u.dim not in (1, v.dim):
        raise ShapeError(f"jet dims incompatible: {u.dim} vs {v.dim}")
    r = u.order
    out: List[List[Fraction]] = []
    for i in range(r + 1):
        row = [Fraction(0)] * v.dim
        for j in range(i + 1):
            c = comb(i, j)
            uj = u.coeffs[j]
            vij = v.coeffs[i - j]
            for comp in range(v.dim):
                row[comp] += c * (uj[0] if u.dim == 1 else uj[comp]) * vij[comp]
        out.append(row)
    return Jet(out)


def reverse_jet(j: Jet) -> Jet:
    """Coefficient-order reversal (dim 1); an involution."""
    if j.dim != 1:
        raise ShapeError("reversal is defined for dim-1 jets")
    return Jet(tuple(reversed(j.coeffs)))


@dataclass(frozen=True)
class ParamAffineFamily1D:
    """Family a -> (x -> slope(a) * x + offset(a)) on the line.

    slope and offset are given as dim-1 jets of the coefficient functions
    at a = 0; the slope at a = 0 must be a contraction.
    """

    slope: Jet
    offset: Jet

    def __post_init__(self):
        if self.slope.dim != 1 or self.offset.dim != 1:
            raise ShapeError("coefficient jets must be one-dimensional")
        if self.slope.order != self.offset.order:
            raise ShapeError("slope/offset jets must share the order")
        if abs(self.slope.coeffs[0][0]) >= 1:
            raise DegenerateInputError("family is not contracting at a = 0")

    @property
    def order(self) -> int:
        return self.slope.order

    def at(self, a: Fraction) -> Tuple[Fraction, Fraction]:
        """Exact (slope, offset) of the polynomial representative at a.

        Raw derivatives define the degree-r Taylor polynomial
        sum_i coeffs[i] a^i / i!, which is the family member used by the
        float oracle and by exact cross-checks.
        """
        def horner(jet: Jet) -> Fraction:
            total = Fraction(0)
            fact = 1
            power = Fraction(1)
            for i, row in enumerate(jet.coeffs):
                if i > 0:
                    fact *= i
                    power *= a
                total += row[0] * power / fact
            return total

        return horner(self.slope), horner(self.offset)


def standard_family(lam, delta: int, order: int) -> ParamAffineFamily1D:
    """The family a -> (x -> (lam + a) x + delta) truncated at ``order``."""
    lam = rat(lam)
    if delta not in (1, -1):
        raise DegenerateInputError("delta must be +1 or -1")
    slope = [lam, Fraction(1)] + [Fraction(0)] * max(0, order - 1)
    offset = [Fraction(delta)] + [Fraction(0)] * order
    return ParamAffineFamily1D(Jet.scalar(slope[: order + 1]), Jet.scalar(offset))


def standard_families(lam, order: int) -> Dict[str, ParamAffineFamily1D]:
    return {
        "+": standard_family(lam, 1, order),
        "-": standard_family(lam, -1, order),
    }


@dataclass(frozen=True)
class JetAffineMap:
    """Affine action on dim-1 jet coordinates: j -> matrix @ j + offset.

    No contraction invariant: these lifts are only eventually contracting
    (spectral radius < 1), their one-step infinity norm may exceed 1.
    """

    matrix: Mat
    offset: Vec

    def __call__(self, j: Jet) -> Jet:
        flat = j.flat()
        if len(flat) != len(self.offset):
            raise ShapeError("jet order does not match the lifted map")
        out = linalg.vec_add(linalg.mat_vec(self.matrix, flat), self.offset)
        return Jet.scalar(out)


def lift_family(fam: ParamAffineFamily1D) -> JetAffineMap:
    """Materialize the induced jet action j -> jet_mul(slope, j) + offset.

    For slope jet (lam, 1, 0, ...) the matrix is lower triangular with
    diagonal lam and subdiagonal i in row i.
    """
    r = fam.order
    n = r + 1
    alpha = fam.slope.flat()
    rows = []
    for i in range(n):
        row = [Fraction(0)] * n
        for k in range(i + 1):
            row[k] = comb(i, i - k) * alpha[i - k]
        rows.append(tuple(row))
    return JetAffineMap(matrix=tuple(rows), offset=fam.offset.flat())


def continuation_jet(
    families: Dict[str, ParamAffineFamily1D],
    word: Sequence[str],
    order: int,
    start: Optional[Jet] = None,
) -> Jet:
    """Jet of a -> evaluate_word at parameter a, truncated at word length.

    Iterates the lifted maps over the word, innermost (last) symbol first,
    from the zero jet (or ``start``), mirroring the point-level convention
    that word[0] is the outermost composition factor.
    """
    word = tuple(word)
    if not word:
        raise DegenerateInputError("continuation needs a nonempty word")
    lifted = {}
    for symbol in set(word):
        if symbol not in families:
            raise ShapeError(f"no family for symbol {symbol!r}")
        fam = families[symbol]
        if fam.order != order:
            raise ShapeError(
                f"family order {fam.order} does not match requested {order}"
            )
        lifted[symbol] = lift_family(fam)
    j = Jet.zero(order) if start is None else start
    if j.order != order or j.dim != 1:
        raise ShapeError("start jet has the wrong shape")
    for symbol in reversed(word):
        j = lifted[symbol](j)
    return j


# --- float oracle -----------------------------------------------------------

# Central stencils for raw derivatives 0..4, each with O(h^2) truncation.
# Sample offsets are exact rationals and the differencing runs exactly; the
# result is cast to binary64 only at the end, so the only error term left
# is the h^2 truncation.  (Pure-float differencing loses third derivatives
# entirely at small h: the 2h^3 denominator amplifies rounding noise of the
# samples to ~1e-2 at h = 1e-4, orders of magnitude beyond truncation.)
_STENCILS = {
    0: ((0, 1),),
    1: ((1, Fraction(1, 2)), (-1, Fraction(-1, 2))),
    2: ((1, 1), (0, -2), (-1, 1)),
    3: (
        (2, Fraction(1, 2)),
        (1, -1),
        (-1, 1),
        (-2, Fraction(-1, 2)),
    ),
    4: ((2, 1), (1, -4), (0, 6), (-1, -4), (-2, 1)),
}


def _evaluate_family_word(
    families: Dict[str, ParamAffineFamily1D], word: Sequence[str], a: Fraction
) -> Fraction:
    x = Fraction(0)
    coeffs = {s: families[s].at(a) for s in set(word)}
    for symbol in reversed(tuple(word)):
        slope, offset = coeffs[symbol]
        x = slope * x + offset
    return x


def finite_difference_jet(
    families: Dict[str, ParamAffineFamily1D],
    word: Sequence[str],
    order: int,
    h,
) -> List[float]:
    """Approximate continuation jet by central differences; binary64 output.

    This is a test oracle, never a certified path; results are flagged
    approximate on the wire.  Orders above 4 are rejected (stencil
    conditioning).  Floats given for h are read via their decimal string,
    so h=1e-4 means exactly 1/10000.
    """
    if order > 4:
        raise UnsupportedOrderError("finite differences support order <= 4")
    if order < 0:
        raise DegenerateInputError("order must be >= 0")
    # decimal parsing is fine here: this path is explicitly approximate
    step = Fraction(str(h)) if isinstance(h, float) else rat(h)
    if step <= 0:
        raise DegenerateInputError("step must be positive")
    needed = sorted({m for k in range(order + 1) for m, _ in _STENCILS[k]})
    samples = {
        m: _evaluate_family_word(families, word, m * step) for m in needed
    }
    out = []
    for k in range(order + 1):
        acc = Fraction(0)
        for m, w in _STENCILS[k]:
            acc += Fraction(w) * samples[m]
        out.append(float(acc / step ** k))
    return out
