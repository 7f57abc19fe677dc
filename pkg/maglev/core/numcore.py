"""
Polynomial, transfer-function and state-space primitives.

Coefficients are stored in ascending power order (index k multiplies s**k).
Config files and printed tables use the descending order control engineers
write by hand; `Polynomial.from_descending` / `.descending()` convert.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from maglev.exceptions import DomainError

logger = logging.getLogger("maglev_sim")

ROOT_RESIDUAL_TOL = 1e-9
REAL_DISPLAY_TOL = 1e-9
READBACK_REL_TOL = 1e-9

Number = Union[int, float, complex]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Polynomial:
    coefficients: np.ndarray

    def __init__(self, coefficients: Iterable[float]):
        c = np.atleast_1d(np.asarray(list(coefficients), dtype=float))
        if c.size == 0:
            c = np.zeros(1)
        nonzero = np.flatnonzero(c)
        c = c[: nonzero[-1] + 1] if nonzero.size else np.zeros(1)
        object.__setattr__(self, "coefficients", _frozen(c.copy()))

    @classmethod
    def from_descending(cls, coefficients: Sequence[float]) -> "Polynomial":
        return cls(list(coefficients)[::-1])

    @classmethod
    def from_roots(cls, roots: Iterable[Number], gain: float = 1.0) -> "Polynomial":
        p = cls([gain])
        for r in roots:
            if abs(complex(r).imag) > 0:
                # conjugate pairs are folded into one real quadratic
                if complex(r).imag > 0:
                    r = complex(r)
                    p = poly_mul(p, cls([abs(r) ** 2, -2.0 * r.real, 1.0]))
                continue
            p = poly_mul(p, cls([-complex(r).real, 1.0]))
        return p

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    @property
    def is_zero(self) -> bool:
        return self.coefficients.size == 1 and self.coefficients[0] == 0.0

    @property
    def leading(self) -> float:
        return float(self.coefficients[-1])

    def descending(self) -> np.ndarray:
        return self.coefficients[::-1].copy()

    def monic(self) -> "Polynomial":
        if self.is_zero:
            raise DomainError("zero polynomial has no monic form")
        return Polynomial(self.coefficients / self.leading)

    def __call__(self, s):
        return np.polyval(self.coefficients[::-1], s)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(self.coefficients.size, other.coefficients.size)
        a = np.zeros(n)
        a[: self.coefficients.size] += self.coefficients
        a[: other.coefficients.size] += other.coefficients
        return Polynomial(a)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other.scale(-1.0)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return poly_mul(self, other)

    def scale(self, k: float) -> "Polynomial":
        return Polynomial(self.coefficients * k)

    def trimmed(self, tol: float) -> "Polynomial":
        """Drop highest-order coefficients with magnitude at or below `tol`."""
        keep = np.flatnonzero(np.abs(self.coefficients) > tol)
        return Polynomial(self.coefficients[: keep[-1] + 1] if keep.size else [0.0])

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and np.array_equal(self.coefficients, other.coefficients)

    def __repr__(self) -> str:
        return f"Polynomial({self.coefficients.tolist()})"


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    """Exact convolution of the coefficient sequences."""
    return Polynomial(np.convolve(a.coefficients, b.coefficients))


def companion_matrix(p: Polynomial) -> np.ndarray:
    """Frobenius companion of the monic form of p; its eigenvalues are the roots."""
    monic = p.monic().coefficients
    n = p.degree
    c = np.zeros((n, n))
    if n > 1:
        c[1:, :-1] = np.eye(n - 1)
    c[:, -1] = -monic[:-1]
    return c


def _polish(p: Polynomial, roots: np.ndarray, iterations: int = 3) -> np.ndarray:
    # Newton polish; a step is kept only when it lowers the residual
    dp = np.polyder(p.coefficients[::-1])
    coeffs = p.coefficients[::-1]
    out = roots.copy()
    for k, r in enumerate(out):
        best, best_res = r, abs(np.polyval(coeffs, r))
        for _ in range(iterations):
            slope = np.polyval(dp, best)
            if slope == 0:
                break
            cand = best - np.polyval(coeffs, best) / slope
            res = abs(np.polyval(coeffs, cand))
            if not res < best_res:
                break
            best, best_res = cand, res
        out[k] = best
    return out


def sort_roots(roots: Iterable[complex]) -> np.ndarray:
    r = np.asarray(list(roots), dtype=complex)
    order = np.lexsort((r.imag, r.real))
    return r[order]


def poly_roots(p: Polynomial) -> np.ndarray:
    """
    All deg(p) roots with multiplicity, sorted by real then imaginary part.

    Companion-matrix eigenvalues followed by a guarded Newton polish.
    Raises DomainError for the zero polynomial and for constants.
    """
    if p.is_zero:
        raise DomainError("zero polynomial has no well-defined roots")
    if p.degree < 1:
        raise DomainError("a degree-0 polynomial has no roots")
    roots = np.linalg.eigvals(companion_matrix(p)).astype(complex)
    roots = _polish(p, roots)
    # conjugate pairs from a real polynomial stay exact conjugates
    roots = np.where(np.abs(roots.imag) < REAL_DISPLAY_TOL * np.maximum(1.0, np.abs(roots.real)),
                     roots.real + 0j, roots)
    tol = ROOT_RESIDUAL_TOL * float(np.linalg.norm(p.coefficients))
    worst = float(np.max(np.abs(p(roots))))
    if worst > tol:
        logger.warning(f"Root residual {worst:.3e} exceeds {tol:.3e} for {p!r}.")
    return sort_roots(roots)


def format_complex(z: complex, digits: int = 10) -> str:
    """Real-looking numbers print as reals."""
    z = complex(z)
    if abs(z.imag) < REAL_DISPLAY_TOL:
        return f"{z.real:.{digits}g}"
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real:.{digits}g}{sign}{abs(z.imag):.{digits}g}j"


@dataclass(frozen=True, eq=False)
class TransferFunction:
    numerator: Polynomial
    denominator: Polynomial

    def __post_init__(self):
        if self.denominator.is_zero:
            raise DomainError("transfer function denominator is the zero polynomial")

    @classmethod
    def from_descending(cls, num: Sequence[float], den: Sequence[float]) -> "TransferFunction":
        return cls(Polynomial.from_descending(num), Polynomial.from_descending(den))

    @property
    def is_proper(self) -> bool:
        return self.numerator.degree <= self.denominator.degree

    @property
    def is_strictly_proper(self) -> bool:
        return self.numerator.is_zero or self.numerator.degree < self.denominator.degree

    def poles(self) -> np.ndarray:
        if self.denominator.degree == 0:
            return np.zeros(0, dtype=complex)
        return poly_roots(self.denominator)

    def zeros(self) -> np.ndarray:
        if self.numerator.is_zero or self.numerator.degree == 0:
            return np.zeros(0, dtype=complex)
        return poly_roots(self.numerator)

    def closed_loop_characteristic(self, k: float) -> Polynomial:
        """den(s) + k num(s): the proportional-feedback characteristic polynomial."""
        return self.denominator + self.numerator.scale(k)

    def dc_gain(self) -> float:
        return float(self.numerator(0.0) / self.denominator(0.0))

    def __call__(self, s):
        return self.numerator(s) / self.denominator(s)

    def __repr__(self) -> str:
        return f"TransferFunction(num={self.numerator.descending().tolist()}, den={self.denominator.descending().tolist()})"


@dataclass(frozen=True, eq=False)
class StateSpace:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A, B, C, D = (np.atleast_2d(np.asarray(m, dtype=float)) for m in (self.A, self.B, self.C, self.D))
        n = A.shape[0] if A.size else 0
        if A.size == 0:
            A = np.zeros((0, 0))
            B = B.reshape(0, D.shape[1]) if B.size == 0 else B
            C = C.reshape(D.shape[0], 0) if C.size == 0 else C
        if A.shape != (n, n):
            raise DomainError(f"A must be square, got {A.shape}")
        if B.shape[0] != n or C.shape[1] != n:
            raise DomainError(f"B {B.shape} / C {C.shape} not conformable with A {A.shape}")
        if D.shape != (C.shape[0], B.shape[1]):
            raise DomainError(f"D must be {(C.shape[0], B.shape[1])}, got {D.shape}")
        for name, m in zip("ABCD", (A, B, C, D)):
            object.__setattr__(self, name, _frozen(m.copy()))

    @property
    def order(self) -> int:
        return self.A.shape[0]

    def characteristic_polynomial(self) -> Polynomial:
        if self.order == 0:
            return Polynomial([1.0])
        return Polynomial.from_descending(np.real(np.poly(self.A)))

    def to_transfer_function(self) -> TransferFunction:
        """SISO read-back through det(sI - A + BC) = det(sI - A)(1 + C(sI - A)^-1 B)."""
        if self.B.shape[1] != 1 or self.C.shape[0] != 1:
            raise DomainError("transfer-function read-back is defined for SISO systems only")
        d = float(self.D[0, 0])
        den = self.characteristic_polynomial()
        if self.order == 0:
            return TransferFunction(Polynomial([d]), den)
        coupled = Polynomial.from_descending(np.real(np.poly(self.A - self.B @ self.C)))
        num = coupled - den + den.scale(d)
        # the subtraction cancels the s^n..s^k terms only up to round-off
        scale = max(np.linalg.norm(coupled.coefficients), np.linalg.norm(den.coefficients))
        return TransferFunction(num.trimmed(READBACK_REL_TOL * scale), den)


def tf_to_statespace(g: TransferFunction) -> StateSpace:
    """
    Controllable-canonical realization.

    With den = s^n + a_{n-1} s^{n-1} + ... + a_0 (after normalizing the leading
    coefficient) the last row of A is -a_0 ... -a_{n-1}, B = e_n, D is the
    direct feedthrough and C holds the strictly proper remainder.
    """
    if not g.is_proper:
        raise DomainError(f"improper transfer function cannot be realized: {g!r}")
    lead = g.denominator.leading
    den = g.denominator.coefficients / lead
    n = g.denominator.degree
    num = np.zeros(n + 1)
    num[: g.numerator.coefficients.size] = g.numerator.coefficients / lead
    d = num[n]
    c = num[:n] - d * den[:n]
    A = np.zeros((n, n))
    if n > 1:
        A[:-1, 1:] = np.eye(n - 1)
    if n:
        A[-1, :] = -den[:n]
    B = np.zeros((n, 1))
    if n:
        B[-1, 0] = 1.0
    return StateSpace(A, B, c.reshape(1, n), np.array([[d]]))
