"""Exact scalars, arrays, polynomials, truncated series and factored rationals.

Two base fields are supported: the rationals and prime fields of odd
characteristic.  Rational scalars are :class:`fractions.Fraction`; prime-field
scalars are :class:`ModP`.  Dense arrays over either field are :class:`FArray`,
a numpy-backed container that keeps every entry exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence, Union

import flint
import numpy as np

DEFAULT_ORDER = 16

_I64 = 2**62
_F53 = 2**53


# ---------------------------------------------------------------------------
# primes and prime-field scalars
# ---------------------------------------------------------------------------


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class ModP:
    """An element of the prime field F_p, stored as its least residue."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = int(v) % p
        self.p = p

    def _coerce(self, other) -> int | None:
        if isinstance(other, ModP):
            if other.p != self.p:
                raise ValueError("mixing different prime fields")
            return other.v
        if isinstance(other, (int, np.integer)):
            return int(other) % self.p
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p) % self.p
        return None

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else ModP(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else ModP(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else ModP(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else ModP(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return ModP(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.v == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return ModP(o * pow(self.v, -1, self.p), self.p)

    def __pow__(self, e: int):
        if e < 0:
            if self.v == 0:
                raise ZeroDivisionError("division by zero in F_%d" % self.p)
            return ModP(pow(pow(self.v, -1, self.p), -e, self.p), self.p)
        return ModP(pow(self.v, e, self.p), self.p)

    def __neg__(self):
        return ModP(-self.v, self.p)

    def __pos__(self):
        return self

    def __bool__(self) -> bool:
        return self.v != 0

    def __int__(self) -> int:
        return self.v

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        return o is not None and o == self.v

    def __hash__(self) -> int:
        return hash((self.v, self.p))

    def __lt__(self, other) -> bool:
        return self.v < self._coerce(other)

    def __le__(self, other) -> bool:
        return self.v <= self._coerce(other)

    def __gt__(self, other) -> bool:
        return self.v > self._coerce(other)

    def __ge__(self, other) -> bool:
        return self.v >= self._coerce(other)

    def __repr__(self) -> str:
        return str(self.v)


Scalar = Union[Fraction, ModP]


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    """The base field: ``p == 0`` means the rationals, otherwise F_p."""

    p: int = 0

    def __post_init__(self):
        if self.p == 2:
            raise ValueError("characteristic 2 unsupported")
        if self.p != 0 and not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        t = text.strip()
        if t == "Q":
            return cls(0)
        if t.startswith("Fp:"):
            try:
                p = int(t[3:])
            except ValueError:
                raise ValueError(f"bad field spec {text!r}") from None
            return cls(p)
        raise ValueError(f"bad field spec {text!r}; expected 'Q' or 'Fp:<prime>'")

    @property
    def name(self) -> str:
        return "Q" if self.p == 0 else f"Fp:{self.p}"

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    def __call__(self, x) -> Scalar:
        if self.p == 0:
            if isinstance(x, ModP):
                raise TypeError("cannot lift a prime-field scalar to Q")
            if isinstance(x, str):
                return Fraction(x)
            if isinstance(x, np.integer):
                x = int(x)
            return Fraction(x)
        if isinstance(x, ModP):
            if x.p != self.p:
                raise ValueError("mixing different prime fields")
            return x
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"{x} has no reduction mod {self.p}")
            return ModP(x.numerator * pow(x.denominator, -1, self.p), self.p)
        return ModP(int(x), self.p)

    @property
    def zero(self) -> Scalar:
        return self(0)

    @property
    def one(self) -> Scalar:
        return self(1)

    def sort_key(self, x: Scalar):
        """Total order: usual order on Q, least residues 0 < 1 < ... < p-1 on F_p."""
        return x.v if isinstance(x, ModP) else x

    def to_json(self, x: Scalar):
        if isinstance(x, ModP):
            return x.v
        return x.numerator if x.denominator == 1 else str(x)

    def from_json(self, v) -> Scalar:
        return self(Fraction(v) if isinstance(v, str) else v)

    def integer_gap(self, a: Scalar, c: Scalar) -> int | None:
        """The integer m > 0 with c - a = m, if any (in F_p: [c - a] in 1..p-1)."""
        d = self(c) - self(a)
        if isinstance(d, ModP):
            return d.v if d.v > 0 else None
        if d.denominator == 1 and d > 0:
            return int(d)
        return None

    # array helpers
    def array(self, data) -> "FArray":
        return FArray.from_scalars(self, data)

    def zeros(self, shape) -> "FArray":
        return FArray(self, np.zeros(shape, dtype=np.int64))

    def eye(self, n: int) -> "FArray":
        return FArray(self, np.eye(n, dtype=np.int64))


QQ = FieldSpec(0)


def reduce_scalar(x: Scalar, target: FieldSpec) -> Scalar:
    """Map a rational scalar into ``target`` (identity on Q)."""
    return target(x)


# ---------------------------------------------------------------------------
# exact arrays
# ---------------------------------------------------------------------------


def _maxabs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(v)) for v in a.flat)
    return int(np.abs(a).max())


def _fit(a: np.ndarray) -> np.ndarray:
    """Return an int64 copy when every entry fits, otherwise an object array."""
    if a.dtype == object:
        if _maxabs(a) < _I64:
            return a.astype(np.int64)
        return a
    return a


def _as_obj(a: np.ndarray) -> np.ndarray:
    return a if a.dtype == object else a.astype(object)


def _lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


def _int_matmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    k = A.shape[-1] if A.ndim else 1
    if p:
        bound = (p - 1) ** 2 * max(k, 1)
    else:
        bound = _maxabs(A) * _maxabs(B) * max(k, 1)
    if A.dtype != object and B.dtype != object and bound < _F53:
        R = np.matmul(A.astype(np.float64), B.astype(np.float64)).astype(np.int64)
    elif A.dtype != object and B.dtype != object and bound < _I64:
        R = np.matmul(A, B)
    else:
        R = np.matmul(_as_obj(A), _as_obj(B))
    if p:
        R = R % p
        if R.dtype == object:
            R = R.astype(np.int64)
    return R


class FArray:
    """Dense exact array over a :class:`FieldSpec`.

    Over F_p the entries are least residues in an int64 array.  Over Q the
    array is ``num / den`` with integer ``num`` (int64, or object when large)
    and a single positive integer denominator.
    """

    __slots__ = ("field", "num", "den")
    __array_priority__ = 1000

    def __init__(self, field: FieldSpec, num: np.ndarray, den: int = 1):
        self.field = field
        if field.p:
            if num.dtype == object:
                num = (num % field.p).astype(np.int64)
            else:
                num = num % field.p
            den = 1
        self.num = num
        self.den = int(den)

    # construction -------------------------------------------------------
    @classmethod
    def from_scalars(cls, F: FieldSpec, data) -> "FArray":
        arr = np.array(data, dtype=object)
        flat = [F(x) for x in arr.flat]
        if F.p:
            vals = np.array([x.v for x in flat], dtype=np.int64).reshape(arr.shape)
            return cls(F, vals)
        L = reduce(_lcm, (x.denominator for x in flat), 1)
        ints = [x.numerator * (L // x.denominator) for x in flat]
        num = np.array(ints, dtype=object).reshape(arr.shape)
        return cls(F, _fit(num), L)

    @classmethod
    def from_ints(cls, F: FieldSpec, data) -> "FArray":
        num = np.asarray(data)
        if num.dtype != object:
            num = num.astype(np.int64)
        return cls(F, num)

    # shape plumbing -----------------------------------------------------
    @property
    def shape(self) -> tuple:
        return self.num.shape

    @property
    def ndim(self) -> int:
        return self.num.ndim

    @property
    def size(self) -> int:
        return self.num.size

    def _wrap(self, num: np.ndarray) -> "FArray":
        out = FArray.__new__(FArray)
        out.field, out.num, out.den = self.field, num, self.den
        return out

    def __getitem__(self, idx) -> "FArray":
        return self._wrap(self.num[idx])

    def reshape(self, *shape) -> "FArray":
        return self._wrap(self.num.reshape(*shape))

    def transpose(self, *axes) -> "FArray":
        return self._wrap(self.num.transpose(*axes))

    def swapaxes(self, a: int, b: int) -> "FArray":
        return self._wrap(self.num.swapaxes(a, b))

    def moveaxis(self, a, b) -> "FArray":
        return self._wrap(np.moveaxis(self.num, a, b))

    @property
    def T(self) -> "FArray":
        return self._wrap(self.num.T)

    def copy(self) -> "FArray":
        return self._wrap(self.num.copy())

    def ravel(self) -> "FArray":
        return self._wrap(self.num.ravel())

    def broadcast_to(self, shape) -> "FArray":
        return self._wrap(np.broadcast_to(self.num, shape))

    # arithmetic -------------------------------------------------------------
    def _check(self, other: "FArray"):
        if other.field != self.field:
            raise ValueError("field mismatch")

    def _aligned(self, other: "FArray"):
        """Numerators over a common denominator."""
        if self.field.p or self.den == other.den:
            return self.num, other.num, self.den
        L = _lcm(self.den, other.den)
        ma, mb = L // self.den, L // other.den
        a, b = self.num, other.num
        if _maxabs(a) * ma < _I64 and _maxabs(b) * mb < _I64:
            return a * ma, b * mb, L
        return _as_obj(a) * ma, _as_obj(b) * mb, L

    def _addsub(self, other, sign: int) -> "FArray":
        if not isinstance(other, FArray):
            other = self.field.array(other)
        self._check(other)
        a, b, L = self._aligned(other)
        if self.field.p:
            return FArray(self.field, a + b if sign > 0 else a - b)
        if a.dtype != object and b.dtype != object and _maxabs(a) + _maxabs(b) >= _I64:
            a, b = _as_obj(a), _as_obj(b)
        num = a + b if sign > 0 else a - b
        return FArray(self.field, _fit(num), L)

    def __add__(self, other) -> "FArray":
        return self._addsub(other, 1)

    def __sub__(self, other) -> "FArray":
        return self._addsub(other, -1)

    def __neg__(self) -> "FArray":
        return FArray(self.field, -self.num, self.den)

    def __mul__(self, other) -> "FArray":
        F = self.field
        if isinstance(other, FArray):
            self._check(other)
            a, b = self.num, other.num
            if F.p:
                if a.dtype == object or b.dtype == object:
                    return FArray(F, _as_obj(a) * _as_obj(b))
                if (F.p - 1) ** 2 < _I64:
                    return FArray(F, a * b)
            if a.dtype != object and b.dtype != object and _maxabs(a) * _maxabs(b) >= _I64:
                a, b = _as_obj(a), _as_obj(b)
            return FArray(F, _fit(a * b), self.den * other.den).simplify()
        s = F(other)
        if F.p:
            return FArray(F, self.num * s.v if s.v * (F.p - 1) < _I64 else _as_obj(self.num) * s.v)
        n, d = s.numerator, s.denominator
        a = self.num
        if a.dtype != object and _maxabs(a) * abs(n) >= _I64:
            a = _as_obj(a)
        return FArray(F, _fit(a * n), self.den * d).simplify()

    __rmul__ = __mul__

    def __matmul__(self, other: "FArray") -> "FArray":
        self._check(other)
        R = _int_matmul(self.num, other.num, self.field.p)
        if self.field.p:
            return FArray(self.field, R)
        return FArray(self.field, _fit(R), self.den * other.den).simplify()

    def simplify(self) -> "FArray":
        if self.field.p or self.den == 1:
            return self
        num = self.num
        if num.size == 0:
            return FArray(self.field, num, 1)
        if num.dtype == object:
            g = reduce(math.gcd, (int(v) for v in num.flat), self.den)
        else:
            g = math.gcd(int(np.gcd.reduce(num.ravel())), self.den)
        if g > 1:
            num = num // g
            return FArray(self.field, _fit(num), self.den // g)
        return self

    # queries ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not np.any(self.num)

    def equals(self, other: "FArray") -> bool:
        return self.shape == other.shape and (self - other).is_zero()

    def nonzero_index(self):
        """Index of the first nonzero entry, or None."""
        idx = np.argwhere(self.num != 0)
        return None if len(idx) == 0 else tuple(int(i) for i in idx[0])

    def scalar(self, idx=()) -> Scalar:
        v = int(self.num[idx])
        if self.field.p:
            return ModP(v, self.field.p)
        return Fraction(v, self.den)

    def scalars(self) -> list:
        """Nested python list of field scalars."""
        F = self.field
        if F.p:
            conv = lambda v: ModP(int(v), F.p)  # noqa: E731
        else:
            conv = lambda v: Fraction(int(v), self.den)  # noqa: E731
        return np.vectorize(conv, otypes=[object])(self.num).tolist() if self.ndim else conv(self.num)

    def with_field(self, target: FieldSpec) -> "FArray":
        """Reduce a rational array into ``target``."""
        if self.field == target:
            return self
        if self.field.p:
            raise TypeError("only rational arrays can be reduced")
        p = target.p
        if self.den % p == 0:
            raise ZeroDivisionError(f"denominator {self.den} vanishes mod {p}")
        inv = pow(self.den, -1, p)
        num = _as_obj(self.num) % p if self.num.dtype == object else self.num % p
        return FArray(target, (num.astype(np.int64) * inv) % p)

    def apply_along(self, mat: "FArray", axis: int) -> "FArray":
        """result[..., i, ...] = sum_k mat[i, k] * self[..., k, ...] along ``axis``."""
        moved = self.moveaxis(axis, 0)
        rest = moved.shape[1:]
        flat = moved.reshape(moved.shape[0], -1)
        out = (mat @ flat).reshape((mat.shape[0],) + rest)
        return out.moveaxis(0, axis)

    def __repr__(self) -> str:
        return f"FArray({self.field.name}, shape={self.shape})"


def stack(arrays: Sequence[FArray], axis: int = 0) -> FArray:
    return _combine(arrays, lambda nums: np.stack(nums, axis=axis))


def concatenate(arrays: Sequence[FArray], axis: int = 0) -> FArray:
    return _combine(arrays, lambda nums: np.concatenate(nums, axis=axis))


def _combine(arrays: Sequence[FArray], op) -> FArray:
    F = arrays[0].field
    if F.p:
        return FArray(F, op([a.num for a in arrays]))
    L = reduce(_lcm, (a.den for a in arrays), 1)
    nums = []
    big = False
    for a in arrays:
        m = L // a.den
        if _maxabs(a.num) * m >= _I64 or a.num.dtype == object:
            big = True
        nums.append((a.num, m))
    if big:
        res = op([_as_obj(n) * m for n, m in nums])
    else:
        res = op([n * m for n, m in nums])
    return FArray(F, _fit(res), L).simplify()


def kron(a: FArray, b: FArray) -> FArray:
    F = a.field
    A, B = a.num, b.num
    if F.p == 0 and A.dtype != object and B.dtype != object and _maxabs(A) * _maxabs(B) >= _I64:
        A, B = _as_obj(A), _as_obj(B)
    if F.p and (A.dtype == object or B.dtype == object):
        A, B = _as_obj(A), _as_obj(B)
    return FArray(F, _fit(np.kron(A, B)), a.den * b.den).simplify()


# ---------------------------------------------------------------------------
# linear algebra (backed by FLINT)
# ---------------------------------------------------------------------------


def _to_flint(A: FArray):
    rows, cols = A.shape
    ints = [int(v) for v in A.num.ravel()]
    if A.field.p:
        return flint.nmod_mat(rows, cols, ints, A.field.p)
    return flint.fmpz_mat(rows, cols, ints)


def _from_flint(F: FieldSpec, M, nrows: int | None = None, ncols: int | None = None) -> FArray:
    r = M.nrows() if nrows is None else nrows
    c = M.ncols() if ncols is None else ncols
    vals = [[int(M[i, j]) for j in range(c)] for i in range(r)]
    return FArray(F, _fit(np.array(vals, dtype=object).reshape(r, c)))


def rank(A: FArray) -> int:
    if A.size == 0:
        return 0
    return _to_flint(A).rank()


def nullspace(A: FArray) -> FArray:
    """Rows forming a basis of the right kernel {v : A v = 0}."""
    rows, cols = A.shape
    if rows == 0:
        return FArray(A.field, np.eye(cols, dtype=np.int64))
    X, nullity = _to_flint(A).nullspace()
    if nullity == 0:
        return A.field.zeros((0, cols))
    basis = _from_flint(A.field, X, cols, nullity).T
    return echelon(basis)


def echelon(A: FArray) -> FArray:
    """Reduced row echelon form with zero rows removed (integral scaling over Q)."""
    rows, cols = A.shape
    if rows == 0:
        return A
    M = _to_flint(A)
    if A.field.p:
        R, r = M.rref()
    else:
        R, _, r = M.rref()
    if r == 0:
        return A.field.zeros((0, cols))
    out = _from_flint(A.field, R, r, cols)
    if A.field.p == 0:
        # primitive integer rows, leading entry positive
        num = out.num.astype(object)
        for i in range(r):
            g = reduce(math.gcd, (int(v) for v in num[i]), 0)
            lead = next(int(v) for v in num[i] if v != 0)
            num[i] = num[i] // (g if lead > 0 else -g)
        out = FArray(A.field, _fit(num))
    return out


def rref(A: FArray) -> tuple[FArray, list[int]]:
    """Reduced row echelon form (unit pivots, zero rows dropped) and pivot columns."""
    rows, cols = A.shape
    F = A.field
    if rows == 0:
        return F.zeros((0, cols)), []
    M = _to_flint(A)
    if F.p:
        R, r = M.rref()
        out = _from_flint(F, R, r, cols)
    else:
        R, d, r = M.rref()
        out = FArray(F, _from_flint(F, R, r, cols).num, int(d)).simplify()
    pivots = []
    for i in range(r):
        pivots.append(int(np.flatnonzero(out.num[i] != 0)[0]))
    return out, pivots


def solve_combination(basis: FArray, target: FArray) -> list | None:
    """Scalars c with sum_i c_i basis[i] == target, or None when inconsistent."""
    F = basis.field
    k, n = basis.shape
    aug = concatenate([basis.T, target.reshape(n, 1)], axis=1)
    R = echelon(aug)
    sol = [F.zero] * k
    for i in range(R.shape[0]):
        lead = R[i].nonzero_index()[0]
        if lead == k:
            return None
        sol[lead] = R.scalar((i, k)) / R.scalar((i, lead))
    return sol


# ---------------------------------------------------------------------------
# truncated series in u^{-1}
# ---------------------------------------------------------------------------


def _binom_row(F: FieldSpec, c: Scalar, order: int) -> list[list[Scalar]]:
    """C[k][r] = coefficient of x^r in (x / (1 - c x))^k for r, k <= order."""
    C = [[F.zero] * (order + 1) for _ in range(order + 1)]
    C[0][0] = F.one
    for k in range(1, order + 1):
        for r in range(k, order + 1):
            C[k][r] = F(math.comb(r - 1, k - 1)) * F(c) ** (r - k)
    return C


@dataclass(frozen=True)
class USeries:
    """Truncated series sum_{k=0}^{order} coeffs[k] u^{-k}."""

    field: FieldSpec
    coeffs: tuple
    order: int

    @classmethod
    def make(cls, F: FieldSpec, coeffs: Iterable, order: int = DEFAULT_ORDER) -> "USeries":
        if order < 1:
            raise ValueError("order must be at least 1")
        cs = [F(c) for c in coeffs][: order + 1]
        cs += [F.zero] * (order + 1 - len(cs))
        return cls(F, tuple(cs), order)

    @classmethod
    def one(cls, F: FieldSpec, order: int = DEFAULT_ORDER) -> "USeries":
        return cls.make(F, [1], order)

    def __getitem__(self, k: int) -> Scalar:
        return self.coeffs[k] if k <= self.order else self.field.zero

    def _other(self, other) -> "USeries":
        if isinstance(other, USeries):
            if other.field != self.field:
                raise ValueError("field mismatch")
            if other.order != self.order:
                o = min(self.order, other.order)
                return other.truncate(o)
            return other
        return USeries.make(self.field, [other], self.order)

    def truncate(self, order: int) -> "USeries":
        return USeries.make(self.field, self.coeffs[: order + 1], order)

    def __add__(self, other) -> "USeries":
        o = self._other(other)
        n = min(self.order, o.order)
        return USeries.make(self.field, [self[k] + o[k] for k in range(n + 1)], n)

    __radd__ = __add__

    def __neg__(self) -> "USeries":
        return USeries(self.field, tuple(-c for c in self.coeffs), self.order)

    def __sub__(self, other) -> "USeries":
        return self + (-self._other(other))

    def __rsub__(self, other) -> "USeries":
        return (-self) + other

    def __mul__(self, other) -> "USeries":
        if not isinstance(other, USeries):
            s = self.field(other)
            return USeries(self.field, tuple(c * s for c in self.coeffs), self.order)
        o = self._other(other)
        n = min(self.order, o.order)
        out = [self.field.zero] * (n + 1)
        for i in range(n + 1):
            a = self[i]
            if a == 0:
                continue
            for j in range(n + 1 - i):
                out[i + j] += a * o[j]
        return USeries(self.field, tuple(out), n)

    __rmul__ = __mul__

    def inverse(self) -> "USeries":
        a0 = self.coeffs[0]
        if a0 == 0:
            raise ZeroDivisionError("series is not a unit")
        inv0 = self.field.one / a0
        out = [inv0]
        for k in range(1, self.order + 1):
            s = sum((self[j] * out[k - j] for j in range(1, k + 1)), self.field.zero)
            out.append(-s * inv0)
        return USeries(self.field, tuple(out), self.order)

    def __truediv__(self, other) -> "USeries":
        if isinstance(other, USeries):
            return self * other.inverse()
        return self * (self.field.one / self.field(other))

    def neg_u(self) -> "USeries":
        """Substitute u -> -u."""
        return USeries(self.field, tuple(c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)), self.order)

    def shift(self, c) -> "USeries":
        """Substitute u -> u - c."""
        F = self.field
        if F(c) == 0:
            return self
        C = _binom_row(F, c, self.order)
        out = [sum((self.coeffs[k] * C[k][r] for k in range(r + 1)), F.zero) for r in range(self.order + 1)]
        return USeries(F, tuple(out), self.order)

    def reflect(self, c) -> "USeries":
        """Substitute u -> -u + c."""
        return self.neg_u().shift(c)

    def is_even(self) -> bool:
        return all(c == 0 for k, c in enumerate(self.coeffs) if k % 2)

    def reduce_to(self, target: FieldSpec) -> "USeries":
        return USeries.make(target, self.coeffs, self.order)

    def equals(self, other: "USeries", order: int | None = None) -> bool:
        n = min(self.order, other.order) if order is None else order
        return all(self[k] == other[k] for k in range(n + 1))

    def first_mismatch(self, other: "USeries") -> int | None:
        for k in range(min(self.order, other.order) + 1):
            if self[k] != other[k]:
                return k
        return None

    def to_json(self) -> list:
        return [self.field.to_json(c) for c in self.coeffs]

    def __repr__(self) -> str:
        terms = [f"{c}u^-{k}" if k else f"{c}" for k, c in enumerate(self.coeffs) if c != 0]
        return "USeries(" + (" + ".join(terms) or "0") + f"; O={self.order})"


def expand_shifted_inverse(c, order: int, F: FieldSpec = QQ) -> USeries:
    """Expansion of (u + c)^{-1} = sum_j (-c)^j u^{-j-1} through u^{-order}."""
    if order < 1:
        raise ValueError("order must be at least 1")
    c = F(c)
    coeffs = [F.zero] + [(-c) ** j for j in range(order)]
    return USeries.make(F, coeffs, order)


def xpoly_series(F: FieldSpec, coeffs: Sequence, order: int) -> USeries:
    """A polynomial in u^{-1} viewed as a series."""
    return USeries.make(F, coeffs, order)


# ---------------------------------------------------------------------------
# polynomials in u
# ---------------------------------------------------------------------------


def _poly_trim(cs: list) -> list:
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    return cs


def _to_flint_poly(F: FieldSpec, cs: Sequence):
    if F.p:
        return flint.nmod_poly([F(c).v for c in cs], F.p)
    return flint.fmpq_poly([flint.fmpq(F(c).numerator, F(c).denominator) for c in cs])


def _from_flint_poly(F: FieldSpec, P, length: int) -> list:
    if F.p:
        cs = [ModP(int(c), F.p) for c in P.coeffs()]
    else:
        cs = [Fraction(int(c.p), int(c.q)) for c in P.coeffs()]
    cs += [F.zero] * (length - len(cs))
    return cs


def poly_mul(F: FieldSpec, a: Sequence, b: Sequence) -> list:
    if len(a) * len(b) > 64:
        prod = _to_flint_poly(F, a) * _to_flint_poly(F, b)
        return _poly_trim(_from_flint_poly(F, prod, len(a) + len(b) - 1))
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _poly_trim(out)


def poly_shift_coeffs(F: FieldSpec, cs: Sequence, c) -> list:
    """Coefficients of P(u + c) given those of P(u) (low degree first)."""
    c = F(c)
    d = len(cs) - 1
    out = [F.zero] * (d + 1)
    for k, a in enumerate(cs):
        if a == 0:
            continue
        for j in range(k + 1):
            out[j] += a * F(math.comb(k, j)) * c ** (k - j)
    return out


@dataclass(frozen=True)
class MonicPoly:
    """Monic polynomial in u with coefficients listed from degree 0 upward."""

    field: FieldSpec
    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs or self.coeffs[-1] != 1:
            raise ValueError("polynomial is not monic")

    @classmethod
    def make(cls, F: FieldSpec, coeffs: Iterable) -> "MonicPoly":
        cs = _poly_trim([F(c) for c in coeffs])
        lead = cs[-1]
        if lead == 0:
            raise ValueError("zero polynomial")
        if lead != 1:
            raise ValueError("polynomial is not monic")
        return cls(F, tuple(cs))

    @classmethod
    def one(cls, F: FieldSpec) -> "MonicPoly":
        return cls(F, (F.one,))

    @classmethod
    def from_roots(cls, F: FieldSpec, roots: Iterable) -> "MonicPoly":
        P = _to_flint_poly(F, [F.one])
        for r in roots:
            P = P * _to_flint_poly(F, [-F(r), F.one])
        return cls(F, tuple(_from_flint_poly(F, P, P.degree() + 1)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def shift(self, c) -> "MonicPoly":
        return MonicPoly(self.field, tuple(poly_shift_coeffs(self.field, self.coeffs, c)))

    def __call__(self, x) -> Scalar:
        x = self.field(x)
        acc = self.field.zero
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def __mul__(self, other: "MonicPoly") -> "MonicPoly":
        return MonicPoly(self.field, tuple(poly_mul(self.field, self.coeffs, other.coeffs)))

    def divmod(self, other: "MonicPoly") -> tuple[list, list]:
        F = self.field
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return [F.zero], rem
        q = [F.zero] * (dq + 1)
        for k in range(dq, -1, -1):
            c = rem[k + other.degree]
            q[k] = c
            if c != 0:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return q, _poly_trim(rem[: other.degree] or [F.zero])

    def exact_div(self, other: "MonicPoly") -> "MonicPoly | None":
        q, r = self.divmod(other)
        if any(c != 0 for c in r):
            return None
        return MonicPoly(self.field, tuple(_poly_trim(q)))

    def mirror(self) -> "MonicPoly":
        """(-1)^deg P(-u + 1), the monic polynomial whose roots are 1 - roots."""
        F = self.field
        cs = poly_shift_coeffs(F, [c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)], -1)
        if self.degree % 2:
            cs = [-c for c in cs]
        return MonicPoly(F, tuple(cs))

    def is_symmetric(self) -> bool:
        """P(u) == P(-u + 1) coefficientwise."""
        F = self.field
        reflected = poly_shift_coeffs(F, [c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)], -1)
        return list(reflected) == list(self.coeffs)

    def roots(self) -> list:
        """Roots with multiplicity; raises if P does not split over the base field."""
        return split_roots(self.field, self.coeffs)

    def reduce_to(self, target: FieldSpec) -> "MonicPoly":
        return MonicPoly.make(target, self.coeffs)

    def to_json(self) -> list:
        return [self.field.to_json(c) for c in self.coeffs]

    def __repr__(self) -> str:
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("u" if k == 1 else f"u^{k}")
            if k and c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}{('*' + mono) if mono else ''}")
        return " + ".join(terms)


def poly_shift(P: MonicPoly, c) -> MonicPoly:
    """P(u + c); monic of the same degree."""
    return P.shift(c)


def q_period(F: FieldSpec) -> MonicPoly:
    """q_p(u) = u^p - u."""
    if F.p == 0:
        raise ValueError("q_p needs positive characteristic")
    cs = [F.zero] * (F.p + 1)
    cs[1] = -F.one
    cs[F.p] = F.one
    return MonicPoly(F, tuple(cs))


def split_roots(F: FieldSpec, coeffs: Sequence) -> list:
    cs = _poly_trim([F(c) for c in coeffs])
    deg = len(cs) - 1
    if deg == 0:
        return []
    if F.p:
        P = flint.nmod_poly([c.v for c in cs], F.p)
        found = [(ModP(int(r), F.p), m) for r, m in P.roots()]
    else:
        P = flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator) for c in cs])
        found = [(Fraction(int(r.p), int(r.q)), m) for r, m in P.roots()]
    out = []
    for r, m in found:
        out.extend([r] * m)
    if len(out) != deg:
        raise ValueError("polynomial does not split into linear factors over " + F.name)
    return sorted(out, key=F.sort_key)


# ---------------------------------------------------------------------------
# factored rational functions of u
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FactoredRational:
    """prefactor * prod(u - a for a in num) / prod(u - c for c in den)."""

    field: FieldSpec
    num: tuple = ()
    den: tuple = ()
    prefactor: object = None

    def __post_init__(self):
        F = self.field
        object.__setattr__(self, "num", tuple(sorted((F(a) for a in self.num), key=F.sort_key)))
        object.__setattr__(self, "den", tuple(sorted((F(c) for c in self.den), key=F.sort_key)))
        object.__setattr__(self, "prefactor", F.one if self.prefactor is None else F(self.prefactor))

    @classmethod
    def one(cls, F: FieldSpec) -> "FactoredRational":
        return cls(F)

    @classmethod
    def linear_ratio(cls, F: FieldSpec, num: Iterable, den: Iterable) -> "FactoredRational":
        return cls(F, tuple(num), tuple(den)).reduce()

    @classmethod
    def from_x_poly(cls, F: FieldSpec, coeffs: Sequence) -> "FactoredRational":
        """sum_r coeffs[r] u^{-r} as a factored rational (requires splitting)."""
        cs = _poly_trim([F(c) for c in coeffs])
        if cs[0] == 0:
            raise ValueError("constant term must be nonzero")
        c0 = cs[0]
        monic = [c / c0 for c in cs]
        d = len(monic) - 1
        # u^d p(1/u) has coefficients reversed
        roots = split_roots(F, list(reversed(monic)))
        return cls(F, tuple(roots), (F.zero,) * d, c0).reduce()

    @classmethod
    def from_x_ratio(cls, F: FieldSpec, num: Sequence, den: Sequence) -> "FactoredRational":
        return (cls.from_x_poly(F, num) / cls.from_x_poly(F, den)).reduce()

    def reduce(self) -> "FactoredRational":
        num = list(self.num)
        den = []
        for c in self.den:
            if c in num:
                num.remove(c)
            else:
                den.append(c)
        return FactoredRational(self.field, tuple(num), tuple(den), self.prefactor)

    def __mul__(self, other: "FactoredRational") -> "FactoredRational":
        return FactoredRational(
            self.field, self.num + other.num, self.den + other.den, self.prefactor * other.prefactor
        ).reduce()

    def inverse(self) -> "FactoredRational":
        return FactoredRational(self.field, self.den, self.num, self.field.one / self.prefactor)

    def __truediv__(self, other: "FactoredRational") -> "FactoredRational":
        return self * other.inverse()

    def neg_u(self) -> "FactoredRational":
        """Substitute u -> -u."""
        sign = (-1) ** ((len(self.num) - len(self.den)) % 2)
        return FactoredRational(
            self.field, tuple(-a for a in self.num), tuple(-c for c in self.den), self.prefactor * sign
        )

    def shift(self, c) -> "FactoredRational":
        """Substitute u -> u + c."""
        c = self.field(c)
        return FactoredRational(
            self.field, tuple(a - c for a in self.num), tuple(d - c for d in self.den), self.prefactor
        )

    @property
    def excess(self) -> int:
        return len(self.num) - len(self.den)

    def has_unit_constant_term(self) -> bool:
        r = self.reduce()
        return r.excess == 0 and r.prefactor == 1

    def expand(self, order: int = DEFAULT_ORDER) -> USeries:
        """Series in u^{-1}; requires deg num <= deg den."""
        F = self.field
        r = self.reduce()
        if r.excess > 0:
            raise ValueError("not a series in u^{-1}")
        s = USeries.make(F, [r.prefactor], order)
        for a in r.num:
            s = s * USeries.make(F, [1, -a], order)
        for c in r.den:
            s = s * USeries.make(F, [1, -c], order).inverse()
        shift = -r.excess
        if shift:
            s = USeries.make(F, [F.zero] * shift + list(s.coeffs), order)
        return s

    def x_coeffs(self) -> list:
        """Coefficients in u^{-1} when the function is a polynomial in u^{-1}."""
        F = self.field
        r = self.reduce()
        if any(c != 0 for c in r.den) or r.excess > 0:
            raise ValueError("not a polynomial in u^{-1}")
        cs = [r.prefactor]
        for a in r.num:
            cs = poly_mul(F, cs, [F.one, -a])
        shift = len(r.den) - len(r.num)
        return [F.zero] * shift + cs

    def u_polys(self) -> tuple[MonicPoly, MonicPoly]:
        return MonicPoly.from_roots(self.field, self.num), MonicPoly.from_roots(self.field, self.den)

    def reduce_to(self, target: FieldSpec) -> "FactoredRational":
        return FactoredRational(target, self.num, self.den, self.prefactor).reduce()

    def equals(self, other: "FactoredRational") -> bool:
        a, b = self.reduce(), other.reduce()
        return a.num == b.num and a.den == b.den and a.prefactor == b.prefactor

    def to_json(self) -> dict:
        F = self.field
        return {
            "prefactor": F.to_json(self.prefactor),
            "num": [F.to_json(a) for a in self.num],
            "den": [F.to_json(c) for c in self.den],
        }

    def __repr__(self) -> str:
        f = lambda r: "u" if r == 0 else f"(u - {r})"  # noqa: E731
        n = "*".join(f(a) for a in self.num) or "1"
        d = "*".join(f(c) for c in self.den) or "1"
        pre = "" if self.prefactor == 1 else f"{self.prefactor}*"
        return f"{pre}{n}/{d}"


def even_part_normalizer(m: FactoredRational) -> tuple[FactoredRational, FactoredRational]:
    """Return (g, g*m) with g even and g*m a polynomial in u^{-1}.

    g(u) = d(u) d(-u) where d is the denominator of m normalized to constant
    term 1.
    """
    r = m.reduce()
    if not r.has_unit_constant_term():
        raise ValueError("m must have constant term 1")
    F = m.field
    nonzero = [c for c in r.den if c != 0]
    g = FactoredRational(F, tuple(nonzero) + tuple(-c for c in nonzero), (F.zero,) * (2 * len(nonzero)))
    return g.reduce(), (g * r).reduce()
