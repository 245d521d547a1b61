"""Binary extension field arithmetic GF(2^nu) via exp/log tables.

Fields are built for 3 <= nu <= 12 from the lexicographically smallest
primitive polynomial of degree nu, found by exhaustive search over monic
polynomials with nonzero constant term.  For reference, the search yields

    nu :  3     4      5      6      7      8        9       10      11      12
    p(x): x3+x+1 x4+x+1 x5+x2+1 x6+x+1 x7+x+1 x8+x4+x3+x2+1 x9+x4+1 x10+x3+1
          x11+x2+1 x12+x6+x4+x+1

Field elements are plain Python ints in [0, 2^nu): the integer's bits are the
polynomial coefficients.  Addition is XOR; multiplication and inversion go
through the tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NU_MIN = 3
NU_MAX = 12


def _xtimes(value: int, poly: int, nu: int) -> int:
    """Multiply by x modulo poly (one LFSR step)."""
    value <<= 1
    if value >> nu & 1:
        value ^= poly
    return value


def _is_primitive(poly: int, nu: int) -> bool:
    """True iff x has multiplicative order 2^nu - 1 modulo poly.

    The order test subsumes irreducibility: if x generates 2^nu - 1 distinct
    nonzero residues, every nonzero residue is a unit, so the quotient ring is
    a field and poly is irreducible.
    """
    order = (1 << nu) - 1
    cur = 1
    for i in range(1, order + 1):
        cur = _xtimes(cur, poly, nu)
        if cur == 1:
            return i == order
    return False


@dataclass(frozen=True)
class FieldTable:
    """GF(2^nu) with antilog/log tables.

    exp_table[i] = alpha^i for 0 <= i < 2^nu - 1, where alpha is the class of
    x (a primitive element by construction).  log_table[a] is the discrete log
    of a for nonzero a; log_table[0] = -1 is a sentinel.
    """

    nu: int
    prim_poly: int
    exp_table: tuple[int, ...]
    log_table: tuple[int, ...]
    _quad_table: tuple[int, ...] = field(repr=False, default=())

    @property
    def order(self) -> int:
        """Number of field elements 2^nu."""
        return 1 << self.nu

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        m = self.order - 1
        return self.exp_table[(self.log_table[a] + self.log_table[b]) % m]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(2^nu)")
        m = self.order - 1
        return self.exp_table[(m - self.log_table[a]) % m]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("negative power of 0 in GF(2^nu)")
            return 0
        m = self.order - 1
        return self.exp_table[(self.log_table[a] * e) % m]

    def solve_quadratic(self, c: int) -> int:
        """Return y with y^2 + y = c, or -1 if no solution exists.

        y and y+1 are the two solutions when one exists (half of all c).
        Backed by a table built on first use.
        """
        tbl = self._quad_table
        if not tbl:
            sol = [-1] * self.order
            for y in range(self.order):
                key = self.mul(y, y) ^ y
                if sol[key] == -1:
                    sol[key] = y
            tbl = tuple(sol)
            object.__setattr__(self, "_quad_table", tbl)
        return tbl[c]

    def exp_np(self) -> np.ndarray:
        """Antilog table doubled to length 2*(2^nu - 1), for index arithmetic
        without a modulo in vectorized root searches."""
        return np.array(self.exp_table + self.exp_table, dtype=np.int64)


_FIELD_CACHE: dict[int, FieldTable] = {}


def build_field(nu: int) -> FieldTable:
    """Construct GF(2^nu) for 3 <= nu <= 12.

    The primitive polynomial is the lexicographically smallest one of degree
    nu (smallest integer bitmask among monic degree-nu polynomials), found by
    exhaustive search with an order check on x.
    """
    if not NU_MIN <= nu <= NU_MAX:
        raise ValueError(f"nu must be in [{NU_MIN}, {NU_MAX}], got {nu}")
    cached = _FIELD_CACHE.get(nu)
    if cached is not None:
        return cached

    poly = -1
    for candidate in range((1 << nu) | 1, 1 << (nu + 1), 2):
        if _is_primitive(candidate, nu):
            poly = candidate
            break
    if poly < 0:  # unreachable: primitive polynomials exist for every degree
        raise ValueError(f"no primitive polynomial of degree {nu}")

    q = 1 << nu
    exp = [0] * (q - 1)
    log = [-1] * q
    cur = 1
    for i in range(q - 1):
        exp[i] = cur
        log[cur] = i
        cur = _xtimes(cur, poly, nu)

    table = FieldTable(nu=nu, prim_poly=poly, exp_table=tuple(exp), log_table=tuple(log))
    _FIELD_CACHE[nu] = table
    return table


def gf_mul(f: FieldTable, a: int, b: int) -> int:
    """Product of two field elements."""
    return f.mul(a, b)


def gf_inv(f: FieldTable, a: int) -> int:
    """Multiplicative inverse; raises ZeroDivisionError for 0."""
    return f.inv(a)
