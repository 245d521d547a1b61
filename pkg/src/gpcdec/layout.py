"""Incidence structure of generalized product codes.

A generalized product code (GPC) protects every bit with exactly two
component codewords.  This module captures that incidence structure --
which two codewords own each bit, at which positions -- together with the
iteration schedule, independently of any decoding logic.  Two builders are
provided:

* ``build_product_layout``: the classic n x n product code.  Rows are
  codeword type 1, columns type 2, and the bit in row j / column l sits at
  position l of row codeword j and position j of column codeword l
  (1-based).
* ``build_staircase_layout``: a terminated staircase chain.  Square blocks
  ``B_0 .. B_{M-1}`` of side n/2 are stacked so that every row of
  ``[B_{m-1}^T  B_m]`` is a component codeword; ``B_0`` and ``B_{M-1}`` are
  known-zero termination blocks.  Codeword types index the block position.

The layout is immutable after construction and holds only index arrays, so
it can be shared freely between decoding processes.
"""

from typing import Iterator, NamedTuple

import numpy as np

from .bch import ComponentCodeSpec

__all__ = [
    "CodewordId",
    "GpcLayout",
    "build_product_layout",
    "build_staircase_layout",
    "incident_codewords",
    "bits_of",
    "bit_at",
]


class CodewordId(NamedTuple):
    """Public codeword handle: (type, index within type), both 1-based."""

    type_i: int
    index_j: int


class HalfIteration(NamedTuple):
    """One scheduled pass: codeword indices to visit (ascending), the BDD
    budget to use, and whether failed statuses reset before the pass."""

    cw_indices: np.ndarray
    budget: int
    reset_failed: bool


class GpcLayout:
    """Static bit/codeword incidence plus the decoding schedule.

    Internal codeword indices are ``0 .. n_cw-1`` with all codewords of a
    type contiguous; bit indices are ``0 .. n_bits-1``.  Arrays:

    ``cw_bits[c, p]``
        global bit index at position p of codeword c.
    ``bit_cw[b], bit_pos[b]``
        the (up to two) codewords covering bit b and b's position in each;
        -1 marks the absent second codeword of termination-block bits.
    ``partner_cw[c, p], partner_pos[c, p]``
        the other codeword through position p of codeword c, and the
        position of the shared bit there; -1 where no partner exists.
    ``pinned[b]``
        True for structurally-zero bits (termination blocks).  Decoders
        must treat a proposed flip of a pinned bit as decoding failure.
    ``counted[b]``
        True for bits included in error-rate accounting (all bits of a
        product code; the real data blocks of a staircase).
    """

    def __init__(
        self,
        kind: str,
        code: ComponentCodeSpec,
        num_types: int,
        per_type: int,
        n_bits: int,
        cw_bits: np.ndarray,
        pinned: np.ndarray,
        counted: np.ndarray,
        window: int | None = None,
    ):
        self.kind = kind
        self.code = code
        self.num_types = num_types
        self.per_type = per_type
        self.n_cw = num_types * per_type
        self.n_bits = n_bits
        self.window = window
        self.cw_bits = np.ascontiguousarray(cw_bits, dtype=np.int32)
        self.pinned = pinned
        self.counted = counted
        self._build_incidence()
        self.type_of_cw = np.repeat(
            np.arange(1, num_types + 1, dtype=np.int32), per_type
        )
        self._list_cache: dict[str, list] = {}

    def _as_lists(self, name: str) -> list:
        """Cached list-of-lists view of an index array (hot-loop friendly)."""
        got = self._list_cache.get(name)
        if got is None:
            got = getattr(self, name).tolist()
            self._list_cache[name] = got
        return got

    def _build_incidence(self):
        n = self.code.n
        bit_cw = np.full((self.n_bits, 2), -1, dtype=np.int32)
        bit_pos = np.full((self.n_bits, 2), -1, dtype=np.int32)
        fill = np.zeros(self.n_bits, dtype=np.int8)
        for c in range(self.n_cw):
            for p in range(n):
                b = self.cw_bits[c, p]
                k = fill[b]
                if k >= 2:
                    raise ValueError(f"bit {b} covered more than twice")
                bit_cw[b, k] = c
                bit_pos[b, k] = p
                fill[b] = k + 1
        if (fill == 0).any():
            raise ValueError("uncovered bit in layout")
        self.bit_cw = bit_cw
        self.bit_pos = bit_pos
        # partner lookup: the other codeword through each position
        pc = np.full((self.n_cw, n), -1, dtype=np.int32)
        pp = np.full((self.n_cw, n), -1, dtype=np.int32)
        both = fill == 2
        b0 = self.cw_bits  # (n_cw, n) bit at each slot
        covered = both[b0]
        first_is_self = bit_cw[b0, 0] == np.arange(self.n_cw, dtype=np.int32)[:, None]
        other = np.where(first_is_self, bit_cw[b0, 1], bit_cw[b0, 0])
        other_pos = np.where(first_is_self, bit_pos[b0, 1], bit_pos[b0, 0])
        pc[covered] = other[covered]
        pp[covered] = other_pos[covered]
        self.partner_cw = pc
        self.partner_pos = pp
        self.cw_pinned = self.pinned[self.cw_bits]

    # --- id translation ----------------------------------------------------

    def cw_index(self, cid: CodewordId) -> int:
        t, j = cid
        if not (1 <= t <= self.num_types and 1 <= j <= self.per_type):
            raise ValueError(f"unknown codeword id {cid!r}")
        return (t - 1) * self.per_type + (j - 1)

    def cw_id(self, index: int) -> CodewordId:
        if not 0 <= index < self.n_cw:
            raise ValueError(f"codeword index {index} out of range")
        return CodewordId(index // self.per_type + 1, index % self.per_type + 1)

    # --- schedule ------------------------------------------------------------

    def _type_cws(self, t: int) -> np.ndarray:
        start = (t - 1) * self.per_type
        return np.arange(start, start + self.per_type, dtype=np.int32)

    def _window_types(self) -> list[list[int]]:
        """Decodable types per window position: a window anchored at block w0
        spans blocks w0 .. w0+window-1 and can decode exactly the types whose
        two blocks both lie inside."""
        if self.kind == "product":
            return [[1, 2]]
        num_blocks = self.num_types + 1
        w = self.window
        return [
            list(range(w0 + 1, w0 + w)) for w0 in range(num_blocks - w + 1)
        ]

    def window_plans(
        self, ell: int, reduced_t_iters: int = 0
    ) -> Iterator[list[HalfIteration]]:
        """Half-iteration plans grouped by window position.

        A product code is a single window position holding ell sweeps of
        (rows, columns).  A staircase yields one plan per window position:
        ell sweeps over the types inside the window, after which the window
        advances one block.  The first ``reduced_t_iters`` sweeps of each
        plan decode with budget t-1; the entry right after the reduced phase
        carries ``reset_failed`` so the engine re-enables failed codewords.
        A decoder may abandon a plan early once a full sweep changes
        nothing, since the remaining sweeps would repeat it verbatim.
        """
        if ell < 1:
            raise ValueError("ell must be >= 1")
        if not 0 <= reduced_t_iters <= ell:
            raise ValueError("reduced_t_iters must lie in [0, ell]")
        t = self.code.t
        for types in self._window_types():
            arrays = [self._type_cws(ty) for ty in types]
            plan = []
            for it in range(1, ell + 1):
                budget = t - 1 if it <= reduced_t_iters else t
                reset = it == reduced_t_iters + 1 and reduced_t_iters > 0
                for k, arr in enumerate(arrays):
                    plan.append(HalfIteration(arr, budget, reset and k == 0))
            yield plan

    def iteration_plan(
        self, ell: int, reduced_t_iters: int = 0
    ) -> Iterator[HalfIteration]:
        """Flat view of ``window_plans``: one entry per half-iteration."""
        for plan in self.window_plans(ell, reduced_t_iters):
            yield from plan

    @property
    def sweep_len(self) -> int:
        """Half-iterations per sweep: types decoded together in one pass."""
        return 2 if self.kind == "product" else self.window - 1

    @property
    def schedule(self) -> list[np.ndarray]:
        """Codeword sets per half-iteration for a single sweep (ell = 1)."""
        return [h.cw_indices for h in self.iteration_plan(1)]

    # --- bookkeeping ---------------------------------------------------------

    @property
    def n_counted_bits(self) -> int:
        return int(self.counted.sum())

    @property
    def rate(self) -> float:
        n, k = self.code.n, self.code.k
        if self.kind == "product":
            return (k / n) ** 2
        return (2 * k - n) / n  # interior rate of the staircase chain

    def __repr__(self):
        return (
            f"GpcLayout({self.kind}, n={self.code.n}, types={self.num_types}, "
            f"bits={self.n_bits})"
        )


def build_product_layout(code: ComponentCodeSpec) -> GpcLayout:
    """n x n product code: rows are type 1, columns type 2."""
    n = code.n
    n_bits = n * n
    cw_bits = np.empty((2 * n, n), dtype=np.int32)
    grid = np.arange(n_bits, dtype=np.int32).reshape(n, n)
    cw_bits[:n] = grid  # row j covers bits (j, 0..n-1)
    cw_bits[n:] = grid.T  # column l covers bits (0..n-1, l)
    pinned = np.zeros(n_bits, dtype=bool)
    counted = np.ones(n_bits, dtype=bool)
    return GpcLayout("product", code, 2, n, n_bits, cw_bits, pinned, counted)


def build_staircase_layout(
    code: ComponentCodeSpec, num_blocks: int, window: int
) -> GpcLayout:
    """Terminated staircase chain of ``num_blocks`` square blocks.

    ``num_blocks`` counts every block in the chain including the two
    known-zero termination blocks (first and last), so the number of real
    data blocks is ``num_blocks - 2``.  Blocks have side a = n/2.  Codeword
    (m, r) is row r of ``[B_{m-1}^T  B_m]``: its first half runs down column
    r of block m-1, its second half across row r of block m.  A decoding
    window spans ``window`` consecutive blocks and can decode the types
    lying fully inside; it advances one block per position.
    """
    n = code.n
    if n % 2:
        raise ValueError("staircase requires an even component code length")
    if not 2 <= window <= num_blocks:
        raise ValueError("need num_blocks >= window >= 2")
    if num_blocks < 3:
        raise ValueError("need at least one real block (num_blocks >= 3)")
    a = n // 2
    n_bits = num_blocks * a * a
    num_types = num_blocks - 1
    cw_bits = np.empty((num_types * a, n), dtype=np.int32)
    pos = np.arange(a, dtype=np.int32)
    for m in range(1, num_blocks):  # type m spans blocks m-1 and m
        for r in range(a):
            row = cw_bits[(m - 1) * a + r]
            row[:a] = (m - 1) * a * a + pos * a + r  # column r of B_{m-1}
            row[a:] = m * a * a + r * a + pos  # row r of B_m
    blk = np.arange(n_bits, dtype=np.int64) // (a * a)
    pinned = (blk == 0) | (blk == num_blocks - 1)
    counted = ~pinned
    return GpcLayout(
        "staircase", code, num_types, a, n_bits, cw_bits, pinned, counted,
        window=window,
    )


# --- module-level conveniences -------------------------------------------


def bit_at(layout: GpcLayout, cid: CodewordId, position: int) -> int:
    """Global index of the bit at ``position`` (0-based) of a codeword."""
    c = layout.cw_index(cid)
    if not 0 <= position < layout.code.n:
        raise ValueError(f"position {position} out of range")
    return int(layout.cw_bits[c, position])


def incident_codewords(layout: GpcLayout, bit: int) -> tuple[CodewordId, ...]:
    """The codewords covering a bit; two for every regular bit, one for
    termination-block bits of a staircase."""
    if not 0 <= bit < layout.n_bits:
        raise ValueError(f"bit {bit} out of range")
    out = []
    for c in layout.bit_cw[bit]:
        if c >= 0:
            out.append(layout.cw_id(int(c)))
    return tuple(out)


def bits_of(layout: GpcLayout, cid: CodewordId) -> np.ndarray:
    """Global bit indices of a codeword, ordered by position."""
    return layout.cw_bits[layout.cw_index(cid)].copy()
