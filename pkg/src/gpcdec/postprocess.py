"""Post-processing rescues for frames the iterative decoder could not clear.

Two strategies operate on the terminal decoder state:

* ``bitflip_iterate_pp``: flip every bit whose two incident codewords both
  failed, then rerun the frame decoder for a few extra iterations.  On
  minimal stall patterns the failed-codeword intersection is exactly the
  residual error support, so the flip clears the frame outright.
* ``erasure_pp``: treat the intersection bits as erasures and solve for
  them codeword by codeword with the component-code linear solver.  When
  decoding stalled because some anchors miscorrected (spending their full
  correction budget inside failed partner codewords), those suspicious
  anchors can be added to the failed sets first, exposing their bits to
  the erasure solver.  Insertions preserve the guarantee regime in which
  at least one failed set stays smaller than d_min, where every linear
  system on the other side has a unique solution.

Both helpers leave the input state untouched and return a ``PpResult``
holding the rescued frame plus the counters the sim harness serializes.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .engine import (
    ANCHOR,
    DecoderState,
    anchor_decode,
    genie_decode,
    iterative_bdd,
)
from .layout import CodewordId, GpcLayout

__all__ = [
    "FailureReport",
    "PpResult",
    "build_failure_report",
    "bitflip_iterate_pp",
    "erasure_pp",
]

# exhaustive augmentation search is capped to keep worst-case PP bounded
_MAX_COMBINATIONS = 64


@dataclass(frozen=True)
class FailureReport:
    """Terminal-state failure summary: who failed, where failures overlap,
    and which anchors look miscorrected.

    ``failed_by_type`` maps each codeword type to the ids with nonzero
    syndrome.  ``intersection`` holds every bit both of whose incident
    codewords failed.  ``suspicious_anchors`` are anchors that applied
    exactly t corrections, all of them inside failed partner codewords:
    the signature of a plausible miscorrection.
    """

    failed_by_type: dict[int, tuple[CodewordId, ...]]
    intersection: np.ndarray
    suspicious_anchors: tuple[CodewordId, ...]

    @property
    def f1(self) -> tuple[CodewordId, ...]:
        return self.failed_by_type.get(1, ())

    @property
    def f2(self) -> tuple[CodewordId, ...]:
        return self.failed_by_type.get(2, ())

    @property
    def total_failed(self) -> int:
        return sum(len(v) for v in self.failed_by_type.values())


@dataclass(frozen=True)
class PpResult:
    """Outcome of one post-processing attempt."""

    frame: np.ndarray
    success: bool
    f1_size: int
    f2_size: int
    intersection_size: int
    augmented: int = 0


def build_failure_report(state: DecoderState) -> FailureReport:
    """Summarize a terminal decoder state for post-processing.

    Works for any decoder variant: states built directly from a residual
    frame carry no anchors, so their suspicious set is empty and only the
    syndrome-based sets are populated.
    """
    layout = state.layout
    t = layout.code.t
    failed = np.array([s != 0 for s in state.syn], dtype=bool)
    by_type: dict[int, tuple[CodewordId, ...]] = {}
    for ty in range(1, layout.num_types + 1):
        lo = (ty - 1) * layout.per_type
        members = np.nonzero(failed[lo : lo + layout.per_type])[0] + lo
        by_type[ty] = tuple(layout.cw_id(int(c)) for c in members)
    guard = np.append(failed, False)  # index -1 = absent partner, never failed
    inter = np.nonzero(guard[layout.bit_cw[:, 0]] & guard[layout.bit_cw[:, 1]])[0]
    partner = layout._as_lists("partner_cw")
    suspicious = []
    for c in range(layout.n_cw):
        if state.status[c] != ANCHOR:
            continue
        pos = state.anchor_pos[c]
        if pos is None or len(pos) != t:
            continue
        if all(guard[partner[c][p]] for p in pos):
            suspicious.append(layout.cw_id(c))
    return FailureReport(by_type, inter.astype(np.int64), tuple(suspicious))


def bitflip_iterate_pp(
    state: DecoderState,
    extra_iters: int,
    variant: str = "anchor",
    true_frame: np.ndarray | None = None,
    report: FailureReport | None = None,
) -> PpResult:
    """Flip the failed-intersection bits, then rerun the frame decoder.

    The resumed decoder starts from fresh bookkeeping: force-flipping bits
    invalidates the anchor/status state, so carrying it over would break
    the state invariants.  Suspicious anchors are deliberately ignored
    here; widening the flip set tends to hurt this variant.
    ``true_frame`` is only consulted by the genie variant.
    """
    if extra_iters < 1:
        raise ValueError("extra_iters must be >= 1")
    if report is None:
        report = build_failure_report(state)
    layout = state.layout
    flipped = state.frame.copy()
    flipped[report.intersection] ^= 1
    if variant == "anchor":
        out, stats = anchor_decode(layout, flipped, extra_iters, state.delta)
    elif variant == "iterative":
        out, stats = iterative_bdd(layout, flipped, extra_iters)
    elif variant == "genie":
        out, stats = genie_decode(layout, flipped, true_frame, extra_iters)
    else:
        raise ValueError(f"unknown decoder variant {variant!r}")
    return PpResult(
        out,
        stats.syndromes_zero,
        len(report.f1),
        len(report.f2),
        int(report.intersection.size),
        0,
    )


def erasure_pp(
    state: DecoderState,
    rng: np.random.Generator | None = None,
    report: FailureReport | None = None,
    exhaustive: bool = False,
) -> PpResult:
    """Erase the failed-intersection bits and solve for them algebraically.

    Suspicious anchors are inserted into their type's failed set greedily,
    in the order drawn from ``rng`` (ascending codeword index when no rng
    is supplied), keeping at least one failed set below d_min after every
    insertion.  With ``exhaustive`` set, capacity-respecting candidate
    subsets are tried by increasing size instead, at most 64 attempts,
    and the first one that clears the frame wins.  Success means every
    component syndrome reached zero; on failure the returned frame keeps
    whatever partial corrections the solver applied.
    """
    if report is None:
        report = build_failure_report(state)
    layout = state.layout
    f1_size, f2_size = len(report.f1), len(report.f2)
    isize = int(report.intersection.size)
    failed = sorted(
        layout.cw_index(cid)
        for group in report.failed_by_type.values()
        for cid in group
    )
    if not failed:
        return PpResult(state.frame.copy(), True, f1_size, f2_size, isize, 0)
    if layout.num_types == 2:
        candidates = sorted(layout.cw_index(c) for c in report.suspicious_anchors)
    else:
        candidates = []  # augmentation is a two-type construction
    if exhaustive:
        return _erasure_exhaustive(state, failed, candidates, report)
    chosen: list[int] = []
    if candidates:
        if rng is not None:
            order = rng.permutation(len(candidates))
            candidates = [candidates[i] for i in order]
        chosen = _greedy_augment(layout, failed, candidates)
    work = DecoderState(layout, state.frame)
    ok = _erasure_fixpoint(work, sorted(set(failed) | set(chosen)))
    return PpResult(work.frame, ok, f1_size, f2_size, isize, len(chosen))


def _greedy_augment(
    layout: GpcLayout, failed: list[int], ordered: list[int]
) -> list[int]:
    """Insert candidates one at a time while one failed set stays < d_min."""
    d_min = layout.code.d_min
    per_type = layout.per_type
    sizes = [0, 0]
    for c in failed:
        sizes[c // per_type] += 1
    chosen = []
    for c in ordered:
        ty = c // per_type
        sizes[ty] += 1
        if min(sizes) < d_min:
            chosen.append(c)
        else:
            sizes[ty] -= 1
    return chosen


def _erasure_fixpoint(work: DecoderState, failed: list[int]) -> bool:
    """Alternately erasure-decode the failed codewords until nothing moves.

    A member's erased positions are its bits shared with another member.
    Only members whose current syndrome is nonzero are solved; augmented
    anchors start at zero and join once partner corrections disturb them.
    For two-type layouts the smaller failed set goes first; the pass count
    is capped so adversarial oscillating patterns still terminate.
    """
    layout = work.layout
    code = layout.code
    fset = set(failed)
    partner = layout._as_lists("partner_cw")
    bits = layout._as_lists("cw_bits")
    erased = {
        c: [p for p in range(code.n) if partner[c][p] in fset] for c in failed
    }
    if layout.num_types == 2:
        per_type = layout.per_type
        groups = [
            [c for c in failed if c < per_type],
            [c for c in failed if c >= per_type],
        ]
        groups.sort(key=len)
    else:
        groups = [failed]
    for _ in range(max(2 * len(failed), 8)):
        changed = False
        for group in groups:
            for c in group:
                if work.syn[c] == 0:
                    continue
                pos = erased[c]
                if not pos:
                    continue
                word = work.frame[layout.cw_bits[c]]
                out = code.erasure_decode(word, pos)
                if out is None:
                    continue
                for p in np.nonzero(out != word)[0]:
                    work.flip_bit(bits[c][int(p)])
                    changed = True
        if work.all_syndromes_zero():
            return True
        if not changed:
            return False
    return work.all_syndromes_zero()


def _erasure_exhaustive(
    state: DecoderState,
    failed: list[int],
    candidates: list[int],
    report: FailureReport,
) -> PpResult:
    """Try candidate subsets by increasing size; first full success wins."""
    layout = state.layout
    d_min = layout.code.d_min
    per_type = layout.per_type
    base = [0, 0]
    if candidates:  # capacity filter only arises for two-type layouts
        for c in failed:
            base[c // per_type] += 1
    f1_size, f2_size = len(report.f1), len(report.f2)
    isize = int(report.intersection.size)
    attempts = 0
    first_frame = None
    for k in range(len(candidates) + 1):
        for sub in combinations(candidates, k):
            if k:
                sizes = base.copy()
                for c in sub:
                    sizes[c // per_type] += 1
                if min(sizes) >= d_min:
                    continue  # insertion capacity exceeded
            work = DecoderState(layout, state.frame)
            ok = _erasure_fixpoint(work, sorted(set(failed) | set(sub)))
            attempts += 1
            if first_frame is None:
                first_frame = work.frame
            if ok:
                return PpResult(work.frame, True, f1_size, f2_size, isize, k)
            if attempts >= _MAX_COMBINATIONS:
                break
        if attempts >= _MAX_COMBINATIONS:
            break
    out = state.frame.copy() if first_frame is None else first_frame
    return PpResult(out, False, f1_size, f2_size, isize, 0)
