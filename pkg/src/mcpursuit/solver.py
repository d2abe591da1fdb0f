"""Description-length minimization under a measurement constraint.

The program solved here is: among all codewords of the structured codecs
(sparse, piecewise-polynomial, optionally literal), find one whose decoded
vector x satisfies |Ax - y| <= eta, minimizing code length; ties broken by
smaller residual, then deterministically (bitstream order across strata;
within one stratum the walk keeps the first point it reaches at the
minimal residual).

Code length is constant on a stratum (a support set, or a breakpoint and
degree pattern), because value payloads are fixed width. The search walks
strata in ascending length with three exact prunes: strata whose length
already exceeds the incumbent are never generated; a continuous
least-squares bound discards strata whose subspace cannot reach the
constraint set; and an integer sphere walk with a shrinking radius finds
the exact minimum-residual grid point inside each surviving stratum. The
result equals brute-force enumeration of the same codebook, which the
tests check directly at toy sizes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .codecs import (
    PAIR_OVERHEAD_BITS,
    coeff_resolution,
    encode_literal,
    encode_sparse,
    pp_sample_numerators,
    uint_code_len,
    _encode_pp_numerators,
)
from .measure import MeasurementEnsemble
from .quantize import QuantizedVector, quantization_gap_bound

__all__ = [
    "SolverConfig",
    "SolverResourceError",
    "RecoveryResult",
    "ProbeStats",
    "mcp_exact",
    "mcp_tolerant",
    "predicted_error_bound",
    "corollary_error_bound",
    "corollary_failure_prob",
    "dl_budget_bits",
]

_LS_MARGIN = 1e-9  # float slack on the continuous feasibility prune


class SolverResourceError(RuntimeError):
    """Search exceeded the configured node budget."""


@dataclass(frozen=True)
class SolverConfig:
    """Declared codebook scope and resource limits for one solve.

    max_sparse_k of None means supports up to n. The literal stratum is
    excluded by default: it only matters at toy sizes where n*m is small
    enough to enumerate, and every experiment here operates far below the
    literal code length.
    """

    max_sparse_k: int | None = None
    include_pp: bool = True
    pp_max_degree: int = 3
    pp_max_breaks: int = 3
    include_literal: bool = False
    node_cap: int = 1 << 24


@dataclass(frozen=True)
class ProbeStats:
    """Injectivity record for the differences between tested candidates
    and a reference vector (the quantized truth in experiments)."""

    min_gain: float | None  # min |Az| / |z| over tested candidates, z != 0
    candidates: int  # feasible value-level candidates inspected
    zero_diffs: int  # candidates equal to the reference


@dataclass(frozen=True)
class RecoveryResult:
    status: str  # "ok" or "infeasible"
    x_hat: QuantizedVector | None
    dl_bits: int
    codec_id: str
    stream: str
    residual: float
    eta: float
    strata_examined: int
    points_tested: int
    probe: ProbeStats | None


# ---------------------------------------------------------------------------
# error bounds


def predicted_error_bound(
    n: int, d: int, m: int, tau: float, t: float
) -> float:
    """Recovery error guarantee under the injectivity and spectral events:
    ((sqrt(n/d) + 1 + t) / tau + 1) * sqrt(n * 2^(1-2m))."""
    if not 0 < tau <= 1:
        raise ValueError("need 0 < tau <= 1")
    return ((math.sqrt(n / d) + 1.0 + t) / tau + 1.0) * quantization_gap_bound(n, m)


def corollary_error_bound(n: int, alpha: float, kappa: float) -> float:
    """Error guarantee 10 * n^(1/2 - alpha) / (sqrt(kappa) * log2 n) for
    d = ceil(2 alpha kappa log2 n) measurements."""
    if n < 2:
        raise ValueError("need n >= 2")
    return 10.0 * n ** (0.5 - alpha) / (math.sqrt(kappa) * math.log2(n))


def corollary_failure_prob(n: int, alpha: float, kappa: float) -> float:
    return float(n ** (-alpha * kappa))


def dl_budget_bits(kappa: float, delta: float, m: int) -> int:
    """Code-length budget 2(kappa + delta)m plus the measured pair
    overhead; differences of two in-class codewords stay below it."""
    return math.ceil(2.0 * (kappa + delta) * m) + PAIR_OVERHEAD_BITS


# ---------------------------------------------------------------------------
# search bookkeeping


class _Budget:
    __slots__ = ("cap", "strata", "points", "steps")

    def __init__(self, cap: int) -> None:
        self.cap = cap
        self.strata = 0
        self.points = 0
        self.steps = 0  # interior walk iterations at pivot-free levels

    def _check(self) -> None:
        if self.strata + self.points + self.steps > self.cap:
            raise SolverResourceError(
                f"node budget {self.cap} exhausted "
                f"({self.strata} strata, {self.points} points, "
                f"{self.steps} walk steps)"
            )

    def add_strata(self, count: int) -> None:
        self.strata += count
        self._check()

    def add_points(self, count: int = 1) -> None:
        self.points += count
        self._check()

    def add_steps(self, count: int = 1) -> None:
        self.steps += count
        self._check()


@dataclass
class _Incumbent:
    dl: float = math.inf
    residual: float = math.inf
    stream: str = ""
    vector: QuantizedVector | None = None
    codec_id: str = ""

    def offer(
        self,
        dl: int,
        residual: float,
        stream_fn,
        vector_fn,
        codec_id: str,
    ) -> bool:
        if dl > self.dl:
            return False
        if dl == self.dl and residual > self.residual:
            return False
        stream = stream_fn()
        if dl == self.dl and residual == self.residual and stream >= self.stream:
            return False
        self.dl = dl
        self.residual = residual
        self.stream = stream
        self.vector = vector_fn()
        self.codec_id = codec_id
        return True


class _Probe:
    """Accumulates |Az| / |z| for z = candidate - reference."""

    def __init__(self, a: np.ndarray, reference: QuantizedVector) -> None:
        self.a = a
        self.ref = np.array(reference.to_floats())
        self.min_gain: float | None = None
        self.candidates = 0
        self.zero_diffs = 0

    def observe(self, x: np.ndarray) -> None:
        self.candidates += 1
        z = x - self.ref
        nz = float(np.linalg.norm(z))
        if nz == 0.0:
            self.zero_diffs += 1
            return
        gain = float(np.linalg.norm(self.a @ z)) / nz
        if self.min_gain is None or gain < self.min_gain:
            self.min_gain = gain

    def stats(self) -> ProbeStats:
        return ProbeStats(self.min_gain, self.candidates, self.zero_diffs)


# ---------------------------------------------------------------------------
# integer sphere walk


def _sphere_walk(
    r_mat: np.ndarray,
    qty: np.ndarray,
    radius_sq: float,
    lo: int,
    hi: int,
    budget: _Budget,
    on_leaf,
    blocks: list[tuple[int, int]] | None = None,
    block_cap: int | None = None,
):
    """Depth-first walk over integer points u in [lo, hi]^D with
    ||r_mat u - qty||^2 <= radius_sq, zig-zag ordered per level so good
    points come first. on_leaf(u, dist_sq) may return a tightened
    radius_sq; tightening is applied strictly, so later points must beat
    it, not merely tie it. Levels with a negligible pivot fall back to
    box bounds and their iterations are charged to the budget, because
    the radius cannot prune there.

    blocks: optional (start, end) slices over which sum(u) must stay
    strictly below block_cap.
    """
    dims = r_mat.shape[0]
    u = np.zeros(dims, dtype=np.int64)
    # row residual contributions below the current level
    diag = np.abs(np.diag(r_mat))
    diag_ok = diag > 1e-12 * (1.0 + np.abs(r_mat).max())
    block_of = np.full(dims, -1)
    if blocks is not None:
        for bi, (s, e) in enumerate(blocks):
            block_of[s:e] = bi
    block_used = [0] * (len(blocks) if blocks else 0)

    def descend(level: int, partial: float, radius_sq: float) -> float:
        if level < 0:
            budget.add_points()
            tightened = on_leaf(u.copy(), partial)
            return radius_sq if tightened is None else min(radius_sq, tightened)
        inner = float(r_mat[level, level + 1 :] @ u[level + 1 :]) - qty[level]
        pivot = r_mat[level, level]
        avail = radius_sq - partial
        if avail <= 0:
            return radius_sq
        if diag_ok[level]:
            half = math.sqrt(avail)
            lo_f = (-half - inner) / pivot
            hi_f = (half - inner) / pivot
            if lo_f > hi_f:
                lo_f, hi_f = hi_f, lo_f
            lo_l = max(lo, math.ceil(lo_f - 1e-12))
            hi_l = min(hi, math.floor(hi_f + 1e-12))
            center = (-inner) / pivot
        else:
            lo_l, hi_l = lo, hi
            center = 0.5 * (lo + hi)
        bi = block_of[level]
        if bi >= 0:
            hi_l = min(hi_l, block_cap - 1 - block_used[bi])
        if lo_l > hi_l:
            return radius_sq
        # zig-zag: nearest integer to the unconstrained optimum first
        start = min(max(int(round(center)), lo_l), hi_l)
        order = [start]
        step = 1
        while True:
            lo_c, hi_c = start - step, start + step
            added = False
            if hi_c <= hi_l:
                order.append(hi_c)
                added = True
            if lo_c >= lo_l:
                order.append(lo_c)
                added = True
            if not added and lo_c < lo_l and hi_c > hi_l:
                break
            step += 1
        free = not diag_ok[level]
        for val in order:
            if free:
                budget.add_steps()
            contrib = pivot * val + inner
            new_partial = partial + contrib * contrib
            if new_partial >= radius_sq:
                continue
            u[level] = val
            if bi >= 0:
                block_used[bi] += val
            radius_sq = descend(level - 1, new_partial, radius_sq)
            if bi >= 0:
                block_used[bi] -= val
        u[level] = 0
        return radius_sq

    descend(dims - 1, 0.0, radius_sq)


def _qr_rows(a_cols: np.ndarray, y: np.ndarray):
    """QR pieces for |a_cols u - y|^2 = |R u - qty|^2 + base_sq.

    When the stratum has more coordinates than rows, R is padded square
    with zero rows; those levels walk the whole box (zero pivot path)."""
    q, r = np.linalg.qr(a_cols)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    r = signs[:, None] * r
    qty = signs * (q.T @ y)
    base_sq = max(float(y @ y - qty @ qty), 0.0)
    d, dims = r.shape
    if d < dims:
        r = np.vstack((r, np.zeros((dims - d, dims))))
        qty = np.concatenate((qty, np.zeros(dims - d)))
    return r, qty, base_sq


# ---------------------------------------------------------------------------
# stratum generation


def _position_costs(n: int) -> np.ndarray:
    return np.array([uint_code_len(p + 1) for p in range(n)], dtype=np.int64)


def _budgeted_combos(costs: np.ndarray, size: int, budget: int):
    """Ascending index tuples with total cost within budget."""
    n = len(costs)
    if size == 0:
        if budget >= 0:
            yield ()
        return
    cheapest = np.sort(costs)
    prefix = np.concatenate(([0], np.cumsum(cheapest)))

    def rec(start: int, picked: tuple, spent: int):
        need = size - len(picked)
        if need == 0:
            yield picked
            return
        for i in range(start, n - need + 1):
            c = int(costs[i])
            # relaxation: even the globally cheapest fill must fit
            if spent + c + prefix[need - 1] > budget:
                continue
            yield from rec(i + 1, picked + (i,), spent + c)

    yield from rec(0, (), 0)


def _ls_residual_sq(gram: np.ndarray, bvec: np.ndarray, yy: float) -> np.ndarray:
    """Batched continuous least-squares residual^2, exact lower bound on
    any point of the stratum. Singular strata get bound 0 (never pruned)."""
    batch, k, _ = gram.shape
    if k == 1:
        g = gram[:, 0, 0]
        good = g > 1e-300
        out = np.full(batch, yy)
        out[good] = yy - bvec[good, 0] ** 2 / g[good]
    elif k == 2:
        det = gram[:, 0, 0] * gram[:, 1, 1] - gram[:, 0, 1] ** 2
        scale = gram[:, 0, 0] * gram[:, 1, 1] + 1e-300
        good = det > 1e-12 * scale
        v0 = gram[:, 1, 1] * bvec[:, 0] - gram[:, 0, 1] * bvec[:, 1]
        v1 = gram[:, 0, 0] * bvec[:, 1] - gram[:, 0, 1] * bvec[:, 0]
        out = np.zeros(batch)
        quad = bvec[:, 0] * v0 + bvec[:, 1] * v1
        out[good] = yy - quad[good] / det[good]
    else:
        det = np.linalg.det(gram)
        scale = np.abs(np.diagonal(gram, axis1=1, axis2=2)).prod(axis=1) + 1e-300
        good = det > 1e-10 * scale
        out = np.zeros(batch)
        if good.any():
            sol = np.linalg.solve(gram[good], bvec[good][..., None])[..., 0]
            out[good] = yy - np.einsum("bi,bi->b", bvec[good], sol)
    return np.maximum(out, 0.0)


# ---------------------------------------------------------------------------
# the search itself


class _Search:
    def __init__(
        self,
        ens: MeasurementEnsemble,
        y: np.ndarray,
        m: int,
        eta: float,
        config: SolverConfig,
        probe_ref: QuantizedVector | None,
    ) -> None:
        self.a = np.asarray(ens.matrix, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.float64)
        self.n = ens.n
        self.d = ens.d
        self.m = m
        self.eta = eta
        self.config = config
        self.gram_full = None  # filled lazily for sparse scans
        self.aty = self.a.T @ self.y
        self.yy = float(self.y @ self.y)
        self.budget = _Budget(config.node_cap)
        self.incumbent = _Incumbent()
        self.probe = _Probe(self.a, probe_ref) if probe_ref is not None else None
        self.pos_costs = _position_costs(self.n)
        self.len_n = uint_code_len(self.n)
        # floored samples sit within 2^-m below the continuous polynomial,
        # so continuous-space prunes get this much extra room
        self.pp_slack = ens.sigma_max * math.sqrt(self.n) * 2.0 ** (-m)

    # -- sparse strata --------------------------------------------------

    def sparse_dl(self, k: int, cost_sum: int) -> int:
        return 3 + self.len_n + uint_code_len(k + 1) + cost_sum + k * self.m

    def run_sparse(self, k_lo: int = 0, k_hi: int | None = None) -> None:
        max_k = self.config.max_sparse_k
        max_k = self.n if max_k is None else min(max_k, self.n)
        if k_hi is not None:
            max_k = min(max_k, k_hi)
        cheapest = np.sort(self.pos_costs)
        prefix = np.concatenate(([0], np.cumsum(cheapest)))
        for k in range(k_lo, max_k + 1):
            if self.sparse_dl(k, int(prefix[k])) > self.incumbent.dl:
                break
            if k == 0:
                self.budget.add_strata(1)
                self.offer_sparse((), self.sparse_dl(0, 0))
                continue
            if self.gram_full is None:
                self.gram_full = self.a.T @ self.a
            for supports in self.iter_support_chunks(k):
                dls = (
                    self.sparse_dl(k, 0)
                    + self.pos_costs[supports].sum(axis=1)
                )
                keep = dls <= self.incumbent.dl
                supports, dls = supports[keep], dls[keep]
                if len(supports) == 0:
                    continue
                gram = self.gram_full[supports[:, :, None], supports[:, None, :]]
                bvec = self.aty[supports]
                res_sq = _ls_residual_sq(gram, bvec, self.yy)
                feasible = np.sqrt(res_sq) <= self.eta + _LS_MARGIN
                order = np.lexsort((res_sq, dls))
                for idx in order:
                    if not feasible[idx]:
                        continue
                    if dls[idx] > self.incumbent.dl:
                        continue
                    self.offer_sparse(
                        tuple(int(p) for p in supports[idx]), int(dls[idx])
                    )

    def iter_support_chunks(self, k: int, chunk: int = 1 << 16):
        """Support sets of size k within the current length budget, in
        bounded-size blocks so the node cap fires before memory does."""
        budget_left = self.incumbent.dl - self.sparse_dl(k, 0)
        budget_left = int(min(budget_left, self.pos_costs.sum()))
        if k == 1:
            idx = np.nonzero(self.pos_costs <= budget_left)[0]
            if len(idx):
                self.budget.add_strata(len(idx))
                yield idx[:, None]
            return
        if k == 2 and budget_left >= self.pos_costs.max() * 2:
            i, j = np.triu_indices(self.n, 1)
            self.budget.add_strata(len(i))
            yield np.column_stack((i, j))
            return
        gen = _budgeted_combos(self.pos_costs, k, budget_left)
        while True:
            block = list(itertools.islice(gen, chunk))
            if not block:
                return
            self.budget.add_strata(len(block))
            yield np.array(block, dtype=np.int64)

    def offer_sparse(self, support: tuple[int, ...], dl: int) -> None:
        k = len(support)
        top = (1 << self.m) - 1
        scale = 2.0 ** (-self.m)
        if k == 0:
            res = math.sqrt(self.yy)
            if res <= self.eta:
                self.accept_sparse(support, np.zeros(0, dtype=np.int64), dl, res)
            return
        cols = self.a[:, list(support)] * scale
        r_mat, qty, base_sq = _qr_rows(cols, self.y)
        radius_sq = self.eta**2 + _LS_MARGIN - base_sq
        if radius_sq < 0:
            return

        def on_leaf(u, dist_sq):
            res = math.sqrt(base_sq + dist_sq)
            if res > self.eta:
                return None
            self.accept_sparse(support, u, dl, res)
            # after the first feasible point this stratum holds the
            # incumbent length, so only residual improvements matter
            return max(self.incumbent.residual**2 - base_sq, 0.0)

        _sphere_walk(r_mat, qty, radius_sq, 1, top, self.budget, on_leaf)

    def accept_sparse(self, support, u, dl, res):
        def vector_fn():
            nums = [0] * self.n
            for pos, val in zip(support, u):
                nums[pos] = int(val)
            return QuantizedVector(tuple(nums), self.m)

        vec = vector_fn()
        if self.probe is not None:
            self.probe.observe(np.array(vec.to_floats()))
        self.incumbent.offer(
            dl, res, lambda: encode_sparse(vec).payload, lambda: vec, "sparse"
        )

    # -- piecewise-polynomial strata -------------------------------------

    def run_pp(self) -> None:
        if not self.config.include_pp or self.n < 1:
            return
        t = np.arange(self.n) / self.n
        max_deg = min(self.config.pp_max_degree, self.n - 1)
        prefix_tables = {}
        break_costs = np.array(
            [uint_code_len(b) for b in range(1, self.n)], dtype=np.int64
        )
        cheapest_b = np.sort(break_costs)
        prefix_b = np.concatenate(([0], np.cumsum(cheapest_b)))
        for n_deg in range(max_deg + 1):
            m_prime = coeff_resolution(n_deg, self.m)
            base = 3 + self.len_n + uint_code_len(n_deg + 1)
            if base + 1 + (n_deg + 1) * m_prime > self.incumbent.dl:
                break
            for j in range(n_deg + 1):
                if j not in prefix_tables:
                    weighted = self.a * t[None, :] ** j
                    prefix_tables[j] = np.concatenate(
                        (np.zeros((self.d, 1)), np.cumsum(weighted, axis=1)), axis=1
                    )
            max_q = min(self.config.pp_max_breaks, self.n - 1)
            for q_breaks in range(max_q + 1):
                fixed = (
                    base
                    + uint_code_len(q_breaks + 1)
                    + (q_breaks + 1) * (n_deg + 1) * m_prime
                )
                if fixed + int(prefix_b[q_breaks]) > self.incumbent.dl:
                    break
                budget_left = int(
                    min(self.incumbent.dl - fixed, break_costs.sum(initial=0))
                )
                gen = (
                    tuple(i + 1 for i in combo)
                    for combo in _budgeted_combos(break_costs, q_breaks, budget_left)
                )
                while True:
                    combos = list(itertools.islice(gen, 2048))
                    if not combos:
                        break
                    self.budget.add_strata(len(combos))
                    self.process_pp_batch(
                        n_deg, q_breaks, combos, fixed, prefix_tables, m_prime
                    )

    def process_pp_batch(self, n_deg, q_breaks, combos, fixed, tables, m_prime):
        dims = (q_breaks + 1) * (n_deg + 1)
        scale = 2.0 ** (-m_prime)
        batch = len(combos)
        edges = np.zeros((batch, q_breaks + 2), dtype=np.int64)
        edges[:, -1] = self.n
        if q_breaks:
            edges[:, 1:-1] = np.array(combos, dtype=np.int64)
        cols = np.empty((batch, self.d, dims))
        for piece in range(q_breaks + 1):
            lo_e, hi_e = edges[:, piece], edges[:, piece + 1]
            for j in range(n_deg + 1):
                tab = tables[j]
                cols[:, :, piece * (n_deg + 1) + j] = (
                    tab[:, hi_e].T - tab[:, lo_e].T
                ) * scale
        gram = np.einsum("bdi,bdj->bij", cols, cols)
        bvec = np.einsum("bdi,d->bi", cols, self.y)
        res_sq = _ls_residual_sq(gram, bvec, self.yy)
        dls = fixed + np.array(
            [sum(uint_code_len(b) for b in combo) for combo in combos],
            dtype=np.int64,
        )
        # degree 0 decodes to the coefficients themselves; higher degrees
        # floor each sample, so the continuous prune needs slack
        slack = 0.0 if n_deg == 0 else self.pp_slack
        feasible = np.sqrt(res_sq) <= self.eta + slack + _LS_MARGIN
        order = np.lexsort((res_sq, dls))
        for idx in order:
            if not feasible[idx] or dls[idx] > self.incumbent.dl:
                continue
            self.offer_pp(
                n_deg, combos[idx], int(dls[idx]), cols[idx], m_prime
            )

    def offer_pp(self, n_deg, breaks, dl, cols, m_prime):
        pieces = len(breaks) + 1
        top = (1 << m_prime) - 1
        r_mat, qty, base_sq = _qr_rows(cols, self.y)
        slack = 0.0 if n_deg == 0 else self.pp_slack
        radius_sq = (self.eta + slack) ** 2 + _LS_MARGIN - base_sq
        if radius_sq < 0:
            return
        blocks = [
            (p * (n_deg + 1), (p + 1) * (n_deg + 1)) for p in range(pieces)
        ]
        edges = (0,) + breaks + (self.n,)
        lengths = [edges[p + 1] - edges[p] for p in range(pieces)]
        decode = self.pp_decoder(breaks, n_deg, m_prime)

        def on_leaf(u, dist_sq):
            if n_deg == 0:
                # samples equal the piece constants, walk distance is exact
                res = math.sqrt(base_sq + dist_sq)
                if res > self.eta:
                    return None
                nums = tuple(
                    int(v) for v, ln in zip(u, lengths) for _ in range(ln)
                )
            else:
                nums = decode(u)
                res = float(
                    np.linalg.norm(self.a @ (np.ldexp(np.asarray(nums, dtype=np.float64), -self.m)) - self.y)
                )
                if res > self.eta:
                    return None
                nums = tuple(int(v) for v in nums)
            vec = QuantizedVector(nums, self.m)
            if self.probe is not None:
                self.probe.observe(np.array(vec.to_floats()))
            rows = tuple(
                tuple(int(v) for v in u[p * (n_deg + 1) : (p + 1) * (n_deg + 1)])
                for p in range(pieces)
            )
            self.incumbent.offer(
                dl,
                res,
                lambda: _encode_pp_numerators(
                    breaks, rows, n_deg, self.n, self.m
                ).payload,
                lambda: vec,
                "piecewise_poly",
            )
            # the walk distance understates the decoded residual by at
            # most slack, so points this far out can still tie or win
            return max(
                (self.incumbent.residual + slack) ** 2 - base_sq, 0.0
            )

        _sphere_walk(
            r_mat,
            qty,
            radius_sq,
            0,
            top,
            self.budget,
            on_leaf,
            blocks=blocks,
            block_cap=1 << m_prime,
        )

    def pp_decoder(self, breaks, n_deg, m_prime):
        """Sample-numerator evaluator for one stratum; int64 fast path when
        the intermediate products provably fit."""
        n, m = self.n, self.m
        bit_bound = (
            m_prime + n_deg * max(n - 1, 1).bit_length() + (n_deg + 1).bit_length() + m
        )
        if bit_bound > 62:
            def decode_exact(u):
                rows = tuple(
                    tuple(int(v) for v in u[p * (n_deg + 1) : (p + 1) * (n_deg + 1)])
                    for p in range(len(breaks) + 1)
                )
                return pp_sample_numerators(breaks, rows, n_deg, n, m)

            return decode_exact
        i = np.arange(n, dtype=np.int64)
        basis = np.empty((n, n_deg + 1), dtype=np.int64)
        for j in range(n_deg + 1):
            basis[:, j] = i**j * n ** (n_deg - j)
        denom = (1 << m_prime) * n**n_deg
        edges = (0,) + tuple(breaks) + (n,)

        def decode_fast(u):
            out = np.empty(n, dtype=np.int64)
            for p in range(len(edges) - 1):
                lo, hi = edges[p], edges[p + 1]
                block = u[p * (n_deg + 1) : (p + 1) * (n_deg + 1)]
                out[lo:hi] = (basis[lo:hi] @ block << m) // denom
            return out

        return decode_fast

    # -- literal stratum -------------------------------------------------

    def run_literal(self) -> None:
        if not self.config.include_literal:
            return
        dl = 3 + self.n * self.m
        if dl > self.incumbent.dl:
            return
        self.budget.add_strata(1)
        top = (1 << self.m) - 1
        scale = 2.0 ** (-self.m)
        r_mat, qty, base_sq = _qr_rows(self.a * scale, self.y)
        radius_sq = self.eta**2 + _LS_MARGIN - base_sq
        if radius_sq < 0:
            return

        def on_leaf(u, dist_sq):
            res = math.sqrt(base_sq + dist_sq)
            if res > self.eta:
                return None
            vec = QuantizedVector(tuple(int(v) for v in u), self.m)
            if self.probe is not None:
                self.probe.observe(np.array(vec.to_floats()))
            self.incumbent.offer(
                dl, res, lambda: encode_literal(vec).payload, lambda: vec, "literal"
            )
            if dl == self.incumbent.dl:
                return max(self.incumbent.residual**2 - base_sq, 0.0)
            return None

        _sphere_walk(r_mat, qty, radius_sq, 0, top, self.budget, on_leaf)

    # -- putting it together ----------------------------------------------

    def run(self) -> RecoveryResult:
        # shallow sparse first, then piecewise strata, then deep sparse:
        # structured dense signals set an incumbent before the k-combo
        # space grows combinatorial. Order never changes the winner; any
        # stratum skipped has length strictly above the final incumbent.
        self.run_sparse(0, 2)
        self.run_pp()
        self.run_sparse(3, None)
        self.run_literal()
        inc = self.incumbent
        probe_stats = self.probe.stats() if self.probe is not None else None
        if inc.vector is None:
            return RecoveryResult(
                "infeasible",
                None,
                0,
                "",
                "",
                math.inf,
                self.eta,
                self.budget.strata,
                self.budget.points,
                probe_stats,
            )
        return RecoveryResult(
            "ok",
            inc.vector,
            int(inc.dl),
            inc.codec_id,
            inc.stream,
            inc.residual,
            self.eta,
            self.budget.strata,
            self.budget.points,
            probe_stats,
        )


def mcp_exact(
    ens: MeasurementEnsemble,
    y: np.ndarray,
    m: int,
    eta: float | None = None,
    config: SolverConfig = SolverConfig(),
    probe_ref: QuantizedVector | None = None,
) -> RecoveryResult:
    """Minimize code length subject to |Ax - y| <= eta.

    The default eta is sigma_max * sqrt(n * 2^(1-2m)), large enough that
    the m-bit truncation of any signal in [0,1]^n consistent with y stays
    feasible, so the program always has the truncated truth to fall back
    on when y = A x_o exactly.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (ens.d,):
        raise ValueError(f"y must have shape ({ens.d},)")
    if eta is None:
        eta = ens.sigma_max * quantization_gap_bound(ens.n, m)
    if eta < 0:
        raise ValueError("eta must be >= 0")
    return _Search(ens, y, m, float(eta), config, probe_ref).run()


def mcp_tolerant(
    ens: MeasurementEnsemble,
    y: np.ndarray,
    m: int,
    eps_n: float,
    config: SolverConfig = SolverConfig(),
    probe_ref: QuantizedVector | None = None,
) -> RecoveryResult:
    """Variant for signals that are only eps_n-close to the coded class:
    the constraint loosens to sigma_max * (eps_n + sqrt(n * 2^(1-2m)))."""
    if eps_n < 0:
        raise ValueError("need eps_n >= 0")
    eta = ens.sigma_max * (eps_n + quantization_gap_bound(ens.n, m))
    return mcp_exact(ens, y, m, eta, config, probe_ref)
