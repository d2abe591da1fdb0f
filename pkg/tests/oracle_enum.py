"""Brute-force reference for the constrained minimum-length search.

Enumerates every codeword admitted by a solver configuration, decodes it,
scores it directly against the measurements, and returns the feasible
codeword minimizing (length, residual, stream). No pruning, no shared
search machinery: a disagreement with the solver points at the search.

Only usable at toy sizes; the callers keep n, m and the structure knobs
small enough that full enumeration stays in the low hundreds of thousands.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from mcpursuit.codecs import (
    _encode_pp_numerators,
    coeff_resolution,
    encode_literal,
    encode_sparse,
    pp_sample_numerators,
)
from mcpursuit.quantize import QuantizedVector
from mcpursuit.solver import SolverConfig


def iter_config_codebook(n: int, m: int, config: SolverConfig):
    """Yield (payload, vector) for every codeword within config's scope."""
    max_k = config.max_sparse_k
    max_k = n if max_k is None else min(max_k, n)
    for k in range(max_k + 1):
        for support in itertools.combinations(range(n), k):
            for values in itertools.product(range(1, 1 << m), repeat=k):
                nums = [0] * n
                for pos, v in zip(support, values):
                    nums[pos] = v
                q = QuantizedVector(tuple(nums), m)
                yield encode_sparse(q).payload, q
    if config.include_pp and n >= 1:
        for n_deg in range(min(config.pp_max_degree, n - 1) + 1):
            m_prime = coeff_resolution(n_deg, m)
            rows = [
                row
                for row in itertools.product(range(1 << m_prime), repeat=n_deg + 1)
                if sum(row) < 1 << m_prime
            ]
            for q_breaks in range(min(config.pp_max_breaks, n - 1) + 1):
                for breaks in itertools.combinations(range(1, n), q_breaks):
                    for blocks in itertools.product(rows, repeat=q_breaks + 1):
                        nums = pp_sample_numerators(breaks, blocks, n_deg, n, m)
                        coded = _encode_pp_numerators(breaks, blocks, n_deg, n, m)
                        yield coded.payload, QuantizedVector(nums, m)
    if config.include_literal:
        for nums in itertools.product(range(1 << m), repeat=n):
            q = QuantizedVector(nums, m)
            yield encode_literal(q).payload, q


@dataclass(frozen=True)
class OracleAnswer:
    dl_bits: int
    residual: float
    stream: str
    vector: QuantizedVector
    runner_up_gap: float  # residual margin to the next distinct vector at min dl


def brute_force_argmin(
    ens, y: np.ndarray, m: int, eta: float, config: SolverConfig
) -> OracleAnswer | None:
    """Best feasible codeword under (dl, residual, stream), or None."""
    a = np.asarray(ens.matrix, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    best = None
    second_res = np.inf
    for payload, q in iter_config_codebook(ens.n, m, config):
        res = float(np.linalg.norm(a @ np.array(q.to_floats()) - y))
        if res > eta:
            continue
        key = (len(payload), res, payload)
        if best is None:
            best = (key, q)
            continue
        if key < best[0]:
            if q != best[1] and key[0] == best[0][0]:
                second_res = best[0][1]
            elif key[0] < best[0][0]:
                second_res = np.inf
            best = (key, q)
        elif q != best[1] and key[0] == best[0][0]:
            second_res = min(second_res, res)
    if best is None:
        return None
    (dl, res, payload), q = best
    return OracleAnswer(dl, res, payload, q, second_res - res)


def assert_matches_oracle(result, oracle: OracleAnswer | None, ens, y, eta):
    """Solver result must land on the oracle answer.

    Length must agree exactly. Residuals are compared after recomputing
    them directly from the returned vector, because the solver's internal
    estimate comes through a QR factorization and carries ~1e-8 * |y|
    cancellation noise near zero. The vector must agree whenever the
    oracle's optimum beats every other same-length vector by more than
    that noise band; inside the band either winner is acceptable.
    """
    a = np.asarray(ens.matrix, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    band = 1e-7 * (1.0 + float(np.linalg.norm(y)))
    if oracle is None:
        if result.status == "ok":
            direct = float(
                np.linalg.norm(a @ np.array(result.x_hat.to_floats()) - y)
            )
            assert direct <= eta + band, (
                f"solver accepted an infeasible vector: residual {direct} > {eta}"
            )
        return
    assert result.status == "ok", "solver missed a feasible codeword"
    assert result.dl_bits == oracle.dl_bits, (
        f"length mismatch: solver {result.dl_bits}, oracle {oracle.dl_bits}"
    )
    direct = float(np.linalg.norm(a @ np.array(result.x_hat.to_floats()) - y))
    assert direct <= oracle.residual + band, (
        f"residual mismatch: solver {direct}, oracle {oracle.residual}"
    )
    assert abs(result.residual - direct) <= band, (
        f"internal residual estimate off: {result.residual} vs direct {direct}"
    )
    if oracle.runner_up_gap > band:
        assert result.x_hat == oracle.vector, (
            f"vector mismatch with strict oracle margin {oracle.runner_up_gap}"
        )
        assert result.stream == oracle.stream
