"""Gaussian measurement ensembles and their spectral diagnostics.

An ensemble is a d x n matrix with iid N(0, 1/d) entries, regenerable
from a 128-bit key. The checks in this module validate the two
concentration facts the recovery analysis leans on: the lower tail of
|Az|^2 / |z|^2 for a fixed direction z, and the upper tail of the largest
singular value.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "MeasurementEnsemble",
    "sample_ensemble",
    "save_ensemble",
    "load_ensemble",
    "power_iteration_sigma_max",
    "sigma_max_expectation_bound",
    "sigma_max_tail_bound",
    "chi_square_lower_tail_bound",
    "TailCheckResult",
    "mc_check_chi_lower_tail",
    "mc_check_sigma_tail",
]

_MAGIC = b"MCPE"
_VERSION = 1


@dataclass(frozen=True)
class MeasurementEnsemble:
    matrix: np.ndarray  # (d, n), iid N(0, 1/d)
    key: int  # 128-bit regeneration key

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]

    @cached_property
    def sigma_max(self) -> float:
        return power_iteration_sigma_max(self.matrix)

    def expectation_bound(self, t: float) -> float:
        """1 + sqrt(n/d) + t, the threshold whose exceedance probability
        sigma_max_tail_bound controls."""
        return sigma_max_expectation_bound(self.n, self.d) + t


def sigma_max_expectation_bound(n: int, d: int) -> float:
    return 1.0 + math.sqrt(n / d)


def sample_ensemble(n: int, d: int, key: int) -> MeasurementEnsemble:
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    if not 0 <= key < 1 << 128:
        raise ValueError("key must fit in 128 bits")
    gen = np.random.Generator(np.random.Philox(key=key))
    matrix = gen.normal(0.0, 1.0 / math.sqrt(d), size=(d, n))
    return MeasurementEnsemble(matrix, key)


def save_ensemble(path, ens: MeasurementEnsemble) -> None:
    """Header-only format: the matrix body is regenerated from the key."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<BII", _VERSION, ens.d, ens.n))
        fh.write(ens.key.to_bytes(16, "big"))


def load_ensemble(path) -> MeasurementEnsemble:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) != len(_MAGIC) + 9 + 16 or not blob.startswith(_MAGIC):
        raise ValueError("not an ensemble file")
    version, d, n = struct.unpack("<BII", blob[4:13])
    if version != _VERSION:
        raise ValueError(f"unsupported ensemble version {version}")
    key = int.from_bytes(blob[13:29], "big")
    return sample_ensemble(n, d, key)


def power_iteration_sigma_max(
    a: np.ndarray, rel_tol: float = 1e-8, max_iter: int = 50_000
) -> float:
    """Largest singular value via power iteration on the smaller Gram matrix.

    Deterministic ramp start; stops when the Rayleigh quotient is stable
    to rel_tol. Degenerate top singular pairs are harmless because any
    vector in the top eigenspace already attains the quotient.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.size == 0:
        raise ValueError("need a nonempty matrix")
    gram = a @ a.T if a.shape[0] <= a.shape[1] else a.T @ a
    v = 1.0 + 0.01 * np.arange(gram.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = gram @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        new_lam = float(v @ (gram @ v))
        if abs(new_lam - lam) <= rel_tol * new_lam:
            return math.sqrt(new_lam)
        lam = new_lam
    return math.sqrt(lam)


# ---------------------------------------------------------------------------
# concentration bounds and their Monte-Carlo checks


def chi_square_lower_tail_bound(d: int, tau: float) -> float:
    """P( |Az|^2 <= (1 - tau) |z|^2 ) <= exp( d/2 * (tau + ln(1 - tau)) )
    for a fixed z and iid N(0, 1/d) rows; tau in (0, 1)."""
    if not 0.0 < tau < 1.0:
        raise ValueError("need 0 < tau < 1")
    if d < 1:
        raise ValueError("need d >= 1")
    return math.exp(0.5 * d * (tau + math.log1p(-tau)))


def sigma_max_tail_bound(d: int, t: float) -> float:
    """P( sigma_max > 1 + sqrt(n/d) + t ) <= exp(-d t^2 / 2)."""
    if t < 0:
        raise ValueError("need t >= 0")
    return math.exp(-0.5 * d * t * t)


@dataclass(frozen=True)
class TailCheckResult:
    empirical: float
    bound: float
    trials: int

    @property
    def sigma(self) -> float:
        # binomial deviation scale at the bound itself
        return math.sqrt(max(self.bound * (1.0 - self.bound), 1e-300) / self.trials)

    @property
    def passed(self) -> bool:
        return self.empirical <= self.bound + 3.0 * self.sigma


def mc_check_chi_lower_tail(
    d: int,
    tau: float,
    trials: int,
    rng: np.random.Generator,
    ambient_n: int = 8,
    batch: int = 2000,
) -> TailCheckResult:
    """Empirical rate of |Az|^2 <= (1 - tau) for unit z over fresh ensembles.

    Draws the full d x n matrix and an independent random direction per
    trial, exactly the objects the recovery run uses.
    """
    bound = chi_square_lower_tail_bound(d, tau)
    hits = 0
    done = 0
    scale = 1.0 / math.sqrt(d)
    while done < trials:
        b = min(batch, trials - done)
        mats = rng.normal(0.0, scale, size=(b, d, ambient_n))
        z = rng.normal(size=(b, ambient_n))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        r = np.einsum("bdn,bn->bd", mats, z)
        hits += int(np.count_nonzero(np.sum(r * r, axis=1) <= 1.0 - tau))
        done += b
    return TailCheckResult(hits / trials, bound, trials)


def mc_check_sigma_tail(
    n: int,
    d: int,
    t: float,
    trials: int,
    rng: np.random.Generator,
    batch: int = 500,
) -> TailCheckResult:
    """Empirical rate of sigma_max > 1 + sqrt(n/d) + t over fresh ensembles."""
    bound = sigma_max_tail_bound(d, t)
    threshold = sigma_max_expectation_bound(n, d) + t
    hits = 0
    done = 0
    scale = 1.0 / math.sqrt(d)
    while done < trials:
        b = min(batch, trials - done)
        mats = rng.normal(0.0, scale, size=(b, d, n))
        tops = np.linalg.svd(mats, compute_uv=False)[:, 0]
        hits += int(np.count_nonzero(tops > threshold))
        done += b
    return TailCheckResult(hits / trials, bound, trials)
