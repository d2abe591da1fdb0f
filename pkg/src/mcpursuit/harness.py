"""Experiment drivers behind the command line interface.

Each driver consumes a frozen config, splits its master seed per trial,
and writes CSV output plus a JSON manifest. The CSV bytes are a pure
function of the config, so a rerun reproduces them exactly; anything
that varies between runs (wall time, digests) lives in the manifest.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .codecs import sparse_dl_bound
from .measure import (
    mc_check_chi_lower_tail,
    mc_check_sigma_tail,
    sample_ensemble,
)
from .quantize import quantization_gap_bound, quantize_vector
from .rng import derive_seed, make_generator
from .signals import (
    SMOOTH_BATTERY,
    gen_lp_ball,
    gen_sparse,
    lp_sparsity_level,
    lp_tail_bound,
    piecewise_poly_fit,
    smooth_fit_bound,
    top_k_approx,
)
from .solver import (
    SolverConfig,
    corollary_error_bound,
    corollary_failure_prob,
    dl_budget_bits,
    mcp_exact,
    mcp_tolerant,
    predicted_error_bound,
)

__all__ = [
    "PhaseScanConfig",
    "CorollaryConfig",
    "LemmaConfig",
    "MismatchConfig",
    "ExperimentResult",
    "run_phase_scan",
    "run_corollary_check",
    "run_lemma_suite",
    "run_mismatch_scan",
]


# ---------------------------------------------------------------------------
# output plumbing


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _git_blob_sha1(data: bytes) -> str:
    h = hashlib.sha1()
    h.update(b"blob %d\0" % len(data))
    h.update(data)
    return h.hexdigest()


def _write_manifest(out_dir: Path, name: str, config, csv_names: list[str],
                    summary: dict, wall_time: float) -> Path:
    outputs = {}
    for fname in csv_names:
        data = (out_dir / fname).read_bytes()
        outputs[fname] = {
            "sha1": _git_blob_sha1(data),
            "bytes": len(data),
            "rows": data.count(b"\n") - 1,
        }
    manifest = {
        "experiment": name,
        "config": asdict(config),
        "outputs": outputs,
        "summary": summary,
        "wall_time_s": wall_time,
    }
    path = out_dir / f"{name}_manifest.json"
    with open(path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


@dataclass
class ExperimentResult:
    name: str
    passed: bool
    summary: dict
    outputs: tuple[str, ...]


# ---------------------------------------------------------------------------
# sparse phase scan


@dataclass(frozen=True)
class PhaseScanConfig:
    n: int = 256
    m: int = 8
    k: int = 2
    d_values: tuple[int, ...] = (5, 10, 15, 20, 25, 30, 35, 40)
    trials: int = 200
    tau: float = 0.04
    t: float = 1.0
    master_seed: int = 20240801


def run_phase_scan(cfg: PhaseScanConfig, out_dir) -> ExperimentResult:
    """Recovery of exactly k-sparse signals across measurement counts.

    Per trial: a fresh ensemble, a fresh signal, recovery at the default
    eta, error against the continuous truth. Success is scored two ways:
    against the a priori error bound at (tau, t), and against the fixed
    recovery threshold 4 * quantization gap. The probe records the
    smallest measured gain |Az| / |z| over candidates the search accepted,
    which is the empirical content of the tau-incoherence event.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()
    threshold = 4.0 * quantization_gap_bound(cfg.n, cfg.m)
    scope = SolverConfig(max_sparse_k=cfg.k, include_pp=False)
    rows = []
    summary: dict = {"threshold": threshold, "per_d": {}}
    for d in cfg.d_values:
        bound = predicted_error_bound(cfg.n, d, cfg.m, cfg.tau, cfg.t)
        bound_hits = recovery_hits = e2_hits = 0
        e1_worst = None
        for trial in range(cfg.trials):
            ens = sample_ensemble(
                cfg.n, d, derive_seed(cfg.master_seed, "scan-ens", d, trial)
            )
            rng = make_generator(cfg.master_seed, "scan-sig", d, trial)
            x = gen_sparse(cfg.n, cfg.k, rng)
            xq = quantize_vector(x, cfg.m)
            res = mcp_exact(ens, ens.matrix @ x, cfg.m, config=scope, probe_ref=xq)
            if res.status == "ok":
                err = float(np.linalg.norm(np.array(res.x_hat.to_floats()) - x))
            else:
                err = math.inf
            e2_ok = ens.sigma_max <= ens.expectation_bound(cfg.t)
            gain = res.probe.min_gain if res.probe is not None else None
            bound_hits += err <= bound
            recovery_hits += err <= threshold
            e2_hits += e2_ok
            if gain is not None and (e1_worst is None or gain < e1_worst):
                e1_worst = gain
            rows.append((
                d, trial, cfg.n, cfg.m, cfg.k, res.status, err, bound,
                err <= bound, threshold, err <= threshold,
                res.dl_bits, res.codec_id, res.residual, res.eta,
                ens.sigma_max, e2_ok, gain,
                res.probe.candidates if res.probe else None,
                res.probe.zero_diffs if res.probe else None,
                res.strata_examined, res.points_tested,
            ))
        summary["per_d"][d] = {
            "bound": bound,
            "bound_rate": bound_hits / cfg.trials,
            "recovery_rate": recovery_hits / cfg.trials,
            "e2_rate": e2_hits / cfg.trials,
            "e1_min_gain": e1_worst,
        }
    d_hi, d_lo = max(cfg.d_values), min(cfg.d_values)
    rate_hi = summary["per_d"][d_hi]["recovery_rate"]
    rate_lo = summary["per_d"][d_lo]["recovery_rate"]
    summary["bound_rate_at_max_d"] = summary["per_d"][d_hi]["bound_rate"]
    summary["recovery_gap"] = rate_hi - rate_lo
    passed = summary["bound_rate_at_max_d"] >= 0.95 and summary["recovery_gap"] >= 0.3
    header = [
        "d", "trial", "n", "m", "k", "status", "err", "err_bound",
        "within_bound", "recovery_threshold", "recovered",
        "dl_bits", "codec_id", "residual", "eta",
        "sigma_max", "e2_ok", "min_gain", "probe_candidates",
        "probe_zero_diffs", "strata", "points",
    ]
    _write_csv(out_dir / "scan.csv", header, rows)
    _write_manifest(out_dir, "scan", cfg, ["scan.csv"], summary,
                    time.monotonic() - t0)
    return ExperimentResult("scan", passed, summary,
                            ("scan.csv", "scan_manifest.json"))


# ---------------------------------------------------------------------------
# exact-recovery corollary at grid-valued signals


@dataclass(frozen=True)
class CorollaryConfig:
    n: int = 1024
    alpha: float = 1.0
    k: int = 2
    trials: int = 500
    eta: float = 1e-6
    master_seed: int = 20240802

    @property
    def m(self) -> int:
        return math.ceil(self.alpha * math.log2(self.n))

    @property
    def kappa(self) -> float:
        return sparse_dl_bound(self.k, self.n, self.m) / self.m

    @property
    def d(self) -> int:
        return math.ceil(2.0 * self.alpha * self.kappa * math.log2(self.n))


def run_corollary_check(cfg: CorollaryConfig, out_dir) -> ExperimentResult:
    """Exact recovery of grid-valued k-sparse signals at d measurements.

    Signals are drawn on the m-bit grid so the measurement equation has an
    exact in-class solution and the constraint can be pinned near zero.
    The run fails if the error exceeds the stated bound more often than
    the failure probability n^(-alpha*kappa) allows (with 3-sigma slop,
    which at these parameters means: never).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()
    m, d, kappa = cfg.m, cfg.d, cfg.kappa
    err_bound = corollary_error_bound(cfg.n, cfg.alpha, kappa)
    budget = dl_budget_bits(kappa, 1.0, m)
    scope = SolverConfig(max_sparse_k=cfg.k, include_pp=False)
    rows = []
    failures = 0
    for trial in range(cfg.trials):
        ens = sample_ensemble(
            cfg.n, d, derive_seed(cfg.master_seed, "cor-ens", trial)
        )
        rng = make_generator(cfg.master_seed, "cor-sig", trial)
        xq = quantize_vector(gen_sparse(cfg.n, cfg.k, rng), m)
        x = np.array(xq.to_floats())
        res = mcp_exact(ens, ens.matrix @ x, m, eta=cfg.eta, config=scope)
        if res.status == "ok":
            err = float(np.linalg.norm(np.array(res.x_hat.to_floats()) - x))
        else:
            err = math.inf
        success = err <= err_bound
        failures += not success
        rows.append((
            trial, res.status, err, err_bound, success,
            res.dl_bits, budget, res.dl_bits <= budget,
            res.residual, res.strata_examined, res.points_tested,
        ))
    p_fail = corollary_failure_prob(cfg.n, cfg.alpha, kappa)
    allowed = cfg.trials * p_fail + 3.0 * math.sqrt(cfg.trials * p_fail)
    summary = {
        "n": cfg.n, "m": m, "d": d, "kappa": kappa,
        "err_bound": err_bound, "budget_bits": budget,
        "trials": cfg.trials, "failures": failures,
        "failure_prob_bound": p_fail, "allowed_failures": allowed,
    }
    passed = failures <= allowed
    header = [
        "trial", "status", "err", "err_bound", "success",
        "dl_bits", "budget_bits", "within_budget",
        "residual", "strata", "points",
    ]
    _write_csv(out_dir / "corollary.csv", header, rows)
    _write_manifest(out_dir, "corollary", cfg, ["corollary.csv"], summary,
                    time.monotonic() - t0)
    return ExperimentResult("corollary", passed, summary,
                            ("corollary.csv", "corollary_manifest.json"))


# ---------------------------------------------------------------------------
# concentration lemma suite


@dataclass(frozen=True)
class LemmaConfig:
    chi_d_values: tuple[int, ...] = (10, 50, 100)
    chi_tau_values: tuple[float, ...] = (0.2, 0.5, 0.8)
    chi_trials: int = 100_000
    # (d, n, t) per cell: d rows, n columns, slack t above 1 + sqrt(n/d)
    sigma_cells: tuple[tuple[int, int, float], ...] = ((10, 10, 0.5),
                                                       (40, 256, 1.0))
    sigma_trials: int = 10_000
    master_seed: int = 20240803


def run_lemma_suite(cfg: LemmaConfig, out_dir) -> ExperimentResult:
    """Monte Carlo checks of the two concentration bounds the analysis
    leans on: the chi-square lower tail of |Az| for a fixed direction,
    and the sigma_max upper tail of the whole ensemble."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()
    rows = []
    all_ok = True
    for d in cfg.chi_d_values:
        for tau in cfg.chi_tau_values:
            rng = make_generator(cfg.master_seed, "chi", d, repr(tau))
            r = mc_check_chi_lower_tail(d, tau, cfg.chi_trials, rng)
            sigma = math.sqrt(max(r.bound * (1 - r.bound), 1e-12) / r.trials)
            ok = r.empirical <= r.bound + 3 * sigma
            all_ok = all_ok and ok
            rows.append(("chi_lower", d, None, tau, r.trials, r.empirical,
                         r.bound, sigma, ok))
    for d, n, t in cfg.sigma_cells:
        rng = make_generator(cfg.master_seed, "sigma", d, n, repr(t))
        r = mc_check_sigma_tail(n, d, t, cfg.sigma_trials, rng)
        sigma = math.sqrt(max(r.bound * (1 - r.bound), 1e-12) / r.trials)
        ok = r.empirical <= r.bound + 3 * sigma
        all_ok = all_ok and ok
        rows.append(("sigma_tail", d, n, t, r.trials, r.empirical,
                     r.bound, sigma, ok))
    summary = {
        "cells": len(rows),
        "all_within_3_sigma": all_ok,
    }
    header = ["family", "d", "n", "param", "trials", "empirical", "bound",
              "binomial_sigma", "ok"]
    _write_csv(out_dir / "lemmas.csv", header, rows)
    _write_manifest(out_dir, "lemmas", cfg, ["lemmas.csv"], summary,
                    time.monotonic() - t0)
    return ExperimentResult("lemmas", all_ok, summary,
                            ("lemmas.csv", "lemmas_manifest.json"))


# ---------------------------------------------------------------------------
# model mismatch: lp balls and smooth targets


@dataclass(frozen=True)
class MismatchConfig:
    p: float = 0.5
    n_values: tuple[int, ...] = (16, 32, 64)
    trials: int = 25
    alpha: float = 1.0
    master_seed: int = 20240804
    smooth_n: int = 256
    smooth_r_values: tuple[int, ...] = (1, 2, 4, 8, 16)
    smooth_degree: int = 2


def run_mismatch_scan(cfg: MismatchConfig, out_dir) -> ExperimentResult:
    """Recovery of signals outside the coded class.

    lp-ball part (asserted): draws from the unit lp ball, recovery with
    the tolerance widened by the top-k tail bound; checks every draw's
    actual tail against the bound and that the median error falls as n
    grows. Smooth part (report only): least-squares piecewise fits of the
    smooth battery against the r^-(beta+1) fit bound.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()
    rows = []
    medians = []
    tails_ok = True
    for n in cfg.n_values:
        k = lp_sparsity_level(n, cfg.p)
        m = math.ceil(cfg.alpha * math.log2(n))
        kappa = sparse_dl_bound(k, n, m) / m
        d = math.ceil(2.0 * cfg.alpha * kappa * math.log2(n))
        eps_n = lp_tail_bound(k, cfg.p)
        scope = SolverConfig(max_sparse_k=k, include_pp=False)
        errs = []
        for trial in range(cfg.trials):
            ens = sample_ensemble(
                n, d, derive_seed(cfg.master_seed, "mm-ens", n, trial)
            )
            rng = make_generator(cfg.master_seed, "mm-sig", n, trial)
            x = gen_lp_ball(n, cfg.p, rng)
            tail = top_k_approx(x, k).error
            tail_ok = tail <= eps_n + 1e-12
            tails_ok = tails_ok and tail_ok
            res = mcp_tolerant(ens, ens.matrix @ x, m, eps_n, config=scope)
            if res.status == "ok":
                err = float(np.linalg.norm(np.array(res.x_hat.to_floats()) - x))
            else:
                err = math.inf
            errs.append(err)
            rows.append((
                n, trial, k, m, d, eps_n, tail, tail_ok,
                res.status, err, res.dl_bits, res.residual, res.eta,
            ))
        medians.append(float(np.median(errs)))
    decreasing = all(b < a for a, b in zip(medians, medians[1:]))
    smooth_rows = []
    for target in SMOOTH_BATTERY:
        t_grid = np.arange(cfg.smooth_n) / cfg.smooth_n
        x = target.fn(t_grid)
        for r in cfg.smooth_r_values:
            fit = piecewise_poly_fit(x, r, cfg.smooth_degree)
            bound = smooth_fit_bound(cfg.smooth_n, r, target.beta, target.gamma)
            smooth_rows.append((
                target.name, target.beta, target.gamma, r,
                cfg.smooth_degree, fit.error, bound,
            ))
    summary = {
        "medians_by_n": dict(zip(map(str, cfg.n_values), medians)),
        "tails_all_within_bound": tails_ok,
        "median_err_decreasing": decreasing,
    }
    passed = tails_ok and decreasing
    header = ["n", "trial", "k", "m", "d", "eps_n", "tail", "tail_ok",
              "status", "err", "dl_bits", "residual", "eta"]
    _write_csv(out_dir / "mismatch.csv", header, rows)
    smooth_header = ["target", "beta", "gamma", "pieces", "degree",
                     "fit_err", "fit_bound"]
    _write_csv(out_dir / "smooth.csv", smooth_header, smooth_rows)
    _write_manifest(out_dir, "mismatch", cfg, ["mismatch.csv", "smooth.csv"],
                    summary, time.monotonic() - t0)
    return ExperimentResult(
        "mismatch", passed, summary,
        ("mismatch.csv", "smooth.csv", "mismatch_manifest.json"),
    )
