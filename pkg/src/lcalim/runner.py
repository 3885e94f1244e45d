"""Experiment execution: runs the exact verification engine and/or the
Monte Carlo cross-check for a parsed config and writes machine-readable
reports (CSV tables plus a one-object JSON verdict summary).

Exit status convention: 0 all checks passed, 1 a convergence or sampling
check failed, 2 invalid configuration, 3 I/O failure.
"""

from __future__ import annotations

import json
import os

from .arrays import row_ft_exact
from .config import ExperimentConfig
from .groups import SOLENOID
from .measures import limit_law_ft
from .sampling import SeededStream, empirical_ft, empirical_law_ft
from .verify import ConvergenceReport, check_theorem

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_IO_ERROR = 3

MC_ERROR_FACTOR = 4.0  # allowed deviation, in units of 1/sqrt(M)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_ft_table(report: ConvergenceReport, path: str) -> None:
    rows = [
        (
            str(r.n),
            r.char_id,
            _fmt(r.exact.real),
            _fmt(r.exact.imag),
            _fmt(r.limit.real),
            _fmt(r.limit.imag),
            _fmt(r.abs_err),
        )
        for r in report.ft_rows
    ]
    _write_csv(
        path,
        ("n", "char_id", "re_exact", "im_exact", "re_limit", "im_limit", "abs_err"),
        rows,
    )


def write_conditions_table(report: ConvergenceReport, path: str) -> None:
    rows = []
    for cond in report.conditions:
        for n, value in cond.sequence:
            rows.append((cond.name, str(n), _fmt(value)))
    for n, value in report.ft_sup:
        rows.append(("ft_sup_distance", str(n), _fmt(value)))
    _write_csv(path, ("condition", "n", "value"), rows)


def _condition_summary(cond) -> dict:
    out = {
        "name": cond.name,
        "target": cond.target,
        "passed": cond.passed,
    }
    if cond.verdict is not None:
        out["verdict"] = cond.verdict.kind
        if cond.verdict.value is not None:
            out["value"] = cond.verdict.value
        out["evidence"] = list(cond.verdict.evidence)
    return out


def write_summary(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _verify_summary(cfg: ExperimentConfig, report: ConvergenceReport, mode: str) -> dict:
    return {
        "mode": mode,
        "group": cfg.group.describe(),
        "theorem": report.theorem,
        "overall": report.overall,
        "ft_passed": report.ft_passed,
        "ft_sup": [[n, v] for n, v in report.ft_sup],
        "conditions": [_condition_summary(c) for c in report.conditions],
        "grid": list(report.grid),
        "tolerances": {
            "trend": cfg.settings.trend_tol,
            "window": cfg.settings.window,
            "divergence": cfg.settings.divergence_threshold,
            "ft": cfg.settings.ft_tol,
        },
    }


def run_verify(cfg: ExperimentConfig, out_dir: str) -> int:
    report = check_theorem(cfg.array, cfg.law, cfg.settings)
    try:
        os.makedirs(out_dir, exist_ok=True)
        write_ft_table(report, os.path.join(out_dir, "ft_table.csv"))
        write_conditions_table(report, os.path.join(out_dir, "conditions.csv"))
        summary = _verify_summary(cfg, report, "verify")
        summary["exit_code"] = EXIT_PASS if report.passed() else EXIT_CHECK_FAILED
        write_summary(os.path.join(out_dir, "summary.json"), summary)
    except OSError:
        return EXIT_IO_ERROR
    return EXIT_PASS if report.passed() else EXIT_CHECK_FAILED


def run_conditions(cfg: ExperimentConfig, out_dir: str) -> int:
    report = check_theorem(cfg.array, cfg.law, cfg.settings)
    passed = all(c.passed for c in report.conditions)
    try:
        os.makedirs(out_dir, exist_ok=True)
        write_conditions_table(report, os.path.join(out_dir, "conditions.csv"))
        summary = _verify_summary(cfg, report, "conditions")
        summary["overall"] = "pass" if passed else "fail"
        summary["exit_code"] = EXIT_PASS if passed else EXIT_CHECK_FAILED
        write_summary(os.path.join(out_dir, "summary.json"), summary)
    except OSError:
        return EXIT_IO_ERROR
    return EXIT_PASS if passed else EXIT_CHECK_FAILED


def run_sample(cfg: ExperimentConfig, out_dir: str, seed_override: int | None = None) -> int:
    seed = cfg.mc.seed if seed_override is None else seed_override
    M = cfg.mc.replicates
    chars = cfg.settings.characters
    bound = MC_ERROR_FACTOR / M**0.5
    rows = []
    all_ok = True
    for n in cfg.mc.n_points:
        stream = SeededStream(seed).child(0, n)
        est = empirical_ft(cfg.array, n, chars, M, stream)
        for chi, emp in zip(est.chars, est.estimates):
            exact = row_ft_exact(cfg.array, n, chi)
            err = abs(emp - exact)
            all_ok = all_ok and err <= bound
            rows.append(
                (
                    "array",
                    str(n),
                    chi.char_id,
                    _fmt(emp.real),
                    _fmt(emp.imag),
                    _fmt(exact.real),
                    _fmt(exact.imag),
                    _fmt(err),
                    str(M),
                    _fmt(est.stderr),
                )
            )
    if cfg.mc.sample_law and cfg.group.kind != SOLENOID:
        stream = SeededStream(seed).child(1)
        est = empirical_law_ft(cfg.law, chars, M, stream)
        for chi, emp in zip(est.chars, est.estimates):
            exact = limit_law_ft(cfg.law, chi)
            err = abs(emp - exact)
            all_ok = all_ok and err <= bound
            rows.append(
                (
                    "law",
                    "",
                    chi.char_id,
                    _fmt(emp.real),
                    _fmt(emp.imag),
                    _fmt(exact.real),
                    _fmt(exact.imag),
                    _fmt(err),
                    str(M),
                    _fmt(est.stderr),
                )
            )
    try:
        os.makedirs(out_dir, exist_ok=True)
        _write_csv(
            os.path.join(out_dir, "mc_table.csv"),
            (
                "kind",
                "n",
                "char_id",
                "re_emp",
                "im_emp",
                "re_exact",
                "im_exact",
                "abs_err",
                "replicates",
                "stderr",
            ),
            rows,
        )
        summary = {
            "mode": "sample",
            "group": cfg.group.describe(),
            "replicates": M,
            "seed": seed,
            "error_bound": bound,
            "overall": "pass" if all_ok else "fail",
            "exit_code": EXIT_PASS if all_ok else EXIT_CHECK_FAILED,
        }
        write_summary(os.path.join(out_dir, "summary.json"), summary)
    except OSError:
        return EXIT_IO_ERROR
    return EXIT_PASS if all_ok else EXIT_CHECK_FAILED


def run_selftest(stream=None) -> int:
    """Run the acceptance suite, printing one pass/fail line per
    criterion."""
    from .acceptance import run_all

    results = run_all()
    ok = True
    for name, passed, detail in results:
        tag = "PASS" if passed else "FAIL"
        print(f"{tag}  {name}: {detail}")
        ok = ok and passed
    return EXIT_PASS if ok else EXIT_CHECK_FAILED
