"""Command-line entry point: run one experiment, write ``report.csv`` and ``summary.json``.

Exit status is 0 when every checked row meets its tolerance, 1 when some row
fails, and 2 for configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .config import ConfigError, ExperimentConfig, PotentialSpec, RandomSpec, load_config, parse_config
from .determinant import L_values, det_support, main_lemma_residual, relevant_subtrees
from .radial import RadialProfile, conjecture_form, jacobi_reduce, radial_ax2m4_closed_form, shift_structures
from .resolvent import PoleError
from .spectrum import eigen_oracle, eigen_zeta
from .sum_rules import (agm_profile, calibrate_kappa_M, combined_identity, eigen_bracket, entropy_integral,
                        fourier_identity, ledger_inequality)
from .traces import trace_ledger
from .tree import ROOT, Potential, hypothesis_sums, sphere, truncate

REPORT_HEADER = ("experiment_id", "identity_kind", "lhs", "rhs", "residual", "slack",
                 "tolerance", "nodes", "status", "runtime_s")

SUBCOMMANDS = {
    "verify": "identity-suite",
    "eig": "eigenvalues",
    "ledger": "ledger-inequality",
    "jost": "main-lemma",
    "radial": "radial-compare",
    "conjecture": "conjecture-form",
    "scan": "hypothesis-scan",
}


@dataclass
class Row:
    experiment_id: str
    kind: str
    lhs: float | None = None
    rhs: float | None = None
    residual: float | None = None
    slack: float | None = None
    tol: float | None = None
    nodes: int | None = None
    runtime: float = 0.0
    note: str = ""

    @property
    def status(self) -> str:
        if self.note == "warning":
            return "warning"
        if self.tol is None:
            return "info"
        if self.residual is not None and not self.residual <= self.tol:
            return "fail"
        if self.slack is not None and not self.slack >= -self.tol:
            return "fail"
        return "pass"

    def csv_fields(self) -> list[str]:
        def num(x):
            return "" if x is None else repr(float(x))

        return [self.experiment_id, self.kind, num(self.lhs), num(self.rhs), num(self.residual),
                num(self.slack), num(self.tol), "" if self.nodes is None else str(self.nodes),
                self.status, f"{self.runtime:.6f}"]


@dataclass
class Report:
    rows: list[Row] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.rows)

    def add(self, row: Row, t0: float) -> None:
        row.runtime = time.perf_counter() - t0
        self.rows.append(row)


def zeta_samples(count: int) -> list[complex]:
    """Fixed interior sample points ``r_k e^{i phi_k}`` spread over the disk."""
    return [(0.25 + 0.5 * ((0.37 * k) % 1.0)) * np.exp(1j * (0.7 + 1.9 * k)) for k in range(count)]


def radial_test_points(count: int) -> list[complex]:
    pts = [3.5, -4.0, 1.0 + 1.0j, 2.0j, -2.0 + 0.3j, 6.0, 10.0j, -3.0 - 1.0j, 0.5j, 4.0 + 0.2j]
    while len(pts) < count:
        k = len(pts)
        pts.append(complex(np.cos(k), 0.5 + 0.1 * k))
    return pts[:count]


def _ledger_json(ledger) -> list[dict]:
    return [{"zeta": e.zeta, "x": e.x, "mult": e.mult, "confident": e.confident} for e in ledger.entries]


def _identity_suite(V: Potential, cfg: ExperimentConfig, rep: Report) -> None:
    tol, qtol, nmax = cfg.tolerances, cfg.tolerances.quadrature, cfg.grids.theta_max_nodes
    w = cfg.weight.coeffs()
    roots = [ROOT] + [x for x in relevant_subtrees(V, 1)]
    ledgers = {}
    for x in roots:
        t0 = time.perf_counter()
        led = eigen_zeta(V, x)
        ledgers[str(x)] = _ledger_json(led)
        if not led.confident:
            rep.add(Row(f"ledger{x}", "boundary_zero_suspicion", note="warning"), t0)
        for n in range(cfg.modes + 1):
            t0 = time.perf_counter()
            r = fourier_identity(V, x, n, led, qtol, nmax)
            rep.add(Row(f"fourier{x}n{n}", "fourier", r.lhs, r.rhs, r.residual, None, tol.identity,
                        r.nodes_used), t0)
        t0 = time.perf_counter()
        r = combined_identity(V, x, w, led, qtol, nmax)
        rep.add(Row(f"combined{x}", "combined", r.lhs, r.rhs, r.residual, None, tol.identity,
                    r.nodes_used), t0)
        t0 = time.perf_counter()
        tr, trd = r.extra["trace"], r.extra["trace_direct"]
        rep.add(Row(f"trace{x}", "trace_cross_check", tr, trd, abs(tr - trd) / (1 + abs(tr)), None,
                    tol.structure), t0)
    t0 = time.perf_counter()
    worst = 0.0
    for z in zeta_samples(cfg.grids.zeta_samples):
        a, b = L_values(V, [z])[0], det_support(V, z)
        worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    rep.add(Row("det_oracle", "determinant_oracle", residual=worst, tol=tol.structure), t0)
    rep.summary["ledgers"] = ledgers


def _eigenvalues(V: Potential, cfg: ExperimentConfig, rep: Report) -> None:
    t0 = time.perf_counter()
    led = eigen_zeta(V)
    ours = led.energies()
    D = max(cfg.oracle_depth, V.support_depth)
    oracle = np.sort(eigen_oracle(V, D, cfg.oracle_margin))
    kept = ours[np.abs(ours) > 2 * np.sqrt(2) + cfg.oracle_margin]
    rep.add(Row("eig_count", "eigen_multiplicity", float(len(kept)), float(len(oracle)),
                float(abs(len(kept) - len(oracle))), None, 0.5), t0)
    for i, x in enumerate(ours):
        t0 = time.perf_counter()
        inside = abs(x) <= 2 * np.sqrt(2) + cfg.oracle_margin
        if inside or len(kept) != len(oracle):
            rep.add(Row(f"eig{i}", "eigenvalue", float(x)), t0)
            continue
        y = oracle[int(np.searchsorted(kept, x))]
        rep.add(Row(f"eig{i}", "eigenvalue", float(x), float(y), abs(x - y), None, cfg.tolerances.eigen), t0)
    if not led.confident:
        rep.add(Row("eig_edge", "boundary_zero_suspicion", note="warning"), time.perf_counter())
    rep.summary["ledger"] = _ledger_json(led)
    rep.summary["oracle_depth"] = D


def _ledger(V: Potential, cfg: ExperimentConfig, rep: Report) -> None:
    tol, N = cfg.tolerances, cfg.depth
    w = cfg.weight.coeffs()
    t0 = time.perf_counter()
    r = ledger_inequality(V, N, w, tol.quadrature, cfg.grids.theta_max_nodes)
    rep.add(Row("ledger", "ledger_inequality", r.lhs, r.rhs, None, r.slack, tol.slack, r.nodes_used), t0)
    t0 = time.perf_counter()
    a, b = trace_ledger(V, N, w).bracket, trace_ledger(V, N, w, direct=True).bracket
    rep.add(Row("trace_bracket", "trace_cross_check", a, b, abs(a - b) / (1 + abs(a)), None, tol.structure), t0)
    t0 = time.perf_counter()
    thetas = (np.arange(cfg.grids.boundary_angles) + 0.5) * 2 * np.pi / cfg.grids.boundary_angles
    prof = agm_profile(V, N, thetas)
    rep.add(Row("im_m_formula", "im_m_formula", residual=float(prof.formula_residual.max()),
                tol=tol.structure * 100), t0)
    rep.add(Row("agm", "agm_pointwise", float(prof.lhs.min()), float(prof.rhs.min()), None,
                float(prof.slack.min()), tol.structure), t0)
    rep.summary["ledger_terms"] = {k: v for k, v in r.extra.items()}


def _main_lemma(V: Potential, cfg: ExperimentConfig, rep: Report) -> None:
    kappa0 = {}
    for n in range(cfg.depth + 1):
        t0 = time.perf_counter()
        worst = 0.0
        for z in zeta_samples(cfg.grids.zeta_samples):
            for y in sphere(n):
                try:
                    res = main_lemma_residual(V, y, z)
                except (ZeroDivisionError, PoleError):
                    rep.add(Row(f"jost{n}", "pole_hit", note="warning"), t0)
                    continue
                worst = max(worst, res.residual)
                kappa0[f"{n}:{z:.6f}"] = [res.kappa0.real, res.kappa0.imag]
        rep.add(Row(f"jost{n}", "main_lemma", residual=worst, tol=cfg.tolerances.structure * 100), t0)
    rep.summary["kappa0"] = kappa0


def _radial(V: Potential, cfg: ExperimentConfig, rep: Report) -> None:
    if cfg.potential.radial is None:
        raise ConfigError("radial-compare needs a radial potential")
    prof = RadialProfile(cfg.potential.radial)
    t0 = time.perf_counter()
    r = jacobi_reduce(prof, radial_test_points(cfg.grids.radial_test_points))
    rep.add(Row("jacobi", "radial_m_function", residual=r.max_m_residual, tol=cfg.tolerances.structure), t0)
    t0 = time.perf_counter()
    s = shift_structures(max(4, len(prof)))
    rep.add(Row("isometry", "isometry_exact", residual=s.isometry_residual, tol=0.0), t0)
    rep.add(Row("h0_split", "h0_equals_s1_plus_adjoint", residual=s.h0_residual, tol=0.0), t0)
    for i, (name, val) in enumerate(s.intertwining_residuals.items()):
        rep.add(Row(f"intertwine{i}", "intertwining_exact", residual=val, tol=0.0), t0)
    rep.summary["intertwining"] = s.intertwining_residuals


def _conjecture(V: Potential, cfg: ExperimentConfig, rep: Report) -> None:
    t0 = time.perf_counter()
    c = conjecture_form(cfg.A, V)
    tol = cfg.tolerances.structure
    rep.add(Row("qform", "conjecture_qform", c.qform), t0)
    rep.add(Row("check_A1", "norm_identity", c.norm_sq, c.norm_target, c.check_A1, None, tol), t0)
    rep.add(Row("check_Ax2m4", "x2m4_identity", c.ax2m4_form, c.ax2m4_target, c.check_Ax2m4, None, tol), t0)
    if cfg.potential.radial is not None:
        closed = radial_ax2m4_closed_form(cfg.potential.radial)
        rep.add(Row("x2m4_radial", "x2m4_radial_closed_form", c.ax2m4_form, closed,
                    abs(c.ax2m4_form - closed), None, tol), t0)
    rep.summary["conjecture"] = {k: float(v) for k, v in c._asdict().items()}


def _scan(V: Potential, cfg: ExperimentConfig, rep: Report) -> None:
    w = cfg.weight.coeffs()
    trend = []
    for N in cfg.scan_depths:
        t0 = time.perf_counter()
        VN = truncate(V, N)
        hs = hypothesis_sums(VN, cfg.scan_p, N)
        rep.add(Row(f"power{N}", "hypothesis_power_sum", hs.power_sum), t0)
        rep.add(Row(f"delta{N}", "hypothesis_delta_sum", hs.delta_sum), t0)
        t0 = time.perf_counter()
        ent = entropy_integral(VN, w, cfg.tolerances.quadrature, cfg.grids.theta_max_nodes, x_form=False)
        g, _ = eigen_bracket(VN, N, w)
        tb = trace_ledger(VN, N, w).bracket
        lhs = ent.value + g
        rep.add(Row(f"ledger{N}", "ledger_inequality", lhs, tb, None, lhs - tb, cfg.tolerances.slack,
                    ent.nodes), t0)
        trend.append({"N": N, "power_sum": hs.power_sum, "delta_sum": hs.delta_sum,
                      "entropy": ent.value, "eigen_bracket": g, "ledger_lhs": lhs, "trace_bracket": tb})
    rep.summary["trend"] = trend


RUNNERS = {
    "identity-suite": _identity_suite,
    "eigenvalues": _eigenvalues,
    "ledger-inequality": _ledger,
    "main-lemma": _main_lemma,
    "radial-compare": _radial,
    "conjecture-form": _conjecture,
    "hypothesis-scan": _scan,
}


def run_experiment(cfg: ExperimentConfig, base: Path | None = None) -> Report:
    V = cfg.potential.build(base)
    rep = Report()
    RUNNERS[cfg.experiment](V, cfg, rep)
    rep.summary.update({
        "experiment": cfg.experiment,
        "config": cfg.model_dump(),
        "backend": kernels.BACKEND,
        "kappa_M": calibrate_kappa_M(),
        "potential": {"support_size": len(V), "support_depth": V.support_depth,
                      "values": {str(v): x for v, x in sorted(V.values.items())}},
        "rows": len(rep.rows),
        "failed": [r.experiment_id for r in rep.rows if r.status == "fail"],
        "passed": rep.passed,
    })
    return rep


def write_report(rep: Report, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report.csv", "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(REPORT_HEADER)
        for r in rep.rows:
            wr.writerow(r.csv_fields())
    with open(out / "summary.json", "w") as fh:
        json.dump(rep.summary, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")


def _apply_overrides(cfg: ExperimentConfig, args, explicit_config: bool) -> ExperimentConfig:
    upd = {"experiment": SUBCOMMANDS[args.command]}
    if args.out is not None:
        upd["out"] = args.out
    if args.tol is not None:
        if not args.tol > 0:
            raise ConfigError("--tol must be positive")
        upd["tolerances"] = cfg.tolerances.model_copy(
            update={k: args.tol for k in type(cfg.tolerances).model_fields})
    if args.theta_max_nodes is not None:
        if args.theta_max_nodes < 64:
            raise ConfigError("--theta-max-nodes must be at least 64")
        upd["grids"] = cfg.grids.model_copy(update={"theta_max_nodes": args.theta_max_nodes})
    if args.seed is not None:
        if cfg.potential.random is not None:
            rnd = cfg.potential.random.model_copy(update={"seed": args.seed})
        elif not explicit_config:
            rnd = RandomSpec(seed=args.seed, depth=2)
        else:
            raise ConfigError("--seed needs a random potential in the config")
        upd["potential"] = PotentialSpec(random=rnd)
    return ExperimentConfig.model_validate({**cfg.model_dump(), **_dump(upd)})


def _dump(upd: dict) -> dict:
    return {k: (v.model_dump() if hasattr(v, "model_dump") else v) for k, v in upd.items()}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bethe-sumrules", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, kind in SUBCOMMANDS.items():
        p = sub.add_parser(name, help=f"run the {kind} experiment")
        p.add_argument("--config", type=Path, help="JSON experiment config")
        p.add_argument("--out", help="output directory (default from config, else ./out)")
        p.add_argument("--tol", type=float, help="override every tolerance")
        p.add_argument("--seed", type=int, help="seed for the random potential")
        p.add_argument("--theta-max-nodes", type=int, help="cap on trapezoid nodes")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    base = None
    try:
        if args.config is not None:
            cfg = load_config(args.config)
            base = args.config.parent
        else:
            cfg = parse_config(json.dumps({"experiment": SUBCOMMANDS[args.command]}))
        cfg = _apply_overrides(cfg, args, args.config is not None)
        rep = run_experiment(cfg, base)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    write_report(rep, Path(cfg.out))
    n_fail = sum(r.status == "fail" for r in rep.rows)
    print(f"{cfg.experiment}: {len(rep.rows)} rows, {n_fail} failed -> {cfg.out}")
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
