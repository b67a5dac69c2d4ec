"""Command-line entry points.

Subcommands
-----------
simulate    run one experiment spec (JSON) and write aggregate reports
reproduce   run the full 16-cell reference-table suite with pass/fail
calibrate   fit the coupling strength to per-topology rho_g targets
predict     run the four structural prediction studies
analyze     run the measurement pipeline on a marker CSV (t,x,y,z)

Exit codes: 0 success; 1 configuration error; 2 a reproduce/predict
gate failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .ensemble import FrequencyProfile, profile_by_name
from .errors import GroupsyncError
from .harness import (ExperimentSpec, TargetTable, anova_to_dict, calibrate_coupling,
                      prediction_suite, reproduce_tables, run_experiment,
                      standard_topologies, FITTED_C)
from .sigproc import (MarkerSeries, despike, estimate_frequency_fourier,
                      estimate_frequency_hilbert, hilbert_phase, interpolate_gaps,
                      pca_project)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_GATE = 2


def _outdir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n")


def _dyads_csv(agg, A) -> str:
    lines = ["h,k,rho_mu,rho_sigma,connected"]
    n = A.n
    for h in range(n):
        for k in range(h + 1, n):
            lines.append(f"{h + 1},{k + 1},{agg.dyad_mu[h, k]:.6f},"
                         f"{agg.dyad_sigma[h, k]:.6f},{int(A.a[h, k])}")
    return "\n".join(lines) + "\n"


def _emit_experiment(out: Path, spec: ExperimentSpec, results: dict,
                     trace: bool, fmt: str) -> None:
    summary = {
        "c": spec.c, "trials": spec.trials, "master_seed": spec.master_seed,
        "T": spec.T, "dt": spec.dt, "tau_omega": spec.tau_omega,
        "omega_mode": spec.omega_mode, "profile": spec.profile.name,
        "topologies": {label: agg.to_json_dict() for label, agg in results.items()},
    }
    _write_json(out / "summary.json", summary)
    for label, agg in results.items():
        (out / f"dyads_{label}.csv").write_text(_dyads_csv(agg, spec.topologies[label]))
        if fmt == "csv":
            lines = ["trial,rho_g"] + [f"{j + 1},{v:.6f}"
                                       for j, v in enumerate(agg.rho_g_trials)]
            (out / f"rho_g_{label}.csv").write_text("\n".join(lines) + "\n")
        if trace and agg.traces is not None:
            t = (np.arange(len(agg.traces[0])) + 1) * spec.dt
            for j, tr in enumerate(agg.traces):
                rows = ["t,rho_g"] + [f"{t[i]:.4f},{tr[i]:.6f}" for i in range(len(tr))]
                (out / f"rho_g_trace_{label}_{j + 1}.csv").write_text("\n".join(rows) + "\n")


def cmd_simulate(args) -> int:
    spec = ExperimentSpec.from_json(Path(args.spec).read_text())
    if args.seed is not None:
        spec = ExperimentSpec(profile=spec.profile, topologies=spec.topologies,
                              c=spec.c, trials=spec.trials, master_seed=args.seed,
                              T=spec.T, dt=spec.dt, tau_omega=spec.tau_omega,
                              omega_mode=spec.omega_mode)
    out = _outdir(args.out)
    results = run_experiment(spec, keep_traces=args.trace)
    _emit_experiment(out, spec, results, args.trace, args.format)
    print(f"wrote {out / 'summary.json'}")
    for label, agg in results.items():
        print(f"  {label}: rho_g = {agg.rho_g_mean:.4f} "
              f"(trial spread {agg.rho_g_std:.4f}, time spread {agg.rho_g_time_std:.4f})")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    report = reproduce_tables(master_seed=args.seed, repetitions=args.repetitions)
    out = _outdir(args.out)
    _write_json(out / "summary.json", report)
    for cell in report["cells"]:
        flag = {True: "pass", False: "FAIL", None: "  - "}[cell["passed"]]
        print(f"[{flag}] {cell['profile']} {cell['topology']:<8} c={cell['c']:<4} "
              f"mean={cell['mean_rho_g']:.4f} target={cell['target_mean']:.4f} "
              f"dev={cell['deviation']:+.4f} ({cell['constraint']})")
    o = report["ordering"]
    print(f"[{'pass' if o['passed'] else 'FAIL'}] ordering {' > '.join(o['observed'])}")
    print(f"overall: {'pass' if report['passed'] else 'FAIL'}")
    return EXIT_OK if report["passed"] else EXIT_GATE


def _load_profile(text: str) -> FrequencyProfile:
    if text in ("group1", "group2"):
        return profile_by_name(text)
    return FrequencyProfile.from_json(Path(text).read_text())


def cmd_calibrate(args) -> int:
    profile = _load_profile(args.profile)
    topologies = standard_topologies(profile.n) if profile.n >= 3 else None
    if topologies is None:
        raise GroupsyncError("calibrate: profiles need at least 3 players")
    if args.targets:
        targets = {str(k): float(v)
                   for k, v in json.loads(Path(args.targets).read_text()).items()}
    else:
        table = TargetTable.builtin()
        c_fit = FITTED_C.get(profile.name)
        if c_fit is None:
            raise GroupsyncError("calibrate: custom profiles need --targets")
        targets = {label: table.mean(profile.name, c_fit, label) for label in topologies}
    result = calibrate_coupling(profile, topologies, targets,
                                c_range=(args.c_min, args.c_max),
                                trials=args.trials, master_seed=args.seed)
    out = _outdir(args.out)
    _write_json(out / "calibration.json", result.to_json_dict())
    print(f"c* = {result.c_star:.4f}  interval=({result.interval[0]:.4f}, "
          f"{result.interval[1]:.4f})  evaluations={result.evaluations}"
          + ("  [ambiguous: flat loss]" if result.ambiguous else ""))
    return EXIT_OK


def cmd_predict(args) -> int:
    report = prediction_suite(master_seed=args.seed)
    out = _outdir(args.out)
    payload = {k: (dict(v, anova=anova_to_dict(v["anova"])) if isinstance(v, dict) else v)
               for k, v in report.items()}
    _write_json(out / "predictions.json", payload)
    for key in ("cv_sweep", "sigma_sweep", "edge_removal", "hub_selection"):
        block = report[key]
        a = block["anova"]
        print(f"[{'pass' if block['passed'] else 'FAIL'}] {key}: "
              f"F({a.df1:.0f}, {a.df2:.1f}) = {a.F:.3f}, p = {a.p:.4f}")
    print(f"overall: {'pass' if report['passed'] else 'FAIL'}")
    return EXIT_OK if report["passed"] else EXIT_GATE


def cmd_analyze(args) -> int:
    series = MarkerSeries.from_csv(Path(args.input).read_text(), fs=args.fs)
    x_raw, y_raw = series.xyz[0], series.xyz[1]  # planar motion; z dropped
    x_clean, mask_x = despike(x_raw, args.threshold)
    y_clean, mask_y = despike(y_raw, args.threshold)
    mask = mask_x | mask_y
    x_clean = np.where(mask, np.nan, x_clean)
    y_clean = np.where(mask, np.nan, y_clean)
    x_filled = interpolate_gaps(x_clean)
    y_filled = interpolate_gaps(y_clean)
    x_pca, y_pca, direction = pca_project(np.vstack([x_filled, y_filled]))
    phase = hilbert_phase(x_pca, fs=args.fs)
    omega_f = estimate_frequency_fourier(x_pca, fs=args.fs)
    _, omega_h = estimate_frequency_hilbert(x_pca, fs=args.fs)
    out = _outdir(args.out)
    report = {
        "samples": int(series.t.size),
        "spikes": int(mask.sum()),
        "spike_fraction": float(mask.mean()),
        "principal_direction": direction.tolist(),
        "omega_fourier": omega_f,
        "omega_hilbert": omega_h,
        "frequency_hz_fourier": omega_f / (2 * np.pi),
    }
    _write_json(out / "analysis.json", report)
    rows = ["t,x_pca,phase,mask"]
    for i in range(series.t.size):
        rows.append(f"{series.t[i]:.4f},{x_pca[i]:.6f},{phase[i]:.6f},{int(mask[i])}")
    (out / "phase.csv").write_text("\n".join(rows) + "\n")
    print(f"samples={report['samples']} spikes={report['spikes']} "
          f"omega: fourier={omega_f:.4f} rad/s, hilbert={omega_h:.4f} rad/s")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="groupsync",
                                description="Kuramoto-network group synchronisation toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="run one experiment spec")
    ps.add_argument("--spec", required=True, help="path to a JSON ExperimentSpec")
    ps.add_argument("--seed", type=int, default=None, help="override master seed")
    ps.add_argument("--out", default="out", help="output directory")
    ps.add_argument("--trace", action="store_true", help="emit per-trial rho_g(t) CSVs")
    ps.add_argument("--format", choices=("csv", "json"), default="json")
    ps.set_defaults(func=cmd_simulate)

    pr = sub.add_parser("reproduce", help="reference-table suite with pass/fail")
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--repetitions", type=int, default=20, help="batches of 10 trials per cell")
    pr.add_argument("--out", default="out")
    pr.set_defaults(func=cmd_reproduce)

    pc = sub.add_parser("calibrate", help="fit coupling to rho_g targets")
    pc.add_argument("--profile", required=True, help="group1, group2, or a profile JSON path")
    pc.add_argument("--targets", default=None, help="JSON {topology: rho_g} target file")
    pc.add_argument("--c-min", type=float, default=0.25)
    pc.add_argument("--c-max", type=float, default=6.0)
    pc.add_argument("--trials", type=int, default=10)
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--out", default="out")
    pc.set_defaults(func=cmd_calibrate)

    pp = sub.add_parser("predict", help="structural prediction studies")
    pp.add_argument("--seed", type=int, default=0)
    pp.add_argument("--out", default="out")
    pp.set_defaults(func=cmd_predict)

    pa = sub.add_parser("analyze", help="measurement pipeline on a marker CSV")
    pa.add_argument("--input", required=True, help="CSV with header t,x,y,z")
    pa.add_argument("--fs", type=float, default=100.0)
    pa.add_argument("--threshold", type=float, default=5.0, help="despike threshold factor")
    pa.add_argument("--out", default="out")
    pa.set_defaults(func=cmd_analyze)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GroupsyncError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
