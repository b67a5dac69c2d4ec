#!/usr/bin/env python3
"""Replicate the four structural prediction studies over several seeds.

Each replication sweeps group heterogeneity (expected: synchrony drops,
Welch ANOVA significant), within-player noise, ring-edge removal, and
star-hub selection (expected: all null). Prints one ANOVA line per
study and seed plus a pass-count summary, and writes the reports to
JSON. Exit code 2 when fewer than --required seeds pass a study.
"""

import argparse
import json
from pathlib import Path

from groupsync import prediction_suite
from groupsync.harness import anova_to_dict

STUDIES = ("cv_sweep", "sigma_sweep", "edge_removal", "hub_selection")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=5, help="number of replications")
    ap.add_argument("--required", type=int, default=4,
                    help="replications per study that must pass (default 4)")
    ap.add_argument("--out", default="results/predictions", help="output directory")
    args = ap.parse_args(argv)
    if not (1 <= args.required <= args.seeds):
        ap.error("--required must lie in 1..--seeds")

    reports = []
    for seed in range(args.seeds):
        rep = prediction_suite(master_seed=seed)
        reports.append(rep)
        for study in STUDIES:
            block = rep[study]
            a = block["anova"]
            print(f"seed {seed} {study:<13} F({a.df1:.0f}, {a.df2:.1f}) = {a.F:7.3f}  "
                  f"p = {a.p:.4f}  {'pass' if block['passed'] else 'FAIL'}")

    hits = {study: sum(rep[study]["passed"] for rep in reports) for study in STUDIES}
    ok = all(count >= args.required for count in hits.values())
    for study, count in hits.items():
        print(f"{study}: {count}/{args.seeds} replications pass")
    print(f"overall: {'pass' if ok else 'FAIL'} "
          f"(threshold {args.required}/{args.seeds} per study)")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    payload = [{k: (dict(v, anova=anova_to_dict(v["anova"])) if isinstance(v, dict)
                    else v)
                for k, v in rep.items()} for rep in reports]
    (out / "predictions.json").write_text(json.dumps(payload, indent=2))
    print(f"wrote {out / 'predictions.json'}")
    return 0 if ok else 2


if __name__ == "__main__":
    raise SystemExit(main())
