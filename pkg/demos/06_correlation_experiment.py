"""A small end-to-end run of the correlation experiment.

Samples 12 curves, measures truncated L(1) and escape rate tau for each,
then tests rank independence.  Reduced seed count for speed; the full
protocol is `lflow reproduce --preset sample1`.

Run from the repository root:  python3 demos/06_correlation_experiment.py
"""

from lflow.pipeline import (
    RunConfig,
    cmd_observe,
    cmd_sample,
    correlate_rows,
    format_report,
    parse_manifest,
)

cfg = RunConfig(
    catalog_path="data/fixture_allcurves.txt",
    cache_dir="an-cache",
    size=12,
    n_seeds=2000,
    master_seed=1,
    threads=0,  # auto
)

manifest, eligible = cmd_sample(cfg)
labels = parse_manifest(manifest)
print(f"sampled {len(labels)} of {eligible} eligible classes: {', '.join(labels)}\n")

rows = cmd_observe(labels, cfg)
print(f"{'label':>8} {'N':>5} {'L(1)':>10} {'tau':>8}")
for r in sorted(rows, key=lambda r: r.l1):
    tau = f"{r.tau:.4f}" if r.tau != float("inf") else "inf"
    print(f"{r.label:>8} {r.conductor:>5} {r.l1:>10.4f} {tau:>8}")

# alpha 0.01 here: the strict 0.001 of the full protocol is calibrated for
# 30-curve samples, a 12-curve toy run rarely clears it
report, excluded = correlate_rows(rows, alpha=0.01)
print()
print(format_report(report, excluded))
