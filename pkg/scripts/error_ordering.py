"""Relative Frobenius error of every method on synthetic clusters; prints a table.

    python3 scripts/error_ordering.py [--config scripts/configs/synthetic.json]
"""

import argparse
import json
from pathlib import Path

from quadfeat.bench import ExperimentConfig, load_config_dataset, run_experiment

HERE = Path(__file__).parent


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=HERE / "configs" / "synthetic.json", type=Path)
    parser.add_argument("--json", type=Path, help="also write the JSON report here")
    args = parser.parse_args()

    cfg = ExperimentConfig.from_dict(json.loads(args.config.read_text()))
    data = load_config_dataset(cfg.dataset, args.config.parent)
    report = run_experiment(cfg, data)
    summary = report.summary()
    for kern in dict.fromkeys(k[1] for k in summary):
        print(f"\n{kern}  (N={data.N}, d={data.d}, runs={cfg.runs})")
        print(f"{'method':>15} " + " ".join(f"{'n=' + str(n):>17}" for n in cfg.n_values))
        for meth in cfg.methods:
            cells = [summary[(data.name, kern, meth, n)] for n in cfg.n_values]
            print(f"{meth:>15} " + " ".join(f"{c['mean']:.4f} +- {c['ci95']:.4f}" for c in cells))
    if args.json:
        args.json.write_text(report.to_json())


if __name__ == "__main__":
    main()
