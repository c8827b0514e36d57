#!/usr/bin/env python3
"""Run every built-in demo and print a one-line summary for each.

Usage: python scripts/run_all_demos.py [--out-dir demo-output]
"""

import argparse

from lelab.harness import DEMO_CONFIGS, demo_config, run


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="demo-output")
    args = parser.parse_args()

    for name in sorted(DEMO_CONFIGS):
        summary = run(demo_config(name), out_dir=args.out_dir)
        tail = (f"purity {summary.final_purity:.6f}" if summary.final_purity is not None
                else f"mass {summary.final_mass:.6f}")
        status = "ok" if summary.all_checks_pass else "CHECKS FAILED"
        print(f"{name:18s} S_final={summary.final_effective_entropy:8.4f}  {tail}  {status}")
    print(f"CSV traces and summaries in {args.out_dir}/")


if __name__ == "__main__":
    main()
