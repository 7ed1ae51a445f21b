#!/usr/bin/env python3
"""
Latency of every registered bound across grid sizes.
Writes a CSV and a markdown table to target/.
"""

import csv
import os
import statistics
import time

from blockdet.config import SuiteConfig
from blockdet.harness import sample_instance
from blockdet.registry import BOUND_NAMES, evaluate_bound

SIZES = [2, 4, 8]
ITERATIONS = 50
OUTPUT_DIR = "target"


class BenchmarkResult:
    def __init__(self, bound, max_n, factors, latency_ns, stdev_ns):
        self.bound = bound
        self.max_n = max_n
        self.factors = factors
        self.latency_ns = latency_ns
        self.stdev_ns = stdev_ns


def benchmark_instance(instance, iterations=ITERATIONS):
    """Mean and standard deviation of one evaluation, after a short warmup."""
    inputs = list(instance.inputs)
    for _ in range(3):
        evaluate_bound(instance.bound, inputs, params=instance.params)

    times = []
    for _ in range(iterations):
        start = time.perf_counter_ns()
        evaluate_bound(instance.bound, inputs, params=instance.params)
        times.append(time.perf_counter_ns() - start)
    return statistics.mean(times), statistics.stdev(times)


def run_benchmarks():
    results = []
    for max_n in SIZES:
        cfg = SuiteConfig(max_n=max_n, max_block_dim=2, max_factors=3)
        for name in BOUND_NAMES:
            instance = sample_instance(name, cfg, 0)
            mean, stdev = benchmark_instance(instance)
            results.append(BenchmarkResult(name, max_n, len(instance.inputs), mean, stdev))
            print(f"{name:16s} maxN={max_n:2d} {mean / 1000:10.1f} us")
    return results


def write_csv_results(results, filename):
    with open(filename, "w", newline="") as csvfile:
        writer = csv.writer(csvfile)
        writer.writerow(["bound", "max_n", "factors", "latency_ns", "stdev_ns"])
        for r in results:
            writer.writerow([r.bound, r.max_n, r.factors, f"{r.latency_ns:.0f}", f"{r.stdev_ns:.0f}"])


def generate_markdown_report(results):
    md = "# blockdet Bound Evaluation Latency\n\n"
    md += "| Bound | maxN | Factors | Latency (us) | Stdev (us) |\n"
    md += "|-------|------|---------|--------------|------------|\n"
    for r in results:
        md += f"| {r.bound} | {r.max_n} | {r.factors} | {r.latency_ns / 1000:.1f} | {r.stdev_ns / 1000:.1f} |\n"
    return md


def main():
    os.makedirs(OUTPUT_DIR, exist_ok=True)
    results = run_benchmarks()
    write_csv_results(results, os.path.join(OUTPUT_DIR, "bound_benchmarks.csv"))
    with open(os.path.join(OUTPUT_DIR, "bound_benchmarks.md"), "w") as f:
        f.write(generate_markdown_report(results))
    print(f"Wrote {len(results)} results to {OUTPUT_DIR}/")


if __name__ == "__main__":
    main()
