#!/usr/bin/env python3
"""Generate a performance report from a committee bench CSV"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from bench_harness import read_csv  # noqa: E402


def generate_report(csv_file: Path) -> str:
    """Human-readable table of a bench CSV"""
    rows = read_csv(csv_file)
    lines = ["=" * 72, f"Committee benchmark report: {csv_file.name}", "=" * 72,
             f"{'n':>3} {'atoms':>6} {'ratoms':>7} {'2^exp':>8} {'verdict':>8} {'time (s)':>10} {'nodes':>12}"]
    for row in rows:
        lines.append(f"{row.n:>3} {row.atom_count:>6} {row.ratoms:>7} {row.state_exponent:>8} "
                     f"{row.verdict:>8} {row.wall_ms / 1000.0:>10.3f} {row.peak_nodes:>12}")
    solved = [row for row in rows if row.verdict != "KO"]
    lines.append("-" * 72)
    lines.append(f"{len(solved)}/{len(rows)} sizes decided; "
                 f"{sum(1 for row in rows if row.verdict == 'TRUE')} TRUE")
    lines.append("=" * 72)
    return "\n".join(lines)


if __name__ == "__main__":
    if len(sys.argv) < 2:
        print("Usage: python generate_performance_report.py <bench.csv>")
        sys.exit(1)

    csv_file = Path(sys.argv[1])
    if not csv_file.exists():
        print(f"Error: {csv_file} not found")
        sys.exit(1)

    print(generate_report(csv_file))
