"""
Committee benchmark harness
One symbolic check per committee size; rows go to a fixed seven-column CSV
"""

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass
from pathlib import Path
from typing import Iterable, List, Optional, TextIO, Union

from committee_examples import committee_instance
from symbolic_checker import ResourceLimits, check_symbolic

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("n", "atom_count", "ratoms", "state_exponent", "verdict", "wall_ms", "peak_nodes")


@dataclass(frozen=True)
class BenchRow:
    n: int
    atom_count: int
    ratoms: int
    state_exponent: int
    verdict: str
    wall_ms: float
    peak_nodes: int


def run_row(n: int, variant: str = "first", limits: Optional[ResourceLimits] = None) -> BenchRow:
    """Check the variant's query on the size-n committee with a fresh BDD store"""
    instance = committee_instance(n, variant)
    result = check_symbolic(instance, limits)
    stats = result.stats
    logger.info("committee n=%d variant=%s: %s in %.1f ms", n, variant, result.label, stats.wall_ms)
    return BenchRow(n=n, atom_count=len(instance.atoms), ratoms=stats.ratoms,
                    state_exponent=stats.state_exponent, verdict=result.label,
                    wall_ms=stats.wall_ms, peak_nodes=stats.peak_nodes)


def _run_row_task(task) -> BenchRow:
    n, variant, limits = task
    return run_row(n, variant, limits)


def run_committee_bench(variant: str = "first", min_n: int = 3, max_n: int = 10,
                        limits: Optional[ResourceLimits] = None, workers: int = 1) -> List[BenchRow]:
    """Rows for n = min_n..max_n, in order; several workers run rows in separate processes"""
    if min_n < 3 or max_n < min_n:
        raise ValueError(f"need 3 <= min <= max, got min={min_n}, max={max_n}")
    limits = limits or ResourceLimits()
    tasks = [(n, variant, limits) for n in range(min_n, max_n + 1)]
    if workers <= 1:
        return [_run_row_task(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_row_task, tasks))


def write_csv(rows: Iterable[BenchRow], target: Union[str, Path, TextIO]) -> None:
    """Header plus one comma-separated line per row"""
    if isinstance(target, (str, Path)):
        path = Path(target).expanduser()
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as handle:
            write_csv(rows, handle)
        return
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(astuple(row))


def rows_to_csv(rows: Iterable[BenchRow]) -> str:
    buffer = io.StringIO()
    write_csv(rows, buffer)
    return buffer.getvalue()


def read_csv(source: Union[str, Path]) -> List[BenchRow]:
    with open(Path(source).expanduser(), newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        return [BenchRow(n=int(r["n"]), atom_count=int(r["atom_count"]), ratoms=int(r["ratoms"]),
                         state_exponent=int(r["state_exponent"]), verdict=r["verdict"],
                         wall_ms=float(r["wall_ms"]), peak_nodes=int(r["peak_nodes"]))
                for r in reader]
