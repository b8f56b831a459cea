"""Parsers for the versioned querygames CSV schemas.

These scripts consume CSV files only; they never import the engine package.
Malformed input fails with the offending row number.
"""

from dataclasses import dataclass


class RowError(ValueError):
    pass


@dataclass(frozen=True)
class SweepRow:
    xi: float
    n: int
    d: float
    i: int
    trial: int
    seed: int
    budget: int
    rounds: int
    success: bool


@dataclass(frozen=True)
class SimulateRow:
    trial: int
    seed: int
    n: int
    kind: str
    strategy: str
    adversary: str
    budget: int
    rounds: int
    success: bool
    final_size: int


SWEEP_HEADER = "xi,n,d,i,trial,seed,budget,rounds,success"
SIMULATE_HEADER = "trial,seed,n,kind,strategy,adversary,budget,rounds,success,final_size"


def _data_lines(text, expected_header, schema_prefix):
    lines = text.splitlines()
    if not lines:
        raise RowError("row 0: empty file")
    idx = 0
    if lines[0].startswith("# schema:"):
        if schema_prefix not in lines[0]:
            raise RowError(f"row 1: schema line {lines[0]!r} is not {schema_prefix}")
        idx = 1
    if idx >= len(lines) or lines[idx] != expected_header:
        raise RowError(f"row {idx + 1}: expected header {expected_header!r}")
    return [(i + 1, ln) for i, ln in enumerate(lines) if i > idx and ln.strip()]


def read_sweep_rows(text):
    rows = []
    for rownum, line in _data_lines(text, SWEEP_HEADER, "sweep-"):
        parts = line.split(",")
        if len(parts) != 9:
            raise RowError(f"row {rownum}: expected 9 fields, got {len(parts)}")
        try:
            rows.append(
                SweepRow(
                    xi=float(parts[0]),
                    n=int(parts[1]),
                    d=float(parts[2]),
                    i=int(parts[3]),
                    trial=int(parts[4]),
                    seed=int(parts[5]),
                    budget=int(parts[6]),
                    rounds=int(parts[7]),
                    success=parts[8] == "1",
                )
            )
        except ValueError as exc:
            raise RowError(f"row {rownum}: {exc}") from exc
    if not rows:
        raise RowError("row 2: no data rows")
    return rows


def read_simulate_rows(text):
    rows = []
    for rownum, line in _data_lines(text, SIMULATE_HEADER, "simulate-"):
        parts = line.split(",")
        if len(parts) != 10:
            raise RowError(f"row {rownum}: expected 10 fields, got {len(parts)}")
        try:
            rows.append(
                SimulateRow(
                    trial=int(parts[0]),
                    seed=int(parts[1]),
                    n=int(parts[2]),
                    kind=parts[3],
                    strategy=parts[4],
                    adversary=parts[5],
                    budget=int(parts[6]),
                    rounds=int(parts[7]),
                    success=parts[8] == "1",
                    final_size=int(parts[9]),
                )
            )
        except ValueError as exc:
            raise RowError(f"row {rownum}: {exc}") from exc
    if not rows:
        raise RowError("row 2: no data rows")
    return rows


def effective_exponent(n, d):
    """Largest i >= 1 with d^i < n (recomputed from the row data)."""
    if d <= 1 or d >= n:
        raise RowError(f"cannot derive an exponent from n={n}, d={d}")
    i = 1
    while d ** (i + 1) < n:
        i += 1
    return i
