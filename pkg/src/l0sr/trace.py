"""Per-iteration convergence traces and their CSV form.

CSV layout: ``# key = value`` header lines, then a column row
``iter,beta,objective,fidelity,jump_count,residual_h,residual_v,rel_change,cg_iters,wall_ms``
and one row per outer iteration. Floats are written with ``repr`` so a
round trip is exact.
"""
import csv
import io
from dataclasses import dataclass, field, fields
from typing import Dict, List, Optional

COLUMNS = ("iter", "beta", "objective", "fidelity", "jump_count",
           "residual_h", "residual_v", "rel_change", "cg_iters", "wall_ms")
_INT_COLUMNS = {"iter", "jump_count", "cg_iters"}


@dataclass(frozen=True)
class TraceRecord:
    iter: int
    beta: float
    objective: float
    fidelity: float
    jump_count: int
    residual_h: float
    residual_v: float
    rel_change: float
    cg_iters: int
    wall_ms: float


@dataclass
class ConvergenceTrace:
    header: Dict[str, str] = field(default_factory=dict)
    records: List[TraceRecord] = field(default_factory=list)
    converged: bool = False
    bound_violations: List[int] = field(default_factory=list)
    cg_failures: List[int] = field(default_factory=list)
    max_bound_ratio: Optional[float] = None
    final_residual_h: Optional[float] = None
    final_residual_v: Optional[float] = None

    def column(self, name):
        return [getattr(r, name) for r in self.records]

    @property
    def iterations(self):
        return len(self.records)

    def increases_after(self, start, key="objective", slack=0.0):
        """Iterations ``k > start`` where ``key`` rose above its previous value."""
        out = []
        for prev, cur in zip(self.records, self.records[1:]):
            if cur.iter > start and getattr(cur, key) > getattr(prev, key) + slack:
                out.append(cur.iter)
        return out

    def to_csv(self, include_timing=True):
        buf = io.StringIO()
        meta = dict(self.header)
        meta["converged"] = str(self.converged)
        meta["bound_violations"] = " ".join(map(str, self.bound_violations))
        meta["cg_failures"] = " ".join(map(str, self.cg_failures))
        meta["max_bound_ratio"] = repr(self.max_bound_ratio)
        for key, value in meta.items():
            buf.write(f"# {key} = {value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for r in self.records:
            row = []
            for name in COLUMNS:
                v = getattr(r, name)
                if name == "wall_ms" and not include_timing:
                    v = 0.0
                row.append(str(v) if name in _INT_COLUMNS else repr(float(v)))
            writer.writerow(row)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        header = {}
        lines = []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                header[key.strip()] = value.strip()
            elif line.strip():
                lines.append(line)
        reader = csv.reader(lines)
        cols = next(reader)
        if tuple(cols) != COLUMNS:
            raise ValueError(f"unexpected trace columns {cols}")
        records = []
        for row in reader:
            values = {name: (int(v) if name in _INT_COLUMNS else float(v)) for name, v in zip(cols, row)}
            records.append(TraceRecord(**values))
        trace = cls(records=records)
        trace.converged = header.pop("converged", "False") == "True"
        trace.bound_violations = [int(x) for x in header.pop("bound_violations", "").split()]
        trace.cg_failures = [int(x) for x in header.pop("cg_failures", "").split()]
        ratio = header.pop("max_bound_ratio", "None")
        trace.max_bound_ratio = None if ratio == "None" else float(ratio)
        trace.header = header
        if records:
            trace.final_residual_h = records[-1].residual_h
            trace.final_residual_v = records[-1].residual_v
        return trace

    def write(self, path, include_timing=True):
        with open(path, "w") as fh:
            fh.write(self.to_csv(include_timing))

    @classmethod
    def read(cls, path):
        with open(path) as fh:
            return cls.from_csv(fh.read())
