"""CSV traces, comparison tables and SVG plots."""
from __future__ import annotations

import io
import os
import tempfile

from .metrics import MetricsReport
from .simulate import SimulationTrace


def fmt(value) -> str:
    if value is None:
        return ""
    return format(float(value), ".9g")


def write_atomic(path: str, text: str) -> None:
    """Write through a sibling temp file so readers never see a partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trace_columns(trace: SimulationTrace) -> list[str]:
    m = trace.m
    cols = ["t"]
    cols += [f"z{i}" for i in range(1, m + 1)]
    cols += [f"zhat{i}" for i in range(1, m + 1)]
    cols += [f"eps{i}" for i in range(1, m + 1)]
    cols += [f"E{i}" for i in range(1, m)]
    cols.append("L")
    if trace.variant == "adaptive":
        cols.append("gamma")
    return cols


def trace_csv(trace: SimulationTrace) -> str:
    buf = io.StringIO()
    buf.write(",".join(trace_columns(trace)) + "\n")
    adaptive = trace.variant == "adaptive"
    t = trace.t.tolist()
    z = trace.z.tolist()
    zh = trace.z_hat.tolist()
    eps = trace.eps.tolist()
    gates = trace.gates.tolist()
    loss = trace.loss.tolist()
    gamma = trace.gamma.tolist()
    for k in range(len(t)):
        row = [fmt(t[k])]
        row += [fmt(v) for v in z[k]]
        row += [fmt(v) for v in zh[k]]
        row += [fmt(v) for v in eps[k]]
        row += [str(int(v)) for v in gates[k]]
        row.append(fmt(loss[k]))
        if adaptive:
            row.append(fmt(gamma[k]))
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def write_trace(trace: SimulationTrace, path: str) -> None:
    write_atomic(path, trace_csv(trace))


def comparison_csv(reports: list[MetricsReport]) -> str:
    rows = [r.row() for r in reports]
    cols = list(rows[0])
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in (row[c] for c in cols)))
    return "\n".join(lines) + "\n"


def comparison_table(reports: list[MetricsReport]) -> str:
    """Fixed-width text rendering of the comparison rows."""
    rows = [r.row() for r in reports]
    cols = list(rows[0])
    cells = [[c for c in cols]]
    for row in rows:
        cells.append(
            [v if isinstance(v, str) else ("-" if v is None else format(float(v), ".4g")) for v in row.values()]
        )
    widths = [max(len(r[i]) for r in cells) for i in range(len(cols))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"


def plot_trace(trace: SimulationTrace, out_dir: str, channels=None) -> list[str]:
    """One SVG per channel (truth against estimate) plus gamma for adaptive runs."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "smobs"
    channels = channels or list(range(1, trace.m + 1))
    written = []
    figures = []
    for i in channels:
        fig, ax = plt.subplots(figsize=(6, 3.5))
        ax.plot(trace.t, trace.z[:, i - 1], color="tab:blue", lw=1.0, label=f"z{i}")
        ax.plot(trace.t, trace.z_hat[:, i - 1], color="tab:red", lw=0.8, label=f"zhat{i}")
        ax.set_xlabel("t [s]")
        ax.legend(loc="best")
        ax.set_title(f"{trace.name}: channel {i}")
        figures.append((fig, os.path.join(out_dir, f"{trace.name}_z{i}.svg")))
    if trace.variant == "adaptive":
        fig, ax = plt.subplots(figsize=(6, 3.5))
        ax.plot(trace.t, trace.gamma, color="tab:green", lw=1.0, label="gamma")
        ax.set_xlabel("t [s]")
        ax.legend(loc="best")
        ax.set_title(f"{trace.name}: exponent")
        figures.append((fig, os.path.join(out_dir, f"{trace.name}_gamma.svg")))
    for fig, path in figures:
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
        write_atomic(path, buf.getvalue())
        written.append(path)
    return written
