"""Report writers: delimited output, JSON summaries and rendered figures.

Every JSON artifact carries the schema version and the semantic config echo
(worker counts are execution knobs and stay out of the echo so reruns are
byte-identical).  CSV files carry the same provenance as leading comment
lines.  Figures are rendered headlessly next to the delimited output.
"""

import csv
import json

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

import numpy as np  # noqa: E402

SCHEMA_VERSION = "magfrac-report-v1"


def summary_line(payload):
    """Compact deterministic single-line JSON."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def provenance_lines(config_echo):
    return [
        f"schema_version={SCHEMA_VERSION}",
        "config=" + summary_line(config_echo),
    ]


def write_rows_csv(path, fieldnames, rows, config_echo):
    with open(path, "w", newline="") as fh:
        for line in provenance_lines(config_echo):
            fh.write(f"# {line}\n")
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(row.get(k)) for k in fieldnames})


def _cell(value):
    if isinstance(value, float):
        return repr(value)
    return value


def write_grid_function_csv(f, path, config_echo):
    """Serialize a grid function as (cell_index, x1, x2, re, im) rows."""
    rows = []
    for i in range(f.grid.n_cells):
        x = f.grid.centers[i]
        rows.append(
            {
                "cell_index": i,
                "x1": float(x[0]),
                "x2": float(x[1]) if f.grid.dim == 2 else 0.0,
                "re": float(f.values[i].real),
                "im": float(f.values[i].imag),
            }
        )
    write_rows_csv(path, ["cell_index", "x1", "x2", "re", "im"], rows, config_echo)


# ---------------------------------------------------------------------------
# figures


def _save(fig, path):
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def fig_profile(f, path, title=""):
    """Line plot (1D) or modulus heat map (2D) of a grid function."""
    fig, ax = plt.subplots(figsize=(6, 4))
    if f.grid.dim == 1:
        x = f.grid.centers[:, 0]
        ax.plot(x, f.values.real, label="Re", lw=1.2)
        ax.plot(x, f.values.imag, label="Im", lw=1.2)
        ax.plot(x, np.abs(f.values), label="|f|", lw=1.0, ls="--", color="k")
        ax.set_xlabel("x")
        ax.legend(frameon=False)
    else:
        shape = f.grid.n_per_axis
        img = np.full(shape, np.nan)
        img[f.grid.lattice[:, 0], f.grid.lattice[:, 1]] = np.abs(f.values)
        lo, hi = f.grid.box_lo, f.grid.box_hi
        m = ax.imshow(
            img.T,
            origin="lower",
            extent=(lo[0], hi[0], lo[1], hi[1]),
            aspect="equal",
            cmap="viridis",
        )
        fig.colorbar(m, ax=ax, label="|f|")
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
    if title:
        ax.set_title(title)
    _save(fig, path)


def fig_spectrum(spectrum, path):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    n = np.arange(1, spectrum.k + 1)
    ax1.plot(n, spectrum.lambdas, "o-", ms=4)
    ax1.set_xlabel("n")
    ax1.set_ylabel("eigenvalue")
    gaps = np.diff(spectrum.lambdas)
    if gaps.size:
        ax2.bar(n[:-1], gaps, width=0.8)
        ax2.set_xlabel("n")
        ax2.set_ylabel("gap to next")
    fig.tight_layout()
    _save(fig, path)


def fig_decay(records, fit, path):
    """Log-log decay of the off-plateau seminorm power with the fitted line."""
    fig, ax = plt.subplots(figsize=(5.5, 4))
    eps = np.array([rec.eps for rec in records if rec.resolved])
    val = np.array([rec.value_r for rec in records if rec.resolved])
    ax.loglog(eps, val, "o", label="measured")
    xs = np.array([eps.min(), eps.max()])
    ax.loglog(
        xs,
        np.exp(fit.intercept) * xs**fit.slope,
        "-",
        label=f"fit slope {fit.slope:.3f}",
    )
    ax.loglog(
        xs,
        np.exp(fit.intercept) * xs**fit.expected_slope,
        "--",
        label=f"expected {fit.expected_slope:.3f}",
    )
    ax.set_xlabel("ramp width")
    ax.set_ylabel("off-plateau seminorm power")
    ax.legend(frameon=False)
    _save(fig, path)


def fig_indicator(report, path):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    labels = ["inner x inner", "outer x outer", "full (n)", "full (2n)"]
    values = [
        report.sem_inner,
        report.sem_outer,
        report.full_value,
        report.full_value_refined,
    ]
    ax.bar(labels, values)
    ax.set_ylabel("seminorm value")
    ax.set_title(f"s={report.s}, p={report.p}: sub-region seminorms vanish")
    ax.tick_params(axis="x", rotation=20)
    _save(fig, path)


def fig_punctured(rows, path):
    fig, ax = plt.subplots(figsize=(5, 5))
    lhs = [row.lhs for row in rows]
    rhs = [row.rhs for row in rows]
    ax.scatter(rhs, lhs, s=12)
    top = max(lhs + rhs) if rows else 1.0
    ax.plot([0, top], [0, top], "k--", lw=1, label="lhs = rhs")
    ax.set_xlabel("required lower bound")
    ax.set_ylabel("split seminorm sum")
    ax.legend(frameon=False)
    _save(fig, path)


def fig_convergence(trace, path, ylabel="objective"):
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.semilogy(np.maximum(np.array(trace, dtype=float), 1e-300))
    ax.set_xlabel("iteration")
    ax.set_ylabel(ylabel)
    _save(fig, path)
