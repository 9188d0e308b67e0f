"""Report emission: delimited tables, machine-readable JSON, and figures
rendered alongside the delimited output."""

import csv
import json

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

_FMT = "%.17g"


def _g(x):
    return _FMT % x if x is not None else ""


def report_to_dict(report):
    """Machine-readable view of a SimReport. Excludes wall time so that equal
    seeds yield byte-identical serializations."""
    results = {}
    for method in report.methods:
        m = report.metrics[method]
        results[method] = {
            "tp": m.tp if m else None,
            "fp": m.fp if m else None,
            "tm": m.tm if m else None,
            "mse": m.mse if m else None,
            "misclassification": report.misclass[method],
            "nonconverged": report.nonconverged[method],
            "failures": report.failures[method],
        }
    return {
        "scenario": report.design.name,
        "reps": report.reps,
        "methods": list(report.methods),
        "results": results,
        "config": report.config_echo,
    }


def report_json(report):
    return json.dumps(report_to_dict(report), sort_keys=True, indent=2) + "\n"


def report_table(report):
    """Human-readable table in the layout of the benchmark tables."""
    logistic = report.design.logistic
    head = ["method", "TP", "FP", "TM", "MSE"]
    if logistic:
        head.append("misclass")
    head += ["nonconv", "failed"]
    rows = [head]
    for method in report.methods:
        m = report.metrics[method]
        row = [method]
        row += ([f"{m.tp:.2f}", f"{m.fp:.2f}", f"{m.tm:.2f}", f"{m.mse:.3f}"]
                if m else ["-"] * 4)
        if logistic:
            mis = report.misclass[method]
            row.append(f"{mis:.3f}" if mis is not None else "-")
        row += [str(report.nonconverged[method]), str(report.failures[method])]
        rows.append(row)
    widths = [max(len(r[i]) for r in rows) for i in range(len(head))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
             for r in rows]
    lines.append(f"({report.reps} replications, {report.wall_time:.1f}s)")
    return "\n".join(lines) + "\n"


def write_report_csv(report, fname):
    with open(fname, "w", newline="") as fh:
        w = csv.writer(fh)
        cols = ["method", "tp", "fp", "tm", "mse", "misclassification",
                "nonconverged", "failures"]
        w.writerow(cols)
        for method in report.methods:
            m = report.metrics[method]
            w.writerow([
                method,
                _g(m.tp) if m else "", _g(m.fp) if m else "",
                _g(m.tm) if m else "", _g(m.mse) if m else "",
                _g(report.misclass[method]),
                report.nonconverged[method], report.failures[method],
            ])


def plot_report(report, fname):
    """Grouped bar panels of the per-method metrics."""
    panels = [("TP", "tp"), ("FP", "fp"), ("TM", "tm"), ("MSE", "mse")]
    if report.design.logistic and any(v is not None
                                      for v in report.misclass.values()):
        panels.append(("misclassification", None))
    fig, axes = plt.subplots(1, len(panels), figsize=(3.2 * len(panels), 3.4))
    methods = list(report.methods)
    xs = np.arange(len(methods))
    for ax, (title, attr) in zip(np.atleast_1d(axes), panels):
        if attr is None:
            vals = [report.misclass[m] if report.misclass[m] is not None
                    else np.nan for m in methods]
        else:
            vals = [getattr(report.metrics[m], attr)
                    if report.metrics[m] else np.nan for m in methods]
        ax.bar(xs, vals, color="#4878a8")
        ax.set_xticks(xs)
        ax.set_xticklabels(methods, rotation=45, ha="right")
        ax.set_title(title)
    fig.suptitle(f"{report.design.name} ({report.reps} reps)")
    fig.tight_layout()
    fig.savefig(fname, dpi=120)
    plt.close(fig)


def plot_path(sol_path, fname, selected_lam=None):
    """Coefficient profiles and HBIC trace along the lambda grid."""
    lams = sol_path.lambdas
    betas = np.stack([f.beta for f in sol_path.fits])
    active = np.flatnonzero(np.any(betas != 0.0, axis=0))
    has_hbic = sol_path.hbic is not None and np.any(np.isfinite(sol_path.hbic))
    ncol = 2 if has_hbic else 1
    fig, axes = plt.subplots(1, ncol, figsize=(5.2 * ncol, 3.8))
    axes = np.atleast_1d(axes)
    for j in active:
        axes[0].plot(np.log10(lams), betas[:, j], lw=0.9)
    axes[0].set_xlabel(r"$\log_{10}\lambda$")
    axes[0].set_ylabel("coefficient")
    axes[0].set_title("solution path")
    if has_hbic:
        axes[1].plot(np.log10(lams), sol_path.hbic, "o-", ms=3)
        axes[1].set_xlabel(r"$\log_{10}\lambda$")
        axes[1].set_ylabel("HBIC")
        axes[1].set_title("HBIC along the path")
    if selected_lam is not None:
        for ax in axes:
            ax.axvline(np.log10(selected_lam), color="crimson", ls="--", lw=1)
    fig.tight_layout()
    fig.savefig(fname, dpi=120)
    plt.close(fig)


def write_coefficients_csv(fname, beta, intercept=None):
    """Coefficient table at full (17 significant digit) precision."""
    with open(fname, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "coefficient"])
        if intercept is not None:
            w.writerow(["intercept", _g(intercept)])
        for j, b in enumerate(beta):
            w.writerow([j, _g(b)])


def read_coefficients_csv(fname, p=None):
    """Inverse of write_coefficients_csv. Returns (beta, intercept)."""
    intercept = 0.0
    entries = {}
    with open(fname, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["index"] == "intercept":
                intercept = float(row["coefficient"])
            else:
                entries[int(row["index"])] = float(row["coefficient"])
    size = p if p is not None else (max(entries) + 1 if entries else 0)
    beta = np.zeros(size)
    for j, b in entries.items():
        beta[j] = b
    return beta, intercept
