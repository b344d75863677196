"""Report figures.  Each function writes one PNG and returns its path."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = [
    "plot_chain",
    "plot_contact_form",
    "plot_defects",
    "plot_fit",
    "plot_invariance",
    "plot_spectrum",
    "plot_suite",
]


def _save(fig, path) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    # fixed metadata keeps the files byte-stable across runs
    fig.savefig(path, dpi=110, metadata={"Software": None})
    plt.close(fig)
    return str(path)


def plot_contact_form(phi, a, b, value, path, title: str = "") -> str:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.plot(phi, a, label="a(phi)")
    ax1.plot(phi, b, label="b(phi)")
    ax1.set_xlabel("phi")
    ax1.legend()
    ax2.plot(phi, value, color="k")
    ax2.axhline(0, color="0.7", lw=0.8)
    ax2.set_xlabel("phi")
    ax2.set_ylabel("a b' - b a'")
    fig.suptitle(title)
    return _save(fig, path)


def plot_fit(eps, values, fitted, path) -> str:
    eps, values, fitted = map(np.asarray, (eps, values, fitted))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.loglog(eps, np.abs(values), "o", ms=3, label="data")
    ax1.loglog(eps, np.abs(fitted), "-", label="fit")
    ax1.set_xlabel("epsilon")
    ax1.legend()
    ax2.semilogx(eps, np.abs(values - fitted), ".")
    ax2.set_xlabel("epsilon")
    ax2.set_ylabel("|residual|")
    return _save(fig, path)


def plot_spectrum(before, after, path) -> str:
    before, after = np.asarray(before), np.asarray(after)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(before.real, before.imag, "o", mfc="none", label="input")
    ax.plot(after.real, after.imag, "x", label="corrected")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.legend()
    return _save(fig, path)


def plot_defects(t, defects, path, ylabel: str = "defect") -> str:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    d = np.maximum(np.asarray(defects, dtype=float), 1e-18)
    ax.semilogy(t, d, "o-")
    ax.set_xlabel("t")
    ax.set_ylabel(ylabel)
    return _save(fig, path)


def plot_invariance(reports, path) -> str:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for rep in reports:
        ax.plot(rep["t"], rep["beta0_bar"], "o-", label=rep["family"])
    ax.set_xlabel("t")
    ax.set_ylabel("log trace")
    ax.legend()
    return _save(fig, path)


def plot_chain(report, path) -> str:
    n = np.asarray(report["n"])
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(n, report["L"], "o", label="periodic construction")
    ax.plot(n, report["slope"] * n + report["intercept"], "-", label="linear fit")
    ax.plot(n, report["forced_L"], "s", label="forced by class constraint")
    ax.set_xlabel("n")
    ax.set_ylabel("L(lambda_n)")
    ax.legend()
    return _save(fig, path)


def plot_suite(rows, path) -> str:
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ids = [r["id"] for r in rows]
    colors = ["tab:green" if r["passed"] else "tab:red" for r in rows]
    ax.bar(ids, [1] * len(rows), color=colors)
    ax.set_xticks(ids)
    ax.set_yticks([])
    ax.set_xlabel("criterion")
    ax.set_title("acceptance: green = pass, red = fail")
    return _save(fig, path)
