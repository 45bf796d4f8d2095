"""Static figures (matplotlib, Agg backend) written straight to files."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .chair import COLORS  # noqa: E402

TYPE_COLORS = {"a": "#1b9e77", "b": "#d95f02", "c": "#7570b3"}
# fixed metadata keeps PNG/SVG bytes stable between runs
_META = {"png": {"Software": None}, "svg": {"Date": None}, "pdf": {"CreationDate": None}}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fmt = path.suffix.lstrip(".").lower() or "png"
    kw = {"metadata": _META.get(fmt, {})}
    if fmt == "svg":
        matplotlib.rcParams["svg.hashsalt"] = "padic-modelset"
    fig.savefig(path, dpi=120, **kw)
    plt.close(fig)
    return path


def monna(r: int, p: int, level: int) -> float:
    """Digit reversal of ``r mod p^level``, placing residue classes in ``[0, 1)``."""
    x, scale = 0.0, 1.0 / p
    for _ in range(level):
        x += (r % p) * scale
        r //= p
        scale /= p
    return x


def plot_sequence(points, path, title: str = "") -> Path:
    """Anchors per letter along the line; ``points`` is a GeometricPointSets."""
    fig, ax = plt.subplots(figsize=(10, 2.2))
    letters = list(points.per_letter)
    for row, t in enumerate(letters):
        xs = [float(x) for x in points.per_letter[t]]
        ax.scatter(xs, [row] * len(xs), s=8, color=TYPE_COLORS.get(t, f"C{row}"), label=t)
    ax.set_yticks(range(len(letters)), letters)
    ax.set_xlabel("x")
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_coset_windows(family: dict, p: int, path, title: str = "") -> Path:
    """Clopen windows drawn in ``[0, 1)`` through the digit-reversal map, one row per label."""
    fig, ax = plt.subplots(figsize=(8, 0.6 + 0.5 * len(family)))
    for row, (label, cu) in enumerate(family.items()):
        for c in cu.normalized().cosets:
            x0 = monna(c.center[0], p, c.level)
            ax.broken_barh([(x0, p ** (-c.level))], (row - 0.4, 0.8), color=TYPE_COLORS.get(label, f"C{row}"))
    ax.set_yticks(range(len(family)), list(family))
    ax.set_xlim(0, 1)
    ax.set_xlabel(f"{p}-adic integers (digit-reversed)")
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_chair(labelled: dict, path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(6, 6))
    items = sorted(labelled.items())
    for k in range(4):
        pts = np.array([p for p, lab in items if lab == k]).reshape(-1, 2)
        ax.scatter(pts[:, 0], pts[:, 1], marker="s", s=max(1.0, 2000.0 / max(len(items), 1)), color=COLORS[k],
                   label=f"k={k}")
    ax.set_aspect("equal")
    ax.legend(loc="upper left", fontsize="small")
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_quasi_windows(windows, path, title: str = "") -> Path:
    """Euclidean shadows of the outer and inner cells (union over residues)."""
    from .limitquasi import _key

    fig, ax = plt.subplots(figsize=(8, 2.4))
    row = 0
    labels = []
    for t in ("a", "b"):
        outer = [(_key(lo), _key(hi)) for ivs in windows.outer.cells[t].values() for lo, hi in ivs]
        inner = [(_key(lo), _key(hi)) for layer in windows.inner for ivs in layer.cells[t].values() for lo, hi in ivs]
        ax.broken_barh([(lo, hi - lo) for lo, hi in sorted(set(outer))], (row - 0.4, 0.35), color=TYPE_COLORS[t],
                       alpha=0.5)
        ax.broken_barh([(lo, hi - lo) for lo, hi in sorted(set(inner))], (row + 0.05, 0.35), color=TYPE_COLORS[t])
        labels.append(f"{t} (outer below, inner above)")
        row += 1
    ax.set_yticks(range(row), labels)
    ax.set_xlabel("beta")
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_strip(seq, strips: Sequence[tuple], path, title: str = "") -> Path:
    """Lifted points as (physical x, beta) with the strip edges as horizontal lines."""
    fig, ax = plt.subplots(figsize=(9, 3.5))
    r2 = np.sqrt(2)
    for t, arr in (("a", seq.lift_a), ("b", seq.lift_b)):
        x = arr[:, 0] + r2 * arr[:, 1]
        beta = arr[:, 1] - arr[:, 0] / r2
        ax.scatter(x, beta, s=4, color=TYPE_COLORS[t], label=t)
    names = ("full", "inner", "valid")
    for j, (lo, hi, *_) in enumerate(strips):
        for b in (float(lo), float(hi)):
            ax.axhline(b, color=f"C{j + 2}", lw=0.8, ls="--", label=names[j] if j < 3 and b == float(lo) else None)
    ax.set_xlabel("x = m + n sqrt2")
    ax.set_ylabel("beta = n - m/sqrt2")
    ax.legend(fontsize="small", loc="upper right", ncol=5)
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_spectrum(rows, path, title: str = "") -> Path:
    """Stem plot of numeric intensities with analytic values overlaid when present."""
    fig, ax = plt.subplots(figsize=(10, 3))
    ks = np.array([float(r.k) for r in rows])
    num = np.array([r.numeric for r in rows])
    ax.vlines(ks, 0, num, color="#444444", lw=0.8, label="numeric")
    ana = [(float(r.k), r.analytic) for r in rows if r.analytic is not None]
    if ana:
        a = np.array(ana)
        ax.scatter(a[:, 0], a[:, 1], s=10, facecolors="none", edgecolors="#d95f02", label="analytic")
    ax.set_xlabel("k")
    ax.set_ylabel("intensity")
    ax.legend(fontsize="small")
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_convergence(xs: Sequence, ys: Sequence, path, xlabel: str, ylabel: str, title: str = "", log: bool = True) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(list(xs), [float(y) for y in ys], marker="o")
    if log:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)
