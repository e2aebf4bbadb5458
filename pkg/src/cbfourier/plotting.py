"""PNG figures written next to a JSON report."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_META = {"Software": None}


def figure_path(out: str | Path, tag: str) -> Path:
    out = Path(out)
    return out.with_name(f"{out.stem}_{tag}.png")


def _save(fig, path: Path) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata=_META)
    plt.close(fig)
    return path.name


def idempotent_norms(rows: list[dict], path: Path, bound: float | None = None) -> str:
    """``rows``: dicts with ``size``, ``norm``, ``is_coset``."""
    fig, ax = plt.subplots(figsize=(6, 4))
    size = np.array([r["size"] for r in rows])
    norm = np.array([r["norm"] for r in rows])
    coset = np.array([r["is_coset"] for r in rows], dtype=bool)
    ax.scatter(size[~coset], norm[~coset], s=10, c="tab:orange", label="not a coset")
    ax.scatter(size[coset], norm[coset], s=18, c="tab:blue", marker="s", label="coset")
    ax.axhline(1.0, color="k", lw=0.7)
    if bound is not None:
        ax.axhline(bound, color="tab:red", ls="--", lw=0.8, label=f"{bound:.4f}")
    ax.set_xlabel("|S|")
    ax.set_ylabel("A-norm of the indicator")
    ax.legend(fontsize=8)
    return _save(fig, path)


def scan_counts(summary: dict, path: Path) -> str:
    keys = ["total", "affine", "subgroup_hom", "cc", "cp", "not_cc", "indeterminate", "inconsistent"]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    vals = [max(summary.get(k, 0), 0) for k in keys]
    ax.bar(keys, vals, color="tab:blue")
    ax.set_yscale("symlog")
    ax.set_ylabel("maps")
    ax.tick_params(axis="x", rotation=30)
    return _save(fig, path)


def sandwich(components: list[dict], path: Path) -> str:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for i, c in enumerate(components):
        ax.plot([i, i], [c["lower"], c["upper"]], "k-", lw=2)
        ax.plot([i], [c["lower"]], "v", color="tab:blue")
        ax.plot([i], [c["upper"]], "^", color="tab:red")
    ax.axhline(1.0, color="grey", lw=0.6, ls=":")
    ax.set_xticks(range(len(components)))
    ax.set_xlabel("codomain block")
    ax.set_ylabel("cb norm bounds")
    return _save(fig, path)


def lattice_points(groups: dict[str, np.ndarray], path: Path, witness=None, title: str = "") -> str:
    """Scatter of labelled point sets in Z or Z^2 (higher dimensions use the first two)."""
    fig, ax = plt.subplots(figsize=(5, 5))
    for label, pts in groups.items():
        pts = np.asarray(pts).reshape(len(pts), -1)
        if not len(pts):
            continue
        y = pts[:, 1] if pts.shape[1] > 1 else np.zeros(len(pts))
        ax.scatter(pts[:, 0], y, s=8, label=label)
    if witness is not None:
        w = list(witness) + [0]
        ax.scatter([w[0]], [w[1]], s=80, marker="*", c="red", label="uncovered point")
    ax.set_title(title)
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend(fontsize=7, loc="upper right")
    return _save(fig, path)


def heatmap(values: np.ndarray, path: Path, title: str = "") -> str:
    fig, ax = plt.subplots(figsize=(4.5, 4))
    im = ax.imshow(np.real(values), cmap="viridis")
    fig.colorbar(im, ax=ax)
    ax.set_title(title)
    return _save(fig, path)


def fourier_bars(dims: list[int], norms: list[float], path: Path) -> str:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar(range(len(norms)), norms, color="tab:green")
    ax.set_xticks(range(len(norms)), [f"d={d}" for d in dims])
    ax.set_ylabel("trace norm of the coefficient")
    return _save(fig, path)
