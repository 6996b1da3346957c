"""Matrix heatmaps: dependency-free binary PPM, plus matplotlib PNG figures for reports."""

from __future__ import annotations

from pathlib import Path

import numpy as np

BLOCK = 20
MID_GRAY = 128


def heatmap_pixels(entries, block: int = BLOCK) -> np.ndarray:
    """Grayscale image: minimum entry white, maximum black, one ``block`` x ``block`` square per cell."""
    M = np.asarray(entries, dtype=float)
    lo, hi = float(M.min()), float(M.max())
    if hi == lo:
        gray = np.full(M.shape, MID_GRAY, dtype=np.uint8)
    else:
        gray = np.rint(255.0 * (hi - M) / (hi - lo)).astype(np.uint8)
    return np.kron(gray, np.ones((block, block), dtype=np.uint8))


def render_heatmap(m, path, block: int = BLOCK) -> Path:
    """Write a distance or similarity matrix as a binary (P6) PPM."""
    entries = getattr(m, "entries", m)
    gray = heatmap_pixels(entries, block)
    h, w = gray.shape
    rgb = np.repeat(gray[:, :, None], 3, axis=2)
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())
    return path


def read_ppm(path) -> np.ndarray:
    """Read a binary PPM written by `render_heatmap`; returns an ``(h, w, 3)`` uint8 array."""
    data = Path(path).read_bytes()
    fields, pos = [], 0
    while len(fields) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    pos += 1
    if fields[0] != b"P6" or int(fields[3]) != 255:
        raise ValueError("not an 8-bit binary PPM")
    w, h = int(fields[1]), int(fields[2])
    return np.frombuffer(data[pos:pos + w * h * 3], dtype=np.uint8).reshape(h, w, 3)


# -- matplotlib figures ------------------------------------------------------

_RC = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.linewidth": 0.8,
    "xtick.direction": "out",
    "ytick.direction": "out",
    "savefig.dpi": 120,
    "svg.hashsalt": "netflow-dist",
}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path) -> Path:
    path = Path(path)
    # no Software/date metadata, so reruns are byte-identical
    fig.savefig(path, format="png", metadata={"Software": None})
    return path


def plot_matrix(m, path, title: str | None = None, cmap: str = "gray_r") -> Path:
    """Labeled heatmap of a distance or similarity matrix."""
    plt = _pyplot()
    entries = np.asarray(getattr(m, "entries", m), dtype=float)
    labels = list(getattr(m, "labels", range(1, entries.shape[0] + 1)))
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.2, 3.6))
        im = ax.imshow(entries, cmap=cmap, interpolation="nearest")
        ticks = np.arange(len(labels))
        ax.set_xticks(ticks)
        ax.set_yticks(ticks)
        ax.set_xticklabels(labels, rotation=90, fontsize=7)
        ax.set_yticklabels(labels, fontsize=7)
        if title:
            ax.set_title(title)
        fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04)
        fig.tight_layout()
        out = _save(fig, path)
        plt.close(fig)
    return out


def plot_eigenvectors(vectors, path, labels=None, title: str | None = None) -> Path:
    """Line plot of the leading similarity eigenvectors, one curve per vector."""
    plt = _pyplot()
    V = np.asarray(vectors, dtype=float)
    x = np.arange(V.shape[0])
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.2, 3.0))
        for k in range(V.shape[1]):
            ax.plot(x, V[:, k], marker="o", markersize=3, linewidth=1, label=f"eigenvector {k + 1}")
        ax.axhline(0.0, color="0.6", linewidth=0.6)
        if labels is not None:
            ax.set_xticks(x)
            ax.set_xticklabels(labels, rotation=90, fontsize=7)
        ax.legend(frameon=False, fontsize=7)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        out = _save(fig, path)
        plt.close(fig)
    return out
