import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

SVG_SALT = "qdec"


def lhs_histogram(values: Sequence[float], rhs: float, title: str = "Decoupling samples",
                  closed_form: Optional[float] = None):
    """Histogram of sampled ||T(U rho U^dagger) - omega x rho^R||_1 with the bound marked."""
    values = np.asarray(values, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(values, bins=30, color="#3498db", alpha=0.8)
    ax.axvline(values.mean(), color="#2c3e50", linestyle="--", label=f"mean {values.mean():.4f}")
    ax.axvline(rhs, color="#e74c3c", label=f"bound {rhs:.4f}")
    if closed_form is not None:
        ax.axvline(closed_form, color="#2ecc71", linestyle=":", label=f"closed form {closed_form:.4f}")
    ax.set_xlabel("trace distance")
    ax.set_ylabel("samples")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    return fig


def region_plot(region, title: Optional[str] = None):
    """Closure of a two-variable rate region, corners marked."""
    vertices = region.vertices()
    x_name, y_name = region.variables
    fig, ax = plt.subplots(figsize=(5, 5))
    if len(vertices) >= 3:
        xs, ys = zip(*(vertices + vertices[:1]))
        ax.fill(xs, ys, color="#3498db", alpha=0.3)
        ax.plot(xs, ys, color="#2c3e50")
    elif vertices:
        xs, ys = zip(*vertices)
        ax.plot(xs, ys, color="#2c3e50", marker="o")
    for vx, vy in vertices:
        ax.annotate(f"({vx:.3f}, {vy:.3f})", (vx, vy), fontsize=8)
    ax.set_xlabel(x_name)
    ax.set_ylabel(y_name)
    ax.set_title(title or f"{region.kind} region ({region.label})")
    fig.tight_layout()
    return fig


def leakage_plot(frame: pd.DataFrame, title: str = "Searched leakage against key size"):
    """Per-scheme leakage and its median for every key dimension."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(frame["dim_k"], frame["leakage"], color="#3498db", alpha=0.6, label="schemes")
    medians = frame.groupby("dim_k")["leakage"].median()
    ax.plot(medians.index, medians.values, color="#e74c3c", marker="o", label="median")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("|K|")
    ax.set_ylabel("leakage")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    return fig


def save_svg(fig, path: Union[str, Path]) -> Path:
    """Write a figure as SVG with fixed element ids and no date, so reruns give identical bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context({"svg.hashsalt": SVG_SALT}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info("Wrote %s", path)
    return path
