"""Matplotlib rendering of the report outputs (curves, maps, bar charts).

Everything draws to files through the Agg backend; the CLI only imports this
module when a figure was actually requested.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .alpha import GammaCurve
from .channel import UserLocation
from .coverage import Placement, PositionBox

_ENV_COLORS = {
    "suburban": "tab:green",
    "urban": "tab:blue",
    "dense-urban": "tab:orange",
    "highrise-urban": "tab:red",
}


def _color(slug: str):
    return _ENV_COLORS.get(slug, "tab:gray")


def save_gamma_curve_plot(curves: dict[str, GammaCurve], path: str | Path) -> None:
    """One squared-radius curve per environment, peaks starred."""
    fig, ax = plt.subplots(figsize=(7, 5))
    for slug, curve in curves.items():
        ax.plot(curve.alpha, curve.gamma_m2, label=slug, color=_color(slug), lw=1.8)
        if curve.peak_index is not None:
            ax.plot(curve.alpha[curve.peak_index], curve.gamma_m2[curve.peak_index],
                    "*", color=_color(slug), markersize=12)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("altitude-to-radius ratio")
    ax.set_ylabel(r"squared max coverage radius (m$^2$)")
    ax.grid(alpha=0.3, which="both")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_placement_plot(
    placement: Placement,
    users: list[UserLocation],
    box: PositionBox,
    path: str | Path,
    label: str = "",
) -> None:
    """Map of users, the coverage disk and the platform position."""
    fig, ax = plt.subplots(figsize=(7, 6))
    xs = np.array([u.x for u in users])
    ys = np.array([u.y for u in users])
    served = np.zeros(len(users), dtype=bool)
    served[list(placement.served)] = True

    ax.scatter(xs[~served], ys[~served], s=18, c="lightgray", label="unserved", zorder=2)
    ax.scatter(xs[served], ys[served], s=22, c="tab:blue", label="served", zorder=3)
    ax.add_patch(plt.Circle((placement.x_d, placement.y_d), placement.radius,
                            fill=False, color="tab:blue", lw=1.6, zorder=4))
    ax.plot(placement.x_d, placement.y_d, "*", color="tab:red", markersize=14,
            label="platform", zorder=5)
    ax.add_patch(plt.Rectangle((box.x_l, box.y_l), box.x_u - box.x_l, box.y_u - box.y_l,
                               fill=False, color="k", lw=1.0, ls="--", zorder=1))
    title = f"served {placement.served_count}/{len(users)}  R={placement.radius:.1f} m  h={placement.h:.1f} m"
    if label:
        title = f"{label}: {title}"
    ax.set_title(title)
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_aspect("equal")
    ax.legend(loc="upper right", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_montecarlo_plot(rows: list[dict], path: str | Path) -> None:
    """Grouped bars of mean served users with confidence-interval whiskers."""
    gammas = sorted({row["gamma_db"] for row in rows})
    slugs = list(dict.fromkeys(row["environment"] for row in rows))
    width = 0.8 / max(1, len(slugs))

    fig, ax = plt.subplots(figsize=(7, 5))
    x = np.arange(len(gammas))
    for k, slug in enumerate(slugs):
        means, errs = [], []
        for g in gammas:
            row = next(r for r in rows if r["environment"] == slug and r["gamma_db"] == g)
            means.append(row["mean"])
            errs.append(row["ci_half_width"])
        ax.bar(x + (k - (len(slugs) - 1) / 2) * width, means, width * 0.92,
               yerr=errs, capsize=3, label=slug, color=_color(slug))
    ax.set_xticks(x)
    ax.set_xticklabels([f"{g:g} dB" for g in gammas])
    ax.set_xlabel("pathloss threshold")
    ax.set_ylabel("mean served users")
    ax.grid(alpha=0.3, axis="y")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
