"""Vector-graphics line charts of spectra and threshold curves.

Figures are derived from the same arrays that go into the CSV files and
never modify them.  The Agg backend is selected so plotting works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed metadata so repeated runs give identical SVG bytes
_SVG_META = {"Date": None, "Creator": None}
plt.rcParams["svg.hashsalt"] = "awi"


def _finish(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)
    return path


def plot_spectrum(x, im_f, re_f, path, title: str = "", xlabel: str = r"$\delta_p/\Gamma_{31}$") -> Path:
    """Absorption (Im f) and dispersion (Re f) against scaled probe detuning."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.axhline(0.0, color="0.6", lw=0.8)
    ax.plot(x, im_f, color="C0", lw=1.5, label="Im f (absorption)")
    ax.plot(x, re_f, color="C1", lw=1.0, ls="--", label="Re f (dispersion)")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("f, scaled to drive-off peak")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    return _finish(fig, path)


def plot_thresholds(pressures, kappa_inv, kappa_awi, path, title: str = "",
                    minima: dict | None = None) -> Path:
    """Inversion and AWI threshold curves on log-log axes."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.loglog(pressures, kappa_inv, color="C3", label="inversion")
    ax.loglog(pressures, kappa_awi, color="C0", label="AWI")
    for name, (k0, P) in (minima or {}).items():
        ax.plot([P], [k0], "o", ms=4, color="C3" if name == "inversion" else "C0")
    ax.set_xlabel("buffer pressure (Torr)")
    ax.set_ylabel(r"threshold $\kappa_0$")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    return _finish(fig, path)


def plot_curves(x, curves: dict[str, np.ndarray], path, xlabel: str, ylabel: str, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, y in curves.items():
        ax.plot(x, y, lw=1.2, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    return _finish(fig, path)
