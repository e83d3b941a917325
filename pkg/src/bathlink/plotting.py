"""Figure rendering for the CLI report path.

Every command that writes a curve CSV also drops a PNG next to it
(unless asked not to). Rendering always goes through the Agg backend
and strips the matplotlib version stamp from the PNG metadata so that
repeated runs produce byte-identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["save_fit_figure", "save_kernel_figure", "save_translate_figure"]

_SAVE_KWARGS = {"dpi": 110, "metadata": {"Software": None}}


def save_fit_figure(path, nu_thz, dos_data, dos_fit, residual, title=""):
    fig, (ax, axr) = plt.subplots(
        2, 1, figsize=(6.4, 4.8), sharex=True, height_ratios=[3, 1]
    )
    ax.plot(nu_thz, dos_data, ".", ms=3, color="0.45", label="data")
    ax.plot(nu_thz, dos_fit, color="tab:blue", lw=1.5, label="Lorentzian fit")
    ax.set_ylabel("DOS (arb. units)")
    ax.legend(frameon=False)
    if title:
        ax.set_title(title, fontsize=10)
    axr.axhline(0.0, color="0.7", lw=0.8)
    axr.plot(nu_thz, residual, color="tab:red", lw=1.0)
    axr.set_xlabel(r"$\nu$ (THz)")
    axr.set_ylabel("residual")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def save_kernel_figure(path, tau_ps, curves, title=""):
    """curves: mapping label -> kernel samples."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for label, values in curves.items():
        ax.plot(tau_ps, values, lw=1.4, label=label)
    ax.axhline(0.0, color="0.7", lw=0.8)
    ax.set_xlabel(r"$\tau$ (ps)")
    ax.set_ylabel(r"$K(\tau)$ (model units)")
    if len(curves) > 1:
        ax.legend(frameon=False)
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def save_translate_figure(path, nu_thz, dos, coupling, spectral, title=""):
    fig, axes = plt.subplots(3, 1, figsize=(6.4, 6.4), sharex=True)
    for ax, y, label, color in zip(
        axes,
        (dos, coupling, spectral),
        (r"$D(\omega)$", r"$C(\omega)$", r"$J(\omega)$"),
        ("tab:blue", "tab:green", "tab:orange"),
    ):
        ax.plot(nu_thz, y, lw=1.4, color=color)
        ax.set_ylabel(label)
    axes[-1].set_xlabel(r"$\nu$ (THz)")
    if title:
        axes[0].set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
