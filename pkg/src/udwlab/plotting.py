"""PNG renderings of the CLI tables (optional; acceptance rests on the CSV content)."""

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

_STYLE = {"linewidth": 1.2}


def _new_figure():
    fig = Figure(figsize=(5.0, 3.4), dpi=150)
    FigureCanvasAgg(fig)
    return fig, fig.add_subplot(111)


def _save(fig, ax, path):
    ax.grid(alpha=0.3)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path)


def _column(rows, name):
    return [r[name] for r in rows]


def plot_fig1(rows, path):
    fig, ax = _new_figure()
    p = _column(rows, "p")
    ax.plot(p, _column(rows, "entropy_diff"), label="relative entropy difference", **_STYLE)
    ax.plot(p, _column(rows, "petz_bound"), "--", label="Petz bound", **_STYLE)
    ax.set_xlabel("p")
    ax.set_ylabel("bits")
    _save(fig, ax, path)


def plot_fig2(rows, path):
    fig, ax = _new_figure()
    for b in sorted({r["beta_omega"] for r in rows}):
        sub = [r for r in rows if r["beta_omega"] == b]
        line, = ax.plot(_column(sub, "p"), _column(sub, "entropy_diff"),
                        label=f"difference, beta Omega = {b:g}", **_STYLE)
        ax.plot(_column(sub, "p"), _column(sub, "bound"), "--", color=line.get_color(), **_STYLE)
    ax.set_xlabel("p")
    ax.set_ylabel("bits")
    _save(fig, ax, path)


def plot_fig3(rows, path):
    fig, ax = _new_figure()
    for m in sorted({r["mass"] for r in rows}):
        sub = [r for r in rows if r["mass"] == m]
        ax.plot(_column(sub, "temperature"), _column(sub, "S2_field"), label=f"m = {m:g}", **_STYLE)
    ax.set_xscale("log")
    ax.set_xlabel("temperature (units of 1/T)")
    ax.set_ylabel("Renyi-2 entropy of the field")
    _save(fig, ax, path)


def plot_sweep(rows, path):
    fig, ax = _new_figure()
    w = _column(rows, "W")
    for name in ("negativity", "decohering_power", "S2_field"):
        ax.plot(w, _column(rows, name), label=name, **_STYLE)
    if all(x > 0 for x in w):
        ax.set_xscale("log")
    ax.set_xlabel("W")
    _save(fig, ax, path)


PLOTTERS = {"fig1": plot_fig1, "fig2": plot_fig2, "fig3": plot_fig3, "sweep": plot_sweep}
