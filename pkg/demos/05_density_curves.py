"""
Densities and their asymptotics
===============================

Writes fig3.csv (whole matrix) and fig4.csv (one KLT block) next to this
script, and plots them if matplotlib is around.
"""

from pathlib import Path

from tropint.analytics import density_table, klt_density_table, rows_to_csv, super_catalan

here = Path(__file__).parent
fig3 = density_table(5, 19)
fig4 = klt_density_table(7, 30)
(here / "fig3.csv").write_text(rows_to_csv(fig3))
(here / "fig4.csv").write_text(rows_to_csv(fig4))

for r in fig3:
    print(f"{r.n:3d} {float(r.density):.3e} {r.asymptote:.3e}")

print([super_catalan(r) for r in range(1, 12)])

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    for ax, rows in zip(axes, (fig3, fig4)):
        ax.semilogy([r.n for r in rows], [float(r.density) for r in rows], "o", label="exact")
        ax.semilogy([r.n for r in rows], [r.asymptote for r in rows], "-", label="asymptote")
        ax.set_xlabel("n")
        ax.legend()
    fig.tight_layout()
    fig.savefig(here / "densities.png", dpi=120)
