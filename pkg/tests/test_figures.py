import csv
import io

import numpy as np
import pytest

from zetasections.atlas import gram_point
from zetasections.figures import FIGURES, figure


def table(data):
    lines = [l for l in data.to_csv().splitlines() if not l.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_registry():
    assert list(FIGURES) == [f"fig{i}" for i in range(1, 12)]
    with pytest.raises(ValueError):
        figure("fig0")


def test_fig3_columns_and_range():
    (d,) = figure("fig3")
    rows = table(d)
    assert float(rows[0]["t"]) == 0.0 and float(rows[-1]["t"]) == 50.0
    # ζ_1 = (1 + χ)/2 vanishes near 14.52, ζ near 14.13
    t = np.array([float(r["t"]) for r in rows])
    z = np.array([float(r["ln_abs_zeta"]) for r in rows])
    z1 = np.array([float(r["ln_abs_zeta1"]) for r in rows])
    assert abs(t[np.argmin(np.where(t < 16, z, np.inf))] - 14.13) <= 0.05
    assert abs(t[np.argmin(np.where(t < 16, z1, np.inf))] - 14.52) <= 0.05


def test_fig4_header():
    (d,) = figure("fig4")
    assert d.columns == ["t", "ln_abs_B3"]
    assert len(d.rows) == 3001


@pytest.mark.parametrize("name,Ns,crossings", [("fig5", (8, 9), (2, 0)),
                                               ("fig6", (22, 23), (0, 2))])
def test_fig5_fig6_sign_changes(name, Ns, crossings):
    (d,) = figure(name)
    rows = table(d)
    for N, expect in zip(Ns, crossings):
        z = np.array([float(r[f"Z_N{N}"]) for r in rows])
        assert int(np.sum(np.signbit(z[1:]) != np.signbit(z[:-1]))) == expect


def test_fig7_crosses_the_gram_point():
    (d,) = figure("fig7")
    rows = table(d)
    g = gram_point(126)
    assert all(float(r["gram_point"]) == g for r in rows)
    side = [float(r["t_N"]) < g for r in rows]
    assert side[0] and not side[-1]


def test_to_csv_with_command():
    (d,) = figure("fig4", t_max=1.0)
    text = d.to_csv("zetasections figure fig4")
    assert text.splitlines()[:2] == ["# fig4: ln|B~_3(1/2+it)|, t in [0, 1]",
                                     "# command: zetasections figure fig4"]
