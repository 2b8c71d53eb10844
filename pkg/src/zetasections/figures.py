"""Data series behind each figure, as CSV tables."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .atlas import gram_point, zeta_zeros_between
from .rearranger import paper_rearrangement
from .sections import Section, SectionSpec, accel_b_term, partial_sum_sequence
from .special import zeta_reference
from .tracker import PairTrajectory, TrackerConfig, track_pair


@dataclass
class FigureData:
    name: str
    title: str
    columns: list
    rows: list = field(default_factory=list)
    partial: bool = False

    def to_csv(self, command: str | None = None) -> str:
        buf = io.StringIO()
        buf.write(f"# {self.name}: {self.title}\n")
        if command:
            buf.write(f"# command: {command}\n")
        if self.partial:
            buf.write("# PARTIAL: tracking was lost before the last N\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue()


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _ln_abs(values) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(values))


def _zeta_line(t: np.ndarray) -> np.ndarray:
    return np.array([zeta_reference(complex(0.5, v)) for v in t])


def fig1(t: float = 17500.0, N_max: int = 5000) -> list[FigureData]:
    s = complex(0.5, t)
    seq = partial_sum_sequence("classical_raw", N_max, s)
    ref = math.log(abs(zeta_reference(s)))
    rows = [(n, v, ref) for n, v in zip(range(1, N_max + 1), _ln_abs(seq))]
    return [FigureData("fig1", f"ln|S_N(1/2+{t:g}i)| for N = 1..{N_max}, with ln|zeta| (dimensionless)",
                       ["N", "ln_abs_S_N", "ln_abs_zeta"], rows)]


def fig2(t: float = 1200.0, N_max: int = 600) -> list[FigureData]:
    s = complex(0.5, t)
    acc = _ln_abs(partial_sum_sequence("accelerated_raw", N_max, s))
    cla = _ln_abs(partial_sum_sequence("classical_raw", N_max, s))
    ref = math.log(abs(zeta_reference(s)))
    # accelerated sums are indexed from 0; align both on N = 1..N_max
    rows = [(n, acc[n], cla[n - 1], ref) for n in range(1, N_max + 1)]
    return [FigureData("fig2", f"ln|S~_N| and ln|S_N| at s = 1/2+{t:g}i, N = 1..{N_max}",
                       ["N", "ln_abs_S_accel", "ln_abs_S", "ln_abs_zeta"], rows)]


def fig3(t_max: float = 50.0, step: float = 0.05) -> list[FigureData]:
    t = np.round(np.arange(0.0, t_max + step / 2, step), 10)
    z1 = Section("classical", np.ones(1))(0.5 + 1j * t)
    rows = list(zip(t, _ln_abs(_zeta_line(t)), _ln_abs(z1)))
    return [FigureData("fig3", "ln|zeta(1/2+it)| and ln|zeta_1(1/2+it)|, t in [0, 50]",
                       ["t", "ln_abs_zeta", "ln_abs_zeta1"], rows)]


def fig4(t_max: float = 150.0, step: float = 0.05) -> list[FigureData]:
    t = np.round(np.arange(0.0, t_max + step / 2, step), 10)
    rows = list(zip(t, _ln_abs(accel_b_term(3, 0.5 + 1j * t))))
    return [FigureData("fig4", f"ln|B~_3(1/2+it)|, t in [0, {t_max:g}]", ["t", "ln_abs_B3"], rows)]


def _section_panels(name, Ns, t_lo=86.0, t_hi=90.0, step=0.005):
    t = np.round(np.arange(t_lo, t_hi + step / 2, step), 10)
    cols, series = ["t", "ln_abs_zeta"], [_ln_abs(_zeta_line(t))]
    for N in Ns:
        sec = Section.from_spec(SectionSpec("accelerated", N))
        cols += [f"ln_abs_N{N}", f"Z_N{N}"]
        series += [_ln_abs(sec(0.5 + 1j * t)), sec.rotated(t)]
    rows = list(zip(t, *series))
    title = f"ln|zeta~_N(1/2+it)| and the rotated real section Z_N, N in {Ns}, t in [{t_lo:g}, {t_hi:g}]"
    return [FigureData(name, title, cols, rows)]


def fig5() -> list[FigureData]:
    return _section_panels("fig5", (8, 9))


def fig6() -> list[FigureData]:
    return _section_panels("fig6", (22, 23))


def fig7(label: int = 127, N_max: int = 89, config: TrackerConfig = TrackerConfig()):
    # label 127 in the fl numbering is the zero that starts just below g_126
    traj = track_pair((label, label + 1), "accelerated", N_max, config=config, on_loss="partial")
    g = gram_point(label - 1)
    rows = [(s.N, s.lo.t, g) for s in traj.samples if s.t_param == 0.0]
    return [FigureData("fig7", f"ordinate of tracked zero (label {label}) of zeta~_N and "
                               f"Gram point g_{label - 1}, N <= {N_max}",
                       ["N", "t_N", "gram_point"], rows, traj.status != "complete")]


def _pair_panel(name, traj: PairTrajectory, refs) -> FigureData:
    cols = ["N", "sigma_lo", "t_lo", "sigma_hi", "t_hi"] + [f"ref_{i}" for i in range(len(refs))]
    rows = [(s.N, s.lo.sigma, s.lo.t, s.hi.sigma, s.hi.t, *refs)
            for s in traj.samples if s.t_param == 0.0]
    title = (f"pair {traj.pair[0]}/{traj.pair[1]}, {traj.family} sections"
             + (", rearranged" if traj.rearrangement is not None else "")
             + (", ref columns: zeta zeros" if refs else ""))
    return FigureData(name, title, cols, rows, traj.status != "complete")


def _zeta_refs(traj: PairTrajectory):
    f = traj.final()
    zs = zeta_zeros_between(min(f.lo.t, f.hi.t) - 0.5, max(f.lo.t, f.hi.t) + 0.5)
    return [min(zs, key=lambda z: abs(z - f.lo.t)), min(zs, key=lambda z: abs(z - f.hi.t))]


def _pair_figure(name, pair, N_max, rearrangements=(None, None), config=TrackerConfig()):
    out = []
    for suffix, fam, R in (("a", "classical", rearrangements[0]),
                           ("b", "accelerated", rearrangements[1])):
        traj = track_pair(pair, fam, N_max, rearrangement=R, config=config, on_loss="partial")
        out.append(_pair_panel(name + suffix, traj, _zeta_refs(traj)))
    return out


def fig8(config: TrackerConfig = TrackerConfig()):
    return _pair_figure("fig8", (132, 133), 150, config=config)


def fig9(config: TrackerConfig = TrackerConfig()):
    return _pair_figure("fig9", (725, 726), 300, config=config)


def fig10(config: TrackerConfig = TrackerConfig()):
    Rs = (paper_rearrangement("R_classical"), paper_rearrangement("R_accelerated"))
    return _pair_figure("fig10", (725, 726), 300, Rs, config)


def fig11(config: TrackerConfig = TrackerConfig()):
    traj = track_pair((44, 45), "dh", 200, config=config, on_loss="partial")
    return [_pair_panel("fig11", traj, [])]


FIGURES = {f"fig{i}": fn for i, fn in enumerate(
    (fig1, fig2, fig3, fig4, fig5, fig6, fig7, fig8, fig9, fig10, fig11), start=1)}


def figure(name: str, **kwargs) -> list[FigureData]:
    try:
        fn = FIGURES[name]
    except KeyError:
        raise ValueError(f"unknown figure {name!r}; choose from {list(FIGURES)}")
    return fn(**kwargs)
