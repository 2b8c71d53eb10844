"""Command-line entry point: ``python -m zetasections <command> ...``.

Exit codes: 0 success, 2 partial result (tracking loss), 1 error.
"""
from __future__ import annotations

import argparse
import csv
import inspect
import io
import logging
import shlex
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import atlas, figures
from .config import RunConfig
from .dh import dh_track_pair
from .rearranger import (auto_search, paper_rearrangement, run_avoidance_experiment)
from .sections import Rearrangement, SectionSpec
from .tracker import (BoundaryZeroError, PairTrajectory, TrackingLoss, count_zeros_region,
                      homotopy_section, locate_online_zeros, track_pair)

log = logging.getLogger("zetasections")

EXIT_OK, EXIT_ERROR, EXIT_PARTIAL = 0, 1, 2


def _pair(text: str) -> tuple[int, int]:
    a, b = (int(v) for v in text.split(","))
    return a, b


def _range(text: str) -> tuple[int, int]:
    a, b = (int(v) for v in text.split(","))
    if a > b:
        raise argparse.ArgumentTypeError("range must be lo,hi with lo <= hi")
    return a, b


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output directory (default: config output_dir)")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("--tol", type=float, help="absolute tolerance (abs_eps)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="zetasections", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("figure", parents=[common], help="emit figure data as CSV")
    f.add_argument("ids", nargs="+", help="fig1..fig11 or 'all'")

    def pair_args(q, family=True):
        q.add_argument("--pair", type=_pair, required=True, help="n,n+1")
        if family:
            q.add_argument("--family", choices=("classical", "accelerated", "dh"),
                           default="accelerated")
        q.add_argument("--N-max", dest="N_max", type=int, required=True)
        q.add_argument("--rearrangement", help="rearrangement JSON file")

    t = sub.add_parser("track", parents=[common], help="track a pair of zeros")
    pair_args(t)
    t.add_argument("--N-start", dest="N_start", type=int)

    s = sub.add_parser("scan", parents=[common], help="zeros of one section in a t-range")
    s.add_argument("--t-lo", dest="t_lo", type=float, required=True)
    s.add_argument("--t-hi", dest="t_hi", type=float, required=True)
    s.add_argument("--family", choices=("classical", "accelerated"), default="classical")
    s.add_argument("--N", type=int, required=True)

    a = sub.add_parser("atlas", parents=[common], help="predicted zero ladders")
    a.add_argument("--kind", choices=("fl", "bk", "gram", "dh"), default="fl")
    a.add_argument("--range", dest="rng", type=_range, required=True)
    a.add_argument("--k", type=int, default=1)

    g = sub.add_parser("gram", parents=[common], help="Gram's law signs")
    g.add_argument("--range", dest="rng", type=_range, required=True)

    v = sub.add_parser("avoid", parents=[common], help="collision avoidance experiment")
    pair_args(v)
    v.add_argument("--builtin", choices=("R_classical", "R_accelerated"),
                   help="use one of the built-in rearrangements")
    v.add_argument("--auto", action="store_true", help="search interval reversals")

    d = sub.add_parser("dh-track", parents=[common], help="track a DH pair")
    pair_args(d, family=False)
    d.add_argument("--N-start", dest="N_start", type=int, default=0)
    return p


def _outdir(args, cfg: RunConfig) -> Path:
    out = Path(args.out or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str) -> None:
    path.write_text(text)
    log.info("wrote %s", path)


def _command_line(argv) -> str:
    return "zetasections " + " ".join(shlex.quote(a) for a in argv)


def _load_rearrangement(path):
    return None if path is None else Rearrangement.from_json(Path(path))


def _run_figure(name, cfg, out, command):
    fn = figures.FIGURES[name]
    kw = {"config": cfg.tracker} if "config" in inspect.signature(fn).parameters else {}
    partial = False
    for data in fn(**kw):
        _write(out / f"{data.name}.csv", data.to_csv(command))
        partial |= data.partial
    return partial


def cmd_figure(args, cfg, out, command) -> int:
    ids = list(figures.FIGURES) if args.ids == ["all"] else args.ids
    for name in ids:
        if name not in figures.FIGURES:
            raise ValueError(f"unknown figure {name!r}")
    if cfg.worker_count > 1 and len(ids) > 1:
        with ProcessPoolExecutor(cfg.worker_count) as pool:
            flags = list(pool.map(_run_figure, ids, [cfg] * len(ids), [out] * len(ids),
                                  [command] * len(ids)))
    else:
        flags = [_run_figure(name, cfg, out, command) for name in ids]
    return EXIT_PARTIAL if any(flags) else EXIT_OK


def _emit_trajectory(traj: PairTrajectory, out: Path, command: str) -> int:
    stem = f"pair_{traj.pair[0]}_{traj.pair[1]}_{traj.family}"
    if traj.rearrangement is not None:
        stem += "_rearranged"
    comment = command + ("" if traj.status == "complete" else f" [PARTIAL: {traj.message}]")
    _write(out / f"{stem}.csv", traj.to_csv(comment))
    _write(out / f"{stem}.events.json", traj.events_json() + "\n")
    return EXIT_OK if traj.status == "complete" else EXIT_PARTIAL


def cmd_track(args, cfg, out, command) -> int:
    traj = track_pair(args.pair, args.family, args.N_max,
                      rearrangement=_load_rearrangement(args.rearrangement),
                      N_start=args.N_start, config=cfg.tracker, on_loss="partial")
    return _emit_trajectory(traj, out, command)


def cmd_dh_track(args, cfg, out, command) -> int:
    traj = dh_track_pair(args.pair, (args.N_start, args.N_max),
                         rearrangement=_load_rearrangement(args.rearrangement),
                         config=cfg.tracker, on_loss="partial")
    return _emit_trajectory(traj, out, command)


def scan_rows(t_lo: float, t_hi: float, family: str, N: int, tol: float = 1e-12):
    """One row per unit box in t: on-line zeros, argument-principle count, discrepancy."""
    spec = SectionSpec(family, N)
    sec = homotopy_section(spec, 0.0)
    rows = []
    lo = t_lo
    while lo < t_hi:
        hi = min(lo + 1.0, t_hi)
        total = None
        for shift in (0.0, 1e-3, 2e-3, 3e-3):
            # a zero on an edge: nudge the edge shared with the next box
            top = hi if hi == t_hi else hi + shift
            try:
                total = count_zeros_region(sec, (-1.0, 2.0, lo, top))
                break
            except BoundaryZeroError:
                if hi == t_hi and lo == t_lo:
                    lo += 1e-3
                continue
        hi = top
        online = locate_online_zeros(sec, lo, hi, xtol=tol)
        rows.append((lo, hi, len(online), total, int(total is None or total != len(online)),
                     " ".join(f"{z.t:.12f}" for z in online)))
        lo = hi
    return rows


def cmd_scan(args, cfg, out, command) -> int:
    if args.t_lo < 10:
        raise ValueError("scan needs t_lo >= 10")
    buf = io.StringIO()
    buf.write(f"# {command}\n# t in units of the imaginary part; counts over sigma in [-1, 2]\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t_lo", "t_hi", "online", "box_count", "discrepancy", "zeros"])
    for row in scan_rows(args.t_lo, args.t_hi, args.family, args.N, cfg.abs_eps):
        w.writerow(row)
    _write(out / f"scan_{args.family}_N{args.N}.csv", buf.getvalue())
    return EXIT_OK


def cmd_atlas(args, cfg, out, command) -> int:
    lo, hi = args.rng
    rows = atlas.ladder(args.kind, range(lo, hi + 1), args.k)
    _write(out / f"atlas_{args.kind}.csv", atlas.ladder_csv(rows, command))
    return EXIT_OK


def cmd_gram(args, cfg, out, command) -> int:
    lo, hi = args.rng
    buf = io.StringIO()
    buf.write(f"# {command}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "g_n", "signed_Z", "holds"])
    for n in range(lo, hi + 1):
        r = atlas.gram_law_check(n)
        w.writerow([r.n, repr(r.g), repr(r.value), int(r.holds)])
    _write(out / "gram.csv", buf.getvalue())
    return EXIT_OK


def cmd_avoid(args, cfg, out, command) -> int:
    if args.auto:
        rep = auto_search(args.pair, args.family, args.N_max, config=cfg.tracker)
    else:
        if args.builtin:
            R = paper_rearrangement(args.builtin)
        elif args.rearrangement:
            R = _load_rearrangement(args.rearrangement)
        else:
            raise ValueError("avoid needs --auto, --builtin or --rearrangement")
        rep = run_avoidance_experiment(args.pair, args.family, args.N_max, R, config=cfg.tracker)
    stem = f"avoid_{args.pair[0]}_{args.pair[1]}_{args.family}"
    _write(out / f"{stem}.json", rep.to_json() + "\n")
    rep.rearrangement.to_json(out / f"{stem}.rearrangement.json")
    print(f"verdict: {rep.verdict} ({len(rep.baseline_events)} -> {len(rep.rearranged_events)} events)")
    return EXIT_OK if rep.status == "complete" else EXIT_PARTIAL


COMMANDS = {"figure": cmd_figure, "track": cmd_track, "scan": cmd_scan, "atlas": cmd_atlas,
            "gram": cmd_gram, "avoid": cmd_avoid, "dh-track": cmd_dh_track}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig.load(args.config, worker_count=args.workers, abs_eps=args.tol)
        out = _outdir(args, cfg)
        return COMMANDS[args.command](args, cfg, out, _command_line(argv))
    except TrackingLoss as exc:
        print(f"tracking loss: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    except Exception as exc:  # noqa: BLE001 - surface every failure as exit code 1
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
