"""Command line entry point: ``latinmac <subcommand> [--config F] [--out DIR] [--seed S]``.

Exit codes: 0 success, 2 usage or configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import io
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analytic, latin
from .config import ExperimentConfig, load
from .errors import ConfigError, ConstructionUnsupported, InvalidArgument
from .scheduler import CHIM, DAIL, chim_build, dail_build, dump_schedule
from .simulator import (
    SUMMARY_COLUMNS,
    SUPERFRAME_COLUMNS,
    RunConfig,
    iterate,
    run_replication,
    summarize,
    summary_row,
    superframe_rows,
    write_csv,
)

log = logging.getLogger("latinmac")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3

ANALYTIC_COLUMNS = ("model", "param_set", "quantity", "value", "stderr")
COMPARE_COLUMNS = ("model", "param_set", "quantity", "analytic", "simulated", "gap", "stderr")


class _IOFailure(Exception):
    pass


def _config(args) -> ExperimentConfig:
    if args.config is None:
        cfg = ExperimentConfig()
    else:
        try:
            cfg = load(args.config)
        except OSError as exc:
            raise _IOFailure(f"cannot read config {args.config}: {exc}") from exc
    return cfg if args.seed is None else cfg.with_seed(args.seed)


def _write(out_dir: Path | None, name: str, text: str) -> None:
    if out_dir is None:
        return
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / name).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(f"cannot write {out_dir / name}: {exc}") from exc


def _csv(header, rows) -> str:
    buf = io.StringIO()
    write_csv(buf, header, rows)
    return buf.getvalue()


# -- gen-latin -------------------------------------------------------------------------

def cmd_gen_latin(K: int, out_path: Path | None) -> list[str]:
    """Dump every member of the order-``K`` family; returns the texts in order."""
    fam = latin.mols_family(K)
    texts = [latin.dumps(sq) for sq in fam]
    for a, text in enumerate(texts, 1):
        _write(out_path, f"square_{K}_{a}.txt", text)
    return texts


# -- dump-schedule ----------------------------------------------------------------------

def cmd_dump_schedule(cfg: ExperimentConfig) -> str:
    rc = cfg.grid()[0]
    if rc.scheme == DAIL:
        schedules, _ = dail_build(rc.n_wbans, rc.sensors, rc.channels, rc.seed, slots=rc.slots)
    elif rc.scheme == CHIM:
        schedules, _ = chim_build(rc.n_wbans, rc.sensors, rc.channels, rc.seed)
    else:
        raise ConfigError(f"dump-schedule supports DAIL and CHIM, not {rc.scheme}")
    return dump_schedule(schedules)


# -- simulate ---------------------------------------------------------------------------

def _replications(rc: RunConfig, jobs: int):
    if jobs <= 1 or rc.replications == 1:
        return [run_replication(rc, r) for r in range(rc.replications)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map keeps replication order whatever the completion order
        return list(pool.map(run_replication, [rc] * rc.replications, range(rc.replications)))


def cmd_simulate(cfg: ExperimentConfig, out_path: Path | None) -> tuple[str, str]:
    """Run the whole grid; returns (per-superframe CSV, summary CSV)."""
    frames, summaries = [], []
    for rc in cfg.grid():
        series = _replications(rc, cfg.jobs)
        frames.extend(superframe_rows(rc, series))
        summaries.append(summary_row(summarize(rc, [r for reps in series for r in reps])))
    per_sf = _csv(SUPERFRAME_COLUMNS, frames)
    summary = _csv(SUMMARY_COLUMNS, summaries)
    _write(out_path, "superframes.csv", per_sf)
    _write(out_path, "summary.csv", summary)
    return per_sf, summary


# -- analytic ---------------------------------------------------------------------------

def _pset(**kw) -> str:
    return ";".join(f"{k}={v}" for k, v in kw.items())


def cmd_analytic(cfg: ExperimentConfig) -> list[list]:
    """Closed-form values next to their Monte Carlo oracles for every neighbour count."""
    M, K = cfg.channels, cfg.sensors
    rows = []
    for i, O in enumerate(cfg.neighbours):
        seed = cfg.seed + i
        dp = analytic.DailModelParams(O, cfg.omega, M, K)
        ps = _pset(O=O, omega=cfg.omega, M=M, K=K, m=dp.m)
        rows.append(["DAIL", ps, "success_prob", analytic.dail_success_prob(dp), ""])
        if O <= dp.Z - 1:
            est, se = analytic.oracle_dail(dp, max(cfg.trials, 10_000), seed)
            rows.append(["DAIL", ps, "success_prob_oracle", est, se])
        for N in cfg.n_wbans:
            b = analytic.dail_throughput_bounds(O, N, M, K)
            pb = _pset(O=O, N=N, M=M, K=K)
            rows.append(["DAIL", pb, "t_min", b.t_min, ""])
            rows.append(["DAIL", pb, "t_max", b.t_max, ""])

        cp = analytic.ChimModelParams(O, cfg.alpha, M, K)
        Q = analytic.chim_q(cp, O, 0)
        pc = _pset(x=O, y=0, M=M, K=K)
        rows.append(["CHIM", pc, "q", Q, ""])
        est, se = analytic.oracle_chim_q(M, K, O, max(cfg.trials, 10_000), seed)
        rows.append(["CHIM", pc, "q_oracle", est, se])
        for t in range(min(K, 5) + 1):
            imb = analytic.chim_imb_pmf(K, Q, t)
            cfp = analytic.chim_cfp_pmf(K, Q, M, t)
            pt = _pset(x=O, y=0, M=M, K=K, t=t)
            rows.append(["CHIM", pt, "imb_pmf", imb, ""])
            rows.append(["CHIM", pt, "cfp_pmf", cfp, ""])
    return rows


# -- compare ----------------------------------------------------------------------------

def _in_range_counts(topo, same_slot: bool) -> np.ndarray:
    """``[w, i]``: foreign senders heard by coordinator ``w``.

    With ``same_slot`` only the foreign sensors with index ``i`` count
    (CHIM TDMA slots); otherwise every foreign sensor counts.
    """
    d2 = ((topo.sensors[None, :, :, :] - topo.coordinators[:, None, None, :]) ** 2).sum(axis=-1)
    near = d2 <= topo.interference_range ** 2  # near[w, w', j]
    own = np.arange(near.shape[0])
    near[own, own, :] = False
    if same_slot:
        return near.sum(axis=1)
    total = near.sum(axis=(1, 2))
    return np.repeat(total[:, None], near.shape[2], axis=1)


def _compare_point(rc: RunConfig, cfg: ExperimentConfig) -> list[list]:
    M, K = rc.channels, rc.sensors
    attempts = hits = 0
    expected = 0.0
    cache: dict[int, float] = {}
    if rc.scheme == DAIL:
        order = dail_build(rc.n_wbans, K, M, rc.seed, slots=rc.slots)[0][0].order
    for rep in range(rc.replications):
        for topo, rec in iterate(rc, rep, trace=True):
            if rc.scheme == DAIL:
                counts = _in_range_counts(topo, same_slot=False)
                events = [e for e in rec.trace if e[1] == "data"]
            else:
                counts = _in_range_counts(topo, same_slot=True)
                events = [e for e in rec.trace if e[1] == "tdma"]
            for _, _, w, i, _, _, collided, _ in events:
                O = int(counts[w, i])
                if O not in cache:
                    if rc.scheme == DAIL:
                        dp = analytic.DailModelParams(min(O, order * (order - 1) - 1), cfg.omega, M, order)
                        cache[O] = analytic.dail_success_prob(dp)
                    else:
                        cp = analytic.ChimModelParams(O, cfg.alpha, M, K)
                        cache[O] = 1.0 - analytic.chim_q(cp, O, 0)
                expected += cache[O]
                hits += not collided
                attempts += 1
    ps = _pset(N=rc.n_wbans, K=K, M=M, slots="auto" if rc.slots is None else rc.slots)
    sim = hits / attempts if attempts else 1.0
    ana = expected / attempts if attempts else 1.0
    se = math.sqrt(sim * (1.0 - sim) / attempts) if attempts else 0.0
    quantity = "success_prob" if rc.scheme == DAIL else "tdma_success_prob"
    rows = [[rc.scheme, ps, quantity, ana, sim, abs(ana - sim), se]]
    if rc.scheme == CHIM:
        # the ratio does not depend on Q; keep Q inside (0, 1) so the pmf is nonzero
        Q = min(max(1.0 - sim, 1e-6), 1.0 - 1e-6)
        ratio = analytic.chim_cfp_pmf(K, Q, M, 1) / analytic.chim_imb_pmf(K, Q, 1)
        mk = min(M, K)
        rows.append([rc.scheme, ps, "cfp_ratio_t1", float(mk), ratio, abs(mk - ratio), ""])
    return rows


def cmd_compare(cfg: ExperimentConfig) -> list[list]:
    rows = []
    for rc in cfg.grid():
        if rc.scheme not in (DAIL, CHIM):
            raise ConfigError(f"compare supports DAIL and CHIM, not {rc.scheme}")
        rows.extend(_compare_point(rc, cfg))
    return rows


# -- entry point ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="experiment config (key = value per line)")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--seed", type=int, help="override the config seed")

    p = argparse.ArgumentParser(prog="latinmac", description="Latin-rectangle MAC scheduling for coexisting WBANs")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    g = sub.add_parser("gen-latin", parents=[common], help="write the orthogonal family of a prime order")
    g.add_argument("order", type=int)
    sub.add_parser("dump-schedule", parents=[common], help="print per-sensor schedules")
    sub.add_parser("simulate", parents=[common], help="run the simulation grid and write CSVs")
    sub.add_parser("analytic", parents=[common], help="closed-form values and their oracles")
    sub.add_parser("compare", parents=[common], help="closed forms against simulated estimates")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    try:
        if args.command == "gen-latin":
            if args.seed is not None or args.config is not None:
                log.info("gen-latin ignores --config and --seed")
            texts = cmd_gen_latin(args.order, args.out)
            if args.out is None:
                sys.stdout.write("\n".join(texts))
            return EXIT_OK

        cfg = _config(args)
        if args.command == "dump-schedule":
            text = cmd_dump_schedule(cfg)
            _write(args.out, "schedule.txt", text)
            if args.out is None:
                sys.stdout.write(text)
        elif args.command == "simulate":
            grid = cfg.grid()
            print(f"seed={cfg.seed}")
            for rc in grid:
                print(f"grid scheme={rc.scheme} n_wbans={rc.n_wbans} slots={rc.slots or 'auto'} replications={rc.replications}")
            _, summary = cmd_simulate(cfg, args.out)
            if args.out is None:
                sys.stdout.write(summary)
        elif args.command == "analytic":
            text = _csv(ANALYTIC_COLUMNS, cmd_analytic(cfg))
            _write(args.out, "analytic.csv", text)
            sys.stdout.write(text)
        elif args.command == "compare":
            text = _csv(COMPARE_COLUMNS, cmd_compare(cfg))
            _write(args.out, "compare.csv", text)
            sys.stdout.write(text)
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, InvalidArgument, ConstructionUnsupported) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
