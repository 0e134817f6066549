"""Command-line entry point.

Each subcommand writes a CSV table (header row, ``repr`` floats, a trailing
``config_hash`` column) and a ``.meta.json`` sidecar next to it, then prints
a one-line summary. Failures go to stderr as a JSON object with a matching
exit status.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .atmosphere import oxygen_attn_sea_level, water_attn_sea_level
from .config import (ConfigError, ScenarioConfig, build_scenario, config_hash, design_space,
                     load_config)
from .errors import DomainError, InfeasibleError, NumericalError
from .geometry import elevation_angle, link_lengths
from .montecarlo import CU_HOP, UR_HOP, max_link_length, path_point_outage
from .optimizer import optimize, sweep_vs_flight_angle, sweep_vs_Ls

OUTPUT_DIR_ENV = "UAVRELAY_OUTPUT_DIR"

EXIT_OK, EXIT_VALIDATION, EXIT_INFEASIBLE, EXIT_NUMERICAL = 0, 2, 3, 4


@dataclasses.dataclass
class ResultRecord:
    command: str
    config_hash: str
    seed: int
    timestamp: str
    tool_version: str
    columns: List[str]
    rows: List[tuple]
    summary: Dict = dataclasses.field(default_factory=dict)

    def table_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(self.columns) + ["config_hash"])
        for r in self.rows:
            w.writerow([_fmt(v) for v in r] + [self.config_hash])
        return buf.getvalue()

    def metadata(self) -> Dict:
        return {
            "command": self.command,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "timestamp": self.timestamp,
            "tool_version": self.tool_version,
            "n_rows": len(self.rows),
            "summary": _jsonable(self.summary),
        }


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


# -- commands -----------------------------------------------------------------

def _arange(lo, hi, step):
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(n)]


def cmd_atmos_table(cfg):
    rows = []
    for f in _arange(cfg.atmos_f_min_ghz, cfg.atmos_f_max_ghz, cfg.atmos_f_step_ghz):
        ox = float(oxygen_attn_sea_level(f))
        wa = float(water_attn_sea_level(f, cfg.rho0_g_m3))
        rows.append((f, ox, wa, ox + wa))
    cols = ["f_ghz", "oxygen_db_km", "water_db_km", "total_db_km"]
    peak = max(rows, key=lambda r: r[3])
    return cols, rows, {"peak_f_ghz": peak[0], "peak_total_db_km": peak[3]}


def _curve(c):
    return list(c.columns), [tuple(r) for r in c.rows], dict(c.meta)


def cmd_sweep_ls(cfg):
    scn = build_scenario(cfg)
    grid = [x * 1000.0 for x in _arange(cfg.sweep_ls_min_km, cfg.sweep_ls_max_km,
                                        cfg.sweep_ls_step_km)]
    return _curve(sweep_vs_Ls(scn, grid))


def cmd_sweep_theta(cfg):
    scn = build_scenario(cfg)
    return _curve(sweep_vs_flight_angle(scn, M=cfg.path_points))


def cmd_outage_map(cfg):
    scn = build_scenario(cfg)
    sampler = scn.sampler()
    rows = []
    for L_sc_km in sorted(cfg.outage_map_l_sc_km):
        for H_km in sorted(cfg.outage_map_h_u_km):
            d = dataclasses.replace(scn.design, L_sc=L_sc_km * 1000.0, H_u=H_km * 1000.0)
            geom = scn.geometry(d)
            hop_s, hop_d = scn.hops(d)
            p0 = path_point_outage(geom, hop_s, hop_d, 0.0, scn.gamma_th, 0, 0, sampler=sampler)
            ppi = path_point_outage(geom, hop_s, hop_d, math.pi, scn.gamma_th, 0, 0,
                                    sampler=sampler)
            worst = max(p0.probability, ppi.probability)
            ok = d.H_u >= geom.H_u_min and worst < scn.p_out_tr
            rows.append((d.L_sc, d.H_u, geom.H_u_min, float(link_lengths(0.0, geom)[0]),
                         float(link_lengths(math.pi, geom)[1]), p0.probability,
                         ppi.probability, worst, int(ok)))
    cols = ["L_sc_m", "H_u_m", "H_u_min_m", "L_s_far_m", "L_d_far_m", "P_out_theta0",
            "P_out_thetapi", "P_out_worst", "feasible"]
    return cols, rows, {"n_feasible": sum(r[-1] for r in rows), "p_out_tr": scn.p_out_tr}


def cmd_max_length(cfg):
    scn = build_scenario(cfg)
    sampler = scn.sampler()
    hop_s, hop_d = scn.hops()
    atm = scn.atmosphere
    rows = []
    for name, hop, idx, ground in (("CU", hop_s, CU_HOP, atm.ground_height_s if atm else 0.0),
                                   ("UR", hop_d, UR_HOP, atm.ground_height_d if atm else 0.0)):
        height = scn.design.H_u - ground * 1000.0
        try:
            L = max_link_length(hop, scn.gamma_th, scn.p_out_tr, height, 0, 0, hop_index=idx,
                                L_max=scn.L_search_max, sampler=sampler)
            reachable = 1
        except InfeasibleError:
            L, reachable = 0.0, 0
        rows.append((name, height, L, reachable))
    cols = ["hop", "height_m", "L_max_m", "reachable"]
    return cols, rows, {"L_s_max_m": rows[0][2], "L_d_max_m": rows[1][2]}


def cmd_optimize(cfg):
    scn = build_scenario(cfg)
    res = optimize(design_space(cfg), scn, prune=cfg.prune)
    rows = []
    for rank, p in enumerate(res.ranked, 1):
        d = p.design
        rows.append((rank, d.n_sx, d.n_sy, d.n_dx, d.n_dy, d.n_usx, d.n_usy, d.n_udx, d.n_udy,
                     d.H_u, d.L_sc, p.avg_capacity.mean, p.avg_capacity.std_error,
                     p.worst_outage, p.L_s_max, p.L_d_max))
    cols = ["rank", "n_sx", "n_sy", "n_dx", "n_dy", "n_usx", "n_usy", "n_udx", "n_udy",
            "H_u_m", "L_sc_m", "C_e2e_avg", "C_e2e_avg_se", "P_out_worst", "L_s_max_m",
            "L_d_max_m"]
    pruned_by: Dict[str, int] = {}
    for p in res.pruned:
        pruned_by[p.pruned_by] = pruned_by.get(p.pruned_by, 0) + 1
    meta = {
        "best": res.best.design.as_dict(),
        "best_capacity": res.best.avg_capacity.mean,
        "n_evaluated": len(res.evaluated),
        "n_feasible": len(res.ranked),
        "pruned": pruned_by,
        "pruning_disabled": res.pruning_disabled,
        "notes": res.notes,
    }
    return cols, rows, meta


COMMANDS: Dict[str, Callable] = {
    "atmos-table": cmd_atmos_table,
    "sweep-ls": cmd_sweep_ls,
    "sweep-theta": cmd_sweep_theta,
    "outage-map": cmd_outage_map,
    "max-length": cmd_max_length,
    "optimize": cmd_optimize,
}


def run_command(cmd: str, cfg, out_path) -> ResultRecord:
    """Run one subcommand, write table and sidecar, and return the record."""
    columns, rows, summary = COMMANDS[cmd](cfg)
    rec = ResultRecord(
        command=cmd,
        config_hash=config_hash(cfg),
        seed=cfg.seed,
        timestamp=datetime.now(timezone.utc).isoformat(),
        tool_version=__version__,
        columns=list(columns),
        rows=list(rows),
        summary=summary,
    )
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(rec.table_text())
    meta_path(out_path).write_text(json.dumps(rec.metadata(), indent=2, sort_keys=True) + "\n")
    return rec


def meta_path(out_path) -> Path:
    out_path = Path(out_path)
    return out_path.with_name(out_path.stem + ".meta.json")


# -- argument handling --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML scenario file (defaults if omitted)")
    common.add_argument("--seed", type=int, help="master seed (overrides config)")
    common.add_argument("--samples", type=int, help="Monte Carlo samples per estimate")
    common.add_argument("--out", type=Path,
                        help=f"output CSV path (default: ${OUTPUT_DIR_ENV}/<command>.csv)")
    common.add_argument("--threads", type=int, help="worker threads, 0 = all cores")
    common.add_argument("--strict-truncation", action="store_true", default=None,
                        help="keep misalignment draws inside [0, pi/2)")
    common.add_argument("--no-prune", action="store_true",
                        help="disable the element-count pruning rule in optimize")

    p = argparse.ArgumentParser(prog="uavrelay",
                                description="UAV relay mmWave link simulator")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "atmos-table": "sea-level oxygen and water attenuation versus frequency",
        "sweep-ls": "hop and end-to-end capacity versus CN-UAV distance",
        "sweep-theta": "capacity and outage along the flight semicircle",
        "outage-map": "worst path outage over circle placement and altitude",
        "max-length": "longest CU and UR links meeting the outage target",
        "optimize": "constrained search over element counts and placement",
    }
    for name, h in helps.items():
        sub.add_parser(name, parents=[common], help=h)
    return p


def _apply_overrides(cfg, args):
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.samples is not None:
        changes["samples"] = args.samples
    if args.threads is not None:
        changes["threads"] = args.threads
    if args.strict_truncation:
        changes["strict_truncation"] = True
    if args.no_prune:
        changes["prune"] = False
    if not changes:
        return cfg
    from .config import config_from_dict, config_to_dict
    merged = config_to_dict(cfg)
    merged.update(changes)
    return config_from_dict(merged)


def _fail(status: int, exc: BaseException, **extra) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_status": status}
    details = getattr(exc, "details", None)
    if details:
        payload["details"] = _jsonable(details)
    payload.update(extra)
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else ScenarioConfig()
        cfg = _apply_overrides(cfg, args)
        out = args.out or Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / f"{args.command}.csv"
        rec = run_command(args.command, cfg, out)
    except ConfigError as e:
        return _fail(EXIT_VALIDATION, e, key=e.key, line=e.line)
    except (DomainError, FileNotFoundError) as e:
        return _fail(EXIT_VALIDATION, e)
    except InfeasibleError as e:
        return _fail(EXIT_INFEASIBLE, e)
    except (NumericalError, FloatingPointError) as e:
        return _fail(EXIT_NUMERICAL, e)
    brief = ", ".join(f"{k}={_short(v)}" for k, v in rec.summary.items()
                      if isinstance(v, (int, float)) and not isinstance(v, bool))
    print(f"{rec.command}: {len(rec.rows)} rows -> {out} [{rec.config_hash[:12]}] {brief}")
    return EXIT_OK


def _short(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


if __name__ == "__main__":
    sys.exit(main())
