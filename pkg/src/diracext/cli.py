"""Command line front end.

Potential flags are the coefficients of V = (nu + mu beta - i lam alpha.x beta) / |x|,
so the attractive Coulomb potential -0.95/|x| is ``--nu -0.95``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

from . import __version__
from .channels import PotentialParams, classify_all, classify_channel, enumerate_index_set
from .errors import DiracExtError, InvalidParameters
from .extensions import distinguished_extension, distinguished_row, relation_to_unitary, theta_row
from .inequalities import DEFAULT_KS, run_corpus
from .jsonio import SCHEMA_VERSION, dumps
from .radial_ode import DEFAULT_R0, Tolerances, eigenvalues_in_gap


@dataclass(frozen=True)
class RunConfig:
    params: PotentialParams
    output_format: str = "json"
    out: str | None = None
    options: dict = field(default_factory=dict)


def _pair(text: str, cast=float) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated values, got {text!r}")
    try:
        return tuple(cast(p.strip()) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _complex_pair(text: str):
    return _pair(text, lambda s: complex(s.replace("i", "j")))


def _positive(text: str) -> float:
    val = float(text)
    if not val > 0 or not math.isfinite(val):
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return val


def _positive_int(text: str) -> int:
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return val


def _nonzero_int(text: str) -> int:
    val = int(text)
    if val == 0:
        raise argparse.ArgumentTypeError("k must be a nonzero integer")
    return val


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("potential")
    g.add_argument("--nu", type=float, default=0.0, help="coefficient of I/|x| (negative = attractive)")
    g.add_argument("--mu", type=float, default=0.0, help="coefficient of beta/|x|")
    g.add_argument("--lambda", dest="lam", type=float, default=0.0, help="coefficient of -i alpha.x beta/|x|^2")
    g.add_argument("--mass", type=float, default=1.0)
    o = common.add_argument_group("output")
    o.add_argument("--format", choices=("json", "csv", "pretty"), default="json")
    o.add_argument("--out", help="write to this file instead of standard output")

    parser = argparse.ArgumentParser(prog="diracext", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("classify", parents=[common], help="regimes per k, d and the index set")
    sub.add_parser("distinguished", parents=[common], help="(A, B) and U of the distinguished extension")

    sp = sub.add_parser("spectrum", parents=[common], help="eigenvalues of one channel in the gap")
    sp.add_argument("--k", type=_nonzero_int, required=True)
    rel = sp.add_mutually_exclusive_group()
    rel.add_argument("--relation", type=_complex_pair, metavar="A,B", help="row of a G+ = b G-")
    rel.add_argument("--theta", type=float, help="row (cos theta, sin theta)")
    rel.add_argument("--distinguished", action="store_true", help="row of the distinguished extension")
    sp.add_argument("--window", type=_pair, metavar="LO,HI", help="energy window inside [-m, m]")
    sp.add_argument("--max-count", type=_positive_int)
    sp.add_argument("--r0", type=_positive, default=DEFAULT_R0)
    sp.add_argument("--rinf", type=_positive, help="minimum outer radius of the eigenfunction grid")
    sp.add_argument("--abs-tol", type=_positive, default=Tolerances.abs_tol)
    sp.add_argument("--rel-tol", type=_positive, default=Tolerances.rel_tol)

    vi = sub.add_parser("verify-inequalities", parents=[common], help="Hardy-type inequalities on a seeded corpus")
    vi.add_argument("--trials", type=_positive_int, default=100)
    vi.add_argument("--seed", type=int, default=0)
    vi.add_argument("--summary", action="store_true", help="omit per-draw records from JSON")
    return parser


def _params(ns) -> PotentialParams:
    return PotentialParams(ns.nu, ns.mu, ns.lam, ns.mass)


def _envelope(command: str, cfg: RunConfig, **body) -> dict:
    return {"schema": SCHEMA_VERSION, "command": command, "params": cfg.params.to_dict(), **body}


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format(x, ".17g") if isinstance(x, float) else x for x in row])
    return buf.getvalue()


# -- commands -----------------------------------------------------------------


def cmd_classify(cfg: RunConfig) -> tuple[dict, int]:
    p = cfg.params
    table = classify_all(p)
    order = enumerate_index_set(p)
    report = _envelope(
        "classify",
        cfg,
        sup_norm=p.sup_norm,
        channels=[c.to_dict() for c in table],
        d=order.d,
        index_set=order.to_dict(),
    )
    if order.d == 0:
        report["note"] = "essentially self-adjoint"
    return report, 0


def cmd_distinguished(cfg: RunConfig) -> tuple[dict, int]:
    rel = distinguished_extension(cfg.params)
    up = relation_to_unitary(rel)
    return _envelope("distinguished", cfg, relation=rel.to_dict(), unitary=up.to_dict()), 0


def _spectrum_row(cfg: RunConfig, k: int):
    o = cfg.options
    if o.get("relation") is not None:
        return o["relation"]
    if o.get("theta") is not None:
        return theta_row(o["theta"])
    if not classify_channel(cfg.params, k).regime.has_boundary_data:
        # nothing to choose: the channel has a single self-adjoint realization
        return None
    if o.get("distinguished"):
        return distinguished_row(cfg.params, k)
    raise InvalidParameters(f"channel k={k} needs --relation, --theta or --distinguished")


def cmd_spectrum(cfg: RunConfig) -> tuple[dict, int]:
    o = cfg.options
    k = o["k"]
    row = _spectrum_row(cfg, k)
    tol = Tolerances(o["abs_tol"], o["rel_tol"])
    res = eigenvalues_in_gap(
        cfg.params, k, row, o.get("window"), o.get("max_count"), tol=tol, r0=o["r0"], r_inf=o.get("rinf")
    )
    window = o.get("window") or (-cfg.params.mass, cfg.params.mass)
    return _envelope("spectrum", cfg, tolerances=tol.to_dict(), window=list(window), result=res.to_dict()), 0


def cmd_verify_inequalities(cfg: RunConfig) -> tuple[dict, int]:
    o = cfg.options
    rep = run_corpus(o["trials"], o["seed"], DEFAULT_KS, cfg.params)
    body = rep.to_dict(include_draws=not o.get("summary"))
    body.pop("params", None)
    return _envelope("verify-inequalities", cfg, report=body), 0 if rep.ok else 1


COMMANDS = {
    "classify": cmd_classify,
    "distinguished": cmd_distinguished,
    "spectrum": cmd_spectrum,
    "verify-inequalities": cmd_verify_inequalities,
}


# -- rendering ----------------------------------------------------------------


def _render_csv(report: dict) -> str:
    cmd = report["command"]
    if cmd == "classify":
        return _csv(((c["k"], c["delta"], c["gamma"], c["regime"]) for c in report["channels"]), ["k", "delta", "gamma", "regime"])
    if cmd == "distinguished":
        rel = report["relation"]
        rows = []
        for i, ch in enumerate(rel["channels"]["entries"]):
            a, b = rel["A"][i][i], rel["B"][i][i]
            rows.append((i, ch["twice_j"], ch["twice_mj"], ch["k"], a[0], a[1], b[0], b[1]))
        return _csv(rows, ["index", "twice_j", "twice_mj", "k", "re_a", "im_a", "re_b", "im_b"])
    if cmd == "spectrum":
        res = report["result"]
        rows = zip(range(len(res["eigenvalues"])), res["eigenvalues"], res["errors"], res["match_defects"], res["relation_residuals"])
        return _csv(([i, e, err, d, "" if r is None else r] for i, e, err, d, r in rows), ["index", "energy", "error", "match_defect", "relation_residual"])
    draws = report["report"].get("draws", [])
    return _csv(
        ((d["check"], d["k"], d["draw"], d["R"], d["lhs"], d["rhs"], d["margin"], d["error"], d["status"]) for d in draws),
        ["check", "k", "draw", "R", "lhs", "rhs", "margin", "error", "status"],
    )


def _render_pretty(report: dict) -> str:
    cmd = report["command"]
    p = report["params"]
    lines = [f"{cmd}: nu={p['nu']:g} mu={p['mu']:g} lambda={p['lambda']:g} m={p['mass']:g}"]
    if cmd == "classify":
        lines.append(f"{'k':>4} {'delta':>14} {'gamma':>12}  regime")
        for c in report["channels"]:
            lines.append(f"{c['k']:>4} {c['delta']:>14.8g} {c['gamma']:>12.8g}  {c['regime']}")
        lines.append(f"d = {report['d']}" + (f"  ({report['note']})" if "note" in report else ""))
        for e in report["index_set"]["entries"]:
            lines.append(f"  (j={e['twice_j']}/2, m_j={e['twice_mj']}/2, k={e['k']})")
    elif cmd == "distinguished":
        rel = report["relation"]
        for i, ch in enumerate(rel["channels"]["entries"]):
            a, b = rel["A"][i][i][0], rel["B"][i][i][0]
            lines.append(f"  k={ch['k']:>3} m_j={ch['twice_mj']:>3}/2:  {a:.12g} G+ = {b:.12g} G-")
    elif cmd == "spectrum":
        res = report["result"]
        lines.append(f"k={res['k']} regime={res['regime']} row={res['relation_row']}")
        if not res["eigenvalues"]:
            lines.append("  no eigenvalues in window")
        for e, err in zip(res["eigenvalues"], res["errors"]):
            lines.append(f"  E = {e:.15g}  (+- {err:.1e})")
    else:
        rep = report["report"]
        lines.append(f"trials={rep['trials']} seed={rep['seed']} ok={rep['ok']} violations={rep['violations']} noise={rep['noise']}")
        for name, m in rep["minima"].items():
            lines.append(f"  {name:<28} min relative margin {m['min_relative_margin']:.6g}")
        if rep["sharpness"]:
            ratios = ", ".join(f"{r:.6g}" for r in rep["sharpness"]["ratios"])
            lines.append(f"  sharpness ratios: {ratios}")
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(report) + "\n"
    if fmt == "csv":
        return _render_csv(report)
    return _render_pretty(report)


def _error_line(exc: BaseException) -> str:
    msg = " ".join(str(exc).split())
    return json.dumps({"error": type(exc).__name__, "exit_code": getattr(exc, "exit_code", 1), "message": msg})


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    options = {k: v for k, v in vars(ns).items() if k not in {"nu", "mu", "lam", "mass", "format", "out", "command"}}
    try:
        cfg = RunConfig(_params(ns), ns.format, ns.out, options)
        report, code = COMMANDS[ns.command](cfg)
    except DiracExtError as exc:
        print(_error_line(exc), file=sys.stderr)
        return exc.exit_code
    text = render(report, cfg.output_format)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
