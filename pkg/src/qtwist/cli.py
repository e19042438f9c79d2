"""Command-line front end.

Subcommands: regions, sweep, tomo, discriminate, optics-check. Report
commands write delimited output (CSV/JSON) plus a rendered PNG figure next
to it (suppress with --no-plot). All outputs are deterministic for fixed
flags and seed; files are written atomically.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
import tempfile

import numpy as np

from . import circuit, logic, optics, tomography

SNAPSHOT_NAMES = ("input", "post_u", "I", "II", "III")
BASIS_LABELS = ("00", "01", "10", "11")

_PI_RE = re.compile(r"^(\d+(?:\.\d+)?)?\s*\*?\s*pi(?:\s*/\s*(\d+(?:\.\d+)?))?$")


def parse_theta(text: str) -> float:
    """Radians, with 'pi' literals: 'pi', 'pi/4', '3pi/4', '0.25*pi'."""
    s = text.strip().lower().replace(" ", "")
    m = _PI_RE.match(s)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * np.pi / den
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}") from None


def parse_grid(text: str) -> list:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must be start:stop:n, got {text!r}")
    start, stop = parse_theta(parts[0]), parse_theta(parts[1])
    try:
        n = int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid count {parts[2]!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("grid needs at least one point")
    return [float(t) for t in np.linspace(start, stop, n)]


def default_seed() -> int:
    return int(os.environ.get("TWISTED_SEED", "0"))


def _round12(x: float) -> float:
    return float(format(float(x), ".12g"))


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def matrix_schema(m: np.ndarray) -> dict:
    return {
        "dim": int(m.shape[0]),
        "re": [[_round12(v) for v in row] for row in m.real],
        "im": [[_round12(v) for v in row] for row in m.imag],
    }


def matrix_from_schema(doc: dict) -> np.ndarray:
    return np.array(doc["re"], dtype=float) + 1j * np.array(doc["im"], dtype=float)


def atomic_write_text(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".qtwist-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------- regions

def cmd_regions(args) -> int:
    states = circuit.evolve_regions_sign(args.sign, args.theta)
    snapshots = {}
    for name in SNAPSHOT_NAMES:
        vec = states.by_name(name)
        snapshots[name] = {
            "amplitudes_re": [_round12(v) for v in vec.real],
            "amplitudes_im": [_round12(v) for v in vec.imag],
            "probabilities": [_round12(abs(v) ** 2) for v in vec],
            "rho_th": matrix_schema(tomography.rho_from_state(vec)),
        }
    if args.format == "json":
        doc = {"sign": args.sign, "theta": _round12(args.theta),
               "basis_order": list(BASIS_LABELS), "regions": snapshots}
        atomic_write_text(args.out, json.dumps(doc, indent=2) + "\n")
    else:
        lines = ["region,state,re,im,prob"]
        for name in SNAPSHOT_NAMES:
            snap = snapshots[name]
            for k, label in enumerate(BASIS_LABELS):
                lines.append(",".join([
                    name, label,
                    _fmt(snap["amplitudes_re"][k]),
                    _fmt(snap["amplitudes_im"][k]),
                    _fmt(snap["probabilities"][k]),
                ]))
        atomic_write_text(args.out, "\n".join(lines) + "\n")
        rho_doc = {name: snapshots[name]["rho_th"] for name in SNAPSHOT_NAMES}
        atomic_write_text(args.out + ".rho.json",
                          json.dumps(rho_doc, indent=2) + "\n")
    return 0


# ---------------------------------------------------------------- sweep

def cmd_sweep(args) -> int:
    a_star = circuit.trigger_outcome(args.sign)
    comparisons = logic.compare_predictions(args.sign, args.grid)
    rows = []
    for c in comparisons:
        rows.append({
            "theta": c.theta,
            "p00": c.quantum.p00, "p01": c.quantum.p01,
            "p10": c.quantum.p10, "p11": c.quantum.p11,
            "p_trigger1_cl": c.classical.table.prob(a_star, 1),
            "p_trigger0_cl": c.classical.table.prob(a_star, 0),
            "divergence": c.divergence,
        })
    header = ["theta", "p00", "p01", "p10", "p11",
              "p_trigger1_cl", "p_trigger0_cl", "divergence"]
    if args.format == "json":
        doc = [{k: _round12(r[k]) for k in header} for r in rows]
        atomic_write_text(args.out, json.dumps(doc, indent=2) + "\n")
    else:
        lines = [",".join(header)]
        lines += [",".join(_fmt(r[k]) for k in header) for r in rows]
        atomic_write_text(args.out, "\n".join(lines) + "\n")
    if not args.no_plot:
        from . import plots
        plot_rows = [(r["theta"],
                      r[f"p{a_star}1"], r[f"p{a_star}0"],
                      r["p_trigger1_cl"], r["p_trigger0_cl"],
                      r["divergence"]) for r in rows]
        plots.render_sweep(_stem(args.out) + ".png", args.sign, plot_rows)
    return 0


# ---------------------------------------------------------------- tomo

def cmd_tomo(args) -> int:
    states = circuit.evolve_regions_sign(args.sign, args.theta)
    target = tomography.rho_from_state(states.by_name(args.region))
    settings = tomography.setting_grid()
    records = tomography.simulate_counts(target, settings, args.shots,
                                         args.seed, args.noise)
    counts_path = args.out + ".counts.csv"
    tomography.write_counts_csv(counts_path + ".tmp", records)
    os.replace(counts_path + ".tmp", counts_path)
    result = tomography.mle_reconstruct(records, target=target)
    rho_doc = matrix_schema(result.rho)
    rho_doc["iterations"] = result.iterations
    rho_doc["converged"] = result.converged
    rho_doc["fidelity"] = _round12(result.fidelity_vs_target)
    atomic_write_text(args.out + ".rho.json", json.dumps(rho_doc, indent=2) + "\n")
    if not args.no_plot:
        from . import plots
        title = f"reconstructed rho, region {args.region}, sign {args.sign}"
        plots.render_density_matrix(_stem(args.out) + ".png", result.rho, title,
                                    result.fidelity_vs_target)
    print(f"fidelity={_fmt(result.fidelity_vs_target)}")
    return 0


# ---------------------------------------------------------------- reports

def cmd_discriminate(args) -> int:
    rep = logic.discrimination_analysis(args.theta)
    print(f"theta={_fmt(rep.theta)}")
    print(f"p_b0_plus={_fmt(rep.p_b0_plus)}")
    print(f"p_b0_minus={_fmt(rep.p_b0_minus)}")
    print(f"p_a1_given_b0_plus={_fmt(rep.p_a1_given_b0_plus)}")
    print(f"p_a0_given_b0_minus={_fmt(rep.p_a0_given_b0_minus)}")
    print(f"rule_success={_fmt(rep.rule_success)}")
    print(f"helstrom={_fmt(rep.helstrom)}")
    print(f"rule_within_bound={'yes' if rep.rule_within_bound else 'no'}")
    return 0


def cmd_optics_check(args) -> int:
    states = circuit.evolve_regions_sign(args.sign, args.theta)
    configs = [("I", False, False), ("II", True, False), ("III", True, True)]
    ok = True
    for region, with_h, with_g in configs:
        out = optics.assemble_setup(args.sign, with_h, with_g, args.theta,
                                    hwp_had_angle=args.hwp_h_angle)
        overlap = abs(np.vdot(states.by_name(region), out.state)) ** 2
        passed = overlap >= 1.0 - 1e-9
        ok = ok and passed
        print(f"region {region}: overlap={_fmt(overlap)} "
              f"{'PASS' if passed else 'FAIL'}")
    return 0 if ok else 1


# ---------------------------------------------------------------- parser

def _stem(path: str) -> str:
    root, ext = os.path.splitext(path)
    return root if ext.lower() in (".csv", ".json") else path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtwist",
        description="Two-qubit deduction-chain circuit: simulation, "
                    "inference analysis, tomography, and optics model.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_sign(p):
        p.add_argument("--sign", choices=["+", "-"], default="+",
                       help="initial unitary branch (default: +)")

    p = sub.add_parser("regions", help="write all circuit snapshots")
    add_sign(p)
    p.add_argument("--theta", type=parse_theta, default=np.pi / 2)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("sweep", help="quantum vs classical curves over theta")
    add_sign(p)
    p.add_argument("--grid", type=parse_grid, default=parse_grid("0:pi/2:101"))
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--no-plot", action="store_true",
                   help="skip the PNG figure next to the output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tomo", help="simulate counts and reconstruct")
    add_sign(p)
    p.add_argument("--region", choices=["I", "II", "III"], default="III")
    p.add_argument("--theta", type=parse_theta, default=np.pi / 2)
    p.add_argument("--shots", type=int, default=100000)
    p.add_argument("--seed", type=int, default=default_seed())
    p.add_argument("--noise", type=float, default=0.0,
                   help="depolarizing strength in [0, 1]")
    p.add_argument("--out", required=True,
                   help="output stem: writes <out>.counts.csv, <out>.rho.json")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_tomo)

    p = sub.add_parser("discriminate", help="discrimination-rule report")
    p.add_argument("--theta", type=parse_theta, default=np.pi / 2)
    p.set_defaults(func=cmd_discriminate)

    p = sub.add_parser("optics-check",
                       help="compare the optics model to the circuit")
    add_sign(p)
    p.add_argument("--theta", type=parse_theta, default=np.pi / 2)
    p.add_argument("--hwp-h-angle", type=parse_theta,
                   default=optics.HWP_HAD_ANGLE,
                   help="override the A-side plate angle (negative control)")
    p.set_defaults(func=cmd_optics_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "shots", 1) < 1:
        print("error: --shots must be >= 1", file=sys.stderr)
        return 2
    if not 0.0 <= getattr(args, "noise", 0.0) <= 1.0:
        print("error: --noise must be in [0, 1]", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
