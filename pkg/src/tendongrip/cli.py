"""Command-line front end.

Every subcommand writes CSV or JSON, to ``--out`` (atomically) or stdout.
Exit codes: 0 success, 2 usage, 3 invalid input, 4 simulation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from . import benchmark, energy, geometry, grasp, modes
from .errors import (
    ConfigParseError,
    DomainError,
    GripperError,
    ModeError,
    RangeError,
    ValidationError,
)
from .io import atomic_write_text, csv_text, json_text
from .types import ROLES, FingerRole, GraspMode, load_hand

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_SIM = 0, 2, 3, 4
_INVALID = (ConfigParseError, ValidationError, DomainError, RangeError, ModeError)
ENERGY_HEADER = ("q1", "q2", "L_total", "E")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(json.dumps({"error": "UsageError", "message": message}) + "\n")
        sys.exit(EXIT_USAGE)


def _role(text: str) -> FingerRole:
    for r in ROLES:
        if text in (r.value, r.name):
            return r
    if text in ("A", "B"):
        return FingerRole(f"{text}_left")
    raise argparse.ArgumentTypeError(f"unknown finger {text!r}")


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 2:
        raise argparse.ArgumentTypeError("must be >= 2")
    return n


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--hand", default="default", help="hand design JSON, or 'default'")
    shared.add_argument("--out", default=None, help="output file (stdout when omitted)")
    shared.add_argument("--seed", type=int, default=0, help="seed for randomised checks")

    p = _Parser(prog="tendongrip", description="Tendon-driven hand analysis tools.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("energy-map", parents=[shared], help="energy and tendon length over the joint box")
    s.add_argument("--n", type=_positive_int, default=200)
    s.add_argument("--finger", type=_role, default=FingerRole.A_LEFT)

    s = sub.add_parser("contour", parents=[shared], help="one level set of total tendon length")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--target", type=float, help="total tendon length, mm")
    g.add_argument("--retraction", type=float, help="tendon pulled from rest, mm")
    s.add_argument("--resolution", type=_positive_int, default=200)
    s.add_argument("--finger", type=_role, default=FingerRole.A_LEFT)

    s = sub.add_parser("trajectory", parents=[shared], help="least-energy closing path")
    s.add_argument("--steps", type=_positive_int, default=100)
    s.add_argument("--finger", type=_role, default=FingerRole.A_LEFT)

    s = sub.add_parser("bistability", parents=[shared], help="search contours for two energy basins")
    s.add_argument("--steps", type=int, default=50)
    s.add_argument("--finger", type=_role, default=FingerRole.A_LEFT)

    s = sub.add_parser("mode-group", parents=[shared], help="finger motion groups in a mode")
    s.add_argument("--mode", default="precision", choices=[m.value for m in GraspMode])

    s = sub.add_parser("meeting-height", parents=[shared], help="fingertip meeting height per power mode")
    s.add_argument("--mode", default=None, choices=["cylindrical", "spherical"])

    s = sub.add_parser("grasp", parents=[shared], help="simulate closing on an object")
    s.add_argument("--scenario", required=True)
    s.add_argument("--mode", default=None, choices=[m.value for m in GraspMode])
    s.add_argument("--step", type=float, default=None, help="tendon step, mm")

    s = sub.add_parser("score", parents=[shared], help="score a benchmark trial log")
    s.add_argument("--trials", required=True)
    s.add_argument("--weights", default="default")
    s.add_argument("--markdown", default=None, help="also write the grid as markdown here")
    return p


# --------------------------------------------------------------------------
# subcommands, each returning the output text

def _energy_rows(design, q1, q2):
    L = energy.total_tendon_length(design, q1, q2)
    E = energy.energy_array(design, q1, q2)
    return zip(q1.ravel().tolist(), q2.ravel().tolist(), L.ravel().tolist(), E.ravel().tolist())


def cmd_energy_map(args, hand) -> str:
    grid = energy.energy_grid(hand.finger(args.finger), args.n, args.n)
    rows = (
        (s.state.q1, s.state.q2, s.total_tendon_length, s.elastic_energy) for s in grid.samples()
    )
    return csv_text(ENERGY_HEADER, rows)


def cmd_contour(args, hand) -> str:
    import numpy as np

    design = hand.finger(args.finger)
    lmin, lmax = energy.tendon_range(design)
    target = args.target if args.target is not None else lmax - args.retraction
    c = energy.contour(design, target, args.resolution)
    q = np.array([s.as_tuple() for s in c.samples])
    return csv_text(ENERGY_HEADER, _energy_rows(design, q[:, 0], q[:, 1]))


def cmd_trajectory(args, hand) -> str:
    design = hand.finger(args.finger)
    traj = energy.min_energy_trajectory(design, args.steps)
    rows = (
        (p.retracted_tendon, p.state.q1, p.state.q2,
         energy.total_tendon_length(design, p.state.q1, p.state.q2), p.elastic_energy)
        for p in traj
    )
    return csv_text(("retraction",) + ENERGY_HEADER, rows)


def cmd_bistability(args, hand) -> str:
    rep = energy.detect_bistability(hand.finger(args.finger), args.steps)
    return json_text({
        "finger": args.finger.value,
        "bistable": rep.bistable,
        "degenerate": rep.degenerate,
        "target_total_tendon_length": rep.target_total_tendon_length,
        "barrier_epsilon": rep.barrier_epsilon,
        "basins": [{"q1": s.q1, "q2": s.q2} for s in rep.basins],
        "basin_counts": list(rep.basin_counts),
    })


def cmd_mode_group(args, hand) -> str:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        summary = modes.hand_motion_summary(geometry.configure_mode(hand, args.mode))
    summary = {"mode": args.mode, **summary, "warnings": sorted({str(w.message) for w in caught})}
    return json_text(summary)


def cmd_meeting_height(args, hand) -> str:
    chosen = [args.mode] if args.mode else ["cylindrical", "spherical"]
    return json_text({m: geometry.meeting_height(hand, m) for m in chosen})


def cmd_grasp(args, hand) -> str:
    scenario = grasp.load_scenario(args.scenario)
    if args.hand != "default":
        scenario = grasp.GraspScenario(hand, scenario.mode, scenario.object_spec, scenario.offset, scenario.step)
    outcome = scenario.run(args.mode, args.step)
    return json_text(outcome.to_dict())


def cmd_score(args, hand) -> str:
    weights = benchmark.load_weights(args.weights)
    ycb, soft = benchmark.load_trials(args.trials)
    if args.markdown:
        atomic_write_text(args.markdown, benchmark.markdown_grid(benchmark.score_ycb(ycb, weights), weights))
    return json_text(benchmark.score_log(ycb, soft, weights))


COMMANDS = {
    "energy-map": cmd_energy_map,
    "contour": cmd_contour,
    "trajectory": cmd_trajectory,
    "bistability": cmd_bistability,
    "mode-group": cmd_mode_group,
    "meeting-height": cmd_meeting_height,
    "grasp": cmd_grasp,
    "score": cmd_score,
}


def _fail(code: int, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
    return code


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        hand = load_hand(args.hand)
        text = COMMANDS[args.command](args, hand)
    except _INVALID as exc:
        return _fail(EXIT_INVALID, exc)
    except GripperError as exc:
        return _fail(EXIT_SIM, exc)
    except (ValueError, ArithmeticError) as exc:
        # numeric failures deep in the solvers
        return _fail(EXIT_SIM, exc)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
