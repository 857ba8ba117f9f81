"""Command-line front end.

Subcommands cover classification, bilinear and FPK computation, symmetry
verification and composition, group closure, and the dynamics
experiments.  Spinors and matrices are read inline as JSON (arguments
starting with '[' or '{') or from a file path; the named shortcuts
identity, gamma0..gamma3, gamma5 (optionally '-'-prefixed) are accepted
where a matrix is expected.

Exit codes: 0 on success, 2 when a computation ran but the checked
property failed (not a symmetry, closure not reached, tolerance
exceeded), 1 on usage or input errors.  Identical flags and seed produce
byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import dynamics, serialize, symmetry
from .algebra import SpinorForgeError
from .bilinear import bilinears, fpk_residuals, is_fierz_aggregate
from .lounesto import (
    EXACT,
    ClassifierConfig,
    LounestoClass,
    classify_report,
    sample_class,
)

MODE_ENV_VAR = "SPINOR_FORGE_MODE"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we reserve that
        raise _UsageError(message)


def _default_mode() -> str:
    mode = os.environ.get(MODE_ENV_VAR, "exact").lower()
    return mode if mode in ("exact", "float") else "exact"


def _load_json_arg(text: str):
    text = text.strip()
    if text.startswith("[") or text.startswith("{"):
        return json.loads(text)
    with open(text) as fh:
        return json.load(fh)


_NAMED_MATRICES = {
    "identity",
    "gamma0",
    "gamma1",
    "gamma2",
    "gamma3",
    "gamma5",
    "parity",
}


def _parse_candidate(text: str, mode: str, antilinear: bool = False):
    name = text.strip()
    base = name[1:] if name.startswith("-") else name
    if base in _NAMED_MATRICES:
        cand = symmetry.named_candidate(name, mode)
        if antilinear:
            cand = symmetry.SymmetryCandidate(cand.matrix, True, cand.label)
        return cand
    data = _load_json_arg(text)
    if isinstance(data, dict):
        cand = serialize.candidate_from_json(data)
        if antilinear and not cand.antilinear:
            cand = symmetry.SymmetryCandidate(cand.matrix, True, cand.label)
        return cand
    return symmetry.SymmetryCandidate(serialize.matrix_from_json(data), antilinear)


def _parse_spinor(text: str, mode: str):
    data = _load_json_arg(text)
    if isinstance(data, dict) and "spinor" in data:
        data = data["spinor"]
    return serialize.spinor_from_json(data, mode)


def _emit(args, payload: dict | str) -> None:
    if isinstance(payload, dict):
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        text = payload
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit_trajectory(args, rows, summary: dict) -> None:
    """Trajectory CSV plus JSON summary for the dynamics commands.

    With --out the CSV goes to the file and the summary to stdout; without
    it, --format picks which of the two goes to stdout.
    """
    csv_text = _csv_text(("t", "rho", "ln_rho", "divergence"), rows)
    summary_text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv_text)
        sys.stdout.write(summary_text)
    elif args.format == "csv":
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write(summary_text)


def _add_common(sub, mode=True, tol=True, seed=False, n=False):
    sub.add_argument("--out", help="write output to this path instead of stdout")
    sub.add_argument(
        "--format", choices=("json", "csv"), default="json", help="output format"
    )
    if mode:
        sub.add_argument(
            "--mode",
            choices=("exact", "float"),
            default=_default_mode(),
            help=f"scalar mode (default from ${MODE_ENV_VAR} or exact)",
        )
    if tol:
        sub.add_argument("--tol", type=float, default=1e-9, help="float-mode tolerance")
    if seed:
        sub.add_argument("--seed", type=int, default=0)
    if n:
        sub.add_argument("--n", type=int, default=100)


def build_parser() -> _Parser:
    parser = _Parser(prog="spinor-forge", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("classify", help="Lounesto class of a spinor")
    p.add_argument("--spinor", required=True)
    _add_common(p)

    p = subs.add_parser("bilinears", help="all bilinear observables of a spinor")
    p.add_argument("--spinor", required=True)
    _add_common(p)

    p = subs.add_parser("fpk", help="FPK residuals of a spinor or raw aggregate")
    p.add_argument("--spinor")
    p.add_argument("--aggregate", help="JSON BilinearSet to test instead of a spinor")
    _add_common(p)

    p = subs.add_parser("sample", help="draw exact spinors of a given class")
    p.add_argument("--class", dest="lounesto_class", type=int, required=True)
    _add_common(p, mode=False, tol=False, seed=True, n=True)

    p = subs.add_parser("symmetry-check", help="sector transforms plus sampled class preservation")
    p.add_argument("--matrix", required=True)
    p.add_argument("--antilinear", action="store_true")
    p.add_argument("--class", dest="lounesto_class", type=int, required=True)
    _add_common(p, seed=True, n=True)

    p = subs.add_parser("symmetry-compose", help="compose two candidates")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    _add_common(p)

    p = subs.add_parser("symmetry-invert", help="invert a candidate")
    p.add_argument("--matrix", required=True)
    _add_common(p)

    p = subs.add_parser("group-check", help="closure of a finite generating set")
    p.add_argument(
        "--generators",
        required=True,
        help="comma-separated named matrices, or a JSON list of candidates",
    )
    p.add_argument("--max-word-len", type=int, default=4)
    _add_common(p)

    p = subs.add_parser("evolve", help="massless incompressibility experiment")
    p.add_argument("--momentum", default="1,0,0,1", help="p0,p1,p2,p3 (null)")
    p.add_argument("--phi", default="identity", help="'identity' or 'random:<seed>'")
    p.add_argument("--n-points", type=int, default=100)
    p.add_argument("--h", type=float, default=dynamics.DEFAULT_DIVERGENCE_STEP)
    p.add_argument("--t-span", default="0,1")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--liouville-tol", type=float, default=1e-6)
    p.add_argument("--plot", help="optional path for a rho(t) line chart")
    _add_common(p, mode=False, tol=False, seed=True)

    p = subs.add_parser("exotic-evolve", help="density growth under a theta term")
    p.add_argument("--kappa", type=float, default=0.0)
    p.add_argument("--kvec", default="0,0,0")
    p.add_argument("--rho0", type=float, default=1.0)
    p.add_argument("--momentum", default="1,0,0,1")
    p.add_argument("--t-span", default="0,1")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--rate-tol", type=float, default=1e-4)
    p.add_argument("--plot", help="optional path for a rho(t) line chart")
    _add_common(p, mode=False, tol=False, seed=True)

    return parser


def _floats(text: str):
    return [float(v) for v in text.split(",")]


def _cmd_classify(args) -> int:
    psi = _parse_spinor(args.spinor, args.mode)
    cfg = EXACT if args.mode == "exact" else ClassifierConfig("float", args.tol)
    report = classify_report(psi, cfg)
    _emit(
        args,
        {
            "class": int(report.lounesto_class),
            "singular": report.singular,
            "pattern": report.pattern,
            "bilinears": serialize.bilinear_set_to_json(report.bilinear_set),
            "mode": cfg.mode,
        },
    )
    return 0


def _cmd_bilinears(args) -> int:
    psi = _parse_spinor(args.spinor, args.mode)
    _emit(args, serialize.bilinear_set_to_json(bilinears(psi)))
    return 0


def _cmd_fpk(args) -> int:
    if (args.spinor is None) == (args.aggregate is None):
        raise _UsageError("fpk needs exactly one of --spinor / --aggregate")
    if args.spinor is not None:
        bset = bilinears(_parse_spinor(args.spinor, args.mode))
    else:
        bset = serialize.bilinear_set_from_json(_load_json_arg(args.aggregate))
    res = fpk_residuals(bset)
    tol = 0.0 if bset.mode == "exact" else args.tol
    ok = is_fierz_aggregate(bset, tol)
    _emit(
        args,
        {
            "max_residual": serialize._real_to_json(res.max_abs),
            "r1": [[serialize._real_to_json(v) for v in row] for row in res.r1],
            "r2a": serialize._real_to_json(res.r2a),
            "r2b": serialize._real_to_json(res.r2b),
            "r3": serialize._real_to_json(res.r3),
            "is_fierz_aggregate": ok,
            "mode": bset.mode,
        },
    )
    return 0 if ok else 2


def _cmd_sample(args) -> int:
    cls = LounestoClass(args.lounesto_class)
    spinors = [sample_class(cls, args.seed + k) for k in range(args.n)]
    if args.format == "csv":
        rows = []
        for psi in spinors:
            row = []
            for c in psi.components:
                row.extend([str(c.re), str(c.im)])
            rows.append(row)
        header = [f"{part}{i}" for i in range(4) for part in ("re", "im")]
        _emit(args, _csv_text(header, rows))
    else:
        _emit(
            args,
            {
                "class": int(cls),
                "seed": args.seed,
                "spinors": [serialize.spinor_to_json(psi) for psi in spinors],
            },
        )
    return 0


def _cmd_symmetry_check(args) -> int:
    cand = _parse_candidate(args.matrix, args.mode, args.antilinear)
    payload: dict = {"candidate": serialize.candidate_to_json(cand)}
    try:
        bmap = symmetry.beta_extract(cand, tol=args.tol)
    except symmetry.NotASymmetry as exc:
        payload["not_a_symmetry"] = {"kernel": exc.label, "leaks": exc.leaks}
        payload["passed"] = False
        _emit(args, payload)
        return 2
    payload["beta_map"] = serialize.beta_map_to_json(bmap)
    if cand.is_invertible():
        lemma = symmetry.verify_rescaling_lemma(cand, tol=args.tol)
        payload["rescaling"] = {
            "alpha": serialize._real_to_json(lemma.alpha),
            "beta": serialize._real_to_json(lemma.beta),
            "holds": lemma.holds,
            "determinant_consistent": lemma.determinant_consistent,
        }
    report = symmetry.preserves_class(
        cand, args.lounesto_class, n=args.n, seed=args.seed
    )
    payload["preservation"] = report.as_dict()
    payload["passed"] = report.passed
    _emit(args, payload)
    return 0 if report.passed else 2


def _cmd_symmetry_compose(args) -> int:
    left = _parse_candidate(args.left, args.mode)
    right = _parse_candidate(args.right, args.mode)
    composed = symmetry.compose(left, right)
    payload = {"candidate": serialize.candidate_to_json(composed)}
    try:
        payload["beta_map"] = serialize.beta_map_to_json(
            symmetry.beta_extract(composed, tol=args.tol)
        )
    except symmetry.NotASymmetry as exc:
        payload["not_a_symmetry"] = {"kernel": exc.label, "leaks": exc.leaks}
    _emit(args, payload)
    return 0


def _cmd_symmetry_invert(args) -> int:
    cand = _parse_candidate(args.matrix, args.mode)
    inv = symmetry.inverse(cand)
    payload = {"candidate": serialize.candidate_to_json(inv)}
    try:
        payload["beta_map"] = serialize.beta_map_to_json(
            symmetry.beta_extract(inv, tol=args.tol)
        )
    except symmetry.NotASymmetry as exc:
        payload["not_a_symmetry"] = {"kernel": exc.label, "leaks": exc.leaks}
    _emit(args, payload)
    return 0


def _cmd_group_check(args) -> int:
    text = args.generators.strip()
    if text.startswith("["):
        gens = [serialize.candidate_from_json(d) for d in json.loads(text)]
    else:
        gens = [
            symmetry.named_candidate(name.strip(), args.mode)
            for name in text.split(",")
            if name.strip()
        ]
    report = symmetry.group_closure(gens, max_word_len=args.max_word_len, tol=args.tol)
    _emit(args, report.as_dict())
    return 0 if report.closed else 2


def _parse_phi(text: str) -> dynamics.AvatarMap:
    text = text.strip()
    if text == "identity":
        return dynamics.AvatarMap.identity()
    if text.startswith("random:"):
        return dynamics.AvatarMap.random_commutant(int(text.split(":", 1)[1]))
    data = _load_json_arg(text)
    return dynamics.AvatarMap(serialize.matrix_from_json(data, "float").to_numpy())


def _cmd_evolve(args) -> int:
    p = _floats(args.momentum)
    t_span = tuple(_floats(args.t_span))
    phi = _parse_phi(args.phi)
    report = dynamics.liouville_check(
        p,
        phi=phi,
        n_points=args.n_points,
        h=args.h,
        seed=args.seed,
        tol=args.liouville_tol,
        t_span=t_span,
        dt=args.dt,
    )
    times, rhos, lnrhos, divs = report.trajectory
    rows = dynamics.trajectory_rows(times, rhos, lnrhos, divs)
    if args.plot:
        dynamics.plot_density(args.plot, times, rhos)
    _emit_trajectory(args, rows, {"summary": report.as_dict(), "trajectory_points": len(rows)})
    return 0 if report.passed else 2


def _cmd_exotic_evolve(args) -> int:
    theta = dynamics.ExoticTheta.linear(args.kappa, _floats(args.kvec))
    report = dynamics.exotic_density_check(
        theta,
        rho0=args.rho0,
        t_span=tuple(_floats(args.t_span)),
        dt=args.dt,
        p=_floats(args.momentum),
        tol=args.rate_tol,
        seed=args.seed,
    )
    rows = dynamics.trajectory_rows(
        report.times, report.rho, report.ln_rho, report.divergence
    )
    if args.plot:
        dynamics.plot_density(args.plot, report.times, report.rho)
    _emit_trajectory(args, rows, report.as_dict())
    return 0 if report.passed else 2


_COMMANDS = {
    "classify": _cmd_classify,
    "bilinears": _cmd_bilinears,
    "fpk": _cmd_fpk,
    "sample": _cmd_sample,
    "symmetry-check": _cmd_symmetry_check,
    "symmetry-compose": _cmd_symmetry_compose,
    "symmetry-invert": _cmd_symmetry_invert,
    "group-check": _cmd_group_check,
    "evolve": _cmd_evolve,
    "exotic-evolve": _cmd_exotic_evolve,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (json.JSONDecodeError, OSError, KeyError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except SpinorForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
