"""Command-line front end.

Exit codes: 0 certified result, 2 result computed but not certified
(step condition or Metzler check failed), 1 any error or failed check.
"""

import argparse
import copy
import json
import logging
import sys
import warnings

import numpy as np

from . import __version__, bounds, oracle
from .ctmc import row_sum_diagnostics, transition_bounds, validate_generator
from .errors import IvexpError, UnsoundWarning
from .intervals import IntervalMatrix, IntervalVector, set_norm
from .partition import Partition
from .problem import SCHEMA_VERSION, dump_report, load_problem
from .propagation import BoundReport, propagate

log = logging.getLogger("ivexp")

EXIT_OK, EXIT_ERROR, EXIT_UNSOUND = 0, 1, 2
DEFAULT_TOL = 1e-3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _resolve_steps(problem, args, m):
    """Command-line ``--steps``/``--tol`` win over the file; default tolerance 1e-3."""
    if getattr(args, "steps", None) is not None:
        return args.steps, None
    if getattr(args, "tol", None) is not None:
        return bounds.choose_steps(m, args.tol), args.tol
    if problem.steps is not None:
        return problem.steps, None
    tol = problem.tolerance if problem.tolerance is not None else DEFAULT_TOL
    return bounds.choose_steps(m, tol), tol


def _recorded_problem(problem, steps, tol):
    raw = copy.deepcopy(problem.raw)
    raw.pop("steps", None)
    raw.pop("tolerance", None)
    if tol is None:
        raw["steps"] = int(steps)
    else:
        raw["tolerance"] = float(tol)
    return raw


def _base_report(command, problem, rep, steps, tol):
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "ivexp",
        "version": __version__,
        "command": command,
        "problem": _recorded_problem(problem, steps, tol),
        "norm": rep.norm,
        "horizon": rep.horizon,
        "steps": int(steps),
        "params": rep.params.as_dict(),
        "radius": rep.radius,
        "sound": rep.sound,
        "lower": rep.lower.tolist(),
        "upper": rep.upper.tolist(),
    }


def _witness_list(witnesses):
    return [{"lower": a.tolist(), "upper": b.tolist()} for a, b in witnesses]


def _interval_matrix(problem):
    return IntervalMatrix.from_bounds(problem.lower, problem.upper,
                                      zero_row_sums=problem.zero_row_sums, extra=problem.extra)


def expm_bounds_report(problem, args):
    if problem.initial is None:
        raise IvexpError("expm-bounds needs an 'initial' interval vector in the problem file")
    q = _interval_matrix(problem)
    x0 = IntervalVector(*problem.initial)
    t = problem.horizon
    steps, tol = _resolve_steps(problem, args, t * set_norm(q))
    if t == 0:
        rep = BoundReport(lower=x0.lower.copy(), upper=x0.upper.copy(), radius=0.0,
                          params=bounds.BoundParams(N=steps, M=0.0), sound=True, horizon=0.0)
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UnsoundWarning)
            rep = propagate(q, x0, t, Partition.uniform(t, steps), witnesses=args.witnesses)
    out = _base_report("expm-bounds", problem, rep, steps, tol)
    if args.witnesses and rep.witnesses is not None:
        out["witnesses"] = _witness_list(rep.witnesses)
    return out, rep


def ctmc_report(problem, args):
    g = validate_generator(problem.lower, problem.upper, extra=problem.extra)
    t = problem.horizon
    steps, tol = _resolve_steps(problem, args, t * set_norm(g.base))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnsoundWarning)
        rep = transition_bounds(g, t, steps, witnesses=args.witnesses)
    sound = rep.sound and g.metzler
    rep.sound = sound
    out = _base_report("ctmc", problem, rep, steps, tol)
    out["metzler"] = g.metzler
    out["assembly"] = "columns: column j bounds P(t) e_j"
    out["row_sums"] = row_sum_diagnostics(rep)
    if args.witnesses and rep.witnesses:
        out["witnesses"] = [_witness_list(w) for w in rep.witnesses]
    return out, rep


def _fmt_matrix(m):
    m = np.atleast_2d(m)
    return "\n".join("  " + "  ".join(f"{v:8.4f}" for v in row) for row in m)


def _print_summary(out):
    print(f"{out['command']}  t={out['horizon']:g}  steps={out['steps']}  "
          f"radius={out['radius']:.6g} ({out['norm']}-norm)  sound={out['sound']}")
    lo, hi = np.array(out["lower"]), np.array(out["upper"])
    print("lower:")
    print(_fmt_matrix(lo if lo.ndim == 2 else lo[:, None]))
    print("upper:")
    print(_fmt_matrix(hi if hi.ndim == 2 else hi[:, None]))
    if "row_sums" in out:
        rs = out["row_sums"]
        print("row sums (lower / upper): "
              + ", ".join(f"{a:.4f}/{b:.4f}" for a, b in zip(rs["lower_row_sums"], rs["upper_row_sums"])))
    if not out["sound"]:
        print("WARNING: step condition or Metzler check failed; bounds are NOT a certified enclosure",
              file=sys.stderr)


def _finish(out, args):
    text = dump_report(out, args.out)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        _print_summary(out)
    return EXIT_OK if out["sound"] else EXIT_UNSOUND


def cmd_expm_bounds(args):
    out, _ = expm_bounds_report(load_problem(args.problem), args)
    return _finish(out, args)


def cmd_ctmc(args):
    out, _ = ctmc_report(load_problem(args.problem), args)
    return _finish(out, args)


def _report_from_file(path):
    with open(path) as f:
        data = json.load(f)
    return BoundReport(lower=np.array(data["lower"], dtype=float),
                       upper=np.array(data["upper"], dtype=float),
                       radius=float(data["radius"]), params=bounds.BoundParams(),
                       sound=bool(data["sound"]), horizon=float(data["horizon"]))


def cmd_verify(args):
    problem = load_problem(args.problem)
    args.witnesses = False
    if problem.zero_row_sums and problem.initial is None:
        q = validate_generator(problem.lower, problem.upper, extra=problem.extra).base
        computed = None if args.report else ctmc_report(problem, args)[1]
    else:
        q = _interval_matrix(problem)
        computed = None if args.report else expm_bounds_report(problem, args)[1]
    rep = _report_from_file(args.report) if args.report else computed
    if rep.horizon == 0:
        print("horizon 0: nothing to sample")
        return EXIT_OK
    samples = oracle.sample_many(q, np.eye(q.n)[0], rep.horizon, args.samples, args.seed,
                                 max_pieces=args.max_pieces)
    if rep.lower.ndim == 1:
        # vector bounds: push a random member of the initial interval through each sample
        il, iu = problem.initial
        rng = np.random.default_rng([args.seed, 2])
        for s in samples:
            s.endpoint = s.product @ rng.uniform(il, iu)
    res = oracle.check_domination(rep, samples, slack=args.slack)
    print(f"verify: {res.samples} samples, seed {args.seed}, radius {rep.radius:.6g}")
    print(f"  violations: {res.violations}  max excess: {res.max_excess:.3g}  "
          f"max tightness ratio: {res.max_tightness:.4f}")
    print(f"  closest approach to lower faces (fraction of width): {np.max(res.face_gaps['lower']):.4f}")
    print(f"  closest approach to upper faces (fraction of width): {np.max(res.face_gaps['upper']):.4f}")
    if not res.ok:
        return EXIT_ERROR
    return EXIT_OK if rep.sound else EXIT_UNSOUND


def brute_force_suite(count, seed):
    """Compare propagation with the brute-force envelope on random small instances.

    Returns the largest absolute endpoint difference seen.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    done = 0
    while done < count:
        n = int(rng.integers(2, 4))
        q = oracle.random_interval_matrix(rng, n, zero_row_sums=(n == 3 or rng.random() < 0.5),
                                          extra_ineq=rng.random() < 0.3)
        if max(len(oracle.row_vertices(r)) for r in q.rows) > 6:
            continue
        gaps = int(rng.integers(1, 5))
        if len(oracle.vertex_matrices(q)) ** gaps > 1_000_000:
            continue
        horizon = rng.uniform(0.05, 0.5)
        inner = np.sort(rng.uniform(0.0, horizon, gaps - 1))
        grid = Partition(np.concatenate([[0.0], inner, [horizon]]))
        x0 = rng.normal(size=n)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UnsoundWarning)
            rep = propagate(q, x0, horizon, grid)
        if not rep.sound:
            continue
        env = oracle.brute_force_envelope(q, x0, grid)
        worst = max(worst, float(np.max(np.abs(rep.lower - env.lower))),
                    float(np.max(np.abs(rep.upper - env.upper))))
        done += 1
    return worst


def cmd_selftest(args):
    failed = False
    print(f"{'kind':<14}{'trials':>8}{'violations':>12}{'max lhs/rhs':>14}")
    for i, kind in enumerate(bounds.KINDS):
        r = oracle.inequality_fuzz(kind, args.trials, args.seed + i)
        failed |= not r.ok
        print(f"{kind:<14}{r.trials:>8}{r.violations:>12}{r.max_ratio:>14.4f}")
    worst = brute_force_suite(args.instances, args.seed)
    ok = worst <= 1e-9
    failed |= not ok
    print(f"brute-force equivalence: {args.instances} instances, max difference {worst:.3g} "
          f"({'ok' if ok else 'FAIL'})")
    return EXIT_ERROR if failed else EXIT_OK


def build_parser():
    p = _Parser(prog="ivexp", description="Guaranteed bounds for x' = Q(t) x with Q(t) in an interval matrix.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_common(sp):
        sp.add_argument("problem", help="problem file (JSON)")
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--steps", type=int, help="number of uniform steps N")
        g.add_argument("--tol", type=float, help="target radius; N is chosen to meet it")
        sp.add_argument("--out", help="write the JSON report here ('-' for stdout)")
        sp.add_argument("--witnesses", action="store_true", help="record the extremal matrix of every step")

    sp = sub.add_parser("expm-bounds", help="bound e^{tQ} applied to the initial interval")
    add_common(sp)
    sp.set_defaults(func=cmd_expm_bounds)

    sp = sub.add_parser("ctmc", help="lower/upper transition matrices of an imprecise CTMC")
    add_common(sp)
    sp.set_defaults(func=cmd_ctmc)

    sp = sub.add_parser("verify", help="check bounds against sampled trajectories")
    add_common(sp)
    sp.add_argument("--samples", type=int, default=500)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-pieces", type=int, default=4)
    sp.add_argument("--slack", type=float, default=1e-9)
    sp.add_argument("--report", help="check this report's bounds instead of recomputing them")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("selftest", help="inequality fuzzing and brute-force equivalence battery")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--instances", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_selftest)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # --help/--version exit 0, usage errors exit 1
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (IvexpError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"ivexp: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
