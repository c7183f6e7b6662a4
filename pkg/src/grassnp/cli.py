"""Command-line entry point: ``grassnp <subcommand> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage or I/O error,
3 feature-gated functionality that is switched off.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction

from . import reductions as red
from .conversions import ConversionError, convert
from .graphs import GraphError, generate, load_graph
from .manifolds import ManifoldError, point_from_json_dict, point_to_json_dict
from .poly import PolyError, SparsePoly
from .schur_horn import SimplexError, lift_diagonal
from .solvers import SolverError, multistart_rgd, solve_closed_form
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GATED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# -- file helpers ------------------------------------------------------------------

def dumps(data):
    return json.dumps(data, indent=2, allow_nan=False) + "\n"


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc


def _emit(args, data):
    text = dumps(data)
    if getattr(args, "out", None):
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _distinct_paths(*paths):
    given = [os.path.abspath(p) for p in paths if p]
    if len(given) != len(set(given)):
        raise UsageError("input and output paths must be distinct")


def _read_matrix(path):
    data = read_json(path)
    rows = data.get("matrix") if isinstance(data, dict) else data
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise UsageError(f"{path}: expected a JSON list of rows or {{\"matrix\": [...]}}")
    try:
        return [[Fraction(str(x)) for x in r] for r in rows]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"{path}: bad matrix entry ({exc})") from exc


def _read_poly(path):
    return SparsePoly.from_json_dict(read_json(path))


def _fraction_list(text):
    try:
        return [Fraction(x.strip()) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse {text!r} as comma-separated rationals") from exc


# -- subcommands ---------------------------------------------------------------------

GRAPH_REDUCTIONS = ("clique-decision", "clique-number", "simplex-ms", "density", "nesterov")
REDUCTIONS = GRAPH_REDUCTIONS + ("copositivity", "grassmann-quartic", "linear")


def cmd_graph_gen(args):
    if args.family == "gnp" and args.seed is None:
        raise UsageError("gnp needs --seed")
    g = generate(args.family, args.n, args.p, seed=args.seed or 0)
    _emit(args, g.to_json_dict())
    return EXIT_OK


def _require_k(args):
    if args.k is None:
        raise UsageError(f"reduction {args.reduction} needs -k")
    return args.k


def cmd_reduce(args):
    r = args.reduction
    _distinct_paths(args.graph, args.matrix, args.poly, args.out)
    if r in GRAPH_REDUCTIONS:
        if not args.graph:
            raise UsageError(f"reduction {r} needs --graph")
        g = load_graph(args.graph)
        if r == "clique-decision":
            inst = red.clique_decision_form(g, _require_k(args))
        elif r == "clique-number":
            inst = red.clique_number_form(g, _require_k(args))
        elif r == "simplex-ms":
            inst = red.simplex_ms_form(g, _require_k(args))
        elif r == "density":
            inst = red.density_qp_form(g)
        else:
            inst = red.nesterov_cubic(g, enabled=args.enable_nesterov)
    elif r == "copositivity":
        if not args.matrix:
            raise UsageError("reduction copositivity needs --matrix")
        inst = red.copositivity_form(_read_matrix(args.matrix))
    elif r == "grassmann-quartic":
        if not args.poly:
            raise UsageError("reduction grassmann-quartic needs --poly (a cubic or a quartic)")
        f = _read_poly(args.poly)
        g = red.quartic_sphere_lift(f) if f.is_homogeneous(3) else f
        inst = red.grassmann_h_from_quartic(g)
    else:
        inst = _linear_instance(args)
    if args.pullback:
        if args.pullback == "stiefel":
            inst = red.stiefel_pullback(inst)
        else:
            inst = red.orthogonal_pullback(inst)
    _emit(args, inst.to_json_dict())
    return EXIT_OK


def _linear_instance(args):
    if not args.matrix or not args.model:
        raise UsageError("reduction linear needs --matrix and --model")
    A = _read_matrix(args.matrix)
    n, cols = len(A), len(A[0])
    model = args.model
    if model == "sphere":
        terms = {}
        for i in range(n):
            for j in range(n):
                if A[i][j]:
                    mono = tuple(sorted({((i + 1, 1), 1), ((j + 1, 1), 1)})) if i != j \
                        else (((i + 1, 1), 2),)
                    terms[mono] = terms.get(mono, 0) + A[i][j]
        f = SparsePoly((n, 1), terms)
        return red.ReductionInstance("sphere", n, 1, f, provenance={"reduction": "sphere-qp"})
    terms = {(((i + 1, j + 1), 1),): A[i][j] for i in range(n) for j in range(cols) if A[i][j]}
    f = SparsePoly((n, cols), terms)
    if model == "stiefel":
        return red.ReductionInstance("stiefel", n, cols, f,
                                     provenance={"reduction": "linear", "anchor": "Lemma 9(a)"})
    if model == "grassmann":
        k = _require_k(args)
        return red.ReductionInstance("grassmann", n, k, f,
                                     provenance={"reduction": "linear", "anchor": "Lemma 9(b)"})
    if model == "spd":
        return red.ReductionInstance("spd", n, n, f,
                                     provenance={"reduction": "linear", "anchor": "Lemma 9(c)"})
    raise UsageError(f"linear instances support stiefel, grassmann, spd, sphere; got {model}")


def cmd_solve(args):
    _distinct_paths(args.instance, args.out, args.csv)
    inst = red.ReductionInstance.from_json_dict(read_json(args.instance))
    if args.method == "closed-form":
        report = solve_closed_form(inst)
    else:
        if args.seed is None:
            raise UsageError("solve --method rgd needs --seed")
        report = multistart_rgd(inst, args.starts, args.iters, args.seed)
    _emit(args, report.to_json_dict())
    if args.csv:
        write_atomic(args.csv, report.to_csv())
    return EXIT_OK


def cmd_convert(args):
    _distinct_paths(args.input, args.out)
    pt = point_from_json_dict(read_json(args.input))
    if args.source and args.source != pt.model:
        raise UsageError(f"--from {args.source} does not match the point's model {pt.model}")
    ab = tuple(_fraction_list(args.ab)) if args.ab else (Fraction(1), Fraction(-1))
    if len(ab) != 2:
        raise UsageError("--ab takes two rationals a,b")
    out, path = convert(pt, args.to, ab)
    _emit(args, {"path": path, "point": point_to_json_dict(out)})
    return EXIT_OK


def cmd_lift(args):
    d = _fraction_list(args.d)
    p = lift_diagonal(d, args.k)
    _emit(args, point_to_json_dict(p))
    return EXIT_OK


def cmd_verify(args):
    if args.seed is None:
        raise UsageError("verify needs --seed")
    opts = {}
    if args.nmax is not None:
        if args.suite not in ("motzkin-straus", "clique-decision", "schur-horn", "nesterov"):
            raise UsageError(f"--nmax does not apply to suite {args.suite}")
        opts["nmax"] = args.nmax
    result = run_suite(args.suite, seed=args.seed, nesterov=args.enable_nesterov, **opts)
    _emit(args, result.to_json_dict())
    return EXIT_OK if result.passed else EXIT_FAIL


# -- parser --------------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="grassnp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("graph-gen", help="generate a graph from a named family")
    s.add_argument("family", choices=("complete", "cycle", "path", "empty", "petersen", "gnp"))
    s.add_argument("--n", type=int, help="number of vertices")
    s.add_argument("--p", help="edge probability for gnp, as a rational such as 1/2")
    s.add_argument("--seed", type=int, help="64-bit seed (required for gnp)")
    s.add_argument("--out", help="output JSON path (default: stdout)")
    s.set_defaults(func=cmd_graph_gen)

    s = sub.add_parser("reduce", help="build an optimization instance")
    s.add_argument("reduction", choices=REDUCTIONS)
    s.add_argument("--graph", help="graph file (JSON or edge list)")
    s.add_argument("--matrix", help="JSON matrix (list of rows; entries may be strings like '1/3')")
    s.add_argument("--poly", help="polynomial JSON file")
    s.add_argument("-k", "--k", type=int, dest="k", help="subspace dimension")
    s.add_argument("--model", choices=("stiefel", "grassmann", "spd", "sphere"),
                   help="model for linear instances")
    s.add_argument("--pullback", choices=("stiefel", "orthogonal"),
                   help="pull a grassmann instance back to V(k,n) or O(n)")
    s.add_argument("--enable-nesterov", action="store_true",
                   help="enable the feature-gated stability-number cubic")
    s.add_argument("--out", help="output instance JSON (default: stdout)")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("solve", help="optimize an instance")
    s.add_argument("--instance", required=True, help="instance JSON")
    s.add_argument("--method", choices=("rgd", "closed-form"), default="rgd")
    s.add_argument("--starts", type=int, default=20)
    s.add_argument("--iters", type=int, default=500)
    s.add_argument("--seed", type=int, help="base seed; start s uses seed XOR s (required for rgd)")
    s.add_argument("--out", help="report JSON (default: stdout)")
    s.add_argument("--csv", help="per-start CSV summary")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("convert", help="route a point between manifold models")
    s.add_argument("--in", dest="input", required=True, help="point JSON")
    s.add_argument("--from", dest="source", help="expected source model tag")
    s.add_argument("--to", required=True, help="target model tag")
    s.add_argument("--ab", help="a,b for the quadratic model (default 1,-1)")
    s.add_argument("--out", help="output JSON (default: stdout)")
    s.set_defaults(func=cmd_convert)

    s = sub.add_parser("lift", help="projection with a prescribed diagonal")
    s.add_argument("--d", required=True, help="comma-separated diagonal, e.g. 0.5,0.5,1")
    s.add_argument("--k", type=int, required=True, help="rank")
    s.add_argument("--out", help="output point JSON (default: stdout)")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("verify", help="run a verification suite")
    s.add_argument("suite", help=f"one of: {', '.join(SUITES)}")
    s.add_argument("--seed", type=int, help="seed (required)")
    s.add_argument("--nmax", type=int, help="largest graph or matrix size")
    s.add_argument("--enable-nesterov", action="store_true")
    s.add_argument("--out", help="summary JSON (default: stdout)")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except red.FeatureDisabled as exc:
        print(f"not implemented: {exc}", file=sys.stderr)
        return EXIT_GATED
    except KeyError as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, OSError, GraphError, PolyError, ManifoldError, ConversionError,
            SimplexError, SolverError, red.ReductionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
