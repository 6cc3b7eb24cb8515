"""Command-line entry point: ``tropmartin <subcommand> ...`` (JSON reports).

Exit codes: 0 success, 1 an assertion failed, 2 input or domain error.
"""
from __future__ import annotations

import argparse
import ast
import logging
import operator
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import io
from .boundary import fixtures as fx
from .boundary import (
    NotAPath,
    almost_geodesic_check,
    column_limit,
    get_rule,
    h_flat_self,
)
from .busemann import (
    EuclideanNorm,
    PolyhedralNorm,
    enumerate_faces,
    ray_limit,
)
from .core import FLOAT_TOL, TropicalError, kleene_plus, kleene_star
from .lax import (
    LagrangianSpec,
    eigen_characterization_check,
    eigen_check,
    lax_star_asymptotics_check,
    theta,
)
from .martin import (
    PiSpec,
    decompose_harmonic,
    is_extremal,
    martin_data,
    minimal_martin_finite,
    mu,
)
from .spectral import check_rho_bound, spectral_data

log = logging.getLogger("tropmartin")

EXIT_OK, EXIT_ASSERT, EXIT_INPUT = 0, 1, 2


@dataclass
class Report:
    subcommand: str
    results: dict = field(default_factory=dict)
    assertions: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)
    error: dict | None = None

    def check(self, name: str, passed: bool, witness: Any = None):
        self.assertions.append({"name": name, "passed": bool(passed), "witness": witness})

    @property
    def exit_code(self) -> int:
        if self.error is not None:
            return EXIT_INPUT
        return EXIT_OK if all(a["passed"] for a in self.assertions) else EXIT_ASSERT


# --------------------------------------------------------------------------
# argument helpers

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.FloorDiv: operator.floordiv}


def target_expr(expr: str) -> Callable[[int], Any]:
    """Compile ``k``, ``-k``, ``(k,1)``, ``(2*k,k)``... into a ray ``k -> node``."""
    try:
        tree = ast.parse(expr.strip(), mode="eval").body
    except SyntaxError as exc:
        raise TropicalError(f"bad target expression {expr!r}: {exc.msg}") from None

    def ev(node, k):
        if isinstance(node, ast.Name) and node.id == "k":
            return k
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand, k)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left, k), ev(node.right, k))
        if isinstance(node, ast.Tuple):
            return tuple(ev(e, k) for e in node.elts)
        raise TropicalError(f"unsupported element in target expression {expr!r}")

    ev(tree, 1)
    return lambda k: ev(tree, k)


def _floats(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise TropicalError(f"expected comma-separated numbers, got {text!r}") from None


def _pi_spec(text: str, labels) -> PiSpec:
    kind, _, arg = text.partition(":")
    if kind == "basepoint":
        return PiSpec.basepoint(arg)
    if kind in ("sigma", "explicit"):
        vec = io.parse_vector(arg, labels)
        return PiSpec.sigma(vec) if kind == "sigma" else PiSpec.explicit(vec)
    raise TropicalError(f"pi spec must be basepoint:NODE, sigma:FILE or explicit:FILE, got {text!r}")


def _graph(args):
    nodes = args.nodes.split(",") if args.nodes else None
    return io.parse_graph(args.graph, nodes=nodes, integer=args.mode == "integer")


def _norm(name: str, dim: int):
    if name == "linf":
        return PolyhedralNorm.linf(dim)
    if name == "l1":
        return PolyhedralNorm.l1(dim)
    if name == "l2":
        return EuclideanNorm(dim)
    if name.startswith("file:"):
        return PolyhedralNorm.load(name[5:])
    raise TropicalError(f"unknown norm {name!r}")


# --------------------------------------------------------------------------
# subcommands


def cmd_spectra(args, rep: Report):
    A = _graph(args)
    sd = spectral_data(A, args.tol)
    rep.results.update(rho=sd.rho, recurrent=list(sd.recurrent), classes=[list(c) for c in sd.classes])
    if args.pi:
        md = martin_data(A, _pi_spec(args.pi, A.labels))
        rep.check("rho(A) <= 0", check_rho_bound(A, md.pi))


def cmd_star(args, rep: Report):
    A = _graph(args)
    S = kleene_plus(A, args.tol) if args.plus else kleene_star(A, args.tol)
    rep.results.update(labels=list(A.labels), values=S.dense())


def cmd_martin(args, rep: Report):
    A = _graph(args)
    md = martin_data(A, _pi_spec(args.pi, A.labels))
    rep.results.update(
        labels=list(A.labels),
        pi=md.pi_values,
        K=md.K,
        Kflat=md.Kflat,
        H=md.H,
        Hflat=md.Hflat,
        rho=md.spectral.rho,
        classes=[list(c) for c in md.column_classes],
        minimal=minimal_martin_finite(md),
    )


def cmd_decompose(args, rep: Report):
    A = _graph(args)
    md = martin_data(A, _pi_spec(args.pi, A.labels))
    u = io.parse_vector(args.vector, A.labels)
    nu = mu(md, u) if args.superharmonic else decompose_harmonic(md, u)
    rep.results["measure"] = {"support": list(nu.support), "density": nu.density}
    if args.extremal:
        ex = is_extremal(md, u)
        rep.results["extremal"] = ex.extremal
        rep.results["witness"] = [v.as_dict() for v in ex.witness] if ex.witness else None


def cmd_boundary(args, rep: Report):
    rule = get_rule(args.rule)
    ray = target_expr(args.targets)
    est = column_limit(rule, ray, args.window, args.tol, args.radius, require_escape=not args.fixed)
    rep.results.update(
        rule=rule.name,
        window=[rule.encode(x) for x in est.window],
        values=est.labelled(),
        sequence_tail=[rule.encode(x) for x in est.sequence_tail],
        converged=est.converged,
        residual=est.residual,
        truncation_radius=est.truncation_radius,
    )
    rep.check("column limit converged", est.converged, est.residual)
    if args.probe:
        probe = target_expr(args.probe)
        path = [probe(k) for k in range(args.probe_start, args.probe_start + args.probe_length)]
        rep.results["h_flat_self"] = h_flat_self(rule, est, [path])
        try:
            geo = almost_geodesic_check(rule, path, args.alpha)
            rep.results["probe_slacks"] = list(geo.slacks)
        except NotAPath:
            rep.results["probe_slacks"] = None
    if args.csv:
        lines = ["node,value"] + [f"\"{rule.encode(x)}\",{est.values[x]!r}" for x in est.window]
        Path(args.csv).write_text("\n".join(lines) + "\n")


def cmd_busemann(args, rep: Report):
    N = _norm(args.norm, args.dim)
    if args.action == "enumerate":
        if isinstance(N, EuclideanNorm):
            raise TropicalError("face enumeration needs a polyhedral norm")
        faces = enumerate_faces(N)
        rep.results.update(
            exact=faces.exact,
            count=len(faces),
            faces=[[N.dual_extremes[i] for i in f] for f in faces],
        )
    else:
        X = _floats(args.X) if args.X else np.zeros(args.dim)
        y = _floats(args.y)
        rng = np.random.default_rng(args.seed)
        samples = rng.uniform(-5, 5, size=(64, args.dim))
        b = ray_limit(N, X, y, samples, tol=args.confirm_tol)
        rep.results.update(face=list(b.face), offset=b.offset, direction=b.direction)
        rep.check("ray confirmed", True)


def cmd_laxoleinik(args, rep: Report):
    h, extent = _floats(args.grid)
    if args.check == "eigen":
        L = LagrangianSpec.pnorm(args.p)
        th = theta(args.lam, args.p)
        r = eigen_check(lambda x: th * x[..., 0], L, args.lam, args.s, h, extent, args.tol or 0.0)
        rep.results.update(theta=th, residual=r.residual, bound=r.bound, valid_cells=r.valid_cells)
        rep.check("residual within grid bound", r.passed, r.residual)
    elif args.check == "asymptotics":
        disp = _floats(args.displacements)
        rows = lax_star_asymptotics_check(args.p, args.s, args.lam, disp)
        rep.results["rows"] = rows
        devs = [r.deviation for r in rows if r.displacement > 0]
        rep.check("deviation does not grow", all(b <= a + FLOAT_TOL for a, b in zip(devs, devs[1:])), devs)
    else:
        L = LagrangianSpec.normed()
        th = theta(args.lam, args.p)
        r = eigen_characterization_check(lambda x: th * x[..., 0], L, h, extent)
        rep.results.update(worst=r.worst, witness=r.witness)
        rep.check("characterization holds", r.ok, r.witness)


def cmd_fixtures(args, rep: Report):
    if args.suite in ("examples", "paper", "all"):
        fr = fx.fixture_suite()
        for a in fr.assertions:
            rep.check(a.name, a.passed, a.witness or None)
        rep.timing["fixtures"] = fr.timing
    if args.suite in ("core", "all"):
        from .oracles import random_core_checks

        for name, ok, witness in random_core_checks(args.seed, args.count):
            rep.check(name, ok, witness)


COMMANDS = {
    "spectra": cmd_spectra,
    "star": cmd_star,
    "martin": cmd_martin,
    "decompose": cmd_decompose,
    "boundary": cmd_boundary,
    "busemann": cmd_busemann,
    "laxoleinik": cmd_laxoleinik,
    "fixtures": cmd_fixtures,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=["integer", "float"], default="float")
    common.add_argument("--tol", type=float, default=None, help="comparison tolerance (default: 0 for integer data, 1e-9 otherwise)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", type=Path, default=None, help="write the JSON report here instead of stdout")

    parser = argparse.ArgumentParser(prog="tropmartin", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def graph_cmd(name, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--graph", required=True)
        p.add_argument("--nodes", default=None, help="comma-separated node list (fixes order, allows isolated nodes)")
        return p

    p = graph_cmd("spectra", "circuit mean, recurrent nodes and classes")
    p.add_argument("--pi", default=None)
    p = graph_cmd("star", "Kleene star (or plus) closure")
    p.add_argument("--plus", action="store_true")
    p = graph_cmd("martin", "Martin kernels and minimal Martin space")
    p.add_argument("--pi", required=True)
    p = graph_cmd("decompose", "representing measure of a vector")
    p.add_argument("--pi", required=True)
    p.add_argument("--vector", required=True)
    p.add_argument("--superharmonic", action="store_true", help="return mu_u instead of the harmonic decomposition")
    p.add_argument("--extremal", action="store_true")

    p = sub.add_parser("boundary", parents=[common], help="boundary estimate for a rule kernel")
    p.add_argument("--rule", required=True)
    p.add_argument("--targets", required=True, help="ray expression in k, e.g. 'k' or '(k,1)'")
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--radius", type=int, default=None)
    p.add_argument("--fixed", action="store_true", help="targets need not leave the window")
    p.add_argument("--probe", default=None, help="probe ray for the H-flat self value")
    p.add_argument("--probe-start", type=int, default=0)
    p.add_argument("--probe-length", type=int, default=12)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--csv", default=None)

    p = sub.add_parser("busemann", parents=[common], help="Busemann points of polyhedral norms")
    p.add_argument("--norm", default="linf")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("action", choices=["enumerate", "ray"])
    p.add_argument("--X", default=None)
    p.add_argument("--y", default="1,1")
    p.add_argument("--confirm-tol", type=float, default=1e-6)

    p = sub.add_parser("laxoleinik", parents=[common], help="Lax-Oleinik eigenvector checks")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--grid", default="0.13,3")
    p.add_argument("--check", choices=["eigen", "asymptotics", "characterization"], default="eigen")
    p.add_argument("--displacements", default="10,100")

    p = sub.add_parser("fixtures", parents=[common], help="run the closed-form fixture suite")
    # "paper" is accepted as an alias of "examples"
    p.add_argument("--suite", choices=["examples", "paper", "core", "all"], default="examples")
    p.add_argument("--count", type=int, default=50)
    return parser


def run(args: argparse.Namespace) -> Report:
    rep = Report(args.subcommand)
    t0 = time.perf_counter()
    if args.tol is not None and args.tol < 0:
        rep.error = {"type": "InputError", "message": "--tol must be >= 0"}
    elif args.mode == "float" and args.tol == 0:
        rep.error = {"type": "InputError", "message": "float mode needs --tol > 0"}
    else:
        try:
            COMMANDS[args.subcommand](args, rep)
        except (TropicalError, OSError) as exc:
            rep.error = {"type": type(exc).__name__, "message": str(exc)}
    rep.timing["seconds"] = time.perf_counter() - t0
    return rep


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    rep = run(args)
    text = io.dumps(rep)
    if args.out:
        args.out.write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
