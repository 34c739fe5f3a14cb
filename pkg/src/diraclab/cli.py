"""Batch CLI: parse JSON specs, run checks, emit machine-readable reports.

Every invocation prints one JSON report to stdout and exits with
0 (all criteria passed), 1 (a check failed) or 2 (input error).  All
randomness is seeded (--seed, default 0) and echoed in the report, so
identical inputs and seed reproduce the report byte for byte (the
wall_time_s field is the one excluded, timing is not reproducible).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import jsonio
from ._numeric import FlowConfig
from .errors import DiraclabError, DomainEscapeError, TransversalityError
from .fields import Chart, PolyKForm, PolyKVector
from .poisson import (
    PoissonBivector,
    TimePolyForm,
    euler_linearize,
    jacobiator,
    leaf_data_at_point,
    moser_verify,
    bracket as poisson_bracket,
)
from . import dirac as dirac_mod
from . import maningroup as manin_mod
from . import realization as real_mod

SCHEMA_VERSION = 1

REPORT_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "command", "seed", "criteria", "wall_time_s"],
    "properties": {
        "schema_version": {"type": "integer"},
        "command": {"type": "array", "items": {"type": "string"}},
        "seed": {"type": "integer"},
        "criteria": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "status", "max_residual", "tolerance"],
                "properties": {
                    "name": {"type": "string"},
                    "status": {"enum": ["pass", "fail"]},
                    "max_residual": {
                        "anyOf": [{"type": "number"}, {"const": "exact-zero"}]
                    },
                    "worst_point": {
                        "anyOf": [{"type": "array"}, {"type": "null"}]
                    },
                    "tolerance": {
                        "anyOf": [{"type": "number"}, {"const": "exact"}]
                    },
                },
            },
        },
        "result": {"type": "object"},
        "wall_time_s": {"type": "number"},
    },
}


class InputError(Exception):
    pass


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}")
    except json.JSONDecodeError as e:
        raise InputError(f"malformed JSON in {path} at line {e.lineno}, column {e.colno}: {e.msg}")


def _parse_point(text: str):
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise InputError(f"cannot parse point {text!r}")


def _load_bivector(path: str) -> PoissonBivector:
    data = _load_json(path)
    T = jsonio.tensor_from_json(data)
    if not isinstance(T, PolyKVector) or T.degree != 2:
        raise InputError(f"{path}: expected a degree-2 multivector (kind=vector)")
    return PoissonBivector(T)


def _load_oneform_family(path: str) -> TimePolyForm:
    data = _load_json(path)
    powers = data.get("powers")
    if powers is None:
        raise InputError(f"{path}: expected {{'powers': {{degree: tensor}}}}")
    coeffs = {}
    for d, tens in powers.items():
        T = jsonio.tensor_from_json(tens)
        if not isinstance(T, PolyKForm) or T.degree != 1:
            raise InputError(f"{path}: powers[{d}] must be a 1-form")
        coeffs[int(d)] = T
    return TimePolyForm(coeffs)


def criterion(name, residual, tolerance, worst_point=None):
    if residual == "exact-zero":
        status = "pass"
    else:
        residual = float(residual)
        status = "pass" if residual <= (tolerance if isinstance(tolerance, float) else 0.0) else "fail"
    return {
        "name": name,
        "status": status,
        "max_residual": residual,
        "worst_point": None if worst_point is None else [float(x) for x in worst_point],
        "tolerance": tolerance,
    }


def exact_criterion(name, ok, witness=None):
    out = {
        "name": name,
        "status": "pass" if ok else "fail",
        "max_residual": "exact-zero" if ok else float("inf"),
        "worst_point": None,
        "tolerance": "exact",
    }
    if witness is not None:
        out["witness"] = witness
    return out


# -- subcommand handlers -----------------------------------------------------


def _cmd_poisson(args):
    pi = _load_bivector(args.file)
    if args.poisson_cmd == "check":
        J = jacobiator(pi)
        ok = J.is_zero()
        crit = exact_criterion("jacobi-identity", ok)
        result = {}
        if not ok:
            witness = {
                "+".join(str(i + 1) for i in idx): jsonio.poly_to_json(p)
                for idx, p in J.components.items()
            }
            result["jacobiator_components"] = witness
        return [crit], result
    if args.poisson_cmd == "jacobiator":
        J = jacobiator(pi)
        return [], {"jacobiator": jsonio.tensor_to_json(J), "is_zero": J.is_zero()}
    if args.poisson_cmd == "bracket":
        f = jsonio.poly_from_json(pi.chart, _load_json(args.f))
        g = jsonio.poly_from_json(pi.chart, _load_json(args.g))
        return [], {"bracket": jsonio.poly_to_json(poisson_bracket(pi, f, g))}
    if args.poisson_cmd == "leaf":
        pt = _parse_point(args.point)
        leaf = leaf_data_at_point(pi, pt)
        return [], {
            "rank": leaf.rank,
            "basis": leaf.basis.tolist(),
            "leaf_symplectic_matrix": leaf.omega.tolist(),
            "basis_dependent": True,
        }
    raise InputError(f"unknown poisson subcommand {args.poisson_cmd}")


def _frame_from_json(data) -> dirac_mod.LagrangianFrame:
    chart = Chart(int(data["chart"]))
    sections = []
    for rec in data["sections"]:
        X = jsonio.tensor_from_json(rec["X"], chart)
        alpha = jsonio.tensor_from_json(rec["alpha"], chart)
        sections.append(dirac_mod.GeneralizedSection(X, alpha))
    return dirac_mod.LagrangianFrame(chart, sections=sections)


def _seeded_points(dim, count, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    return [scale * rng.uniform(-1.0, 1.0, size=dim) for _ in range(count)]


def _cmd_dirac(args):
    tol = args.tol if args.tol is not None else 1e-9
    if args.dirac_cmd == "check-integrability":
        if args.poisson:
            pi = _load_bivector(args.poisson)
            E = dirac_mod.graph_of_poisson(pi)
        else:
            if not args.frame:
                raise InputError("need --poisson or --frame")
            E = _frame_from_json(_load_json(args.frame))
        pts = (
            [_parse_point(p) for p in args.point]
            if args.point
            else _seeded_points(E.chart.dim, 5, args.seed)
        )
        worst, worst_pt = 0.0, pts[0]
        for pt in pts:
            T = dirac_mod.integrability_tensor(E, pt)
            r = float(np.abs(T).max())
            if r > worst:
                worst, worst_pt = r, pt
        return [criterion("courant-integrability", worst, tol, worst_pt)], {}
    if args.dirac_cmd == "gauge":
        pi = _load_bivector(args.poisson)
        omega = jsonio.tensor_from_json(_load_json(args.omega), pi.chart)
        gauge = dirac_mod.GaugeTransform(omega)
        pt = _parse_point(args.point)
        try:
            P = dirac_mod.gauge_poisson(pi, gauge, pt)
        except TransversalityError as e:
            return [criterion("gauge-transversality", float("inf"), tol, e.point)], {}
        return (
            [criterion("gauge-skewness", float(np.abs(P + P.T).max()), 1e-12, pt)],
            {"gauged_bivector_matrix": P.tolist()},
        )
    if args.dirac_cmd == "pullback":
        phi = jsonio.map_from_json(_load_json(args.map))
        pi = _load_bivector(args.poisson)
        E = dirac_mod.graph_of_poisson(pi)
        pt = _parse_point(args.point)
        B = dirac_mod.pullback_dirac_at_point(phi, E, pt)
        gram = dirac_mod.pairing_gram(B)
        return (
            [criterion("pullback-lagrangian", float(np.abs(gram).max()), tol, pt)],
            {"fiber_basis": B.tolist()},
        )
    if args.dirac_cmd == "poisson-map":
        phi = jsonio.map_from_json(_load_json(args.map))
        pi_src = _load_bivector(args.pi_source)
        pi_tgt = PoissonBivector(
            jsonio.tensor_from_json(_load_json(args.pi_target), phi.target)
        )
        rep = dirac_mod.check_poisson_map(phi, pi_src, pi_tgt, anti=args.anti)
        return [exact_criterion("poisson-map-identity", rep.exact)], rep.as_dict()
    raise InputError(f"unknown dirac subcommand {args.dirac_cmd}")


def _cmd_realize(args):
    pi = _load_bivector(args.poisson)
    config = real_mod.RealizationConfig(step=args.step, radius=args.radius)
    tol = args.tol if args.tol is not None else 1e-6
    spray = real_mod.default_spray(pi)
    pts = real_mod.sample_points(pi.chart.dim, args.samples, args.radius, seed=args.seed)
    rep = real_mod.verify_dual_pair(spray, pts, config, tolerance=tol)
    crits = [
        criterion(c.name, c.max_residual, c.tolerance, c.worst_point)
        for c in rep.criteria
    ]
    return crits, {"samples": rep.samples}


def _cmd_moser(args):
    pi = _load_bivector(args.poisson)
    a_t = _load_oneform_family(args.a_form)
    tol = args.tol if args.tol is not None else 1e-6
    rng = np.random.default_rng(args.seed)
    grid = [rng.uniform(-args.grid_radius, args.grid_radius, size=pi.chart.dim)
            for _ in range(args.grid_count)]
    rep = moser_verify(pi, a_t, [args.time], grid, FlowConfig(step=args.step))
    return (
        [criterion("pushforward-invariance", rep.max_residual, tol, rep.worst_point)],
        {"samples": rep.samples, "time": args.time},
    )


def _cmd_linearize(args):
    data = _load_json(args.field)
    X = jsonio.tensor_from_json(data)
    if not isinstance(X, PolyKVector) or X.degree != 1:
        raise InputError("--field must hold a degree-1 vector field")
    tol = args.tol if args.tol is not None else 1e-5
    rng = np.random.default_rng(args.seed)
    pts = []
    while len(pts) < args.samples:
        p = rng.uniform(-args.radius, args.radius, size=X.chart.dim)
        if np.linalg.norm(p) <= args.radius:
            pts.append(p)
    rep = euler_linearize(X, pts, FlowConfig(step=args.step))
    return (
        [criterion("conjugation-residual", rep.max_residual, tol, rep.worst_point)],
        {"samples": rep.samples},
    )


def _rational_matrix_from_json(rows):
    return [[jsonio.rational_from_json(v) for v in row] for row in rows]


def _triple_from_json(data) -> tuple:
    dim = int(data["dim"])
    C = {}
    for entry in data["C"]:
        a, b, c = int(entry["a"]) - 1, int(entry["b"]) - 1, int(entry["c"]) - 1
        C[(a, b, c)] = jsonio.rational_from_json(entry["value"])
    B = _rational_matrix_from_json(data["B"])
    alg = manin_mod.MetrizedLieAlgebra(dim, C, B)
    g_basis = _rational_matrix_from_json(data["g_basis"])
    h_basis = _rational_matrix_from_json(data["h_basis"])
    triple = manin_mod.ManinTriple(alg, g_basis, h_basis)
    chart = None
    builtin_ad = data.get("builtin_ad")
    if builtin_ad:
        catalog = manin_mod.builtin_triples()
        if builtin_ad not in catalog:
            raise InputError(f"unknown builtin_ad {builtin_ad!r}")
        ref_chart = catalog[builtin_ad][1]
        if ref_chart is None:
            raise InputError(f"builtin {builtin_ad!r} carries no chart")
        chart = manin_mod.GroupChart(builtin_ad, triple, ref_chart.param, ref_chart.log_map)
    return triple, chart


def _resolve_triple(args):
    if getattr(args, "builtin", None):
        catalog = manin_mod.builtin_triples()
        if args.builtin not in catalog:
            raise InputError(
                f"unknown builtin {args.builtin!r}; have {sorted(catalog)}"
            )
        return catalog[args.builtin]
    if getattr(args, "triple", None):
        return _triple_from_json(_load_json(args.triple))
    raise InputError("need --builtin or --triple")


def _cmd_manin(args):
    tol = args.tol if args.tol is not None else 1e-5
    triple, chart = _resolve_triple(args)
    if args.manin_cmd == "check":
        ok, witness = manin_mod.check_manin_triple(triple)
        return [exact_criterion("manin-triple-axioms", ok, witness)], {}
    if chart is None:
        raise InputError("this subcommand needs a triple with a group chart")
    if args.manin_cmd == "bivector":
        pt = np.array(_parse_point(args.point))
        P = manin_mod.drinfeld_bivector(triple, chart, pt)
        Pc = manin_mod.drinfeld_bivector_chart(triple, chart, pt)
        return (
            [criterion("bivector-skewness", float(np.abs(P + P.T).max()), 1e-12, pt)],
            {"bivector_h_basis": P.tolist(), "bivector_chart": Pc.tolist()},
        )
    if args.manin_cmd == "dressing":
        pt = np.array(_parse_point(args.point))
        zeta = np.array(_parse_point(args.zeta))
        out = manin_mod.dressing_action(triple, chart, pt, zeta)
        return [], {"left_trivialized_value": out.tolist()}
    if args.manin_cmd == "multiplicativity":
        rng = np.random.default_rng(args.seed)
        pairs = [
            (args.scale * rng.uniform(-1, 1, chart.dim),
             args.scale * rng.uniform(-1, 1, chart.dim))
            for _ in range(args.pairs)
        ]
        rep = manin_mod.verify_multiplicativity(triple, chart, pairs)
        worst = rep["worst_pair"][0] if rep["worst_pair"] else None
        return (
            [criterion("multiplicativity", rep["max_residual"], tol, worst)],
            {"pairs": args.pairs},
        )
    if args.manin_cmd == "homspace":
        data = _load_json(args.data)
        hs = manin_mod.HomogeneousSpaceData(
            triple,
            _rational_matrix_from_json(data.get("k_basis", [])),
            _rational_matrix_from_json(data["l_basis"]),
        )
        gens = [[float(jsonio.rational_from_json(v)) for v in g]
                for g in data.get("k_generators", [])]
        ok, rep = manin_mod.homogeneous_space_check(hs, k_generators=gens)
        return [exact_criterion("homogeneous-space-criteria", ok, rep)], {}
    raise InputError(f"unknown manin subcommand {args.manin_cmd}")


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="diraclab",
        description="Exact and numeric certification of Poisson/Dirac constructions",
    )
    ap.add_argument("--seed", type=int, default=0, help="seed for all sampled points")
    ap.add_argument("--tol", type=float, default=None, help="override the command tolerance")
    # the same flags are accepted after the subcommand; SUPPRESS keeps the
    # subparser from clobbering a value given before it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("poisson")
    ps = p.add_subparsers(dest="poisson_cmd", required=True)
    for name in ("check", "jacobiator"):
        q = ps.add_parser(name, parents=[common])
        q.add_argument("--file", required=True)
    q = ps.add_parser("bracket", parents=[common])
    q.add_argument("--file", required=True)
    q.add_argument("--f", required=True)
    q.add_argument("--g", required=True)
    q = ps.add_parser("leaf", parents=[common])
    q.add_argument("--file", required=True)
    q.add_argument("--point", required=True)

    d = sub.add_parser("dirac")
    ds = d.add_subparsers(dest="dirac_cmd", required=True)
    q = ds.add_parser("check-integrability", parents=[common])
    q.add_argument("--poisson")
    q.add_argument("--frame")
    q.add_argument("--point", action="append")
    q = ds.add_parser("gauge", parents=[common])
    q.add_argument("--poisson", required=True)
    q.add_argument("--omega", required=True)
    q.add_argument("--point", required=True)
    q = ds.add_parser("pullback", parents=[common])
    q.add_argument("--map", required=True)
    q.add_argument("--poisson", required=True)
    q.add_argument("--point", required=True)
    q = ds.add_parser("poisson-map", parents=[common])
    q.add_argument("--map", required=True)
    q.add_argument("--pi-source", dest="pi_source", required=True)
    q.add_argument("--pi-target", dest="pi_target", required=True)
    q.add_argument("--anti", action="store_true")

    r = sub.add_parser("realize", parents=[common])
    r.add_argument("--poisson", required=True)
    r.add_argument("--samples", type=int, default=20)
    r.add_argument("--radius", type=float, default=0.2)
    r.add_argument("--step", type=float, default=1e-3)
    r.add_argument("--report")

    m = sub.add_parser("moser", parents=[common])
    m.add_argument("--poisson", required=True)
    m.add_argument("--a-form", dest="a_form", required=True)
    m.add_argument("--time", type=float, default=0.5)
    m.add_argument("--grid-radius", dest="grid_radius", type=float, default=0.5)
    m.add_argument("--grid-count", dest="grid_count", type=int, default=9)
    m.add_argument("--step", type=float, default=1e-3)

    l = sub.add_parser("linearize", parents=[common])
    l.add_argument("--field", required=True)
    l.add_argument("--radius", type=float, default=0.3)
    l.add_argument("--samples", type=int, default=10)
    l.add_argument("--step", type=float, default=1e-3)

    mn = sub.add_parser("manin")
    ms = mn.add_subparsers(dest="manin_cmd", required=True)
    for name in ("check", "bivector", "dressing", "multiplicativity", "homspace"):
        q = ms.add_parser(name, parents=[common])
        q.add_argument("--builtin")
        q.add_argument("--triple")
        if name == "bivector":
            q.add_argument("--point", required=True)
        if name == "dressing":
            q.add_argument("--point", required=True)
            q.add_argument("--zeta", required=True)
        if name == "multiplicativity":
            q.add_argument("--pairs", type=int, default=10)
            q.add_argument("--scale", type=float, default=0.5)
        if name == "homspace":
            q.add_argument("--data", required=True)
    return ap


_HANDLERS = {
    "poisson": _cmd_poisson,
    "dirac": _cmd_dirac,
    "realize": _cmd_realize,
    "moser": _cmd_moser,
    "linearize": _cmd_linearize,
    "manin": _cmd_manin,
}


def run(argv) -> int:
    started = time.perf_counter()
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": list(argv),
        "seed": args.seed,
        "criteria": [],
    }
    try:
        criteria, result = _HANDLERS[args.cmd](args)
        report["criteria"] = criteria
        if result:
            report["result"] = result
        code = 0 if all(c["status"] == "pass" for c in criteria) else 1
    except InputError as e:
        report["error"] = str(e)
        code = 2
    except (DomainEscapeError, TransversalityError) as e:
        report["error"] = str(e)
        if e.point is not None:
            report["error_point"] = list(e.point)
        code = 1
    except DiraclabError as e:
        report["error"] = str(e)
        code = 2
    report["wall_time_s"] = round(time.perf_counter() - started, 6)
    text = json.dumps(report, sort_keys=True, indent=2)
    print(text)
    if getattr(args, "report", None) and "error" not in report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
