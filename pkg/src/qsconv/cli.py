"""Command-line front end: load JSON specifications, run verification
pipelines, emit machine-readable reports.

Exit codes: 0 all checks pass, 1 a verified mathematical property failed,
2 input or usage error.  Reports are deterministic byte-for-byte across
runs; wall time goes to stderr so it never perturbs the report stream.
"""

import argparse
import json
import sys
import time

import numpy as np

from . import fixtures as fx
from . import serialize as sz
from .algebra import conv_exp, verify_hyperbialgebra
from .dilation import check_homold, check_tuple_conditions, dilate
from .dynamics import (StepFunction, check_convolution_increment, contractivity_gram,
                       dilation_process_check, gram_positivity, semigroup_consistency,
                       stinespring_process_check, weak_trajectory)
from .errors import NotABialgebra, QsconvError
from .expectation import delsarte_expectation, double_coset_expectation
from .generator import extract_tuple, extraction_report, is_cpc, markov_generator
from .numerics import EQ_TOL
from .report import Report
from .sampling import random_contraction, random_step_function
from .stinespring import verify_stinespring_identity


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise QsconvError(f"file not found: {path}")
    except json.JSONDecodeError as exc:
        raise QsconvError(f"invalid JSON in {path}: {exc}")


def _emit(payload, out=None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        print(text)


def _report_payload(command, rpt):
    return {"command": command, "report": rpt.to_dict()}


def cmd_verify(args):
    h = sz.algebra_from_json(_load_json(args.algebra))
    rpt = verify_hyperbialgebra(h, tol=args.tol)
    _emit(_report_payload("verify", rpt))
    return 0 if rpt.passed else 1


def cmd_expectation(args):
    spec = _load_json(args.spec)
    if args.kind == "double-coset":
        h1 = sz.algebra_from_json(spec["algebra1"])
        h2 = sz.algebra_from_json(spec["algebra2"])
        pi = sz.morphism_from_json(spec["morphism"])
        mu = sz.vector_from_json(spec["haar"])
        p = double_coset_expectation(h1, h2, pi, mu, tol=args.tol)
        host = h1
    else:
        host = sz.algebra_from_json(spec["algebra"])
        action = sz.action_from_json(spec["action"])
        p = delsarte_expectation(host, action, tol=args.tol)

    from .expectation import quotient_hyperbialgebra, verify_conditional_expectation

    rpt = verify_conditional_expectation(host, p, tol=args.tol)
    payload = _report_payload(f"expectation {args.kind}", rpt)
    if rpt.passed:
        quotient, _, _ = quotient_hyperbialgebra(host, p, tol=args.tol)
        payload["range_dim"] = p.range_dim
        payload["multiplicativity_residual"] = quotient._multiplicativity_residual
        if args.out:
            _emit({"expectation": sz.expectation_to_json(p),
                   "quotient": sz.algebra_to_json(quotient)}, args.out)
    _emit(payload)
    return 0 if rpt.passed else 1


def cmd_generator_analyze(args):
    h = sz.algebra_from_json(_load_json(args.algebra))
    phi = sz.generator_from_json(_load_json(args.gen))
    rpt = is_cpc(phi, h, tol=args.tol)
    payload = _report_payload("generator analyze", rpt)
    payload["cpc"] = bool(rpt.meta["cpc"])
    tup = rpt.meta.get("tuple")
    if tup is not None:
        payload["tuple"] = sz.tuple_to_json(tup)
        payload["K"] = tup.K_dim
        conditions = check_tuple_conditions(tup, h, tol=args.tol)
        payload["tuple_conditions"] = conditions.to_dict()
        if h.delta_multiplicative:
            hom = check_homold(phi, h, tol=args.tol)
            payload["homomorphic"] = bool(hom.passed)
            payload["homold_residual"] = hom.residual("homomorphism_relation")
    _emit(payload)
    return 0 if rpt.passed else 1


def cmd_dilate(args):
    h = sz.algebra_from_json(_load_json(args.algebra))
    phi = sz.generator_from_json(_load_json(args.gen))
    tup = extract_tuple(phi, h, tol=args.tol)
    result = dilate(tup, h, tol=args.tol)
    payload = _report_payload("dilate", result.report)
    payload["dims"] = {"dk0": result.dk0, "dk1": result.dk1, "dk2": result.dk2}
    if args.out:
        _emit({"psi": sz.generator_to_json(result.psi),
               "dk0": result.dk0, "dk1": result.dk1, "dk2": result.dk2,
               "d1": sz.vector_to_json(result.d1), "d2": result.d2,
               "D1": sz.matrix_to_json(result.D1),
               "report": result.report.to_dict()}, args.out)
    _emit(payload)
    return 0 if result.report.passed else 1


def cmd_stinespring(args):
    h = sz.algebra_from_json(_load_json(args.algebra))
    phi = sz.generator_from_json(_load_json(args.gen))
    tup = extract_tuple(phi, h, tol=args.tol)
    b = sz.matrix_from_json(_load_json(args.contraction)) if args.contraction else None
    data = verify_stinespring_identity(tup, b, h, tol=args.tol)
    payload = _report_payload("stinespring", data.report)
    if args.out:
        _emit({"theta": sz.generator_to_json(data.theta),
               "tau": sz.matrix_to_json(data.tau),
               "B": sz.matrix_to_json(data.B),
               "psi": sz.generator_to_json(data.psi),
               "residuals": data.report.to_dict()}, args.out)
    _emit(payload)
    return 0 if data.report.passed else 1


def _parse_times(spec):
    try:
        t0, t1, dt = (float(x) for x in spec.split(":"))
    except ValueError:
        raise QsconvError(f"bad --times {spec!r}; expected t0:t1:dt")
    if dt <= 0 or t1 < t0:
        raise QsconvError(f"bad --times {spec!r}")
    n = int(round((t1 - t0) / dt))
    return [t0 + i * dt for i in range(n + 1)]


SIMULATE_CHECKS = ("increment", "gram", "contractivity", "semigroup", "dilation", "stinespring")


def cmd_simulate(args):
    h = sz.algebra_from_json(_load_json(args.algebra))
    phi = sz.generator_from_json(_load_json(args.gen))
    f = sz.stepfunction_from_json(_load_json(args.f), dk=phi.dk) if args.f \
        else StepFunction.zero(phi.dk)
    g = sz.stepfunction_from_json(_load_json(args.g), dk=phi.dk) if args.g \
        else StepFunction.zero(phi.dk)
    times = _parse_times(args.times)
    traj = weak_trajectory(phi, f, g, times, h)

    rng = np.random.default_rng(args.seed)
    rpt = Report(meta={"seed": args.seed})
    checks = [c.strip() for c in args.check.split(",") if c.strip()] if args.check else []
    for name in checks:
        if name not in SIMULATE_CHECKS:
            raise QsconvError(f"unknown check {name!r}; choose from {', '.join(SIMULATE_CHECKS)}")
    for name in checks:
        if name == "increment":
            s, t = rng.uniform(0.1, 1.0, size=2)
            rpt.extend(check_convolution_increment(phi, f, g, float(s), float(t), h), "increment_")
        elif name == "gram":
            fams = [random_step_function(phi.dk, rng) for _ in range(3)]
            basis = [np.eye(h.dim)[i % h.dim] for i in range(3)]
            cert = gram_positivity(phi, 0.5, fams, basis, h)
            rpt.add_flag("gram_positivity", cert.is_psd,
                         max(0.0, -cert.min_eigenvalue), cert.tolerance_used)
        elif name == "contractivity":
            fams = [random_step_function(phi.dk, rng) for _ in range(3)]
            cert = contractivity_gram(phi, 0.5, fams, h)
            rpt.add_flag("contractivity_gram", cert.is_psd,
                         max(0.0, -cert.min_eigenvalue), cert.tolerance_used)
        elif name == "semigroup":
            rpt.extend(semigroup_consistency(phi, times, h), "semigroup_")
        elif name == "dilation":
            tup = extract_tuple(phi, h)
            result = dilate(tup, h)
            rpt.extend(result.report, "dilation_")
            rpt.extend(dilation_process_check(result.psi, phi, f, g, max(times), h),
                       "dilation_")
        elif name == "stinespring":
            tup = extract_tuple(phi, h)
            b = random_contraction(tup.dk, tup.K_dim, rng)
            data = verify_stinespring_identity(tup, b, h)
            rpt.extend(data.report, "stinespring_")
            fbig = random_step_function(data.psi.dk, rng)
            gbig = random_step_function(data.psi.dk, rng)
            horizon = max(max(times), fbig.support_end(), gbig.support_end())
            rpt.extend(stinespring_process_check(data.psi, phi, fbig, gbig,
                                                 min(1.0, max(times)), horizon, h),
                       "stinespring_")

    payload = _report_payload("simulate", rpt)
    payload["trajectory"] = sz.trajectory_to_json(traj)
    _emit(payload, args.out)
    if args.out:
        _emit(_report_payload("simulate", rpt))
    return 0 if rpt.passed else 1


def cmd_fixtures(args):
    if args.action == "list":
        _emit({"fixtures": fx.fixtures()})
        return 0
    if args.action == "dump":
        if not args.name:
            raise QsconvError("dump requires a fixture name")
        _emit(fx.fixture_json(args.name), args.out)
        return 0
    raise QsconvError(f"unknown fixtures action {args.action!r}")


def build_parser():
    p = argparse.ArgumentParser(prog="qsconv",
                                description="verification lab for quantum stochastic "
                                            "convolution cocycles on finite hyperbialgebras")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check hyperbialgebra axioms of an algebra JSON")
    v.add_argument("algebra")
    v.add_argument("--tol", type=float, default=1e-10)
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("expectation", help="build and verify a conditional expectation")
    e.add_argument("kind", choices=["double-coset", "delsarte"])
    e.add_argument("spec")
    e.add_argument("-o", "--out")
    e.add_argument("--tol", type=float, default=1e-10)
    e.set_defaults(func=cmd_expectation)

    g = sub.add_parser("generator", help="generator pipelines")
    gsub = g.add_subparsers(dest="subcommand", required=True)
    ga = gsub.add_parser("analyze", help="CPC decision, tuple extraction, homomorphism check")
    ga.add_argument("--algebra", required=True)
    ga.add_argument("--gen", required=True)
    ga.add_argument("--tol", type=float, default=EQ_TOL)
    ga.set_defaults(func=cmd_generator_analyze)

    d = sub.add_parser("dilate", help="construct the *-homomorphic dilation")
    d.add_argument("--algebra", required=True)
    d.add_argument("--gen", required=True)
    d.add_argument("-o", "--out")
    d.add_argument("--tol", type=float, default=EQ_TOL)
    d.set_defaults(func=cmd_dilate)

    s = sub.add_parser("stinespring", help="generator-level Stinespring decomposition")
    s.add_argument("--algebra", required=True)
    s.add_argument("--gen", required=True)
    s.add_argument("--contraction", help="JSON matrix for the contraction B")
    s.add_argument("-o", "--out")
    s.add_argument("--tol", type=float, default=EQ_TOL)
    s.set_defaults(func=cmd_stinespring)

    m = sub.add_parser("simulate", help="weak-solution trajectory plus optional checks")
    m.add_argument("--algebra", required=True)
    m.add_argument("--gen", required=True)
    m.add_argument("--f", help="step function JSON (defaults to 0)")
    m.add_argument("--g", help="step function JSON (defaults to 0)")
    m.add_argument("--times", required=True, help="t0:t1:dt")
    m.add_argument("--check", help="comma list: " + ",".join(SIMULATE_CHECKS))
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("-o", "--out")
    m.set_defaults(func=cmd_simulate)

    f = sub.add_parser("fixtures", help="embedded example set")
    f.add_argument("action", choices=["list", "dump"])
    f.add_argument("name", nargs="?")
    f.add_argument("-o", "--out")
    f.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    start = time.perf_counter()
    try:
        code = args.func(args)
    except QsconvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        elapsed = time.perf_counter() - start
        print(f"wall_time_s: {elapsed:.3f}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
