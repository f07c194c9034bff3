"""Command-line front end.

Exit codes: 0 when every requested check or budget passes, 1 when a physics
check fails, 2 on malformed input or usage errors.
"""

import argparse
import sys

import numpy as np

from . import __version__, conditions, estimation, measurement, models, search
from .errors import QndError
from .modelfile import ReportDocument, emit_report, parse_model

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _sci(x):
    return f"{x:.5e}"


def _fmt_state(v):
    return "[" + ", ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in v) + "]"


def _print_conditions(reports, out):
    for r in reports:
        mark = "PASS" if r.verdict else "FAIL"
        wit = f"  witness={tuple(r.witness)}" if r.witness else ""
        note = f"  ({r.note})" if r.note else ""
        print(f"  {r.condition:<22} {mark}  violation={_sci(r.violation)}  "
              f"tol={_sci(r.tolerance)}{wit}{note}", file=out)


def _system_hamiltonian(loaded):
    m = loaded.model
    return loaded.h_system if loaded.h_system is not None else np.zeros((m.d_system, m.d_system))


def cmd_check(loaded, condition="all", tol=None, output="human", out=sys.stdout):
    m = loaded.model
    tol = loaded.tolerance if tol is None else tol
    requested = ["strong", "moderate", "weak"] if condition == "all" else [condition]

    if condition == "all":
        chain = conditions.implication_report(m, tol)
    else:
        chain = []
    by_name = {r.condition: r for r in chain}
    if "strong" in requested and "strong" not in by_name:
        by_name["strong"] = conditions.strong_violation(m.u, m.d_system, tol)
    if "moderate" in requested and "moderate" not in by_name:
        by_name["moderate"] = conditions.moderate_violation(m.u, m.b, tol)
    weak = by_name.get("weak") or conditions.weak_violation(m, tol)
    by_name["weak"] = weak

    q = m.system.matrix()
    h_sys = _system_hamiltonian(loaded)
    reports = [by_name[name] for name in requested]
    extra = [conditions.conserve_system(q, h_sys, tol)]
    if loaded.h_interaction is not None:
        extra.append(conditions.conserve_interaction(q, loaded.h_interaction, tol))
        extra.append(conditions.vaidman_violation(q, loaded.h_interaction, m.a, m.b, tol))
    label = conditions.classify_measurement(weak, q, h_sys, tol)
    code = EXIT_OK if all(r.verdict for r in reports) else EXIT_FAIL

    doc = ReportDocument("check", loaded.digest, exit_code=code, conditions=reports + extra,
                         classification=label)
    if output == "machine":
        print(emit_report(doc), file=out)
    else:
        print(f"model: {m.name}  (d_S={m.d_system}, d_P={m.d_probe})  {loaded.digest}", file=out)
        print("requested conditions:", file=out)
        _print_conditions(reports, out)
        print("conservation laws (informational):", file=out)
        _print_conditions(extra, out)
        print(f"classification: {label}", file=out)
    return code, doc


def cmd_estimate(loaded, output="human", out=sys.stdout):
    if not loaded.has_budgets:
        raise UsageError("model file has no budgets {epsilon, i_min}")
    m = loaded.model
    c = measurement.joint_amplitudes(m)
    rep = estimation.evaluate_estimation_report(c, m.q_values, loaded.estimator,
                                                loaded.epsilon, loaded.i_min)
    code = EXIT_OK if rep.ok else EXIT_FAIL
    doc = ReportDocument("estimate", loaded.digest, exit_code=code, estimation=rep)
    if output == "machine":
        print(emit_report(doc), file=out)
    else:
        kind = "conditional mean" if loaded.estimator is None else "table"
        print(f"model: {m.name}  {loaded.digest}", file=out)
        print(f"  estimator ({kind}): {list(np.round(rep.estimator, 6))}", file=out)
        print(f"  bias            {_sci(rep.bias)}", file=out)
        print(f"  squared error   {_sci(rep.squared_error)}  budget eps^2={_sci(rep.epsilon ** 2)}"
              f"  {'PASS' if rep.error_ok else 'FAIL'}", file=out)
        print(f"  information     {rep.info_nats:.6f} nats "
              f"({estimation.nats_to_bits(rep.info_nats):.6f} bits)  I_min={rep.i_min:g}"
              f"  {'PASS' if rep.info_ok else 'FAIL'}", file=out)
    return code, doc


def cmd_simulate(loaded, n=1000, seed=0, output="human", out=sys.stdout):
    if n < 1:
        raise UsageError(f"-n must be >= 1, got {n}")
    m = loaded.model
    c = measurement.joint_amplitudes(m)
    probs = measurement.outcome_distribution(c)
    counts = measurement.sample_outcomes(c, n, seed)
    sampling = {
        "n": int(n),
        "seed": int(seed),
        "counts": [int(x) for x in counts],
        "frequencies": [float(x) / n for x in counts],
        "probabilities": [float(x) for x in probs],
    }
    doc = ReportDocument("simulate", loaded.digest, sampling=sampling)
    if output == "machine":
        print(emit_report(doc), file=out)
    else:
        print(f"model: {m.name}  n={n}  seed={seed}", file=out)
        print(f"  {'j':>3} {'r_j':>10} {'count':>10} {'freq':>10} {'P(r_j)':>10}", file=out)
        for j, (r, k, p) in enumerate(zip(m.probe.values, counts, probs)):
            print(f"  {j:>3} {r:>10g} {k:>10d} {k / n:>10.6f} {p:>10.6f}", file=out)
    return EXIT_OK, doc


def cmd_search(loaded, target="weak", restarts=8, seed=0, output="human", out=sys.stdout):
    m = loaded.model
    if target == "weak":
        res = search.max_weak_violation(m.u, m.b, restarts, seed)
        what = "measured state maximizing the weak violation"
    elif target == "moderate":
        res = search.probe_design_search(m.u, restarts, seed, "moderate", d_system=m.d_system)
        what = "probe state minimizing the moderate violation"
    elif target == "probe":
        res = search.probe_design_search(m.u, restarts, seed, "weak", a=m.a)
        what = "probe state minimizing the weak violation for the file's measured state"
    else:
        raise UsageError(f"unknown target {target!r}")
    doc = ReportDocument("search", loaded.digest, search=res)
    if output == "machine":
        print(emit_report(doc), file=out)
    else:
        print(f"model: {m.name}  target={target}  restarts={restarts}  seed={seed}", file=out)
        print(f"  {what}", file=out)
        print(f"  best state      {_fmt_state(res.best_state)}", file=out)
        print(f"  |amplitudes|^2  {list(np.round(np.abs(res.best_state) ** 2, 6))}", file=out)
        print(f"  best violation  {_sci(res.best_value)}", file=out)
        print(f"  trace           min={_sci(min(res.trace))} max={_sci(max(res.trace))}", file=out)
    return EXIT_OK, doc


def cmd_demo(output="human", out=sys.stdout):
    rows = []
    code = EXIT_OK
    for desc in models.gallery():
        m = desc.model
        reps = {
            "strong": conditions.strong_violation(m.u, m.d_system),
            "moderate": conditions.moderate_violation(m.u, m.b),
            "weak": conditions.weak_violation(m),
        }
        got = {k: r.verdict for k, r in reps.items()}
        match = got == desc.expected_profile
        code = code if match else EXIT_FAIL
        info = estimation.mutual_information(measurement.joint_amplitudes(m))
        rows.append((desc, reps, match, info))
    if output == "machine":
        doc = ReportDocument("demo", "", exit_code=code,
                             conditions=[r for _, reps, _, _ in rows for r in reps.values()])
        print(emit_report(doc), file=out)
        return code, doc
    labels = [desc.name + "(" + ", ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}"
                                          for k, v in desc.params.items()) + ")"
              for desc, _, _, _ in rows]
    w = max(len(x) for x in labels)
    print(f"{'model':<{w}} {'strong':>13} {'moderate':>13} {'weak':>13} {'I [nats]':>9}  profile",
          file=out)
    for label, (desc, reps, match, info) in zip(labels, rows):
        cells = [f"{'ok' if r.verdict else 'x'} {r.violation:.1e}" for r in reps.values()]
        print(f"{label:<{w}} {cells[0]:>13} {cells[1]:>13} {cells[2]:>13} {info:>9.4f}  "
              f"{'matches' if match else 'MISMATCH'}", file=out)
    print(f"\ncounter heuristic ln(1e6/1e2) = "
          f"{estimation.counter_information_heuristic(1e6, 1e2):.4f} nats", file=out)
    return code, None


def build_parser():
    p = argparse.ArgumentParser(prog="qndsim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"qndsim {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("model", help="model file (JSON)")
        sp.add_argument("--output", choices=["human", "machine"], default="human")

    sp = sub.add_parser("check", help="certify weak/moderate/strong conditions")
    common(sp)
    sp.add_argument("--condition", choices=["weak", "moderate", "strong", "all"], default="all")
    sp.add_argument("--tol", type=float, default=None)

    sp = sub.add_parser("estimate", help="bias, squared error and information vs budgets")
    common(sp)

    sp = sub.add_parser("simulate", help="sample read-out outcomes")
    common(sp)
    sp.add_argument("-n", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("search", help="search over measured or probe states")
    common(sp)
    sp.add_argument("--target", choices=["weak", "moderate", "probe"], default="weak")
    sp.add_argument("--restarts", type=int, default=8)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("demo", help="condition-hierarchy table of the builtin models")
    sp.add_argument("--output", choices=["human", "machine"], default="human")
    return p


def run(argv=None, out=sys.stdout, err=sys.stderr):
    """Run the CLI; returns ``(exit_code, ReportDocument or None)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None
    try:
        if args.command == "demo":
            return cmd_demo(args.output, out)
        loaded = parse_model(args.model)
        if args.command == "check":
            return cmd_check(loaded, args.condition, args.tol, args.output, out)
        if args.command == "estimate":
            return cmd_estimate(loaded, args.output, out)
        if args.command == "simulate":
            return cmd_simulate(loaded, args.n, args.seed, args.output, out)
        if args.restarts < 1:
            raise UsageError(f"--restarts must be >= 1, got {args.restarts}")
        return cmd_search(loaded, args.target, args.restarts, args.seed, args.output, out)
    except (UsageError, QndError) as exc:
        print(f"qndsim: error: {exc}", file=err)
        return EXIT_USAGE, None


def main(argv=None):
    sys.exit(run(argv)[0])


if __name__ == "__main__":
    main()
