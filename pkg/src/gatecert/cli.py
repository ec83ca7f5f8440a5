"""Command-line front end: ``gatecert {pguess,certify,sweep,estimate,kak}``.

Exit codes: 0 success, 1 verification or consistency failure, 2 usage error.
"""
import argparse
import csv
import json
import os
import re
import sys

import numpy as np

from . import canonical, certify, discrimination
from .channels import DepolarizingGateChannel, apply
from .gates import NAMED_GATES, GateFileError, load_gate, named_gate
from .qcore import ket, proj

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
PGUESS_TOL = 1e-8
SWEEP_TOL = 1e-10
CSV_HEADER = ["p", "q", "exact", "analytic", "mc_est", "stderr", "trials"]

_FLOAT_MARK = re.compile(r'"@@f:([^"@]*)@@"')


class UsageError(Exception):
    pass


def _mark_floats(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        return f"@@f:{format(float(obj), '.17g')}@@"
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _mark_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_mark_floats(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    text = json.dumps(_mark_floats(obj), indent=2)
    return _FLOAT_MARK.sub(lambda m: m.group(1), text)


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _complex_array(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in a]
    return [_complex_array(row) for row in a]


def protocol_to_dict(protocol) -> dict:
    return {
        "input": _complex_array(protocol.input),
        "alice_basis": [_complex_array(v) for v in protocol.alice_basis],
        "bob_basis": [_complex_array(v) for v in protocol.bob_basis],
        "accept_outcome": f"{protocol.accept_outcome[0]}{protocol.accept_outcome[1]}",
    }


def derive_seed(seed: int, index: int) -> int:
    ss = np.random.SeedSequence(entropy=seed & ((1 << 64) - 1), spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


def _probability(text):
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {x}")
    return x


def _positive_int(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {n}")
    return n


def _bits(text):
    if len(text) != 2 or set(text) - {"0", "1"}:
        raise argparse.ArgumentTypeError(f"input must be a two-bit label like 01, got {text!r}")
    return text


def _default_seed():
    raw = os.environ.get("GATECERT_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"GATECERT_SEED must be an integer, got {raw!r}") from None


def _resolve_gate(args) -> np.ndarray:
    if args.gate_file is not None:
        try:
            return load_gate(args.gate_file)
        except GateFileError as exc:
            raise UsageError(f"load error: {exc}") from None
    return named_gate(args.gate)


def _protocol(gate, args):
    if getattr(args, "input", None):
        try:
            return certify.protocol_for_input(gate, ket(args.input))
        except ValueError as exc:
            raise UsageError(f"--input {args.input}: {exc}") from None
    return certify.build_protocol(gate)


def cmd_pguess(args, out) -> int:
    gate = _resolve_gate(args)
    protocol = _protocol(gate, args)
    q, p = args.q, args.p
    rho0 = proj(gate @ protocol.input)
    rho1 = apply(DepolarizingGateChannel(gate, p), proj(protocol.input))
    values = {
        "analytic": discrimination.analytic_guessing(q, p),
        "helstrom_numeric": discrimination.helstrom_numeric(rho0, rho1, q),
        "exact_locc": certify.locc_guessing(protocol, q, p),
    }
    reg = discrimination.regime(q, p)
    spread = max(values.values()) - min(values.values())
    flags = ["degenerate_p"] if p == 0.0 else []
    if args.json:
        out.write(dumps({**values, "regime": reg.value, "q": q, "p": p, "flags": flags}) + "\n")
    else:
        for k, v in values.items():
            out.write(f"{k}: {_fmt(v)}\n")
        out.write(f"regime: {reg.value}\n")
        if flags:
            out.write(f"flags: {','.join(flags)}\n")
    if spread > PGUESS_TOL:
        sys.stderr.write(f"values disagree by {spread:.3g}\n")
        return EXIT_FAIL
    return EXIT_OK


def cmd_certify(args, out) -> int:
    gate = _resolve_gate(args)
    protocol = _protocol(gate, args)
    config = certify.CertificationConfig(
        q=args.q, p=args.p, trials=args.trials, seed=args.seed, threads=args.threads
    )
    report = certify.run_certification(protocol, config)
    payload = report.to_dict()
    payload["stderr_estimator"] = "binomial"
    payload["protocol"] = protocol_to_dict(protocol)
    out.write(dumps(payload) + "\n")
    return EXIT_OK


def sweep_points(start: float, end: float, step: float) -> list:
    if step <= 0:
        raise UsageError("--p-step must be positive")
    if end < start:
        raise UsageError("--p-end must not be below --p-start")
    n = int(np.floor((end - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(n)]


def run_sweep(gate, protocol, q, points, trials, seed, threads=1) -> list:
    rows = []
    for k, p in enumerate(points):
        if not 0.0 <= p <= 1.0:
            raise UsageError(f"p = {p} outside [0, 1]")
        config = certify.CertificationConfig(
            q=q, p=p, trials=trials, seed=derive_seed(seed, k), threads=threads
        )
        rep = certify.run_certification(protocol, config)
        rows.append(
            {
                "p": p,
                "q": q,
                "exact": certify.exact_locc_guessing(protocol, q, p),
                "analytic": discrimination.analytic_guessing(q, p),
                "mc_est": rep.p_guess_est,
                "stderr": rep.p_guess_stderr,
                "trials": trials,
            }
        )
    rows.sort(key=lambda r: r["p"])
    return rows


def cmd_sweep(args, out) -> int:
    gate = _resolve_gate(args)
    protocol = _protocol(gate, args)
    points = sweep_points(args.p_start, args.p_end, args.p_step)
    rows = run_sweep(gate, protocol, args.q, points, args.trials, args.seed, args.threads)
    try:
        fh = out if args.out == "-" else open(args.out, "w", newline="")
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
    try:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(CSV_HEADER)
        for r in rows:
            writer.writerow([repr(float(r[k])) if k != "trials" else r[k] for k in CSV_HEADER])
    finally:
        if fh is not out:
            fh.close()
    # the simulated protocol always measures, so only Measure rows must match
    bad = [
        r for r in rows
        if discrimination.regime(r["q"], r["p"]) is discrimination.Regime.MEASURE
        and abs(r["exact"] - r["analytic"]) > SWEEP_TOL
    ]
    if bad:
        sys.stderr.write(f"{len(bad)} sweep rows disagree with the analytic bound\n")
        return EXIT_FAIL
    return EXIT_OK


def cmd_estimate(args, out) -> int:
    gate = _resolve_gate(args)
    protocol = _protocol(gate, args)
    counts, (p_est, stderr) = certify.simulate_noise_estimate(
        protocol, args.p_true, args.trials, args.seed, args.threads
    )
    payload = {
        "p_true": args.p_true,
        "p_est": p_est,
        "stderr": stderr,
        "in_range": 0.0 <= p_est <= 1.0,
        "counts": counts,
        "accept_outcome": f"{protocol.accept_outcome[0]}{protocol.accept_outcome[1]}",
        "trials": args.trials,
        "seed": args.seed,
    }
    out.write(dumps(payload) + "\n")
    return EXIT_OK


def cmd_kak(args, out) -> int:
    gate = _resolve_gate(args)
    kak = canonical.kak_decompose(gate)
    pair = canonical.find_product_pair(gate)
    residual = kak.residual(gate)
    verified = bool(
        residual < canonical.KAK_TOL
        and pair.input_schmidt_residual < canonical.SEPARABLE_TOL
        and pair.output_schmidt_residual < canonical.SEPARABLE_TOL
    )
    payload = {
        "lambdas": [float(x) for x in kak.lambdas],
        "ua": _complex_array(kak.ua),
        "ub": _complex_array(kak.ub),
        "va": _complex_array(kak.va),
        "vb": _complex_array(kak.vb),
        "residual": residual,
        "product_pair": {
            "input": _complex_array(pair.input),
            "output": _complex_array(pair.output),
            "input_factors": [_complex_array(v) for v in pair.input_factors],
            "output_factors": [_complex_array(v) for v in pair.output_factors],
            "input_schmidt_residual": pair.input_schmidt_residual,
            "output_schmidt_residual": pair.output_schmidt_residual,
        },
        "verified": verified,
    }
    out.write(dumps(payload) + "\n")
    return EXIT_OK if verified else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gatecert", description="Single-copy certification of two-qubit gates."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gate_opts = argparse.ArgumentParser(add_help=False)
    grp = gate_opts.add_mutually_exclusive_group()
    grp.add_argument("--gate", default="cnot", choices=sorted(NAMED_GATES))
    grp.add_argument("--gate-file", default=None, help="JSON gate file")

    run_opts = argparse.ArgumentParser(add_help=False)
    run_opts.add_argument("--trials", type=_positive_int, default=100_000)
    run_opts.add_argument("--seed", type=int, default=None, help="default: $GATECERT_SEED or 0")
    run_opts.add_argument("--threads", type=_positive_int, default=1)
    run_opts.add_argument("--input", type=_bits, default=None, help="computational product input, e.g. 11")

    p = sub.add_parser("pguess", parents=[gate_opts], help="guessing probabilities for (q, p)")
    p.add_argument("--q", type=_probability, required=True)
    p.add_argument("--p", type=_probability, required=True)
    p.add_argument("--input", type=_bits, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_pguess)

    p = sub.add_parser("certify", parents=[gate_opts, run_opts], help="Monte Carlo certification run")
    p.add_argument("--q", type=_probability, default=0.5)
    p.add_argument("--p", type=_probability, required=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("sweep", parents=[gate_opts, run_opts], help="guessing probability versus p (CSV)")
    p.add_argument("--q", type=_probability, default=0.5)
    p.add_argument("--p-start", type=float, default=0.0)
    p.add_argument("--p-end", type=float, default=1.0)
    p.add_argument("--p-step", type=float, default=0.1)
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("estimate", parents=[gate_opts, run_opts], help="estimate the noise fraction")
    p.add_argument("--p-true", type=_probability, required=True)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("kak", parents=[gate_opts], help="canonical decomposition and product pair")
    p.set_defaults(func=cmd_kak)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"gatecert: error: {exc}\n")
        return EXIT_USAGE
    except canonical.DecompositionError as exc:
        sys.stderr.write(f"gatecert: verification failure: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
