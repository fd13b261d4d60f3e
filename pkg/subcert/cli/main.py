#!/usr/bin/env python3
"""
subcert command line
Batch front-end: analyze | verify | weights | wick | example.

Exit codes: 0 success, 2 condition not satisfied, 3 input error,
4 numerical failure.
"""

import argparse
import sys
import time
from typing import Any, Dict, List, Optional, Sequence

from dotenv import load_dotenv

# Load environment variables before the settings module reads them
load_dotenv()

EXIT_OK = 0
EXIT_NOT_SATISFIED = 2


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from exc


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default=None, help="Report format (default: config report.format)")
    common.add_argument("--output", "-o", default=None, help="Write the report to PATH atomically")
    common.add_argument("--verbose", "-v", action="count", default=0, help="More logging (-v info, -vv debug)")
    common.add_argument("--seed", type=int, default=None, help="Sampling seed (default: SUBCERT_SEED)")
    common.add_argument("--tol", type=float, default=None, help="Relative rank tolerance (default: SUBCERT_TOL)")
    common.add_argument("--timings", action="store_true", help="Include wall-clock timings in the report")

    parser = argparse.ArgumentParser(
        prog="subcert",
        description="subcert - certify subelliptic estimates for systems of quadratic operators",
    )
    parser.add_argument("--version", action="store_true", help="Show version and exit")
    sub = parser.add_subparsers(dest="command")

    analyze = sub.add_parser("analyze", parents=[common], help="Kernel tower, k0 and loss of derivatives")
    analyze.add_argument("file", help="System JSON file")
    analyze.add_argument("--kmax", type=int, default=None, help="Tower depth limit (default: 2n)")

    verify = sub.add_parser("verify", parents=[common], help="Rayleigh-quotient probe of the estimate")
    verify.add_argument("file", help="System JSON file")
    verify.add_argument("--levels", type=_int_list, default=None, help="Truncation levels, e.g. 8,16,24,32")
    verify.add_argument("--k0", type=int, default=None, help="Override k0 (default: from the tower)")
    verify.add_argument("--guard", type=int, default=None, help="Guard levels (default: config verifier.guard)")
    verify.add_argument("--exponents", type=_float_list, default=None, help="Sharpness scan exponents in [0, 1]")
    verify.add_argument("--kmax", type=int, default=None, help="Tower depth limit (default: 2n)")

    weights = sub.add_parser("weights", parents=[common], help="Weight construction and constant search")
    weights.add_argument("file", help="System JSON file")
    weights.add_argument("--m", type=int, default=None, help="Weight level (default: max(k0, 1))")
    weights.add_argument("--samples", type=int, default=None, help="Random directions per radius")
    weights.add_argument("--radius", type=float, default=None, help="Largest sample radius")
    weights.add_argument("--lemmas", action="store_true", help="Also sample the lemma catalogue")

    wick = sub.add_parser("wick", parents=[common], help="Wick corrections and positivity")
    wick.add_argument("file", help="System JSON file")
    wick.add_argument("--level", type=int, default=8, help="Hermite truncation level (default: 8)")

    example = sub.add_parser("example", parents=[common], help="Emit a named example system")
    example.add_argument("name", help="sec13 | elliptic | ladder | degenerate | chain")
    example.add_argument("--n", type=int, default=None, help="Dimension n")
    example.add_argument("--lambdas", type=_float_list, default=None, help="Weights of q_1..q_{n-1} (sec13)")
    example.add_argument("--lambdas-tilde", type=_float_list, default=None, help="Weights of q~_1..q~_{n-1} (sec13)")

    return parser


# ── Commands ─────────────────────────────────────────────────────────────────


def cmd_analyze(args) -> Dict[str, Any]:
    from subcert.cli.system_file import load_system
    from subcert.core.singular import VERDICT_SATISFIED, certify

    system = load_system(args.file)
    result = certify(system, kmax=args.kmax, tol=args.tol, seed=args.seed)
    payload = result.to_dict()
    code = EXIT_OK if result.certificate.verdict == VERDICT_SATISFIED else EXIT_NOT_SATISFIED
    return {"payload": payload, "exit_code": code}


def _probe_k0(system, args) -> int:
    import logging

    from subcert.core.singular import system_tower

    if args.k0 is not None:
        return args.k0
    tower, _ = system_tower(system, kmax=args.kmax, tol=args.tol)
    if tower.k0 is None:
        k0 = max(len(tower.levels) - 1, 1)
        logging.getLogger("subcert.cli").warning("Condition not satisfied; probing with k0 = %d", k0)
        return k0
    return tower.k0


def cmd_verify(args) -> Dict[str, Any]:
    from subcert.cli.system_file import load_system
    from subcert.config import section
    from subcert.verifier.probe import EstimateProbe, sharpness_scan, subellipticity_constant

    system = load_system(args.file)
    cfg = section("verifier")
    probe = EstimateProbe(
        system,
        _probe_k0(system, args),
        levels=args.levels or list(cfg["levels"]),
        guard=args.guard if args.guard is not None else int(cfg["guard"]),
    )
    report = subellipticity_constant(probe)
    payload: Dict[str, Any] = {"k0": probe.k0, "probe": report.to_dict()}
    if args.exponents:
        payload["sharpness"] = [r.to_dict() for r in sharpness_scan(probe, args.exponents)]
    code = EXIT_NOT_SATISFIED if report.decaying else EXIT_OK
    return {"payload": payload, "exit_code": code}


def cmd_weights(args) -> Dict[str, Any]:
    from subcert.cli.system_file import load_system
    from subcert.errors import NumericalFailure
    from subcert.weights.lemmas import LEMMAS, lemma_sampler
    from subcert.weights.search import SampleRegion, constant_search

    system = load_system(args.file)
    region = SampleRegion.default(system.n, directions=args.samples, radius_max=args.radius, seed=args.seed)
    outcome = constant_search(system, m=args.m, region=region)
    payload: Dict[str, Any] = {"search": outcome.to_dict()}

    if args.lemmas and outcome.assembly is not None:
        lemmas = {}
        for name, spec in LEMMAS.items():
            try:
                if spec.adapted:
                    reports = [
                        lemma_sampler(name, system, region, outcome.assembly, j=j).to_dict()
                        for j in range(outcome.m - 1)
                    ]
                    if reports:
                        lemmas[name] = reports
                else:
                    lemmas[name] = lemma_sampler(name, system, region, outcome.assembly).to_dict()
            except NumericalFailure as exc:
                lemmas[name] = {"skipped": str(exc)}
        payload["lemmas"] = lemmas

    code = EXIT_OK if outcome.success else EXIT_NOT_SATISFIED
    return {"payload": payload, "exit_code": code}


def cmd_wick(args) -> Dict[str, Any]:
    from scipy import linalg

    from subcert.cli.system_file import load_system
    from subcert.quantization.hermite import Convention, HermiteBasis
    from subcert.quantization.symbols import PolynomialSymbol
    from subcert.quantization.wick import wick_correction, wick_quantize

    system = load_system(args.file)
    basis = HermiteBasis(system.n, args.level, Convention.BODY)
    forms = []
    positive = True
    for name, q in zip(system.names, system.forms):
        a = PolynomialSymbol.from_quadratic_form(q)
        re_part = PolynomialSymbol.from_quadratic_form(q.real_part())
        block = wick_quantize(re_part, basis).hermitian_part().interior_block()
        spectrum = linalg.eigvalsh(block)
        positive &= bool(spectrum[0] >= -1e-8)
        forms.append({
            "name": name,
            "correction_appendix": wick_correction(a, Convention.APPENDIX),
            "correction_body": wick_correction(a, Convention.BODY),
            "re_part_min_eigenvalue": float(spectrum[0]),
            "re_part_spectrum_head": [float(v) for v in spectrum[: min(6, spectrum.size)]],
            "interior_dim": int(block.shape[0]),
        })
    payload = {"level": args.level, "forms": forms, "wick_positive": positive}
    return {"payload": payload, "exit_code": EXIT_OK}


def cmd_example(args) -> Dict[str, Any]:
    from subcert.cli.system_file import emit_system, system_to_dict
    from subcert.core.examples import build_example

    kwargs = {}
    if args.name == "sec13":
        if args.lambdas is not None:
            kwargs["lambdas"] = args.lambdas
        if args.lambdas_tilde is not None:
            kwargs["lambdas_tilde"] = args.lambdas_tilde
    system = build_example(args.name, args.n, **kwargs)
    return {"payload": system_to_dict(system), "exit_code": EXIT_OK, "raw": emit_system(system)}


COMMANDS = {
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "weights": cmd_weights,
    "wick": cmd_wick,
    "example": cmd_example,
}


def _arguments(args) -> Dict[str, Any]:
    skip = {"command", "output", "verbose", "format", "timings"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point."""
    from rich.console import Console
    from rich.markup import escape

    from subcert import __version__
    from subcert.cli.report import Report, render, write_output
    from subcert.config import section, settings
    from subcert.errors import SubcertError
    from subcert.log import setup_logging

    parser = build_parser()
    args = parser.parse_args(argv)

    if args.version:
        print(f"subcert v{__version__}")
        return EXIT_OK
    if not args.command:
        parser.print_help()
        return EXIT_OK

    level = {0: settings.LOG_LEVEL, 1: "INFO"}.get(args.verbose, "DEBUG")
    setup_logging(level)
    console = Console()
    err_console = Console(stderr=True)
    report_cfg = section("report")
    fmt = args.format or report_cfg["format"]
    seed = args.seed if args.seed is not None else int(section("sampling")["seed"])

    start = time.perf_counter()
    try:
        outcome = COMMANDS[args.command](args)
    except SubcertError as exc:
        where = ""
        location = getattr(exc, "location", None)
        if callable(location) and location():
            where = f" ({location()})"
        err_console.print(f"[red]error[/red] " + escape(f"[{exc.kind}]{where}: {exc}"), highlight=False)
        return exc.exit_code

    if args.command == "example" and fmt == "text":
        text = outcome["raw"]
    else:
        timings = None
        if args.timings or report_cfg.get("timings"):
            timings = {"total_seconds": round(time.perf_counter() - start, 6)}
        report = Report(
            command=args.command,
            arguments=_arguments(args),
            payload=outcome["payload"],
            seed=seed,
            exit_code=outcome["exit_code"],
            timings=timings,
        )
        text = render(report, fmt, console)

    if args.output:
        write_output(text, args.output)
    else:
        console.file.write(text)
    return outcome["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
