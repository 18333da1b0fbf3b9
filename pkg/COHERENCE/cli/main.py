import argparse
import logging
import math
import os
import sys
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, TextIO

from ..core.artifact_writer import ArtifactWriter, render_table, rows_to_csv, to_jsonl
from ..core.audit import (
    Condition,
    ConditionVerdict,
    audit_random,
    check_b3,
    check_c1,
    check_c2a,
    check_c2b,
    check_c3,
    check_extended_c2b,
    check_mixedness_tradeoff,
    check_purity_bound,
    summarize,
)
from ..core.errors import AlphaOutOfRange, CoherenceError, MatrixFormatError, NotIncoherent
from ..core.measures import (
    CoherenceReport,
    Method,
    relative_entropy_coherence,
    renyi_coherence,
    tsallis_coherence,
)
from ..core.progress_reporter import ProgressReporter
from ..core.qubit import qubit_c2, qubit_params_from_state
from ..core.sampling import RNG_ALGORITHM
from ..core.scenarios import SCENARIOS, SweepTable, reproduce
from ..utils.matrix_io import load_channel, load_ensemble, load_state
from ..utils.settings import configure, load_settings

COHERENCE_CONFIG = os.getenv("COHERENCE_CONFIG")

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_INVALID = 2
EXIT_ALPHA = 3
EXIT_NOT_INCOHERENT = 4

MEASURES = ("renyi", "tsallis", "relent", "c2_qubit")
CHECK_CONDITIONS = {
    "c1": Condition.C1,
    "c2a": Condition.C2a,
    "c2b": Condition.C2b,
    "c3": Condition.C3,
    "b3": Condition.B3,
    "extc2b": Condition.ExtC2b,
    "purity": Condition.PurityBound,
    "tradeoff": Condition.MixednessTradeoff,
}
CHANNEL_CONDITIONS = (Condition.C2a, Condition.C2b, Condition.ExtC2b)
ENSEMBLE_CONDITIONS = (Condition.C3, Condition.B3)

logger = logging.getLogger(__name__)


def parse_grid(spec: str) -> List[float]:
    """
    Expand "start:stop:step" into an inclusive grid.

    Raises
    ------
    ValueError
        On a malformed spec, a non-positive step or stop < start
    """
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must look like start:stop:step, got {spec!r}")
    start, stop, step = (float(p) for p in parts)
    if not step > 0.0 or stop < start:
        raise ValueError(f"invalid grid {spec!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def _alphas(args: argparse.Namespace) -> Optional[List[float]]:
    if getattr(args, "alpha_grid", None):
        return parse_grid(args.alpha_grid)
    if getattr(args, "alpha", None) is not None:
        return [args.alpha]
    return None


class CommandHandlers:
    """Handles the compute, check, reproduce and audit subcommands."""

    def __init__(
        self,
        artifact_writer: ArtifactWriter,
        progress_reporter: ProgressReporter,
        stdout: Optional[TextIO] = None,
    ):
        """
        Initialize CommandHandlers.

        Parameters
        ----------
        artifact_writer : ArtifactWriter
            Writer for --out files
        progress_reporter : ProgressReporter
            Reporter for sweep and audit progress
        stdout : TextIO
            Stream for results when no --out is given
        """
        self.artifact_writer = artifact_writer
        self.progress_reporter = progress_reporter
        self.stdout = stdout or sys.stdout

    def _write_stdout(self, content: str) -> int:
        self.stdout.write(content)
        self.stdout.flush()
        return EXIT_OK

    def _emit(self, content: str, out: Optional[str]) -> int:
        if not out:
            return self._write_stdout(content)
        result = self.artifact_writer.write_text(out, content)
        return EXIT_OK if result["success"] else EXIT_INVALID

    def _emit_records(self, records: Iterable[Mapping[str, Any]], out: Optional[str]) -> int:
        if not out:
            return self._write_stdout(to_jsonl(records))
        result = self.artifact_writer.write_jsonl(out, records)
        return EXIT_OK if result["success"] else EXIT_INVALID

    def _emit_table(self, table: SweepTable, fmt: str, out: Optional[str]) -> int:
        if not out:
            return self._write_stdout(render_table(table, fmt))
        result = self.artifact_writer.write_table(out, table, fmt)
        return EXIT_OK if result["success"] else EXIT_INVALID

    def handle_compute(self, args: argparse.Namespace) -> int:
        rho = load_state(args.state)
        alphas = _alphas(args)

        reports: List[CoherenceReport] = []
        if args.measure == "relent":
            reports.append(relative_entropy_coherence(rho))
        elif args.measure == "c2_qubit":
            params = qubit_params_from_state(rho)
            general = renyi_coherence(rho, 2.0)
            reports.append(
                CoherenceReport(
                    value=qubit_c2(params),
                    alpha=2.0,
                    optimizer=general.optimizer,
                    method=Method.CLOSED_FORM,
                    diagnostics={"a": params.a, "b_abs": abs(params.b)},
                )
            )
        else:
            if not alphas:
                raise AlphaOutOfRange(f"--measure {args.measure} needs --alpha or --alpha-grid")
            quantifier = renyi_coherence if args.measure == "renyi" else tsallis_coherence
            for alpha in alphas:
                if alpha == 1.0:
                    logger.error("alpha = 1 is excluded; use --measure relent for the limit")
                reports.append(quantifier(rho, alpha))

        if args.format == "csv":
            lines = rows_to_csv(("alpha", "value"), [(r.alpha, r.value) for r in reports])
            return self._emit("\n".join(lines) + "\n", args.out)
        return self._emit_records([r.to_dict() for r in reports], args.out)

    def _prepare_check(
        self, condition: Condition, args: argparse.Namespace
    ) -> Callable[[float], ConditionVerdict]:
        """Load the inputs of a condition once and return its checker over α."""
        if condition in ENSEMBLE_CONDITIONS:
            ensemble = load_ensemble(args.state)
            if condition == Condition.C3:
                return lambda alpha: check_c3(ensemble, alpha)
            if len(ensemble) != 2:
                raise MatrixFormatError(f"b3 needs a two-member ensemble, got {len(ensemble)}")
            (p1, rho1), (_, rho2) = ensemble
            return lambda alpha: check_b3(rho1, rho2, p1, alpha)

        rho = load_state(args.state)
        if condition in CHANNEL_CONDITIONS:
            if not args.channel:
                raise ValueError(f"{condition.value} needs --channel")
            channel = load_channel(args.channel)
            if condition == Condition.C2a:
                return lambda alpha: check_c2a(rho, channel, alpha)
            if condition == Condition.C2b:
                return lambda alpha: check_c2b(rho, channel, alpha)
            sigma = load_state(args.sigma) if args.sigma else None
            return lambda alpha: check_extended_c2b(rho, channel, alpha, sigma=sigma)
        if condition == Condition.C1:
            return lambda alpha: check_c1(rho, alpha)
        if condition == Condition.PurityBound:
            return lambda alpha: check_purity_bound(rho, alpha)
        return lambda alpha: check_mixedness_tradeoff(rho, alpha)

    def handle_check(self, args: argparse.Namespace) -> int:
        condition = CHECK_CONDITIONS[args.condition]
        alphas = _alphas(args)
        if not alphas:
            raise AlphaOutOfRange("check needs --alpha or --alpha-grid")

        checker = self._prepare_check(condition, args)
        verdicts: List[ConditionVerdict] = [checker(alpha) for alpha in alphas]
        for verdict in verdicts:
            if verdict.violated:
                logger.info(
                    f"{verdict.condition.value} violated at alpha={verdict.alpha}: "
                    f"lhs={verdict.lhs:.12g} rhs={verdict.rhs:.12g}"
                )
        code = self._emit_records([v.to_dict() for v in verdicts], args.out)
        if code != EXIT_OK:
            return code
        return EXIT_FINDINGS if any(v.violated for v in verdicts) else EXIT_OK

    def handle_reproduce(self, args: argparse.Namespace) -> int:
        kwargs: Dict[str, object] = {}
        alphas = _alphas(args)
        if args.scenario == "fig3":
            if args.a_grid:
                kwargs["a_grid"] = parse_grid(args.a_grid)
        elif alphas:
            kwargs["alpha_grid"] = alphas
        if args.b is not None and args.scenario in ("fig1", "extc2b"):
            kwargs["b"] = complex(args.b)

        table: SweepTable = reproduce(args.scenario, self.progress_reporter, **kwargs)
        return self._emit_table(table, args.format, args.out)

    def handle_audit(self, args: argparse.Namespace) -> int:
        conditions = [CHECK_CONDITIONS[c] for c in args.condition] if args.condition else None
        verdicts = audit_random(
            dimension=args.d,
            n_trials=args.trials,
            alpha_grid=_alphas(args),
            seed=args.seed,
            family=args.family,
            conditions=conditions,
            workers=args.workers,
            progress_reporter=self.progress_reporter,
        )
        summary = summarize(verdicts)
        summary.update({"d": args.d, "trials": args.trials, "seed": args.seed})
        logger.info(
            f"Audit summary: {summary['violations']} violations, "
            f"worst margin {summary['worst_margin']}, rng {RNG_ALGORITHM}"
        )
        return self._emit_records([v.to_dict() for v in verdicts] + [summary], args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coherence",
        description="Rényi relative entropy of coherence: measures, axiom checks and sweeps",
    )
    parser.add_argument("--config", default=COHERENCE_CONFIG, help="YAML settings file")
    sub = parser.add_subparsers(dest="command", required=True)

    def alpha_options(p: argparse.ArgumentParser):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--alpha", type=float)
        group.add_argument("--alpha-grid", help="start:stop:step, inclusive")

    def output_options(p: argparse.ArgumentParser, formats: Sequence[str]):
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=formats, default=formats[0])

    compute = sub.add_parser("compute", help="evaluate a coherence quantifier")
    compute.add_argument("--state", required=True)
    compute.add_argument("--measure", choices=MEASURES, default="renyi")
    alpha_options(compute)
    output_options(compute, ("json", "csv"))

    check = sub.add_parser("check", help="check one condition on given inputs")
    check.add_argument("--state", required=True, help="state, or ensemble for c3/b3")
    check.add_argument("--channel")
    check.add_argument("--sigma", help="reference incoherent state for extc2b")
    check.add_argument("--condition", choices=tuple(CHECK_CONDITIONS), required=True)
    alpha_options(check)
    output_options(check, ("json",))

    rep = sub.add_parser("reproduce", help="emit a scenario table")
    rep.add_argument("scenario", choices=SCENARIOS)
    rep.add_argument("--b", help="channel amplitude for fig1/extc2b, e.g. 1 or 0.5+0.5j")
    rep.add_argument("--a-grid", help="start:stop:step for fig3")
    alpha_options(rep)
    output_options(rep, ("csv", "json"))

    audit = sub.add_parser("audit", help="check conditions on seeded random trials")
    audit.add_argument("--d", type=int, required=True)
    audit.add_argument("--trials", type=int, default=100)
    audit.add_argument("--seed", type=int, default=0)
    audit.add_argument("--family", choices=("random", "counterexample"), default="random")
    audit.add_argument(
        "--condition", action="append", choices=tuple(CHECK_CONDITIONS), default=None
    )
    audit.add_argument("--workers", type=int, default=None)
    alpha_options(audit)
    output_options(audit, ("json",))
    return parser


def main(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None) -> int:
    """
    Run the command line.

    Returns
    -------
    int
        0 ok, 1 violations found, 2 invalid input or I/O failure,
        3 α out of range, 4 coherent channel where an incoherent one is needed
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID

    try:
        settings = load_settings(config_path=args.config)
    except (OSError, ValueError) as e:
        logging.basicConfig(stream=sys.stderr, level=logging.ERROR, force=True)
        logger.error(f"Failed to load settings: {e}")
        return EXIT_INVALID
    configure(settings)
    logging.basicConfig(stream=sys.stderr, level=settings.logging_level, force=True)

    handlers = CommandHandlers(ArtifactWriter(), ProgressReporter(scope=args.command), stdout)
    dispatch: Dict[str, Callable[[argparse.Namespace], int]] = {
        "compute": handlers.handle_compute,
        "check": handlers.handle_check,
        "reproduce": handlers.handle_reproduce,
        "audit": handlers.handle_audit,
    }

    try:
        return dispatch[args.command](args)
    except AlphaOutOfRange as e:
        logger.error(str(e))
        return EXIT_ALPHA
    except NotIncoherent as e:
        logger.error(str(e))
        return EXIT_NOT_INCOHERENT
    except (CoherenceError, ValueError, OSError) as e:
        logger.error(str(e))
        return EXIT_INVALID
    finally:
        configure(None)


if __name__ == "__main__":
    sys.exit(main())
