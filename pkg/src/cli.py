"""
Command Line Interface
Batch subcommands for constants, domain geometry, condition checks, scans,
implication verification and the operator-identity test
"""

import csv
import io
import json
import logging
import math
import sys
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from conditions import MKPair, TheoremId, threshold_constants
from domain_catalog import DomainKind, TargetDomain
from errors import InvalidJanowskiParams, SubordinationError, UsageError
from series_core import GridSpec, OperatorParams, operator_identity_report
from verifier import FamilySpec

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

SIGNIFICANT_DIGITS = 9


def round_significant(value):
    """Round every float in a nested structure to 9 significant digits"""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return value
        return float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(value, dict):
        return {key: round_significant(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_significant(item) for item in value]
    return value


def csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{SIGNIFICANT_DIGITS}g}"
    if isinstance(value, list):
        return ";".join(csv_cell(item) for item in value)
    return str(value)


def flatten_record(data, prefix: str = "") -> List[Tuple[str, object]]:
    """Dotted field/value pairs of a nested report; empty containers keep their field"""
    items = list(data.items()) if isinstance(data, dict) else list(enumerate(data))
    if not items:
        return [(prefix.rstrip("."), None)]
    rows = []
    for key, value in items:
        name = f"{prefix}{key}"
        if isinstance(value, (dict, list)):
            rows.extend(flatten_record(value, name + "."))
        else:
            rows.append((name, value))
    return rows


class SubordinationCLI:
    """Dispatches parsed arguments to the toolkit and writes artifacts"""

    def __init__(self, system):
        self.system = system

    def run(self, args) -> int:
        """Run one subcommand; returns the exit code"""
        handlers = {
            'constants': self.handle_constants,
            'boundary': self.handle_boundary,
            'enclosing-disk': self.handle_enclosing_disk,
            'check': self.handle_check,
            'scan': self.handle_scan,
            'verify': self.handle_verify,
            'identity': self.identity_test,
            'demo': self.handle_demo,
        }
        handler = handlers.get(args.command)
        if handler is None:
            print(f"error: unknown command {args.command!r}", file=sys.stderr)
            return EXIT_USAGE
        try:
            return handler(args)
        except UsageError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
        except SubordinationError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
        except ValueError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE

    # Output

    def emit(self, args, data, rows: Optional[Iterable[Sequence]] = None,
             header: Optional[List[str]] = None, default_format: str = 'json'):
        """Write JSON, or CSV when rows are available and requested"""
        fmt = args.format or default_format
        if fmt == 'csv':
            if rows is None:
                raise UsageError("--format", "csv is not available for this command")
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([csv_cell(cell) for cell in row])
            text = buffer.getvalue()
        else:
            text = json.dumps(round_significant(data), indent=2) + "\n"
        if args.out:
            with open(args.out, 'w') as f:
                f.write(text)
            logger.info("Wrote %s", args.out)
        else:
            sys.stdout.write(text)

    def emit_record(self, args, data: Dict):
        """Nested report as JSON, or as field/value CSV rows carrying the same data"""
        self.emit(args, data, rows=flatten_record(data), header=['field', 'value'])

    # Argument helpers

    def _domain(self, args, kind_flag: str = 'domain') -> TargetDomain:
        kind = DomainKind(getattr(args, kind_flag))
        if kind is DomainKind.JANOWSKI:
            if args.C is None or args.D is None:
                raise UsageError("--C/--D", "janowski needs both, with -1 < D < C <= 1")
            try:
                return TargetDomain.janowski(args.C, args.D)
            except InvalidJanowskiParams:
                raise UsageError("--C/--D", f"need -1 < D < C <= 1, got C={args.C}, D={args.D}")
        return TargetDomain(kind)

    def _theorem(self, args) -> TheoremId:
        h = self._domain(args, 'h')
        return TheoremId(DomainKind(args.target), args.order, h)

    def _params(self, args, order: int) -> OperatorParams:
        for flag in ('beta1', 'beta2', 'beta3'):
            value = getattr(args, flag)
            if value is not None and (not math.isfinite(value) or value < 0):
                raise UsageError(f"--{flag}", f"must be a finite number >= 0, got {value}")
        if args.beta1 is None or args.beta2 is None:
            raise UsageError("--beta1/--beta2", "both are required")
        if order == 3 and args.beta3 is None:
            raise UsageError("--beta3", "required for order 3 (>= 0)")
        return OperatorParams(args.beta1, args.beta2, args.beta3)

    def _mk(self, args) -> MKPair:
        if not args.k >= args.m >= 2:
            raise UsageError("--m/--k", f"need k >= m >= 2, got m={args.m}, k={args.k}")
        return MKPair(args.m, args.k)

    def _grid(self, args) -> GridSpec:
        defaults = self.system.config
        radius = args.radius if args.radius is not None else defaults.grid_radius
        radial = args.radial_steps if args.radial_steps is not None else defaults.radial_steps
        angular = args.angular_steps if args.angular_steps is not None else defaults.angular_steps
        if not 0 < radius <= 0.999:
            raise UsageError("--radius", "must lie in (0, 0.999]")
        if radial < 1:
            raise UsageError("--radial-steps", "must be >= 1")
        if angular < 16:
            raise UsageError("--angular-steps", "must be >= 16")
        return GridSpec(radius, radial, angular)

    # Handlers

    def handle_constants(self, args) -> int:
        constants = threshold_constants()
        self.emit(args, constants, rows=list(constants.items()), header=['name', 'value'])
        return EXIT_OK

    def handle_boundary(self, args) -> int:
        if args.samples < 8:
            raise UsageError("--samples", "must be >= 8")
        domain = self._domain(args)
        catalog = self.system.domain_catalog
        values = catalog.boundary(domain, args.samples)
        thetas = catalog.boundary_thetas(args.samples)
        rows = [(float(t), float(w.real), float(w.imag)) for t, w in zip(thetas, values)]
        data = [{'theta': t, 're': re, 'im': im} for t, re, im in rows]
        self.emit(args, data, rows=rows, header=['theta', 're', 'im'], default_format='csv')
        return EXIT_OK

    def handle_enclosing_disk(self, args) -> int:
        disk = self.system.domain_catalog.enclosing_disk(self._domain(args))
        data = disk.to_dict()
        rows = [(data['center'][0], data['center'][1], data['radius'])]
        self.emit(args, data, rows=rows, header=['center_re', 'center_im', 'radius'])
        return EXIT_OK

    def handle_check(self, args) -> int:
        theorem = self._theorem(args)
        params = self._params(args, theorem.order)
        mk = self._mk(args) if theorem.order == 3 else None
        report = self.system.condition_evaluator.evaluate(theorem, params, mk)
        self.emit_record(args, report.to_dict())
        return EXIT_OK if report.holds else EXIT_FAILED

    def handle_scan(self, args) -> int:
        theorem = self._theorem(args)
        if args.resolution < 2:
            raise UsageError("--resolution", "must be >= 2")
        for low, high, flag in ((args.beta1_min, args.beta1_max, '--beta1-min/--beta1-max'),
                                (args.beta2_min, args.beta2_max, '--beta2-min/--beta2-max')):
            if not 0 <= low <= high:
                raise UsageError(flag, "need 0 <= min <= max")
        if theorem.order == 3 and (args.beta3 is None or args.beta3 < 0):
            raise UsageError("--beta3", "required for order 3 (>= 0)")
        mk = self._mk(args) if theorem.order == 3 else None
        scan = self.system.condition_evaluator.region_scan(
            theorem, (args.beta1_min, args.beta1_max), (args.beta2_min, args.beta2_max),
            args.resolution, beta3=args.beta3, mk=mk, workers=args.workers)
        # JSON carries the same rows as the fixed CSV layout
        self.emit(args, scan.to_dict()['rows'], rows=list(scan.rows()),
                  header=['beta1', 'beta2', 'margin', 'holds'], default_format='csv')
        return EXIT_OK

    def handle_verify(self, args) -> int:
        theorem = self._theorem(args)
        params = self._params(args, theorem.order)
        mk = self._mk(args) if theorem.order == 3 else None
        family = FamilySpec.named(args.family, seed=self.system.config.seed)
        grid = self._grid(args)
        verifier = self.system.implication_verifier
        if args.search:
            findings = verifier.counterexample_search(theorem, params, family, grid, mk)
            data = {'theorem': theorem.to_dict(), 'params': params.to_dict(),
                    'family': family.to_dict(), 'findings': [f.to_dict() for f in findings]}
            self.emit_record(args, data)
            return EXIT_OK if not findings else EXIT_FAILED
        report = verifier.implication_test(theorem, params, mk, family, grid)
        self.emit_record(args, report.to_dict())
        return EXIT_OK if report.sound else EXIT_FAILED

    def identity_test(self, args) -> int:
        """Compare the starlike formula with the operator on random normalized functions"""
        if args.trials < 1:
            raise UsageError("--trials", "must be >= 1")
        if not 1 <= args.degree <= self.system.config.series_order:
            raise UsageError("--degree", f"must lie in [1, {self.system.config.series_order}]")
        if args.compare < 1:
            raise UsageError("--compare", "must be >= 1")
        order = 3 if args.which == 'Thetaf' else 2
        beta3 = args.beta3 if args.beta3 is not None else (1.0 if order == 3 else None)
        params = OperatorParams(args.beta1 if args.beta1 is not None else 1.0,
                                args.beta2 if args.beta2 is not None else 1.0, beta3)
        report = operator_identity_report(
            args.which, trials=args.trials, degree=args.degree, seed=self.system.config.seed,
            params=params, compare=args.compare, variant=args.variant,
            order=self.system.config.series_order)
        self.emit_record(args, report.to_dict())
        return EXIT_OK if report.passes(self.system.config.coefficient_tolerance) else EXIT_FAILED

    def handle_demo(self, args) -> int:
        self.system.run_demo()
        return EXIT_OK
