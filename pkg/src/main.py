"""
Main System Coordinator
Ties the toolkit components together and provides the command-line entry point
"""

import argparse
import logging
import sys
from typing import Dict, List, Optional

from admissibility import AdmissibilityChecker
from cli import SubordinationCLI
from conditions import ConditionEvaluator, TheoremId, all_theorems, threshold_constants
from config import ToolkitConfig
from domain_catalog import DomainCatalog, DomainKind, TargetDomain
from series_core import OperatorParams
from verifier import FamilyKind, FamilySpec, ImplicationVerifier

logger = logging.getLogger(__name__)


class SubordinationToolkit:
    """Main coordinator for the subordination toolkit"""

    def __init__(self, config: Optional[ToolkitConfig] = None):
        """Initialize all components"""
        self.config = config or ToolkitConfig()
        logger.info("Initializing subordination toolkit...")

        self.domain_catalog = DomainCatalog(self.config)
        self.admissibility_checker = AdmissibilityChecker(self.config)
        self.condition_evaluator = ConditionEvaluator(self.config)
        self.implication_verifier = ImplicationVerifier(self.config)

        self._setup_manager_references()
        logger.info("Toolkit initialized")

    def _setup_manager_references(self):
        """Set up cross-references between components"""
        self.implication_verifier.set_managers(self.domain_catalog, self.condition_evaluator)

    def run_demo(self):
        """Short tour: constants, one condition and one implication test"""
        print("\nSubordination Toolkit - Demo")
        print("=" * 50)

        print("1. Constants:")
        for name, value in threshold_constants().items():
            print(f"   {name:10s} {value:.9g}")

        print("2. Enclosing disks:")
        for kind in (DomainKind.SINE, DomainKind.PETAL, DomainKind.CARDIOID):
            disk = self.domain_catalog.enclosing_disk(TargetDomain(kind))
            print(f"   {kind.value:10s} |w - 1| < {disk.radius:.9g}")

        print("3. Condition check:")
        theorem = TheoremId.of('sine', 2, 'lemniscate')
        params = OperatorParams(5.0, 0.1)
        report = self.condition_evaluator.evaluate(theorem, params)
        print(f"   {theorem.label}: holds={report.holds} margin={report.margin:.9g}")

        print("4. Implication test over the linear family:")
        implication = self.implication_verifier.implication_test(
            theorem, params, family=FamilySpec(FamilyKind.LINEAR))
        print(f"   premises true: {implication.premise_true_count}/{implication.family_size}, "
              f"violations: {len(implication.implication_violations)}")

        print("Demo completed successfully!")

    def get_system_status(self) -> Dict:
        """Component configuration summary"""
        return {
            'theorems': len(all_theorems()),
            'domains': len(DomainKind),
            'boundary_samples': self.config.boundary_samples,
            'cached_boundaries': len(self.domain_catalog.boundary_cache),
            'grid': self.implication_verifier.default_grid().to_dict(),
        }


def _add_theorem_args(parser: argparse.ArgumentParser, with_params: bool = True):
    parser.add_argument('--target', choices=['sine', 'petal'], required=True,
                        help='Conclusion target q')
    parser.add_argument('--order', type=int, choices=[2, 3], default=2, help='Operator order')
    parser.add_argument('--h', choices=[k.value for k in DomainKind], required=True,
                        help='Majorant domain h')
    parser.add_argument('--C', type=float, help='Janowski C')
    parser.add_argument('--D', type=float, help='Janowski D')
    if with_params:
        parser.add_argument('--beta1', type=float, help='beta1 >= 0')
        parser.add_argument('--beta2', type=float, help='beta2 >= 0')
    parser.add_argument('--beta3', type=float, help='beta3 >= 0 (order 3)')
    parser.add_argument('--m', type=int, default=2, help='m >= 2 (order 3)')
    parser.add_argument('--k', type=int, default=2, help='k >= m (order 3)')


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per command"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--out', help='Write the artifact to this path instead of stdout')
    common.add_argument('--format', choices=['json', 'csv'], help='Artifact format')
    common.add_argument('--seed', type=int, help='Seed for random families')
    common.add_argument('--tolerance', type=float, help='Coefficient comparison tolerance')
    common.add_argument('--config', help='JSON file with toolkit settings')
    common.add_argument('--verbose', action='store_true', help='Debug logging on stderr')

    parser = argparse.ArgumentParser(
        description="Subordination toolkit - constants, conditions and numerical verification",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py constants
  python main.py boundary --domain sine --samples 4096
  python main.py check --target sine --order 2 --h lemniscate --beta1 5 --beta2 0.1
  python main.py scan --target petal --h crescent --beta1-max 10 --beta2-max 5
  python main.py verify --target sine --h lemniscate --beta1 5 --beta2 0.1 --family linear
  python main.py identity --which Sf --trials 100 --degree 12
        """
    )
    sub = parser.add_subparsers(dest='command', required=True)

    sub.add_parser('constants', parents=[common], help='Extremal and threshold constants')

    for name, help_text in (('boundary', 'Boundary samples of a domain'),
                            ('enclosing-disk', 'Enclosing disk about 1')):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument('--domain', choices=[k.value for k in DomainKind], required=True)
        p.add_argument('--C', type=float, help='Janowski C')
        p.add_argument('--D', type=float, help='Janowski D')
        if name == 'boundary':
            p.add_argument('--samples', type=int, default=4096, help='Number of samples (>= 8)')

    check = sub.add_parser('check', parents=[common], help='Evaluate one condition')
    _add_theorem_args(check)

    scan = sub.add_parser('scan', parents=[common], help='Raster scan of a condition')
    _add_theorem_args(scan, with_params=False)
    scan.add_argument('--beta1-min', type=float, default=0.0)
    scan.add_argument('--beta1-max', type=float, default=10.0)
    scan.add_argument('--beta2-min', type=float, default=0.0)
    scan.add_argument('--beta2-max', type=float, default=5.0)
    scan.add_argument('--resolution', type=int, default=101, help='Samples per axis (>= 2)')
    scan.add_argument('--workers', type=int, help='Threads for row evaluation')

    verify = sub.add_parser('verify', parents=[common], help='Implication test over a family')
    _add_theorem_args(verify)
    verify.add_argument('--family', choices=[k.value for k in FamilyKind], default='builtin')
    verify.add_argument('--radius', type=float)
    verify.add_argument('--radial-steps', type=int)
    verify.add_argument('--angular-steps', type=int)
    verify.add_argument('--search', action='store_true',
                        help='Report counterexample findings instead of the implication report')

    identity = sub.add_parser('identity', parents=[common], help='Operator identity test')
    identity.add_argument('--which', choices=['Sf', 'Thetaf'], required=True)
    identity.add_argument('--trials', type=int, default=100)
    identity.add_argument('--degree', type=int, default=12)
    identity.add_argument('--compare', type=int, default=8, help='Leading coefficients compared')
    identity.add_argument('--variant', choices=['printed', 'reconciled'], default='printed')
    identity.add_argument('--beta1', type=float)
    identity.add_argument('--beta2', type=float)
    identity.add_argument('--beta3', type=float)

    sub.add_parser('demo', parents=[common], help='Short demonstration')
    return parser


def load_config(args) -> ToolkitConfig:
    config = ToolkitConfig.from_json(args.config) if args.config else ToolkitConfig()
    return config.with_overrides(seed=args.seed, coefficient_tolerance=args.tolerance,
                                 workers=getattr(args, 'workers', None))


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args)
    except (OSError, ValueError) as e:
        print(f"error: --config/--seed/--tolerance: {e}", file=sys.stderr)
        return 2
    system = SubordinationToolkit(config)
    return SubordinationCLI(system).run(args)


if __name__ == "__main__":
    sys.exit(main())
