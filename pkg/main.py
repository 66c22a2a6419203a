#!/usr/bin/env python3
"""
galband - Main Entry Point
Band structure, exact eigenstates, SUSY partners and Heun data for the
PT-symmetric generalized associated Lame potentials.
"""

import os
import sys
import json
import time
import argparse
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError

# Add project root to Python path
sys.path.append(str(Path(__file__).parent))

from config import Config
from schema import GALSpec, QESState, RunConfig
from modules.catalog import QESCatalog
from modules.gal import eval_potential, line_points, period_grid
from modules.heun import coefficient_round_trip, gal_to_heun, heun_residual
from modules.spectral import FloquetOracle, default_energy_window
from modules.states import schrodinger_residual
from modules.susy import SusyPartnerBuilder
from pipeline.processor import VerificationProcessor, parse_suite
from utils.exceptions import ConfigurationError, DomainError, GalbandError, UnsupportedFamilyError
from utils.logger import set_log_level, setup_logger

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

FLOAT_FORMAT = "%.15g"


def _split_complex(name: str, value: complex) -> Dict[str, float]:
    value = complex(value)
    return {f"{name}_re": value.real, f"{name}_im": value.imag}


class GalbandApp:
    """Main application class for galband"""

    def __init__(self, run_config: RunConfig):
        self.config = Config()
        self.logger = setup_logger('galband_main')
        self.run_config = run_config
        self.oracle = FloquetOracle(run_config.rtol, run_config.atol, run_config.edge_tol)
        self.catalog = QESCatalog()
        self.susy = SusyPartnerBuilder(self.oracle)
        self.commands = {
            "eval": self.run_eval,
            "bands": self.run_bands,
            "catalog": self.run_catalog,
            "susy": self.run_susy,
            "heun": self.run_heun,
            "verify": self.run_verify,
        }

    @property
    def summary_stream(self):
        """Summaries go to stderr whenever data is streamed to stdout"""
        return sys.stdout if self.run_config.output else sys.stderr

    def setup_directories(self):
        """Create necessary directories if they don't exist"""
        directories = [self.config.LOGS_DIR]
        if self.run_config.output:
            directories.append(Path(self.run_config.output).parent)
        for directory in directories:
            os.makedirs(directory, exist_ok=True)
            self.logger.debug(f"Directory ensured: {directory}")

    def _companion_path(self, suffix: str, extension: Optional[str] = None) -> Optional[Path]:
        if not self.run_config.output:
            return None
        path = Path(self.run_config.output)
        return path.with_name(f"{path.stem}_{suffix}{extension or path.suffix}")

    def write_table(self, records: Sequence[Dict[str, Any]], path: Optional[Path] = None) -> None:
        """
        Write flat records as CSV or JSON

        Args:
            records: One dict per row, complex values already split
            path: Target file (stdout when None)
        """
        frame = pd.DataFrame(list(records))
        if self.run_config.format == "json":
            text = json.dumps(frame.to_dict(orient="records"), indent=2, sort_keys=True) + "\n"
        else:
            text = frame.to_csv(index=False, float_format=FLOAT_FORMAT)
        if path is None:
            sys.stdout.write(text)
        else:
            Path(path).write_text(text, encoding="utf-8")
            self.logger.info(f"Wrote {len(frame)} rows to {path}")

    def write_document(self, document: Dict[str, Any], path: Optional[Path]) -> None:
        text = json.dumps(document, indent=2, sort_keys=True, default=str) + "\n"
        if path is None:
            sys.stdout.write(text)
        else:
            Path(path).write_text(text, encoding="utf-8")
            self.logger.info(f"Wrote {path}")

    def _window(self, spec: GALSpec):
        e_min, e_max = default_energy_window(spec)
        return (self.run_config.emin if self.run_config.emin is not None else e_min,
                self.run_config.emax if self.run_config.emax is not None else e_max)

    def _states(self, spec: GALSpec) -> List[QESState]:
        rc = self.run_config
        if rc.midband_case is not None:
            _, states = self.catalog.midband(rc.midband_case, rc.t, rc.n, rc.split, rc.level, rc.m, rc.beta)
            return states
        return self.catalog.states(spec)

    def _spec(self) -> GALSpec:
        rc = self.run_config
        if rc.midband_case is not None:
            spec, _ = self.catalog.midband(rc.midband_case, rc.t, rc.n, rc.split, rc.level, rc.m, rc.beta)
            return spec
        return rc.spec()

    def _selected(self, states: List[QESState]) -> List[QESState]:
        index = self.run_config.state
        if index is None:
            return states
        if index >= len(states):
            raise ConfigurationError(f"state index {index} out of range (catalog has {len(states)} states)",
                                     field="state")
        return [states[index]]

    def run_eval(self) -> int:
        spec = self._spec()
        x = period_grid(spec, self.run_config.grid)
        V = eval_potential(spec, x)
        records = [{"x": xi, **_split_complex("V", vi)} for xi, vi in zip(x, V)]
        self.write_table(records, self.run_config.output)
        self._print_summary("POTENTIAL SAMPLES", [
            f"Potential: {spec.bracket}  m={spec.m}  beta={spec.beta:.15g}",
            f"Period: {spec.period:.15g}",
            f"Samples: {len(records)}",
            f"max |Im V|: {float(np.max(np.abs(V.imag))):.3e}",
        ])
        return EXIT_OK

    def run_bands(self) -> int:
        spec = self._spec()
        e_min, e_max = self._window(spec)
        structure = self.oracle.classify_bands(spec, e_min, e_max, self.run_config.scan_points)
        tangencies = set(structure.tangencies)
        edges = [{"edge": E, "kind": "tangency" if E in tangencies else "edge"} for E in structure.edges]
        energies = np.linspace(e_min, e_max, self.run_config.grid)
        curve = [{"E": s.E, **_split_complex("delta", s.delta)}
                 for s in self.oracle.discriminant_curve(spec, energies)]

        self.write_table(edges, self.run_config.output)
        if self.run_config.output:
            self.write_table(curve, self._companion_path("curve"))
            self.write_document(structure.model_dump(), self._companion_path("structure", ".json"))

        self._print_summary("BAND STRUCTURE", [
            f"Potential: {spec.bracket}  m={spec.m}",
            f"Window: [{e_min:.6g}, {e_max:.6g}]",
            f"Edges: {', '.join(f'{E:.10g}' for E in structure.edges) or 'none'}",
            f"Open gaps: {structure.gap_count}  closed gaps: {len(structure.tangencies)}",
            f"PT broken: {structure.broken_pt}",
        ])
        return EXIT_OK

    def _heun_columns(self, spec: GALSpec, state: QESState) -> Dict[str, float]:
        try:
            return {"heun_residual": heun_residual(gal_to_heun(spec, state.energy), state, spec)}
        except GalbandError as e:
            self.logger.warning(f"Heun residual unavailable for {state.provenance}: {str(e)}")
            return {"heun_residual": np.nan}

    def run_catalog(self) -> int:
        spec = self._spec()
        states = self._states(spec)
        records = []
        for index, state in enumerate(states):
            record = {"state": index, **state.as_record()}
            record["residual"] = schrodinger_residual(state, spec)
            record.update(self._heun_columns(spec, state))
            record["fit_quality"] = state.fit_quality if state.fit_quality is not None else np.nan
            records.append(record)
        self.write_table(records, self.run_config.output)

        worst = max((r["residual"] for r in records), default=0.0)
        lines = [f"Potential: {spec.bracket}  m={spec.m}", f"States: {len(records)}",
                 f"Worst residual: {worst:.3e}"]
        lines.extend(f"  [{r['state']}] E = {r['energy_re']:.12g}{r['energy_im']:+.3g}i  {r['provenance']}"
                     for r in records)
        self._print_summary("QES CATALOG", lines)
        return EXIT_OK

    def run_susy(self) -> int:
        rc = self.run_config
        spec = self._spec()
        states = self._states(spec)
        if not states:
            raise UnsupportedFamilyError(f"{spec.bracket} has no exact state to factorize with")
        state = self._selected(states)[0]
        profile = self.susy.partner_profile(state, spec)
        records = [
            {"x": x, **_split_complex("V_plus", v), **_split_complex("W", w), **_split_complex("W_prime", wp)}
            for x, v, w, wp in zip(profile.grid, profile.values, profile.superpotential,
                                   profile.superpotential_prime)
        ]
        report = self.susy.isospectrality_report(spec, state, rc.emin, rc.emax)
        identified = self.susy.identify_gal(profile)

        self.write_table(records, rc.output)
        document = report.model_dump()
        document["factorization_energy"] = _split_complex("E", state.energy)
        document["identified_partner"] = identified[0].as_record() if identified else None
        document["convention"] = profile.constant_offset_convention
        self.write_document(document, self._companion_path("report", ".json") if rc.output else None)

        self._print_summary("SUSY PARTNER", [
            f"Potential: {spec.bracket}  m={spec.m}",
            f"Factorization state: {state.provenance}  E = {state.energy.real:.12g}",
            f"Partner: {identified[0].bracket if identified else 'outside the GAL family'}",
            f"Edge discrepancy: {report.max_discrepancy:.3e}  (agree: {report.agree})",
        ])
        return EXIT_OK

    def run_heun(self) -> int:
        spec = self._spec()
        states = self._selected(self._states(spec))
        y = line_points(spec, period_grid(spec, 16))
        records = []
        for index, state in enumerate(states):
            hp = gal_to_heun(spec, state.energy)
            first, zeroth = coefficient_round_trip(spec, state.energy, y)
            record = {"state": self.run_config.state if self.run_config.state is not None else index,
                      **_split_complex("energy", state.energy), **hp.as_record(),
                      "constraint_residual": hp.constraint_residual,
                      "complex_exponents": hp.complex_exponents,
                      "round_trip_first": first, "round_trip_zeroth": zeroth}
            record.update(self._heun_columns(spec, state))
            records.append(record)
        self.write_table(records, self.run_config.output)

        constraint = max((r["constraint_residual"] for r in records), default=0.0)
        residual = float(np.nanmax([r["heun_residual"] for r in records])) if records else 0.0
        self._print_summary("HEUN DICTIONARY", [
            f"Potential: {spec.bracket}  m={spec.m}  c = 1/m = {1.0 / spec.m:.12g}",
            f"States: {len(records)}",
            f"Worst constraint residual: {constraint:.3e}",
            f"Worst Heun residual: {residual:.3e}",
        ])
        return EXIT_OK

    def run_verify(self) -> int:
        criteria = parse_suite(self.run_config.suite)
        processor = VerificationProcessor(m=self.run_config.m, residual_tol=self.run_config.residual_tol)
        results = processor.run_suite(criteria)
        if self.run_config.output:
            self.write_table([r.model_dump() for r in results], self.run_config.output)

        failed = [r for r in results if not r.passed]
        print("\n" + "=" * 60)
        print("           GALBAND - VERIFICATION SUMMARY")
        print("=" * 60)
        for r in results:
            metric = "-" if r.metric is None else f"{r.metric:.2e}"
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.id:>2}  {r.name:<40} {metric:>9}  {r.elapsed:6.1f}s")
        print("=" * 60)
        print(f"Passed: {len(results) - len(failed)}/{len(results)}")
        if failed:
            print("\nFailed criteria:")
            for r in failed:
                print(f"  - {r.id} {r.name}: {r.detail}")
        return EXIT_FAILURE if failed else EXIT_OK

    def run(self) -> int:
        """
        Main execution method

        Returns:
            Exit code of the subcommand
        """
        self.setup_directories()
        command = self.run_config.subcommand
        self.logger.info(f"=== galband {command} started ===")
        start_time = time.time()
        code = self.commands[command]()
        self.logger.info(f"=== galband {command} completed in {time.time() - start_time:.2f} seconds ===")
        return code

    def _print_summary(self, title: str, lines: List[str]):
        stream = self.summary_stream
        print("\n" + "=" * 60, file=stream)
        print(f"           GALBAND - {title}", file=stream)
        print("=" * 60, file=stream)
        for line in lines:
            print(line, file=stream)
        print("=" * 60, file=stream)


def build_parser() -> argparse.ArgumentParser:
    """Argument parser; option defaults are suppressed so only explicit flags override the config file"""
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument('--config', '-c', help='JSON file with RunConfig fields')
    common.add_argument('--log-level', help='Logging level (DEBUG, INFO, WARNING, ERROR)')
    for name in ('a', 'b', 'f', 'g'):
        common.add_argument(f'--{name}', type=float, help=f'GAL parameter {name}')
    common.add_argument('--m', type=float, help='Modulus parameter in (0, 1)')
    common.add_argument('--beta', type=float, help='Line offset (default K(m)/2)')
    common.add_argument('--emin', type=float, help='Lower end of the energy window')
    common.add_argument('--emax', type=float, help='Upper end of the energy window')
    common.add_argument('--scan-points', type=int, help='Uniform scan size of the band search')
    common.add_argument('--grid', type=int, help='Sample count for potential and discriminant curves')
    common.add_argument('--rtol', type=float, help='Integrator relative tolerance')
    common.add_argument('--atol', type=float, help='Integrator absolute tolerance')
    common.add_argument('--edge-tol', type=float, help='Band-edge refinement tolerance')
    common.add_argument('--residual-tol', type=float, help='Residual threshold of the verification suite')
    common.add_argument('--state', type=int, help='Catalog state index used by susy/heun')
    common.add_argument('--midband-case', choices=['b_half', 'f_half', 'g_half'],
                        help='Use a mid-band family instead of a, b, f, g')
    common.add_argument('--t', type=float, help='Bloch exponent of the mid-band family')
    common.add_argument('--n', type=int, help='Integer parameter sum N of the mid-band family')
    common.add_argument('--split', type=int, help='First integer parameter of the mid-band family')
    common.add_argument('--level', type=float, help='Mid-band level, 0.5 or 1.5')
    common.add_argument('--suite', help="Criteria to verify: 'all' or a comma list such as 1,2,11")
    common.add_argument('--output', '-o', help='Output file (stdout when omitted)')
    common.add_argument('--format', choices=['csv', 'json'], help='Output format')

    parser = argparse.ArgumentParser(prog='galband',
                                     description='galband - PT-symmetric GAL band structure toolkit')
    subparsers = parser.add_subparsers(dest='subcommand', required=True)
    subparsers.add_parser('eval', parents=[common], help='Sample the potential over one period')
    subparsers.add_parser('bands', parents=[common], help='Band edges, gaps and the discriminant curve')
    subparsers.add_parser('catalog', parents=[common], help='Exact band-edge or mid-band states with residuals')
    subparsers.add_parser('susy', parents=[common], help='SUSY partner profile and isospectrality report')
    subparsers.add_parser('heun', parents=[common], help='Heun parameters and residuals of the catalog states')
    subparsers.add_parser('verify', parents=[common], help='Run the verification suite')
    return parser


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """
    Merge model defaults, the JSON config file and explicit flags (in increasing precedence)

    Raises:
        ConfigurationError: Unreadable config file
        ValidationError: Invalid field values or unknown keys
    """
    flags = vars(args).copy()
    path = flags.pop('config', None)
    flags.pop('log_level', None)
    values: Dict[str, Any] = {}
    if path:
        try:
            values = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"cannot read config file {path}: {str(e)}", field="config")
        if not isinstance(values, dict):
            raise ConfigurationError(f"config file {path} must hold a JSON object", field="config")
    values.update(flags)
    return RunConfig(**values)


def _describe_validation_error(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        field = ".".join(str(part) for part in item.get("loc", ())) or "config"
        parts.append(f"field '{field}': {item.get('msg')}")
    return "; ".join(parts)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, 'log_level', None):
        set_log_level(args.log_level)
    logger = setup_logger('galband_main')

    try:
        run_config = load_run_config(args)
        app = GalbandApp(run_config)
        return app.run()
    except ValidationError as e:
        message = _describe_validation_error(e)
        logger.error(f"Configuration error: {message}")
        print(f"configuration error: {message}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigurationError as e:
        field = f"field '{e.field}': " if e.field else ""
        logger.error(f"Configuration error: {field}{str(e)}")
        print(f"configuration error: {field}{str(e)}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as e:
        logger.error(f"Configuration error: {str(e)}")
        print(f"configuration error: {str(e)}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyboardInterrupt:
        print("\nProcessing interrupted by user", file=sys.stderr)
        return EXIT_FAILURE
    except GalbandError as e:
        logger.error(f"Application error: {str(e)}")
        print(f"error: {str(e)}", file=sys.stderr)
        return EXIT_FAILURE
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
        logger.error(f"Numerical failure: {type(e).__name__}: {str(e)}")
        print(f"error: {type(e).__name__}: {str(e)}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
