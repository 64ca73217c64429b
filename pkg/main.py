"""
Main orchestrator for the Optomechanical State Analyzer
Coordinates state characterization, spectrum generation, fitting,
simulation and sweeps, with JSON/CSV output and run manifests
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from optomech_analyzer import __version__
from optomech_analyzer.core import (
    SystemParams,
    TWO_PI,
    PRESETS,
    OptomechError,
    NumericalError,
    GridSpecError,
    exit_code_for,
)
from optomech_analyzer.ingestion import load_psd, load_params
from optomech_analyzer.analysis import (
    BASIS,
    StateMetricsCalculator,
    StateMetrics,
    characterize_group,
    spectrum_grid,
    sideband_peaks,
    symmetrized_bright_psd,
)
from optomech_analyzer.fitting import FitConfig, SpectrumFitter, FitResult
from optomech_analyzer.simulation import (
    SimConfig,
    integrate,
    covariance_estimate,
    bright_mode_signal,
    welch_psd,
)
from optomech_analyzer.sweep import overlap_sweep, grid_sweep, OverlapLaw
from optomech_analyzer.export import (
    RunManifest,
    write_json,
    write_table_csv,
    write_spectrum_csv,
    export_fit_to_excel,
    export_metrics_to_excel,
    plot_spectrum,
    plot_psd_comparison,
    plot_overlap_map,
)
from optomech_analyzer.utils import (
    banner,
    format_sig,
    format_with_errors,
    format_hz,
    format_angle_deg,
)


logger = logging.getLogger('optomech_analyzer.cli')


class OptomechAnalyzer:
    """
    Runs one command end to end and prints its progress
    """

    def __init__(self, threads: int = 1, quiet: bool = False):
        self.threads = max(int(threads), 1)
        self.quiet = quiet

    def _say(self, text: str = "") -> None:
        if not self.quiet:
            print(text)

    def _finish(self, manifest: RunManifest, outputs: Sequence[Optional[Path]]) -> None:
        written = [Path(p) for p in outputs if p is not None]
        for path in written:
            manifest.add_output(path)
            self._say(f"  Wrote {path}")
        if written:
            manifest.write(written[0])

    # ===================
    # STATE
    # ===================

    def run_state(self, params: SystemParams, out: Optional[Path] = None,
                  excel: Optional[Path] = None, inputs: Sequence[Path] = (),
                  label: str = "configuration") -> Dict:
        """
        Steady state and every state metric of one configuration
        """
        self._say(banner("STEADY-STATE CHARACTERIZATION"))

        self._say("\nStep 1: Solving the Lyapunov equation...")
        calculator = StateMetricsCalculator(params)
        state = calculator.steady_state
        self._say(f"  Spectral abscissa: {format_sig(state.stability.spectral_abscissa)} rad/s")
        self._say(f"  Relative residual: {format_sig(state.residual, 3)}")

        self._say("\nStep 2: Computing state metrics...")
        metrics = calculator.calculate_all()
        try:
            angle = calculator.rotated_discord_maximum()
            rotated = {'phi_deg': angle.phi_deg, 'value': angle.value, 'flat': angle.flat}
        except NumericalError as e:
            logger.warning("rotated-frame discord unavailable: %s", e)
            rotated = None
        self.print_metric_table(metrics)
        if rotated:
            self._say(f"  Rotated-frame discord maximum: {format_sig(rotated['value'])} "
                      f"at {format_angle_deg(angle.phi)}")

        record = {
            'params': params.to_hz(),
            'steady_state': state.to_dict(),
            'metrics': metrics.to_dict(),
            'rotated_discord_max': rotated,
        }

        self._say("\nStep 3: Writing results...")
        if out:
            write_json(out, record)
        if excel:
            export_metrics_to_excel({label: metrics}, excel)
        self._finish(RunManifest.create('state', params.to_hz(), inputs), [out, excel])
        return record

    def print_metric_table(self, metrics: StateMetrics) -> None:
        rows = [
            ('Occupancy n_x', metrics.n_x),
            ('Occupancy n_y', metrics.n_y),
            ('Purity', metrics.purity),
            ('Purity (independent modes)', metrics.purity_independent),
            ('Purity difference', metrics.purity_difference),
            ('Discord X<-Y', metrics.discord_x_from_y),
            ('Discord Y<-X', metrics.discord_y_from_x),
            ('Discord (symmetrized)', metrics.discord_sym),
            ('Mutual information', metrics.mutual_information),
            ('Ground-state probability P(0,0)', metrics.p00),
            ('Overlap s', metrics.overlap_s),
        ]
        self._say("\n" + "=" * 60)
        self._say(f"{'Metric':<40}{'Value':>20}")
        self._say("-" * 60)
        for name, value in rows:
            self._say(f"{name:<40}{format_sig(value):>20}")
        self._say("=" * 60)

    # ===================
    # SPECTRUM
    # ===================

    def run_spectrum(self, params: SystemParams, f_min: float, f_max: float, n_points: int,
                     out: Optional[Path] = None, shot_subtracted: bool = False,
                     mirrored: bool = False, classical_only: bool = False,
                     inputs: Sequence[Path] = (), plot: Optional[Path] = None) -> pd.DataFrame:
        """Heterodyne spectrum and its decomposition on a uniform grid"""
        self._say(banner("HETERODYNE SPECTRUM"))

        self._say(f"\nStep 1: Evaluating {n_points} points in [{format_hz(f_min)}, {format_hz(f_max)}]...")
        decomposition = spectrum_grid(
            params, f_min, f_max, n_points,
            shot_subtracted=shot_subtracted,
            include_quantum=not classical_only,
            mirrored=mirrored,
        )
        for name, (freq, height) in sideband_peaks(decomposition, params).items():
            self._say(f"  {name} peak: {format_sig(height)} at {format_hz(freq)}")

        self._say("\nStep 2: Writing results...")
        if out:
            write_spectrum_csv(out, decomposition)
        if plot:
            plot_spectrum(decomposition, plot)
        config = {
            'params': params.to_hz(), 'f_min_hz': f_min, 'f_max_hz': f_max, 'n_points': n_points,
            'shot_subtracted': shot_subtracted, 'mirrored': mirrored, 'classical_only': classical_only,
        }
        self._finish(RunManifest.create('spectrum', config, inputs), [out, plot])
        return decomposition.to_frame()

    # ===================
    # FIT
    # ===================

    def run_fit(self, data_paths: Sequence[Path], config: FitConfig, config_path: Optional[Path] = None,
                out: Optional[Path] = None, excel: Optional[Path] = None,
                eta_systematic: bool = True, metrics: bool = False) -> FitResult:
        """Fit one acquisition or a group, with the η systematic"""
        self._say(banner("SPECTRUM FIT"))

        self._say("\nStep 1: Loading spectra...")
        data = [load_psd(p) for p in data_paths]
        for spectrum in data:
            self._say(f"  {spectrum.acquisition_id}: {len(spectrum)} bins")

        self._say("\nStep 2: Fitting...")
        fitter = SpectrumFitter(config, self.threads)
        target = data[0] if len(data) == 1 else data
        result = fitter.fit(target)
        self._say(f"  Status: {result.status.value}, rss {format_sig(result.rss)}")

        systematic = None
        if eta_systematic:
            self._say("\nStep 3: Refitting at η ± 5%...")
            systematic = fitter.systematic_eta(target, result)
            result = result.with_systematic(systematic.half_range_hz)

        self.print_fit_table(result)
        if result.other_sideband_rss is not None:
            self._say(f"  Mirrored-window prediction rss: {format_sig(result.other_sideband_rss)}")

        record = {'fit': result.to_dict(), 'config': config.to_dict()}
        if metrics:
            self._say("\nStep 4: Propagating errors into state metrics...")
            report = characterize_group(
                result.params,
                [a.params for a in result.acquisitions],
                systematic.low.params if systematic else None,
                systematic.high.params if systematic else None,
            )
            record['state_metrics'] = report.to_dict()
            for name, err in report.errors.items():
                self._say(f"  {name:<24}{format_with_errors(err.value, err.stat, err.syst)}")

        self._say("\nWriting results...")
        if out:
            write_json(out, record)
        if excel:
            export_fit_to_excel(result, excel)
        inputs = list(data_paths) + ([config_path] if config_path else [])
        self._finish(RunManifest.create('fit', config.to_dict(), inputs), [out, excel])
        return result

    def print_fit_table(self, result: FitResult) -> None:
        self._say("\n" + "=" * 60)
        self._say(f"{'Parameter':<20}{'Value ± stat ± syst (Hz)':>40}")
        self._say("-" * 60)
        for key, value in result.values_hz.items():
            text = format_with_errors(value, result.stat_hz[key], result.syst_hz[key])
            self._say(f"{key:<20}{text:>40}")
        self._say("=" * 60)

    # ===================
    # SIMULATE
    # ===================

    def run_simulate(self, params: SystemParams, sim: SimConfig,
                     out_psd: Optional[Path] = None, out_cov: Optional[Path] = None,
                     inputs: Sequence[Path] = (), plot: Optional[Path] = None) -> Dict:
        """Ensemble simulation, sampled covariance and Welch spectrum of the bright mode"""
        self._say(banner("STOCHASTIC SIMULATION"))

        self._say(f"\nStep 1: Integrating {sim.n_trajectories} trajectories (seed {sim.seed})...")
        ensemble = integrate(params, sim, self.threads)

        self._say("\nStep 2: Sampling the covariance...")
        estimate = covariance_estimate(ensemble)
        calculator = StateMetricsCalculator(params)
        reference = calculator.steady_state.covariance
        with np.errstate(divide='ignore', invalid='ignore'):
            z = np.abs(estimate.covariance - reference) / estimate.stderr
        worst = float(np.nanmax(z)) if np.any(np.isfinite(z)) else float('nan')
        self._say(f"  Samples after burn-in: {estimate.n_samples}")
        self._say(f"  Largest deviation from the Lyapunov solution: {format_sig(worst, 3)} standard errors")

        self._say("\nStep 3: Estimating the bright-mode spectrum...")
        signal = bright_mode_signal(ensemble, params)[:, ensemble.times >= sim.burn_in]
        welch = welch_psd(signal, sim.record_interval, sim.segment_length, sim.overlap, one_sided=True)
        model = 2.0 * symmetrized_bright_psd(TWO_PI * welch.freq_hz, params)
        self._say(f"  {welch.n_segments} segments, resolution {format_hz(welch.resolution_hz)}")

        self._say("\nStep 4: Writing results...")
        psd_table = pd.DataFrame({'freq_hz': welch.freq_hz, 'psd_sim': welch.psd, 'psd_model': model})
        if out_psd:
            write_table_csv(out_psd, psd_table)
        if plot:
            plot_psd_comparison(psd_table, plot)
        record = {
            'basis': list(BASIS),
            'V_sampled': estimate.covariance,
            'stderr': estimate.stderr,
            'V_lyapunov': reference,
            'n_samples': estimate.n_samples,
            'max_deviation_stderr': worst,
        }
        if out_cov:
            write_json(out_cov, record)
        config = {'params': params.to_hz(), 'sim': sim.to_dict()}
        self._finish(RunManifest.create('simulate', config, inputs), [out_psd, out_cov, plot])
        return record

    # ===================
    # SWEEP
    # ===================

    def run_overlap_sweep(self, s_points: int, gamma_points: int, log_gamma: bool = True,
                          s_range: Optional[tuple] = None, out: Optional[Path] = None,
                          plot: Optional[Path] = None) -> pd.DataFrame:
        """Purity / symmetrized discord map over overlap s and decoherence rate"""
        self._say(banner("OVERLAP MAP"))
        self._say(f"\nStep 1: Evaluating {s_points} x {gamma_points} grid...")
        table = overlap_sweep(s_points, gamma_points, OverlapLaw(), s_range, log_gamma, self.threads)
        self._say(f"  Unstable cells: {int(table['unstable'].sum())}")
        self._say(f"  Cells without discord: {int(table['discord_sym'].isna().sum())}")

        self._say("\nStep 2: Writing results...")
        if out:
            write_table_csv(out, table)
        if plot:
            plot_overlap_map(table, plot)
        config = {'s_points': s_points, 'gamma_points': gamma_points, 'log_gamma': log_gamma,
                  's_range': list(s_range) if s_range else None}
        self._finish(RunManifest.create('sweep overlap', config), [out, plot])
        return table

    def run_grid_sweep(self, params: SystemParams, ranges: Dict[str, np.ndarray], metrics: List[str],
                       out: Optional[Path] = None, inputs: Sequence[Path] = ()) -> pd.DataFrame:
        """State metrics over a product grid of Hz-quoted parameters"""
        self._say(banner("GRID SWEEP"))
        size = int(np.prod([len(v) for v in ranges.values()]))
        self._say(f"\nStep 1: Evaluating {size} grid points...")
        table = grid_sweep(ranges, metrics, base=params, threads=self.threads)
        self._say(f"  Unstable cells: {int(table['unstable'].sum())}")

        self._say("\nStep 2: Writing results...")
        if out:
            write_table_csv(out, table)
        config = {'params': params.to_hz(), 'ranges': {k: list(v) for k, v in ranges.items()}, 'metrics': metrics}
        self._finish(RunManifest.create('sweep grid', config, inputs), [out])
        return table


# ===================
# COMMAND LINE
# ===================

class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with code 1 and the machine-readable error line"""

    def error(self, message):
        self.print_usage(sys.stderr)
        report_error('UsageError', 1, message)
        sys.exit(1)


def report_error(kind: str, code: int, message: str) -> None:
    escaped = str(message).replace('\\', '\\\\').replace('"', '\\"').replace('\n', ' ')
    print(f'error kind={kind} exit={code} message="{escaped}"', file=sys.stderr)
    if code == 2:
        print(f"Numerical failure: {message}", file=sys.stderr)
    else:
        print(f"Invalid input: {message}", file=sys.stderr)


def parse_range(text: str) -> tuple:
    """
    KEY=START:STOP:N[:log] -> (KEY, values)

    Raises:
        GridSpecError: On a malformed range
    """
    try:
        key, spec = text.split('=', 1)
        parts = spec.split(':')
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        spacing = parts[3] if len(parts) > 3 else 'lin'
    except (ValueError, IndexError) as e:
        raise GridSpecError(f"range '{text}' must look like KEY=START:STOP:N[:log]") from e
    if count < 1 or spacing not in ('lin', 'log'):
        raise GridSpecError(f"range '{text}' must have N >= 1 and spacing 'lin' or 'log'")
    if spacing == 'log':
        if start <= 0 or stop <= 0:
            raise GridSpecError(f"logarithmic range '{text}' needs positive limits")
        return key.strip(), np.geomspace(start, stop, count)
    return key.strip(), np.linspace(start, stop, count)


def build_parser() -> ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, help='Random seed (overrides the simulation config)')
    common.add_argument('--threads', type=int, default=1, help='Worker threads')
    common.add_argument('--out', type=Path, help='Output file (or prefix for simulate)')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('--verbose', action='store_true', help='Debug logging')
    verbosity.add_argument('--quiet', action='store_true', help='Suppress progress output')

    source = argparse.ArgumentParser(add_help=False)
    group = source.add_mutually_exclusive_group(required=True)
    group.add_argument('--params', type=Path, help='Parameter JSON file')
    group.add_argument('--preset', choices=sorted(PRESETS), help='Published parameter set')

    parser = ArgumentParser(
        description='Steady states, spectra and quantum correlations of a levitated particle in a cavity'
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    commands = parser.add_subparsers(dest='command', required=True)

    state = commands.add_parser('state', parents=[common, source], help='Steady-state metrics')
    state.add_argument('--excel', type=Path, help='Also write an Excel metrics table')

    spectrum = commands.add_parser('spectrum', parents=[common, source], help='Heterodyne spectrum')
    spectrum.add_argument('--f-min', type=float, default=-200e3, help='Lowest frequency from the LO (Hz)')
    spectrum.add_argument('--f-max', type=float, default=200e3, help='Highest frequency from the LO (Hz)')
    spectrum.add_argument('--n-points', type=int, default=2001)
    spectrum.add_argument('--shot-subtracted', action='store_true', help='Drop the shot-noise floor')
    spectrum.add_argument('--mirrored', action='store_true', help='Evaluate the mirrored-spectrum prediction')
    spectrum.add_argument('--classical-only', action='store_true', help='Drop the quantum-noise term')
    spectrum.add_argument('--plot', type=Path, help='Also write a PNG figure')

    fit = commands.add_parser('fit', parents=[common], help='Fit spectra')
    fit.add_argument('--data', type=Path, nargs='+', required=True, help='PSD CSV files, one per acquisition')
    fit.add_argument('--config', type=Path, required=True, help='Fit config JSON')
    fit.add_argument('--excel', type=Path, help='Also write an Excel fit table')
    fit.add_argument('--no-eta-systematic', action='store_true', help='Skip the η ± 5%% refits')
    fit.add_argument('--metrics', action='store_true', help='Propagate fit errors into state metrics')

    simulate = commands.add_parser('simulate', parents=[common, source], help='Stochastic simulation')
    simulate.add_argument('--sim', type=Path, required=True, help='Simulation config JSON')
    simulate.add_argument('--out-psd', type=Path, help='Welch PSD CSV')
    simulate.add_argument('--out-cov', type=Path, help='Sampled covariance JSON')
    simulate.add_argument('--plot', type=Path, help='Also write a PNG of the simulated and model PSD')

    sweep = commands.add_parser('sweep', help='Parameter sweeps')
    sweeps = sweep.add_subparsers(dest='sweep', required=True)
    overlap = sweeps.add_parser('overlap', aliases=['fig3'], parents=[common],
                                help='Purity / discord map over overlap and decoherence')
    overlap.add_argument('--s-points', type=int, default=20)
    overlap.add_argument('--gamma-points', type=int, default=20)
    overlap.add_argument('--s-min', type=float)
    overlap.add_argument('--s-max', type=float)
    overlap.add_argument('--linear-gamma', action='store_true', help='Linear instead of logarithmic Γ spacing')
    overlap.add_argument('--plot', type=Path, help='Also write a PNG of both maps')
    grid = sweeps.add_parser('grid', parents=[common, source], help='Metrics over a product grid')
    grid.add_argument('--range', dest='ranges', action='append', required=True,
                      help='KEY=START:STOP:N[:log], repeatable; KEY is a parameter record key')
    grid.add_argument('--metrics', default='purity,discord_sym', help='Comma-separated metric names')
    return parser


def _params(args) -> SystemParams:
    return load_params(path=args.params, preset=args.preset)


def _inputs(args) -> List[Path]:
    return [args.params] if getattr(args, 'params', None) else []


def run(args) -> None:
    analyzer = OptomechAnalyzer(threads=args.threads, quiet=args.quiet)

    if args.command == 'state':
        analyzer.run_state(_params(args), args.out, args.excel, _inputs(args),
                           label=args.preset or args.params.stem)

    elif args.command == 'spectrum':
        analyzer.run_spectrum(_params(args), args.f_min, args.f_max, args.n_points, args.out,
                              args.shot_subtracted, args.mirrored, args.classical_only, _inputs(args), args.plot)

    elif args.command == 'fit':
        config = FitConfig.from_json(args.config)
        analyzer.run_fit(args.data, config, args.config, args.out, args.excel,
                         eta_systematic=not args.no_eta_systematic, metrics=args.metrics)

    elif args.command == 'simulate':
        sim = SimConfig.from_json(args.sim)
        if args.seed is not None:
            sim = SimConfig.from_dict({**sim.to_dict(), 'seed': args.seed})
        out_psd, out_cov = args.out_psd, args.out_cov
        if args.out:
            out_psd = out_psd or args.out.with_name(args.out.name + '_psd.csv')
            out_cov = out_cov or args.out.with_name(args.out.name + '_cov.json')
        analyzer.run_simulate(_params(args), sim, out_psd, out_cov, _inputs(args) + [args.sim], args.plot)

    elif args.sweep in ('overlap', 'fig3'):
        s_range = None
        if args.s_min is not None or args.s_max is not None:
            law = OverlapLaw()
            s_range = (args.s_min if args.s_min is not None else law.s_min,
                       args.s_max if args.s_max is not None else law.s_max)
        analyzer.run_overlap_sweep(args.s_points, args.gamma_points, not args.linear_gamma, s_range,
                                   args.out, args.plot)

    else:
        ranges = dict(parse_range(text) for text in args.ranges)
        metrics = [m.strip() for m in args.metrics.split(',') if m.strip()]
        analyzer.run_grid_sweep(_params(args), ranges, metrics, args.out, _inputs(args))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Command-line interface

    Returns:
        0 on success, 1 on invalid input, 2 on numerical failure
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.DEBUG if args.verbose else logging.WARNING
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr, force=True)

    try:
        run(args)
    except OptomechError as e:
        code = exit_code_for(e)
        report_error(type(e).__name__, code, str(e))
        return code
    except FileNotFoundError as e:
        report_error(type(e).__name__, 1, str(e))
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
