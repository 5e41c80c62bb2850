# rabi
# Copyright (C) 2026 The rabi developers
#
# rabi is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.

import argparse
import asyncio
import contextlib
import logging
from os import environ
from pathlib import Path
import sys
from typing import Optional

from . import __version__
from .config import RunConfig, load_config
from .eigensolve import diagonalize_full
from .exceptions import ConfigError, RabiError, ResultFormatError
from .hamiltonian import ModelParams, Truncation, build_h1, build_hamiltonian, parity_sector
from .pipeline import analyze, scan_all
from .plotting import plot_directory
from .results import (
    read_curves,
    write_collapse,
    write_curve,
    write_excitation,
    write_exponents,
    write_fits,
    write_master,
    write_peaks,
    write_spectrum,
)
from .selftest import run_checks
from .susceptibility import drive_variance, moment, noise_spectrum
from .truncation import converged_chi

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


class ColoredFormatter(logging.Formatter):
    RESET_SEQ = "\033[0m"
    COLOR_SEQ = "%s%%s" + RESET_SEQ

    COLORS = {
        'DEBUG': COLOR_SEQ % "\033[0;36m",
        'INFO': COLOR_SEQ % "\033[32m",
        'WARNING': COLOR_SEQ % "\033[1;33m",
        'ERROR': COLOR_SEQ % "\033[1;31m",
        'CRITICAL': COLOR_SEQ % ("\033[1;33m\033[1;41m"),
    }

    def format(self, record):
        levelname = record.levelname

        msg = super().format(record)
        if levelname in self.COLORS:
            msg = self.COLORS[levelname] % msg
        return msg


def create_default_logger() -> logging.Handler:
    # stderr logger
    log_format = '%(asctime)s:%(levelname)s:%(name)s' \
                 ':%(filename)s:%(lineno)d:%(funcName)s %(message)s'
    handler = logging.StreamHandler(sys.stderr)
    if sys.platform != 'win32' and sys.stderr.isatty():
        handler.setFormatter(ColoredFormatter(log_format))
    else:
        handler.setFormatter(logging.Formatter(log_format))
    return handler


def setup_loggers(level: int) -> None:
    logging.root.handlers = []
    logging.root.setLevel(level)
    logging.root.addHandler(create_default_logger())


def environ_overrides(config: RunConfig) -> RunConfig:
    '''
    Apply RABI_WORKERS and RABI_OUTPUT_DIR on top of the file.
    '''
    overrides = {}
    if 'RABI_WORKERS' in environ:
        try:
            overrides['workers'] = int(environ['RABI_WORKERS'])
        except ValueError:
            raise ConfigError('RABI_WORKERS is not a valid int', 'workers')
    if 'RABI_OUTPUT_DIR' in environ:
        overrides['output_dir'] = Path(environ['RABI_OUTPUT_DIR'])
    return config.with_overrides(**overrides) if overrides else config


def checked(config: RunConfig) -> RunConfig:
    error = config.verify()
    if error is not None:
        raise ConfigError(error, error.split(':', 1)[0])
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='rabi',
        description='Fidelity susceptibility and finite size scaling of the quantum Rabi model',
    )
    parser.add_argument('-v', '--version', action='version', version=f'''rabi {__version__}''')
    parser.add_argument('-d', '--debug', action='store_true', dest='debug', required=False, default=False,
                        help='Enables debugging logs.')
    sub = parser.add_subparsers(dest='command', required=True)

    scan = sub.add_parser('scan', help='compute the susceptibility curves')
    scan.add_argument('-c', '--config', type=Path, action='store', dest='config', default=None,
                      help='configuration file, defaults are used when missing')

    analyze = sub.add_parser('analyze', help='peaks, fits and collapses from the curves of a directory')
    analyze.add_argument('-i', '--in', type=Path, action='store', dest='indir', required=True,
                         help='directory written by scan')
    analyze.add_argument('-c', '--config', type=Path, action='store', dest='config', default=None,
                         help='use this configuration instead of the one echoed in the curves')

    plot = sub.add_parser('plot', help='draw the figures of an analyzed directory')
    plot.add_argument('-i', '--in', type=Path, action='store', dest='indir', required=True,
                      help='directory written by scan and analyze')

    sub.add_parser('verify', help='run the fast analytic checks')

    spectrum = sub.add_parser('spectrum', help='write the noise spectrum at one point')
    spectrum.add_argument('--eta', type=float, action='store', dest='eta', required=True,
                          help='frequency ratio')
    spectrum.add_argument('--g', type=float, action='store', dest='g', required=True,
                          help='coupling')
    spectrum.add_argument('-n', '--n-max', type=int, action='store', dest='n_max', default=None,
                          help='photon cutoff, converged for chi_F when missing')
    spectrum.add_argument('-o', '--out', type=Path, action='store', dest='out', default=Path('spectrum.csv'),
                          help='output file. Defaults to spectrum.csv')
    return parser


class Cli:

    @classmethod
    def run(cls) -> None:
        loop = asyncio.new_event_loop()
        asyncio.set_event_loop(loop)
        code = EXIT_OK
        try:
            code = loop.run_until_complete(cls().main(sys.argv[1:]))
        except KeyboardInterrupt:
            code = 130
        finally:
            try:
                all_tasks = asyncio.gather(*asyncio.all_tasks(loop), return_exceptions=True)
                all_tasks.cancel()
                with contextlib.suppress(asyncio.CancelledError):
                    loop.run_until_complete(all_tasks)
                loop.run_until_complete(loop.shutdown_asyncgens())
            finally:
                loop.close()
        sys.exit(code)

    async def main(self, argv: list[str]) -> int:
        args = build_parser().parse_args(argv)

        setup_loggers(logging.DEBUG if bool(environ.get('DEBUG', args.debug)) else logging.INFO)

        try:
            return await getattr(self, 'cmd_' + args.command)(args)
        except (ConfigError, ResultFormatError) as e:
            logging.error('%s', e)
            return EXIT_CONFIG
        except RabiError as e:
            logging.error('%s', e)
            return EXIT_NUMERICAL
        except OSError as e:
            logging.error('%s', e)
            return EXIT_CONFIG

    def _config(self, path: Optional[Path], fallback: Optional[RunConfig] = None) -> RunConfig:
        if path is not None:
            config = load_config(path)
        else:
            config = fallback if fallback is not None else RunConfig()
        return checked(environ_overrides(config))

    async def cmd_scan(self, args) -> int:
        config = self._config(args.config)
        directory = config.output_dir
        directory.mkdir(parents=True, exist_ok=True)

        curves = await scan_all(config)
        for curve in curves:
            write_curve(directory, config, curve)

        flagged = [c for c in curves if not c.converged]
        for c in flagged:
            logging.error('Curve eta=%g order=%d has non converged points', c.eta, c.r_order)
        return EXIT_NUMERICAL if flagged else EXIT_OK

    async def cmd_analyze(self, args) -> int:
        curves, echoed = read_curves(args.indir)
        config = self._config(args.config, echoed)
        for c in curves:
            if not c.converged:
                logging.warning('Curve eta=%g order=%d has non converged points, they are ignored',
                                c.eta, c.r_order)

        analysis = await asyncio.to_thread(analyze, curves, config)

        write_peaks(args.indir, config, analysis.peaks)
        write_fits(args.indir, config, analysis.fits)
        write_collapse(args.indir, config, analysis.collapses)
        for c in analysis.collapses:
            write_master(args.indir, config, c)
        write_exponents(args.indir, config, analysis.fits, analysis.collapses, analysis.z)
        write_excitation(args.indir, config, analysis.excitation)

        if config.plot:
            await self.cmd_plot(args)
        if analysis.failures:
            logging.error('Analysis incomplete: %d failures', len(analysis.failures))
            return EXIT_NUMERICAL
        return EXIT_OK

    async def cmd_plot(self, args) -> int:
        await asyncio.to_thread(plot_directory, args.indir)
        return EXIT_OK

    async def cmd_verify(self, args) -> int:
        results = await asyncio.to_thread(run_checks)
        failed = [i for i in results if not i.passed]
        logging.info('%d of %d checks passed', len(results) - len(failed), len(results))
        return EXIT_NUMERICAL if failed else EXIT_OK

    async def cmd_spectrum(self, args) -> int:
        config = checked(environ_overrides(RunConfig()))
        params = ModelParams(args.eta, args.g)
        params.verify()
        if args.n_max is None:
            result = converged_chi(params, 0, config.policy, parity_reduce=config.parity_sector)
            trunc = Truncation(result.n_used)
        else:
            trunc = Truncation(args.n_max)
            trunc.verify()

        if config.parity_sector:
            block = parity_sector(params, trunc)
            h, h1 = block.hamiltonian, block.drive
        else:
            h, h1 = build_hamiltonian(params, trunc), build_h1(params.eta, trunc)
        decomp = await asyncio.to_thread(diagonalize_full, h)
        spectrum = noise_spectrum(decomp, h1)

        variance = drive_variance(decomp.ground_state, h1)
        logging.info('eta=%g g=%g n_max=%d: %d lines, m2=%.17g m4=%.17g sum rule residual=%.3e',
                     params.eta, params.g, trunc.n_max, len(spectrum.lines),
                     moment(spectrum, 2), moment(spectrum, 4), spectrum.total_weight - variance)
        write_spectrum(args.out, config, spectrum)
        return EXIT_OK
