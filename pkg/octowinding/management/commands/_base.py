import logging

from django.core.management.base import BaseCommand, CommandError

from octowinding.exceptions import WindingError
from octowinding.experiments import run_experiment
from octowinding.forms import parse_config

logger = logging.getLogger(__name__)


class ExperimentCommand(BaseCommand):
    """
    Shared plumbing for the experiment commands: read ``--config``, apply the
    flags on top of it, run the pipeline and print its summary.
    """
    command = None
    # Flags accepted on top of --config; (flag, config key, help).
    flags = ()

    def add_arguments(self, parser):
        parser.add_argument('--config', metavar='FILE', help="key = value or JSON experiment config")
        for flag, _, help_text in self.flags:
            parser.add_argument(flag, dest=flag.lstrip('-').replace('-', '_'), help=help_text)
        parser.add_argument('--seed', help="unsigned 64-bit seed")
        parser.add_argument('--output', help="run directory (default: WINDING_OUTPUT_DIR/<command>-<hash>)")
        parser.add_argument('--workers', help="worker processes (default: WINDING_WORKERS or CPU count)")
        parser.add_argument('--batch-size', dest='batch_size', help="paths per dispatched batch")
        parser.add_argument('--no-ledger', action='store_true', help="do not record an ExperimentRun")

    def overrides(self, options):
        values = {key: options.get(flag.lstrip('-').replace('-', '_')) for flag, key, _ in self.flags}
        for key in ('seed', 'output', 'workers', 'batch_size'):
            values[key] = options.get(key)
        values['command'] = self.command
        return values

    def read_config(self, path):
        if not path:
            return ''
        try:
            with open(path, 'rb') as f:
                return f.read()
        except IOError as e:
            raise CommandError("cannot read config %s: %s" % (path, e))

    def handle(self, *args, **options):
        try:
            cfg = parse_config(self.read_config(options['config']), self.overrides(options))
            result = run_experiment(cfg, record=False if options['no_ledger'] else None)
        except WindingError as e:
            raise CommandError(str(e))
        for line in result.lines:
            self.stdout.write(line)
        for path in result.artifacts:
            logger.info("wrote %s", path)
        if result.exit_status:
            raise CommandError("%s finished with failures" % self.command, returncode=result.exit_status)


SPACE = ('--space', 'space', "flat, projective or hyperbolic")
T_END = ('--t', 't', "end time")
DT = ('--dt', 'dt', "time step")
PATHS = ('--paths', 'paths', "number of Monte Carlo paths")
R0 = ('--r0', 'r0', "starting radius")
W0 = ('--w0', 'w0', "starting point, 8 comma separated coordinates")
LAMBDA = ('--lambda-norm', 'lambda', "comma separated |lambda| values")
SCHEME = ('--scheme', 'scheme', "EulerMaruyama or StratonovichHeun")
ROUTE = ('--route', 'route', "timechange or line")
EXACT_BESQ = ('--exact-besq', 'exact_besq', "true for exact squared Bessel steps on a log grid (flat only)")
GRID_POINTS = ('--grid-points', 'grid_points', "points of the exact BESQ grid")
COARSEN = ('--coarsen', 'coarsen', "fine noise increments summed per step")
