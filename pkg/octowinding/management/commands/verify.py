from ._base import DT, PATHS, ExperimentCommand


class Command(ExperimentCommand):
    help = "Run a verification suite and write verify-<suite>.json reports."
    command = 'verify'
    flags = (('--suite', 'suite', "suite name or 'all'"), PATHS, DT)
