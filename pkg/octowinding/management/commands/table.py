from ._base import LAMBDA, R0, SPACE, ExperimentCommand


class Command(ExperimentCommand):
    help = "Tabulate closed-form transforms and their limits."
    command = 'table'
    flags = (SPACE, R0, LAMBDA, ('--t', 't_grid', "comma separated times (flat space)"))
