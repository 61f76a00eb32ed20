from ._base import DT, EXACT_BESQ, GRID_POINTS, LAMBDA, PATHS, R0, ROUTE, SCHEME, SPACE, T_END, W0, ExperimentCommand


class Command(ExperimentCommand):
    help = "Monte Carlo characteristic function of the winding next to its closed form."
    command = 'charfn'
    flags = (SPACE, T_END, DT, PATHS, R0, W0, LAMBDA, SCHEME, ROUTE, EXACT_BESQ, GRID_POINTS)
