from ._base import (COARSEN, DT, EXACT_BESQ, GRID_POINTS, PATHS, R0, ROUTE, SCHEME, SPACE, T_END, W0,
                    ExperimentCommand)


class Command(ExperimentCommand):
    help = "Simulate winding samples and write them to windings.csv."
    command = 'simulate'
    flags = (SPACE, T_END, DT, PATHS, R0, W0, SCHEME, ROUTE, EXACT_BESQ, GRID_POINTS, COARSEN,
             ('--keep-paths', 'keep_paths', "number of full trajectories to dump"))
