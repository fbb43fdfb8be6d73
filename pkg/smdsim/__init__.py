# -*- coding: utf-8 -*-

__author__ = """Franz Woellert"""
__email__ = 'franz.woellert@gmail.com'
__version__ = '0.1.0'


from smdsim.core.prox import ProxGeometry
from smdsim.core.oracle import NoiseModel, StochasticOracle, ValueOracle
from smdsim.core.solver import SolverConfig, run_smd, \
    run_smd_strongly_convex, run_parallel_aggregate
from smdsim.core.zeroth import SmoothingParams, run_zeroth_order
from smdsim.core.online import run_exp_weights
from smdsim.transport.network import RoadNetwork
from smdsim.transport.equilibrium import solve_dual
from smdsim.functions import random
