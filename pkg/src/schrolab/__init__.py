#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


from .check import real, integer, string, flag, maybe, choiceof, listof
from .core import Experiment, Setting, Record
from .ctl import Control
from .load import locate, Location, load_config
from .experiments import ExperimentConfig, ExperimentReport
from .run import run, main
from .std import (BaseExperiment, SweepExperiment, Sharpness, Weak11,
                  LpBound, CZHeatL2, FeynmanKac, KernelCheck, TailIntegral,
                  BesovEnvelope, CZCheck, PartitionOfUnity, Oracle, Doubling,
                  SuiteCase)
from .ui import ConsoleUI


