#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


from .core import Experiment, Setting, Record
from .check import real, integer, string, flag, choiceof, listof
from .load import locate
from .svg import write_svg
from .experiments import (ExperimentConfig, KERNEL_KINDS,
                          sharpness_experiment, inequality_sweep,
                          kernel_estimate_check, besov_envelope_check,
                          partition_of_unity_check, oracle_check,
                          doubling_check, cz_invariant_check,
                          with_refinement)
import time


class BaseExperiment(object):
    """
    Template class for all experiment kinds.
    """

    def __init__(self, ctl, input):
        self.ctl = ctl
        self.ui = ctl.ui
        self.input = input

    def __call__(self):
        if self.input.skip:
            return
        self.start()
        return self.check()

    def start(self):
        # Display the header.
        lines = str(self.input).splitlines()
        location = locate(self.input)
        if location is not None:
            lines.append("(%s)" % location)
        self.ui.section()
        self.ui.header("\n".join(lines))

    def check(self):
        # Run the experiment and report the verdict.
        raise NotImplementedError("%s.check()" % self.__class__.__name__)


class SweepExperiment(BaseExperiment):
    """
    Template class for kinds that produce an ``ExperimentReport``.
    """

    Input = ExperimentConfig

    def compute(self, input):
        # Returns the report; raises `ValueError` on a bad configuration.
        raise NotImplementedError("%s.compute()" % self.__class__.__name__)

    def check(self):
        started = time.perf_counter()
        try:
            if self.input.refine:
                report = with_refinement(self.compute, self.input)
            else:
                report = self.compute(self.input)
        except ValueError as exc:
            self.ctl.record(self.input, None,
                            time.perf_counter()-started, error=str(exc))
            self.ctl.failed("%s: %s" % (self.input, exc))
            return
        self.emit(report, time.perf_counter()-started)
        return report

    def emit(self, report, seconds):
        # Display the table, write artifacts and attest the verdict.
        self.ui.report(report, seconds)
        stem = "%s_%dd_N%d_%s" % (report.kind, self.input.n, self.input.N,
                                  self.ctl.timestamp)
        report.write_csv(self.ctl.artifact(stem+".csv", self.input.output))
        if report.points:
            write_svg(self.ctl.artifact(stem+".svg", self.input.output),
                      report, self.ctl.timestamp)
        self.ctl.record(self.input, report, seconds)
        if report.passed:
            self.ctl.passed()
        else:
            for failure in report.failures[1:]:
                self.ui.warning(failure)
            self.ctl.failed(report.failures[0])


@Experiment
class Sharpness(SweepExperiment):
    """
    Growth of the weak-L¹ quasinorm on the Miyachi probe.
    """

    class Input:
        sharpness = Setting(string(),
                hint="title of the experiment")
        N = Setting(integer(), default=65536)
        L_box = Setting(real(), default=512.0)
        t = Setting(listof(real()), default=[4.0, 8.0, 16.0, 32.0, 64.0])

    def compute(self, input):
        return sharpness_experiment(input)


@Experiment
class Weak11(SweepExperiment):
    """
    Upper bound sweep of the weak-type (1,1) norm over the probe family.
    """

    class Input:
        weak11 = Setting(string(),
                hint="title of the experiment")
        N = Setting(integer(), default=8192)
        L_box = Setting(real(), default=4096.0)
        fit_min = Setting(real(), default=4.0)

    def compute(self, input):
        return inequality_sweep('weak11_upper', input)


@Experiment
class LpBound(SweepExperiment):
    """
    L^p ratios at the critical smoothness ``s = n|1/2 - 1/p|``.
    """

    class Input:
        lp_bound = Setting(string(),
                hint="title of the experiment")
        t = Setting(listof(real()),
                default=[0.0]+[float(2**j) for j in range(11)])

    def compute(self, input):
        return inequality_sweep('lp_bound', input)


@Experiment
class CZHeatL2(SweepExperiment):
    """
    L² norm of the heat-smoothed large-scale bad parts.
    """

    class Input:
        cz_heat_l2 = Setting(string(),
                hint="title of the experiment")
        N = Setting(integer(), default=1024)
        L_box = Setting(real(), default=1024.0)
        t = Setting(listof(real()), default=[0.0, 3.0])
        stability = Setting(real(), default=3.0)
        inputs = Setting(integer(), default=10,
                hint="number of seeded inputs")
        heights = Setting(listof(real()), default=[2.0, 4.0, 8.0],
                hint="heights relative to the mean of |f| on the base box")

    def compute(self, input):
        return inequality_sweep('cz_heat_l2', input)


@Experiment
class FeynmanKac(SweepExperiment):
    """
    Entrywise domination of heat kernels by the free heat kernel.
    """

    class Input:
        feynman_kac = Setting(string(),
                hint="title of the experiment")
        N = Setting(integer(), default=64)
        L_box = Setting(real(), default=64.0)
        operator = Setting(choiceof(['schrodinger', 'dirichlet']),
                default='schrodinger')
        potential = Setting(string(), default='randnonneg')
        t = Setting(listof(real()), default=[0.25, 1.0, 4.0])
        trials = Setting(integer(), default=5,
                hint="number of seeded potentials")

    def compute(self, input):
        return inequality_sweep('feynman_kac', input)


class KernelExperiment(SweepExperiment):
    """
    Template class for the kernel estimate kinds.
    """

    class Input:
        N = Setting(integer(), default=16384)
        L_box = Setting(real(), default=1024.0)
        t = Setting(listof(real()), default=[0.25, 1.0, 4.0])
        k = Setting(listof(integer()), default=[1, 2, 3])
        s = Setting(listof(real()), default=[0.0, 1.0, 2.0])
        tau = Setting(listof(real()),
                default=[0.0, 1.0, -1.0, 4.0, -4.0, 16.0, -16.0],
                hint="imaginary parts of the complex times")
        R = Setting(listof(real()), default=[0.25, 0.5, 1.0],
                hint="frequency scales")
        c0 = Setting(listof(real()), default=[1.0, 0.5, 0.25, 0.125],
                hint="cutoff dilations, 0 < c0 <= 1")
        dk = Setting(listof(integer()), default=[1, 2, 3, 4],
                hint="scale offsets k - k0")


@Experiment
class KernelCheck(KernelExperiment):
    """
    Kernel estimates of the spectral multipliers.
    """

    class Input:
        kernel_check = Setting(choiceof(KERNEL_KINDS),
                hint="resolvent_decay | harnack_annulus | q_kernel"
                     " | complex_time | weighted_multiplier"
                     " | tail_integral")

    def compute(self, input):
        return kernel_estimate_check(input.kernel_check, input)


@Experiment
class TailIntegral(KernelExperiment):
    """
    Off-diagonal tail integrals of the truncated Schrödinger kernels.
    """

    class Input:
        tail_integral = Setting(string(),
                hint="title of the experiment")
        N = Setting(integer(), default=8192)
        t = Setting(listof(real()), default=[1.0, 4.0, 16.0])

    def compute(self, input):
        return kernel_estimate_check('tail_integral', input)


@Experiment
class BesovEnvelope(SweepExperiment):
    """
    Besov-type norms of the dyadic pieces against their envelope.
    """

    class Input:
        besov_envelope = Setting(string(),
                hint="title of the experiment")
        t = Setting(listof(real()), default=[0.0, 1.0, 8.0])
        s = Setting(listof(real()), default=[1.3])
        ell = Setting(listof(integer()), default=list(range(-8, 3)),
                hint="dyadic dilations of the pieces")
        window = Setting(real(), default=64.0,
                hint="sampling window of the quadrature")
        samples = Setting(integer(), default=2**14,
                hint="quadrature samples (a power of two)")
        pairs = Setting(integer(), default=10,
                hint="symbol pairs for the product inequality")
        refine = Setting(flag(), default=False)

    def compute(self, input):
        return besov_envelope_check(input)


@Experiment
class CZCheck(SweepExperiment):
    """
    Properties of the Calderón–Zygmund decomposition on random fields.
    """

    class Input:
        cz_check = Setting(string(),
                hint="title of the experiment")
        N = Setting(integer(), default=256)
        L_box = Setting(real(), default=256.0)
        inputs = Setting(integer(), default=50,
                hint="number of seeded inputs")
        heights = Setting(listof(real()), default=[2.0, 4.0, 8.0],
                hint="heights relative to the mean of |f|")

    def compute(self, input):
        return cz_invariant_check(input)


@Experiment
class PartitionOfUnity(SweepExperiment):
    """
    Dyadic partition of unity on log-uniform samples.
    """

    class Input:
        partition_of_unity = Setting(string(),
                hint="title of the experiment")
        samples = Setting(integer(), default=10000,
                hint="number of sampled points")
        refine = Setting(flag(), default=False)

    def compute(self, input):
        return partition_of_unity_check(input)


@Experiment
class Oracle(SweepExperiment):
    """
    Fourier-diagonal calculus against dense eigendecomposition.
    """

    class Input:
        oracle = Setting(string(),
                hint="title of the experiment")
        N = Setting(integer(), default=32)
        L_box = Setting(real(), default=16.0)
        sizes = Setting(listof(integer()), default=[16, 32],
                hint="grid sizes compared")
        symbols = Setting(listof(string()),
                default=['heat:t=0.5', 'schrodinger:t=1,s=0.5',
                         'resolvent:t=1,s=1', 'phi',
                         'Fk:m=2,k=2,k0=0,n=1'],
                hint="symbol labels")
        fields = Setting(integer(), default=5,
                hint="random fields per symbol")
        refine = Setting(flag(), default=False)

    def compute(self, input):
        return oracle_check(input)


@Experiment
class Doubling(SweepExperiment):
    """
    Measured volume growth of the torus.
    """

    class Input:
        doubling = Setting(string(),
                hint="title of the experiment")
        tolerance = Setting(real(), default=0.2)

    def compute(self, input):
        return doubling_check(input)


@Experiment
class SuiteCase(BaseExperiment):
    """
    Collection of experiments.
    """

    class Input:
        title = Setting(string(),
                hint="title of the suite")
        tests = Setting(listof(Record),
                hint="experiment records")
        skip = Setting(flag(), default=False, order=1e10,
                hint="skip the suite if set")

        @classmethod
        def __recognizes__(cls, keys):
            return ('tests' in keys)

        def __str__(self):
            return self.title

    def start(self):
        # Display suite title.
        lines = [str(self.input)]
        location = locate(self.input)
        if location is not None:
            lines.append("(%s)" % location)
        self.ui.part()
        self.ui.header("\n".join(lines))

    def check(self):
        # Execute nested experiments.
        for input in self.input.tests:
            case = input.__owner__(self.ctl, input)
            self.ctl.run(case)
            if self.ctl.halted:
                break
