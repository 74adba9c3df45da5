#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


"""
L^p norms, distribution functions, weak-L^p quasinorms, kernel tail
integrals and log-log regression.
"""


from .core import Record, Setting
from .check import real, integer, string
import numpy as np


# Ordinates below this fraction of the maximum are treated as noise floor.
NOISE_FLOOR = 1e3*np.finfo(float).eps


class DistributionReport(Record):
    """Level-set measures of ``|f|`` and the weak-L^p quasinorm."""

    p = Setting(real())
    weak_quasinorm = Setting(real())
    thresholds = Setting(None, default=None,
            hint="distinct positive values of |f|, ascending")
    measures = Setting(None, default=None,
            hint="μ{|f| > λ} for each threshold")
    l1 = Setting(real(), default=None)
    l2 = Setting(real(), default=None)
    linf = Setting(real(), default=None)

    def row(self, label):
        return (label, self.p, self.weak_quasinorm,
                self.l1, self.l2, self.linf)

    HEADER = ('label', 'p', 'weak_quasinorm', 'l1', 'l2', 'linf')


class FitReport(Record):
    """Least-squares line through a set of points."""

    slope = Setting(real())
    intercept = Setting(real())
    r_squared = Setting(real())
    npoints = Setting(integer())
    domain = Setting(None, default=None, hint="(min x, max x) of the fit")
    scale = Setting(string(), default='loglog')

    def predict(self, x):
        if self.scale == 'loglog':
            return np.exp(self.intercept)*np.asarray(x)**self.slope
        return self.intercept+self.slope*np.asarray(x)

    def row(self, label):
        return (label, self.slope, self.intercept,
                self.r_squared, self.npoints)

    HEADER = ('label', 'slope', 'intercept', 'r2', 'npoints')


def lp_norm(f, p):
    """``(Σ|f|^p h^n)^{1/p}``; ``p = inf`` gives ``max|f|``."""
    if p < 1:
        raise ValueError("expected p >= 1, got %r" % p)
    magnitude = np.abs(f.values)
    if p == np.inf:
        return float(magnitude.max())
    return float((np.sum(magnitude**p)*f.measure)**(1.0/p))


def weak_lp_quasinorm(f, p):
    """
    Exact ``sup_λ λ μ{|f| > λ}^{1/p}`` by order statistics.

    With ``v_1 >= v_2 >= ...`` the sorted values of ``|f|``, the supremum
    is ``max_k v_k (k h^n)^{1/p}``.
    """
    if p < 1:
        raise ValueError("expected p >= 1, got %r" % p)
    magnitude = np.abs(f.values).ravel()
    ordered = np.sort(magnitude)[::-1]
    ordered = ordered[ordered > 0]
    if ordered.size:
        counts = np.arange(1, ordered.size+1)
        weak = float(np.max(ordered*(counts*f.measure)**(1.0/p)))
    else:
        weak = 0.0
    thresholds = np.unique(ordered)
    above = magnitude.size-np.searchsorted(np.sort(magnitude), thresholds,
                                           side='right')
    return DistributionReport(p=float(p), weak_quasinorm=weak,
                              thresholds=thresholds,
                              measures=above*f.measure,
                              l1=lp_norm(f, 1), l2=lp_norm(f, 2),
                              linf=lp_norm(f, np.inf))


def annulus_tail_integral(K, radius):
    """``Σ_{d(x,y) > radius} |K(x)| h^n``."""
    if radius < 0:
        raise ValueError("expected radius >= 0, got %r" % radius)
    outside = K.distances() > radius
    magnitude = np.abs(K.values.values)
    return float(np.sum(magnitude[outside])*K.model.grid.cell_measure)


def weighted_l2_kernel(K, R, s):
    """``Σ |K(x)|^2 (1+R d(x,y))^s h^n``."""
    if not R > 0:
        raise ValueError("expected R > 0, got %r" % R)
    if s < 0:
        raise ValueError("expected s >= 0, got %r" % s)
    weight = (1.0+R*K.distances())**s
    magnitude = np.abs(K.values.values)**2
    return float(np.sum(magnitude*weight)*K.model.grid.cell_measure)


def fit_line(xs, ys, scale='linear'):
    # Least squares with r² clamped to [0, 1].
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 3:
        raise ValueError("need at least 3 points to fit, got %d" % xs.size)
    slope, intercept = np.polyfit(xs, ys, 1)
    residual = ys-(slope*xs+intercept)
    total = np.sum((ys-ys.mean())**2)
    if total > 0:
        r_squared = 1.0-np.sum(residual**2)/total
    else:
        r_squared = 1.0
    r_squared = min(max(float(r_squared), 0.0), 1.0)
    return FitReport(slope=float(slope), intercept=float(intercept),
                     r_squared=r_squared, npoints=int(xs.size),
                     domain=(float(xs.min()), float(xs.max())),
                     scale=scale)


def fit_power_law(points):
    """
    Fits ``y = C x^a`` through ``(log x, log y)``.

    Points whose ordinate sits at the noise floor relative to the largest
    one are dropped before fitting.
    """
    points = list(points)
    if any(not (x > 0 and y > 0) for x, y in points):
        raise ValueError("power-law fit needs positive coordinates")
    if not points:
        raise ValueError("need at least 3 points to fit, got 0")
    top = max(y for x, y in points)
    kept = [(x, y) for x, y in points if y >= NOISE_FLOOR*top]
    fit = fit_line(np.log([x for x, y in kept]),
                   np.log([y for x, y in kept]), scale='loglog')
    return fit.__clone__(domain=(min(x for x, y in kept),
                                 max(x for x, y in kept)))
