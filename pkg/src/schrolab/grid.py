#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


"""
Discrete periodic tori, fields on them, the torus metric and measure,
the unitary spectral transform and measured doubling constants.
"""


from .core import Record, Setting
from .check import real
import csv
import math
import numpy as np


class DoublingReport(Record):
    """Measured volume-growth constants of a grid."""

    C_doub = Setting(real(), hint="sup V(x,2r)/V(x,r) over the scan")
    n_exp = Setting(real(), hint="smallest exponent n with V(λr) <= λ^n V(r)")
    D_exp = Setting(real(), hint="reverse-doubling exponent")


def is_power_of_two(value):
    return (isinstance(value, (int, np.integer)) and value > 0 and
            (value & (value-1)) == 0)


class Grid(object):
    """
    A periodic grid with `N` points per axis on the box ``[0, L_box)^n``.

    The measure is ``h^n`` times counting measure, and distances wrap
    around each axis.
    """

    __slots__ = ('dim', 'points', 'box_length', 'spacing',
                 'doubling_report', '__weakref__')

    def __init__(self, dim, points, box_length):
        self.dim = dim
        self.points = points
        self.box_length = float(box_length)
        self.spacing = self.box_length/points
        self.doubling_report = None

    def __eq__(self, other):
        return (isinstance(other, Grid) and
                (self.dim, self.points, self.box_length) ==
                (other.dim, other.points, other.box_length))

    def __ne__(self, other):
        return not (self == other)

    def __hash__(self):
        return hash((self.dim, self.points, self.box_length))

    def __repr__(self):
        return "%s(n=%d, N=%d, L_box=%r)" % (self.__class__.__name__,
                                            self.dim, self.points,
                                            self.box_length)

    @property
    def shape(self):
        return (self.points,)*self.dim

    @property
    def size(self):
        return self.points**self.dim

    @property
    def cell_measure(self):
        return self.spacing**self.dim

    @property
    def dual_cell_measure(self):
        return (2*np.pi/self.box_length)**self.dim

    @property
    def measure(self):
        return self.box_length**self.dim

    @property
    def diameter(self):
        return math.sqrt(self.dim)*self.box_length/2

    def axis_distances(self):
        # Wraparound distance from index 0 along one axis.
        k = np.arange(self.points)
        return np.minimum(k, self.points-k)*self.spacing

    def distances(self, center):
        """Torus distances from `center` to every grid point."""
        center = self.index(center)
        base = self.axis_distances()
        total = np.zeros(self.shape)
        for axis, c in enumerate(center):
            delta = np.roll(base, c)
            view = [1]*self.dim
            view[axis] = self.points
            total = total + delta.reshape(view)**2
        return np.sqrt(total)

    def frequencies(self):
        """Per-axis frequency lattices ``2πk/L_box`` in FFT order."""
        xi = 2*np.pi*np.fft.fftfreq(self.points, d=self.spacing)
        return [xi]*self.dim

    def frequency_norms(self):
        """``|ξ|`` on the frequency lattice, shaped like the grid."""
        total = np.zeros(self.shape)
        for axis, xi in enumerate(self.frequencies()):
            view = [1]*self.dim
            view[axis] = self.points
            total = total + xi.reshape(view)**2
        return np.sqrt(total)

    def index(self, index):
        # Normalizes an integer or a multi-index to a tuple.
        if isinstance(index, (int, np.integer)):
            index = (int(index),)
        index = tuple(int(i) for i in index)
        if len(index) != self.dim:
            raise ValueError("expected a %d-dimensional index, got %r"
                             % (self.dim, index))
        if not all(0 <= i < self.points for i in index):
            raise ValueError("index out of range: %r" % (index,))
        return index

    def center(self):
        return (self.points//2,)*self.dim


def make_grid(n, N, L_box):
    """Creates a grid; `N` must be a power of two, at least 8."""
    if n not in (1, 2, 3):
        raise ValueError("dimension must be 1, 2 or 3, got %r" % n)
    if not is_power_of_two(N) or N < 8:
        raise ValueError("N must be a power of two >= 8, got %r" % N)
    if not L_box > 0:
        raise ValueError("L_box must be positive, got %r" % L_box)
    return Grid(n, N, L_box)


class Field(object):
    """Complex samples on a grid, or on a masked subdomain of it."""

    __slots__ = ('grid', 'values', 'mask', 'domain')

    def __init__(self, grid, values, mask=None, domain='physical'):
        values = np.asarray(values, dtype=complex)
        if values.size != grid.size:
            raise ValueError("expected %d values, got %d"
                             % (grid.size, values.size))
        values = values.reshape(grid.shape)
        if mask is not None:
            mask = np.asarray(mask, dtype=bool).reshape(grid.shape)
            if np.any(values[~mask] != 0):
                raise ValueError("field does not vanish outside its mask")
        self.grid = grid
        self.values = values
        self.mask = mask
        self.domain = domain

    def __repr__(self):
        return "%s(%r, masked=%s)" % (self.__class__.__name__,
                                      self.grid, self.mask is not None)

    @classmethod
    def zeros(cls, grid, mask=None):
        return cls(grid, np.zeros(grid.shape, dtype=complex), mask)

    @classmethod
    def delta(cls, grid, index, mask=None):
        """Unit-mass delta: ``h^-n`` at `index`."""
        values = np.zeros(grid.shape, dtype=complex)
        values[grid.index(index)] = 1.0/grid.cell_measure
        return cls(grid, values, mask)

    @property
    def measure(self):
        if self.domain == 'frequency':
            return self.grid.dual_cell_measure
        return self.grid.cell_measure

    def same_support(self, other):
        if self.grid != other.grid:
            return False
        if self.mask is None or other.mask is None:
            return (self.mask is None and other.mask is None)
        return np.array_equal(self.mask, other.mask)

    def replace(self, values):
        """A field on the same support with new values."""
        values = np.asarray(values, dtype=complex).reshape(self.grid.shape)
        if self.mask is not None:
            values = np.where(self.mask, values, 0)
        return Field(self.grid, values, self.mask, self.domain)

    def __add__(self, other):
        if not self.same_support(other):
            raise ValueError("fields live on different supports")
        return self.replace(self.values+other.values)

    def __sub__(self, other):
        if not self.same_support(other):
            raise ValueError("fields live on different supports")
        return self.replace(self.values-other.values)

    def __mul__(self, scalar):
        return self.replace(self.values*scalar)

    __rmul__ = __mul__


def torus_distance(grid, i, j):
    """Euclidean distance with per-axis wraparound."""
    i = grid.index(i)
    j = grid.index(j)
    total = 0.0
    for a, b in zip(i, j):
        delta = abs(a-b)
        delta = min(delta, grid.points-delta)*grid.spacing
        total += delta*delta
    return math.sqrt(total)


def ball_volume(grid, center, r):
    """Measure of the open ball ``{j: d(center, j) < r}``."""
    if not r > 0:
        raise ValueError("radius must be positive, got %r" % r)
    count = np.count_nonzero(grid.distances(center) < r)
    return count*grid.cell_measure


class VolumeTable(object):
    # Ball volumes about the origin for many radii at once.

    def __init__(self, grid):
        self.grid = grid
        self.radii = np.sort(grid.distances((0,)*grid.dim).ravel())

    def __call__(self, r):
        count = np.searchsorted(self.radii, r, side='left')
        return np.asarray(count)*self.grid.cell_measure


DILATIONS = (2, 4, 8)


def scan_radii(grid):
    """
    Dyadic radii from ``4h`` (below which the lattice dominates) to
    ``L_box/8`` (above which balls saturate).
    """
    radii = []
    r = 4*grid.spacing
    while r <= grid.box_length/8:
        radii.append(r)
        r *= 2
    return radii or [grid.spacing]


def measure_doubling(grid):
    """Measures the doubling constant and the volume-growth exponent."""
    volume = VolumeTable(grid)
    radii = scan_radii(grid)
    C_doub = 1.0
    n_exp = 0.0
    for r in radii:
        base = float(volume(r))
        C_doub = max(C_doub, float(volume(2*r))/base)
        for factor in DILATIONS:
            ratio = float(volume(factor*r))/base
            n_exp = max(n_exp, math.log(ratio)/math.log(factor))
    report = DoublingReport(C_doub=C_doub, n_exp=n_exp, D_exp=n_exp)
    grid.doubling_report = report
    return report


FORWARD = 'forward'
INVERSE = 'inverse'


def spectral_transform(field, direction=FORWARD):
    """
    Unitary discrete Fourier transform.

    The forward transform approximates ``(2π)^{-n/2} ∫ f(x) e^{-ixξ} dx``
    on the lattice ``ξ = 2πk/L_box`` (FFT order), so that Plancherel holds
    with weights ``h^n`` and ``(2π/L_box)^n``.
    """
    if field.mask is not None:
        raise ValueError("spectral transform of a masked field;"
                         " use a matrix model instead")
    grid = field.grid
    n = grid.dim
    if direction == FORWARD:
        values = np.fft.fftn(field.values)
        values *= grid.cell_measure/(2*np.pi)**(n/2)
        return Field(grid, values, domain='frequency')
    elif direction == INVERSE:
        values = np.fft.ifftn(field.values)
        values *= grid.size*(2*np.pi)**(n/2)/grid.box_length**n
        return Field(grid, values, domain='physical')
    raise ValueError("unknown direction %r" % direction)


HEADER = np.dtype([('n', '<u4'), ('N', '<u4'), ('L_box', '<f8')])


def write_field(path, field):
    """Saves a field in the flat little-endian binary format."""
    grid = field.grid
    header = np.array([(grid.dim, grid.points, grid.box_length)], dtype=HEADER)
    with open(path, 'wb') as stream:
        stream.write(header.tobytes())
        stream.write(field.values.astype('<c16').ravel().tobytes())


def read_field(path):
    """Loads a field saved by :func:`write_field`."""
    with open(path, 'rb') as stream:
        data = stream.read()
    header = np.frombuffer(data[:HEADER.itemsize], dtype=HEADER)[0]
    grid = make_grid(int(header['n']), int(header['N']),
                     float(header['L_box']))
    values = np.frombuffer(data[HEADER.itemsize:], dtype='<c16')
    return Field(grid, values.copy())


def write_field_csv(path, field):
    """Exports ``(index, re, im)`` rows in flat C order."""
    with open(path, 'w', newline='') as stream:
        writer = csv.writer(stream)
        writer.writerow(['index', 're', 'im'])
        for idx, value in enumerate(field.values.ravel()):
            writer.writerow([idx, repr(value.real), repr(value.imag)])
