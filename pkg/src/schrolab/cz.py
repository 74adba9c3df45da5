#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


"""
Calderón–Zygmund decomposition at height λ over the dyadic cube tree of
the torus, the scale split at ``k0`` and independent verification of the
decomposition's properties.
"""


from .core import Record, Setting
from .check import real, integer, flag, listof
from .grid import Field
import csv
import math
import numpy as np


class Cube(object):
    """A dyadic cube: corner multi-index and side in cells."""

    __slots__ = ('corner', 'cells', 'spacing')

    def __init__(self, corner, cells, spacing):
        self.corner = tuple(int(c) for c in corner)
        self.cells = int(cells)
        self.spacing = spacing

    def __repr__(self):
        return "Cube(corner=%r, side=%g)" % (self.corner, self.side)

    @property
    def side(self):
        return self.cells*self.spacing

    @property
    def radius(self):
        # Half the side: the inscribed-ball radius.
        return self.side/2

    @property
    def scale(self):
        """The integer `k` with ``2^k <= radius < 2^{k+1}``."""
        mantissa, exponent = math.frexp(self.radius)
        return exponent-1

    def measure(self, dim):
        return self.side**dim

    def slices(self):
        return tuple(slice(c, c+self.cells) for c in self.corner)


class BadPart(object):
    """``b_j = (f - avg_Q f) χ_Q`` stored on its cube."""

    __slots__ = ('cube', 'values')

    def __init__(self, cube, values):
        self.cube = cube
        self.values = values

    @property
    def scale(self):
        return self.cube.scale

    def field(self, grid):
        values = np.zeros(grid.shape, dtype=complex)
        values[self.cube.slices()] = self.values
        return Field(grid, values)

    def integral(self, grid):
        return complex(self.values.sum()*grid.cell_measure)


class CZConstants(Record):
    """Measured constants of a decomposition."""

    C_ii = Setting(real(), hint="‖g‖_∞/λ")
    C_iv = Setting(real(), hint="λ Σμ(Q_j)/‖f‖₁")
    C_l2 = Setting(real(), default=None, hint="‖g‖₂²/(λ‖f‖₁)")
    reconstruction = Setting(real(), default=None,
            hint="max|f - g - Σb_j| relative to max|f|")
    mean_defect = Setting(real(), default=None,
            hint="max_j |∫b_j| relative to ‖f‖₁")
    overlap = Setting(integer(), default=None,
            hint="max number of cubes covering a point")
    overlap_9_8 = Setting(integer(), default=None,
            hint="max number of 9/8-dilated cubes covering a point")
    passed = Setting(flag(), default=None)
    failures = Setting(listof(str), default=None)


class CZResult(object):
    """``f = g + Σ_j b_j`` at height λ."""

    def __init__(self, height, good, bad_parts, constants):
        self.height = height
        self.good = good
        self.bad_parts = bad_parts
        self.overlap_bound = 1
        self.constants_report = constants

    @property
    def cubes(self):
        return [part.cube for part in self.bad_parts]

    def buckets(self):
        """Maps each scale `k` to the indices ``J_k`` of its bad parts."""
        buckets = {}
        for idx, part in enumerate(self.bad_parts):
            buckets.setdefault(part.scale, []).append(idx)
        return buckets

    def write_csv(self, path):
        """Cube table: scale, corner, side and ``∫|b_j|``."""
        grid = self.good.grid
        with open(path, 'w', newline='') as stream:
            writer = csv.writer(stream)
            writer.writerow(['scale', 'corner', 'side', 'mass'])
            for part in self.bad_parts:
                cube = part.cube
                mass = float(np.abs(part.values).sum()*grid.cell_measure)
                writer.writerow([cube.scale,
                                 " ".join(str(c) for c in cube.corner),
                                 repr(cube.side), repr(mass)])


def block_sums(values, cells):
    # Sums over the blocks of a regular partition into cubes of `cells`.
    dim = values.ndim
    count = values.shape[0]//cells
    shape = []
    for axis in range(dim):
        shape.extend([count, cells])
    blocks = values.reshape(shape)
    return blocks.sum(axis=tuple(range(1, 2*dim, 2)))


def upsample(flags, factor):
    for axis in range(flags.ndim):
        flags = np.repeat(flags, factor, axis=axis)
    return flags


def decompose(f, height):
    """
    Selects maximal dyadic cubes with ``avg_Q |f| > λ``.

    The root cube is the whole torus, so ``λ > ‖f‖₁/μ(X)`` is required.
    """
    grid = f.grid
    dim = grid.dim
    N = grid.points
    magnitude = np.abs(f.values)
    mass = magnitude.sum()*grid.cell_measure
    if not height > mass/grid.measure:
        raise ValueError("height %g does not exceed the mean %g of |f|"
                         % (height, mass/grid.measure))
    covered = np.zeros(grid.shape, dtype=bool)
    selected = []
    cells = N//2
    while cells >= 1:
        count = N//cells
        averages = block_sums(magnitude, cells)/cells**dim
        taken = block_sums(covered, cells) > 0
        chosen = (averages > height) & ~taken
        for corner in zip(*np.nonzero(chosen)):
            selected.append(Cube([c*cells for c in corner], cells,
                                 grid.spacing))
        covered |= upsample(chosen, cells)
        if count == N:
            break
        cells //= 2

    good = f.values.copy()
    bad_parts = []
    for cube in sorted(selected, key=(lambda c: (-c.cells, c.corner))):
        region = cube.slices()
        average = f.values[region].mean()
        good[region] = average
        bad_parts.append(BadPart(cube, f.values[region]-average))
    good = Field(grid, good)
    result = CZResult(height, good, bad_parts, None)
    result.constants_report = measure_constants(result, f)
    return result


def measure_constants(result, f):
    # C_ii, C_iv and the L² constant from the stored parts.
    grid = f.grid
    height = result.height
    l1 = np.abs(f.values).sum()*grid.cell_measure
    total = sum(cube.measure(grid.dim) for cube in result.cubes)
    C_ii = float(np.abs(result.good.values).max())/height
    C_iv = height*total/l1 if l1 > 0 else 0.0
    l2 = float(np.sum(np.abs(result.good.values)**2)*grid.cell_measure)
    C_l2 = l2/(height*l1) if l1 > 0 else 0.0
    return CZConstants(C_ii=C_ii, C_iv=C_iv, C_l2=C_l2)


def coverage(grid, cubes, factor=1.0):
    """Number of (dilated) cubes covering each grid point."""
    count = np.zeros(grid.shape, dtype=int)
    axis_index = np.arange(grid.points)
    for cube in cubes:
        inside = np.ones(grid.shape, dtype=bool)
        half = factor*cube.cells/2
        for axis, corner in enumerate(cube.corner):
            center = corner+(cube.cells-1)/2
            delta = np.abs(axis_index-center)
            delta = np.minimum(delta, grid.points-delta)
            view = [1]*grid.dim
            view[axis] = grid.points
            inside &= (delta < half).reshape(view)
        count += inside
    return count


def verify_properties(result, f, tolerance=1e-12):
    """
    Recomputes every property of the decomposition from scratch.

    Violations are listed in ``failures``; nothing is raised.
    """
    grid = f.grid
    dim = grid.dim
    height = result.height
    failures = []
    magnitude = np.abs(f.values)
    l1 = float(magnitude.sum()*grid.cell_measure)
    scale = max(float(magnitude.max()), 1e-300)

    # f = g + Σ b_j.
    total = result.good.values.copy()
    for part in result.bad_parts:
        total[part.cube.slices()] += part.values
    reconstruction = float(np.abs(total-f.values).max())/scale
    if reconstruction > tolerance:
        failures.append("reconstruction error %g" % reconstruction)

    # ‖g‖_∞ <= 2^n λ.
    C_ii = float(np.abs(result.good.values).max())/height
    if C_ii > 2**dim*(1+tolerance):
        failures.append("sup of good part is %g λ > 2^n λ" % C_ii)

    # Σ μ(Q_j) <= ‖f‖₁/λ.
    measure = sum(cube.measure(dim) for cube in result.cubes)
    C_iv = height*measure/l1 if l1 > 0 else 0.0
    if C_iv > 1+tolerance:
        failures.append("total cube measure is %g ‖f‖₁/λ" % C_iv)

    # Mean zero, and each b_j lives on its cube.
    mean_defect = 0.0
    for part in result.bad_parts:
        if part.values.shape != (part.cube.cells,)*dim:
            failures.append("bad part outside its cube %r" % part.cube)
        mean_defect = max(mean_defect, abs(part.integral(grid)))
    mean_defect = mean_defect/l1 if l1 > 0 else 0.0
    if mean_defect > tolerance:
        failures.append("bad part with integral %g ‖f‖₁" % mean_defect)

    # Disjoint cubes.
    overlap = int(coverage(grid, result.cubes).max()) if result.cubes else 0
    if overlap > 1:
        failures.append("cubes overlap %d times" % overlap)
    overlap_9_8 = (int(coverage(grid, result.cubes, 9/8).max())
                   if result.cubes else 0)

    # ‖g‖₂² <= 2^{n+1} λ‖f‖₁.
    l2 = float(np.sum(np.abs(result.good.values)**2)*grid.cell_measure)
    C_l2 = l2/(height*l1) if l1 > 0 else 0.0
    if C_l2 > 2**(dim+1)*(1+tolerance):
        failures.append("‖g‖₂² is %g λ‖f‖₁" % C_l2)

    return CZConstants(C_ii=C_ii, C_iv=C_iv, C_l2=C_l2,
                       reconstruction=reconstruction,
                       mean_defect=mean_defect, overlap=overlap,
                       overlap_9_8=overlap_9_8,
                       passed=(not failures), failures=failures)


def split_scales(result, k0):
    """``(h1, h2)``: bad parts with scale ``k <= k0`` and ``k > k0``."""
    grid = result.good.grid
    low = np.zeros(grid.shape, dtype=complex)
    high = np.zeros(grid.shape, dtype=complex)
    for part in result.bad_parts:
        target = low if part.scale <= k0 else high
        target[part.cube.slices()] += part.values
    return Field(grid, low), Field(grid, high)


def scale_sums(result):
    """Maps each scale to ``Σ_{j∈J_k} b_j`` as a field."""
    grid = result.good.grid
    sums = {}
    for part in result.bad_parts:
        values = sums.setdefault(part.scale,
                                 np.zeros(grid.shape, dtype=complex))
        values[part.cube.slices()] += part.values
    return dict((k, Field(grid, values)) for k, values in sums.items())
