#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


"""
Non-negative self-adjoint operators and their functional calculus.

Two realizations are provided: Fourier-diagonal free models with symbol
``|ξ|^m`` on the torus, and dense matrix models (``-Δ+V`` with a
finite-difference Laplacian, the Dirichlet Laplacian of a masked
subdomain) diagonalized once at construction.
"""


from .grid import Field
from .symbols import parse_label
import csv
import os.path
import numpy as np
import scipy.linalg
import scipy.sparse


# Unknowns allowed in a dense eigendecomposition.
DENSE_BUDGET = 4096


class OperatorModel(object):
    """A non-negative self-adjoint operator on a grid."""

    variant = None

    def __init__(self, grid):
        self.grid = grid

    @property
    def spectral_bound(self):
        raise NotImplementedError("%s.spectral_bound"
                                  % self.__class__.__name__)

    @property
    def mask(self):
        return None

    def check_field(self, f):
        if f.grid != self.grid:
            raise ValueError("field grid %r does not match model grid %r"
                             % (f.grid, self.grid))
        if f.domain != 'physical':
            raise ValueError("expected a field in physical space")
        if self.mask is None:
            if f.mask is not None:
                raise ValueError("masked field applied to an unmasked model")
        elif f.mask is None or not np.array_equal(f.mask, self.mask):
            raise ValueError("field mask does not match model mask")

    def multiplier(self, F, eigenvalues):
        values = F(eigenvalues)
        if not np.all(np.isfinite(values)):
            raise ValueError("symbol %s is not finite on the spectrum"
                             % F.label)
        return values

    def apply(self, F, f):
        """``F(L) f``."""
        raise NotImplementedError("%s.apply()" % self.__class__.__name__)

    def unknowns(self):
        """Flat indices of the grid points the operator acts on."""
        if self.mask is None:
            return np.arange(self.grid.size)
        return np.flatnonzero(self.mask.ravel())

    def matrix(self, F):
        """Dense matrix of ``F(L)`` on the unknowns."""
        index = self.unknowns()
        columns = []
        for idx in index:
            values = np.zeros(self.grid.size, dtype=complex)
            values[idx] = 1.0
            f = Field(self.grid, values, self.mask)
            columns.append(self.apply(F, f).values.ravel()[index])
        return np.array(columns).T


class PeriodicModel(OperatorModel):
    """Fourier-diagonal model with eigenvalue symbol ``|ξ|^m``."""

    variant = 'fourier_diagonal'

    def __init__(self, grid, order):
        super(PeriodicModel, self).__init__(grid)
        self.order = order
        self.eigenvalues = grid.frequency_norms()**order

    def __repr__(self):
        return "%s(%r, m=%d)" % (self.__class__.__name__,
                                 self.grid, self.order)

    @property
    def spectral_bound(self):
        grid = self.grid
        return (np.pi*grid.points/grid.box_length*np.sqrt(grid.dim)) \
                **self.order

    def apply(self, F, f):
        self.check_field(f)
        values = np.fft.ifftn(np.fft.fftn(f.values) *
                              self.multiplier(F, self.eigenvalues))
        return Field(self.grid, values)


class MatrixModel(OperatorModel):
    """Dense symmetric matrix diagonalized by ``scipy.linalg.eigh``."""

    variant = 'matrix_eig'

    def __init__(self, grid, matrix, mask=None, label=None):
        super(MatrixModel, self).__init__(grid)
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape[0] > DENSE_BUDGET:
            raise ValueError("%d unknowns exceed the dense budget of %d"
                             % (matrix.shape[0], DENSE_BUDGET))
        self._mask = mask
        self.label = label
        eigenvalues, eigenvectors = scipy.linalg.eigh(matrix)
        # Round-off below zero is clipped; anything larger is an error.
        floor = -1e-10*max(1.0, abs(eigenvalues).max())
        if eigenvalues.min() < floor:
            raise ValueError("operator is not non-negative: eigenvalue %g"
                             % eigenvalues.min())
        self.eigenvalues = np.maximum(eigenvalues, 0.0)
        self.eigenvectors = eigenvectors

    def __repr__(self):
        return "%s(%r, %s)" % (self.__class__.__name__,
                               self.grid, self.label)

    @property
    def mask(self):
        return self._mask

    @property
    def spectral_bound(self):
        return float(self.eigenvalues[-1])

    def apply(self, F, f):
        self.check_field(f)
        index = self.unknowns()
        vector = f.values.ravel()[index]
        U = self.eigenvectors
        coefficients = U.T @ vector
        coefficients = coefficients*self.multiplier(F, self.eigenvalues)
        values = np.zeros(self.grid.size, dtype=complex)
        values[index] = U @ coefficients
        return Field(self.grid, values, self.mask)

    def matrix(self, F):
        U = self.eigenvectors
        return (U*self.multiplier(F, self.eigenvalues)) @ U.T


def build_periodic(grid, m):
    """Free model of order `m` (``m = 2`` is the Laplacian)."""
    if int(m) != m or m < 2:
        raise ValueError("order must be an integer >= 2, got %r" % m)
    if m % 2:
        raise ValueError("order must be even, got %r" % m)
    return PeriodicModel(grid, int(m))


def laplacian_matrix(grid):
    """The periodic ``(2n+1)``-point finite-difference ``-Δ``."""
    N = grid.points
    ones = np.ones(N)
    # Second differences with wraparound.
    lap1d = scipy.sparse.diags([-ones[:-1], 2*ones, -ones[:-1]],
                               [-1, 0, 1], format='lil')
    lap1d[0, N-1] = -1.0
    lap1d[N-1, 0] = -1.0
    lap1d = lap1d.tocsr()/grid.spacing**2
    eye = scipy.sparse.identity(N, format='csr')
    total = scipy.sparse.csr_matrix((grid.size, grid.size))
    for axis in range(grid.dim):
        term = None
        for other in range(grid.dim):
            factor = lap1d if other == axis else eye
            term = factor if term is None else scipy.sparse.kron(term, factor)
        total = total + term
    return total.toarray()


def build_schrodinger(grid, V):
    """``-Δ + V`` with ``V >= 0``."""
    if grid.size > DENSE_BUDGET:
        raise ValueError("grid of %d points exceeds the dense budget of %d"
                         % (grid.size, DENSE_BUDGET))
    potential = np.asarray(V.values)
    if np.any(potential.imag != 0):
        raise ValueError("potential must be real")
    potential = potential.real.ravel()
    if np.any(potential < 0):
        raise ValueError("potential must be non-negative")
    matrix = laplacian_matrix(grid) + np.diag(potential)
    return MatrixModel(grid, matrix, label="schrodinger")


def build_dirichlet(grid, mask):
    """Dirichlet Laplacian: exterior values pinned to zero."""
    mask = np.asarray(getattr(mask, 'values', mask)).real.astype(bool)
    mask = mask.reshape(grid.shape)
    count = np.count_nonzero(mask)
    if count == 0:
        raise ValueError("empty mask")
    if count > DENSE_BUDGET:
        raise ValueError("mask of %d points exceeds the dense budget of %d"
                         % (count, DENSE_BUDGET))
    index = np.flatnonzero(mask.ravel())
    matrix = laplacian_matrix(grid)[np.ix_(index, index)]
    return MatrixModel(grid, matrix, mask=mask, label="dirichlet")


def build_dense(model):
    """A matrix model of the same operator, for oracle comparisons."""
    grid = model.grid
    matrix = model.matrix(EIGENVALUE).real
    matrix = (matrix+matrix.T)/2
    return MatrixModel(grid, matrix, mask=model.mask, label="dense")


class _Eigenvalue(object):
    # The symbol λ ↦ λ, without the support machinery.
    label = "lambda"

    def __call__(self, lam):
        return np.asarray(lam, dtype=complex)


EIGENVALUE = _Eigenvalue()


def apply_function(model, F, f):
    """``F(L) f`` by exact functional calculus."""
    return model.apply(F, f)


class KernelColumn(object):
    """``K(·, y)`` of ``F(L)`` in the continuum normalization."""

    __slots__ = ('model', 'source', 'values')

    def __init__(self, model, source, values):
        self.model = model
        self.source = source
        self.values = values

    def distances(self):
        return self.model.grid.distances(self.source)

    def mass(self):
        grid = self.model.grid
        return complex(self.values.values.sum()*grid.cell_measure)


def kernel_column(model, F, y):
    """Applies ``F(L)`` to the unit-mass delta at `y`."""
    grid = model.grid
    y = grid.index(y)
    mask = model.mask
    if mask is not None and not mask[y]:
        raise ValueError("source %r lies outside the mask" % (y,))
    delta = Field.delta(grid, y, mask)
    return KernelColumn(model, y, model.apply(F, delta))


def kernel_matrix(model, F):
    """``K(x, y)`` for all unknowns, ``h^{-n}`` normalized."""
    return model.matrix(F)/model.grid.cell_measure


def extend_by_zero(f):
    """Promotes a field on a subdomain to the whole torus."""
    if f.mask is None:
        raise ValueError("expected a field on a masked subdomain")
    return Field(f.grid, f.values.copy())


def restrict(f, mask):
    """Drops the values of `f` outside `mask`."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != f.grid.shape:
        raise ValueError("mask shape %r does not match grid shape %r"
                         % (mask.shape, f.grid.shape))
    if f.mask is not None and not np.array_equal(f.mask, mask):
        raise ValueError("field is already restricted to another mask")
    return Field(f.grid, np.where(mask, f.values, 0), mask)


def extended_apply(model, F, f):
    """``T̃f = T(fχ_Ω)`` on Ω and 0 outside, for a masked model."""
    if model.mask is None:
        raise ValueError("extension by zero needs a masked model")
    return extend_by_zero(model.apply(F, restrict(f, model.mask)))


def potential_field(grid, spec, seed=None):
    """
    A potential from a generator label or a CSV file.

    Generators: ``zero``, ``const:c``, ``harmonic:ω``, ``randnonneg:seed``.
    """
    if os.path.isfile(spec):
        return Field(grid, read_indexed_csv(grid, spec))
    name, args, kwds = parse_label(spec)
    if name == 'zero':
        values = np.zeros(grid.shape)
    elif name == 'const':
        values = np.full(grid.shape, float(args[0] if args else kwds['c']))
    elif name == 'harmonic':
        omega = float(args[0] if args else kwds.get('omega', 1.0))
        values = omega**2*grid.distances(grid.center())**2
    elif name == 'randnonneg':
        if args:
            seed = int(args[0])
        rng = np.random.default_rng(seed)
        values = rng.uniform(0.0, 1.0, grid.shape)
    else:
        raise ValueError("unknown potential %r" % spec)
    return Field(grid, values)


def mask_field(grid, spec):
    """
    A boolean mask from a generator label or a CSV file.

    Generators: ``all``, ``disk:r``, ``interval:a,b`` (1-D), ``lshape``.
    """
    if os.path.isfile(spec):
        return read_indexed_csv(grid, spec).real != 0
    name, args, kwds = parse_label(spec)
    N = grid.points
    if name == 'all':
        return np.ones(grid.shape, dtype=bool)
    if name == 'disk':
        r = float(args[0] if args else kwds['r'])
        return grid.distances(grid.center()) < r
    if name == 'interval':
        a, b = int(args[0]), int(args[1])
        mask = np.zeros(grid.shape, dtype=bool)
        mask[(slice(a, b),)+(slice(None),)*(grid.dim-1)] = True
        return mask
    if name == 'lshape':
        if grid.dim < 2:
            raise ValueError("an L-shaped mask needs n >= 2")
        # The box [N/8, 7N/8)^n minus its upper corner quadrant.
        lo, mid, hi = N//8, N//2, N-N//8
        mask = np.zeros(grid.shape, dtype=bool)
        mask[(slice(lo, hi),)*grid.dim] = True
        mask[(slice(mid, hi),)*2+(slice(lo, hi),)*(grid.dim-2)] = False
        return mask
    raise ValueError("unknown mask %r" % spec)


def read_indexed_csv(grid, path):
    # Rows of (flat index, value); a header row is skipped.
    values = np.zeros(grid.size)
    with open(path, newline='') as stream:
        for row in csv.reader(stream):
            if not row or row[0].startswith('#'):
                continue
            try:
                idx = int(row[0])
            except ValueError:
                continue
            values[idx] = float(row[1])
    return values.reshape(grid.shape)
