#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


from schrolab.grid import make_grid, Field
from schrolab.symbols import (heat_symbol, schrodinger_symbol,
                              resolvent_symbol, symbol)
from schrolab.operators import (build_periodic, build_schrodinger,
                                build_dirichlet, build_dense,
                                laplacian_matrix, MatrixModel,
                                apply_function, kernel_column, kernel_matrix,
                                extended_apply, restrict, extend_by_zero,
                                potential_field, mask_field)
import numpy as np
import pytest


def test_build_periodic_rejects_order():
    grid = make_grid(1, 16, 8.0)
    for m in [1, 2.5, 3, 5]:
        with pytest.raises(ValueError):
            build_periodic(grid, m)


def test_heat_semigroup(line, noise):
    model = build_periodic(line, 2)
    once = apply_function(model, heat_symbol(0.75), noise)
    twice = model.apply(heat_symbol(0.5),
                        model.apply(heat_symbol(0.25), noise))
    assert np.allclose(once.values, twice.values, atol=1e-12)


def test_schrodinger_group_is_unitary(line, noise):
    model = build_periodic(line, 2)
    u = model.apply(schrodinger_symbol(3.0, 0.0), noise)
    assert np.sum(np.abs(u.values)**2) == pytest.approx(
            np.sum(np.abs(noise.values)**2), rel=1e-12)


def test_spectral_bound():
    grid = make_grid(1, 16, 8.0)
    model = build_periodic(grid, 2)
    assert model.spectral_bound == pytest.approx(np.pi**2*4)
    assert model.eigenvalues.max() <= model.spectral_bound*(1+1e-12)


@pytest.mark.parametrize('label', ['heat:t=0.5', 'schrodinger:t=1,s=0.5',
                                   'resolvent:t=1,s=1', 'phi'])
def test_dense_calculus_matches_fourier(label, rng):
    grid = make_grid(1, 16, 8.0)
    model = build_periodic(grid, 2)
    dense = build_dense(model)
    f = Field(grid, rng.normal(size=grid.shape))
    F = symbol(label)
    a = model.apply(F, f).values
    b = dense.apply(F, f).values
    assert np.max(np.abs(a-b)) <= 1e-9*np.max(np.abs(a))


def test_laplacian_matrix():
    grid = make_grid(2, 8, 4.0)
    A = laplacian_matrix(grid)
    assert A.shape == (64, 64)
    assert np.allclose(A, A.T)
    assert np.allclose(A.sum(axis=1), 0.0)
    assert A[0, 0] == pytest.approx(4*4.0)


def test_schrodinger_rejects_negative_potential(plane):
    V = Field(plane, -np.ones(plane.shape))
    with pytest.raises(ValueError):
        build_schrodinger(plane, V)


def test_dense_budget():
    grid = make_grid(2, 128, 128.0)
    with pytest.raises(ValueError):
        build_schrodinger(grid, Field.zeros(grid))


def test_zero_potential_is_free_laplacian(plane):
    model = build_schrodinger(plane, potential_field(plane, 'zero'))
    free = MatrixModel(plane, laplacian_matrix(plane))
    a = kernel_matrix(model, heat_symbol(1.0))
    b = kernel_matrix(free, heat_symbol(1.0))
    assert np.allclose(a, b, atol=1e-12)


def test_heat_kernel_preserves_mass(line):
    model = build_periodic(line, 2)
    K = kernel_column(model, heat_symbol(2.0), (10,))
    assert K.mass() == pytest.approx(1.0)
    assert K.distances()[10] == 0.0


def test_dirichlet_model(plane):
    mask = mask_field(plane, 'lshape')
    assert np.count_nonzero(mask) == 12*12-6*6
    model = build_dirichlet(plane, mask)
    assert model.eigenvalues.min() > 0
    assert model.unknowns().size == 108
    source = np.argwhere(mask)[0]
    K = kernel_column(model, heat_symbol(0.5), tuple(source))
    assert np.all(K.values.values[~mask] == 0)
    with pytest.raises(ValueError):
        kernel_column(model, heat_symbol(0.5), (15, 15))


def test_dirichlet_heat_is_sub_markovian(plane):
    model = build_dirichlet(plane, mask_field(plane, 'lshape'))
    A = kernel_matrix(model, heat_symbol(1.0)).real
    rows = A.sum(axis=1)*plane.cell_measure
    assert np.all(rows <= 1+1e-10)
    assert A.min() >= -1e-10*A.max()


def test_extension_by_zero(plane, rng):
    mask = mask_field(plane, 'lshape')
    model = build_dirichlet(plane, mask)
    f = Field(plane, rng.normal(size=plane.shape))
    g = extended_apply(model, heat_symbol(0.5), f)
    assert g.mask is None
    assert np.all(g.values[~mask] == 0)
    inner = model.apply(heat_symbol(0.5), restrict(f, mask))
    assert np.allclose(extend_by_zero(inner).values, g.values)
    with pytest.raises(ValueError):
        extended_apply(build_periodic(plane, 2), heat_symbol(0.5), f)


def test_field_checks(line, plane):
    model = build_periodic(line, 2)
    with pytest.raises(ValueError):
        model.apply(heat_symbol(1.0), Field.zeros(plane))
    mask = mask_field(plane, 'lshape')
    dirichlet = build_dirichlet(plane, mask)
    with pytest.raises(ValueError):
        dirichlet.apply(heat_symbol(1.0), Field.zeros(plane))


def test_potential_generators(plane):
    assert np.all(potential_field(plane, 'const:2').values == 2.0)
    first = potential_field(plane, 'randnonneg:3').values
    second = potential_field(plane, 'randnonneg:3').values
    assert np.array_equal(first, second)
    assert np.all((first.real >= 0) & (first.real < 1))
    harmonic = potential_field(plane, 'harmonic:1').values.real
    assert harmonic[plane.center()] == 0.0
    with pytest.raises(ValueError):
        potential_field(plane, 'wave')


def test_mask_generators(line, plane, tmp_path):
    with pytest.raises(ValueError):
        mask_field(line, 'lshape')
    assert mask_field(plane, 'all').all()
    assert np.count_nonzero(mask_field(line, 'interval:4,20')) == 16
    assert mask_field(plane, 'disk:2.5').sum() == 21
    path = tmp_path/'mask.csv'
    path.write_text("index,value\n0,1\n17,1\n")
    mask = mask_field(plane, str(path))
    assert np.count_nonzero(mask) == 2
    assert mask[1, 1]


def free_and_schrodinger(grid):
    return [build_periodic(grid, 2),
            build_schrodinger(grid, potential_field(grid, 'randnonneg:3'))]


def test_calculus_is_multiplicative(line, noise):
    F = heat_symbol(0.5)
    G = resolvent_symbol(1.0, 1.0)
    for model in free_and_schrodinger(line):
        composed = model.apply(F, model.apply(G, noise)).values
        product = model.apply(F*G, noise).values
        assert np.max(np.abs(composed-product)) <= \
                1e-10*np.max(np.abs(product))


def test_calculus_is_self_adjoint(line, rng):
    f = Field(line, rng.normal(size=line.shape)+1j*rng.normal(size=line.shape))
    g = Field(line, rng.normal(size=line.shape)+1j*rng.normal(size=line.shape))
    for model in free_and_schrodinger(line):
        for F, adjoint in [(heat_symbol(0.5), heat_symbol(0.5)),
                           (schrodinger_symbol(2.0, 0.0),
                            schrodinger_symbol(-2.0, 0.0))]:
            lhs = np.vdot(model.apply(F, f).values, g.values)
            rhs = np.vdot(f.values, model.apply(adjoint, g).values)
            assert abs(lhs-rhs) <= 1e-10*abs(lhs)


def test_heat_preserves_positivity(line, rng):
    values = np.zeros(line.shape)
    values[rng.choice(line.points, size=5, replace=False)] = \
            rng.uniform(0.5, 2.0, 5)
    f = Field(line, values)
    for model in free_and_schrodinger(line):
        u = model.apply(heat_symbol(1.0), f).values
        assert np.max(np.abs(u.imag)) <= 1e-12*np.max(u.real)
        assert u.real.min() >= -1e-12*np.max(u.real)


def test_dirichlet_interval_spectrum():
    grid = make_grid(1, 32, 32.0)
    model = build_dirichlet(grid, mask_field(grid, 'interval:4,14'))
    M = 10
    j = np.arange(1, M+1)
    expected = 4*np.sin(np.pi*j/(2*(M+1)))**2
    assert model.eigenvalues.shape == (M,)
    assert np.allclose(model.eigenvalues, expected, rtol=0, atol=1e-9)


def test_zero_potential_spectrum(plane):
    model = build_schrodinger(plane, potential_field(plane, 'zero'))
    k = np.arange(plane.points)
    axis = 4*np.sin(np.pi*k/plane.points)**2/plane.spacing**2
    expected = np.sort((axis[:, None]+axis[None, :]).ravel())
    assert np.allclose(model.eigenvalues, expected, rtol=0, atol=1e-9)
