#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


from schrolab.grid import (make_grid, Field, torus_distance, ball_volume,
                           VolumeTable, scan_radii, measure_doubling,
                           spectral_transform, write_field, read_field,
                           write_field_csv, FORWARD, INVERSE)
import numpy as np
import pytest


@pytest.mark.parametrize('n, N, L_box', [
    (4, 64, 1.0),
    (1, 100, 1.0),
    (1, 4, 1.0),
    (2, 64, 0.0),
])
def test_make_grid_rejects(n, N, L_box):
    with pytest.raises(ValueError):
        make_grid(n, N, L_box)


def test_grid_geometry(plane):
    assert plane.shape == (16, 16)
    assert plane.size == 256
    assert plane.spacing == 1.0
    assert plane.cell_measure == 1.0
    assert plane.measure == 256.0
    assert plane == make_grid(2, 16, 16.0)
    assert plane != make_grid(2, 16, 32.0)


def test_torus_distance_wraps():
    grid = make_grid(1, 16, 16.0)
    assert torus_distance(grid, 0, 15) == 1.0
    assert torus_distance(grid, 0, 8) == 8.0
    plane = make_grid(2, 16, 16.0)
    assert torus_distance(plane, (0, 0), (15, 12)) == pytest.approx(
            np.sqrt(1+16))
    with pytest.raises(ValueError):
        torus_distance(plane, (0, 0), 3)


def test_distances_agree_with_pairwise(plane):
    center = (3, 14)
    distances = plane.distances(center)
    for point in [(0, 0), (3, 14), (15, 1), (8, 8)]:
        assert distances[point] == pytest.approx(
                torus_distance(plane, center, point))


def test_ball_volume_counts_open_balls(plane):
    # Lattice points with x² + y² < 6.25.
    assert ball_volume(plane, (8, 8), 2.5) == 21.0
    assert ball_volume(plane, (0, 0), 2.5) == 21.0
    assert ball_volume(plane, (8, 8), 1.0) == 1.0
    assert ball_volume(plane, (3, 5), plane.diameter+1.0) == plane.measure
    with pytest.raises(ValueError):
        ball_volume(plane, (8, 8), 0.0)


def test_volume_table_matches_ball_volume(plane):
    volume = VolumeTable(plane)
    for r in [0.5, 1.0, 2.5, 4.0, 7.3]:
        assert float(volume(r)) == ball_volume(plane, (5, 9), r)


def test_scan_radii(line):
    radii = scan_radii(line)
    assert radii[0] == 4*line.spacing
    assert radii[-1] <= line.box_length/8
    assert all(b == 2*a for a, b in zip(radii, radii[1:]))


@pytest.mark.parametrize('n, N, L_box', [(1, 256, 256.0), (2, 64, 64.0)])
def test_measure_doubling(n, N, L_box):
    grid = make_grid(n, N, L_box)
    report = measure_doubling(grid)
    assert grid.doubling_report is report
    assert 1.0 < report.C_doub <= 2.0**n*3
    assert n <= report.n_exp <= n+0.5


def test_delta_has_unit_mass(plane):
    f = Field.delta(plane, (2, 3))
    assert f.values.sum()*plane.cell_measure == pytest.approx(1.0)


def test_field_mask_must_hold(plane):
    mask = np.zeros(plane.shape, dtype=bool)
    mask[:4, :4] = True
    with pytest.raises(ValueError):
        Field(plane, np.ones(plane.shape), mask)
    f = Field(plane, np.where(mask, 1.0, 0.0), mask)
    g = f.replace(np.ones(plane.shape))
    assert np.count_nonzero(g.values) == 16
    with pytest.raises(ValueError):
        f+Field.zeros(plane)


@pytest.mark.parametrize('n, N, L_box', [(1, 64, 10.0), (2, 16, 3.0)])
def test_plancherel(n, N, L_box, rng):
    grid = make_grid(n, N, L_box)
    f = Field(grid, rng.normal(size=grid.shape)+1j*rng.normal(size=grid.shape))
    F = spectral_transform(f, FORWARD)
    assert F.domain == 'frequency'
    physical = np.sum(np.abs(f.values)**2)*grid.cell_measure
    frequency = np.sum(np.abs(F.values)**2)*grid.dual_cell_measure
    assert frequency == pytest.approx(physical, rel=1e-12)
    back = spectral_transform(F, INVERSE)
    assert np.allclose(back.values, f.values, atol=1e-12)


def test_transform_of_gaussian():
    # The unitary transform maps e^{-x²/2} to e^{-ξ²/2}.
    grid = make_grid(1, 256, 32.0)
    x = (np.arange(256)-128)*grid.spacing
    f = Field(grid, np.fft.ifftshift(np.exp(-x**2/2)))
    F = spectral_transform(f)
    xi = grid.frequencies()[0]
    assert np.allclose(F.values, np.exp(-xi**2/2), atol=1e-10)


def test_masked_transform_rejected(plane):
    mask = np.ones(plane.shape, dtype=bool)
    with pytest.raises(ValueError):
        spectral_transform(Field.zeros(plane, mask))


def test_field_files(tmp_path, noise):
    path = str(tmp_path/'field.bin')
    write_field(path, noise)
    loaded = read_field(path)
    assert loaded.grid == noise.grid
    assert np.array_equal(loaded.values, noise.values)
    csv_path = tmp_path/'field.csv'
    write_field_csv(str(csv_path), noise)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == 'index,re,im'
    assert len(lines) == noise.grid.size+1
