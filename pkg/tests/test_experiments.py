#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


from schrolab.core import to_key
from schrolab.ctl import Control
from schrolab.ui import ConsoleUI
from schrolab.grid import make_grid, Field
from schrolab.operators import build_periodic
from schrolab.norms import lp_norm
from schrolab.experiments import (ExperimentConfig, ExperimentReport,
                                  ReportRow, sweep, spread, build_model,
                                  miyachi_probe, probe_family, majorant,
                                  ballistic_reach,
                                  sharpness_experiment, inequality_sweep,
                                  kernel_estimate_check, besov_envelope_check,
                                  partition_of_unity_check, oracle_check,
                                  doubling_check, cz_invariant_check,
                                  besov_piece, product_pairs, finish,
                                  with_refinement, scattered_spikes)
from schrolab.std import (Sharpness, Weak11, LpBound, CZHeatL2, FeynmanKac,
                          KernelCheck, TailIntegral, BesovEnvelope, CZCheck,
                          PartitionOfUnity, Oracle, Doubling)
from schrolab.symbols import besov_norm
import io
import math
import numpy as np
import pytest


def config(kind, **settings):
    """Loads the input record of an experiment kind."""
    mapping = dict((to_key(key), value) for key, value in settings.items())
    for field in kind.Input.__fields__:
        if field.required:
            mapping.setdefault(field.key, 'test')
    return kind.Input.__load__(mapping)


def test_sweep_orders_rows():
    rows = sweep(lambda params: params[0]*2, [(3,), (1,), (2,)], workers=3)
    assert rows == [((1,), 2), ((2,), 4), ((3,), 6)]
    assert sweep(lambda params: params[0], [(2,), (1,)]) == \
            [((1,), 1), ((2,), 2)]
    with pytest.raises(ValueError):
        sweep(abs, [])


def test_spread():
    assert spread([2.0, 0.0, 4.0]) == 2.0
    assert spread([0.0]) == 1.0


def test_report_table_and_csv(tmp_path):
    rows = [ReportRow((1.0,), 0.5, 1.0, 0.5, (7,)),
            ReportRow((2.0,), 0.25, 1.0, 0.25, (8,))]
    report = ExperimentReport(kind='demo', header=('t',), rows=rows,
                              summary=(('constant', 0.5),),
                              extra_header=('extra',))
    assert report.max_ratio == 0.5
    assert report.value('constant') == 0.5
    with pytest.raises(KeyError):
        report.value('slope')
    columns, table = report.table()
    assert columns == ('t', 'measured', 'bound', 'ratio', 'extra')
    assert table[1] == (2.0, 0.25, 1.0, 0.25, 8)
    path = tmp_path/'demo.csv'
    report.write_csv(str(path))
    assert path.read_text().splitlines() == \
            ['t,measured,bound,ratio,extra',
             '1.0,0.5,1.0,0.5,7',
             '2.0,0.25,1.0,0.25,8']


def test_build_model_needs_second_order():
    cfg = ExperimentConfig.__load__({'operator': 'schrodinger', 'm': 4,
                                     'N': 16})
    with pytest.raises(ValueError):
        build_model(cfg)


def test_miyachi_probe():
    grid = make_grid(1, 64, 64.0)
    model = build_periodic(grid, 2)
    probe = miyachi_probe(model)
    assert lp_norm(probe, 1) == pytest.approx(1.0)
    flat = miyachi_probe(model, Field(grid, np.ones(grid.shape)))
    assert np.all(flat.values == 0)


def test_probe_family():
    cfg = ExperimentConfig.__load__({'N': 64, 'L-box': 64, 'probes': 3})
    model = build_model(cfg)
    family = probe_family(model, cfg)
    labels = [label for label, f in family]
    assert labels == ['delta:0', 'delta:1', 'delta:2', 'delta:3',
                      'miyachi', 'random:0', 'random:1', 'random:2']
    for label, f in family:
        assert lp_norm(f, 1) == pytest.approx(1.0)


def test_majorant_decreases():
    grid = make_grid(1, 64, 16.0)
    distances = np.unique(grid.distances((0,)))
    P = majorant(grid, distances, 1.0, 2)
    assert np.all(P > 0)
    assert np.all(np.diff(P) <= 0)


def test_partition_of_unity():
    report = partition_of_unity_check(config(PartitionOfUnity,
                                             samples=2000))
    assert report.passed
    assert report.value('max_error') <= 1e-12


def test_oracle():
    report = oracle_check(config(Oracle, sizes=[16], fields=2))
    assert report.passed
    assert len(report.rows) == 5*2


@pytest.mark.parametrize('n, N', [(1, 256), (2, 32)])
def test_doubling(n, N):
    report = doubling_check(config(Doubling, n=n, N=N, L_box=float(N)))
    assert report.passed
    assert report.value('n_exp') >= n
    assert report.value('n_exp') <= n+0.2


@pytest.mark.parametrize('n, N', [(1, 64), (2, 16)])
def test_cz_battery(n, N):
    report = cz_invariant_check(config(CZCheck, n=n, N=N, L_box=float(N),
                                       inputs=3, workers=2))
    assert report.passed, report.failures
    assert len(report.rows) == 3*3


def test_l2_ratio_is_one():
    cfg = config(LpBound, N=64, L_box=64.0, p=[2], t=[0, 1, 4, 16],
                 probes=2)
    report = inequality_sweep('lp_bound', cfg)
    assert report.passed
    assert report.fit is None
    for row in report.rows:
        assert row.measured <= 1+1e-10
        assert row.measured == pytest.approx(1.0)


def test_weak11_rows():
    cfg = config(Weak11, N=256, L_box=256.0, t=[0, 1, 2, 4], probes=2,
                 fit_min=1.0)
    report = inequality_sweep('weak11_upper', cfg)
    assert [row.params for row in report.rows] == \
            [(0.0,), (1.0,), (2.0,), (4.0,)]
    assert all(row.measured > 0 for row in report.rows)
    assert report.fit is not None
    assert len(report.points) == 3


@pytest.mark.parametrize('settings', [
    {'operator': 'schrodinger', 'potential': 'zero', 'n': 1, 'N': 16,
     'L_box': 16.0, 'trials': 1},
    {'operator': 'schrodinger', 'n': 1, 'N': 16, 'L_box': 16.0,
     'trials': 2},
    {'operator': 'dirichlet', 'n': 2, 'N': 16, 'L_box': 16.0},
])
def test_feynman_kac(settings):
    cfg = config(FeynmanKac, t=[0.25, 1.0], **settings)
    report = inequality_sweep('feynman_kac', cfg)
    assert report.passed, report.failures
    assert all(row.extras[0] >= -1e-10 for row in report.rows)


def test_feynman_kac_without_potential_is_exact():
    cfg = config(FeynmanKac, potential='zero', N=16, L_box=16.0, trials=1,
                 t=[1.0])
    report = inequality_sweep('feynman_kac', cfg)
    assert report.rows[0].measured == pytest.approx(1.0)


def test_feynman_kac_needs_matrix_model():
    cfg = config(FeynmanKac, operator='schrodinger', N=16)
    with pytest.raises(ValueError):
        inequality_sweep('feynman_kac', cfg.__clone__(operator='free'))


def test_unknown_kinds():
    cfg = ExperimentConfig.__load__({'N': 16})
    with pytest.raises(ValueError):
        inequality_sweep('weak22', cfg)
    with pytest.raises(ValueError):
        kernel_estimate_check('heat_decay', cfg)


def test_sharpness_box_too_small():
    cfg = config(Sharpness, L_box=64.0)
    with pytest.raises(ValueError) as info:
        sharpness_experiment(cfg)
    assert "box too small" in str(info.value)


def test_sharpness_needs_positive_times():
    cfg = config(Sharpness, N=1024, t=[0, 4, 8])
    with pytest.raises(ValueError):
        sharpness_experiment(cfg)


def test_q_kernel_rejects_large_c0():
    cfg = config(KernelCheck, kernel_check='q_kernel', N=256, L_box=64.0,
                 c0=[2.0])
    with pytest.raises(ValueError):
        kernel_estimate_check('q_kernel', cfg)


def test_q_kernel_mass():
    cfg = config(KernelCheck, kernel_check='q_kernel', N=1024, L_box=64.0,
                 k=[1, 2], c0=[1.0, 0.5])
    report = kernel_estimate_check('q_kernel', cfg)
    assert [row.params for row in report.rows] == \
            [(1, 0.5), (1, 1.0), (2, 0.5), (2, 1.0)]
    assert all(0 < row.measured < cfg.stability for row in report.rows)
    for row in report.rows:
        assert row.extras[0] == max(other.measured for other in report.rows
                                    if other.params[0] == row.params[0])
    assert report.extra_header == ('sup_at_k',)
    assert report.value('sup_spread') >= 1.0


def test_complex_time_at_zero_tau():
    cfg = config(KernelCheck, kernel_check='complex_time', N=1024,
                 L_box=128.0, tau=[0.0], s=[0.0], R=[0.5, 1.0])
    report = kernel_estimate_check('complex_time', cfg)
    assert len(report.rows) == 2
    assert report.value('spread') >= 1.0
    assert all(row.ratio > 0 for row in report.rows)


def test_besov_window():
    with pytest.raises(ValueError):
        besov_envelope_check(config(BesovEnvelope, s=[2.0]))


def test_besov_piece_vanishes_at_fine_scales():
    coarse = besov_norm(besov_piece(0, 2, 0, 0.0, 2, 1), 0.65)
    fine = besov_norm(besov_piece(-12, 2, 0, 0.0, 2, 1), 0.65)
    assert 0 < fine < coarse


def test_product_pairs_are_submultiplicative():
    for F, G in product_pairs(4, 7):
        assert besov_norm(F*G, 0.65) <= \
                besov_norm(F, 0.65)*besov_norm(G, 0.65)*(1+1e-9)


def test_besov_envelope_small():
    cfg = config(BesovEnvelope, t=[0.0], k=[2], ell=[-2, -1, 0],
                 samples=2**12, pairs=2, stability=1000.0)
    report = besov_envelope_check(cfg)
    assert [row.params[1] for row in report.rows] == [-2, -1, 0]
    assert report.value('product_ratio') <= 1+1e-5
    assert report.passed


def test_reports_are_deterministic():
    cfg = config(CZCheck, N=64, L_box=64.0, inputs=2)
    first = cz_invariant_check(cfg)
    second = cz_invariant_check(cfg)
    assert first.table() == second.table()


def test_refinement_compares_grids():
    def compute(cfg):
        rows = [ReportRow((1.0,), 1.0, 1.0, cfg.N/64.0)]
        if cfg.N == 64:
            rows.append(ReportRow((2.0,), 0.5, 1.0, 0.5))
        return finish('demo', ('t',), rows, [], [('constant', cfg.N/64.0)])

    cfg = ExperimentConfig.__load__({'N': 64, 'stability': 3})
    report = with_refinement(compute, cfg)
    assert report.passed
    assert report.extra_header == ('ratio_2N',)
    assert report.rows[0].extras == (2.0,)
    assert math.isnan(report.rows[1].extras[0])
    assert report.value('constant') == 1.0
    assert report.value('refinement') == 2.0
    strict = with_refinement(compute, cfg.__clone__(stability=1.5))
    assert not strict.passed
    assert "N=128" in strict.failures[0]


KIND_SETTINGS = [
    (Sharpness, {'N': 256, 'L_box': 128.0, 't': [4, 8, 16]}),
    (Weak11, {'N': 64, 'L_box': 256.0, 't': [0, 1, 2, 4], 'probes': 2,
              'fit_min': 1.0}),
    (LpBound, {'N': 64, 'L_box': 64.0, 'p': [2], 't': [0, 1, 4],
               'probes': 2}),
    (CZHeatL2, {'N': 32, 'L_box': 32.0, 'spikes': 2, 'heights': [2],
                't': [0], 'inputs': 2}),
    (FeynmanKac, {'N': 16, 'L_box': 16.0, 'trials': 1, 't': [1.0]}),
    (KernelCheck, {'kernel_check': 'resolvent_decay', 'N': 64,
                   'L_box': 32.0, 't': [1.0]}),
    (KernelCheck, {'kernel_check': 'harnack_annulus', 'N': 64,
                   'L_box': 32.0, 't': [1.0]}),
    (KernelCheck, {'kernel_check': 'q_kernel', 'N': 64, 'L_box': 32.0,
                   'k': [1], 'c0': [1.0]}),
    (KernelCheck, {'kernel_check': 'complex_time', 'N': 64, 'L_box': 32.0,
                   'tau': [0.0, 1.0], 's': [0.0], 'R': [1.0]}),
    (KernelCheck, {'kernel_check': 'weighted_multiplier', 'N': 64,
                   'L_box': 64.0, 's': [0.0], 'R': [0.5, 1.0]}),
    (TailIntegral, {'N': 64, 'L_box': 128.0, 't': [1.0], 'dk': [1, 2]}),
    (BesovEnvelope, {'t': [0.0], 'k': [2], 'ell': [-1, 0],
                     'samples': 2**12, 'pairs': 1, 'stability': 1000.0}),
    (CZCheck, {'N': 32, 'L_box': 32.0, 'inputs': 2}),
    (PartitionOfUnity, {'samples': 200}),
    (Oracle, {'sizes': [16], 'fields': 1}),
    (Doubling, {'N': 64, 'L_box': 64.0}),
]


@pytest.mark.parametrize('kind, settings', KIND_SETTINGS,
                         ids=[settings.get('kernel_check', kind.__name__)
                              for kind, settings in KIND_SETTINGS])
def test_every_kind_reports(workdir, kind, settings):
    cfg = config(kind, **settings)
    ctl = Control(ui=ConsoleUI(io.StringIO()))
    report = kind(ctl, cfg).check()
    assert isinstance(report, ExperimentReport)
    columns, rows = report.table()
    assert rows
    assert all(len(row) == len(columns) for row in rows)
    assert ctl.entries[-1][3] is None
    if cfg.refine:
        assert columns[-1] == 'ratio_2N'
        assert report.value('refinement') >= 1.0
    else:
        assert 'ratio_2N' not in columns


def test_refinement_defaults():
    assert config(Weak11).refine
    assert config(CZHeatL2).refine
    for kind in [PartitionOfUnity, BesovEnvelope, Oracle]:
        assert not config(kind).refine


def test_sharpness_slope():
    cfg = config(Sharpness, N=4096, L_box=512.0, t=[4, 8, 16, 32],
                 tolerance=0.25)
    report = sharpness_experiment(cfg)
    assert report.passed, report.failures
    assert abs(report.value('slope')-0.5) <= 0.25
    assert report.value('min_envelope') > 0


def test_weak11_box_too_small():
    cfg = config(Weak11, N=256, L_box=64.0, t=[0, 32])
    with pytest.raises(ValueError) as info:
        inequality_sweep('weak11_upper', cfg)
    assert "box too small" in str(info.value)


def test_weak11_defaults_fit_the_box():
    cfg = config(Weak11)
    assert cfg.fit_min == 4.0
    for N in [cfg.N, 2*cfg.N]:
        model = build_periodic(make_grid(cfg.n, N, cfg.L_box), cfg.m)
        assert 2*ballistic_reach(model, max(cfg.t)) <= cfg.L_box


def test_scattered_spikes():
    grid = make_grid(2, 16, 16.0)
    f = scattered_spikes(grid, 7, 8, 5)
    support = np.argwhere(f.values != 0)
    assert len(support) == 5
    assert support.max() < 8
    assert lp_norm(f, 1) == pytest.approx(1.0)
    assert np.allclose(f.values[f.values != 0], 0.2)
    assert np.array_equal(scattered_spikes(grid, 7, 8, 5).values, f.values)


def test_cz_heat_l2():
    cfg = config(CZHeatL2, N=128, L_box=128.0, spikes=4, heights=[2, 4],
                 t=[0], inputs=4, stability=3.0)
    report = inequality_sweep('cz_heat_l2', cfg)
    assert report.header == ('box', 'input', 'height', 't')
    assert len(report.rows) == 2*4*2
    assert report.passed, report.failures
    assert all(row.measured > 0 for row in report.rows)
    assert 1.0 <= report.value('spread') <= 3.0


def test_cz_heat_l2_needs_free_model():
    cfg = config(CZHeatL2, operator='dirichlet', n=2, N=16, L_box=16.0)
    with pytest.raises(ValueError):
        inequality_sweep('cz_heat_l2', cfg)


def test_resolvent_decay():
    cfg = config(KernelCheck, kernel_check='resolvent_decay', N=256,
                 L_box=128.0, t=[4.0, 16.0])
    report = kernel_estimate_check('resolvent_decay', cfg)
    assert report.passed, report.failures
    assert [row.params for row in report.rows] == [(4.0,), (16.0,)]
    for row in report.rows:
        assert 1-1e-9 <= row.measured < cfg.stability
        assert row.extras[1] < 0


def test_harnack_annulus():
    cfg = config(KernelCheck, kernel_check='harnack_annulus', N=256,
                 L_box=64.0)
    report = kernel_estimate_check('harnack_annulus', cfg)
    assert report.passed, report.failures
    assert report.value('max_majorant_ratio') <= 4*(1+cfg.slack)
    assert {row.params[0] for row in report.rows} == {0.25, 1.0, 4.0}


def test_weighted_multiplier():
    cfg = config(KernelCheck, kernel_check='weighted_multiplier', N=256,
                 L_box=256.0)
    report = kernel_estimate_check('weighted_multiplier', cfg)
    assert report.passed, report.failures
    assert len(report.rows) == 3*3
    assert all(row.ratio > 0 for row in report.rows)


def test_tail_integral():
    cfg = config(TailIntegral, N=256, L_box=512.0)
    report = kernel_estimate_check('tail_integral', cfg)
    assert report.passed, report.failures
    assert report.extra_header == ('sup_at_t',)
    for row in report.rows:
        assert row.extras[0] == max(other.ratio for other in report.rows
                                    if other.params[0] == row.params[0])
    assert report.value('sup_spread') >= 1.0
    assert report.value('max_over_median') >= 1.0
