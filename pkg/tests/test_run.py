#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


from schrolab import run
from schrolab.run import (build_parser, resolve, inputs_for, suite_path,
                          experiment_kinds, DEFAULT_KERNEL_KINDS, UsageError)
from schrolab.load import build_record
from schrolab.std import LpBound, KernelCheck, SuiteCase
from schrolab.ctl import Control
import os.path
import pytest


def test_help(capsys):
    assert run(['--help']) == 0
    out = capsys.readouterr().out
    assert "kernel-check" in out
    assert "selfcheck" in out


def test_usage_errors(workdir, capsys):
    assert run([]) == 2
    assert run(['weak22']) == 2
    assert run(['lp-bound', '--bogus', '1']) == 2
    capsys.readouterr()
    assert run(['partition-of-unity', '--c1', '0.5']) == 2
    err = capsys.readouterr().err
    assert err.startswith("schrolab: error:")
    assert "'c1'" in err


def test_missing_config(workdir, capsys):
    assert run(['oracle', '--config', 'missing.cfg']) == 2
    assert "missing.cfg" in capsys.readouterr().err


def test_subcommands():
    keys = [key for key, experiment_type in experiment_kinds()]
    for key in ['sharpness', 'weak11', 'lp-bound', 'cz-heat-l2',
                'feynman-kac', 'kernel-check', 'besov-envelope',
                'cz-check', 'partition-of-unity', 'oracle', 'doubling']:
        assert key in keys
    assert 'title' not in keys


def test_partition_of_unity_run(workdir):
    assert run(['partition-of-unity', '--samples', '100', '-q']) == 0
    names = os.listdir(str(workdir/'out'))
    assert any(name.startswith('manifest_partition-of-unity_')
               for name in names)


def test_lp_bound_run(workdir):
    assert run(['lp-bound', '--N', '64', '--L-box', '64', '--p', '2',
                '--t', '0,1,4', '--probes', '2', '-q']) == 0


def test_failing_run(workdir):
    assert run(['sharpness', '--L_box', '64', '-q']) == 1


def test_settings_layering(workdir):
    (workdir/'setup.cfg').write_text("[schrolab]\n"
                                     "N = 32\nL_box = 8\n"
                                     "seed = 1\nprobes = 3\n")
    (workdir/'schrolab.yaml').write_text("L_box: 16\nseed: 2\nprobes: 4\n"
                                         "quiet: yes\n")
    (workdir/'extra.cfg').write_text("seed = 3\nprobes = 5\n"
                                     "max_errors = 4\n")
    args = build_parser().parse_args(['lp-bound', '--config', 'extra.cfg',
                                      '--probes', '6'])
    mapping, quiet, max_errors = resolve(args, LpBound)
    assert (quiet, max_errors) == (True, 4)
    record = build_record(LpBound.Input, dict(mapping, **{'lp-bound': 'x'}))
    assert record.N == 32
    assert record.L_box == 16.0
    assert record.seed == 3
    assert record.probes == 6


def test_flags_override_harness_settings(workdir):
    (workdir/'schrolab.yaml').write_text("quiet: yes\nmax-errors: 4\n")
    args = build_parser().parse_args(['oracle', '-M', '1'])
    mapping, quiet, max_errors = resolve(args, LpBound)
    assert mapping == {}
    assert (quiet, max_errors) == (True, 1)


def test_ill_formed_yaml_config(workdir):
    (workdir/'schrolab.yaml').write_text("- N\n- 32\n")
    args = build_parser().parse_args(['oracle'])
    with pytest.raises(UsageError):
        resolve(args, LpBound)


def test_kernel_check_kinds(workdir):
    parser = build_parser()
    args = parser.parse_args(['kernel-check'])
    mapping, quiet, max_errors = resolve(args, KernelCheck)
    records = inputs_for(args, KernelCheck, mapping)
    assert [record.kernel_check for record in records] == \
            DEFAULT_KERNEL_KINDS
    assert len(records) == 5
    args = parser.parse_args(['kernel-check', 'q_kernel', '--L_box', '32'])
    mapping, quiet, max_errors = resolve(args, KernelCheck)
    record, = inputs_for(args, KernelCheck, mapping)
    assert record.kernel_check == 'q_kernel'
    assert record.L_box == 32.0


@pytest.mark.parametrize('name', ['selfcheck', 'all'])
def test_bundled_suites_load(name):
    suite = Control().load_input(suite_path(name))
    assert isinstance(suite, SuiteCase.Input)
    assert len(suite.tests) >= 12


def test_selfcheck_grids_are_small():
    suite = Control().load_input(suite_path('selfcheck'))
    sweeps = [record for record in suite.tests if record.refine]
    assert len(sweeps) >= 12
    assert all(record.N <= 256 for record in sweeps)
