#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


from .core import registry, to_key
from .ctl import Control
from .load import read_config, build_record
from .experiments import KERNEL_KINDS
import argparse
import os.path
import sys
import yaml


DESCRIPTION = """\
schrolab measures the constants and exponents of weak-type and kernel
estimates for spectral multipliers of self-adjoint operators on discrete
tori and matrix models.
"""


# Bundled suites, by subcommand.
SUITES = {
    'selfcheck': "invariant suite on small grids",
    'all': "every experiment at full size",
}

# Kernel kinds run by `kernel-check` without an argument.
DEFAULT_KERNEL_KINDS = [kind for kind in KERNEL_KINDS
                        if kind != 'tail_integral']



class UsageError(Exception):
    # Reported as `schrolab: error: ...` with exit code 2.
    pass


def kind_key(experiment_type):
    # The required setting that identifies an experiment kind.
    for field in experiment_type.Input.__fields__:
        if field.required:
            return field.key


def experiment_kinds():
    # Registered kinds that take their settings from the command line.
    kinds = []
    for experiment_type in registry.experiment_types:
        if 'tests' in set(field.key
                          for field in experiment_type.Input.__fields__):
            continue
        kinds.append((kind_key(experiment_type), experiment_type))
    return kinds


def suite_path(name):
    return os.path.join(os.path.dirname(__file__), 'suites', name+'.yaml')


def add_common(parser):
    parser.add_argument('-q', '--quiet',
            default=None,
            action='store_true',
            help="display warnings and errors only")
    parser.add_argument('-M', '--max-errors',
            type=int,
            default=None,
            metavar="N",
            help="halt after N failed experiments")


def add_settings(parser, record_type):
    # One `--KEY VALUE` flag per setting; `--L_box` is accepted too.
    parser.add_argument('--config',
            default=None,
            metavar="FILE",
            help="file with `key = value` settings")
    for field in record_type.__fields__:
        if field.required or field.key == 'skip':
            continue
        options = ['--'+field.key]
        if field.attr != field.key:
            options.append('--'+field.attr)
        parser.add_argument(*options,
                dest=field.attr,
                default=None,
                metavar=field.attr.upper().replace('-', '_'),
                help=field.hint)


def build_parser():
    """Command-line parameters for `schrolab` script."""
    parser = argparse.ArgumentParser(
            prog='schrolab',
            description=DESCRIPTION,
            allow_abbrev=False)
    subparsers = parser.add_subparsers(
            dest='subcommand',
            metavar="SUBCOMMAND")
    subparsers.required = True
    for key, experiment_type in experiment_kinds():
        doc = (experiment_type.__doc__ or "").strip().splitlines()
        subparser = subparsers.add_parser(key,
                help=(doc[0] if doc else None),
                allow_abbrev=False)
        if key == 'kernel-check':
            subparser.add_argument('kind',
                    nargs='?',
                    choices=KERNEL_KINDS,
                    help="kernel estimate (default: all but"
                         " tail_integral)")
        add_common(subparser)
        add_settings(subparser, experiment_type.Input)
    for name, hint in sorted(SUITES.items()):
        subparser = subparsers.add_parser(name,
                help=hint,
                allow_abbrev=False)
        add_common(subparser)
        subparser.add_argument('--output',
                default=None,
                metavar="DIR",
                help="directory for CSV, SVG and manifest files")
    return parser


def read_setup_cfg(path='setup.cfg'):
    # The `[schrolab]` section of `setup.cfg`, if any.
    if not os.path.exists(path):
        return {}
    return read_config(path, section='schrolab')


def read_yaml_config(path='schrolab.yaml'):
    if not os.path.exists(path):
        return {}
    try:
        with open(path) as stream:
            data = yaml.safe_load(stream)
    except yaml.YAMLError as exc:
        raise UsageError("ill-formed configuration file %s: %s"
                         % (path, exc))
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise UsageError("ill-formed configuration file: %s" % path)
    return dict((to_key(str(key)), value) for key, value in data.items())


def harness_settings(mapping):
    # Pops `quiet` and `max-errors` off the layered mapping.
    quiet = mapping.pop('quiet', False)
    max_errors = mapping.pop('max-errors', 0)
    if isinstance(quiet, str):
        quiet = quiet.strip().lower() in ('1', 'yes', 'true', 'on')
    try:
        max_errors = int(max_errors)
    except ValueError:
        raise UsageError("invalid setting 'max-errors': expected"
                         " an integer, got %r" % max_errors)
    return bool(quiet), max_errors


def resolve(args, experiment_type):
    """
    Layers the settings of an experiment kind, lowest precedence first:
    kind defaults, `setup.cfg`, `schrolab.yaml`, `--config`, flags.
    """
    mapping = {}
    mapping.update(read_setup_cfg())
    mapping.update(read_yaml_config())
    if getattr(args, 'config', None):
        if not os.path.exists(args.config):
            raise UsageError("configuration file not found: %s"
                             % args.config)
        mapping.update(read_config(args.config))
    quiet, max_errors = harness_settings(mapping)
    for field in experiment_type.Input.__fields__:
        value = getattr(args, field.attr, None)
        if value is not None and not field.required:
            mapping[field.key] = value
    if args.quiet is not None:
        quiet = args.quiet
    if args.max_errors is not None:
        max_errors = args.max_errors
    return mapping, quiet, max_errors


def inputs_for(args, experiment_type, mapping):
    # The experiment records named by the subcommand.
    key = kind_key(experiment_type)
    if key == 'kernel-check':
        kinds = [args.kind] if args.kind else DEFAULT_KERNEL_KINDS
    else:
        kinds = [key]
    records = []
    for kind in kinds:
        values = dict(mapping)
        values[key] = kind
        records.append(build_record(experiment_type.Input, values))
    return records


def run(argv=None):
    """Runs a subcommand; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        if args.subcommand in SUITES:
            mapping = read_setup_cfg()
            mapping.update(read_yaml_config())
            quiet, max_errors = harness_settings(mapping)
            if args.quiet is not None:
                quiet = args.quiet
            if args.max_errors is not None:
                max_errors = args.max_errors
            ctl = Control(max_errors=max_errors, quiet=quiet,
                          output=(args.output or mapping.get('output')),
                          subcommand=args.subcommand)
            input = ctl.load_input(suite_path(args.subcommand))
        else:
            experiment_type = dict(experiment_kinds())[args.subcommand]
            mapping, quiet, max_errors = resolve(args, experiment_type)
            input = inputs_for(args, experiment_type, mapping)
            ctl = Control(max_errors=max_errors, quiet=quiet,
                          output=input[0].output,
                          subcommand=args.subcommand)
    except (UsageError, ValueError, yaml.YAMLError) as exc:
        sys.stderr.write("schrolab: error: %s\n" % exc)
        return 2
    return ctl(input)


def main():
    """Entry point for `schrolab` script."""
    return run(sys.argv[1:])
