#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


from .core import registry
from .ui import ConsoleUI
from .load import load
import os
import os.path
import time


VERSION = '0.1.0'

# Output directory when neither `SCHROLAB_OUT` nor `output` is set.
DEFAULT_OUTPUT = 'schrolab-out'


def output_directory(output=None):
    """Resolves the directory for artifacts: `SCHROLAB_OUT` wins."""
    return os.environ.get('SCHROLAB_OUT') or output or DEFAULT_OUTPUT


def format_entry(value):
    # Flat text for the manifest.
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(format_entry(item) for item in value)
    if value is None:
        return ""
    return str(value)


class Control(object):
    """Experiment harness."""

    def __init__(self,
                 ui=None,
                 max_errors=0,
                 quiet=False,
                 output=None,
                 subcommand=None):
        # User interface abstraction.
        if ui is None:
            ui = ConsoleUI(quiet=quiet)
        self.ui = ui
        # Numbers of passed and failed experiments.
        self.success_num = 0
        self.failure_num = 0
        # Permitted number of failures before the harness halts.
        self.max_errors = max_errors
        # If set, display only warnings and errors.
        self.quiet = quiet
        # If set, the harness is halted.
        self.halted = False
        # Default output directory.
        self.output = output
        # Subcommand recorded in the manifest.
        self.subcommand = subcommand or 'run'
        # Start of the run; used in artifact names only.
        self.timestamp = time.strftime('%Y%m%dT%H%M%S')
        # Finished experiments and written files.
        self.entries = []
        self.outputs = []

    def passed(self, text=None):
        """Attests that an experiment has passed."""
        if text:
            self.ui.notice(text)
        self.success_num += 1

    def failed(self, text=None):
        """Attests that an experiment has failed."""
        if text:
            self.ui.warning(text)
        self.failure_num += 1
        if self.max_errors and self.failure_num >= self.max_errors:
            self.halted = True

    def artifact(self, name, output=None):
        """Reserves a fresh path for an output file."""
        directory = output_directory(output or self.output)
        if not os.path.isdir(directory):
            os.makedirs(directory)
        stem, ext = os.path.splitext(name)
        path = os.path.join(directory, name)
        idx = 1
        while os.path.exists(path) or path in self.outputs:
            idx += 1
            path = os.path.join(directory, "%s-%d%s" % (stem, idx, ext))
        self.outputs.append(path)
        return path

    def record(self, input, report, seconds, error=None):
        """Remembers a finished experiment for the manifest."""
        self.entries.append((input, report, seconds, error))

    def load_input(self, path):
        """Loads an experiment record or a suite from the given file."""
        return load(path, registry.input_types)

    def run(self, case):
        """Executes an experiment."""
        return case()

    def manifest(self):
        """The run manifest as ``(key, value)`` pairs."""
        items = [('subcommand', self.subcommand), ('version', VERSION)]
        for idx, (input, report, seconds, error) in \
                enumerate(self.entries, 1):
            prefix = "experiment.%d." % idx
            for key, value in input.__dump__():
                items.append((prefix+"config."+key, value))
            items.append((prefix+"seconds", round(seconds, 3)))
            if report is not None:
                items.append((prefix+"kind", report.kind))
                items.append((prefix+"passed", report.passed))
                for key, value in report.summary:
                    items.append((prefix+"summary."+key, value))
            else:
                items.append((prefix+"passed", False))
                items.append((prefix+"error", error))
        for idx, path in enumerate(self.outputs, 1):
            items.append(("output.%d" % idx, path))
        items.append(('passed', not self.failure_num))
        return items

    def write_manifest(self, output=None):
        # Flat `key = value` text next to the other artifacts.
        path = self.artifact("manifest_%s_%s.txt"
                             % (self.subcommand, self.timestamp), output)
        self.outputs.remove(path)
        with open(path, 'w') as stream:
            for key, value in self.manifest():
                stream.write("%s = %s\n" % (key, format_entry(value)))
        return path

    def __call__(self, input):
        """
        Runs an experiment record, a list of records or a suite file.

        Returns the exit code: 0 when every experiment passed.
        """
        if isinstance(input, str):
            input = self.load_input(input)
        inputs = input if isinstance(input, list) else [input]
        for item in inputs:
            case = item.__owner__(self, item)
            self.run(case)
            if self.halted:
                break
        # Display statistics.
        line = []
        if self.success_num:
            line.append("%s passed" % self.success_num)
        if self.failure_num:
            line.append("%s FAILED!" % self.failure_num)
        line = ", ".join(line)
        self.ui.part()
        if line:
            line = "EXPERIMENTS: %s" % line
            if self.failure_num:
                self.ui.error(line)
            else:
                self.ui.notice(line)
        path = self.write_manifest()
        self.ui.notice("manifest: %s" % path)
        return int(bool(self.failure_num))
