#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


import sys


# Width of the rules between suites and experiments.
RULE_WIDTH = 72


def format_value(value):
    # Compact representation for console output.
    if isinstance(value, float):
        return "%.6g" % value
    return str(value)


def align(header, rows):
    """Right-aligned text lines: the header, then one line per row."""
    cells = [[str(cell) for cell in header]]
    cells.extend([format_value(cell) for cell in row] for row in rows)
    widths = [max(len(row[idx]) for row in cells)
              for idx in range(len(header))]
    return ["  ".join(cell.rjust(width) for cell, width in zip(row, widths))
            for row in cells]


class ConsoleUI(object):
    """
    Shows experiment headers, report tables and verdicts on a stream.

    With `quiet`, the lines of the current experiment are held back and
    written only once it reports a warning or an error; everything after
    that point is shown as well.
    """

    def __init__(self, stdout=None, quiet=False):
        self.stdout = stdout or sys.stdout
        self.quiet = quiet
        self.held = []
        self.showing = not quiet

    def write(self, prefix, text):
        lines = [prefix+line for line in text.splitlines()]
        if not self.showing:
            self.held.extend(lines)
            return
        for line in lines:
            self.stdout.write(line+"\n")
        self.stdout.flush()

    def show(self):
        # Release the held lines of the current experiment.
        self.showing = True
        held, self.held = self.held, []
        for line in held:
            self.write("", line)

    def rule(self, char):
        # A new block forgets whatever a quiet run was holding.
        self.held = []
        self.showing = not self.quiet
        self.write("", char*RULE_WIDTH)

    def part(self):
        """Starts a suite or a subcommand."""
        self.rule("=")

    def section(self):
        """Starts an experiment."""
        self.rule("-")

    def header(self, text):
        self.write("  ", text)

    def notice(self, text):
        self.write("* ", text)

    def warning(self, text):
        self.show()
        self.write("* ", text)

    def error(self, text):
        self.show()
        self.write("! ", text)

    def table(self, header, rows):
        self.write("  ", "\n".join(align(header, rows)))

    def report(self, report, seconds):
        """Shows the rows and summary values of an experiment report."""
        self.table(*report.table())
        for name, value in report.summary:
            self.notice("%s: %s" % (name, format_value(value)))
        self.notice("%s in %.2f s" % (report.kind, seconds))
