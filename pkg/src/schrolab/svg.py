#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


"""
Log-log scatter plots of sweep reports: points, the fitted line and a line
of the reference slope through the center of the data.
"""


from xml.sax.saxutils import escape
import math


WIDTH = 640
HEIGHT = 480
MARGIN = 64


class LogAxes(object):
    # Maps data coordinates to the pixel box in log scale.

    def __init__(self, xs, ys):
        self.x0, self.x1 = self.bounds(xs)
        self.y0, self.y1 = self.bounds(ys)

    @staticmethod
    def bounds(values):
        logs = [math.log10(value) for value in values]
        lo, hi = min(logs), max(logs)
        if hi-lo < 1e-9:
            lo, hi = lo-0.5, hi+0.5
        pad = 0.05*(hi-lo)
        return lo-pad, hi+pad

    def x(self, value):
        u = (math.log10(value)-self.x0)/(self.x1-self.x0)
        return MARGIN+u*(WIDTH-2*MARGIN)

    def y(self, value):
        u = (math.log10(value)-self.y0)/(self.y1-self.y0)
        return HEIGHT-MARGIN-u*(HEIGHT-2*MARGIN)


def line(axes, xa, ya, xb, yb, style):
    return ('<line x1="%.2f" y1="%.2f" x2="%.2f" y2="%.2f" %s/>'
            % (axes.x(xa), axes.y(ya), axes.x(xb), axes.y(yb), style))


def render(report, timestamp):
    """Returns the SVG document of a report as a string."""
    points = [(x, y) for x, y in report.points if x > 0 and y > 0]
    if not points:
        raise ValueError("nothing to plot for %s" % report.kind)
    xs = [x for x, y in points]
    ys = [y for x, y in points]
    axes = LogAxes(xs, ys)
    xlabel, ylabel = report.labels
    title = "%s %s" % (report.kind, timestamp)
    out = []
    out.append('<svg xmlns="http://www.w3.org/2000/svg"'
               ' width="%d" height="%d" viewBox="0 0 %d %d">'
               % (WIDTH, HEIGHT, WIDTH, HEIGHT))
    out.append('<title>%s</title>' % escape(title))
    out.append('<rect width="%d" height="%d" fill="white"/>'
               % (WIDTH, HEIGHT))
    # Axes.
    out.append('<path d="M %d %d V %d H %d" stroke="black" fill="none"/>'
               % (MARGIN, MARGIN, HEIGHT-MARGIN, WIDTH-MARGIN))
    for value, anchor in ((min(xs), 'start'), (max(xs), 'end')):
        out.append('<text x="%.2f" y="%d" font-size="11" text-anchor="%s">'
                   '%.4g</text>' % (axes.x(value), HEIGHT-MARGIN+16,
                                    anchor, value))
    for value in (min(ys), max(ys)):
        out.append('<text x="%d" y="%.2f" font-size="11" text-anchor="end">'
                   '%.4g</text>' % (MARGIN-6, axes.y(value), value))
    out.append('<text x="%d" y="%d" font-size="13" text-anchor="middle">'
               '%s</text>' % (WIDTH//2, HEIGHT-16, escape(xlabel)))
    out.append('<text x="16" y="%d" font-size="13" text-anchor="middle"'
               ' transform="rotate(-90 16 %d)">%s</text>'
               % (HEIGHT//2, HEIGHT//2, escape(ylabel)))
    # Fitted line over the fitted domain.
    fit = report.fit
    if fit is not None:
        lo, hi = fit.domain
        out.append(line(axes, lo, float(fit.predict(lo)),
                        hi, float(fit.predict(hi)),
                        'stroke="steelblue" stroke-width="2"'))
    # Reference slope through the geometric center of the points.
    if report.reference_slope is not None:
        cx = math.exp(sum(math.log(x) for x in xs)/len(xs))
        cy = math.exp(sum(math.log(y) for y in ys)/len(ys))
        lo, hi = min(xs), max(xs)
        out.append(line(axes, lo, cy*(lo/cx)**report.reference_slope,
                        hi, cy*(hi/cx)**report.reference_slope,
                        'stroke="gray" stroke-dasharray="6 4"'))
    for x, y in points:
        out.append('<circle cx="%.2f" cy="%.2f" r="3" fill="firebrick"/>'
                   % (axes.x(x), axes.y(y)))
    out.append('</svg>')
    return "\n".join(out)+"\n"


def write_svg(path, report, timestamp):
    """Saves the plot of a report; the timestamp goes to the title only."""
    with open(path, 'w') as stream:
        stream.write(render(report, timestamp))
