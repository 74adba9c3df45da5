#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


"""
Scalar spectral functions ``λ ↦ F(λ)``: smooth cutoffs, the dyadic
partition of unity, the composite multipliers used by the weak-type
estimates, and the Besov-type norm ``∫|F̂(τ)|(1+|τ|)^s dτ``.
"""


from .grid import is_power_of_two
import math
import re
import numpy as np


INF = float('inf')


class SymbolFn(object):
    """
    A spectral function with a declared support ``[a, b]``.

    Evaluation is vectorized and returns exactly 0 outside the support;
    the wrapped function is only called on points inside it.
    """

    __slots__ = ('function', 'support', 'label')

    def __init__(self, function, support=(0.0, INF), label=None):
        a, b = support
        if not (0 <= a <= b):
            raise ValueError("invalid support %r" % (support,))
        self.function = function
        self.support = (float(a), float(b))
        self.label = label or getattr(function, '__name__', 'F')

    def __repr__(self):
        return "<%s %s on [%g, %g]>" % (self.__class__.__name__,
                                        self.label, *self.support)

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        a, b = self.support
        inside = (lam >= a) & (lam <= b)
        out = np.zeros(lam.shape, dtype=complex)
        if np.any(inside):
            out[inside] = self.function(lam[inside])
        if out.ndim == 0:
            return complex(out)
        return out

    @property
    def bounded(self):
        return self.support[1] < INF

    def __mul__(self, other):
        if not isinstance(other, SymbolFn):
            value = complex(other)
            return SymbolFn(lambda lam: value*self.function(lam),
                            self.support, "%s*%s" % (other, self.label))
        a = max(self.support[0], other.support[0])
        b = min(self.support[1], other.support[1])
        if a > b:
            return zero_symbol((0.0, 0.0))
        return SymbolFn(lambda lam: self.function(lam)*other.function(lam),
                        (a, b), "%s*%s" % (self.label, other.label))

    __rmul__ = __mul__


def zero_symbol(support=(0.0, 1.0)):
    return SymbolFn(lambda lam: np.zeros(np.shape(lam)), support, "zero")


def dilate(F, r):
    """``δ_r F(λ) = F(rλ)``."""
    if not r > 0:
        raise ValueError("dilation factor must be positive, got %r" % r)
    a, b = F.support
    return SymbolFn(lambda lam: F.function(r*lam), (a/r, b/r),
                    "%s(%g*)" % (F.label, r))


def root(F, m):
    """``λ ↦ F(λ^{1/m})``, i.e. the symbol of ``F(L^{1/m})``."""
    a, b = F.support
    return SymbolFn(lambda lam: F.function(lam**(1.0/m)), (a**m, b**m),
                    "%s(root%d)" % (F.label, m))


def _psi(x):
    out = np.zeros(x.shape)
    positive = (x > 0)
    out[positive] = np.exp(-1.0/x[positive])
    return out


def smooth_step(x):
    """C^∞ step: 0 for ``x <= 0``, 1 for ``x >= 1``."""
    x = np.asarray(x, dtype=float)
    a = _psi(x)
    b = _psi(1.0-x)
    out = a/(a+b)
    if out.ndim == 0:
        return float(out)
    return out


def dyadic_bump():
    """``φ(λ) = χ(λ) - χ(λ/2)`` with ``χ(λ) = smooth_step(4λ-1)``."""
    def phi(lam):
        return smooth_step(4*lam-1) - smooth_step(2*lam-1)
    return SymbolFn(phi, (0.25, 1.0), "phi")


def cutoff_pair():
    """Returns ``(φ₀, φ₁)`` with ``φ₁ = smooth_step(2λ-1)``, ``φ₀ = 1-φ₁``."""
    def phi1(lam):
        return smooth_step(2*lam-1)
    def phi0(lam):
        return 1.0-smooth_step(2*lam-1)
    return (SymbolFn(phi0, (0.0, 1.0), "phi0"),
            SymbolFn(phi1, (0.5, INF), "phi1"))


def identity_symbol():
    return SymbolFn(lambda lam: np.ones(np.shape(lam)), label="one")


def schrodinger_symbol(t, s):
    """``e^{itλ}(1+λ)^{-s}``."""
    if s < 0:
        raise ValueError("s must be non-negative, got %r" % s)
    return SymbolFn(lambda lam: np.exp(1j*t*lam)*(1.0+lam)**(-s),
                    label="schrodinger:t=%g,s=%g" % (t, s))


def heat_symbol(t):
    """``e^{-tλ}``; `t` may be complex."""
    return SymbolFn(lambda lam: np.exp(-t*lam), label="heat:t=%s" % (t,))


def resolvent_symbol(t, s):
    """``(1+tλ)^{-s}``."""
    return SymbolFn(lambda lam: (1.0+t*lam)**(-s),
                    label="resolvent:t=%g,s=%g" % (t, s))


def cutoff_scale(k, k0, m):
    # The dyadic scale 2^{m(k-k0)/(m-1)} at which F_k is cut off.
    return 2.0**(m*(k-k0)/(m-1))


def _base_Fk(k, n, m):
    def base(lam):
        return (1.0+lam)**(-n/2)*(-np.expm1(-2.0**(m*k)*lam))
    return base


def build_Fk(k, k0, m, n):
    """``F_k(λ) = (1+λ)^{-n/2}(1-e^{-2^{mk}λ}) φ₀(2^{-m(k-k0)/(m-1)}λ)``."""
    if k <= k0:
        raise ValueError("expected k > k0, got k=%r, k0=%r" % (k, k0))
    if m < 2:
        raise ValueError("expected m >= 2, got %r" % m)
    scale = cutoff_scale(k, k0, m)
    phi0, phi1 = cutoff_pair()
    base = _base_Fk(k, n, m)
    return SymbolFn(lambda lam: base(lam)*phi0.function(lam/scale),
                    (0.0, scale), "Fk:m=%d,k=%d,k0=%d,n=%d" % (m, k, k0, n))


def build_Gk(k, k0, m, n):
    """``G_k(λ) = (1+λ)^{-n/2}(1-e^{-2^{mk}λ}) φ₁(2^{-m(k-k0)/(m-1)}λ)``."""
    if k <= k0:
        raise ValueError("expected k > k0, got k=%r, k0=%r" % (k, k0))
    if m < 2:
        raise ValueError("expected m >= 2, got %r" % m)
    scale = cutoff_scale(k, k0, m)
    phi0, phi1 = cutoff_pair()
    base = _base_Fk(k, n, m)
    return SymbolFn(lambda lam: base(lam)*phi1.function(lam/scale),
                    (scale/2, INF), "Gk:m=%d,k=%d,k0=%d,n=%d" % (m, k, k0, n))


def k0_of_t(t):
    """The integer with ``2^{k0} <= sqrt(1+|t|) < 2^{k0+1}``."""
    bound = 1.0+abs(t)
    k0 = 0
    while 4.0**(k0+1) <= bound:
        k0 += 1
    return k0


def besov_norm(F, s, window=64.0, samples=2**14):
    """
    ``∫|F̂(τ)|(1+|τ|)^s dτ`` with ``F̂(τ) = (1/2π)∫F(λ)e^{-iτλ}dλ``.

    `F` is sampled on ``[-window/2, window/2)``.  A symbol whose support
    reaches ``λ = 0`` is extended evenly to negative ``λ``; any other
    symbol is extended by zero.  With this convention the discrete norm is
    exactly submultiplicative.  The weight at ``τ = 0`` carries the
    endpoint correction of its kink, so doubling `window` and `samples`
    changes the norm only at fourth order in the frequency step.
    """
    if s < 0:
        raise ValueError("s must be non-negative, got %r" % s)
    if not F.bounded:
        raise ValueError("symbol %s has unbounded support" % F.label)
    if F.support[1] >= window/2:
        raise ValueError("window %g too small for support %r"
                         % (window, F.support))
    if not is_power_of_two(samples):
        raise ValueError("samples must be a power of two, got %r" % samples)
    step = window/samples
    lam = (np.arange(samples)-samples//2)*step
    if F.support[0] <= 0:
        values = F(np.abs(lam))
    else:
        values = F(lam)
    tau = 2*np.pi*np.fft.fftfreq(samples, d=step)
    weight = (1.0+np.abs(tau))**s
    # Still w(τ+σ) <= w(τ)w(σ) on the lattice.
    weight[0] = 1.0+s*(2*np.pi/window)/6
    spectrum = np.abs(np.fft.fft(values))
    return float(np.sum(spectrum*weight)/samples)


def envelope_3_10(l, k, m, n, s, t):
    """``min{1,2^{l+mk}} min{1,2^{-ln/2}} max{1,(2^l(1+|t|))^{s/2}}``."""
    return (min(1.0, 2.0**(l+m*k)) *
            min(1.0, 2.0**(-l*n/2)) *
            max(1.0, (2.0**l*(1.0+abs(t)))**(s/2)))


def holder_norm(F, order, step=1e-4, points=2049):
    """
    Sup of ``|F^{(j)}|`` for ``j <= order`` by central differences.

    Sampled on a uniform grid over the (bounded) support, widened by a
    margin so that the edges of the support are covered.
    """
    if not F.bounded:
        raise ValueError("symbol %s has unbounded support" % F.label)
    a, b = F.support
    margin = order*step
    lam = np.linspace(max(a-margin, 0.0), b+margin, points)
    best = float(np.max(np.abs(F(lam))))
    for j in range(1, order+1):
        total = np.zeros(lam.shape, dtype=complex)
        for i in range(j+1):
            shift = (j/2.0-i)*step
            total += (-1)**i*math.comb(j, i)*F(np.maximum(lam+shift, 0.0))
        best = max(best, float(np.max(np.abs(total)))/step**j)
    return best


LABEL_RE = re.compile(r'^(?P<name>[A-Za-z_][0-9A-Za-z_]*)'
                      r'(?::(?P<args>.*))?$')


def parse_label(text):
    """Splits ``name[:arg{,arg}]`` into a name, positional and keyword args."""
    match = LABEL_RE.match(text.strip())
    if match is None:
        raise ValueError("ill-formed label %r" % text)
    args = []
    kwds = {}
    if match.group('args'):
        for item in match.group('args').split(','):
            item = item.strip()
            if not item:
                continue
            if '=' in item:
                key, value = item.split('=', 1)
                kwds[key.strip()] = _number(value)
            else:
                args.append(_number(item))
    return match.group('name'), args, kwds


def _number(text):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


SYMBOLS = {
    'one': identity_symbol,
    'phi': dyadic_bump,
    'phi0': lambda: cutoff_pair()[0],
    'phi1': lambda: cutoff_pair()[1],
    'schrodinger': schrodinger_symbol,
    'heat': heat_symbol,
    'resolvent': resolvent_symbol,
    'Fk': build_Fk,
    'Gk': build_Gk,
}


def symbol(label):
    """Builds a symbol from a label such as ``Fk:m=2,k=5,k0=1,n=1``."""
    name, args, kwds = parse_label(label)
    if name not in SYMBOLS:
        raise ValueError("unknown symbol %r" % name)
    try:
        return SYMBOLS[name](*args, **kwds)
    except TypeError as exc:
        raise ValueError("invalid arguments for symbol %r: %s" % (name, exc))
