"""Weak-solution dynamics against exponential vectors of step functions.

For step functions f, g the normalized matrix-element functional

    F_t = counit o exp(dt_1 G_1) o exp(dt_2 G_2) o ...   (earliest first)

solves F_t' = F_t o G_{f(t),g(t)} with F_0 = counit, where

    G_{c,d}(a) = (id (x) omega_{c,d})(Delta a),   omega_{c,d}(x) = <(1,c), phi(x) (1,d)>.

The honest Fock-space matrix element is exp(int_0^inf <f,g>) * F_t; checks
that compare against operator inequalities (complete positivity,
contractivity, the Stinespring factorization) use that unnormalized form.

The coproduct leg carrying omega is the one under which the convolution
increment property holds on non-cocommutative algebras; the other choice is
available through leg='first' for demonstration and fails there.
"""

from dataclasses import dataclass

import numpy as np

from . import numerics
from .algebra import Functional, conv_exp
from .dilation import _compression_residual
from .errors import DimensionMismatch
from .generator import markov_generator
from .numerics import as_complex, is_psd, matrix_exp, max_abs
from .report import Report


@dataclass(frozen=True)
class Segment:
    t0: float
    t1: float
    value: tuple  # complex entries, length dk

    def vector(self):
        return np.array(self.value, dtype=complex)


class StepFunction:
    """Piecewise-constant k-valued function with compact support in [0, inf)."""

    def __init__(self, segments, dk=None):
        segs = []
        for s in segments:
            if isinstance(s, Segment):
                t0, t1, v = s.t0, s.t1, s.vector()
            else:
                t0, t1, v = s
                v = np.atleast_1d(as_complex(v))
            if not (0 <= t0 < t1):
                raise ValueError(f"bad segment [{t0}, {t1})")
            if not np.all(np.isfinite(v)):
                raise ValueError("segment value must be finite")
            segs.append(Segment(float(t0), float(t1), tuple(v)))
        segs.sort(key=lambda s: s.t0)
        for a, b in zip(segs, segs[1:]):
            if b.t0 < a.t1 - 1e-15:
                raise ValueError(f"overlapping segments at {b.t0}")
        if dk is None:
            if not segs:
                raise ValueError("dimension required for an empty step function")
            dk = len(segs[0].value)
        if any(len(s.value) != dk for s in segs):
            raise DimensionMismatch("segments have inconsistent value dimensions")
        self.segments = segs
        self.dk = dk

    @classmethod
    def zero(cls, dk):
        return cls([], dk=dk)

    @classmethod
    def constant(cls, value, t0, t1):
        return cls([(t0, t1, value)])

    def value_at(self, s):
        for seg in self.segments:
            if seg.t0 <= s < seg.t1:
                return seg.vector()
        return np.zeros(self.dk, dtype=complex)

    def boundaries(self):
        pts = set()
        for seg in self.segments:
            pts.add(seg.t0)
            pts.add(seg.t1)
        return sorted(pts)

    def shift_left(self, s):
        """theta_s: drop [0, s) and translate so that time s becomes 0."""
        segs = []
        for seg in self.segments:
            if seg.t1 <= s:
                continue
            segs.append((max(seg.t0, s) - s, seg.t1 - s, seg.vector()))
        return StepFunction(segs, dk=self.dk)

    def truncate(self, t):
        """Keep only the part supported in [0, t)."""
        segs = []
        for seg in self.segments:
            if seg.t0 >= t:
                continue
            segs.append((seg.t0, min(seg.t1, t), seg.vector()))
        return StepFunction(segs, dk=self.dk)

    def embed(self, dk_big, offset=0):
        """Zero-pad values into a larger noise space at the given offset."""
        segs = []
        for seg in self.segments:
            v = np.zeros(dk_big, dtype=complex)
            v[offset:offset + self.dk] = seg.vector()
            segs.append((seg.t0, seg.t1, v))
        return StepFunction(segs, dk=dk_big)

    def component(self, sl):
        """Restrict values to a slice of coordinates."""
        segs = [(s.t0, s.t1, s.vector()[sl]) for s in self.segments]
        dk = len(np.zeros(self.dk)[sl])
        return StepFunction(segs, dk=dk)

    def support_end(self):
        return max((s.t1 for s in self.segments), default=0.0)


@dataclass
class WeakTrajectory:
    times: np.ndarray
    functionals: list  # Functional per time


def _hat(v):
    return np.concatenate([[1.0 + 0j], as_complex(v)])


def compressed_generator(phi, c, d, h, leg="second"):
    """Matrix of G_{c,d} on coefficient vectors."""
    c = np.zeros(phi.dk, dtype=complex) if c is None else np.atleast_1d(as_complex(c))
    d = np.zeros(phi.dk, dtype=complex) if d is None else np.atleast_1d(as_complex(d))
    if c.shape != (phi.dk,) or d.shape != (phi.dk,):
        raise DimensionMismatch("test vectors do not match the noise dimension")
    omega = np.einsum("a,iab,b->i", np.conj(_hat(c)), phi.blocks, _hat(d))
    if leg == "second":
        return np.einsum("ijk,k->ji", h.coproduct, omega)
    if leg == "first":
        return np.einsum("ijk,j->ki", h.coproduct, omega)
    raise ValueError(f"unknown leg {leg!r}")


def _refinement(f, g, t):
    pts = {0.0, t}
    for p in f.boundaries() + g.boundaries():
        if 0.0 < p < t:
            pts.add(p)
    pts = sorted(pts)
    return list(zip(pts[:-1], pts[1:]))


def weak_evolution(phi, f, g, t, h, leg="second"):
    """F_t = counit o exp(dt_1 G_1) o ... over the refinement of [0, t]."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if f.dk != phi.dk or g.dk != phi.dk:
        raise DimensionMismatch("step functions do not match the noise dimension")
    row = h.counit.copy()
    if t == 0:
        return Functional(row)
    for a, b in _refinement(f, g, t):
        gmat = compressed_generator(phi, f.value_at(a), g.value_at(a), h, leg)
        row = row @ matrix_exp((b - a) * gmat)
    return Functional(row)


def weak_trajectory(phi, f, g, times, h, leg="second"):
    times = np.asarray(times, dtype=float)
    out = []
    row = h.counit.copy()
    prev = 0.0
    for t in times:
        if t < prev:
            raise ValueError("times must be nondecreasing")
        for a, b in _refinement(f, g, t):
            if b <= prev:
                continue
            a = max(a, prev)
            gmat = compressed_generator(phi, f.value_at(a), g.value_at(a), h, leg)
            row = row @ matrix_exp((b - a) * gmat)
        prev = t
        out.append(Functional(row.copy()))
    return WeakTrajectory(times, out)


def exp_inner(f, g, start, end):
    """<eps(f), eps(g)> restricted to [start, end): exp(int <f(s), g(s)> ds)."""
    if start > end:
        raise ValueError("start must not exceed end")
    if f.dk != g.dk:
        raise DimensionMismatch("step functions live in different noise spaces")
    total = 0.0 + 0j
    pts = sorted({start, end} | {p for p in f.boundaries() + g.boundaries()
                                 if start < p < end})
    for a, b in zip(pts[:-1], pts[1:]):
        total += np.vdot(f.value_at(a), g.value_at(a)) * (b - a)
    return complex(np.exp(total))


def matrix_element(phi, f, g, t, h, horizon=None):
    """Unnormalized <eps(f), l_t(.) eps(g)> as a functional (supports within horizon)."""
    end = max(f.support_end(), g.support_end(), t) if horizon is None else horizon
    scale = exp_inner(f, g, 0.0, end)
    return Functional(scale * weak_evolution(phi, f, g, t, h).coeffs)


def check_convolution_increment(phi, f, g, s, t, h, tol=1e-8):
    """Residual of F_{s+t} = (F_s * F_t-shifted) through the coproduct."""
    lhs = weak_evolution(phi, f, g, s + t, h)
    f1 = weak_evolution(phi, f, g, s, h)
    f2 = weak_evolution(phi, f.shift_left(s), g.shift_left(s), t, h)
    rhs = np.einsum("ijk,j,k->i", h.coproduct, f1.coeffs, f2.coeffs)
    rpt = Report(meta={"s": s, "t": t})
    rpt.add_residual("convolution_increment", max_abs(lhs.coeffs - rhs), tol)
    return rpt


def gram_positivity(phi, t, fs, as_, h, tol=numerics.PSD_TOL):
    """PSD certificate for [<eps(f_i), l_t(a_i* a_j) eps(f_j)>]."""
    m = len(fs)
    if m != len(as_):
        raise DimensionMismatch("need one algebra element per step function")
    if m > 6:
        raise ValueError("families are limited to 6 exponential vectors")
    end = max([f.support_end() for f in fs] + [t])
    gram = np.zeros((m, m), dtype=complex)
    for i in range(m):
        for j in range(m):
            x = h.product(h.star_vec(as_complex(as_[i])), as_complex(as_[j]))
            val = weak_evolution(phi, fs[i], fs[j], t, h)(x)
            gram[i, j] = exp_inner(fs[i], fs[j], 0.0, end) * val
    return is_psd(numerics.hermitian_part(gram), tol)


def contractivity_gram(phi, t, fs, h, tol=numerics.PSD_TOL):
    """PSD certificate for [<eps(f_i), (1 - l_t(1)) eps(f_j)>]."""
    m = len(fs)
    end = max([f.support_end() for f in fs] + [t])
    gram = np.zeros((m, m), dtype=complex)
    for i in range(m):
        for j in range(m):
            full = exp_inner(fs[i], fs[j], 0.0, end)
            val = weak_evolution(phi, fs[i], fs[j], t, h)(h.unit)
            gram[i, j] = full - full * val
    return is_psd(numerics.hermitian_part(gram), tol)


def dilation_process_check(psi, phi, f0, g0, t, h, tol=1e-8):
    """Vacuum-conditional-expectation identity at process level.

    Embeds k0-valued test functions into the enlarged noise with zeros and
    compares the two normalized trajectories entrywise over the basis.
    """
    dk0 = phi.dk
    comp_res = _compression_residual(psi, phi, dk0)
    f_big = f0.embed(psi.dk)
    g_big = g0.embed(psi.dk)
    big = weak_evolution(psi, f_big, g_big, t, h)
    small = weak_evolution(phi, f0, g0, t, h)
    rpt = Report(meta={"t": t})
    rpt.add_residual("generator_compression", comp_res, tol)
    rpt.add_residual("dilation_trajectories", max_abs(big.coeffs - small.coeffs), tol)
    return rpt


def stinespring_process_check(psi_blockdiag, phi, f, g, t, horizon, h, tol=1e-8):
    """Factorization <eps(f), l^psi_t(.) eps(g)> = <eps(f0), l^phi_t(.) eps(g0)> * exp_inner(f1, g1, t, T)."""
    dk0 = phi.dk
    dk1 = psi_blockdiag.dk - dk0
    if dk1 < 0:
        raise DimensionMismatch("psi noise smaller than phi noise")
    n = h.dim
    hd = 1 + psi_blockdiag.dk
    target = np.zeros((n, hd, hd), dtype=complex)
    target[:, :1 + dk0, :1 + dk0] = phi.blocks
    idx = np.arange(1 + dk0, hd)
    target[:, idx, idx] = -h.counit[:, None]
    structure = max_abs(psi_blockdiag.blocks - target)

    f0, f1 = f.component(slice(0, dk0)), f.component(slice(dk0, None))
    g0, g1 = g.component(slice(0, dk0)), g.component(slice(dk0, None))
    lhs = matrix_element(psi_blockdiag, f, g, t, h, horizon)
    small = matrix_element(phi, f0, g0, t, h, horizon)
    factor = exp_inner(f1, g1, t, horizon)
    rpt = Report(meta={"t": t, "horizon": horizon})
    rpt.add_residual("block_diagonal_structure", structure, tol)
    rpt.add_residual("stinespring_factorization",
                     max_abs(lhs.coeffs - factor * small.coeffs), tol)
    return rpt


def semigroup_consistency(phi, t_grid, h, tol=1e-9):
    """Vacuum trajectory against the convolution exponential of the Markov generator."""
    lam = markov_generator(phi)
    zero = StepFunction.zero(phi.dk)
    worst = 0.0
    for t in t_grid:
        via_evolution = weak_evolution(phi, zero, zero, float(t), h)
        via_convexp = conv_exp(lam, float(t), h)
        worst = max(worst, max_abs(via_evolution.coeffs - via_convexp.coeffs))
    rpt = Report(meta={"grid_points": len(list(t_grid))})
    rpt.add_residual("semigroup_consistency", worst, tol)
    return rpt
