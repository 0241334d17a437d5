"""Stochastic generators phi: A -> B(C + k) and their characterizing tuples.

A generator is stored as one (1+dk) x (1+dk) block matrix per basis element,

    phi(a) = [ lambda(a)   eta^dag(a)          ]
             [ eta(a)      sigma(a) - eps(a) I ]

Complete positivity and contractivity of the induced convolution cocycle is
decided constructively: build the Hermitian kernel

    psi(a, b) = [ d_eps lambda(a,b)                eta^dag(a* b) - eps(a*) eta^dag(b) ]
                [ eta(a* b) - eta(a*) eps(b)       sigma(a* b)                        ]

factor it minimally (Kolmogorov), induce the representation rho and the
operator D = gamma(1), recover the inner vector xi, read t = lambda(1) and
d = eta(1), solve (I - D*D)^{1/2} e = d, and finally require that the
reassembled generator reproduces the input entrywise.  Together with
phi(1) <= 0 this is the operational CPC certificate.
"""

from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .algebra import Functional, conv_exp, is_positive_functional
from .errors import (DimensionMismatch, InconsistentAction, InvalidTuple, KernelNotPsd,
                     NoSolution, NotCpc, NotInner, NotPsd, NotReal)
from .numerics import (as_complex, dagger, hermitian_part, is_psd, max_abs,
                       minimal_rank_factor, least_squares_solve, operator_norm, psd_sqrt)
from .report import Report


@dataclass
class NoiseSpace:
    """The noise dimension space k and its one-dimensional extension C + k."""

    dk: int

    @property
    def hat_dim(self):
        return 1 + self.dk

    @property
    def e0(self):
        v = np.zeros(self.hat_dim, dtype=complex)
        v[0] = 1.0
        return v

    @property
    def qs_proj(self):
        p = np.eye(self.hat_dim, dtype=complex)
        p[0, 0] = 0.0
        return p


class GeneratorMap:
    """Per-basis block matrices of a linear map A -> B(C + k)."""

    def __init__(self, blocks, noise=None):
        self.blocks = as_complex(blocks)
        if self.blocks.ndim != 3 or self.blocks.shape[1] != self.blocks.shape[2]:
            raise DimensionMismatch(f"blocks shape {self.blocks.shape}")
        dk = self.blocks.shape[1] - 1
        self.noise = noise if noise is not None else NoiseSpace(dk)
        if self.noise.hat_dim != self.blocks.shape[1]:
            raise DimensionMismatch("noise space does not match block size")

    @property
    def n_basis(self):
        return self.blocks.shape[0]

    @property
    def dk(self):
        return self.noise.dk

    def apply(self, x):
        return np.einsum("i,iab->ab", as_complex(x), self.blocks)

    def lam(self):
        return Functional(self.blocks[:, 0, 0].copy())

    def eta(self):
        return self.blocks[:, 1:, 0].copy()

    def eta_dag(self):
        return self.blocks[:, 0, 1:].copy()

    def lower_right(self):
        return self.blocks[:, 1:, 1:].copy()

    def sigma(self, h):
        eye = np.eye(self.dk)
        return self.lower_right() + h.counit[:, None, None] * eye[None, :, :]

    def reality_residual(self, h):
        """max over the basis of || phi(b_i^*) - phi(b_i)^* ||."""
        phi_star = np.einsum("pi,pab->iab", h.star, self.blocks)
        return max_abs(phi_star - dagger(self.blocks))

    def phi_one(self, h):
        return self.apply(h.unit)

    def copy(self):
        return GeneratorMap(self.blocks.copy(), NoiseSpace(self.dk))


@dataclass
class GeneratorKernel:
    matrix: np.ndarray
    hat_dim: int
    asymmetry: float

    @property
    def n_basis(self):
        return self.matrix.shape[0] // self.hat_dim

    def block(self, i, j):
        d = self.hat_dim
        return self.matrix[i * d:(i + 1) * d, j * d:(j + 1) * d]


@dataclass
class KolmogorovData:
    K_dim: int
    chi: np.ndarray  # (n, K_dim, hat_dim)

    def delta(self, i):
        return self.chi[i][:, 0]

    def gamma(self, i):
        return self.chi[i][:, 1:]


@dataclass
class GeneratorTuple:
    """(K, rho, D, xi, d, e, t): the characterizing data of a CPC generator."""

    K_dim: int
    rho: np.ndarray  # (n, K, K)
    D: np.ndarray    # (K, dk)
    xi: np.ndarray   # (K,)
    d: np.ndarray    # (dk,)
    e: np.ndarray    # (dk,)
    t: float

    def __post_init__(self):
        self.rho = as_complex(self.rho)
        self.D = as_complex(self.D)
        self.xi = as_complex(self.xi)
        self.d = as_complex(self.d)
        self.e = as_complex(self.e)
        self.t = float(self.t)

    @property
    def dk(self):
        return self.D.shape[1]

    def delta(self, h):
        """delta(b_i) = (rho(b_i) - eps(b_i)) xi, shape (n, K)."""
        eye = np.eye(self.K_dim)
        return np.einsum("iab,b->ia", self.rho - h.counit[:, None, None] * eye, self.xi)

    def delta_dag(self, h):
        """delta^dag(b_i) = delta(b_i^*)^*, shape (n, K) of row vectors."""
        delta = self.delta(h)
        return np.conj(np.einsum("pi,pa->ia", h.star, delta))

    def lam(self, h):
        """lambda(b_i) = eps(b_i)(t - |xi|^2) + <xi, rho(b_i) xi>."""
        quad = np.einsum("a,iab,b->i", np.conj(self.xi), self.rho, self.xi)
        return h.counit * (self.t - float(np.vdot(self.xi, self.xi).real)) + quad


def validate_tuple(tup, h, tol=numerics.EQ_TOL):
    """Check the tuple invariants; minimality is measured elsewhere, not enforced."""
    n, K, dk = h.dim, tup.K_dim, tup.dk
    if tup.rho.shape != (n, K, K):
        raise InvalidTuple(f"rho shape {tup.rho.shape}, expected {(n, K, K)}")
    if tup.D.shape != (K, dk) or tup.xi.shape != (K,) or tup.d.shape != (dk,) or tup.e.shape != (dk,):
        raise InvalidTuple("tuple field shapes are inconsistent")
    problems = []
    unital = max_abs(np.einsum("i,iab->ab", h.unit, tup.rho) - np.eye(K))
    if unital > tol:
        problems.append(f"rho not unital ({unital:.2e})")
    mult = max_abs(np.einsum("ijk,kab->ijab", h.mult, tup.rho)
                   - np.einsum("iax,jxb->ijab", tup.rho, tup.rho))
    if mult > tol:
        problems.append(f"rho not multiplicative ({mult:.2e})")
    star = max_abs(np.einsum("pi,pab->iab", h.star, tup.rho) - dagger(tup.rho))
    if star > tol:
        problems.append(f"rho not star-preserving ({star:.2e})")
    d_norm = operator_norm(tup.D)
    if d_norm > 1.0 + tol:
        problems.append(f"D not a contraction (norm {d_norm:.6f})")
    else:
        droot = psd_sqrt(np.eye(dk) - dagger(tup.D) @ tup.D)
        if max_abs(droot @ tup.e - tup.d) > tol:
            problems.append("d != (I - D*D)^{1/2} e")
    if tup.t > tol:
        problems.append(f"t = {tup.t:.3e} > 0")
    if float(np.vdot(tup.e, tup.e).real) > -tup.t + tol:
        problems.append("|e|^2 > -t")
    if problems:
        raise InvalidTuple("; ".join(problems))


def minimal_k_of_tuple(tup, h, cutoff=1e-10):
    """Rank of span{delta(b_i) 1, rho(b_i) D c}: the minimal Kolmogorov dimension."""
    if tup.K_dim == 0:
        return 0
    cols = [tup.delta(h).T]
    if tup.dk:
        cols.append(np.einsum("iab,bc->aic", tup.rho, tup.D).reshape(tup.K_dim, -1))
    stack = np.concatenate(cols, axis=1)
    if stack.size == 0:
        return 0
    s = np.linalg.svd(stack, compute_uv=False)
    return int(np.sum(s > cutoff * max(1.0, s[0])))


def assemble_from_tuple(tup, h, validate=True, tol=numerics.EQ_TOL):
    """Assemble the generator blocks from a tuple."""
    if validate:
        validate_tuple(tup, h, tol)
    n, dk = h.dim, tup.dk
    lam = tup.lam(h)
    delta = tup.delta(h)
    delta_dag = tup.delta_dag(h)
    eps = h.counit
    blocks = np.zeros((n, 1 + dk, 1 + dk), dtype=complex)
    blocks[:, 0, 0] = lam
    blocks[:, 0, 1:] = eps[:, None] * np.conj(tup.d)[None, :] + delta_dag @ tup.D
    blocks[:, 1:, 0] = eps[:, None] * tup.d[None, :] + delta @ np.conj(tup.D)
    sandwich = np.einsum("ca,iab,bd->icd", dagger(tup.D), tup.rho, tup.D)
    blocks[:, 1:, 1:] = sandwich - eps[:, None, None] * np.eye(dk)[None, :, :]
    return GeneratorMap(blocks, NoiseSpace(dk))


def build_kernel(phi, h, tol=numerics.EQ_TOL):
    """Assemble the Hermitian kernel matrix over the basis."""
    real_res = phi.reality_residual(h)
    if real_res > tol:
        raise NotReal(f"phi(a*) != phi(a)* (residual {real_res:.3e})")
    n, dk, hd = h.dim, phi.dk, phi.noise.hat_dim
    sp = h.star_products()
    star_vecs = h.star  # column i = coefficients of b_i^*
    lam = phi.blocks[:, 0, 0]
    eta = phi.eta()
    eta_dag = phi.eta_dag()
    sigma = phi.sigma(h)
    eps = h.counit
    eps_star = eps @ star_vecs  # eps(b_i^*)
    lam_star = np.einsum("pi,p->i", star_vecs, lam)  # lambda(b_i^*)
    eta_star = np.einsum("pi,pa->ia", star_vecs, eta)
    lam_one = complex(lam @ h.unit)

    kern = np.zeros((n * hd, n * hd), dtype=complex)
    for i in range(n):
        for j in range(n):
            prod = sp[i, j]
            dl = (complex(lam @ prod) - eps_star[i] * lam[j]
                  - lam_star[i] * eps[j] + eps_star[i] * lam_one * eps[j])
            block = np.zeros((hd, hd), dtype=complex)
            block[0, 0] = dl
            block[0, 1:] = np.einsum("k,ka->a", prod, eta_dag) - eps_star[i] * eta_dag[j]
            block[1:, 0] = np.einsum("k,ka->a", prod, eta) - eta_star[i] * eps[j]
            block[1:, 1:] = np.einsum("k,kab->ab", prod, sigma)
            kern[i * hd:(i + 1) * hd, j * hd:(j + 1) * hd] = block
    asym = numerics.asymmetry(kern)
    return GeneratorKernel(hermitian_part(kern), hd, asym)


def kolmogorov_extract(kern, rank_tol=numerics.RANK_TOL, psd_tol=numerics.PSD_TOL,
                       clip=False):
    """Minimal factorization chi(b_i)* chi(b_j) = psi(b_i, b_j).

    With clip=True a kernel failing the PSD certificate has its negative
    eigenvalues clipped before factoring; the resulting chi then cannot
    reproduce the kernel, which the downstream reconstruction check reports.
    """
    cert = is_psd(kern.matrix, psd_tol)
    mat = kern.matrix
    if not cert.is_psd:
        if not clip:
            raise KernelNotPsd(
                f"kernel min eigenvalue {cert.min_eigenvalue:.3e}; generator is not CPC")
        w, v = np.linalg.eigh(mat)
        mat = (v * np.clip(w, 0.0, None)) @ dagger(v)
    x = minimal_rank_factor(mat, rank_tol, psd_tol)
    k_dim = x.shape[0]
    hd = kern.hat_dim
    n = kern.n_basis
    chi = np.stack([x[:, i * hd:(i + 1) * hd] for i in range(n)]) if n else np.zeros((0, k_dim, hd))
    if k_dim == 0:
        chi = np.zeros((n, 0, hd), dtype=complex)
    return KolmogorovData(k_dim, as_complex(chi))


def induce_representation(kd, h, tol=numerics.EQ_TOL):
    """Recover rho from the Kolmogorov factor via the module action

        rho(a)(delta(b) 1 + gamma(b) c) = delta(ab) 1 - delta(a) eps(b) + gamma(ab) c

    solved in least squares over the spanning columns; returns (rho, D, residual).
    """
    n = h.dim
    K = kd.K_dim
    hd = kd.chi.shape[2]
    dk = hd - 1
    if K == 0:
        rho = np.zeros((n, 0, 0), dtype=complex)
        return rho, np.zeros((0, dk), dtype=complex), 0.0

    cols = np.concatenate([kd.chi[j] for j in range(n)], axis=1)  # K x n*hd
    rho = np.zeros((n, K, K), dtype=complex)
    worst = 0.0
    eps = h.counit
    for a in range(n):
        target = np.zeros((K, n * hd), dtype=complex)
        for j in range(n):
            prod = h.mult[a, j]  # coefficients of b_a b_j
            chi_prod = np.einsum("k,kxy->xy", prod, kd.chi)
            blk = chi_prod.copy()
            blk[:, 0] = chi_prod[:, 0] - kd.chi[a][:, 0] * eps[j]
            target[:, j * hd:(j + 1) * hd] = blk
        sol, res = least_squares_solve(cols.T, target.T)
        rho[a] = sol.T
        worst = max(worst, res)
    if worst > tol * max(1.0, float(np.linalg.norm(cols))):
        raise InconsistentAction(f"module action residual {worst:.3e}")

    rep_res = max(
        max_abs(np.einsum("i,iab->ab", h.unit, rho) - np.eye(K)),
        max_abs(np.einsum("ijk,kab->ijab", h.mult, rho) - np.einsum("iax,jxb->ijab", rho, rho)),
        max_abs(np.einsum("pi,pab->iab", h.star, rho) - dagger(rho)),
    )
    if rep_res > 100 * tol:
        raise InconsistentAction(f"induced rho fails the *-representation checks ({rep_res:.3e})")

    d_op = np.einsum("i,iab->ab", h.unit, kd.chi)[:, 1:]
    return rho, d_op, max(worst, rep_res)


def solve_inner_vector(rho, delta, h, tol=numerics.EQ_TOL):
    """Minimal-norm xi with (rho(b_i) - eps(b_i)) xi = delta(b_i) stacked over the basis."""
    n = h.dim
    K = rho.shape[1]
    if K == 0:
        return np.zeros(0, dtype=complex), 0.0
    eye = np.eye(K)
    a_big = np.concatenate([rho[i] - h.counit[i] * eye for i in range(n)], axis=0)
    b_big = np.concatenate([delta[i] for i in range(n)], axis=0)
    xi, res = least_squares_solve(a_big, b_big)
    if res > tol * max(1.0, float(np.linalg.norm(b_big))):
        raise NotInner(f"derivation is not inner within tolerance (residual {res:.3e})")
    return xi, res


def solve_e(D, d, t, tol=numerics.EQ_TOL):
    """Minimal-norm e with (I - D*D)^{1/2} e = d and |e|^2 <= -t."""
    D = as_complex(D)
    d = as_complex(d)
    dk = D.shape[1]
    if t > tol:
        raise NoSolution(f"t = {t:.3e} > 0")
    root = psd_sqrt(np.eye(dk) - dagger(D) @ D)
    e, res = least_squares_solve(root, d)
    ok = res <= tol * max(1.0, float(np.linalg.norm(d))) and \
        float(np.vdot(e, e).real) <= -t + tol
    if not ok:
        raise NoSolution(
            f"no admissible e: residual {res:.3e}, |e|^2 = {float(np.vdot(e, e).real):.3e}, -t = {-t:.3e}")
    return e, res


def markov_generator(phi):
    """The vacuum compression <e0, phi(.) e0> as a functional."""
    return Functional(phi.blocks[:, 0, 0].copy())


def extract_tuple(phi, h, tol=numerics.EQ_TOL, clip_kernel=False):
    """Full extraction pipeline; raises NotCpc with the failing stage recorded."""
    rpt = extraction_report(phi, h, tol, clip_kernel)
    if rpt.meta.get("tuple") is None or not rpt.passed:
        failed = [c.name for c in rpt.checks if not c.passed]
        stage = failed[0] if failed else "unknown"
        raise NotCpc(f"extraction failed at stage {stage}", stage=stage)
    return rpt.meta["tuple"]


def extraction_report(phi, h, tol=numerics.EQ_TOL, clip_kernel=False):
    """Run the extraction pipeline, recording a check per stage.

    The report's meta carries the tuple when every stage succeeds (and a
    best-effort tuple under clip_kernel even when the kernel fails PSD).
    """
    rpt = Report(meta={"tuple": None})
    real_res = phi.reality_residual(h)
    rpt.add_residual("reality", real_res, tol)
    if real_res > tol:
        return rpt

    kern = build_kernel(phi, h, tol)
    cert = is_psd(kern.matrix, numerics.PSD_TOL)
    rpt.add_flag("kernel_psd", cert.is_psd, max(0.0, -cert.min_eigenvalue), cert.tolerance_used)
    rpt.meta["kernel_min_eig"] = cert.min_eigenvalue
    if not cert.is_psd and not clip_kernel:
        return rpt

    try:
        kd = kolmogorov_extract(kern, clip=clip_kernel)
        rho, d_op, action_res = induce_representation(kd, h, tol)
        rpt.add_residual("module_action", action_res, 100 * tol)
        delta = kd.chi[:, :, 0] if kd.K_dim else np.zeros((h.dim, 0), dtype=complex)
        delta_one = np.einsum("i,ia->a", h.unit, delta)
        rpt.add_residual("delta_at_unit", max_abs(delta_one), 10 * tol)
        xi, inner_res = solve_inner_vector(rho, delta, h, tol)
        rpt.add_residual("derivation_inner", inner_res, tol)

        lam_one = complex(phi.blocks[:, 0, 0] @ h.unit)
        rpt.add_residual("lambda_one_real", abs(lam_one.imag), tol)
        t = float(lam_one.real)
        phi_one = phi.phi_one(h)
        d = phi_one[1:, 0].copy()
        one_cert = is_psd(-hermitian_part(phi_one), numerics.PSD_TOL)
        rpt.add_flag("phi_one_nonpositive", one_cert.is_psd,
                     max(0.0, -one_cert.min_eigenvalue), one_cert.tolerance_used)
        if not one_cert.is_psd:
            return rpt
        e, e_res = solve_e(d_op, d, min(t, 0.0), tol)
        rpt.add_residual("e_recovery", e_res, tol)

        tup = GeneratorTuple(kd.K_dim, rho, d_op, xi, d, e, min(t, 0.0))
        rebuilt = assemble_from_tuple(tup, h, validate=False)
        recon = max_abs(rebuilt.blocks - phi.blocks)
        rpt.add_residual("reconstruction", recon, 10 * tol)
        rpt.meta["tuple"] = tup
        rpt.meta["reconstruction_residual"] = recon
    except (KernelNotPsd, InconsistentAction, NotInner, NoSolution, NotPsd) as exc:
        rpt.add_flag(type(exc).__name__, False, 1.0, 0.0, note=str(exc))
    return rpt


def is_cpc(phi, h, tol=numerics.EQ_TOL):
    """Decide complete positivity + contractivity; the report carries every certificate."""
    rpt = Report()
    rpt.add_residual("reality", phi.reality_residual(h), tol)

    kernel_note = ""
    try:
        kern = build_kernel(phi, h, tol)
        cert = is_psd(kern.matrix, numerics.PSD_TOL)
        rpt.add_flag("kernel_psd", cert.is_psd, max(0.0, -cert.min_eigenvalue),
                     cert.tolerance_used)
    except NotReal as exc:
        rpt.add_flag("kernel_psd", False, 1.0, 0.0, note=str(exc))
        kernel_note = str(exc)

    one_cert = is_psd(-hermitian_part(phi.phi_one(h)), numerics.PSD_TOL)
    rpt.add_flag("phi_one_nonpositive", one_cert.is_psd,
                 max(0.0, -one_cert.min_eigenvalue), one_cert.tolerance_used)

    extraction = extraction_report(phi, h, tol)
    tup = extraction.meta.get("tuple")
    rpt.add_flag("extraction_reconstruction", extraction.passed and tup is not None,
                 extraction.meta.get("reconstruction_residual", 1.0), 10 * tol,
                 note=kernel_note or "; ".join(c.name for c in extraction.checks if not c.passed))
    rpt.meta["tuple"] = tup
    rpt.meta["cpc"] = rpt.passed
    return rpt


def cp_decomposition(tup, h, tol=numerics.EQ_TOL):
    """Split phi as psi - eps(.) (QSproj + |e0><chi| + |chi><e0|) with psi CP.

    psi(a) = S* rho(a) S for S = [ |xi>  D ]; chi is determined by matching
    the decomposition against the assembled generator.
    """
    validate_tuple(tup, h, tol)
    n, dk, K = h.dim, tup.dk, tup.K_dim
    s_op = np.zeros((K, 1 + dk), dtype=complex)
    if K:
        s_op[:, 0] = tup.xi
        s_op[:, 1:] = tup.D
    psi = np.einsum("ca,iab,bd->icd", dagger(s_op), tup.rho, s_op)

    lam0_one = tup.t - float(np.vdot(tup.xi, tup.xi).real)
    lam = tup.lam(h)
    quad = np.einsum("a,iab,b->i", np.conj(tup.xi), tup.rho, tup.xi)
    lam0_res = max_abs((lam - quad) - lam0_one * h.counit)

    chi = np.zeros(1 + dk, dtype=complex)
    chi[0] = -0.5 * lam0_one
    chi[1:] = (dagger(tup.D) @ tup.xi if K else np.zeros(dk)) - tup.d

    e0 = np.zeros(1 + dk, dtype=complex)
    e0[0] = 1.0
    qs = np.eye(1 + dk, dtype=complex)
    qs[0, 0] = 0.0
    correction = qs + np.outer(e0, np.conj(chi)) + np.outer(chi, np.conj(e0))
    phi = assemble_from_tuple(tup, h, validate=False)
    resid = max_abs(phi.blocks - (psi - h.counit[:, None, None] * correction[None, :, :]))

    sp = h.star_products()
    hd = 1 + dk
    gram = np.zeros((n * hd, n * hd), dtype=complex)
    for i in range(n):
        for j in range(n):
            gram[i * hd:(i + 1) * hd, j * hd:(j + 1) * hd] = np.einsum("k,kab->ab", sp[i, j], psi)
    cp_cert = is_psd(hermitian_part(gram), numerics.PSD_TOL)

    rpt = Report()
    rpt.add_residual("lambda0_is_multiple_of_counit", lam0_res, 10 * tol)
    rpt.add_residual("decomposition", resid, 10 * tol)
    rpt.add_flag("psi_completely_positive", cp_cert.is_psd,
                 max(0.0, -cp_cert.min_eigenvalue), cp_cert.tolerance_used)
    return psi, chi, rpt
