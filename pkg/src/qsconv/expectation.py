"""Conditional expectations that seed new hyperbialgebras.

Two constructions are provided: averaging twice over a quantum subsemigroup
with a Haar state (double cosets) and averaging over a finite group of
bialgebra automorphisms (Delsarte fixed points).  Both produce an idempotent
CP projection P whose range, equipped with (P (x) P) o Delta and the
restricted counit, is again a hyperbialgebra.
"""

from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .algebra import Coalgebra, FiniteHyperbialgebra, FiniteStarAlgebra, is_psd
from .errors import DimensionMismatch, ExpectationInvalid, NotAnAction, NotHaar, NotMorphism
from .numerics import as_complex, dagger, hermitian_part, max_abs
from .report import Report


@dataclass
class ConditionalExpectation:
    """An idempotent CP projection P on A together with a basis of its range.

    range_basis holds the basis as columns (n x m); compression maps
    coefficients in A to coefficients over the range basis.
    """

    matrix: np.ndarray
    range_basis: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.matrix = as_complex(self.matrix)
        self.range_basis = as_complex(self.range_basis)
        if self.range_basis.ndim != 2 or self.range_basis.shape[0] != self.matrix.shape[0]:
            raise DimensionMismatch("range basis does not match the expectation matrix")

    @property
    def range_dim(self):
        return self.range_basis.shape[1]

    @property
    def compression(self):
        # With J the range basis, C = J^+ P satisfies C J = I and J C = P.
        return np.linalg.pinv(self.range_basis) @ self.matrix


@dataclass
class BialgebraMorphism:
    """A unital *-homomorphism intertwining two coalgebra structures."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = as_complex(self.matrix)


@dataclass
class GroupAction:
    """A finite group acting by bialgebra automorphisms, one matrix per element."""

    group_table: np.ndarray
    automorphisms: np.ndarray

    def __post_init__(self):
        self.group_table = np.asarray(self.group_table, dtype=int)
        self.automorphisms = as_complex(self.automorphisms)


def fixed_subspace(p, cutoff=1e-10):
    """Orthonormal basis of ker(P - I), deterministic up to the phase convention."""
    p = as_complex(p)
    n = p.shape[0]
    u, s, vh = np.linalg.svd(p - np.eye(n))
    null = vh[s <= cutoff * max(1.0, s[0] if s.size else 1.0)].conj().T
    if null.size:
        null = numerics._fix_phases(null)
    return null


def verify_conditional_expectation(h, p, tol=1e-10):
    """Residuals for idempotence, unitality, CP, the bimodule property and the
    three coproduct intertwining identities."""
    n = h.dim
    pm = p.matrix
    if pm.shape != (n, n):
        raise DimensionMismatch("expectation matrix does not match the algebra")
    rpt = Report(meta={"range_dim": p.range_dim})

    rpt.add_residual("idempotent", max_abs(pm @ pm - pm), tol)
    rpt.add_residual("unital", max_abs(pm @ h.unit - h.unit), tol)
    rpt.add_residual("range_fixed", max_abs(pm @ p.range_basis - p.range_basis), tol)

    # CP via the Gram criterion under the faithful representation.
    m = h.algebra.rep_dim
    sp = h.star_products()
    gram = np.zeros((n * m, n * m), dtype=complex)
    for i in range(n):
        for j in range(n):
            gram[i * m:(i + 1) * m, j * m:(j + 1) * m] = h.represent(pm @ sp[i, j])
    cert = is_psd(hermitian_part(gram), numerics.PSD_TOL)
    rpt.add_flag("completely_positive", cert.is_psd, max(0.0, -cert.min_eigenvalue),
                 cert.tolerance_used)

    # bimodule property P(a x b) = a P(x) b for a, b in the range
    worst = 0.0
    rng = [p.range_basis[:, r] for r in range(p.range_dim)]
    for a in rng:
        for b in rng:
            for i in range(n):
                x = np.zeros(n, dtype=complex)
                x[i] = 1.0
                lhs = pm @ h.product(h.product(a, x), b)
                rhs = h.product(h.product(a, pm @ x), b)
                worst = max(worst, max_abs(lhs - rhs))
    rpt.add_residual("bimodule", worst, tol)

    # the three identities (P (x) id) Delta P = (P (x) P) Delta = (id (x) P) Delta P.
    # Both outer terms carry the trailing P: the strong form without it fails
    # already for double cosets, while this form is what the convolution
    # correspondence argument consumes.
    cop = h.coproduct
    t_pp = np.einsum("ijk,pj,qk->ipq", cop, pm, pm)
    delta_p = np.einsum("ji,jpq->ipq", pm, cop)  # Delta(P b_i)
    t_pid = np.einsum("ipq,rp->irq", delta_p, pm)
    t_idp = np.einsum("ipq,rq->ipr", delta_p, pm)
    rpt.add_residual("intertwine_left", max_abs(t_pid - t_pp), tol)
    rpt.add_residual("intertwine_right", max_abs(t_idp - t_pp), tol)
    t_ppp = np.einsum("ipq,rp,sq->irs", delta_p, pm, pm)
    rpt.add_residual("projection_compatible", max_abs(t_ppp - t_pp), tol)
    return rpt


def quotient_hyperbialgebra(h, p, tol=1e-10):
    """The hyperbialgebra carried by the range of a valid conditional expectation.

    Returns (quotient, inclusion, compression); inclusion maps quotient
    coefficients into A, compression is its left inverse through P.
    """
    rpt = verify_conditional_expectation(h, p, tol)
    if not rpt.passed:
        failing = [c.name for c in rpt.checks if not c.passed]
        raise ExpectationInvalid(f"conditional expectation fails: {failing}")

    j = p.range_basis
    c = p.compression
    m = p.range_dim

    mult = np.zeros((m, m, m), dtype=complex)
    closure = 0.0
    for r in range(m):
        for s in range(m):
            prod = h.product(j[:, r], j[:, s])
            closure = max(closure, max_abs(prod - p.matrix @ prod))
            mult[r, s] = c @ prod
    star = c @ h.star @ np.conj(j)
    unit = c @ h.unit
    rep = np.einsum("ir,iab->rab", j, h.rep)

    cop_q = np.einsum("ir,ijk,pj,qk,sp,tq->rst", j, h.coproduct, p.matrix, p.matrix, c, c)
    counit_q = h.counit @ j

    alg = FiniteStarAlgebra(mult, star, unit, rep,
                            labels=[f"q{r}" for r in range(m)])
    quotient = FiniteHyperbialgebra(alg, Coalgebra(cop_q, counit_q), delta_multiplicative=True)
    from .algebra import delta_multiplicativity_residual

    mult_res = delta_multiplicativity_residual(quotient)
    quotient.delta_multiplicative = mult_res <= tol
    quotient._closure_residual = closure
    quotient._multiplicativity_residual = mult_res
    return quotient, j, c


def _haar_residual(h2, mu):
    """max residual of (mu (x) id) Delta(a) = mu(a) 1 over the basis, plus state checks."""
    lhs = np.einsum("ijk,j->ik", h2.coproduct, mu)
    rhs = np.outer(mu, h2.unit)
    res = max_abs(lhs - rhs)
    res = max(res, abs(complex(mu @ h2.unit) - 1.0))
    cert = is_psd(hermitian_part(np.einsum("ijk,k->ij", h2.star_products(), mu)))
    if not cert.is_psd:
        res = max(res, -cert.min_eigenvalue)
    return res


def _morphism_residual(h1, h2, pi):
    worst = 0.0
    worst = max(worst, max_abs(pi @ h1.unit - h2.unit))
    lhs = np.einsum("ijk,pk->ijp", h1.mult, pi)
    rhs = np.einsum("ai,bj,abp->ijp", pi, pi, h2.mult)
    worst = max(worst, max_abs(lhs - rhs))
    star_lhs = pi @ h1.star
    star_rhs = h2.star @ np.conj(pi)
    worst = max(worst, max_abs(star_lhs - star_rhs))
    cop_lhs = np.einsum("ijk,pj,qk->ipq", h1.coproduct, pi, pi)
    cop_rhs = np.einsum("ai,apq->ipq", pi, h2.coproduct)
    worst = max(worst, max_abs(cop_lhs - cop_rhs))
    worst = max(worst, max_abs(h2.counit @ pi - h1.counit))
    rank = np.linalg.matrix_rank(pi, tol=1e-10)
    if rank < h2.dim:
        worst = max(worst, 1.0)
    return worst


def double_coset_expectation(h1, h2, pi, mu, tol=1e-10):
    """P(a) = ((mu o pi) (x) id (x) (mu o pi)) (Delta (x) id) Delta (a).

    pi must be a surjective bialgebra morphism onto h2 and mu a Haar state
    on h2; both hypotheses are verified, not assumed.  The returned
    expectation is annotated with the left/right coset residuals of its
    range basis.
    """
    pim = pi.matrix if isinstance(pi, BialgebraMorphism) else as_complex(pi)
    mu = mu.coeffs if hasattr(mu, "coeffs") else as_complex(mu)
    if pim.shape != (h2.dim, h1.dim):
        raise DimensionMismatch(f"morphism shape {pim.shape}, expected {(h2.dim, h1.dim)}")
    mres = _morphism_residual(h1, h2, pim)
    if mres > tol:
        raise NotMorphism(f"bialgebra morphism residual {mres:.3e}")
    hres = _haar_residual(h2, mu)
    if hres > tol:
        raise NotHaar(f"Haar state residual {hres:.3e}")

    nu = mu @ pim  # the averaging functional mu o pi on h1
    cop = h1.coproduct
    pm = np.einsum("ijk,jpq,p,k->qi", cop, cop, nu, nu)

    basis = fixed_subspace(pm)
    left = right = 0.0
    for r in range(basis.shape[1]):
        a = basis[:, r]
        t = np.einsum("i,ijk->jk", a, cop)
        left_t = np.einsum("jk,qk->jq", t, pim) - np.outer(a, h2.unit)
        right_t = np.einsum("jk,qj->qk", t, pim) - np.outer(h2.unit, a)
        left = max(left, max_abs(left_t))
        right = max(right, max_abs(right_t))
    return ConditionalExpectation(pm, basis, meta={
        "left_coset_residual": left,
        "right_coset_residual": right,
        "morphism_residual": mres,
        "haar_residual": hres,
    })


def delsarte_expectation(h, action, tol=1e-10):
    """P = |Gamma|^-1 sum_gamma gamma, the projection onto the fixed-point subalgebra."""
    table = action.group_table
    autos = action.automorphisms
    n_g = table.shape[0]
    if autos.shape != (n_g, h.dim, h.dim):
        raise DimensionMismatch("one automorphism matrix per group element required")

    worst = 0.0
    for g in range(n_g):
        gm = autos[g]
        lhs = np.einsum("ijk,pk->ijp", h.mult, gm)
        rhs = np.einsum("ai,bj,abp->ijp", gm, gm, h.mult)
        worst = max(worst, max_abs(lhs - rhs))
        worst = max(worst, max_abs(gm @ h.unit - h.unit))
        worst = max(worst, max_abs(gm @ h.star - h.star @ np.conj(gm)))
        cop_lhs = np.einsum("ijk,pj,qk->ipq", h.coproduct, gm, gm)
        cop_rhs = np.einsum("ai,apq->ipq", gm, h.coproduct)
        worst = max(worst, max_abs(cop_lhs - cop_rhs))
        worst = max(worst, max_abs(h.counit @ gm - h.counit))
    for g in range(n_g):
        for k in range(n_g):
            worst = max(worst, max_abs(autos[g] @ autos[k] - autos[table[g, k]]))
    if worst > tol:
        raise NotAnAction(f"group action residual {worst:.3e}")

    pm = autos.mean(axis=0)
    basis = fixed_subspace(pm)
    eps_res = max_abs(h.counit @ pm - h.counit)
    return ConditionalExpectation(pm, basis, meta={
        "action_residual": worst,
        "counit_invariance_residual": eps_res,
    })
