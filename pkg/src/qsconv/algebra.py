"""Finite-dimensional C*-bialgebras and C*-hyperbialgebras.

An algebra element is a coefficient vector x in C^n over the stored basis.
Structure data:

  mult[i, j, k]   :  b_i b_j = sum_k mult[i,j,k] b_k
  star[j, i]      :  (b_i)^* = sum_j star[j,i] b_j   (extended conjugate-linearly)
  unit            :  coefficients of 1
  coproduct[i,j,k]:  Delta(b_i) = sum_{j,k} coproduct[i,j,k] b_j (x) b_k
  counit          :  counit[i] = eps(b_i)
  rep             :  rep[i] = pi(b_i), a faithful unital *-representation

Complete positivity of a map psi: A -> B(H) is tested through the Gram
criterion: [psi(b_i^* b_j)]_{ij} >= 0 as an n*dim(H) block matrix.  By
sesquilinearity of (a, b) -> psi(a^* b) this single basis check covers
every finite family sum_i c_i a_i, which is all that complete positivity
over a finite-dimensional algebra requires.
"""

import numpy as np

from . import numerics
from .errors import DimensionMismatch, NoIdentity, NotAssociative, NotAGroup
from .numerics import as_complex, is_psd, matrix_exp, max_abs
from .report import Report


class FiniteStarAlgebra:
    def __init__(self, mult, star, unit, rep, labels=None):
        self.mult = as_complex(mult)
        self.star = as_complex(star)
        self.unit = as_complex(unit)
        self.rep = as_complex(rep)
        self.dim = self.mult.shape[0]
        self.labels = list(labels) if labels is not None else [f"b{i}" for i in range(self.dim)]
        if self.mult.shape != (self.dim,) * 3:
            raise DimensionMismatch(f"mult tensor shape {self.mult.shape}")
        if self.star.shape != (self.dim, self.dim) or self.unit.shape != (self.dim,):
            raise DimensionMismatch("star/unit shape mismatch")
        if self.rep.ndim != 3 or self.rep.shape[0] != self.dim or self.rep.shape[1] != self.rep.shape[2]:
            raise DimensionMismatch(f"rep shape {self.rep.shape}")

    @property
    def rep_dim(self):
        return self.rep.shape[1]

    def product(self, x, y):
        return np.einsum("i,j,ijk->k", as_complex(x), as_complex(y), self.mult)

    def star_vec(self, x):
        return self.star @ np.conj(as_complex(x))

    def represent(self, x):
        return np.einsum("i,iab->ab", as_complex(x), self.rep)


class Coalgebra:
    def __init__(self, coproduct, counit):
        self.coproduct = as_complex(coproduct)
        self.counit = as_complex(counit)
        n = self.counit.shape[0]
        if self.coproduct.shape != (n, n, n):
            raise DimensionMismatch(f"coproduct tensor shape {self.coproduct.shape}")


class FiniteHyperbialgebra:
    """A finite-dimensional *-algebra with coproduct and counit."""

    def __init__(self, algebra, coalgebra, delta_multiplicative):
        if algebra.dim != coalgebra.counit.shape[0]:
            raise DimensionMismatch("algebra and coalgebra dimensions differ")
        self.algebra = algebra
        self.coalgebra = coalgebra
        self.delta_multiplicative = bool(delta_multiplicative)
        self._star_products = None

    # -- delegated accessors ------------------------------------------------
    @property
    def dim(self):
        return self.algebra.dim

    @property
    def labels(self):
        return self.algebra.labels

    @property
    def mult(self):
        return self.algebra.mult

    @property
    def star(self):
        return self.algebra.star

    @property
    def unit(self):
        return self.algebra.unit

    @property
    def rep(self):
        return self.algebra.rep

    @property
    def coproduct(self):
        return self.coalgebra.coproduct

    @property
    def counit(self):
        return self.coalgebra.counit

    def product(self, x, y):
        return self.algebra.product(x, y)

    def star_vec(self, x):
        return self.algebra.star_vec(x)

    def represent(self, x):
        return self.algebra.represent(x)

    def counit_of(self, x):
        return complex(self.counit @ as_complex(x))

    def coproduct_of(self, x):
        """Coefficient matrix T with Delta(x) = sum_{j,k} T[j,k] b_j (x) b_k."""
        return np.einsum("i,ijk->jk", as_complex(x), self.coproduct)

    def star_products(self):
        """star_products[i, j] = coefficients of b_i^* b_j, shape (n, n, n)."""
        if self._star_products is None:
            # b_i^* = sum_p star[p,i] b_p, so (b_i^* b_j)_k = sum_p star[p,i] mult[p,j,k]
            self._star_products = np.einsum("pi,pjk->ijk", self.star, self.mult)
        return self._star_products


class Functional:
    """A linear functional on the algebra, stored by its basis values."""

    def __init__(self, coeffs):
        self.coeffs = as_complex(coeffs)

    def __call__(self, x):
        return complex(self.coeffs @ as_complex(x))

    def __add__(self, other):
        return Functional(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return Functional(self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return Functional(self.coeffs * scalar)

    __rmul__ = __mul__

    def __len__(self):
        return self.coeffs.shape[0]


# ---------------------------------------------------------------------------
# built-in constructors
# ---------------------------------------------------------------------------

def _check_table(table):
    table = np.asarray(table, dtype=int)
    n = table.shape[0]
    if table.shape != (n, n):
        raise DimensionMismatch(f"index table must be square, got {table.shape}")
    if table.min() < 0 or table.max() >= n:
        raise NotAssociative("table entries out of range")
    return table, n


def _find_identity(table, n):
    for e in range(n):
        if all(table[e, j] == j and table[j, e] == j for j in range(n)):
            return e
    return None


def _check_associative(table, n):
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if table[table[i, j], k] != table[i, table[j, k]]:
                    raise NotAssociative(f"({i}*{j})*{k} != {i}*({j}*{k})")


def function_algebra(monoid_table, identity=None, labels=None):
    """Commutative function algebra C(M) of a finite monoid, with Delta f(s,t) = f(st).

    Basis: point indicators delta_x; pointwise product; star = complex
    conjugation; counit = evaluation at the identity; diagonal representation.
    """
    table, n = _check_table(monoid_table)
    _check_associative(table, n)
    e = _find_identity(table, n)
    if e is None:
        raise NoIdentity("the table has no two-sided identity")
    if identity is not None and identity != e:
        raise NoIdentity(f"declared identity {identity} is not the table identity {e}")

    mult = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        mult[i, i, i] = 1.0
    star = np.eye(n, dtype=complex)
    unit = np.ones(n, dtype=complex)
    rep = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        rep[i, i, i] = 1.0

    coproduct = np.zeros((n, n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            coproduct[table[j, k], j, k] = 1.0
    counit = np.zeros(n, dtype=complex)
    counit[e] = 1.0

    alg = FiniteStarAlgebra(mult, star, unit, rep, labels)
    return FiniteHyperbialgebra(alg, Coalgebra(coproduct, counit), delta_multiplicative=True)


def group_algebra(group_table, labels=None):
    """Group *-algebra C[G] with Delta(b_g) = b_g (x) b_g and the left regular representation."""
    table, n = _check_table(group_table)
    try:
        _check_associative(table, n)
    except NotAssociative as exc:
        raise NotAGroup(str(exc)) from exc
    e = _find_identity(table, n)
    if e is None:
        raise NotAGroup("no identity element")
    inverse = [None] * n
    for g in range(n):
        for h in range(n):
            if table[g, h] == e and table[h, g] == e:
                inverse[g] = h
                break
        if inverse[g] is None:
            raise NotAGroup(f"element {g} has no inverse")

    mult = np.zeros((n, n, n), dtype=complex)
    for g in range(n):
        for h in range(n):
            mult[g, h, table[g, h]] = 1.0
    star = np.zeros((n, n), dtype=complex)
    for g in range(n):
        star[inverse[g], g] = 1.0
    unit = np.zeros(n, dtype=complex)
    unit[e] = 1.0
    rep = np.zeros((n, n, n), dtype=complex)
    for g in range(n):
        for h in range(n):
            rep[g, table[g, h], h] = 1.0  # left regular: b_g e_h = e_{gh}

    coproduct = np.zeros((n, n, n), dtype=complex)
    for g in range(n):
        coproduct[g, g, g] = 1.0
    counit = np.ones(n, dtype=complex)

    alg = FiniteStarAlgebra(mult, star, unit, rep, labels)
    return FiniteHyperbialgebra(alg, Coalgebra(coproduct, counit), delta_multiplicative=True)


# ---------------------------------------------------------------------------
# axiom verification
# ---------------------------------------------------------------------------

def delta_cp_kernel(h):
    """Block matrix [(pi (x) pi)(Delta(b_i^* b_j))]_{ij}; PSD iff Delta is CP under rep."""
    n, m = h.dim, h.algebra.rep_dim
    sp = h.star_products()
    big = np.zeros((n * m * m, n * m * m), dtype=complex)
    for i in range(n):
        for j in range(n):
            t = np.einsum("k,kpq->pq", sp[i, j], h.coproduct)
            block = np.einsum("pq,pab,qcd->acbd", t, h.rep, h.rep).reshape(m * m, m * m)
            big[i * m * m:(i + 1) * m * m, j * m * m:(j + 1) * m * m] = block
    return big


def delta_multiplicativity_residual(h):
    """max over basis pairs of || Delta(b_i b_j) - Delta(b_i) Delta(b_j) ||."""
    lhs = np.einsum("ijm,mpq->ijpq", h.mult, h.coproduct)
    rhs = np.einsum("iab,jcd,acp,bdq->ijpq", h.coproduct, h.coproduct, h.mult, h.mult)
    return max_abs(lhs - rhs)


def verify_hyperbialgebra(h, tol=1e-10):
    """Check every hyperbialgebra axiom; the report carries per-axiom max residuals."""
    n = h.dim
    rpt = Report(meta={"dim": n, "multiplicative_flag": h.delta_multiplicative})

    assoc = np.einsum("ijm,mkl->ijkl", h.mult, h.mult) - np.einsum("jkm,iml->ijkl", h.mult, h.mult)
    rpt.add_residual("associativity", max_abs(assoc), tol)

    rpt.add_residual("star_involutive", max_abs(h.star @ np.conj(h.star) - np.eye(n)), tol)

    # (b_i b_j)^* = b_j^* b_i^*
    lhs = np.einsum("ijk,pk->ijp", np.conj(h.mult), h.star)
    rhs = np.einsum("aj,bi,abp->ijp", h.star, h.star, h.mult)
    rpt.add_residual("star_antimultiplicative", max_abs(lhs - rhs), tol)

    left_unit = np.einsum("i,ijk->jk", h.unit, h.mult) - np.eye(n)
    right_unit = np.einsum("j,ijk->ik", h.unit, h.mult) - np.eye(n)
    rpt.add_residual("unit", max(max_abs(left_unit), max_abs(right_unit)), tol)

    rep_unit = h.represent(h.unit) - np.eye(h.algebra.rep_dim)
    rep_mult = np.einsum("ijk,kab->ijab", h.mult, h.rep) - np.einsum("iax,jxb->ijab", h.rep, h.rep)
    rep_star = np.einsum("pi,pab->iab", h.star, h.rep) - np.conj(np.swapaxes(h.rep, 1, 2))
    flat = h.rep.reshape(n, -1).T
    sv = np.linalg.svd(flat, compute_uv=False)
    rep_inj = 0.0 if sv.size >= n and sv[n - 1] > 1e-10 else 1.0
    rpt.add_residual("rep_unital", max_abs(rep_unit), tol)
    rpt.add_residual("rep_multiplicative", max_abs(rep_mult), tol)
    rpt.add_residual("rep_star", max_abs(rep_star), tol)
    rpt.add_flag("rep_injective", rep_inj == 0.0, rep_inj, 0.0)

    coassoc = (np.einsum("ijk,jpq->ipqk", h.coproduct, h.coproduct)
               - np.einsum("ijk,kpq->ijpq", h.coproduct, h.coproduct))
    rpt.add_residual("coassociativity", max_abs(coassoc), tol)

    left_counit = np.einsum("ijk,j->ik", h.coproduct, h.counit) - np.eye(n)
    right_counit = np.einsum("ijk,k->ij", h.coproduct, h.counit) - np.eye(n)
    rpt.add_residual("counit_law", max(max_abs(left_counit), max_abs(right_counit)), tol)

    char = np.einsum("ijk,k->ij", h.mult, h.counit) - np.outer(h.counit, h.counit)
    rpt.add_residual("counit_character", max_abs(char), tol)
    rpt.add_residual("counit_unital", abs(h.counit_of(h.unit) - 1.0), tol)
    star_counit = h.counit @ h.star - np.conj(h.counit)
    rpt.add_residual("counit_star", max_abs(star_counit), tol)

    delta_unit = h.coproduct_of(h.unit) - np.outer(h.unit, h.unit)
    rpt.add_residual("coproduct_unital", max_abs(delta_unit), tol)

    cert = is_psd(delta_cp_kernel(h), numerics.PSD_TOL)
    rpt.add_flag("coproduct_cp", cert.is_psd, max(0.0, -cert.min_eigenvalue),
                 cert.tolerance_used, note="Gram kernel over rep (x) rep")

    mult_res = delta_multiplicativity_residual(h)
    if h.delta_multiplicative:
        rpt.add_residual("coproduct_multiplicative", mult_res, tol)
    else:
        rpt.add_flag("coproduct_multiplicative", True, mult_res, float("inf"),
                     note="reported only; flag is False")
    return rpt


# ---------------------------------------------------------------------------
# the convolution calculus of functionals
# ---------------------------------------------------------------------------

def convolve(f, g, h):
    """(f * g)(x) = (f (x) g)(Delta x)."""
    if len(f) != h.dim or len(g) != h.dim:
        raise DimensionMismatch("functional dimension does not match the algebra")
    return Functional(np.einsum("ijk,j,k->i", h.coproduct, f.coeffs, g.coeffs))


def convolution_matrix(f, h, leg="second"):
    """Matrix of (id (x) f) o Delta (leg='second') or (f (x) id) o Delta on coefficients."""
    if leg == "second":
        m = np.einsum("ijk,k->ji", h.coproduct, as_complex(f.coeffs))
    elif leg == "first":
        m = np.einsum("ijk,j->ki", h.coproduct, as_complex(f.coeffs))
    else:
        raise ValueError(f"unknown leg {leg!r}")
    return m


def conv_exp(f, t, h):
    """Convolution exponential exp_*(t f) = counit o exp(t M_f)."""
    m = convolution_matrix(f, h)
    return Functional(h.counit @ matrix_exp(t * m))


def is_positive_functional(f, h, tol=numerics.PSD_TOL):
    """Gram criterion: [f(b_i^* b_j)] PSD."""
    gram = np.einsum("ijk,k->ij", h.star_products(), f.coeffs)
    return is_psd(numerics.hermitian_part(gram), tol)


def counit_functional(h):
    return Functional(h.counit.copy())


# ---------------------------------------------------------------------------
# the R-map and generator lifting
# ---------------------------------------------------------------------------

def r_map(phi_blocks, h):
    """(id (x) phi) o Delta for a map phi given by per-basis matrices.

    Returns r with r[i][j] = sum_k coproduct[i,j,k] phi(b_k), i.e. the
    coefficient of b_j in the A-leg, shape (n, n, dV, dV).
    """
    phi_blocks = as_complex(phi_blocks)
    if phi_blocks.shape[0] != h.dim:
        raise DimensionMismatch("one block per basis element required")
    return np.einsum("ijk,kab->ijab", h.coproduct, phi_blocks)


def compose_with_expectation(phi_tilde, p):
    """Lift a map on the range of a conditional expectation to the whole algebra.

    (phi_tilde o P)(b_i) = sum_r c_r(i) phi_tilde(r) with c = compression of P b_i.
    """
    phi_tilde = as_complex(phi_tilde)
    comp = p.compression
    if phi_tilde.shape[0] != comp.shape[0]:
        raise DimensionMismatch("map does not match the expectation range")
    return np.einsum("ri,rab->iab", comp, phi_tilde)
