"""Dense complex-matrix substrate.

All matrices are numpy arrays of dtype complex128.  Spectral routines
symmetrize their Hermitian inputs before calling LAPACK so that round-off
never leaks into eigenvalue signs, and eigenvector phases follow a fixed
convention so factorizations are reproducible run to run.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NonHermitian, NotPsd

# Default tolerances; desk-scale dimensions (<= ~50) keep conditioning mild.
EQ_TOL = 1e-8
PSD_TOL = 1e-9
RANK_TOL = 1e-10
LSTSQ_CUTOFF = 1e-12


def as_complex(m):
    return np.asarray(m, dtype=complex)


def max_abs(m):
    m = np.asarray(m)
    return 0.0 if m.size == 0 else float(np.max(np.abs(m)))


def dagger(m):
    return np.conj(np.swapaxes(as_complex(m), -1, -2))


def kron(a, b):
    """Kronecker product; dimensions multiply."""
    return np.kron(as_complex(a), as_complex(b))


@dataclass
class PsdCertificate:
    is_psd: bool
    min_eigenvalue: float
    max_eigenvalue: float
    tolerance_used: float

    def to_dict(self):
        return {
            "is_psd": self.is_psd,
            "min_eigenvalue": self.min_eigenvalue,
            "max_eigenvalue": self.max_eigenvalue,
            "tolerance_used": self.tolerance_used,
        }


def hermitian_part(m):
    m = as_complex(m)
    return 0.5 * (m + dagger(m))


def asymmetry(m):
    m = as_complex(m)
    return max_abs(m - dagger(m))


def is_psd(m, tol=PSD_TOL):
    """Certify positive semidefiniteness of a Hermitian matrix.

    The matrix is symmetrized first; if its anti-Hermitian part exceeds
    10*tol the input is rejected as NonHermitian.  The verdict is
    lambda_min >= -tol*(1+|lambda_max|).
    """
    m = as_complex(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonHermitian(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] == 0:
        return PsdCertificate(True, 0.0, 0.0, tol)
    asym = asymmetry(m)
    if asym > 10 * tol * (1.0 + max_abs(m)):
        raise NonHermitian(f"matrix asymmetry {asym:.3e} exceeds 10*tol")
    w = np.linalg.eigvalsh(hermitian_part(m))
    lo, hi = float(w[0]), float(w[-1])
    tol_used = tol * (1.0 + abs(hi))
    return PsdCertificate(lo >= -tol_used, lo, hi, tol_used)


def psd_sqrt(m, tol=PSD_TOL):
    """Hermitian PSD square root; eigenvalues within tolerance of 0 are clipped."""
    m = as_complex(m)
    cert = is_psd(m, tol)
    if not cert.is_psd:
        raise NotPsd(f"min eigenvalue {cert.min_eigenvalue:.3e} below -{cert.tolerance_used:.3e}")
    if m.shape[0] == 0:
        return m.copy()
    w, v = np.linalg.eigh(hermitian_part(m))
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ dagger(v)


def _fix_phases(vectors):
    # vectors holds eigenvectors as columns; rotate each so its first
    # entry of modulus > cutoff becomes real positive.
    vectors = vectors.copy()
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        nz = np.nonzero(np.abs(col) > 1e-12 * (1.0 + np.max(np.abs(col))))[0]
        if nz.size:
            pivot = col[nz[0]]
            vectors[:, j] = col * (np.conj(pivot) / abs(pivot))
    return vectors


def minimal_rank_factor(m, rank_tol=RANK_TOL, psd_tol=PSD_TOL):
    """Factor a PSD matrix as m = X* X with rank(m) rows in X.

    Rows are ordered by descending eigenvalue and carry the deterministic
    phase convention, so repeated runs produce identical factors.
    """
    m = as_complex(m)
    cert = is_psd(m, psd_tol)
    if not cert.is_psd:
        raise NotPsd(f"min eigenvalue {cert.min_eigenvalue:.3e} below -{cert.tolerance_used:.3e}")
    n = m.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    w, v = np.linalg.eigh(hermitian_part(m))
    order = np.argsort(w)[::-1]
    w, v = w[order], v[:, order]
    keep = w > rank_tol * max(1.0, float(w[0])) if w.size else np.zeros(0, bool)
    w, v = w[keep], _fix_phases(v[:, keep])
    # m = sum_r w_r v_r v_r*  =>  X rows are sqrt(w_r) v_r*
    return (np.sqrt(np.clip(w, 0.0, None))[:, None]) * dagger(v)


def least_squares_solve(a, b):
    """Minimal-norm x for min ||a x - b||, plus the Frobenius residual.

    Uses the SVD pseudo-inverse with singular values below
    1e-12*sigma_max treated as zero.
    """
    a = as_complex(a)
    b = as_complex(b)
    b_mat = b if b.ndim == 2 else b[:, None]
    if a.shape[0] != b_mat.shape[0]:
        raise ValueError(f"incompatible shapes {a.shape} and {b.shape}")
    if a.size == 0:
        x = np.zeros((a.shape[1], b_mat.shape[1]), dtype=complex)
        residual = float(np.linalg.norm(b_mat))
    else:
        x, _, _, _ = np.linalg.lstsq(a, b_mat, rcond=LSTSQ_CUTOFF)
        residual = float(np.linalg.norm(a @ x - b_mat))
    if b.ndim == 1:
        x = x[:, 0]
    return x, residual


def matrix_exp(m):
    """Matrix exponential (scaling-and-squaring, via scipy)."""
    m = as_complex(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] == 0:
        return m.copy()
    return scipy.linalg.expm(m)


def operator_norm(m):
    m = as_complex(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))
