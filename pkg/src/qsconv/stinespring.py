"""Generator-level stochastic Stinespring decomposition.

From a characterizing tuple on noise k0 build, on the enlarged noise
k = k0 + K,

  theta(a) = [ lambda(a) - t eps(a)   0            delta^dag(a)       ]
             [ 0                      -eps(a) I0   0                  ]
             [ delta(a)               0            rho(a) - eps(a) I1 ]

which satisfies the homomorphism structure relation, and the perturbation
matrix

  tau = [ t/2   <d|    0   ]
        [ 0     -I0    B   ]
        [ 0     D      -I1 ]

for any contraction B: K -> k0.  The perturbed generator

  psi(a) = eps(a)(tau* + tau + tau* QSproj tau) + (I + tau* QSproj) theta(a) (I + QSproj tau)

collapses to block-diag(phi(a), -eps(a) I_K), which is the generator-level
content of the stochastic Stinespring decomposition; the contraction B
cancels from the final result.
"""

from dataclasses import dataclass

import numpy as np

from . import numerics
from .dilation import homold_residual
from .errors import BNotContraction, DimensionMismatch, HomoldFailed
from .generator import GeneratorMap, NoiseSpace, assemble_from_tuple, validate_tuple
from .numerics import as_complex, dagger, is_psd, max_abs, operator_norm
from .report import Report


def build_theta(tup, h, tol=numerics.EQ_TOL):
    """The homomorphic generator on k0 + K used in the Stinespring construction."""
    validate_tuple(tup, h, tol)
    n, K, dk0 = h.dim, tup.K_dim, tup.dk
    eps = h.counit
    lam = tup.lam(h)
    delta = tup.delta(h)
    delta_dag = tup.delta_dag(h)
    hd = 1 + dk0 + K
    s0, s1 = slice(1, 1 + dk0), slice(1 + dk0, hd)
    blocks = np.zeros((n, hd, hd), dtype=complex)
    for i in range(n):
        blocks[i, 0, 0] = lam[i] - tup.t * eps[i]
        blocks[i, 0, s1] = delta_dag[i]
        blocks[i, s1, 0] = delta[i]
        blocks[i, s0, s0] = -eps[i] * np.eye(dk0)
        blocks[i, s1, s1] = tup.rho[i] - eps[i] * np.eye(K)
    theta = GeneratorMap(blocks, NoiseSpace(dk0 + K))
    res = homold_residual(theta, h)
    if res > tol:
        raise HomoldFailed(f"theta fails the structure relation (residual {res:.3e})")
    return theta


def build_tau(tup, B=None, tol=numerics.EQ_TOL):
    """The perturbation matrix; the (0, k0) slot carries <d|.

    B may be any contraction K -> k0 (defaults to 0); the final
    block-diagonal identity does not depend on it.
    """
    K, dk0 = tup.K_dim, tup.dk
    if B is None:
        B = np.zeros((dk0, K), dtype=complex)
    B = as_complex(B)
    if B.shape != (dk0, K):
        raise DimensionMismatch(f"B shape {B.shape}, expected {(dk0, K)}")
    if operator_norm(B) > 1.0 + tol:
        raise BNotContraction(f"||B|| = {operator_norm(B):.6f} > 1")
    hd = 1 + dk0 + K
    tau = np.zeros((hd, hd), dtype=complex)
    s0, s1 = slice(1, 1 + dk0), slice(1 + dk0, hd)
    tau[0, 0] = 0.5 * tup.t
    tau[0, s0] = np.conj(tup.d)
    tau[s0, s0] = -np.eye(dk0)
    tau[s0, s1] = B
    tau[s1, s0] = tup.D
    tau[s1, s1] = -np.eye(K)
    return tau


def contraction_combination(tau):
    """tau + tau* + tau* QSproj tau on the noise space tau lives on."""
    tau = as_complex(tau)
    qs = np.eye(tau.shape[0], dtype=complex)
    qs[0, 0] = 0.0
    return tau + dagger(tau) + dagger(tau) @ qs @ tau


def check_contraction_condition(tau, tol=numerics.PSD_TOL):
    """Certificate that -(tau + tau* + tau* QSproj tau) is PSD."""
    return is_psd(-numerics.hermitian_part(contraction_combination(tau)), tol)


def perturbed_generator(theta, tau, h):
    """psi(a) = eps(a)(tau* + tau + tau* QSproj tau) + (I + tau* QSproj) theta(a) (I + QSproj tau)."""
    tau = as_complex(tau)
    hd = theta.noise.hat_dim
    if tau.shape != (hd, hd):
        raise DimensionMismatch(f"tau shape {tau.shape}, generator hat dim {hd}")
    qs = theta.noise.qs_proj
    eye = np.eye(hd, dtype=complex)
    left = eye + dagger(tau) @ qs
    right = eye + qs @ tau
    comb = contraction_combination(tau)
    blocks = (np.einsum("ab,ibc,cd->iad", left, theta.blocks, right)
              + np.multiply.outer(h.counit, comb))
    return GeneratorMap(blocks, NoiseSpace(theta.dk))


def right_perturbed_generator(phi, tau, h):
    """psi(a) = eps(a) tau + phi(a)(I + QSproj tau)."""
    tau = as_complex(tau)
    hd = phi.noise.hat_dim
    if tau.shape != (hd, hd):
        raise DimensionMismatch(f"tau shape {tau.shape}, generator hat dim {hd}")
    qs = phi.noise.qs_proj
    right = np.eye(hd, dtype=complex) + qs @ tau
    blocks = np.einsum("iab,bc->iac", phi.blocks, right) + np.multiply.outer(h.counit, tau)
    return GeneratorMap(blocks, NoiseSpace(phi.dk))


def left_perturbed_generator(phi, tau, h):
    """psi(a) = eps(a) tau* + (I + tau* QSproj) phi(a)."""
    tau = as_complex(tau)
    hd = phi.noise.hat_dim
    if tau.shape != (hd, hd):
        raise DimensionMismatch(f"tau shape {tau.shape}, generator hat dim {hd}")
    qs = phi.noise.qs_proj
    left = np.eye(hd, dtype=complex) + dagger(tau) @ qs
    blocks = np.einsum("ab,ibc->iac", left, phi.blocks) + np.multiply.outer(h.counit, dagger(tau))
    return GeneratorMap(blocks, NoiseSpace(phi.dk))


@dataclass
class StinespringData:
    theta: GeneratorMap
    tau: np.ndarray
    B: np.ndarray
    psi: GeneratorMap
    report: Report


def displayed_combination(tup, B):
    """The closed form of tau + tau* + tau* QSproj tau: block-diag-with-border

        [[t, <d|, 0], [|d>, D*D - I0, 0], [0, 0, B*B - I1]].
    """
    K, dk0 = tup.K_dim, tup.dk
    hd = 1 + dk0 + K
    s0, s1 = slice(1, 1 + dk0), slice(1 + dk0, hd)
    out = np.zeros((hd, hd), dtype=complex)
    out[0, 0] = tup.t
    out[0, s0] = np.conj(tup.d)
    out[s0, 0] = tup.d
    out[s0, s0] = dagger(tup.D) @ tup.D - np.eye(dk0)
    out[s1, s1] = dagger(B) @ B - np.eye(K)
    return out


def verify_stinespring_identity(tup, B, h, tol=numerics.EQ_TOL):
    """Full pipeline: psi = perturb(theta, tau) must equal block-diag(phi, -eps I_K)."""
    theta = build_theta(tup, h, tol)
    tau = build_tau(tup, B, tol)
    if B is None:
        B = np.zeros((tup.dk, tup.K_dim), dtype=complex)
    psi = perturbed_generator(theta, tau, h)
    phi = assemble_from_tuple(tup, h, validate=False)

    n, dk0, K = h.dim, tup.dk, tup.K_dim
    hd = 1 + dk0 + K
    target = np.zeros((n, hd, hd), dtype=complex)
    target[:, :1 + dk0, :1 + dk0] = phi.blocks
    idx = np.arange(1 + dk0, hd)
    target[:, idx, idx] = -h.counit[:, None]

    rpt = Report(meta={"dk0": dk0, "K": K})
    rpt.add_residual("block_diagonal_identity", max_abs(psi.blocks - target), tol)
    cert = check_contraction_condition(tau)
    rpt.add_flag("contraction_condition", cert.is_psd,
                 max(0.0, -cert.min_eigenvalue), cert.tolerance_used)
    rpt.add_residual("combination_closed_form",
                     max_abs(contraction_combination(tau) - displayed_combination(tup, as_complex(B))),
                     1e-12)
    rpt.add_residual("theta_homomorphism_relation", homold_residual(theta, h), tol)
    return StinespringData(theta, tau, as_complex(B), psi, rpt)
