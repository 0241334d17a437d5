"""Embedded example set: algebras, generators and expectation specifications."""

import itertools

import numpy as np

from .algebra import function_algebra, group_algebra
from .expectation import BialgebraMorphism, GroupAction
from .generator import GeneratorTuple, assemble_from_tuple


def z2_table():
    return np.array([[0, 1], [1, 0]])


def z3_table():
    return np.array([[(i + j) % 3 for j in range(3)] for i in range(3)])


def s3_elements():
    """Permutations of {0,1,2} in lexicographic order; composition acts left-to-right as sigma(tau(x))."""
    return list(itertools.permutations(range(3)))


def s3_table():
    elems = s3_elements()
    index = {p: i for i, p in enumerate(elems)}
    table = np.zeros((6, 6), dtype=int)
    for i, p in enumerate(elems):
        for j, q in enumerate(elems):
            comp = tuple(p[q[x]] for x in range(3))
            table[i, j] = index[comp]
    return table


def s3_labels():
    names = {(0, 1, 2): "e", (1, 0, 2): "(12)", (2, 1, 0): "(13)",
             (0, 2, 1): "(23)", (1, 2, 0): "(123)", (2, 0, 1): "(132)"}
    return [names[p] for p in s3_elements()]


def cz2():
    """Function algebra C(Z2)."""
    return function_algebra(z2_table(), labels=["e", "u"])


def cs3():
    """Function algebra C(S3); non-cocommutative coproduct."""
    return function_algebra(s3_table(), labels=s3_labels())


def group_z3():
    """Group algebra C[Z3] with the left regular representation."""
    return group_algebra(z3_table(), labels=["e", "g", "g2"])


def poisson_tuple(c=0.5):
    """Poisson-type tuple on C(Z2): K = C, rho = evaluation at u, xi = sqrt(c), D = 1.

    Its generator has lambda(delta_e) = -c, lambda(delta_u) = c and is
    *-homomorphic (D unitary, d = 0, t = 0).
    """
    rho = np.zeros((2, 1, 1), dtype=complex)
    rho[1, 0, 0] = 1.0
    return GeneratorTuple(1, rho, np.array([[1.0 + 0j]]), np.array([np.sqrt(c) + 0j]),
                          np.zeros(1, dtype=complex), np.zeros(1, dtype=complex), 0.0)


def poisson_generator(c=0.5):
    return assemble_from_tuple(poisson_tuple(c), cz2())


def d_zero_tuple():
    """CPC tuple on C(Z2) with D = 0, e = d = 1, t = -2; strictly non-homomorphic."""
    rho = np.zeros((2, 1, 1), dtype=complex)
    rho[1, 0, 0] = 1.0
    return GeneratorTuple(1, rho, np.zeros((1, 1), dtype=complex), np.array([1.0 + 0j]),
                          np.array([1.0 + 0j]), np.array([1.0 + 0j]), -2.0)


def d_zero_generator():
    return assemble_from_tuple(d_zero_tuple(), cz2())


def s3_double_coset_spec():
    """C(S3) with the subgroup H = {e, (12)}: restriction morphism and uniform Haar state."""
    h1 = cs3()
    h2 = cz2()
    elems = s3_elements()
    h_sub = [(0, 1, 2), (1, 0, 2)]  # e and (12)
    pi = np.zeros((2, 6), dtype=complex)
    for j, p in enumerate(elems):
        if p in h_sub:
            pi[h_sub.index(p), j] = 1.0
    mu = np.full(2, 0.5, dtype=complex)
    return h1, h2, BialgebraMorphism(pi), mu


def z3_delsarte_spec():
    """C[Z3] with Z2 acting by group inversion b_g -> b_{g^-1}."""
    h = group_z3()
    inv = np.zeros((3, 3), dtype=complex)
    inv[0, 0] = inv[2, 1] = inv[1, 2] = 1.0
    autos = np.stack([np.eye(3, dtype=complex), inv])
    return h, GroupAction(z2_table(), autos)


FIXTURE_BUILDERS = {
    "cz2": ("function algebra C(Z2)", "algebra"),
    "cs3": ("function algebra C(S3)", "algebra"),
    "group_z3": ("group algebra C[Z3]", "algebra"),
    "poisson_generator": ("Poisson-type CPC generator on C(Z2), rate 0.5", "generator"),
    "d_zero_generator": ("D = 0 CPC generator on C(Z2)", "generator"),
    "s3_double_coset": ("S3 / {e,(12)} double-coset specification", "double_coset_spec"),
    "z3_delsarte": ("C[Z3] inversion Delsarte specification", "delsarte_spec"),
}


def fixtures():
    """Names and one-line descriptions of the embedded examples."""
    return {name: desc for name, (desc, _) in FIXTURE_BUILDERS.items()}


def fixture_json(name):
    """Materialize a fixture as its JSON document."""
    from . import serialize as sz

    if name == "cz2":
        return sz.algebra_to_json(cz2())
    if name == "cs3":
        return sz.algebra_to_json(cs3())
    if name == "group_z3":
        return sz.algebra_to_json(group_z3())
    if name == "poisson_generator":
        return sz.generator_to_json(poisson_generator())
    if name == "d_zero_generator":
        return sz.generator_to_json(d_zero_generator())
    if name == "s3_double_coset":
        h1, h2, pi, mu = s3_double_coset_spec()
        return {"algebra1": sz.algebra_to_json(h1), "algebra2": sz.algebra_to_json(h2),
                "morphism": sz.morphism_to_json(pi), "haar": sz.vector_to_json(mu)}
    if name == "z3_delsarte":
        h, action = z3_delsarte_spec()
        return {"algebra": sz.algebra_to_json(h), "action": sz.action_to_json(action)}
    raise KeyError(f"unknown fixture {name!r}")
