"""JSON schemas.  Complex scalars serialize as two-element arrays [re, im]."""

import numpy as np

from .algebra import Coalgebra, FiniteHyperbialgebra, FiniteStarAlgebra, Functional
from .expectation import BialgebraMorphism, ConditionalExpectation, GroupAction
from .generator import GeneratorMap, GeneratorTuple, NoiseSpace
from .dynamics import StepFunction
from .errors import DimensionMismatch
from .numerics import as_complex


def cplx(z):
    z = complex(z)
    return [z.real, z.imag]


def from_cplx(pair):
    return complex(pair[0], pair[1])


def vector_to_json(v):
    return [cplx(z) for z in np.atleast_1d(as_complex(v))]


def vector_from_json(data):
    return np.array([from_cplx(p) for p in data], dtype=complex)


def matrix_to_json(m):
    m = as_complex(m)
    return [[cplx(z) for z in row] for row in m]


def matrix_from_json(data):
    return np.array([[from_cplx(p) for p in row] for row in data], dtype=complex)


def _sparse3_to_json(tensor):
    out = []
    tensor = as_complex(tensor)
    for (i, j, k), z in np.ndenumerate(tensor):
        if z != 0:
            out.append([int(i), int(j), int(k), z.real, z.imag])
    return out


def _sparse3_from_json(entries, n):
    t = np.zeros((n, n, n), dtype=complex)
    for i, j, k, re, im in entries:
        t[int(i), int(j), int(k)] = complex(re, im)
    return t


def _sparse2_to_json(m):
    out = []
    m = as_complex(m)
    for (i, j), z in np.ndenumerate(m):
        if z != 0:
            out.append([int(i), int(j), z.real, z.imag])
    return out


def _sparse2_from_json(entries, n):
    m = np.zeros((n, n), dtype=complex)
    for i, j, re, im in entries:
        m[int(i), int(j)] = complex(re, im)
    return m


def algebra_to_json(h):
    return {
        "dim": h.dim,
        "labels": list(h.labels),
        "mult": _sparse3_to_json(h.mult),
        "star": _sparse2_to_json(h.star),
        "unit": vector_to_json(h.unit),
        "coproduct": _sparse3_to_json(h.coproduct),
        "counit": vector_to_json(h.counit),
        "rep": {"dim": h.algebra.rep_dim,
                "matrices": [matrix_to_json(m) for m in h.rep]},
        "multiplicative": bool(h.delta_multiplicative),
    }


def algebra_from_json(data):
    try:
        n = int(data["dim"])
        mult = _sparse3_from_json(data["mult"], n)
        star = _sparse2_from_json(data["star"], n)
        unit = vector_from_json(data["unit"])
        cop = _sparse3_from_json(data["coproduct"], n)
        counit = vector_from_json(data["counit"])
        rep = np.stack([matrix_from_json(m) for m in data["rep"]["matrices"]])
        labels = data.get("labels")
        flag = bool(data["multiplicative"])
    except (KeyError, ValueError, TypeError) as exc:
        raise DimensionMismatch(f"malformed algebra JSON: {exc}") from exc
    alg = FiniteStarAlgebra(mult, star, unit, rep, labels)
    return FiniteHyperbialgebra(alg, Coalgebra(cop, counit), flag)


def generator_to_json(phi):
    return {"dk": phi.dk, "blocks": [matrix_to_json(b) for b in phi.blocks]}


def generator_from_json(data):
    try:
        dk = int(data["dk"])
        blocks = np.stack([matrix_from_json(b) for b in data["blocks"]])
    except (KeyError, ValueError, TypeError) as exc:
        raise DimensionMismatch(f"malformed generator JSON: {exc}") from exc
    return GeneratorMap(blocks, NoiseSpace(dk))


def tuple_to_json(tup):
    return {
        "K_dim": tup.K_dim,
        "rho": [matrix_to_json(m) for m in tup.rho],
        "D": matrix_to_json(tup.D),
        "xi": vector_to_json(tup.xi),
        "d": vector_to_json(tup.d),
        "e": vector_to_json(tup.e),
        "t": tup.t,
    }


def tuple_from_json(data):
    k = int(data["K_dim"])
    rho = np.stack([matrix_from_json(m) for m in data["rho"]]) if data["rho"] else \
        np.zeros((0, k, k), dtype=complex)
    if rho.size == 0:
        rho = rho.reshape(len(data["rho"]), k, k)
    return GeneratorTuple(
        k, rho, matrix_from_json(data["D"]), vector_from_json(data["xi"]),
        vector_from_json(data["d"]), vector_from_json(data["e"]), float(data["t"]))


def functional_to_json(f):
    return vector_to_json(f.coeffs)


def functional_from_json(data):
    return Functional(vector_from_json(data))


def expectation_to_json(p):
    return {"matrix": matrix_to_json(p.matrix),
            "range_basis": matrix_to_json(p.range_basis)}


def expectation_from_json(data):
    return ConditionalExpectation(matrix_from_json(data["matrix"]),
                                  matrix_from_json(data["range_basis"]))


def morphism_to_json(pi):
    return {"matrix": matrix_to_json(pi.matrix)}


def morphism_from_json(data):
    return BialgebraMorphism(matrix_from_json(data["matrix"]))


def action_to_json(action):
    return {"group_table": [[int(x) for x in row] for row in action.group_table],
            "automorphisms": [matrix_to_json(m) for m in action.automorphisms]}


def action_from_json(data):
    return GroupAction(np.asarray(data["group_table"], dtype=int),
                       np.stack([matrix_from_json(m) for m in data["automorphisms"]]))


def stepfunction_to_json(f):
    return {"segments": [{"t0": s.t0, "t1": s.t1, "value": vector_to_json(s.vector())}
                         for s in f.segments]}


def stepfunction_from_json(data, dk=None):
    try:
        segs = [(s["t0"], s["t1"], vector_from_json(s["value"]))
                for s in data["segments"]]
    except (KeyError, TypeError) as exc:
        raise DimensionMismatch(f"malformed step function JSON: {exc}") from exc
    if not segs and dk is None:
        raise DimensionMismatch("empty step function needs an explicit dimension")
    return StepFunction(segs, dk=dk)


def trajectory_to_json(traj):
    return {"times": [float(t) for t in traj.times],
            "functionals": [functional_to_json(f) for f in traj.functionals]}
