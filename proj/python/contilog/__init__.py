"""Python surface of the contilog toolkit.

The compiled module speaks JSON strings; this package turns structure
specs and results into plain dicts.
"""

import json as _json

try:
    from . import _contilog as _core
except ImportError:  # running against a build tree
    import _contilog as _core

__version__ = _core.__version__


def _spec(structure):
    if isinstance(structure, str):
        return structure
    return _json.dumps(structure)


def parse_print(structure, formula, cap="1"):
    """Canonical printed form of a parsed formula."""
    return _core.parse_print(_spec(structure), formula, cap)


def evaluate(structure, formula, assign=None, cap="1", tol=1e-9, seed=1):
    res = _json.loads(
        _core.eval_json(_spec(structure), formula, _json.dumps(assign or {}), cap, tol, seed)
    )
    return res


def value(structure, formula, **kw):
    """Evaluated value (the certified upper side) as a float."""
    return evaluate(structure, formula, **kw)["value"]["hi"]["approx"]


def derived_modulus(structure, formula):
    return _json.loads(_core.modulus_json(_spec(structure), formula))


def scheme_defect(structure, scheme, tol=1e-9, seed=1):
    return _json.loads(_core.scheme_json(_spec(structure), _json.dumps(scheme), tol, seed))


def ultra(sequence, formula, window=3, tol=1e-9, seed=1):
    return _json.loads(_core.ultra_json(_json.dumps(sequence), formula, window, tol, seed))


def automorphisms(structure, cap=5000):
    return _json.loads(_core.aut_json(_spec(structure), cap))


def tree_defect(structure):
    return _json.loads(_core.tree_defect_json(_spec(structure)))


def catreport(structure, rho, n=0, eps="0", tol=1e-9, seed=1):
    return _json.loads(_core.catreport_json(_spec(structure), rho, n, eps, tol, seed))


# structure spec helpers
def sym_hamming(n):
    return {"kind": "sym_hamming", "n": n}


def gn(n):
    return {"kind": "gn", "n": n}


def cyclic(n):
    return {"kind": "cyclic", "n": n}


def discrete(of):
    return {"kind": "discrete", "of": of}


def hilbert(field="real", dim=2, balls=1):
    return {"kind": "hilbert", "field": field, "dim": dim, "balls": balls}


def tree(edges, basepoint):
    return {"kind": "tree", "edges": edges, "basepoint": basepoint}


def zm_rotation(m, balls=1):
    return {"kind": "zm_rotation", "m": m, "balls": balls}
