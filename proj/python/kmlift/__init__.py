"""Python access to the kmlift C++ core.

Lattices, cusp forms and frames are plain dicts in the same layout as the JSON files the CLI reads.
"""

import json

import numpy as np

from . import _core
from ._core import KmliftError

__all__ = [
    "KmliftError",
    "lattice_info",
    "weil_matrix",
    "km_poly",
    "siegel_theta",
    "fourier_coefficient",
    "strip_check",
    "synthetic_cusp_form",
    "gauge_tables",
    "eliminate",
    "verify",
    "load",
]


def _dump(obj):
    return "" if obj is None else json.dumps(obj)


def _complex(pair):
    return complex(pair[0], pair[1])


def load(path):
    with open(path) as f:
        return json.load(f)


def lattice_info(lattice):
    return json.loads(_core.lattice_info(_dump(lattice)))


def weil_matrix(lattice, word):
    return np.asarray(_core.weil_matrix(_dump(lattice), word))


def km_poly(counts, mode="P", exp_laplacian=False):
    return _core.km_poly(list(counts), mode, exp_laplacian)


def siegel_theta(lattice, tau, counts=(), frame=None, tail=1e-12):
    values, tail_bound = _core.siegel_theta(_dump(lattice), complex(tau), list(counts), _dump(frame), tail)
    return np.asarray(values), tail_bound


def _lam(lam):
    return [str(x) for x in lam]


def fourier_coefficient(lattice, form, alpha, lam, frame=None, method="bessel", ell=0):
    r = json.loads(_core.fourier_coefficient(_dump(lattice), _dump(form), list(alpha), _lam(lam), _dump(frame), method, ell))
    return {"value": _complex(r["value"]), "phase": _complex(r["phase"]), "negative_norm": r["negative_norm"]}


def strip_check(lattice, form, alpha, lam, frame=None, method="bessel", ell=0):
    r = json.loads(_core.strip_check(_dump(lattice), _dump(form), list(alpha), _lam(lam), _dump(frame), method, ell))
    r["series_value"] = _complex(r["series_value"])
    r["quadrature_value"] = _complex(r["quadrature_value"])
    return r


def synthetic_cusp_form(lattice, weight, n_max, seed):
    return json.loads(_core.synthetic_cusp_form(_dump(lattice), str(weight), n_max, seed))


def gauge_tables(lattice, form, cutoff, radius, method="bessel", ell=0):
    return json.loads(_core.gauge_tables(_dump(lattice), _dump(form), str(cutoff), radius, method, ell))


def eliminate(lattice, tables):
    return json.loads(_core.eliminate(_dump(lattice), _dump(tables)))


def verify(corpus_dir, criteria=(), tol_scale=1.0):
    return json.loads(_core.verify(str(corpus_dir), list(criteria), tol_scale))
