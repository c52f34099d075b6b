import os
import pathlib

import numpy as np
import pytest

import kmlift

CORPUS = pathlib.Path(os.environ.get("KMLIFT_CORPUS", pathlib.Path(__file__).resolve().parents[2] / "corpus"))


def lattice(name):
    return kmlift.load(CORPUS / name)


def test_lattice_info_u():
    info = kmlift.lattice_info(lattice("u.json"))
    assert info["rank"] == 2
    assert info["signature"] == [1, 1]
    assert info["discriminant_order"] == 1


def test_weil_matrices_unitary():
    a2 = lattice("a2_u2.json")
    assert kmlift.lattice_info(a2)["discriminant_order"] == 12
    for word in ["S", "T", "ST"]:
        m = kmlift.weil_matrix(a2, word)
        assert np.allclose(m @ m.conj().T, np.eye(12), atol=1e-12)


def test_weil_a1_t_diagonal():
    t = kmlift.weil_matrix(lattice("a1.json"), "T")
    assert np.allclose(np.diag(t), [1, 1j], atol=1e-14)


def test_km_poly_strings():
    assert "x1" in kmlift.km_poly([1, 0])
    assert kmlift.km_poly([0, 0]) != kmlift.km_poly([2, 0], exp_laplacian=True)


def test_theta_components():
    values, tail = kmlift.siegel_theta(lattice("a1_u.json"), 0.3 + 1.1j, counts=[1, 0])
    assert values.shape == (2,)
    assert tail < 1e-10


def test_strip_and_fourier():
    lat = lattice("a1_u.json")
    form = kmlift.synthetic_cusp_form(lat, "3/2", 3, 5)
    r = kmlift.strip_check(lat, form, [1, 0], ["1/2"], frame={"random_eichler": {"seed": 4, "steps": 2}})
    assert abs(r["series_value"] - r["quadrature_value"]) < 1e-8
    c = kmlift.fourier_coefficient(lat, form, [0, 1], ["1/2"], method="quadrature")
    assert c["negative_norm"] is False


def test_round_trip():
    lat = lattice("u_a1_u.json")
    form = kmlift.synthetic_cusp_form(lat, "5/2", 3, 9)
    tables = kmlift.gauge_tables(lat, form, "3", 4.0)
    out = kmlift.eliminate(lat, tables)
    assert out["unresolved"] == []
    want = {(tuple(e["coset"]), e["n"]): complex(*e["c"]) for e in form["coeffs"]}
    got = {(tuple(e["coset"]), e["n"]): complex(*e["c"]) for e in out["recovered"]}
    assert len(got) == len(want)
    for key, c in got.items():
        assert abs(c - want.get(key, 0)) < 1e-8


def test_errors_raise():
    with pytest.raises(kmlift.KmliftError):
        kmlift.lattice_info({"gram": [[1]]})
    with pytest.raises(kmlift.KmliftError):
        kmlift.fourier_coefficient(lattice("a1.json"), {"weight": "1/2", "coeffs": []}, [0], [])


def test_verify_subset():
    report = kmlift.verify(CORPUS, criteria=[2, 7])
    assert report["pass"]
    assert [c["id"] for c in report["criteria"]] == [2, 7]
