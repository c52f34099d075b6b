#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kmlift/acceptance.hpp"
#include "kmlift/corpus.hpp"
#include "kmlift/errors.hpp"

namespace py = pybind11;
using namespace kmlift;

namespace {

// Python passes structured inputs as JSON text; outputs come back the same way.
Json parse(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
}

std::string lattice_info(const std::string& lattice_json) {
    const CorpusLattice cl = parse_lattice(parse(lattice_json));
    const GramLattice l = cl.lattice();
    const DiscriminantGroup disc(l);
    const Signature sig = l.signature();
    Json cosets = Json::array();
    for (std::size_t i = 0; i < disc.order(); ++i)
        cosets.push_back({{"representative", vector_json(disc.representative(i))}, {"q", rational_json(disc.q_mod1(i))}});
    Json j = {{"rank", l.rank()},
              {"signature", {sig.p, sig.q}},
              {"determinant", l.determinant()},
              {"discriminant_order", disc.order()},
              {"elementary_divisors", disc.elementary_divisors()},
              {"cosets", cosets}};
    if (cl.has_split()) j["split_N"] = cl.split().N;
    return j.dump();
}

CMatrix weil(const std::string& lattice_json, const std::string& word) {
    return weil_matrix(weil_generators(parse_lattice(parse(lattice_json)).lattice()), parse_word(word));
}

std::string poly(const CountVector& counts, const std::string& mode, bool laplacian) {
    const HalfPowerPoly p = km_poly(counts, mode == "Q" ? KMMode::Q : KMMode::P);
    return laplacian ? exp_laplacian(p).str() : p.str();
}

std::pair<std::vector<Complex>, double> theta(const std::string& lattice_json, Complex tau, const CountVector& counts,
                                              const std::string& frame_json, double tail) {
    const CorpusLattice cl = parse_lattice(parse(lattice_json));
    const GramLattice l = cl.lattice();
    Frame<double> frame;
    if (cl.has_split())
        frame = parse_frame(frame_json.empty() ? Json{{"base", true}} : parse(frame_json), cl.split()).frame;
    else
        frame = parse_plain_frame(frame_json.empty() ? Json{{"base", true}} : parse(frame_json), l);
    HalfPowerPoly P = HalfPowerPoly::constant(l.rank(), HalfPower(1));
    int m_plus = 0;
    if (!counts.empty()) {
        P = km_poly(counts, KMMode::P, l.rank());
        for (int c : counts) m_plus += c;
    }
    const ThetaGeometry geom = lattice_geometry(l, frame);
    ThetaOptions opt;
    opt.tail_target = tail;
    const std::vector<double> zero(l.rank(), 0.0);
    const ThetaValue v = siegel_theta(geom, DiscriminantGroup(l), tau, zero, zero, theta_poly(P, geom, m_plus, 0), opt);
    return {v.components, v.tail_bound};
}

LiftRequest request(const std::string& lattice_json, const std::string& form_json, const CountVector& alpha,
                    const std::string& frame_json, int ell) {
    LiftRequest req;
    req.sd = parse_lattice(parse(lattice_json)).split();
    req.f = parse_cusp_form(parse(form_json), DiscriminantGroup(req.sd.lattice));
    req.alpha = alpha;
    req.ell = ell;
    req.frame = parse_frame(frame_json.empty() ? Json{{"base", true}} : parse(frame_json), req.sd);
    req.validate();
    return req;
}

std::string fourier(const std::string& lattice_json, const std::string& form_json, const CountVector& alpha,
                    const std::vector<std::string>& lam, const std::string& frame_json, const std::string& method,
                    int ell) {
    LatticeVector v;
    for (const auto& x : lam) v.push_back(parse_rational(x));
    const FourierResult r =
        fourier_coefficient(request(lattice_json, form_json, alpha, frame_json, ell), v, parse_method(method));
    return Json{{"value", complex_json(r.value)},
                {"phase", complex_json(r.phase)},
                {"negative_norm", r.negative_norm}}
        .dump();
}

std::string strip(const std::string& lattice_json, const std::string& form_json, const CountVector& alpha,
                  const std::vector<std::string>& lam, const std::string& frame_json, const std::string& method,
                  int ell) {
    LatticeVector v;
    for (const auto& x : lam) v.push_back(parse_rational(x));
    const StripCheck r =
        strip_integral_check(request(lattice_json, form_json, alpha, frame_json, ell), v, parse_method(method));
    return Json{{"series_value", complex_json(r.series_value)},
                {"quadrature_value", complex_json(r.quadrature_value)},
                {"residual", r.residual},
                {"quadrature_error", r.quadrature_error}}
        .dump();
}

std::string synthetic_form(const std::string& lattice_json, const std::string& weight, int n_max, unsigned seed) {
    const GramLattice l = parse_lattice(parse(lattice_json)).lattice();
    return cusp_form_json(synthetic_cusp_form(l, parse_rational(weight), n_max, seed), DiscriminantGroup(l))
        .dump();
}

std::string tables(const std::string& lattice_json, const std::string& form_json, const std::string& cutoff,
                   double radius, const std::string& method, int ell) {
    const SplitData sd = parse_lattice(parse(lattice_json)).split();
    const CuspFormData f = parse_cusp_form(parse(form_json), DiscriminantGroup(sd.lattice));
    return tables_json(gauge_tables(f, sd, parse_rational(cutoff), radius, parse_method(method), ell)).dump();
}

std::string eliminate(const std::string& lattice_json, const std::string& tables_text) {
    const SplitData sd = parse_lattice(parse(lattice_json)).split();
    const DiscriminantGroup disc(sd.lattice);
    const EliminationResult r = eliminate_coefficients(parse_tables(parse(tables_text)), sd);
    CuspFormData f;
    for (const auto& [key, c] : r.recovered) f.coeffs[key] = c;
    Json unresolved = Json::array();
    for (const auto& key : r.unresolved)
        unresolved.push_back({{"coset", vector_json(disc.representative(key.first))}, {"n", rational_json(key.second)}});
    return Json{{"recovered", cusp_form_json(f, disc).at("coeffs")}, {"unresolved", unresolved}, {"max_spread", r.max_spread}}
        .dump();
}

std::string verify(const std::string& corpus_dir, const std::vector<int>& criteria, double tol_scale) {
    RunConfig config = RunConfig::defaults();
    config.tol_scale = tol_scale;
    const auto reports = run_acceptance(load_corpus(corpus_dir), config, {criteria.begin(), criteria.end()});
    return report_json(reports).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Kudla-Millson lift numerics";
    py::register_exception<Error>(m, "KmliftError", PyExc_ValueError);
    m.def("lattice_info", &lattice_info, py::arg("lattice_json"));
    m.def("weil_matrix", &weil, py::arg("lattice_json"), py::arg("word"));
    m.def("km_poly", &poly, py::arg("counts"), py::arg("mode") = "P", py::arg("exp_laplacian") = false);
    m.def("siegel_theta", &theta, py::arg("lattice_json"), py::arg("tau"), py::arg("counts") = CountVector{},
          py::arg("frame_json") = "", py::arg("tail") = 1e-12);
    m.def("fourier_coefficient", &fourier, py::arg("lattice_json"), py::arg("form_json"), py::arg("alpha"),
          py::arg("lam"), py::arg("frame_json") = "", py::arg("method") = "bessel", py::arg("ell") = 0);
    m.def("strip_check", &strip, py::arg("lattice_json"), py::arg("form_json"), py::arg("alpha"), py::arg("lam"),
          py::arg("frame_json") = "", py::arg("method") = "bessel", py::arg("ell") = 0);
    m.def("synthetic_cusp_form", &synthetic_form, py::arg("lattice_json"), py::arg("weight"), py::arg("n_max"),
          py::arg("seed"));
    m.def("gauge_tables", &tables, py::arg("lattice_json"), py::arg("form_json"), py::arg("cutoff"),
          py::arg("radius"), py::arg("method") = "bessel", py::arg("ell") = 0);
    m.def("eliminate", &eliminate, py::arg("lattice_json"), py::arg("tables_json"));
    m.def("verify", &verify, py::arg("corpus_dir"), py::arg("criteria") = std::vector<int>{},
          py::arg("tol_scale") = 1.0);
}
