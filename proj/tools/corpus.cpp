#include "kmlift/corpus.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include "kmlift/errors.hpp"

namespace kmlift {

GramLattice CorpusLattice::lattice() const { return build_lattice(gram); }

SplitData CorpusLattice::split() const {
    if (!u) throw Error(ErrorKind::ParseError, "lattice '" + name + "' has no isotropic vector u");
    return split_data(lattice(), *u, u_prime);
}

Json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
    }
}

Rational json_rational(const Json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
    throw Error(ErrorKind::ParseError, "expected a rational as string or integer, got " + j.dump());
}

LatticeVector json_vector(const Json& j) {
    if (!j.is_array()) throw Error(ErrorKind::ParseError, "expected an array, got " + j.dump());
    LatticeVector v;
    for (const auto& x : j) v.push_back(json_rational(x));
    return v;
}

Json rational_json(const Rational& r) { return to_string(r); }

Json vector_json(const LatticeVector& v) {
    Json out = Json::array();
    for (const auto& x : v) out.push_back(rational_json(x));
    return out;
}

Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Complex json_complex(const Json& j) {
    if (j.is_number()) return {j.get<double>(), 0};
    if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::ParseError, "expected [re, im], got " + j.dump());
    return {j[0].get<double>(), j[1].get<double>()};
}

CorpusLattice parse_lattice(const Json& j, const std::string& file) {
    try {
        CorpusLattice out;
        out.file = file;
        out.name = j.value("name", std::filesystem::path(file).stem().string());
        out.gram = j.at("gram").get<IntMatrix>();
        if (j.contains("u")) out.u = json_vector(j.at("u"));
        if (j.contains("u_prime")) out.u_prime = json_vector(j.at("u_prime"));
        build_lattice(out.gram);
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, (file.empty() ? std::string("lattice") : file) + ": " + e.what());
    }
}

CorpusLattice load_lattice(const std::filesystem::path& path) { return parse_lattice(load_json(path), path.string()); }

std::vector<CorpusLattice> load_corpus(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw Error(ErrorKind::ParseError, dir.string() + " is not a directory");
    std::vector<CorpusLattice> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        const Json j = load_json(entry.path());
        if (j.is_object() && j.contains("gram")) out.push_back(parse_lattice(j, entry.path().string()));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

const CorpusLattice& find_lattice(const std::vector<CorpusLattice>& corpus, const std::string& name) {
    for (const auto& c : corpus)
        if (c.name == name) return c;
    throw Error(ErrorKind::ParseError, "corpus has no lattice named '" + name + "'");
}

CuspFormData parse_cusp_form(const Json& j, const DiscriminantGroup& disc) {
    try {
        CuspFormData f;
        f.weight = json_rational(j.at("weight"));
        for (const auto& entry : j.at("coeffs")) {
            const Json& coset = entry.at("coset");
            const std::size_t idx = coset.is_array() ? disc.index_of(json_vector(coset)) : coset.get<std::size_t>();
            if (idx >= disc.order()) throw Error(ErrorKind::IndexMismatch, "coset index out of range");
            const Rational n = json_rational(entry.at("n"));
            f.coeffs[{idx, n}] += json_complex(entry.at("c"));
            f.n_max = std::max(f.n_max, n);
        }
        f.validate(disc);
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("cusp form: ") + e.what());
    }
}

Json cusp_form_json(const CuspFormData& f, const DiscriminantGroup& disc) {
    Json coeffs = Json::array();
    for (const auto& [key, c] : f.coeffs)
        coeffs.push_back({{"coset", vector_json(disc.representative(key.first))},
                          {"n", rational_json(key.second)},
                          {"c", complex_json(c)}});
    return {{"weight", rational_json(f.weight)}, {"coeffs", coeffs}};
}

GrassPoint parse_grass_point(const Json& j, const GramLattice& lattice) {
    const std::size_t n = lattice.rank();
    const Json& vecs = j.at("z");
    if (!vecs.is_array()) throw Error(ErrorKind::ParseError, "z must be a list of vectors");
    Matrix<double> basis(n, vecs.size());
    for (std::size_t k = 0; k < vecs.size(); ++k) {
        const Json& v = vecs[k];
        if (!v.is_array() || v.size() != n) throw Error(ErrorKind::DimensionMismatch, "z vector has the wrong length");
        for (std::size_t i = 0; i < n; ++i)
            basis(i, k) = v[i].is_number() ? v[i].get<double>() : to_double(json_rational(v[i]));
    }
    return grass_point(lattice, basis);
}

Frame<double> parse_plain_frame(const Json& j, const GramLattice& lattice) {
    try {
        const auto base = make_base_frame<double>(lattice, nullptr);
        if (j.contains("z")) return make_frame(lattice, base, isometry_to_base(lattice, base, parse_grass_point(j, lattice)));
        if (!j.value("base", false)) throw Error(ErrorKind::ParseError, "frame needs base or z for a lattice without u");
        return make_frame(lattice, base, Isometry<double>{Matrix<double>::identity(lattice.rank())});
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("frame: ") + e.what());
    }
}

SplitFrame<double> parse_frame(const Json& j, const SplitData& sd) {
    const int n = sd.lattice.rank();
    try {
        if (j.contains("z")) return split_frame(sd, parse_grass_point(j, sd.lattice));
        if (j.contains("gauge")) return gauge_frame(sd, j.at("gauge").get<int>());
        Isometry<Rational> g{Matrix<Rational>::identity(n)};
        if (j.contains("eichler")) {
            std::vector<EichlerStep> steps;
            for (const auto& s : j.at("eichler"))
                steps.push_back({s.value("along_u_double_prime", false), json_vector(s.at("lambda"))});
            g = eichler_word(sd, steps);
        } else if (j.contains("random_eichler")) {
            std::mt19937_64 rng(j.at("random_eichler").value("seed", 1u));
            g = random_eichler_isometry(sd, rng, j.at("random_eichler").value("steps", 2));
        } else if (!j.value("base", false)) {
            throw Error(ErrorKind::ParseError, "frame needs one of base, gauge, eichler, random_eichler");
        }
        const auto base = make_base_frame<double>(sd.lattice, &sd);
        return make_split_frame<double>(sd, base, convert_isometry<double>(g));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("frame: ") + e.what());
    }
}

Json tables_json(const GaugeTables& tables) {
    Json entries = Json::array();
    for (const auto& e : tables.entries)
        entries.push_back({{"alpha1", e.alpha1}, {"lambda", vector_json(e.lam)}, {"value", complex_json(e.value)}});
    return {{"ell", tables.ell}, {"norm_cutoff", rational_json(tables.norm_cutoff)}, {"entries", entries}};
}

GaugeTables parse_tables(const Json& j) {
    try {
        GaugeTables t;
        t.ell = j.value("ell", 0);
        t.norm_cutoff = json_rational(j.at("norm_cutoff"));
        for (const auto& e : j.at("entries"))
            t.entries.push_back({e.at("alpha1").get<int>(), json_vector(e.at("lambda")), json_complex(e.at("value"))});
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("tables: ") + e.what());
    }
}

RunConfig RunConfig::defaults() {
    RunConfig c;
    c.tolerances = {
        {"weil.unitarity", 1e-12},   {"weil.braid", 1e-12},        {"theta.oracle_slack", 1e-12},
        {"theta.T", 1e-8},           {"theta.S", 1e-6},            {"split.difference", 1e-4},
        {"strip.residual", 1e-6},    {"y_integral.agreement", 1e-9}, {"y_integral.k0", 1e-10},
        {"elimination.error", 1e-8}, {"elimination.linearity", 1e-10}, {"eichler.properties", 1e-10},
        {"eichler.phase_law", 1e-8}, {"p1.vanishing", 1e-10},
    };
    return c;
}

double RunConfig::tolerance(const std::string& check) const {
    const auto it = tolerances.find(check);
    if (it == tolerances.end()) throw Error(ErrorKind::ParseError, "no tolerance configured for '" + check + "'");
    return it->second * tol_scale;
}

void RunConfig::validate() const {
    for (const auto& [name, tol] : tolerances)
        if (!(tol > 0)) throw Error(ErrorKind::ParseError, "tolerance '" + name + "' must be positive");
    if (!(tol_scale > 0)) throw Error(ErrorKind::ParseError, "tolerance scale must be positive");
    if (coset_cutoff < 1) throw Error(ErrorKind::ParseError, "coset cutoff must be at least 1");
    if (!(theta_tail > 0) || !(y_max > 1)) throw Error(ErrorKind::ParseError, "bad truncation defaults");
    if (format != "json" && format != "csv") throw Error(ErrorKind::ParseError, "format must be json or csv");
}

Json config_json(const RunConfig& c) {
    Json tol = Json::object();
    for (const auto& [k, v] : c.tolerances) tol[k] = v;
    return {{"tolerances", tol},   {"tol_scale", c.tol_scale}, {"coset_cutoff", c.coset_cutoff},
            {"theta_tail", c.theta_tail}, {"y_max", c.y_max},  {"corpus", c.corpus},
            {"output", c.output},  {"format", c.format}};
}

RunConfig parse_config(const Json& j) {
    RunConfig c = RunConfig::defaults();
    try {
        if (j.contains("tolerances"))
            for (const auto& [k, v] : j.at("tolerances").items()) c.tolerances[k] = v.get<double>();
        c.tol_scale = j.value("tol_scale", c.tol_scale);
        c.coset_cutoff = j.value("coset_cutoff", c.coset_cutoff);
        c.theta_tail = j.value("theta_tail", c.theta_tail);
        c.y_max = j.value("y_max", c.y_max);
        c.corpus = j.value("corpus", c.corpus);
        c.output = j.value("output", c.output);
        c.format = j.value("format", c.format);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

void apply_environment(RunConfig& config) {
    if (const char* s = std::getenv("KMLIFT_TOL_SCALE")) {
        char* end = nullptr;
        const double v = std::strtod(s, &end);
        if (end == s || *end != '\0' || !(v > 0))
            throw Error(ErrorKind::ParseError, "KMLIFT_TOL_SCALE must be a positive number");
        config.tol_scale = v;
    }
}

}  // namespace kmlift
