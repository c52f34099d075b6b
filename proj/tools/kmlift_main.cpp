#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "kmlift/acceptance.hpp"
#include "kmlift/corpus.hpp"
#include "kmlift/decompose.hpp"
#include "kmlift/errors.hpp"

using namespace kmlift;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Complex parse_tau(const std::string& text) {
    // a+bi, a-bi, bi, a
    static const std::regex full(R"(^\s*([-+]?[0-9.eE]+)?\s*(?:([-+])\s*([0-9.eE]*)\s*i)?\s*$)");
    static const std::regex pure(R"(^\s*([-+]?[0-9.eE]*)\s*i\s*$)");
    std::smatch m;
    try {
        if (std::regex_match(text, m, pure)) {
            const std::string b = m[1].str();
            return {0, b.empty() || b == "+" ? 1.0 : b == "-" ? -1.0 : std::stod(b)};
        }
        if (std::regex_match(text, m, full) && (m[1].matched || m[2].matched)) {
            const double re = m[1].matched ? std::stod(m[1].str()) : 0;
            double im = 0;
            if (m[2].matched) {
                im = m[3].str().empty() ? 1.0 : std::stod(m[3].str());
                if (m[2].str() == "-") im = -im;
            }
            return {re, im};
        }
    } catch (const std::exception&) {
    }
    throw UsageError("cannot parse complex number '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream s(text);
    std::string item;
    while (std::getline(s, item, ',')) out.push_back(item);
    return out;
}

CountVector parse_counts(const std::string& text) {
    CountVector c;
    for (const auto& x : split_list(text)) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(x, &used);
            if (used != x.size() || v < 0) throw std::invalid_argument(x);
            c.push_back(v);
        } catch (const std::exception&) {
            throw UsageError("count vector entries must be nonnegative integers: '" + text + "'");
        }
    }
    if (c.empty()) throw UsageError("empty count vector");
    return c;
}

LatticeVector parse_vector(const std::string& text) {
    LatticeVector v;
    for (const auto& x : split_list(text)) v.push_back(parse_rational(x));
    return v;
}

Json residual_block(const std::map<std::string, double>& values) {
    Json r = Json::object();
    for (const auto& [k, v] : values) r[k] = v;
    return r;
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

double scaled_tolerance(double tol) {
    RunConfig c = RunConfig::defaults();
    apply_environment(c);
    return tol * c.tol_scale;
}

SplitFrame<double> frame_from_option(const std::string& path, const SplitData& sd) {
    if (path.empty()) return parse_frame(Json{{"base", true}}, sd);
    return parse_frame(load_json(path), sd);
}

// lattice info
int cmd_lattice(const std::string& file, bool json) {
    const CorpusLattice cl = load_lattice(file);
    const GramLattice l = cl.lattice();
    const DiscriminantGroup disc(l);
    const Signature sig = l.signature();
    std::string structure;
    for (Int d : disc.elementary_divisors())
        if (d > 1) structure += (structure.empty() ? "" : " x ") + std::string("Z/") + std::to_string(d);
    if (json) {
        Json j = {{"name", cl.name},
                  {"rank", l.rank()},
                  {"signature", {sig.p, sig.q}},
                  {"determinant", l.determinant()},
                  {"discriminant", {{"order", disc.order()}, {"structure", structure.empty() ? "trivial" : structure}}}};
        if (cl.has_split()) {
            const SplitData sd = cl.split();
            j["split"] = {{"N", sd.N}, {"K_gram", sd.K.gram()}, {"K_discriminant_order", DiscriminantGroup(sd.K).order()}};
        }
        emit(j);
        return kExitOk;
    }
    std::cout << "name " << cl.name << "\n";
    std::cout << "rank " << l.rank() << "\n";
    std::cout << "signature (" << sig.p << "," << sig.q << ")\n";
    if (structure.empty())
        std::cout << "discriminant trivial\n";
    else
        std::cout << "discriminant " << structure << " (order " << disc.order() << ")\n";
    if (cl.has_split()) {
        const SplitData sd = cl.split();
        std::cout << "split N " << sd.N << ", K rank " << sd.K.rank() << ", |K'/K| " << DiscriminantGroup(sd.K).order()
                  << "\n";
    }
    return kExitOk;
}

Json matrix_json(const CMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_json(m(i, k)));
        rows.push_back(row);
    }
    return rows;
}

int cmd_weil(const std::string& file, const std::string& word, bool csv) {
    const WeilRep rep = weil_generators(load_lattice(file).lattice());
    const auto n = static_cast<Eigen::Index>(rep.disc.order());
    const CMatrix id = CMatrix::Identity(n, n);
    const CMatrix m = weil_matrix(rep, parse_word(word));
    const double unitary = (m * m.adjoint() - id).cwiseAbs().maxCoeff();
    const double braid =
        (weil_matrix(rep, parse_word("STSTST")) - weil_matrix(rep, parse_word("SS"))).cwiseAbs().maxCoeff();
    if (csv) {
        std::cout << "row,col,re,im\n";
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index k = 0; k < m.cols(); ++k)
                std::cout << i << ',' << k << ',' << m(i, k).real() << ',' << m(i, k).imag() << '\n';
        return kExitOk;
    }
    Json cosets = Json::array();
    for (std::size_t i = 0; i < rep.disc.order(); ++i)
        cosets.push_back({{"representative", vector_json(rep.disc.representative(i))},
                          {"q", rational_json(rep.disc.q_mod1(i))}});
    emit({{"order", rep.disc.order()},
          {"cosets", cosets},
          {"word", word},
          {"matrix", matrix_json(m)},
          {"residuals", residual_block({{"unitarity", unitary}, {"braid", braid}})}});
    return kExitOk;
}

int cmd_poly(const std::string& counts, const std::string& mode, const std::string& lattice_file,
             const std::string& frame_file, bool laplacian) {
    const CountVector c = parse_counts(counts);
    if (mode != "P" && mode != "Q") throw UsageError("--mode must be P or Q");
    const KMMode m = mode == "P" ? KMMode::P : KMMode::Q;
    if (lattice_file.empty()) {
        const HalfPowerPoly poly = km_poly(c, m);
        Json j = {{"count", c}, {"mode", mode}, {"poly", poly.str()}};
        if (laplacian) j["exp_laplacian"] = exp_laplacian(poly).str();
        j["residuals"] = residual_block({{"scaling_identity_mismatch", km_scaling_identity(c) ? 0.0 : 1.0}});
        emit(j);
        return kExitOk;
    }
    const SplitData sd = load_lattice(lattice_file).split();
    const SplitFrame<double> frame = frame_from_option(frame_file, sd);
    const RealPoly P = to_real(km_poly(c, m, sd.lattice.rank()));
    Json parts = Json::array();
    for (const auto& [h, poly] : u_decompose(P, frame, DecomposeMethod::ClosedForm))
        parts.push_back({{"h_plus", h.first}, {"h_minus", h.second}, {"poly", poly.str()}});
    emit({{"count", c}, {"mode", mode}, {"parts", parts}, {"residuals", Json::object()}});
    return kExitOk;
}

int cmd_theta(const std::string& file, const std::string& tau_text, const std::string& counts, double radius,
              double tail, const std::string& frame_file, bool csv) {
    if (radius < 0) throw UsageError("--radius must be nonnegative (0 selects it from --tail)");
    if (!(tail > 0)) throw UsageError("--tail must be positive");
    const Complex tau = parse_tau(tau_text);
    if (!(tau.imag() > 0)) throw UsageError("--tau must lie in the upper half-plane");
    const CorpusLattice cl = load_lattice(file);
    const GramLattice l = cl.lattice();
    const Signature sig = l.signature();
    Frame<double> frame;
    if (cl.has_split()) {
        frame = frame_from_option(frame_file, cl.split()).frame;
    } else {
        frame = parse_plain_frame(frame_file.empty() ? Json{{"base", true}} : load_json(frame_file), l);
    }
    HalfPowerPoly P = HalfPowerPoly::constant(l.rank(), HalfPower(1));
    int m_plus = 0;
    if (!counts.empty()) {
        const CountVector c = parse_counts(counts);
        if (static_cast<int>(c.size()) != sig.p) throw UsageError("--poly-count needs p entries");
        P = km_poly(c, KMMode::P, l.rank());
        m_plus = std::accumulate(c.begin(), c.end(), 0);
    }
    const ThetaGeometry geom = lattice_geometry(l, frame);
    const DiscriminantGroup disc(l);
    const ThetaPoly tp = theta_poly(P, geom, m_plus, 0);
    ThetaOptions opt;
    opt.radius = radius;
    opt.tail_target = tail;
    const std::vector<double> zero(l.rank(), 0.0);
    const ThetaValue v = siegel_theta(geom, disc, tau, zero, zero, tp, opt);
    if (csv) {
        std::cout << "coset,re,im\n";
        for (std::size_t i = 0; i < v.components.size(); ++i)
            std::cout << i << ',' << v.components[i].real() << ',' << v.components[i].imag() << '\n';
        return kExitOk;
    }
    const WeilRep rep = weil_generators(l);
    Json comps = Json::array();
    for (std::size_t i = 0; i < v.components.size(); ++i)
        comps.push_back({{"coset", vector_json(disc.representative(i))}, {"value", complex_json(v.components[i])}});
    emit({{"lattice", cl.name},
          {"tau", complex_json(tau)},
          {"terms", v.terms},
          {"components", comps},
          {"residuals", residual_block({{"tail_bound", v.tail_bound},
                                        {"T_defect", modularity_defect(geom, rep, tp, Generator::T, tau, tail).defect},
                                        {"S_defect", modularity_defect(geom, rep, tp, Generator::S, tau, tail).defect}})}});
    return kExitOk;
}

struct LiftArgs {
    std::string lattice, cusp_form, alpha, frame, lambda, method = "bessel", tables, out;
    int ell = 0;
    std::string cutoff = "3";
    double radius = 4;
    double tol = 1e-6;
};

LiftRequest lift_request(const LiftArgs& a, SplitData& sd) {
    if (a.lattice.empty() || a.cusp_form.empty() || a.alpha.empty())
        throw UsageError("--lattice, --cusp-form and --alpha are required");
    sd = load_lattice(a.lattice).split();
    LiftRequest req;
    req.sd = sd;
    req.f = parse_cusp_form(load_json(a.cusp_form), DiscriminantGroup(sd.lattice));
    req.alpha = parse_counts(a.alpha);
    req.ell = a.ell;
    req.frame = frame_from_option(a.frame, sd);
    req.validate();
    return req;
}

int cmd_lift_fourier(const LiftArgs& a, bool csv) {
    SplitData sd;
    const LiftRequest req = lift_request(a, sd);
    if (a.lambda.empty()) throw UsageError("--lambda is required");
    const FourierResult r = fourier_coefficient(req, parse_vector(a.lambda), parse_method(a.method));
    Complex sum = 0;
    for (const auto& p : r.pieces) sum += p.value;
    if (csv) {
        std::cout << "t,h_plus,re,im\n";
        for (const auto& p : r.pieces) std::cout << p.t << ',' << p.h << ',' << p.value.real() << ',' << p.value.imag() << '\n';
        return kExitOk;
    }
    Json pieces = Json::array();
    for (const auto& p : r.pieces) pieces.push_back({{"t", p.t}, {"h_plus", p.h}, {"value", complex_json(p.value)}});
    emit({{"lambda", vector_json(r.lam)},
          {"method", method_name(r.method)},
          {"value", complex_json(r.value)},
          {"phase", complex_json(r.phase)},
          {"term", complex_json(r.value * r.phase)},
          {"negative_norm", r.negative_norm},
          {"pieces", pieces},
          {"residuals", residual_block({{"pieces_sum", std::abs(sum - r.value)}})}});
    return kExitOk;
}

int cmd_lift_strip(const LiftArgs& a, bool csv) {
    SplitData sd;
    const LiftRequest req = lift_request(a, sd);
    if (a.lambda.empty()) throw UsageError("--lambda is required");
    const StripCheck r = strip_integral_check(req, parse_vector(a.lambda), parse_method(a.method));
    const double tol = scaled_tolerance(a.tol);
    const double rel = r.residual / std::max(1.0, std::abs(r.series_value));
    if (csv) {
        std::cout << "series_re,series_im,quadrature_re,quadrature_im,residual,tolerance\n"
                  << r.series_value.real() << ',' << r.series_value.imag() << ',' << r.quadrature_value.real() << ','
                  << r.quadrature_value.imag() << ',' << rel << ',' << tol << '\n';
    } else {
        emit({{"series_value", complex_json(r.series_value)},
              {"quadrature_value", complex_json(r.quadrature_value)},
              {"pass", rel <= tol},
              {"residuals", residual_block({{"strip", rel}, {"quadrature_error", r.quadrature_error}, {"tolerance", tol}})}});
    }
    return rel <= tol ? kExitOk : kExitCheckFailed;
}

int cmd_lift_tables(const LiftArgs& a) {
    if (a.lattice.empty() || a.cusp_form.empty()) throw UsageError("--lattice and --cusp-form are required");
    const SplitData sd = load_lattice(a.lattice).split();
    const CuspFormData f = parse_cusp_form(load_json(a.cusp_form), DiscriminantGroup(sd.lattice));
    const GaugeTables t = gauge_tables(f, sd, parse_rational(a.cutoff), a.radius, parse_method(a.method), a.ell);
    const Json j = tables_json(t);
    if (a.out.empty()) {
        emit(j);
    } else {
        std::ofstream(a.out) << j.dump(2) << "\n";
        std::cerr << "wrote " << t.entries.size() << " entries to " << a.out << "\n";
    }
    return kExitOk;
}

int cmd_lift_eliminate(const LiftArgs& a, bool csv) {
    if (a.lattice.empty() || a.tables.empty()) throw UsageError("--lattice and --tables are required");
    const SplitData sd = load_lattice(a.lattice).split();
    const DiscriminantGroup disc(sd.lattice);
    const EliminationResult r = eliminate_coefficients(parse_tables(load_json(a.tables)), sd);
    if (csv) {
        std::cout << "coset,n,re,im,status\n";
        for (const auto& [key, c] : r.recovered)
            std::cout << key.first << ',' << to_string(key.second) << ',' << c.real() << ',' << c.imag() << ",recovered\n";
        for (const auto& key : r.unresolved) std::cout << key.first << ',' << to_string(key.second) << ",,,unresolved\n";
        return kExitOk;
    }
    Json rec = Json::array(), unres = Json::array();
    for (const auto& [key, c] : r.recovered)
        rec.push_back({{"coset", vector_json(disc.representative(key.first))}, {"n", rational_json(key.second)}, {"c", complex_json(c)}});
    for (const auto& key : r.unresolved)
        unres.push_back({{"coset", vector_json(disc.representative(key.first))}, {"n", rational_json(key.second)}});
    emit({{"recovered", rec}, {"unresolved", unres}, {"residuals", residual_block({{"max_spread", r.max_spread}})}});
    return kExitOk;
}

int cmd_verify(const std::string& corpus_dir, const std::string& config_file, const std::string& criteria,
               const std::string& out, bool csv) {
    RunConfig config = config_file.empty() ? RunConfig::defaults() : parse_config(load_json(config_file));
    apply_environment(config);
    if (csv) config.format = "csv";
    if (!out.empty()) config.output = out;
    std::set<int> which;
    for (const auto& x : split_list(criteria)) {
        try {
            const int id = std::stoi(x);
            if (id < 1 || id > kCriteria) throw std::out_of_range(x);
            which.insert(id);
        } catch (const std::exception&) {
            throw UsageError("--criteria takes numbers 1.." + std::to_string(kCriteria));
        }
    }
    const auto corpus = load_corpus(corpus_dir);
    const auto reports = run_acceptance(corpus, config, which);
    const std::string text = config.format == "csv" ? report_csv(reports) : report_json(reports).dump(2) + "\n";
    if (config.output.empty())
        std::cout << text;
    else
        std::ofstream(config.output) << text;
    bool all = true;
    for (const auto& r : reports) {
        std::cerr << (r.pass() ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.title << "): "
                  << r.records.size() << " checks, " << r.seconds << " s of " << r.time_limit << " s";
        if (!r.error.empty()) std::cerr << ", error: " << r.error;
        std::cerr << "\n";
        all = all && r.pass();
    }
    return all ? kExitOk : kExitCheckFailed;
}

bool is_usage_kind(ErrorKind k) {
    switch (k) {
        case ErrorKind::ParseError:
        case ErrorKind::IndexMismatch:
        case ErrorKind::WeightMismatch:
        case ErrorKind::DimensionMismatch:
        case ErrorKind::DegreeMismatch:
        case ErrorKind::BadSignature:
        case ErrorKind::ModeMismatch:
        case ErrorKind::NotNegativeDefinite:
        case ErrorKind::NotOrthogonalToU:
        case ErrorKind::NotIsotropic:
        case ErrorKind::NotEven:
        case ErrorKind::NotSymmetric:
        case ErrorKind::Degenerate:
            return true;
        default:
            return false;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kudla-Millson lift toolkit"};
    app.require_subcommand(1);
    bool json = false, csv = false;

    auto* lattice = app.add_subcommand("lattice", "lattice invariants");
    auto* info = lattice->add_subcommand("info", "rank, signature, discriminant group");
    std::string lattice_file;
    info->add_option("file", lattice_file, "lattice JSON")->required();
    info->add_flag("--json", json, "JSON output");
    lattice->require_subcommand(1);

    auto* weil = app.add_subcommand("weil", "Weil representation matrices");
    std::string word = "S";
    weil->add_option("--lattice", lattice_file, "lattice JSON")->required();
    weil->add_option("--word", word, "word in S, T, S', T^-1");
    weil->add_flag("--csv", csv, "flat table");

    auto* poly = app.add_subcommand("poly", "Kudla-Millson polynomials and u-decompositions");
    std::string counts, mode = "P", frame_file;
    bool laplacian = false;
    poly->add_option("--count", counts, "count vector, e.g. 1,0")->required();
    poly->add_option("--mode", mode, "P or Q");
    poly->add_option("--lattice", lattice_file, "decompose along u of this lattice");
    poly->add_option("--frame", frame_file, "frame JSON");
    poly->add_flag("--exp-laplacian", laplacian, "also print exp(-Delta/8 pi) P");

    auto* theta = app.add_subcommand("theta", "Siegel theta function");
    std::string tau_text;
    double radius = 0, tail = 1e-12;
    theta->add_option("--lattice", lattice_file, "lattice JSON")->required();
    theta->add_option("--tau", tau_text, "point in the upper half-plane, e.g. 0.3+1.1i")->required();
    theta->add_option("--poly-count", counts, "count vector of P_alpha; omitted means P = 1");
    theta->add_option("--radius", radius, "majorant cutoff, 0 = from --tail");
    theta->add_option("--tail", tail, "tail target");
    theta->add_option("--frame", frame_file, "frame JSON");
    theta->add_flag("--json", json, "JSON output (default)");
    theta->add_flag("--csv", csv, "flat table");

    auto* lift = app.add_subcommand("lift", "defining integrals of the lift");
    lift->require_subcommand(1);
    LiftArgs la;
    auto lift_common = [&](CLI::App* sub, bool needs_form) {
        sub->add_option("--lattice", la.lattice, "lattice JSON with u")->required();
        if (needs_form) sub->add_option("--cusp-form", la.cusp_form, "coefficient table JSON")->required();
        sub->add_option("--method", la.method, "bessel or quadrature");
        sub->add_option("--ell", la.ell, "twist degree");
        sub->add_flag("--csv", csv, "flat table");
    };
    auto* fourier = lift->add_subcommand("fourier", "Fourier coefficient c_lambda(g)");
    lift_common(fourier, true);
    fourier->add_option("--alpha", la.alpha, "count vector")->required();
    fourier->add_option("--frame", la.frame, "frame JSON");
    fourier->add_option("--lambda", la.lambda, "vector of K', K-coordinates")->required();
    auto* strip = lift->add_subcommand("verify-strip", "series against strip quadrature");
    lift_common(strip, true);
    strip->add_option("--alpha", la.alpha, "count vector")->required();
    strip->add_option("--frame", la.frame, "frame JSON");
    strip->add_option("--lambda", la.lambda, "vector of K', K-coordinates")->required();
    strip->add_option("--tol", la.tol, "tolerance on the relative residual");
    auto* tables = lift->add_subcommand("tables", "gauge tables for elimination");
    lift_common(tables, true);
    tables->add_option("--cutoff", la.cutoff, "norm cutoff");
    tables->add_option("--radius", la.radius, "majorant radius for lambda");
    tables->add_option("--out", la.out, "output file");
    auto* elim = lift->add_subcommand("eliminate", "recover coefficients from gauge tables");
    lift_common(elim, false);
    elim->add_option("--tables", la.tables, "tables JSON")->required();

    auto* verify = app.add_subcommand("verify", "acceptance suite over a corpus");
    std::string corpus_dir = "corpus", config_file, criteria, out;
    verify->add_option("--corpus", corpus_dir, "corpus directory");
    verify->add_option("--config", config_file, "run configuration JSON");
    verify->add_option("--criteria", criteria, "comma-separated criterion numbers");
    verify->add_option("--out", out, "report file");
    verify->add_flag("--csv", csv, "CSV report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*info) return cmd_lattice(lattice_file, json);
        if (*weil) return cmd_weil(lattice_file, word, csv);
        if (*poly) return cmd_poly(counts, mode, lattice_file, frame_file, laplacian);
        if (*theta) return cmd_theta(lattice_file, tau_text, counts, radius, tail, frame_file, csv);
        if (*fourier) return cmd_lift_fourier(la, csv);
        if (*strip) return cmd_lift_strip(la, csv);
        if (*tables) return cmd_lift_tables(la);
        if (*elim) return cmd_lift_eliminate(la, csv);
        if (*verify) return cmd_verify(corpus_dir, config_file, criteria, out, csv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_usage_kind(e.kind()) ? kExitUsage : kExitCheckFailed;
    }
    return kExitUsage;
}
