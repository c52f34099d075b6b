#include "kmlift/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "kmlift/decompose.hpp"
#include "kmlift/errors.hpp"

namespace kmlift {

namespace {

constexpr double kPi = std::numbers::pi;

struct Recorder {
    const RunConfig& config;
    std::vector<CheckRecord>& out;

    void add(const std::string& check, const std::string& lattice, const std::string& params, double value,
             double tolerance) {
        out.push_back({check, lattice, params, value, tolerance, value <= tolerance});
    }
    void tol(const std::string& check, const std::string& lattice, const std::string& params, double value) {
        add(check, lattice, params, value, config.tolerance(check));
    }
    /// Counts of mismatches in exact checks.
    void exact(const std::string& check, const std::string& lattice, const std::string& params, int mismatches) {
        add(check, lattice, params, mismatches, 0);
    }
};

std::string fmt(Complex z) {
    std::ostringstream s;
    s << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return s.str();
}

std::string vec_label(const LatticeVector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_string(v[i]);
    return s + ")";
}

std::vector<const CorpusLattice*> split_lattices(const std::vector<CorpusLattice>& corpus) {
    std::vector<const CorpusLattice*> out;
    for (const auto& c : corpus)
        if (c.has_split()) out.push_back(&c);
    return out;
}

Rational cusp_weight(const Signature& sig, int ell = 0) {
    Rational w(sig.p + sig.q, 2);
    w.canonicalize();
    return w + Rational(ell);
}

LiftRequest make_request(const SplitData& sd, const CuspFormData& f, const CountVector& alpha,
                         const SplitFrame<double>& frame) {
    LiftRequest req;
    req.f = f;
    req.alpha = alpha;
    req.sd = sd;
    req.frame = frame;
    return req;
}

SplitFrame<double> base_split_frame(const SplitData& sd) {
    const auto base = make_base_frame<double>(sd.lattice, &sd);
    return make_split_frame<double>(sd, base, Isometry<double>{Matrix<double>::identity(sd.lattice.rank())});
}

SplitFrame<double> eichler_split_frame(const SplitData& sd, unsigned seed, int steps) {
    std::mt19937_64 rng(seed);
    const auto base = make_base_frame<double>(sd.lattice, &sd);
    return make_split_frame<double>(sd, base, convert_isometry<double>(random_eichler_isometry(sd, rng, steps)));
}

// 1: exact identities
void exact_suite(const std::vector<CorpusLattice>& corpus, Recorder& rec) {
    const HalfPowerPoly x = HalfPowerPoly::variable(1, 0);
    int bad = 0;
    for (int n = 1; n <= 12; ++n) {
        if (!(hermite(n + 1) == x.scaled(HalfPower(2)) * hermite(n) - hermite(n - 1).scaled(HalfPower(2 * n)))) ++bad;
        if (!(hermite(n + 1) == x.scaled(HalfPower(2)) * hermite(n) - hermite(n).derivative(0))) ++bad;
    }
    rec.exact("hermite.recurrence", "-", "n<=12", bad);

    for (int p = 1; p <= 3; ++p) {
        int mismatches = 0, count = 0;
        for (int q = 0; q <= 4; ++q)
            for (const auto& c : count_vectors(p, q)) {
                ++count;
                if (!km_scaling_identity(c)) ++mismatches;
            }
        rec.exact("polynomial.scaling_identity", "-", "p=" + std::to_string(p) + " |alpha|<=4 (" +
                                                          std::to_string(count) + " vectors)",
                  mismatches);
    }

    std::mt19937_64 rng(2024);
    int frames = 0;
    for (const CorpusLattice* cl : split_lattices(corpus)) {
        const SplitData sd = cl->split();
        if (sd.N != 1 || sd.lattice.rank() < 3) continue;
        BaseFrame<QSqrt2> base;
        try {
            base = make_base_frame<QSqrt2>(sd.lattice, &sd);
        } catch (const Error&) {
            continue;
        }
        const int p = base.p, n = sd.lattice.rank();
        for (int trial = 0; trial < 6; ++trial, ++frames) {
            const auto g = convert_isometry<QSqrt2>(random_eichler_isometry(sd, rng, 2 + trial % 3));
            const auto sf = make_split_frame(sd, base, g);
            int mismatches = 0;
            for (int q = 1; q <= 2; ++q)
                for (const auto& c : count_vectors(p, q)) {
                    const auto P = km_poly(c, KMMode::P, n);
                    if (!(u_decompose(P, sf, DecomposeMethod::ClosedForm) == u_decompose(P, sf, DecomposeMethod::Oracle)))
                        ++mismatches;
                }
            rec.exact("decomposition.closed_form", cl->name, "frame " + std::to_string(trial), mismatches);
        }
    }
    rec.exact("decomposition.frame_count", "-", ">=20 rational frames", frames >= 20 ? 0 : 20 - frames);

    std::set<std::pair<int, int>> seen;
    for (const CorpusLattice* cl : split_lattices(corpus)) {
        const SplitData sd = cl->split();
        const Signature sig = sd.lattice.signature();
        if (sig.p <= 1 || sd.N != 1) continue;
        for (int a = 0; a <= sig.p - 2; ++a) {
            const GaugeReport g = gauge_isometry(sd, a);
            rec.exact("gauge.top_degree_only", cl->name,
                      "sig (" + std::to_string(sig.p) + "," + std::to_string(sig.q) + ") alpha1=" + std::to_string(a + 1),
                      g.ok() ? 0 : 1);
        }
        seen.insert({sig.p, sig.q});
    }
    int missing = 0;
    for (auto s : {std::pair{2, 1}, std::pair{3, 1}, std::pair{3, 2}}) missing += seen.count(s) ? 0 : 1;
    rec.exact("gauge.signature_coverage", "-", "(2,1) (3,1) (3,2)", missing);
}

// 2: Weil representation
void weil_suite(const std::vector<CorpusLattice>& corpus, Recorder& rec) {
    std::set<std::size_t> orders;
    for (const auto& cl : corpus) {
        const WeilRep rep = weil_generators(cl.lattice());
        const auto n = static_cast<Eigen::Index>(rep.disc.order());
        const CMatrix id = CMatrix::Identity(n, n);
        const double unitary = std::max((rep.rho_S * rep.rho_S.adjoint() - id).cwiseAbs().maxCoeff(),
                                        (rep.rho_T * rep.rho_T.adjoint() - id).cwiseAbs().maxCoeff());
        const std::string params = "|L'/L|=" + std::to_string(rep.disc.order());
        rec.tol("weil.unitarity", cl.name, params, unitary);
        const double braid =
            (weil_matrix(rep, parse_word("STSTST")) - weil_matrix(rep, parse_word("SS"))).cwiseAbs().maxCoeff();
        rec.tol("weil.braid", cl.name, params, braid);
        orders.insert(rep.disc.order());
    }
    int missing = 0;
    for (std::size_t o : {1, 2, 4, 8, 12}) missing += orders.count(o) ? 0 : 1;
    rec.exact("weil.order_coverage", "-", "{1,2,4,8,12}", missing);
}

// 3: Siegel theta
void theta_suite(const std::vector<CorpusLattice>& corpus, Recorder& rec) {
    const std::vector<Complex> taus = {Complex(0.3, 1.1), Complex(-0.2, 1.4)};
    for (const auto& cl : corpus) {
        const GramLattice l = cl.lattice();
        if (l.rank() < 2 || l.rank() > 4) continue;
        const Signature sig = l.signature();
        Frame<double> frame;
        if (cl.has_split()) {
            const SplitData sd = cl.split();
            frame = eichler_split_frame(sd, 7, 1).frame;
        } else {
            frame = make_frame(l, make_base_frame<double>(l, nullptr), Isometry<double>{Matrix<double>::identity(l.rank())});
        }
        const ThetaGeometry geom = lattice_geometry(l, frame);
        const DiscriminantGroup disc(l);
        const WeilRep rep = weil_generators(l);
        const HalfPowerPoly P = sig.q == 0 || sig.p == 0 ? HalfPowerPoly::constant(l.rank(), HalfPower(1))
                                                         : km_poly(count_vectors(sig.p, sig.q).front(), KMMode::P, l.rank());
        const int m_plus = sig.q == 0 || sig.p == 0 ? 0 : sig.q;
        const ThetaPoly tp = theta_poly(P, geom, m_plus, 0);
        const std::vector<double> zero(l.rank(), 0.0);

        ThetaOptions opt;
        opt.tail_target = 1e-10;
        const ThetaValue v = siegel_theta(geom, disc, taus[0], zero, zero, tp, opt);
        const auto oracle = theta_box_sum(l, frame, taus[0], zero, zero, P, 0);
        double diff = 0;
        for (std::size_t i = 0; i < oracle.size(); ++i) diff = std::max(diff, std::abs(v.components[i] - oracle[i]));
        rec.add("theta.oracle", cl.name, "tau=" + fmt(taus[0]), diff, v.tail_bound + rec.config.tolerance("theta.oracle_slack"));

        for (const Complex tau : taus) {
            rec.tol("theta.T", cl.name, "tau=" + fmt(tau), modularity_defect(geom, rep, tp, Generator::T, tau, 1e-10).defect);
            rec.tol("theta.S", cl.name, "tau=" + fmt(tau), modularity_defect(geom, rep, tp, Generator::S, tau, 1e-8).defect);
        }
    }
}

// 4: splitting along u
void splitting_suite(const std::vector<CorpusLattice>& corpus, Recorder& rec) {
    for (const std::string name : {"A1+U", "U+U"}) {
        const SplitData sd = find_lattice(corpus, name).split();
        const SplitFrame<double> frame = base_split_frame(sd);
        for (const Complex tau : {Complex(0, 3), Complex(0.2, 2.5)})
            for (const auto& alpha : count_vectors(frame.p, frame.q)) {
                SplitThetaOptions opt;
                opt.coset_cutoff = rec.config.coset_cutoff;
                opt.tail_target = rec.config.theta_tail;
                const auto sides = split_theta_sides(sd, frame, tau, alpha, opt);
                rec.tol("split.difference", name, "tau=" + fmt(tau) + " alpha=" + count_label(alpha), sides.difference());
            }
    }
}

// 5: unfolding
void unfolding_suite(const std::vector<CorpusLattice>& corpus, Recorder& rec) {
    const double k0 = 2 * std::cyl_bessel_k(0.0, 2.0);
    rec.tol("y_integral.k0", "-", "quadrature s=-1 A=B=1",
            std::abs(y_integral(-1, 1, 1, YIntegralMethod::Quadrature) - k0));
    rec.tol("y_integral.k0", "-", "bessel s=-1 A=B=1", std::abs(y_integral(-1, 1, 1, YIntegralMethod::Bessel) - k0));
    const double triples[][3] = {{-1, 1, 1},    {-0.5, 2, 0.3}, {0.5, 6.3, 0.8}, {2.5, 0.3, 4}, {-3, 1.5, 2},
                                 {1, 40, 0.05}, {-2.5, 0.2, 9}, {4, 12, 1.6},    {0, 0.7, 0.7}, {-1.5, 3, 0.01}};
    for (const auto& [s, A, B] : triples) {
        const double bessel = y_integral(s, A, B, YIntegralMethod::Bessel);
        const double quad = y_integral(s, A, B, YIntegralMethod::Quadrature);
        std::ostringstream p;
        p << "s=" << s << " A=" << A << " B=" << B;
        rec.tol("y_integral.agreement", "-", p.str(), std::abs(bessel - quad) / std::max(1.0, std::abs(bessel)));
    }

    const std::string name = "A1+U";
    const SplitData sd = find_lattice(corpus, name).split();
    const Signature sig = sd.lattice.signature();
    const auto f = synthetic_cusp_form(sd.lattice, cusp_weight(sig), 3, 5);
    const auto frame = eichler_split_frame(sd, 4, 2);
    int pairs = 0;
    for (const auto& alpha : count_vectors(sig.p, sig.q))
        for (const auto& lam : positive_vectors(sd, Rational(9, 4), 4)) {
            for (auto method : {YIntegralMethod::Bessel, YIntegralMethod::Quadrature}) {
                const auto chk = strip_integral_check(make_request(sd, f, alpha, frame), lam, method);
                rec.tol("strip.residual", name,
                        "alpha=" + count_label(alpha) + " lambda=" + vec_label(lam) + " " + method_name(method),
                        chk.residual / std::max(1.0, std::abs(chk.series_value)));
            }
            ++pairs;
        }
    rec.exact("strip.pair_count", name, ">=6 (alpha, lambda) pairs", pairs >= 6 ? 0 : 6 - pairs);
}

// 6: injectivity round trip
void round_trip_suite(const std::vector<CorpusLattice>& corpus, Recorder& rec) {
    const std::string name = "U+A1+U";
    const SplitData sd = find_lattice(corpus, name).split();
    const Rational cutoff(3);
    const double radius = 4;
    const auto f = synthetic_cusp_form(sd.lattice, cusp_weight(sd.lattice.signature()), 3, 5);
    const auto tables = gauge_tables(f, sd, cutoff, radius, YIntegralMethod::Bessel);
    const auto res = eliminate_coefficients(tables, sd);
    const DiscriminantGroup disc(sd.lattice);
    int missing = 0;
    for (const auto& [key, c] : f.coeffs) {
        const auto it = res.recovered.find(key);
        if (it == res.recovered.end()) {
            ++missing;
            continue;
        }
        rec.tol("elimination.error", name, "coset=" + vec_label(disc.representative(key.first)) + " n=" + to_string(key.second),
                std::abs(it->second - c));
    }
    rec.exact("elimination.unrecovered", name, "n<=3", missing + static_cast<int>(res.unresolved.size()));

    GaugeTables zero = tables;
    for (auto& e : zero.entries) e.value = 0;
    double zmax = 0;
    for (const auto& [key, c] : eliminate_coefficients(zero, sd).recovered) zmax = std::max(zmax, std::abs(c));
    rec.add("elimination.zero_tables", name, "all-zero input", zmax, 0);

    const auto doubled = eliminate_coefficients(gauge_tables(f.scaled(2), sd, cutoff, radius, YIntegralMethod::Bessel), sd);
    double lin = 0;
    for (const auto& [key, c] : res.recovered) lin = std::max(lin, std::abs(doubled.recovered.at(key) - 2.0 * c));
    rec.tol("elimination.linearity", name, "f -> 2f", lin);
}

// 7: geometry
void geometry_suite(const std::vector<CorpusLattice>& corpus, Recorder& rec) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> num(-3, 3), den(1, 3);
    int frames = 0;
    for (const CorpusLattice* cl : split_lattices(corpus)) {
        const SplitData sd = cl->split();
        if (sd.N != 1 || sd.lattice.signature().p < 2) continue;
        BaseFrame<QSqrt2> base;
        try {
            base = make_base_frame<QSqrt2>(sd.lattice, &sd);
        } catch (const Error&) {
            continue;
        }
        for (int trial = 0; trial < 5; ++trial, ++frames) {
            const auto g = convert_isometry<QSqrt2>(random_eichler_isometry(sd, rng, 3));
            LatticeVector lam;
            for (std::size_t i = 0; i < sd.k_basis.size(); ++i) {
                Rational r(num(rng), den(rng));
                r.canonicalize();
                lam.push_back(r);
            }
            rec.tol("eichler.properties", cl->name, "frame " + std::to_string(trial) + " lambda=" + vec_label(lam),
                    eichler_report(sd, base, g, lam).max());
        }
    }
    rec.exact("eichler.frame_count", "-", ">=20 random frames", frames >= 20 ? 0 : 20 - frames);

    const std::string name = "A1+U";
    const SplitData sd = find_lattice(corpus, name).split();
    const Signature sig = sd.lattice.signature();
    const auto f = synthetic_cusp_form(sd.lattice, cusp_weight(sig), 3, 5);
    std::mt19937_64 frng(3);
    const auto g = convert_isometry<double>(random_eichler_isometry(sd, frng, 2));
    const auto base = make_base_frame<double>(sd.lattice, &sd);
    const auto frame = make_split_frame<double>(sd, base, g);
    for (const LatticeVector& v : {LatticeVector{Rational(1, 3)}, LatticeVector{Rational(-5, 7)}}) {
        const auto moved = make_split_frame<double>(sd, base, compose(g, convert_isometry<double>(eichler(sd, v))));
        for (const auto& alpha : count_vectors(sig.p, sig.q))
            for (const auto& lam : positive_vectors(sd, 1, 4)) {
                const auto a = fourier_coefficient(make_request(sd, f, alpha, frame), lam, YIntegralMethod::Bessel);
                const auto b = fourier_coefficient(make_request(sd, f, alpha, moved), lam, YIntegralMethod::Bessel);
                const Complex law = e_phase(sd.K.pairing(lam, v));
                const Complex before = a.value * a.phase;
                rec.tol("eichler.phase_law", name,
                        "v=" + vec_label(v) + " alpha=" + count_label(alpha) + " lambda=" + vec_label(lam),
                        std::abs(b.value * b.phase - law * before) / std::max(std::abs(before), 1e-300));
            }
    }
}

// 8: p = 1
void p_one_suite(const std::vector<CorpusLattice>& corpus, Recorder& rec) {
    int lattices = 0;
    for (const CorpusLattice* cl : split_lattices(corpus)) {
        const SplitData sd = cl->split();
        const Signature sig = sd.lattice.signature();
        if (sig.p != 1) continue;
        ++lattices;
        const DiscriminantGroup disc_K(sd.K);
        const int nk = sd.K.rank();
        // K' vectors: coset representatives plus integer vectors in a box
        std::vector<LatticeVector> lams;
        for (std::size_t c = 0; c < disc_K.order(); ++c) {
            std::vector<int> x(nk, -2);
            while (true) {
                LatticeVector v = disc_K.representative(c);
                for (int i = 0; i < nk; ++i) v[i] += x[i];
                if (std::any_of(v.begin(), v.end(), [](const Rational& r) { return r != 0; })) lams.push_back(v);
                int k = 0;
                while (k < nk && x[k] == 2) x[k++] = -2;
                if (k == nk) break;
                ++x[k];
            }
        }
        const auto frame = eichler_split_frame(sd, 3, 2);
        for (unsigned seed : {1u, 2u, 3u}) {
            const auto f = synthetic_cusp_form(sd.lattice, cusp_weight(sig), 3, seed);
            for (const auto& alpha : count_vectors(sig.p, sig.q)) {
                double worst = 0;
                for (const auto& lam : lams)
                    worst = std::max(worst, std::abs(fourier_coefficient(make_request(sd, f, alpha, frame), lam,
                                                                         YIntegralMethod::Bessel).value));
                rec.tol("p1.vanishing", cl->name,
                        "seed=" + std::to_string(seed) + " alpha=" + count_label(alpha) + " " + std::to_string(lams.size()) +
                            " lambdas",
                        worst);
            }
        }
    }
    rec.exact("p1.lattice_count", "-", "signature (1,q) lattices", lattices > 0 ? 0 : 1);
}

struct Suite {
    const char* title;
    double limit;
    std::function<void(const std::vector<CorpusLattice>&, Recorder&)> run;
};

const std::vector<Suite>& suites() {
    static const std::vector<Suite> s = {
        {"exact identities", 10, exact_suite},
        {"Weil representation", 5, weil_suite},
        {"Siegel theta", 120, theta_suite},
        {"theta splitting", 300, splitting_suite},
        {"unfolding", 600, unfolding_suite},
        {"injectivity round trip", 120, round_trip_suite},
        {"geometry", 5, geometry_suite},
        {"p = 1 vanishing", 60, p_one_suite},
    };
    return s;
}

}  // namespace

bool CriterionReport::checks_pass() const {
    return error.empty() && !records.empty() &&
           std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.pass; });
}

std::string criterion_title(int id) {
    if (id < 1 || id > kCriteria) throw Error(ErrorKind::ParseError, "no criterion " + std::to_string(id));
    return suites()[id - 1].title;
}

std::vector<CriterionReport> run_acceptance(const std::vector<CorpusLattice>& corpus, const RunConfig& config,
                                            const std::set<int>& which) {
    config.validate();
    std::vector<CorpusLattice> selected;
    for (const auto& c : corpus)
        if (config.corpus.empty() || std::count(config.corpus.begin(), config.corpus.end(), c.name)) selected.push_back(c);

    std::vector<CriterionReport> out;
    for (int id = 1; id <= kCriteria; ++id) {
        if (!which.empty() && !which.count(id)) continue;
        const Suite& suite = suites()[id - 1];
        CriterionReport rep;
        rep.id = id;
        rep.title = suite.title;
        rep.time_limit = suite.limit;
        Recorder rec{config, rep.records};
        const auto t0 = std::chrono::steady_clock::now();
        try {
            suite.run(selected, rec);
        } catch (const std::exception& e) {
            rep.error = e.what();
        }
        rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::sort(rep.records.begin(), rep.records.end(), [](const CheckRecord& a, const CheckRecord& b) {
            return std::tie(a.check, a.lattice, a.parameters) < std::tie(b.check, b.lattice, b.parameters);
        });
        out.push_back(std::move(rep));
    }
    return out;
}

Json report_json(const std::vector<CriterionReport>& reports) {
    Json criteria = Json::array();
    bool all = true;
    for (const auto& r : reports) {
        Json records = Json::array();
        for (const auto& c : r.records)
            records.push_back({{"name", c.check},
                               {"lattice", c.lattice},
                               {"parameters", c.parameters},
                               {"value", c.value},
                               {"tolerance", c.tolerance},
                               {"pass", c.pass}});
        Json entry = {{"id", r.id}, {"title", r.title}, {"pass", r.checks_pass()}, {"records", records}};
        if (!r.error.empty()) entry["error"] = r.error;
        criteria.push_back(entry);
        all = all && r.checks_pass();
    }
    return {{"pass", all}, {"criteria", criteria}};
}

std::string report_csv(const std::vector<CriterionReport>& reports) {
    std::ostringstream s;
    s.precision(17);
    s << "criterion,name,lattice,parameters,value,tolerance,pass\n";
    auto quote = [](const std::string& x) {
        std::string q = "\"";
        for (char ch : x) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    };
    for (const auto& r : reports)
        for (const auto& c : r.records)
            s << r.id << ',' << quote(c.check) << ',' << quote(c.lattice) << ',' << quote(c.parameters) << ','
              << c.value << ',' << c.tolerance << ',' << (c.pass ? "true" : "false") << '\n';
    return s.str();
}

}  // namespace kmlift
