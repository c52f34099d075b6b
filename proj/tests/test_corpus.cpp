#include <doctest.h>

#include <cstdlib>

#include "kmlift/acceptance.hpp"
#include "kmlift/corpus.hpp"
#include "kmlift/errors.hpp"

using namespace kmlift;

namespace {

const std::string kCorpus = KMLIFT_CORPUS_DIR;

}  // namespace

TEST_CASE("corpus loads lattices only, sorted by name") {
    const auto corpus = load_corpus(kCorpus);
    REQUIRE(corpus.size() == 11);
    for (std::size_t i = 1; i < corpus.size(); ++i) CHECK(corpus[i - 1].name < corpus[i].name);
    const auto& u = find_lattice(corpus, "U");
    CHECK(u.lattice().rank() == 2);
    CHECK(u.has_split());
    CHECK_FALSE(find_lattice(corpus, "A1+A1+A1").has_split());
    CHECK_THROWS_AS(find_lattice(corpus, "E8"), Error);
    CHECK_THROWS_AS(parse_lattice(Json{{"gram", {{1}}}}), Error);
    CHECK_THROWS_AS(parse_lattice(Json{{"gram", "x"}}), Error);
}

TEST_CASE("config round trip and validation") {
    RunConfig c = RunConfig::defaults();
    c.tol_scale = 2.5;
    c.coset_cutoff = 7;
    c.corpus = {"U", "A1+U"};
    c.format = "csv";
    const Json j = config_json(c);
    CHECK(config_json(parse_config(j)).dump() == j.dump());
    CHECK(c.tolerance("strip.residual") == doctest::Approx(2.5e-6));
    CHECK_THROWS_AS(c.tolerance("no.such.check"), Error);

    Json bad = j;
    bad["tolerances"]["theta.T"] = 0;
    CHECK_THROWS_AS(parse_config(bad), Error);
    bad = j;
    bad["format"] = "xml";
    CHECK_THROWS_AS(parse_config(bad), Error);

    setenv("KMLIFT_TOL_SCALE", "10", 1);
    RunConfig e = RunConfig::defaults();
    apply_environment(e);
    CHECK(e.tolerance("theta.T") == doctest::Approx(1e-7));
    setenv("KMLIFT_TOL_SCALE", "-1", 1);
    CHECK_THROWS_AS(apply_environment(e), Error);
    unsetenv("KMLIFT_TOL_SCALE");
}

TEST_CASE("cusp form and tables JSON round trip") {
    const auto corpus = load_corpus(kCorpus);
    const SplitData sd = find_lattice(corpus, "A1+U").split();
    const DiscriminantGroup disc(sd.lattice);
    const CuspFormData f = synthetic_cusp_form(sd.lattice, Rational(3, 2), 3, 8);
    const CuspFormData back = parse_cusp_form(cusp_form_json(f, disc), disc);
    CHECK(back.weight == f.weight);
    CHECK(back.coeffs == f.coeffs);

    const GaugeTables t = gauge_tables(f, sd, Rational(2), 3.0, YIntegralMethod::Bessel, 0);
    const GaugeTables t2 = parse_tables(tables_json(t));
    REQUIRE(t2.entries.size() == t.entries.size());
    CHECK(tables_json(t2).dump() == tables_json(t).dump());

    CHECK_THROWS_AS(parse_cusp_form(Json{{"weight", "3/2"}, {"coeffs", {{{"coset", 9}, {"n", "1"}, {"c", {1, 0}}}}}}, disc),
                    Error);
}

TEST_CASE("frames from z basis") {
    const auto corpus = load_corpus(kCorpus);
    const CorpusLattice& cl = find_lattice(corpus, "A1+U");
    const SplitData sd = cl.split();
    // z spanned by (0,1,-2): norm 2*(1*-2) = -4
    const Json zj = {{"z", {{"0", "1", "-2"}}}};
    const SplitFrame<double> sf = parse_frame(zj, sd);
    const Frame<double> plain = parse_plain_frame(zj, cl.lattice());
    const Matrix<double> gram = to_double(sd.lattice.gram_rational());
    const std::vector<double> zvec = {0, 1, -2};
    for (const Frame<double>* fr : {&sf.frame, &plain}) {
        REQUIRE(fr->p == 2);
        // positive frame vectors are orthogonal to z
        for (int j = 0; j < fr->p; ++j) {
            double pair = 0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) pair += zvec[a] * gram(a, b) * fr->vectors(b, j);
            CHECK(std::abs(pair) < 1e-12);
        }
    }
    CHECK_THROWS_AS(parse_frame(Json{{"z", {{"1", "0", "0"}}}}, sd), Error);
    CHECK_THROWS_AS(parse_frame(Json{{"z", {{"1", "0"}}}}, sd), Error);
    CHECK_THROWS_AS(parse_frame(Json{{"spin", 1}}, sd), Error);
}

TEST_CASE("acceptance report is deterministic and sorted") {
    const auto corpus = load_corpus(kCorpus);
    const RunConfig config = RunConfig::defaults();
    const auto first = run_acceptance(corpus, config, {2, 7});
    const auto second = run_acceptance(corpus, config, {2, 7});
    CHECK(report_json(first).dump() == report_json(second).dump());
    CHECK(report_csv(first) == report_csv(second));
    REQUIRE(first.size() == 2);
    for (const auto& r : first) {
        CHECK(r.pass());
        for (std::size_t i = 1; i < r.records.size(); ++i) {
            const auto& a = r.records[i - 1];
            const auto& b = r.records[i];
            CHECK(std::tie(a.check, a.lattice, a.parameters) <= std::tie(b.check, b.lattice, b.parameters));
        }
    }
    const Json j = report_json(first);
    CHECK(j.at("pass").get<bool>());
    CHECK(j.at("criteria")[0].at("records")[0].contains("tolerance"));
}

TEST_CASE("failing tolerance makes the report fail") {
    const auto corpus = load_corpus(kCorpus);
    RunConfig config = RunConfig::defaults();
    config.tolerances["weil.braid"] = 1e-300;
    config.tolerances["weil.unitarity"] = 1e-300;
    const auto reports = run_acceptance(corpus, config, {2});
    REQUIRE(reports.size() == 1);
    CHECK_FALSE(reports[0].pass());
    CHECK_FALSE(report_json(reports).at("pass").get<bool>());
}
