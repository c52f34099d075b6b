#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kmlift/lift.hpp"

namespace kmlift {

using Json = nlohmann::ordered_json;

/// One lattice file: {"name", "gram": [[..]], "u": [..], "u_prime": [..]}; u and u_prime are optional and given
/// in lattice coordinates.
struct CorpusLattice {
    std::string name;
    std::string file;
    IntMatrix gram;
    std::optional<LatticeVector> u;
    std::optional<LatticeVector> u_prime;

    GramLattice lattice() const;
    bool has_split() const { return u.has_value(); }
    /// Throws ParseError when the file carries no u.
    SplitData split() const;
};

CorpusLattice parse_lattice(const Json& j, const std::string& file = "");
CorpusLattice load_lattice(const std::filesystem::path& path);
/// Every *.json file in dir that parses as a lattice, sorted by name.
std::vector<CorpusLattice> load_corpus(const std::filesystem::path& dir);
const CorpusLattice& find_lattice(const std::vector<CorpusLattice>& corpus, const std::string& name);

Json load_json(const std::filesystem::path& path);
Rational json_rational(const Json& j);
LatticeVector json_vector(const Json& j);
Json rational_json(const Rational& r);
Json vector_json(const LatticeVector& v);
Json complex_json(Complex c);
Complex json_complex(const Json& j);

/// {"weight": "3/2", "coeffs": [{"coset": [..] or index, "n": "1/4", "c": [re, im]}]}; cosets are dual vectors
/// in lattice coordinates.
CuspFormData parse_cusp_form(const Json& j, const DiscriminantGroup& disc);
Json cusp_form_json(const CuspFormData& f, const DiscriminantGroup& disc);

/// {"base": true} | {"z": [[..], ..]} | {"gauge": alpha1} |
/// {"eichler": [{"along_u_double_prime": false, "lambda": [..]}]} | {"random_eichler": {"seed": s, "steps": k}}.
/// z lists q basis vectors of the negative definite subspace in lattice coordinates; lambda is in K-coordinates.
SplitFrame<double> parse_frame(const Json& j, const SplitData& sd);
/// Frame for a lattice without a split: {"base": true} or {"z": [..]}.
Frame<double> parse_plain_frame(const Json& j, const GramLattice& lattice);
GrassPoint parse_grass_point(const Json& j, const GramLattice& lattice);

Json tables_json(const GaugeTables& tables);
GaugeTables parse_tables(const Json& j);

/// Tolerances and truncation defaults for the acceptance runner.
struct RunConfig {
    std::map<std::string, double> tolerances;
    double tol_scale = 1;           // multiplies every tolerance; KMLIFT_TOL_SCALE overrides
    Int coset_cutoff = 5;
    double theta_tail = 1e-10;
    double y_max = 6;
    std::vector<std::string> corpus;  // lattice names; empty means all
    std::string output;
    std::string format = "json";

    static RunConfig defaults();
    double tolerance(const std::string& check) const;
    void validate() const;
};
Json config_json(const RunConfig& config);
RunConfig parse_config(const Json& j);
/// Reads KMLIFT_TOL_SCALE when set.
void apply_environment(RunConfig& config);

}  // namespace kmlift
