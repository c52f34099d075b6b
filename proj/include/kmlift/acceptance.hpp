#pragma once

#include <set>
#include <string>
#include <vector>

#include "kmlift/corpus.hpp"

namespace kmlift {

/// One invariant evaluation: passes when value <= tolerance.
struct CheckRecord {
    std::string check;
    std::string lattice;
    std::string parameters;
    double value = 0;
    double tolerance = 0;
    bool pass = false;
};

struct CriterionReport {
    int id = 0;
    std::string title;
    double time_limit = 0;  // seconds
    double seconds = 0;
    std::vector<CheckRecord> records;
    std::string error;      // set when the suite threw
    bool checks_pass() const;
    bool pass() const { return checks_pass() && seconds <= time_limit; }
};

/// Number of acceptance criteria.
constexpr int kCriteria = 8;
std::string criterion_title(int id);

/// Runs the selected criteria (all when empty) against the corpus. Records inside a criterion are sorted by
/// (check, lattice, parameters).
std::vector<CriterionReport> run_acceptance(const std::vector<CorpusLattice>& corpus, const RunConfig& config,
                                            const std::set<int>& which = {});

/// Report without timings, so identical inputs give identical output.
Json report_json(const std::vector<CriterionReport>& reports);
std::string report_csv(const std::vector<CriterionReport>& reports);

}  // namespace kmlift
