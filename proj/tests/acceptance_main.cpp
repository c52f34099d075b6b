#include <cstdio>
#include <fstream>
#include <iostream>

#include "kmlift/acceptance.hpp"
#include "kmlift/errors.hpp"

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance CORPUS_DIR [REPORT_JSON]\n";
        return 2;
    }
    try {
        kmlift::RunConfig config = kmlift::RunConfig::defaults();
        kmlift::apply_environment(config);
        const auto reports = kmlift::run_acceptance(kmlift::load_corpus(argv[1]), config);
        if (argc > 2) std::ofstream(argv[2]) << kmlift::report_json(reports).dump(2) << "\n";
        bool all = true;
        for (const auto& r : reports) {
            std::printf("%s criterion %d: %s (%zu checks, %.2f s, limit %.0f s)\n", r.pass() ? "PASS" : "FAIL", r.id,
                        r.title.c_str(), r.records.size(), r.seconds, r.time_limit);
            if (!r.pass()) {
                if (!r.error.empty()) std::printf("    error: %s\n", r.error.c_str());
                for (const auto& c : r.records)
                    if (!c.pass)
                        std::printf("    %s [%s] %s: %.3e > %.3e\n", c.check.c_str(), c.lattice.c_str(),
                                    c.parameters.c_str(), c.value, c.tolerance);
            }
            all = all && r.pass();
        }
        return all ? 0 : 1;
    } catch (const kmlift::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
