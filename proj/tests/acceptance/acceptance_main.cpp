// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "ineqforge/report.hpp"

int main(int argc, char** argv) {
    std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
    auto results = ineqforge::run_acceptance_suite(seed, true);
    bool all = true;
    for (const auto& r : results) {
        std::printf("criterion %2d %-30s %s  (%.2f s)\n", r.id, r.name.c_str(), r.pass ? "PASS" : "FAIL", r.seconds);
        for (const auto& [k, v] : r.metrics) std::printf("    %s = %.10g\n", k.c_str(), v);
        if (!r.detail.empty()) std::printf("    note: %s\n", r.detail.c_str());
        all = all && r.pass;
    }
    std::fflush(stdout);
    return all ? 0 : 1;
}
