// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. An optional argument restricts the run to one suite id.

#include <iostream>
#include <string>

#include "onrank/verification.hpp"

int main(int argc, char** argv) {
    const std::string suite = argc > 1 ? argv[1] : "all";
    onrank::VerificationReport report;
    try {
        report = onrank::verify(suite);
    } catch (const std::exception& e) {
        std::cerr << "acceptance: " << e.what() << "\n";
        return 2;
    }
    int failed = 0;
    for (const auto& check : report.checks) {
        std::cout << (check.passed ? "[PASS] " : "[FAIL] ") << check.id << " " << check.title << " ("
                  << check.seconds << " s)\n       " << check.detail << std::endl;
        if (!check.passed) ++failed;
    }
    std::cout << report.checks.size() - failed << "/" << report.checks.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
