#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace carfin {

struct VerifyCheck {
    std::string name;
    double deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;  // e.g. "skipped: trivial group"
};

struct VerifyReport {
    int n = 0;
    std::uint64_t seed = 0;
    std::vector<VerifyCheck> checks;
    bool all_pass = true;
};

/// Runs the full invariant suite at mode count n with a fixed seed: CAR
/// relations, grading, matrix-unit identities, the γ isomorphism,
/// representation and action laws, product-state properties, the nested
/// ergodic chain, clustering rates, and the moment-inversion round trip.
/// Throws capacity_error for n above the exhaustive-group cap.
VerifyReport run_verification(int n, std::uint64_t seed);

}  // namespace carfin
