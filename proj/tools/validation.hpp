#pragma once

#include <string>
#include <vector>

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Invariant suite behind `validate`; the quick variant uses coarser grids and fewer parameter points.
std::vector<CheckResult> run_validation(bool quick);
