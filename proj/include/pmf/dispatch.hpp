#ifndef PMF_DISPATCH_HPP
#define PMF_DISPATCH_HPP

/// Runs the experiment named by a RunConfig and writes its artifacts: raw CSV
/// series, a flat JSON report, and a plain-text summary with one pass/fail
/// line per check. The PMFRONTIER_OUT environment variable overrides the
/// configured output directory.

#include <filesystem>
#include <string>
#include <vector>

#include "pmf/config.hpp"

namespace pmf {

struct DispatchResult {
    int status = 0;  // 0 iff every in-config threshold passed
    bool pass = true;
    std::vector<std::string> check_lines;  // "PASS ..." / "FAIL ..."
    std::filesystem::path output_dir;
};

DispatchResult dispatch(const RunConfig& config);

}  // namespace pmf

#endif  // PMF_DISPATCH_HPP
