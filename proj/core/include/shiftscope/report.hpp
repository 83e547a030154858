#pragma once

#include "shiftscope/analysis.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace shiftscope {

struct EmitOptions {
    /// Also write user_changes.csv with per-user fits.
    bool user_changes = true;
    /// Extra (key, value) pairs recorded under "inputs" in run.json.
    std::vector<std::pair<std::string, std::string>> inputs;
};

/// Writes the report files of `bundle` into `out_dir`, creating it if needed,
/// and returns their paths. Files are staged under temporary names and
/// renamed once all of them are written; on failure the staged files are
/// removed and Error is thrown.
std::vector<std::filesystem::path> emit(const ReportBundle& bundle, const std::filesystem::path& out_dir,
                                        const EmitOptions& options = {});

/// Six significant digits, no negative zero.
std::string format_float(double value);

std::string library_version();

} // namespace shiftscope
