#pragma once

#include "shiftscope/activity.hpp"
#include "shiftscope/config.hpp"
#include "shiftscope/error.hpp"
#include "shiftscope/jumps.hpp"
#include "shiftscope/segmented.hpp"
#include "shiftscope/switchpoint.hpp"
#include "shiftscope/timeline.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shiftscope {

/// Which parts of the analysis to run.
struct AnalysisParts {
    bool metrics = true;
    bool ssr = true;
    bool bayes = true;
};

struct UserError {
    std::string user_id;
    std::string stage;
    std::string message;
};

struct BayesSummary {
    Date map_date;
    double map_probability = 0.0;
    double rate_before = 0.0;
    double rate_after = 0.0;
    std::optional<double> p_value;
};

/// Per-user change detection results over the analysis window.
struct UserChanges {
    std::string user_id;
    UserClass user_class = UserClass::generic;
    std::int64_t events = 0;
    double mean_rate = 0.0;
    std::optional<SegmentedFit> ssr;
    std::optional<BayesSummary> bayes;
};

/// Jump aggregates of one class, or of everybody under the label "all".
struct LabelledJumps {
    std::string label;
    JumpSeries series;
};

struct BeforeAfterRow {
    UserClass user_class = UserClass::generic;
    Metric metric = Metric::rho;
    std::string period;
    std::size_t users = 0;
    MedianInterval interval;
};

struct ReportBundle {
    RunConfig config;
    AnalysisParts parts;
    std::size_t users = 0;
    std::vector<ActivityPoint> activity;
    std::optional<DivergenceMatrix> kl_rho;
    std::optional<DivergenceMatrix> kl_h;
    std::vector<BeforeAfterRow> before_after;
    std::vector<UserChanges> changes;
    std::vector<LabelledJumps> ssr_jumps;
    std::vector<LabelledJumps> bayes_jumps;
    /// Fraction of users per breakpoint count, per class and "all".
    std::vector<std::pair<std::string, std::vector<double>>> breakpoint_histograms;
    /// Users without events in the window, excluded from every analysis.
    std::vector<std::string> excluded_users;
    std::vector<UserError> errors;
    std::vector<std::string> notes;
};

/// More than the configured fraction of users failed.
class AnalysisFailed : public Error {
public:
    AnalysisFailed(const std::string& what, std::vector<UserError> errors)
        : Error{what}, m_Errors{std::move(errors)} {}

    const std::vector<UserError>& errors() const { return m_Errors; }

private:
    std::vector<UserError> m_Errors;
};

/// Runs the requested analyses over every timeline, restricted to the
/// configured window. Per-user work runs on a bounded worker pool; results
/// are ordered by user id so the bundle does not depend on scheduling.
/// Per-user failures are recorded in `errors`. Throws DegenerateInputError
/// for an empty population and AnalysisFailed when too many users fail.
ReportBundle run_analysis(const RunConfig& config, std::span<const Timeline> timelines, AnalysisParts parts = {});

/// 64-bit FNV-1a, used to derive per-user random streams.
std::uint64_t stable_hash(std::string_view text);

} // namespace shiftscope
