#pragma once

#include "shiftscope/activity.hpp"
#include "shiftscope/segmented.hpp"
#include "shiftscope/switchpoint.hpp"
#include "shiftscope/synthetic.hpp"
#include "shiftscope/timeline.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shiftscope {

enum class Solver { exact, mcmc };

std::string_view to_string(Solver solver);

/// Settings of one analysis run. Every field has a default and can be
/// overridden from a config document.
struct RunConfig {
    AnalysisWindow window{Date{std::chrono::year{2019} / 11 / 1}, Date{std::chrono::year{2020} / 5 / 1}};
    Date split_date{std::chrono::year{2020} / 3 / 9};
    std::size_t k_max = DEFAULT_MAX_BREAKPOINTS;
    std::size_t min_segment_len = DEFAULT_MIN_SEGMENT_LEN;
    /// Prior rate of the switchpoint model; data driven per user when unset.
    std::optional<double> alpha;
    HistogramOptions histogram;
    std::size_t bootstrap_resamples = 1000;
    double confidence_level = 0.95;
    std::uint64_t seed = 0;
    Solver solver = Solver::exact;
    McmcOptions mcmc;
    /// Posterior-predictive replicates per user; 0 skips the check.
    std::size_t pvalue_replicates = 200;
    double pmf_floor = DEFAULT_PMF_FLOOR;
    /// Worker threads; 0 uses the hardware concurrency.
    std::size_t workers = 0;
    /// The run fails when more than this fraction of users error.
    double max_failure_fraction = 0.10;
};

/// Population to synthesise, as described by `synth.*` keys.
struct SynthConfig {
    std::vector<PopulationSpec> groups;
};

struct ConfigDocument {
    RunConfig run;
    SynthConfig synth;
};

/// Environment variable naming the config file when no path is given.
inline constexpr const char* CONFIG_ENV_VAR = "SHIFTSCOPE_CONFIG";

/// Parses a flat `key = value` document; `#` starts a comment. Keys mirror
/// RunConfig (window_start, window_end, split_date, k_max, min_segment_len,
/// alpha, bins, epsilon, bootstrap_resamples, confidence_level, seed, solver,
/// mcmc_chains, mcmc_draws, mcmc_warmup, pvalue_replicates, pmf_floor,
/// workers, max_failure_fraction). Synthetic populations use repeated
/// `synth.group = class, users, start:rate[:retweet_fraction]; ...` lines,
/// `synth.scenario = A|B` and `synth.sources = pool_size, zipf_exponent`.
/// Throws ParseError on unknown keys or malformed values.
ConfigDocument parse_config(std::string_view text);

ConfigDocument load_config(const std::filesystem::path& path);

/// Effective configuration as ordered (key, value) pairs.
std::vector<std::pair<std::string, std::string>> describe(const RunConfig& config);

} // namespace shiftscope
