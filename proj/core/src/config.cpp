#include "shiftscope/config.hpp"

#include "shiftscope/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace shiftscope {
namespace {

std::string_view trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view value) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ParseError{fmt::format("'{}' expects a non-negative integer, got '{}'", key, value)};
    }
    return out;
}

double to_double(std::string_view key, std::string_view value) {
    std::string copy{value};
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(copy, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != copy.size()) {
        throw ParseError{fmt::format("'{}' expects a number, got '{}'", key, value)};
    }
    return out;
}

RateSchedule parse_schedule(std::string_view pieces_text, const AnalysisWindow& window, const SourcePool& sources) {
    std::vector<RatePiece> pieces;
    for (std::string_view item : split(pieces_text, ';')) {
        if (item.empty()) {
            continue;
        }
        auto parts = split(item, ':');
        if (parts.size() < 2 || parts.size() > 3) {
            throw ParseError{fmt::format("rate piece '{}' must be start:rate[:retweet_fraction]", item)};
        }
        RatePiece piece{parse_date(parts[0]), to_double("synth.group", parts[1]), 0.0};
        if (parts.size() == 3) {
            piece.retweet_fraction = to_double("synth.group", parts[2]);
        }
        pieces.push_back(piece);
    }
    try {
        return RateSchedule{window, std::move(pieces), sources};
    } catch (const InvalidInputError& e) {
        throw ParseError{e.what()};
    }
}

} // namespace

std::string_view to_string(Solver solver) {
    return solver == Solver::exact ? "exact" : "mcmc";
}

ConfigDocument parse_config(std::string_view text) {
    ConfigDocument doc;
    RunConfig& run = doc.run;
    Date window_start = run.window.start();
    Date window_end = run.window.end();
    std::vector<std::string> groups;
    std::string scenario;
    SourcePool sources;

    std::istringstream in{std::string{text}};
    std::string raw;
    std::size_t number = 0;
    std::map<std::string, std::size_t> seen;
    while (std::getline(in, raw)) {
        ++number;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError{fmt::format("config line {}: expected key = value", number)};
        }
        std::string key{trim(line.substr(0, eq))};
        std::string_view value = trim(line.substr(eq + 1));
        if (key != "synth.group" && seen.count(key) > 0) {
            throw ParseError{fmt::format("config line {}: duplicate key '{}'", number, key)};
        }
        seen[key] = number;

        try {
            if (key == "window_start") {
                window_start = parse_date(value);
            } else if (key == "window_end") {
                window_end = parse_date(value);
            } else if (key == "split_date") {
                run.split_date = parse_date(value);
            } else if (key == "k_max") {
                run.k_max = to_unsigned(key, value);
            } else if (key == "min_segment_len") {
                run.min_segment_len = to_unsigned(key, value);
            } else if (key == "alpha") {
                if (value == "auto") {
                    run.alpha.reset();
                } else {
                    run.alpha = to_double(key, value);
                }
            } else if (key == "bins") {
                run.histogram.bins = to_unsigned(key, value);
            } else if (key == "epsilon") {
                run.histogram.epsilon = to_double(key, value);
            } else if (key == "bootstrap_resamples") {
                run.bootstrap_resamples = to_unsigned(key, value);
            } else if (key == "confidence_level") {
                run.confidence_level = to_double(key, value);
            } else if (key == "seed") {
                run.seed = to_unsigned(key, value);
            } else if (key == "solver") {
                if (value == "exact") {
                    run.solver = Solver::exact;
                } else if (value == "mcmc") {
                    run.solver = Solver::mcmc;
                } else {
                    throw ParseError{fmt::format("solver must be exact or mcmc, got '{}'", value)};
                }
            } else if (key == "mcmc_chains") {
                run.mcmc.chains = to_unsigned(key, value);
            } else if (key == "mcmc_draws") {
                run.mcmc.draws = to_unsigned(key, value);
            } else if (key == "mcmc_warmup") {
                run.mcmc.warmup = to_unsigned(key, value);
            } else if (key == "pvalue_replicates") {
                run.pvalue_replicates = to_unsigned(key, value);
            } else if (key == "pmf_floor") {
                run.pmf_floor = to_double(key, value);
            } else if (key == "workers") {
                run.workers = to_unsigned(key, value);
            } else if (key == "max_failure_fraction") {
                run.max_failure_fraction = to_double(key, value);
            } else if (key == "synth.group") {
                groups.emplace_back(value);
            } else if (key == "synth.scenario") {
                scenario = std::string{value};
            } else if (key == "synth.sources") {
                auto parts = split(value, ',');
                if (parts.size() != 2) {
                    throw ParseError{"synth.sources expects pool_size, zipf_exponent"};
                }
                sources = SourcePool{to_unsigned(key, parts[0]), to_double(key, parts[1])};
            } else {
                throw ParseError{fmt::format("unknown key '{}'", key)};
            }
        } catch (const ParseError& e) {
            throw ParseError{fmt::format("config line {}: {}", number, e.what())};
        }
    }

    try {
        run.window = AnalysisWindow{window_start, window_end};
    } catch (const InvalidInputError& e) {
        throw ParseError{e.what()};
    }

    if (!scenario.empty()) {
        bool found = false;
        for (auto& named : appendix_scenarios()) {
            if (named.name == scenario) {
                doc.synth.groups.push_back(PopulationSpec{named.schedule, 1, UserClass::generic});
                found = true;
            }
        }
        if (!found) {
            throw ParseError{fmt::format("unknown synth.scenario '{}'", scenario)};
        }
    }
    for (const std::string& group : groups) {
        auto fields = split(group, ',');
        if (fields.size() != 3) {
            throw ParseError{fmt::format("synth.group '{}' must be class, users, pieces", group)};
        }
        doc.synth.groups.push_back(PopulationSpec{parse_schedule(fields[2], run.window, sources),
                                                  to_unsigned("synth.group", fields[1]),
                                                  parse_user_class(fields[0])});
    }
    return doc;
}

ConfigDocument load_config(const std::filesystem::path& path) {
    std::ifstream in{path};
    if (!in) {
        throw Error{fmt::format("cannot open config '{}'", path.string())};
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::vector<std::pair<std::string, std::string>> describe(const RunConfig& config) {
    return {
        {"window_start", format_date(config.window.start())},
        {"window_end", format_date(config.window.end())},
        {"split_date", format_date(config.split_date)},
        {"k_max", std::to_string(config.k_max)},
        {"min_segment_len", std::to_string(config.min_segment_len)},
        {"alpha", config.alpha ? fmt::format("{}", *config.alpha) : "auto"},
        {"bins", std::to_string(config.histogram.bins)},
        {"epsilon", fmt::format("{}", config.histogram.epsilon)},
        {"bootstrap_resamples", std::to_string(config.bootstrap_resamples)},
        {"confidence_level", fmt::format("{}", config.confidence_level)},
        {"seed", std::to_string(config.seed)},
        {"solver", std::string{to_string(config.solver)}},
        {"mcmc_chains", std::to_string(config.mcmc.chains)},
        {"mcmc_draws", std::to_string(config.mcmc.draws)},
        {"mcmc_warmup", std::to_string(config.mcmc.warmup)},
        {"pvalue_replicates", std::to_string(config.pvalue_replicates)},
        {"pmf_floor", fmt::format("{}", config.pmf_floor)},
        {"max_failure_fraction", fmt::format("{}", config.max_failure_fraction)},
    };
}

} // namespace shiftscope
