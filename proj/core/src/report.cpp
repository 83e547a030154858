#include "shiftscope/report.hpp"

#include "shiftscope/dates.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace shiftscope {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string csv_optional(const std::optional<double>& value) {
    return value ? format_float(*value) : std::string{};
}

std::string activity_csv(const ReportBundle& bundle) {
    std::string out = "user_id,class,M,R,rho,h\n";
    for (const ActivityPoint& p : bundle.activity) {
        out += fmt::format("{},{},{},{},{},{}\n", p.user_id, to_string(p.user_class), p.messages, p.retweets,
                           format_float(p.rho), csv_optional(p.entropy));
    }
    return out;
}

std::string divergence_csv(const std::optional<DivergenceMatrix>& matrix) {
    std::string out = "class";
    if (!matrix) {
        return out + "\n";
    }
    for (UserClass cls : matrix->classes) {
        out += fmt::format(",{}", to_string(cls));
    }
    out += "\n";
    for (std::size_t i = 0; i < matrix->classes.size(); ++i) {
        out += to_string(matrix->classes[i]);
        for (double v : matrix->values[i]) {
            out += "," + format_float(v);
        }
        out += "\n";
    }
    return out;
}

std::string jumps_csv(const std::vector<LabelledJumps>& jumps) {
    std::string out = "date,class,j_plus,j_minus,ratio\n";
    for (const LabelledJumps& labelled : jumps) {
        const JumpSeries& s = labelled.series;
        std::vector<std::optional<double>> ratio = jump_ratio(s);
        for (std::size_t d = 0; d < s.plus.size(); ++d) {
            if (s.plus[d] == 0.0 && s.minus[d] == 0.0) {
                continue;
            }
            out += fmt::format("{},{},{},{},{}\n", format_date(s.window.date_at(d)), labelled.label,
                               format_float(s.plus[d]), format_float(s.minus[d]), csv_optional(ratio[d]));
        }
    }
    return out;
}

std::string before_after_csv(const ReportBundle& bundle) {
    std::string out = "class,metric,period,median,ci_low,ci_high\n";
    for (const BeforeAfterRow& row : bundle.before_after) {
        out += fmt::format("{},{},{},{},{},{}\n", to_string(row.user_class), to_string(row.metric), row.period,
                           format_float(row.interval.median), format_float(row.interval.low),
                           format_float(row.interval.high));
    }
    return out;
}

std::string user_changes_csv(const ReportBundle& bundle) {
    std::string out = "user_id,class,events,mean_rate,ssr_k,ssr_breakpoints,ssr_bic,"
                      "bayes_switch,bayes_probability,rate_before,rate_after,p_value\n";
    for (const UserChanges& c : bundle.changes) {
        out += fmt::format("{},{},{},{},", c.user_id, to_string(c.user_class), c.events, format_float(c.mean_rate));
        if (c.ssr) {
            std::string breakpoints;
            for (std::size_t b : c.ssr->breakpoints) {
                breakpoints += (breakpoints.empty() ? "" : ";") + format_date(c.ssr->window.date_at(b));
            }
            out += fmt::format("{},{},{},", c.ssr->k(), breakpoints, format_float(c.ssr->bic));
        } else {
            out += ",,,";
        }
        if (c.bayes) {
            out += fmt::format("{},{},{},{},{}\n", format_date(c.bayes->map_date),
                               format_float(c.bayes->map_probability), format_float(c.bayes->rate_before),
                               format_float(c.bayes->rate_after), csv_optional(c.bayes->p_value));
        } else {
            out += ",,,,\n";
        }
    }
    return out;
}

std::string run_json(const ReportBundle& bundle, const EmitOptions& options) {
    ordered_json doc;
    ordered_json config = ordered_json::object();
    for (const auto& [key, value] : describe(bundle.config)) {
        config[key] = value;
    }
    doc["config"] = std::move(config);
    doc["seed"] = bundle.config.seed;
    doc["parts"] = {{"metrics", bundle.parts.metrics}, {"ssr", bundle.parts.ssr}, {"bayes", bundle.parts.bayes}};
    doc["versions"] = {{"shiftscope", library_version()},
                       {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR,
                                                     NLOHMANN_JSON_VERSION_MINOR, NLOHMANN_JSON_VERSION_PATCH)},
                       {"fmt", fmt::format("{}", FMT_VERSION)}};
    ordered_json inputs = ordered_json::object();
    for (const auto& [key, value] : options.inputs) {
        inputs[key] = value;
    }
    doc["inputs"] = std::move(inputs);
    doc["users"] = bundle.users;
    doc["excluded_users"] = bundle.excluded_users;
    ordered_json errors = ordered_json::array();
    for (const UserError& e : bundle.errors) {
        errors.push_back({{"user_id", e.user_id}, {"stage", e.stage}, {"message", e.message}});
    }
    doc["errors"] = std::move(errors);
    ordered_json histograms = ordered_json::object();
    for (const auto& [label, fractions] : bundle.breakpoint_histograms) {
        ordered_json row = ordered_json::array();
        for (double f : fractions) {
            row.push_back(std::stod(format_float(f)));
        }
        histograms[label] = std::move(row);
    }
    doc["breakpoint_histograms"] = std::move(histograms);
    doc["notes"] = bundle.notes;
    return doc.dump(2) + "\n";
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out{path, std::ios::binary | std::ios::trunc};
    if (!out) {
        throw Error{fmt::format("cannot open {} for writing", path.string())};
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
        throw Error{fmt::format("failed writing {}", path.string())};
    }
}

} // namespace

std::string format_float(double value) {
    if (value == 0.0) {
        value = 0.0;
    }
    return fmt::format("{:.6g}", value);
}

std::string library_version() {
    return SHIFTSCOPE_VERSION;
}

std::vector<fs::path> emit(const ReportBundle& bundle, const fs::path& out_dir, const EmitOptions& options) {
    std::vector<std::pair<std::string, std::string>> files;
    if (bundle.parts.metrics) {
        files.emplace_back("activity_points.csv", activity_csv(bundle));
        files.emplace_back("kl_rho.csv", divergence_csv(bundle.kl_rho));
        files.emplace_back("kl_h.csv", divergence_csv(bundle.kl_h));
        files.emplace_back("before_after.csv", before_after_csv(bundle));
    }
    if (bundle.parts.ssr) {
        files.emplace_back("jumps_ssr.csv", jumps_csv(bundle.ssr_jumps));
    }
    if (bundle.parts.bayes) {
        files.emplace_back("jumps_bayes.csv", jumps_csv(bundle.bayes_jumps));
    }
    if (options.user_changes && (bundle.parts.ssr || bundle.parts.bayes)) {
        files.emplace_back("user_changes.csv", user_changes_csv(bundle));
    }
    files.emplace_back("run.json", run_json(bundle, options));

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw Error{fmt::format("cannot create {}: {}", out_dir.string(), ec.message())};
    }
    std::vector<fs::path> staged;
    std::vector<fs::path> final_paths;
    try {
        for (const auto& [name, content] : files) {
            fs::path tmp = out_dir / ("." + name + ".tmp");
            staged.push_back(tmp);
            write_file(tmp, content);
            final_paths.push_back(out_dir / name);
        }
        for (std::size_t i = 0; i < staged.size(); ++i) {
            fs::rename(staged[i], final_paths[i]);
        }
    } catch (const std::exception& e) {
        for (const fs::path& tmp : staged) {
            fs::remove(tmp, ec);
        }
        throw Error{fmt::format("writing report to {} failed: {}", out_dir.string(), e.what())};
    }
    return final_paths;
}

} // namespace shiftscope
