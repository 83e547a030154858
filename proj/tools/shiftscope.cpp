#include <shiftscope/analysis.hpp>
#include <shiftscope/config.hpp>
#include <shiftscope/records.hpp>
#include <shiftscope/report.hpp>
#include <shiftscope/sampling.hpp>
#include <shiftscope/synthetic.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace shiftscope;

constexpr int EXIT_OK = 0;
constexpr int EXIT_FATAL = 1;
constexpr int EXIT_PARTIAL = 2;

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
};

ConfigDocument resolve_config(const GlobalOptions& global) {
    std::string path = global.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv(CONFIG_ENV_VAR)) {
            path = env;
        }
    }
    ConfigDocument doc = path.empty() ? ConfigDocument{} : load_config(path);
    if (global.seed) {
        doc.run.seed = *global.seed;
    }
    return doc;
}

void report_issues(const IngestResult& ingested, const std::string& input) {
    for (const IngestIssue& issue : ingested.issues) {
        std::cerr << fmt::format("{}:{}: {}\n", input, issue.line, issue.message);
    }
}

int run_ingest_check(const GlobalOptions&, const std::string& input) {
    IngestResult ingested = ingest_file(input);
    report_issues(ingested, input);
    std::size_t events = 0;
    for (const Timeline& t : ingested.timelines) {
        events += t.size();
    }
    std::cout << fmt::format("records: {}\nvalid: {}\nrejected: {}\nevents: {}\n", ingested.records,
                             ingested.timelines.size(), ingested.issues.size(), events);
    return ingested.issues.empty() ? EXIT_OK : EXIT_PARTIAL;
}

int run_synth(const GlobalOptions& global, const std::string& out, const std::string& scenario) {
    ConfigDocument doc = resolve_config(global);
    std::vector<PopulationSpec> specs = doc.synth.groups;
    if (!scenario.empty()) {
        bool found = false;
        for (NamedSchedule& named : appendix_scenarios()) {
            if (named.name == scenario) {
                specs.push_back(PopulationSpec{std::move(named.schedule), 1, UserClass::generic});
                found = true;
            }
        }
        if (!found) {
            throw ParseError{fmt::format("unknown scenario '{}'", scenario)};
        }
    }
    if (specs.empty()) {
        throw InvalidInputError{"nothing to synthesise: set synth.group or synth.scenario, or pass --scenario"};
    }
    std::vector<Timeline> population = generate_population(specs, doc.run.seed);
    if (out.empty() || out == "-") {
        write_records(std::cout, population);
    } else {
        std::ofstream file{out, std::ios::binary | std::ios::trunc};
        if (!file) {
            throw Error{fmt::format("cannot open {} for writing", out)};
        }
        write_records(file, population);
        if (!file.flush()) {
            throw Error{fmt::format("failed writing {}", out)};
        }
    }
    std::cerr << fmt::format("synthesised {} timelines\n", population.size());
    return EXIT_OK;
}

int run_pipeline(const GlobalOptions& global, const std::string& input, const std::string& out, AnalysisParts parts,
                 const std::string& solver) {
    ConfigDocument doc = resolve_config(global);
    if (solver == "exact") {
        doc.run.solver = Solver::exact;
    } else if (solver == "mcmc") {
        doc.run.solver = Solver::mcmc;
    }
    IngestResult ingested = ingest_file(input);
    report_issues(ingested, input);
    if (ingested.timelines.empty()) {
        throw DegenerateInputError{fmt::format("{} holds no valid records", input)};
    }
    ReportBundle bundle = run_analysis(doc.run, ingested.timelines, parts);
    for (const UserError& e : bundle.errors) {
        std::cerr << fmt::format("user {}: {} failed: {}\n", e.user_id, e.stage, e.message);
    }
    EmitOptions options;
    options.inputs = {{"input", input},
                      {"records", std::to_string(ingested.records)},
                      {"rejected_records", std::to_string(ingested.issues.size())}};
    for (const auto& path : emit(bundle, out, options)) {
        std::cerr << fmt::format("wrote {}\n", path.string());
    }
    bool partial = !ingested.issues.empty() || !bundle.errors.empty();
    return partial ? EXIT_PARTIAL : EXIT_OK;
}

int run_sample(const GlobalOptions& global, const std::string& snapshot, const std::string& out, std::size_t target,
               std::size_t cap) {
    ConfigDocument doc = resolve_config(global);
    SnapshotClient client = SnapshotClient::load(snapshot);
    RandomSampleOptions random_options;
    random_options.target = target;
    random_options.seed = doc.run.seed;
    RandomSample random = sample_random_users(client, random_options);
    std::vector<std::string> journalists = sample_journalists(client, {});

    std::vector<Timeline> timelines;
    auto append = [&](const std::vector<std::string>& ids, UserClass cls) {
        std::vector<Timeline> collected = collect_timelines(client, ids, cls, cap);
        std::move(collected.begin(), collected.end(), std::back_inserter(timelines));
    };
    append(random.followers, UserClass::random_follower);
    append(random.friends, UserClass::random_friend);
    append(journalists, UserClass::journalist);

    std::ofstream file{out, std::ios::binary | std::ios::trunc};
    if (!file) {
        throw Error{fmt::format("cannot open {} for writing", out)};
    }
    write_records(file, timelines);
    if (!file.flush()) {
        throw Error{fmt::format("failed writing {}", out)};
    }
    std::cerr << fmt::format("followers: {}, friends: {}, journalists: {} after {} queries\n", random.followers.size(),
                             random.friends.size(), journalists.size(), random.rounds);
    bool partial = random.followers.size() < target || random.friends.size() < target;
    return partial ? EXIT_PARTIAL : EXIT_OK;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Changepoint analysis of per-account activity timelines"};
    app.set_version_flag("--version", library_version());
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--config", global.config_path,
                   fmt::format("Config file (key = value); defaults to ${}", CONFIG_ENV_VAR));
    app.add_option("--seed", global.seed, "Overrides the configured seed");

    std::string input;
    std::string out;
    std::string scenario;
    std::string solver;
    std::string snapshot;
    std::size_t target = 8000;
    std::size_t cap = MAX_TIMELINE_CAP;

    auto* ingest_check = app.add_subcommand("ingest-check", "Validate a JSONL timeline file");
    ingest_check->add_option("--input,input", input, "JSONL timeline records")->required();

    auto* synth = app.add_subcommand("synth", "Generate synthetic timelines as JSONL");
    synth->add_option("--out", out, "Output file; stdout when omitted");
    synth->add_option("--scenario", scenario, "Add one user following a validation scenario")
        ->check(CLI::IsMember({"A", "B"}));

    struct Stage {
        const char* name;
        const char* help;
        AnalysisParts parts;
    };
    const Stage stages[] = {
        {"metrics", "Activity points, class divergences and before/after medians", {true, false, false}},
        {"ssr", "Segmented-regression jumps", {false, true, false}},
        {"bayes", "Bayesian switchpoint jumps", {false, false, true}},
        {"report", "Every analysis", {true, true, true}},
    };
    std::vector<std::pair<CLI::App*, AnalysisParts>> pipeline;
    for (const Stage& stage : stages) {
        auto* cmd = app.add_subcommand(stage.name, stage.help);
        cmd->add_option("--input", input, "JSONL timeline records")->required();
        cmd->add_option("--out", out, "Output directory")->required();
        if (stage.parts.bayes) {
            cmd->add_option("--solver", solver, "Overrides the configured solver")
                ->check(CLI::IsMember({"exact", "mcmc"}));
        }
        pipeline.emplace_back(cmd, stage.parts);
    }

    auto* sample = app.add_subcommand("sample", "Run the sampling procedure against a snapshot source");
    sample->add_option("--snapshot", snapshot, "JSON snapshot of the source")->required();
    sample->add_option("--out", out, "Output JSONL file")->required();
    sample->add_option("--target", target, "Ids per random set");
    sample->add_option("--cap", cap, "Posts per timeline")->check(CLI::Range(std::size_t{1}, MAX_TIMELINE_CAP));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? EXIT_OK : EXIT_FATAL;
    }

    try {
        if (*ingest_check) {
            return run_ingest_check(global, input);
        }
        if (*synth) {
            return run_synth(global, out, scenario);
        }
        if (*sample) {
            return run_sample(global, snapshot, out, target, cap);
        }
        for (const auto& [cmd, parts] : pipeline) {
            if (*cmd) {
                return run_pipeline(global, input, out, parts, solver);
            }
        }
    } catch (const AnalysisFailed& e) {
        for (const UserError& err : e.errors()) {
            std::cerr << fmt::format("user {}: {} failed: {}\n", err.user_id, err.stage, err.message);
        }
        std::cerr << "error: " << e.what() << '\n';
        return EXIT_FATAL;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return EXIT_FATAL;
    }
    return EXIT_FATAL;
}
