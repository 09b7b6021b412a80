#include "resvol/cli.hpp"

#include <CLI11.hpp>

#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "resvol/config.hpp"
#include "resvol/error.hpp"
#include "resvol/pipeline.hpp"

namespace resvol {

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitPipeline = 4;

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return kExitConfig;
        case ErrorKind::Input: return kExitInput;
        case ErrorKind::Pipeline: return kExitPipeline;
    }
    return kExitPipeline;
}

std::string one_line(std::string s) {
    for (char& ch : s)
        if (ch == '\n' || ch == '\r') ch = ' ';
    return s;
}

using Command = std::function<std::string(const RunConfig&)>;

const std::map<std::string, std::pair<const char*, Command>>& commands() {
    static const std::map<std::string, std::pair<const char*, Command>> table = {
        {"segment",
         {"Segment every manifest scene and tabulate water area",
          [](const RunConfig& c) {
              const auto run = cmd_segment(c);
              return std::to_string(run.records.size()) + " scenes segmented, " +
                     std::to_string(run.unusable.size()) + " unusable";
          }}},
        {"hypso",
         {"Interpolate soundings and build the level-area-volume curve",
          [](const RunConfig& c) {
              const auto curve = cmd_hypso(c);
              return std::to_string(curve.rows().size()) + " curve rows";
          }}},
        {"train",
         {"Grid-search and fit the fraction-to-volume regressor",
          [](const RunConfig& c) {
              const auto t = cmd_train(c);
              return std::to_string(t.model.support_inputs.size()) + " support vectors";
          }}},
        {"predict",
         {"Estimate volume for every segmented scene",
          [](const RunConfig& c) { return std::to_string(cmd_predict(c).size()) + " series rows"; }}},
        {"evaluate",
         {"Score the series against a truth CSV",
          [](const RunConfig& c) {
              const auto m = cmd_evaluate(c);
              return std::string("n=") + std::to_string(m.n) + (m.verdicts.all() ? " all thresholds met" : " thresholds not met");
          }}},
        {"persistence",
         {"Classify per-pixel water persistence by year",
          [](const RunConfig& c) { return std::to_string(cmd_persistence(c).size()) + " persistence maps"; }}},
        {"synth",
         {"Write a synthetic reservoir fixture",
          [](const RunConfig& c) {
              cmd_synth(c);
              return std::string("fixture written");
          }}},
        {"run",
         {"Run segment, hypso, train, predict, evaluate, persistence and report",
          [](const RunConfig& c) {
              cmd_run(c);
              return std::string("pipeline complete");
          }}},
        {"report",
         {"Render the HTML report from existing outputs",
          [](const RunConfig& c) {
              cmd_report(c);
              return std::string("report written");
          }}},
    };
    return table;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Reservoir volume estimation from multispectral imagery"};
    app.name("resvol");
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "Key-value configuration file");
    app.add_option("--out", out_dir, "Output directory (overrides `out`)");
    app.add_option("--seed", seed, "Random seed (overrides `seed`)");

    std::string chosen;
    for (const auto& [name, entry] : commands()) {
        app.add_subcommand(name, entry.first)->callback([&chosen, n = name] { chosen = n; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "resvol: error: " << one_line(e.what()) << '\n';
        return kExitConfig;
    }

    try {
        RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (seed) config.seed = *seed;
        const std::string summary = commands().at(chosen).second(config);
        out << "resvol " << chosen << ": " << summary << " (" << config.out_dir.string() << ")\n";
        return 0;
    } catch (const Error& e) {
        err << "resvol " << chosen << ": error: " << one_line(e.what()) << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "resvol " << chosen << ": error: " << one_line(e.what()) << '\n';
        return kExitPipeline;
    }
}

}  // namespace resvol
