// mvbm: command-line front end.
//
//   mvbm solve <instance.json> --mech {bfs,dfs,ap,rbfs}
//   mvbm gen --n 20 --m 30 --p 0.6 --b-low 3 --b-high 3 --seed 1 [--count 10 --out dir]
//   mvbm audit {agents,tasks} <instance.json> --mech bfs --setting {ems,ecms,evms}
//   mvbm experiment <kind> [--config cfg.json] [--fast] [--csv f] [--json f] [--svg f]
//   mvbm fixtures
//
// Exit codes: 0 ok, 1 violation found, 2 usage or input error.

#include "mvbm/core.hpp"
#include "mvbm/fixtures.hpp"
#include "mvbm/gen.hpp"
#include "mvbm/harness.hpp"
#include "mvbm/io.hpp"
#include "mvbm/mechanisms.hpp"
#include "mvbm/oracle.hpp"
#include "mvbm/parallel.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

int cmd_solve(const std::string& path, const std::string& mech, std::uint64_t seed) {
    using namespace mvbm;
    Instance inst = load_instance(path);
    auto violations = validate_instance(inst);
    if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << to_string(v.kind) << ": " << v.where << "\n";
        return kViolation;
    }
    MechanismKind kind = mechanism_from_string(mech);
    Matching mu = kind == MechanismKind::MrBFS ? run_mechanism(kind, Profile::truthful_agents(inst), seed)
                                               : run_on_instance(kind, inst);
    nlohmann::json out = {{"mechanism", to_string(kind)},
                          {"matching", matching_to_json(mu)},
                          {"formatted", format_matching(mu)},
                          {"weight", matching_weight(inst, mu)},
                          {"utilities", agent_utilities(inst, mu)}};
    std::cout << out.dump(2) << "\n";
    return kOk;
}

int cmd_gen(const mvbm::GenConfig& cfg, std::size_t count, std::uint64_t first, const std::string& out_dir) {
    using namespace mvbm;
    validate_gen_config(cfg);
    if (out_dir.empty()) {
        if (count != 1) throw Error("gen: --out is required when --count > 1");
        std::cout << instance_to_json(generate_instance(cfg, first)).dump() << "\n";
        return kOk;
    }
    std::filesystem::create_directories(out_dir);
    nlohmann::json manifest = {{"config", gen_config_to_json(cfg)}, {"instances", nlohmann::json::array()}};
    for (std::size_t k = 0; k < count; ++k) {
        const std::uint64_t index = first + k;
        const std::string name = "instance_" + std::to_string(index) + ".json";
        save_instance(generate_instance(cfg, index), std::filesystem::path(out_dir) / name);
        manifest["instances"].push_back({{"seed", cfg.seed}, {"index", index}, {"file", name}});
    }
    write_text_file(std::filesystem::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
    return kOk;
}

int cmd_audit(const std::string& side, const std::string& path, const std::string& mech,
              const std::string& setting_name, const std::vector<double>& grid, std::size_t coalition) {
    using namespace mvbm;
    Instance inst = load_instance(path);
    if (!validate_instance(inst).empty()) throw Error("audit: invalid instance");
    MechanismKind kind = mechanism_from_string(mech);
    Setting setting = setting_from_string(setting_name);
    std::vector<Deviation> devs = side == "agents" ? audit_agent_truthfulness(inst, kind, setting)
                                                   : audit_task_truthfulness(inst, kind, setting, grid);
    nlohmann::json out = {{"side", side},
                          {"mechanism", to_string(kind)},
                          {"setting", to_string(setting)},
                          {"deviations", audit_report_to_json(devs)}};
    bool found = !devs.empty();
    if (coalition > 0) {
        auto c = side == "agents" ? find_agent_coalition(inst, kind, coalition)
                                  : find_task_coalition(inst, kind, coalition);
        out["coalition"] = c ? coalition_to_json(*c) : nlohmann::json(nullptr);
        found = found || c.has_value();
    }
    std::cout << out.dump(2) << "\n";
    return found ? kViolation : kOk;
}

int cmd_experiment(const std::string& kind_name, const std::string& config_path, bool fast,
                   const std::string& csv, const std::string& json, const std::string& svg, int workers) {
    using namespace mvbm;
    ExperimentKind kind = experiment_from_string(kind_name);
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig::defaults(kind)
                                               : experiment_config_from_json(read_json_file(config_path), kind);
    if (fast) cfg.iterations = kFastIterations;
    if (!csv.empty()) cfg.csv_path = csv;
    if (!json.empty()) cfg.json_path = json;
    if (!svg.empty()) cfg.svg_path = svg;
    validate_experiment_config(cfg);
    if (cfg.svg_path && cfg.kind != ExperimentKind::MpugCurve) throw Error("--svg needs the mpug-curve experiment");

    ResultsTable table = run_experiment(cfg, workers > 0 ? workers : default_workers());
    if (cfg.csv_path) export_results(table, ExportFormat::Csv, *cfg.csv_path);
    if (cfg.json_path) export_results(table, ExportFormat::Json, *cfg.json_path);
    if (cfg.svg_path) render_plot(table, *cfg.svg_path);
    if (!cfg.csv_path && !cfg.json_path) std::cout << results_to_csv(table);
    return kOk;
}

int cmd_fixtures() {
    auto results = mvbm::fixtures::run_fixtures();
    int failed = 0;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.actual;
        if (!r.pass) std::cout << " (expected " << r.expected << ")";
        std::cout << "\n";
        failed += r.pass ? 0 : 1;
    }
    std::cout << results.size() - failed << "/" << results.size() << " fixtures match\n";
    return failed == 0 ? kOk : kViolation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maximum vertex-weighted b-matching: solvers, mechanisms and experiments"};
    app.require_subcommand(1);

    auto* solve = app.add_subcommand("solve", "Solve an instance with one mechanism");
    std::string solve_path, solve_mech = "bfs";
    std::uint64_t solve_seed = 1;
    solve->add_option("instance", solve_path, "Instance JSON")->required()->check(CLI::ExistingFile);
    solve->add_option("--mech", solve_mech, "bfs, dfs, ap or rbfs")->check(CLI::IsMember({"bfs", "dfs", "ap", "rbfs"}));
    solve->add_option("--seed", solve_seed, "Lottery seed for rbfs");

    auto* gen = app.add_subcommand("gen", "Generate random instances");
    mvbm::GenConfig gcfg;
    std::size_t gen_count = 1;
    std::uint64_t gen_first = 0;
    std::string gen_out;
    gen->add_option("--n", gcfg.n, "Agents")->required();
    gen->add_option("--m", gcfg.m, "Tasks")->required();
    gen->add_option("--p", gcfg.p, "Edge probability")->required();
    gen->add_option("--b-low", gcfg.capacity_low, "Lowest capacity");
    gen->add_option("--b-high", gcfg.capacity_high, "Highest capacity");
    gen->add_option("--value-mean", gcfg.value_mean, "Mean of the value Gaussian");
    gen->add_option("--value-sigma", gcfg.value_sigma, "Standard deviation of the value Gaussian");
    gen->add_option("--seed", gcfg.seed, "Stream seed");
    gen->add_option("--count", gen_count, "Number of instances");
    gen->add_option("--index", gen_first, "Index of the first instance");
    gen->add_option("--out", gen_out, "Output directory (instance files plus manifest.json)");

    auto* audit = app.add_subcommand("audit", "Exhaustive truthfulness audit of one instance");
    std::string audit_side, audit_path, audit_mech = "bfs", audit_setting = "ems";
    std::vector<double> audit_grid{1.0, 0.5, 0.25};
    std::size_t audit_coalition = 0;
    audit->add_option("side", audit_side, "agents or tasks")->required()->check(CLI::IsMember({"agents", "tasks"}));
    audit->add_option("instance", audit_path, "Instance JSON")->required()->check(CLI::ExistingFile);
    audit->add_option("--mech", audit_mech, "bfs, dfs or ap")->check(CLI::IsMember({"bfs", "dfs", "ap"}));
    audit->add_option("--setting", audit_setting, "ems, ecms or evms")->check(CLI::IsMember({"ems", "ecms", "evms"}));
    audit->add_option("--grid", audit_grid, "Value fractions for evms");
    audit->add_option("--coalition", audit_coalition, "Also search coalitions up to this size");

    auto* exp = app.add_subcommand("experiment", "Run an experiment grid");
    std::string exp_kind, exp_config, exp_csv, exp_json, exp_svg;
    bool exp_fast = false;
    int exp_workers = 0;
    exp->add_option("kind", exp_kind, "compare-first-agent, mpug-curve, pma-pmi or randomized-vs-deterministic")
        ->required()
        ->check(CLI::IsMember({"compare-first-agent", "mpug-curve", "pma-pmi", "randomized-vs-deterministic"}));
    exp->add_option("--config", exp_config, "Experiment config JSON")->check(CLI::ExistingFile);
    exp->add_flag("--fast", exp_fast, "Use 50 iterations per cell");
    exp->add_option("--csv", exp_csv, "Write CSV here");
    exp->add_option("--json", exp_json, "Write JSON here");
    exp->add_option("--svg", exp_svg, "Write the SVG plot here (mpug-curve)");
    exp->add_option("--workers", exp_workers, std::string("Worker threads (default: ") + mvbm::kWorkersEnv +
                                                  " or all cores)");

    app.add_subcommand("fixtures", "Replay the worked examples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*solve) return cmd_solve(solve_path, solve_mech, solve_seed);
        if (*gen) return cmd_gen(gcfg, gen_count, gen_first, gen_out);
        if (*audit) return cmd_audit(audit_side, audit_path, audit_mech, audit_setting, audit_grid, audit_coalition);
        if (*exp) return cmd_experiment(exp_kind, exp_config, exp_fast, exp_csv, exp_json, exp_svg, exp_workers);
        return cmd_fixtures();
    } catch (const std::exception& ex) {
        std::cerr << "mvbm: " << ex.what() << "\n";
        return kUsage;
    }
}
