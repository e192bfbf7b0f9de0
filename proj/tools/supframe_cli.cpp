// Command-line front end: loads a scenario, runs the requested
// experiment and writes a machine-readable report (plus optional grid
// dumps).  Exit code 0 when every check matches its expectation, 1 on
// check failures, 2 on usage or configuration problems.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "supframe/scenario.hpp"

namespace {

using supframe::FieldDump;
using supframe::RunResult;
using supframe::ScenarioConfig;

struct CommonArgs {
    std::string scenario_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed_override;
};

ScenarioConfig load(const CommonArgs& args) {
    ScenarioConfig cfg = supframe::parse_scenario(args.scenario_path);
    if (args.seed_override) {
        cfg.seed = *args.seed_override;
        cfg.echo["seed"] = cfg.seed;
    }
    return cfg;
}

void print_summary(const RunResult& result) {
    for (const auto& c : result.checks) {
        const char* status = c.as_expected() ? (c.pass ? "PASS" : "XFAIL") : "FAIL";
        std::printf("[%s] %s: value=%.6g target=%.6g tolerance=%.6g\n", status,
                    c.name.c_str(), c.value, c.target, c.tolerance);
    }
    std::printf("%s: %s\n", result.command.c_str(),
                result.all_ok() ? "all checks as expected" : "CHECK FAILURE");
}

std::vector<FieldDump> invariance_dumps(const ScenarioConfig& cfg) {
    std::vector<FieldDump> dumps;
    if (std::find(cfg.outputs.begin(), cfg.outputs.end(), "fields") == cfg.outputs.end())
        return dumps;
    const supframe::WaveField psi0 = cfg.initial_state->build(*cfg.potential);
    dumps.push_back({"initial", psi0});
    dumps.push_back({"evolved", supframe::evolve(psi0, *cfg.potential, *cfg.evolution)});
    dumps.push_back({"transformed",
                     supframe::transform_field(psi0, cfg.superpositions.front())});
    return dumps;
}

int finish(const RunResult& result, const std::string& out_dir,
           const std::vector<FieldDump>& dumps = {}) {
    supframe::emit_outputs(result, out_dir, dumps);
    print_summary(result);
    return result.all_ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"superposed reference frame experiments"};
    app.require_subcommand(1);

    CommonArgs args;
    std::uint64_t n = 100000;
    std::uint64_t trials = 100;
    std::uint64_t appendix_seed = 1;
    std::string group = "S3";

    auto add_common = [&](CLI::App* cmd, bool needs_scenario = true) {
        if (needs_scenario)
            cmd->add_option("--scenario", args.scenario_path, "scenario JSON path")
                ->required();
        cmd->add_option("--out", args.out_dir, "output directory");
        cmd->add_option("--seed", args.seed_override, "override the scenario seed");
    };

    CLI::App* compose = app.add_subcommand("compose", "compose the scenario's frame chain");
    add_common(compose);

    CLI::App* sample = app.add_subcommand("sample", "Born-rule sampling experiment");
    add_common(sample);
    sample->add_option("--n", n, "number of draws");

    CLI::App* invariance =
        app.add_subcommand("invariance", "evolution/transform commutation checks");
    add_common(invariance);

    CLI::App* appendix =
        app.add_subcommand("verify-appendix", "finite-group composition checks");
    appendix->add_option("--group", group, "group name (see report for the catalog)");
    appendix->add_option("--trials", trials, "random amplitude pairs per group");
    appendix->add_option("--seed", appendix_seed, "RNG seed");
    appendix->add_option("--out", args.out_dir, "output directory");

    CLI::App* all = app.add_subcommand("all", "compose + sample + invariance + appendix");
    add_common(all);
    all->add_option("--n", n, "number of draws");
    all->add_option("--trials", trials, "random amplitude pairs per group");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (compose->parsed()) return finish(supframe::run_compose(load(args)), args.out_dir);
        if (sample->parsed())
            return finish(supframe::run_sample(load(args), n), args.out_dir);
        if (invariance->parsed()) {
            const ScenarioConfig cfg = load(args);
            return finish(supframe::run_invariance(cfg), args.out_dir,
                          invariance_dumps(cfg));
        }
        if (appendix->parsed())
            return finish(supframe::run_appendix_verification(group, trials, appendix_seed),
                          args.out_dir);
        if (all->parsed()) {
            const ScenarioConfig cfg = load(args);
            int rc = 0;
            if (cfg.frames.size() >= 3)
                rc |= finish(supframe::run_compose(cfg), args.out_dir + "/compose");
            rc |= finish(supframe::run_sample(cfg, n), args.out_dir + "/sample");
            if (cfg.initial_state && cfg.potential && cfg.evolution)
                rc |= finish(supframe::run_invariance(cfg), args.out_dir + "/invariance",
                             invariance_dumps(cfg));
            for (const std::string& g : {"C4", "D4", "S3", "S4", "cube"})
                rc |= finish(supframe::run_appendix_verification(g, trials, cfg.seed),
                             args.out_dir + "/appendix_" + g);
            return rc;
        }
    } catch (const supframe::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
