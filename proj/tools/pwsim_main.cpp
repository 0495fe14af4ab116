// pwsim — batch runner for pilot-wave simulation scenarios.
//
// Verbs:
//   run <config.json>      execute a scenario and emit outputs + manifest
//   validate <config.json> check a config, listing every violation
//   resume <checkpoint>    continue a checkpointed run to completion
//   report <manifest.json> print a run summary
//
// Exit codes: 0 pass, 1 assertion failure, 2 usage/config error, 3 numeric
// failure.

#include <CLI11.hpp>

#include <iostream>

#include "pwsim/config.hpp"
#include "pwsim/scenario.hpp"
#include "pwsim/version.hpp"

namespace {

int status_code(pwsim::RunStatus s) { return static_cast<int>(s); }

int do_run(const std::string& config_path, const pwsim::RunOverrides& overrides) {
    const pwsim::ParseResult parsed = pwsim::parse_config(config_path);
    if (!parsed.ok()) {
        std::cerr << "config errors in " << config_path << ":\n";
        for (const std::string& e : parsed.errors) std::cerr << "  " << e << "\n";
        return 2;
    }
    const pwsim::RunResult result = pwsim::run_scenario(*parsed.config, overrides);
    std::cout << pwsim::summarize_manifest(result.manifest_path);
    return status_code(result.status);
}

int do_validate(const std::string& config_path) {
    const pwsim::ParseResult parsed = pwsim::parse_config(config_path);
    if (!parsed.ok()) {
        std::cerr << "config errors in " << config_path << ":\n";
        for (const std::string& e : parsed.errors) std::cerr << "  " << e << "\n";
        return 2;
    }
    std::cout << "ok: " << config_path << " (scenario "
              << pwsim::to_string(parsed.config->kind) << ", hash "
              << pwsim::config_hash(*parsed.config) << ")\n";
    return 0;
}

int do_resume(const std::string& checkpoint_path, const pwsim::RunOverrides& overrides) {
    const pwsim::RunResult result = pwsim::resume_scenario(checkpoint_path, overrides);
    std::cout << pwsim::summarize_manifest(result.manifest_path);
    return status_code(result.status);
}

int do_report(const std::string& manifest_path) {
    std::cout << pwsim::summarize_manifest(manifest_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pwsim: pilot-wave dynamics simulator"};
    app.set_version_flag("--version", pwsim::kVersion);
    app.require_subcommand(1);

    std::string path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 0;

    auto add_overrides = [&](CLI::App* sub) {
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed, "ensemble seed (overrides config)");
        sub->add_option("--threads", threads, "worker threads for trajectory integration");
    };

    CLI::App* run = app.add_subcommand("run", "execute a scenario config");
    run->add_option("config", path, "scenario JSON")->required();
    add_overrides(run);

    CLI::App* validate = app.add_subcommand("validate", "validate a scenario config");
    validate->add_option("config", path, "scenario JSON")->required();

    CLI::App* resume = app.add_subcommand("resume", "continue from a checkpoint");
    resume->add_option("checkpoint", path, "checkpoint file")->required();
    add_overrides(resume);

    CLI::App* report = app.add_subcommand("report", "summarize a run manifest");
    report->add_option("manifest", path, "manifest JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    pwsim::RunOverrides overrides;
    if (!out_dir.empty()) overrides.out_dir = out_dir;
    if (run->count("--seed") || resume->count("--seed")) overrides.seed = seed;
    if (threads > 0) overrides.threads = threads;

    try {
        if (app.got_subcommand(run)) return do_run(path, overrides);
        if (app.got_subcommand(validate)) return do_validate(path);
        if (app.got_subcommand(resume)) return do_resume(path, overrides);
        if (app.got_subcommand(report)) return do_report(path);
    } catch (const pwsim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
