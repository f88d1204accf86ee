#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "randfix/commands.hpp"
#include "randfix/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"scenario-driven certification and solving of random contraction operators"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_flag;
    std::vector<std::string> report_paths;

    CLI::App* validate = app.add_subcommand("validate", "run the full hypothesis audit");
    validate->add_option("scenario", scenario_path, "scenario file")->required();
    validate->add_option("--out", out_flag, "output directory");

    CLI::App* solve =
        app.add_subcommand("solve", "iterate to the fixed point and run diagnostics");
    solve->add_option("scenario", scenario_path, "scenario file")->required();
    solve->add_option("--out", out_flag, "output directory");

    CLI::App* certify = app.add_subcommand("certify", "run the lemma-level oracles");
    certify->add_option("scenario", scenario_path, "scenario file")->required();
    certify->add_option("--out", out_flag, "output directory");

    CLI::App* report = app.add_subcommand("report", "merge reports into one summary table");
    report->add_option("files", report_paths, "report files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : randfix::kExitUsage;
    }

    try {
        if (report->parsed()) return randfix::cmd_report(report_paths, std::cout);
        const std::string out_dir = randfix::resolve_out_dir(out_flag);
        const randfix::Scenario sc = randfix::Scenario::load(scenario_path);
        if (validate->parsed()) return randfix::cmd_validate(sc, out_dir);
        if (solve->parsed()) return randfix::cmd_solve(sc, out_dir);
        return randfix::cmd_certify(sc, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return randfix::kExitData;
    }
}
