// Command line front end for the imaging pipeline.
//
//   uwbim simulate   --config cfg.txt --displacement 20 --seed 7 --out scan.txt
//   uwbim migrate    --config cfg.txt --algorithm kirchhoff --in scan.txt --out image.txt
//   uwbim analyze    --config cfg.txt --in image.txt --out report.txt --gray-out opened.pgm
//   uwbim compare    --baseline base.txt --state state.txt --actual 20 --out disp.txt
//   uwbim experiment --config cfg.txt --algorithm both --out-dir results/
//
// Exit codes: 0 success, 2 I/O failure, 3 parse failure, 4 no reference strip.

#include "uwbim/uwbim.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

std::optional<uwbim::Algorithm> parse_algorithm_flag(const std::string& name) {
    if (name.empty()) return std::nullopt;
    return uwbim::algorithm_from_string(name);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ultra-wideband radar imaging of winding axial displacement"};
    app.require_subcommand(1);

    std::string config_path;
    std::string in_path;
    std::string out_path;
    std::string gray_out_path;
    std::string algorithm_name;
    std::string baseline_path;
    std::string state_path;
    std::string out_dir;
    double displacement_mm = 0.0;
    std::optional<std::uint64_t> seed;
    std::optional<double> actual_mm;

    auto* simulate = app.add_subcommand("simulate", "Record a synthetic B-scan of the scene");
    simulate->add_option("--config", config_path, "pipeline configuration file");
    simulate->add_option("--displacement", displacement_mm, "axial displacement of the scene in mm");
    simulate->add_option("--seed", seed, "noise seed (overrides the configured one)");
    simulate->add_option("--out", out_path, "output B-scan file")->required();

    auto* migrate = app.add_subcommand("migrate", "Focus a B-scan into an image");
    migrate->add_option("--config", config_path, "pipeline configuration file");
    migrate->add_option("--algorithm", algorithm_name, "kirchhoff or das (overrides the configured one)")
        ->check(CLI::IsMember({"kirchhoff", "das"}));
    migrate->add_option("--in", in_path, "input B-scan file")->required();
    migrate->add_option("--out", out_path, "output image file")->required();
    migrate->add_option("--gray-out", gray_out_path, "also write the normalized image as PGM");

    auto* analyze = app.add_subcommand("analyze", "Extract the reference strip from an image");
    analyze->add_option("--config", config_path, "pipeline configuration file");
    analyze->add_option("--in", in_path, "input image file")->required();
    analyze->add_option("--out", out_path, "output strip report")->required();
    analyze->add_option("--gray-out", gray_out_path, "also write the opened grayscale image as PGM");

    auto* compare = app.add_subcommand("compare", "Displacement between two strip reports");
    compare->add_option("--baseline", baseline_path, "baseline strip report")->required();
    compare->add_option("--state", state_path, "displaced-state strip report")->required();
    compare->add_option("--actual", actual_mm, "actual displacement in mm, for the error percentage");
    compare->add_option("--out", out_path, "output displacement report (also printed)");

    auto* experiment = app.add_subcommand("experiment", "Baseline plus three displaced states, end to end");
    experiment->add_option("--config", config_path, "pipeline configuration file");
    experiment->add_option("--algorithm", algorithm_name, "kirchhoff, das or both (default both)")
        ->check(CLI::IsMember({"kirchhoff", "das", "both"}));
    experiment->add_option("--seed", seed, "noise seed (overrides the configured one)");
    experiment->add_option("--out-dir", out_dir, "directory for per-state reports");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed())
            return uwbim::cmd_simulate({config_path, displacement_mm, seed, out_path}, std::cout,
                                       std::cerr);
        if (migrate->parsed())
            return uwbim::cmd_migrate(
                {config_path, parse_algorithm_flag(algorithm_name), in_path, out_path, gray_out_path},
                std::cout, std::cerr);
        if (analyze->parsed())
            return uwbim::cmd_analyze({config_path, in_path, out_path, gray_out_path}, std::cout,
                                      std::cerr);
        if (compare->parsed())
            return uwbim::cmd_compare({baseline_path, state_path, actual_mm, out_path}, std::cout,
                                      std::cerr);
        if (experiment->parsed())
            return uwbim::cmd_experiment(
                {config_path, algorithm_name.empty() ? "both" : algorithm_name, seed, out_dir},
                std::cout, std::cerr);
    } catch (const uwbim::ParseError& e) {
        // a bad --algorithm value surfaces here, before the command body runs
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
