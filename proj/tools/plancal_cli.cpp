#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plancal/csv_io.hpp"
#include "plancal/report.hpp"

namespace fs = std::filesystem;
using plancal::ConfigError;

namespace {

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

std::string plane_csv_name(size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "plane_%02zu.csv", index + 1);
    return buf;
}

// One CSV per plane group; a directory expands to its *.csv files in name
// order so simulate output can be consumed directly. When the directory holds
// plane_*.csv files only those are taken, so a directory that also contains
// curve_*.csv from an earlier calibrate run stays usable as input.
std::vector<std::vector<plancal::Sample>> load_groups(const std::vector<std::string>& paths) {
    if (paths.empty()) {
        throw ConfigError(
            "samples: no input sample files given (set \"samples\" in the config or pass "
            "--samples)");
    }
    std::vector<fs::path> files;
    for (const auto& p : paths) {
        const fs::path path(p);
        if (fs::is_directory(path)) {
            std::vector<fs::path> found, planes;
            for (const auto& entry : fs::directory_iterator(path)) {
                if (entry.is_regular_file() && entry.path().extension() == ".csv") {
                    found.push_back(entry.path());
                    if (entry.path().filename().string().rfind("plane_", 0) == 0) {
                        planes.push_back(entry.path());
                    }
                }
            }
            if (!planes.empty()) found = std::move(planes);
            std::sort(found.begin(), found.end());
            if (found.empty()) throw ConfigError("samples: no .csv files in \"" + p + "\"");
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(path);
        }
    }
    std::vector<std::vector<plancal::Sample>> groups;
    for (const auto& f : files) groups.push_back(plancal::read_samples_csv(f));
    return groups;
}

void write_report_files(const fs::path& dir, const plancal::CalibrationReport& report,
                        const nlohmann::ordered_json& echo) {
    plancal::write_text_file(dir / ("report_" + report.method + ".json"),
                             dump(plancal::report_to_json(report, echo)));
    plancal::write_text_file(dir / ("curve_" + report.method + ".csv"),
                             plancal::curve_to_csv(report.objective_trace));
}

int cmd_simulate(const plancal::RunConfig& config) {
    const plancal::SimScenario scenario = plancal::make_scenario(config);
    const plancal::SimData data = plancal::generate(scenario);
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);
    int total = 0;
    for (size_t k = 0; k < data.groups.size(); ++k) {
        plancal::write_samples_csv(dir / plane_csv_name(k), data.groups[k].samples);
        total += static_cast<int>(data.groups[k].samples.size());
    }
    plancal::write_text_file(dir / "truth.json",
                             dump(plancal::truth_to_json(data, plancal::run_config_to_json(config))));
    std::cout << "wrote " << total << " samples across " << data.groups.size() << " planes to "
              << dir.string() << " (sigma_mm=" << plancal::format_double(config.sigma_mm)
              << ", seed=" << config.seed << ")\n";
    return 0;
}

void print_report_summary(const plancal::CalibrationReport& rep) {
    const double reduction =
        rep.val_before.rmse > 0.0 ? 100.0 * (1.0 - rep.val_after.rmse / rep.val_before.rmse) : 0.0;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "method %s: val RMSE %.6f -> %.6f mm (reduction %.1f%%), MAX %.6f -> %.6f mm, "
                  "%d iterations, %s\n",
                  rep.method.c_str(), rep.val_before.rmse, rep.val_after.rmse, reduction,
                  rep.val_before.max, rep.val_after.max, rep.iterations,
                  rep.converged ? "converged" : "NOT converged");
    std::cout << buf;
}

int cmd_calibrate(const plancal::RunConfig& config) {
    const auto groups = load_groups(config.sample_paths);
    const plancal::CalibrationReport report = plancal::calibrate(
        groups, config.nominal, config.method, config.calibration, config.seed);
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);
    write_report_files(dir, report, plancal::run_config_to_json(config));
    print_report_summary(report);
    std::cout << "wrote " << (dir / ("report_" + report.method + ".json")).string() << ", "
              << (dir / ("curve_" + report.method + ".csv")).string() << "\n";
    return report.converged ? 0 : 2;
}

int cmd_compare(const plancal::RunConfig& config) {
    const auto groups = load_groups(config.sample_paths);
    const plancal::CompareResult result = plancal::compare(
        groups, config.nominal, config.methods, config.calibration, config.seed);
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);
    const nlohmann::ordered_json echo = plancal::run_config_to_json(config);
    plancal::write_text_file(dir / "comparison.json",
                             dump(plancal::comparison_to_json(result, echo)));
    bool all_ok = true;
    for (size_t i = 0; i < result.reports.size(); ++i) {
        if (result.errors[i].empty()) {
            write_report_files(dir, result.reports[i], echo);
            all_ok = all_ok && result.reports[i].converged;
        } else {
            all_ok = false;
        }
    }
    std::cout << plancal::comparison_table_text(result);
    std::cout << "wrote " << (dir / "comparison.json").string() << "\n";
    return all_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"plane-constrained robot kinematic calibration toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_dir;
    std::string method;
    std::vector<std::string> methods;
    std::vector<std::string> sample_paths;
    int sim_samples = 0;

    CLI::App* sim = app.add_subcommand("simulate", "generate synthetic dial-indicator samples");
    sim->add_option("--config", config_path, "JSON config file")->required();
    sim->add_option("--seed", seed, "override config seed");
    sim->add_option("--out", out_dir, "override output directory");
    sim->add_option("--samples", sim_samples, "override per-plane sample count");

    CLI::App* cal = app.add_subcommand("calibrate", "identify parameter errors from samples");
    cal->add_option("--config", config_path, "JSON config file");
    cal->add_option("--seed", seed, "override config seed");
    cal->add_option("--out", out_dir, "override output directory");
    cal->add_option("--method", method, "ekf | sckf | lm | sckf_lm");
    cal->add_option("--samples", sample_paths, "sample CSV file(s) or a directory of them");

    CLI::App* cmp = app.add_subcommand("compare", "run several methods on identical samples");
    cmp->add_option("--config", config_path, "JSON config file");
    cmp->add_option("--seed", seed, "override config seed");
    cmp->add_option("--out", out_dir, "override output directory");
    cmp->add_option("--method", methods, "methods to compare (repeatable)");
    cmp->add_option("--samples", sample_paths, "sample CSV file(s) or a directory of them");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    seed_given = sim->count("--seed") + cal->count("--seed") + cmp->count("--seed") > 0;

    try {
        plancal::RunConfig config;
        if (!config_path.empty()) {
            config = plancal::parse_run_config(plancal::read_text_file(config_path));
        }
        if (seed_given) config.seed = seed;
        if (!out_dir.empty()) config.output_dir = out_dir;
        if (!method.empty()) config.method = plancal::method_from_string(method);
        if (!methods.empty()) {
            config.methods.clear();
            for (const auto& m : methods) config.methods.push_back(plancal::method_from_string(m));
        }
        if (!sample_paths.empty()) config.sample_paths = sample_paths;

        if (sim->parsed()) {
            if (sim_samples > 0) {
                for (auto& p : config.placements) p.n_samples = sim_samples;
            } else if (sim->count("--samples") > 0) {
                throw ConfigError("--samples: must be >= 1");
            }
            return cmd_simulate(config);
        }
        if (cal->parsed()) return cmd_calibrate(config);
        return cmd_compare(config);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const plancal::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
