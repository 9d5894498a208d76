#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cuspflow/config.hpp"
#include "cuspflow/error.hpp"
#include "cuspflow/pipeline.hpp"

using namespace cuspflow;

namespace {

RunConfig config_from(const std::string& path, const std::string& out) {
    RunConfig c = path.empty() ? RunConfig{} : load_config(path);
    if (!out.empty()) c.output_dir = out;
    validate_config(c);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Euler cusp blow-up simulator and certificate toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out;
    std::vector<std::string> report_dirs;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration (defaults when omitted)");
        sub->add_option("--out", out, "output directory (overrides output_dir)");
    };
    CLI::App* validate = app.add_subcommand("validate", "closed-form oracle suite");
    add_common(validate);
    CLI::App* certify_cmd = app.add_subcommand("certify", "compute and check the blow-up constants");
    add_common(certify_cmd);
    CLI::App* run = app.add_subcommand("run", "simulate the transit of the boundary marker");
    add_common(run);
    CLI::App* report = app.add_subcommand("report", "summarize one run or compare several");
    report->add_option("--config", config_path, "unused; accepted for symmetry");
    report->add_option("--out", report_dirs, "output directories")->required();
    CLI::App* defaults = app.add_subcommand("defaults", "print the default configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitBadInput;
    }

    try {
        if (*defaults) {
            std::cout << serialize_config(RunConfig{});
            return kExitOk;
        }
        if (*report) {
            std::vector<std::filesystem::path> dirs(report_dirs.begin(), report_dirs.end());
            return cmd_report(dirs, std::cout);
        }
        const RunConfig c = config_from(config_path, out);
        if (*validate) return cmd_validate(c, std::cout);
        if (*certify_cmd) return cmd_certify(c, c.output_dir, std::cout);
        if (*run) return cmd_run(c, c.output_dir, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const CertificateFailure& e) {
        std::cerr << "certificate check failed: " << e.what() << "\n";
        return kExitCheckFailed;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}
