// dichotomy-lab: command-line front end for the analysis pipeline.
//
// Exit codes: 0 every verdict passed, 1 some verdict failed, 2 usage,
// I/O or spec-load error.

#include "dichotomy/analysis.hpp"
#include "dichotomy/parallel.hpp"
#include "dichotomy/spec.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kError = 2;

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return static_cast<bool>(out);
}

std::size_t workers_from_env() {
    const char* env = std::getenv("DICHOTOMY_LAB_THREADS");
    if (!env) return 0;
    if (auto n = dichotomy::parse_thread_count(env)) return *n;
    std::cerr << "warning: ignoring DICHOTOMY_LAB_THREADS='" << env << "' (expected a positive integer)\n";
    return 0;
}

int analyze(const std::string& spec_path, const std::string& out_path, const std::string& csv_path,
            std::uint64_t seed) {
    const auto spec = dichotomy::load_spec(spec_path);
    dichotomy::AnalysisOptions options;
    options.seed = seed;
    options.workers = workers_from_env();
    const auto result = dichotomy::run_analysis(spec, options);
    const std::string text = result.report.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else if (!write_file(out_path, text)) {
        std::cerr << "error: cannot write report to '" << out_path << "'\n";
        return kError;
    }
    if (!csv_path.empty()) {
        if (!result.samples) {
            std::cerr << "warning: no sample table was produced; '" << csv_path << "' not written\n";
        } else if (!write_file(csv_path, result.samples->to_csv())) {
            std::cerr << "error: cannot write samples to '" << csv_path << "'\n";
            return kError;
        }
    }
    std::cerr << "verdict: " << (result.pass ? "pass" : "fail") << "\n";
    return result.pass ? kPass : kFail;
}

int verify(const std::string& spec_path, const std::string& cert_path, const std::string& out_path) {
    const auto spec = dichotomy::load_spec(spec_path);
    std::ifstream in(cert_path, std::ios::binary);
    if (!in) throw dichotomy::SpecIOError("cannot open certificate file '" + cert_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw dichotomy::SpecError("", std::string("invalid certificate JSON: ") + e.what());
    }
    const auto cert = dichotomy::parse_certificate(doc);
    const auto result = dichotomy::run_verify(spec, cert);
    const std::string text = result.report.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else if (!write_file(out_path, text)) {
        std::cerr << "error: cannot write report to '" << out_path << "'\n";
        return kError;
    }
    std::cerr << "verdict: " << (result.pass ? "pass" : "fail") << "\n";
    return result.pass ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for nonuniform mu-dichotomies of linear evolution operators"};
    app.set_version_flag("--version", std::string("dichotomy-lab ") + dichotomy::toolkit_version());
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_path;
    std::string csv_path;
    std::string cert_path;
    std::uint64_t seed = dichotomy::kDefaultSeed;

    auto* analyze_cmd = app.add_subcommand("analyze", "Run the full pipeline on a spec and emit a JSON report");
    analyze_cmd->add_option("--spec", spec_path, "System spec (JSON)")->required();
    analyze_cmd->add_option("--out", out_path, "Report path (default: stdout)");
    analyze_cmd->add_option("--csv", csv_path, "Write the norm sample table as CSV");
    analyze_cmd->add_option("--seed", seed, "Seed for randomized samples")->capture_default_str();

    auto* verify_cmd = app.add_subcommand("verify", "Check a dichotomy certificate against a spec's system");
    verify_cmd->add_option("--spec", spec_path, "System spec (JSON)")->required();
    verify_cmd->add_option("--certificate", cert_path, "Certificate {a, b, epsilon, N1, N2} (JSON)")->required();
    verify_cmd->add_option("--out", out_path, "Report path (default: stdout)");

    auto* list_cmd = app.add_subcommand("list-builtins", "List preset growth rates and operators");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kError;
    }

    try {
        if (*list_cmd) {
            for (const auto& line : dichotomy::builtin_descriptions()) std::cout << line << "\n";
            return kPass;
        }
        if (*analyze_cmd) return analyze(spec_path, out_path, csv_path, seed);
        if (*verify_cmd) return verify(spec_path, cert_path, out_path);
    } catch (const dichotomy::SpecError& e) {
        std::cerr << "error: invalid spec at " << (e.pointer().empty() ? "/" : e.pointer()) << ": " << e.constraint()
                  << "\n";
        return kError;
    } catch (const dichotomy::SpecIOError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
