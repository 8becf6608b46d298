// lab: verification runs for spectral bounds of spacelike immersions.
//
// Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spacelike/errors.hpp"
#include "spacelike/report.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw spacelike::UsageError("cannot write " + path);
    out << text;
}

std::vector<int> parse_levels(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw spacelike::UsageError("bad level: " + item);
        }
    }
    return out;
}

std::vector<std::string> parse_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct Flags {
    std::string config;
    std::string case_name;
    int n = 0;
    int level = 0;
    int samples = 0;
    std::uint64_t seed = 0;
    std::int64_t mc_samples = 0;
    double bound_tol = 0;
    double equality_tol = 0;
    std::string spec;
    std::string out;
    std::string format;
    bool timings = false;
};

struct Options {
    CLI::Option* case_name = nullptr;
    CLI::Option* n = nullptr;
    CLI::Option* level = nullptr;
    CLI::Option* samples = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* mc_samples = nullptr;
    CLI::Option* bound_tol = nullptr;
    CLI::Option* equality_tol = nullptr;
    CLI::Option* spec = nullptr;
    CLI::Option* out = nullptr;
    CLI::Option* format = nullptr;
    CLI::Option* timings = nullptr;
};

Options add_common(CLI::App* app, Flags& f, bool per_case) {
    Options o;
    app->add_option("--config", f.config, "JSON config file; flags override its values");
    if (per_case) {
        o.case_name = app->add_option("--case", f.case_name, "case name");
        o.level = app->add_option("--level", f.level, "mesh refinement level");
        o.format = app->add_option("--format", f.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    }
    o.n = app->add_option("--n", f.n, "intrinsic dimension (1 or 2)");
    o.samples = app->add_option("--samples", f.samples, "number of timelike directions");
    o.seed = app->add_option("--seed", f.seed, "random seed");
    o.mc_samples = app->add_option("--mc-samples", f.mc_samples, "Monte Carlo samples for the averaging check");
    o.bound_tol = app->add_option("--bound-tol", f.bound_tol, "tolerance for exact-integral bounds");
    o.equality_tol = app->add_option("--equality-tol", f.equality_tol, "equality verdict tolerance");
    o.spec = app->add_option("--spec", f.spec, "immersion spec file (custom-spec-file case)");
    o.out = app->add_option("--out", f.out, "output file (stdout when omitted)");
    o.timings = app->add_flag("--timings", f.timings, "include wall-clock timings in the JSON report");
    return o;
}

spacelike::RunConfig resolve(const Flags& f, const Options& o) {
    spacelike::RunConfig c;
    if (!f.config.empty()) c = spacelike::config_from_file(f.config, c);
    auto given = [](CLI::Option* opt) { return opt && opt->count() > 0; };
    if (given(o.case_name)) c.case_name = f.case_name;
    if (given(o.n)) c.n = f.n;
    if (given(o.level)) c.level = f.level;
    if (given(o.samples)) c.samples = f.samples;
    if (given(o.seed)) c.seed = f.seed;
    if (given(o.mc_samples)) c.mc_samples = f.mc_samples;
    if (given(o.bound_tol)) c.bound_tol = f.bound_tol;
    if (given(o.equality_tol)) c.equality_tol = f.equality_tol;
    if (given(o.spec)) c.spec_file = f.spec;
    if (given(o.out)) c.out = f.out;
    if (given(o.format)) c.format = f.format == "csv" ? spacelike::ReportFormat::csv : spacelike::ReportFormat::json;
    if (given(o.timings)) c.timings = f.timings;
    return c;
}

int run_command(const Flags& f, const Options& o) {
    const spacelike::RunConfig cfg = resolve(f, o);
    const spacelike::RunReport report = spacelike::run_case(cfg);
    const std::string text =
        cfg.format == spacelike::ReportFormat::csv ? report.to_csv() : report.to_json().dump(2) + "\n";
    emit(text, cfg.out);
    std::cerr << report.summary();
    if (!report.error.empty()) return kExitNumerical;
    return report.passed() ? kExitPass : kExitFail;
}

int suite_command(const Flags& f, const Options& o, const std::string& levels, const std::string& cases) {
    const spacelike::RunConfig base = resolve(f, o);
    const spacelike::SuiteReport suite = spacelike::run_suite(parse_levels(levels), parse_list(cases), base);
    emit(suite.to_json().dump(2) + "\n", base.out);
    std::cerr << suite.summary();
    for (const auto& name : suite.failing_cases()) std::cerr << "FAILED " << name << '\n';
    for (const auto& r : suite.runs) {
        if (!r.error.empty()) return kExitNumerical;
    }
    return suite.passed() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lab: discrete eigenvalue bound checks"};
    app.require_subcommand(1);

    Flags run_flags;
    CLI::App* run = app.add_subcommand("run", "run one verification case");
    const Options run_opts = add_common(run, run_flags, true);

    Flags suite_flags;
    std::string levels = "2,3,4";
    std::string cases = "all";
    CLI::App* suite = app.add_subcommand("suite", "refinement sweep over several cases");
    const Options suite_opts = add_common(suite, suite_flags, false);
    suite->add_option("--levels", levels, "comma-separated refinement levels");
    suite->add_option("--cases", cases, "comma-separated case names or 'all'");

    int m = 4;
    std::int64_t samples = 1000000;
    std::uint64_t seed = 7;
    int forms = 5;
    int boosts = 2;
    std::string avg_out;
    CLI::App* avg = app.add_subcommand("section-avg", "Monte Carlo check of the light-cone section averages");
    avg->add_option("--m", m, "ambient dimension");
    avg->add_option("--samples", samples, "samples per integral");
    avg->add_option("--seed", seed, "random seed");
    avg->add_option("--forms", forms, "number of random symmetric forms");
    avg->add_option("--boosts", boosts, "boosted directions besides the time axis");
    avg->add_option("--out", avg_out, "output file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (*run) return run_command(run_flags, run_opts);
        if (*suite) return suite_command(suite_flags, suite_opts, levels, cases);
        if (*avg) {
            if (samples < 2) throw spacelike::UsageError("samples must be >= 2");
            const auto check = spacelike::section_average_check(m, samples, seed, forms, boosts);
            emit(check.to_json().dump(2) + "\n", avg_out);
            return check.passed() ? kExitPass : kExitFail;
        }
    } catch (const spacelike::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const spacelike::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const spacelike::DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
