#include "hdde/errors.hpp"
#include "hdde/harness.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kGuard = 3, kNd = 4 };

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos)
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw hdde::ConfigError(std::string("cannot parse ") + what + " entry '" + item + "'");
        }
    }
    return out;
}

struct Overrides {
    std::string config;
    std::string eps;
    std::string window;
    std::string out;
    std::string format;
    std::size_t grid_omega = 0;
    std::size_t grid_phase = 0;
    double tol = 0.0;
};

void add_common(CLI::App* cmd, Overrides& o, bool needs_config) {
    auto* c = cmd->add_option("--config", o.config, "run configuration (JSON)");
    if (needs_config) c->required();
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--grid-omega", o.grid_omega, "omega grid points");
    cmd->add_option("--grid-phase", o.grid_phase, "points per phase axis");
}

void add_spectral(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--eps", o.eps, "comma-separated eps values, strictly decreasing");
    cmd->add_option("--window", o.window, "re_min,re_max,im_min,im_max");
    cmd->add_option("--format", o.format, "csv or json");
    cmd->add_option("--tol", o.tol, "root tolerance");
}

hdde::RunConfig build_config(const Overrides& o) {
    hdde::RunConfig cfg;
    if (!o.config.empty()) cfg = hdde::load_run_config(o.config);
    if (!o.eps.empty()) cfg.eps_list = parse_list(o.eps, "--eps");
    if (!o.window.empty()) {
        const auto w = parse_list(o.window, "--window");
        if (w.size() != 4) throw hdde::ConfigError("--window needs re_min,re_max,im_min,im_max");
        cfg.window = hdde::Rectangle{w[0], w[1], w[2], w[3]};
    }
    if (!o.out.empty()) cfg.output_dir = o.out;
    if (!o.format.empty()) cfg.format = o.format;
    if (o.grid_omega > 0) cfg.grid.omega_points = o.grid_omega;
    if (o.grid_phase > 0) cfg.grid.phase_points = o.grid_phase;
    if (o.tol > 0.0) cfg.tol = o.tol;
    return cfg;
}

void print_paths(const std::vector<std::filesystem::path>& paths) {
    for (const auto& p : paths) std::cout << p.string() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra and stability of linear DDEs with hierarchical large delays"};
    app.require_subcommand(1);

    Overrides o;
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues in a window for each eps");
    auto* manifolds = app.add_subcommand("manifolds", "sample the spectral manifolds");
    auto* classify = app.add_subcommand("classify", "stability verdict");
    auto* validate = app.add_subcommand("validate", "compare eigenvalues with the asymptotic spectra");
    auto* example = app.add_subcommand("example", "built-in scalar presets");
    for (auto* c : {spectrum, validate}) {
        add_common(c, o, true);
        add_spectral(c, o);
    }
    add_common(manifolds, o, true);
    add_common(classify, o, true);
    classify->add_option("--format", o.format, "csv (text verdict) or json");
    std::string example_name;
    example->add_option("name", example_name, "fig2-stable, fig2-neutral, fig2-unstable or fig3")->required();
    add_common(example, o, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (example->parsed()) {
            hdde::GridConfig grid;
            if (o.grid_omega > 0) grid.omega_points = o.grid_omega;
            if (o.grid_phase > 0) grid.phase_points = o.grid_phase;
            const auto res = hdde::run_example(example_name, o.out.empty() ? "." : o.out, grid);
            std::cout << "sup_gamma1 closed=" << res.sup1_closed.to_string()
                      << " general=" << res.sup1_general.to_string() << '\n';
            std::cout << "sup_gamma2 closed=" << res.sup2_closed.to_string()
                      << " general=" << res.sup2_general.to_string() << '\n';
            std::cout << "verdict closed=" << hdde::to_string(res.verdict_closed.status)
                      << " general=" << hdde::to_string(res.verdict_general.status) << '\n';
            std::cout << "max discrepancy sup=" << res.sup_discrepancy << " gamma1=" << res.gamma1_discrepancy
                      << " gamma2=" << res.gamma2_discrepancy << '\n';
            print_paths(res.files);
            return kOk;
        }
        const hdde::RunConfig cfg = build_config(o);
        if (spectrum->parsed()) print_paths(hdde::run_spectrum(cfg));
        if (validate->parsed()) print_paths(hdde::run_validate(cfg));
        if (manifolds->parsed()) print_paths(hdde::run_manifolds(cfg));
        if (classify->parsed()) {
            const auto paths = hdde::run_classify(cfg);
            print_paths(paths);
        }
        return kOk;
    } catch (const hdde::NdViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNd;
    } catch (const hdde::EvaluationRangeError& e) {
        std::cerr << "error (scale " << e.scale() << "): " << e.what() << '\n';
        return kGuard;
    } catch (const hdde::RangeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kGuard;
    } catch (const hdde::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const hdde::DimensionError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
}
