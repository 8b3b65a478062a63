// fluxlab: magnetic eigenvalues and Ginzburg-Landau energies for a flux line
// threading a planar sample, with sweep and verification drivers.

#include "fluxlab/constants.hpp"
#include "fluxlab/gauge.hpp"
#include "fluxlab/gl.hpp"
#include "fluxlab/spectral.hpp"
#include "fluxlab/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace fluxlab;

int cmd_eig(const std::string& domain, const std::string& h_expr, int n, const std::string& eps_expr,
            const std::string& perforated_expr, double tol) {
    const DomainSpec spec = parse_domain_spec(domain);
    const double h = parse_pi_expression(h_expr);
    double lambda = 0.0;
    if (!perforated_expr.empty()) {
        lambda = lambda_ab(spec, h, n, AbMethod::perforated(parse_pi_expression(perforated_expr)), tol);
    } else if (!eps_expr.empty() && parse_pi_expression(eps_expr) > 0.0) {
        lambda = lambda_step(spec, h, parse_pi_expression(eps_expr), n, tol);
    } else {
        lambda = lambda_ab(spec, h, n, AbMethod::point_flux(), tol);
    }
    std::printf("lambda = %.12g\n", lambda);
    return 0;
}

int cmd_gl(const std::string& domain, const std::string& h_expr, double kappa, int n,
           const std::string& eps_expr, double tol, int max_iter) {
    const DomainSpec spec = parse_domain_spec(domain);
    const double h = parse_pi_expression(h_expr);
    const double eps = eps_expr.empty() ? 0.0 : parse_pi_expression(eps_expr);
    const MaskedGrid grid = build_grid(spec, n);
    const PotentialKind kind = eps > 0.0 ? PotentialKind::step(eps) : PotentialKind::aharonov_bohm();
    const GaugeLinkField field = link_phases(grid, kind, h);
    const GLResult r = minimize(grid, field, h, kappa, GLInit::NormalPerturbed, tol, max_iter);
    std::printf("total          = %.12g\n", r.energy.total);
    std::printf("kinetic        = %.12g\n", r.energy.kinetic);
    std::printf("condensation   = %.12g\n", r.energy.condensation);
    std::printf("field          = %.12g\n", r.energy.field);
    std::printf("sup|psi|       = %.12g\n", r.sup_psi);
    std::printf("grad_norm      = %.12g\n", r.grad_norm);
    std::printf("iterations     = %d\n", r.iterations);
    std::printf("classification = %s\n",
                r.classification == Classification::Normal ? "normal" : "superconducting");
    return 0;
}

int cmd_constants(const std::string& domain, int n) {
    const DomainSpec spec = parse_domain_spec(domain);
    const MaskedGrid grid = build_grid(spec, n);
    const DomainConstants c = c_star(grid);
    std::printf("lambda_dirichlet = %.12g\n", c.lambda_dirichlet);
    std::printf("m_star           = %.12g\n", c.m_star);
    std::printf("c_star           = %.12g\n", c.c_star);
    std::printf("area             = %.12g\n", c.area);
    std::printf("resolution       = %d\n", c.resolution);
    return 0;
}

int cmd_sweep(const std::string& config_path, int workers, const std::string& output_override) {
    SweepConfig cfg = parse_config_file(config_path);
    if (!output_override.empty()) cfg.output_path = output_override;

    const std::vector<SweepRecord> records = run_sweep(cfg, workers);
    std::optional<DomainConstants> constants;
    if (cfg.has(SweepTask::Constants)) constants = c_star(build_grid(cfg.domain, cfg.resolution));

    const std::string csv = csv_table(cfg, records, constants);
    if (cfg.output_path.empty() || cfg.output_path == "-") {
        std::cout << csv;
    } else {
        std::ofstream out(cfg.output_path);
        if (!out) throw ConfigError("cannot write output file: " + cfg.output_path);
        out << csv;
    }
    return 0;
}

int cmd_verify(bool fast, int workers, const std::string& output) {
    std::ostringstream csv;
    const bool ok = verify_bundle(fast, workers, csv, std::cerr);
    if (output.empty() || output == "-") {
        std::cout << csv.str();
    } else {
        std::ofstream out(output);
        if (!out) throw ConfigError("cannot write output file: " + output);
        out << csv.str();
    }
    std::cerr << (ok ? "verify: all checks passed\n" : "verify: FAILURES above\n");
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"magnetic flux-line eigenvalues and Ginzburg-Landau phase diagrams on masked grids"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help"); // keep --h free for the flux parameter

    std::string domain = "disc 1";
    std::string h_expr = "pi";
    std::string eps_expr, perforated_expr;
    int n = 128;
    double tol_eig = 1e-8, tol_gl = 1e-6, kappa = 1.0;
    int max_iter = 50000, workers = 2;
    std::string config_path, output;
    bool fast = false;

    CLI::App* eig = app.add_subcommand("eig", "lowest magnetic eigenvalue at one (h, epsilon)");
    eig->set_help_flag("--help");
    eig->add_option("--domain", domain, "domain: 'disc R' | 'ellipse A B' | 'square L' | 'star r1..'");
    eig->add_option("--h", h_expr, "flux parameter (accepts pi expressions like 3pi/2)");
    eig->add_option("--n", n, "nodes per side");
    eig->add_option("--epsilon", eps_expr, "magnetic-step radius (0 or absent = point flux)");
    eig->add_option("--perforated", perforated_expr, "use the AB potential on the perforated grid");
    eig->add_option("--tol", tol_eig, "eigensolver residual tolerance");

    CLI::App* gl = app.add_subcommand("gl", "minimize the Ginzburg-Landau energy at one point");
    gl->set_help_flag("--help");
    gl->add_option("--domain", domain, "domain description");
    gl->add_option("--h", h_expr, "flux parameter");
    gl->add_option("--kappa", kappa, "Ginzburg-Landau parameter");
    gl->add_option("--n", n, "nodes per side");
    gl->add_option("--epsilon", eps_expr, "magnetic-step radius (absent = Aharonov-Bohm)");
    gl->add_option("--tol", tol_gl, "gradient-norm tolerance (scaled by sqrt(nodes))");
    gl->add_option("--max-iter", max_iter, "iteration cap");

    CLI::App* constants = app.add_subcommand("constants", "domain constants lambda^D, m_*, C_*");
    constants->add_option("--domain", domain, "domain description");
    constants->add_option("--n", n, "nodes per side");

    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep from a config file");
    sweep->add_option("config", config_path, "plain-text config file")->required();
    sweep->add_option("--workers", workers, "worker pool size");
    sweep->add_option("--output", output, "override the config output path");

    CLI::App* verify = app.add_subcommand("verify", "theorem-verification bundle; nonzero exit on failure");
    verify->add_flag("--fast", fast, "smaller resolutions");
    verify->add_option("--workers", workers, "worker pool size");
    verify->add_option("--output", output, "CSV destination (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (eig->parsed()) return cmd_eig(domain, h_expr, n, eps_expr, perforated_expr, tol_eig);
        if (gl->parsed()) return cmd_gl(domain, h_expr, kappa, n, eps_expr, tol_gl, max_iter);
        if (constants->parsed()) return cmd_constants(domain, n);
        if (sweep->parsed()) return cmd_sweep(config_path, workers, output);
        if (verify->parsed()) return cmd_verify(fast, workers, output);
    } catch (const fluxlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
