#include "fluxlab/sweep.hpp"

#include "fluxlab/eigensolve.hpp"
#include "fluxlab/gauge.hpp"
#include "fluxlab/gl.hpp"
#include "fluxlab/operator.hpp"
#include "fluxlab/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

namespace fluxlab {

namespace {

constexpr double kPi = std::numbers::pi;

// Iteration budget for harness-level minimizations. The winning branch
// converges well inside this; a capped losing branch can never undercut the
// converged winner, so classifications are unaffected.
constexpr int kHarnessMaxIter = 12000;

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

void parallel_for(size_t count, int workers, const std::function<void(size_t)>& fn) {
    workers = std::max(1, workers);
    if (workers == 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    const int spawn = static_cast<int>(std::min<size_t>(static_cast<size_t>(workers), count));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(spawn));
    for (int t = 0; t < spawn; ++t)
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
};

const char* classification_name(Classification c) {
    return c == Classification::Normal ? "normal" : "superconducting";
}

// One sweep point against a shared read-only grid.
SweepRecord compute_point(const MaskedGrid& grid, unsigned tasks, double h, double eps, double kappa) {
    SweepRecord rec;
    rec.h = h;
    rec.epsilon = eps;
    rec.kappa = kappa;
    rec.resolution = grid.n;
    Timer timer;
    try {
        const bool want_eig = (tasks & static_cast<unsigned>(SweepTask::Eigenvalue)) != 0;
        const bool want_gl = (tasks & static_cast<unsigned>(SweepTask::GlEnergy)) != 0;
        const bool want_cls = (tasks & static_cast<unsigned>(SweepTask::Classify)) != 0;

        if (want_eig) {
            const PotentialKind kind = eps > 0.0 ? PotentialKind::step(eps) : PotentialKind::point_flux();
            const GaugeLinkField field = link_phases(grid, kind, h);
            const HermitianOperator op =
                assemble_magnetic_laplacian(grid, field, BoundaryCondition::NeumannNatural);
            const EigResult eig = lowest_eigenpair(op, 1e-8);
            rec.lambda = eig.value;
            rec.iterations = eig.iterations;
        }
        if (want_gl || want_cls) {
            const PotentialKind kind = eps > 0.0 ? PotentialKind::step(eps) : PotentialKind::aharonov_bohm();
            const GaugeLinkField field = link_phases(grid, kind, h);
            const GLResult gl = minimize(grid, field, h, kappa, GLInit::NormalPerturbed, 1e-6, kHarnessMaxIter);
            if (want_gl) {
                rec.energy_total = gl.energy.total;
                rec.energy_kinetic = gl.energy.kinetic;
                rec.energy_condensation = gl.energy.condensation;
                rec.energy_field = gl.energy.field;
            }
            rec.classification = classification_name(gl.classification);
            rec.sup_psi = gl.sup_psi;
            rec.iterations = gl.iterations;
        }
    } catch (const std::exception& ex) {
        rec.error = ex.what();
    }
    rec.wall_time_ms = timer.ms();
    return rec;
}

} // namespace

double parse_pi_expression(const std::string& token) {
    const std::string t = trim(token);
    if (t.empty()) throw ConfigError("empty numeric token");
    const size_t ppos = t.find("pi");
    try {
        size_t used = 0;
        if (ppos == std::string::npos) {
            const double v = std::stod(t, &used);
            if (used != t.size()) throw ConfigError("bad numeric token: " + t);
            return v;
        }
        double coef = 1.0;
        std::string head = trim(t.substr(0, ppos));
        if (head == "-")
            coef = -1.0;
        else if (!head.empty()) {
            coef = std::stod(head, &used);
            if (used != head.size()) throw ConfigError("bad numeric token: " + t);
        }
        double denom = 1.0;
        std::string tail = trim(t.substr(ppos + 2));
        if (!tail.empty()) {
            if (tail[0] != '/') throw ConfigError("bad numeric token: " + t);
            tail = trim(tail.substr(1));
            denom = std::stod(tail, &used);
            if (used != tail.size() || denom == 0.0) throw ConfigError("bad numeric token: " + t);
        }
        return coef * kPi / denom;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric token: " + t);
    }
}

DomainSpec parse_domain_spec(const std::string& value) {
    const auto toks = split_ws(value);
    if (toks.empty()) throw ConfigError("domain: missing shape");
    try {
        if (toks[0] == "disc" && toks.size() == 2) return DomainSpec::disc(parse_pi_expression(toks[1]));
        if (toks[0] == "ellipse" && toks.size() == 3)
            return DomainSpec::ellipse(parse_pi_expression(toks[1]), parse_pi_expression(toks[2]));
        if (toks[0] == "square" && toks.size() == 2) return DomainSpec::square(parse_pi_expression(toks[1]));
        if (toks[0] == "star" && toks.size() >= 9) {
            std::vector<double> radii;
            for (size_t i = 1; i < toks.size(); ++i) radii.push_back(parse_pi_expression(toks[i]));
            return DomainSpec::star(std::move(radii));
        }
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("domain: ") + ex.what());
    }
    throw ConfigError("domain: expected 'disc R', 'ellipse A B', 'square L' or 'star r1 ... r8+'");
}

SweepConfig parse_config(std::istream& in) {
    SweepConfig cfg;
    bool saw_domain = false, saw_resolution = false;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        const auto parse_list = [&](const std::string& v) {
            std::vector<double> out;
            for (const std::string& tok : split_ws(v)) out.push_back(parse_pi_expression(tok));
            return out;
        };

        if (key == "domain") {
            cfg.domain = parse_domain_spec(value);
            saw_domain = true;
        } else if (key == "resolution") {
            cfg.resolution = static_cast<int>(parse_pi_expression(value));
            if (cfg.resolution < 32) throw ConfigError("resolution must be at least 32");
            saw_resolution = true;
        } else if (key == "h_values") {
            cfg.h_values = parse_list(value);
        } else if (key == "epsilon_values") {
            cfg.epsilon_values = parse_list(value);
        } else if (key == "kappa_values") {
            cfg.kappa_values = parse_list(value);
        } else if (key == "tasks") {
            for (const std::string& tok : split_ws(value)) {
                if (tok == "eigenvalue")
                    cfg.tasks |= static_cast<unsigned>(SweepTask::Eigenvalue);
                else if (tok == "gl_energy")
                    cfg.tasks |= static_cast<unsigned>(SweepTask::GlEnergy);
                else if (tok == "classify")
                    cfg.tasks |= static_cast<unsigned>(SweepTask::Classify);
                else if (tok == "constants")
                    cfg.tasks |= static_cast<unsigned>(SweepTask::Constants);
                else
                    throw ConfigError("unknown task: " + tok);
            }
        } else if (key == "output") {
            cfg.output_path = value;
        } else if (key == "seed") {
            cfg.seed = value;
        } else {
            throw ConfigError("unknown key: " + key);
        }
    }

    if (!saw_domain) throw ConfigError("missing key: domain");
    if (!saw_resolution) throw ConfigError("missing key: resolution");
    if (cfg.h_values.empty()) throw ConfigError("h_values must be non-empty");
    if (cfg.tasks == 0) throw ConfigError("tasks must be non-empty");

    const bool wants_gl = cfg.has(SweepTask::GlEnergy) || cfg.has(SweepTask::Classify);
    if (wants_gl && cfg.kappa_values.empty())
        throw ConfigError("kappa_values required for gl_energy / classify tasks");

    const double spacing = 2.0 * cfg.domain.bounding_radius() / cfg.resolution;
    for (double eps : cfg.epsilon_values) {
        if (!(eps > 0.0)) throw ConfigError("epsilon values must be positive");
        if (!(eps < cfg.domain.inradius())) throw ConfigError("epsilon " + fmt_g(eps) + " does not fit in the domain");
        if (!(eps >= 4.0 * spacing))
            throw ConfigError("epsilon " + fmt_g(eps) + " unresolved at resolution " + std::to_string(cfg.resolution));
    }
    return cfg;
}

SweepConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config, int workers) {
    const MaskedGrid grid = build_grid(config.domain, config.resolution);

    struct Point {
        double h, eps, kappa;
    };
    std::vector<Point> points;
    const std::vector<double> eps_list =
        config.epsilon_values.empty() ? std::vector<double>{0.0} : config.epsilon_values;
    const std::vector<double> kappa_list =
        config.kappa_values.empty() ? std::vector<double>{0.0} : config.kappa_values;
    for (double h : config.h_values)
        for (double e : eps_list)
            for (double k : kappa_list) points.push_back({h, e, k});
    std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
        if (a.h != b.h) return a.h < b.h;
        if (a.eps != b.eps) return a.eps < b.eps;
        return a.kappa < b.kappa;
    });

    std::vector<SweepRecord> records(points.size());
    parallel_for(points.size(), workers, [&](size_t i) {
        records[i] = compute_point(grid, config.tasks, points[i].h, points[i].eps, points[i].kappa);
    });
    return records;
}

std::string csv_table(const SweepConfig& config, const std::vector<SweepRecord>& records,
                      const std::optional<DomainConstants>& constants) {
    std::ostringstream out;
    out << "# fluxlab 1.0\n";
    out << "# domain: " << config.domain.describe() << "\n";
    out << "# resolution: " << config.resolution << "\n";
    if (!config.seed.empty()) out << "# seed: " << config.seed << "\n";
    if (constants)
        out << "# constants: lambda_dirichlet=" << fmt_g(constants->lambda_dirichlet)
            << " m_star=" << fmt_g(constants->m_star) << " c_star=" << fmt_g(constants->c_star)
            << " area=" << fmt_g(constants->area) << "\n";
    out << "h,epsilon,kappa,resolution,lambda,energy_total,energy_kinetic,energy_condensation,"
           "energy_field,classification,sup_psi,iterations,error,wall_time_ms\n";

    const auto opt = [](const std::optional<double>& v) { return v ? fmt_g(*v) : std::string(); };
    for (const SweepRecord& r : records) {
        std::string err = r.error;
        for (char& c : err)
            if (c == ',' || c == '\n') c = ';';
        out << fmt_g(r.h) << ',' << fmt_g(r.epsilon) << ',' << fmt_g(r.kappa) << ',' << r.resolution << ','
            << opt(r.lambda) << ',' << opt(r.energy_total) << ',' << opt(r.energy_kinetic) << ','
            << opt(r.energy_condensation) << ',' << opt(r.energy_field) << ','
            << (r.classification ? *r.classification : std::string()) << ',' << opt(r.sup_psi) << ','
            << (r.iterations ? std::to_string(*r.iterations) : std::string()) << ',' << err << ','
            << fmt_g(r.wall_time_ms) << "\n";
    }
    return out.str();
}

std::vector<std::pair<double, double>> detect_nonmonotone(const std::vector<SweepRecord>& table,
                                                          SweepColumn column, double tol) {
    const auto value = [&](const SweepRecord& r) -> std::optional<double> {
        if (!r.error.empty()) return std::nullopt;
        return column == SweepColumn::Lambda ? r.lambda : r.energy_total;
    };
    std::vector<std::pair<double, double>> out;
    for (size_t i = 0; i < table.size(); ++i) {
        const auto vi = value(table[i]);
        if (!vi) continue;
        for (size_t j = i + 1; j < table.size(); ++j) {
            const auto vj = value(table[j]);
            if (!vj) continue;
            if (table[j].h > table[i].h && *vj < *vi - tol) out.emplace_back(table[i].h, table[j].h);
        }
    }
    return out;
}

std::vector<SweepRecord> oscillation_report(const DomainSpec& domain, int resolution, double kappa,
                                            int n_max, double epsilon, int workers) {
    const MaskedGrid grid = build_grid(domain, resolution);
    if (epsilon > 0.0 && !(epsilon >= 4.0 * grid.spacing))
        throw std::invalid_argument("step epsilon unresolved at this resolution");

    // Small-kappa precondition for the oscillation pattern, computed fresh on
    // this grid: kappa^2 < (1 + C_*)^-1 lambda_AB(pi).
    const DomainConstants dc = c_star(grid);
    const double lam_pi = lambda_ab(domain, kPi, resolution);
    const double bound = lam_pi / (1.0 + dc.c_star);
    if (!(kappa * kappa < bound))
        throw std::invalid_argument("kappa^2 = " + fmt_g(kappa * kappa) +
                                    " violates the oscillation precondition kappa^2 < " + fmt_g(bound));

    std::vector<SweepRecord> rows(static_cast<size_t>(n_max));
    parallel_for(rows.size(), workers, [&](size_t i) {
        const double h = kPi * static_cast<double>(i + 1);
        rows[i] = compute_point(grid,
                                static_cast<unsigned>(SweepTask::GlEnergy) |
                                    static_cast<unsigned>(SweepTask::Classify),
                                h, epsilon, kappa);
    });
    return rows;
}

ConvergenceReport convergence_report(const DomainSpec& domain, double h, double kappa,
                                     const std::vector<double>& epsilon_values, int resolution,
                                     int workers) {
    for (size_t i = 1; i < epsilon_values.size(); ++i)
        if (!(epsilon_values[i] < epsilon_values[i - 1]))
            throw std::invalid_argument("epsilon values must decrease");

    const MaskedGrid grid = build_grid(domain, resolution);
    for (double eps : epsilon_values)
        if (!(eps >= 4.0 * grid.spacing))
            throw std::invalid_argument("step epsilon unresolved at this resolution");

    ConvergenceReport rep;
    std::vector<double> energies(epsilon_values.size() + 1, 0.0);
    parallel_for(epsilon_values.size() + 1, workers, [&](size_t i) {
        if (i == 0) {
            const GaugeLinkField field = link_phases(grid, PotentialKind::aharonov_bohm(), h);
            energies[0] = minimize(grid, field, h, kappa, GLInit::NormalPerturbed, 1e-6, kHarnessMaxIter).energy.total;
        } else {
            const GaugeLinkField field = link_phases(grid, PotentialKind::step(epsilon_values[i - 1]), h);
            energies[i] = minimize(grid, field, h, kappa, GLInit::NormalPerturbed, 1e-6, kHarnessMaxIter).energy.total;
        }
    });
    rep.energy_ab = energies[0];
    for (size_t i = 0; i < epsilon_values.size(); ++i)
        rep.rows.push_back({epsilon_values[i], energies[i + 1], std::abs(energies[i + 1] - rep.energy_ab)});
    return rep;
}

bool verify_bundle(bool fast, int workers, std::ostream& csv_out, std::ostream& log) {
    const int n = fast ? 64 : 128;
    const double eps_step = fast ? 0.125 : 0.1;
    const DomainSpec disc = DomainSpec::disc(1.0);
    const MaskedGrid grid = build_grid(disc, n);
    const double area = measured_area(grid);

    bool all_ok = true;
    const auto check = [&](bool ok, const std::string& what) {
        log << (ok ? "[ok]   " : "[FAIL] ") << what << "\n";
        all_ok = all_ok && ok;
    };

    std::vector<SweepRecord> rows;

    // 1D lemma: the twisted-ring eigenvalue approaches alpha(h)^2.
    for (double h : {0.0, kPi / 2.0, kPi, 3.0 * kPi / 2.0}) {
        const double v = lambda_1d_twisted(h, 4096);
        const double target = alpha(h) * alpha(h);
        const bool ok = target == 0.0 ? std::abs(v) <= 1e-12 : std::abs(v - target) / target <= 1e-5;
        check(ok, "1d ring h=" + fmt_g(h) + ": " + fmt_g(v) + " vs alpha^2=" + fmt_g(target));
    }

    // Exact lattice periodicity of the point-flux spectrum.
    {
        std::vector<double> hs = {kPi / 2.0, kPi, kPi / 2.0 + 2.0 * kPi, kPi + 2.0 * kPi};
        std::vector<SweepRecord> recs(hs.size());
        std::vector<double> lam(hs.size());
        parallel_for(hs.size(), workers, [&](size_t i) {
            recs[i] = compute_point(grid, static_cast<unsigned>(SweepTask::Eigenvalue), hs[i], 0.0, 0.0);
            lam[i] = recs[i].lambda.value_or(std::nan(""));
        });
        for (const SweepRecord& r : recs) rows.push_back(r);
        check(std::abs(lam[0] - lam[2]) <= 1e-10,
              "periodicity h=pi/2: |" + fmt_g(lam[0]) + " - " + fmt_g(lam[2]) + "| <= 1e-10");
        check(std::abs(lam[1] - lam[3]) <= 1e-10,
              "periodicity h=pi: |" + fmt_g(lam[1]) + " - " + fmt_g(lam[3]) + "| <= 1e-10");

        // Positivity on (0, 2 pi), plus the value at 3 pi / 2.
        SweepRecord r32 = compute_point(grid, static_cast<unsigned>(SweepTask::Eigenvalue), 1.5 * kPi, 0.0, 0.0);
        rows.push_back(r32);
        check(lam[0] > 0.01 && lam[1] > 0.01 && r32.lambda.value_or(0.0) > 0.01,
              "positivity: lambda(pi/2)=" + fmt_g(lam[0]) + " lambda(pi)=" + fmt_g(lam[1]) +
                  " lambda(3pi/2)=" + fmt_g(r32.lambda.value_or(0.0)));
    }

    // Degenerate ground state energy at h = 2 pi.
    {
        const double kappa = 1.0;
        SweepRecord r = compute_point(
            grid, static_cast<unsigned>(SweepTask::GlEnergy) | static_cast<unsigned>(SweepTask::Classify),
            2.0 * kPi, 0.0, kappa);
        rows.push_back(r);
        const double ref = -0.5 * kappa * kappa * area;
        check(r.error.empty() && r.energy_total.value_or(0.0) <= 0.97 * ref,
              "degenerate energy: " + fmt_g(r.energy_total.value_or(0.0)) + " vs -k^2|Omega|/2=" + fmt_g(ref));

        const GaugeLinkField field = link_phases(grid, PotentialKind::aharonov_bohm(), 2.0 * kPi);
        const EnergyBreakdown explicit_e = energy(degenerate_state(grid, 1), field, 2.0 * kPi, kappa, grid);
        check(std::abs(explicit_e.total - ref) <= 0.03 * std::abs(ref),
              "degenerate explicit state: " + fmt_g(explicit_e.total) + " within 3% of " + fmt_g(ref));
    }

    // Non-monotonicity of the step eigenvalue in h.
    {
        const std::vector<double> hs = {kPi / 2.0, kPi, 1.5 * kPi, 1.75 * kPi, 2.0 * kPi};
        std::vector<SweepRecord> scan(hs.size());
        parallel_for(hs.size(), workers, [&](size_t i) {
            scan[i] = compute_point(grid, static_cast<unsigned>(SweepTask::Eigenvalue), hs[i], eps_step, 0.0);
        });
        for (const SweepRecord& r : scan) rows.push_back(r);
        const auto pairs = detect_nonmonotone(scan, SweepColumn::Lambda);
        check(!pairs.empty(), "non-monotone lambda(h F_eps), eps=" + fmt_g(eps_step) + ": " +
                                  std::to_string(pairs.size()) + " witnessing pairs");
    }

    // Normal/superconducting oscillations along h_n = pi n. The assertion
    // covers the flux-line potential, where the alternation holds for every
    // admissible kappa; the step rows are recorded for inspection only, since
    // at recordable bump radii lambda(2 pi F_eps) can still exceed kappa^2 and
    // park the even harmonics in the normal state.
    {
        const DomainConstants dc = c_star(grid);
        const double lam_pi = lambda_ab(disc, kPi, n);
        const double kappa = std::sqrt(0.5 * lam_pi / (1.0 + dc.c_star));
        {
            std::vector<SweepRecord> osc = oscillation_report(disc, n, kappa, 4, 0.0, workers);
            bool ok = true;
            std::string got;
            for (size_t i = 0; i < osc.size(); ++i) {
                const bool odd = (i + 1) % 2 == 1;
                const std::string want = odd ? "normal" : "superconducting";
                const std::string cls = osc[i].classification.value_or("error");
                got += (i ? " " : "") + cls;
                ok = ok && cls == want;
                rows.push_back(osc[i]);
            }
            check(ok, "oscillation n=1..4 ab: " + got);
        }
        {
            std::vector<SweepRecord> osc = oscillation_report(disc, n, kappa, 4, eps_step, workers);
            std::string got;
            for (size_t i = 0; i < osc.size(); ++i) {
                got += (i ? " " : "") + osc[i].classification.value_or("error");
                rows.push_back(osc[i]);
            }
            log << "[rec]  oscillation n=1..4 step(eps=" << fmt_g(eps_step) << "), recorded: " << got
                << "\n";
        }
    }

    SweepConfig meta;
    meta.domain = disc;
    meta.resolution = n;
    meta.seed = fast ? "verify-fast" : "verify";
    csv_out << csv_table(meta, rows, std::nullopt);
    return all_ok;
}

} // namespace fluxlab
