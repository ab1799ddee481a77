// Experiment configuration, the scenario library, run orchestration and
// bit-stable CSV/JSON emission.

#include "muskat/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>

#include <json.hpp>

#include "muskat/errors.hpp"
#include "muskat/stationary.hpp"

namespace muskat {

namespace {
constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);
namespace fs = std::filesystem;
using nlohmann::json;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path.string());
    out << text;
}

std::string pair_modes_csv(const PeriodicField& c1, const PeriodicField& c2) {
    const int n = c1.size();
    std::string out = "k,re1,im1,re2,im2\n";
    char buf[160];
    for (int k = -n / 2 + 1; k <= n / 2; ++k) {
        const cplx a = c1.mode(k), b = c2.mode(k);
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", k, a.real(), a.imag(),
                      b.real(), b.imag());
        out += buf;
    }
    return out;
}
}  // namespace

std::string format_g17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    static const std::set<std::string> known = {
        "scenario", "a", "b", "n_points", "gamma_count", "delta", "delta_c",
        "dt", "cfl_const", "t_final", "rho_factor", "record_every", "evolve_w",
        "mollify_n", "output_dir", "threads", "seed", "extension_y"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!known.count(it.key())) throw ConfigError("unknown config key: " + it.key());
    }

    RunConfig c;
    try {
        c.scenario = doc.value("scenario", c.scenario);
        c.a = doc.value("a", c.a);
        c.b = doc.value("b", c.b);
        c.n_points = doc.value("n_points", c.n_points);
        c.gamma_count = doc.value("gamma_count", c.gamma_count);
        c.delta = doc.value("delta", c.delta);
        c.delta_c = doc.value("delta_c", c.delta_c);
        c.dt = doc.value("dt", c.dt);
        c.cfl_const = doc.value("cfl_const", c.cfl_const);
        c.t_final = doc.value("t_final", c.t_final);
        c.rho_factor = doc.value("rho_factor", c.rho_factor);
        c.record_every = doc.value("record_every", c.record_every);
        c.evolve_w = doc.value("evolve_w", c.evolve_w);
        if (doc.contains("mollify_n")) c.mollify_n = doc["mollify_n"].get<long>();
        c.output_dir = doc.value("output_dir", c.output_dir);
        c.threads = doc.value("threads", c.threads);
        c.seed = doc.value("seed", c.seed);
        if (doc.contains("extension_y"))
            c.extension_y = doc["extension_y"].get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field has wrong type: ") + e.what());
    }

    if (c.n_points <= 0 || c.n_points % 2 != 0)
        throw ConfigError("n_points must be positive and even");
    if (c.gamma_count < 3 || c.gamma_count % 2 == 0)
        throw ConfigError("gamma_count must be odd and >= 3");
    if (c.delta_c > c.delta) throw ConfigError("delta_c must not exceed delta");
    if (2.0 * c.delta >= kPi) throw ConfigError("2*delta must be below pi");
    if (c.t_final <= 0.0) throw ConfigError("t_final must be positive");
    if (c.record_every <= 0) throw ConfigError("record_every must be positive");
    if (c.threads <= 0) throw ConfigError("threads must be positive");
    static const std::set<std::string> scenarios = {"flat", "stable", "unstable", "turnover"};
    if (!scenarios.count(c.scenario)) throw ConfigError("unknown scenario: " + c.scenario);
    if (c.a < 0.0 || c.a > 1.0) throw ConfigError("scenario parameter a must lie in [0,1]");
    if (c.b < 0.0 || c.b > 3.0) throw ConfigError("scenario parameter b must lie in [0,3]");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

Scenario make_scenario(const std::string& name, double a, double b, int n_points) {
    if (a < 0.0 || a > 1.0) throw ConfigError("scenario parameter a must lie in [0,1]");
    if (b < 0.0 || b > 3.0) throw ConfigError("scenario parameter b must lie in [0,3]");
    const SpectralGrid grid(n_points);
    std::vector<cplx> g1(n_points, 0.0), g2(n_points, 0.0);
    double rho_sign = 1.0;
    if (name == "flat") {
        // zeros
    } else if (name == "stable" || name == "unstable") {
        for (int j = 0; j < n_points; ++j) g2[j] = a * std::cos(grid.node(j));
        if (name == "unstable") rho_sign = -1.0;
    } else if (name == "turnover") {
        for (int j = 0; j < n_points; ++j) {
            g1[j] = -b * std::sin(grid.node(j));
            g2[j] = a * std::cos(grid.node(j));
        }
    } else {
        throw ConfigError("unknown scenario: " + name);
    }
    return Scenario{Contour{PeriodicField::from_samples(std::move(g1)),
                            PeriodicField::from_samples(std::move(g2)), false},
                    rho_sign};
}

namespace {

std::string record_csv_row(const DiagnosticsRecord& r) {
    double z1 = std::numeric_limits<double>::quiet_NaN();
    double z1s = std::numeric_limits<double>::quiet_NaN();
    double cond = std::numeric_limits<double>::quiet_NaN();
    if (r.turnover && r.turnover->status == TurnoverReport::Status::Found) {
        z1 = r.turnover->z1_location;
        z1s = r.turnover->z1_speed;
        cond = r.turnover->condition_sign;
    }
    std::string row;
    row += format_g17(r.t) + "," + format_g17(r.h5_norm) + "," + format_g17(r.arc) + "," +
           format_g17(r.rt) + "," + format_g17(r.garding_margin) + "," +
           format_g17(r.cr_residual) + "," + format_g17(r.analyticity_radius_gamma0) + "," +
           format_g17(z1) + "," + format_g17(z1s) + "," + format_g17(cond) + "\n";
    return row;
}

// Halve delta until the RT coefficient has one sign on [-2*delta, 2*delta].
// The window must keep at least 8 grid nodes.
double choose_delta(const Contour& f, double rho, double delta0, int n_points) {
    const SpectralGrid grid(n_points);
    const PeriodicField sigma = rt_coefficient(f, rho);
    const double min_delta = 2.0 * 2.0 * kPi / n_points;
    for (double delta = delta0; delta >= min_delta; delta *= 0.5) {
        bool pos = false, neg = false, bad = false;
        for (int j = 0; j < n_points; ++j) {
            if (std::abs(grid.node(j)) > 2.0 * delta) continue;
            const double v = sigma.samples()[j].real();
            if (std::isnan(v)) bad = true;
            else if (v > 0.0) pos = true;
            else if (v < 0.0) neg = true;
        }
        if (!bad && (pos != neg)) return delta;
    }
    throw ConfigError(
        "could not find a window with a uniform Rayleigh-Taylor sign at this grid size");
}

json turnover_json(const std::optional<TurnoverReport>& t) {
    if (!t) return nullptr;
    json out;
    switch (t->status) {
        case TurnoverReport::Status::None:
            out["status"] = "no_turnover";
            break;
        case TurnoverReport::Status::Degenerate:
            out["status"] = "degenerate_turnover";
            break;
        case TurnoverReport::Status::Found:
            out["status"] = "found";
            out["z1"] = t->z1_location;
            out["second_deriv"] = t->second_deriv;
            out["pv_velocity"] = t->pv_velocity;
            out["z1_speed"] = t->z1_speed;
            out["condition_sign"] = t->condition_sign;
            break;
    }
    return out;
}

}  // namespace

RunOutcome run(const RunConfig& config) {
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);

    const Scenario scenario = make_scenario(config.scenario, config.a, config.b, config.n_points);
    const double rho = config.rho_factor * scenario.rho_sign;
    const SpectralGrid grid(config.n_points);

    // Turnover classification of the initial data, before window selection:
    // a degenerate interface must still be diagnosed in the summary.
    const TurnoverReport initial_turnover = turnover_report_of(scenario.contour, rho);

    double delta;
    try {
        delta = choose_delta(scenario.contour, rho, config.delta, config.n_points);
    } catch (const ConfigError&) {
        // No window with a uniform Rayleigh-Taylor sign: the coercivity
        // monitor fails before any step is taken.
        json summary;
        summary["stop_reason"] = "margin_nonpositive";
        summary["chosen_delta"] = 0.0;
        summary["chosen_delta_c"] = 0.0;
        summary["direction"] = 0;
        summary["steps"] = 0;
        summary["t_reached"] = 0.0;
        summary["turnover"] = turnover_json(initial_turnover);
        summary["seed"] = config.seed;
        write_text(dir / "summary.json", summary.dump(2) + "\n");
        write_text(dir / "diagnostics.csv",
                   "t,h5,arc,rt,margin,cr_residual,radius,z1,z1_speed,cond_sign\n");
        return RunOutcome{3, "margin_nonpositive", 0.0, 0.0, 0};
    }
    // Keep the |c'| <= delta invariant satisfiable if the window shrank.
    double delta_c = config.delta_c;
    if (delta < config.delta) {
        const double ratio = delta / config.delta;
        delta_c = config.delta_c * ratio * ratio;
    }

    const CutoffPair cutoffs = make_c(grid, delta, delta_c);
    auto split = std::make_shared<SplitState>(split_contour(scenario.contour, cutoffs));

    const double min_sigma = window_min_sigma(scenario.contour, rho, delta);
    const int direction = min_sigma > 0.0 ? +1 : -1;

    FamilyState state = init_family(split, config.gamma_count, rho, direction);

    EvolveOptions opts;
    opts.dt = config.dt;
    opts.cfl_const = config.cfl_const;
    opts.t_final = config.t_final;
    opts.record_every = config.record_every;
    opts.evolve_w = config.evolve_w;
    opts.mollify_n = config.mollify_n;
    opts.threads = config.threads;

    std::string csv = "t,h5,arc,rt,margin,cr_residual,radius,z1,z1_speed,cond_sign\n";
    DiagnosticsRecord last_record;
    auto on_record = [&](const FamilyState& st, int step) {
        const DiagnosticsRecord rec = make_record(st, true);
        csv += record_csv_row(rec);
        last_record = rec;
        for (std::size_t i = 0; i < st.slices.size(); ++i) {
            const PeriodicField z1f = z1_full(st.slices[i], *st.split);
            write_text(dir / ("z_gamma" + std::to_string(i) + "_t" + std::to_string(step) + ".csv"),
                       pair_modes_csv(z1f, st.slices[i].z2));
            if (st.has_w()) {
                write_text(dir / ("w_gamma" + std::to_string(i) + "_t" + std::to_string(step) + ".csv"),
                           pair_modes_csv(st.w_slices[i].c1, st.w_slices[i].c2));
            }
        }
    };

    EvolveResult result;
    int exit_code = 0;
    try {
        result = evolve_family(state, opts, on_record);
        switch (result.reason) {
            case StopReason::Completed: exit_code = 0; break;
            case StopReason::MarginNonpositive:
            case StopReason::ArcChordViolationStop: exit_code = 3; break;
            case StopReason::NanDetected: exit_code = 4; break;
        }
    } catch (const ArcChordViolation&) {
        result.reason = StopReason::ArcChordViolationStop;
        exit_code = 3;
    }

    write_text(dir / "diagnostics.csv", csv);

    for (double y : config.extension_y) {
        const ExtensionSlice ext = reconstruct_extension(state, y);
        std::string body = "alpha,re1,im1,re2,im2,valid\n";
        char buf[200];
        for (int j = 0; j < config.n_points; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", grid.node(j),
                          ext.f1[j].real(), ext.f1[j].imag(), ext.f2[j].real(), ext.f2[j].imag(),
                          ext.valid[j] ? 1 : 0);
            body += buf;
        }
        write_text(dir / ("extension_y" + format_g17(y) + ".csv"), body);
    }

    json summary;
    summary["stop_reason"] = to_string(result.reason);
    summary["chosen_delta"] = delta;
    summary["chosen_delta_c"] = delta_c;
    summary["direction"] = direction;
    summary["steps"] = result.steps;
    summary["t_reached"] = result.t_reached;
    summary["final_h5"] = last_record.h5_norm;
    summary["final_arc"] = last_record.arc;
    summary["final_rt"] = last_record.rt;
    summary["final_margin"] = last_record.garding_margin;
    summary["final_cr_residual"] = last_record.cr_residual;
    summary["final_radius"] = last_record.analyticity_radius_gamma0;
    summary["turnover"] = turnover_json(last_record.turnover);
    summary["seed"] = config.seed;
    write_text(dir / "summary.json", summary.dump(2) + "\n");

    return RunOutcome{exit_code, to_string(result.reason), delta, delta_c, direction};
}

StationaryConfig parse_stationary_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    static const std::set<std::string> known = {"operator", "k0", "n_points", "t_max",
                                                "dt", "sobolev_index", "trials", "output_dir"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!known.count(it.key())) throw ConfigError("unknown config key: " + it.key());
    }
    StationaryConfig c;
    c.operator_name = doc.value("operator", c.operator_name);
    c.k0 = doc.value("k0", c.k0);
    c.n_points = doc.value("n_points", c.n_points);
    c.t_max = doc.value("t_max", c.t_max);
    c.dt = doc.value("dt", c.dt);
    c.sobolev_index = doc.value("sobolev_index", c.sobolev_index);
    c.trials = doc.value("trials", c.trials);
    c.output_dir = doc.value("output_dir", c.output_dir);
    if (c.n_points <= 0 || c.n_points % 2 != 0)
        throw ConfigError("n_points must be positive and even");
    if (c.dt <= 0.0 || c.t_max <= 0.0) throw ConfigError("t_max and dt must be positive");
    static const std::set<std::string> ops = {"linear_mode", "zero", "conjugate"};
    if (!ops.count(c.operator_name)) throw ConfigError("unknown operator: " + c.operator_name);
    return c;
}

int run_stationary(const StationaryConfig& config) {
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);
    const int n = config.n_points;

    OperatorHandle op;
    op.sobolev_index = config.sobolev_index;
    PeriodicField f0 = PeriodicField::zero(n);
    if (config.operator_name == "linear_mode") {
        const double k0 = config.k0;
        op.apply = [k0](const PeriodicField& f) { return cplx(0.0, k0) * f; };
        op.frechet = [k0](const PeriodicField&, const PeriodicField& h) {
            return cplx(0.0, k0) * h;
        };
        std::vector<cplx> modes(n, 0.0);
        modes[(static_cast<int>(k0) + n) % n] = 1.0;
        f0 = PeriodicField::from_modes(std::move(modes));
    } else if (config.operator_name == "zero") {
        op.apply = [](const PeriodicField& f) { return PeriodicField::zero(f.size()); };
        op.frechet = [](const PeriodicField&, const PeriodicField& h) {
            return PeriodicField::zero(h.size());
        };
        std::vector<cplx> s(n, 1.0);
        f0 = PeriodicField::from_samples(std::move(s));
    } else {  // conjugate: hypothesis (e) fails; kept for the failure path
        op.apply = [](const PeriodicField& f) { return conj_field(f); };
        op.frechet = [](const PeriodicField&, const PeriodicField& h) { return conj_field(h); };
        std::vector<cplx> s(n, 1.0);
        f0 = PeriodicField::from_samples(std::move(s));
    }

    const HypothesisReport rep = verify_hypotheses(op, f0, config.trials);

    json summary;
    summary["hypotheses_passed"] = rep.passed;
    summary["used_fd_surrogate"] = rep.used_fd_surrogate;
    summary["chain_rule_residual"] = rep.chain_rule_residual;
    summary["i_linearity_residual"] = rep.i_linearity_residual;
    summary["frechet_fd_residual"] = rep.frechet_fd_residual;
    summary["boundedness_max"] = rep.boundedness_max;
    summary["failures"] = rep.failures;

    int code = rep.passed ? 0 : 3;
    if (rep.passed) {
        try {
            const ContinuationResult res = continue_stationary(op, f0, config.t_max, config.dt);
            std::string csv = "t,residual,h_k_norm\n";
            for (std::size_t i = 0; i < res.times.size(); ++i) {
                csv += format_g17(res.times[i]) + "," + format_g17(res.residuals[i]) + "," +
                       format_g17(res.hk_norms[i]) + "\n";
            }
            write_text(dir / "stationary_residuals.csv", csv);
            summary["max_residual"] =
                *std::max_element(res.residuals.begin(), res.residuals.end());
            summary["left_trust_region"] = res.left_trust_region;
        } catch (const NotStationary& e) {
            summary["error"] = e.what();
            code = 2;
        }
    }
    write_text(dir / "stationary_summary.json", summary.dump(2) + "\n");
    return code;
}

int verify_spectral(int n_points) {
    const SpectralGrid grid(n_points);
    const int n = n_points;
    int failures = 0;
    auto report = [&](const std::string& name, double err, double tol) {
        const bool ok = err <= tol;
        if (!ok) ++failures;
        std::printf("%s %s: max error %.3e (tol %.1e)\n", ok ? "[PASS]" : "[FAIL]", name.c_str(),
                    err, tol);
    };

    std::vector<cplx> c2(n), s3(n), e4(n);
    for (int j = 0; j < n; ++j) {
        c2[j] = std::cos(2.0 * grid.node(j));
        s3[j] = std::sin(3.0 * grid.node(j));
        e4[j] = std::exp(cplx(0.0, 4.0 * grid.node(j)));
    }
    const PeriodicField f2 = PeriodicField::from_samples(c2);
    const PeriodicField f3 = PeriodicField::from_samples(s3);
    const PeriodicField f4 = PeriodicField::from_samples(e4);

    const PeriodicField h2 = hilbert_transform(f2);
    double err = 0.0;
    for (int j = 0; j < n; ++j)
        err = std::max(err, std::abs(h2.samples()[j] - std::sin(2.0 * grid.node(j))));
    report("H(cos 2a) = sin 2a", err, 1e-11);

    const PeriodicField l4 = lambda_operator(f4);
    err = 0.0;
    for (int j = 0; j < n; ++j)
        err = std::max(err, std::abs(l4.samples()[j] - 4.0 * e4[j]));
    report("Lambda(e^{i4a}) = 4 e^{i4a}", err, 1e-11);

    const PeriodicField lhs = lambda_operator(f3);
    const PeriodicField rhs = hilbert_transform(spectral_derivative(f3, 1));
    err = (lhs - rhs).max_abs();
    report("Lambda = H o d/dalpha", err, 1e-11);

    double sample_sum = 0.0, mode_sum = 0.0;
    for (const auto& v : f2.samples()) sample_sum += std::norm(v);
    for (const auto& v : f2.modes()) mode_sum += std::norm(v);
    report("Parseval", std::abs(sample_sum / n - mode_sum), 1e-11);

    return failures == 0 ? 0 : 4;
}

int verify_lemmas() {
    const int n = 128;
    const SpectralGrid grid(n);
    const double delta = 1.2, delta_c = 0.04, t = 0.01;
    const CutoffPair cutoffs = make_c(grid, delta, delta_c);

    auto build_family = [&](int M) {
        TestFamily fam;
        for (int i = 0; i < M; ++i) {
            const double gamma = -1.0 + 2.0 * i / (M - 1);
            fam.gammas.push_back(gamma);
            std::vector<cplx> s(n);
            for (int j = 0; j < n; ++j)
                s[j] = std::cos(grid.node(j)) * gamma * gamma +
                       cplx(0.0, 0.3) * std::sin(2.0 * grid.node(j)) * gamma;
            fam.slices.push_back(PeriodicField::from_samples(std::move(s)));
        }
        return fam;
    };

    int failures = 0;
    auto report = [&](const std::string& name, bool ok, const std::string& detail) {
        if (!ok) ++failures;
        std::printf("%s %s: %s\n", ok ? "[PASS]" : "[FAIL]", name.c_str(), detail.c_str());
    };

    const TestFamily coarse = build_family(17), fine = build_family(33);
    const double r_coarse = check_lemma_switch(coarse, cutoffs, 8, t);
    const double r_fine = check_lemma_switch(fine, cutoffs, 16, t);
    report("lemma switch rate", r_fine < r_coarse / 3.0 || r_fine < 1e-12,
           "residual " + format_g17(r_coarse) + " -> " + format_g17(r_fine));

    ScalarKernel sin_kernel{[](cplx u) { return std::sin(u); },
                            [](cplx u) { return std::cos(u); }};
    auto build_X = [&](int M) {
        TestFamily fam;
        for (int i = 0; i < M; ++i) {
            fam.gammas.push_back(-1.0 + 2.0 * i / (M - 1));
            std::vector<cplx> s(n);
            for (int j = 0; j < n; ++j) s[j] = std::cos(grid.node(j));
            fam.slices.push_back(PeriodicField::from_samples(std::move(s)));
        }
        return fam;
    };
    const double m_coarse = check_lemma_forM1(sin_kernel, build_X(17), coarse, cutoffs, 8, t);
    const double m_fine = check_lemma_forM1(sin_kernel, build_X(33), fine, cutoffs, 16, t);
    report("integral lemma rate", m_fine < m_coarse / 3.0 || m_fine < 1e-12,
           "residual " + format_g17(m_coarse) + " -> " + format_g17(m_fine));

    return failures == 0 ? 0 : 4;
}

}  // namespace muskat
