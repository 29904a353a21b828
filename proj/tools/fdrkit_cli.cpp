// Command-line surface: fit / transform / simulate / enrich / onegroup /
// intervals. All outputs are CSV or JSON and embed the run configuration.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fdrkit/density.hpp"
#include "fdrkit/dist.hpp"
#include "fdrkit/enrich.hpp"
#include "fdrkit/fdr.hpp"
#include "fdrkit/nullfit.hpp"
#include "fdrkit/onegroup.hpp"
#include "fdrkit/selectci.hpp"
#include "fdrkit/sim.hpp"
#include "fdrkit/zsample.hpp"

using nlohmann::json;
namespace fk = fdrkit;

namespace {

std::uint64_t seed_or_env(std::uint64_t seed, bool seed_given) {
    if (seed_given) return seed;
    if (const char* env = std::getenv("FDRKIT_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 1;
}

json null_to_json(const fk::NullModel& m) {
    const char* names[] = {"theoretical", "geometric", "analytic", "taylor"};
    return json{{"method", names[static_cast<int>(m.method)]},
                {"delta0", m.delta0},
                {"sigma0", m.sigma0},
                {"p0_raw", m.p0_raw},
                {"p0_used", m.p0_used()}};
}

fk::TailSide parse_side(const std::string& s) {
    if (s == "left") return fk::TailSide::Left;
    if (s == "right") return fk::TailSide::Right;
    return fk::TailSide::TwoSided;
}

std::string config_echo(const json& cfg) { return cfg.dump(); }

int cmd_fit(const std::string& in, const std::string& out,
            const std::string& null_method, double p0, int bins, int degree,
            double q, double fdr_threshold, const std::string& side_name,
            bool use_ecdf) {
    const auto z = fk::load_zvalues(in);
    const auto hist = fk::bin(z, bins);
    const auto fit = fk::fit_mixture_density(hist, degree);

    json cfg = {{"cmd", "fit"},          {"in", in},
                {"null", null_method},   {"p0", p0},
                {"bins", bins},          {"degree", degree},
                {"q", q},                {"fdr_threshold", fdr_threshold},
                {"side", side_name},     {"ecdf", use_ecdf}};

    fk::NullModel null;
    json analytic_extra;
    if (null_method == "theoretical") {
        null = fk::theoretical_null(p0);
    } else if (null_method == "geometric") {
        null = fk::geometric_null(fit, hist);
    } else if (null_method == "analytic") {
        const auto a = fk::analytic_null(z);
        null = a.model;
        analytic_extra = {{"interval", {a.a, a.b}}, {"n0", a.n0}};
    } else {
        std::cerr << "unknown null method: " << null_method << "\n";
        return 2;
    }
    // side-by-side theoretical-null report printed for due diligence
    const auto theo = fk::theoretical_null(p0);

    const auto side = parse_side(side_name);
    const auto res = fk::fdr_report(z, null, fit, q, fdr_threshold, side,
                                    use_ecdf);

    // per-case table
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < z.size(); ++i) {
        rows.push_back({z.has_ids() ? z.ids[i] : std::to_string(i + 1),
                        fk::format_sig6(z.values[i]),
                        fk::format_sig6(res.local[i].fdr),
                        fk::format_sig6(res.tail_left[i]),
                        fk::format_sig6(res.tail_right[i]),
                        res.selected_bh[i] ? "1" : "0",
                        res.selected_fdr_threshold[i] ? "1" : "0"});
    }
    fk::save_table(out + ".fdr.csv",
                   {"id", "z", "fdr", "Fdr_left", "Fdr_right", "selected_bh",
                    "selected_fdr20"},
                   rows, config_echo(cfg));

    // null + fit JSON
    json null_json = {{"config", cfg},
                      {"null", null_to_json(null)},
                      {"theoretical_reference", null_to_json(theo)},
                      {"fit",
                       {{"degree", fit.degree},
                        {"beta", fit.beta},
                        {"center", fit.center},
                        {"scale", fit.scale},
                        {"deviance", fit.deviance}}}};
    if (!analytic_extra.is_null()) null_json["analytic"] = analytic_extra;
    std::ofstream(out + ".null.json") << null_json.dump(2) << "\n";

    // binned curve + nonnull counts + power report
    std::vector<double> fdr_k(hist.num_bins());
    for (std::size_t k = 0; k < hist.num_bins(); ++k)
        fdr_k[k] = fk::local_fdr(hist.midpoints[k], null, fit).fdr;
    const auto y1 = fk::nonnull_counts(hist, fdr_k);
    std::vector<std::vector<std::string>> curve;
    for (std::size_t k = 0; k < hist.num_bins(); ++k)
        curve.push_back({fk::format_sig6(hist.midpoints[k]),
                         std::to_string(hist.counts[k]),
                         fk::format_sig6(fit.fitted_means[k]),
                         fk::format_sig6(fdr_k[k]),
                         fk::format_sig6(y1[k])});
    fk::save_table(out + ".bins.csv",
                   {"midpoint", "count", "fitted", "fdr", "nonnull_count"},
                   curve, config_echo(cfg));

    json power = {{"config", cfg},
                  {"efdr1", fk::power_diagnostic(y1, fdr_k)},
                  {"n_fdr_le_threshold",
                   std::count(res.selected_fdr_threshold.begin(),
                              res.selected_fdr_threshold.end(), true)},
                  {"n_selected_bh",
                   std::count(res.selected_bh.begin(), res.selected_bh.end(),
                              true)}};
    std::ofstream(out + ".power.json") << power.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"empirical-Bayes large-scale testing toolkit"};
    app.require_subcommand(1);

    // shared flags
    std::string in, out = "fdrkit_out", null_method = "geometric";
    std::string side = "two", method = "rowrand", experiment, interval_mode =
                                                                  "paper";
    std::string matrix_path, design_path, sets_path, set_name;
    double p0 = 1.0, q = 0.1, fdr_threshold = 0.2;
    int bins = 90, degree = 7;
    long reps = 250, b_draws = 999;
    std::uint64_t seed = 1;
    bool use_ecdf = false;

    auto* fit = app.add_subcommand("fit", "fdr analysis of a z-value file");
    bool fit_seed_given = false;
    fit->add_option("--in", in)->required();
    fit->add_option("--out", out);
    fit->add_option("--null", null_method)
        ->check(CLI::IsMember({"theoretical", "geometric", "analytic"}));
    fit->add_option("--p0", p0);
    fit->add_option("--bins", bins);
    fit->add_option("--degree", degree);
    fit->add_option("--q", q);
    fit->add_option("--fdr-threshold", fdr_threshold);
    fit->add_option("--side", side)->check(CLI::IsMember({"left", "right", "two"}));
    fit->add_flag("--ecdf", use_ecdf);

    auto* transform = app.add_subcommand(
        "transform", "t / binomial / p statistics to the z scale");
    std::string kind = "t";
    double t_stat = 0.0, p_in = 0.5, p_ad = 0.0, p_dis = 0.0, delta = 0.0;
    long n_ad = 1, n_dis = 1;
    int df = 100, sign = 1;
    transform->add_option("--kind", kind)
        ->check(CLI::IsMember({"t", "p", "binom"}));
    transform->add_option("--t", t_stat);
    transform->add_option("--df", df);
    transform->add_option("--p", p_in);
    transform->add_option("--sign", sign);
    transform->add_option("--p-ad", p_ad);
    transform->add_option("--n-ad", n_ad);
    transform->add_option("--p-dis", p_dis);
    transform->add_option("--n-dis", n_dis);
    transform->add_option("--delta", delta);

    auto* simulate = app.add_subcommand("simulate", "run a named experiment");
    bool sim_seed_given = false;
    simulate->add_option("--experiment", experiment)
        ->required()
        ->check(CLI::IsMember({"table1", "table2", "fig6", "fig8"}));
    simulate->add_option("--reps", reps);
    auto* sim_seed_opt = simulate->add_option("--seed", seed);
    simulate->add_option("--out", out);

    auto* enrich = app.add_subcommand("enrich", "gene-set enrichment");
    enrich->add_option("--in", in);
    enrich->add_option("--matrix", matrix_path);
    enrich->add_option("--design", design_path);
    enrich->add_option("--sets", sets_path)->required();
    enrich->add_option("--method", method)
        ->check(CLI::IsMember({"rowrand", "colperm", "restand"}));
    enrich->add_option("--B", b_draws);
    auto* enr_seed_opt = enrich->add_option("--seed", seed);
    enrich->add_option("--out", out);

    auto* onegroup =
        app.add_subcommand("onegroup", "prior-mixture analytics");
    std::string prior_json;
    onegroup->add_option("--prior", prior_json, "prior spec JSON file")
        ->required();
    onegroup->add_option("--out", out);

    auto* intervals =
        app.add_subcommand("intervals", "FCR-controlled selection intervals");
    intervals->add_option("--in", in)->required();
    intervals->add_option("--q", q);
    intervals->add_option("--side", side)
        ->check(CLI::IsMember({"left", "right", "two"}));
    intervals->add_option("--interval-mode", interval_mode)
        ->check(CLI::IsMember({"paper", "by"}));
    intervals->add_option("--out", out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (fit->parsed())
            return cmd_fit(in, out, null_method, p0, bins, degree, q,
                           fdr_threshold, side, use_ecdf);

        if (transform->parsed()) {
            double z;
            if (kind == "t")
                z = fk::t_to_z(t_stat, df);
            else if (kind == "p")
                z = fk::p_to_z(p_in, sign);
            else
                z = fk::binom_to_z(p_ad, n_ad, p_dis, n_dis, delta);
            std::cout << fk::format_sig6(z) << "\n";
            return 0;
        }

        if (simulate->parsed()) {
            sim_seed_given = sim_seed_opt->count() > 0;
            const auto s = seed_or_env(seed, sim_seed_given);
            const auto rep = fk::run_experiment(experiment, reps, s);
            json j = {{"config",
                       {{"cmd", "simulate"},
                        {"experiment", experiment},
                        {"reps", reps},
                        {"seed", s}}},
                      {"experiment", rep.experiment},
                      {"replicates", rep.replicates},
                      {"failures", rep.failures}};
            for (const auto& [key, agg] : rep.aggregates)
                j["aggregates"][key] = {{"mean", agg.mean}, {"sd", agg.sd}};
            std::ofstream(out + ".report.json") << j.dump(2) << "\n";
            std::cout << j["aggregates"].dump(2) << "\n";
            return 0;
        }

        if (enrich->parsed()) {
            const auto s = seed_or_env(seed, enr_seed_opt->count() > 0);
            const auto sets = fk::load_gmt(sets_path);
            fk::ZSample z;
            fk::ExpressionMatrix mat;
            const bool need_matrix = method != "rowrand";
            if (need_matrix) {
                if (matrix_path.empty() || design_path.empty())
                    throw CLI::ValidationError(
                        "--matrix and --design required for " + method);
                mat = fk::load_matrix_tsv(matrix_path);
                fk::apply_design(mat, design_path);
            } else {
                if (in.empty())
                    throw CLI::ValidationError("--in required for rowrand");
                z = fk::load_zvalues(in);
            }
            json cfg = {{"cmd", "enrich"}, {"method", method},
                        {"B", b_draws},    {"seed", s},
                        {"sets", sets_path}};
            std::vector<std::vector<std::string>> rows;
            for (std::size_t si = 0; si < sets.size(); ++si) {
                fk::EnrichmentResult r;
                if (method == "rowrand")
                    r = fk::enrich_rowrand(z, sets[si].members, b_draws,
                                           s + si);
                else
                    r = fk::enrich_colperm(mat, sets[si].members, b_draws,
                                           s + si, method == "restand");
                rows.push_back({sets[si].name, std::to_string(r.m),
                                fk::format_sig6(r.observed),
                                fk::format_sig6(r.p_two_sided),
                                fk::format_sig6(r.p_one_sided_right)});
            }
            fk::save_table(out + ".enrich.csv",
                           {"set", "m", "observed", "p_two_sided",
                            "p_one_sided_right"},
                           rows, cfg.dump());
            return 0;
        }

        if (onegroup->parsed()) {
            std::ifstream pf(prior_json);
            if (!pf) throw std::runtime_error("cannot open " + prior_json);
            json pj;
            pf >> pj;
            fk::PriorMixture prior;
            for (const auto& c : pj["components"])
                prior.components.push_back({c["weight"].get<double>(),
                                            c["mean"].get<double>(),
                                            c["sd"].get<double>()});
            prior.validate();
            const auto cum = fk::posterior_cumulants_zero(prior);
            const double f0 = fk::convolve_prior(prior, 0.0);
            json j = {{"config", {{"cmd", "onegroup"}, {"prior", prior_json}}},
                      {"cumulants",
                       {{"E0", cum.e0},
                        {"V0", cum.v0},
                        {"S0", cum.s0},
                        {"Vbar0", cum.vbar0}}},
                      {"f_at_0", f0}};
            for (int jj = 0; jj <= 2; ++jj) {
                const auto tn = fk::taylor_null(cum, f0, jj);
                j["taylor_nulls"]["J" + std::to_string(jj)] =
                    null_to_json(tn.model);
            }
            j["taylor_nulls"]["J3_p0"] = fk::taylor_p0(cum, f0, 3);
            std::ofstream(out + ".onegroup.json") << j.dump(2) << "\n";
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (intervals->parsed()) {
            const auto z = fk::load_zvalues(in);
            const auto mode = interval_mode == "paper"
                                  ? fk::FcrMode::PaperMatching
                                  : fk::FcrMode::BenjaminiYekutieli;
            const auto ci =
                fk::fcr_intervals(z, q, parse_side(side), mode);
            json cfg = {{"cmd", "intervals"},
                        {"in", in},
                        {"q", q},
                        {"side", side},
                        {"interval_mode", interval_mode}};
            std::vector<std::vector<std::string>> rows;
            for (std::size_t i = 0; i < ci.selected.size(); ++i) {
                const auto idx = ci.selected[i];
                rows.push_back(
                    {z.has_ids() ? z.ids[idx] : std::to_string(idx + 1),
                     fk::format_sig6(z.values[idx]),
                     fk::format_sig6(ci.lo[i]), fk::format_sig6(ci.hi[i])});
            }
            fk::save_table(out + ".intervals.csv", {"id", "z", "lo", "hi"},
                           rows, cfg.dump());
            json j = {{"config", cfg},
                      {"R", ci.selected.size()},
                      {"z0", ci.threshold_z},
                      {"half_width", ci.half_width}};
            std::ofstream(out + ".intervals.json") << j.dump(2) << "\n";
            std::cout << j.dump(2) << "\n";
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
