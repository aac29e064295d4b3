#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <pam/ctbp.hpp>
#include <pam/generate.hpp>
#include <pam/graph.hpp>
#include <pam/io.hpp>
#include <pam/ising.hpp>
#include <pam/parallel.hpp>
#include <pam/percolation.hpp>
#include <pam/ppt.hpp>
#include <pam/spectral.hpp>
#include <pam/urn.hpp>

using namespace pam;

namespace {

struct Global {
    std::uint64_t seed = 1;
    long reps = 0; // 0: the subcommand's default
    int workers = 1;
    std::string out = "-";
};

Global G;

long reps_or(long fallback) { return G.reps > 0 ? G.reps : fallback; }

// stdout for "-", else the named file
class Output {
public:
    explicit Output(const std::string& path) {
        if (path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::runtime_error("cannot open " + path + " for writing");
        }
    }
    std::ostream& operator*() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

MultiGraph load_graph(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_edge_list(is);
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double x = std::stod(item, &used);
        if (used != item.size()) throw ParameterError("bad number '" + item + "'");
        out.push_back(x);
    }
    if (out.empty()) throw ParameterError("empty list");
    return out;
}

json base_meta(const std::string& command) {
    return json{{"command", command}, {"seed", G.seed}, {"workers", G.workers}};
}

// ---- graph parameters shared by generate, percolate, giant -----------------

struct GraphArgs {
    std::string model = "d";
    std::string law = "1";
    double delta = 0.0;
    int n = 1000;
    int a1 = 1, a2 = 1;

    void add(CLI::App* sc, bool with_n = true) {
        sc->add_option("--model", model, "attachment rule: a, b, d, e or f")->capture_default_str();
        sc->add_option("--m", law, "out-degree law: 3, fixed:2, geometric:p or zeta:s:cap")->capture_default_str();
        sc->add_option("--delta", delta, "affine shift")->capture_default_str();
        if (with_n) sc->add_option("--n", n, "number of vertices")->capture_default_str();
        sc->add_option("--a1", a1, "initial degree of vertex 1")->capture_default_str();
        sc->add_option("--a2", a2, "initial degree of vertex 2")->capture_default_str();
    }

    PaConfig config() const {
        PaConfig c;
        c.model = parse_model(model);
        c.law = OutDegreeLaw::parse(law);
        c.delta = delta;
        c.n = n;
        c.a1 = a1;
        c.a2 = a2;
        validate(c);
        return c;
    }

    json meta() const {
        return json{{"model", model}, {"m", law}, {"delta", delta}, {"n", n}, {"a1", a1}, {"a2", a2}};
    }
};

// ---- verify -------------------------------------------------------------------

int run_verify() {
    int failures = 0;
    auto report = [&](bool ok, const std::string& what) {
        std::cout << (ok ? "ok   " : "FAIL ") << what << '\n';
        failures += !ok;
    };

    {
        double worst = 0.0, worst_sum = 0.0;
        const std::tuple<Model, UrnVariant, bool> pairs[] = {
            {Model::A, UrnVariant::SL, true}, {Model::B, UrnVariant::NSL, true}, {Model::D, UrnVariant::NSL, false}};
        for (auto [model, variant, collapsed] : pairs)
            for (auto [mm, n] : {std::pair{1, 3}, {1, 4}, {1, 5}, {2, 3}})
                for (double delta : {-0.4, 0.0, 1.3}) {
                    std::vector<int> m(static_cast<std::size_t>(n) + 1, mm);
                    m[0] = 0;
                    m[1] = m[2] = 1;
                    PaConfig c;
                    c.model = model;
                    c.law = OutDegreeLaw::fixed(mm);
                    c.delta = delta;
                    c.n = n;
                    c.out_degrees = m;
                    UrnConfig u{variant, collapsed, m, delta, 1, 1, n};
                    double sa = 0.0, sb = 0.0;
                    for (const auto& g : enumerate_candidates(m, n, 1, 1)) {
                        const double a = graph_probability_model(model, g, c), b = graph_probability_urn(u, g);
                        worst = std::max(worst, std::fabs(a - b));
                        sa += a;
                        sb += b;
                    }
                    worst_sum = std::max({worst_sum, std::fabs(sa - 1), std::fabs(sb - 1)});
                }
        report(worst <= 1e-12 && worst_sum <= 1e-10, "urn and model graph probabilities agree (max gap " +
                                                         fmt(worst) + ", max |sum - 1| " + fmt(worst_sum) + ")");
    }
    {
        double worst = 0.0;
        bool beta_ok = true;
        for (int m : {1, 2, 3, 5})
            for (double delta : {0.5, 1.0, 3.0, 9.0}) {
                auto s = spectral_summary(m, delta);
                worst = std::max(worst, std::fabs(s.pi_c * 2 * s.lambda_m / (2 * s.chi - 1) - 1));
                for (int i = 0; i < 2; ++i)
                    worst = std::max(worst, std::fabs(s.c[i][0] * s.eigvec[0] + s.c[i][1] * s.eigvec[1] -
                                                      s.lambda_m * s.eigvec[i]));
                beta_ok = beta_ok && s.beta_c == std::atanh(s.pi_c);
            }
        report(worst <= 1e-12 && beta_ok, "critical values and Perron eigenpairs consistent (max error " + fmt(worst) + ")");
    }
    {
        Stream s(G.seed, 1);
        double worst = 0.0;
        for (int trial = 0; trial < 300; ++trial) {
            const int n = 1 + static_cast<int>(s.below(8));
            MultiGraph g(n);
            for (int v = 2; v <= n; ++v) g.add_edge(v, 1 + static_cast<int>(s.below(static_cast<std::uint64_t>(v - 1))));
            IsingParams p{2 * s.uniform(), s.uniform()};
            auto ex = exact_ising(g, p);
            auto bp = tree_bp(g, p, 1 + static_cast<int>(s.below(n)));
            for (int v = 1; v <= n; ++v) worst = std::max(worst, std::fabs(ex.marginals[v] - bp.marginals[v]));
        }
        report(worst <= 1e-10, "belief propagation exact on small trees (max error " + fmt(worst) + ")");
    }
    {
        double worst = 0.0;
        for (auto [a, b] : {std::pair{0.0, 2.0}, {0.5, 3.0}, {-0.5, 1.2}}) {
            const long N = 200000;
            double sum = 0.0;
            for (long k = 1; k <= N; ++k) sum += std::exp(std::lgamma(k + a) - std::lgamma(k + b));
            const double x0 = N + 0.5 + (a + b - 1) / 2;
            sum += std::pow(x0, a - b + 1) / (b - a - 1);
            worst = std::max(worst, std::fabs(sum - gamma_ratio_sum(a, b)));
        }
        report(worst <= 1e-8, "gamma ratio sums match partial sums (max error " + fmt(worst) + ")");
    }
    {
        double worst = 0.0;
        for (auto [m, delta] : {std::pair{1, 1.5}, {2, 0.0}, {2, 9.0}}) {
            double total = 0.0;
            for (long k = m; k < 2'000'000; ++k) total += root_degree_pmf(m, delta, k);
            worst = std::max(worst, std::fabs(total - 1));
        }
        report(worst <= 1e-9, "root degree pmf normalised (max error " + fmt(worst) + ")");
    }
    std::cout << (failures ? "verify: FAILED\n" : "verify: all checks passed\n");
    return failures ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pamlab: simulations of affine preferential attachment graphs"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML or INI file supplying any flag");
    G.workers = default_workers();
    app.add_option("--seed", G.seed, "base seed")->capture_default_str();
    app.add_option("--reps", G.reps, "replicates (default depends on the command)")->check(CLI::PositiveNumber);
    app.add_option("--workers", G.workers, "worker threads (default from PAM_WORKERS)")->check(CLI::PositiveNumber);
    app.add_option("--out", G.out, "output file, - for stdout")->capture_default_str();

    std::function<int()> action;

    // generate
    GraphArgs gen;
    auto* c_gen = app.add_subcommand("generate", "sample one graph and write its edge list");
    gen.add(c_gen);
    c_gen->callback([&] {
        action = [&] {
            auto c = gen.config();
            Stream s(G.seed, 0);
            GenerateInfo info;
            auto g = generate(c, s, &info);
            if (c.model == Model::F && info.discarded_edges > 0)
                std::cerr << "warning: model f discarded " << info.discarded_edges << " edges\n";
            Output out(G.out);
            auto meta = base_meta("generate");
            meta["graph"] = gen.meta();
            write_provenance(*out, meta);
            write_edge_list(*out, g);
            return 0;
        };
    });

    // collapse
    std::string col_in;
    std::vector<int> col_groups;
    int col_size = 0;
    auto* c_col = app.add_subcommand("collapse", "merge consecutive vertex groups of an edge list");
    c_col->add_option("--in", col_in, "edge list")->required()->check(CLI::ExistingFile);
    auto* og = c_col->add_option("--groups", col_groups, "group sizes r1,r2,...")->delimiter(',');
    auto* os = c_col->add_option("--size", col_size, "equal group size")->check(CLI::PositiveNumber);
    og->excludes(os);
    c_col->callback([&] {
        action = [&] {
            auto g = load_graph(col_in);
            std::vector<int> r = col_groups;
            if (r.empty()) {
                if (col_size < 1) throw CLI::ValidationError("collapse", "give --groups or --size");
                r.assign(static_cast<std::size_t>((g.n + col_size - 1) / col_size), col_size);
            }
            auto h = collapse(g, r);
            Output out(G.out);
            auto meta = base_meta("collapse");
            meta["input"] = col_in;
            meta["groups"] = r;
            write_provenance(*out, meta);
            write_edge_list(*out, h);
            return 0;
        };
    });

    // percolate
    GraphArgs perc;
    std::string perc_in, perc_pis = "0.5";
    auto* c_perc = app.add_subcommand("percolate", "bond percolation sweep on one graph");
    perc.add(c_perc);
    c_perc->add_option("--in", perc_in, "edge list (otherwise a graph is generated)")->check(CLI::ExistingFile);
    c_perc->add_option("--pi", perc_pis, "retention probabilities, comma separated")->capture_default_str();
    c_perc->callback([&] {
        action = [&] {
            const auto pis = parse_doubles(perc_pis);
            Stream s(G.seed, 0);
            auto g = perc_in.empty() ? generate(perc.config(), s) : load_graph(perc_in);
            auto sweep = percolation_sweep(g, pis, s);
            Output out(G.out);
            auto meta = base_meta("percolate");
            if (perc_in.empty()) meta["graph"] = perc.meta();
            else meta["input"] = perc_in;
            write_provenance(*out, meta);
            *out << "pi,kept_edges,c1,c2,components\n";
            for (const auto& o : sweep)
                *out << fmt(o.pi) << ',' << o.kept_edges << ',' << o.c1 << ',' << o.c2 << ',' << o.component_count
                     << '\n';
            return 0;
        };
    });

    // ppt-sample
    std::string ppt_law = "1";
    double ppt_delta = 0.0;
    int ppt_depth = 3;
    std::size_t ppt_budget = 1'000'000;
    auto* c_ppt = app.add_subcommand("ppt-sample", "sample the local limit tree to a given depth");
    c_ppt->add_option("--m", ppt_law, "out-degree law")->capture_default_str();
    c_ppt->add_option("--delta", ppt_delta, "affine shift")->capture_default_str();
    c_ppt->add_option("--depth", ppt_depth, "depth")->capture_default_str()->check(CLI::NonNegativeNumber);
    c_ppt->add_option("--budget", ppt_budget, "node budget")->capture_default_str();
    c_ppt->callback([&] {
        action = [&] {
            PptParams p{OutDegreeLaw::parse(ppt_law), ppt_delta};
            Stream s(G.seed, 0);
            auto t = sample_ppt(p, ppt_depth, s, ppt_budget);
            Output out(G.out);
            auto meta = base_meta("ppt-sample");
            meta["m"] = ppt_law;
            meta["delta"] = ppt_delta;
            meta["depth"] = ppt_depth;
            meta["truncated_by_budget"] = t.truncated_by_budget;
            write_provenance(*out, meta);
            write_tree(*out, t);
            return 0;
        };
    });

    // survival
    std::string sv_law = "2", sv_pis;
    double sv_delta = 9.0;
    int sv_depth = 30;
    std::size_t sv_budget = 1'000'000;
    auto* c_sv = app.add_subcommand("survival", "survival of the percolated cluster of the tree root");
    c_sv->add_option("--m", sv_law, "out-degree law")->capture_default_str();
    c_sv->add_option("--delta", sv_delta, "affine shift")->capture_default_str();
    c_sv->add_option("--pi", sv_pis, "retention probabilities")->required();
    c_sv->add_option("--depth", sv_depth, "depth cap")->capture_default_str()->check(CLI::PositiveNumber);
    c_sv->add_option("--budget", sv_budget, "node budget per replicate")->capture_default_str();
    c_sv->callback([&] {
        action = [&] {
            PptParams p{OutDegreeLaw::parse(sv_law), sv_delta};
            std::vector<SurvivalRow> rows;
            for (double pi : parse_doubles(sv_pis))
                rows.push_back({pi, sv_depth, ppt_survival(p, pi, sv_depth, reps_or(1000), G.seed, G.workers, sv_budget)});
            Output out(G.out);
            auto meta = base_meta("survival");
            meta["m"] = sv_law;
            meta["delta"] = sv_delta;
            meta["budget"] = sv_budget;
            write_survival_csv(*out, meta, rows);
            return 0;
        };
    });

    // thresholds
    int th_m = 1;
    double th_delta = 0.0, th_b = 0.0;
    auto* c_th = app.add_subcommand("thresholds", "critical values as JSON");
    c_th->add_option("--m", th_m, "fixed out-degree")->required()->check(CLI::PositiveNumber);
    c_th->add_option("--delta", th_delta, "affine shift")->required();
    c_th->add_option("--b", th_b, "also report the truncated operator at this b");
    c_th->callback([&] {
        action = [&] {
            auto s = spectral_summary(th_m, th_delta);
            json j{{"m", s.m},           {"delta", s.delta},       {"chi", s.chi},
                   {"tau_e", s.tau_e},   {"c", s.c},               {"lambda_m", s.lambda_m},
                   {"eigvec", s.eigvec}, {"r", s.r_full},          {"pi_c", s.pi_c},
                   {"beta_c", s.beta_c}, {"conjectured", s.conjectured}};
            if (th_delta <= 0 && th_m >= 2) j["elbow_threshold_at_pi_0.5"] = elbow_threshold(th_m, th_delta, 0.5);
            if (th_b > 0) {
                auto t = truncated_spectral(th_m, th_delta, th_b);
                j["truncated"] = {{"b", t.b},     {"lambda_b", t.lambda_b}, {"r_b", t.r_b},
                                  {"p", t.p},     {"stationary", t.stationary}};
            }
            Output out(G.out);
            *out << j.dump(2) << '\n';
            return 0;
        };
    });

    // subcritical
    int sc_m = 1;
    double sc_delta = 1.5;
    std::string sc_pis = "0.4,0.5,0.6,0.7", sc_rows;
    std::vector<long> sc_sizes;
    auto* c_sc = app.add_subcommand("subcritical", "slope difference of log c1 and log dmax below pi_c");
    c_sc->add_option("--m", sc_m, "fixed out-degree")->capture_default_str()->check(CLI::PositiveNumber);
    c_sc->add_option("--delta", sc_delta, "affine shift")->capture_default_str();
    c_sc->add_option("--pi", sc_pis, "retention probabilities")->capture_default_str();
    c_sc->add_option("--sizes", sc_sizes, "graph sizes (default x*10^y, x<=9, y in {2,3}, plus 1e4, 3e4)")
        ->delimiter(',');
    c_sc->add_option("--rows", sc_rows, "also write per-replicate rows to this CSV");
    c_sc->callback([&] {
        action = [&] {
            const auto pis = parse_doubles(sc_pis);
            const auto sizes = sc_sizes.empty() ? paper_sizes({2, 3}, {10000, 30000}) : sc_sizes;
            const long reps = reps_or(200);
            auto res = subcritical_experiment(sc_m, sc_delta, pis, sizes, reps, G.seed, G.workers);
            auto meta = base_meta("subcritical");
            meta["m"] = sc_m;
            meta["delta"] = sc_delta;
            meta["pis"] = pis;
            meta["sizes"] = sizes;
            meta["reps"] = reps;
            if (!sc_rows.empty()) {
                Output rows(sc_rows);
                write_experiment_csv(*rows, meta, res.rows);
            }
            Output out(G.out);
            write_summary_csv(*out, meta, res.summary);
            return 0;
        };
    });

    // giant
    GraphArgs gi;
    std::string gi_pis;
    std::vector<long> gi_sizes{1000, 10000};
    auto* c_gi = app.add_subcommand("giant", "c1, c2 and dmax over sizes, replicates and pi");
    gi.add(c_gi, false);
    c_gi->add_option("--pi", gi_pis, "retention probabilities")->required();
    c_gi->add_option("--sizes", gi_sizes, "graph sizes")->delimiter(',')->capture_default_str();
    c_gi->callback([&] {
        action = [&] {
            const auto pis = parse_doubles(gi_pis);
            auto c = gi.config();
            const long reps = reps_or(100);
            auto rows = giant_experiment(c, pis, gi_sizes, reps, G.seed, G.workers);
            auto meta = base_meta("giant");
            meta["graph"] = gi.meta();
            meta["graph"].erase("n");
            meta["pis"] = pis;
            meta["sizes"] = gi_sizes;
            meta["reps"] = reps;
            Output out(G.out);
            write_experiment_csv(*out, meta, rows);
            return 0;
        };
    });

    // ising
    std::string is_mode = "exact", is_in, is_boundary = "pool", is_csv;
    double is_beta = 0.2, is_B = 0.1;
    int is_m = 2, is_depth = 3;
    double is_delta = 9.0;
    auto* c_is = app.add_subcommand("ising", "Ising model: exact, bp (trees) or mc (local limit)");
    c_is->add_option("mode", is_mode, "exact, bp or mc")->check(CLI::IsMember({"exact", "bp", "mc"}))->capture_default_str();
    c_is->add_option("--in", is_in, "edge list (exact, bp)")->check(CLI::ExistingFile);
    c_is->add_option("--beta", is_beta, "inverse temperature")->capture_default_str();
    c_is->add_option("--B", is_B, "external field")->capture_default_str();
    c_is->add_option("--m", is_m, "fixed out-degree (mc)")->capture_default_str()->check(CLI::PositiveNumber);
    c_is->add_option("--delta", is_delta, "affine shift (mc)")->capture_default_str();
    c_is->add_option("--depth", is_depth, "tree depth (mc)")->capture_default_str()->check(CLI::PositiveNumber);
    c_is->add_option("--boundary", is_boundary, "free, plus or pool (mc)")->capture_default_str();
    c_is->add_option("--csv", is_csv, "also write the mc estimates as CSV");
    c_is->callback([&] {
        action = [&] {
            const IsingParams p{is_beta, is_B};
            json j{{"mode", is_mode}, {"beta", is_beta}, {"B", is_B}};
            if (is_mode != "mc") {
                if (is_in.empty()) throw CLI::ValidationError("ising", "exact and bp need --in");
                auto g = load_graph(is_in);
                j["input"] = is_in;
                if (is_mode == "exact") {
                    auto r = exact_ising(g, p);
                    j["log_Z"] = r.log_Z;
                    j["pressure"] = r.pressure;
                    j["magnetization"] = r.magnetization;
                    j["internal_energy"] = r.internal_energy;
                    j["marginals"] = std::vector<double>(r.marginals.begin() + 1, r.marginals.end());
                } else {
                    auto r = tree_bp(g, p);
                    j["root_field"] = r.root_field;
                    j["marginals"] = std::vector<double>(r.marginals.begin() + 1, r.marginals.end());
                    j["edge_correlations"] = r.edge_correlations;
                }
            } else {
                CavityOptions opt;
                opt.depth = is_depth;
                opt.reps = reps_or(2000);
                opt.boundary = parse_boundary(is_boundary);
                opt.workers = G.workers;
                auto run = rppt_cavity_mc(is_m, is_delta, {p}, opt, G.seed);
                const auto& pt = run.points[0];
                auto ci = [](const Estimate& e) {
                    return json{{"mean", e.mean}, {"se", e.se}, {"ci95", {e.mean - 1.96 * e.se, e.mean + 1.96 * e.se}}};
                };
                j["m"] = is_m;
                j["delta"] = is_delta;
                j["depth"] = is_depth;
                j["boundary"] = is_boundary;
                j["reps"] = opt.reps;
                j["seed"] = G.seed;
                j["magnetization"] = ci(pt.magnetization);
                j["internal_energy"] = ci(pt.internal_energy);
                j["pressure"] = ci(pt.pressure);
                j["depth_discrepancy"] = ci(pt.depth_discrepancy);
                j["budget_hits"] = run.budget_hits;
                j["mean_nodes"] = run.mean_nodes;
                if (!is_csv.empty()) {
                    Output csv(is_csv);
                    write_cavity_csv(*csv, j, run);
                }
            }
            Output out(G.out);
            *out << j.dump(2) << '\n';
            return 0;
        };
    });

    auto* c_ver = app.add_subcommand("verify", "run the fast oracle and equivalence checks");
    c_ver->callback([&] { action = run_verify; });

    CLI11_PARSE(app, argc, argv);
    try {
        return action();
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
