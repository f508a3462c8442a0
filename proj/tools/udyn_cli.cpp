// Command-line front end. Talks to the toolkit exclusively through the C API
// in udyn.h; all output goes through one writer that supports csv and json
// with atomic file replacement.

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "udyn.h"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// 17 significant digits keep doubles round-trip exact.
std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string scalar_to_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return fmt(v.get<double>());
    return v.dump();
}

struct Output {
    json meta = json::object();
    std::vector<std::string> columns;
    std::vector<json> rows;

    void add_row(const json& row) { rows.push_back(row); }

    std::string render_csv() const {
        std::ostringstream os;
        for (auto it = meta.begin(); it != meta.end(); ++it) {
            os << "# " << it.key() << '=' << scalar_to_string(it.value()) << '\n';
        }
        if (!columns.empty()) {
            for (std::size_t i = 0; i < columns.size(); ++i) {
                if (i) os << ',';
                os << columns[i];
            }
            os << '\n';
            for (const json& row : rows) {
                for (std::size_t i = 0; i < columns.size(); ++i) {
                    if (i) os << ',';
                    os << scalar_to_string(row.at(columns[i]));
                }
                os << '\n';
            }
        }
        return os.str();
    }

    std::string render_json() const {
        json doc;
        doc["meta"] = meta;
        doc["rows"] = json::array();
        for (const json& row : rows) {
            json ordered = json::object();
            for (const std::string& c : columns) ordered[c] = row.at(c);
            doc["rows"].push_back(ordered.empty() ? row : ordered);
        }
        return doc.dump(2) + "\n";
    }
};

// Writes to a sibling temp file first so readers never observe a torn file.
void emit(const Output& out, const std::string& path, const std::string& format) {
    const std::string text = format == "json" ? out.render_json() : out.render_csv();
    if (path.empty()) {
        std::cout << text;
        return;
    }
    const fs::path target(path);
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string());
        os << text;
        os.flush();
        if (!os) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

[[noreturn]] void die(int code) {
    std::cerr << "error: " << udyn_last_error() << '\n';
    std::exit(code == UDYN_OK ? 1 : 2);
}

void check(int code) {
    if (code != UDYN_OK) die(code);
}

struct RngHandle {
    udyn_rng* rng = nullptr;
    explicit RngHandle(uint64_t seed, uint64_t stream = 0) {
        check(udyn_rng_create(seed, stream, &rng));
    }
    ~RngHandle() { udyn_rng_destroy(rng); }
    RngHandle(const RngHandle&) = delete;
    RngHandle& operator=(const RngHandle&) = delete;
};

json claim_row(const udyn_claim_report& r) {
    return json{{"claim", r.id},
                {"n", r.n},
                {"trials", r.trials},
                {"pass_count", r.pass_count},
                {"pass_rate", r.pass_rate},
                {"ci99_lo", r.ci_lo},
                {"ci99_hi", r.ci_hi},
                {"wall_ms", r.wall_ms}};
}

int64_t classify_label(int64_t n, int64_t a, int64_t b, double gamma) {
    int label = 0;
    check(udyn_classify(n, a, b, gamma, &label, nullptr));
    return label;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"undecided-state dynamics laboratory"};
    app.require_subcommand(1);
    app.fallthrough();

    uint64_t seed = 0;
    std::string out_path;
    std::string format = "csv";
    int workers = 0;
    app.add_option("--seed", seed, "base RNG seed (env UDYN_SEED overrides)")
        ->capture_default_str();
    app.add_option("--out", out_path, "write output to this file (atomic); default stdout");
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--workers", workers, "worker threads, 0 = hardware concurrency")
        ->capture_default_str();

    int64_t n = 1000, a = -1, b = -1, trials = 1000, max_rounds = 0;
    double gamma = 1.0, epsilon = 0.5;

    auto* sim = app.add_subcommand("simulate", "run one trajectory and label each round");
    sim->add_option("--n", n)->required();
    sim->add_option("--a", a)->required();
    sim->add_option("--b", b)->required();
    sim->add_option("--gamma", gamma)->capture_default_str();
    sim->add_option("--max-rounds", max_rounds, "0 = default ceil(100 ln n)");

    auto* exp = app.add_subcommand("expectations", "one-round expectations, optionally vs sampled means");
    exp->add_option("--n", n)->required();
    exp->add_option("--a", a)->required();
    exp->add_option("--b", b)->required();
    exp->add_option("--trials", trials, "Monte Carlo trials (0 = closed form only)")
        ->capture_default_str();

    auto* pha = app.add_subcommand("phases", "audit sampled trajectories against the phase digraph");
    pha->add_option("--n", n)->required();
    pha->add_option("--a", a, "start; default a = b = n/4");
    pha->add_option("--b", b);
    pha->add_option("--gamma", gamma)->capture_default_str();
    pha->add_option("--trials", trials)->capture_default_str();
    pha->add_option("--max-rounds", max_rounds);

    std::vector<int64_t> ns;
    std::string start_kind = "balanced";
    auto* sca = app.add_subcommand("scaling", "absorption-time scaling across sizes");
    sca->add_option("--ns", ns, "population sizes")->required()->delimiter(',');
    sca->add_option("--start", start_kind)->check(CLI::IsMember({"balanced", "biased"}));
    sca->add_option("--gamma", gamma)->capture_default_str();
    sca->add_option("--trials", trials)->capture_default_str();

    std::string claim_name = "all";
    auto* clm = app.add_subcommand("claims", "Monte Carlo validation of the per-phase claims");
    clm->add_option("--claim", claim_name, "claim name or 'all'")->capture_default_str();
    clm->add_option("--n", n)->capture_default_str();
    clm->add_option("--a", a, "start; default is the claim's canonical configuration");
    clm->add_option("--b", b);
    clm->add_option("--gamma", gamma)->capture_default_str();
    clm->add_option("--epsilon", epsilon)->capture_default_str();
    clm->add_option("--trials", trials)->capture_default_str();

    bool mirror = false;
    auto* mino = app.add_subcommand("minority", "minority-win probability from a sqrt(n) bias");
    mino->add_option("--n", n)->capture_default_str();
    mino->add_option("--trials", trials)->capture_default_str();
    mino->add_flag("--mirror", mirror, "also run with the colors swapped");

    auto* low = app.add_subcommand("lowerbound", "rounds spent in the slow region from s = n^(2/3)");
    low->add_option("--n", n)->capture_default_str();
    low->add_option("--trials", trials)->capture_default_str();
    low->add_option("--gamma", gamma)->capture_default_str();

    auto* sym = app.add_subcommand("symbreak", "first round with |a-b| >= sqrt(n ln n)");
    sym->add_option("--n", n)->required();
    sym->add_option("--a", a, "start; default a = b = n/2");
    sym->add_option("--b", b);
    sym->add_option("--trials", trials)->capture_default_str();

    std::string kind = "plain", export_path;
    auto* exa = app.add_subcommand("exact", "exact-chain absorption analysis (n <= 60)");
    exa->add_option("--n", n)->required();
    exa->add_option("--kind", kind)->check(CLI::IsMember({"plain", "pruned"}));
    exa->add_option("--gamma", gamma)->capture_default_str();
    exa->add_option("--a", a, "start for absorption probabilities; default a = b = n/4");
    exa->add_option("--b", b);
    exa->add_option("--export", export_path, "also write the kernel as CSV to this path");

    int64_t degree = 16, pairs = 200;
    std::string save_path, load_path;
    auto* gra = app.add_subcommand("graph", "expander experiments on random regular graphs");
    gra->add_option("--n", n)->capture_default_str();
    gra->add_option("--d", degree)->capture_default_str();
    gra->add_option("--pairs", pairs, "random set pairs for the mixing check")
        ->capture_default_str();
    gra->add_option("--trials", trials, "consensus runs from a biased start")
        ->capture_default_str();
    gra->add_option("--save", save_path, "write the generated graph as an edge list");
    gra->add_option("--load", load_path, "run on this edge list instead of generating");

    std::string form = "mult", direction = "upper";
    double mu = 0, delta = 0, lam = 0, p = -1, threshold = 0;
    auto* bnd = app.add_subcommand("bounds", "concentration bounds, optionally checked empirically");
    bnd->add_option("--form", form)->check(CLI::IsMember({"mult", "add", "reverse"}));
    bnd->add_option("--mu", mu, "mean (mult and reverse forms)");
    bnd->add_option("--delta", delta, "relative deviation (mult and reverse forms)");
    bnd->add_option("--n", n)->capture_default_str();
    bnd->add_option("--lambda", lam, "absolute deviation (add form)");
    bnd->add_option("--direction", direction)->check(CLI::IsMember({"upper", "lower"}));
    bnd->add_option("--p", p, "success probability; enables the empirical check");
    bnd->add_option("--threshold", threshold, "empirical tail threshold");
    bnd->add_option("--trials", trials)->capture_default_str();

    double h = 1.0;
    int64_t configs = 50;
    auto* hyp = app.add_subcommand("hypotheses", "estimate the symmetry-breaking hypothesis constants");
    hyp->add_option("--n", n)->capture_default_str();
    hyp->add_option("--h-scale", h, "bias unit in multiples of sqrt(n)")->capture_default_str();
    hyp->add_option("--epsilon", epsilon)->capture_default_str();
    hyp->add_option("--configs", configs)->capture_default_str();
    hyp->add_option("--trials", trials, "trials per sampled configuration")
        ->capture_default_str();
    hyp->add_option("--gamma", gamma)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    // UDYN_SEED overrides --seed when set.
    if (const char* env = std::getenv("UDYN_SEED")) {
        seed = std::strtoull(env, nullptr, 10);
    }

    Output out;
    out.meta["seed"] = seed;
    bool assertions_ok = true;

    try {
        if (sim->parsed()) {
            RngHandle rng(seed);
            udyn_trajectory* traj = nullptr;
            check(udyn_run(n, a, b, rng.rng, max_rounds, &traj));
            out.columns = {"round", "a", "b", "q", "s", "region"};
            const int64_t len = udyn_trajectory_length(traj);
            for (int64_t i = 0; i < len; ++i) {
                int64_t ca = 0, cb = 0;
                check(udyn_trajectory_at(traj, i, &ca, &cb));
                out.add_row({{"round", i},
                             {"a", ca},
                             {"b", cb},
                             {"q", n - ca - cb},
                             {"s", ca - cb},
                             {"region", udyn_region_name(
                                            static_cast<int>(classify_label(n, ca, cb, gamma)))}});
            }
            int64_t violations = 0;
            check(udyn_audit_trajectory(traj, gamma, &violations));
            out.meta["n"] = n;
            out.meta["gamma"] = gamma;
            out.meta["outcome"] = udyn_outcome_name(udyn_trajectory_outcome(traj));
            out.meta["rounds"] = len - 1;
            out.meta["digraph_violations"] = violations;
            udyn_trajectory_destroy(traj);
            assertions_ok = violations == 0;
        } else if (exp->parsed()) {
            double e[4];
            check(udyn_expected_next(n, a, b, e));
            out.meta["n"] = n;
            out.columns = {"quantity", "closed_form", "sample_mean", "trials"};
            double ma = 0, mb = 0;
            if (trials > 0) {
                RngHandle rng(seed);
                for (int64_t t = 0; t < trials; ++t) {
                    int64_t na = 0, nb = 0;
                    check(udyn_step(n, a, b, rng.rng, &na, &nb));
                    ma += static_cast<double>(na);
                    mb += static_cast<double>(nb);
                }
                ma /= static_cast<double>(trials);
                mb /= static_cast<double>(trials);
            }
            const double mq = trials > 0 ? static_cast<double>(n) - ma - mb : 0.0;
            out.add_row({{"quantity", "E[A]"}, {"closed_form", e[0]}, {"sample_mean", ma}, {"trials", trials}});
            out.add_row({{"quantity", "E[B]"}, {"closed_form", e[1]}, {"sample_mean", mb}, {"trials", trials}});
            out.add_row({{"quantity", "E[Q]"}, {"closed_form", e[2]}, {"sample_mean", mq}, {"trials", trials}});
            out.add_row({{"quantity", "E[S]"}, {"closed_form", e[3]}, {"sample_mean", ma - mb}, {"trials", trials}});
        } else if (pha->parsed()) {
            if (a < 0) a = n / 4;
            if (b < 0) b = n / 4;
            out.columns = {"trial", "rounds", "outcome", "violations"};
            int64_t total_violations = 0;
            RngHandle base(seed);
            for (int64_t t = 0; t < trials; ++t) {
                RngHandle rng(seed, static_cast<uint64_t>(t) + 1);
                udyn_trajectory* traj = nullptr;
                check(udyn_run(n, a, b, rng.rng, max_rounds, &traj));
                int64_t violations = 0;
                check(udyn_audit_trajectory(traj, gamma, &violations));
                total_violations += violations;
                out.add_row({{"trial", t},
                             {"rounds", udyn_trajectory_length(traj) - 1},
                             {"outcome", udyn_outcome_name(udyn_trajectory_outcome(traj))},
                             {"violations", violations}});
                udyn_trajectory_destroy(traj);
            }
            out.meta["n"] = n;
            out.meta["gamma"] = gamma;
            out.meta["total_violations"] = total_violations;
            assertions_ok = total_violations == 0;
        } else if (sca->parsed()) {
            std::vector<udyn_scaling_row> rows(ns.size());
            double fit[3] = {0, 0, 0};
            const int sk = start_kind == "biased" ? UDYN_START_BIASED : UDYN_START_BALANCED;
            check(udyn_convergence_scaling(ns.data(), static_cast<int64_t>(ns.size()), sk,
                                           gamma, trials, seed, workers, rows.data(), fit));
            out.columns = {"n", "trials", "median_rounds", "q90_rounds",
                           "monochromatic", "alpha_wins", "timeouts"};
            for (const auto& r : rows) {
                out.add_row({{"n", r.n},
                             {"trials", r.trials},
                             {"median_rounds", r.median_rounds},
                             {"q90_rounds", r.q90_rounds},
                             {"monochromatic", r.monochromatic},
                             {"alpha_wins", r.alpha_wins},
                             {"timeouts", r.timeouts}});
            }
            out.meta["start"] = start_kind;
            out.meta["fit_slope"] = fit[0];
            out.meta["fit_intercept"] = fit[1];
            out.meta["fit_r_squared"] = fit[2];
        } else if (clm->parsed()) {
            out.columns = {"claim", "n", "trials", "pass_count", "pass_rate",
                           "ci99_lo", "ci99_hi", "wall_ms"};
            std::vector<std::string> names;
            if (claim_name == "all") {
                for (int i = 0; i < udyn_claim_count(); ++i) names.push_back(udyn_claim_name(i));
            } else {
                names.push_back(claim_name);
            }
            for (const std::string& name : names) {
                int64_t ca = a, cb = b;
                if (ca < 0 || cb < 0) {
                    check(udyn_default_claim_config(name.c_str(), n, gamma, epsilon, &ca, &cb));
                }
                udyn_claim_report rep;
                check(udyn_validate_claim(name.c_str(), n, ca, cb, gamma, epsilon, trials,
                                          seed, workers, &rep));
                out.add_row(claim_row(rep));
                if (rep.exp_small) {
                    if (rep.pass_count != rep.trials) assertions_ok = false;
                } else if (rep.whp) {
                    if (rep.pass_rate < 0.99) assertions_ok = false;
                }
            }
            out.meta["n"] = n;
            out.meta["gamma"] = gamma;
            out.meta["epsilon"] = epsilon;
        } else if (mino->parsed()) {
            out.columns = {"claim", "n", "trials", "pass_count", "pass_rate",
                           "ci99_lo", "ci99_hi", "wall_ms"};
            udyn_claim_report rep;
            int64_t maj = 0, und = 0;
            check(udyn_minority_win(n, trials, seed, 0, workers, &rep, &maj, &und));
            out.add_row(claim_row(rep));
            out.meta["majority_wins"] = maj;
            out.meta["undecided"] = und;
            if (mirror) {
                udyn_claim_report rep2;
                int64_t maj2 = 0, und2 = 0;
                check(udyn_minority_win(n, trials, seed + 1, 1, workers, &rep2, &maj2, &und2));
                out.add_row(claim_row(rep2));
                out.meta["mirror_majority_wins"] = maj2;
                out.meta["mirror_undecided"] = und2;
            }
            out.meta["n"] = n;
        } else if (low->parsed()) {
            std::vector<int64_t> rounds(static_cast<std::size_t>(trials));
            check(udyn_lower_bound(n, trials, seed, gamma, workers, rounds.data()));
            out.columns = {"trial", "slow_rounds"};
            double sum = 0;
            int64_t min_r = rounds.empty() ? 0 : rounds[0];
            for (int64_t t = 0; t < trials; ++t) {
                out.add_row({{"trial", t}, {"slow_rounds", rounds[static_cast<std::size_t>(t)]}});
                sum += static_cast<double>(rounds[static_cast<std::size_t>(t)]);
                min_r = std::min(min_r, rounds[static_cast<std::size_t>(t)]);
            }
            out.meta["n"] = n;
            out.meta["gamma"] = gamma;
            out.meta["mean_slow_rounds"] = trials > 0 ? sum / static_cast<double>(trials) : 0.0;
            out.meta["min_slow_rounds"] = min_r;
        } else if (sym->parsed()) {
            if (a < 0) a = n / 2;
            if (b < 0) b = n - a;
            std::vector<int64_t> rounds(static_cast<std::size_t>(trials));
            int64_t timeouts = 0;
            double median = 0, q90 = 0;
            check(udyn_symmetry_breaking(n, a, b, trials, seed, workers, rounds.data(),
                                         &timeouts, &median, &q90));
            out.columns = {"trial", "rounds"};
            for (int64_t t = 0; t < trials; ++t) {
                out.add_row({{"trial", t}, {"rounds", rounds[static_cast<std::size_t>(t)]}});
            }
            out.meta["n"] = n;
            out.meta["timeouts"] = timeouts;
            out.meta["median"] = median;
            out.meta["q90"] = q90;
        } else if (exa->parsed()) {
            udyn_kernel* kernel = nullptr;
            check(udyn_kernel_build(n, kind == "pruned" ? UDYN_KERNEL_PRUNED : UDYN_KERNEL_PLAIN,
                                    gamma, &kernel));
            if (!export_path.empty()) check(udyn_kernel_export_csv(kernel, export_path.c_str()));
            if (a < 0) a = n / 4;
            if (b < 0) b = n / 4;
            double abs_out[4];
            check(udyn_kernel_absorption(kernel, a, b, abs_out));
            out.columns = {"quantity", "value"};
            out.add_row({{"quantity", "p_alpha"}, {"value", abs_out[0]}});
            out.add_row({{"quantity", "p_beta"}, {"value", abs_out[1]}});
            out.add_row({{"quantity", "p_undecided"}, {"value", abs_out[2]}});
            out.add_row({{"quantity", "expected_rounds"}, {"value", abs_out[3]}});
            out.meta["n"] = n;
            out.meta["kind"] = kind;
            out.meta["states"] = udyn_kernel_states(kernel);
            out.meta["start_a"] = a;
            out.meta["start_b"] = b;
            udyn_kernel_destroy(kernel);
        } else if (gra->parsed()) {
            if (!load_path.empty()) {
                udyn_graph* g = nullptr;
                check(udyn_graph_read(load_path.c_str(), &g));
                int64_t gn = 0, gd = 0;
                check(udyn_graph_size(g, &gn, &gd));
                double lambda = 0;
                check(udyn_graph_lambda(g, &lambda));
                out.columns = {"trial", "rounds", "outcome"};
                int64_t timeouts = 0;
                for (int64_t t = 0; t < trials; ++t) {
                    RngHandle rng(seed, static_cast<uint64_t>(t) + 1);
                    int64_t fa = 0, fb = 0, rounds = 0;
                    int outcome = UDYN_OUTCOME_TIMEOUT;
                    const int64_t q0 = gn / 4;
                    const int64_t a0 = (gn - q0) / 2 + gn / 8;
                    check(udyn_graph_run(g, a0, gn - q0 - a0, rng.rng, max_rounds, &fa, &fb,
                                         &rounds, &outcome));
                    if (outcome == UDYN_OUTCOME_TIMEOUT) ++timeouts;
                    out.add_row({{"trial", t},
                                 {"rounds", rounds},
                                 {"outcome", udyn_outcome_name(outcome)}});
                }
                out.meta["n"] = gn;
                out.meta["d"] = gd;
                out.meta["lambda"] = lambda;
                out.meta["timeouts"] = timeouts;
                udyn_graph_destroy(g);
            } else {
                udyn_expander_report rep;
                check(udyn_expander_experiment(n, degree, pairs, trials, seed, &rep));
                if (!save_path.empty()) {
                    RngHandle rng(seed);
                    udyn_graph* g = nullptr;
                    check(udyn_graph_random_regular(n, degree, rng.rng, &g));
                    check(udyn_graph_write(g, save_path.c_str()));
                    udyn_graph_destroy(g);
                }
                out.columns = {"quantity", "value"};
                out.add_row({{"quantity", "lambda"}, {"value", rep.lambda}});
                out.add_row({{"quantity", "pairs_checked"}, {"value", rep.pairs_checked}});
                out.add_row({{"quantity", "mixing_violations"}, {"value", rep.mixing_violations}});
                out.add_row({{"quantity", "max_discrepancy_ratio"}, {"value", rep.max_ratio}});
                out.add_row({{"quantity", "consensus_trials"}, {"value", rep.trials}});
                out.add_row({{"quantity", "majority_wins"}, {"value", rep.majority_wins}});
                out.add_row({{"quantity", "timeouts"}, {"value", rep.timeouts}});
                out.meta["n"] = rep.n;
                out.meta["d"] = rep.d;
                assertions_ok = rep.mixing_violations == 0;
            }
        } else if (bnd->parsed()) {
            double bound = 0, log_bound = 0;
            const int dir = direction == "lower" ? UDYN_TAIL_LOWER : UDYN_TAIL_UPPER;
            if (form == "mult") {
                check(udyn_chernoff_mult(mu, delta, dir, &bound, &log_bound));
            } else if (form == "add") {
                check(udyn_chernoff_add(n, lam, &bound, &log_bound));
            } else {
                check(udyn_reverse_chernoff(mu, delta, n, &bound, &log_bound));
            }
            out.columns = {"quantity", "value"};
            out.add_row({{"quantity", "bound"}, {"value", bound}});
            out.add_row({{"quantity", "log_bound"}, {"value", log_bound}});
            out.meta["form"] = form;
            out.meta["direction"] = direction;
            if (p >= 0.0) {
                RngHandle rng(seed);
                udyn_tail_check tc;
                check(udyn_tail_check_run(n, p, dir, threshold, bound, form == "reverse",
                                          trials, rng.rng, &tc));
                out.add_row({{"quantity", "empirical"}, {"value", tc.empirical}});
                out.add_row({{"quantity", "std_error"}, {"value", tc.std_error}});
                out.meta["consistent"] = tc.consistent != 0;
                assertions_ok = tc.consistent != 0;
            }
        } else if (hyp->parsed()) {
            double vals[3];
            check(udyn_h2_hypotheses(n, h, epsilon, configs, trials, seed, gamma, workers, vals));
            out.columns = {"quantity", "value"};
            out.add_row({{"quantity", "c1_hat"}, {"value", vals[0]}});
            out.add_row({{"quantity", "prop2_fail_rate"}, {"value", vals[1]}});
            out.add_row({{"quantity", "target_bias"}, {"value", vals[2]}});
            out.meta["n"] = n;
            out.meta["h"] = h;
            out.meta["epsilon"] = epsilon;
        }

        emit(out, out_path, format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return assertions_ok ? 0 : 1;
}
