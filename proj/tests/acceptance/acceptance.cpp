// One PASS/FAIL line per acceptance criterion. Pass criterion numbers as arguments to run a subset.

#include "oracles.hpp"
#include "sinrldp/detection.hpp"
#include "sinrldp/harness.hpp"
#include "sinrldp/information.hpp"
#include "sinrldp/io.hpp"
#include "sinrldp/random.hpp"
#include "sinrldp_cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace sinrldp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<Outcome()> check;
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string join(const std::vector<double>& xs) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        s += (i ? ", " : "") + fmt(xs[i]);
    }
    return s + "]";
}

std::size_t worker_count() {
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

std::vector<double> random_measure(std::mt19937_64& rng, std::size_t n, double zero_probability) {
    std::exponential_distribution<double> e(1.0);
    std::bernoulli_distribution zero(zero_probability);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = zero(rng) ? 0.0 : e(rng);
    }
    return v;
}

Outcome entropy_properties() {
    constexpr double tol = 1e-12;
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<std::size_t> size(2, 16);
    std::size_t rel_bad = 0, tilted_bad = 0, equality_bad = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = size(rng);
        auto phi = random_measure(rng, n, 0.2);
        auto nu = random_measure(rng, n, 0.0);
        phi[0] += 0.05;
        for (auto& x : nu) {
            x += 1e-3;
        }
        const double target = std::exponential_distribution<double>(1.0)(rng) + 0.1;
        const double sp = std::accumulate(phi.begin(), phi.end(), 0.0);
        const double sn = std::accumulate(nu.begin(), nu.end(), 0.0);
        std::vector<double> p(n), q(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = phi[i] * target / sp;
            q[i] = nu[i] * target / sn;
        }
        const double rel = rel_entropy(p, q);
        const double tilted = tilted_entropy(phi, nu);
        worst = std::min({worst, rel, tilted});
        rel_bad += rel < -tol;
        tilted_bad += tilted < -tol;
        // Equal inputs give 0; these random pairs differ, so both must be strictly positive.
        equality_bad += std::fabs(rel_entropy(q, q)) > tol || std::fabs(tilted_entropy(nu, nu)) > tol;
        equality_bad += !(rel > tol) || !(tilted > tol);
    }
    return {rel_bad == 0 && tilted_bad == 0 && equality_bad == 0,
            "10000 pairs; negative rel=" + std::to_string(rel_bad) + " tilted=" + std::to_string(tilted_bad) +
                " equality violations=" + std::to_string(equality_bad) + " min value=" + fmt(worst)};
}

Outcome legendre_duality() {
    std::mt19937_64 rng(202);
    std::uniform_int_distribution<std::size_t> size(4, 16);
    double worst = 0.0;
    std::size_t bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = size(rng);
        auto nu = random_measure(rng, n, 0.0);
        for (auto& x : nu) {
            x += 1e-3;
        }
        auto phi = random_measure(rng, n, 0.15);
        phi[n / 2] += 0.01;
        const double closed = kullback_action_closed(phi, nu);
        const auto dual = kullback_action_dual(phi, nu);
        const double gap = std::fabs(dual.value - closed) / (1.0 + closed);
        worst = std::max(worst, gap);
        bad += !(gap < 1e-6);
    }
    return {bad == 0, "1000 instances; max gap/(1+value)=" + fmt(worst) + " failures=" + std::to_string(bad)};
}

Outcome gradient_check() {
    std::mt19937_64 rng(303);
    std::uniform_int_distribution<std::size_t> size(4, 16);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = size(rng);
        auto nu = random_measure(rng, n, 0.0);
        std::vector<double> q(n);
        for (auto& x : q) {
            x = g(rng);
        }
        const auto grad = spectral_potential_gradient(q, nu);
        for (std::size_t i = 0; i < n; ++i) {
            const double h = 1e-5 * std::max(1.0, std::fabs(q[i]));
            auto up = q;
            auto down = q;
            up[i] += h;
            down[i] -= h;
            const double fd = (spectral_potential(up, nu) - spectral_potential(down, nu)) / (2.0 * h);
            const double rel = std::fabs(fd - grad[i]) / std::max(std::fabs(grad[i]), 1e-12);
            worst = std::max(worst, rel);
        }
    }
    return {worst < 1e-5, "100 instances; max relative error=" + fmt(worst)};
}

ExperimentPlan ladder_plan() {
    ExperimentPlan p;
    p.model.mode = GraphMode::annealed;
    p.model.limit = LimitKernel::constant(0.7);
    p.ladder = {100.0, 400.0, 1600.0};
    p.replicates = 50;
    p.seed = 20240601;
    p.spatial_bins = 8;
    p.mark_bins = 8;
    p.threads = worker_count();
    return p;
}

Outcome wlln_trend() {
    const auto r = run_wlln(ladder_plan());
    const auto m1 = r.medians("m1_sup");
    const auto m2 = r.medians("m2_sup");
    const bool pass = r.verdict("m1_sup_median_strictly_decreasing") && m1.back() < 0.05 &&
                      r.verdict("m2_sup_median_strictly_decreasing");
    return {pass, "median M1 sup " + join(m1) + " (bound 0.05 at 1600); median M2 sup " + join(m2)};
}

Outcome aep_trend() {
    const auto r = run_aep(ladder_plan());
    std::vector<double> iqr;
    std::vector<double> node, edge, nonedge;
    for (const auto& rung : r.rungs) {
        iqr.push_back(rung.extras.at("deviation_iqr"));
        node.push_back(rung.stats.at("node_term").median);
        edge.push_back(rung.stats.at("edge_term").median);
        nonedge.push_back(rung.stats.at("nonedge_term").median);
    }
    const bool pass = r.verdict("deviation_median_nonincreasing") && r.verdict("deviation_iqr_nonincreasing");
    return {pass, "H(f)=" + fmt(r.rungs.front().extras.at("model_entropy")) + "; median deviation " +
                      join(r.medians("deviation")) + "; IQR " + join(iqr) + "; median node/edge/non-edge terms " +
                      join(node) + " / " + join(edge) + " / " + join(nonedge)};
}

Outcome small_instance_oracles() {
    std::mt19937_64 rng(606);
    std::uniform_int_distribution<std::size_t> count(0, 8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> mark(1.0);
    std::size_t graph_bad = 0, m1_bad = 0, m2_bad = 0, ll_bad = 0;
    std::size_t quenched_total = 0, annealed_total = 0;
    double ll_worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        NetworkModel model;
        model.params.lambda = 4.0 + 20.0 * unit(rng);
        model.params.alpha = 2.0 + 2.0 * unit(rng);
        model.params.n0 = unit(rng) < 0.3 ? 0.0 : 0.05 * unit(rng);
        model.params.iota = ThresholdFunction::constant(0.02 + 0.5 * unit(rng));
        model.params.zeta = ThresholdFunction::constant(0.5 + unit(rng));
        model.params.include_transmitter_in_interference = unit(rng) < 0.2;
        model.limit = unit(rng) < 0.5 ? LimitKernel::constant(0.3 + unit(rng))
                                      : LimitKernel::exp_distance(0.5 + 3.0 * unit(rng));
        SinrRealization y;
        y.model = model;
        const std::size_t n = count(rng);
        for (std::size_t i = 0; i < n; ++i) {
            y.sample.points.push_back(MarkedPoint{{unit(rng), unit(rng)}, mark(rng)});
        }

        const auto quenched = build_quenched_graph(y.sample, model.params);
        const auto truth = oracle::quenched_edges(y.sample.points, model.params);
        graph_bad += !std::equal(quenched.begin(), quenched.end(), truth.begin(), truth.end());
        quenched_total += truth.size();

        y.edges = build_annealed_graph(y.sample, model.kernel(), model.sched, trial);
        annealed_total += y.edges.size();
        const BinGrid grid(model.domain, model.params.c, 3, 2);
        const std::vector<EdgeSet::Edge> e(y.edges.begin(), y.edges.end());
        m1_bad += m1(y.sample, grid, model.params.lambda).weights !=
                  oracle::m1(y.sample.points, model.domain, model.params.c, 3, 2, model.params.lambda);
        m2_bad += m2(y.sample, y.edges, grid, model.params.lambda, model.a_lambda()).weights !=
                  oracle::m2(y.sample.points, e, model.domain, model.params.c, 3, 2, model.params.lambda,
                             model.a_lambda());

        const double got = log_likelihood(y).total;
        const double want = oracle::log_likelihood(y, model.limit, model.a_lambda());
        const double err = std::fabs(got - want) / std::max(1.0, std::fabs(want));
        ll_worst = std::max(ll_worst, err);
        ll_bad += !(err <= 1e-12);
    }
    return {graph_bad + m1_bad + m2_bad + ll_bad == 0,
            "500 configurations; mismatches graph=" + std::to_string(graph_bad) + " M1=" + std::to_string(m1_bad) +
                " M2=" + std::to_string(m2_bad) + " likelihood=" + std::to_string(ll_bad) +
                " (max scaled likelihood error " + fmt(ll_worst) + "; " + std::to_string(quenched_total) +
                " quenched and " + std::to_string(annealed_total) + " annealed edges)"};
}

ModelParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ModelParams p;
    p.alpha = 2.0 + 2.0 * unit(rng);
    p.n0 = unit(rng) < 0.3 ? 0.0 : 0.05 * unit(rng);
    p.iota = ThresholdFunction::constant(0.01 + 0.3 * unit(rng));
    p.zeta = ThresholdFunction::constant(0.5 + unit(rng));
    return p;
}

PointSample random_sample(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> mark(1.0);
    PointSample s;
    for (std::size_t i = 0; i < n; ++i) {
        s.points.push_back(MarkedPoint{{unit(rng), unit(rng)}, mark(rng)});
    }
    return s;
}

Outcome structural_properties() {
    std::mt19937_64 rng(707);
    std::uniform_int_distribution<std::size_t> count(2, 14);
    std::size_t sym_bad = 0, thr_bad = 0, intf_bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        // Symmetry: an edge needs both directions, so relabeling nodes maps the edge set onto itself.
        const auto params = random_params(rng);
        auto s = random_sample(rng, count(rng));
        const auto edges = build_quenched_graph(s, params);
        std::vector<std::uint32_t> perm(s.size());
        std::iota(perm.begin(), perm.end(), 0u);
        std::shuffle(perm.begin(), perm.end(), rng);
        PointSample shuffled;
        for (std::size_t i = 0; i < s.size(); ++i) {
            shuffled.points.push_back(s.points[perm[i]]);
        }
        std::set<EdgeSet::Edge> mapped;
        for (const auto& [u, v] : build_quenched_graph(shuffled, params)) {
            mapped.insert({std::min(perm[u], perm[v]), std::max(perm[u], perm[v])});
        }
        bool ok = std::equal(edges.begin(), edges.end(), mapped.begin(), mapped.end());
        for (const auto& [u, v] : edges) {
            ok = ok && sinr(s, u, v, params) >= params.iota(s.points[v].mark) &&
                 sinr(s, v, u, params) >= params.iota(s.points[u].mark);
        }
        sym_bad += !ok;
    }
    for (int trial = 0; trial < 1000; ++trial) {
        // A larger threshold can only remove edges.
        auto params = random_params(rng);
        const auto s = random_sample(rng, count(rng));
        const auto base = build_quenched_graph(s, params);
        params.iota = ThresholdFunction::constant(params.iota(1.0) * (1.0 + std::uniform_real_distribution<>(0, 2)(rng)));
        thr_bad += !build_quenched_graph(s, params).subset_of(base);
    }
    for (int trial = 0; trial < 1000; ++trial) {
        // Extra transmitters only add interference, so edges among the original nodes can only disappear.
        const auto params = random_params(rng);
        const auto s = random_sample(rng, count(rng));
        const auto base = build_quenched_graph(s, params);
        auto bigger = s;
        const auto extra = random_sample(rng, 1 + trial % 3);
        bigger.points.insert(bigger.points.end(), extra.points.begin(), extra.points.end());
        std::vector<EdgeSet::Edge> restricted;
        for (const auto& [u, v] : build_quenched_graph(bigger, params)) {
            if (u < s.size() && v < s.size()) {
                restricted.push_back({u, v});
            }
        }
        intf_bad += !EdgeSet::from_pairs(restricted).subset_of(base);
    }
    return {sym_bad + thr_bad + intf_bad == 0, "1000 configurations each; violations symmetry=" +
                                                   std::to_string(sym_bad) + " threshold=" + std::to_string(thr_bad) +
                                                   " interference=" + std::to_string(intf_bad)};
}

Outcome detection_size() {
    NetworkModel model;
    model.params.lambda = 800.0;
    model.mode = GraphMode::annealed;
    model.limit = LimitKernel::constant(0.7);
    const BinGrid grid(model.domain, model.params.c, 2, 2);
    std::vector<SinrRealization> reps;
    for (std::size_t i = 0; i < 200; ++i) {
        reps.push_back(generate_realization(model, derive_seed(8080, "estimate", i)));
    }
    const auto est = estimate(reps, grid);
    const auto cal = calibrate_threshold(est, 0.95, 1000, 8181, worker_count());
    const auto power = rejection_rate(model, est, cal.threshold, 1000, 8282, worker_count());
    const double rate = power.rate();
    return {rate >= 0.02 && rate <= 0.09,
            "threshold=" + fmt(cal.threshold) + " (infinite null draws " + std::to_string(cal.infinite_count) +
                "); rejection rate " + fmt(rate) + " over " + std::to_string(power.trials) +
                " fresh draws, band [0.02, 0.09]"};
}

Outcome decay_trend() {
    auto plan = ladder_plan();
    plan.replicates = 200;
    plan.spatial_bins = 2;
    plan.mark_bins = 2;
    const double delta = 0.2 * reference_pair_mass(plan);
    const auto r = run_decay(plan, delta);
    std::vector<double> freq, emp, proj;
    for (const auto& rung : r.rungs) {
        freq.push_back(rung.extras.at("frequency"));
        emp.push_back(rung.extras.at("log_frequency_rate"));
        proj.push_back(rung.extras.at("projected_rate"));
    }
    return {r.verdict("frequency_nonincreasing"), "delta=" + fmt(delta) + "; frequencies " + join(freq) +
                                                      "; log(freq)/(lambda^2 a) " + join(emp) + "; projected " +
                                                      join(proj)};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) {
            std::ifstream in(e.path(), std::ios::binary);
            files[fs::relative(e.path(), dir).string()] =
                std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
        }
    }
    return files;
}

Outcome reproducibility() {
    const auto root = fs::temp_directory_path() / "sinrldp_acceptance_repro";
    fs::remove_all(root);
    std::vector<std::pair<std::string, std::vector<std::string>>> commands = {
        {"generate", {"generate", "--lambda", "300", "--replicates", "4", "--seed", "5"}},
        {"measure", {"measure", "@generate/realization_000.bin"}},
        {"rate", {"rate", "@generate/realization_000.bin", "@generate/realization_001.bin"}},
        {"estimate",
         {"estimate", "@generate/realization_000.bin", "@generate/realization_001.bin", "@generate/realization_002.bin",
          "--spatial-bins", "2", "--mark-bins", "2", "--lambda", "300"}},
        {"detect",
         {"detect", "@generate/realization_003.bin", "--model", "@estimate/estimate.bin", "--null-draws", "100",
          "--spatial-bins", "2", "--mark-bins", "2", "--lambda", "300"}},
        {"experiment",
         {"experiment", "--kind", "decay", "--ladder", "40,80", "--replicates", "5", "--spatial-bins", "2",
          "--mark-bins", "2"}},
    };
    std::size_t failures = 0;
    std::size_t files = 0;
    std::string broken;
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& [name, args] : commands) {
            const auto base = root / ("run" + std::to_string(pass));
            std::vector<std::string> argv;
            for (auto a : args) {
                if (a.rfind("@", 0) == 0) {
                    a = (base / a.substr(1)).string();
                }
                argv.push_back(a);
            }
            argv.push_back("--out");
            argv.push_back((base / name).string());
            std::ostringstream out, err;
            const int code = cli::run(argv, out, err);
            if (code >= 2) {
                ++failures;
                auto msg = err.str();
                msg.erase(msg.find_last_not_of('\n') + 1);
                broken += " " + name + "(exit " + std::to_string(code) + ": " + msg + ")";
            }
        }
    }
    std::size_t differing = 0;
    for (const auto& [name, args] : commands) {
        if (!fs::exists(root / "run0" / name) || !fs::exists(root / "run1" / name)) {
            ++differing;
            broken += " " + name + "(no output)";
            continue;
        }
        const auto a = snapshot(root / "run0" / name);
        const auto b = snapshot(root / "run1" / name);
        files += a.size();
        if (a != b || a.empty()) {
            ++differing;
            broken += " " + name + "(differs)";
        }
    }
    const auto first = root / "run0" / "generate" / "realization_000.bin";
    const auto y = fs::exists(first) ? load_realization(first) : SinrRealization{};
    const bool round_trip = decode_realization(encode_realization(y)) == y &&
                            encode_realization(decode_realization(encode_realization(y))) == encode_realization(y);
    return {failures == 0 && differing == 0 && round_trip,
            std::to_string(commands.size()) + " commands run twice, " + std::to_string(files) +
                " artifacts compared; differing=" + std::to_string(differing) +
                " round trip exact=" + (round_trip ? "yes" : "no") + broken};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        only.insert(std::atoi(argv[i]));
    }
    const std::vector<Criterion> criteria = {
        {1, "entropy properties", 10, entropy_properties},
        {2, "legendre duality", 30, legendre_duality},
        {3, "spectral potential gradient", 0, gradient_check},
        {4, "wlln trend", 600, wlln_trend},
        {5, "aep trend", 900, aep_trend},
        {6, "small-instance oracles", 0, small_instance_oracles},
        {7, "structural properties", 0, structural_properties},
        {8, "detection size control", 1200, detection_size},
        {9, "rare-event decay", 0, decay_trend},
        {10, "reproducibility", 0, reproducibility},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0 && secs > c.budget_seconds) {
            o.pass = false;
            o.detail += "; over the " + fmt(c.budget_seconds) + " s budget";
        }
        failed += !o.pass;
        std::printf("%s [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    std::printf("%d failed\n", failed);
    return failed == 0 ? 0 : 1;
}
