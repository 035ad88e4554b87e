#include "sinrldp_cli/cli.hpp"

#include "sinrldp/detection.hpp"
#include "sinrldp/errors.hpp"
#include "sinrldp/harness.hpp"
#include "sinrldp/information.hpp"
#include "sinrldp/io.hpp"
#include "sinrldp/measures.hpp"
#include "sinrldp/random.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace sinrldp::cli {

namespace fs = std::filesystem;

namespace {

struct KeyInfo {
    const char* key;
    const char* type;
    const char* help;
};

const std::vector<KeyInfo>& key_table() {
    static const std::vector<KeyInfo> table = {
        {"lambda", "NUMBER", "PPP intensity multiplier (> 0)"},
        {"gamma", "NUMBER", "schedule exponent: a(lambda) = lambda^-gamma, 1 < gamma < 2"},
        {"c", "NUMBER", "exponential mark rate (> 0)"},
        {"alpha", "NUMBER", "path-loss exponent (> 0)"},
        {"n0", "NUMBER", "noise power (>= 0)"},
        {"iota", "THRESHOLD", "SINR threshold: a number or table:EDGES;VALUES"},
        {"zeta", "THRESHOLD", "interference scaling: a number or table:EDGES;VALUES"},
        {"mode", "MODE", "graph mode: quenched or annealed"},
        {"limit", "KERNEL", "limit kernel t: NUMBER, constant:V, exp:RATE, calibrated:D0,KAPPA or none"},
        {"dimension", "INT", "dimension of the unit box domain"},
        {"mark_cap", "NUMBER", "mark truncation used for binning (default: 1e-3 upper quantile)"},
        {"bounded_at_zero", "BOOL", "path loss min(1, r^-alpha) instead of r^-alpha (true/false)"},
        {"include_transmitter", "BOOL", "count the transmitter in the interference sum (true/false)"},
        {"quadrature", "INT", "midpoint nodes per axis for t_D"},
        {"spatial_bins", "INT", "spatial bins S per axis"},
        {"mark_bins", "INT", "mark bins M"},
        {"seed", "UINT", "master seed (fallback: SINRLDP_SEED, then 1)"},
        {"replicates", "INT", "number of replicates"},
        {"out", "DIR", "output directory"},
        {"threads", "INT", "worker cap (0 = hardware concurrency)"},
        {"verbosity", "INT", "0 quiet, 1 progress on stderr"},
    };
    return table;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ValidationError(key + ": expected a number, got '" + text + "'");
    }
    return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
    std::uint64_t v = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ValidationError(key + ": expected a non-negative integer, got '" + text + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no" || text == "off") {
        return false;
    }
    throw ValidationError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_double(key, trim(item)));
    }
    if (out.empty()) {
        throw ValidationError(key + ": expected a comma-separated list");
    }
    return out;
}

ThresholdFunction parse_threshold(const std::string& key, const std::string& text) {
    if (text.rfind("table:", 0) == 0) {
        const std::string body = text.substr(6);
        const auto semi = body.find(';');
        if (semi == std::string::npos) {
            throw ValidationError(key + ": table needs EDGES;VALUES");
        }
        return ThresholdFunction::tabulated(parse_list(key, body.substr(0, semi)),
                                            parse_list(key, body.substr(semi + 1)));
    }
    return ThresholdFunction::constant(parse_double(key, text));
}

LimitKernel parse_limit(const std::string& text) {
    if (text == "none") {
        return {};
    }
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        return LimitKernel::constant(parse_double("limit", text));
    }
    const std::string kind = text.substr(0, colon);
    const auto args = parse_list("limit", text.substr(colon + 1));
    if (kind == "constant" && args.size() == 1) {
        return LimitKernel::constant(args[0]);
    }
    if (kind == "exp" && args.size() == 1) {
        return LimitKernel::exp_distance(args[0]);
    }
    if (kind == "calibrated" && args.size() == 2) {
        return LimitKernel::calibrated(args[0], args[1]);
    }
    throw ValidationError("limit: unrecognized kernel '" + text + "'");
}

std::string fmt(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string render_list(std::span<const double> xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out += (i ? "," : "") + fmt(xs[i]);
    }
    return out;
}

std::string render_threshold(const ThresholdFunction& f) {
    if (f.is_constant()) {
        return fmt(f.values()[0]);
    }
    return "table:" + render_list(f.edges()) + ";" + render_list(f.values());
}

std::string render_limit(const LimitKernel& t) {
    switch (t.kind()) {
    case LimitKind::none:
        return "none";
    case LimitKind::constant:
        return "constant:" + fmt(t.parameter(0));
    case LimitKind::exp_distance:
        return "exp:" + fmt(t.parameter(0));
    case LimitKind::calibrated:
        return "calibrated:" + fmt(t.parameter(0)) + "," + fmt(t.parameter(1));
    default:
        return "custom";
    }
}

}  // namespace

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& info : key_table()) {
            k.emplace_back(info.key);
        }
        return k;
    }();
    return keys;
}

KeyValues parse_config_text(std::string_view text) {
    KeyValues kv;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    const auto& keys = known_keys();
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        const std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ValidationError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        kv[key] = value;
    }
    return kv;
}

KeyValues load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

Settings resolve_settings(const KeyValues& kv, const char* env_seed) {
    Settings s;
    auto get = [&](const char* key) -> const std::string* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    auto& p = s.model.params;
    if (auto v = get("lambda")) p.lambda = parse_double("lambda", *v);
    if (auto v = get("gamma")) s.model.sched.gamma_a = parse_double("gamma", *v);
    if (auto v = get("c")) p.c = parse_double("c", *v);
    if (auto v = get("alpha")) p.alpha = parse_double("alpha", *v);
    if (auto v = get("n0")) p.n0 = parse_double("n0", *v);
    if (auto v = get("iota")) p.iota = parse_threshold("iota", *v);
    if (auto v = get("zeta")) p.zeta = parse_threshold("zeta", *v);
    if (auto v = get("mode")) {
        if (*v == "quenched") {
            s.model.mode = GraphMode::quenched;
        } else if (*v == "annealed") {
            s.model.mode = GraphMode::annealed;
        } else {
            throw ValidationError("mode: expected quenched or annealed, got '" + *v + "'");
        }
    }
    if (auto v = get("limit")) s.model.limit = parse_limit(*v);
    std::size_t dim = 2;
    if (auto v = get("dimension")) dim = parse_uint("dimension", *v);
    if (dim < 1 || dim > 3) {
        throw ValidationError("dimension: expected 1, 2 or 3");
    }
    s.model.domain = Domain::unit_box(dim, p.c > 0.0 ? p.c : 1.0);
    if (auto v = get("mark_cap")) s.model.domain.mark_cap = parse_double("mark_cap", *v);
    if (auto v = get("bounded_at_zero")) p.bounded_at_zero = parse_bool("bounded_at_zero", *v);
    if (auto v = get("include_transmitter")) {
        p.include_transmitter_in_interference = parse_bool("include_transmitter", *v);
    }
    if (auto v = get("quadrature")) s.model.quadrature_resolution = parse_uint("quadrature", *v);
    if (auto v = get("spatial_bins")) s.spatial_bins = parse_uint("spatial_bins", *v);
    if (auto v = get("mark_bins")) s.mark_bins = parse_uint("mark_bins", *v);
    if (auto v = get("seed")) {
        s.seed = parse_uint("seed", *v);
    } else if (env_seed != nullptr && *env_seed != '\0') {
        s.seed = parse_uint("SINRLDP_SEED", env_seed);
    }
    if (auto v = get("replicates")) {
        s.replicates = parse_uint("replicates", *v);
        if (*s.replicates < 1) {
            throw ValidationError("replicates >= 1");
        }
    }
    if (auto v = get("out")) s.out = *v;
    if (auto v = get("threads")) s.threads = parse_uint("threads", *v);
    if (auto v = get("verbosity")) s.verbosity = static_cast<int>(parse_uint("verbosity", *v));
    if (s.spatial_bins < 1 || s.mark_bins < 1) {
        throw ValidationError("spatial_bins >= 1 and mark_bins >= 1");
    }
    if (s.model.quadrature_resolution < 1) {
        throw ValidationError("quadrature >= 1");
    }
    const auto check = validate(p, s.model.domain, s.model.sched);
    if (!check.ok()) {
        throw ValidationError("invalid parameters: " + check.describe());
    }
    return s;
}

std::string render_settings(const Settings& s, bool with_output_dir) {
    const auto& p = s.model.params;
    std::ostringstream out;
    out << "lambda = " << fmt(p.lambda) << '\n'
        << "gamma = " << fmt(s.model.sched.gamma_a) << '\n'
        << "c = " << fmt(p.c) << '\n'
        << "alpha = " << fmt(p.alpha) << '\n'
        << "n0 = " << fmt(p.n0) << '\n'
        << "iota = " << render_threshold(p.iota) << '\n'
        << "zeta = " << render_threshold(p.zeta) << '\n'
        << "mode = " << (s.model.mode == GraphMode::quenched ? "quenched" : "annealed") << '\n'
        << "limit = " << render_limit(s.model.limit) << '\n'
        << "dimension = " << s.model.domain.dimension() << '\n'
        << "mark_cap = " << fmt(s.model.domain.mark_cap) << '\n'
        << "bounded_at_zero = " << (p.bounded_at_zero ? "true" : "false") << '\n'
        << "include_transmitter = " << (p.include_transmitter_in_interference ? "true" : "false") << '\n'
        << "quadrature = " << s.model.quadrature_resolution << '\n'
        << "spatial_bins = " << s.spatial_bins << '\n'
        << "mark_bins = " << s.mark_bins << '\n'
        << "seed = " << s.seed << '\n';
    if (s.replicates) {
        out << "replicates = " << *s.replicates << '\n';
    }
    if (with_output_dir) {
        out << "out = " << s.out << '\n';
    }
    out << "threads = " << s.threads << '\n' << "verbosity = " << s.verbosity << '\n';
    return out.str();
}

namespace {

// Flag storage for the shared configuration keys of one subcommand.
struct CommonFlags {
    std::string config;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    CLI::Option* verbose = nullptr;

    void attach(CLI::App* sub) {
        sub->add_option("--config", config, "key=value config file; flags override its entries")->type_name("FILE");
        for (const auto& info : key_table()) {
            std::string flag = std::string("--") + info.key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            options[info.key] = sub->add_option(flag, values[info.key], info.help)->type_name(info.type);
        }
        verbose = sub->add_flag("-v", "progress messages on stderr");
    }

    Settings resolve() const {
        KeyValues kv;
        if (!config.empty()) {
            kv = load_config_file(config);
        }
        for (const auto& [key, opt] : options) {
            if (opt->count() > 0) {
                kv[key] = values.at(key);
            }
        }
        if (verbose->count() > 0) {
            kv["verbosity"] = std::to_string(verbose->count());
        }
        return resolve_settings(kv, std::getenv("SINRLDP_SEED"));
    }
};

BinGrid grid_for(const NetworkModel& model, const Settings& s) {
    return BinGrid(model.domain, model.params.c, s.spatial_bins, s.mark_bins);
}

std::string file_stem(const std::string& path) {
    return fs::path(path).stem().string();
}

std::string numbered(const std::string& prefix, std::size_t i, const std::string& ext) {
    std::ostringstream s;
    s << prefix << '_' << std::setw(3) << std::setfill('0') << i << ext;
    return s.str();
}

void progress(const Settings& s, std::ostream& err, const std::string& msg) {
    if (s.verbosity > 0) {
        err << msg << '\n';
    }
}

int cmd_generate(const Settings& s, std::ostream& out, std::ostream& err) {
    const std::size_t n = s.replicates.value_or(1);
    const fs::path dir(s.out);
    write_file_atomic(dir / "generate.cfg", render_settings(s, false));
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t seed = i == 0 ? s.seed : derive_seed(s.seed, "replicate", i);
        const auto y = generate_realization(s.model, seed, s.threads);
        const std::string name = numbered("realization", i, ".bin");
        save_realization(y, dir / name);
        out << name << " nodes=" << y.sample.size() << " edges=" << y.edges.size() << " seed=" << seed << '\n';
        progress(s, err, "wrote " + (dir / name).string());
    }
    return kExitTypical;
}

int cmd_measure(const Settings& s, const std::vector<std::string>& inputs, bool dense, std::ostream& out) {
    const fs::path dir(s.out);
    for (const auto& path : inputs) {
        const auto y = load_realization(path);
        const auto grid = grid_for(y.model, s);
        const auto my1 = m1(y.sample, grid, y.lambda());
        const auto my2 = m2(y.sample, y.edges, grid, y.lambda(), y.model.a_lambda());
        const std::string stem = file_stem(path);
        save_measure(my1, dir / (stem + "_m1.bin"));
        save_measure(my2, dir / (stem + "_m2.bin"));
        write_file_atomic(dir / (stem + "_m1.csv"), measure_csv(my1));
        write_file_atomic(dir / (stem + "_m2.csv"), measure_csv(my2, dense));
        out << stem << " cells=" << grid.cell_count() << " m1_mass=" << fmt(my1.mass())
            << " m2_mass=" << fmt(my2.mass()) << '\n';
    }
    return kExitTypical;
}

int cmd_rate(const Settings& s, const std::vector<std::string>& inputs, const std::string& m1_path,
             const std::string& m2_path, std::optional<double> tolerance, std::ostream& out) {
    std::string lines;
    if (!m1_path.empty() || !m2_path.empty()) {
        if (m1_path.empty() || m2_path.empty()) {
            throw ValidationError("rate needs both --m1 and --m2");
        }
        const auto beta = load_measure(m1_path);
        const auto phi = load_pair_measure(m2_path);
        if (!(beta.grid == phi.grid)) {
            throw GridMismatchError("--m1 and --m2 are on different grids");
        }
        const auto reference = reference_measure(beta.grid, s.model.params);
        if (!(reference.grid == beta.grid)) {
            throw GridMismatchError("measure grid does not match the configured model");
        }
        RateRecord rec;
        rec.seed = s.seed;
        rec.lambda = s.model.params.lambda;
        rec.report = rate_report(beta, phi, reference, kernel_table(beta.grid, s.model.limit),
                                 tolerance.value_or(kAnalyticConsistencyTolerance));
        lines += to_json_line(rec) + "\n";
    }
    for (const auto& path : inputs) {
        const auto y = load_realization(path);
        const auto grid = grid_for(y.model, s);
        const auto beta = m1(y.sample, grid, y.lambda());
        const auto phi = m2(y.sample, y.edges, grid, y.lambda(), y.model.a_lambda());
        const auto reference = reference_measure(grid, y.model.params);
        RateRecord rec;
        rec.seed = y.seed();
        rec.lambda = y.lambda();
        rec.report = rate_report(beta, phi, reference, kernel_table(grid, y.model.limit),
                                 tolerance.value_or(kInfinity));
        if (y.model.mode == GraphMode::annealed && y.lambda() > 1.0) {
            try {
                rec.aep_statistic = aep_statistic(y);
                rec.has_aep = true;
            } catch (const DegenerateProbabilityError&) {
                rec.has_aep = false;
            }
        }
        lines += to_json_line(rec) + "\n";
    }
    if (lines.empty()) {
        throw ValidationError("rate needs realization inputs or --m1/--m2 measure files");
    }
    write_file_atomic(fs::path(s.out) / "rates.jsonl", lines);
    out << lines;
    return kExitTypical;
}

int cmd_estimate(const Settings& s, const std::vector<std::string>& inputs, std::ostream& out) {
    std::vector<SinrRealization> reps;
    reps.reserve(inputs.size());
    for (const auto& path : inputs) {
        reps.push_back(load_realization(path));
    }
    if (reps.empty()) {
        throw ValidationError("estimate needs at least one realization");
    }
    const auto grid = grid_for(reps.front().model, s);
    const auto est = estimate(reps, grid);
    const fs::path path = fs::path(s.out) / "estimate.bin";
    save_estimate(est, path);
    write_file_atomic(fs::path(s.out) / "estimate_beta.csv", measure_csv(est.beta_hat));
    out << "estimate.bin k=" << est.k_used << " cells=" << grid.cell_count() << " masked=" << est.masked_count()
        << " lambda=" << fmt(est.lambda()) << '\n';
    return kExitTypical;
}

int cmd_detect(const Settings& s, const std::string& model_path, const std::vector<std::string>& inputs,
               double level, std::size_t draws, std::optional<double> threshold, std::ostream& out,
               std::ostream& err) {
    const auto model = load_estimate(model_path);
    std::vector<SinrRealization> targets;
    for (const auto& path : inputs) {
        targets.push_back(load_realization(path));
        if (targets.back().lambda() != model.lambda()) {
            throw ValidationError("lambda mismatch: '" + path + "' has lambda " + fmt(targets.back().lambda()) +
                                  " but the model was estimated at " + fmt(model.lambda()));
        }
    }
    double thr = 0.0;
    if (threshold) {
        thr = *threshold;
    } else {
        const auto cal = calibrate_threshold(model, level, draws, s.seed, s.threads);
        if (cal.all_infinite) {
            throw ValidationError("calibration failed: every null statistic is infinite");
        }
        thr = cal.threshold;
        progress(s, err,
                 "threshold " + fmt(thr) + " from " + std::to_string(draws) + " null draws (" +
                     std::to_string(cal.infinite_count) + " infinite)");
    }
    std::string lines;
    bool anomalous = false;
    for (const auto& y : targets) {
        const auto r = detect(y, model, thr, level);
        anomalous = anomalous || r.decision == Decision::anomalous;
        lines += to_json_line(r) + "\n";
    }
    write_file_atomic(fs::path(s.out) / "detections.jsonl", lines);
    out << lines;
    return anomalous ? kExitAnomalous : kExitTypical;
}

struct ExperimentArgs {
    std::string kind;
    std::string profile = "default";
    std::string ladder;
    std::optional<double> delta;
    double delta_fraction = 0.2;
    std::string gammas = "1.2,1.5,1.8";
    double reference_distance = 0.1;
    double kappa = 0.0;
};

void print_verdicts(const TrendResult& r, std::ostream& out) {
    for (const auto& rung : r.rungs) {
        out << r.experiment << " lambda=" << fmt(rung.lambda);
        for (const auto& [k, st] : rung.stats) {
            out << ' ' << k << "_median=" << fmt(st.median);
        }
        out << '\n';
    }
    for (const auto& [k, v] : r.verdicts) {
        out << r.experiment << " verdict " << k << '=' << (v ? "true" : "false") << '\n';
    }
}

int cmd_experiment(const Settings& s, const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
    ExperimentPlan plan;
    plan.model = s.model;
    plan.seed = s.seed;
    plan.spatial_bins = s.spatial_bins;
    plan.mark_bins = s.mark_bins;
    plan.threads = s.threads;
    plan.output_dir = s.out;
    plan.replicates = s.replicates.value_or(a.kind == "decay" ? 200 : 50);
    if (a.profile == "fast") {
        plan.ladder = ExperimentPlan::fast_ladder();
    } else if (a.profile == "default") {
        plan.ladder = a.kind == "calibration" ? std::vector<double>{1e2, 1e3, 1e4} : ExperimentPlan::default_ladder();
    } else {
        throw ValidationError("profile: expected default or fast");
    }
    if (!a.ladder.empty()) {
        plan.ladder = parse_list("ladder", a.ladder);
    }
    validate_plan(plan);
    const fs::path dir(s.out);
    std::vector<TrendResult> results;
    if (a.kind == "wlln") {
        results.push_back(run_wlln(plan));
    } else if (a.kind == "aep") {
        results.push_back(run_aep(plan));
    } else if (a.kind == "aep-gamma") {
        results = run_aep_gamma_sweep(plan, parse_list("gammas", a.gammas));
    } else if (a.kind == "decay") {
        const double delta = a.delta ? *a.delta : a.delta_fraction * reference_pair_mass(plan);
        results.push_back(run_decay(plan, delta));
    } else if (a.kind == "calibration") {
        CalibrationProbe probe;
        probe.reference_distance = a.reference_distance;
        probe.kappa = a.kappa;
        results.push_back(run_calibration(plan, probe));
    } else {
        throw ValidationError("kind: expected wlln, aep, aep-gamma, decay or calibration");
    }
    write_file_atomic(dir / "experiment.cfg", render_settings(s, false));
    for (std::size_t i = 0; i < results.size(); ++i) {
        std::string stem = results[i].experiment;
        if (a.kind == "aep-gamma") {
            stem += "_" + std::to_string(i);
        }
        const auto files = write_trend(results[i], dir, stem);
        progress(s, err, "wrote " + files.summary.string());
        print_verdicts(results[i], out);
    }
    return kExitTypical;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Marked SINR network simulator with large-deviation diagnostics", "sinrldp"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "help for every subcommand");

    std::map<std::string, CommonFlags> flags;
    auto add = [&](const char* name, const char* desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        flags[name].attach(sub);
        return sub;
    };

    add("generate", "sample realizations and write realization_NNN.bin files");

    std::vector<std::string> measure_inputs;
    bool dense = false;
    CLI::App* meas = add("measure", "bin realizations into M1/M2 measure files and CSV views");
    meas->add_option("inputs", measure_inputs, "realization files")->required();
    meas->add_flag("--dense", dense, "write every cell pair to the M2 CSV, including zeros");

    std::vector<std::string> rate_inputs;
    std::string rate_m1;
    std::string rate_m2;
    std::optional<double> rate_tol;
    CLI::App* rate = add("rate", "evaluate the rate functions and write rates.jsonl");
    rate->add_option("inputs", rate_inputs, "realization files");
    rate->add_option("--m1", rate_m1, "power measure file (with --m2, evaluated against the configured model)");
    rate->add_option("--m2", rate_m2, "connectivity measure file");
    rate->add_option("--tolerance", rate_tol,
                     "consistency tolerance (default 1e-9 for measure files, unlimited for realizations)");

    std::vector<std::string> est_inputs;
    CLI::App* est = add("estimate", "estimate beta_hat and t_hat from replicates into estimate.bin");
    est->add_option("inputs", est_inputs, "realization files")->required();

    std::string det_model;
    std::vector<std::string> det_inputs;
    double det_level = 0.95;
    std::size_t det_draws = 1000;
    std::optional<double> det_threshold;
    CLI::App* det = add("detect", "test realizations against an estimated model; exit 0 typical, 1 anomalous");
    det->add_option("--model", det_model, "estimate file written by the estimate subcommand")->required();
    det->add_option("inputs", det_inputs, "realization files")->required();
    det->add_option("--level", det_level, "null quantile level in (0, 1]")->capture_default_str();
    det->add_option("--null-draws", det_draws, "null draws for threshold calibration (>= 100)")
        ->capture_default_str();
    det->add_option("--threshold", det_threshold, "use this threshold instead of calibrating");

    ExperimentArgs ex;
    CLI::App* exp = add("experiment", "run a trend experiment and write summary, records and CSV");
    exp->add_option("--kind", ex.kind, "wlln, aep, aep-gamma, decay or calibration")->required();
    exp->add_option("--profile", ex.profile, "ladder profile: default or fast")->capture_default_str();
    exp->add_option("--ladder", ex.ladder, "comma-separated lambda ladder (overrides the profile)");
    exp->add_option("--delta", ex.delta, "decay: absolute sup-distance threshold");
    exp->add_option("--delta-fraction", ex.delta_fraction, "decay: threshold as a fraction of mass(t beta (x) beta)")
        ->capture_default_str();
    exp->add_option("--gammas", ex.gammas, "aep-gamma: comma-separated gamma values")->capture_default_str();
    exp->add_option("--reference-distance", ex.reference_distance, "calibration: reference distance d0")
        ->capture_default_str();
    exp->add_option("--kappa", ex.kappa, "calibration: offset kappa")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitTypical;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitTypical;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return kExitTypical;
        }
        err << "error: " << e.what() << '\n';
        return kExitError;
    }

    try {
        for (CLI::App* sub : app.get_subcommands()) {
            const std::string name = sub->get_name();
            const Settings s = flags.at(name).resolve();
            if (name == "generate") return cmd_generate(s, out, err);
            if (name == "measure") return cmd_measure(s, measure_inputs, dense, out);
            if (name == "rate") return cmd_rate(s, rate_inputs, rate_m1, rate_m2, rate_tol, out);
            if (name == "estimate") return cmd_estimate(s, est_inputs, out);
            if (name == "detect") {
                return cmd_detect(s, det_model, det_inputs, det_level, det_draws, det_threshold, out, err);
            }
            if (name == "experiment") return cmd_experiment(s, ex, out, err);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace sinrldp::cli
