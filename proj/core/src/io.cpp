#include "sinrldp/io.hpp"

#include "sinrldp/errors.hpp"

#include "json.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace sinrldp {

namespace {

constexpr char kMagic[7] = {'S', 'I', 'N', 'R', 'L', 'D', 'P'};

class Writer {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void f64s(std::span<const double> vs) {
        for (double v : vs) {
            f64(v);
        }
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::size_t offset() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return in_.size() - pos_; }

    void need(std::size_t n, const char* what) const {
        if (remaining() < n) {
            throw FormatError(std::string("truncated file while reading ") + what, pos_);
        }
    }
    std::uint8_t u8(const char* what) {
        need(1, what);
        return in_[pos_++];
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
        }
        return v;
    }
    std::uint64_t u64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
        }
        return v;
    }
    double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
    std::vector<double> f64s(std::size_t n, const char* what) {
        if (n > remaining() / 8) {
            throw FormatError(std::string("truncated file while reading ") + what, pos_);
        }
        std::vector<double> v(n);
        for (auto& x : v) {
            x = f64(what);
        }
        return v;
    }
    void expect_end() const {
        if (remaining() != 0) {
            throw FormatError("unexpected trailing bytes", pos_);
        }
    }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

void write_preamble(Writer& w, FileKind kind) {
    w.bytes(kMagic, sizeof kMagic);
    w.u32(kFormatVersion);
    w.u8(static_cast<std::uint8_t>(kind));
}

void read_preamble(Reader& r, FileKind kind) {
    r.need(sizeof kMagic, "magic");
    for (char c : kMagic) {
        const std::size_t at = r.offset();
        if (r.u8("magic") != static_cast<std::uint8_t>(c)) {
            throw FormatError("bad magic; not a SINRLDP file", at);
        }
    }
    const std::size_t at = r.offset();
    const std::uint32_t version = r.u32("version");
    if (version != kFormatVersion) {
        throw FormatError("unsupported format version " + std::to_string(version) + " (expected " +
                              std::to_string(kFormatVersion) + ")",
                          at);
    }
    const std::size_t kind_at = r.offset();
    const std::uint8_t k = r.u8("file kind");
    if (k != static_cast<std::uint8_t>(kind)) {
        throw FormatError("file kind " + std::to_string(k) + " does not match expected " +
                              std::to_string(static_cast<int>(kind)),
                          kind_at);
    }
}

void write_domain(Writer& w, const Domain& d) {
    w.u32(static_cast<std::uint32_t>(d.dimension()));
    w.f64s(d.lower);
    w.f64s(d.upper);
    w.f64(d.mark_cap);
}

Domain read_domain(Reader& r) {
    const std::size_t at = r.offset();
    const std::uint32_t dim = r.u32("dimension");
    if (dim == 0 || dim > 16) {
        throw FormatError("unsupported dimension " + std::to_string(dim), at);
    }
    Domain d;
    d.lower = r.f64s(dim, "domain");
    d.upper = r.f64s(dim, "domain");
    d.mark_cap = r.f64("mark cap");
    return d;
}

void write_threshold(Writer& w, const ThresholdFunction& f) {
    w.u32(static_cast<std::uint32_t>(f.edges().size()));
    w.f64s(f.edges());
    w.f64s(f.values());
}

ThresholdFunction read_threshold(Reader& r) {
    const std::size_t at = r.offset();
    const std::uint32_t k = r.u32("threshold table size");
    auto edges = r.f64s(k, "threshold edges");
    auto values = r.f64s(static_cast<std::size_t>(k) + 1, "threshold values");
    try {
        if (k == 0) {
            return ThresholdFunction::constant(values[0]);
        }
        return ThresholdFunction::tabulated(std::move(edges), std::move(values));
    } catch (const ValidationError& e) {
        throw FormatError(std::string("invalid threshold table: ") + e.what(), at);
    }
}

void write_model(Writer& w, const NetworkModel& m) {
    if (!m.params.mu.is_uniform()) {
        throw IoError("custom spatial density '" + m.params.mu.name() + "' cannot be serialized");
    }
    if (m.limit.kind() == LimitKind::custom) {
        throw IoError("custom limit kernel cannot be serialized");
    }
    write_domain(w, m.domain);
    w.f64(m.params.lambda);
    w.f64(m.params.c);
    w.f64(m.params.alpha);
    w.f64(m.params.n0);
    write_threshold(w, m.params.iota);
    write_threshold(w, m.params.zeta);
    w.u8(m.params.bounded_at_zero ? 1 : 0);
    w.u8(m.params.include_transmitter_in_interference ? 1 : 0);
    w.f64(m.sched.gamma_a);
    w.u8(static_cast<std::uint8_t>(m.mode));
    w.u8(static_cast<std::uint8_t>(m.limit.kind()));
    w.f64(m.limit.parameter(0));
    w.f64(m.limit.parameter(1));
    w.u32(static_cast<std::uint32_t>(m.quadrature_resolution));
}

NetworkModel read_model(Reader& r) {
    NetworkModel m;
    m.domain = read_domain(r);
    m.params.lambda = r.f64("lambda");
    m.params.c = r.f64("c");
    m.params.alpha = r.f64("alpha");
    m.params.n0 = r.f64("n0");
    m.params.iota = read_threshold(r);
    m.params.zeta = read_threshold(r);
    m.params.bounded_at_zero = r.u8("flags") != 0;
    m.params.include_transmitter_in_interference = r.u8("flags") != 0;
    m.sched.gamma_a = r.f64("gamma");
    const std::size_t mode_at = r.offset();
    const std::uint8_t mode = r.u8("mode");
    if (mode > 1) {
        throw FormatError("unknown graph mode " + std::to_string(mode), mode_at);
    }
    m.mode = static_cast<GraphMode>(mode);
    const std::size_t kind_at = r.offset();
    const std::uint8_t kind = r.u8("limit kind");
    const double p0 = r.f64("limit parameter");
    const double p1 = r.f64("limit parameter");
    switch (static_cast<LimitKind>(kind)) {
    case LimitKind::none:
        m.limit = LimitKernel();
        break;
    case LimitKind::constant:
        m.limit = LimitKernel::constant(p0);
        break;
    case LimitKind::exp_distance:
        m.limit = LimitKernel::exp_distance(p0);
        break;
    case LimitKind::calibrated:
        m.limit = LimitKernel::calibrated(p0, p1);
        break;
    default:
        throw FormatError("unsupported limit kernel kind " + std::to_string(kind), kind_at);
    }
    m.quadrature_resolution = r.u32("quadrature resolution");
    return m;
}

void write_grid(Writer& w, const BinGrid& g) {
    write_domain(w, g.domain());
    w.f64(g.mark_rate());
    w.u32(static_cast<std::uint32_t>(g.spatial_bins()));
    w.u32(static_cast<std::uint32_t>(g.mark_bins()));
}

BinGrid read_grid(Reader& r) {
    Domain d = read_domain(r);
    const double c = r.f64("mark rate");
    const std::size_t at = r.offset();
    const std::uint32_t s = r.u32("spatial bins");
    const std::uint32_t m = r.u32("mark bins");
    try {
        BinGrid g(std::move(d), c, s, m);
        if (g.cell_count() > (std::size_t{1} << 24)) {
            throw FormatError("grid too large", at);
        }
        return g;
    } catch (const ValidationError& e) {
        throw FormatError(std::string("invalid grid: ") + e.what(), at);
    }
}

std::string path_context(const std::filesystem::path& path) {
    return " '" + path.string() + "'";
}

template <class Fn>
auto with_path(const std::filesystem::path& path, Fn&& fn) {
    try {
        return fn();
    } catch (const FormatError& e) {
        throw FormatError(std::string(e.what()).substr(0, std::string(e.what()).rfind(" (at byte")) + " in" +
                              path_context(path),
                          e.offset());
    }
}

}  // namespace

std::vector<std::uint8_t> encode_realization(const SinrRealization& y) {
    Writer w;
    write_preamble(w, FileKind::realization);
    write_model(w, y.model);
    w.u64(y.sample.seed);
    w.f64(y.sample.lambda_used);
    w.u64(y.sample.size());
    w.u64(y.edges.size());
    const std::size_t d = y.model.domain.dimension();
    for (const auto& p : y.sample.points) {
        if (p.location.size() != d) {
            throw ValidationError("point dimension does not match the domain");
        }
        w.f64s(p.location);
        w.f64(p.mark);
    }
    for (const auto& [u, v] : y.edges) {
        w.u32(u);
        w.u32(v);
    }
    return w.take();
}

SinrRealization decode_realization(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    read_preamble(r, FileKind::realization);
    SinrRealization y;
    y.model = read_model(r);
    y.sample.seed = r.u64("seed");
    y.sample.lambda_used = r.f64("lambda");
    const std::uint64_t n = r.u64("point count");
    const std::uint64_t e = r.u64("edge count");
    const std::size_t d = y.model.domain.dimension();
    const std::size_t point_bytes = 8 * (d + 1);
    if (n > r.remaining() / point_bytes) {
        throw FormatError("truncated file: " + std::to_string(n) + " points declared", r.offset());
    }
    y.sample.points.resize(n);
    for (auto& p : y.sample.points) {
        p.location = r.f64s(d, "point record");
        p.mark = r.f64("point record");
    }
    if (e > r.remaining() / 8) {
        throw FormatError("truncated file: " + std::to_string(e) + " edges declared", r.offset());
    }
    std::vector<EdgeSet::Edge> pairs(e);
    for (std::uint64_t i = 0; i < e; ++i) {
        const std::uint32_t u = r.u32("edge record");
        const std::uint32_t v = r.u32("edge record");
        if (!(u < v)) {
            throw ValidationError("edge " + std::to_string(i) + " is not stored smaller index first");
        }
        if (v >= n) {
            throw ValidationError("edge " + std::to_string(i) + " index " + std::to_string(v) +
                                  " out of range for " + std::to_string(n) + " points");
        }
        if (i > 0 && !(pairs[i - 1] < EdgeSet::Edge{u, v})) {
            throw ValidationError("edge records are not strictly sorted at edge " + std::to_string(i));
        }
        pairs[i] = {u, v};
    }
    r.expect_end();
    y.edges = EdgeSet::from_pairs(std::move(pairs));
    validate_realization(y);
    return y;
}

void save_realization(const SinrRealization& y, const std::filesystem::path& path) {
    write_file_atomic(path, encode_realization(y));
}

SinrRealization load_realization(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return with_path(path, [&] { return decode_realization(bytes); });
}

std::vector<std::uint8_t> encode_measure(const BinnedMeasure& m) {
    Writer w;
    write_preamble(w, FileKind::measure);
    write_grid(w, m.grid);
    w.f64s(m.weights);
    return w.take();
}

std::vector<std::uint8_t> encode_measure(const BinnedPairMeasure& m) {
    Writer w;
    write_preamble(w, FileKind::pair_measure);
    write_grid(w, m.grid);
    w.f64s(m.weights);
    return w.take();
}

void save_measure(const BinnedMeasure& m, const std::filesystem::path& path) {
    write_file_atomic(path, encode_measure(m));
}

void save_measure(const BinnedPairMeasure& m, const std::filesystem::path& path) {
    write_file_atomic(path, encode_measure(m));
}

BinnedMeasure load_measure(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return with_path(path, [&] {
        Reader r(bytes);
        read_preamble(r, FileKind::measure);
        BinnedMeasure m(read_grid(r));
        m.weights = r.f64s(m.grid.cell_count(), "weights");
        r.expect_end();
        return m;
    });
}

BinnedPairMeasure load_pair_measure(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return with_path(path, [&] {
        Reader r(bytes);
        read_preamble(r, FileKind::pair_measure);
        BinnedPairMeasure m(read_grid(r));
        m.weights = r.f64s(m.grid.cell_count() * m.grid.cell_count(), "weights");
        r.expect_end();
        return m;
    });
}

std::vector<std::uint8_t> encode_estimate(const EstimatedModel& m) {
    Writer w;
    write_preamble(w, FileKind::estimate);
    write_model(w, m.model);
    write_grid(w, m.grid);
    w.u64(m.k_used);
    w.f64s(m.beta_hat.weights);
    w.f64s(m.t_hat.values);
    const std::size_t n = m.grid.cell_count();
    for (std::size_t i = 0; i < n * n; ++i) {
        w.u8(m.t_hat.is_defined(i / n, i % n) ? 1 : 0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        w.u8(m.masked[i]);
    }
    return w.take();
}

EstimatedModel decode_estimate(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    read_preamble(r, FileKind::estimate);
    EstimatedModel m;
    m.model = read_model(r);
    m.grid = read_grid(r);
    m.k_used = r.u64("replicate count");
    const std::size_t n = m.grid.cell_count();
    m.beta_hat = BinnedMeasure(m.grid);
    m.beta_hat.weights = r.f64s(n, "beta_hat");
    m.t_hat = PairTable(n, 0.0);
    m.t_hat.values = r.f64s(n * n, "t_hat");
    r.need(n * n + n, "masks");
    m.t_hat.defined.resize(n * n);
    for (auto& b : m.t_hat.defined) {
        b = r.u8("mask");
    }
    m.masked.resize(n);
    for (auto& b : m.masked) {
        b = r.u8("mask");
    }
    r.expect_end();
    return m;
}

void save_estimate(const EstimatedModel& m, const std::filesystem::path& path) {
    write_file_atomic(path, encode_estimate(m));
}

EstimatedModel load_estimate(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return with_path(path, [&] { return decode_estimate(bytes); });
}

namespace {

std::string fmt_double(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

void bounds_columns(std::ostringstream& out, const BinGrid& g, std::size_t cell) {
    const auto b = g.bounds(cell);
    for (std::size_t i = 0; i < b.lower.size(); ++i) {
        out << ',' << fmt_double(b.lower[i]) << ',' << fmt_double(b.upper[i]);
    }
    out << ',' << fmt_double(b.mark_lower) << ',' << fmt_double(b.mark_upper);
}

void bounds_header(std::ostringstream& out, std::size_t d, const std::string& prefix) {
    for (std::size_t i = 0; i < d; ++i) {
        out << ',' << prefix << "lower_" << i << ',' << prefix << "upper_" << i;
    }
    out << ',' << prefix << "mark_lower," << prefix << "mark_upper";
}

}  // namespace

std::string measure_csv(const BinnedMeasure& m) {
    std::ostringstream out;
    const std::size_t d = m.grid.domain().dimension();
    out << "cell,spatial,mark";
    bounds_header(out, d, "");
    out << ",weight\n";
    for (std::size_t c = 0; c < m.grid.cell_count(); ++c) {
        out << c << ',' << m.grid.spatial_of(c) << ',' << m.grid.mark_of(c);
        bounds_columns(out, m.grid, c);
        out << ',' << fmt_double(m.weights[c]) << '\n';
    }
    return out.str();
}

std::string measure_csv(const BinnedPairMeasure& m, bool dense) {
    std::ostringstream out;
    const std::size_t d = m.grid.domain().dimension();
    out << "x,y";
    bounds_header(out, d, "x_");
    bounds_header(out, d, "y_");
    out << ",weight\n";
    const std::size_t n = m.cells();
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            if (!dense && m.at(x, y) == 0.0) {
                continue;
            }
            out << x << ',' << y;
            bounds_columns(out, m.grid, x);
            bounds_columns(out, m.grid, y);
            out << ',' << fmt_double(m.at(x, y)) << '\n';
        }
    }
    return out.str();
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory" + path_context(path.parent_path()) + ": " + ec.message());
        }
    }
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open" + path_context(tmp) + " for writing");
        }
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            throw IoError("write failed for" + path_context(tmp));
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename temporary file onto" + path_context(path));
    }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
    write_file_atomic(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()),
                                                          text.size()));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open" + path_context(path) + " for reading");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read failed for" + path_context(path));
    }
    return bytes;
}

namespace {

using nlohmann::json;

json num(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

double as_num(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw FormatError(std::string("missing field '") + key + "'", 0);
    }
    if (it->is_string()) {
        const auto s = it->get<std::string>();
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
        if (s == "nan") {
            return std::numeric_limits<double>::quiet_NaN();
        }
        throw FormatError(std::string("field '") + key + "' is not a number", 0);
    }
    if (!it->is_number()) {
        throw FormatError(std::string("field '") + key + "' is not a number", 0);
    }
    return it->get<double>();
}

json parse_line(std::string_view line) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("invalid JSON record: ") + e.what(), e.byte);
    }
}

json summary_json(const Summary& s) {
    return json{{"count", s.count}, {"median", num(s.median)}, {"mean", num(s.mean)}, {"std", num(s.std)},
                {"q25", num(s.q25)},  {"q75", num(s.q75)},       {"min", num(s.min)},   {"max", num(s.max)}};
}

}  // namespace

std::string to_json_line(const RateRecord& r) {
    const auto& p = r.report;
    json j;
    j["record"] = "rate";
    j["seed"] = r.seed;
    j["lambda"] = num(r.lambda);
    j["i1"] = num(p.i1);
    j["i2"] = num(p.i2);
    j["kullback"] = num(p.kullback);
    j["aep_statistic"] = r.has_aep ? num(r.aep_statistic) : json(nullptr);
    j["relative_entropy_term"] = num(p.relative_entropy_term);
    j["mass_difference_term"] = num(p.mass_difference_term);
    j["consistency_i1"] = num(p.consistency_i1);
    j["consistency_i2"] = num(p.consistency_i2);
    j["i1_infinite"] = p.i1_infinite;
    j["i2_infinite"] = p.i2_infinite;
    j["masses"] = {{"beta", num(p.mass_beta)}, {"phi", num(p.mass_phi)}, {"product", num(p.mass_product)}};
    return j.dump();
}

RateRecord parse_rate_record(std::string_view line) {
    const json j = parse_line(line);
    RateRecord r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.lambda = as_num(j, "lambda");
    auto& p = r.report;
    p.i1 = as_num(j, "i1");
    p.i2 = as_num(j, "i2");
    p.kullback = as_num(j, "kullback");
    r.has_aep = !j.at("aep_statistic").is_null();
    r.aep_statistic = r.has_aep ? as_num(j, "aep_statistic") : 0.0;
    p.relative_entropy_term = as_num(j, "relative_entropy_term");
    p.mass_difference_term = as_num(j, "mass_difference_term");
    p.consistency_i1 = as_num(j, "consistency_i1");
    p.consistency_i2 = as_num(j, "consistency_i2");
    p.i1_infinite = j.at("i1_infinite").get<bool>();
    p.i2_infinite = j.at("i2_infinite").get<bool>();
    const json& m = j.at("masses");
    p.mass_beta = as_num(m, "beta");
    p.mass_phi = as_num(m, "phi");
    p.mass_product = as_num(m, "product");
    return r;
}

std::string to_json_line(const DetectionReport& r) {
    json j;
    j["record"] = "detection";
    j["seed"] = r.seed;
    j["lambda"] = num(r.lambda);
    j["statistic"] = num(r.statistic);
    j["threshold"] = num(r.threshold);
    j["decision"] = to_string(r.decision);
    j["level"] = num(r.level);
    j["power_term"] = num(r.power_term);
    j["connectivity_term"] = num(r.connectivity_term);
    return j.dump();
}

DetectionReport parse_detection_report(std::string_view line) {
    const json j = parse_line(line);
    DetectionReport r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.lambda = as_num(j, "lambda");
    r.statistic = as_num(j, "statistic");
    r.threshold = as_num(j, "threshold");
    const auto d = j.at("decision").get<std::string>();
    if (d != "typical" && d != "anomalous") {
        throw FormatError("unknown decision '" + d + "'", 0);
    }
    r.decision = d == "typical" ? Decision::typical : Decision::anomalous;
    r.level = as_num(j, "level");
    r.power_term = as_num(j, "power_term");
    r.connectivity_term = as_num(j, "connectivity_term");
    return r;
}

std::string trend_summary_json(const TrendResult& r) {
    json j;
    j["experiment"] = r.experiment;
    j["verdicts"] = json::object();
    for (const auto& [k, v] : r.verdicts) {
        j["verdicts"][k] = v;
    }
    j["rungs"] = json::array();
    for (const auto& rung : r.rungs) {
        json jr;
        jr["lambda"] = num(rung.lambda);
        jr["stats"] = json::object();
        for (const auto& [k, s] : rung.stats) {
            jr["stats"][k] = summary_json(s);
        }
        jr["extras"] = json::object();
        for (const auto& [k, v] : rung.extras) {
            jr["extras"][k] = num(v);
        }
        if (!rung.note.empty()) {
            jr["note"] = rung.note;
        }
        j["rungs"].push_back(std::move(jr));
    }
    j["record_count"] = r.records.size();
    return j.dump(2) + "\n";
}

std::string trend_records_jsonl(const TrendResult& r) {
    std::string out;
    for (const auto& rec : r.records) {
        json j;
        j["experiment"] = r.experiment;
        j["rung"] = rec.rung;
        j["replicate"] = rec.replicate;
        j["lambda"] = num(rec.lambda);
        j["seed"] = rec.seed;
        for (const auto& [k, v] : rec.values) {
            j["values"][k] = num(v);
        }
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::string trend_csv(const TrendResult& r) {
    std::ostringstream out;
    out << "rung,lambda,statistic,count,median,mean,std,q25,q75,min,max\n";
    for (std::size_t i = 0; i < r.rungs.size(); ++i) {
        const auto& rung = r.rungs[i];
        for (const auto& [k, s] : rung.stats) {
            out << i << ',' << fmt_double(rung.lambda) << ',' << k << ',' << s.count << ',' << fmt_double(s.median)
                << ',' << fmt_double(s.mean) << ',' << fmt_double(s.std) << ',' << fmt_double(s.q25) << ','
                << fmt_double(s.q75) << ',' << fmt_double(s.min) << ',' << fmt_double(s.max) << '\n';
        }
    }
    return out.str();
}

TrendFiles write_trend(const TrendResult& r, const std::filesystem::path& dir, const std::string& stem) {
    const std::string base = stem.empty() ? r.experiment : stem;
    TrendFiles f;
    f.summary = dir / (base + "_summary.json");
    f.records = dir / (base + "_records.jsonl");
    f.csv = dir / (base + ".csv");
    write_file_atomic(f.summary, trend_summary_json(r));
    write_file_atomic(f.records, trend_records_jsonl(r));
    write_file_atomic(f.csv, trend_csv(r));
    return f;
}

}  // namespace sinrldp
