#include "arcfit/ingest.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "arcfit/errors.hpp"

namespace arcfit {

namespace {

constexpr const char* kMeasurementMagic = "# arcfit-measurements v1";
constexpr const char* kSamplesMagic = "# arcfit-samples v1";

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(s);
    while (std::getline(in, field, sep)) out.push_back(trim(field));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double parse_number(const std::string& text, std::size_t line, const char* what) {
    if (text.empty()) throw LocatedInputError(std::string("line ") + std::to_string(line) + ": empty " + what, line);
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size())
        throw LocatedInputError("line " + std::to_string(line) + ": cannot parse " + what + " '" + text + "'", line);
    if (!std::isfinite(v))
        throw LocatedInputError("line " + std::to_string(line) + ": non-finite " + what, line);
    return v;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return in;
}

}  // namespace

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

// --- measurement files -------------------------------------------------------

MeasurementFile parse_measurements(std::istream& in) {
    MeasurementFile file;
    std::string raw;
    std::size_t line = 0;
    bool seen_magic = false;
    bool seen_columns = false;
    while (std::getline(in, raw)) {
        ++line;
        const std::string text = trim(raw);
        if (text.empty()) continue;
        if (!seen_magic) {
            if (text != kMeasurementMagic)
                throw LocatedInputError("line " + std::to_string(line) + ": expected header '" + kMeasurementMagic + "'", line);
            seen_magic = true;
            continue;
        }
        if (text[0] == '#') {
            const auto colon = text.find(':');
            if (colon != std::string::npos) file.metadata[trim(text.substr(1, colon - 1))] = trim(text.substr(colon + 1));
            continue;
        }
        if (!seen_columns) {
            const auto cols = split(text, ',');
            const bool plain = cols == std::vector<std::string>{"freq_hz", "re", "im"};
            const bool weighted = cols == std::vector<std::string>{"freq_hz", "re", "im", "weight"};
            if (!plain && !weighted)
                throw LocatedInputError("line " + std::to_string(line) + ": expected columns freq_hz,re,im[,weight]", line);
            file.has_weights = weighted;
            seen_columns = true;
            continue;
        }
        const auto fields = split(text, ',');
        const std::size_t expected = file.has_weights ? 4 : 3;
        if (fields.size() != expected)
            throw LocatedInputError("line " + std::to_string(line) + ": expected " + std::to_string(expected) +
                                        " fields, found " + std::to_string(fields.size()),
                                    line);
        MeasurementRow row;
        row.line = line;
        row.freq_hz = parse_number(fields[0], line, "frequency");
        row.value = {parse_number(fields[1], line, "real part"), parse_number(fields[2], line, "imaginary part")};
        if (file.has_weights) {
            row.weight = parse_number(fields[3], line, "weight");
            if (!(row.weight > 0.0))
                throw LocatedInputError("line " + std::to_string(line) + ": weight must be positive", line);
        }
        if (!file.rows.empty() && !(row.freq_hz > file.rows.back().freq_hz))
            throw LocatedInputError("line " + std::to_string(line) + ": frequencies must be strictly increasing", line);
        file.rows.push_back(row);
    }
    if (!seen_magic) throw InputError("empty measurement file");
    if (!seen_columns) throw InputError("measurement file has no column header");
    return file;
}

MeasurementFile read_measurement_file(const std::string& path) {
    auto in = open_input(path);
    return parse_measurements(in);
}

void write_measurements(std::ostream& out, const MeasurementFile& file) {
    out << kMeasurementMagic << '\n';
    for (const auto& [key, value] : file.metadata) out << "# " << key << ": " << value << '\n';
    out << (file.has_weights ? "freq_hz,re,im,weight\n" : "freq_hz,re,im\n");
    for (const auto& row : file.rows) {
        out << format_double(row.freq_hz) << ',' << format_double(row.value.real()) << ','
            << format_double(row.value.imag());
        if (file.has_weights) out << ',' << format_double(row.weight);
        out << '\n';
    }
}

SampledBoundaryData load_measurements(const std::string& path, const FrequencyMap& map,
                                      const std::optional<std::vector<double>>& weights) {
    map.validate();
    const MeasurementFile file = read_measurement_file(path);
    if (weights && weights->size() != file.rows.size())
        throw InputError("weight override needs one weight per measurement row");
    std::vector<double> freqs;
    freqs.reserve(file.rows.size());
    for (const auto& row : file.rows) freqs.push_back(row.freq_hz);
    std::vector<double> angles;
    try {
        angles = map_frequencies(freqs, map);
    } catch (const LocatedInputError& e) {
        const std::size_t line = file.rows[e.location()].line;
        throw LocatedInputError("line " + std::to_string(line) + ": " + e.what(), line);
    }
    SampledBoundaryData data;
    for (std::size_t s = 0; s < file.rows.size(); ++s) {
        const double w = weights ? (*weights)[s] : file.rows[s].weight;
        if (!(w > 0.0) || !std::isfinite(w)) throw InputError("weights must be positive and finite");
        data.samples.push_back({canonical_angle(angles[s]), file.rows[s].value, w});
    }
    return data;
}

// --- canonical sample files ------------------------------------------------

void write_samples(std::ostream& out, const SampledBoundaryData& data) {
    out << kSamplesMagic << "\ntheta_rad,re,im,weight\n";
    for (const auto& s : data.samples)
        out << format_double(s.theta) << ',' << format_double(s.value.real()) << ',' << format_double(s.value.imag())
            << ',' << format_double(s.weight) << '\n';
}

SampledBoundaryData read_samples(std::istream& in) {
    SampledBoundaryData data;
    std::string raw;
    std::size_t line = 0;
    int header = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string text = trim(raw);
        if (text.empty()) continue;
        if (header == 0) {
            if (text != kSamplesMagic)
                throw LocatedInputError("line " + std::to_string(line) + ": expected header '" + kSamplesMagic + "'", line);
            ++header;
            continue;
        }
        if (text[0] == '#') continue;
        if (header == 1) {
            if (text != "theta_rad,re,im,weight")
                throw LocatedInputError("line " + std::to_string(line) + ": expected columns theta_rad,re,im,weight", line);
            ++header;
            continue;
        }
        const auto fields = split(text, ',');
        if (fields.size() != 4)
            throw LocatedInputError("line " + std::to_string(line) + ": expected 4 fields", line);
        Sample s;
        s.theta = parse_number(fields[0], line, "angle");
        s.value = {parse_number(fields[1], line, "real part"), parse_number(fields[2], line, "imaginary part")};
        s.weight = parse_number(fields[3], line, "weight");
        if (!(s.weight > 0.0)) throw LocatedInputError("line " + std::to_string(line) + ": weight must be positive", line);
        data.samples.push_back(s);
    }
    if (header < 2) throw InputError("sample file is missing its header");
    return data;
}

SampledBoundaryData read_samples_file(const std::string& path) {
    auto in = open_input(path);
    return read_samples(in);
}

// --- expressions -------------------------------------------------------------

namespace {

class Parser {
public:
    Parser(const std::string& text, std::vector<Expression::Node>& nodes) : text_(text), nodes_(nodes) {}

    int parse() {
        const int root = sum();
        skip();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return root;
    }

private:
    using Op = Expression::Node::Op;
    const std::string& text_;
    std::vector<Expression::Node>& nodes_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& why) const {
        throw InputError("expression '" + text_ + "': " + why + " at position " + std::to_string(pos_));
    }
    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    int add(Expression::Node node) {
        nodes_.push_back(std::move(node));
        return static_cast<int>(nodes_.size()) - 1;
    }
    int binary(Op op, int lhs, int rhs) { return add({op, {}, lhs, rhs, {}}); }

    int sum() {
        int lhs = product();
        for (;;) {
            if (eat('+'))
                lhs = binary(Op::add, lhs, product());
            else if (eat('-'))
                lhs = binary(Op::sub, lhs, product());
            else
                return lhs;
        }
    }
    int product() {
        int lhs = unary();
        for (;;) {
            if (eat('*'))
                lhs = binary(Op::mul, lhs, unary());
            else if (eat('/'))
                lhs = binary(Op::div, lhs, unary());
            else
                return lhs;
        }
    }
    int unary() {
        if (eat('-')) return add({Op::neg, {}, unary(), -1, {}});
        if (eat('+')) return unary();
        return power();
    }
    int power() {
        const int base = atom();
        if (eat('^')) return binary(Op::pow, base, unary());  // right associative
        return base;
    }
    int atom() {
        skip();
        if (pos_ >= text_.size()) fail("unexpected end");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            const int inner = sum();
            if (!eat(')')) fail("missing ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* start = text_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(start, &end);
            if (end == start) fail("bad number");
            pos_ += static_cast<std::size_t>(end - start);
            // A trailing 'i' directly after a number makes it imaginary: 2.5i.
            if (pos_ < text_.size() && text_[pos_] == 'i' &&
                (pos_ + 1 >= text_.size() || !std::isalnum(static_cast<unsigned char>(text_[pos_ + 1])))) {
                ++pos_;
                return add({Op::constant, cplx(0.0, v), -1, -1, {}});
            }
            return add({Op::constant, cplx(v, 0.0), -1, -1, {}});
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string name = text_.substr(start, pos_ - start);
            if (name == "z") return add({Op::z, {}, -1, -1, {}});
            if (name == "theta" || name == "t") return add({Op::theta, {}, -1, -1, {}});
            if (name == "i") return add({Op::constant, cplx(0.0, 1.0), -1, -1, {}});
            if (name == "pi") return add({Op::constant, cplx(kPi, 0.0), -1, -1, {}});
            if (name == "e") return add({Op::constant, cplx(std::exp(1.0), 0.0), -1, -1, {}});
            static const char* const functions[] = {"exp", "log", "sqrt", "sin", "cos", "abs", "conj", "re", "im"};
            for (const char* f : functions) {
                if (name != f) continue;
                if (!eat('(')) fail("expected '(' after " + name);
                const int arg = sum();
                if (!eat(')')) fail("missing ')'");
                return add({Op::call, {}, arg, -1, name});
            }
            fail("unknown name '" + name + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }
};

cplx call(const std::string& f, cplx x) {
    if (f == "exp") return std::exp(x);
    if (f == "log") return std::log(x);
    if (f == "sqrt") return std::sqrt(x);
    if (f == "sin") return std::sin(x);
    if (f == "cos") return std::cos(x);
    if (f == "abs") return std::abs(x);
    if (f == "conj") return std::conj(x);
    if (f == "re") return x.real();
    return x.imag();
}

}  // namespace

Expression::Expression(const std::string& text) : text_(text) {
    Parser parser(text_, nodes_);
    root_ = parser.parse();
}

cplx Expression::operator()(double theta) const { return eval(root_, std::polar(1.0, theta), theta); }

cplx Expression::eval(int index, cplx z, double theta) const {
    const Node& node = nodes_[static_cast<std::size_t>(index)];
    switch (node.op) {
        case Node::Op::constant: return node.value;
        case Node::Op::z: return z;
        case Node::Op::theta: return theta;
        case Node::Op::add: return eval(node.lhs, z, theta) + eval(node.rhs, z, theta);
        case Node::Op::sub: return eval(node.lhs, z, theta) - eval(node.rhs, z, theta);
        case Node::Op::mul: return eval(node.lhs, z, theta) * eval(node.rhs, z, theta);
        case Node::Op::div: return eval(node.lhs, z, theta) / eval(node.rhs, z, theta);
        case Node::Op::pow: {
            const cplx base = eval(node.lhs, z, theta);
            const cplx exponent = eval(node.rhs, z, theta);
            // Integer powers stay exact on the unit circle.
            if (exponent.imag() == 0.0 && exponent.real() == std::round(exponent.real()) &&
                std::abs(exponent.real()) <= 1e6) {
                const long k = std::lround(exponent.real());
                cplx acc(1.0, 0.0);
                cplx factor = k < 0 ? cplx(1.0, 0.0) / base : base;
                for (unsigned long e = static_cast<unsigned long>(std::labs(k)); e > 0; e >>= 1) {
                    if (e & 1UL) acc *= factor;
                    factor *= factor;
                }
                return acc;
            }
            return std::pow(base, exponent);
        }
        case Node::Op::neg: return -eval(node.lhs, z, theta);
        case Node::Op::call: return call(node.function, eval(node.lhs, z, theta));
    }
    return {};
}

cplx parse_complex(const std::string& text) {
    const Expression expr(text);
    const cplx a = expr(0.0);
    const cplx b = expr(1.0);
    if (a != b) throw InputError("'" + text + "' is not a constant");
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw InputError("'" + text + "' is not finite");
    return a;
}

// --- synthetic cases ---------------------------------------------------------

std::string to_string(CaseKind kind) {
    switch (kind) {
        case CaseKind::polynomial_trace: return "polynomial_trace";
        case CaseKind::constant: return "constant";
        case CaseKind::blaschke_like: return "blaschke_like";
        case CaseKind::filterlike: return "filterlike";
        case CaseKind::custom: return "custom";
    }
    return "unknown";
}

std::optional<CaseKind> case_kind_from_string(const std::string& text) {
    for (CaseKind k : {CaseKind::polynomial_trace, CaseKind::constant, CaseKind::blaschke_like, CaseKind::filterlike,
                       CaseKind::custom})
        if (to_string(k) == text) return k;
    return std::nullopt;
}

namespace {

// Reflection-like response: unimodular gain away from a band of notches near
// theta = pi, each notch a zero on the circle paired with a pole just outside.
cplx filterlike_value(double theta, double gain) {
    static constexpr double kCenters[] = {0.9, 0.95, 1.0, 1.05, 1.1};
    static constexpr double kPoleRadius = 1.08;
    const cplx z = std::polar(1.0, theta);
    cplx f(gain, 0.0);
    for (double c : kCenters) {
        const cplx w = std::polar(1.0, c * kPi);
        f *= (z - w) / (z - kPoleRadius * w);
    }
    return f;
}

}  // namespace

void SyntheticCase::validate() const {
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw InputError("noise level must be nonnegative");
    switch (kind) {
        case CaseKind::polynomial_trace:
            if (coefficients.empty()) throw InputError("polynomial_trace needs at least one coefficient");
            break;
        case CaseKind::blaschke_like:
            for (const cplx& a : zeros)
                if (!(std::abs(a) < 1.0)) throw InputError("blaschke_like zeros must lie inside the unit disk");
            if (!(std::abs(scale) <= 1.0)) throw InputError("blaschke_like scale must not exceed 1 in modulus");
            break;
        case CaseKind::filterlike:
            if (!(scale > 0.0)) throw InputError("filterlike gain must be positive");
            break;
        case CaseKind::custom:
            if (expression.empty()) throw InputError("custom case needs an expression");
            (void)Expression(expression);
            break;
        case CaseKind::constant: break;
    }
}

cplx SyntheticCase::evaluate(double theta) const {
    const cplx z = std::polar(1.0, theta);
    switch (kind) {
        case CaseKind::constant: return value;
        case CaseKind::polynomial_trace: {
            cplx acc(0.0, 0.0);
            for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * z + *it;
            return acc;
        }
        case CaseKind::blaschke_like: {
            cplx f(scale, 0.0);
            for (const cplx& a : zeros) f *= (z - a) / (1.0 - std::conj(a) * z);
            return f;
        }
        case CaseKind::filterlike: return filterlike_value(theta, scale);
        case CaseKind::custom: return Expression(expression)(theta);
    }
    return {};
}

SampledBoundaryData generate_synthetic(const SyntheticCase& spec, const ArcSystem& arcs, double density) {
    spec.validate();
    if (!(density > 0.0) || !std::isfinite(density)) throw InputError("sampling density must be positive");
    std::optional<Expression> expr;
    if (spec.kind == CaseKind::custom) expr.emplace(spec.expression);

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sigma = spec.noise / std::sqrt(2.0);

    SampledBoundaryData data;
    for (const Arc& arc : arcs.approximation_arcs()) {
        const int count = std::max(2, static_cast<int>(std::ceil(density * arc.length())) + 1);
        for (int s = 0; s < count; ++s) {
            const double t = s + 1 == count ? arc.hi : arc.lo + arc.length() * s / (count - 1);
            const double theta = canonical_angle(t);
            cplx value = expr ? (*expr)(theta) : spec.evaluate(theta);
            if (spec.noise > 0.0) {
                const double re = normal(rng);
                const double im = normal(rng);
                value += sigma * cplx(re, im);
            }
            data.samples.push_back({theta, value, 1.0});
        }
    }
    return data;
}

std::string data_digest(const SampledBoundaryData& data) {
    std::ostringstream text;
    write_samples(text, data);
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char ch : text.str()) {
        hash ^= ch;
        hash *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace arcfit
