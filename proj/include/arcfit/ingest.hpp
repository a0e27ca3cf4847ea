#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arcfit/arcgeom.hpp"
#include "arcfit/moments.hpp"

namespace arcfit {

/// One row of a measurement file.
struct MeasurementRow {
    double freq_hz = 0.0;
    cplx value{0.0, 0.0};
    double weight = 1.0;
    std::size_t line = 0;  ///< 1-based line number in the source
};

/// Parsed `# arcfit-measurements v1` file:
///
///     # arcfit-measurements v1
///     # source: network analyzer export     (optional "# key: value" metadata)
///     freq_hz,re,im[,weight]
///     1.0e9,0.12,-0.03
///     ...
struct MeasurementFile {
    std::map<std::string, std::string> metadata;
    std::vector<MeasurementRow> rows;
    bool has_weights = false;
};

/// Throws LocatedInputError (line number) for malformed rows, non-finite values,
/// non-positive weights and frequencies that are not strictly increasing.
[[nodiscard]] MeasurementFile parse_measurements(std::istream& in);
[[nodiscard]] MeasurementFile read_measurement_file(const std::string& path);
void write_measurements(std::ostream& out, const MeasurementFile& file);

/// Reads a measurement file and maps its frequencies to angles. `weights`, when
/// given, replaces the weight column. Out-of-band rows are rejected by line number.
[[nodiscard]] SampledBoundaryData load_measurements(const std::string& path, const FrequencyMap& map,
                                                    const std::optional<std::vector<double>>& weights = std::nullopt);

/// Canonical `# arcfit-samples v1` CSV (theta_rad,re,im,weight) with
/// 17 significant digits, so that writing and reading back is exact.
void write_samples(std::ostream& out, const SampledBoundaryData& data);
[[nodiscard]] SampledBoundaryData read_samples(std::istream& in);
[[nodiscard]] SampledBoundaryData read_samples_file(const std::string& path);

/// 17-significant-digit decimal text of a double.
[[nodiscard]] std::string format_double(double value);

/// Complex-valued expression in z = e^{i theta} and theta, e.g.
/// "0.5*z^2 - (1+2i)*conj(z) + exp(i*theta)". Supports + - * / ^, parentheses,
/// the constants i, pi, e and the functions exp, log, sqrt, sin, cos, abs, conj,
/// re, im. Parsed once, evaluated many times.
class Expression {
public:
    explicit Expression(const std::string& text);  ///< throws InputError on syntax errors
    [[nodiscard]] cplx operator()(double theta) const;
    [[nodiscard]] const std::string& text() const { return text_; }

    struct Node {
        enum class Op { constant, z, theta, add, sub, mul, div, pow, neg, call } op = Op::constant;
        cplx value{0.0, 0.0};
        int lhs = -1;
        int rhs = -1;
        std::string function;
    };

private:
    std::string text_;
    std::vector<Node> nodes_;
    int root_ = -1;
    [[nodiscard]] cplx eval(int node, cplx z, double theta) const;
};

/// Evaluates a constant expression such as "1.5", "-0.25+0.5i" or "exp(i*pi/4)".
[[nodiscard]] cplx parse_complex(const std::string& text);

enum class CaseKind { polynomial_trace, constant, blaschke_like, filterlike, custom };

[[nodiscard]] std::string to_string(CaseKind kind);
[[nodiscard]] std::optional<CaseKind> case_kind_from_string(const std::string& text);

/// Synthetic boundary data on I.
struct SyntheticCase {
    CaseKind kind = CaseKind::constant;
    cplx value{1.0, 0.0};                    ///< constant
    std::vector<cplx> coefficients;          ///< polynomial_trace: p(z) = sum c_j z^j
    std::vector<cplx> zeros{{0.5, 0.0}, {0.0, 0.3}};  ///< blaschke_like zeros, |a| < 1
    double scale = 0.9;                      ///< blaschke_like and filterlike gain
    std::string expression;                  ///< custom
    double noise = 0.0;                      ///< complex Gaussian noise level (filterlike)
    std::uint64_t seed = 7;

    /// Noise-free value at e^{i theta}.
    [[nodiscard]] cplx evaluate(double theta) const;
    /// Throws InputError for inconsistent parameters.
    void validate() const;
};

/// Deterministic samples on a uniform grid of every I arc with endpoints,
/// max(2, ceil(density * length) + 1) points per arc (density in points per radian).
[[nodiscard]] SampledBoundaryData generate_synthetic(const SyntheticCase& spec, const ArcSystem& arcs, double density);

/// FNV-1a digest of the samples' 17-digit text, as 16 hex characters.
[[nodiscard]] std::string data_digest(const SampledBoundaryData& data);

}  // namespace arcfit
