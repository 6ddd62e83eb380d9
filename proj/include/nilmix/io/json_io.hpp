#pragma once

// JSON and CSV plumbing for the batch runner. Rationals travel as strings
// ("p/q" or exact decimals); every numeric written back is either an exact
// rational or a certified [lo, hi] enclosure.

#include <gmpxx.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nilmix/errors.hpp"
#include "nilmix/exact/interval.hpp"
#include "nilmix/exact/matrix.hpp"
#include "nilmix/exact/number_field.hpp"
#include "nilmix/nil/heisenberg.hpp"
#include "nilmix/nil/test_function.hpp"
#include "nilmix/toral/trig_polynomial.hpp"

namespace nilmix::io {

using json = nlohmann::ordered_json;

/// A malformed or schema-violating config.
class SchemaError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

inline const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
  return j.at(key);
}

/// Exact rational from an integer, "p/q" or a decimal string such as "-0.05" or "1e-3".
inline mpq_class parse_rational(const json& j) {
  if (j.is_number_integer()) return mpq_class(mpz_class(j.dump()));
  if (!j.is_string()) throw SchemaError("expected an integer or a rational string, got " + j.dump());
  std::string s = j.get<std::string>();
  try {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      mpq_class q(mpz_class(s.substr(0, slash)), mpz_class(s.substr(slash + 1)));
      if (q.get_den() == 0) throw SchemaError("zero denominator in " + s);
      q.canonicalize();
      return q;
    }
    long exp10 = 0;
    auto e = s.find_first_of("eE");
    if (e != std::string::npos) {
      exp10 = std::stol(s.substr(e + 1));
      s = s.substr(0, e);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
      exp10 -= static_cast<long>(s.size() - dot - 1);
      s.erase(dot, 1);
    }
    if (!s.empty() && s[0] == '+') s.erase(0, 1);
    mpq_class q{mpz_class(s)};
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
    if (exp10 >= 0) q *= p;
    else q /= p;
    return q;
  } catch (const std::invalid_argument&) {
    throw SchemaError("not a rational number: " + j.dump());
  } catch (const std::out_of_range&) {
    throw SchemaError("exponent out of range: " + j.dump());
  }
}

/// Floating-point parameter: JSON number or rational string.
inline double parse_real(const json& j) {
  if (j.is_number()) return j.get<double>();
  return parse_rational(j).get_d();
}

inline long parse_long(const json& j) {
  if (!j.is_number_integer()) throw SchemaError("expected an integer, got " + j.dump());
  return j.get<long>();
}

inline std::vector<long> parse_long_vector(const json& j) {
  if (!j.is_array()) throw SchemaError("expected an integer array, got " + j.dump());
  std::vector<long> out;
  for (const auto& v : j) out.push_back(parse_long(v));
  return out;
}

inline Frequency parse_frequency(const json& j) {
  if (!j.is_array()) throw SchemaError("expected an integer array, got " + j.dump());
  Frequency out;
  for (const auto& v : j) {
    if (!v.is_number_integer() && !v.is_string()) throw SchemaError("frequency entries must be integers");
    try {
      out.emplace_back(v.is_string() ? v.get<std::string>() : v.dump());
    } catch (const std::invalid_argument&) {
      throw SchemaError("not an integer: " + v.dump());
    }
  }
  return out;
}

inline IntMatrix parse_int_matrix(const json& j) {
  if (!j.is_array() || j.empty()) throw SchemaError("expected a nonempty matrix");
  const int rows = static_cast<int>(j.size());
  const int cols = j[0].is_array() ? static_cast<int>(j[0].size()) : 0;
  IntMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    Frequency row = parse_frequency(j[i]);
    if (static_cast<int>(row.size()) != cols) throw SchemaError("ragged matrix");
    for (int c = 0; c < cols; ++c) m(i, c) = row[c];
  }
  return m;
}

inline std::vector<UnimodularMatrix> parse_generators(const json& j) {
  if (!j.is_array() || j.empty()) throw SchemaError("'generators' must be a nonempty array of matrices");
  std::vector<UnimodularMatrix> out;
  for (const auto& m : j) out.emplace_back(parse_int_matrix(m));
  return out;
}

/// {"polynomial": [c0, c1, ..., cn]}, coefficients from the constant term up.
inline FieldPtr parse_field(const json& j) {
  Frequency c = parse_frequency(require(j, "polynomial"));
  return make_field(IntPolynomial(c));
}

inline NumberFieldElement parse_element(const FieldPtr& k, const json& j) {
  if (!j.is_array()) throw SchemaError("number field element must be a coordinate array");
  if (static_cast<int>(j.size()) > k->degree()) throw SchemaError("too many coordinates for the field degree");
  std::vector<mpq_class> c;
  for (const auto& v : j) c.push_back(parse_rational(v));
  return NumberFieldElement::from_polynomial(k, QPolynomial(c));
}

/// {"dim": d, "coeffs": [{"freq": [..], "re": "p/q", "im": "p/q"}], "tail": "decimal"}
inline TrigPolynomial parse_trig(const json& j) {
  const long d = parse_long(require(j, "dim"));
  if (d < 1) throw SchemaError("'dim' must be positive");
  TrigPolynomial f(static_cast<int>(d));
  for (const auto& t : require(j, "coeffs")) {
    Frequency a = parse_frequency(require(t, "freq"));
    if (static_cast<long>(a.size()) != d) throw SchemaError("frequency length differs from 'dim'");
    ComplexQ v{t.contains("re") ? parse_rational(t["re"]) : mpq_class(0),
               t.contains("im") ? parse_rational(t["im"]) : mpq_class(0)};
    f.add(a, v);
  }
  if (j.contains("tail")) {
    mpq_class tail = parse_rational(j["tail"]);
    if (tail < 0) throw SchemaError("'tail' must be nonnegative");
    f.set_tail(tail);
  }
  return f;
}

/// {"block": [[a,b],[c,d]], "linear": ["l1", "l2"]}; without "linear" the
/// canonical linear term is used.
inline HeisAuto parse_heis_auto(const json& j) {
  UnimodularMatrix block(parse_int_matrix(require(j, "block")));
  if (!j.contains("linear")) return HeisAuto::canonical(block);
  const json& l = j["linear"];
  if (!l.is_array() || l.size() != 2) throw SchemaError("'linear' must have two entries");
  return HeisAuto(block, parse_rational(l[0]), parse_rational(l[1]));
}

/// {"constant": c, "balls": [...], "characters": [...], "zero_mean": bool}
inline TestFunction parse_test_function(const json& j) {
  TestFunction f = TestFunction::constant(j.contains("constant") ? parse_real(j["constant"]) : 0.0);
  if (j.contains("balls"))
    for (const auto& b : j["balls"]) {
      BallBump ball;
      if (b.contains("center")) {
        const json& c = b["center"];
        if (!c.is_array() || c.size() != 3) throw SchemaError("ball center must have three entries");
        for (int i = 0; i < 3; ++i) ball.center[i] = parse_real(c[i]);
      }
      if (b.contains("radius")) ball.radius = parse_real(b["radius"]);
      if (b.contains("power")) ball.power = static_cast<int>(parse_long(b["power"]));
      if (b.contains("weight")) ball.weight = parse_real(b["weight"]);
      f.add(ball);
    }
  if (j.contains("characters"))
    for (const auto& b : j["characters"]) {
      CharacterBump cb;
      std::vector<long> a = parse_long_vector(require(b, "frequency"));
      if (a.size() != 2) throw SchemaError("character frequency must have two entries");
      cb.frequency = {a[0], a[1]};
      if (b.contains("center")) cb.center = parse_real(b["center"]);
      if (b.contains("radius")) cb.radius = parse_real(b["radius"]);
      if (b.contains("power")) cb.power = static_cast<int>(parse_long(b["power"]));
      if (b.contains("weight")) cb.weight = parse_real(b["weight"]);
      f.add(cb);
    }
  if (j.value("zero_mean", false)) f = f.zero_mean();
  return f;
}

// ---- output ----

inline std::string rational_str(const mpq_class& q) { return q.get_str(); }

inline json exact(const mpq_class& q) { return json{{"exact", q.get_str()}}; }

inline json exact(const ComplexQ& c) { return json{{"re", exact(c.re)}, {"im", exact(c.im)}}; }

/// Outward-rounded enclosure with its half-width.
inline json enclosure(const Interval& v, int digits = 20) {
  Interval half = v.width() * Interval::from_double(0.5, v.prec());
  return json{{"lo", v.lo_str(digits)}, {"hi", v.hi_str(digits)}, {"radius", half.hi_str(4)}};
}

inline json enclosure(const CertifiedComplex& v, int digits = 20) {
  return json{{"re", enclosure(v.re(), digits)}, {"im", enclosure(v.im(), digits)}};
}

/// Monte Carlo value: estimate with its standard error as the uncertainty.
inline json estimate(double value, double std_error) {
  return json{{"estimate", value}, {"std_error", std_error}};
}

inline json to_json(const IntPolynomial& p) {
  json a = json::array();
  for (const auto& c : p.coeffs()) a.push_back(c.get_str());
  return a;
}

inline json to_json(const Frequency& f) {
  json a = json::array();
  for (const auto& c : f) a.push_back(c.get_str());
  return a;
}

inline json to_json(const NumberFieldElement& e) {
  json a = json::array();
  for (const auto& c : e.coords()) a.push_back(c.get_str());
  return a;
}

inline json to_json(const TrigPolynomial& f) {
  json coeffs = json::array();
  for (const auto& [a, v] : f.coeffs())
    coeffs.push_back(json{{"freq", to_json(a)}, {"re", v.re.get_str()}, {"im", v.im.get_str()}});
  return json{{"dim", f.dim()}, {"coeffs", coeffs}, {"tail", f.tail().get_str()}};
}

/// Deterministic shortest-round-trip rendering of a double.
inline std::string decimal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- CSV ----

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) : cols_(header.size()) { row(header); }
  void row(const std::vector<std::string>& fields) {
    if (fields.size() != cols_) throw Error("CSV row width differs from the header");
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_field(fields[i]);
    }
    out_ << "\r\n";
  }
  std::string str() const { return out_.str(); }

 private:
  size_t cols_;
  std::ostringstream out_;
};

/// Writes to a sibling temporary file and renames it over `path`.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + tmp.string() + " for writing");
    os << content;
    os.flush();
    if (!os) throw Error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace nilmix::io
