#ifndef PRATE_TOOLS_CLI_APP_HPP
#define PRATE_TOOLS_CLI_APP_HPP

// Command-line front end. Everything lives here so the unit tests can drive
// run_cli() in-process; prate_cli.cpp is a thin main().

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "prate/prate.hpp"

namespace prate::cli {

using json = nlohmann::json;

enum ExitCode : int { kOk = 0, kInvalidInput = 2, kResourceCap = 3, kInternal = 4 };

enum class Format { csv, markdown, json };

struct RunConfig {
  std::optional<SourcePmf> source;
  std::string source_text;  // as given, echoed into codec headers
  std::vector<std::uint64_t> n;
  std::vector<double> eps;
  std::vector<double> delta;
  std::string mode;
  Format format = Format::csv;
  double cap_types = kDefaultTypeCap;
  std::string alphabet;
  std::optional<std::size_t> m;
  std::optional<double> threshold;
  std::string input;
  bool audit = false;
};

// ---------------------------------------------------------------------------
// Parsing

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidInput(std::string("cannot parse ") + what + " value '" + s + "'");
  }
}

inline std::uint64_t parse_natural(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw InvalidInput(std::string("cannot parse ") + what + " value '" + s + "'");
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw InvalidInput(std::string(what) + " value '" + s + "' is out of range");
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SourcePmf source_from_json(const json& j) {
  if (!j.is_array()) throw InvalidInput("source must be a JSON array of probabilities");
  std::vector<double> p;
  for (const auto& v : j) {
    if (!v.is_number()) throw InvalidInput("source entries must be numbers");
    p.push_back(v.get<double>());
  }
  return SourcePmf(std::move(p));
}

/// Accepts "0.2,0.8", "[0.2, 0.8]", or a path to a file holding either.
inline SourcePmf parse_source(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw InvalidInput("empty source");
  if (t.front() == '[') {
    json j;
    try {
      j = json::parse(t);
    } catch (const json::exception& e) {
      throw InvalidInput(std::string("malformed source array: ") + e.what());
    }
    return source_from_json(j);
  }
  if (std::filesystem::is_regular_file(t)) return parse_source(read_file(t));
  std::vector<double> p;
  for (const auto& item : split(t, ',')) p.push_back(parse_double(item, "source"));
  return SourcePmf(std::move(p));
}

/// "50", "10,20,30", "20..2000", "20..2000:20", or a mix separated by commas.
inline std::vector<std::uint64_t> parse_n_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split(text, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_natural(item, "n"));
      continue;
    }
    std::string hi_text = item.substr(dots + 2);
    std::uint64_t step = 1;
    if (const auto colon = hi_text.find(':'); colon != std::string::npos) {
      step = parse_natural(hi_text.substr(colon + 1), "n step");
      hi_text = hi_text.substr(0, colon);
    }
    const std::uint64_t lo = parse_natural(item.substr(0, dots), "n");
    const std::uint64_t hi = parse_natural(hi_text, "n");
    if (step == 0) throw InvalidInput("n step must be positive");
    if (hi < lo) throw InvalidInput("empty n range '" + item + "'");
    for (std::uint64_t v = lo; v <= hi; v += step) out.push_back(v);
  }
  for (auto v : out) {
    if (v == 0) throw InvalidInput("n must be positive");
  }
  if (out.empty()) throw InvalidInput("n range is empty");
  return out;
}

inline std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_double(item, what));
  return out;
}

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "markdown" || s == "md") return Format::markdown;
  if (s == "json") return Format::json;
  throw InvalidInput("unknown format '" + s + "' (expected csv, markdown or json)");
}

// Raw option strings as typed; merged over the config file.
struct RawOptions {
  std::string config, source, n, eps, delta, mode, format, alphabet, input, cap_types, m, threshold;
  bool audit = false;
};

inline std::string json_scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (const auto& x : v) {
      if (!s.empty()) s += ",";
      s += x.is_string() ? x.get<std::string>() : x.dump();
    }
    return s;
  }
  return v.dump();
}

inline RunConfig build_config(const RawOptions& raw) {
  RawOptions r;
  if (!raw.config.empty()) {
    json j;
    try {
      j = json::parse(read_file(raw.config));
    } catch (const json::exception& e) {
      throw InvalidInput(std::string("malformed config file: ") + e.what());
    }
    if (!j.is_object()) throw InvalidInput("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
      std::string* slot = nullptr;
      if (key == "source") slot = &r.source;
      else if (key == "n") slot = &r.n;
      else if (key == "eps" || key == "epsilon") slot = &r.eps;
      else if (key == "delta") slot = &r.delta;
      else if (key == "mode") slot = &r.mode;
      else if (key == "format") slot = &r.format;
      else if (key == "alphabet") slot = &r.alphabet;
      else if (key == "input") slot = &r.input;
      else if (key == "cap_types") slot = &r.cap_types;
      else if (key == "m") slot = &r.m;
      else if (key == "threshold") slot = &r.threshold;
      else if (key == "audit") {
        r.audit = value.get<bool>();
        continue;
      } else {
        throw InvalidInput("unknown config key '" + key + "'");
      }
      // Keep a JSON array source as JSON so parse_source sees the brackets.
      *slot = key == "source" && value.is_array() ? value.dump() : json_scalar_text(value);
    }
  }
  auto over = [](std::string& dst, const std::string& src) {
    if (!src.empty()) dst = src;
  };
  over(r.source, raw.source);
  over(r.n, raw.n);
  over(r.eps, raw.eps);
  over(r.delta, raw.delta);
  over(r.mode, raw.mode);
  over(r.format, raw.format);
  over(r.alphabet, raw.alphabet);
  over(r.input, raw.input);
  over(r.cap_types, raw.cap_types);
  over(r.m, raw.m);
  over(r.threshold, raw.threshold);
  r.audit = r.audit || raw.audit;

  RunConfig c;
  if (!r.source.empty()) {
    c.source = parse_source(r.source);
    c.source_text = trim(r.source);
  }
  if (!r.n.empty()) c.n = parse_n_list(r.n);
  if (!r.eps.empty()) c.eps = parse_double_list(r.eps, "epsilon");
  if (!r.delta.empty()) c.delta = parse_double_list(r.delta, "delta");
  c.mode = r.mode;
  if (!r.format.empty()) c.format = parse_format(r.format);
  if (!r.cap_types.empty()) {
    c.cap_types = parse_double(r.cap_types, "cap-types");
    if (!(c.cap_types >= 1.0)) throw InvalidInput("cap-types must be at least 1");
  }
  c.alphabet = r.alphabet;
  if (!r.m.empty()) c.m = parse_natural(r.m, "m");
  if (!r.threshold.empty()) c.threshold = parse_double(r.threshold, "threshold");
  c.input = r.input;
  c.audit = r.audit;
  return c;
}

inline const SourcePmf& require_source(const RunConfig& c) {
  if (!c.source) throw InvalidInput("--source is required");
  return *c.source;
}

inline void require_n(const RunConfig& c) {
  if (c.n.empty()) throw InvalidInput("--n is required");
}

// ---------------------------------------------------------------------------
// Output

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Shortest text that reads back to the same double.
inline std::string general(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string short_general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline constexpr const char* kDash = "—";
inline constexpr const char* kDeltaOutOfRange = "δ out of range";

struct Table {
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;
};

// Notes are printed to `err` for CSV so the table stays machine readable.
inline void write_table(const Table& t, Format f, std::ostream& out, std::ostream& err) {
  if (f == Format::csv) {
    for (std::size_t i = 0; i < t.headers.size(); ++i) out << (i ? "," : "") << t.headers[i];
    out << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << "\n";
    }
    for (const auto& n : t.notes) err << "note: " << n << "\n";
    return;
  }
  out << "|";
  for (const auto& h : t.headers) out << " " << h << " |";
  out << "\n|";
  for (std::size_t i = 0; i < t.headers.size(); ++i) out << "---|";
  out << "\n";
  for (const auto& row : t.rows) {
    out << "|";
    for (const auto& cell : row) out << " " << cell << " |";
    out << "\n";
  }
  if (!t.notes.empty()) out << "\n";
  for (const auto& n : t.notes) out << "Note: " << n << "\n";
}

inline json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

// ---------------------------------------------------------------------------
// Subcommands

inline void require_exactly_one_rate_list(const RunConfig& c) {
  if (c.eps.empty() == c.delta.empty()) {
    throw InvalidInput("give exactly one of --eps and --delta");
  }
}

// (n, eps, delta) triples; eps and delta are converted per n.
struct RatePoint {
  std::uint64_t n;
  double eps;
  double delta;
};

inline std::vector<RatePoint> rate_points(const RunConfig& c) {
  require_n(c);
  require_exactly_one_rate_list(c);
  std::vector<RatePoint> out;
  for (auto n : c.n) {
    if (!c.eps.empty()) {
      for (double e : c.eps) out.push_back({n, e, epsilon_to_delta(e, n)});
    } else {
      for (double d : c.delta) {
        if (!(d > 0.0)) throw DomainError("delta must be positive");
        out.push_back({n, delta_to_epsilon(d, n), d});
      }
    }
  }
  return out;
}

inline bool prefix_mode(const RunConfig& c) {
  if (c.mode.empty() || c.mode == "one-to-one") return false;
  if (c.mode == "prefix") return true;
  throw InvalidInput("unknown mode '" + c.mode + "' (expected one-to-one or prefix)");
}

inline int cmd_ladder(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const SourcePmf& p = require_source(c);
  const bool prefix = prefix_mode(c);
  const auto points = rate_points(c);

  std::vector<RateLadder> rows;
  std::vector<std::string> notes;
  std::optional<LengthDistribution> dist;
  bool any_infeasible = false, any_out_of_range = false;
  for (const auto& pt : points) {
    if (!(pt.eps > 0.0 && pt.eps < 1.0)) {
      throw DomainError("epsilon " + short_general(pt.eps) + " at n = " + std::to_string(pt.n) +
                        " is outside (0,1)");
    }
    RateLadder row = rate_ladder(p, pt.n, pt.eps);
    row.delta = pt.delta;
    if (!dist || dist->n != pt.n) {
      try {
        dist = length_distribution(p, pt.n, c.cap_types);
      } catch (const ResourceLimit& e) {
        dist.reset();
        if (!any_infeasible) notes.push_back(std::string("exact column infeasible: ") + e.what());
        any_infeasible = true;
      }
    }
    if (dist) row.exact = prefix ? optimal_prefix_rate(*dist, pt.eps) : optimal_rate(*dist, pt.eps);
    if (!row.blahut) any_out_of_range = true;
    rows.push_back(row);
  }
  if (any_out_of_range) {
    const auto range = delta_range(p);
    notes.push_back(std::string(kDeltaOutOfRange) + ": Blahut and pragmatic columns need delta in " +
                    detail::describe_interval(range));
  }
  if (prefix) notes.push_back("prefix mode: exact column includes the extra 1/n");
  if (!c.eps.empty() && c.n.size() > 1) notes.push_back("epsilon is fixed, so delta varies with n");
  if (!c.delta.empty() && c.n.size() > 1) notes.push_back("delta is fixed, so epsilon varies with n");

  if (c.format == Format::json) {
    json j;
    j["source"] = p.probs();
    j["mode"] = prefix ? "prefix" : "one-to-one";
    j["rows"] = json::array();
    for (const auto& r : rows) {
      j["rows"].push_back({{"n", r.n},
                           {"epsilon", r.epsilon},
                           {"delta", r.delta},
                           {"exact", optional_json(r.exact)},
                           {"shannon", r.shannon},
                           {"strassen", r.strassen},
                           {"blahut", optional_json(r.blahut)},
                           {"pragmatic", optional_json(r.pragmatic)},
                           {"alpha_star", optional_json(r.alpha_star)}});
    }
    j["notes"] = notes;
    out << j.dump(2) << "\n";
    return kOk;
  }
  Table t{{"n", "epsilon", "delta", "exact", "shannon", "strassen", "blahut", "pragmatic"}, {}, notes};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.n), short_general(r.epsilon), fixed(r.delta, 6),
                      r.exact ? fixed(*r.exact, 3) : kDash, fixed(r.shannon, 3), fixed(r.strassen, 3),
                      r.blahut ? fixed(*r.blahut, 3) : kDeltaOutOfRange,
                      r.pragmatic ? fixed(*r.pragmatic, 3) : kDeltaOutOfRange});
  }
  write_table(t, c.format, out, err);
  return kOk;
}

inline int cmd_limits(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const SourcePmf& p = require_source(c);
  const bool prefix = prefix_mode(c);
  const auto points = rate_points(c);
  struct Row {
    RatePoint pt;
    std::size_t l_star;
    double rate;
  };
  std::vector<Row> rows;
  std::optional<LengthDistribution> dist;
  for (const auto& pt : points) {
    if (!dist || dist->n != pt.n) dist = length_distribution(p, pt.n, c.cap_types);
    const std::size_t ls = optimal_length_threshold(*dist, pt.eps);
    rows.push_back({pt, ls, prefix ? optimal_prefix_rate(*dist, pt.eps) : optimal_rate(*dist, pt.eps)});
  }
  if (c.format == Format::json) {
    json j;
    j["source"] = p.probs();
    j["mode"] = prefix ? "prefix" : "one-to-one";
    j["rows"] = json::array();
    for (const auto& r : rows) {
      j["rows"].push_back({{"n", r.pt.n}, {"epsilon", r.pt.eps}, {"delta", r.pt.delta},
                           {"L_star", r.l_star}, {"rate", r.rate}});
    }
    out << j.dump(2) << "\n";
    return kOk;
  }
  Table t{{"n", "epsilon", "L_star", "rate"}, {}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.pt.n), short_general(r.pt.eps), std::to_string(r.l_star),
                      fixed(r.rate, 3)});
  }
  if (prefix) t.notes.push_back("prefix mode: rate includes the extra 1/n");
  write_table(t, c.format, out, err);
  return kOk;
}

inline json envelope_json(const MomentEnvelope& e) {
  return {{"sigma3_inf_sq", e.sigma3_inf_sq}, {"sigma3_sup_sq", e.sigma3_sup_sq},
          {"rho3_sup", e.rho3_sup},           {"grid_size", e.grid_size},
          {"refinement_tol", e.refinement_tol}, {"degenerate", e.degenerate}};
}

inline json constants_json(const ConverseConstants& k, double delta) {
  return {{"delta", delta},
          {"alpha_star", k.alpha_star},
          {"c", k.achievability_c},
          {"C", k.C},
          {"N0", k.N0},
          {"p", k.p},
          {"q", k.q},
          {"r", k.r},
          {"N1", k.N1},
          {"N2", k.N2},
          {"N0_terms", {k.n0_berry_esseen, k.n0_quadratic, k.n0_alpha_bound}},
          {"sigma3_sq", k.sigma3_sq},
          {"envelope", envelope_json(k.envelope)}};
}

inline int cmd_constants(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const SourcePmf& p = require_source(c);
  require_exactly_one_rate_list(c);
  std::vector<double> deltas = c.delta;
  if (!c.eps.empty()) {
    require_n(c);
    for (auto n : c.n) {
      for (double e : c.eps) deltas.push_back(epsilon_to_delta(e, n));
    }
  }
  if (!delta_range(p)) {
    throw DomainError("delta range is empty: the source is uniform, so D(U||P) = 0");
  }
  std::vector<json> reports;
  for (double d : deltas) reports.push_back(constants_json(converse_constants(p, d), d));

  if (c.format == Format::json) {
    json j;
    j["source"] = p.probs();
    j["constants"] = reports;
    out << j.dump(2) << "\n";
    return kOk;
  }
  Table t{{"delta", "alpha_star", "c", "C", "N0", "p", "q", "r", "N1", "N2", "sigma3_inf_sq",
           "sigma3_sup_sq", "rho3_sup"},
          {},
          {}};
  for (const auto& r : reports) {
    const auto& e = r["envelope"];
    t.rows.push_back({general(r["delta"]), general(r["alpha_star"]), general(r["c"]), general(r["C"]),
                      general(r["N0"]), general(r["p"]), general(r["q"]), general(r["r"]),
                      general(r["N1"]), general(r["N2"]), general(e["sigma3_inf_sq"]),
                      general(e["sigma3_sup_sq"]), general(e["rho3_sup"])});
  }
  write_table(t, c.format, out, err);
  return kOk;
}

inline int cmd_census(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require_n(c);
  std::size_t m = 0;
  if (c.m) {
    m = *c.m;
  } else if (c.source) {
    m = c.source->size();
  } else {
    throw InvalidInput("census needs --m or --source");
  }
  if (m < 2) throw InvalidInput("alphabet size must be at least 2");
  if (c.source && c.source->size() != m) throw InvalidInput("--m differs from the source alphabet size");
  double h = 0.0;
  if (c.threshold) {
    h = *c.threshold;
  } else if (c.source) {
    h = entropy(*c.source);
  } else {
    throw InvalidInput("census needs --threshold or --source");
  }

  std::vector<CensusReport> reports;
  std::vector<std::uint64_t> slabs;
  std::vector<std::string> notes;
  for (auto n : c.n) {
    const BigInt types = type_count(n, m);
    if (types > BigInt(static_cast<std::uint64_t>(c.cap_types))) {
      const std::string msg = "sweep truncated at n = " + std::to_string(n) + ": " + types.str() +
                              " types exceed the cap of " + general(c.cap_types);
      if (reports.empty()) throw ResourceLimit(msg);
      err << "warning: " << msg << "\n";
      notes.push_back(msg);
      break;
    }
    reports.push_back(low_entropy_count(n, m, h));
    slabs.push_back(entropy_slab_count(n, m, h));
  }

  if (c.format == Format::json) {
    json j;
    j["m"] = m;
    j["threshold_bits"] = h;
    j["rows"] = json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto& r = reports[i];
      j["rows"].push_back({{"n", r.n}, {"count", r.count.str()}, {"log2_count", r.log2_count},
                           {"theta_ratio", r.theta_ratio}, {"slab_count", slabs[i]}});
    }
    j["notes"] = notes;
    out << j.dump(2) << "\n";
    return kOk;
  }
  Table t{{"n", "m", "threshold_bits", "count", "log2_count", "theta_ratio", "slab_count"}, {}, {}};
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    t.rows.push_back({std::to_string(r.n), std::to_string(m), fixed(h, 6), r.count.str(),
                      fixed(r.log2_count, 6), fixed(r.theta_ratio, 6), std::to_string(slabs[i])});
  }
  // The truncation warning already went to err.
  if (c.format == Format::markdown) t.notes = notes;
  write_table(t, c.format, out, err);
  return kOk;
}

// --- codec -----------------------------------------------------------------

/// Splits UTF-8 text into code points (each kept as its byte sequence).
inline std::vector<std::string> utf8_symbols(std::string_view s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto b = static_cast<unsigned char>(s[i]);
    std::size_t len = b < 0x80 ? 1 : (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xE ? 3 : (b >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || i + len > s.size()) throw InvalidInput("input is not valid UTF-8");
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) throw InvalidInput("input is not valid UTF-8");
    }
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

struct Alphabet {
  std::string text;
  std::vector<std::string> symbols;

  static Alphabet parse(const std::string& text) {
    Alphabet a{text, utf8_symbols(text)};
    if (a.symbols.size() < 2) throw InvalidInput("alphabet needs at least two symbols");
    for (std::size_t i = 0; i < a.symbols.size(); ++i) {
      if (a.symbols[i] == " " || a.symbols[i] == "\t" || a.symbols[i] == "\n" || a.symbols[i] == "\r") {
        throw InvalidInput("alphabet symbols must not be whitespace");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (a.symbols[i] == a.symbols[j]) throw InvalidInput("alphabet repeats symbol '" + a.symbols[i] + "'");
      }
    }
    return a;
  }

  static Alphabet digits(std::size_t m) {
    if (m > 10) throw InvalidInput("--alphabet is required when m > 10");
    std::string t;
    for (std::size_t i = 0; i < m; ++i) t.push_back(static_cast<char>('0' + i));
    return parse(t);
  }

  Word to_word(const std::string& line) const {
    Word w;
    for (const auto& s : utf8_symbols(line)) {
      auto it = std::find(symbols.begin(), symbols.end(), s);
      if (it == symbols.end()) throw InvalidInput("symbol '" + s + "' is not in the alphabet '" + text + "'");
      w.push_back(static_cast<Symbol>(it - symbols.begin()));
    }
    return w;
  }

  std::string to_text(const Word& w) const {
    std::string s;
    for (auto x : w) s += symbols.at(x);
    return s;
  }
};

inline std::vector<std::string> read_lines(const RunConfig& c, std::istream& in) {
  std::string text;
  if (c.input.empty() || c.input == "-") {
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else {
    text = read_file(c.input);
  }
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string::npos) pos = text.size();
    std::string line = text.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = pos + 1;
  }
  return lines;
}

inline CodeMode codec_mode(const std::string& s) {
  if (s == "universal") return CodeMode::universal;
  if (s == "known" || s == "known-source") return CodeMode::known_source;
  throw InvalidInput("codec mode must be 'known' or 'universal'");
}

inline int cmd_encode(const RunConfig& c, std::istream& in, std::ostream& out) {
  const CodeMode mode = codec_mode(c.mode.empty() ? "universal" : c.mode);
  Alphabet alpha = !c.alphabet.empty() ? Alphabet::parse(c.alphabet)
                   : c.source          ? Alphabet::digits(c.source->size())
                   : c.m               ? Alphabet::digits(*c.m)
                                       : throw InvalidInput("--alphabet is required");
  const std::size_t m = alpha.symbols.size();
  if (mode == CodeMode::known_source && !c.source) throw InvalidInput("known mode requires --source");
  if (mode == CodeMode::known_source && c.source->size() != m) {
    throw InvalidInput("alphabet has " + std::to_string(m) + " symbols but the source has " +
                       std::to_string(c.source->size()));
  }

  const auto lines = read_lines(c, in);
  std::vector<Word> words;
  for (const auto& l : lines) words.push_back(alpha.to_word(l));
  std::uint64_t n = 0;
  if (!c.n.empty()) {
    if (c.n.size() != 1) throw InvalidInput("codec needs a single blocklength");
    n = c.n.front();
  } else if (!words.empty()) {
    n = words.front().size();
  } else {
    throw InvalidInput("--n is required for empty input");
  }
  if (n == 0) throw InvalidInput("blocklength must be positive");
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i].size() != n) {
      throw InvalidInput("line " + std::to_string(i + 1) + " has length " + std::to_string(words[i].size()) +
                         ", expected " + std::to_string(n));
    }
  }

  const auto ordering = CodeOrdering::make(mode, c.source, n, m, c.cap_types);
  out << "#codec mode=" << (mode == CodeMode::universal ? "universal" : "known") << " m=" << m
      << " n=" << n;
  if (mode == CodeMode::known_source) {
    out << " source=";
    for (std::size_t i = 0; i < m; ++i) out << (i ? "," : "") << general((*c.source)[i]);
  }
  out << " alphabet=" << alpha.text << "\n";
  for (const auto& w : words) {
    const Codeword cw = ordering.encode(w);
    out << cw.to_string();
    if (c.audit) {
      // -log2 of the maximum-likelihood probability of w is n H(type(w)).
      const NType t = NType::of(w, m);
      out << "\tlength=" << cw.length() << "\tempirical_bits=" << fixed(n * type_entropy(t), 6);
      if (mode == CodeMode::known_source) {
        const double bits = compensated_sum(m, [&](std::size_t a) {
          return t.counts[a] == 0 ? 0.0 : -static_cast<double>(t.counts[a]) * std::log2((*c.source)[a]);
        });
        out << "\tsource_bits=" << fixed(bits, 6);
      }
    }
    out << "\n";
  }
  return kOk;
}

struct CodecHeader {
  CodeMode mode;
  std::size_t m;
  std::uint64_t n;
  std::optional<SourcePmf> source;
  Alphabet alphabet;
};

inline CodecHeader parse_codec_header(const std::string& line) {
  const std::string prefix = "#codec ";
  if (line.rfind(prefix, 0) != 0) throw InvalidInput("missing '#codec' header line");
  const auto apos = line.find(" alphabet=");
  if (apos == std::string::npos) throw InvalidInput("codec header lacks alphabet=");
  const std::string alpha_text = line.substr(apos + 10);
  std::optional<std::string> mode, m, n, source;
  for (const auto& tok : split(line.substr(prefix.size(), apos - prefix.size()), ' ')) {
    if (tok.empty()) continue;
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw InvalidInput("malformed codec header field '" + tok + "'");
    const std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
    if (key == "mode") mode = value;
    else if (key == "m") m = value;
    else if (key == "n") n = value;
    else if (key == "source") source = value;
    else throw InvalidInput("unknown codec header field '" + key + "'");
  }
  if (!mode || !m || !n) throw InvalidInput("codec header needs mode, m and n");
  CodecHeader h{codec_mode(*mode), parse_natural(*m, "m"), parse_natural(*n, "n"), std::nullopt,
                Alphabet::parse(alpha_text)};
  if (h.alphabet.symbols.size() != h.m) throw InvalidInput("codec header alphabet does not have m symbols");
  if (h.n == 0) throw InvalidInput("codec header has n = 0");
  if (h.mode == CodeMode::known_source) {
    if (!source) throw InvalidInput("known-mode codec header lacks source=");
    h.source = parse_source(*source);
  }
  return h;
}

inline int cmd_decode(const RunConfig& c, std::istream& in, std::ostream& out) {
  const auto lines = read_lines(c, in);
  if (lines.empty()) throw InvalidInput("empty codec input");
  const CodecHeader h = parse_codec_header(lines.front());
  const auto ordering = CodeOrdering::make(h.mode, h.source, h.n, h.m, c.cap_types);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    // Audit columns after a tab are ignored.
    const std::string bits = lines[i].substr(0, lines[i].find('\t'));
    out << h.alphabet.to_text(ordering.decode(Codeword::from_string(bits))) << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// Entry point

inline void add_common(CLI::App* sub, RawOptions& o) {
  sub->add_option("--config", o.config, "JSON run configuration; flags override it");
  sub->add_option("--source", o.source, "source pmf: 0.2,0.8 or [0.2,0.8] or a file");
  sub->add_option("--n", o.n, "blocklengths: 50 | 10,20 | 20..2000 | 20..2000:20");
  sub->add_option("--eps", o.eps, "comma-separated excess-rate probabilities");
  sub->add_option("--delta", o.delta, "comma-separated exponents in bits");
  sub->add_option("--format", o.format, "csv | markdown | json");
  sub->add_option("--cap-types", o.cap_types, "maximum number of n-types to enumerate");
}

inline int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"Fundamental limits of lossless compression at finite blocklength", "prate"};
  app.require_subcommand(1);
  RawOptions o;

  auto* ladder = app.add_subcommand("ladder", "exact and approximate optimal rates");
  add_common(ladder, o);
  ladder->add_option("--mode", o.mode, "one-to-one | prefix");

  auto* limits = app.add_subcommand("limits", "exact length thresholds and optimal rates");
  add_common(limits, o);
  limits->add_option("--mode", o.mode, "one-to-one | prefix");

  auto* constants = app.add_subcommand("constants", "constants of the finite-n bounds");
  add_common(constants, o);

  auto* census = app.add_subcommand("census", "count low-empirical-entropy strings");
  add_common(census, o);
  census->add_option("--m", o.m, "alphabet size");
  census->add_option("--threshold", o.threshold, "entropy threshold in bits (default H(source))");

  auto* codec = app.add_subcommand("codec", "one-to-one block encoder/decoder");
  codec->require_subcommand(1);
  auto* encode = codec->add_subcommand("encode", "strings to codewords");
  auto* decode = codec->add_subcommand("decode", "codewords to strings");
  for (auto* sub : {encode, decode}) {
    add_common(sub, o);
    sub->add_option("--alphabet", o.alphabet, "symbols, one UTF-8 character each");
    sub->add_option("--input", o.input, "input file (default stdin)");
  }
  encode->add_option("--mode", o.mode, "known | universal");
  encode->add_option("--m", o.m, "alphabet size when --alphabet is omitted");
  encode->add_flag("--audit", o.audit, "append code length and empirical bits per string");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }

  try {
    const RunConfig c = build_config(o);
    if (ladder->parsed()) return cmd_ladder(c, out, err);
    if (limits->parsed()) return cmd_limits(c, out, err);
    if (constants->parsed()) return cmd_constants(c, out, err);
    if (census->parsed()) return cmd_census(c, out, err);
    if (encode->parsed()) return cmd_encode(c, in, out);
    if (decode->parsed()) return cmd_decode(c, in, out);
    throw InvariantViolation("no subcommand dispatched");
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const ResourceLimit& e) {
    err << "resource limit: " << e.what() << "\n";
    return kResourceCap;
  } catch (const InvariantViolation& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace prate::cli

#endif  // PRATE_TOOLS_CLI_APP_HPP
