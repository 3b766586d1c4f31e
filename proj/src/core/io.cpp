#include "freeconv/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "freeconv/error.hpp"

namespace freeconv::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text = trim(text.substr(1));
  bool negative = false;
  if (!text.empty() && text.front() == '-' && text.size() > 1 && std::isspace(static_cast<unsigned char>(text[1]))) {
    negative = true;
    text = trim(text.substr(1));
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    fail(ErrorCode::parse_error, "not a number: '" + std::string(text) + "'");
  }
  return negative ? -value : value;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double number_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    fail(ErrorCode::parse_error, std::string("measure JSON needs numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

Json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_double(*d);
  }
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

const char* status_name(PointStatus s) {
  switch (s) {
    case PointStatus::ok: return "ok";
    case PointStatus::edge: return "edge";
    case PointStatus::error: return "error";
  }
  return "error";
}

}  // namespace

Json measure_to_json(const Measure& mu) {
  Json j = Json::object();
  if (mu.is_semicircle()) {
    j["type"] = "semicircle";
    j["center"] = mu.semicircle().center;
    j["variance"] = mu.semicircle().variance;
    return j;
  }
  if (const auto& named = mu.named()) {
    j["type"] = named->type;
    if (named->type == "bernoulli") {
      j["xi"] = named->params.at(0);
      return j;
    }
    if (named->type == "two_point") {
      j["zeta"] = named->params.at(0);
      j["theta"] = named->params.at(1);
      return j;
    }
    if (named->type == "point_mass") {
      j["location"] = named->params.at(0);
      return j;
    }
  }
  j["type"] = "atomic";
  Json atoms = Json::array();
  for (const auto& a : mu.atomic().atoms()) atoms.push_back(Json::array({a.location, a.weight}));
  j["atoms"] = std::move(atoms);
  return j;
}

Measure measure_from_json(const Json& j) {
  try {
    if (j.is_array()) {
      // Bare list of [x, w] pairs.
      return measure_from_json(Json{{"type", "atomic"}, {"atoms", j}});
    }
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
      fail(ErrorCode::parse_error, "measure JSON needs a string field 'type'");
    }
    const auto type = j.at("type").get<std::string>();
    if (type == "semicircle") return semicircle(number_field(j, "center"), number_field(j, "variance"));
    if (type == "bernoulli") return bernoulli(number_field(j, "xi"));
    if (type == "two_point") return two_point(number_field(j, "zeta"), number_field(j, "theta"));
    if (type == "point_mass") return point_mass(number_field(j, "location"));
    if (type == "atomic") {
      if (!j.contains("atoms") || !j.at("atoms").is_array()) {
        fail(ErrorCode::parse_error, "atomic measure JSON needs an 'atoms' array");
      }
      std::vector<Atom> atoms;
      for (const auto& pair : j.at("atoms")) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
          fail(ErrorCode::parse_error, "each atom must be a [location, weight] pair");
        }
        atoms.push_back({pair[0].get<double>(), pair[1].get<double>()});
      }
      return Measure(AtomicMeasure(std::move(atoms)));
    }
    fail(ErrorCode::parse_error, "unknown measure type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, e.what());
  }
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_double(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Measure parse_measure_spec(std::string_view spec) {
  spec = trim(spec);
  if (!spec.empty() && spec.front() == '@') {
    const std::string path(spec.substr(1));
    try {
      return measure_from_json(Json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::parse_error, path + ": " + e.what());
    }
  }
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    fail(ErrorCode::parse_error, "measure spec '" + std::string(spec) + "' is missing ':'");
  }
  const auto kind = trim(spec.substr(0, colon));
  const auto rest = trim(spec.substr(colon + 1));
  if (kind == "atomic" && !rest.empty() && rest.front() == '@') return parse_measure_spec(rest);
  const auto params = parse_list(rest);
  try {
    return make_measure(kind, params);
  } catch (const Error& e) {
    if (std::string_view(e.what()).starts_with("unknown measure kind")) fail(ErrorCode::parse_error, e.what());
    throw;
  }
}

Complex parse_complex(std::string_view text) {
  text = trim(text);
  if (text.empty()) fail(ErrorCode::parse_error, "empty complex number");
  if (text.back() != 'i' && text.back() != 'j') return {parse_double(text), 0.0};
  text.remove_suffix(1);
  std::size_t split = std::string_view::npos;
  for (std::size_t k = text.size(); k-- > 1;) {
    const char c = text[k];
    if ((c == '+' || c == '-') && text[k - 1] != 'e' && text[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  const auto re_text = split == std::string_view::npos ? std::string_view{} : text.substr(0, split);
  auto im_text = split == std::string_view::npos ? text : text.substr(split);
  double im = 0.0;
  if (im_text == "+" || im_text.empty()) {
    im = 1.0;
  } else if (im_text == "-") {
    im = -1.0;
  } else {
    im = parse_double(im_text);
  }
  return {re_text.empty() ? 0.0 : parse_double(re_text), im};
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) fail(ErrorCode::invalid_parameter, "table row has the wrong width");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += cell_text(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string Table::to_json() const {
  Json j = Json::object();
  j["columns"] = columns;
  Json body = Json::array();
  for (const auto& row : rows) {
    Json r = Json::array();
    for (const auto& c : row) r.push_back(cell_json(c));
    body.push_back(std::move(r));
  }
  j["rows"] = std::move(body);
  j["meta"] = meta;
  return j.dump(1) + "\n";
}

Table density_table(const DensityGrid& grid) {
  Table t({"x", "f", "eta", "residual", "status"});
  for (const auto& p : grid.points) t.add({p.x, p.f, p.eta, p.residual, std::string(status_name(p.status))});
  t.meta["eta_used"] = grid.eta_used;
  t.meta["residual_max"] = grid.residual_max;
  return t;
}

Table bulk_table(const BulkIntervals& bulk) {
  Table t({"lo", "hi"});
  for (const auto& iv : bulk.intervals) t.add({iv.lo, iv.hi});
  t.meta["threshold"] = bulk.threshold;
  return t;
}

Table atoms_table(const AtomList& atoms) {
  Table t({"location", "mass"});
  for (const auto& a : atoms) t.add({a.location, a.mass});
  return t;
}

Table stability_table(const StabilityReport& report) {
  Table t({"E", "eta", "omega1_re", "omega1_im", "omega2_re", "omega2_im", "gamma", "residual"});
  for (const auto& e : report.entries) {
    t.add({e.E, e.eta, e.omega1.real(), e.omega1.imag(), e.omega2.real(), e.omega2.imag(), e.gamma, e.residual});
  }
  t.meta["min_im_omega"] = report.min_im_omega;
  t.meta["max_gamma"] = report.max_gamma;
  t.meta["gamma_finite"] = report.gamma_finite;
  Json bulk = Json::array();
  for (const auto& iv : report.bulk.intervals) bulk.push_back(Json::array({iv.lo, iv.hi}));
  t.meta["bulk"] = std::move(bulk);
  return t;
}

Table local_law_table(const rmt::LocalLawReport& report) {
  Table t({"E", "eta", "n", "median_err", "max_err", "envelope", "fluct_std"});
  for (const auto& r : report.rows) {
    t.add({r.E, r.eta, static_cast<long long>(r.n), r.median_err, r.max_err, r.envelope, r.fluct_std});
  }
  t.meta["shift"] = report.shift;
  return t;
}

Table counting_table(const rmt::CountingReport& report) {
  Table t({"trial", "E1", "E2", "n", "count", "empirical_mass", "reference_mass", "abs_error", "envelope"});
  for (std::size_t k = 0; k < report.counts.size(); ++k) {
    t.add({static_cast<long long>(k), report.E1, report.E2, static_cast<long long>(report.n),
           static_cast<long long>(report.counts[k]), static_cast<double>(report.counts[k]) / report.n,
           report.reference_mass, report.errors[k], report.envelope});
  }
  return t;
}

Table concentration_table(const std::vector<rmt::ConcentrationRow>& rows) {
  Table t({"E", "eta", "mean_re", "mean_im", "std", "envelope", "ratio"});
  for (const auto& r : rows) t.add({r.z.real(), r.z.imag(), r.mean.real(), r.mean.imag(), r.std, r.envelope, r.ratio});
  return t;
}

Table subordination_table(const std::vector<rmt::ApproxSubordinationRow>& rows) {
  Table t({"E", "eta", "omega_a_c_re", "omega_a_c_im", "omega_b_c_re", "omega_b_c_im", "omega_a_re", "omega_a_im",
           "omega_b_re", "omega_b_im", "distance", "std_error_a", "std_error_b", "sum_identity_residual"});
  for (const auto& r : rows) {
    t.add({r.z.real(), r.z.imag(), r.omega_a_c.real(), r.omega_a_c.imag(), r.omega_b_c.real(), r.omega_b_c.imag(),
           r.omega_a.real(), r.omega_a.imag(), r.omega_b.real(), r.omega_b.imag(), r.distance, r.std_error_a,
           r.std_error_b, r.sum_identity_residual});
  }
  return t;
}

Table eigenvalue_table(const std::vector<rmt::TrialResult>& trials) {
  Table t({"trial", "index", "lambda"});
  for (std::size_t k = 0; k < trials.size(); ++k) {
    const auto& ev = trials[k].eigenvalues;
    for (std::size_t i = 0; i < ev.size(); ++i) {
      t.add({static_cast<long long>(k), static_cast<long long>(i), ev[i]});
    }
  }
  return t;
}

}  // namespace freeconv::io
