#pragma once

// Text formats: the inline measure mini-language, measure JSON, complex
// literals, and the tabular reports written as CSV or JSON.

#include <json.hpp>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "freeconv/convolution.hpp"
#include "freeconv/measures.hpp"
#include "freeconv/rmt.hpp"

namespace freeconv::io {

using Json = nlohmann::ordered_json;

/// Measure JSON:
///   {"type":"atomic","atoms":[[x,w],...]}
///   {"type":"semicircle","center":c,"variance":v}
///   {"type":"bernoulli","xi":p}
///   {"type":"two_point","zeta":p,"theta":t}
///   {"type":"point_mass","location":a}
/// Doubles are written with round-trip precision, so parse(dump(mu)) == mu bit for bit.
Json measure_to_json(const Measure& mu);
Measure measure_from_json(const Json& j);

/// bernoulli:XI | pointmass:A | point_mass:A | semicircle:C,V | two_point:ZETA,THETA |
/// atomic:X1,W1,X2,W2,... | empirical:V1,V2,... | atomic:@FILE.json | @FILE.json
Measure parse_measure_spec(std::string_view spec);

/// "1+1e-9i", "0+1i", "-2.5", "3i", "1-0.5i".
Complex parse_complex(std::string_view text);
std::vector<double> parse_list(std::string_view text);

/// %.17g; "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double x);

using Cell = std::variant<double, long long, std::string>;

struct Table {
  Table() = default;
  explicit Table(std::vector<std::string> cols) : columns(std::move(cols)) {}

  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  Json meta = Json::object();

  void add(std::vector<Cell> row);
  std::string to_csv() const;
  /// {"columns":[...],"rows":[[...],...],"meta":{...}}
  std::string to_json() const;
};

Table density_table(const DensityGrid& grid);
Table bulk_table(const BulkIntervals& bulk);
Table atoms_table(const AtomList& atoms);
Table stability_table(const StabilityReport& report);
Table local_law_table(const rmt::LocalLawReport& report);
Table counting_table(const rmt::CountingReport& report);
Table concentration_table(const std::vector<rmt::ConcentrationRow>& rows);
Table subordination_table(const std::vector<rmt::ApproxSubordinationRow>& rows);
Table eigenvalue_table(const std::vector<rmt::TrialResult>& trials);

}  // namespace freeconv::io
