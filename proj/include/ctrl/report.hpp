#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctrl/interval_domain.hpp"
#include "ctrl/newsome.hpp"
#include "ctrl/sns.hpp"

namespace ctrl {

using Json = nlohmann::ordered_json;

// Values up to 2^64-1 travel as decimal strings to keep consumers exact.
Json domain_to_json(const ControlDomain& d);
ControlDomain domain_from_json(const Json& j);

Json density_intervals_to_json(const std::vector<DensityInterval>& intervals);

std::string tri_name(Tri t);

// FNV-1a over the raw bytes; used for input provenance.
std::uint64_t fnv1a64(const std::string& data);

// One CSV row per interval: target, lo, hi, guarantee, density.
struct PlotRow {
  std::string target;
  Word lo, hi;
  Guarantee guarantee;
  double density;
};
std::string emit_plot_csv(const std::vector<PlotRow>& rows);
std::vector<PlotRow> plot_rows_from_domain(const std::string& target_name,
                                           const ControlDomain& d);

std::string current_timestamp();

}  // namespace ctrl
