#include "ctrl/report.hpp"

#include <algorithm>
#include <ctime>
#include <sstream>

namespace ctrl {

namespace {

std::string word_str(Word v) { return std::to_string(v); }

Word word_from_str(const std::string& s) {
  if (s.empty()) throw ParseError("empty numeric string", 0, 0);
  Word v = 0;
  for (char c : s) {
    if (c < '0' || c > '9')
      throw ParseError("malformed numeric string: " + s, 0, 0);
    Word nv = v * 10 + static_cast<Word>(c - '0');
    if (nv < v) throw ParseError("numeric string overflow: " + s, 0, 0);
    v = nv;
  }
  return v;
}

}  // namespace

Json domain_to_json(const ControlDomain& d) {
  Json j;
  j["width"] = d.width;
  j["exact"] = d.exact;
  j["budget_exhausted"] = d.budget_exhausted;
  j["splits_used"] = d.splits_used;
  if (d.fixed_bits) {
    j["fixed_bits"] = {{"mask", word_str(d.fixed_bits->mask)},
                       {"bits", word_str(d.fixed_bits->bits)}};
  } else {
    j["fixed_bits"] = nullptr;
  }
  j["count"] = big_to_string(d.count());
  Json intervals = Json::array();
  for (const auto& iv : d.intervals) {
    Json e;
    e["lo"] = word_str(iv.lo);
    e["hi"] = word_str(iv.hi);
    e["guarantee"] = iv.guarantee == Guarantee::Strong ? "strong" : "weak";
    intervals.push_back(e);
  }
  j["intervals"] = intervals;
  return j;
}

ControlDomain domain_from_json(const Json& j) {
  ControlDomain d;
  d.width = j.at("width").get<unsigned>();
  if (d.width == 0 || d.width > kMaxWidth)
    throw ParseError("domain width out of range", 0, 0);
  d.exact = j.at("exact").get<bool>();
  d.budget_exhausted = j.value("budget_exhausted", false);
  d.splits_used = j.value("splits_used", 0u);
  if (j.contains("fixed_bits") && !j.at("fixed_bits").is_null()) {
    FixedBits fb;
    fb.mask = word_from_str(j.at("fixed_bits").at("mask").get<std::string>());
    fb.bits = word_from_str(j.at("fixed_bits").at("bits").get<std::string>());
    if ((fb.bits & ~fb.mask) != 0)
      throw ParseError("fixed bits fall outside the mask", 0, 0);
    d.fixed_bits = fb;
  }
  for (const auto& e : j.at("intervals")) {
    ControlInterval iv;
    iv.lo = word_from_str(e.at("lo").get<std::string>());
    iv.hi = word_from_str(e.at("hi").get<std::string>());
    if (iv.lo > iv.hi || iv.hi > mask_of(d.width))
      throw ParseError("interval out of range", 0, 0);
    const std::string g = e.at("guarantee").get<std::string>();
    if (g != "strong" && g != "weak")
      throw ParseError("unknown guarantee: " + g, 0, 0);
    iv.guarantee = g == "strong" ? Guarantee::Strong : Guarantee::Weak;
    d.intervals.push_back(iv);
  }
  std::vector<ControlInterval> sorted = d.intervals;
  std::sort(sorted.begin(), sorted.end(),
            [](const ControlInterval& a, const ControlInterval& b) {
              return a.lo < b.lo;
            });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].lo <= sorted[i - 1].hi)
      throw ParseError("overlapping intervals", 0, 0);
  return d;
}

Json density_intervals_to_json(const std::vector<DensityInterval>& intervals) {
  Json arr = Json::array();
  for (const auto& di : intervals) {
    Json e;
    e["lo"] = word_str(di.lo);
    e["hi"] = word_str(di.hi);
    e["samples"] = di.samples;
    e["hits"] = di.hits;
    e["density"] = di.density;
    e["ci"] = {di.ci_lo, di.ci_hi};
    e["had_unknown"] = di.had_unknown;
    arr.push_back(e);
  }
  return arr;
}

std::string tri_name(Tri t) {
  switch (t) {
    case Tri::True: return "true";
    case Tri::False: return "false";
    default: return "unknown";
  }
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string emit_plot_csv(const std::vector<PlotRow>& rows) {
  std::ostringstream os;
  os << "target,lo,hi,guarantee,density\n";
  for (const auto& r : rows) {
    os << r.target << "," << r.lo << "," << r.hi << ","
       << (r.guarantee == Guarantee::Strong ? "strong" : "weak") << ",";
    std::ostringstream d;
    d << r.density;
    os << d.str() << "\n";
  }
  return os.str();
}

std::vector<PlotRow> plot_rows_from_domain(const std::string& target_name,
                                           const ControlDomain& d) {
  std::vector<PlotRow> rows;
  for (const auto& iv : d.intervals) {
    double density = 1.0;
    if (d.fixed_bits && d.fixed_bits->mask != 0) {
      const BigCount matching =
          count_matching(iv.lo, iv.hi, *d.fixed_bits, d.width);
      density = static_cast<double>(static_cast<long double>(matching) /
                                    static_cast<long double>(
                                        interval_count(iv.lo, iv.hi)));
    }
    rows.push_back({target_name, iv.lo, iv.hi, iv.guarantee, density});
  }
  return rows;
}

std::string current_timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

}  // namespace ctrl
