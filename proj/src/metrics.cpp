#include "ctrl/metrics.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace ctrl {

namespace {

constexpr long double kLn2 = 0.6931471805599453094L;

long double pow2l(unsigned bits) { return std::pow(2.0L, bits); }

bool parse_word_string(const std::string& s, Word& out) {
  if (s.empty()) return false;
  Word v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    Word nv = v * 10 + static_cast<Word>(c - '0');
    if (nv < v) return false;
    v = nv;
  }
  out = v;
  return true;
}

}  // namespace

long double WeightFn::mass(long double n) const {
  if (n < support_lo) return 0.0L;
  return antiderivative(n + 1.0L) - antiderivative(n);
}

long double WeightFn::range_mass(long double lo, long double hi) const {
  if (hi < support_lo) return 0.0L;
  lo = std::max(lo, support_lo);
  if (lo > hi) return 0.0L;
  return antiderivative(hi + 1.0L) - antiderivative(lo);
}

long double WeightFn::total_mass(unsigned width) const {
  return range_mass(0.0L, pow2l(width) - 1.0L);
}

WeightFn weight_log() {
  WeightFn w;
  w.name = "log";
  w.support_lo = 1;
  w.omega = [](long double x) { return 1.0L / (kLn2 * x); };
  w.antiderivative = [](long double x) { return std::log(x) / kLn2; };
  return w;
}

WeightFn weight_inverse_square() {
  WeightFn w;
  w.name = "invsq";
  w.support_lo = 1;
  w.omega = [](long double x) { return 1.0L / (x * x); };
  w.antiderivative = [](long double x) { return -1.0L / x; };
  return w;
}

WeightFn weight_inverse_sqrt() {
  WeightFn w;
  w.name = "invsqrt";
  w.support_lo = 1;
  w.omega = [](long double x) { return 1.0L / std::sqrt(x); };
  w.antiderivative = [](long double x) { return 2.0L * std::sqrt(x); };
  return w;
}

WeightFn weight_uniform() {
  WeightFn w;
  w.name = "uniform";
  w.support_lo = 0;
  w.omega = [](long double) { return 1.0L; };
  w.antiderivative = [](long double x) { return x; };
  return w;
}

WeightFn weight_cfh_valid() {
  WeightFn w;
  w.name = "cfh-valid";
  w.support_lo = 0;
  const long double limit = pow2l(48);
  w.omega = [limit](long double x) { return x < limit ? 1.0L : 0.0L; };
  w.antiderivative = [limit](long double x) { return std::min(x, limit); };
  return w;
}

WeightFn weight_distance(const WeightFn& base, Word bound) {
  WeightFn w;
  w.name = "dist:" + base.name + ":" + std::to_string(bound);
  w.support_lo = 0;
  const long double b = static_cast<long double>(bound);
  const long double s = base.support_lo;
  auto base_omega = base.omega;
  auto base_f = base.antiderivative;
  w.omega = [b, s, base_omega](long double x) {
    const long double d = std::fabs(x - b);
    return d >= s ? base_omega(d) : 0.0L;
  };
  // Integral of omega(|t - b|) from 0 to x, skipping |t - b| < s.
  w.antiderivative = [b, s, base_f](long double x) {
    long double total = 0.0L;
    const long double left_end = b - s;  // descending side ends here
    if (left_end > 0) {
      const long double u = std::min(x, left_end);
      if (u > 0) total += base_f(b) - base_f(b - u);
    }
    const long double right_start = b + s;
    if (x > right_start) total += base_f(x - b) - base_f(s > 0 ? s : 0.0L);
    return total;
  };
  return w;
}

const std::vector<WeightFn>& builtin_weights() {
  static const std::vector<WeightFn> all = {
      weight_log(), weight_inverse_square(), weight_inverse_sqrt(),
      weight_uniform(), weight_cfh_valid()};
  return all;
}

std::optional<WeightFn> find_weight(const std::string& name) {
  for (const auto& w : builtin_weights())
    if (w.name == name) return w;
  if (name.rfind("dist:", 0) == 0) {
    const std::string rest = name.substr(5);
    auto colon = rest.rfind(':');
    if (colon == std::string::npos) return std::nullopt;
    auto base = find_weight(rest.substr(0, colon));
    Word bound = 0;
    if (!base || !parse_word_string(rest.substr(colon + 1), bound))
      return std::nullopt;
    return weight_distance(*base, bound);
  }
  return std::nullopt;
}

WeightFn load_weight_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open weight file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ParseError(std::string("weight file: ") + e.what(), 0, 0);
  }
  if (!doc.contains("segments") || !doc["segments"].is_array() ||
      doc["segments"].empty())
    throw ParseError("weight file needs a non-empty segments array", 0, 0);

  struct Segment {
    Word from, to;
    WeightFn base;
  };
  std::vector<Segment> segments;
  for (const auto& seg : doc["segments"]) {
    Word from = 0, to = 0;
    if (!seg.contains("from") || !seg.contains("to") || !seg.contains("weight"))
      throw ParseError("segment needs from/to/weight", 0, 0);
    if (!parse_word_string(seg["from"].get<std::string>(), from) ||
        !parse_word_string(seg["to"].get<std::string>(), to) || from > to)
      throw ParseError("malformed segment range", 0, 0);
    auto base = find_weight(seg["weight"].get<std::string>());
    if (!base)
      throw ParseError("unknown base weight: " +
                           seg["weight"].get<std::string>(),
                       0, 0);
    segments.push_back({from, to, *base});
  }

  WeightFn w;
  w.name = doc.value("name", std::string("piecewise"));
  w.support_lo = 0;
  w.omega = [segments](long double x) {
    for (const auto& seg : segments) {
      if (x >= static_cast<long double>(seg.from) &&
          x <= static_cast<long double>(seg.to) && x >= seg.base.support_lo)
        return seg.base.omega(x);
    }
    return 0.0L;
  };
  w.antiderivative = [segments](long double x) {
    long double total = 0.0L;
    for (const auto& seg : segments) {
      const long double lo =
          std::max(static_cast<long double>(seg.from), seg.base.support_lo);
      const long double hi_open = static_cast<long double>(seg.to) + 1.0L;
      const long double u = std::min(x, hi_open);
      if (u > lo) total += seg.base.antiderivative(u) -
                           seg.base.antiderivative(lo);
    }
    return total;
  };
  return w;
}

double qc(const ControlDomain& d) {
  const BigCount count = d.count();
  if (count == 0) return 0.0;
  const long double bits = std::log2(static_cast<long double>(count));
  return static_cast<double>(bits / d.width);
}

double qc_bits(const ControlDomain& d) {
  const BigCount count = d.count();
  if (count == 0) return 0.0;
  return static_cast<double>(std::log2(static_cast<long double>(count)));
}

double wqc_exact(const ControlDomain& d, const WeightFn& w) {
  const long double denom = w.total_mass(d.width);
  if (denom <= 0.0L) throw Error("weight has no mass on this domain");
  if (d.intervals.empty()) return 0.0;

  long double num = 0.0L;
  if (!d.fixed_bits || d.fixed_bits->mask == 0) {
    for (const auto& iv : d.intervals)
      num += w.range_mass(static_cast<long double>(iv.lo),
                          static_cast<long double>(iv.hi));
  } else {
    for (Word v : d.expand())
      num += w.mass(static_cast<long double>(v));
  }
  return static_cast<double>(num / denom);
}

double wqc_interval(const ControlDomain& d, const WeightFn& w) {
  const long double denom = w.total_mass(d.width);
  if (denom <= 0.0L) throw Error("weight has no mass on this domain");
  long double num = 0.0L;
  for (const auto& iv : d.intervals)
    num += w.range_mass(static_cast<long double>(iv.lo),
                        static_cast<long double>(iv.hi));
  return static_cast<double>(num / denom);
}

DensityInfo density_from_fixed_bits(const ControlDomain& d) {
  DensityInfo info;
  for (const auto& iv : d.intervals) {
    if (d.fixed_bits)
      info.rho.push_back(count_matching(iv.lo, iv.hi, *d.fixed_bits, d.width));
    else
      info.rho.push_back(interval_count(iv.lo, iv.hi));
  }
  return info;
}

double wqc_constrained(const ControlDomain& d, const WeightFn& w,
                       const DensityInfo& density) {
  if (density.rho.size() != d.intervals.size())
    throw Error("density entries must match the intervals");
  const long double denom = w.total_mass(d.width);
  if (denom <= 0.0L) throw Error("weight has no mass on this domain");

  long double num = 0.0L;
  for (std::size_t i = 0; i < d.intervals.size(); ++i) {
    const auto& iv = d.intervals[i];
    const BigCount rho = density.rho[i];
    if (rho > interval_count(iv.lo, iv.hi))
      throw Error("density exceeds the interval size");
    const long double integral =
        w.range_mass(static_cast<long double>(iv.lo),
                     static_cast<long double>(iv.hi));
    long double factor;
    if (iv.hi == iv.lo) {
      factor = rho == 0 ? 0.0L : 1.0L;  // singleton: the point either counts or not
    } else {
      factor = static_cast<long double>(rho) /
               static_cast<long double>(iv.hi - iv.lo);
    }
    num += factor * integral;
  }
  return static_cast<double>(num / denom);
}

double wqc_auto(const ControlDomain& d, const WeightFn& w) {
  if (d.fixed_bits && d.fixed_bits->mask != 0)
    return wqc_constrained(d, w, density_from_fixed_bits(d));
  return wqc_interval(d, w);
}

BigCount count_fixed_bits(Word lo, Word hi, Word mask, Word bits,
                          unsigned width) {
  return count_matching(lo, hi, FixedBits{mask, bits}, width);
}

double score_oob(const std::optional<ControlDomain>& offset_domain,
                 const std::optional<ControlDomain>& size_domain,
                 unsigned width, const WeightFn& w) {
  if (!offset_domain && !size_domain)
    throw Error("out-of-bounds score needs an offset or a size domain");
  double total = 0.0;
  if (offset_domain) total += wqc_auto(*offset_domain, w);
  if (size_domain) total += wqc_auto(*size_domain, w);
  return total * width;
}

double score_cfh(const ControlDomain& pointer_domain) {
  if (pointer_domain.width != 64)
    throw WidthError("pointer scoring expects 64-bit domains");
  const Word valid_hi = (Word{1} << 48) - 1;
  BigCount valid = 0;
  for (const auto& iv : pointer_domain.intervals) {
    if (iv.lo > valid_hi) continue;
    const Word hi = std::min(iv.hi, valid_hi);
    if (pointer_domain.fixed_bits)
      valid += count_matching(iv.lo, hi, *pointer_domain.fixed_bits, 64);
    else
      valid += interval_count(iv.lo, hi);
  }
  const long double denom = std::pow(2.0L, 48);
  return static_cast<double>(static_cast<long double>(valid) / denom);
}

double score_data(const std::vector<ControlDomain>& byte_domains) {
  if (byte_domains.empty()) throw Error("data score needs at least one byte domain");
  if (byte_domains.size() > 8) throw Error("data score takes at most 8 bytes");
  double sum = 0.0;
  for (const auto& d : byte_domains) {
    if (d.width != 8) throw WidthError("data score expects 8-bit domains");
    sum += qc(d);
  }
  return sum / static_cast<double>(byte_domains.size());
}

BandCutoffs default_cutoffs(const std::string& recipe) {
  if (recipe == "oob-write" || recipe == "oob-read") return {1.0, 10.0};
  return {0.01, 0.1};  // cfh, data
}

std::string band_label(double score, const BandCutoffs& cutoffs) {
  if (score < cutoffs.medium_at) return "low";
  if (score < cutoffs.high_at) return "medium";
  return "high";
}

}  // namespace ctrl
