#include "ctrl/interval_domain.hpp"

#include <algorithm>
#include <map>

namespace ctrl {

ControlDomain ControlDomain::from_values(unsigned width,
                                         const std::vector<Word>& values) {
  ControlDomain d;
  d.width = width;
  d.exact = true;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j + 1 < values.size() && values[j + 1] == values[j] + 1) ++j;
    d.intervals.push_back({values[i], values[j], Guarantee::Strong});
    i = j + 1;
  }
  return d;
}

bool ControlDomain::all_strong() const {
  for (const auto& iv : intervals)
    if (iv.guarantee != Guarantee::Strong) return false;
  return true;
}

bool ControlDomain::contains(Word v) const {
  if (fixed_bits && !fixed_bits->matches(v)) return false;
  for (const auto& iv : intervals)
    if (v >= iv.lo && v <= iv.hi) return true;
  return false;
}

bool ControlDomain::is_full() const {
  if (fixed_bits && fixed_bits->mask != 0) return false;
  return intervals.size() == 1 && intervals[0].lo == 0 &&
         intervals[0].hi == mask_of(width);
}

BigCount ControlDomain::count() const {
  BigCount total = 0;
  for (const auto& iv : intervals) {
    if (fixed_bits)
      total += count_matching(iv.lo, iv.hi, *fixed_bits, width);
    else
      total += interval_count(iv.lo, iv.hi);
  }
  return total;
}

BigCount ControlDomain::count_strong() const {
  BigCount total = 0;
  for (const auto& iv : intervals) {
    if (iv.guarantee != Guarantee::Strong) continue;
    if (fixed_bits)
      total += count_matching(iv.lo, iv.hi, *fixed_bits, width);
    else
      total += interval_count(iv.lo, iv.hi);
  }
  return total;
}

std::vector<Word> ControlDomain::expand(std::size_t limit) const {
  if (count() > static_cast<BigCount>(limit))
    throw BudgetError("domain too large to expand");
  std::vector<Word> out;
  out.reserve(static_cast<std::size_t>(count()));
  const FixedBits fb = fixed_bits ? *fixed_bits : FixedBits{0, 0};
  for (const auto& iv : intervals) {
    auto cur = next_matching(iv.lo, fb, width);
    while (cur && *cur <= iv.hi) {
      out.push_back(*cur);
      if (*cur == mask_of(width)) break;
      cur = next_matching(*cur + 1, fb, width);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void ControlDomain::normalize() {
  std::sort(intervals.begin(), intervals.end(),
            [](const ControlInterval& a, const ControlInterval& b) {
              return a.lo < b.lo;
            });
  std::vector<ControlInterval> out;
  for (const auto& iv : intervals) {
    bool joins = false;
    if (!out.empty() && out.back().guarantee == iv.guarantee) {
      const Word prev_hi = out.back().hi;
      joins = iv.lo <= prev_hi ||
              (prev_hi != mask_of(width) && iv.lo == prev_hi + 1);
    }
    if (joins)
      out.back().hi = std::max(out.back().hi, iv.hi);
    else
      out.push_back(iv);
  }
  intervals = std::move(out);
}

std::vector<std::pair<Word, Word>> domain_runs(const ControlDomain& d,
                                               std::size_t limit) {
  std::vector<std::pair<Word, Word>> runs;
  if (!d.fixed_bits || d.fixed_bits->mask == 0) {
    for (const auto& iv : d.intervals) runs.emplace_back(iv.lo, iv.hi);
    return runs;
  }
  const FixedBits fb = *d.fixed_bits;
  // Maximal runs of consecutive matching values: the pattern leaves the
  // low bits below the least fixed position free.
  const Word low_free =
      fb.mask == 0 ? mask_of(d.width)
                   : ((fb.mask & -fb.mask) - 1) & mask_of(d.width);
  for (const auto& iv : d.intervals) {
    auto cur = next_matching(iv.lo, fb, d.width);
    while (cur && *cur <= iv.hi) {
      const Word run_end = std::min<Word>(*cur | low_free, iv.hi);
      runs.emplace_back(*cur, run_end);
      if (runs.size() > limit) throw BudgetError("domain has too many runs");
      if (run_end == mask_of(d.width)) break;
      cur = next_matching(run_end + 1, fb, d.width);
    }
  }
  return runs;
}

namespace {

struct Edge {
  Word at;
  bool open;
  bool strong;
};

}  // namespace

ControlDomain merge_domains(const ControlDomain& a, const ControlDomain& b) {
  if (a.width != b.width) throw WidthError("merge: width mismatch");

  ControlDomain out;
  out.width = a.width;
  out.splits_used = a.splits_used + b.splits_used;
  out.budget_exhausted = a.budget_exhausted || b.budget_exhausted;

  const bool same_pattern =
      a.fixed_bits.has_value() == b.fixed_bits.has_value() &&
      (!a.fixed_bits || *a.fixed_bits == *b.fixed_bits);

  // Collect guarantee-tagged runs from both sides. When the patterns agree
  // they are kept symbolic; otherwise each side is dissolved into runs.
  std::vector<std::pair<std::pair<Word, Word>, bool>> pieces;
  auto push_side = [&](const ControlDomain& d, bool keep_pattern) {
    if (keep_pattern) {
      for (const auto& iv : d.intervals)
        pieces.push_back({{iv.lo, iv.hi}, iv.guarantee == Guarantee::Strong});
      return;
    }
    // Tag each dissolved run with its interval's guarantee.
    ControlDomain strong_only = d, weak_only = d;
    strong_only.intervals.clear();
    weak_only.intervals.clear();
    for (const auto& iv : d.intervals)
      (iv.guarantee == Guarantee::Strong ? strong_only : weak_only)
          .intervals.push_back(iv);
    for (const auto& run : domain_runs(strong_only))
      pieces.push_back({run, true});
    for (const auto& run : domain_runs(weak_only))
      pieces.push_back({run, false});
  };
  push_side(a, same_pattern);
  push_side(b, same_pattern);
  if (same_pattern) out.fixed_bits = a.fixed_bits;

  // Sweep boundaries; a covered point is Strong when any covering piece is.
  std::vector<Word> bounds;
  for (const auto& [run, strong] : pieces) {
    bounds.push_back(run.first);
    if (run.second != mask_of(out.width)) bounds.push_back(run.second + 1);
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const Word seg_lo = bounds[i];
    const Word seg_hi =
        i + 1 < bounds.size() ? bounds[i + 1] - 1 : mask_of(out.width);
    bool covered = false, strong = false;
    for (const auto& [run, s] : pieces) {
      if (run.first <= seg_lo && seg_hi <= run.second) {
        covered = true;
        strong = strong || s;
      }
    }
    if (covered)
      out.intervals.push_back(
          {seg_lo, seg_hi, strong ? Guarantee::Strong : Guarantee::Weak});
  }
  out.normalize();
  out.exact = a.exact && b.exact && out.all_strong() && !out.budget_exhausted;
  return out;
}

ControlDomain shift_domain(const ControlDomain& d, std::int64_t offset) {
  if (offset == 0) return d;
  ControlDomain out;
  out.width = d.width;
  out.splits_used = d.splits_used;
  out.budget_exhausted = d.budget_exhausted;
  const Word wm = mask_of(d.width);
  const Word delta = static_cast<Word>(offset) & wm;

  std::vector<std::pair<std::pair<Word, Word>, bool>> runs;
  for (const auto& iv : d.intervals) {
    ControlDomain one;
    one.width = d.width;
    one.fixed_bits = d.fixed_bits;
    one.intervals = {iv};
    for (const auto& run : domain_runs(one))
      runs.push_back({run, iv.guarantee == Guarantee::Strong});
  }
  for (const auto& [run, strong] : runs) {
    const Word lo = (run.first + delta) & wm;
    const Word hi = (run.second + delta) & wm;
    const Guarantee g = strong ? Guarantee::Strong : Guarantee::Weak;
    if (lo <= hi) {
      out.intervals.push_back({lo, hi, g});
    } else {
      out.intervals.push_back({lo, wm, g});
      out.intervals.push_back({0, hi, g});
    }
  }
  out.normalize();
  out.exact = d.exact;
  return out;
}

namespace {

std::vector<std::pair<Word, Word>> coalesce_runs(
    std::vector<std::pair<Word, Word>> runs, unsigned width) {
  std::sort(runs.begin(), runs.end());
  std::vector<std::pair<Word, Word>> out;
  for (const auto& r : runs) {
    bool joins = false;
    if (!out.empty()) {
      const Word prev_hi = out.back().second;
      joins = r.first <= prev_hi ||
              (prev_hi != mask_of(width) && r.first == prev_hi + 1);
    }
    if (joins)
      out.back().second = std::max(out.back().second, r.second);
    else
      out.push_back(r);
  }
  return out;
}

}  // namespace

bool domain_subset(const ControlDomain& a, const ControlDomain& b) {
  if (a.width != b.width) throw WidthError("subset: width mismatch");
  auto ra = domain_runs(a);
  std::sort(ra.begin(), ra.end());
  const auto rb = coalesce_runs(domain_runs(b), b.width);
  std::size_t j = 0;
  for (const auto& [lo, hi] : ra) {
    while (j < rb.size() && rb[j].second < lo) ++j;
    if (j >= rb.size() || rb[j].first > lo || hi > rb[j].second) return false;
  }
  return true;
}

}  // namespace ctrl
