#include "vilenkin/wavelet_verifier.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

namespace vilenkin {

WaveletFamily::WaveletFamily(int p, std::vector<NamedSet> sets) : p_(p), sets_(std::move(sets)) {
  check_base(p);
  if (static_cast<int>(sets_.size()) != p - 1) {
    throw std::invalid_argument("a family for p=" + std::to_string(p) + " needs " + std::to_string(p - 1) +
                                " sets, got " + std::to_string(sets_.size()));
  }
  for (const auto& s : sets_) {
    if (s.set.p() != p) throw std::invalid_argument("set '" + s.name + "' has base " + std::to_string(s.set.p()));
    if (s.set.empty()) throw std::invalid_argument("set '" + s.name + "' is empty");
  }
}

int WaveletFamily::resolution() const {
  int r = 0;
  for (const auto& s : sets_) r = std::max(r, s.set.max_resolution());
  return r;
}

PSet WaveletFamily::union_all() const {
  PSet out(p_);
  for (const auto& s : sets_) out = set_union(out, s.set);
  return out;
}

WaveletFamily shannon_family(int p) {
  std::vector<NamedSet> sets;
  for (int u = 1; u < p; ++u) {
    sets.push_back({"omega_" + std::to_string(u), PSet::of(Cylinder(p, 0, {{0, u}}))});
  }
  return WaveletFamily(p, std::move(sets));
}

const ConditionRecord* VerdictReport::find(const std::string& name) const {
  for (const auto& c : conditions) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

std::optional<Cylinder> least_cell(const PSet& s) {
  if (s.empty()) return std::nullopt;
  return s.cylinders().front();
}

}  // namespace

ConditionRecord check_measure_one(const WaveletFamily& family) {
  ConditionRecord rec;
  rec.name = kMeasureOne;
  rec.passed = true;
  for (int u = 1; u < family.p(); ++u) {
    Measure m = measure(family.set(u));
    rec.measures.emplace_back(family.name(u), m);
    if (m != Measure::one(family.p())) {
      rec.passed = false;
      rec.witnesses.push_back({"measure_not_one", least_cell(family.set(u)),
                               "set " + family.name(u) + " has measure " + m.to_string()});
    }
  }
  return rec;
}

// With D at resolution L and least fixed position w_lo, sigma^d(D) lies in
// U*_{-L} once d > L - w_lo. Resolution-L cells of D other than U*_{-L} itself
// miss that ball, so overlaps can only occur for d in [1, L - w_lo]. The cover
// is checked on A = U*_1 \ U*; sigma^k(D) meets A only for k in [-L, -w_lo].
ConditionRecord check_dilation_tiling(const WaveletFamily& family, const CheckOptions& options) {
  const int p = family.p();
  const int L = family.resolution();
  ConditionRecord rec;
  rec.name = kDilationTiling;
  bool disjoint = true;
  for (int u = 1; u < p; ++u) {
    for (int t = u + 1; t < p; ++t) {
      auto both = set_intersect(family.set(u), family.set(t));
      if (!both.empty()) {
        disjoint = false;
        rec.witnesses.push_back({"sets_overlap", least_cell(both), family.name(u) + " and " + family.name(t) + " overlap"});
      }
    }
  }

  PSet D = family.union_all();
  PSet identity_ball = PSet::of(Cylinder::ball(p, -L));
  bool no_identity = set_intersect(D, identity_ball).empty();
  if (!no_identity) {
    rec.witnesses.push_back({"contains-identity-neighborhood", identity_ball.cylinders().front(),
                             "union contains the identity cell at resolution " + std::to_string(L)});
  }

  const int w_lo = D.least_fixed_position(L);
  const int d_max = std::max(1, L - w_lo) + options.widen;
  bool no_overlap = true;
  for (int d = 1; d <= d_max; ++d) {
    auto hit = set_intersect(D, dilate_set(D, d, options.limits));
    if (hit.empty()) continue;
    no_overlap = false;
    std::string pair;
    for (int u = 1; u < p && pair.empty(); ++u) {
      for (int t = 1; t < p; ++t) {
        if (!set_intersect(family.set(u), dilate_set(family.set(t), d, options.limits)).empty()) {
          pair = "sigma^" + std::to_string(d) + "(" + family.name(t) + ") overlaps " + family.name(u);
          break;
        }
      }
    }
    rec.witnesses.push_back({"dilate_overlap", least_cell(hit), pair});
  }

  PSet annulus = set_difference(PSet::of(Cylinder::ball(p, 1)), PSet::of(Cylinder::ball(p, 0)));
  Measure cover_sum(p);
  PSet covered(p);
  std::vector<PSet> slices;
  for (int k = -L - options.widen; k <= -w_lo + options.widen; ++k) {
    auto slice = set_intersect(dilate_set(D, k, options.limits), annulus);
    cover_sum = cover_sum + measure(slice);
    covered = set_union(covered, slice);
    slices.push_back(std::move(slice));
  }
  rec.measures.emplace_back("annulus_cover", cover_sum);
  bool cover_ok = cover_sum == Measure(p, p - 1, 0);
  if (!cover_ok) {
    auto gap = set_difference(annulus, covered);
    if (!gap.empty()) {
      rec.witnesses.push_back({"cover_deficit", least_cell(gap), "annulus mass covered " + cover_sum.to_string()});
    } else {
      std::optional<Cylinder> least;
      for (std::size_t i = 0; i < slices.size(); ++i) {
        for (std::size_t j = i + 1; j < slices.size(); ++j) {
          auto both = set_intersect(slices[i], slices[j]);
          if (!both.empty() && (!least || both.cylinders().front() < *least)) least = both.cylinders().front();
        }
      }
      rec.witnesses.push_back({"cover_excess", least, "annulus mass covered " + cover_sum.to_string()});
    }
  }
  rec.passed = disjoint && no_identity && no_overlap && cover_ok;
  return rec;
}

std::vector<CongruencePiece> integer_part_partition(const PSet& set, const Limits& limits) {
  auto cells = refine(set, std::max(0, set.min_resolution()), true, limits);
  std::map<GroupElement, std::vector<Cylinder>> groups;
  for (const auto& c : cells.cylinders()) groups[c.anchor().integer_part()].push_back(c);
  std::vector<CongruencePiece> out;
  for (auto& [shift, cs] : groups) {
    out.push_back({lambda_encode(shift), shift, PSet::from_cylinders(set.p(), std::move(cs))});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  return out;
}

ConditionRecord check_translation_congruence(const WaveletFamily& family,
                                             std::vector<std::vector<CongruencePiece>>* certificate,
                                             const CheckOptions& options) {
  const int p = family.p();
  ConditionRecord rec;
  rec.name = kTranslationCongruence;
  rec.passed = true;
  const PSet unit = PSet::of(Cylinder::ball(p, 0));
  if (certificate) certificate->clear();
  for (int u = 1; u < p; ++u) {
    auto parts = integer_part_partition(family.set(u), options.limits);
    std::vector<PSet> moved;
    PSet total(p);
    Measure mass(p);
    std::optional<Cylinder> overlap;
    std::string overlap_detail;
    for (const auto& part : parts) {
      auto piece = translate(part.piece, negate(part.shift), options.limits);
      for (std::size_t i = 0; i < moved.size(); ++i) {
        auto both = set_intersect(moved[i], piece);
        if (!both.empty() && (!overlap || both.cylinders().front() < *overlap)) {
          overlap = both.cylinders().front();
          overlap_detail = family.name(u) + ": pieces at n=" + parts[i].lambda.str() + " and n=" + part.lambda.str() +
                           " overlap after translation";
        }
      }
      mass = mass + measure(piece);
      total = set_union(total, piece);
      moved.push_back(std::move(piece));
    }
    rec.measures.emplace_back(family.name(u), mass);
    bool ok = true;
    if (overlap) {
      ok = false;
      rec.witnesses.push_back({"translate_overlap", overlap, overlap_detail});
    }
    auto outside = set_difference(total, unit);
    if (!outside.empty()) {
      ok = false;
      rec.witnesses.push_back({"outside_unit", least_cell(outside), family.name(u) + ": translated piece leaves U*"});
    }
    auto gap = set_difference(unit, total);
    if (!gap.empty()) {
      ok = false;
      rec.witnesses.push_back({"uncovered_unit", least_cell(gap), family.name(u) + ": translates miss part of U*"});
    }
    rec.passed = rec.passed && ok;
    if (certificate) certificate->push_back(std::move(parts));
  }
  return rec;
}

VerdictReport is_wavelet_set(const WaveletFamily& family, const CheckOptions& options) {
  VerdictReport report;
  report.conditions.push_back(check_measure_one(family));
  report.conditions.push_back(check_dilation_tiling(family, options));
  report.conditions.push_back(check_translation_congruence(family, &report.certificate, options));
  report.overall = std::all_of(report.conditions.begin(), report.conditions.end(),
                               [](const ConditionRecord& c) { return c.passed; });
  if (report.conditions[2].passed && !report.conditions[0].passed) {
    throw std::logic_error("congruence certified a set whose measure is not one");
  }
  return report;
}

SearchResult search_wavelet_sets(int p, int lo, int hi, int resolution, std::uint64_t budget) {
  check_base(p);
  const int top = std::min(hi, resolution);
  if (lo > top) throw std::invalid_argument("search window is empty");
  std::size_t n_cells = 1;
  for (int q = lo; q <= top; ++q) {
    n_cells *= static_cast<std::size_t>(p);
    if (n_cells > 4096) throw std::invalid_argument("search window too large");
  }
  std::vector<Cylinder> cells;
  for (std::size_t idx = 0; idx < n_cells; ++idx) {
    std::vector<std::uint8_t> ds;
    std::size_t rest = idx;
    for (int q = lo; q <= top; ++q) {
      ds.push_back(static_cast<std::uint8_t>(rest % static_cast<std::size_t>(p)));
      rest /= static_cast<std::size_t>(p);
    }
    cells.emplace_back(resolution, GroupElement::from_digits(p, lo, ds));
  }
  std::sort(cells.begin(), cells.end());

  SearchResult result;
  if (resolution < 0) return result;
  std::size_t per_set = 1;
  for (int i = 0; i < resolution; ++i) per_set *= static_cast<std::size_t>(p);
  if (per_set * static_cast<std::size_t>(p - 1) > n_cells) return result;

  std::vector<int> owner(n_cells, 0);
  bool stop = false;
  // Fills set u with per_set cells drawn in increasing index order.
  std::function<void(int, std::size_t, std::size_t)> fill = [&](int u, std::size_t start, std::size_t need) {
    if (stop) return;
    if (need == 0) {
      if (u + 1 < p) {
        fill(u + 1, 0, per_set);
        return;
      }
      if (result.examined >= budget) {
        result.exhausted = true;
        stop = true;
        return;
      }
      ++result.examined;
      std::vector<NamedSet> sets;
      for (int v = 1; v < p; ++v) {
        std::vector<Cylinder> mine;
        for (std::size_t i = 0; i < n_cells; ++i) {
          if (owner[i] == v) mine.push_back(cells[i]);
        }
        sets.push_back({"omega_" + std::to_string(v), PSet::from_cylinders(p, std::move(mine))});
      }
      WaveletFamily candidate(p, std::move(sets));
      if (is_wavelet_set(candidate).overall) result.families.push_back(std::move(candidate));
      return;
    }
    for (std::size_t i = start; i + need <= n_cells && !stop; ++i) {
      if (owner[i] != 0) continue;
      owner[i] = u;
      fill(u, i + 1, need - 1);
      owner[i] = 0;
    }
  };
  fill(1, 0, per_set);
  return result;
}

}  // namespace vilenkin
