#include "vilenkin/mra_builder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <stdexcept>

namespace vilenkin {

namespace {

std::optional<Cylinder> least_cell(const PSet& s) {
  if (s.empty()) return std::nullopt;
  return s.cylinders().front();
}

std::string format_number(std::complex<double> v) {
  char buf[64];
  if (v.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.6g", v.real());
  } else {
    std::snprintf(buf, sizeof buf, "%.6g%+.6gi", v.real(), v.imag());
  }
  return buf;
}

const ConditionRecord* find_record(const std::vector<ConditionRecord>& records, const std::string& name) {
  for (const auto& r : records) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

enum class Step { Done, Split };

void walk(const Cylinder& cell, const Limits& limits, const std::function<Step(const Cylinder&)>& visit) {
  if (visit(cell) == Step::Done) return;
  if (cell.resolution() + 1 > limits.max_resolution) {
    throw ResolutionLimitError("cell " + format_cylinder(cell) + " still straddles at the resolution cap " +
                               std::to_string(limits.max_resolution));
  }
  for (const auto& child : cell.children()) walk(child, limits, visit);
}

// Any exact zero factor settles the product.
CellValue multiply(const std::vector<CellValue>& factors) {
  for (const auto& f : factors) {
    if (f.resolved() && f.value == 0.0) return CellValue::of(0.0);
  }
  for (const auto& f : factors) {
    if (f.kind == CellValue::Kind::Straddle) return {CellValue::Kind::Straddle, {}};
  }
  for (const auto& f : factors) {
    if (f.kind == CellValue::Kind::Unresolved) return {};
  }
  std::complex<double> v = 1.0;
  for (const auto& f : factors) v *= f.value;
  return CellValue::of(v);
}

bool close(std::complex<double> a, std::complex<double> b, bool exact) {
  return exact ? a == b : std::abs(a - b) <= kFilterTolerance;
}

struct Tally {
  explicit Tally(int p) : excluded_mass(p) {}
  std::uint64_t leaves = 0;
  std::uint64_t excluded = 0;
  Measure excluded_mass;
};

enum class Outcome { Split, Excluded, Hold, Violated };

Outcome compare_cell(const CellValue& lhs, const CellValue& rhs, bool exact) {
  if (lhs.kind == CellValue::Kind::Straddle || rhs.kind == CellValue::Kind::Straddle) return Outcome::Split;
  if (!lhs.resolved() || !rhs.resolved()) return Outcome::Excluded;
  return close(lhs.value, rhs.value, exact) ? Outcome::Hold : Outcome::Violated;
}

void finish_record(ConditionRecord& rec, const Tally& t, const Measure& allowed) {
  rec.counts.emplace_back("leaves", t.leaves);
  rec.counts.emplace_back("excluded", t.excluded);
  rec.measures.emplace_back("excluded_mass", t.excluded_mass);
  rec.passed = rec.witnesses.empty() && t.excluded_mass <= allowed;
  if (t.excluded_mass > allowed) {
    rec.witnesses.push_back({"unresolved_mass", std::nullopt,
                             "unresolved mass " + t.excluded_mass.to_string() + " exceeds " + allowed.to_string()});
  }
}

}  // namespace

// ------------------------------------------------------------ accumulation

PSet OmegaSigma::unresolved() const {
  if (self_similar) return PSet(p);
  return set_difference(PSet::of(tail_ball), truncated);
}

OmegaSigma accumulate_omega_sigma(const WaveletFamily& family, int depth, const Limits& limits) {
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  CheckOptions options;
  options.limits = limits;
  if (!is_wavelet_set(family, options).overall) {
    throw std::invalid_argument("the family is not a wavelet set");
  }
  const int p = family.p();
  const PSet D = family.union_all();
  const int L = family.resolution();
  const int w = D.least_fixed_position(L);

  std::vector<Cylinder> cells;
  for (const auto& s : family.sets()) {
    for (int j = 1; j <= depth; ++j) {
      auto d = dilate_set(s.set, j, limits);
      cells.insert(cells.end(), d.cylinders().begin(), d.cylinders().end());
    }
  }
  PSet truncated = PSet::from_cylinders(p, std::move(cells));
  Cylinder tail_ball = Cylinder::ball(p, -(w + depth));
  PSet closure = set_union(truncated, PSet::of(tail_ball));
  bool self_similar =
      ae_equal(closure, set_union(dilate_set(D, 1, limits), dilate_set(closure, 1, limits)));
  return OmegaSigma{p,         depth,    L,           w, std::move(truncated), Measure::power(p, depth),
                    tail_ball, self_similar, std::move(closure)};
}

// ------------------------------------------------------------ MRA condition

const char* to_string(MraVerdict v) {
  switch (v) {
    case MraVerdict::Certified: return "CERTIFIED";
    case MraVerdict::Inconclusive: return "INCONCLUSIVE";
    case MraVerdict::Fail: return "FAIL";
  }
  return "FAIL";
}

// Translates by n outside the differences of integer parts cannot meet the
// truncated union, so the candidate set is finite.
MraReport check_mra_condition(const OmegaSigma& omega, int widen, const Limits& limits) {
  const int p = omega.p;
  const PSet& T = omega.truncated;
  const PSet& X = omega.support();
  std::set<GroupElement> integer_parts;
  auto cells = refine(X, std::max(0, X.min_resolution()), true, limits);
  for (const auto& c : cells.cylinders()) integer_parts.insert(c.anchor().integer_part());

  std::set<GroupElement> shifts;
  for (const auto& a : integer_parts) {
    for (const auto& b : integer_parts) shifts.insert(subtract(a, b));
  }
  shifts.insert(GroupElement(p));
  for (int k = 1; k <= p - 1 + std::max(0, widen); ++k) shifts.insert(lambda_decode(k, p));

  MraReport report(p);
  report.band = Measure(p, 2, omega.depth);
  report.self_similar = omega.self_similar;
  report.certified_by_depth = report.band < Measure::power(p, omega.resolution);
  bool all_pass = true;
  for (const auto& n : shifts) {
    MraRow row{lambda_encode(n), n, measure(set_intersect(T, translate(T, n, limits))),
               n.is_identity() ? Measure::one(p) : Measure(p), std::nullopt, false};
    row.passed = row.overlap <= row.expected && row.expected <= row.overlap + report.band;
    if (omega.self_similar) {
      row.closure_overlap = measure(set_intersect(X, translate(X, n, limits)));
      row.passed = row.passed && *row.closure_overlap == row.expected;
    }
    all_pass = all_pass && row.passed;
    report.rows.push_back(std::move(row));
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const MraRow& a, const MraRow& b) { return a.lambda < b.lambda; });
  if (!all_pass) {
    report.verdict = MraVerdict::Fail;
  } else if (report.self_similar || report.certified_by_depth) {
    report.verdict = MraVerdict::Certified;
  } else {
    report.verdict = MraVerdict::Inconclusive;
  }
  return report;
}

// ------------------------------------------------------------ filter tables

FilterTable::FilterTable(int p, std::vector<Piece> pieces, const Limits& limits)
    : p_(p), pieces_(std::move(pieces)), unresolved_(p) {
  check_base(p);
  std::vector<Cylinder> all;
  for (const auto& piece : pieces_) {
    if (piece.region.p() != p) throw std::invalid_argument("filter piece has the wrong base");
    if (piece.region.empty()) continue;
    auto cells = refine(piece.region, std::max(0, piece.region.min_resolution()), true, limits);
    for (const auto& c : cells.cylinders()) {
      folded_.push_back({Cylinder(c.resolution(), c.anchor().fractional_part()), c.anchor().integer_part(), piece.value});
      all.push_back(folded_.back().cell);
    }
  }
  std::sort(folded_.begin(), folded_.end(), [](const Folded& a, const Folded& b) { return a.cell < b.cell; });
  Measure total(p);
  for (const auto& f : folded_) total = total + f.cell.measure();
  PSet cover = PSet::from_cylinders(p, std::move(all));
  if (measure(cover) != total) {
    for (std::size_t i = 0; i < folded_.size(); ++i) {
      for (std::size_t j = i + 1; j < folded_.size(); ++j) {
        if (folded_[i].cell.intersects(folded_[j].cell)) {
          throw std::invalid_argument("filter pieces overlap after removing integer parts: " +
                                      format_cylinder(folded_[i].cell) + " and " + format_cylinder(folded_[j].cell));
        }
      }
    }
  }
  unresolved_ = set_difference(PSet::of(Cylinder::ball(p, 0)), cover);
}

FilterTable FilterTable::constant(int p, std::complex<double> value) {
  return FilterTable(p, {{PSet::of(Cylinder::ball(p, 0)), value}});
}

bool FilterTable::is_binary() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const Piece& piece) {
    return piece.value.imag() == 0.0 && (piece.value.real() == 0.0 || piece.value.real() == 1.0);
  });
}

CellValue FilterTable::evaluate(const Cylinder& cell) const {
  // Periodicity: only the fractional part matters. A coarse cell covers U*.
  const Cylinder probe =
      cell.resolution() < 0 ? Cylinder::ball(p_, 0) : Cylinder(cell.resolution(), cell.anchor().fractional_part());
  Measure covered(p_);
  std::optional<std::complex<double>> value;
  bool mixed = false;
  for (const auto& f : folded_) {
    if (!f.cell.intersects(probe)) continue;
    covered = covered + (f.cell.resolution() >= probe.resolution() ? f.cell.measure() : probe.measure());
    if (!value) {
      value = f.value;
    } else if (*value != f.value) {
      mixed = true;
    }
  }
  if (covered.is_zero()) return {};
  if (covered != probe.measure() || mixed) return {CellValue::Kind::Straddle, {}};
  return CellValue::of(*value);
}

std::optional<std::complex<double>> FilterTable::evaluate(const GroupElement& omega) const {
  const GroupElement frac = omega.fractional_part();
  for (const auto& f : folded_) {
    if (f.cell.contains_point(frac)) return f.value;
  }
  return std::nullopt;
}

CellValue evaluate_filter(const FilterTable& table, const Cylinder& cell) { return table.evaluate(cell); }

std::optional<std::complex<double>> evaluate_filter(const FilterTable& table, const GroupElement& omega) {
  return table.evaluate(omega);
}

CellValue evaluate_indicator(const PSet& region, const PSet& open, const Cylinder& cell) {
  const PSet c = PSet::of(cell);
  if (!open.empty()) {
    auto o = set_intersect(open, c);
    if (!o.empty()) {
      if (measure(o) == cell.measure()) return {};
      return {CellValue::Kind::Straddle, {}};
    }
  }
  Measure in = measure(set_intersect(region, c));
  if (in.is_zero()) return CellValue::of(0.0);
  if (in == cell.measure()) return CellValue::of(1.0);
  return {CellValue::Kind::Straddle, {}};
}

Filters build_filters(const WaveletFamily& family, const OmegaSigma& omega, const Limits& limits) {
  const int p = family.p();
  const PSet& region = omega.support();
  const PSet first = dilate_set(family.union_all(), 1, limits);
  FilterTable scaling(p, {{first, 0.0}, {set_difference(region, first), 1.0}}, limits);
  std::vector<FilterTable> wavelet;
  for (int u = 1; u < p; ++u) {
    PSet mine = dilate_set(family.set(u), 1, limits);
    wavelet.emplace_back(p, std::vector<FilterTable::Piece>{{mine, 1.0}, {set_difference(region, mine), 0.0}}, limits);
  }
  return {std::move(scaling), std::move(wavelet)};
}

// ------------------------------------------------------------ filter identities

const ConditionRecord* FilterIdentityReport::find(const std::string& name) const {
  return find_record(relations, name);
}

FilterIdentityReport verify_filter_identities(const Filters& filters, int resolution, const Measure& allowed_unresolved,
                                              const Limits& limits) {
  const int p = filters.scaling.p();
  if (resolution < 1) throw std::invalid_argument("filter identities need resolution >= 1");
  if (static_cast<int>(filters.wavelet.size()) != p - 1) {
    throw std::invalid_argument("expected " + std::to_string(p - 1) + " wavelet filters");
  }
  std::vector<const FilterTable*> columns{&filters.scaling};
  for (const auto& w : filters.wavelet) columns.push_back(&w);

  FilterIdentityReport report(p);
  report.resolution = resolution;
  report.exact = std::all_of(columns.begin(), columns.end(), [](const FilterTable* t) { return t->is_binary(); });
  for (const char* name : {kScalingNorm, kWaveletNorm, kScalingWaveletOrthogonal, kWaveletCrossOrthogonal,
                           kModulationUnitary}) {
    ConditionRecord rec;
    rec.name = name;
    rec.exact = report.exact;
    report.relations.push_back(std::move(rec));
  }
  auto& scaling_norm = report.relations[0];
  auto& wavelet_norm = report.relations[1];
  auto& scaling_wavelet = report.relations[2];
  auto& wavelet_cross = report.relations[3];
  auto& unitary = report.relations[4];

  const auto n = static_cast<std::size_t>(p);
  const std::complex<double> one = 1.0;
  const std::complex<double> zero = 0.0;
  auto visit = [&](const Cylinder& cell) {
    std::vector<std::vector<std::complex<double>>> a(n, std::vector<std::complex<double>>(n));
    bool unresolved = false;
    for (std::size_t x = 0; x < n; ++x) {
      Cylinder row(cell.resolution(), add(cell.anchor(), GroupElement::unit(p, 1, static_cast<int>(x))));
      for (std::size_t k = 0; k < n; ++k) {
        CellValue v = columns[k]->evaluate(row);
        if (v.kind == CellValue::Kind::Straddle) return Step::Split;
        if (v.kind == CellValue::Kind::Unresolved) unresolved = true;
        a[x][k] = v.value;
      }
    }
    if (unresolved) {
      ++report.excluded;
      report.excluded_mass = report.excluded_mass + cell.measure();
      return Step::Done;
    }
    ++report.leaves;
    // column products: sum_x conj(a[x][s]) a[x][t]
    auto column = [&](std::size_t s, std::size_t t) {
      std::complex<double> sum = 0.0;
      for (std::size_t x = 0; x < n; ++x) sum += std::conj(a[x][s]) * a[x][t];
      return sum;
    };
    auto violate = [&](ConditionRecord& rec, const std::string& what, std::complex<double> got) {
      rec.witnesses.push_back({"relation_violated", cell, what + " = " + format_number(got)});
    };
    bool columns_ok = true;
    auto g00 = column(0, 0);
    if (!close(g00, one, report.exact)) {
      columns_ok = false;
      violate(scaling_norm, "scaling column norm", g00);
    }
    for (std::size_t u = 1; u < n; ++u) {
      auto guu = column(u, u);
      if (!close(guu, one, report.exact)) {
        columns_ok = false;
        violate(wavelet_norm, "wavelet " + std::to_string(u) + " column norm", guu);
      }
      auto g0u = column(0, u);
      if (!close(g0u, zero, report.exact)) {
        columns_ok = false;
        violate(scaling_wavelet, "scaling/wavelet " + std::to_string(u) + " product", g0u);
      }
      for (std::size_t t = u + 1; t < n; ++t) {
        auto gut = column(u, t);
        if (!close(gut, zero, report.exact)) {
          columns_ok = false;
          violate(wavelet_cross, "wavelet " + std::to_string(u) + "/" + std::to_string(t) + " product", gut);
        }
      }
    }
    bool rows_ok = true;
    for (std::size_t x = 0; x < n && rows_ok; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        std::complex<double> sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) sum += a[x][k] * std::conj(a[y][k]);
        if (!close(sum, x == y ? one : zero, report.exact)) {
          rows_ok = false;
          violate(unitary, "row product (" + std::to_string(x) + "," + std::to_string(y) + ")", sum);
          break;
        }
      }
    }
    if (rows_ok != columns_ok) report.formulations_agree = false;
    return Step::Done;
  };

  const PSet grid = refine(PSet::of(Cylinder::ball(p, 0)), resolution, false, limits);
  for (const auto& cell : grid.cylinders()) {
    ++report.cells;
    walk(cell, limits, visit);
  }
  for (auto& rec : report.relations) {
    rec.passed = rec.witnesses.empty();
    rec.counts.emplace_back("cells", report.cells);
    rec.counts.emplace_back("leaves", report.leaves);
  }
  report.passed = report.formulations_agree && report.excluded_mass <= allowed_unresolved &&
                  std::all_of(report.relations.begin(), report.relations.end(),
                              [](const ConditionRecord& r) { return r.passed; });
  return report;
}

// ------------------------------------------------------------ two-scale relations

const ConditionRecord* TwoScaleReport::find(const std::string& name) const { return find_record(relations, name); }

TwoScaleReport verify_two_scale(const WaveletFamily& family, const OmegaSigma& omega, const Filters& filters,
                                const Limits& limits) {
  const int p = family.p();
  const PSet& support = omega.support();
  const PSet open = omega.unresolved();
  const PSet none(p);
  bool exact = filters.scaling.is_binary();
  for (const auto& w : filters.wavelet) exact = exact && w.is_binary();
  auto phi = [&](const Cylinder& c) { return evaluate_indicator(support, open, c); };

  TwoScaleReport report;
  report.window = std::max(1, -omega.lowest_position);
  const Cylinder root = Cylinder::ball(p, report.window);

  auto run = [&](const char* name, const std::function<Outcome(const Cylinder&, std::string&)>& check,
                 const std::function<bool(const Cylinder&)>& skip) {
    ConditionRecord rec;
    rec.name = name;
    rec.exact = exact;
    Tally tally(p);
    std::uint64_t skipped = 0;
    walk(root, limits, [&](const Cylinder& c) {
      if (skip && skip(c)) {
        ++skipped;
        return Step::Done;
      }
      std::string detail;
      switch (check(c, detail)) {
        case Outcome::Split: return Step::Split;
        case Outcome::Excluded:
          ++tally.excluded;
          tally.excluded_mass = tally.excluded_mass + c.measure();
          return Step::Done;
        case Outcome::Violated: rec.witnesses.push_back({"relation_violated", c, detail}); break;
        case Outcome::Hold: break;
      }
      ++tally.leaves;
      return Step::Done;
    });
    finish_record(rec, tally, omega.tail_bound);
    if (skip) rec.counts.emplace_back("skipped", skipped);
    report.relations.push_back(std::move(rec));
  };

  run(kScalingTwoScale,
      [&](const Cylinder& c, std::string& detail) {
        auto lhs = phi(dilate_cylinder(c, -1));
        auto rhs = multiply({filters.scaling.evaluate(c), phi(c)});
        auto out = compare_cell(lhs, rhs, exact);
        if (out == Outcome::Violated) detail = format_number(lhs.value) + " != " + format_number(rhs.value);
        return out;
      },
      nullptr);

  run(kWaveletTwoScale,
      [&](const Cylinder& c, std::string& detail) {
        const auto phi_c = phi(c);
        Outcome worst = Outcome::Hold;
        for (int u = 1; u < p; ++u) {
          auto lhs = evaluate_indicator(family.set(u), none, dilate_cylinder(c, -1));
          auto rhs = multiply({filters.wavelet[static_cast<std::size_t>(u - 1)].evaluate(c), phi_c});
          auto out = compare_cell(lhs, rhs, exact);
          if (out == Outcome::Split) return out;
          if (out == Outcome::Excluded) worst = Outcome::Excluded;
          if (out == Outcome::Violated && worst == Outcome::Hold) {
            worst = out;
            detail = family.name(u) + ": " + format_number(lhs.value) + " != " + format_number(rhs.value);
          }
        }
        return worst;
      },
      nullptr);

  const Cylinder identity_ball = Cylinder::ball(p, -(omega.resolution + omega.depth));
  run(kInfiniteProduct,
      [&](const Cylinder& c, std::string& detail) {
        if (c.contains(identity_ball)) return Outcome::Split;
        std::vector<CellValue> factors;
        for (int j = 1; j <= omega.depth; ++j) factors.push_back(filters.scaling.evaluate(dilate_cylinder(c, j)));
        auto lhs = phi(c);
        auto rhs = multiply(factors);
        auto out = compare_cell(lhs, rhs, exact);
        if (out == Outcome::Violated) detail = format_number(lhs.value) + " != product " + format_number(rhs.value);
        return out;
      },
      [&](const Cylinder& c) { return identity_ball.contains(c); });

  report.passed = std::all_of(report.relations.begin(), report.relations.end(),
                              [](const ConditionRecord& r) { return r.passed; });
  return report;
}

// ------------------------------------------------------------ set identity

ConditionRecord verify_calderon(const WaveletFamily& family, const OmegaSigma& omega, const Limits& limits) {
  CheckOptions options;
  options.limits = limits;
  if (!check_dilation_tiling(family, options).passed) {
    throw std::invalid_argument("the family does not tile by dilation; the union is not disjoint");
  }
  const int p = family.p();
  const int J = omega.depth;
  const PSet first = dilate_set(family.union_all(), 1, limits);
  PSet level(p);
  PSet at_depth(p);
  for (int k = 1; k <= J + 2; ++k) {
    level = set_union(first, dilate_set(level, 1, limits));
    if (k == J) at_depth = level;
  }

  ConditionRecord rec;
  rec.name = kCalderon;
  Measure dilate_sum(p);
  for (const auto& s : family.sets()) {
    for (int j = 1; j <= J; ++j) dilate_sum = dilate_sum + measure(dilate_set(s.set, j, limits));
  }
  const Measure truncated = measure(omega.truncated);
  const Measure gap = measure(set_difference(level, at_depth));
  rec.measures.emplace_back("truncated", truncated);
  rec.measures.emplace_back("dilate_sum", dilate_sum);
  rec.measures.emplace_back("depth_gap", gap);

  if (!ae_equal(at_depth, omega.truncated)) {
    auto diff = set_union(set_difference(at_depth, omega.truncated), set_difference(omega.truncated, at_depth));
    rec.witnesses.push_back({"union_mismatch", least_cell(diff), "recursive union differs from the accumulated one"});
  }
  if (dilate_sum != truncated) {
    rec.witnesses.push_back({"dilates_overlap", std::nullopt,
                             "dilate measures sum to " + dilate_sum.to_string() + " but the union has " +
                                 truncated.to_string()});
  }
  if (!is_subset_ae(at_depth, level)) {
    rec.witnesses.push_back({"not_nested", least_cell(set_difference(at_depth, level)), "deeper union lost mass"});
  }
  if (gap > omega.tail_bound) {
    rec.witnesses.push_back({"depth_gap_exceeds_tail", least_cell(set_difference(level, at_depth)),
                             "two more levels add " + gap.to_string()});
  }
  rec.passed = rec.witnesses.empty();
  return rec;
}

}  // namespace vilenkin
