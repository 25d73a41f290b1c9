#include "oracle/wavelet_oracle.hpp"
#include "support/mutants.hpp"
#include "vilenkin/wavelet_verifier.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace vilenkin;

namespace {

WaveletFamily single(int p, const PSet& s) { return WaveletFamily(p, {{"omega_1", s}}); }

void expect_matches_oracle(const WaveletFamily& f, const std::string& label) {
  auto lib = is_wavelet_set(f);
  auto ref = oracle::verify(f);
  EXPECT_EQ(lib.find(kMeasureOne)->passed, ref.measure_one) << label;
  EXPECT_EQ(lib.find(kDilationTiling)->passed, ref.tiling) << label;
  EXPECT_EQ(lib.find(kTranslationCongruence)->passed, ref.congruence) << label;
  EXPECT_EQ(lib.overall, ref.overall()) << label;
  for (const auto& c : lib.conditions) {
    if (!c.passed) EXPECT_FALSE(c.witnesses.empty()) << label << " " << c.name;
  }
}

WaveletFamily random_family(std::mt19937& rng, int p, int lo, int L) {
  std::uniform_int_distribution<int> digit(0, p - 1);
  std::vector<NamedSet> sets;
  for (int u = 1; u < p; ++u) {
    std::vector<Cylinder> cs;
    int n = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i) {
      int res = lo + static_cast<int>(rng() % static_cast<unsigned>(L - lo + 1));
      std::map<int, int> ds;
      for (int q = lo; q <= res; ++q) ds[q] = digit(rng);
      cs.emplace_back(p, res, ds);
    }
    sets.push_back({"omega_" + std::to_string(u), PSet::from_cylinders(p, cs)});
  }
  return WaveletFamily(p, std::move(sets));
}

}  // namespace

TEST(Family, ArityAndEmptiness) {
  EXPECT_THROW(WaveletFamily(3, {}), std::invalid_argument);
  EXPECT_THROW(WaveletFamily(3, {{"a", PSet::of(Cylinder::ball(3, 0))}}), std::invalid_argument);
  EXPECT_THROW(WaveletFamily(2, {{"a", PSet(2)}}), std::invalid_argument);
  EXPECT_THROW(WaveletFamily(2, {{"a", PSet::of(Cylinder::ball(3, 0))}}), std::invalid_argument);
}

TEST(Shannon, PassesEveryCondition) {
  for (int p : {2, 3, 5}) {
    auto f = shannon_family(p);
    auto report = is_wavelet_set(f);
    EXPECT_TRUE(report.overall) << p;
    for (const auto& c : report.conditions) {
      EXPECT_TRUE(c.passed) << c.name;
      EXPECT_TRUE(c.witnesses.empty());
    }
    for (const auto& [name, m] : report.find(kMeasureOne)->measures) EXPECT_EQ(m, Measure::one(p));
    ASSERT_EQ(report.certificate.size(), static_cast<std::size_t>(p - 1));
    for (int u = 1; u < p; ++u) {
      const auto& parts = report.certificate[static_cast<std::size_t>(u - 1)];
      ASSERT_EQ(parts.size(), 1u);
      EXPECT_EQ(parts[0].lambda, u);
      EXPECT_TRUE(ae_equal(translate(parts[0].piece, negate(parts[0].shift)), PSet::of(Cylinder::ball(p, 0))));
    }
    expect_matches_oracle(f, "shannon");
  }
}

TEST(MeasureOne, ContractedSetFails) {
  for (int p : {2, 3}) {
    std::vector<NamedSet> sets;
    sets.push_back({"omega_1", PSet::of(Cylinder::ball(p, -1))});
    for (int u = 2; u < p; ++u) sets.push_back({"omega_" + std::to_string(u), PSet::of(Cylinder(p, 0, {{0, u}}))});
    auto rec = check_measure_one(WaveletFamily(p, sets));
    EXPECT_FALSE(rec.passed);
    EXPECT_EQ(rec.measures[0].second, Measure(p, 1, 1));
    ASSERT_EQ(rec.witnesses.size(), 1u);
    EXPECT_EQ(*rec.witnesses[0].cell, Cylinder::ball(p, -1));
  }
}

TEST(Tiling, UnitDualOverlapsItsDilate) {
  auto f = single(2, PSet::of(Cylinder::ball(2, 0)));
  auto rec = check_dilation_tiling(f);
  EXPECT_FALSE(rec.passed);
  bool saw_identity = false;
  bool saw_d1 = false;
  for (const auto& w : rec.witnesses) {
    if (w.kind == "contains-identity-neighborhood") saw_identity = true;
    if (w.kind == "dilate_overlap" && w.detail.find("sigma^1(") != std::string::npos) {
      saw_d1 = true;
      EXPECT_EQ(*w.cell, Cylinder::ball(2, -1));
    }
  }
  EXPECT_TRUE(saw_identity);
  EXPECT_TRUE(saw_d1);
  // U* itself is trivially congruent
  EXPECT_TRUE(check_translation_congruence(f).passed);
  expect_matches_oracle(f, "unit dual");
}

TEST(Tiling, MovedCylinderFails) {
  auto moved = PSet::from_cylinders(2, {Cylinder(2, 1, {{0, 1}, {1, 0}}), Cylinder(2, 1, {{1, 1}})});
  auto f = single(2, moved);
  auto rec = check_dilation_tiling(f);
  EXPECT_FALSE(rec.passed);
  EXPECT_FALSE(rec.witnesses.empty());
  expect_matches_oracle(f, "moved");
}

TEST(Congruence, PositiveDigitCannotBeCleared) {
  auto f = single(2, PSet::of(Cylinder(2, 1, {{1, 1}})));
  auto rec = check_translation_congruence(f);
  EXPECT_FALSE(rec.passed);
  ASSERT_FALSE(rec.witnesses.empty());
  EXPECT_EQ(rec.witnesses[0].kind, "uncovered_unit");
  EXPECT_EQ(*rec.witnesses[0].cell, Cylinder(2, 1, {}));
  expect_matches_oracle(f, "positive digit");
}

TEST(Congruence, CertificatePartitionsUnitDual) {
  auto m = mutants::dilate_overlap(3, 1, 0, 2);  // congruent by construction
  std::vector<std::vector<CongruencePiece>> cert;
  auto rec = check_translation_congruence(m.family, &cert);
  ASSERT_TRUE(rec.passed);
  for (const auto& parts : cert) {
    PSet total(3);
    Measure mass(3);
    for (const auto& part : parts) {
      auto moved = translate(part.piece, negate(part.shift));
      EXPECT_TRUE(set_intersect(total, moved).empty());
      total = set_union(total, moved);
      mass = mass + measure(moved);
    }
    EXPECT_TRUE(ae_equal(total, PSet::of(Cylinder::ball(3, 0))));
    EXPECT_EQ(mass, Measure::one(3));
  }
}

TEST(Mutation, DesignatedMutantsFailOnlyTheirCondition) {
  auto overlap = is_wavelet_set(mutants::dilate_overlap(2, 1, 0, 1).family);
  EXPECT_TRUE(overlap.find(kMeasureOne)->passed);
  EXPECT_FALSE(overlap.find(kDilationTiling)->passed);
  EXPECT_TRUE(overlap.find(kTranslationCongruence)->passed);

  auto congruence = is_wavelet_set(mutants::congruence_break(2, 1, 0, 1).family);
  EXPECT_TRUE(congruence.find(kMeasureOne)->passed);
  EXPECT_TRUE(congruence.find(kDilationTiling)->passed);
  EXPECT_FALSE(congruence.find(kTranslationCongruence)->passed);

  // congruence forces measure one, so it necessarily falls with the measure
  auto mass = is_wavelet_set(mutants::measure_change(2, 1, 0, 1).family);
  EXPECT_FALSE(mass.find(kMeasureOne)->passed);
  EXPECT_TRUE(mass.find(kDilationTiling)->passed);
  EXPECT_FALSE(mass.find(kTranslationCongruence)->passed);
}

TEST(Mutation, SuiteHasNoFalsePasses) {
  auto all = mutants::suite();
  EXPECT_GE(all.size(), 20u);
  for (const auto& m : all) {
    auto report = is_wavelet_set(m.family);
    EXPECT_FALSE(report.overall) << m.label;
    EXPECT_FALSE(report.find(m.target)->passed) << m.label;
    expect_matches_oracle(m.family, m.label);
  }
}

TEST(Soundness, RandomFamiliesAgreeWithOracle) {
  std::mt19937 rng(31);
  int tiling = 0;
  int congruent = 0;
  int unit_mass = 0;
  auto run = [&](const WaveletFamily& f, const char* label) {
    expect_matches_oracle(f, label);
    auto ref = oracle::verify(f);
    tiling += ref.tiling;
    congruent += ref.congruence;
    unit_mass += ref.measure_one;
  };
  for (int trial = 0; trial < 400; ++trial) run(random_family(rng, 2, -1, 2), "random p=2");
  for (int trial = 0; trial < 150; ++trial) run(random_family(rng, 3, -1, 1), "random p=3");
  // the sample must exercise both verdicts of every condition
  EXPECT_GT(tiling, 0);
  EXPECT_GT(congruent, 0);
  EXPECT_GT(unit_mass, 0);
  EXPECT_LT(tiling, 550);
  EXPECT_LT(congruent, 550);
}

TEST(Soundness, FullSearchAgreesWithOracle) {
  // Every candidate the search would enumerate, checked directly.
  std::vector<Cylinder> cells;
  for (int d0 = 0; d0 < 2; ++d0)
    for (int d1 = 0; d1 < 2; ++d1)
      for (int d2 = 0; d2 < 2; ++d2) cells.emplace_back(2, 2, std::map<int, int>{{0, d0}, {1, d1}, {2, d2}});
  int passing = 0;
  for (unsigned mask = 0; mask < 256; ++mask) {
    if (__builtin_popcount(mask) != 4) continue;
    std::vector<Cylinder> chosen;
    for (unsigned i = 0; i < 8; ++i) {
      if (mask & (1u << i)) chosen.push_back(cells[i]);
    }
    auto f = single(2, PSet::from_cylinders(2, chosen));
    expect_matches_oracle(f, "mask " + std::to_string(mask));
    passing += is_wavelet_set(f).overall ? 1 : 0;
  }
  auto found = search_wavelet_sets(2, 0, 2, 2, 1000);
  EXPECT_FALSE(found.exhausted);
  EXPECT_EQ(found.examined, 70u);
  EXPECT_EQ(static_cast<int>(found.families.size()), passing);
}

TEST(RangeRobustness, WideningNeverChangesVerdicts) {
  std::vector<WaveletFamily> families;
  for (int p : {2, 3, 5}) families.push_back(shannon_family(p));
  for (const auto& m : mutants::suite()) families.push_back(m.family);
  std::mt19937 rng(32);
  for (int i = 0; i < 60; ++i) families.push_back(random_family(rng, 2, -1, 2));
  CheckOptions wide;
  wide.widen = 3;
  for (const auto& f : families) {
    auto base = is_wavelet_set(f);
    auto widened = is_wavelet_set(f, wide);
    ASSERT_EQ(base.conditions.size(), widened.conditions.size());
    for (std::size_t i = 0; i < base.conditions.size(); ++i) {
      EXPECT_EQ(base.conditions[i].passed, widened.conditions[i].passed) << base.conditions[i].name;
    }
  }
}

TEST(Witness, LeastCellIsReported) {
  auto f = mutants::dilate_overlap(3, 1, 0, 2).family;
  auto rec = check_dilation_tiling(f);
  ASSERT_FALSE(rec.passed);
  const Witness* overlap = nullptr;
  for (const auto& w : rec.witnesses) {
    if (w.kind == "dilate_overlap") {
      overlap = &w;
      break;
    }
  }
  ASSERT_NE(overlap, nullptr);
  auto D = f.union_all();
  auto hit = set_intersect(D, dilate_set(D, 1));
  for (const auto& c : hit.cylinders()) EXPECT_LE(*overlap->cell, c);
  EXPECT_NE(overlap->detail.find("sigma^1("), std::string::npos);
}

TEST(Search, FindsShannonAndRespectsBudget) {
  auto found = search_wavelet_sets(2, 0, 2, 2, 1000);
  auto shannon = shannon_family(2);
  bool has = false;
  for (const auto& f : found.families) {
    if (ae_equal(f.set(1), shannon.set(1))) has = true;
    EXPECT_TRUE(is_wavelet_set(f).overall);
  }
  EXPECT_TRUE(has);

  auto none = search_wavelet_sets(2, 0, 2, 2, 0);
  EXPECT_TRUE(none.families.empty());
  EXPECT_TRUE(none.exhausted);

  auto partial = search_wavelet_sets(2, 0, 2, 2, 10);
  EXPECT_TRUE(partial.exhausted);
  EXPECT_EQ(partial.examined, 10u);

  auto again = search_wavelet_sets(2, 0, 2, 2, 1000);
  ASSERT_EQ(again.families.size(), found.families.size());
  for (std::size_t i = 0; i < found.families.size(); ++i) EXPECT_EQ(again.families[i].set(1), found.families[i].set(1));
}

TEST(Search, SmallTernaryWindow) {
  auto found = search_wavelet_sets(3, 0, 1, 1, 5000);
  EXPECT_FALSE(found.exhausted);
  bool has = false;
  auto shannon = shannon_family(3);
  for (const auto& f : found.families) {
    if (ae_equal(f.set(1), shannon.set(1)) && ae_equal(f.set(2), shannon.set(2))) has = true;
    EXPECT_TRUE(oracle::verify(f).overall());
  }
  EXPECT_TRUE(has);
}
