#pragma once

#include "vilenkin/set_algebra.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vilenkin {

struct NamedSet {
  std::string name;
  PSet set;
};

// p together with the p-1 candidate sets, indexed u = 1..p-1.
class WaveletFamily {
 public:
  WaveletFamily(int p, std::vector<NamedSet> sets);

  int p() const { return p_; }
  const std::vector<NamedSet>& sets() const { return sets_; }
  const PSet& set(int u) const { return sets_.at(static_cast<std::size_t>(u - 1)).set; }
  const std::string& name(int u) const { return sets_.at(static_cast<std::size_t>(u - 1)).name; }

  // Finest resolution present, never below zero.
  int resolution() const;
  PSet union_all() const;

 private:
  int p_;
  std::vector<NamedSet> sets_;
};

// Shannon-type family: set u is the resolution-0 cylinder with digit u at 0.
WaveletFamily shannon_family(int p);

struct Witness {
  std::string kind;
  std::optional<Cylinder> cell;
  std::string detail;
};

struct ConditionRecord {
  std::string name;
  bool passed = false;
  bool exact = true;
  std::vector<Witness> witnesses;
  std::vector<std::pair<std::string, Measure>> measures;
  std::vector<std::pair<std::string, std::uint64_t>> counts;
};

struct CongruencePiece {
  BigInt lambda;
  GroupElement shift;
  PSet piece;  // cylinders of the set whose integer part is `shift`
};

struct VerdictReport {
  bool overall = false;
  std::vector<ConditionRecord> conditions;
  // certificate[u-1]: the partition of set u by integer part
  std::vector<std::vector<CongruencePiece>> certificate;

  const ConditionRecord* find(const std::string& name) const;
};

// Widening adds extra dilation steps beyond the derived finite range.
struct CheckOptions {
  int widen = 0;
  Limits limits{};
};

inline constexpr const char* kMeasureOne = "measure_one";
inline constexpr const char* kDilationTiling = "dilation_tiling";
inline constexpr const char* kTranslationCongruence = "translation_congruence";

ConditionRecord check_measure_one(const WaveletFamily& family);
ConditionRecord check_dilation_tiling(const WaveletFamily& family, const CheckOptions& options = {});
ConditionRecord check_translation_congruence(const WaveletFamily& family,
                                             std::vector<std::vector<CongruencePiece>>* certificate = nullptr,
                                             const CheckOptions& options = {});
VerdictReport is_wavelet_set(const WaveletFamily& family, const CheckOptions& options = {});

// Splits coarse cylinders to resolution 0 and groups the cells by integer
// part, ordered by lambda.
std::vector<CongruencePiece> integer_part_partition(const PSet& set, const Limits& limits = {});

struct SearchResult {
  std::vector<WaveletFamily> families;
  bool exhausted = false;
  std::uint64_t examined = 0;
};

// Exhaustive enumeration of families built from resolution-L cells whose
// digits lie in [lo, hi]; `budget` caps the number of candidates examined.
SearchResult search_wavelet_sets(int p, int lo, int hi, int resolution, std::uint64_t budget);

}  // namespace vilenkin
