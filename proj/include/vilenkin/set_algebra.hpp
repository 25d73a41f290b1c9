#pragma once

#include "vilenkin/group_element.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace vilenkin {

inline constexpr int kDefaultMaxResolution = 24;

// Resource guard on how fine (or coarse) a cylinder may get.
struct Limits {
  int max_resolution = kDefaultMaxResolution;
  std::size_t max_cells = std::size_t{1} << 22;
};

class ResolutionLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact value count * p^-scale. Canonical: p does not divide count unless 0.
class Measure {
 public:
  explicit Measure(int p) : p_(p) {}
  Measure(int p, BigInt count, int scale);

  static Measure one(int p) { return Measure(p, 1, 0); }
  static Measure power(int p, int scale) { return Measure(p, 1, scale); }  // p^-scale

  int p() const { return p_; }
  const BigInt& count() const { return count_; }
  int scale() const { return scale_; }
  bool is_zero() const { return count_ == 0; }

  Measure operator+(const Measure& other) const;
  // Throws if the result would be negative.
  Measure operator-(const Measure& other) const;
  // Multiplies by p^-k.
  Measure scaled(int k) const;

  bool operator==(const Measure& other) const = default;
  std::strong_ordering operator<=>(const Measure& other) const;

  // Numerator at a common scale >= scale().
  BigInt count_at(int scale) const;

  double to_double() const;
  // "7*2^-3"; nonpositive scales render as "c*p^k".
  std::string to_string() const;

 private:
  void normalize();
  int p_;
  BigInt count_ = 0;
  int scale_ = 0;
};

// {omega : omega_j = anchor_j for all j <= resolution}. The anchor carries no
// digits above the resolution.
class Cylinder {
 public:
  Cylinder(int resolution, GroupElement anchor);
  Cylinder(int p, int resolution, const std::map<int, int>& digits);

  // U*_m: resolution -m with no fixed digits.
  static Cylinder ball(int p, int m) { return Cylinder(-m, GroupElement(p)); }

  int p() const { return anchor_.p(); }
  int resolution() const { return resolution_; }
  const GroupElement& anchor() const { return anchor_; }
  int digit(int position) const { return position <= resolution_ ? anchor_.digit(position) : 0; }

  bool contains(const Cylinder& other) const;
  bool contains_point(const GroupElement& omega) const;
  bool intersects(const Cylinder& other) const;

  Measure measure() const { return Measure::power(p(), resolution_); }
  std::vector<Cylinder> children() const;
  Cylinder parent() const;

  bool operator==(const Cylinder& other) const = default;
  std::strong_ordering operator<=>(const Cylinder& other) const;

 private:
  int resolution_;
  GroupElement anchor_;
};

// "<anchor>@<resolution>", e.g. "1.01@2".
std::string format_cylinder(const Cylinder& c);
Cylinder parse_cylinder(const std::string& text, int p);

// Finite disjoint union of cylinders, kept sorted. Canonical form additionally
// merges every complete sibling group into its parent.
class PSet {
 public:
  explicit PSet(int p) : p_(p) { check_base(p); }

  // Union semantics: nested cylinders are absorbed. Result is canonical.
  static PSet from_cylinders(int p, std::vector<Cylinder> cylinders);
  // Rejects overlapping input, naming the offending pair. Result is canonical.
  static PSet from_disjoint(int p, std::vector<Cylinder> cylinders);
  static PSet of(const Cylinder& c) { return from_cylinders(c.p(), {c}); }

  int p() const { return p_; }
  const std::vector<Cylinder>& cylinders() const { return cylinders_; }
  bool empty() const { return cylinders_.empty(); }
  std::size_t size() const { return cylinders_.size(); }

  PSet canonical() const;
  bool is_canonical() const { return *this == canonical(); }

  int max_resolution() const;
  int min_resolution() const;
  // Least position carrying a nonzero fixed digit; `fallback` if there is none.
  int least_fixed_position(int fallback) const;

  bool contains_point(const GroupElement& omega) const;

  bool operator==(const PSet& other) const = default;

 private:
  friend PSet refine(const PSet&, int, bool, const Limits&);
  int p_;
  std::vector<Cylinder> cylinders_;
};

enum class SetOp { Union, Intersect, Difference };

// Splits every cylinder to resolution L. Cylinders already finer than L are
// an error unless keep_finer is set, in which case they pass through.
PSet refine(const PSet& set, int L, bool keep_finer = false, const Limits& limits = {});
PSet combine(const PSet& a, const PSet& b, SetOp op);
PSet set_union(const PSet& a, const PSet& b);
PSet set_intersect(const PSet& a, const PSet& b);
PSet set_difference(const PSet& a, const PSet& b);
// Auto-refines cylinders coarser than the translator's finest digit.
PSet translate(const PSet& set, const GroupElement& t, const Limits& limits = {});
// sigma^k: positions and resolutions shift by +k.
PSet dilate_set(const PSet& set, int k, const Limits& limits = {});
Cylinder dilate_cylinder(const Cylinder& c, int k);
Measure measure(const PSet& set);
bool ae_equal(const PSet& a, const PSet& b);
bool is_subset_ae(const PSet& a, const PSet& b);

}  // namespace vilenkin
