#include "vilenkin/set_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace vilenkin {

namespace {

constexpr int kNoLowerBound = std::numeric_limits<int>::min();

GroupElement truncate_above(const GroupElement& x, int r) { return x.window(kNoLowerBound, r); }

BigInt pow_big(int p, int e) {
  BigInt out = 1;
  for (int i = 0; i < e; ++i) out *= p;
  return out;
}

void require_same_base(int a, int b) {
  if (a != b) throw std::invalid_argument("base mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

void check_fine_limit(int resolution, const Limits& limits) {
  if (resolution > limits.max_resolution) {
    throw ResolutionLimitError("resolution " + std::to_string(resolution) + " exceeds the configured maximum " +
                               std::to_string(limits.max_resolution));
  }
}

void check_split_count(int p, int from, int to, std::size_t already, const Limits& limits) {
  std::size_t n = 1;
  for (int r = from; r < to; ++r) {
    n *= static_cast<std::size_t>(p);
    if (n + already > limits.max_cells) {
      throw ResolutionLimitError("splitting to resolution " + std::to_string(to) + " exceeds " +
                                 std::to_string(limits.max_cells) + " cells");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- Measure

Measure::Measure(int p, BigInt count, int scale) : p_(p), count_(std::move(count)), scale_(scale) {
  check_base(p);
  if (count_ < 0) throw std::invalid_argument("negative measure");
  normalize();
}

void Measure::normalize() {
  if (count_ == 0) {
    scale_ = 0;
    return;
  }
  while (count_ % p_ == 0) {
    count_ /= p_;
    --scale_;
  }
}

BigInt Measure::count_at(int scale) const {
  if (count_ == 0) return 0;
  if (scale < scale_) throw std::invalid_argument("count_at: scale below canonical scale");
  return count_ * pow_big(p_, scale - scale_);
}

Measure Measure::operator+(const Measure& other) const {
  require_same_base(p_, other.p_);
  if (is_zero()) return other;
  if (other.is_zero()) return *this;
  int s = std::max(scale_, other.scale_);
  return Measure(p_, count_at(s) + other.count_at(s), s);
}

Measure Measure::operator-(const Measure& other) const {
  require_same_base(p_, other.p_);
  if (other.is_zero()) return *this;
  int s = std::max(scale_, other.scale_);
  BigInt diff = count_at(s) - other.count_at(s);
  if (diff < 0) throw std::domain_error("measure subtraction would be negative");
  return Measure(p_, diff, s);
}

Measure Measure::scaled(int k) const {
  if (is_zero()) return *this;
  return Measure(p_, count_, scale_ + k);
}

std::strong_ordering Measure::operator<=>(const Measure& other) const {
  require_same_base(p_, other.p_);
  int s = std::max(scale_, other.scale_);
  BigInt a = count_at(s);
  BigInt b = other.count_at(s);
  if (a < b) return std::strong_ordering::less;
  if (a > b) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

double Measure::to_double() const {
  if (is_zero()) return 0.0;
  return count_.convert_to<double>() * std::pow(static_cast<double>(p_), -scale_);
}

std::string Measure::to_string() const {
  if (is_zero()) return "0";
  return count_.str() + "*" + std::to_string(p_) + "^" + std::to_string(-scale_);
}

// ---------------------------------------------------------------- Cylinder

Cylinder::Cylinder(int resolution, GroupElement anchor) : resolution_(resolution), anchor_(std::move(anchor)) {
  if (!anchor_.is_identity() && anchor_.support_hi() > resolution_) {
    throw std::invalid_argument("cylinder digit at position " + std::to_string(anchor_.support_hi()) +
                                " lies above its resolution " + std::to_string(resolution_));
  }
}

namespace {

GroupElement anchor_from_map(int p, const std::map<int, int>& digits) {
  GroupElement a(p);
  for (const auto& [pos, d] : digits) {
    if (d < 0 || d >= p) {
      throw std::invalid_argument("digit " + std::to_string(d) + " at position " + std::to_string(pos) +
                                  " out of range for p=" + std::to_string(p));
    }
    if (d != 0) a = add(a, GroupElement::unit(p, pos, d));
  }
  return a;
}

}  // namespace

Cylinder::Cylinder(int p, int resolution, const std::map<int, int>& digits)
    : Cylinder(resolution, anchor_from_map(p, digits)) {}

bool Cylinder::contains(const Cylinder& other) const {
  if (p() != other.p() || resolution_ > other.resolution_) return false;
  return truncate_above(other.anchor_, resolution_) == anchor_;
}

bool Cylinder::contains_point(const GroupElement& omega) const {
  return omega.p() == p() && truncate_above(omega, resolution_) == anchor_;
}

bool Cylinder::intersects(const Cylinder& other) const {
  if (p() != other.p()) return false;
  int r = std::min(resolution_, other.resolution_);
  return truncate_above(anchor_, r) == truncate_above(other.anchor_, r);
}

std::vector<Cylinder> Cylinder::children() const {
  std::vector<Cylinder> out;
  out.reserve(static_cast<std::size_t>(p()));
  for (int d = 0; d < p(); ++d) {
    out.emplace_back(resolution_ + 1, d == 0 ? anchor_ : add(anchor_, GroupElement::unit(p(), resolution_ + 1, d)));
  }
  return out;
}

Cylinder Cylinder::parent() const { return Cylinder(resolution_ - 1, truncate_above(anchor_, resolution_ - 1)); }

std::strong_ordering Cylinder::operator<=>(const Cylinder& other) const {
  if (auto c = resolution_ <=> other.resolution_; c != 0) return c;
  return anchor_ <=> other.anchor_;
}

std::string format_cylinder(const Cylinder& c) {
  return format_element(c.anchor()) + "@" + std::to_string(c.resolution());
}

Cylinder parse_cylinder(const std::string& text, int p) {
  auto at = text.find('@');
  if (at == std::string::npos) throw std::invalid_argument("malformed cylinder '" + text + "': missing '@'");
  int res = 0;
  try {
    std::size_t used = 0;
    res = std::stoi(text.substr(at + 1), &used);
    if (used != text.size() - at - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed cylinder '" + text + "': bad resolution");
  }
  return Cylinder(res, parse_element(text.substr(0, at), p));
}

// ---------------------------------------------------------------- PSet

namespace {

// Complete sibling groups collapse into their parent, finest level first.
std::vector<Cylinder> merge_siblings(int p, std::set<Cylinder> cells) {
  if (cells.empty()) return {};
  int r = cells.rbegin()->resolution();
  while (!cells.empty() && r >= cells.begin()->resolution()) {
    auto first = cells.lower_bound(Cylinder(r, GroupElement(p)));
    std::map<Cylinder, int> groups;
    for (auto it = first; it != cells.end() && it->resolution() == r; ++it) ++groups[it->parent()];
    for (const auto& [parent, count] : groups) {
      if (count != p) continue;
      for (const auto& child : parent.children()) cells.erase(child);
      cells.insert(parent);
    }
    --r;
  }
  return {cells.begin(), cells.end()};
}

}  // namespace

PSet PSet::from_cylinders(int p, std::vector<Cylinder> cylinders) {
  PSet out(p);
  for (const auto& c : cylinders) require_same_base(p, c.p());
  std::sort(cylinders.begin(), cylinders.end());
  std::set<Cylinder> accepted;
  std::vector<int> levels;  // distinct accepted resolutions, ascending
  for (const auto& c : cylinders) {
    bool covered = false;
    for (int r : levels) {
      if (r > c.resolution()) break;
      if (accepted.count(Cylinder(r, truncate_above(c.anchor(), r)))) {
        covered = true;
        break;
      }
    }
    if (covered) continue;
    accepted.insert(c);
    if (levels.empty() || levels.back() != c.resolution()) levels.push_back(c.resolution());
  }
  out.cylinders_ = merge_siblings(p, std::move(accepted));
  return out;
}

PSet PSet::from_disjoint(int p, std::vector<Cylinder> cylinders) {
  for (std::size_t i = 0; i < cylinders.size(); ++i) {
    require_same_base(p, cylinders[i].p());
    for (std::size_t j = i + 1; j < cylinders.size(); ++j) {
      if (cylinders[i].intersects(cylinders[j])) {
        throw std::invalid_argument("cylinders #" + std::to_string(i) + " (" + format_cylinder(cylinders[i]) +
                                    ") and #" + std::to_string(j) + " (" + format_cylinder(cylinders[j]) +
                                    ") overlap");
      }
    }
  }
  return from_cylinders(p, std::move(cylinders));
}

PSet PSet::canonical() const {
  return PSet::from_cylinders(p_, cylinders_);
}

int PSet::max_resolution() const {
  if (cylinders_.empty()) throw std::logic_error("max_resolution of empty set");
  int r = cylinders_.front().resolution();
  for (const auto& c : cylinders_) r = std::max(r, c.resolution());
  return r;
}

int PSet::min_resolution() const {
  if (cylinders_.empty()) throw std::logic_error("min_resolution of empty set");
  int r = cylinders_.front().resolution();
  for (const auto& c : cylinders_) r = std::min(r, c.resolution());
  return r;
}

int PSet::least_fixed_position(int fallback) const {
  bool found = false;
  int lo = fallback;
  for (const auto& c : cylinders_) {
    if (c.anchor().is_identity()) continue;
    lo = found ? std::min(lo, c.anchor().support_lo()) : c.anchor().support_lo();
    found = true;
  }
  return lo;
}

bool PSet::contains_point(const GroupElement& omega) const {
  return std::any_of(cylinders_.begin(), cylinders_.end(), [&](const Cylinder& c) { return c.contains_point(omega); });
}

// ---------------------------------------------------------------- operations

namespace {

void descend(const Cylinder& c, int L, std::vector<Cylinder>& out) {
  if (c.resolution() == L) {
    out.push_back(c);
    return;
  }
  for (const auto& child : c.children()) descend(child, L, out);
}

// P \ C for C strictly inside P.
void subtract_nested(const Cylinder& outer, const Cylinder& inner, std::vector<Cylinder>& out) {
  int p = outer.p();
  for (int r = outer.resolution() + 1; r <= inner.resolution(); ++r) {
    GroupElement prefix = truncate_above(inner.anchor(), r - 1);
    int keep = inner.digit(r);
    for (int d = 0; d < p; ++d) {
      if (d == keep) continue;
      out.emplace_back(r, d == 0 ? prefix : add(prefix, GroupElement::unit(p, r, d)));
    }
  }
}

}  // namespace

PSet refine(const PSet& set, int L, bool keep_finer, const Limits& limits) {
  check_fine_limit(L, limits);
  PSet out(set.p());
  std::vector<Cylinder> cells;
  for (const auto& c : set.cylinders()) {
    if (c.resolution() > L) {
      if (!keep_finer) {
        throw std::invalid_argument("cannot refine cylinder " + format_cylinder(c) + " to coarser resolution " +
                                    std::to_string(L));
      }
      cells.push_back(c);
      continue;
    }
    check_split_count(set.p(), c.resolution(), L, cells.size(), limits);
    descend(c, L, cells);
  }
  std::sort(cells.begin(), cells.end());
  out.cylinders_ = std::move(cells);
  return out;
}

PSet combine(const PSet& a, const PSet& b, SetOp op) {
  require_same_base(a.p(), b.p());
  int p = a.p();
  std::vector<Cylinder> out;
  switch (op) {
    case SetOp::Union:
      out = a.cylinders();
      out.insert(out.end(), b.cylinders().begin(), b.cylinders().end());
      break;
    case SetOp::Intersect:
      for (const auto& x : a.cylinders()) {
        for (const auto& y : b.cylinders()) {
          if (x.intersects(y)) out.push_back(x.resolution() >= y.resolution() ? x : y);
        }
      }
      break;
    case SetOp::Difference:
      for (const auto& x : a.cylinders()) {
        std::vector<Cylinder> pieces{x};
        for (const auto& y : b.cylinders()) {
          if (pieces.empty()) break;
          std::vector<Cylinder> next;
          for (const auto& piece : pieces) {
            if (!piece.intersects(y)) {
              next.push_back(piece);
            } else if (!y.contains(piece)) {
              subtract_nested(piece, y, next);
            }
          }
          pieces = std::move(next);
        }
        out.insert(out.end(), pieces.begin(), pieces.end());
      }
      break;
  }
  return PSet::from_cylinders(p, std::move(out));
}

PSet set_union(const PSet& a, const PSet& b) { return combine(a, b, SetOp::Union); }
PSet set_intersect(const PSet& a, const PSet& b) { return combine(a, b, SetOp::Intersect); }
PSet set_difference(const PSet& a, const PSet& b) { return combine(a, b, SetOp::Difference); }

PSet translate(const PSet& set, const GroupElement& t, const Limits& limits) {
  require_same_base(set.p(), t.p());
  if (t.is_identity()) return set.canonical();
  int finest = t.support_hi();
  std::vector<Cylinder> out;
  for (const auto& c : set.cylinders()) {
    std::vector<Cylinder> cells;
    if (c.resolution() < finest) {
      check_fine_limit(finest, limits);
      check_split_count(set.p(), c.resolution(), finest, out.size(), limits);
      descend(c, finest, cells);
    } else {
      cells.push_back(c);
    }
    for (const auto& cell : cells) out.emplace_back(cell.resolution(), add(cell.anchor(), t));
  }
  return PSet::from_cylinders(set.p(), std::move(out));
}

Cylinder dilate_cylinder(const Cylinder& c, int k) { return Cylinder(c.resolution() + k, dilate(c.anchor(), -k)); }

PSet dilate_set(const PSet& set, int k, const Limits& limits) {
  std::vector<Cylinder> out;
  out.reserve(set.size());
  for (const auto& c : set.cylinders()) {
    check_fine_limit(c.resolution() + k, limits);
    out.push_back(dilate_cylinder(c, k));
  }
  return PSet::from_cylinders(set.p(), std::move(out));
}

Measure measure(const PSet& set) {
  Measure total(set.p());
  for (const auto& c : set.cylinders()) total = total + c.measure();
  return total;
}

bool ae_equal(const PSet& a, const PSet& b) { return a.p() == b.p() && a.canonical() == b.canonical(); }

bool is_subset_ae(const PSet& a, const PSet& b) { return set_difference(a, b).empty(); }

}  // namespace vilenkin
