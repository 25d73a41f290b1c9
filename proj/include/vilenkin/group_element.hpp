#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vilenkin {

using BigInt = boost::multiprecision::cpp_int;

// Largest supported base; digits are stored in 8 bits.
inline constexpr int kMaxBase = 255;

void check_base(int p);

// Eventually-zero bi-infinite digit sequence mod p. Digit x_j lives at
// position j. Stored window is trimmed so equal elements compare equal.
class GroupElement {
 public:
  explicit GroupElement(int p);

  // Trims zeros; throws on digits >= p.
  static GroupElement from_digits(int p, int support_lo, std::vector<std::uint8_t> digits);
  static GroupElement unit(int p, int position, int digit);

  int p() const { return p_; }
  int support_lo() const { return lo_; }
  // Position of the last stored digit. Meaningless for the identity.
  int support_hi() const { return lo_ + static_cast<int>(digits_.size()) - 1; }
  const std::vector<std::uint8_t>& digits() const { return digits_; }
  bool is_identity() const { return digits_.empty(); }

  int digit(int position) const;

  // Digits at positions <= 0 (the Lambda component) and > 0.
  GroupElement integer_part() const;
  GroupElement fractional_part() const;
  // Keeps only positions in [lo, hi].
  GroupElement window(int lo, int hi) const;

  bool operator==(const GroupElement& other) const = default;
  // Total order: base, then digits compared from the coarsest position up.
  std::strong_ordering operator<=>(const GroupElement& other) const;

 private:
  int p_;
  int lo_ = 0;
  std::vector<std::uint8_t> digits_;
};

GroupElement add(const GroupElement& x, const GroupElement& y);
GroupElement negate(const GroupElement& x);
GroupElement subtract(const GroupElement& x, const GroupElement& y);

// k > 0 applies rho^k (digits move to lower positions), k < 0 applies sigma^-k.
GroupElement dilate(const GroupElement& x, int k);

// Lambda <-> nonnegative integers: the digit of p^k is x_{-k}.
GroupElement lambda_decode(const BigInt& n, int p);
BigInt lambda_encode(const GroupElement& x);

// sum_j x_j * omega_{1-j} mod p
int character_exponent(const GroupElement& x, const GroupElement& omega);

// Radix-point notation: "d..d0.d1d2..". Digit values above 9 use a-z, values
// of 36 and up use "(k)".
GroupElement parse_element(std::string_view text, int p);
std::string format_element(const GroupElement& x);

}  // namespace vilenkin
