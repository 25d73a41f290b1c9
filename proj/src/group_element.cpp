#include "vilenkin/group_element.hpp"

#include <algorithm>
#include <stdexcept>

namespace vilenkin {

void check_base(int p) {
  if (p < 2 || p > kMaxBase) {
    throw std::invalid_argument("base must be in [2, 255], got " + std::to_string(p));
  }
}

GroupElement::GroupElement(int p) : p_(p) { check_base(p); }

GroupElement GroupElement::from_digits(int p, int support_lo, std::vector<std::uint8_t> digits) {
  GroupElement x(p);
  for (auto d : digits) {
    if (d >= p) {
      throw std::invalid_argument("digit " + std::to_string(d) + " out of range for p=" + std::to_string(p));
    }
  }
  auto first = std::find_if(digits.begin(), digits.end(), [](std::uint8_t d) { return d != 0; });
  if (first == digits.end()) return x;
  auto last = std::find_if(digits.rbegin(), digits.rend(), [](std::uint8_t d) { return d != 0; }).base();
  x.lo_ = support_lo + static_cast<int>(first - digits.begin());
  x.digits_.assign(first, last);
  return x;
}

GroupElement GroupElement::unit(int p, int position, int digit) {
  if (digit < 0) throw std::invalid_argument("negative digit");
  return from_digits(p, position, {static_cast<std::uint8_t>(digit)});
}

int GroupElement::digit(int position) const {
  if (digits_.empty() || position < lo_ || position > support_hi()) return 0;
  return digits_[static_cast<std::size_t>(position - lo_)];
}

GroupElement GroupElement::window(int lo, int hi) const {
  if (digits_.empty() || lo > hi) return GroupElement(p_);
  int a = std::max(lo, lo_);
  int b = std::min(hi, support_hi());
  if (a > b) return GroupElement(p_);
  std::vector<std::uint8_t> out(digits_.begin() + (a - lo_), digits_.begin() + (b - lo_ + 1));
  return from_digits(p_, a, std::move(out));
}

GroupElement GroupElement::integer_part() const { return window(lo_, 0); }

GroupElement GroupElement::fractional_part() const {
  return digits_.empty() ? *this : window(1, support_hi());
}

std::strong_ordering GroupElement::operator<=>(const GroupElement& other) const {
  if (auto c = p_ <=> other.p_; c != 0) return c;
  if (digits_.empty() || other.digits_.empty()) {
    return digits_.size() <=> other.digits_.size();
  }
  int lo = std::min(lo_, other.lo_);
  int hi = std::max(support_hi(), other.support_hi());
  for (int j = lo; j <= hi; ++j) {
    if (auto c = digit(j) <=> other.digit(j); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

namespace {

void require_same_base(const GroupElement& x, const GroupElement& y) {
  if (x.p() != y.p()) {
    throw std::invalid_argument("base mismatch: " + std::to_string(x.p()) + " vs " + std::to_string(y.p()));
  }
}

}  // namespace

GroupElement add(const GroupElement& x, const GroupElement& y) {
  require_same_base(x, y);
  if (x.is_identity()) return y;
  if (y.is_identity()) return x;
  int lo = std::min(x.support_lo(), y.support_lo());
  int hi = std::max(x.support_hi(), y.support_hi());
  std::vector<std::uint8_t> out(static_cast<std::size_t>(hi - lo + 1));
  for (int j = lo; j <= hi; ++j) {
    out[static_cast<std::size_t>(j - lo)] = static_cast<std::uint8_t>((x.digit(j) + y.digit(j)) % x.p());
  }
  return GroupElement::from_digits(x.p(), lo, std::move(out));
}

GroupElement negate(const GroupElement& x) {
  std::vector<std::uint8_t> out(x.digits());
  for (auto& d : out) d = static_cast<std::uint8_t>((x.p() - d) % x.p());
  return GroupElement::from_digits(x.p(), x.support_lo(), std::move(out));
}

GroupElement subtract(const GroupElement& x, const GroupElement& y) { return add(x, negate(y)); }

GroupElement dilate(const GroupElement& x, int k) {
  if (x.is_identity()) return x;
  return GroupElement::from_digits(x.p(), x.support_lo() - k, x.digits());
}

GroupElement lambda_decode(const BigInt& n, int p) {
  check_base(p);
  if (n < 0) throw std::invalid_argument("lambda index must be nonnegative");
  std::vector<std::uint8_t> little;  // digit of p^k at index k
  BigInt rest = n;
  while (rest > 0) {
    little.push_back(static_cast<std::uint8_t>(static_cast<int>(rest % p)));
    rest /= p;
  }
  // position -k holds the digit of p^k, so the stored window runs from -(K-1) to 0
  std::reverse(little.begin(), little.end());
  int lo = -(static_cast<int>(little.size()) - 1);
  return GroupElement::from_digits(p, lo, std::move(little));
}

BigInt lambda_encode(const GroupElement& x) {
  if (x.is_identity()) return 0;
  if (x.support_hi() > 0) {
    throw std::invalid_argument("element has a nonzero digit at positive position " +
                                std::to_string(x.support_hi()) + "; not in Lambda");
  }
  BigInt value = 0;
  for (int j = x.support_lo(); j <= x.support_hi(); ++j) {
    value = value * x.p() + x.digit(j);
  }
  // trailing zero positions between support_hi and 0
  for (int j = x.support_hi(); j < 0; ++j) value *= x.p();
  return value;
}

int character_exponent(const GroupElement& x, const GroupElement& omega) {
  require_same_base(x, omega);
  if (x.is_identity() || omega.is_identity()) return 0;
  long long sum = 0;
  for (int j = x.support_lo(); j <= x.support_hi(); ++j) {
    int xd = x.digit(j);
    if (xd != 0) sum += static_cast<long long>(xd) * omega.digit(1 - j);
  }
  return static_cast<int>(sum % x.p());
}

namespace {

std::string digit_text(int d) {
  if (d < 10) return std::string(1, static_cast<char>('0' + d));
  if (d < 36) return std::string(1, static_cast<char>('a' + d - 10));
  return "(" + std::to_string(d) + ")";
}

// Reads digit tokens from one side of the radix point.
std::vector<int> read_digits(std::string_view s, int p, std::string_view whole) {
  std::vector<int> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    int d = -1;
    if (c >= '0' && c <= '9') {
      d = c - '0';
    } else if (c >= 'a' && c <= 'z') {
      d = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'Z') {
      d = c - 'A' + 10;
    } else if (c == '(') {
      auto close = s.find(')', i);
      if (close == std::string_view::npos || close == i + 1) {
        throw std::invalid_argument("malformed element '" + std::string(whole) + "': unclosed digit group");
      }
      d = 0;
      for (std::size_t k = i + 1; k < close; ++k) {
        if (s[k] < '0' || s[k] > '9') {
          throw std::invalid_argument("malformed element '" + std::string(whole) + "'");
        }
        d = d * 10 + (s[k] - '0');
        if (d > kMaxBase) break;
      }
      i = close;
    } else {
      throw std::invalid_argument("malformed element '" + std::string(whole) + "': unexpected '" +
                                  std::string(1, c) + "'");
    }
    if (d >= p) {
      throw std::invalid_argument("digit " + std::to_string(d) + " >= p=" + std::to_string(p) + " in '" +
                                  std::string(whole) + "'");
    }
    out.push_back(d);
  }
  return out;
}

}  // namespace

GroupElement parse_element(std::string_view text, int p) {
  check_base(p);
  auto dot = text.find('.');
  if (dot == std::string_view::npos || text.find('.', dot + 1) != std::string_view::npos) {
    throw std::invalid_argument("malformed element '" + std::string(text) + "': expected exactly one '.'");
  }
  auto ints = read_digits(text.substr(0, dot), p, text);
  auto fracs = read_digits(text.substr(dot + 1), p, text);
  int lo = -(static_cast<int>(ints.size()) - 1);
  if (ints.empty()) lo = 1;
  std::vector<std::uint8_t> all;
  all.reserve(ints.size() + fracs.size());
  for (int d : ints) all.push_back(static_cast<std::uint8_t>(d));
  for (int d : fracs) all.push_back(static_cast<std::uint8_t>(d));
  return GroupElement::from_digits(p, lo, std::move(all));
}

std::string format_element(const GroupElement& x) {
  std::string out;
  if (!x.is_identity()) {
    for (int j = std::min(x.support_lo(), 1); j <= 0; ++j) out += digit_text(x.digit(j));
  }
  out += '.';
  if (!x.is_identity()) {
    for (int j = 1; j <= x.support_hi(); ++j) out += digit_text(x.digit(j));
  }
  return out;
}

}  // namespace vilenkin
