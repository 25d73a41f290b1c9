#pragma once

#include "vilenkin/wavelet_verifier.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace vilenkin {

inline constexpr int kDefaultDepth = 20;

// Union of the first `depth` forward dilates of a wavelet family.
struct OmegaSigma {
  int p;
  int depth;
  int resolution;       // family resolution L
  int lowest_position;  // least fixed digit position of the family union
  PSet truncated;
  Measure tail_bound;  // p^-depth, the mass still missing from `truncated`
  // U*_{-(lowest_position+depth)}; holds every dilate beyond `depth`.
  Cylinder tail_ball;
  // truncated + tail_ball, when it is a fixed point of X -> sigma(D) + sigma(X).
  // The full union then equals it up to a null set.
  bool self_similar;
  PSet closure;

  // Best known description of the full union and the part left open.
  const PSet& support() const { return self_similar ? closure : truncated; }
  PSet unresolved() const;
};

// Throws std::invalid_argument unless the family is a wavelet set and depth >= 1.
OmegaSigma accumulate_omega_sigma(const WaveletFamily& family, int depth, const Limits& limits = {});

enum class MraVerdict { Certified, Inconclusive, Fail };
const char* to_string(MraVerdict v);

struct MraRow {
  BigInt lambda;
  GroupElement shift;
  Measure overlap;   // mu(T cap (T + shift)) for the truncated union T
  Measure expected;  // 1 at the identity, 0 elsewhere
  std::optional<Measure> closure_overlap;
  bool passed;
};

struct MraReport {
  explicit MraReport(int p) : band(p) {}
  MraVerdict verdict = MraVerdict::Fail;
  Measure band;  // 2 p^-depth
  bool certified_by_depth = false;
  bool self_similar = false;
  std::vector<MraRow> rows;
};

// `widen` adds probe translates beyond the candidate set.
MraReport check_mra_condition(const OmegaSigma& omega, int widen = 0, const Limits& limits = {});

// Outcome of evaluating a piecewise function on a whole cylinder.
struct CellValue {
  enum class Kind { Value, Straddle, Unresolved };
  Kind kind = Kind::Unresolved;
  std::complex<double> value{};

  static CellValue of(std::complex<double> v) { return {Kind::Value, v}; }
  bool resolved() const { return kind == Kind::Value; }
};

// Lambda-periodic piecewise-constant function. Each piece is folded onto U*
// by removing its integer part; whatever the folds leave uncovered is
// reported as unresolved.
class FilterTable {
 public:
  struct Piece {
    PSet region;
    std::complex<double> value;
  };
  struct Folded {
    Cylinder cell;  // inside U*
    GroupElement shift;
    std::complex<double> value;
  };

  // Throws std::invalid_argument if two folded pieces overlap.
  FilterTable(int p, std::vector<Piece> pieces, const Limits& limits = {});
  static FilterTable constant(int p, std::complex<double> value);

  int p() const { return p_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<Folded>& folded() const { return folded_; }
  const PSet& unresolved() const { return unresolved_; }
  // Every value is exactly 0 or 1.
  bool is_binary() const;

  CellValue evaluate(const Cylinder& cell) const;
  std::optional<std::complex<double>> evaluate(const GroupElement& omega) const;

 private:
  int p_;
  std::vector<Piece> pieces_;
  std::vector<Folded> folded_;
  PSet unresolved_;
};

struct Filters {
  FilterTable scaling;
  std::vector<FilterTable> wavelet;  // wavelet[u-1]
};

// Scaling filter: 0 on sigma(D), 1 on the rest of the union. Wavelet filter u:
// 1 on sigma(set u), 0 on the rest.
Filters build_filters(const WaveletFamily& family, const OmegaSigma& omega, const Limits& limits = {});

CellValue evaluate_filter(const FilterTable& table, const Cylinder& cell);
std::optional<std::complex<double>> evaluate_filter(const FilterTable& table, const GroupElement& omega);

// Indicator of `region` on a cell; cells meeting `open` are unresolved.
CellValue evaluate_indicator(const PSet& region, const PSet& open, const Cylinder& cell);

inline constexpr double kFilterTolerance = 1e-12;

inline constexpr const char* kScalingNorm = "scaling_norm";
inline constexpr const char* kWaveletNorm = "wavelet_norm";
inline constexpr const char* kScalingWaveletOrthogonal = "scaling_wavelet_orthogonal";
inline constexpr const char* kWaveletCrossOrthogonal = "wavelet_cross_orthogonal";
inline constexpr const char* kModulationUnitary = "modulation_unitary";

struct FilterIdentityReport {
  explicit FilterIdentityReport(int p) : excluded_mass(p) {}
  bool passed = false;
  bool exact = true;  // 0/1 arithmetic throughout
  int resolution = 0;
  // Per-cell agreement between the column relations and row unitarity.
  bool formulations_agree = true;
  std::uint64_t cells = 0;     // resolution-L cells of U*
  std::uint64_t leaves = 0;    // cells actually evaluated after splitting
  std::uint64_t excluded = 0;  // leaves left unresolved
  Measure excluded_mass;
  std::vector<ConditionRecord> relations;

  const ConditionRecord* find(const std::string& name) const;
};

// Rows are the translates omega + 0.x (single digit x at position 1), columns
// the scaling filter then the wavelet filters. Needs resolution >= 1.
FilterIdentityReport verify_filter_identities(const Filters& filters, int resolution, const Measure& allowed_unresolved,
                                              const Limits& limits = {});

inline constexpr const char* kScalingTwoScale = "scaling_two_scale";
inline constexpr const char* kWaveletTwoScale = "wavelet_two_scale";
inline constexpr const char* kInfiniteProduct = "infinite_product";

struct TwoScaleReport {
  bool passed = false;
  int window = 0;  // cells of U*_window are examined
  std::vector<ConditionRecord> relations;

  const ConditionRecord* find(const std::string& name) const;
};

// Checks phi(rho w) = m0(w) phi(w), psi_u(rho w) = m1_u(w) phi(w) and the
// product of m0(sigma^j w), j = 1..depth, against phi away from the identity.
TwoScaleReport verify_two_scale(const WaveletFamily& family, const OmegaSigma& omega, const Filters& filters,
                                const Limits& limits = {});

inline constexpr const char* kCalderon = "calderon_identity";

// Recomputes the union by the recursion T_k = sigma(D) + sigma(T_{k-1}) and
// compares it with `omega`; also bounds the gain from two more levels.
// Throws std::invalid_argument if the family does not tile.
ConditionRecord verify_calderon(const WaveletFamily& family, const OmegaSigma& omega, const Limits& limits = {});

}  // namespace vilenkin
