#pragma once

#include "vilenkin/mra_builder.hpp"

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace vilenkin {

using Complex = std::complex<double>;

// The quotient U_M / U_{-N}: cells are digit strings at positions -M+1..N,
// each of measure p^-N. Dual cells fix positions 1-N..M and have measure p^-M.
struct QuotientGrid {
  int p;
  int M;
  int N;

  QuotientGrid(int p, int M, int N);

  int digits() const { return M + N; }
  std::size_t size() const { return size_; }

  // Signal index digit k (least significant first) sits at position -M+1+k;
  // dual index digit k sits at position M-k.
  GroupElement cell(std::size_t index) const;
  GroupElement dual_cell(std::size_t index) const;
  // Throws std::out_of_range for elements outside the window.
  std::size_t index_of(const GroupElement& x) const;
  std::size_t dual_index_of(const GroupElement& omega) const;

  // Character exponent between a signal cell and a dual cell.
  int pairing(std::size_t index, std::size_t dual_index) const;

  bool operator==(const QuotientGrid& other) const { return p == other.p && M == other.M && N == other.N; }

 private:
  std::size_t size_;
};

struct GridSignal {
  QuotientGrid grid;
  bool dual = false;  // true for spectra
  std::vector<Complex> values;

  GridSignal(const QuotientGrid& g, bool is_dual);

  double cell_measure() const;
  double norm() const;
};

// Raised when a set or signal does not fit the grid; carries a grid that would.
class AliasingError : public std::runtime_error {
 public:
  AliasingError(const std::string& what, int required_M, int required_N)
      : std::runtime_error(what), required_M(required_M), required_N(required_N) {}
  int required_M;
  int required_N;
};

inline constexpr double kTransformTolerance = 1e-12;
inline constexpr double kGramTolerance = 1e-10;
inline constexpr double kEnergyTolerance = 1e-8;

GridSignal forward(const GridSignal& signal);
GridSignal inverse(const GridSignal& spectrum);

double max_abs_difference(const GridSignal& a, const GridSignal& b);
// <a, b>, linear in a, weighted by the cell measure.
Complex inner_product(const GridSignal& a, const GridSignal& b);

// Smallest grid (M, N >= 0) whose dual window holds `set` without straddling.
QuotientGrid required_grid(const PSet& set);

// Inverse transform of the indicator of `set`.
GridSignal synthesize_wavelet(const PSet& set, const QuotientGrid& grid);

// Inverse transform of the indicator of the dilate union. Without a closed
// form the whole tail ball, of measure at most p^-depth, is counted as inside.
GridSignal synthesize_scaling(const OmegaSigma& omega, const QuotientGrid& grid);

// g(x) = p^{j/2} f(rho^j(x) - n) with n in Lambda.
GridSignal dilate_translate(const GridSignal& f, int j, const GroupElement& n);

struct BasisLabel {
  int u;
  int j;
  BigInt lambda;
};

struct GramResult {
  std::vector<BasisLabel> labels;
  std::vector<Complex> matrix;  // row-major, labels.size() squared
  double max_deviation = 0.0;
};

// Gram matrix of psi^(u)_{j,n} for j in [j_lo, j_hi] and lambda(n) < n_count.
GramResult gram_matrix(const WaveletFamily& family, int j_lo, int j_hi, const BigInt& n_count, const QuotientGrid& grid);

struct Coefficients {
  std::vector<BasisLabel> labels;
  std::vector<Complex> values;
  double energy_ratio = 0.0;      // sum |c|^2 / ||f||^2
  double uncovered_energy = 0.0;  // spectral energy outside the bands
};

// Band j uses every translate that keeps psi_{j,n} inside the grid,
// lambda(n) < p^{M+j}.
Coefficients analyze(const GridSignal& f, const WaveletFamily& family, int j_lo, int j_hi);
GridSignal reconstruct(const Coefficients& coefficients, const WaveletFamily& family, const QuotientGrid& grid);

struct TranslateReport {
  bool passed = false;
  double max_deviation = 0.0;  // numeric path only
  std::vector<Witness> witnesses;
};

// sum_n 1_S(w + n) = 1 on every resolution-R cell of U*, skipping cells inside `exempt`.
TranslateReport check_translate_orthonormality(const PSet& set, int resolution, const PSet& exempt);
// sum_n |F(w + n)|^2 = 1 on every dual cell of U*.
TranslateReport check_translate_orthonormality(const GridSignal& spectrum, double tolerance = kGramTolerance);

// Distance from phi to the span of psi^(u)_{l,n}, l in [-depth, -1].
double v0_residual(const GridSignal& phi, const WaveletFamily& family, int depth);

// CSV with header `cell,re,im`; cells in radix-point notation.
void write_csv(const GridSignal& signal, std::ostream& out);
GridSignal read_csv(std::istream& in, const QuotientGrid& grid, bool dual);

}  // namespace vilenkin
