#include "vilenkin/vc_transform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace vilenkin {

namespace {

constexpr std::size_t kMaxGridSize = std::size_t{1} << 24;

void require_same(const GridSignal& a, const GridSignal& b) {
  if (!(a.grid == b.grid) || a.dual != b.dual) throw std::invalid_argument("signals live on different grids");
}

std::vector<int> index_digits(const QuotientGrid& g, std::size_t index) {
  std::vector<int> d(static_cast<std::size_t>(g.digits()));
  for (auto& v : d) {
    v = static_cast<int>(index % static_cast<std::size_t>(g.p));
    index /= static_cast<std::size_t>(g.p);
  }
  return d;
}

std::size_t digits_index(const QuotientGrid& g, const std::vector<int>& d) {
  std::size_t idx = 0;
  for (std::size_t k = d.size(); k-- > 0;) idx = idx * static_cast<std::size_t>(g.p) + static_cast<std::size_t>(d[k]);
  return idx;
}

// p-th roots of unity, exact at the quarter turns.
std::vector<Complex> unit_roots(int p, int sign) {
  std::vector<Complex> roots(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) {
    if ((4 * k) % p == 0) {
      static const Complex quarter[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      Complex q = quarter[(4 * k / p) % 4];
      roots[static_cast<std::size_t>(k)] = sign > 0 ? q : std::conj(q);
    } else {
      roots[static_cast<std::size_t>(k)] = std::polar(1.0, sign * 2.0 * std::numbers::pi * k / p);
    }
  }
  return roots;
}

// One p-point DFT per digit: the pairing is a sum of digit products.
void tensor_dft(std::vector<Complex>& v, int p, int digits, int sign) {
  const auto roots = unit_roots(p, sign);
  const auto P = static_cast<std::size_t>(p);
  std::vector<Complex> in(P);
  std::size_t stride = 1;
  for (int k = 0; k < digits; ++k) {
    for (std::size_t start = 0; start < v.size(); start += stride * P) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t base = start + off;
        for (std::size_t b = 0; b < P; ++b) in[b] = v[base + b * stride];
        for (std::size_t a = 0; a < P; ++a) {
          Complex sum = 0.0;
          for (std::size_t b = 0; b < P; ++b) sum += in[b] * roots[(a * b) % P];
          v[base + a * stride] = sum;
        }
      }
    }
    stride *= P;
  }
}

QuotientGrid merge(const QuotientGrid& a, int M, int N) { return QuotientGrid(a.p, std::max(a.M, M), std::max(a.N, N)); }

}  // namespace

// ------------------------------------------------------------ grid

QuotientGrid::QuotientGrid(int p_, int M_, int N_) : p(p_), M(M_), N(N_), size_(1) {
  check_base(p);
  if (M < 0 || N < 0) throw std::invalid_argument("grid depths must be nonnegative");
  for (int k = 0; k < M + N; ++k) {
    size_ *= static_cast<std::size_t>(p);
    if (size_ > kMaxGridSize) throw std::invalid_argument("grid larger than " + std::to_string(kMaxGridSize) + " cells");
  }
}

GroupElement QuotientGrid::cell(std::size_t index) const {
  auto d = index_digits(*this, index);
  return GroupElement::from_digits(p, -M + 1, std::vector<std::uint8_t>(d.begin(), d.end()));
}

GroupElement QuotientGrid::dual_cell(std::size_t index) const {
  auto d = index_digits(*this, index);
  std::reverse(d.begin(), d.end());  // ascending positions 1-N..M
  return GroupElement::from_digits(p, 1 - N, std::vector<std::uint8_t>(d.begin(), d.end()));
}

std::size_t QuotientGrid::index_of(const GroupElement& x) const {
  if (!x.is_identity() && (x.support_lo() < -M + 1 || x.support_hi() > N)) {
    throw std::out_of_range(format_element(x) + " is outside the grid window");
  }
  std::vector<int> d(static_cast<std::size_t>(digits()));
  for (int k = 0; k < digits(); ++k) d[static_cast<std::size_t>(k)] = x.digit(-M + 1 + k);
  return digits_index(*this, d);
}

std::size_t QuotientGrid::dual_index_of(const GroupElement& omega) const {
  if (!omega.is_identity() && (omega.support_lo() < 1 - N || omega.support_hi() > M)) {
    throw std::out_of_range(format_element(omega) + " is outside the dual window");
  }
  std::vector<int> d(static_cast<std::size_t>(digits()));
  for (int k = 0; k < digits(); ++k) d[static_cast<std::size_t>(k)] = omega.digit(M - k);
  return digits_index(*this, d);
}

int QuotientGrid::pairing(std::size_t index, std::size_t dual_index) const {
  int e = 0;
  for (int k = 0; k < digits(); ++k) {
    e = (e + static_cast<int>(index % static_cast<std::size_t>(p)) * static_cast<int>(dual_index % static_cast<std::size_t>(p))) % p;
    index /= static_cast<std::size_t>(p);
    dual_index /= static_cast<std::size_t>(p);
  }
  return e;
}

GridSignal::GridSignal(const QuotientGrid& g, bool is_dual) : grid(g), dual(is_dual), values(g.size()) {}

double GridSignal::cell_measure() const { return std::pow(static_cast<double>(grid.p), -(dual ? grid.M : grid.N)); }

double GridSignal::norm() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s * cell_measure());
}

// ------------------------------------------------------------ transform

GridSignal forward(const GridSignal& signal) {
  if (signal.dual) throw std::invalid_argument("forward expects a signal, got a spectrum");
  GridSignal out(signal.grid, true);
  out.values = signal.values;
  tensor_dft(out.values, signal.grid.p, signal.grid.digits(), -1);
  const double scale = signal.cell_measure();
  for (auto& v : out.values) v *= scale;
  return out;
}

GridSignal inverse(const GridSignal& spectrum) {
  if (!spectrum.dual) throw std::invalid_argument("inverse expects a spectrum, got a signal");
  GridSignal out(spectrum.grid, false);
  out.values = spectrum.values;
  tensor_dft(out.values, spectrum.grid.p, spectrum.grid.digits(), +1);
  const double scale = spectrum.cell_measure();
  for (auto& v : out.values) v *= scale;
  return out;
}

double max_abs_difference(const GridSignal& a, const GridSignal& b) {
  require_same(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

Complex inner_product(const GridSignal& a, const GridSignal& b) {
  require_same(a, b);
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * std::conj(b.values[i]);
  return s * a.cell_measure();
}

// ------------------------------------------------------------ synthesis

QuotientGrid required_grid(const PSet& set) {
  int M = 0;
  int N = 0;
  for (const auto& c : set.cylinders()) {
    M = std::max(M, c.resolution());
    N = std::max(N, -c.resolution());
    if (!c.anchor().is_identity()) N = std::max(N, 1 - c.anchor().support_lo());
  }
  return QuotientGrid(set.p(), M, N);
}

namespace {

// Adds `value` on every dual cell inside c; c must fit the window.
void fill_cylinder(GridSignal& spectrum, const Cylinder& c, Complex value) {
  const auto& g = spectrum.grid;
  std::size_t base = 0;
  for (int q = 1 - g.N; q <= c.resolution(); ++q) {
    // position q carries dual digit M - q
    std::size_t weight = 1;
    for (int k = 0; k < g.M - q; ++k) weight *= static_cast<std::size_t>(g.p);
    base += weight * static_cast<std::size_t>(c.anchor().digit(q));
  }
  std::size_t span = 1;
  for (int k = 0; k < g.M - c.resolution(); ++k) span *= static_cast<std::size_t>(g.p);
  for (std::size_t t = 0; t < span; ++t) spectrum.values[base + t] += value;
}

void require_fit(const PSet& set, const QuotientGrid& grid) {
  if (set.p() != grid.p) throw std::invalid_argument("set and grid have different bases");
  auto need = required_grid(set);
  if (need.M > grid.M || need.N > grid.N) {
    auto fit = merge(grid, need.M, need.N);
    throw AliasingError("set does not fit the dual window of grid M=" + std::to_string(grid.M) +
                            " N=" + std::to_string(grid.N) + "; needs M=" + std::to_string(fit.M) +
                            " N=" + std::to_string(fit.N),
                        fit.M, fit.N);
  }
}

}  // namespace

GridSignal synthesize_wavelet(const PSet& set, const QuotientGrid& grid) {
  require_fit(set, grid);
  GridSignal spectrum(grid, true);
  for (const auto& c : set.cylinders()) fill_cylinder(spectrum, c, 1.0);
  return inverse(spectrum);
}

GridSignal synthesize_scaling(const OmegaSigma& omega, const QuotientGrid& grid) {
  // Without self-similarity the closure still carries the whole tail ball.
  return synthesize_wavelet(omega.closure.canonical(), grid);
}

// ------------------------------------------------------------ dilation and translation

GridSignal dilate_translate(const GridSignal& f, int j, const GroupElement& n) {
  if (f.dual) throw std::invalid_argument("dilate_translate acts on signals");
  const auto& g = f.grid;
  const int lo = -g.M + 1;
  if (n.p() != g.p) throw std::invalid_argument("translate has the wrong base");
  if (!n.is_identity() && n.support_hi() > 0) throw std::invalid_argument("translate must lie in Lambda");
  // the support moves to sigma^j(U_M + n)
  if (!n.is_identity() && n.support_lo() + j < lo) {
    throw AliasingError("translate " + format_element(n) + " leaves the grid", 1 - n.support_lo() - j, g.N);
  }
  double peak = 0.0;
  double energy = 0.0;
  for (const auto& v : f.values) {
    peak = std::max(peak, std::abs(v));
    energy += std::norm(v);
  }
  const int D = g.digits();
  if (j > 0) {
    // rho^j reads j digits above the fine cut-off; f must not depend on them
    std::size_t low_span = 1;
    for (int k = 0; k < std::max(0, D - j); ++k) low_span *= static_cast<std::size_t>(g.p);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      if (std::abs(f.values[i] - f.values[i % low_span]) > kTransformTolerance * std::max(1.0, peak)) {
        throw AliasingError("dilation by " + std::to_string(j) + " needs a finer grid", g.M, g.N + j);
      }
    }
  }
  const double scale = std::pow(static_cast<double>(g.p), j / 2.0);
  GridSignal out(g, false);
  std::vector<int> y(static_cast<std::size_t>(D));
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    auto x = index_digits(g, i);
    // (rho^j x)_q = x_{q+j}; below the window rho^j(x) - n must vanish
    bool inside = true;
    for (int q = lo - j; q < lo; ++q) {
      int src = q + j;
      int v = src <= g.N ? x[static_cast<std::size_t>(src - lo)] : 0;
      if (v != n.digit(q)) inside = false;
    }
    if (!inside) continue;
    for (int q = lo; q <= g.N; ++q) {
      int src = q + j;
      int v = src >= lo && src <= g.N ? x[static_cast<std::size_t>(src - lo)] : 0;
      y[static_cast<std::size_t>(q - lo)] = ((v - n.digit(q)) % g.p + g.p) % g.p;
    }
    out.values[i] = scale * f.values[digits_index(g, y)];
  }
  double moved = 0.0;
  for (const auto& v : out.values) moved += std::norm(v);
  // rho^j scales measure by p^j, so the energy is preserved unless support leaves U_M
  if (std::abs(moved - energy) > 1e-9 * std::max(energy, 1e-300)) {
    int M = j < 0 ? g.M - j : g.M;
    throw AliasingError("dilation by " + std::to_string(j) + " pushes support outside U_M", M, g.N);
  }
  return out;
}

// ------------------------------------------------------------ Gram matrix and expansions

namespace {

struct BasisFunction {
  BasisLabel label;
  GridSignal signal;
};

std::vector<BasisFunction> build_basis(const WaveletFamily& family, const QuotientGrid& grid, int j_lo, int j_hi,
                                       const BigInt* n_count) {
  std::vector<BasisFunction> out;
  for (int u = 1; u < family.p(); ++u) {
    GridSignal psi = synthesize_wavelet(family.set(u), grid);
    for (int j = j_lo; j <= j_hi; ++j) {
      BigInt count = 1;
      if (n_count) {
        count = *n_count;
      } else {
        if (grid.M + j < 0) {
          throw AliasingError("band " + std::to_string(j) + " has no translate inside U_M", -j, grid.N);
        }
        for (int k = 0; k < grid.M + j; ++k) count *= grid.p;
      }
      for (BigInt lambda = 0; lambda < count; ++lambda) {
        out.push_back({{u, j, lambda}, dilate_translate(psi, j, lambda_decode(lambda, grid.p))});
      }
    }
  }
  return out;
}

}  // namespace

GramResult gram_matrix(const WaveletFamily& family, int j_lo, int j_hi, const BigInt& n_count, const QuotientGrid& grid) {
  auto basis = build_basis(family, grid, j_lo, j_hi, &n_count);
  GramResult r;
  const std::size_t n = basis.size();
  r.matrix.resize(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    r.labels.push_back(basis[a].label);
    for (std::size_t b = a; b < n; ++b) {
      Complex v = inner_product(basis[a].signal, basis[b].signal);
      r.matrix[a * n + b] = v;
      r.matrix[b * n + a] = std::conj(v);
      r.max_deviation = std::max(r.max_deviation, std::abs(v - (a == b ? 1.0 : 0.0)));
    }
  }
  return r;
}

Coefficients analyze(const GridSignal& f, const WaveletFamily& family, int j_lo, int j_hi) {
  if (f.dual) throw std::invalid_argument("analyze expects a signal");
  auto basis = build_basis(family, f.grid, j_lo, j_hi, nullptr);
  Coefficients c;
  double energy = 0.0;
  for (const auto& b : basis) {
    c.labels.push_back(b.label);
    c.values.push_back(inner_product(f, b.signal));
    energy += std::norm(c.values.back());
  }
  const double total = f.norm() * f.norm();
  c.energy_ratio = total > 0 ? energy / total : 0.0;

  // spectral energy on dual cells outside every band
  PSet bands(family.p());
  for (int u = 1; u < family.p(); ++u) {
    for (int j = j_lo; j <= j_hi; ++j) bands = set_union(bands, dilate_set(family.set(u), -j));
  }
  auto spectrum = forward(f);
  for (std::size_t i = 0; i < spectrum.values.size(); ++i) {
    Cylinder cell(f.grid.M, f.grid.dual_cell(i));
    if (!is_subset_ae(PSet::of(cell), bands)) c.uncovered_energy += std::norm(spectrum.values[i]) * spectrum.cell_measure();
  }
  return c;
}

GridSignal reconstruct(const Coefficients& coefficients, const WaveletFamily& family, const QuotientGrid& grid) {
  GridSignal out(grid, false);
  if (coefficients.labels.empty()) return out;
  int j_lo = coefficients.labels.front().j;
  int j_hi = j_lo;
  for (const auto& l : coefficients.labels) {
    j_lo = std::min(j_lo, l.j);
    j_hi = std::max(j_hi, l.j);
  }
  auto basis = build_basis(family, grid, j_lo, j_hi, nullptr);
  std::map<std::tuple<int, int, BigInt>, const GridSignal*> lookup;
  for (const auto& b : basis) lookup[{b.label.u, b.label.j, b.label.lambda}] = &b.signal;
  for (std::size_t k = 0; k < coefficients.labels.size(); ++k) {
    const auto& l = coefficients.labels[k];
    auto it = lookup.find({l.u, l.j, l.lambda});
    if (it == lookup.end()) throw std::invalid_argument("coefficient label outside the grid's basis");
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += coefficients.values[k] * it->second->values[i];
  }
  return out;
}

// ------------------------------------------------------------ translate orthonormality

TranslateReport check_translate_orthonormality(const PSet& set, int resolution, const PSet& exempt) {
  const int p = set.p();
  const int R = std::max({resolution, set.max_resolution(), 0});
  std::map<Cylinder, int> cover;
  for (const auto& piece : integer_part_partition(set)) {
    const PSet cells = refine(translate(piece.piece, negate(piece.shift)), R);
    for (const auto& c : cells.cylinders()) ++cover[c];
  }
  TranslateReport r;
  const PSet grid = refine(PSet::of(Cylinder::ball(p, 0)), R);
  for (const auto& cell : grid.cylinders()) {
    if (!exempt.empty() && is_subset_ae(PSet::of(cell), exempt)) continue;
    auto it = cover.find(cell);
    int k = it == cover.end() ? 0 : it->second;
    if (k != 1) r.witnesses.push_back({"translate_cover", cell, "covered " + std::to_string(k) + " times"});
  }
  r.passed = r.witnesses.empty();
  return r;
}

TranslateReport check_translate_orthonormality(const GridSignal& spectrum, double tolerance) {
  if (!spectrum.dual) throw std::invalid_argument("expected a spectrum");
  const auto& g = spectrum.grid;
  // dual digits 0..M-1 are positions M..1; the rest are the Lambda part
  std::size_t frac = 1;
  for (int k = 0; k < g.M; ++k) frac *= static_cast<std::size_t>(g.p);
  const std::size_t integer = g.size() / frac;
  TranslateReport r;
  for (std::size_t a = 0; a < frac; ++a) {
    double sum = 0.0;
    for (std::size_t b = 0; b < integer; ++b) sum += std::norm(spectrum.values[a + b * frac]);
    double dev = std::abs(sum - 1.0);
    r.max_deviation = std::max(r.max_deviation, dev);
    if (dev > tolerance) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "sum %.12g", sum);
      r.witnesses.push_back({"translate_sum", Cylinder(g.M, g.dual_cell(a)), buf});
    }
  }
  std::sort(r.witnesses.begin(), r.witnesses.end(), [](const Witness& x, const Witness& y) { return *x.cell < *y.cell; });
  r.passed = r.witnesses.empty();
  return r;
}

// ------------------------------------------------------------ V0 residual

double v0_residual(const GridSignal& phi, const WaveletFamily& family, int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  if (depth == 0) return phi.norm();
  if (phi.grid.M < depth) {
    throw AliasingError("residual at depth " + std::to_string(depth) + " needs M >= depth", depth, phi.grid.N);
  }
  auto coeffs = analyze(phi, family, -depth, -1);
  GridSignal rest = phi;
  auto projection = reconstruct(coeffs, family, phi.grid);
  for (std::size_t i = 0; i < rest.values.size(); ++i) rest.values[i] -= projection.values[i];
  return rest.norm();
}

// ------------------------------------------------------------ CSV

void write_csv(const GridSignal& signal, std::ostream& out) {
  out << "cell,re,im\n";
  char buf[96];
  for (std::size_t i = 0; i < signal.values.size(); ++i) {
    auto label = format_element(signal.dual ? signal.grid.dual_cell(i) : signal.grid.cell(i));
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", signal.values[i].real(), signal.values[i].imag());
    out << label << buf;
  }
}

GridSignal read_csv(std::istream& in, const QuotientGrid& grid, bool dual) {
  GridSignal s(grid, dual);
  std::vector<bool> seen(grid.size(), false);
  std::string line;
  if (!std::getline(in, line) || line != "cell,re,im") throw std::invalid_argument("line 1: expected header 'cell,re,im'");
  std::size_t line_no = 1;
  std::size_t filled = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    auto c1 = line.find(',');
    auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) throw std::invalid_argument(where + "expected three fields");
    std::size_t index = 0;
    try {
      auto x = parse_element(line.substr(0, c1), grid.p);
      index = dual ? grid.dual_index_of(x) : grid.index_of(x);
    } catch (const std::exception& e) {
      throw std::invalid_argument(where + e.what());
    }
    auto number = [&](const std::string& text) {
      char* end = nullptr;
      double v = std::strtod(text.c_str(), &end);
      if (text.empty() || *end != '\0') throw std::invalid_argument(where + "bad number '" + text + "'");
      return v;
    };
    double re = number(line.substr(c1 + 1, c2 - c1 - 1));
    double im = number(line.substr(c2 + 1));
    if (seen[index]) throw std::invalid_argument(where + "duplicate cell");
    seen[index] = true;
    ++filled;
    s.values[index] = Complex(re, im);
  }
  if (filled != grid.size()) {
    throw std::invalid_argument("expected " + std::to_string(grid.size()) + " cells, got " + std::to_string(filled));
  }
  return s;
}

}  // namespace vilenkin
