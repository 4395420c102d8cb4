#include "cayleyheat/group.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cayleyheat/errors.hpp"
#include "cayleyheat/tolerance.hpp"

namespace cayleyheat {

namespace {

void require_same_group(const FiniteAbelianGroup& a, const FiniteAbelianGroup& b,
                        const char* what) {
  if (!(a == b)) {
    throw StructuralError(std::string(what) + ": group mismatch (" + a.to_string() +
                          " vs " + b.to_string() + ")");
  }
}

// In-place transform along every cyclic factor. sign = -1 is the forward
// transform (conjugated characters), +1 the unnormalized inverse.
void cyclic_transform(const FiniteAbelianGroup& group,
                      std::vector<std::complex<double>>& data, int sign) {
  const auto& factors = group.factor_sizes();
  const std::size_t order = group.order();
  std::size_t stride = order;
  std::vector<std::complex<double>> line;
  std::vector<std::complex<double>> twiddle;
  for (int n : factors) {
    stride /= static_cast<std::size_t>(n);
    if (n == 1) continue;
    twiddle.resize(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
      const double angle = sign * 2.0 * std::numbers::pi * m / n;
      twiddle[static_cast<std::size_t>(m)] = {std::cos(angle), std::sin(angle)};
    }
    line.resize(static_cast<std::size_t>(n));
    const std::size_t block = stride * static_cast<std::size_t>(n);
    for (std::size_t outer = 0; outer < order; outer += block) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        const std::size_t base = outer + inner;
        for (int k = 0; k < n; ++k) {
          std::complex<double> acc = 0.0;
          int phase = 0;
          for (int g = 0; g < n; ++g) {
            acc += data[base + static_cast<std::size_t>(g) * stride] *
                   twiddle[static_cast<std::size_t>(phase)];
            phase += k;
            if (phase >= n) phase -= n;
          }
          line[static_cast<std::size_t>(k)] = acc;
        }
        for (int k = 0; k < n; ++k) {
          data[base + static_cast<std::size_t>(k) * stride] = line[static_cast<std::size_t>(k)];
        }
      }
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// FiniteAbelianGroup

FiniteAbelianGroup::FiniteAbelianGroup(std::vector<int> factor_sizes, std::size_t max_order)
    : factors_(std::move(factor_sizes)) {
  if (factors_.empty()) factors_.push_back(1);
  order_ = 1;
  for (int n : factors_) {
    if (n < 1) throw DomainError("cyclic factor order must be >= 1, got " + std::to_string(n));
    order_ *= static_cast<std::size_t>(n);
    if (order_ > max_order) {
      throw DomainError("group order exceeds cap " + std::to_string(max_order));
    }
  }
  strides_.assign(factors_.size(), 1);
  for (std::size_t i = factors_.size(); i-- > 1;) {
    strides_[i - 1] = strides_[i] * static_cast<std::size_t>(factors_[i]);
  }
  neg_.resize(order_);
  for (std::size_t i = 0; i < order_; ++i) neg_[i] = sub_index(0, i);
}

FiniteAbelianGroup FiniteAbelianGroup::parse(std::string_view spec, std::size_t max_order) {
  std::string s;
  for (char c : spec) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (s.empty()) throw ParseError("empty group specification");
  std::vector<int> factors;
  std::size_t pos = 0;
  while (pos < s.size()) {
    if (s[pos] != 'z') throw ParseError("group specification '" + std::string(spec) +
                                        "': expected 'Z' at position " + std::to_string(pos));
    ++pos;
    const std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start || pos - start > 9) {
      throw ParseError("group specification '" + std::string(spec) + "': bad factor order");
    }
    factors.push_back(std::stoi(s.substr(start, pos - start)));
    if (pos < s.size()) {
      if (s[pos] != 'x') throw ParseError("group specification '" + std::string(spec) +
                                          "': expected 'x' between factors");
      ++pos;
      if (pos == s.size()) throw ParseError("group specification ends with 'x'");
    }
  }
  return FiniteAbelianGroup(std::move(factors), max_order);
}

GroupElement FiniteAbelianGroup::zero() const {
  return GroupElement{std::vector<int>(factors_.size(), 0)};
}

GroupElement FiniteAbelianGroup::element(std::size_t index) const {
  if (index >= order_) throw StructuralError("element index out of range");
  GroupElement g{std::vector<int>(factors_.size())};
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    g.residues[i] = static_cast<int>((index / strides_[i]) % static_cast<std::size_t>(factors_[i]));
  }
  return g;
}

bool FiniteAbelianGroup::contains(const GroupElement& g) const {
  if (g.residues.size() != factors_.size()) return false;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (g.residues[i] < 0 || g.residues[i] >= factors_[i]) return false;
  }
  return true;
}

std::size_t FiniteAbelianGroup::index_of(const GroupElement& g) const {
  if (!contains(g)) {
    throw StructuralError("element " + element_to_string(g) + " is not in " + to_string());
  }
  std::size_t idx = 0;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    idx += static_cast<std::size_t>(g.residues[i]) * strides_[i];
  }
  return idx;
}

GroupElement FiniteAbelianGroup::add(const GroupElement& g, const GroupElement& h) const {
  if (!contains(g) || !contains(h)) {
    throw StructuralError("elem_add: operands do not belong to " + to_string());
  }
  GroupElement out{std::vector<int>(factors_.size())};
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    out.residues[i] = (g.residues[i] + h.residues[i]) % factors_[i];
  }
  return out;
}

GroupElement FiniteAbelianGroup::negate(const GroupElement& g) const {
  if (!contains(g)) throw StructuralError("negate: element does not belong to " + to_string());
  GroupElement out{std::vector<int>(factors_.size())};
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    out.residues[i] = (factors_[i] - g.residues[i]) % factors_[i];
  }
  return out;
}

GroupElement FiniteAbelianGroup::scale(const GroupElement& g, long long k) const {
  if (!contains(g)) throw StructuralError("scale: element does not belong to " + to_string());
  GroupElement out{std::vector<int>(factors_.size())};
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const long long n = factors_[i];
    long long r = ((k % n) * g.residues[i]) % n;
    if (r < 0) r += n;
    out.residues[i] = static_cast<int>(r);
  }
  return out;
}

std::size_t FiniteAbelianGroup::add_index(std::size_t i, std::size_t j) const {
  std::size_t out = 0;
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    const std::size_t n = static_cast<std::size_t>(factors_[f]);
    std::size_t d = (i / strides_[f]) % n + (j / strides_[f]) % n;
    if (d >= n) d -= n;
    out += d * strides_[f];
  }
  return out;
}

std::size_t FiniteAbelianGroup::sub_index(std::size_t i, std::size_t j) const {
  std::size_t out = 0;
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    const std::size_t n = static_cast<std::size_t>(factors_[f]);
    std::size_t d = (i / strides_[f]) % n + n - (j / strides_[f]) % n;
    if (d >= n) d -= n;
    out += d * strides_[f];
  }
  return out;
}

std::string FiniteAbelianGroup::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) s += "x";
    s += "Z" + std::to_string(factors_[i]);
  }
  return s;
}

std::string FiniteAbelianGroup::element_to_string(const GroupElement& g) const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < g.residues.size(); ++i) {
    if (i) os << ",";
    os << g.residues[i];
  }
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// GroupFunction

GroupFunction::GroupFunction(FiniteAbelianGroup group)
    : group_(std::move(group)), values_(group_.order(), 0.0) {}

GroupFunction::GroupFunction(FiniteAbelianGroup group, std::vector<double> values)
    : group_(std::move(group)), values_(std::move(values)) {
  if (values_.size() != group_.order()) {
    throw StructuralError("GroupFunction: " + std::to_string(values_.size()) +
                          " values for a group of order " + std::to_string(group_.order()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("GroupFunction: non-finite value");
  }
}

double GroupFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GroupFunction::l1_norm() const {
  double s = 0.0;
  for (double v : values_) s += std::abs(v);
  return s;
}

double GroupFunction::l2_norm_squared() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

double GroupFunction::sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

bool GroupFunction::is_even(double rel_tol, double abs_tol) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!approx_equal(values_[i], values_[group_.neg_index(i)], rel_tol, abs_tol)) return false;
  }
  return true;
}

bool GroupFunction::is_nonnegative() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
}

GroupFunction& GroupFunction::operator+=(const GroupFunction& other) {
  require_same_group(group_, other.group_, "operator+");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GroupFunction& GroupFunction::operator-=(const GroupFunction& other) {
  require_same_group(group_, other.group_, "operator-");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GroupFunction& GroupFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// SpectrumFunction

SpectrumFunction::SpectrumFunction(FiniteAbelianGroup group,
                                   std::vector<std::complex<double>> values)
    : group_(std::move(group)), values_(std::move(values)) {
  if (values_.size() != group_.order()) {
    throw StructuralError("SpectrumFunction: length does not match group order");
  }
}

double SpectrumFunction::sup_norm() const {
  double m = 0.0;
  for (auto v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SpectrumFunction::max_imag() const {
  double m = 0.0;
  for (auto v : values_) m = std::max(m, std::abs(v.imag()));
  return m;
}

// ---------------------------------------------------------------------------
// Free functions

double max_abs_diff(const GroupFunction& a, const GroupFunction& b) {
  require_same_group(a.group(), b.group(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

GroupFunction delta(const FiniteAbelianGroup& group) {
  GroupFunction d(group);
  d[0] = 1.0;
  return d;
}

GroupFunction phi(const FiniteAbelianGroup& group, const GroupElement& g0) {
  GroupFunction f(group);
  const std::size_t i = group.index_of(g0);
  f[i] += 1.0;
  f[group.neg_index(i)] += 1.0;
  return f;
}

SpectrumFunction dft(const GroupFunction& f) {
  std::vector<std::complex<double>> data(f.values().begin(), f.values().end());
  cyclic_transform(f.group(), data, -1);
  return SpectrumFunction(f.group(), std::move(data));
}

GroupFunction idft(const SpectrumFunction& s) {
  std::vector<std::complex<double>> data = s.values();
  cyclic_transform(s.group(), data, +1);
  const double inv = 1.0 / static_cast<double>(s.group().order());
  const double limit = 1e-8 * s.sup_norm() * inv;
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::complex<double> v = data[i] * inv;
    if (std::abs(v.imag()) > limit && std::abs(v.imag()) > 0.0) {
      throw NumericalError("idft: imaginary residue " + std::to_string(v.imag()) +
                           " exceeds tolerance; spectrum is not Hermitian");
    }
    out[i] = v.real();
  }
  return GroupFunction(s.group(), std::move(out));
}

GroupFunction convolve(const GroupFunction& f, const GroupFunction& g, ConvolutionMethod method) {
  require_same_group(f.group(), g.group(), "convolve");
  const FiniteAbelianGroup& group = f.group();
  if (method == ConvolutionMethod::spectral) {
    SpectrumFunction fs = dft(f);
    const SpectrumFunction gs = dft(g);
    for (std::size_t k = 0; k < fs.size(); ++k) fs[k] *= gs[k];
    return idft(fs);
  }
  const std::size_t order = group.order();
  std::vector<double> out(order, 0.0);
  for (std::size_t y = 0; y < order; ++y) {
    const double gy = g[y];
    if (gy == 0.0) continue;
    for (std::size_t x = 0; x < order; ++x) {
      out[group.add_index(x, y)] += f[x] * gy;
    }
  }
  return GroupFunction(group, std::move(out));
}

GroupFunction multiply(const GroupFunction& f, const GroupFunction& g) {
  require_same_group(f.group(), g.group(), "multiply");
  GroupFunction out(f.group());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] * g[i];
  return out;
}

GroupFunction cexp_series(const GroupFunction& upsilon, double tol) {
  if (!(tol > 0.0)) throw DomainError("cexp_series: tol must be positive");
  const double l1 = upsilon.l1_norm();
  const std::size_t cap = static_cast<std::size_t>(10.0 * (1.0 + l1)) + 1;
  GroupFunction term = delta(upsilon.group());
  GroupFunction sum = term;
  for (std::size_t n = 1; n <= cap; ++n) {
    term = convolve(term, upsilon, ConvolutionMethod::direct);
    term *= 1.0 / static_cast<double>(n);
    sum += term;
    // ||u^{*n}/n!||_inf shrinks by l1/(n+1) per step; once that ratio is <= 1/2
    // the neglected tail is at most twice the next term.
    const bool contracting = static_cast<double>(n + 1) >= 2.0 * l1;
    if (contracting && term.sup_norm() * l1 / static_cast<double>(n + 1) <
                           tol * sum.sup_norm() * 0.5) {
      return sum;
    }
  }
  throw NumericalError("cexp_series: no convergence within " + std::to_string(cap) + " terms");
}

GroupFunction cexp_spectral(const GroupFunction& upsilon) {
  SpectrumFunction s = dft(upsilon);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = std::exp(s[k]);
  return idft(s);
}

std::vector<PhiTerm> phi_basis_decompose(const GroupFunction& upsilon) {
  const FiniteAbelianGroup& group = upsilon.group();
  if (!upsilon.is_even()) throw DomainError("phi_basis_decompose: input is not even");
  if (!upsilon.is_nonnegative()) throw DomainError("phi_basis_decompose: input has negative values");
  std::vector<PhiTerm> terms;
  for (std::size_t i = 0; i < group.order(); ++i) {
    const std::size_t j = group.neg_index(i);
    if (j < i) continue;  // orbit already represented by j
    const double v = upsilon[i];
    if (v == 0.0) continue;
    const double alpha = (i == j) ? v / 2.0 : v;
    terms.push_back(PhiTerm{alpha, group.element(i)});
  }
  return terms;
}

GroupFunction phi_basis_compose(const FiniteAbelianGroup& group, const std::vector<PhiTerm>& terms) {
  GroupFunction out(group);
  for (const PhiTerm& t : terms) out += phi(group, t.g0) * t.alpha;
  return out;
}

}  // namespace cayleyheat
