#include "obpm/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "obpm/special_functions.hpp"

namespace obpm::fock {

namespace {

constexpr double kPi = std::numbers::pi;

std::int64_t product(const std::vector<int>& dims) {
  std::int64_t p = 1;
  for (int d : dims) p *= d;
  return p;
}

void check_mode(const PureState& s, int mode) {
  if (mode < 0 || mode >= s.mode_count()) {
    throw std::out_of_range("mode index " + std::to_string(mode) +
                            " out of range for " +
                            std::to_string(s.mode_count()) + " mode(s)");
  }
}

// Strides for row-major layout: index = sum_k n_k * stride_k.
std::vector<std::int64_t> strides_of(const std::vector<int>& dims) {
  std::vector<std::int64_t> st(dims.size());
  std::int64_t acc = 1;
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    st[k] = acc;
    acc *= dims[k];
  }
  return st;
}

}  // namespace

int cutoff_for_mean_photon(double mu) {
  if (mu < 0.0) throw std::invalid_argument("mean photon number must be >= 0");
  return static_cast<int>(std::ceil(mu + 10.0 * std::sqrt(mu + 1.0) + 20.0));
}

double PureState::norm_sq() const {
  double acc = 0.0;
  for (const cxd& a : amps) acc += std::norm(a);
  return acc;
}

double PureState::norm() const { return std::sqrt(norm_sq()); }

const cxd& PureState::at(std::initializer_list<int> index) const {
  if (static_cast<int>(index.size()) != mode_count()) {
    throw std::invalid_argument("multi-index rank mismatch");
  }
  const auto st = strides_of(dims);
  std::int64_t flat = 0;
  int k = 0;
  for (int n : index) {
    if (n < 0 || n >= dims[k]) throw std::out_of_range("multi-index out of range");
    flat += n * st[k];
    ++k;
  }
  return amps[flat];
}

PureState make_state(std::vector<int> dims) {
  if (dims.empty()) throw std::invalid_argument("state needs at least one mode");
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("mode dimension must be >= 1");
  }
  PureState s;
  s.dims = std::move(dims);
  s.amps.assign(product(s.dims), cxd{0.0, 0.0});
  return s;
}

PureState basis_state(const std::vector<int>& dims, const std::vector<int>& occupation) {
  if (occupation.size() != dims.size()) {
    throw std::invalid_argument("occupation rank mismatch");
  }
  PureState s = make_state(dims);
  const auto st = strides_of(dims);
  std::int64_t flat = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (occupation[k] < 0 || occupation[k] >= dims[k]) {
      throw std::out_of_range("occupation exceeds mode dimension");
    }
    flat += occupation[k] * st[k];
  }
  s.amps[flat] = 1.0;
  return s;
}

cxd inner_product(const PureState& a, const PureState& b) {
  if (a.dims != b.dims) throw std::invalid_argument("inner_product: dim mismatch");
  cxd acc{0.0, 0.0};
  for (std::int64_t i = 0; i < a.size(); ++i) acc += std::conj(a.amps[i]) * b.amps[i];
  return acc;
}

PureState tensor(const PureState& a, const PureState& b) {
  PureState out;
  out.dims = a.dims;
  out.dims.insert(out.dims.end(), b.dims.begin(), b.dims.end());
  out.amps.resize(a.size() * b.size());
  for (std::int64_t i = 0; i < a.size(); ++i) {
    for (std::int64_t j = 0; j < b.size(); ++j) {
      out.amps[i * b.size() + j] = a.amps[i] * b.amps[j];
    }
  }
  return out;
}

PureState scaled(const PureState& s, cxd factor) {
  PureState out = s;
  for (cxd& a : out.amps) a *= factor;
  return out;
}

PureState normalized(const PureState& s) {
  const double n = s.norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero state");
  return scaled(s, 1.0 / n);
}

PureState rotate_mode(const PureState& s, int mode, double phi) {
  check_mode(s, mode);
  const auto st = strides_of(s.dims);
  std::vector<cxd> phases(s.dims[mode]);
  for (int n = 0; n < s.dims[mode]; ++n) {
    phases[n] = std::polar(1.0, phi * n);
  }
  PureState out = s;
  for (std::int64_t i = 0; i < out.size(); ++i) {
    const int n = static_cast<int>((i / st[mode]) % s.dims[mode]);
    out.amps[i] *= phases[n];
  }
  return out;
}

double mean_photon(const PureState& s, int mode) {
  check_mode(s, mode);
  const auto st = strides_of(s.dims);
  double acc = 0.0;
  for (std::int64_t i = 0; i < s.size(); ++i) {
    const int n = static_cast<int>((i / st[mode]) % s.dims[mode]);
    acc += n * std::norm(s.amps[i]);
  }
  const double nrm = s.norm_sq();
  return acc / nrm;
}

PureState coherent_state(double r, double theta, int cutoff) {
  if (r < 0.0) throw std::invalid_argument("coherent_state: r must be >= 0");
  if (cutoff < 1) throw std::invalid_argument("coherent_state: cutoff must be >= 1");
  PureState s = make_state({cutoff});
  if (r == 0.0) {
    s.amps[0] = 1.0;
    return s;
  }
  const double log_r = std::log(r);
  double mass = 0.0;
  for (int n = 0; n < cutoff; ++n) {
    const double lm = -0.5 * r * r + n * log_r - 0.5 * sf::log_factorial(n);
    s.amps[n] = std::polar(std::exp(lm), n * theta);
    mass += std::exp(2.0 * lm);
  }
  const double tail = 1.0 - mass;
  if (tail > kTailTolerance) {
    throw std::invalid_argument(
        "coherent_state: cutoff " + std::to_string(cutoff) +
        " leaves tail mass " + std::to_string(tail) + " for r = " +
        std::to_string(r) + "; policy size is " +
        std::to_string(cutoff_for_mean_photon(r * r)));
  }
  return s;
}

PureState quadrature_state(double x, double theta, int cutoff) {
  if (cutoff < 2) throw std::invalid_argument("quadrature_state: cutoff must be >= 2");
  const std::vector<double> c = sf::scaled_hermite_coeffs(x, cutoff - 1);
  const double pref = std::pow(2.0 * kPi, -0.25) * std::exp(-x * x / 4.0);
  PureState s = make_state({cutoff});
  for (int n = 0; n < cutoff; ++n) {
    s.amps[n] = pref * c[n] * std::polar(1.0, n * theta);
  }
  return s;
}

PureState squeezed_vacuum(double s_par, double delta, int cutoff) {
  if (s_par < 0.0) throw std::invalid_argument("squeezed_vacuum: s must be >= 0");
  if (cutoff < 1) throw std::invalid_argument("squeezed_vacuum: cutoff must be >= 1");
  PureState s = make_state({cutoff});
  if (s_par == 0.0) {
    s.amps[0] = 1.0;
    return s;
  }
  const double th = std::tanh(s_par);
  const double log_th = std::log(th);
  const double log_cosh = std::log(std::cosh(s_par));
  double mass = 0.0;
  for (int n = 0; n < cutoff; n += 2) {
    const int m = n / 2;
    // (cosh s)^{-1/2} (-e^{i delta} tanh s)^m sqrt(n!) / (2^m m!)
    const double lm = -0.5 * log_cosh + m * log_th + 0.5 * sf::log_factorial(n) -
                      m * std::log(2.0) - sf::log_factorial(m);
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    s.amps[n] = sign * std::exp(lm) * std::polar(1.0, m * delta);
    mass += std::exp(2.0 * lm);
  }
  const double tail = 1.0 - mass;
  if (tail > kTailTolerance) {
    throw std::invalid_argument(
        "squeezed_vacuum: cutoff " + std::to_string(cutoff) +
        " leaves tail mass " + std::to_string(tail) + "; policy size is " +
        std::to_string(cutoff_for_mean_photon(std::sinh(s_par) * std::sinh(s_par))));
  }
  return s;
}

PureState two_mode_squeezed(double eta, double phase2, int cutoff) {
  if (eta < 0.0 || eta >= 1.0) {
    throw std::invalid_argument(
        "two_mode_squeezed: eta must lie in [0, 1); eta = 1 is improper, use "
        "eta = 1 - eps instead");
  }
  if (cutoff < 1) throw std::invalid_argument("two_mode_squeezed: cutoff must be >= 1");
  PureState s = make_state({cutoff, cutoff});
  const double pref = std::sqrt(1.0 - eta * eta);
  for (int n = 0; n < cutoff; ++n) {
    s.amps[static_cast<std::int64_t>(n) * cutoff + n] =
        pref * std::pow(eta, n) * std::polar(1.0, 2.0 * n * phase2);
  }
  if (eta > 0.0) {
    const double tail = std::pow(eta, 2.0 * cutoff);
    if (tail > kTailTolerance) {
      const double mu = eta * eta / (1.0 - eta * eta);
      throw std::invalid_argument(
          "two_mode_squeezed: cutoff " + std::to_string(cutoff) +
          " leaves tail mass " + std::to_string(tail) + "; policy size is " +
          std::to_string(cutoff_for_mean_photon(mu)));
    }
  }
  return s;
}

namespace {

// <p, q| BS |m, n> with p + q = m + n:
//   2^{-(m+n)/2} sqrt(p! q! / (m! n!)) sum_l (-1)^l C(m, p-l) C(n, l).
// Row-major table over (m, n, p).
struct BsTable {
  int d1, d2;
  std::vector<double> elems;  // (m * d2 + n) * (d1 + d2 - 1) + p

  double elem(int m, int n, int p) const {
    return elems[(static_cast<std::int64_t>(m) * d2 + n) * (d1 + d2 - 1) + p];
  }
};

BsTable build_bs_table(int d1, int d2) {
  const int dout = d1 + d2 - 1;
  const int nmax = std::max(d1, d2);
  // Pascal triangle in doubles; exact below 2^53.
  std::vector<std::vector<double>> binom(nmax);
  for (int n = 0; n < nmax; ++n) {
    binom[n].resize(n + 1);
    binom[n][0] = binom[n][n] = 1.0;
    for (int k = 1; k < n; ++k) binom[n][k] = binom[n - 1][k - 1] + binom[n - 1][k];
  }
  BsTable t{d1, d2, {}};
  t.elems.assign(static_cast<std::int64_t>(d1) * d2 * dout, 0.0);
  for (int m = 0; m < d1; ++m) {
    for (int n = 0; n < d2; ++n) {
      const int total = m + n;
      for (int p = 0; p <= total; ++p) {
        const int q = total - p;
        double sum = 0.0;
        const int l_lo = std::max(0, p - m);
        const int l_hi = std::min(n, p);
        for (int l = l_lo; l <= l_hi; ++l) {
          const double term = binom[m][p - l] * binom[n][l];
          sum += (l % 2 == 0) ? term : -term;
        }
        if (sum == 0.0) continue;
        const double log_scale =
            0.5 * (sf::log_factorial(p) + sf::log_factorial(q) -
                   sf::log_factorial(m) - sf::log_factorial(n)) -
            0.5 * total * std::log(2.0);
        t.elems[(static_cast<std::int64_t>(m) * d2 + n) * dout + p] =
            sum * std::exp(log_scale);
      }
    }
  }
  return t;
}

}  // namespace

PureState apply_beamsplitter(const PureState& s, int m1, int m2) {
  check_mode(s, m1);
  check_mode(s, m2);
  if (m1 == m2) throw std::invalid_argument("beamsplitter needs two distinct modes");
  const int d1 = s.dims[m1];
  const int d2 = s.dims[m2];
  const int dout = d1 + d2 - 1;
  const BsTable table = build_bs_table(d1, d2);

  std::vector<int> out_dims = s.dims;
  out_dims[m1] = dout;
  out_dims[m2] = dout;
  PureState out = make_state(out_dims);

  const auto in_st = strides_of(s.dims);
  const auto out_st = strides_of(out_dims);
  const std::int64_t env = s.size() / (static_cast<std::int64_t>(d1) * d2);

  // Enumerate the environment (all modes but m1, m2) by walking the input
  // index space with m1, m2 pinned to zero.
  std::vector<int> idx(s.dims.size(), 0);
  for (std::int64_t e = 0; e < env; ++e) {
    std::int64_t base_in = 0, base_out = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      base_in += idx[k] * in_st[k];
      base_out += idx[k] * out_st[k];
    }
    for (int m = 0; m < d1; ++m) {
      for (int n = 0; n < d2; ++n) {
        const cxd a = s.amps[base_in + m * in_st[m1] + n * in_st[m2]];
        if (a == cxd{0.0, 0.0}) continue;
        const int total = m + n;
        for (int p = 0; p <= total; ++p) {
          const double el = table.elem(m, n, p);
          if (el == 0.0) continue;
          out.amps[base_out + p * out_st[m1] + (total - p) * out_st[m2]] += a * el;
        }
      }
    }
    // Advance the environment multi-index, skipping m1 and m2.
    for (int k = static_cast<int>(idx.size()) - 1; k >= 0; --k) {
      if (k == m1 || k == m2) continue;
      if (++idx[k] < s.dims[k]) break;
      idx[k] = 0;
    }
  }
  return out;
}

namespace {

PureState contract_one_mode(const PureState& s, int mode, const PureState& bra) {
  if (bra.mode_count() != 1) {
    throw std::invalid_argument("project_partial: bras must be single-mode");
  }
  if (bra.dims[0] != s.dims[mode]) {
    throw std::invalid_argument("project_partial: bra dimension " +
                                std::to_string(bra.dims[0]) +
                                " does not match mode dimension " +
                                std::to_string(s.dims[mode]));
  }
  const auto st = strides_of(s.dims);
  const int d = s.dims[mode];

  std::vector<int> out_dims;
  for (int k = 0; k < s.mode_count(); ++k) {
    if (k != mode) out_dims.push_back(s.dims[k]);
  }
  const bool scalar_result = out_dims.empty();
  if (scalar_result) out_dims.push_back(1);
  PureState out = make_state(out_dims);

  const std::int64_t env = s.size() / d;
  std::vector<int> idx(s.dims.size(), 0);
  for (std::int64_t e = 0; e < env; ++e) {
    std::int64_t base_in = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) base_in += idx[k] * st[k];
    cxd acc{0.0, 0.0};
    for (int n = 0; n < d; ++n) {
      acc += std::conj(bra.amps[n]) * s.amps[base_in + n * st[mode]];
    }
    out.amps[scalar_result ? 0 : e] = acc;
    for (int k = static_cast<int>(idx.size()) - 1; k >= 0; --k) {
      if (k == mode) continue;
      if (++idx[k] < s.dims[k]) break;
      idx[k] = 0;
    }
  }
  return out;
}

}  // namespace

PureState project_partial(const PureState& s,
                          const std::vector<std::pair<int, PureState>>& bras) {
  if (bras.empty()) return s;
  std::vector<std::pair<int, const PureState*>> order;
  order.reserve(bras.size());
  for (const auto& [mode, bra] : bras) {
    check_mode(s, mode);
    for (const auto& [seen, unused] : order) {
      if (seen == mode) throw std::invalid_argument("project_partial: repeated mode");
    }
    order.emplace_back(mode, &bra);
  }
  // Contract the highest mode first so lower mode indices stay valid.
  std::sort(order.begin(), order.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  PureState cur = contract_one_mode(s, order[0].first, *order[0].second);
  for (std::size_t i = 1; i < order.size(); ++i) {
    cur = contract_one_mode(cur, order[i].first, *order[i].second);
  }
  return cur;
}

// ---- LinearOp ----

std::int64_t LinearOp::in_size() const {
  std::int64_t p = 1;
  for (int d : in_dims) p *= d;
  return p;
}

std::int64_t LinearOp::out_size() const {
  std::int64_t p = 1;
  for (int d : out_dims) p *= d;
  return p;
}

cxd& LinearOp::at(std::int64_t row, std::int64_t col) {
  return entries[row * in_size() + col];
}

const cxd& LinearOp::at(std::int64_t row, std::int64_t col) const {
  return entries[row * in_size() + col];
}

namespace {
LinearOp zero_op(std::vector<int> out_dims, std::vector<int> in_dims) {
  LinearOp op;
  op.out_dims = std::move(out_dims);
  op.in_dims = std::move(in_dims);
  op.entries.assign(op.out_size() * op.in_size(), cxd{0.0, 0.0});
  return op;
}
}  // namespace

LinearOp identity_op(int dim) {
  LinearOp op = zero_op({dim}, {dim});
  for (int n = 0; n < dim; ++n) op.at(n, n) = 1.0;
  return op;
}

LinearOp annihilation_op(int dim) {
  LinearOp op = zero_op({dim}, {dim});
  for (int n = 1; n < dim; ++n) op.at(n - 1, n) = std::sqrt(static_cast<double>(n));
  return op;
}

LinearOp creation_op(int dim) {
  LinearOp op = zero_op({dim}, {dim});
  for (int n = 0; n + 1 < dim; ++n) op.at(n + 1, n) = std::sqrt(n + 1.0);
  return op;
}

LinearOp number_op(int dim) {
  LinearOp op = zero_op({dim}, {dim});
  for (int n = 0; n < dim; ++n) op.at(n, n) = static_cast<double>(n);
  return op;
}

LinearOp quadrature_op(double theta, int dim) {
  LinearOp op = zero_op({dim}, {dim});
  const cxd down = std::polar(1.0, -theta);
  const cxd up = std::polar(1.0, theta);
  for (int n = 1; n < dim; ++n) {
    op.at(n - 1, n) = down * std::sqrt(static_cast<double>(n));
    op.at(n, n - 1) = up * std::sqrt(static_cast<double>(n));
  }
  return op;
}

LinearOp displacement_op(cxd alpha, int cutoff) {
  LinearOp op = zero_op({cutoff}, {cutoff});
  const double a2 = std::norm(alpha);
  if (a2 == 0.0) return identity_op(cutoff);
  const double log_abs = 0.5 * std::log(a2);
  const double arg = std::arg(alpha);
  // <m|D|n> for m >= n: sqrt(n!/m!) alpha^{m-n} e^{-a2/2} L_n^{(m-n)}(a2),
  // and <m|D|n> = conj(<n|D|m>) * (-1)^{n-m} for m < n.
  for (int diff = 0; diff < cutoff; ++diff) {
    // Associated Laguerre L_n^{(diff)}(a2) by upward recurrence in n.
    double lm1 = 0.0;      // L_{n-1}
    double l = 1.0;        // L_0
    for (int n = 0; n + diff < cutoff; ++n) {
      const int m = n + diff;
      const double log_scale =
          0.5 * (sf::log_factorial(n) - sf::log_factorial(m)) + diff * log_abs -
          0.5 * a2;
      const double mag = std::exp(log_scale) * l;  // signed via the Laguerre value
      const cxd val = mag * std::polar(1.0, diff * arg);
      op.at(m, n) = val;
      if (diff > 0) {
        // <n|D|m> = conj(val with alpha -> -alpha) = conj(val) * (-1)^diff
        op.at(n, m) = std::conj(val) * ((diff % 2 == 0) ? 1.0 : -1.0);
      }
      // Advance the Laguerre recurrence:
      // (n+1) L_{n+1} = (2n + 1 + k - x) L_n - (n + k) L_{n-1}, k = diff, x = a2.
      const double lnext =
          ((2.0 * n + 1.0 + diff - a2) * l - (n + diff) * lm1) / (n + 1.0);
      lm1 = l;
      l = lnext;
    }
  }
  return op;
}

LinearOp exp_annihilation_op(cxd c, int dim) {
  LinearOp op = identity_op(dim);
  if (c == cxd{0.0, 0.0}) return op;
  for (int m = 0; m < dim; ++m) {
    cxd coeff = 1.0;
    for (int n = m + 1; n < dim; ++n) {
      // c^{n-m} sqrt(n!/m!) / (n-m)!
      coeff *= c / static_cast<double>(n - m);
      op.at(m, n) = coeff * std::exp(0.5 * (sf::log_factorial(n) - sf::log_factorial(m)));
    }
  }
  return op;
}

LinearOp exp_creation_op(cxd c, int dim) {
  LinearOp op = identity_op(dim);
  if (c == cxd{0.0, 0.0}) return op;
  for (int n = 0; n < dim; ++n) {
    cxd coeff = 1.0;
    for (int m = n + 1; m < dim; ++m) {
      coeff *= c / static_cast<double>(m - n);
      op.at(m, n) = coeff * std::exp(0.5 * (sf::log_factorial(m) - sf::log_factorial(n)));
    }
  }
  return op;
}

LinearOp exp_pair_creation_op(cxd c, int dim1, int dim2) {
  LinearOp op = zero_op({dim1, dim2}, {dim1, dim2});
  for (int j = 0; j < dim1; ++j) {
    for (int k = 0; k < dim2; ++k) {
      const std::int64_t col = static_cast<std::int64_t>(j) * dim2 + k;
      cxd coeff = 1.0;
      for (int t = 0; j + t < dim1 && k + t < dim2; ++t) {
        if (t > 0) coeff *= c / static_cast<double>(t);
        const int m = j + t;
        const int n = k + t;
        const std::int64_t row = static_cast<std::int64_t>(m) * dim2 + n;
        const double scale =
            0.5 * (sf::log_factorial(m) - sf::log_factorial(j) +
                   sf::log_factorial(n) - sf::log_factorial(k));
        op.at(row, col) = coeff * std::exp(scale);
      }
    }
  }
  return op;
}

LinearOp one_mode_in_two(const LinearOp& op, int which, int other_dim) {
  if (op.in_dims.size() != 1 || op.out_dims.size() != 1) {
    throw std::invalid_argument("one_mode_in_two: op must be single-mode");
  }
  if (which != 0 && which != 1) throw std::invalid_argument("which must be 0 or 1");
  const int din = op.in_dims[0];
  const int dout = op.out_dims[0];
  LinearOp full = (which == 0) ? zero_op({dout, other_dim}, {din, other_dim})
                               : zero_op({other_dim, dout}, {other_dim, din});
  for (int r = 0; r < dout; ++r) {
    for (int c = 0; c < din; ++c) {
      const cxd v = op.at(r, c);
      if (v == cxd{0.0, 0.0}) continue;
      for (int e = 0; e < other_dim; ++e) {
        if (which == 0) {
          full.at(static_cast<std::int64_t>(r) * other_dim + e,
                  static_cast<std::int64_t>(c) * other_dim + e) = v;
        } else {
          full.at(static_cast<std::int64_t>(e) * dout + r,
                  static_cast<std::int64_t>(e) * din + c) = v;
        }
      }
    }
  }
  return full;
}

LinearOp matmul(const LinearOp& a, const LinearOp& b) {
  if (a.in_dims != b.out_dims) throw std::invalid_argument("matmul: dim mismatch");
  LinearOp out = zero_op(a.out_dims, b.in_dims);
  const std::int64_t rows = a.out_size();
  const std::int64_t inner = a.in_size();
  const std::int64_t cols = b.in_size();
  for (std::int64_t i = 0; i < rows; ++i) {
    for (std::int64_t k = 0; k < inner; ++k) {
      const cxd aik = a.entries[i * inner + k];
      if (aik == cxd{0.0, 0.0}) continue;
      const cxd* brow = &b.entries[k * cols];
      cxd* orow = &out.entries[i * cols];
      for (std::int64_t j = 0; j < cols; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

LinearOp adjoint(const LinearOp& a) {
  LinearOp out = zero_op(a.in_dims, a.out_dims);
  const std::int64_t rows = a.out_size();
  const std::int64_t cols = a.in_size();
  for (std::int64_t i = 0; i < rows; ++i) {
    for (std::int64_t j = 0; j < cols; ++j) {
      out.entries[j * rows + i] = std::conj(a.entries[i * cols + j]);
    }
  }
  return out;
}

double max_abs_diff(const LinearOp& a, const LinearOp& b) {
  if (a.in_dims != b.in_dims || a.out_dims != b.out_dims) {
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    m = std::max(m, std::abs(a.entries[i] - b.entries[i]));
  }
  return m;
}

PureState apply(const LinearOp& op, const PureState& s, const std::vector<int>& modes) {
  if (modes.size() != op.in_dims.size()) {
    throw std::invalid_argument("apply: op rank does not match mode list");
  }
  for (std::size_t k = 0; k < modes.size(); ++k) {
    check_mode(s, modes[k]);
    if (s.dims[modes[k]] != op.in_dims[k]) {
      throw std::invalid_argument("apply: dimension mismatch on mode " +
                                  std::to_string(modes[k]));
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (modes[j] == modes[k]) throw std::invalid_argument("apply: repeated mode");
    }
  }

  std::vector<int> out_dims = s.dims;
  for (std::size_t k = 0; k < modes.size(); ++k) out_dims[modes[k]] = op.out_dims[k];
  PureState out = make_state(out_dims);

  const auto in_st = strides_of(s.dims);
  const auto out_st = strides_of(out_dims);
  const std::int64_t op_in = op.in_size();
  const std::int64_t op_out = op.out_size();

  // Strides of the op's own in/out index spaces.
  std::vector<std::int64_t> op_in_st = strides_of(op.in_dims);
  std::vector<std::int64_t> op_out_st = strides_of(op.out_dims);

  std::int64_t env = 1;
  for (int k = 0; k < s.mode_count(); ++k) {
    if (std::find(modes.begin(), modes.end(), k) == modes.end()) env *= s.dims[k];
  }

  std::vector<cxd> in_block(op_in);
  std::vector<int> idx(s.dims.size(), 0);
  for (std::int64_t e = 0; e < env; ++e) {
    std::int64_t base_in = 0, base_out = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      base_in += idx[k] * in_st[k];
      base_out += idx[k] * out_st[k];
    }
    // Gather.
    for (std::int64_t c = 0; c < op_in; ++c) {
      std::int64_t off = 0;
      for (std::size_t k = 0; k < modes.size(); ++k) {
        off += ((c / op_in_st[k]) % op.in_dims[k]) * in_st[modes[k]];
      }
      in_block[c] = s.amps[base_in + off];
    }
    // Matvec + scatter.
    for (std::int64_t r = 0; r < op_out; ++r) {
      cxd acc{0.0, 0.0};
      const cxd* row = &op.entries[r * op_in];
      for (std::int64_t c = 0; c < op_in; ++c) acc += row[c] * in_block[c];
      std::int64_t off = 0;
      for (std::size_t k = 0; k < modes.size(); ++k) {
        off += ((r / op_out_st[k]) % op.out_dims[k]) * out_st[modes[k]];
      }
      out.amps[base_out + off] = acc;
    }
    for (int k = static_cast<int>(idx.size()) - 1; k >= 0; --k) {
      if (std::find(modes.begin(), modes.end(), k) != modes.end()) continue;
      if (++idx[k] < s.dims[k]) break;
      idx[k] = 0;
    }
  }
  return out;
}

PureState apply_single_mode(const LinearOp& op, const PureState& s, int mode) {
  return apply(op, s, {mode});
}

void dump_csv(const PureState& s, std::ostream& out) {
  for (int k = 0; k < s.mode_count(); ++k) out << "n" << k << ",";
  out << "re,im\n";
  const auto st = strides_of(s.dims);
  for (std::int64_t i = 0; i < s.size(); ++i) {
    for (int k = 0; k < s.mode_count(); ++k) {
      out << ((i / st[k]) % s.dims[k]) << ",";
    }
    out << s.amps[i].real() << "," << s.amps[i].imag() << "\n";
  }
}

}  // namespace obpm::fock
