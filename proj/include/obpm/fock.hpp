#ifndef OBPM_FOCK_HPP
#define OBPM_FOCK_HPP

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <utility>
#include <vector>

namespace obpm::fock {

using cxd = std::complex<double>;

/// Probability weight allowed above the Fock cutoff of a physical state.
constexpr double kTailTolerance = 1e-10;

/// Cutoff policy: for target mean photon number mu, use
/// ceil(mu + 10 sqrt(mu + 1) + 20). Constructors verify the resulting tail
/// mass against kTailTolerance rather than trusting the caller.
int cutoff_for_mean_photon(double mu);

/// Amplitudes of one or more truncated Fock modes in row-major tensor layout:
/// for dims {d0, d1, ...} the index of |n0, n1, ...> is (n0 * d1 + n1) * ...
/// Values are immutable by convention; operations return new states.
struct PureState {
  std::vector<int> dims;
  std::vector<cxd> amps;

  int mode_count() const { return static_cast<int>(dims.size()); }
  std::int64_t size() const { return static_cast<std::int64_t>(amps.size()); }
  double norm() const;
  double norm_sq() const;

  const cxd& at(std::initializer_list<int> index) const;
};

PureState make_state(std::vector<int> dims);  // zero amplitudes
PureState basis_state(const std::vector<int>& dims, const std::vector<int>& occupation);

cxd inner_product(const PureState& a, const PureState& b);  // <a|b>
PureState tensor(const PureState& a, const PureState& b);
PureState scaled(const PureState& s, cxd factor);
PureState normalized(const PureState& s);
/// Applies exp(i phi n) on one mode.
PureState rotate_mode(const PureState& s, int mode, double phi);
double mean_photon(const PureState& s, int mode);

/// |r e^{i theta}>: amps[n] = e^{-r^2/2} (r e^{i theta})^n / sqrt(n!), built in
/// log-magnitude form. Rejects cutoffs whose truncation tail exceeds
/// kTailTolerance, suggesting the policy size.
PureState coherent_state(double r, double theta, int cutoff);

/// Quadrature eigenstate of X(theta) = a e^{-i theta} + a^dag e^{i theta}:
/// amps[n] = (2 pi)^{-1/4} (2^n n!)^{-1/2} H_n(x / sqrt 2) e^{-x^2/4} e^{i n theta}.
/// An improper state: never normalized, exempt from the tail policy.
PureState quadrature_state(double x, double theta, int cutoff);

/// Squeezed vacuum |0, s e^{i delta}> with even-n amplitudes
/// (cosh s)^{-1/2} (-e^{i delta} tanh s)^{n/2} sqrt(n!) / (2^{n/2} (n/2)!).
PureState squeezed_vacuum(double s, double delta, int cutoff);

/// Two-mode squeezed state sqrt(1 - eta^2) sum_n (eta e^{i 2 phi})^n |n, n>.
/// Requires eta in [0, 1); eta = 1 is improper, approach it as 1 - eps.
PureState two_mode_squeezed(double eta, double phase2, int cutoff);

/// 50/50 beamsplitter on modes (m1, m2), convention c = (a - b)/sqrt 2,
/// d = (a + b)/sqrt 2 with a = m1, b = m2. The output is expressed in the
/// (c, d) basis with both mode dimensions expanded to d1 + d2 - 1, so the map
/// is exactly norm preserving. Coherent pair (alpha, beta) maps to
/// ((alpha - beta)/sqrt 2, (alpha + beta)/sqrt 2).
PureState apply_beamsplitter(const PureState& s, int m1, int m2);

/// Contracts the listed modes with single-mode bras (given as kets; conjugated
/// here). Returns the unnormalized state on the remaining modes; the caller
/// owns normalization and probability bookkeeping.
PureState project_partial(const PureState& s,
                          const std::vector<std::pair<int, PureState>>& bras);

/// Dense operator between Fock-product bases, row-major over (out, in).
struct LinearOp {
  std::vector<int> in_dims;
  std::vector<int> out_dims;
  std::vector<cxd> entries;

  std::int64_t in_size() const;
  std::int64_t out_size() const;
  cxd& at(std::int64_t row, std::int64_t col);
  const cxd& at(std::int64_t row, std::int64_t col) const;
};

LinearOp identity_op(int dim);
LinearOp annihilation_op(int dim);
LinearOp creation_op(int dim);
LinearOp number_op(int dim);
/// X(theta) = a e^{-i theta} + a^dag e^{i theta}.
LinearOp quadrature_op(double theta, int dim);
/// exp(alpha a^dag - conj(alpha) a), via the associated-Laguerre closed form.
/// Unitary on the retained subspace to ~1e-8 for states with tail headroom.
LinearOp displacement_op(cxd alpha, int cutoff);
/// exp(c a): entries <m| . |n> = c^{n-m} sqrt(n!/m!) / (n-m)! for n >= m.
LinearOp exp_annihilation_op(cxd c, int dim);
/// exp(c a^dag).
LinearOp exp_creation_op(cxd c, int dim);
/// exp(c a^dag b^dag) on a two-mode space.
LinearOp exp_pair_creation_op(cxd c, int dim1, int dim2);
/// Lifts a single-mode op to one factor of a two-mode space.
LinearOp one_mode_in_two(const LinearOp& op, int which, int other_dim);

LinearOp matmul(const LinearOp& a, const LinearOp& b);
LinearOp adjoint(const LinearOp& a);
double max_abs_diff(const LinearOp& a, const LinearOp& b);

/// Applies an operator to the listed modes of a state (in the given order).
/// Output dims at those positions become the op's out_dims.
PureState apply(const LinearOp& op, const PureState& s, const std::vector<int>& modes);
PureState apply_single_mode(const LinearOp& op, const PureState& s, int mode);

/// Debug dump: one CSV row per basis vector: n0,n1,...,re,im.
void dump_csv(const PureState& s, std::ostream& out);

}  // namespace obpm::fock

#endif
