#include "lsdp/inequality_tests.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lsdp {

namespace {

double entropy_of(const DiscreteDistribution& d) { return shannon_entropy(d.pmf()); }

void check_block(const BlockPartition& partition, std::size_t b) {
  if (b >= partition.num_blocks()) {
    throw std::out_of_range("block index " + std::to_string(b) + " out of range");
  }
}

}  // namespace

Matrix phi_map(const Matrix& q, std::size_t degree, const BlockPartition& partition,
               std::size_t distinguished) {
  const auto k = static_cast<Index>(partition.total());
  if (q.rows() != k || q.cols() != k) {
    throw std::invalid_argument("phi_map: matrix does not match the partition");
  }
  if (degree < 1) throw std::invalid_argument("phi_map: degree must be >= 1");
  check_block(partition, distinguished);
  const auto oa = static_cast<Index>(partition.offset(distinguished));
  const auto da = static_cast<Index>(partition.dim(distinguished));
  Matrix out = Matrix::Zero(k, k);
  out.block(oa, oa, da, da) =
      static_cast<double>(degree - 1) * q.block(oa, oa, da, da);
  for (std::size_t m = 0; m < partition.num_blocks(); ++m) {
    if (m == distinguished) continue;
    const auto om = static_cast<Index>(partition.offset(m));
    const auto dm = static_cast<Index>(partition.dim(m));
    out.block(om, om, dm, dm) = q.block(om, om, dm, dm);
    out.block(oa, om, da, dm) = q.block(oa, om, da, dm);
    out.block(om, oa, dm, da) = q.block(om, oa, dm, da);
  }
  return out;
}

Matrix sign_flip(const Matrix& q, const BlockPartition& partition, std::size_t i,
                 std::size_t j) {
  check_block(partition, i);
  check_block(partition, j);
  Matrix out = q;
  if (i == j) return out;
  const auto oi = static_cast<Index>(partition.offset(i));
  const auto oj = static_cast<Index>(partition.offset(j));
  const auto di = static_cast<Index>(partition.dim(i));
  const auto dj = static_cast<Index>(partition.dim(j));
  out.block(oi, oj, di, dj) *= -1.0;
  out.block(oj, oi, dj, di) *= -1.0;
  return out;
}

OperatorInequalityResult operator_inequality_test(const Matrix& cov,
                                                  std::size_t degree,
                                                  const BlockPartition& partition) {
  OperatorInequalityResult out;
  out.pass = true;
  for (std::size_t a = 0; a < partition.num_blocks(); ++a) {
    const Matrix img = phi_map(cov, degree, partition, a);
    const double lam = img.size() > 0 ? min_eigenvalue(img) : 0.0;
    out.min_eigenvalues.push_back(lam);
    if (lam < -1e-9 * std::max(1.0, spectral_norm_sym(img))) out.pass = false;
  }
  return out;
}

double EntropyProfile::pair(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  if (i == 0 && j == 1) return h12;
  if (i == 0 && j == 2) return h13;
  if (i == 1 && j == 2) return h23;
  throw std::out_of_range("EntropyProfile::pair: need two distinct indices < 3");
}

double shannon_entropy(const std::vector<double>& pmf) {
  // Neumaier summation, large tables otherwise lose ~1e-11 bits.
  double sum = 0.0;
  double comp = 0.0;
  for (double p : pmf) {
    if (!(p > 0.0)) continue;
    const double t = -p * std::log2(p);
    const double s = sum + t;
    comp += std::abs(sum) >= std::abs(t) ? (sum - s) + t : (t - s) + sum;
    sum = s;
  }
  return sum + comp;
}

EntropyProfile entropy_profile(const DiscreteDistribution& dist) {
  if (dist.num_variables() != 3) {
    throw std::invalid_argument("entropy_profile needs 3 variables, got " +
                                std::to_string(dist.num_variables()));
  }
  EntropyProfile h;
  for (std::size_t i = 0; i < 3; ++i) h.single[i] = entropy_of(marginalize(dist, {i}));
  h.h12 = entropy_of(marginalize(dist, {0, 1}));
  h.h13 = entropy_of(marginalize(dist, {0, 2}));
  h.h23 = entropy_of(marginalize(dist, {1, 2}));
  h.h123 = shannon_entropy(dist.pmf());
  return h;
}

std::array<double, 12> EntropicValues::all() const {
  return {e1[0], e1[1], e1[2], e2[0], e2[1], e2[2],
          e3,    e4[0], e4[1], e4[2], e5,    e6};
}

EntropicValues entropic_tests(const EntropyProfile& h) {
  EntropicValues v;
  const double s = h.single[0] + h.single[1] + h.single[2];
  const double pairs = h.h12 + h.h13 + h.h23;
  for (std::size_t a = 0; a < 3; ++a) {
    const std::size_t b = (a + 1) % 3;
    const std::size_t c = (a + 2) % 3;
    const double hab = h.pair(a, b);
    const double hac = h.pair(a, c);
    const double hbc = h.pair(b, c);
    v.e1[a] = -s + hab + hac;
    v.e2[a] = -3.0 * s + 2.0 * hab + 2.0 * hac + 3.0 * hbc - h.h123;
    v.e4[a] = -4.0 * s + 3.0 * hab + 3.0 * hac + 4.0 * hbc - 2.0 * h.h123;
  }
  v.e3 = -5.0 * s + 4.0 * pairs - 2.0 * h.h123;
  v.e5 = -2.0 * s + 3.0 * pairs - 4.0 * h.h123;
  v.e6 = -8.0 * s + 7.0 * pairs - 5.0 * h.h123;
  return v;
}

EntropicRejections entropic_rejections(const EntropicValues& v) {
  const auto neg = [](double x) { return x < -kEntropicRejectTol; };
  EntropicRejections r;
  r.e1 = std::any_of(v.e1.begin(), v.e1.end(), neg);
  r.e2 = std::any_of(v.e2.begin(), v.e2.end(), neg);
  r.e3 = neg(v.e3);
  r.e4 = std::any_of(v.e4.begin(), v.e4.end(), neg);
  r.e5 = neg(v.e5);
  r.e6 = neg(v.e6);
  return r;
}

double e1_family_closed_form(double p, double alphabet_size) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("e1_family_closed_form: p outside [0, 1]");
  }
  if (!(alphabet_size >= 2.0)) {
    throw std::invalid_argument("e1_family_closed_form: D must be >= 2");
  }
  const double d = alphabet_size;
  const double q = p * (2.0 - p);
  // Pair marginal: D aligned cells of mass a, D^2 - D others of mass b.
  const double a = (1.0 - p) * (1.0 - p) / d + q / (d * d);
  const double b = q / (d * d);
  const double mass_a = (1.0 - p) * (1.0 - p) + q / d;
  const double mass_b = (1.0 - 1.0 / d) * q;
  double h12 = 0.0;
  if (a > 0.0) h12 -= mass_a * std::log2(a);
  if (b > 0.0) h12 -= mass_b * std::log2(b);
  return -3.0 * std::log2(d) + 2.0 * h12;
}

double e1_root(double alphabet_size) {
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (e1_family_closed_form(mid, alphabet_size) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace lsdp
