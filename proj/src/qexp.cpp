#include "twpatch/qexp.hpp"

#include <boost/rational.hpp>

#include <algorithm>
#include <cassert>
#include <numeric>
#include <stdexcept>

namespace twpatch {

namespace {

using Rat = boost::rational<long long>;

std::vector<Rat> bernoulli_numbers(std::uint32_t upto) {
  if (upto > 30) throw std::invalid_argument("Bernoulli recurrence limited to k <= 30");
  // sum_{j=0}^{m} C(m+1, j) B_j = 0, B_0 = 1.
  std::vector<Rat> B(upto + 1, Rat(0));
  B[0] = Rat(1);
  std::vector<std::vector<long long>> C(upto + 2, std::vector<long long>(upto + 2, 0));
  for (std::uint32_t n = 0; n <= upto + 1; ++n) {
    C[n][0] = 1;
    for (std::uint32_t k = 1; k <= n; ++k)
      C[n][k] = C[n - 1][k - 1] + (k <= n - 1 ? C[n - 1][k] : 0);
  }
  for (std::uint32_t m = 1; m <= upto; ++m) {
    Rat s(0);
    for (std::uint32_t j = 0; j < m; ++j) s += Rat(C[m + 1][j]) * B[j];
    B[m] = -s / Rat(static_cast<long long>(m) + 1);
  }
  return B;
}

Elt reduce_rational(const Rat& r, const CoeffRing& R, const char* what) {
  long long num = r.numerator(), den = r.denominator();
  long long m = static_cast<long long>(R.modulus);
  long long nm = ((num % m) + m) % m;
  long long dm = ((den % m) + m) % m;
  auto dinv = R.inv(static_cast<Elt>(dm));
  if (!dinv)
    throw std::invalid_argument(std::string(what) +
                                ": denominator divisible by p (von Staudt-Clausen "
                                "obstruction), constant not liftable");
  return R.mul(static_cast<Elt>(nm), *dinv);
}

}  // namespace

DirichletCharacter DirichletCharacter::trivial(CoeffRing r, std::uint64_t modulus) {
  DirichletCharacter chi;
  chi.ring = r;
  chi.modulus = modulus;
  chi.values.assign(modulus, 0);
  for (std::uint64_t a = 0; a < modulus; ++a)
    if (std::gcd(a, modulus) == 1) chi.values[a] = 1;
  if (modulus == 1) chi.values = {1};
  return chi;
}

DirichletCharacter DirichletCharacter::from_generator_value(CoeffRing r,
                                                            std::uint64_t modulus,
                                                            std::uint64_t gen, Elt value) {
  DirichletCharacter chi;
  chi.ring = r;
  chi.modulus = modulus;
  chi.values.assign(modulus, 0);
  if (std::gcd(gen, modulus) != 1)
    throw std::invalid_argument("character generator must be a unit");
  std::uint64_t unit_count = 0;
  for (std::uint64_t a = 1; a < modulus; ++a)
    if (std::gcd(a, modulus) == 1) ++unit_count;
  std::uint64_t a = 1 % modulus;
  Elt v = 1;
  for (std::uint64_t i = 0; i < unit_count; ++i) {
    if (chi.values[a] != 0 && i > 0)
      throw std::invalid_argument("generator does not generate the unit group");
    chi.values[a] = v;
    a = a * gen % modulus;
    v = r.mul(v, value);
  }
  if (a != 1 % modulus || v != 1)
    throw std::invalid_argument("character value is not a root of unity of the right order");
  return chi;
}

std::uint64_t DirichletCharacter::order() const {
  std::uint64_t ord = 1;
  for (std::uint64_t a = 0; a < modulus; ++a) {
    if (values[a] == 0) continue;
    Elt v = values[a];
    std::uint64_t o = 1;
    while (v != 1) {
      v = ring.mul(v, values[a]);
      ++o;
      if (o > ring.modulus) throw std::logic_error("character value is not a root of unity");
    }
    ord = std::lcm(ord, o);
  }
  return ord;
}

QExpansion QExpansion::truncated(std::size_t prec) const {
  QExpansion r(ring, std::min(prec, this->prec()));
  for (std::size_t n = 0; n < r.a.size(); ++n) r.a[n] = a[n];
  r.weight = weight;
  r.level = level;
  return r;
}

QExpansion QExpansion::add(const QExpansion& o) const {
  if (ring != o.ring) throw std::invalid_argument("qexp add: ring mismatch");
  QExpansion r(ring, std::min(prec(), o.prec()));
  for (std::size_t n = 0; n < r.a.size(); ++n) r.a[n] = ring.add(a[n], o.a[n]);
  r.weight = weight;
  r.level = level;
  return r;
}

QExpansion QExpansion::sub(const QExpansion& o) const {
  if (ring != o.ring) throw std::invalid_argument("qexp sub: ring mismatch");
  QExpansion r(ring, std::min(prec(), o.prec()));
  for (std::size_t n = 0; n < r.a.size(); ++n) r.a[n] = ring.sub(a[n], o.a[n]);
  r.weight = weight;
  r.level = level;
  return r;
}

QExpansion QExpansion::scaled(Elt c) const {
  QExpansion r(ring, prec());
  for (std::size_t n = 0; n < a.size(); ++n) r.a[n] = ring.mul(a[n], c);
  r.weight = weight;
  r.level = level;
  return r;
}

bool QExpansion::is_zero() const {
  for (Elt x : a)
    if (x) return false;
  return true;
}

QExpansion qexp_mul(const QExpansion& f, const QExpansion& g) {
  if (f.ring != g.ring) throw std::invalid_argument("qexp mul: ring mismatch");
  QExpansion r(f.ring, std::min(f.prec(), g.prec()));
  for (std::size_t i = 0; i < f.a.size() && i < r.a.size(); ++i) {
    if (!f.a[i]) continue;
    for (std::size_t j = 0; i + j < r.a.size() && j < g.a.size(); ++j) {
      if (!g.a[j]) continue;
      r.a[i + j] = f.ring.add(r.a[i + j], f.ring.mul(f.a[i], g.a[j]));
    }
  }
  r.weight = f.weight + g.weight;
  r.level = std::lcm(f.level, g.level);
  return r;
}

QExpansion hecke_T(const QExpansion& f, std::uint64_t ell, long weight,
                   const DirichletCharacter& chi) {
  std::size_t newprec = f.prec() / ell;
  if (newprec < kMinPrec)
    throw std::invalid_argument("hecke_T: precision underflow below " +
                                std::to_string(kMinPrec));
  const CoeffRing& R = f.ring;
  Elt lk;
  if (weight >= 1)
    lk = R.pow(ell % R.modulus, static_cast<std::uint64_t>(weight - 1));
  else {
    auto inv = R.inv(R.pow(ell % R.modulus, static_cast<std::uint64_t>(1 - weight)));
    if (!inv) throw std::invalid_argument("hecke_T: ell^(k-1) not invertible");
    lk = *inv;
  }
  Elt cl = R.mul(chi(ell), lk);
  QExpansion r(R, newprec);
  for (std::size_t m = 0; m <= newprec; ++m) {
    Elt v = f.coeff(m * ell);
    if (m % ell == 0) v = R.add(v, R.mul(cl, f.coeff(m / ell)));
    r.a[m] = v;
  }
  r.weight = weight;
  r.level = f.level;
  return r;
}

QExpansion hecke_U(const QExpansion& f, std::uint64_t ell) {
  std::size_t newprec = f.prec() / ell;
  if (newprec < kMinPrec)
    throw std::invalid_argument("hecke_U: precision underflow below " +
                                std::to_string(kMinPrec));
  QExpansion r(f.ring, newprec);
  for (std::size_t m = 0; m <= newprec; ++m) r.a[m] = f.coeff(m * ell);
  r.weight = f.weight;
  r.level = f.level;
  return r;
}

QExpansion hecke_V(const QExpansion& f, std::uint64_t ell, std::size_t prec_cap) {
  std::size_t newprec = std::min(f.prec() * ell, prec_cap);
  QExpansion r(f.ring, newprec);
  for (std::size_t n = 0; n * ell <= newprec; ++n) r.a[n * ell] = f.coeff(n);
  r.weight = f.weight;
  r.level = f.level * ell;
  return r;
}

QExpansion theta(const QExpansion& f) {
  QExpansion r(f.ring, f.prec());
  for (std::size_t n = 0; n < f.a.size(); ++n)
    r.a[n] = f.ring.mul(f.a[n], n % f.ring.modulus);
  r.weight = f.weight;
  r.level = f.level;
  return r;
}

namespace {

// prod_{n>=1} (1 - q^{dn}) via the pentagonal number theorem.
QExpansion euler_product(std::uint64_t d, std::size_t prec, const CoeffRing& R) {
  QExpansion r(R, prec);
  r.a[0] = 1;
  for (unsigned long long j = 1;; ++j) {
    unsigned long long e1 = j * (3 * j - 1) / 2 * d;
    unsigned long long e2 = j * (3 * j + 1) / 2 * d;
    if (e1 > prec && e2 > prec) break;
    Elt s = (j % 2) ? R.neg(1) : 1;
    if (e1 <= prec) r.a[e1] = R.add(r.a[e1], s);
    if (e2 <= prec) r.a[e2] = R.add(r.a[e2], s);
  }
  return r;
}

QExpansion qexp_one(const CoeffRing& R, std::size_t prec) {
  QExpansion r(R, prec);
  r.a[0] = 1;
  return r;
}

QExpansion qexp_reciprocal(const QExpansion& f) {
  if (f.a[0] != 1) throw std::invalid_argument("reciprocal needs constant term 1");
  QExpansion r(f.ring, f.prec());
  r.a[0] = 1;
  for (std::size_t n = 1; n < r.a.size(); ++n) {
    Elt s = 0;
    for (std::size_t k = 1; k <= n; ++k)
      s = f.ring.add(s, f.ring.mul(f.coeff(k), r.a[n - k]));
    r.a[n] = f.ring.neg(s);
  }
  return r;
}

QExpansion qexp_pow(const QExpansion& f, long e) {
  if (e == 0) return qexp_one(f.ring, f.prec());
  QExpansion base = e < 0 ? qexp_reciprocal(f) : f;
  unsigned long n = static_cast<unsigned long>(e < 0 ? -e : e);
  QExpansion acc = qexp_one(f.ring, f.prec());
  while (n) {
    if (n & 1) acc = qexp_mul(acc, base);
    base = qexp_mul(base, base);
    n >>= 1;
  }
  return acc;
}

}  // namespace

QExpansion eta_quotient(const std::vector<std::pair<std::uint64_t, long>>& pairs,
                        std::size_t prec, CoeffRing ring) {
  long lead24 = 0;
  for (auto [d, r] : pairs) lead24 += static_cast<long>(d) * r;
  if (lead24 % 24 != 0 || lead24 < 0)
    throw std::invalid_argument("eta quotient: leading exponent " + std::to_string(lead24) +
                                "/24 is not a nonnegative integer");
  std::size_t shift = static_cast<std::size_t>(lead24 / 24);
  QExpansion prod = qexp_one(ring, prec);
  for (auto [d, r] : pairs) prod = qexp_mul(prod, qexp_pow(euler_product(d, prec, ring), r));
  QExpansion out(ring, prec);
  for (std::size_t n = 0; n + shift <= prec; ++n) out.a[n + shift] = prod.a[n];
  long wt = 0;
  for (auto [d, r] : pairs) wt += r;
  out.weight = wt / 2;
  std::uint64_t lvl = 1;
  for (auto [d, r] : pairs) lvl = std::lcm<std::uint64_t>(lvl, d);
  out.level = lvl;
  return out;
}

QExpansion eisenstein(std::uint32_t k, std::size_t prec, CoeffRing ring) {
  if (k < 4 || k % 2 != 0) throw std::invalid_argument("eisenstein: weight must be even >= 4");
  auto B = bernoulli_numbers(k);
  Rat c = Rat(2 * static_cast<long long>(k)) / B[k];
  Elt cm = reduce_rational(c, ring, "eisenstein");
  QExpansion r(ring, prec);
  r.a[0] = 1;
  for (std::size_t n = 1; n <= prec; ++n) {
    Elt sigma = 0;
    for (std::size_t d = 1; d <= n; ++d)
      if (n % d == 0) sigma = ring.add(sigma, ring.pow(d % ring.modulus, k - 1));
    r.a[n] = ring.neg(ring.mul(cm, sigma));
  }
  r.weight = k;
  r.level = 1;
  return r;
}

QExpansion hasse_mult(const QExpansion& f, const QExpansion& A, std::uint32_t m) {
  const CoeffRing& R = f.ring;
  if (m > R.M) m = R.M;
  Elt pm = 1;
  for (std::uint32_t i = 0; i < m; ++i) pm *= R.p;
  pm %= R.modulus;
  // A == 1 mod p^m: constant term 1 mod p^m, the rest divisible.
  auto divisible = [&](Elt x) { return pm == 0 ? x == 0 : x % pm == 0; };
  if (A.a.empty() || !divisible(R.sub(A.a[0], 1)))
    throw std::invalid_argument("hasse_mult: lift is not congruent to 1");
  for (std::size_t n = 1; n < A.a.size(); ++n)
    if (!divisible(A.a[n]))
      throw std::invalid_argument("hasse_mult: lift is not congruent to 1");
  QExpansion r = qexp_mul(f, A);
  r.weight = f.weight + A.weight;
  return r;
}

QExpansion psi_map(const QExpansion& f, const QExpansion& g, Elt diamond_p,
                   std::uint64_t p, const QExpansion& hasse_lift) {
  if (f.ring != g.ring) throw std::invalid_argument("psi_map: ring mismatch");
  QExpansion phi_f = hasse_mult(f, hasse_lift);
  QExpansion vpg = hecke_V(g, p, phi_f.prec());
  QExpansion r = phi_f.add(vpg.scaled(diamond_p));
  r.weight = phi_f.weight;
  return r;
}

std::size_t psi_rank(const std::vector<QExpansion>& basis, Elt diamond_p, std::uint64_t p,
                     const QExpansion& hasse_lift) {
  if (basis.empty()) return 0;
  const CoeffRing& R = basis[0].ring;
  CoeffRing k = CoeffRing::residue_field(R.p);
  QExpansion zero(R, basis[0].prec());
  std::vector<QExpansion> doubled;
  for (const auto& f : basis) doubled.push_back(psi_map(f, zero, diamond_p, p, hasse_lift));
  for (const auto& f : basis) doubled.push_back(psi_map(zero, f, diamond_p, p, hasse_lift));
  std::size_t prec = doubled[0].prec();
  for (const auto& f : doubled) prec = std::min(prec, f.prec());
  Span sp(k, prec + 1);
  for (const auto& f : doubled) {
    Vec v(prec + 1);
    for (std::size_t n = 0; n <= prec; ++n) v[n] = f.a[n] % k.p;
    sp.add(std::move(v));
  }
  return sp.log_size();
}

HeckeSpace::HeckeSpace(CoeffRing r, std::vector<QExpansion> b) : ring(r), basis(std::move(b)) {
  if (basis.empty()) return;
  std::size_t prec = basis[0].prec();
  for (const auto& f : basis) prec = std::min(prec, f.prec());
  CoeffRing k = CoeffRing::residue_field(ring.p);
  Span sp(k, prec + 1);
  for (const auto& f : basis) {
    Vec v(prec + 1);
    for (std::size_t n = 0; n <= prec; ++n) v[n] = f.coeff(n) % k.p;
    sp.add(std::move(v));
  }
  if (sp.log_size() != basis.size())
    throw std::invalid_argument("HeckeSpace basis is not independent over the residue field");
}

Mat operator_matrix(HeckeSpace& space, const std::string& name,
                    const std::vector<QExpansion>& images) {
  auto it = space.cache.find(name);
  if (it != space.cache.end()) return it->second;
  if (images.size() != space.dim())
    throw std::invalid_argument("operator_matrix: one image per basis vector required");
  std::size_t prec = images.empty() ? 0 : images[0].prec();
  for (const auto& f : images) prec = std::min(prec, f.prec());
  for (const auto& f : space.basis) prec = std::min(prec, f.prec());
  std::size_t b = space.dim();
  Mat coeffs(space.ring, prec + 1, b);
  for (std::size_t j = 0; j < b; ++j)
    for (std::size_t n = 0; n <= prec; ++n) coeffs.at(n, j) = space.basis[j].coeff(n);
  Mat out(space.ring, b, b);
  for (std::size_t i = 0; i < b; ++i) {
    Vec rhs(prec + 1);
    for (std::size_t n = 0; n <= prec; ++n) rhs[n] = images[i].coeff(n);
    auto sol = mat_solve(coeffs, rhs);
    if (!sol)
      throw std::invalid_argument("operator " + name + ": image of basis vector " +
                                  std::to_string(i) + " is not in the span");
    for (std::size_t j = 0; j < b; ++j) out.at(j, i) = (*sol)[j];
  }
  space.cache.emplace(name, out);
  return out;
}

Mat up_block_matrix(const Mat& Tp, Elt diamond_p) {
  if (Tp.rows != Tp.cols) throw std::invalid_argument("up_block_matrix: square T_p required");
  std::size_t d = Tp.rows;
  const CoeffRing& R = Tp.ring;
  Mat A(R, 2 * d, 2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) A.at(i, j) = Tp.at(i, j);
    A.at(i, d + i) = 1;
    A.at(d + i, i) = R.neg(diamond_p);
  }
  Mat That(R, 2 * d, 2 * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      That.at(i, j) = Tp.at(i, j);
      That.at(d + i, d + j) = Tp.at(i, j);
    }
  Mat lhs = A.mul(A).sub(That.mul(A)).add(Mat::identity(R, 2 * d).scaled(diamond_p));
  if (!lhs.is_zero()) throw std::logic_error("up_block_matrix: quadratic relation violated");
  return A;
}

std::uint64_t matrix_algebra_length(const CoeffRing& ring, std::size_t d,
                                    const std::vector<Mat>& gens) {
  if (d == 0) return 0;
  Span sp(ring, d * d);
  std::vector<Mat> elems;
  auto push = [&](const Mat& m) {
    Vec v(d * d);
    for (std::size_t i = 0; i < d * d; ++i) v[i] = m.a[i];
    if (sp.contains(v)) return;
    sp.add(std::move(v));
    elems.push_back(m);
  };
  push(Mat::identity(ring, d));
  for (const auto& g : gens) push(g);
  std::size_t scan = 0;
  while (scan < elems.size()) {
    Mat e = elems[scan++];
    for (const auto& g : gens) {
      push(e.mul(g));
      push(g.mul(e));
    }
  }
  return sp.log_size();
}

DoublingResult doubling_rank(const std::vector<Mat>& t_gens, const Mat& Tp, Elt diamond_p,
                             const Mat& Up) {
  DoublingResult res;
  const CoeffRing& R = Tp.ring;
  std::size_t d = Tp.rows;
  std::vector<Mat> anemic = t_gens;
  anemic.push_back(Tp);
  res.anemic_length = matrix_algebra_length(R, d, anemic);

  std::vector<Mat> ext;
  for (const auto& g : anemic) {
    Mat big(R, 2 * d, 2 * d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        big.at(i, j) = g.at(i, j);
        big.at(d + i, d + j) = g.at(i, j);
      }
    ext.push_back(std::move(big));
  }
  ext.push_back(Up);
  res.extended_length = matrix_algebra_length(R, 2 * d, ext);

  Mat That(R, 2 * d, 2 * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      That.at(i, j) = Tp.at(i, j);
      That.at(d + i, d + j) = Tp.at(i, j);
    }
  Mat rel = Up.mul(Up).sub(That.mul(Up)).add(Mat::identity(R, 2 * d).scaled(diamond_p));
  res.quadratic_holds = rel.is_zero();
  res.doubled = res.quadratic_holds && res.extended_length == 2 * res.anemic_length;
  return res;
}

DegeneracyResult degeneracy_composite(const Mat& Tx, Elt diamond_x, std::uint64_t x,
                                      Elt alpha, Elt beta) {
  const CoeffRing& R = Tx.ring;
  Elt xr = x % R.modulus;
  auto xinv = R.inv(xr);
  if (!xinv) throw std::invalid_argument("degeneracy_composite: x not invertible");
  auto dinv = R.inv(diamond_x);
  if (!dinv) throw std::invalid_argument("degeneracy_composite: diamond value not invertible");
  std::size_t d = Tx.rows;
  DegeneracyResult res;
  Mat A(R, 2 * d, 2 * d);
  Elt c00 = R.mul(*xinv, R.add(xr, 1));
  Elt c11 = R.add(xr, 1);
  for (std::size_t i = 0; i < d; ++i) {
    A.at(i, i) = c00;
    A.at(d + i, d + i) = c11;
    for (std::size_t j = 0; j < d; ++j) {
      A.at(i, d + j) = Tx.at(i, j);
      A.at(d + i, j) = R.mul(*dinv, Tx.at(i, j));
    }
  }
  res.composite = A;
  res.det = A.det();
  CoeffRing k = CoeffRing::residue_field(R.p);
  Elt ab = k.mul(alpha % k.p, beta % k.p);
  auto abinv = k.inv(ab);
  if (!abinv)
    throw std::invalid_argument("degeneracy_composite: alpha beta not invertible mod p");
  Elt diff = k.sub(alpha % k.p, beta % k.p);
  Elt rhs = k.neg(k.mul(*abinv, k.mul(diff, diff)));
  res.congruence_ok = (res.det % k.p) == rhs;
  res.unit = diff != 0;
  return res;
}

bool companion_criterion(const std::vector<Mat>& anemic_gens, const Mat& Up) {
  std::size_t d = Up.rows;
  if (d == 0) return false;
  const CoeffRing& R = Up.ring;
  if (!R.is_unit(Up.det()))
    throw std::invalid_argument("companion_criterion: non-ordinary input (U_p not a unit)");
  std::uint64_t anemic = matrix_algebra_length(R, d, anemic_gens);
  std::vector<Mat> ext = anemic_gens;
  ext.push_back(Up);
  std::uint64_t extended = matrix_algebra_length(R, d, ext);
  return extended > anemic;
}

}  // namespace twpatch
