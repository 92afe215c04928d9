#pragma once

// Truncated q-expansions over Z/p^M with Hecke, diamond, U/V and theta
// operators, eta quotients via the pentagonal number theorem, exact
// Eisenstein series, and the weight-one block identities (psi map,
// U_p block matrix, doubling detector, degeneracy determinant).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twpatch/coeff.hpp"

namespace twpatch {

// Characters of modulus m with values in the coefficient ring; only
// orders dividing p-1 are representable (Teichmueller values).
struct DirichletCharacter {
  CoeffRing ring;
  std::uint64_t modulus = 1;
  std::vector<Elt> values;  // values[a] for a mod modulus; 0 on non-units

  static DirichletCharacter trivial(CoeffRing r, std::uint64_t modulus = 1);
  // Character determined by its value on a generator of (Z/m)^x for
  // prime-power m; the value must be a root of unity in the ring.
  static DirichletCharacter from_generator_value(CoeffRing r, std::uint64_t modulus,
                                                 std::uint64_t gen, Elt value);
  Elt operator()(std::uint64_t a) const { return values[a % modulus]; }
  std::uint64_t order() const;
};

struct QExpansion {
  CoeffRing ring;
  std::vector<Elt> a;  // coefficients a_0 .. a_prec
  long weight = 0;
  std::uint64_t level = 1;

  QExpansion() = default;
  QExpansion(CoeffRing r, std::size_t prec) : ring(r), a(prec + 1, 0) {}
  std::size_t prec() const { return a.size() - 1; }
  Elt coeff(std::size_t n) const { return n < a.size() ? a[n] : 0; }
  void set(std::size_t n, Elt c) {
    if (n < a.size()) a[n] = c % ring.modulus;
  }
  QExpansion truncated(std::size_t prec) const;
  QExpansion add(const QExpansion& o) const;
  QExpansion sub(const QExpansion& o) const;
  QExpansion scaled(Elt c) const;
  bool is_zero() const;
  bool operator==(const QExpansion& o) const {
    return ring == o.ring && a == o.a;
  }
};

QExpansion qexp_mul(const QExpansion& f, const QExpansion& g);

// Minimum precision accepted by the operators; compositions that drop
// below it are rejected rather than silently truncated.
constexpr std::size_t kMinPrec = 5;

// a_m(T_l f) = a_{lm}(f) + chi(l) l^{k-1} a_{m/l}(f); precision shrinks
// to floor(prec / l).
QExpansion hecke_T(const QExpansion& f, std::uint64_t ell, long weight,
                   const DirichletCharacter& chi);
QExpansion hecke_U(const QExpansion& f, std::uint64_t ell);
// V_l relocates a_n to a_{nl}; precision grows to min(prec*l, cap).
QExpansion hecke_V(const QExpansion& f, std::uint64_t ell, std::size_t prec_cap = 10000);
// theta = q d/dq.
QExpansion theta(const QExpansion& f);

// q^{sum d r / 24} prod_n prod_{(d,r)} (1 - q^{dn})^r, truncated; the
// leading exponent must be a nonnegative integer.
QExpansion eta_quotient(const std::vector<std::pair<std::uint64_t, long>>& pairs,
                        std::size_t prec, CoeffRing ring);

// E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n with exact Bernoulli
// numbers reduced into the ring; rejects k whose constant has p in the
// denominator after reduction.
QExpansion eisenstein(std::uint32_t k, std::size_t prec, CoeffRing ring);

// Multiplication by a lift A == 1 mod p^m of (a power of) the Hasse
// invariant; raises the weight tag, fixes q-expansions mod p^m.
QExpansion hasse_mult(const QExpansion& f, const QExpansion& A, std::uint32_t m = 1);

// psi(f, g) = phi(f) + <p> V_p(g) as a single higher-weight expansion.
QExpansion psi_map(const QExpansion& f, const QExpansion& g, Elt diamond_p,
                   std::uint64_t p, const QExpansion& hasse_lift);

// Rank over the residue field of the coefficient matrix of the doubled
// family {psi(f_i, 0), psi(0, f_i)}; the finite shadow of injectivity.
std::size_t psi_rank(const std::vector<QExpansion>& basis, Elt diamond_p, std::uint64_t p,
                     const QExpansion& hasse_lift);

struct HeckeSpace {
  CoeffRing ring;
  std::vector<QExpansion> basis;
  std::map<std::string, Mat> cache;

  HeckeSpace(CoeffRing r, std::vector<QExpansion> b);
  std::size_t dim() const { return basis.size(); }
};

// Matrix of op on the basis: columns solve op(b_i) = sum c_ji b_j.
// Throws (naming the failing basis vector) when the image leaves the
// span at the available precision.
Mat operator_matrix(HeckeSpace& space, const std::string& name,
                    const std::vector<QExpansion>& images);

// [[T_p, 1], [-<p>, 0]] as a 2d x 2d block matrix; the returned matrix
// satisfies A^2 - T_p A + <p> = 0 (checked).
Mat up_block_matrix(const Mat& Tp, Elt diamond_p);

struct DoublingResult {
  std::uint64_t anemic_length = 0;   // length of T[T_p]
  std::uint64_t extended_length = 0; // length of T[T_p][U_p]
  bool quadratic_holds = false;      // U^2 - T_p U + <p> = 0
  bool doubled = false;
};

// T is generated (as an O-algebra of d x d matrices) by the given
// generators together with T_p; U_p acts on the doubled space by the
// given 2d x 2d matrix.
DoublingResult doubling_rank(const std::vector<Mat>& t_gens, const Mat& Tp, Elt diamond_p,
                             const Mat& Up);

struct DegeneracyResult {
  Mat composite;       // [[x^{-1}(x+1), T_x], [<x>^{-1} T_x, x+1]]
  Elt det = 0;
  bool unit = false;   // det a unit, i.e. alpha != beta mod p
  bool congruence_ok = false;  // det == -(ab)^{-1}(a-b)^2 mod p
};

DegeneracyResult degeneracy_composite(const Mat& Tx, Elt diamond_x, std::uint64_t x,
                                      Elt alpha, Elt beta);

// Whether adjoining U_p strictly enlarges the algebra generated by the
// anemic generators; rejects non-ordinary input (U_p not invertible).
bool companion_criterion(const std::vector<Mat>& anemic_gens, const Mat& Up);

// Length (log_p of the cardinality) of the matrix algebra generated by
// the identity and the given d x d matrices.
std::uint64_t matrix_algebra_length(const CoeffRing& ring, std::size_t d,
                                    const std::vector<Mat>& gens);

}  // namespace twpatch
