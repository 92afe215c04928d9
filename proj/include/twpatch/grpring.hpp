#pragma once

// Finitely presented modules over S_N = O[(Z/p^N Z)^q] with O = Z/p^M:
// minimal presentations by Nakayama reduction, Tor dimensions, the
// defect t0 - t1, balancedness with its square presentation, group
// coinvariants, and the five-term Tor sequence check.
//
// Kernels over S_N are computed on the underlying free O-module (the
// group translates of a generating set also generate over S).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twpatch/coeff.hpp"

namespace twpatch {

struct GroupRing {
  CoeffRing O;  // truncated-integers mode
  std::uint32_t N = 1;
  std::uint32_t q = 1;

  GroupRing() = default;
  GroupRing(CoeffRing o, std::uint32_t n, std::uint32_t qq);

  // Number of group elements p^{Nq}.
  std::size_t order() const { return B_; }
  std::size_t pn() const { return pn_; }

  std::size_t group_mul(std::size_t a, std::size_t b) const;
  // S-elements are coefficient vectors of length order().
  Vec zero() const { return Vec(B_, 0); }
  Vec one() const;
  Vec gen(std::uint32_t i) const;  // t_i
  Vec gen_minus_one(std::uint32_t i) const;
  Vec mul(const Vec& a, const Vec& b) const;
  Vec add(const Vec& a, const Vec& b) const;
  Vec sub(const Vec& a, const Vec& b) const;
  Vec scale(Elt c, const Vec& a) const;
  Elt augmentation(const Vec& a) const;
  bool is_unit(const Vec& a) const { return O.is_unit(augmentation(a)); }
  std::optional<Vec> inv(const Vec& a) const;
  // order() x order() matrix of multiplication by a.
  Mat mult_matrix(const Vec& a) const;
  // Translation action of group element g as a permutation matrix.
  Mat translation(std::size_t g) const;

  bool operator==(const GroupRing& o) const {
    return O == o.O && N == o.N && q == o.q;
  }

 private:
  std::size_t B_ = 1;
  std::size_t pn_ = 1;  // p^N
};

// Relations are columns of an S-linear map S^r -> S^gens; the module is
// the cokernel.
struct GroupRingModule {
  GroupRing S;
  std::size_t gens = 0;
  std::vector<std::vector<Vec>> relations;  // relations[j][i]: S-entry at generator i

  std::string to_json() const;
  static GroupRingModule from_json(const std::string& text);
};

// The relation map as an O-matrix (gens*B) x (r*B); columns are the
// group translates t^a r_j ordered (j, a).
Mat relation_matrix_O(const GroupRingModule& mod);

// Underlying O-module of the module itself: O^{gens*B} / row span of
// the relation translates, with the q translation operators.
struct Realization {
  GroupRing S;
  std::size_t gens = 0;
  Span W;
  std::vector<Mat> taction;  // q operators on O^{gens*B}, stabilizing W

  Realization(GroupRing s, std::size_t g) : S(s), gens(g), W(s.O, g * s.order()) {}
  std::size_t ambient() const { return gens * S.order(); }
  std::uint64_t length() const { return W.quotient_log_size(); }
};

Realization realization(const GroupRingModule& mod);

GroupRingModule minimal_presentation(const GroupRingModule& mod);

// (t0, t1) = (dim_k M/m_S M, dim_k Tor_1(M, k)).
std::pair<std::uint64_t, std::uint64_t> tor_dims(const GroupRingModule& mod);

long defect(const GroupRingModule& mod);

struct BalancedResult {
  bool balanced = false;
  long defect = 0;
  // Square presentation S^d -> S^d -> M -> 0 when balanced.
  std::optional<GroupRingModule> square;
};
BalancedResult is_balanced(const GroupRingModule& mod);

// Cyclic decomposition of M_Delta = M tensor_S O, descending exponents.
std::vector<std::uint32_t> coinvariants(const GroupRingModule& mod);

// Exactness report for
//   0 -> Tor1(M,O)/w -> Tor1(M,k) -> M_D -(w)-> M_D -> M (x) k -> 0
// with the truncation-aware corrections: over O = Z/p^M the node at
// the multiplication-by-p map is tested modulo the top layer
// p^{M-1} M_D (the untruncated sequence is exact iff these corrected
// node conditions hold for a module killed by p^M).
struct SixTermReport {
  std::uint64_t len_tor1_O = 0;   // length of Tor1(M, O)
  std::uint64_t dim_tor1_k = 0;   // dim_k Tor1(M, k)
  std::uint64_t len_coinv = 0;    // length of M_Delta
  std::uint64_t dim_m_mod_k = 0;  // dim_k M (x)_S k
  bool node_injection = false;    // ker(Tor1(M,O) -> Tor1(M,k)) = im j*
  bool node_tor1k = false;        // ker d = im of Tor1(M,O)
  bool node_coinv1 = false;       // im d + top layer = ker(p on M_D)
  bool node_coinv2 = false;       // ker(M_D -> M(x)k) = p M_D
  bool node_surjective = false;
  bool pass() const {
    return node_injection && node_tor1k && node_coinv1 && node_coinv2 && node_surjective;
  }
};

SixTermReport six_term_check(const GroupRingModule& mod);

// Hard desk-scale limit on kernel computations.
constexpr std::size_t kMaxKernelColumns = 256;

}  // namespace twpatch
