#pragma once

// Exact arithmetic and linear algebra over Z/p^M and F_p.
//
// Everything downstream (group-ring modules, Artinian algebras, Hecke
// matrices) reduces to spans, kernels and solves over these two rings.
// Z/p^M is a chain ring, so row spans have a canonical Howell normal
// form and kernels can be computed by solving mod p and lifting the
// remaining M-1 digits.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace twpatch {

enum class RingMode { ResidueField, TruncatedIntegers };

using Elt = std::uint64_t;
using Vec = std::vector<Elt>;

struct CoeffRing {
  Elt p = 3;
  std::uint32_t M = 1;
  RingMode mode = RingMode::ResidueField;
  Elt modulus = 3;  // p^M

  static CoeffRing residue_field(Elt p);
  static CoeffRing truncated(Elt p, std::uint32_t M);

  bool operator==(const CoeffRing& o) const {
    return p == o.p && M == o.M && mode == o.mode;
  }
  bool operator!=(const CoeffRing& o) const { return !(*this == o); }

  Elt reduce_int(long long x) const {
    long long m = static_cast<long long>(modulus);
    long long r = x % m;
    if (r < 0) r += m;
    return static_cast<Elt>(r);
  }
  Elt add(Elt a, Elt b) const { return (a + b) % modulus; }
  Elt sub(Elt a, Elt b) const { return (a + modulus - b % modulus) % modulus; }
  Elt mul(Elt a, Elt b) const { return (a * b) % modulus; }
  Elt neg(Elt a) const { return a == 0 ? 0 : modulus - a; }
  bool is_unit(Elt a) const { return a % p != 0; }
  Elt pow(Elt a, std::uint64_t e) const;
  // Multiplicative inverse; nullopt on non-units.
  std::optional<Elt> inv(Elt a) const;
  // p-adic valuation of a; val(0) = M.
  std::uint32_t val(Elt a) const;
  // Teichmueller representative: the unique (p-1)-st root of unity
  // congruent to a mod p (a must be a unit).
  Elt teichmuller(Elt a) const;

  std::string str() const;
};

// Dense row-major matrix over a CoeffRing.
struct Mat {
  CoeffRing ring;
  std::size_t rows = 0, cols = 0;
  Vec a;

  Mat() = default;
  Mat(CoeffRing r, std::size_t nr, std::size_t nc)
      : ring(r), rows(nr), cols(nc), a(nr * nc, 0) {}

  Elt& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  Elt at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static Mat identity(CoeffRing r, std::size_t n);
  Mat mul(const Mat& o) const;
  Mat add(const Mat& o) const;
  Mat sub(const Mat& o) const;
  Mat scaled(Elt c) const;
  Vec apply(const Vec& v) const;
  Mat transpose() const;
  bool is_zero() const;
  bool operator==(const Mat& o) const {
    return ring == o.ring && rows == o.rows && cols == o.cols && a == o.a;
  }
  // Determinant (square matrices; exact over Z/p^M via cofactor
  // expansion, intended for small blocks).
  Elt det() const;
};

// Row span of vectors in (Z/p^M)^n kept in Howell normal form.  The
// form is canonical: two spans are equal iff their row lists agree,
// and reduce() gives a canonical coset representative.
class Span {
 public:
  Span(CoeffRing r, std::size_t n) : ring_(r), n_(n) {}

  void add(Vec v);
  void add_all(const std::vector<Vec>& vs) {
    for (const auto& v : vs) add(v);
  }
  bool contains(const Vec& v) const { return is_zero_vec(reduce(v)); }
  Vec reduce(Vec v) const;
  // log_p of the number of elements of the span.
  std::uint64_t log_size() const;
  // log_p of |(Z/p^M)^n / span|.
  std::uint64_t quotient_log_size() const {
    return static_cast<std::uint64_t>(n_) * ring_.M - log_size();
  }
  // Rows in Howell normal form (canonical for the span).
  const std::vector<Vec>& rows() const {
    canonicalize();
    return rows_;
  }
  const std::vector<std::size_t>& pivots() const { return pivot_col_; }
  const std::vector<std::uint32_t>& pivot_vals() const { return pivot_val_; }
  std::size_t dim_ambient() const { return n_; }
  const CoeffRing& ring() const { return ring_; }
  bool same_span(const Span& o) const {
    canonicalize();
    o.canonicalize();
    return rows_ == o.rows_ && pivot_col_ == o.pivot_col_;
  }

  static bool is_zero_vec(const Vec& v) {
    for (Elt x : v)
      if (x) return false;
    return true;
  }

 private:
  CoeffRing ring_;
  std::size_t n_;
  // Echelon rows with Howell closure; entries above pivots are only
  // canonicalized on demand (the closure property is what reduce()
  // and membership need).
  mutable std::vector<Vec> rows_;
  std::vector<std::size_t> pivot_col_;  // strictly increasing
  std::vector<std::uint32_t> pivot_val_;
  mutable bool dirty_ = false;
  void canonicalize() const;
};

// Kernel of m as a column-vector module: generators of {v : m v = 0}.
// Over F_p this is a basis; over Z/p^M a Howell-style generating set
// (solve mod p, then lift digit by digit).
std::vector<Vec> mat_kernel(const Mat& m);

// Deterministic solve: some x with m x = b, canonicalized against the
// Howell form of the kernel, or nullopt when no solution exists.
std::optional<Vec> mat_solve(const Mat& m, const Vec& b);

// Exponent vector of a monomial; total degree <= 255 per variable.
using Expo = std::vector<std::uint8_t>;

inline std::uint32_t total_degree(const Expo& e) {
  std::uint32_t d = 0;
  for (auto x : e) d += x;
  return d;
}

// Multivariate polynomial truncated at a total-degree bound.
struct TruncPoly {
  CoeffRing ring;
  std::uint32_t nvars = 0;
  std::uint32_t bound = 1;
  std::map<Expo, Elt> coeffs;  // no zero coefficients stored

  TruncPoly() = default;
  TruncPoly(CoeffRing r, std::uint32_t nv, std::uint32_t d)
      : ring(r), nvars(nv), bound(d) {}

  static TruncPoly constant(CoeffRing r, std::uint32_t nv, std::uint32_t d,
                            Elt c);
  static TruncPoly variable(CoeffRing r, std::uint32_t nv, std::uint32_t d,
                            std::uint32_t i);

  void set(const Expo& e, Elt c);
  Elt get(const Expo& e) const;
  Elt constant_term() const;
  bool is_zero() const { return coeffs.empty(); }
  std::uint32_t degree() const;

  TruncPoly add(const TruncPoly& o) const;
  TruncPoly sub(const TruncPoly& o) const;
  TruncPoly neg() const;
  TruncPoly scaled(Elt c) const;
  bool operator==(const TruncPoly& o) const {
    return ring == o.ring && nvars == o.nvars && bound == o.bound &&
           coeffs == o.coeffs;
  }

 private:
  void check_compatible(const TruncPoly& o) const;
  friend TruncPoly poly_mul_trunc(const TruncPoly&, const TruncPoly&);
};

// Product with all monomials of total degree > bound discarded.
TruncPoly poly_mul_trunc(const TruncPoly& a, const TruncPoly& b);

// All monomials in nvars variables of total degree <= d, in graded
// lexicographic order (degree first, then lex with earlier variables
// larger).  This order is fixed project-wide for reproducibility.
std::vector<Expo> monomials_up_to(std::uint32_t nvars, std::uint32_t d);

// Intersection of two row spans.
Span span_intersection(const Span& a, const Span& b);

// JSON forms used by the CLI fixtures:
//   {"ring": {"p": 3, "M": 2}, "rows": r, "cols": c, "entries": [...]}
//   {"ring": {"p": 3, "M": 2}, "nvars": v, "bound": d,
//    "terms": [{"e": [..], "c": coeff}, ...]}
std::string mat_to_json(const Mat& m);
Mat mat_from_json(const std::string& text);
std::string poly_to_json(const TruncPoly& f);
TruncPoly poly_from_json(const std::string& text);

// Cyclic decomposition exponents of (Z/p^M)^n / span(gens): one entry
// e per nonzero factor Z/p^e, sorted descending.  Computed by full
// row+column diagonalization (valid over the chain ring Z/p^M).
std::vector<std::uint32_t> quotient_cyclic_type(const std::vector<Vec>& gens,
                                                std::size_t n, const CoeffRing& R);

}  // namespace twpatch
