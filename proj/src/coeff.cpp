#include "twpatch/coeff.hpp"

#include <json.hpp>

#include <algorithm>
#include <cassert>
#include <functional>

namespace twpatch {

namespace {

bool is_prime(Elt n) {
  if (n < 2) return false;
  for (Elt d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

Elt pow_u64(Elt b, std::uint32_t e) {
  Elt r = 1;
  for (std::uint32_t i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

CoeffRing CoeffRing::residue_field(Elt p) {
  if (!is_prime(p) || p < 3) throw std::invalid_argument("p must be an odd prime >= 3");
  CoeffRing r;
  r.p = p;
  r.M = 1;
  r.mode = RingMode::ResidueField;
  r.modulus = p;
  return r;
}

CoeffRing CoeffRing::truncated(Elt p, std::uint32_t M) {
  if (!is_prime(p) || p < 3) throw std::invalid_argument("p must be an odd prime >= 3");
  if (M < 1) throw std::invalid_argument("M must be >= 1");
  CoeffRing r;
  r.p = p;
  r.M = M;
  r.mode = RingMode::TruncatedIntegers;
  r.modulus = pow_u64(p, M);
  if (r.modulus > (Elt(1) << 31))
    throw std::invalid_argument("p^M too large for exact 64-bit arithmetic");
  return r;
}

Elt CoeffRing::pow(Elt a, std::uint64_t e) const {
  Elt r = 1, b = a % modulus;
  while (e) {
    if (e & 1) r = mul(r, b);
    b = mul(b, b);
    e >>= 1;
  }
  return r;
}

std::optional<Elt> CoeffRing::inv(Elt a) const {
  a %= modulus;
  if (!is_unit(a)) return std::nullopt;
  // The unit group has order p^(M-1)(p-1).
  std::uint64_t order = (modulus / p) * (p - 1);
  return pow(a, order - 1);
}

std::uint32_t CoeffRing::val(Elt a) const {
  a %= modulus;
  if (a == 0) return M;
  std::uint32_t v = 0;
  while (a % p == 0) {
    a /= p;
    ++v;
  }
  return v;
}

Elt CoeffRing::teichmuller(Elt a) const {
  if (!is_unit(a)) throw std::invalid_argument("teichmuller requires a unit");
  Elt r = a % modulus;
  for (std::uint32_t i = 1; i < M; ++i) r = pow(r, p);
  return r;
}

std::string CoeffRing::str() const {
  if (mode == RingMode::ResidueField) return "F_" + std::to_string(p);
  return "Z/" + std::to_string(p) + "^" + std::to_string(M);
}

Mat Mat::identity(CoeffRing r, std::size_t n) {
  Mat m(r, n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

Mat Mat::mul(const Mat& o) const {
  if (cols != o.rows || ring != o.ring) throw std::invalid_argument("Mat::mul shape mismatch");
  Mat r(ring, rows, o.cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) {
      Elt x = at(i, k);
      if (!x) continue;
      for (std::size_t j = 0; j < o.cols; ++j)
        r.at(i, j) = ring.add(r.at(i, j), ring.mul(x, o.at(k, j)));
    }
  return r;
}

Mat Mat::add(const Mat& o) const {
  if (rows != o.rows || cols != o.cols || ring != o.ring)
    throw std::invalid_argument("Mat::add shape mismatch");
  Mat r(ring, rows, cols);
  for (std::size_t i = 0; i < a.size(); ++i) r.a[i] = ring.add(a[i], o.a[i]);
  return r;
}

Mat Mat::sub(const Mat& o) const {
  if (rows != o.rows || cols != o.cols || ring != o.ring)
    throw std::invalid_argument("Mat::sub shape mismatch");
  Mat r(ring, rows, cols);
  for (std::size_t i = 0; i < a.size(); ++i) r.a[i] = ring.sub(a[i], o.a[i]);
  return r;
}

Mat Mat::scaled(Elt c) const {
  Mat r(ring, rows, cols);
  for (std::size_t i = 0; i < a.size(); ++i) r.a[i] = ring.mul(a[i], c);
  return r;
}

Vec Mat::apply(const Vec& v) const {
  if (v.size() != cols) throw std::invalid_argument("Mat::apply shape mismatch");
  Vec r(rows, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    Elt s = 0;
    for (std::size_t j = 0; j < cols; ++j) s = ring.add(s, ring.mul(at(i, j), v[j]));
    r[i] = s;
  }
  return r;
}

Mat Mat::transpose() const {
  Mat r(ring, cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) r.at(j, i) = at(i, j);
  return r;
}

bool Mat::is_zero() const {
  for (Elt x : a)
    if (x) return false;
  return true;
}

namespace {

Elt det_rec(const Mat& m, std::vector<std::size_t>& cols, std::size_t row) {
  const CoeffRing& R = m.ring;
  std::size_t n = cols.size();
  if (n == 0) return 1;
  if (n == 1) return m.at(row, cols[0]);
  Elt total = 0;
  for (std::size_t j = 0; j < n; ++j) {
    Elt e = m.at(row, cols[j]);
    if (!e) continue;
    std::size_t c = cols[j];
    cols.erase(cols.begin() + static_cast<long>(j));
    Elt sub = det_rec(m, cols, row + 1);
    cols.insert(cols.begin() + static_cast<long>(j), c);
    Elt term = R.mul(e, sub);
    if (j % 2) term = R.neg(term);
    total = R.add(total, term);
  }
  return total;
}

}  // namespace

Elt Mat::det() const {
  if (rows != cols) throw std::invalid_argument("det: square matrices only");
  if (rows > 9) throw std::invalid_argument("det: block too large for cofactor expansion");
  std::vector<std::size_t> cs(cols);
  for (std::size_t i = 0; i < cols; ++i) cs[i] = i;
  return det_rec(*this, cs, 0);
}

void Span::add(Vec v) {
  if (v.size() != n_) throw std::invalid_argument("Span::add dimension mismatch");
  for (auto& x : v) x %= ring_.modulus;
  std::vector<Vec> pending;
  pending.push_back(std::move(v));
  while (!pending.empty()) {
    Vec w = std::move(pending.back());
    pending.pop_back();
    std::size_t col = 0;
    for (;;) {
      while (col < n_ && w[col] == 0) ++col;
      if (col == n_) break;
      auto it = std::lower_bound(pivot_col_.begin(), pivot_col_.end(), col);
      std::size_t idx = static_cast<std::size_t>(it - pivot_col_.begin());
      if (it != pivot_col_.end() && *it == col) {
        std::uint32_t vw = ring_.val(w[col]);
        std::uint32_t vr = pivot_val_[idx];
        if (vw >= vr) {
          Elt q = w[col] / pow_u64(ring_.p, vr);
          for (std::size_t j = col; j < n_; ++j)
            w[j] = ring_.sub(w[j], ring_.mul(q, rows_[idx][j]));
          continue;
        }
        // Incoming vector has the smaller valuation: it becomes the
        // pivot row and the old row is re-reduced.
        Elt u = *ring_.inv(w[col] / pow_u64(ring_.p, vw));
        for (std::size_t j = col; j < n_; ++j) w[j] = ring_.mul(w[j], u);
        std::swap(rows_[idx], w);
        pivot_val_[idx] = vw;
        if (vw > 0) {
          Vec extra(n_, 0);
          Elt c = pow_u64(ring_.p, ring_.M - vw) % ring_.modulus;
          for (std::size_t j = col; j < n_; ++j) extra[j] = ring_.mul(rows_[idx][j], c);
          pending.push_back(std::move(extra));
        }
        continue;
      }
      // New pivot column.
      std::uint32_t vw = ring_.val(w[col]);
      Elt u = *ring_.inv(w[col] / pow_u64(ring_.p, vw));
      for (std::size_t j = col; j < n_; ++j) w[j] = ring_.mul(w[j], u);
      rows_.insert(rows_.begin() + static_cast<long>(idx), w);
      pivot_col_.insert(pivot_col_.begin() + static_cast<long>(idx), col);
      pivot_val_.insert(pivot_val_.begin() + static_cast<long>(idx), vw);
      if (vw > 0) {
        Vec extra(n_, 0);
        Elt c = pow_u64(ring_.p, ring_.M - vw) % ring_.modulus;
        for (std::size_t j = col; j < n_; ++j) extra[j] = ring_.mul(rows_[idx][j], c);
        pending.push_back(std::move(extra));
      }
      break;
    }
  }
  dirty_ = true;
}

void Span::canonicalize() const {
  if (!dirty_) return;
  for (std::size_t idx = 0; idx < rows_.size(); ++idx) {
    std::size_t c = pivot_col_[idx];
    Elt pv = pow_u64(ring_.p, pivot_val_[idx]);
    for (std::size_t k = 0; k < idx; ++k) {
      Elt q = rows_[k][c] / pv;
      if (!q) continue;
      for (std::size_t j = c; j < n_; ++j)
        rows_[k][j] = ring_.sub(rows_[k][j], ring_.mul(q, rows_[idx][j]));
    }
  }
  dirty_ = false;
}

Vec Span::reduce(Vec v) const {
  if (v.size() != n_) throw std::invalid_argument("Span::reduce dimension mismatch");
  for (auto& x : v) x %= ring_.modulus;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    std::size_t col = pivot_col_[i];
    Elt pv = pow_u64(ring_.p, pivot_val_[i]);
    Elt q = v[col] / pv;
    if (!q) continue;
    for (std::size_t j = col; j < n_; ++j)
      v[j] = ring_.sub(v[j], ring_.mul(q, rows_[i][j]));
  }
  return v;
}

std::uint64_t Span::log_size() const {
  std::uint64_t s = 0;
  for (auto v : pivot_val_) s += ring_.M - v;
  return s;
}

namespace {

// F_p kernel basis via Gaussian elimination; deterministic pivoting
// (first row with a nonzero entry in the leftmost unresolved column).
std::vector<Vec> fp_kernel(const Mat& m, const CoeffRing& fp) {
  std::size_t nr = m.rows, nc = m.cols;
  std::vector<Vec> rows(nr, Vec(nc, 0));
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) rows[i][j] = m.at(i, j) % fp.p;
  std::vector<long> pivot_of_col(nc, -1);
  std::size_t rank = 0;
  for (std::size_t col = 0; col < nc && rank < nr; ++col) {
    std::size_t sel = nr;
    for (std::size_t i = rank; i < nr; ++i)
      if (rows[i][col] != 0) {
        sel = i;
        break;
      }
    if (sel == nr) continue;
    std::swap(rows[rank], rows[sel]);
    Elt u = *fp.inv(rows[rank][col]);
    for (std::size_t j = col; j < nc; ++j) rows[rank][j] = fp.mul(rows[rank][j], u);
    for (std::size_t i = 0; i < nr; ++i) {
      if (i == rank) continue;
      Elt c = rows[i][col];
      if (!c) continue;
      for (std::size_t j = col; j < nc; ++j)
        rows[i][j] = fp.sub(rows[i][j], fp.mul(c, rows[rank][j]));
    }
    pivot_of_col[col] = static_cast<long>(rank);
    ++rank;
  }
  std::vector<Vec> basis;
  for (std::size_t col = 0; col < nc; ++col) {
    if (pivot_of_col[col] >= 0) continue;
    Vec v(nc, 0);
    v[col] = 1;
    for (std::size_t c2 = 0; c2 < col; ++c2)
      if (pivot_of_col[c2] >= 0)
        v[c2] = fp.neg(rows[static_cast<std::size_t>(pivot_of_col[c2])][col]);
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace

std::vector<Vec> mat_kernel(const Mat& m) {
  const CoeffRing& R = m.ring;
  std::size_t nc = m.cols;
  if (nc == 0) return {};
  if (m.rows == 0) {
    std::vector<Vec> basis;
    for (std::size_t j = 0; j < nc; ++j) {
      Vec v(nc, 0);
      v[j] = 1;
      basis.push_back(std::move(v));
    }
    return basis;
  }
  CoeffRing fp = CoeffRing::residue_field(R.p);
  if (R.M == 1) return fp_kernel(m, fp);

  // Digit lifting: K_e = {x : m x = 0 mod p^e}, refined from e = 0.
  Span K(R, nc);
  for (std::size_t j = 0; j < nc; ++j) {
    Vec v(nc, 0);
    v[j] = 1;
    K.add(std::move(v));
  }
  Elt pe = 1;
  for (std::uint32_t e = 0; e < R.M; ++e) {
    std::vector<Vec> gens = K.rows();
    std::size_t s = gens.size();
    Mat W(fp, m.rows, s);
    for (std::size_t i = 0; i < s; ++i) {
      Vec img = m.apply(gens[i]);
      for (std::size_t r = 0; r < m.rows; ++r) {
        if (img[r] % pe != 0) throw std::logic_error("kernel lifting invariant violated");
        W.at(r, i) = (img[r] / pe) % R.p;
      }
    }
    std::vector<Vec> C = fp_kernel(W, fp);
    Span next(R, nc);
    for (const auto& c : C) {
      Vec x(nc, 0);
      for (std::size_t i = 0; i < s; ++i) {
        if (!c[i]) continue;
        for (std::size_t j = 0; j < nc; ++j) x[j] = R.add(x[j], R.mul(c[i], gens[i][j]));
      }
      next.add(std::move(x));
    }
    for (const auto& g : gens) {
      Vec x(nc, 0);
      for (std::size_t j = 0; j < nc; ++j) x[j] = R.mul(R.p, g[j]);
      next.add(std::move(x));
    }
    K = std::move(next);
    pe *= R.p;
  }
  return K.rows();
}

std::optional<Vec> mat_solve(const Mat& m, const Vec& b) {
  const CoeffRing& R = m.ring;
  if (b.size() != m.rows) throw std::invalid_argument("mat_solve: dimension mismatch");
  std::size_t nc = m.cols;
  CoeffRing fp = CoeffRing::residue_field(R.p);

  Vec x(nc, 0);
  Span K(R, nc);
  for (std::size_t j = 0; j < nc; ++j) {
    Vec v(nc, 0);
    v[j] = 1;
    K.add(std::move(v));
  }
  Elt pe = 1;
  for (std::uint32_t e = 0; e < R.M; ++e) {
    std::vector<Vec> gens = K.rows();
    std::size_t s = gens.size();
    std::size_t nr = m.rows;
    // Augmented F_p solve of W c = (b - m x)/p^e.
    std::vector<Vec> aug(nr, Vec(s + 1, 0));
    Vec mx = m.apply(x);
    for (std::size_t i = 0; i < s; ++i) {
      Vec img = m.apply(gens[i]);
      for (std::size_t r = 0; r < nr; ++r) aug[r][i] = (img[r] / pe) % R.p;
    }
    for (std::size_t r = 0; r < nr; ++r) {
      Elt d = R.sub(b[r], mx[r]);
      if (d % pe != 0) throw std::logic_error("solve lifting invariant violated");
      aug[r][s] = (d / pe) % R.p;
    }
    std::vector<long> pivot_of_col(s, -1);
    std::size_t rank = 0;
    for (std::size_t col = 0; col < s && rank < nr; ++col) {
      std::size_t sel = nr;
      for (std::size_t i = rank; i < nr; ++i)
        if (aug[i][col]) {
          sel = i;
          break;
        }
      if (sel == nr) continue;
      std::swap(aug[rank], aug[sel]);
      Elt u = *fp.inv(aug[rank][col]);
      for (std::size_t j = col; j <= s; ++j) aug[rank][j] = fp.mul(aug[rank][j], u);
      for (std::size_t i = 0; i < nr; ++i) {
        if (i == rank) continue;
        Elt c = aug[i][col];
        if (!c) continue;
        for (std::size_t j = col; j <= s; ++j) aug[i][j] = fp.sub(aug[i][j], fp.mul(c, aug[rank][j]));
      }
      pivot_of_col[col] = static_cast<long>(rank);
      ++rank;
    }
    for (std::size_t i = rank; i < nr; ++i) {
      bool all0 = true;
      for (std::size_t j = 0; j < s; ++j)
        if (aug[i][j]) all0 = false;
      if (all0 && aug[i][s]) return std::nullopt;
    }
    Vec c(s, 0);
    for (std::size_t col = 0; col < s; ++col)
      if (pivot_of_col[col] >= 0) c[col] = aug[static_cast<std::size_t>(pivot_of_col[col])][s];
    for (std::size_t i = 0; i < s; ++i) {
      if (!c[i]) continue;
      for (std::size_t j = 0; j < nc; ++j) x[j] = R.add(x[j], R.mul(c[i], gens[i][j]));
    }
    // Refine the kernel span to the next digit (also used for the
    // final canonicalization of x).
    Mat W(fp, nr, s);
    for (std::size_t i = 0; i < s; ++i) {
      Vec img = m.apply(gens[i]);
      for (std::size_t r = 0; r < nr; ++r) W.at(r, i) = (img[r] / pe) % R.p;
    }
    std::vector<Vec> C = fp_kernel(W, fp);
    Span next(R, nc);
    for (const auto& cc : C) {
      Vec v(nc, 0);
      for (std::size_t i = 0; i < s; ++i) {
        if (!cc[i]) continue;
        for (std::size_t j = 0; j < nc; ++j) v[j] = R.add(v[j], R.mul(cc[i], gens[i][j]));
      }
      next.add(std::move(v));
    }
    for (const auto& g : gens) {
      Vec v(nc, 0);
      for (std::size_t j = 0; j < nc; ++j) v[j] = R.mul(R.p, g[j]);
      next.add(std::move(v));
    }
    K = std::move(next);
    pe *= R.p;
  }
  return K.reduce(std::move(x));
}

TruncPoly TruncPoly::constant(CoeffRing r, std::uint32_t nv, std::uint32_t d, Elt c) {
  TruncPoly f(r, nv, d);
  f.set(Expo(nv, 0), c % r.modulus);
  return f;
}

TruncPoly TruncPoly::variable(CoeffRing r, std::uint32_t nv, std::uint32_t d,
                              std::uint32_t i) {
  if (i >= nv) throw std::invalid_argument("variable index out of range");
  TruncPoly f(r, nv, d);
  Expo e(nv, 0);
  e[i] = 1;
  f.set(e, 1);
  return f;
}

void TruncPoly::set(const Expo& e, Elt c) {
  if (e.size() != nvars) throw std::invalid_argument("exponent arity mismatch");
  if (total_degree(e) > bound) return;
  c %= ring.modulus;
  if (c == 0)
    coeffs.erase(e);
  else
    coeffs[e] = c;
}

Elt TruncPoly::get(const Expo& e) const {
  auto it = coeffs.find(e);
  return it == coeffs.end() ? 0 : it->second;
}

Elt TruncPoly::constant_term() const { return get(Expo(nvars, 0)); }

std::uint32_t TruncPoly::degree() const {
  std::uint32_t d = 0;
  for (const auto& [e, c] : coeffs) d = std::max(d, total_degree(e));
  return d;
}

void TruncPoly::check_compatible(const TruncPoly& o) const {
  if (ring != o.ring || nvars != o.nvars || bound != o.bound)
    throw std::invalid_argument("TruncPoly parameter mismatch");
}

TruncPoly TruncPoly::add(const TruncPoly& o) const {
  check_compatible(o);
  TruncPoly r = *this;
  for (const auto& [e, c] : o.coeffs) r.set(e, ring.add(r.get(e), c));
  return r;
}

TruncPoly TruncPoly::sub(const TruncPoly& o) const {
  check_compatible(o);
  TruncPoly r = *this;
  for (const auto& [e, c] : o.coeffs) r.set(e, ring.sub(r.get(e), c));
  return r;
}

TruncPoly TruncPoly::neg() const {
  TruncPoly r(ring, nvars, bound);
  for (const auto& [e, c] : coeffs) r.coeffs[e] = ring.neg(c);
  return r;
}

TruncPoly TruncPoly::scaled(Elt c) const {
  TruncPoly r(ring, nvars, bound);
  for (const auto& [e, x] : coeffs) {
    Elt y = ring.mul(x, c);
    if (y) r.coeffs[e] = y;
  }
  return r;
}

TruncPoly poly_mul_trunc(const TruncPoly& a, const TruncPoly& b) {
  a.check_compatible(b);
  TruncPoly r(a.ring, a.nvars, a.bound);
  for (const auto& [ea, ca] : a.coeffs) {
    std::uint32_t da = total_degree(ea);
    for (const auto& [eb, cb] : b.coeffs) {
      if (da + total_degree(eb) > a.bound) continue;
      Expo e(a.nvars);
      for (std::uint32_t i = 0; i < a.nvars; ++i)
        e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
      r.set(e, a.ring.add(r.get(e), a.ring.mul(ca, cb)));
    }
  }
  return r;
}

namespace {

CoeffRing ring_from_json(const nlohmann::json& j) {
  Elt p = j.at("p").get<Elt>();
  std::uint32_t M = j.at("M").get<std::uint32_t>();
  return M == 1 ? CoeffRing::residue_field(p) : CoeffRing::truncated(p, M);
}

nlohmann::json ring_to_json(const CoeffRing& r) {
  return {{"p", r.p}, {"M", r.M}};
}

}  // namespace

std::string mat_to_json(const Mat& m) {
  nlohmann::json j;
  j["ring"] = ring_to_json(m.ring);
  j["rows"] = m.rows;
  j["cols"] = m.cols;
  j["entries"] = m.a;
  return j.dump();
}

Mat mat_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Mat m(ring_from_json(j.at("ring")), j.at("rows").get<std::size_t>(),
        j.at("cols").get<std::size_t>());
  Vec e = j.at("entries").get<Vec>();
  if (e.size() != m.rows * m.cols) throw std::invalid_argument("matrix entries size mismatch");
  for (std::size_t i = 0; i < e.size(); ++i) m.a[i] = e[i] % m.ring.modulus;
  return m;
}

std::string poly_to_json(const TruncPoly& f) {
  nlohmann::json j;
  j["ring"] = ring_to_json(f.ring);
  j["nvars"] = f.nvars;
  j["bound"] = f.bound;
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [e, c] : f.coeffs) {
    std::vector<int> ev(e.begin(), e.end());
    terms.push_back({{"e", ev}, {"c", c}});
  }
  j["terms"] = terms;
  return j.dump();
}

TruncPoly poly_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  TruncPoly f(ring_from_json(j.at("ring")), j.at("nvars").get<std::uint32_t>(),
              j.at("bound").get<std::uint32_t>());
  for (const auto& t : j.at("terms")) {
    auto ev = t.at("e").get<std::vector<int>>();
    Expo e(ev.begin(), ev.end());
    f.set(e, t.at("c").get<Elt>());
  }
  return f;
}

Span span_intersection(const Span& a, const Span& b) {
  if (a.dim_ambient() != b.dim_ambient() || a.ring() != b.ring())
    throw std::invalid_argument("span_intersection: mismatched ambient spaces");
  const CoeffRing& R = a.ring();
  std::size_t n = a.dim_ambient();
  const auto& ra = a.rows();
  const auto& rb = b.rows();
  // x in both spans iff x = sum u_i a_i = sum v_j b_j; solve the
  // combined homogeneous system.
  Mat sys(R, n, ra.size() + rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i)
    for (std::size_t r = 0; r < n; ++r) sys.at(r, i) = ra[i][r];
  for (std::size_t j = 0; j < rb.size(); ++j)
    for (std::size_t r = 0; r < n; ++r) sys.at(r, ra.size() + j) = R.neg(rb[j][r]);
  Span out(R, n);
  for (const auto& k : mat_kernel(sys)) {
    Vec x(n, 0);
    for (std::size_t i = 0; i < ra.size(); ++i) {
      if (!k[i]) continue;
      for (std::size_t r = 0; r < n; ++r) x[r] = R.add(x[r], R.mul(k[i], ra[i][r]));
    }
    out.add(std::move(x));
  }
  return out;
}

std::vector<std::uint32_t> quotient_cyclic_type(const std::vector<Vec>& gens,
                                                std::size_t n, const CoeffRing& R) {
  std::vector<Vec> m;
  for (const auto& g : gens) {
    if (g.size() != n) throw std::invalid_argument("quotient_cyclic_type: bad generator");
    Vec v = g;
    for (auto& x : v) x %= R.modulus;
    if (!Span::is_zero_vec(v)) m.push_back(std::move(v));
  }
  std::vector<bool> row_done(m.size(), false), col_done(n, false);
  std::vector<std::uint32_t> exps;
  std::size_t pivots = 0;
  for (;;) {
    // Entry of minimal valuation among active rows/columns.
    std::uint32_t best = R.M + 1;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (row_done[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (col_done[j] || m[i][j] == 0) continue;
        std::uint32_t v = R.val(m[i][j]);
        if (v < best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }
    if (best > R.M) break;
    Elt pv = 1;
    for (std::uint32_t i = 0; i < best; ++i) pv *= R.p;
    Elt u = *R.inv(m[bi][bj] / pv);
    for (std::size_t j = 0; j < n; ++j) m[bi][j] = R.mul(m[bi][j], u);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == bi || row_done[i] || m[i][bj] == 0) continue;
      Elt q = m[i][bj] / pv;
      for (std::size_t j = 0; j < n; ++j) m[i][j] = R.sub(m[i][j], R.mul(q, m[bi][j]));
    }
    // Column elimination only changes the basis of O^n; entries in the
    // pivot row other than the pivot die.
    for (std::size_t j = 0; j < n; ++j)
      if (j != bj) m[bi][j] = 0;
    row_done[bi] = true;
    col_done[bj] = true;
    ++pivots;
    if (best > 0) exps.push_back(best);
  }
  for (std::size_t j = 0; j < n; ++j)
    if (!col_done[j]) exps.push_back(R.M);
  std::sort(exps.begin(), exps.end(), std::greater<>());
  return exps;
}

std::vector<Expo> monomials_up_to(std::uint32_t nvars, std::uint32_t d) {
  std::vector<Expo> out;
  if (nvars == 0) {
    out.push_back(Expo{});
    return out;
  }
  Expo cur(nvars, 0);
  std::function<void(std::uint32_t, std::uint32_t)> rec = [&](std::uint32_t i,
                                                              std::uint32_t rem) {
    if (i + 1 == nvars) {
      cur[i] = static_cast<std::uint8_t>(rem);
      out.push_back(cur);
      cur[i] = 0;
      return;
    }
    for (std::uint32_t k = rem + 1; k-- > 0;) {
      cur[i] = static_cast<std::uint8_t>(k);
      rec(i + 1, rem - k);
    }
    cur[i] = 0;
  };
  for (std::uint32_t deg = 0; deg <= d; ++deg) rec(0, deg);
  return out;
}

}  // namespace twpatch
