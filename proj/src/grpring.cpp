#include "twpatch/grpring.hpp"

#include <json.hpp>

#include <algorithm>
#include <cassert>
#include <sstream>

namespace twpatch {

namespace {

Elt pow_u64(Elt b, std::uint32_t e) {
  Elt r = 1;
  for (std::uint32_t i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

GroupRing::GroupRing(CoeffRing o, std::uint32_t n, std::uint32_t qq) : O(o), N(n), q(qq) {
  if (O.mode != RingMode::TruncatedIntegers)
    throw std::invalid_argument("group ring coefficients must be truncated integers");
  if (N < 1 || q < 1) throw std::invalid_argument("group ring needs N >= 1 and q >= 1");
  pn_ = static_cast<std::size_t>(pow_u64(O.p, N));
  B_ = 1;
  for (std::uint32_t i = 0; i < q; ++i) {
    B_ *= pn_;
    if (B_ > 4096) throw std::invalid_argument("group too large for desk-scale computation");
  }
}

std::size_t GroupRing::group_mul(std::size_t a, std::size_t b) const {
  // Mixed-radix addition of exponent tuples.
  std::size_t r = 0, mult = 1;
  for (std::uint32_t i = 0; i < q; ++i) {
    std::size_t ea = a % pn_, eb = b % pn_;
    a /= pn_;
    b /= pn_;
    r += ((ea + eb) % pn_) * mult;
    mult *= pn_;
  }
  return r;
}

Vec GroupRing::one() const {
  Vec v = zero();
  v[0] = 1;
  return v;
}

Vec GroupRing::gen(std::uint32_t i) const {
  if (i >= q) throw std::invalid_argument("generator index out of range");
  Vec v = zero();
  std::size_t idx = 1;
  for (std::uint32_t j = 0; j < i; ++j) idx *= pn_;
  v[idx] = 1;
  return v;
}

Vec GroupRing::gen_minus_one(std::uint32_t i) const {
  Vec v = gen(i);
  v[0] = O.sub(v[0], 1);
  return v;
}

Vec GroupRing::mul(const Vec& a, const Vec& b) const {
  Vec r = zero();
  for (std::size_t i = 0; i < B_; ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < B_; ++j) {
      if (!b[j]) continue;
      std::size_t k = group_mul(i, j);
      r[k] = O.add(r[k], O.mul(a[i], b[j]));
    }
  }
  return r;
}

Vec GroupRing::add(const Vec& a, const Vec& b) const {
  Vec r(B_);
  for (std::size_t i = 0; i < B_; ++i) r[i] = O.add(a[i], b[i]);
  return r;
}

Vec GroupRing::sub(const Vec& a, const Vec& b) const {
  Vec r(B_);
  for (std::size_t i = 0; i < B_; ++i) r[i] = O.sub(a[i], b[i]);
  return r;
}

Vec GroupRing::scale(Elt c, const Vec& a) const {
  Vec r(B_);
  for (std::size_t i = 0; i < B_; ++i) r[i] = O.mul(c, a[i]);
  return r;
}

Elt GroupRing::augmentation(const Vec& a) const {
  Elt s = 0;
  for (std::size_t i = 0; i < B_; ++i) s = O.add(s, a[i]);
  return s;
}

std::optional<Vec> GroupRing::inv(const Vec& a) const {
  if (!is_unit(a)) return std::nullopt;
  return mat_solve(mult_matrix(a), one());
}

Mat GroupRing::mult_matrix(const Vec& a) const {
  Mat m(O, B_, B_);
  for (std::size_t j = 0; j < B_; ++j)
    for (std::size_t i = 0; i < B_; ++i) {
      if (!a[i]) continue;
      m.at(group_mul(i, j), j) = O.add(m.at(group_mul(i, j), j), a[i]);
    }
  return m;
}

Mat GroupRing::translation(std::size_t g) const {
  Mat m(O, B_, B_);
  for (std::size_t j = 0; j < B_; ++j) m.at(group_mul(g, j), j) = 1;
  return m;
}

Mat relation_matrix_O(const GroupRingModule& mod) {
  const GroupRing& S = mod.S;
  std::size_t B = S.order();
  std::size_t r = mod.relations.size();
  std::size_t rows = mod.gens * B, cols = r * B;
  if (rows > kMaxKernelColumns || cols > kMaxKernelColumns)
    throw std::invalid_argument("module exceeds desk-scale size limits (p^{Nq} g <= 256)");
  Mat A(S.O, rows, cols);
  for (std::size_t j = 0; j < r; ++j) {
    for (std::size_t a = 0; a < B; ++a) {
      // column (j, a) = t^a * r_j
      for (std::size_t i = 0; i < mod.gens; ++i) {
        const Vec& s = mod.relations[j][i];
        for (std::size_t g = 0; g < B; ++g) {
          if (!s[g]) continue;
          std::size_t row = i * B + S.group_mul(a, g);
          A.at(row, j * B + a) = S.O.add(A.at(row, j * B + a), s[g]);
        }
      }
    }
  }
  return A;
}

Realization realization(const GroupRingModule& mod) {
  const GroupRing& S = mod.S;
  std::size_t B = S.order();
  Realization real(S, mod.gens);
  Mat A = relation_matrix_O(mod);
  for (std::size_t c = 0; c < A.cols; ++c) {
    Vec col(A.rows);
    for (std::size_t i = 0; i < A.rows; ++i) col[i] = A.at(i, c);
    real.W.add(std::move(col));
  }
  for (std::uint32_t i = 0; i < S.q; ++i) {
    std::size_t gidx = 1;
    for (std::uint32_t j = 0; j < i; ++j) gidx *= S.pn();
    Mat tr = S.translation(gidx);
    Mat t(S.O, mod.gens * B, mod.gens * B);
    for (std::size_t g = 0; g < mod.gens; ++g)
      for (std::size_t a = 0; a < B; ++a)
        for (std::size_t b = 0; b < B; ++b)
          if (tr.at(a, b)) t.at(g * B + a, g * B + b) = tr.at(a, b);
    real.taction.push_back(std::move(t));
  }
  return real;
}

GroupRingModule minimal_presentation(const GroupRingModule& mod) {
  GroupRingModule cur = mod;
  const GroupRing& S = cur.S;
  for (;;) {
    // Drop zero relations.
    std::vector<std::vector<Vec>> keep;
    for (auto& rel : cur.relations) {
      bool nz = false;
      for (const auto& s : rel)
        if (!Span::is_zero_vec(s)) nz = true;
      if (nz) keep.push_back(rel);
    }
    cur.relations = std::move(keep);
    // Find a unit entry (deterministic scan order).
    std::size_t pj = cur.relations.size(), pi = cur.gens;
    for (std::size_t j = 0; j < cur.relations.size() && pj == cur.relations.size(); ++j)
      for (std::size_t i = 0; i < cur.gens; ++i)
        if (S.is_unit(cur.relations[j][i])) {
          pj = j;
          pi = i;
          break;
        }
    if (pj == cur.relations.size()) break;
    Vec uinv = *S.inv(cur.relations[pj][pi]);
    GroupRingModule next;
    next.S = S;
    next.gens = cur.gens - 1;
    for (std::size_t j = 0; j < cur.relations.size(); ++j) {
      if (j == pj) continue;
      const Vec& c = cur.relations[j][pi];
      std::vector<Vec> rel;
      for (std::size_t i = 0; i < cur.gens; ++i) {
        if (i == pi) continue;
        // substitute g_pi = -uinv * sum_{i != pi} relations[pj][i] g_i
        Vec e = S.sub(cur.relations[j][i], S.mul(S.mul(c, uinv), cur.relations[pj][i]));
        rel.push_back(std::move(e));
      }
      next.relations.push_back(std::move(rel));
    }
    cur = std::move(next);
  }
  return cur;
}

namespace {

// Add the group translates of v (a vector in O^{g*B}) to span.
void add_translates(Span& span, const GroupRing& S, std::size_t gens, const Vec& v) {
  std::size_t B = S.order();
  for (std::size_t a = 0; a < B; ++a) {
    Vec w(gens * B, 0);
    for (std::size_t i = 0; i < gens; ++i)
      for (std::size_t g = 0; g < B; ++g) {
        if (!v[i * B + g]) continue;
        std::size_t tg = S.group_mul(a, g);
        w[i * B + tg] = S.O.add(w[i * B + tg], v[i * B + g]);
      }
    span.add(std::move(w));
  }
}

// Span of m_S * (S-span of the given vectors): p * translates and
// (t_i - 1) * translates.
Span msk_span(const GroupRing& S, std::size_t gens, const std::vector<Vec>& vecs) {
  std::size_t B = S.order();
  Span span(S.O, gens * B);
  for (const auto& v : vecs) {
    for (std::size_t a = 0; a < B; ++a) {
      Vec w(gens * B, 0);
      for (std::size_t i = 0; i < gens; ++i)
        for (std::size_t g = 0; g < B; ++g) {
          if (!v[i * B + g]) continue;
          std::size_t tg = S.group_mul(a, g);
          w[i * B + tg] = S.O.add(w[i * B + tg], v[i * B + g]);
        }
      Vec pw(w.size());
      for (std::size_t x = 0; x < w.size(); ++x) pw[x] = S.O.mul(S.O.p, w[x]);
      span.add(std::move(pw));
      for (std::uint32_t t = 0; t < S.q; ++t) {
        std::size_t gidx = 1;
        for (std::uint32_t j = 0; j < t; ++j) gidx *= S.pn();
        Vec tw(w.size(), 0);
        for (std::size_t i = 0; i < gens; ++i)
          for (std::size_t g = 0; g < B; ++g) {
            if (!w[i * B + g]) continue;
            std::size_t tg = S.group_mul(gidx, g);
            tw[i * B + tg] = S.O.add(tw[i * B + tg], w[i * B + g]);
          }
        for (std::size_t x = 0; x < w.size(); ++x) tw[x] = S.O.sub(tw[x], w[x]);
        span.add(std::move(tw));
      }
    }
  }
  return span;
}

std::vector<Vec> relation_columns(const GroupRingModule& mod) {
  std::size_t B = mod.S.order();
  std::vector<Vec> cols;
  for (const auto& rel : mod.relations) {
    Vec v(mod.gens * B, 0);
    for (std::size_t i = 0; i < mod.gens; ++i)
      for (std::size_t g = 0; g < B; ++g) v[i * B + g] = rel[i][g];
    cols.push_back(std::move(v));
  }
  return cols;
}

// Representatives of a k-basis of (span(vecs) + base)/base over the
// residue field.
std::vector<Vec> subquotient_basis_k(const std::vector<Vec>& vecs, const Span& base,
                                     const CoeffRing& k) {
  Span cur(k, base.dim_ambient());
  for (const auto& r : base.rows()) cur.add(r);
  std::vector<Vec> reps;
  for (const auto& v : vecs) {
    if (cur.contains(v)) continue;
    reps.push_back(v);
    cur.add(v);
  }
  return reps;
}

}  // namespace

std::pair<std::uint64_t, std::uint64_t> tor_dims(const GroupRingModule& mod) {
  GroupRingModule min = minimal_presentation(mod);
  const GroupRing& S = min.S;
  std::size_t B = S.order();
  std::uint64_t t0 = min.gens;
  auto cols = relation_columns(min);
  Span K(S.O, min.gens * B);
  for (const auto& c : cols) add_translates(K, S, min.gens, c);
  Span mK = msk_span(S, min.gens, cols);
  std::uint64_t t1 = K.log_size() - mK.log_size();
  return {t0, t1};
}

long defect(const GroupRingModule& mod) {
  auto [t0, t1] = tor_dims(mod);
  return static_cast<long>(t0) - static_cast<long>(t1);
}

BalancedResult is_balanced(const GroupRingModule& mod) {
  BalancedResult res;
  GroupRingModule min = minimal_presentation(mod);
  const GroupRing& S = min.S;
  auto [t0, t1] = tor_dims(min);
  res.defect = static_cast<long>(t0) - static_cast<long>(t1);
  res.balanced = res.defect >= 0;
  if (!res.balanced) return res;
  // Minimal generating subset of the relations (Nakayama modulo
  // m_S K), padded with zero columns to a d x d presentation.
  auto cols = relation_columns(min);
  Span cur = msk_span(S, min.gens, cols);
  GroupRingModule sq;
  sq.S = S;
  sq.gens = min.gens;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cur.contains(cols[j])) continue;
    sq.relations.push_back(min.relations[j]);
    add_translates(cur, S, min.gens, cols[j]);
  }
  if (sq.relations.size() > static_cast<std::size_t>(t0))
    throw std::logic_error("balanced module with more minimal relations than generators");
  while (sq.relations.size() < static_cast<std::size_t>(t0))
    sq.relations.push_back(std::vector<Vec>(min.gens, S.zero()));
  res.square = std::move(sq);
  return res;
}

std::vector<std::uint32_t> coinvariants(const GroupRingModule& mod) {
  GroupRingModule min = minimal_presentation(mod);
  const GroupRing& S = min.S;
  // M_Delta = coker of the augmented relation matrix over O.
  std::vector<Vec> gens;
  for (const auto& rel : min.relations) {
    Vec v(min.gens, 0);
    for (std::size_t i = 0; i < min.gens; ++i) v[i] = S.augmentation(rel[i]);
    gens.push_back(std::move(v));
  }
  return quotient_cyclic_type(gens, min.gens, S.O);
}

SixTermReport six_term_check(const GroupRingModule& mod) {
  SixTermReport rep;
  GroupRingModule min = minimal_presentation(mod);
  const GroupRing& S = min.S;
  const CoeffRing& O = S.O;
  CoeffRing k = CoeffRing::residue_field(O.p);
  std::size_t B = S.order();
  std::size_t t0 = min.gens;
  std::size_t r = min.relations.size();

  // Two-step resolution S^s -> S^r -> S^t0 -> M -> 0: the syzygies of
  // the relation columns are the O-kernel of the relation matrix.
  std::vector<Vec> syz;
  if (r) {
    Mat A_O = relation_matrix_O(min);
    syz = mat_kernel(A_O);
  }

  // Tensor with O (coinvariants of free modules are augmentations).
  Mat A_aug(O, t0, r);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < t0; ++i) A_aug.at(i, j) = S.augmentation(min.relations[j][i]);
  std::vector<Vec> B_aug_cols;
  for (const auto& z : syz) {
    Vec v(r, 0);
    for (std::size_t j = 0; j < r; ++j) {
      Elt s = 0;
      for (std::size_t g = 0; g < B; ++g) s = O.add(s, z[j * B + g]);
      v[j] = s;
    }
    B_aug_cols.push_back(std::move(v));
  }

  // Tor1(M, O) = ker(A_aug) / im(B_aug) over O.
  Span imB_O(O, r);
  for (const auto& c : B_aug_cols) imB_O.add(c);
  std::vector<Vec> kerA_O;
  if (r) kerA_O = mat_kernel(A_aug);
  Span t1o_span(O, r);
  for (const auto& v : kerA_O) t1o_span.add(v);
  for (const auto& c : B_aug_cols) t1o_span.add(c);
  rep.len_tor1_O = t1o_span.log_size() - imB_O.log_size();

  // Tor1(M, k): same complex over the residue field.
  Mat A_k(k, t0, r);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < t0; ++i) A_k.at(i, j) = A_aug.at(i, j) % k.p;
  Span imB_k(k, r);
  for (const auto& c : B_aug_cols) {
    Vec v(r);
    for (std::size_t j = 0; j < r; ++j) v[j] = c[j] % k.p;
    imB_k.add(std::move(v));
  }
  std::vector<Vec> kerA_k;
  if (r) kerA_k = mat_kernel(A_k);
  std::vector<Vec> t1k_reps = subquotient_basis_k(kerA_k, imB_k, k);
  rep.dim_tor1_k = t1k_reps.size();

  // M_Delta = O^{t0} / im(A_aug); M (x) k likewise over k.
  Span imA_O(O, t0);
  for (std::size_t j = 0; j < r; ++j) {
    Vec c(t0);
    for (std::size_t i = 0; i < t0; ++i) c[i] = A_aug.at(i, j);
    imA_O.add(std::move(c));
  }
  rep.len_coinv = imA_O.quotient_log_size();
  Span imA_k(k, t0);
  for (std::size_t j = 0; j < r; ++j) {
    Vec c(t0);
    for (std::size_t i = 0; i < t0; ++i) c[i] = A_aug.at(i, j) % k.p;
    imA_k.add(std::move(c));
  }
  rep.dim_m_mod_k = imA_k.quotient_log_size();

  Elt ptop = 1;
  for (std::uint32_t i = 0; i + 1 < O.M; ++i) ptop *= O.p;  // p^{M-1}

  // Connecting map d: Tor1(M,k) -> M_Delta (snake with canonical
  // lifts; linear into M_Delta, well-defined mod the top layer).
  auto del = [&](const Vec& xk) {
    Vec lift(r);
    for (std::size_t j = 0; j < r; ++j) lift[j] = xk[j] % O.p;
    Vec y = A_aug.apply(lift);
    Vec out(t0);
    for (std::size_t i = 0; i < t0; ++i) {
      if (y[i] % O.p != 0) throw std::logic_error("six-term: snake lift not divisible by p");
      out[i] = y[i] / O.p;
    }
    return out;
  };

  // Node: injection.  ker(pi*: Tor1(M,O) -> Tor1(M,k)) must equal the
  // image of Tor1(M, pO) under the multiplication-by-p lift.
  {
    Span P(O, r);
    for (const auto& c : B_aug_cols) P.add(c);
    for (std::size_t j = 0; j < r; ++j) {
      Vec v(r, 0);
      v[j] = O.p % O.modulus;
      P.add(std::move(v));
    }
    Span ker_pi = span_intersection(t1o_span, P);
    Span lhs(O, r);
    for (const auto& v : ker_pi.rows()) lhs.add(v);
    for (const auto& c : B_aug_cols) lhs.add(c);

    Span rhs(O, r);
    for (const auto& c : B_aug_cols) rhs.add(c);
    if (O.M > 1) {
      CoeffRing Om1 = CoeffRing::truncated(O.p, O.M - 1);
      Mat A_m1(Om1, t0, r);
      for (std::size_t j = 0; j < r; ++j)
        for (std::size_t i = 0; i < t0; ++i) A_m1.at(i, j) = A_aug.at(i, j) % Om1.modulus;
      std::vector<Vec> ker_m1;
      if (r) ker_m1 = mat_kernel(A_m1);
      for (const auto& v : ker_m1) {
        Vec w(r);
        for (std::size_t j = 0; j < r; ++j) w[j] = O.mul(O.p, v[j] % O.modulus);
        rhs.add(std::move(w));
      }
    }
    rep.node_injection = lhs.same_span(rhs);
  }

  // kappa = im A + top truncation layer p^{M-1} O^{t0}.
  Span kappa(O, t0);
  for (const auto& row : imA_O.rows()) kappa.add(row);
  for (std::size_t i = 0; i < t0; ++i) {
    Vec v(t0, 0);
    v[i] = ptop % O.modulus;
    kappa.add(std::move(v));
  }

  // Node at Tor1(M,k): ker(d into M_Delta/kappa) = im(pi*); the
  // containment holds structurally, so compare dimensions over k.
  {
    Span im_d_kappa(O, t0);
    for (const auto& row : kappa.rows()) im_d_kappa.add(row);
    std::uint64_t base = im_d_kappa.log_size();
    for (const auto& x : t1k_reps) im_d_kappa.add(del(x));
    std::uint64_t rank_d = im_d_kappa.log_size() - base;
    std::uint64_t ker_d = rep.dim_tor1_k - rank_d;

    std::vector<Vec> pi_gens;
    for (const auto& v : t1o_span.rows()) {
      Vec w(r);
      for (std::size_t j = 0; j < r; ++j) w[j] = v[j] % O.p;
      pi_gens.push_back(std::move(w));
    }
    std::uint64_t im_pi = subquotient_basis_k(pi_gens, imB_k, k).size();
    rep.node_tor1k = ker_d == im_pi;
  }

  // Node at the first M_Delta: im(d) + kappa = ker(p: M_D -> M_D) + top layer.
  {
    Span lhs(O, t0);
    for (const auto& row : kappa.rows()) lhs.add(row);
    for (const auto& x : t1k_reps) lhs.add(del(x));

    // ker(p on M_Delta): {y : p y in im A}, as a span together with im A.
    std::size_t na = imA_O.rows().size();
    Mat sys(O, t0, t0 + na);
    for (std::size_t i = 0; i < t0; ++i) sys.at(i, i) = O.p % O.modulus;
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t i = 0; i < t0; ++i) sys.at(i, t0 + j) = O.neg(imA_O.rows()[j][i]);
    Span rhs(O, t0);
    for (const auto& row : imA_O.rows()) rhs.add(row);
    for (const auto& kv : mat_kernel(sys)) {
      Vec y(kv.begin(), kv.begin() + static_cast<long>(t0));
      rhs.add(std::move(y));
    }
    for (std::size_t i = 0; i < t0; ++i) {
      Vec v(t0, 0);
      v[i] = ptop % O.modulus;
      rhs.add(std::move(v));
    }
    rep.node_coinv1 = lhs.same_span(rhs);
  }

  // Node at the second M_Delta: right-exactness, ker(M_D -> M(x)k) = p M_D.
  {
    Span lhs(O, t0);
    for (const auto& row : imA_O.rows()) lhs.add(row);
    for (std::size_t i = 0; i < t0; ++i) {
      Vec v(t0, 0);
      v[i] = O.p % O.modulus;
      lhs.add(std::move(v));
    }
    Span rhs(O, t0);
    for (std::size_t i = 0; i < t0; ++i) {
      Vec v(t0, 0);
      v[i] = O.p % O.modulus;
      rhs.add(std::move(v));
    }
    for (const auto& row : imA_O.rows()) rhs.add(row);
    rep.node_coinv2 = lhs.same_span(rhs);
    rep.node_surjective = true;
  }

  return rep;
}

std::string GroupRingModule::to_json() const {
  nlohmann::json j;
  j["groupring"] = {{"p", S.O.p}, {"M", S.O.M}, {"N", S.N}, {"q", S.q}};
  j["generators"] = gens;
  nlohmann::json rels = nlohmann::json::array();
  for (const auto& rel : relations) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& s : rel) row.push_back(s);
    rels.push_back(row);
  }
  j["relations"] = rels;
  return j.dump(2);
}

GroupRingModule GroupRingModule::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  auto& gr = j.at("groupring");
  GroupRing S(CoeffRing::truncated(gr.at("p").get<Elt>(), gr.at("M").get<std::uint32_t>()),
              gr.at("N").get<std::uint32_t>(), gr.at("q").get<std::uint32_t>());
  GroupRingModule mod;
  mod.S = S;
  mod.gens = j.at("generators").get<std::size_t>();
  for (const auto& row : j.at("relations")) {
    std::vector<Vec> rel;
    for (const auto& s : row) {
      Vec v = s.get<Vec>();
      if (v.size() != S.order()) throw std::invalid_argument("relation entry has wrong length");
      for (auto& x : v) x %= S.O.modulus;
      rel.push_back(std::move(v));
    }
    if (rel.size() != mod.gens) throw std::invalid_argument("relation arity mismatch");
    mod.relations.push_back(std::move(rel));
  }
  return mod;
}

}  // namespace twpatch
