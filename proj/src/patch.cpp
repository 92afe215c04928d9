#include "twpatch/patch.hpp"

#include <json.hpp>

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>

namespace twpatch {

namespace {

Elt pow_u64(Elt b, std::uint32_t e) {
  Elt r = 1;
  for (std::uint32_t i = 0; i < e; ++i) r *= b;
  return r;
}

Vec unit_vec(std::size_t n, std::size_t i) {
  Vec v(n, 0);
  v[i] = 1;
  return v;
}

}  // namespace

QuotientModule::QuotientModule(CoeffRing O, std::size_t ambient, const Span& W,
                               const std::vector<Mat>& ambient_ops)
    : O_(O), ambient_(ambient), W_(W) {
  const auto& pc = W_.pivots();
  const auto& pv = W_.pivot_vals();
  std::vector<std::uint32_t> col_val(ambient, O.M);
  for (std::size_t i = 0; i < pc.size(); ++i) col_val[pc[i]] = pv[i];
  for (std::size_t j = 0; j < ambient; ++j) {
    if (col_val[j] == 0) continue;
    basis_cols_.push_back(j);
    orders_.push_back(col_val[j]);
  }
  std::size_t t = basis_cols_.size();
  for (const auto& big : ambient_ops) {
    Mat red(O, t, t);
    for (std::size_t j = 0; j < t; ++j) {
      Vec img = big.apply(unit_vec(ambient, basis_cols_[j]));
      Vec r = project(img);
      for (std::size_t i = 0; i < t; ++i) red.at(i, j) = r[i];
    }
    ops_.push_back(std::move(red));
  }
}

std::uint64_t QuotientModule::length() const {
  std::uint64_t s = 0;
  for (auto v : orders_) s += v;
  return s;
}

Vec QuotientModule::project(const Vec& ambient) const {
  Vec red = W_.reduce(ambient);
  Vec r(basis_cols_.size(), 0);
  std::size_t bi = 0;
  for (std::size_t j = 0; j < red.size(); ++j) {
    if (bi < basis_cols_.size() && basis_cols_[bi] == j) {
      r[bi++] = red[j];
    } else if (red[j] != 0) {
      throw std::logic_error("QuotientModule: residue supported off the basis");
    }
  }
  return r;
}

Vec QuotientModule::reduce(Vec coords) const {
  Vec amb(ambient_, 0);
  for (std::size_t j = 0; j < coords.size(); ++j)
    amb[basis_cols_[j]] = coords[j] % O_.modulus;
  return project(amb);
}

Span QuotientModule::torsion_span() const {
  std::size_t t = basis_cols_.size();
  Span s(O_, t);
  for (std::size_t j = 0; j < t; ++j) {
    if (orders_[j] >= O_.M) continue;
    Vec v(t, 0);
    v[j] = pow_u64(O_.p, orders_[j]) % O_.modulus;
    Vec red = reduce(v);
    for (std::size_t i = 0; i < t; ++i) v[i] = O_.sub(v[i], red[i]);
    v[j] = pow_u64(O_.p, orders_[j]) % O_.modulus;
    s.add(std::move(v));
  }
  return s;
}

namespace {

// ---- R and H helpers ----------------------------------------------------

struct RContext {
  ArtinianAlgebra R;
  std::vector<Mat> basis_action;  // action of each R basis element on H

  explicit RContext(const TWSystem& sys) : R(sys.R_pres) {
    std::size_t h = sys.h_dim;
    const CoeffRing& O = sys.O;
    for (std::size_t j = 0; j < R.basis_size(); ++j) {
      const Expo& e = R.basis_monomial(j);
      Mat m = Mat::identity(O, h);
      for (std::size_t v = 0; v < e.size(); ++v)
        for (std::uint8_t k = 0; k < e[v]; ++k) m = sys.H_action[v].mul(m);
      basis_action.push_back(std::move(m));
    }
  }

  Mat action_of(const TWSystem& sys, const Vec& rcoords) const {
    Mat m(sys.O, sys.h_dim, sys.h_dim);
    for (std::size_t j = 0; j < rcoords.size(); ++j) {
      if (!rcoords[j]) continue;
      m = m.add(basis_action[j].scaled(rcoords[j]));
    }
    return m;
  }
};

Span wh_span(const TWSystem& sys) {
  Span w(sys.O, sys.h_dim);
  for (const auto& g : sys.W_H_gens) w.add(g);
  return w;
}

std::uint64_t h_length(const TWSystem& sys) { return wh_span(sys).quotient_log_size(); }

std::uint64_t h_gens_over_R(const TWSystem& sys) {
  Span span = wh_span(sys);
  for (std::size_t c = 0; c < sys.h_dim; ++c) {
    Vec v = unit_vec(sys.h_dim, c);
    Vec pv(sys.h_dim);
    for (std::size_t i = 0; i < sys.h_dim; ++i) pv[i] = sys.O.mul(sys.O.p, v[i]);
    span.add(std::move(pv));
    for (const auto& act : sys.H_action) span.add(act.apply(v));
  }
  return span.quotient_log_size();
}

// d_N = p^N R + Ann_R(H) as a span in R's reduced coordinates.
Span dn_span(const TWSystem& sys, const RContext& rc, std::uint32_t N) {
  std::size_t dr = rc.R.basis_size();
  std::size_t h = sys.h_dim;
  const CoeffRing& O = sys.O;
  Span dn(O, dr);
  Elt pn = 1;
  for (std::uint32_t i = 0; i < N && pn; ++i) pn = pn * O.p % O.modulus;
  for (std::size_t j = 0; j < dr; ++j) {
    Vec v(dr, 0);
    v[j] = pn;
    dn.add(rc.R.reduce(std::move(v)));
  }
  Span wh = wh_span(sys);
  std::size_t nw = wh.rows().size();
  Mat sys_m(O, h * h, dr + h * nw);
  for (std::size_t j = 0; j < dr; ++j)
    for (std::size_t c = 0; c < h; ++c)
      for (std::size_t i = 0; i < h; ++i)
        sys_m.at(c * h + i, j) = rc.basis_action[j].at(i, c);
  for (std::size_t c = 0; c < h; ++c)
    for (std::size_t w = 0; w < nw; ++w)
      for (std::size_t i = 0; i < h; ++i)
        sys_m.at(c * h + i, dr + c * nw + w) = O.neg(wh.rows()[w][i]);
  for (const auto& k : mat_kernel(sys_m)) {
    Vec r(k.begin(), k.begin() + static_cast<long>(dr));
    dn.add(rc.R.reduce(std::move(r)));
  }
  return dn;
}

Vec block_augment(const GroupRing& S, std::size_t gens, const Vec& v) {
  std::size_t B = S.order();
  Vec r(gens, 0);
  for (std::size_t i = 0; i < gens; ++i)
    for (std::size_t g = 0; g < B; ++g) r[i] = S.O.add(r[i], v[i * B + g]);
  return r;
}

Mat augmented_relation_matrix(const GroupRingModule& mod) {
  Mat A(mod.S.O, mod.gens, mod.relations.size());
  for (std::size_t j = 0; j < mod.relations.size(); ++j)
    for (std::size_t i = 0; i < mod.gens; ++i)
      A.at(i, j) = mod.S.augmentation(mod.relations[j][i]);
  return A;
}

// Is every translation operator inside the algebra generated by the
// x-operators (with the End torsion of the module)?
bool action_contained(const QuotientModule& Q, std::size_t num_x, std::size_t num_t) {
  const CoeffRing& O = Q.ring();
  std::size_t t = Q.dim();
  if (t == 0) return true;
  Span sp(O, t * t);
  for (std::size_t i = 0; i < t; ++i) {
    if (Q.order_exp(i) >= O.M) continue;
    for (std::size_t j = 0; j < t; ++j) {
      Vec v(t * t, 0);
      v[i * t + j] = pow_u64(O.p, Q.order_exp(i)) % O.modulus;
      sp.add(std::move(v));
    }
  }
  std::vector<Mat> elems;
  std::vector<Mat> gens;
  for (std::size_t i = 0; i < num_x; ++i) gens.push_back(Q.op(num_t + i));
  auto flat = [&](const Mat& m) {
    Vec v(t * t);
    for (std::size_t i = 0; i < t * t; ++i) v[i] = m.a[i];
    return v;
  };
  auto push = [&](const Mat& m) {
    Vec v = flat(m);
    if (sp.contains(v)) return;
    sp.add(std::move(v));
    elems.push_back(m);
  };
  push(Mat::identity(O, t));
  for (const auto& g : gens) push(g);
  std::size_t scan = 0;
  while (scan < elems.size()) {
    Mat e = elems[scan++];
    for (const auto& g : gens) {
      push(e.mul(g));
      push(g.mul(e));
    }
  }
  for (std::size_t i = 0; i < num_t; ++i)
    if (!sp.contains(flat(Q.op(i)))) return false;
  return true;
}

QuotientModule hn_module(const TWSystem& sys, std::uint32_t N) {
  const GroupRingModule& mod = sys.H_N[N - 1];
  Realization real = realization(mod);
  std::vector<Mat> ops = real.taction;
  for (const auto& x : sys.HN_xaction[N - 1]) ops.push_back(x);
  return QuotientModule(sys.O, real.ambient(), real.W, ops);
}

}  // namespace

std::string HypothesisReport::first_failure() const {
  for (const auto& l : levels) {
    if (!l.action_contained)
      return "level " + std::to_string(l.level) + ": S-action not inside the R_inf image";
    if (!l.psi_isomorphism)
      return "level " + std::to_string(l.level) + ": psi is not an R_inf isomorphism";
    if (!l.balanced)
      return "level " + std::to_string(l.level) + ": H_N unbalanced (defect " +
             std::to_string(l.defect) + ")";
  }
  return "";
}

HypothesisReport check_hypotheses(const TWSystem& sys) {
  HypothesisReport rep;
  RContext rc(sys);
  Span wh = wh_span(sys);
  std::uint64_t lenH = h_length(sys);
  for (std::uint32_t N = 1; N <= sys.max_level; ++N) {
    HypothesisReport::Level lv;
    lv.level = N;
    const GroupRingModule& mod = sys.H_N[N - 1];
    const GroupRing& S = mod.S;
    std::size_t B = S.order();

    QuotientModule Q = hn_module(sys, N);
    lv.action_contained = action_contained(Q, sys.q >= 1 ? sys.q - 1 : 0, S.q);

    {
      const Mat& psi = sys.psi[N - 1];
      Mat A_aug = augmented_relation_matrix(mod);
      bool ok = psi.rows == sys.h_dim && psi.cols == mod.gens;
      for (std::size_t j = 0; ok && j < A_aug.cols; ++j) {
        Vec col(mod.gens);
        for (std::size_t i = 0; i < mod.gens; ++i) col[i] = A_aug.at(i, j);
        if (!wh.contains(psi.apply(col))) ok = false;
      }
      if (ok) {
        Span im = wh;
        for (std::size_t j = 0; j < mod.gens; ++j) {
          Vec col(sys.h_dim);
          for (std::size_t i = 0; i < sys.h_dim; ++i) col[i] = psi.at(i, j);
          im.add(std::move(col));
        }
        if (im.quotient_log_size() != 0) ok = false;
        Span imA(sys.O, mod.gens);
        for (std::size_t j = 0; j < A_aug.cols; ++j) {
          Vec col(mod.gens);
          for (std::size_t i = 0; i < mod.gens; ++i) col[i] = A_aug.at(i, j);
          imA.add(std::move(col));
        }
        if (imA.quotient_log_size() != lenH) ok = false;
      }
      if (ok) {
        for (std::size_t xi = 0; xi + 1 < sys.q; ++xi) {
          const Mat& X = sys.HN_xaction[N - 1][xi];
          Mat xbar(sys.O, mod.gens, mod.gens);
          for (std::size_t j = 0; j < mod.gens; ++j) {
            Vec img = X.apply(unit_vec(mod.gens * B, j * B));
            Vec ag = block_augment(S, mod.gens, img);
            for (std::size_t i = 0; i < mod.gens; ++i) xbar.at(i, j) = ag[i];
          }
          Mat lhs = psi.mul(xbar);
          Mat rhs = rc.action_of(sys, sys.phi[N - 1][xi]).mul(psi);
          Mat diff = lhs.sub(rhs);
          for (std::size_t j = 0; ok && j < diff.cols; ++j) {
            Vec col(diff.rows);
            for (std::size_t i = 0; i < diff.rows; ++i) col[i] = diff.at(i, j);
            if (!wh.contains(col)) ok = false;
          }
        }
      }
      lv.psi_isomorphism = ok;
    }

    auto bal = is_balanced(mod);
    lv.balanced = bal.balanced;
    lv.defect = bal.defect;
    rep.levels.push_back(lv);
  }
  return rep;
}

namespace {

// X = H_M / b_N H_M, with operators [q translations, x-actions].
QuotientModule x_module(const TWSystem& sys, std::uint32_t M, std::uint32_t N) {
  const GroupRingModule& mod = sys.H_N[M - 1];
  const GroupRing& S = mod.S;
  std::size_t B = S.order();
  std::size_t amb = mod.gens * B;
  Realization real = realization(mod);
  Span W = real.W;
  Elt pn = 1;
  for (std::uint32_t i = 0; i < N; ++i) pn = pn * sys.O.p % sys.O.modulus;
  std::size_t pN = 1;
  for (std::uint32_t i = 0; i < N; ++i) pN *= static_cast<std::size_t>(sys.O.p);
  for (std::size_t c = 0; c < amb; ++c) {
    Vec v(amb, 0);
    v[c] = pn;
    W.add(std::move(v));
    for (std::uint32_t t = 0; t < S.q; ++t) {
      std::size_t gi = 1;
      for (std::uint32_t j = 0; j < t; ++j) gi *= S.pn();
      std::size_t exp = pN % S.pn();
      std::size_t g = 0;
      for (std::size_t rep = 0; rep < exp; ++rep) g = S.group_mul(g, gi);
      Vec w(amb, 0);
      std::size_t blk = c / B, off = c % B;
      w[blk * B + S.group_mul(g, off)] = 1;
      w[c] = sys.O.sub(w[c], 1);
      W.add(std::move(w));
    }
  }
  std::vector<Mat> ops = real.taction;
  for (const auto& x : sys.HN_xaction[M - 1]) ops.push_back(x);
  return QuotientModule(sys.O, amb, W, ops);
}

// Greedy Nakayama generator selection of X over S/b_N.
std::vector<Vec> module_generators(const QuotientModule& X, std::uint32_t q) {
  const CoeffRing& O = X.ring();
  std::size_t t = X.dim();
  Span cur = X.torsion_span();
  for (std::size_t j = 0; j < t; ++j) {
    Vec e = unit_vec(t, j);
    Vec pe(t);
    for (std::size_t i = 0; i < t; ++i) pe[i] = O.mul(O.p, e[i]);
    cur.add(X.reduce(std::move(pe)));
    for (std::uint32_t ti = 0; ti < q; ++ti) {
      Vec img = X.op(ti).apply(e);
      for (std::size_t i = 0; i < t; ++i) img[i] = O.sub(img[i], e[i]);
      cur.add(X.reduce(std::move(img)));
    }
  }
  std::vector<Vec> gens;
  for (std::size_t j = 0; j < t; ++j) {
    Vec e = unit_vec(t, j);
    if (cur.contains(e)) continue;
    gens.push_back(e);
    // Close the current span under the S-action of the new generator.
    std::vector<Vec> queue{e};
    cur.add(e);
    std::size_t scan = 0;
    while (scan < queue.size()) {
      Vec v = queue[scan++];
      for (std::uint32_t ti = 0; ti < q; ++ti) {
        Vec img = X.reduce(X.op(ti).apply(v));
        if (!cur.contains(img)) {
          cur.add(img);
          queue.push_back(img);
        }
      }
    }
  }
  return gens;
}

Mat first_map_O(const PatchingDatum& D) {
  const GroupRing& Sb = D.Sb;
  std::size_t Bb = Sb.order();
  std::size_t d = D.d;
  Mat A(Sb.O, d * Bb, d * Bb);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t a = 0; a < Bb; ++a)
      for (std::size_t i = 0; i < d; ++i) {
        const Vec& s = D.P_first[j][i];
        for (std::size_t g = 0; g < Bb; ++g) {
          if (!s[g]) continue;
          std::size_t row = i * Bb + Sb.group_mul(a, g);
          A.at(row, j * Bb + a) = Sb.O.add(A.at(row, j * Bb + a), s[g]);
        }
      }
  return A;
}

}  // namespace

PatchingDatum datum_from_system(const TWSystem& sys, std::uint32_t M, std::uint32_t N) {
  if (N > M || M > sys.max_level)
    throw std::invalid_argument("datum_from_system requires N <= M <= max_level");
  RContext rc(sys);
  std::uint32_t Nb = std::min<std::uint32_t>(N, sys.O.M);
  CoeffRing Ob = CoeffRing::truncated(sys.O.p, Nb);
  GroupRing Sb(Ob, N, sys.q);

  QuotientModule X = x_module(sys, M, N);
  std::size_t t = X.dim();

  PatchingDatum D{N,  M,  Ob, Sb, {}, X, Mat(sys.O, 0, 0), {}, 1, {},
                  Mat(sys.O, 0, 0), {}};

  Span dn = dn_span(sys, rc, N);
  for (std::size_t xi = 0; xi + 1 < sys.q; ++xi)
    D.phi.push_back(dn.reduce(sys.phi[M - 1][xi]));

  // psi on X coordinates: pick an ambient unit representative of each
  // basis class, augment its generator block, and apply psi_M.
  {
    const GroupRingModule& mod = sys.H_N[M - 1];
    const GroupRing& S = mod.S;
    const Mat& psi = sys.psi[M - 1];
    Mat result(sys.O, sys.h_dim, t);
    std::size_t amb_n = mod.gens * S.order();
    std::vector<long> rep_of(t, -1);
    for (std::size_t c = 0; c < amb_n; ++c) {
      Vec pr = X.project(unit_vec(amb_n, c));
      for (std::size_t j = 0; j < t; ++j)
        if (rep_of[j] < 0 && pr == unit_vec(t, j)) rep_of[j] = static_cast<long>(c);
    }
    for (std::size_t j = 0; j < t; ++j) {
      if (rep_of[j] < 0)
        throw std::logic_error("datum_from_system: basis column without ambient unit rep");
      Vec ag =
          block_augment(S, mod.gens, unit_vec(amb_n, static_cast<std::size_t>(rep_of[j])));
      Vec hval = psi.apply(ag);
      for (std::size_t i = 0; i < sys.h_dim; ++i) result.at(i, j) = hval[i];
    }
    D.psi_x = std::move(result);
  }

  // W_H + p^N on the H side.
  {
    Elt pn = 1;
    for (std::uint32_t i = 0; i < N && i < sys.O.M; ++i) pn = pn * sys.O.p % sys.O.modulus;
    for (const auto& g : sys.W_H_gens) D.h_slack.push_back(g);
    for (std::size_t c = 0; c < sys.h_dim; ++c) {
      Vec v(sys.h_dim, 0);
      v[c] = pn % sys.O.modulus;
      D.h_slack.push_back(std::move(v));
    }
  }

  // d = dim_k H / p H.
  {
    Span span = wh_span(sys);
    for (std::size_t c = 0; c < sys.h_dim; ++c) {
      Vec v(sys.h_dim, 0);
      v[c] = sys.O.p % sys.O.modulus;
      span.add(std::move(v));
    }
    D.d = span.quotient_log_size();
  }

  std::vector<Vec> gens = module_generators(D.X, sys.q);
  if (gens.size() > D.d)
    throw std::logic_error("datum_from_system: more generators than d (unbalanced input?)");
  while (gens.size() < D.d) gens.push_back(Vec(t, 0));
  D.gens = gens;

  // The presentation map (S/b)^d -> X as an O-matrix on X coordinates.
  std::size_t Bb = Sb.order();
  std::size_t cols = D.d * Bb;
  Mat pres(sys.O, t, cols);
  for (std::size_t i = 0; i < D.d; ++i)
    for (std::size_t a = 0; a < Bb; ++a) {
      Vec v = gens[i];
      std::size_t rem = a;
      for (std::uint32_t ti = 0; ti < sys.q; ++ti) {
        std::size_t e = rem % Sb.pn();
        rem /= Sb.pn();
        for (std::size_t rpt = 0; rpt < e; ++rpt) v = D.X.reduce(D.X.op(ti).apply(v));
      }
      for (std::size_t r = 0; r < t; ++r) pres.at(r, i * Bb + a) = v[r];
    }
  D.pres_map = pres;

  // Kernel of the presentation map (with torsion slack), then a greedy
  // minimal S-generating subset padded to d columns.
  Span xt = D.X.torsion_span();
  std::size_t nt = xt.rows().size();
  Mat map(sys.O, t, cols + nt);
  for (std::size_t r = 0; r < t; ++r)
    for (std::size_t c = 0; c < cols; ++c) map.at(r, c) = pres.at(r, c);
  for (std::size_t w = 0; w < nt; ++w)
    for (std::size_t r = 0; r < t; ++r) map.at(r, cols + w) = sys.O.neg(xt.rows()[w][r]);
  std::vector<Vec> kernel_cols;
  for (const auto& k : mat_kernel(map)) {
    Vec v(k.begin(), k.begin() + static_cast<long>(cols));
    for (auto& x : v) x %= Ob.modulus;
    if (!Span::is_zero_vec(v)) kernel_cols.push_back(std::move(v));
  }
  {
    Span cur(Ob, cols);
    auto add_translates_sb = [&](Span& span, const Vec& v, bool msk) {
      for (std::size_t a = 0; a < Bb; ++a) {
        Vec w(cols, 0);
        for (std::size_t i = 0; i < D.d; ++i)
          for (std::size_t g = 0; g < Bb; ++g) {
            if (!v[i * Bb + g]) continue;
            std::size_t tg = Sb.group_mul(a, g);
            w[i * Bb + tg] = Ob.add(w[i * Bb + tg], v[i * Bb + g]);
          }
        if (!msk) {
          span.add(std::move(w));
          continue;
        }
        Vec pw(cols);
        for (std::size_t x2 = 0; x2 < cols; ++x2) pw[x2] = Ob.mul(Ob.p, w[x2]);
        span.add(std::move(pw));
        for (std::uint32_t ti = 0; ti < sys.q; ++ti) {
          std::size_t gi = 1;
          for (std::uint32_t j = 0; j < ti; ++j) gi *= Sb.pn();
          Vec tw(cols, 0);
          for (std::size_t i = 0; i < D.d; ++i)
            for (std::size_t g = 0; g < Bb; ++g) {
              if (!w[i * Bb + g]) continue;
              std::size_t tg = Sb.group_mul(gi, g);
              tw[i * Bb + tg] = Ob.add(tw[i * Bb + tg], w[i * Bb + g]);
            }
          for (std::size_t x2 = 0; x2 < cols; ++x2) tw[x2] = Ob.sub(tw[x2], w[x2]);
          span.add(std::move(tw));
        }
      }
    };
    for (const auto& k : kernel_cols) add_translates_sb(cur, k, true);
    for (const auto& k : kernel_cols) {
      if (cur.contains(k)) continue;
      std::vector<Vec> col(D.d);
      for (std::size_t i = 0; i < D.d; ++i)
        col[i] = Vec(k.begin() + static_cast<long>(i * Bb),
                     k.begin() + static_cast<long>((i + 1) * Bb));
      D.P_first.push_back(std::move(col));
      add_translates_sb(cur, k, false);
    }
  }
  if (D.P_first.size() > D.d)
    throw std::logic_error("datum_from_system: presentation kernel needs more than d columns");
  while (D.P_first.size() < D.d)
    D.P_first.push_back(std::vector<Vec>(D.d, Sb.zero()));
  return D;
}

PatchingDatum datum_reduce(const TWSystem& sys, const PatchingDatum& D, std::uint32_t Nprime) {
  if (Nprime > D.level) throw std::invalid_argument("datum_reduce: N' must be <= level");
  // All structure reduced modulo b_{N'} and d_{N'}: rebuilding from the
  // same source level realizes exactly that, and is functorial by
  // construction.
  return datum_from_system(sys, D.from_level, Nprime);
}

namespace {

bool same_phi(const PatchingDatum& a, const PatchingDatum& b) {
  if (a.phi.size() != b.phi.size()) return false;
  for (std::size_t i = 0; i < a.phi.size(); ++i)
    if (a.phi[i] != b.phi[i]) return false;
  return true;
}

// Presentation compatibility: lift f through the surjections and solve
// A2 V = U A1 over the group ring coefficients.
bool presentations_compatible(const PatchingDatum& D1, const PatchingDatum& D2, const Mat& f) {
  const CoeffRing& Ob = D1.Ob;
  std::size_t cols = D1.d * D1.Sb.order();
  std::size_t t2 = D2.X.dim();
  // U columns: preimages under pres_map2 of f(pres_map1 e_c).
  Span tors2 = D2.X.torsion_span();
  std::size_t nt = tors2.rows().size();
  Mat solver(D2.X.ring(), t2, cols + nt);
  for (std::size_t r = 0; r < t2; ++r)
    for (std::size_t c = 0; c < cols; ++c) solver.at(r, c) = D2.pres_map.at(r, c);
  for (std::size_t w = 0; w < nt; ++w)
    for (std::size_t r = 0; r < t2; ++r) solver.at(r, cols + w) = D2.X.ring().neg(tors2.rows()[w][r]);
  Mat U(Ob, cols, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    Vec img(D1.X.dim());
    for (std::size_t r = 0; r < D1.X.dim(); ++r) img[r] = D1.pres_map.at(r, c);
    Vec fx = f.apply(img);
    auto sol = mat_solve(solver, D2.X.reduce(fx));
    if (!sol) return false;
    for (std::size_t r = 0; r < cols; ++r) U.at(r, c) = (*sol)[r] % Ob.modulus;
  }
  Mat A1 = first_map_O(D1);
  Mat A2 = first_map_O(D2);
  Mat rhs = U.mul(A1);
  for (std::size_t c = 0; c < cols; ++c) {
    Vec col(cols);
    for (std::size_t r = 0; r < cols; ++r) col[r] = rhs.at(r, c);
    if (!mat_solve(A2, col)) return false;
  }
  return true;
}

}  // namespace

IsoResult datum_isomorphic(const PatchingDatum& D1, const PatchingDatum& D2,
                           std::uint64_t budget) {
  IsoResult res;
  if (D1.level != D2.level || !same_phi(D1, D2)) return res;
  const QuotientModule& X1 = D1.X;
  const QuotientModule& X2 = D2.X;
  if (X1.length() != X2.length()) return res;
  {
    std::vector<std::uint32_t> o1, o2;
    for (std::size_t j = 0; j < X1.dim(); ++j) o1.push_back(X1.order_exp(j));
    for (std::size_t j = 0; j < X2.dim(); ++j) o2.push_back(X2.order_exp(j));
    std::sort(o1.begin(), o1.end());
    std::sort(o2.begin(), o2.end());
    if (o1 != o2) return res;
  }
  const CoeffRing& O = X1.ring();
  std::size_t n1 = X1.dim(), n2 = X2.dim();
  std::size_t nf = n2 * n1;
  Span t2span = X2.torsion_span();
  std::size_t nt = t2span.rows().size();
  std::size_t nops = X1.num_ops();
  std::size_t nh = D1.h_slack.size();
  std::size_t hrows = D1.psi_x.rows;

  std::size_t slack_cols = nops * n1 * nt + n1 * nh;
  std::size_t ncols = nf + slack_cols;
  std::size_t nrows = nops * n1 * n2 + n1 * hrows;
  Mat sysm(O, nrows, ncols);
  Vec rhs(nrows, 0);
  std::size_t row0 = 0;
  for (std::size_t k = 0; k < nops; ++k) {
    const Mat& A1 = X1.op(k);
    const Mat& A2 = X2.op(k);
    for (std::size_t j = 0; j < n1; ++j) {
      for (std::size_t i = 0; i < n2; ++i) {
        std::size_t row = row0 + j * n2 + i;
        for (std::size_t l = 0; l < n1; ++l)
          sysm.at(row, i * n1 + l) = O.add(sysm.at(row, i * n1 + l), A1.at(l, j));
        for (std::size_t l = 0; l < n2; ++l)
          sysm.at(row, l * n1 + j) = O.sub(sysm.at(row, l * n1 + j), A2.at(i, l));
        std::size_t blk = k * n1 + j;
        for (std::size_t w = 0; w < nt; ++w)
          sysm.at(row, nf + blk * nt + w) = O.neg(t2span.rows()[w][i]);
      }
    }
    row0 += n1 * n2;
  }
  for (std::size_t j = 0; j < n1; ++j) {
    for (std::size_t i = 0; i < hrows; ++i) {
      std::size_t row = row0 + j * hrows + i;
      for (std::size_t l = 0; l < n2; ++l) sysm.at(row, l * n1 + j) = D2.psi_x.at(i, l);
      for (std::size_t w = 0; w < nh; ++w)
        sysm.at(row, nf + nops * n1 * nt + j * nh + w) = O.neg(D1.h_slack[w][i]);
      rhs[row] = D1.psi_x.at(i, j);
    }
  }
  auto part = mat_solve(sysm, rhs);
  if (!part) return res;
  auto hom = mat_kernel(sysm);
  // Deduplicate the f-parts of the homogeneous generators.
  std::vector<Vec> fdirs;
  {
    Span seen(O, nf);
    for (const auto& k : hom) {
      Vec fpart(k.begin(), k.begin() + static_cast<long>(nf));
      if (!seen.contains(fpart)) {
        seen.add(fpart);
        fdirs.push_back(std::move(fpart));
      }
    }
  }

  std::uint64_t tried = 0;
  std::size_t t = fdirs.size();
  std::vector<Elt> combo(t, 0);
  bool exhausted_fully = true;
  std::function<bool(std::size_t)> rec = [&](std::size_t idx) -> bool {
    if (tried >= budget) {
      exhausted_fully = false;
      return false;
    }
    if (idx == t) {
      ++tried;
      Mat f(O, n2, n1);
      for (std::size_t i = 0; i < nf; ++i) f.a[i] = (*part)[i];
      for (std::size_t l = 0; l < t; ++l) {
        if (!combo[l]) continue;
        for (std::size_t i = 0; i < nf; ++i)
          f.a[i] = O.add(f.a[i], O.mul(combo[l], fdirs[l][i]));
      }
      Span sp = t2span;
      for (std::size_t j = 0; j < n1; ++j) {
        Vec col(n2);
        for (std::size_t i = 0; i < n2; ++i) col[i] = f.at(i, j);
        sp.add(std::move(col));
      }
      if (sp.log_size() != static_cast<std::uint64_t>(n2) * O.M) return false;
      if (!presentations_compatible(D1, D2, f)) return false;
      res.outcome = IsoOutcome::Found;
      res.witness = IsoWitness{f};
      return true;
    }
    for (Elt c = 0; c < O.modulus; ++c) {
      combo[idx] = c;
      if (rec(idx + 1)) return true;
      if (tried >= budget) return false;
    }
    combo[idx] = 0;
    return false;
  };
  if (rec(0)) return res;
  res.outcome = exhausted_fully ? IsoOutcome::None : IsoOutcome::BudgetExhausted;
  return res;
}

Chain find_compatible_chain(const TWSystem& sys, std::uint32_t depth, std::uint64_t budget) {
  Chain chain;
  if (depth == 0) return chain;
  depth = std::min(depth, sys.max_level);

  std::function<bool(std::uint32_t, std::uint32_t)> extend = [&](std::uint32_t i,
                                                                 std::uint32_t minM) -> bool {
    if (i > depth) return true;
    std::uint32_t N = i;
    for (std::uint32_t M = std::max(N, minM); M <= sys.max_level; ++M) {
      PatchingDatum D = datum_from_system(sys, M, N);
      std::optional<IsoWitness> wit;
      if (!chain.links.empty()) {
        PatchingDatum red = datum_reduce(sys, D, chain.links.back().N);
        auto iso = datum_isomorphic(chain.links.back().datum, red, budget);
        if (iso.outcome == IsoOutcome::BudgetExhausted) chain.budget_exhausted = true;
        if (iso.outcome != IsoOutcome::Found) continue;
        wit = iso.witness;
      }
      chain.links.push_back(ChainLink{M, N, D, wit});
      if (extend(i + 1, M)) return true;
      chain.links.pop_back();
    }
    return false;
  };
  extend(1, 1);
  return chain;
}

PatchedModule patched_module(const TWSystem& sys, const Chain& chain) {
  if (chain.links.empty()) throw std::invalid_argument("patched_module: empty chain");
  PatchedModule pm{chain.links.back().datum, false, ""};
  const PatchingDatum& D = pm.deepest;
  const GroupRing& Sb = D.Sb;
  std::size_t Bb = Sb.order();
  std::size_t d = D.d;
  Mat A = first_map_O(D);
  auto ker = mat_kernel(A);
  std::uint32_t N1 = chain.links.front().N;
  std::uint32_t N1b = std::min<std::uint32_t>(N1, sys.O.M);
  CoeffRing O1 = CoeffRing::truncated(sys.O.p, N1b);
  GroupRing S1(O1, N1, sys.q);
  bool all_die = true;
  for (const auto& kv : ker) {
    for (std::size_t i = 0; i < d; ++i) {
      Vec folded(S1.order(), 0);
      for (std::size_t g = 0; g < Bb; ++g) {
        Elt c = kv[i * Bb + g];
        if (!c) continue;
        std::size_t rem = g, tgt = 0, mult = 1;
        for (std::uint32_t ti = 0; ti < sys.q; ++ti) {
          std::size_t e = rem % Sb.pn();
          rem /= Sb.pn();
          tgt += (e % S1.pn()) * mult;
          mult *= S1.pn();
        }
        folded[tgt] = O1.add(folded[tgt], c % O1.modulus);
      }
      if (!Span::is_zero_vec(folded)) all_die = false;
    }
  }
  pm.first_map_injective_shadow = all_die;
  if (d <= 3) {
    std::function<Vec(std::vector<std::vector<Vec>>, std::size_t)> det_s =
        [&](std::vector<std::vector<Vec>> m, std::size_t n) -> Vec {
      if (n == 0) return Sb.one();
      if (n == 1) return m[0][0];
      Vec acc = Sb.zero();
      for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::vector<Vec>> minor;
        for (std::size_t r = 1; r < n; ++r) {
          std::vector<Vec> row;
          for (std::size_t c = 0; c < n; ++c)
            if (c != j) row.push_back(m[r][c]);
          minor.push_back(std::move(row));
        }
        Vec term = Sb.mul(m[0][j], det_s(minor, n - 1));
        if (j % 2)
          for (auto& x : term) x = Sb.O.neg(x);
        acc = Sb.add(acc, term);
      }
      return acc;
    };
    std::vector<std::vector<Vec>> mat(d, std::vector<Vec>(d));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) mat[i][j] = D.P_first[j][i];
    Vec det = det_s(mat, d);
    bool zero = Span::is_zero_vec(det);
    bool zero_divisor = false;
    if (!zero) zero_divisor = !mat_kernel(Sb.mult_matrix(det)).empty();
    pm.det_note = zero ? "determinant is zero at this truncation"
                       : (zero_divisor ? "determinant is a zero divisor at this truncation"
                                       : "determinant is a non-zero-divisor");
  }
  return pm;
}

FreenessResult verify_freeness(const TWSystem& sys) {
  FreenessResult res;
  RContext rc(sys);
  res.h_length = h_length(sys);
  res.r_length = rc.R.length();
  res.rank = h_gens_over_R(sys);
  res.free = res.h_length == res.rank * res.r_length;
  return res;
}

PatchingReport run_patching(const TWSystem& sys, std::uint32_t depth, std::uint64_t budget) {
  PatchingReport rep;
  rep.depth = depth;
  rep.hypotheses = check_hypotheses(sys);
  if (!rep.hypotheses.pass()) {
    rep.aborted = true;
    rep.abort_stage = "hypotheses: " + rep.hypotheses.first_failure();
    return rep;
  }
  rep.chain = find_compatible_chain(sys, depth, budget);
  if (rep.chain.links.size() < std::min(depth, sys.max_level)) {
    rep.aborted = true;
    rep.abort_stage = "chain search stalled at length " +
                      std::to_string(rep.chain.links.size());
    return rep;
  }
  rep.patched = patched_module(sys, rep.chain);
  if (!rep.patched->first_map_injective_shadow) {
    rep.aborted = true;
    rep.abort_stage = "patched module: kernel of the first map survives reduction";
    return rep;
  }

  {
    const PatchingDatum& D = rep.patched->deepest;
    const QuotientModule& X = D.X;
    const CoeffRing& O = sys.O;
    Span co = X.torsion_span();
    std::size_t t = X.dim();
    for (std::size_t j = 0; j < t; ++j) {
      Vec e = unit_vec(t, j);
      for (std::uint32_t ti = 0; ti < sys.q; ++ti) {
        Vec img = X.op(ti).apply(e);
        for (std::size_t i = 0; i < t; ++i) img[i] = O.sub(img[i], e[i]);
        co.add(X.reduce(std::move(img)));
      }
    }
    std::uint64_t len_xa = static_cast<std::uint64_t>(t) * O.M - co.log_size();
    Span whp = wh_span(sys);
    Elt pn = 1;
    for (std::uint32_t i = 0; i < D.level && i < O.M; ++i) pn = pn * O.p % O.modulus;
    for (std::size_t c = 0; c < sys.h_dim; ++c) {
      Vec v(sys.h_dim, 0);
      v[c] = pn % O.modulus;
      whp.add(std::move(v));
    }
    rep.psi_infty_ok = len_xa == whp.quotient_log_size();
    if (!rep.psi_infty_ok) {
      rep.aborted = true;
      rep.abort_stage = "patched coinvariants do not match H at this depth";
      return rep;
    }
  }

  rep.freeness = verify_freeness(sys);
  return rep;
}

// ---- canned systems ------------------------------------------------------

namespace {

LocalAlgebraPresentation scalar_R(Elt p, std::uint32_t M0) {
  LocalAlgebraPresentation pres;
  pres.ring = M0 == 1 ? CoeffRing::residue_field(p) : CoeffRing::truncated(p, M0);
  pres.bound = 1;
  return pres;
}

}  // namespace

TWSystem trivial_system(Elt p, std::uint32_t M0, std::uint32_t levels) {
  TWSystem sys;
  sys.name = "trivial";
  sys.O = CoeffRing::truncated(p, M0);
  sys.q = 1;
  sys.R_pres = scalar_R(p, M0);
  sys.h_dim = 1;
  sys.max_level = levels;
  for (std::uint32_t N = 1; N <= levels; ++N) {
    GroupRing S(sys.O, N, 1);
    GroupRingModule m;
    m.S = S;
    m.gens = 1;
    m.relations.push_back({S.gen_minus_one(0)});
    sys.H_N.push_back(std::move(m));
    sys.HN_xaction.push_back({});
    sys.phi.push_back({});
    Mat psi(sys.O, 1, 1);
    psi.at(0, 0) = 1;
    sys.psi.push_back(psi);
  }
  return sys;
}

TWSystem engineered_rank1_system(Elt p, std::uint32_t levels) {
  TWSystem sys = trivial_system(p, 2, levels);
  sys.name = "engineered-rank1";
  for (std::uint32_t N = 1; N <= levels; ++N) {
    GroupRing S(sys.O, N, 1);
    GroupRingModule m;
    m.S = S;
    m.gens = 2;
    Vec mt = S.gen(0);
    Vec minus_one = S.zero();
    minus_one[0] = S.O.neg(1);
    m.relations.push_back({mt, minus_one});
    m.relations.push_back({S.gen_minus_one(0), S.zero()});
    sys.H_N[N - 1] = std::move(m);
    Mat psi(sys.O, 1, 2);
    psi.at(0, 0) = 1;
    psi.at(0, 1) = 1;
    sys.psi[N - 1] = psi;
  }
  return sys;
}

TWSystem unbalanced_system(Elt p, std::uint32_t levels) {
  TWSystem sys;
  sys.name = "unbalanced-q2";
  sys.O = CoeffRing::truncated(p, 1);
  sys.q = 2;
  sys.R_pres = scalar_R(p, 1);
  sys.h_dim = 1;
  sys.max_level = levels;
  for (std::uint32_t N = 1; N <= levels; ++N) {
    GroupRing S(sys.O, N, 2);
    GroupRingModule m;
    m.S = S;
    m.gens = 1;
    m.relations.push_back({S.gen_minus_one(0)});
    m.relations.push_back({S.gen_minus_one(1)});
    std::size_t amb = S.order();
    sys.H_N.push_back(std::move(m));
    sys.HN_xaction.push_back({Mat(sys.O, amb, amb)});
    sys.phi.push_back({Vec{0}});
    Mat psi(sys.O, 1, 1);
    psi.at(0, 0) = 1;
    sys.psi.push_back(psi);
  }
  return sys;
}

TWSystem alternating_system(Elt p, std::uint32_t levels) {
  TWSystem sys;
  sys.name = "alternating";
  sys.O = CoeffRing::truncated(p, 1);
  sys.q = 2;
  sys.R_pres = scalar_R(p, 1);
  sys.h_dim = 1;
  sys.max_level = levels;
  for (std::uint32_t N = 1; N <= levels; ++N) {
    GroupRing S(sys.O, N, 2);
    GroupRingModule m;
    m.S = S;
    m.gens = 1;
    // H_N = S / (t2 - t1): balanced of defect 0, coinvariants O.
    m.relations.push_back({S.sub(S.gen(1), S.gen(0))});
    Realization real = realization(m);
    Elt c = (N % 2 == 0) ? 1 : 2 % sys.O.modulus;
    Mat x = real.taction[0].sub(Mat::identity(sys.O, real.ambient())).scaled(c);
    sys.H_N.push_back(std::move(m));
    sys.HN_xaction.push_back({x});
    sys.phi.push_back({Vec{0}});
    Mat psi(sys.O, 1, 1);
    psi.at(0, 0) = 1;
    sys.psi.push_back(psi);
  }
  return sys;
}

std::string TWSystem::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["p"] = O.p;
  j["M"] = O.M;
  j["q"] = q;
  j["R"] = R_pres.to_text();
  j["h_dim"] = h_dim;
  j["W_H"] = W_H_gens;
  nlohmann::json actions = nlohmann::json::array();
  for (const auto& m : H_action) actions.push_back(m.a);
  j["H_action"] = actions;
  j["max_level"] = max_level;
  nlohmann::json lv = nlohmann::json::array();
  for (std::uint32_t N = 1; N <= max_level; ++N) {
    nlohmann::json l;
    l["H_N"] = nlohmann::json::parse(H_N[N - 1].to_json());
    nlohmann::json xs = nlohmann::json::array();
    for (const auto& m : HN_xaction[N - 1]) xs.push_back(m.a);
    l["x_action"] = xs;
    l["phi"] = phi[N - 1];
    l["psi"] = psi[N - 1].a;
    l["psi_rows"] = psi[N - 1].rows;
    lv.push_back(std::move(l));
  }
  j["levels"] = lv;
  return j.dump(2);
}

TWSystem TWSystem::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  TWSystem sys;
  sys.name = j.value("name", "bundle");
  Elt p = j.at("p").get<Elt>();
  std::uint32_t M = j.at("M").get<std::uint32_t>();
  sys.O = CoeffRing::truncated(p, M);
  sys.q = j.at("q").get<std::uint32_t>();
  sys.R_pres = LocalAlgebraPresentation::parse(j.at("R").get<std::string>());
  sys.h_dim = j.at("h_dim").get<std::size_t>();
  for (const auto& v : j.at("W_H")) sys.W_H_gens.push_back(v.get<Vec>());
  for (const auto& a : j.at("H_action")) {
    Mat m(sys.O, sys.h_dim, sys.h_dim);
    m.a = a.get<Vec>();
    sys.H_action.push_back(std::move(m));
  }
  sys.max_level = j.at("max_level").get<std::uint32_t>();
  for (const auto& l : j.at("levels")) {
    sys.H_N.push_back(GroupRingModule::from_json(l.at("H_N").dump()));
    std::vector<Mat> xs;
    std::size_t amb = sys.H_N.back().gens * sys.H_N.back().S.order();
    for (const auto& a : l.at("x_action")) {
      Mat m(sys.O, amb, amb);
      m.a = a.get<Vec>();
      xs.push_back(std::move(m));
    }
    sys.HN_xaction.push_back(std::move(xs));
    std::vector<Vec> ph;
    for (const auto& v : l.at("phi")) ph.push_back(v.get<Vec>());
    sys.phi.push_back(std::move(ph));
    std::size_t rows = l.at("psi_rows").get<std::size_t>();
    Vec flat = l.at("psi").get<Vec>();
    Mat psi(sys.O, rows, rows ? flat.size() / rows : 0);
    psi.a = flat;
    sys.psi.push_back(std::move(psi));
  }
  return sys;
}

}  // namespace twpatch
