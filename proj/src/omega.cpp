#include "lodex/omega.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace lodex {

namespace {

// Per-call step accounting for the segment-type folds.
struct Stepper {
  std::int64_t left;
  void take(std::int64_t n) {
    left -= n;
    if (left < 0) throw ResourceError("segment-type step budget exhausted");
  }
};

std::size_t to_index(const Pos& x) { return x.convert_to<std::size_t>(); }

}  // namespace

bool SparseSet::member(const Pos& x) const {
  switch (kind) {
    case Kind::Factorial: {
      Pos f = 1;
      for (long long m = 1; f <= x; ++m) {
        if (f == x) return true;
        f *= m;
      }
      return false;
    }
    case Kind::Power: {
      for (Pos f = 1; f <= x; f *= base)
        if (f == x) return true;
      return false;
    }
    case Kind::Finite:
      return std::binary_search(positions.begin(), positions.end(), x);
    case Kind::Diagonal:
      return diagonal->diagonal_member(x);
  }
  throw std::logic_error("unreachable");
}

std::vector<Pos> SparseSet::members_in(const Pos& lo, const Pos& hi) const {
  std::vector<Pos> out;
  if (hi <= lo) return out;
  auto push = [&](const Pos& v) {
    if (v >= lo && v < hi && (out.empty() || out.back() != v))
      out.push_back(v);
  };
  switch (kind) {
    case Kind::Factorial: {
      Pos f = 1;
      for (long long m = 1; f < hi; ++m) {
        push(f);
        f *= m;
      }
      break;
    }
    case Kind::Power:
      for (Pos f = 1; f < hi; f *= base) push(f);
      break;
    case Kind::Finite:
      for (auto it = std::lower_bound(positions.begin(), positions.end(), lo);
           it != positions.end() && *it < hi; ++it)
        out.push_back(*it);
      break;
    case Kind::Diagonal:
      return diagonal->diagonal_in(lo, hi);
  }
  return out;
}

std::optional<Pos> SparseSet::next_geq(const Pos& x) const {
  switch (kind) {
    case Kind::Factorial: {
      Pos f = 1;
      for (long long m = 1; f < x; ++m) f *= m;
      return f;
    }
    case Kind::Power: {
      Pos f = 1;
      while (f < x) f *= base;
      return f;
    }
    case Kind::Finite: {
      auto it = std::lower_bound(positions.begin(), positions.end(), x);
      if (it == positions.end()) return std::nullopt;
      return *it;
    }
    case Kind::Diagonal:
      for (std::size_t m = 0;; ++m) {
        const Pos& h = diagonal->diagonal_element(m);
        if (h >= x) return h;
      }
  }
  throw std::logic_error("unreachable");
}

Letter OmegaPresentation::background_at(const Pos& x) const {
  if (x < Pos(bg_prefix.size())) return bg_prefix[to_index(x)];
  Pos off = (x - Pos(bg_prefix.size())) % Pos(bg_period.size());
  return bg_period[to_index(off)];
}

Letter OmegaPresentation::letter_at(const Pos& x) const {
  Letter l = background_at(x);
  for (const auto& [track, s] : sparse)
    if (s.member(x)) l |= (1u << track);
  return l;
}

OmegaPresentation OmegaPresentation::plain() { return {}; }

OmegaPresentation OmegaPresentation::lasso(int tracks, std::vector<Letter> u,
                                           std::vector<Letter> v) {
  if (v.empty()) throw std::invalid_argument("lasso period must be nonempty");
  OmegaPresentation p;
  p.tracks = tracks;
  p.bg_prefix = std::move(u);
  p.bg_period = std::move(v);
  return p;
}

OmegaPresentation OmegaPresentation::with_sparse(SparseSet s) {
  OmegaPresentation p;
  p.tracks = 1;
  p.sparse.emplace_back(0, std::move(s));
  return p;
}

TypeId segment_type(const OmegaPresentation& p, const Pos& a, const Pos& b,
                    int k, TypeTable& tt, const SearchBudget& budget) {
  int ctx = tt.context_id(TypeContext{p.tracks, {}});
  TypeId empty = tt.empty_type(k, ctx);
  if (b <= a) return empty;
  Stepper st{budget.step_cap};

  auto fold = [&](TypeId acc, Letter l) {
    st.take(1);
    return tt.compose_sum(acc, tt.letter_type(l, k, p.tracks));
  };

  // k-type of a background-only block [from, to).
  TypeId period_block = -1;
  const Pos prefix_len(p.bg_prefix.size());
  const std::size_t L = p.bg_period.size();
  auto block = [&](Pos from, const Pos& to) {
    TypeId t = empty;
    while (from < prefix_len && from < to) {
      t = fold(t, p.bg_prefix[to_index(from)]);
      ++from;
    }
    if (from >= to) return t;
    std::size_t off = to_index((from - prefix_len) % L);
    while (off != 0 && from < to) {
      t = fold(t, p.bg_period[off]);
      ++from;
      if (++off == L) off = 0;
    }
    Pos full = (to - from) / static_cast<long>(L);
    if (full > 0) {
      if (period_block < 0) {
        period_block = empty;
        for (Letter l : p.bg_period) period_block = fold(period_block, l);
      }
      st.take(static_cast<std::int64_t>(L));
      t = tt.compose_sum(t, tt.pow_type(period_block, full));
      from += full * static_cast<long>(L);
    }
    while (from < to) {
      t = fold(t, p.bg_period[to_index((from - prefix_len) % L)]);
      ++from;
    }
    return t;
  };

  std::map<Pos, Letter> events;
  for (const auto& [track, s] : p.sparse)
    for (const Pos& pos : s.members_in(a, b)) events[pos] |= (1u << track);

  TypeId acc = empty;
  Pos cur = a;
  for (const auto& [pos, bits] : events) {
    acc = tt.compose_sum(acc, block(cur, pos));
    acc = fold(acc, p.background_at(pos) | bits);
    cur = pos + 1;
  }
  return tt.compose_sum(acc, block(cur, b));
}

HomogBuilder::HomogBuilder(OmegaPresentation base, int levels,
                           SearchBudget budget, TypeTable& tt)
    : base_(std::move(base)), K_(levels), budget_(budget), tt_(&tt),
      levels_(static_cast<std::size_t>(levels) + 1) {
  if (levels < 0) throw std::invalid_argument("negative level count");
}

TypeId HomogBuilder::seg(const Pos& a, const Pos& b, int k) {
  auto key = std::make_tuple(a, b, k);
  auto it = seg_memo_.find(key);
  if (it != seg_memo_.end()) return it->second;
  TypeId t = segment_type(base_, a, b, k, *tt_, budget_);
  seg_memo_.emplace(std::move(key), t);
  return t;
}

Pos HomogBuilder::parent_at(int k, std::size_t idx) {
  // Levels 0 and 1 pick positions straight from the line itself.
  if (k <= 1) return Pos(idx);
  return level_element(k - 1, idx);
}

std::optional<Pos> HomogBuilder::next_match(const Pos& from, TypeId e, int k,
                                            std::int64_t max_scans) {
  TypeTable& tt = *tt_;
  int ctx = tt.context_id(TypeContext{base_.tracks, {}});
  TypeId t = tt.empty_type(k, ctx);
  Pos m = from;
  std::int64_t scans = 0;
  const Pos prefix_len(base_.bg_prefix.size());
  const std::size_t L = base_.bg_period.size();
  auto fold = [&](Letter l) {
    t = tt.compose_sum(t, tt.letter_type(l, k, base_.tracks));
  };
  while (true) {
    std::optional<Pos> ev;
    for (const auto& [track, s] : base_.sparse) {
      auto n = s.next_geq(m);
      if (n && (!ev || *n < *ev)) ev = n;
    }
    // Background stretch [m, ev). Once the walk enters the periodic
    // region, a repeated (type, phase) state means the rest of the
    // stretch is a repetition that was already checked, so skip it.
    std::map<std::pair<TypeId, std::size_t>, Pos> seen;
    bool detect = true;
    while (!ev || m < *ev) {
      if (m > from && t == e) return m;
      if (++scans > max_scans) return std::nullopt;
      if (m >= prefix_len) {
        std::size_t phase = to_index((m - prefix_len) % L);
        if (detect) {
          auto [it, fresh] = seen.try_emplace({t, phase}, m);
          if (!fresh) {
            if (!ev) return std::nullopt;  // periodic tail, never matches
            Pos cycle = m - it->second;
            Pos jump = ((*ev - m) / cycle) * cycle;
            m += jump;
            detect = false;  // at most one cycle of plain steps remains
            continue;
          }
        }
      }
      fold(base_.background_at(m));
      ++m;
    }
    if (t == e && m > from) return m;
    if (++scans > max_scans) return std::nullopt;
    Letter bits = 0;
    for (const auto& [track, s] : base_.sparse)
      if (s.member(m)) bits |= (1u << track);
    fold(base_.background_at(m) | bits);
    ++m;
  }
}

void HomogBuilder::init_level(int k) {
  Level& lv = levels_[k];
  if (lv.ready) return;
  lv.preserved = k == 0 ? 0 : static_cast<std::size_t>(k - 1);
  for (std::size_t i = 0; i < lv.preserved; ++i)
    lv.elems.push_back(parent_at(k, i));
  std::int64_t scans = 0;
  const std::int64_t trial_cap = std::min<std::int64_t>(budget_.horizon, 4096);
  auto exhausted = [&] {
    return ResourceError("homogeneous-set search exhausted at level " +
                         std::to_string(k));
  };
  const std::size_t base = lv.preserved;
  for (std::size_t b_idx = base + 1;; ++b_idx) {
    for (std::size_t a_idx = base; a_idx < b_idx; ++a_idx) {
      if (++scans > budget_.horizon) throw exhausted();
      Pos a = parent_at(k, a_idx), b = parent_at(k, b_idx);
      TypeId e = seg(a, b, k);
      if (!tt_->idempotent(e)) continue;
      // Trial chain: the candidate must extend a few times greedily.
      std::vector<Pos> chain{a, b};
      std::size_t cursor = b_idx;
      bool ok = true;
      while (chain.size() < 4) {
        if (k <= 1) {
          auto n = next_match(chain.back(), e, k, trial_cap);
          if (!n) { ok = false; break; }
          chain.push_back(*n);
        } else {
          bool found = false;
          for (std::size_t m = cursor + 1; m <= cursor + 64; ++m) {
            if (++scans > budget_.horizon) throw exhausted();
            if (seg(chain.back(), parent_at(k, m), k) == e) {
              chain.push_back(parent_at(k, m));
              cursor = m;
              found = true;
              break;
            }
          }
          if (!found) { ok = false; break; }
        }
      }
      if (!ok) continue;
      for (const Pos& p : chain) lv.elems.push_back(p);
      lv.e = e;
      lv.parent_cursor = cursor;
      lv.ready = true;
      return;
    }
  }
}

void HomogBuilder::extend_level(int k) {
  Level& lv = levels_[k];
  if (k <= 1) {
    auto n = next_match(lv.elems.back(), lv.e, k, budget_.horizon);
    if (!n)
      throw ResourceError("homogeneous-set extension exhausted at level " +
                          std::to_string(k));
    lv.elems.push_back(*n);
    return;
  }
  std::int64_t scans = 0;
  for (std::size_t m = lv.parent_cursor + 1;; ++m) {
    if (++scans > budget_.horizon)
      throw ResourceError("homogeneous-set extension exhausted at level " +
                          std::to_string(k));
    if (seg(lv.elems.back(), parent_at(k, m), k) == lv.e) {
      lv.elems.push_back(parent_at(k, m));
      lv.parent_cursor = m;
      return;
    }
  }
}

TypeId HomogBuilder::level_idempotent(int k) {
  if (k < 0 || k > K_) throw std::invalid_argument("level out of range");
  init_level(k);
  return levels_[k].e;
}

const Pos& HomogBuilder::level_element(int k, std::size_t idx) {
  if (k < 0 || k > K_) throw std::invalid_argument("level out of range");
  init_level(k);
  while (levels_[k].elems.size() <= idx) extend_level(k);
  return levels_[k].elems[idx];
}

const Pos& HomogBuilder::diagonal_element(std::size_t m) {
  int k = static_cast<int>(std::min<std::size_t>(m, K_));
  return level_element(k, m);
}

bool HomogBuilder::diagonal_member(const Pos& x) {
  for (std::size_t m = 0;; ++m) {
    const Pos& h = diagonal_element(m);
    if (h == x) return true;
    if (h > x) return false;
  }
}

std::vector<Pos> HomogBuilder::diagonal_in(const Pos& lo, const Pos& hi) {
  std::vector<Pos> out;
  for (std::size_t m = 0;; ++m) {
    const Pos& h = diagonal_element(m);
    if (h >= hi) break;
    if (h >= lo) out.push_back(h);
  }
  return out;
}

TypeId HomogBuilder::tail_type(const Pos& a, int k) {
  if (k < 0 || k > K_) throw std::invalid_argument("level out of range");
  std::size_t m = static_cast<std::size_t>(k);
  while (diagonal_element(m) < a) ++m;
  TypeId head = seg(a, diagonal_element(m), k);
  return tt_->compose_sum(head, tt_->omega_power(level_idempotent(k)));
}

HomogSet build_uniform_homog(const OmegaPresentation& p, int K,
                             const SearchBudget& budget, TypeTable& tt,
                             std::size_t want) {
  HomogBuilder hb(p, K, budget, tt);
  HomogSet out;
  for (std::size_t m = 0; m < want; ++m)
    out.diagonal.push_back(hb.diagonal_element(m));
  for (int k = 0; k <= K; ++k) {
    out.idempotents.push_back(hb.level_idempotent(k));
    std::vector<Pos> prefix;
    for (std::size_t i = 0; i < want; ++i)
      prefix.push_back(hb.level_element(k, i));
    out.level_prefixes.push_back(std::move(prefix));
  }
  return out;
}

TypeId structure_type(const OmegaPresentation& p, int k,
                      const SearchBudget& budget, TypeTable& tt) {
  if (p.lasso_form()) {
    TypeId u = tt.word_type(p.bg_prefix, k, p.tracks);
    TypeId v = tt.word_type(p.bg_period, k, p.tracks);
    return tt.compose_sum(u, tt.omega_power(v));
  }
  HomogBuilder hb(p, k, budget, tt);
  return hb.tail_type(Pos(0), k);
}

bool decide(const OmegaPresentation& p, const Formula& f,
            const Signature& sig, const SearchBudget& budget, TypeTable& tt) {
  if (!f.is_sentence()) throw std::invalid_argument("decide: open formula");
  if (sig.tracks() != p.tracks)
    throw std::invalid_argument("decide: signature/presentation mismatch");
  return implies_sentence(tt, structure_type(p, quantifier_depth(f), budget, tt),
                          f, sig);
}

OmegaPresentation expand(const OmegaPresentation& p,
                         const SearchBudget& budget, TypeTable& tt) {
  SparseSet h;
  h.kind = SparseSet::Kind::Diagonal;
  h.diagonal = std::make_shared<HomogBuilder>(p, kExpansionLevels, budget, tt);
  OmegaPresentation q = p;
  q.sparse.emplace_back(p.tracks, std::move(h));
  q.tracks = p.tracks + 1;
  return q;
}

TypeId expanded_type(const OmegaPresentation& expanded, int k, TypeTable& tt) {
  const SparseSet* diag = nullptr;
  for (const auto& [track, s] : expanded.sparse)
    if (s.kind == SparseSet::Kind::Diagonal) {
      if (diag) throw std::invalid_argument("multiple expansion tracks");
      diag = &s;
    }
  if (!diag)
    throw std::invalid_argument("presentation carries no expansion track");
  HomogBuilder& hb = *diag->diagonal;
  if (&hb.table() != &tt)
    throw std::invalid_argument("expansion is bound to another type table");
  if (k + 2 > hb.levels())
    throw ResourceError("insufficient homogeneity levels for this depth");

  const SearchBudget& budget = hb.budget();
  // The marked word splits at h_{k+2}; beyond it the segments between
  // consecutive marks all share one k-type. Verify constancy on a few
  // witnesses rather than trusting it.
  std::size_t start = static_cast<std::size_t>(k) + 2;
  TypeId tau = -1;
  for (std::size_t i = start; i < start + 3; ++i) {
    TypeId t = segment_type(expanded, hb.diagonal_element(i),
                            hb.diagonal_element(i + 1), k, tt, budget);
    if (tau < 0) tau = t;
    else if (tau != t)
      throw ResourceError("expansion segment types fail to stabilise");
  }
  TypeId head =
      segment_type(expanded, Pos(0), hb.diagonal_element(start), k, tt, budget);
  return tt.compose_sum(head, tt.omega_power(tau));
}

bool indistinguishability_check(const OmegaPresentation& p, const Pos& a,
                                const Pos& b, int k,
                                const SearchBudget& budget, TypeTable& tt) {
  if (a == b) return true;
  if (segment_type(p, Pos(0), a, k, tt, budget) !=
      segment_type(p, Pos(0), b, k, tt, budget))
    return false;
  HomogBuilder hb(p, k, budget, tt);
  return hb.tail_type(a, k) == hb.tail_type(b, k);
}

}  // namespace lodex
