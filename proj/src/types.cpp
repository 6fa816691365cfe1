#include "lodex/types.hpp"

#include <algorithm>
#include <cassert>
#include <set>

namespace lodex {

int TypeContext::point_count() const {
  int n = 0;
  for (auto k : params) n += (k == ParamKind::Point);
  return n;
}
int TypeContext::set_count() const {
  return static_cast<int>(params.size()) - point_count();
}

AtomicFacts::AtomicFacts(const TypeContext& ctx)
    : points_(ctx.point_count()),
      columns_(ctx.tracks + ctx.set_count()),
      data_(points_ + points_ * (points_ - 1) / 2 + points_ * columns_, 0) {}

std::uint8_t AtomicFacts::order(int i, int j) const {
  assert(i < j);
  int idx = points_ + (i * (2 * points_ - i - 1)) / 2 + (j - i - 1);
  return data_[idx];
}
void AtomicFacts::set_order(int i, int j, std::uint8_t rel) {
  assert(i < j);
  int idx = points_ + (i * (2 * points_ - i - 1)) / 2 + (j - i - 1);
  data_[idx] = rel;
}
bool AtomicFacts::member(int i, int c) const {
  return data_[points_ + points_ * (points_ - 1) / 2 + i * columns_ + c] != 0;
}
void AtomicFacts::set_member(int i, int c, bool v) {
  data_[points_ + points_ * (points_ - 1) / 2 + i * columns_ + c] = v ? 1 : 0;
}

namespace {

constexpr std::uint8_t kLess = 1, kEqual = 2, kGreater = 3;

void append_int(std::string& s, std::int64_t v) {
  for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

// Relation of the i-th point's element versus the j-th point's, for
// arbitrary distinct indices.
std::uint8_t rel_of(const AtomicFacts& f, int i, int j) {
  if (i < j) return f.order(i, j);
  std::uint8_t r = f.order(j, i);
  return r == kLess ? kGreater : r == kGreater ? kLess : r;
}

}  // namespace

int TypeTable::context_id(const TypeContext& ctx) {
  auto it = context_ids_.find(ctx);
  if (it != context_ids_.end()) return it->second;
  int id = static_cast<int>(contexts_.size());
  contexts_.push_back(ctx);
  context_ids_.emplace(ctx, id);
  return id;
}

TypeId TypeTable::intern(int level, int ctx, const AtomicFacts& facts,
                         std::vector<TypeId> point_children,
                         std::vector<TypeId> set_children) {
  auto canon = [](std::vector<TypeId>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  canon(point_children);
  canon(set_children);
  std::string key;
  append_int(key, level);
  append_int(key, ctx);
  key.append(facts.bytes().begin(), facts.bytes().end());
  append_int(key, static_cast<std::int64_t>(point_children.size()));
  for (TypeId c : point_children) append_int(key, c);
  for (TypeId c : set_children) append_int(key, c);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  if (records_.size() >= cfg_.registry_cap)
    throw ResourceError("type registry cap exceeded");
  TypeId id = static_cast<TypeId>(records_.size());
  records_.push_back(
      {level, ctx, facts, std::move(point_children), std::move(set_children)});
  index_.emplace(std::move(key), id);
  return id;
}

TypeId TypeTable::empty_type(int level, int ctx) {
  auto it = empty_memo_.find({level, ctx});
  if (it != empty_memo_.end()) return it->second;
  AtomicFacts facts(contexts_[ctx]);  // all points absent
  std::vector<TypeId> sch;
  if (level > 0) {
    TypeContext sub = contexts_[ctx];
    sub.params.push_back(ParamKind::Set);
    sch.push_back(empty_type(level - 1, context_id(sub)));
  }
  TypeId id = intern(level, ctx, facts, {}, std::move(sch));
  empty_memo_[{level, ctx}] = id;
  return id;
}

// ---------------------------------------------------------------------------
// EF recursion on finite words

AtomicFacts TypeTable::concrete_facts(std::span<const Letter> word, int tracks,
                                      const std::vector<ConcreteParam>& params,
                                      int ctx) {
  const TypeContext& c = contexts_[ctx];
  AtomicFacts f(c);
  std::vector<int> point_pos;  // position per point index
  std::vector<int> set_cols;   // absolute param index per set column
  for (size_t i = 0; i < params.size(); ++i) {
    if (params[i].kind == ParamKind::Point)
      point_pos.push_back(params[i].pos);
    else
      set_cols.push_back(static_cast<int>(i));
  }
  int p = static_cast<int>(point_pos.size());
  for (int i = 0; i < p; ++i) f.set_present(i, true);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      f.set_order(i, j, point_pos[i] < point_pos[j]   ? kLess
                        : point_pos[i] == point_pos[j] ? kEqual
                                                       : kGreater);
  for (int i = 0; i < p; ++i) {
    Letter a = word[point_pos[i]];
    for (int t = 0; t < tracks; ++t) f.set_member(i, t, (a >> t) & 1u);
    for (size_t s = 0; s < set_cols.size(); ++s) {
      std::uint64_t mask = params[set_cols[s]].mask;
      f.set_member(i, tracks + static_cast<int>(s),
                   (mask >> point_pos[i]) & 1ull);
    }
  }
  return f;
}

TypeId TypeTable::ef_type(std::span<const Letter> word, int k, int tracks,
                          std::vector<ConcreteParam>& params) {
  TypeContext ctx{tracks, {}};
  for (const auto& p : params) ctx.params.push_back(p.kind);
  int ctx_id = context_id(ctx);
  AtomicFacts facts = concrete_facts(word, tracks, params, ctx_id);
  if (k == 0) return intern(0, ctx_id, facts, {}, {});
  std::vector<TypeId> pch, sch;
  int len = static_cast<int>(word.size());
  for (int p = 0; p < len; ++p) {
    params.push_back({ParamKind::Point, p, 0});
    pch.push_back(ef_type(word, k - 1, tracks, params));
    params.pop_back();
  }
  for (std::uint64_t mask = 0; mask < (1ull << len); ++mask) {
    params.push_back({ParamKind::Set, 0, mask});
    sch.push_back(ef_type(word, k - 1, tracks, params));
    params.pop_back();
  }
  return intern(k, ctx_id, facts, std::move(pch), std::move(sch));
}

TypeId TypeTable::type_of_finite(std::span<const Letter> word, int k,
                                 int tracks,
                                 const std::vector<ConcreteParam>& params) {
  if (k > cfg_.level_cap)
    throw ResourceError("type_of_finite: level above the configured cap");
  if (static_cast<int>(word.size()) > cfg_.ef_length_cap)
    throw ResourceError("type_of_finite: word longer than the configured cap");
  double ext = static_cast<double>(word.size()) +
               static_cast<double>(1ull << word.size());
  double total = 1;
  for (int i = 0; i < k; ++i) {
    total *= ext;
    if (total > static_cast<double>(cfg_.ef_step_cap))
      throw ResourceError("type_of_finite: extension enumeration exceeds the step cap");
  }
  std::vector<ConcreteParam> ps = params;
  return ef_type(word, k, tracks, ps);
}

TypeId TypeTable::letter_type(Letter a, int k, int tracks) {
  auto key = std::make_tuple(a, k, tracks);
  auto it = letter_memo_.find(key);
  if (it != letter_memo_.end()) return it->second;
  std::vector<Letter> w{a};
  std::vector<ConcreteParam> ps;
  TypeId id = ef_type(w, k, tracks, ps);
  letter_memo_[key] = id;
  return id;
}

TypeId TypeTable::word_type(std::span<const Letter> word, int k, int tracks) {
  TypeId acc = empty_type(k, context_id({tracks, {}}));
  for (Letter a : word) acc = compose_sum(acc, letter_type(a, k, tracks));
  return acc;
}
TypeId TypeTable::word_type(const std::vector<Letter>& word, int k, int tracks) {
  return word_type(std::span<const Letter>(word), k, tracks);
}

// ---------------------------------------------------------------------------
// Algebraic operations

TypeId TypeTable::insert_absent_point(TypeId t, int at) {
  auto key = std::make_pair(t, at);
  auto it = lift_memo_.find(key);
  if (it != lift_memo_.end()) return it->second;
  const TypeRecord rec = records_[t];
  TypeContext ctx = contexts_[rec.ctx];
  TypeContext nctx = ctx;
  nctx.params.insert(nctx.params.begin() + at, ParamKind::Point);
  int nctx_id = context_id(nctx);

  // Point index of the inserted parameter.
  int pi = 0;
  for (int i = 0; i < at; ++i) pi += (ctx.params[i] == ParamKind::Point);
  int old_points = ctx.point_count();
  auto remap = [&](int i) { return i < pi ? i : i + 1; };

  AtomicFacts f(nctx);
  const AtomicFacts& of = rec.facts;
  int cols = ctx.tracks + ctx.set_count();
  for (int i = 0; i < old_points; ++i) {
    f.set_present(remap(i), of.present(i));
    for (int c = 0; c < cols; ++c) f.set_member(remap(i), c, of.member(i, c));
  }
  for (int i = 0; i < old_points; ++i)
    for (int j = i + 1; j < old_points; ++j) {
      int a = remap(i), b = remap(j);
      f.set_order(std::min(a, b), std::max(a, b),
                  a < b ? of.order(i, j) : rel_of(of, j, i));
    }

  std::vector<TypeId> pch, sch;
  for (TypeId c : rec.point_children) pch.push_back(insert_absent_point(c, at));
  for (TypeId c : rec.set_children) sch.push_back(insert_absent_point(c, at));
  TypeId id = intern(rec.level, nctx_id, f, std::move(pch), std::move(sch));
  lift_memo_[key] = id;
  return id;
}

TypeId TypeTable::downgrade(TypeId t) {
  auto it = downgrade_memo_.find(t);
  if (it != downgrade_memo_.end()) return it->second;
  const TypeRecord rec = records_[t];
  if (rec.level == 0)
    throw std::invalid_argument("downgrade of a level-0 type");
  std::vector<TypeId> pch, sch;
  if (rec.level > 1) {
    for (TypeId c : rec.point_children) pch.push_back(downgrade(c));
    for (TypeId c : rec.set_children) sch.push_back(downgrade(c));
  }
  TypeId id = intern(rec.level - 1, rec.ctx, rec.facts, std::move(pch),
                     std::move(sch));
  downgrade_memo_[t] = id;
  return id;
}

TypeId TypeTable::reverse_type(TypeId t) {
  auto it = reverse_memo_.find(t);
  if (it != reverse_memo_.end()) return it->second;
  const TypeRecord rec = records_[t];
  const TypeContext& ctx = contexts_[rec.ctx];
  AtomicFacts f = rec.facts;
  int points = ctx.point_count();
  for (int i = 0; i < points; ++i)
    for (int j = i + 1; j < points; ++j) {
      std::uint8_t r = f.order(i, j);
      f.set_order(i, j, r == kLess ? kGreater : r == kGreater ? kLess : r);
    }
  std::vector<TypeId> pch, sch;
  for (TypeId c : rec.point_children) pch.push_back(reverse_type(c));
  for (TypeId c : rec.set_children) sch.push_back(reverse_type(c));
  TypeId id = intern(rec.level, rec.ctx, f, std::move(pch), std::move(sch));
  reverse_memo_[t] = id;
  return id;
}

TypeId TypeTable::compose_sum(TypeId a, TypeId b) {
  auto key = std::make_pair(a, b);
  auto it = compose_memo_.find(key);
  if (it != compose_memo_.end()) return it->second;
  const TypeRecord ra = records_[a], rb = records_[b];
  if (ra.level != rb.level || ra.ctx != rb.ctx)
    throw std::invalid_argument("compose_sum: level or context mismatch");
  const TypeContext& ctx = contexts_[ra.ctx];

  AtomicFacts f(ctx);
  int points = ctx.point_count();
  int cols = ctx.tracks + ctx.set_count();
  std::vector<bool> in_a(points), in_b(points);
  for (int i = 0; i < points; ++i) {
    in_a[i] = ra.facts.present(i);
    in_b[i] = rb.facts.present(i);
    if (in_a[i] && in_b[i])
      throw std::invalid_argument(
          "compose_sum: point parameter present on both sides");
    f.set_present(i, in_a[i] || in_b[i]);
    const AtomicFacts& side = in_a[i] ? ra.facts : rb.facts;
    if (in_a[i] || in_b[i])
      for (int c = 0; c < cols; ++c) f.set_member(i, c, side.member(i, c));
  }
  for (int i = 0; i < points; ++i)
    for (int j = i + 1; j < points; ++j) {
      std::uint8_t r = 0;
      if (in_a[i] && in_a[j])
        r = ra.facts.order(i, j);
      else if (in_b[i] && in_b[j])
        r = rb.facts.order(i, j);
      else if (in_a[i] && in_b[j])
        r = kLess;
      else if (in_b[i] && in_a[j])
        r = kGreater;
      f.set_order(i, j, r);
    }

  std::vector<TypeId> pch, sch;
  if (ra.level > 0) {
    int at = static_cast<int>(ctx.params.size());
    TypeId da = insert_absent_point(downgrade(a), at);
    TypeId db = insert_absent_point(downgrade(b), at);
    for (TypeId c : ra.point_children) pch.push_back(compose_sum(c, db));
    for (TypeId c : rb.point_children) pch.push_back(compose_sum(da, c));
    for (TypeId ca : ra.set_children)
      for (TypeId cb : rb.set_children) sch.push_back(compose_sum(ca, cb));
  }
  TypeId id = intern(ra.level, ra.ctx, f, std::move(pch), std::move(sch));
  compose_memo_[key] = id;
  return id;
}

TypeId TypeTable::omega_power(TypeId t) {
  auto it = omega_memo_.find(t);
  if (it != omega_memo_.end()) return it->second;
  const TypeRecord rec = records_[t];
  const TypeContext& ctx = contexts_[rec.ctx];
  int points = ctx.point_count();
  for (int i = 0; i < points; ++i)
    if (rec.facts.present(i))
      throw std::invalid_argument(
          "omega_power of a type with a marked point present");
  if (rec.level == 0) {
    omega_memo_[t] = t;
    return t;
  }

  std::vector<TypeId> pch, sch;
  int at = static_cast<int>(ctx.params.size());
  TypeId summand = insert_absent_point(downgrade(t), at);
  TypeId tail = omega_power(summand);
  TypeContext pt_ctx = ctx;
  pt_ctx.params.push_back(ParamKind::Point);
  std::vector<TypeId> prefixes{empty_type(rec.level - 1, context_id(pt_ctx))};
  for (TypeId p : finite_powers(summand)) prefixes.push_back(p);
  for (TypeId c : rec.point_children)
    for (TypeId pre : prefixes)
      pch.push_back(compose_sum(compose_sum(pre, c), tail));

  // Ramsey closure: every omega-sequence of set extensions factors as a
  // finite prefix followed by an idempotent block type, and every such
  // pair is realized by an explicit sequence.
  std::set<TypeId> closure(rec.set_children.begin(), rec.set_children.end());
  std::vector<TypeId> work(closure.begin(), closure.end());
  const std::size_t closure_cap = 50000;
  while (!work.empty()) {
    TypeId x = work.back();
    work.pop_back();
    std::vector<TypeId> snapshot(closure.begin(), closure.end());
    for (TypeId y : snapshot) {
      for (TypeId z : {compose_sum(x, y), compose_sum(y, x)}) {
        if (closure.insert(z).second) work.push_back(z);
      }
    }
    if (closure.size() > closure_cap)
      throw ResourceError("omega_power: set-extension closure exceeds the cap");
  }
  for (TypeId e : closure) {
    if (compose_sum(e, e) != e) continue;
    TypeId oe = omega_power(e);
    for (TypeId s : closure) sch.push_back(compose_sum(s, oe));
  }

  TypeId id = intern(rec.level, rec.ctx, rec.facts, std::move(pch),
                     std::move(sch));
  omega_memo_[t] = id;
  return id;
}

TypeId TypeTable::pow_type(TypeId t, const Pos& e) {
  const TypeRecord& rec = records_[t];
  TypeId result = empty_type(rec.level, rec.ctx);
  TypeId base = t;
  Pos n = e;
  if (n < 0) throw std::invalid_argument("pow_type: negative exponent");
  while (n > 0) {
    if ((n & 1) != 0) result = compose_sum(result, base);
    n >>= 1;
    if (n > 0) base = compose_sum(base, base);
  }
  return result;
}

std::vector<TypeId> TypeTable::finite_powers(TypeId t) {
  std::vector<TypeId> out;
  std::set<TypeId> seen;
  TypeId cur = t;
  while (seen.insert(cur).second) {
    out.push_back(cur);
    cur = compose_sum(cur, t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Type -> sentence entailment

namespace {

struct EntailEnv {
  TypeTable& tt;
  std::map<std::string, int> vars;  // variable -> absolute param index
};

int point_index(const TypeContext& ctx, int param) {
  int pi = 0;
  for (int i = 0; i < param; ++i) pi += (ctx.params[i] == ParamKind::Point);
  return pi;
}
int set_column(const TypeContext& ctx, int param) {
  int si = 0;
  for (int i = 0; i < param; ++i) si += (ctx.params[i] == ParamKind::Set);
  return ctx.tracks + si;
}

int lookup(const EntailEnv& env, const std::string& v) {
  auto it = env.vars.find(v);
  if (it == env.vars.end())
    throw std::invalid_argument("implies_sentence: free variable '" + v + "'");
  return it->second;
}

bool holds(EntailEnv& env, TypeId t, const Formula& f) {
  TypeTable& tt = env.tt;
  const TypeRecord& rec = tt.record(t);
  const TypeContext& ctx = tt.context(rec.ctx);
  switch (f.kind) {
    case FormulaKind::Less:
    case FormulaKind::Leq:
    case FormulaKind::Eq: {
      int pi = point_index(ctx, lookup(env, f.var1));
      int pj = point_index(ctx, lookup(env, f.var2));
      if (pi == pj) return f.kind != FormulaKind::Less;
      std::uint8_t r = rel_of(rec.facts, pi, pj);
      if (f.kind == FormulaKind::Less) return r == kLess;
      if (f.kind == FormulaKind::Leq) return r == kLess || r == kEqual;
      return r == kEqual;
    }
    case FormulaKind::Pred:
      return rec.facts.member(point_index(ctx, lookup(env, f.var1)), f.track);
    case FormulaKind::In:
      return rec.facts.member(point_index(ctx, lookup(env, f.var1)),
                              set_column(ctx, lookup(env, f.var2)));
    case FormulaKind::Not:
      return !holds(env, t, *f.children[0]);
    case FormulaKind::And:
      return holds(env, t, *f.children[0]) && holds(env, t, *f.children[1]);
    case FormulaKind::Or:
      return holds(env, t, *f.children[0]) || holds(env, t, *f.children[1]);
    case FormulaKind::Implies:
      return !holds(env, t, *f.children[0]) || holds(env, t, *f.children[1]);
    case FormulaKind::ExistsFo:
    case FormulaKind::ForallFo:
    case FormulaKind::ExistsSo:
    case FormulaKind::ForallSo: {
      bool exists =
          f.kind == FormulaKind::ExistsFo || f.kind == FormulaKind::ExistsSo;
      bool second_order =
          f.kind == FormulaKind::ExistsSo || f.kind == FormulaKind::ForallSo;
      const auto& list = second_order ? rec.set_children : rec.point_children;
      int param = static_cast<int>(ctx.params.size());
      auto old = env.vars.find(f.var1) != env.vars.end()
                     ? std::optional<int>(env.vars[f.var1])
                     : std::nullopt;
      env.vars[f.var1] = param;
      bool result = !exists;
      for (TypeId c : list) {
        bool v = holds(env, c, *f.children[0]);
        if (exists && v) {
          result = true;
          break;
        }
        if (!exists && !v) {
          result = false;
          break;
        }
      }
      if (old)
        env.vars[f.var1] = *old;
      else
        env.vars.erase(f.var1);
      return result;
    }
  }
  return false;
}

}  // namespace

bool implies_sentence(TypeTable& tt, TypeId t, const Formula& f,
                      const Signature& sig) {
  const TypeRecord& rec = tt.record(t);
  const TypeContext& ctx = tt.context(rec.ctx);
  if (!ctx.params.empty())
    throw std::invalid_argument("implies_sentence: type carries parameters");
  if (ctx.tracks != sig.tracks())
    throw std::invalid_argument("implies_sentence: signature mismatch");
  if (!f.is_sentence())
    throw std::invalid_argument("implies_sentence: formula is not a sentence");
  if (f.quantifier_depth() > rec.level)
    throw std::invalid_argument(
        "implies_sentence: quantifier depth exceeds the type level");
  EntailEnv env{tt, {}};
  return holds(env, t, f);
}

}  // namespace lodex
