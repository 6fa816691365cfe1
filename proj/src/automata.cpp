#include "lodex/automata.hpp"

#include <algorithm>
#include <cassert>

namespace lodex {

namespace {

Letter letter_count(int tracks) { return 1u << tracks; }

Nfa make_nfa(int tracks, int states) {
  Nfa a;
  a.tracks = tracks;
  a.states = states;
  a.delta.resize(states);
  return a;
}

void add_edge(Nfa& a, int from, Letter l, int to) {
  a.delta[from][l].insert(to);
}

std::set<int> step(const Nfa& a, const std::set<int>& from, Letter l) {
  std::set<int> out;
  for (int q : from) {
    auto it = a.delta[q].find(l);
    if (it != a.delta[q].end()) out.insert(it->second.begin(), it->second.end());
  }
  return out;
}

// Deterministic automaton accepting words with exactly one 1 on the
// given track.
Nfa exactly_one(int tracks, int track) {
  Nfa a = make_nfa(tracks, 2);
  a.initial = {0};
  a.accepting = {1};
  for (Letter l = 0; l < letter_count(tracks); ++l) {
    bool bit = (l >> track) & 1u;
    add_edge(a, 0, l, bit ? 1 : 0);
    if (!bit) add_edge(a, 1, l, 1);
  }
  return a;
}

// Membership-style atom: at the (unique) position marked on
// `point_track`, the predicate `test_track` must hold (or not).
Nfa at_marked_position(int tracks, int point_track, int test_track,
                       bool expected) {
  Nfa a = make_nfa(tracks, 2);
  a.initial = {0};
  a.accepting = {1};
  for (Letter l = 0; l < letter_count(tracks); ++l) {
    bool mark = (l >> point_track) & 1u;
    bool test = (l >> test_track) & 1u;
    if (!mark) {
      add_edge(a, 0, l, 0);
      add_edge(a, 1, l, 1);
    } else if (test == expected) {
      add_edge(a, 0, l, 1);
    }
  }
  return a;
}

// Order atom over two marked tracks; rel 0: x<y, 1: x<=y, 2: x=y.
// Both tracks must carry exactly one mark; stray marks reject.
Nfa order_atom(int tracks, int xt, int yt, int rel) {
  // States: 0 nothing seen, 1 x seen, 2 both seen (accepting).
  Nfa a = make_nfa(tracks, 3);
  a.initial = {0};
  a.accepting = {2};
  for (Letter l = 0; l < letter_count(tracks); ++l) {
    bool x = (l >> xt) & 1u;
    bool y = (l >> yt) & 1u;
    if (!x && !y) {
      for (int q = 0; q < 3; ++q) add_edge(a, q, l, q);
    } else if (x && y) {
      if (rel != 0) add_edge(a, 0, l, 2);  // marks on the same position
    } else if (x) {
      if (rel != 2) add_edge(a, 0, l, 1);
    } else {  // y only
      if (rel != 2) add_edge(a, 1, l, 2);
    }
  }
  return a;
}

Nfa product(const Nfa& a, const Nfa& b, bool conjunction, int state_cap) {
  assert(a.tracks == b.tracks);
  if (!conjunction) {
    // Disjoint union.
    Nfa u = make_nfa(a.tracks, a.states + b.states);
    for (int q = 0; q < a.states; ++q)
      for (const auto& [l, ts] : a.delta[q])
        for (int t : ts) add_edge(u, q, l, t);
    for (int q = 0; q < b.states; ++q)
      for (const auto& [l, ts] : b.delta[q])
        for (int t : ts) add_edge(u, a.states + q, l, a.states + t);
    for (int q : a.initial) u.initial.insert(q);
    for (int q : b.initial) u.initial.insert(a.states + q);
    for (int q : a.accepting) u.accepting.insert(q);
    for (int q : b.accepting) u.accepting.insert(a.states + q);
    return u;
  }
  Nfa p = make_nfa(a.tracks, a.states * b.states);
  auto id = [&](int qa, int qb) { return qa * b.states + qb; };
  if (p.states > state_cap) throw ResourceError("automaton product exceeds the state cap");
  for (int qa = 0; qa < a.states; ++qa)
    for (int qb = 0; qb < b.states; ++qb)
      for (const auto& [l, tsa] : a.delta[qa]) {
        auto it = b.delta[qb].find(l);
        if (it == b.delta[qb].end()) continue;
        for (int ta : tsa)
          for (int tb : it->second) add_edge(p, id(qa, qb), l, id(ta, tb));
      }
  for (int qa : a.initial)
    for (int qb : b.initial) p.initial.insert(id(qa, qb));
  for (int qa : a.accepting)
    for (int qb : b.accepting) p.accepting.insert(id(qa, qb));
  return p;
}

Nfa complement(const Nfa& a, int state_cap) {
  // Subset construction, then flip acceptance.
  std::map<std::set<int>, int> ids;
  std::vector<std::set<int>> subsets;
  auto id_of = [&](const std::set<int>& s) {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(subsets.size());
    if (id >= state_cap)
      throw ResourceError("subset construction exceeds the state cap");
    ids.emplace(s, id);
    subsets.push_back(s);
    return id;
  };
  Nfa d = make_nfa(a.tracks, 0);
  int start = id_of(a.initial);
  for (size_t i = 0; i < subsets.size(); ++i) {
    std::set<int> cur = subsets[i];
    for (Letter l = 0; l < letter_count(a.tracks); ++l) {
      int to = id_of(step(a, cur, l));
      d.delta.resize(subsets.size());
      add_edge(d, static_cast<int>(i), l, to);
    }
  }
  d.states = static_cast<int>(subsets.size());
  d.delta.resize(d.states);
  d.initial = {start};
  for (int i = 0; i < d.states; ++i) {
    bool acc = false;
    for (int q : subsets[i]) acc = acc || a.accepting.count(q);
    if (!acc) d.accepting.insert(i);
  }
  return d;
}

// Existentially frees a track: successors no longer depend on its bit.
Nfa project(const Nfa& a, int track) {
  Nfa p = make_nfa(a.tracks, a.states);
  p.initial = a.initial;
  p.accepting = a.accepting;
  for (int q = 0; q < a.states; ++q)
    for (const auto& [l, ts] : a.delta[q]) {
      for (int t : ts) {
        add_edge(p, q, l, t);
        add_edge(p, q, l ^ (1u << track), t);
      }
    }
  return p;
}

struct Compiler {
  const Signature& sig;
  int state_cap;
  std::map<std::string, int> var_track;
  int next_track;

  void assign_tracks(const Formula& f) {
    switch (f.kind) {
      case FormulaKind::ExistsFo:
      case FormulaKind::ForallFo:
      case FormulaKind::ExistsSo:
      case FormulaKind::ForallSo:
        if (!var_track.count(f.var1)) var_track[f.var1] = next_track++;
        break;
      case FormulaKind::Less:
      case FormulaKind::Leq:
      case FormulaKind::Eq:
      case FormulaKind::In:
        if (!var_track.count(f.var1)) var_track[f.var1] = next_track++;
        if (!var_track.count(f.var2)) var_track[f.var2] = next_track++;
        break;
      case FormulaKind::Pred:
        if (!var_track.count(f.var1)) var_track[f.var1] = next_track++;
        break;
      default:
        break;
    }
    for (const auto& c : f.children) assign_tracks(*c);
  }

  Nfa go(const Formula& f, int tracks) {
    switch (f.kind) {
      case FormulaKind::Less:
        return order_atom(tracks, var_track.at(f.var1), var_track.at(f.var2), 0);
      case FormulaKind::Leq:
        return order_atom(tracks, var_track.at(f.var1), var_track.at(f.var2), 1);
      case FormulaKind::Eq:
        return order_atom(tracks, var_track.at(f.var1), var_track.at(f.var2), 2);
      case FormulaKind::Pred:
        return at_marked_position(tracks, var_track.at(f.var1), f.track, true);
      case FormulaKind::In:
        return at_marked_position(tracks, var_track.at(f.var1),
                                  var_track.at(f.var2), true);
      case FormulaKind::Not:
        return complement(go(*f.children[0], tracks), state_cap);
      case FormulaKind::And:
        return product(go(*f.children[0], tracks), go(*f.children[1], tracks),
                       true, state_cap);
      case FormulaKind::Or:
        return product(go(*f.children[0], tracks), go(*f.children[1], tracks),
                       false, state_cap);
      case FormulaKind::Implies:
        return product(complement(go(*f.children[0], tracks), state_cap),
                       go(*f.children[1], tracks), false, state_cap);
      case FormulaKind::ExistsFo: {
        Nfa body = go(*f.children[0], tracks);
        int t = var_track.at(f.var1);
        return project(product(body, exactly_one(tracks, t), true, state_cap),
                       t);
      }
      case FormulaKind::ForallFo: {
        Nfa inner = go(*Formula::quantifier(FormulaKind::ExistsFo, f.var1,
                                            Formula::negation(f.children[0])),
                       tracks);
        return complement(inner, state_cap);
      }
      case FormulaKind::ExistsSo:
        return project(go(*f.children[0], tracks), var_track.at(f.var1));
      case FormulaKind::ForallSo: {
        Nfa inner = go(*Formula::quantifier(FormulaKind::ExistsSo, f.var1,
                                            Formula::negation(f.children[0])),
                       tracks);
        return complement(inner, state_cap);
      }
    }
    throw std::logic_error("unreachable");
  }
};

// Renames bound variables apart so each one gets its own track.
FormulaPtr uniquify(const FormulaPtr& f, std::map<std::string, std::string>& env,
                    int& counter) {
  switch (f->kind) {
    case FormulaKind::Less:
    case FormulaKind::Leq:
    case FormulaKind::Eq:
    case FormulaKind::In: {
      auto r = [&](const std::string& v) {
        auto it = env.find(v);
        return it == env.end() ? v : it->second;
      };
      return Formula::atom(f->kind, r(f->var1), r(f->var2));
    }
    case FormulaKind::Pred: {
      auto it = env.find(f->var1);
      return Formula::pred(f->track, it == env.end() ? f->var1 : it->second);
    }
    case FormulaKind::Not:
      return Formula::negation(uniquify(f->children[0], env, counter));
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
      return Formula::binary(f->kind, uniquify(f->children[0], env, counter),
                             uniquify(f->children[1], env, counter));
    default: {
      bool second_order =
          f->kind == FormulaKind::ExistsSo || f->kind == FormulaKind::ForallSo;
      std::string fresh = (second_order ? "V_" : "v_") + std::to_string(counter++);
      auto old = env.find(f->var1) != env.end()
                     ? std::optional<std::string>(env[f->var1])
                     : std::nullopt;
      env[f->var1] = fresh;
      FormulaPtr body = uniquify(f->children[0], env, counter);
      if (old)
        env[f->var1] = *old;
      else
        env.erase(f->var1);
      return Formula::quantifier(f->kind, fresh, body);
    }
  }
}

}  // namespace

bool accepts(const Nfa& a, const std::vector<Letter>& word) {
  std::set<int> cur = a.initial;
  for (Letter l : word) {
    if (l >= letter_count(a.tracks))
      throw std::invalid_argument("accepts: letter outside the alphabet");
    cur = step(a, cur, l);
  }
  for (int q : cur)
    if (a.accepting.count(q)) return true;
  return false;
}

Nfa compile(const Formula& f, const Signature& sig, int state_cap) {
  std::map<std::string, std::string> env;
  int counter = 0;
  FormulaPtr g = uniquify(std::make_shared<Formula>(f), env, counter);
  Compiler c{sig, state_cap, {}, sig.tracks()};
  c.assign_tracks(*g);
  return c.go(*g, c.next_track);
}

bool accepts_structure(const Nfa& a, const std::vector<Letter>& word,
                       int structure_tracks) {
  (void)structure_tracks;
  return accepts(a, word);  // variable tracks are don't-care after projection
}

}  // namespace lodex
