#include "lodex/formula.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace lodex {

int Signature::track_of(const std::string& name) const {
  for (size_t i = 0; i < predicate_names.size(); ++i)
    if (predicate_names[i] == name) return static_cast<int>(i);
  if (expansion_name && *expansion_name == name)
    return static_cast<int>(predicate_names.size());
  return -1;
}

std::string Signature::name_of_track(int t) const {
  if (t >= 0 && t < static_cast<int>(predicate_names.size()))
    return predicate_names[t];
  if (expansion_name && t == static_cast<int>(predicate_names.size()))
    return *expansion_name;
  return "?";
}

Signature Signature::with_predicates(int n) {
  Signature s;
  for (int i = 1; i <= n; ++i) s.predicate_names.push_back("P" + std::to_string(i));
  return s;
}

Signature Signature::expanded(const std::string& name) const {
  Signature s = *this;
  s.expansion_name = name;
  return s;
}

namespace {

bool is_quantifier(FormulaKind k) {
  return k == FormulaKind::ExistsFo || k == FormulaKind::ForallFo ||
         k == FormulaKind::ExistsSo || k == FormulaKind::ForallSo;
}

int compute_qd(FormulaKind k, const std::vector<FormulaPtr>& ch) {
  int m = 0;
  for (const auto& c : ch) m = std::max(m, c->quantifier_depth());
  return is_quantifier(k) ? m + 1 : m;
}

}  // namespace

FormulaPtr Formula::atom(FormulaKind k, std::string a, std::string b) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->var1 = std::move(a);
  f->var2 = std::move(b);
  f->qd_ = 0;
  return f;
}

FormulaPtr Formula::pred(int track, std::string x) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Pred;
  f->track = track;
  f->var1 = std::move(x);
  f->qd_ = 0;
  return f;
}

FormulaPtr Formula::negation(FormulaPtr c) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Not;
  f->children = {std::move(c)};
  f->qd_ = f->children[0]->quantifier_depth();
  return f;
}

FormulaPtr Formula::binary(FormulaKind k, FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->children = {std::move(a), std::move(b)};
  f->qd_ = compute_qd(k, f->children);
  return f;
}

FormulaPtr Formula::quantifier(FormulaKind k, std::string v, FormulaPtr c) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->var1 = std::move(v);
  f->children = {std::move(c)};
  f->qd_ = f->children[0]->quantifier_depth() + 1;
  return f;
}

int quantifier_depth(const Formula& f) { return f.quantifier_depth(); }

namespace {

void collect_free(const Formula& f, std::set<std::string>& bound,
                  std::set<std::string>& out) {
  switch (f.kind) {
    case FormulaKind::Less:
    case FormulaKind::Leq:
    case FormulaKind::Eq:
    case FormulaKind::In:
      if (!bound.count(f.var1)) out.insert(f.var1);
      if (!bound.count(f.var2)) out.insert(f.var2);
      return;
    case FormulaKind::Pred:
      if (!bound.count(f.var1)) out.insert(f.var1);
      return;
    case FormulaKind::Not:
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
      for (const auto& c : f.children) collect_free(*c, bound, out);
      return;
    default: {
      bool fresh = bound.insert(f.var1).second;
      collect_free(*f.children[0], bound, out);
      if (fresh) bound.erase(f.var1);
      return;
    }
  }
}

}  // namespace

std::set<std::string> Formula::free_variables() const {
  std::set<std::string> bound, out;
  collect_free(*this, bound, out);
  return out;
}

bool Formula::mentions_track(int t) const {
  if (kind == FormulaKind::Pred && track == t) return true;
  for (const auto& c : children)
    if (c->mentions_track(t)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  enum Kind { Ident, Sym, End } kind;
  std::string text;
  size_t pos;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }
  const Token& peek() const { return tok_; }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (i_ < s_.size() && static_cast<unsigned char>(s_[i_]) >= 128)
      throw ParseError("non-ASCII character at position " + std::to_string(i_));
    if (i_ >= s_.size()) {
      tok_ = {Token::End, "", i_};
      return;
    }
    size_t start = i_;
    char c = s_[i_];
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (i_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
        ++i_;
      tok_ = {Token::Ident, s_.substr(start, i_ - start), start};
      return;
    }
    if (c == '<' && i_ + 1 < s_.size() && s_[i_ + 1] == '=') {
      i_ += 2;
      tok_ = {Token::Sym, "<=", start};
      return;
    }
    if (c == '-' && i_ + 1 < s_.size() && s_[i_ + 1] == '>') {
      i_ += 2;
      tok_ = {Token::Sym, "->", start};
      return;
    }
    if (std::string("<=&|~().").find(c) != std::string::npos) {
      ++i_;
      tok_ = {Token::Sym, std::string(1, c), start};
      return;
    }
    throw ParseError("unexpected character '" + std::string(1, c) +
                     "' at position " + std::to_string(start));
  }

  const std::string& s_;
  size_t i_ = 0;
  Token tok_;
};

bool is_lower_ident(const std::string& s) {
  return !s.empty() && std::islower(static_cast<unsigned char>(s[0]));
}
bool is_upper_ident(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

class Parser {
 public:
  Parser(const std::string& text, const Signature& sig)
      : lex_(text), sig_(sig) {}

  FormulaPtr parse_all() {
    FormulaPtr f = parse_implies();
    if (lex_.peek().kind != Token::End)
      throw ParseError("trailing input at position " +
                       std::to_string(lex_.peek().pos));
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw ParseError(what + " at position " + std::to_string(lex_.peek().pos));
  }

  bool accept_sym(const std::string& s) {
    if (lex_.peek().kind == Token::Sym && lex_.peek().text == s) {
      lex_.next();
      return true;
    }
    return false;
  }
  void expect_sym(const std::string& s) {
    if (!accept_sym(s)) fail("expected '" + s + "'");
  }

  FormulaPtr parse_implies() {
    FormulaPtr lhs = parse_or();
    if (accept_sym("->"))
      return Formula::binary(FormulaKind::Implies, lhs, parse_implies());
    return lhs;
  }
  FormulaPtr parse_or() {
    FormulaPtr f = parse_and();
    while (accept_sym("|")) f = Formula::binary(FormulaKind::Or, f, parse_and());
    return f;
  }
  FormulaPtr parse_and() {
    FormulaPtr f = parse_unary();
    while (accept_sym("&"))
      f = Formula::binary(FormulaKind::And, f, parse_unary());
    return f;
  }

  FormulaPtr parse_unary() {
    if (accept_sym("~")) return Formula::negation(parse_unary());
    const Token& t = lex_.peek();
    if (t.kind == Token::Ident &&
        (t.text == "E" || t.text == "A" || t.text == "E2" || t.text == "A2")) {
      std::string kw = lex_.next().text;
      Token v = lex_.next();
      if (v.kind != Token::Ident) fail("expected variable after quantifier");
      bool second_order = kw == "E2" || kw == "A2";
      if (second_order && !is_upper_ident(v.text))
        fail("set variable must start with an uppercase letter");
      if (!second_order && !is_lower_ident(v.text))
        fail("point variable must start with a lowercase letter");
      expect_sym(".");
      FormulaKind k = kw == "E"    ? FormulaKind::ExistsFo
                      : kw == "A"  ? FormulaKind::ForallFo
                      : kw == "E2" ? FormulaKind::ExistsSo
                                   : FormulaKind::ForallSo;
      return Formula::quantifier(k, v.text, parse_implies());
    }
    if (accept_sym("(")) {
      FormulaPtr f = parse_implies();
      expect_sym(")");
      return f;
    }
    return parse_atom();
  }

  FormulaPtr parse_atom() {
    Token t = lex_.next();
    if (t.kind != Token::Ident) fail("expected atom");
    // Predicate application: ident "(" var ")"
    if (lex_.peek().kind == Token::Sym && lex_.peek().text == "(") {
      int track = sig_.track_of(t.text);
      if (track < 0)
        throw ParseError("unknown predicate '" + t.text + "' at position " +
                         std::to_string(t.pos));
      lex_.next();
      Token v = lex_.next();
      if (v.kind != Token::Ident || !is_lower_ident(v.text))
        fail("expected point variable");
      expect_sym(")");
      return Formula::pred(track, v.text);
    }
    if (!is_lower_ident(t.text))
      throw ParseError("expected point variable at position " +
                       std::to_string(t.pos));
    if (accept_sym("<"))
      return Formula::atom(FormulaKind::Less, t.text, expect_lower());
    if (accept_sym("<="))
      return Formula::atom(FormulaKind::Leq, t.text, expect_lower());
    if (accept_sym("="))
      return Formula::atom(FormulaKind::Eq, t.text, expect_lower());
    if (lex_.peek().kind == Token::Ident && lex_.peek().text == "in") {
      lex_.next();
      Token v = lex_.next();
      if (v.kind != Token::Ident || !is_upper_ident(v.text))
        fail("expected set variable");
      return Formula::atom(FormulaKind::In, t.text, v.text);
    }
    fail("expected comparison or membership");
  }

  std::string expect_lower() {
    Token v = lex_.next();
    if (v.kind != Token::Ident || !is_lower_ident(v.text))
      fail("expected point variable");
    return v.text;
  }

  Lexer lex_;
  const Signature& sig_;
};

}  // namespace

FormulaPtr parse(const std::string& text, const Signature& sig) {
  return Parser(text, sig).parse_all();
}

namespace {

void print_rec(const Formula& f, const Signature& sig, std::ostream& os) {
  switch (f.kind) {
    case FormulaKind::Less:
      os << f.var1 << " < " << f.var2;
      return;
    case FormulaKind::Leq:
      os << f.var1 << " <= " << f.var2;
      return;
    case FormulaKind::Eq:
      os << f.var1 << " = " << f.var2;
      return;
    case FormulaKind::In:
      os << f.var1 << " in " << f.var2;
      return;
    case FormulaKind::Pred:
      os << sig.name_of_track(f.track) << "(" << f.var1 << ")";
      return;
    case FormulaKind::Not:
      os << "~(";
      print_rec(*f.children[0], sig, os);
      os << ")";
      return;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies: {
      const char* op = f.kind == FormulaKind::And   ? " & "
                       : f.kind == FormulaKind::Or ? " | "
                                                   : " -> ";
      os << "(";
      print_rec(*f.children[0], sig, os);
      os << op;
      print_rec(*f.children[1], sig, os);
      os << ")";
      return;
    }
    default: {
      const char* kw = f.kind == FormulaKind::ExistsFo   ? "E"
                       : f.kind == FormulaKind::ForallFo ? "A"
                       : f.kind == FormulaKind::ExistsSo ? "E2"
                                                        : "A2";
      os << kw << " " << f.var1 << ". (";
      print_rec(*f.children[0], sig, os);
      os << ")";
      return;
    }
  }
}

}  // namespace

std::string to_string(const Formula& f, const Signature& sig) {
  std::ostringstream os;
  print_rec(f, sig, os);
  return os.str();
}

bool structurally_equal(const Formula& a, const Formula& b) {
  if (a.kind != b.kind || a.var1 != b.var1 || a.var2 != b.var2 ||
      a.track != b.track || a.children.size() != b.children.size())
    return false;
  for (size_t i = 0; i < a.children.size(); ++i)
    if (!structurally_equal(*a.children[i], *b.children[i])) return false;
  return true;
}

namespace {

bool alpha_rec(const Formula& a, const Formula& b,
               std::map<std::string, std::string>& ab,
               std::map<std::string, std::string>& ba) {
  if (a.kind != b.kind || a.track != b.track ||
      a.children.size() != b.children.size())
    return false;
  auto match = [&](const std::string& x, const std::string& y) {
    auto ia = ab.find(x);
    auto ib = ba.find(y);
    if (ia == ab.end() && ib == ba.end()) return x == y;  // both free
    return ia != ab.end() && ib != ba.end() && ia->second == y &&
           ib->second == x;
  };
  switch (a.kind) {
    case FormulaKind::Less:
    case FormulaKind::Leq:
    case FormulaKind::Eq:
    case FormulaKind::In:
      return match(a.var1, b.var1) && match(a.var2, b.var2);
    case FormulaKind::Pred:
      return match(a.var1, b.var1);
    case FormulaKind::Not:
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
      for (size_t i = 0; i < a.children.size(); ++i)
        if (!alpha_rec(*a.children[i], *b.children[i], ab, ba)) return false;
      return true;
    default: {
      auto olda = ab.find(a.var1) != ab.end()
                      ? std::optional<std::string>(ab[a.var1])
                      : std::nullopt;
      auto oldb = ba.find(b.var1) != ba.end()
                      ? std::optional<std::string>(ba[b.var1])
                      : std::nullopt;
      ab[a.var1] = b.var1;
      ba[b.var1] = a.var1;
      bool ok = alpha_rec(*a.children[0], *b.children[0], ab, ba);
      if (olda)
        ab[a.var1] = *olda;
      else
        ab.erase(a.var1);
      if (oldb)
        ba[b.var1] = *oldb;
      else
        ba.erase(b.var1);
      return ok;
    }
  }
}

}  // namespace

bool alpha_equal(const Formula& a, const Formula& b) {
  std::map<std::string, std::string> ab, ba;
  return alpha_rec(a, b, ab, ba);
}

// ---------------------------------------------------------------------------
// Relativization and the H-elimination transform

namespace {

void collect_bound(const Formula& f, std::set<std::string>& out) {
  if (is_quantifier(f.kind)) out.insert(f.var1);
  for (const auto& c : f.children) collect_bound(*c, out);
}

FormulaPtr relativize_rec(const FormulaPtr& f,
                          const std::optional<std::string>& lo,
                          const std::optional<std::string>& hi) {
  switch (f->kind) {
    case FormulaKind::Less:
    case FormulaKind::Leq:
    case FormulaKind::Eq:
    case FormulaKind::In:
    case FormulaKind::Pred:
      return f;
    case FormulaKind::Not:
      return Formula::negation(relativize_rec(f->children[0], lo, hi));
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
      return Formula::binary(f->kind, relativize_rec(f->children[0], lo, hi),
                             relativize_rec(f->children[1], lo, hi));
    case FormulaKind::ExistsSo:
    case FormulaKind::ForallSo:
      return Formula::quantifier(f->kind, f->var1,
                                 relativize_rec(f->children[0], lo, hi));
    case FormulaKind::ExistsFo:
    case FormulaKind::ForallFo: {
      FormulaPtr body = relativize_rec(f->children[0], lo, hi);
      FormulaPtr guard;
      if (lo) guard = Formula::atom(FormulaKind::Leq, *lo, f->var1);
      if (hi) {
        auto up = Formula::atom(FormulaKind::Less, f->var1, *hi);
        guard = guard ? Formula::binary(FormulaKind::And, guard, up) : up;
      }
      if (!guard) return Formula::quantifier(f->kind, f->var1, body);
      FormulaKind join = f->kind == FormulaKind::ExistsFo ? FormulaKind::And
                                                          : FormulaKind::Implies;
      return Formula::quantifier(f->kind, f->var1,
                                 Formula::binary(join, guard, body));
    }
  }
  return f;
}

}  // namespace

FormulaPtr relativize(FormulaPtr f, std::optional<std::string> lower,
                      std::optional<std::string> upper) {
  std::set<std::string> bound;
  collect_bound(*f, bound);
  if ((lower && bound.count(*lower)) || (upper && bound.count(*upper)))
    throw ParseError("relativization bound variable is captured");
  return relativize_rec(f, lower, upper);
}

namespace {

FormulaPtr replace_h_atoms(const FormulaPtr& f, int h_track,
                           const std::string& x) {
  if (f->kind == FormulaKind::Pred && f->track == h_track)
    return Formula::atom(FormulaKind::Eq, f->var1, x);
  if (f->children.empty()) return f;
  if (f->children.size() == 1) {
    auto c = replace_h_atoms(f->children[0], h_track, x);
    if (f->kind == FormulaKind::Not) return Formula::negation(c);
    return Formula::quantifier(f->kind, f->var1, c);
  }
  return Formula::binary(f->kind, replace_h_atoms(f->children[0], h_track, x),
                         replace_h_atoms(f->children[1], h_track, x));
}

std::string fresh_name(const std::set<std::string>& used, const std::string& base) {
  if (!used.count(base)) return base;
  for (int i = 0;; ++i) {
    std::string cand = base + std::to_string(i);
    if (!used.count(cand)) return cand;
  }
}

}  // namespace

FormulaPtr transform_er(FormulaPtr f, const Signature& sig) {
  if (!sig.expansion_name)
    throw ParseError("transform_er requires a signature with an expansion predicate");
  int h_track = static_cast<int>(sig.predicate_names.size());
  std::set<std::string> used;
  collect_bound(*f, used);
  for (const auto& v : f->free_variables()) used.insert(v);
  std::string x = fresh_name(used, "u");
  used.insert(x);
  std::string y = fresh_name(used, "v");
  FormulaPtr star = replace_h_atoms(f, h_track, x);
  FormulaPtr is_min = Formula::quantifier(
      FormulaKind::ForallFo, y, Formula::atom(FormulaKind::Leq, x, y));
  return Formula::quantifier(FormulaKind::ExistsFo, x,
                             Formula::binary(FormulaKind::And, is_min, star));
}

// ---------------------------------------------------------------------------
// Brute-force evaluation

namespace {

struct Env {
  const std::vector<Letter>& word;
  std::map<std::string, int> fo;
  std::map<std::string, std::uint64_t> so;
};

int lookup_fo(const Env& e, const std::string& v) {
  auto it = e.fo.find(v);
  if (it == e.fo.end())
    throw ParseError("unassigned point variable '" + v + "'");
  return it->second;
}

std::uint64_t lookup_so(const Env& e, const std::string& v) {
  auto it = e.so.find(v);
  if (it == e.so.end()) throw ParseError("unassigned set variable '" + v + "'");
  return it->second;
}

bool eval_rec(const Formula& f, Env& env) {
  switch (f.kind) {
    case FormulaKind::Less:
      return lookup_fo(env, f.var1) < lookup_fo(env, f.var2);
    case FormulaKind::Leq:
      return lookup_fo(env, f.var1) <= lookup_fo(env, f.var2);
    case FormulaKind::Eq:
      return lookup_fo(env, f.var1) == lookup_fo(env, f.var2);
    case FormulaKind::Pred:
      return (env.word[lookup_fo(env, f.var1)] >> f.track) & 1u;
    case FormulaKind::In:
      return (lookup_so(env, f.var2) >> lookup_fo(env, f.var1)) & 1u;
    case FormulaKind::Not:
      return !eval_rec(*f.children[0], env);
    case FormulaKind::And:
      return eval_rec(*f.children[0], env) && eval_rec(*f.children[1], env);
    case FormulaKind::Or:
      return eval_rec(*f.children[0], env) || eval_rec(*f.children[1], env);
    case FormulaKind::Implies:
      return !eval_rec(*f.children[0], env) || eval_rec(*f.children[1], env);
    case FormulaKind::ExistsFo:
    case FormulaKind::ForallFo: {
      bool exists = f.kind == FormulaKind::ExistsFo;
      auto old = env.fo.find(f.var1) != env.fo.end()
                     ? std::optional<int>(env.fo[f.var1])
                     : std::nullopt;
      bool result = !exists;
      for (int p = 0; p < static_cast<int>(env.word.size()); ++p) {
        env.fo[f.var1] = p;
        bool v = eval_rec(*f.children[0], env);
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
        env.fo[f.var1] = *old;
      else
        env.fo.erase(f.var1);
      return result;
    }
    case FormulaKind::ExistsSo:
    case FormulaKind::ForallSo: {
      bool exists = f.kind == FormulaKind::ExistsSo;
      auto old = env.so.find(f.var1) != env.so.end()
                     ? std::optional<std::uint64_t>(env.so[f.var1])
                     : std::nullopt;
      std::uint64_t limit = 1ull << env.word.size();
      bool result = !exists;
      for (std::uint64_t s = 0; s < limit; ++s) {
        env.so[f.var1] = s;
        bool v = eval_rec(*f.children[0], env);
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
        env.so[f.var1] = *old;
      else
        env.so.erase(f.var1);
      return result;
    }
  }
  return false;
}

}  // namespace

bool eval_finite(const Formula& f, const FiniteModel& m) {
  if (m.word.size() > 20)
    throw ResourceError("eval_finite: word longer than the brute-force cap");
  Env env{m.word, m.fo_assignment, m.so_assignment};
  return eval_rec(f, env);
}

}  // namespace lodex
