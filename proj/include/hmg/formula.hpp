#pragma once

// First-order logic over the one-sorted incidence structure ⟨V ∪ E, ∈⟩.
//
// The AST keeps the quantifier core (equality, membership, boolean
// connectives, quantifiers) plus membership-definable sugar: side predicates
// v(x)/e(x), exact edge size |x| = k, adjacency x ∼ y (optionally "by m
// shared edges of size k"), and exact vertex degree deg(x) = k. Macros expand
// to the core on demand; quantifier depth and evaluation are defined on the
// expansion, so sugar never changes the semantics, only the notation.
//
// Everything is immutable and shared by pointer; the s-expression text format
// (atoms: eq in not and or implies exists forall v e size adj deg) is the
// exchange representation.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hmg/errors.hpp"
#include "hmg/incidence.hpp"

namespace hmg {

enum class FormulaKind { Eq, In, Not, And, Or, Implies, Exists, Forall, IsV, IsE, Size, Adj, Deg };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FormulaKind kind;
  std::string a, b;  // variable operands; quantifiers bind `a`
  long long k = 0;   // size/degree value; shared-edge size for multi-adjacency
  long long m = 0;   // multi-adjacency edge count (0 = plain adjacency)
  std::vector<FormulaPtr> kids;
};

namespace logic_detail {

inline FormulaPtr node(FormulaKind kind, std::string a, std::string b, long long k, long long m,
                       std::vector<FormulaPtr> kids) {
  Formula f;
  f.kind = kind;
  f.a = std::move(a);
  f.b = std::move(b);
  f.k = k;
  f.m = m;
  f.kids = std::move(kids);
  return std::make_shared<const Formula>(std::move(f));
}

inline void require_var(const std::string& x, const char* where) {
  if (x.empty()) throw FormulaError(std::string(where) + ": empty variable name");
  if ((x[0] >= '0' && x[0] <= '9') || x[0] == '-')
    throw FormulaError(std::string(where) + ": variable may not look like a number: " + x);
  for (char c : x)
    if (c == '(' || c == ')' || c == ' ' || c == '\t' || c == '\n')
      throw FormulaError(std::string(where) + ": bad character in variable: " + x);
}

}  // namespace logic_detail

// --- constructors -----------------------------------------------------------

inline FormulaPtr f_eq(std::string x, std::string y) {
  logic_detail::require_var(x, "eq");
  logic_detail::require_var(y, "eq");
  return logic_detail::node(FormulaKind::Eq, std::move(x), std::move(y), 0, 0, {});
}

inline FormulaPtr f_in(std::string x, std::string y) {
  logic_detail::require_var(x, "in");
  logic_detail::require_var(y, "in");
  return logic_detail::node(FormulaKind::In, std::move(x), std::move(y), 0, 0, {});
}

inline FormulaPtr f_not(FormulaPtr f) {
  return logic_detail::node(FormulaKind::Not, "", "", 0, 0, {std::move(f)});
}

inline FormulaPtr f_and(std::vector<FormulaPtr> kids) {
  return logic_detail::node(FormulaKind::And, "", "", 0, 0, std::move(kids));
}

inline FormulaPtr f_or(std::vector<FormulaPtr> kids) {
  return logic_detail::node(FormulaKind::Or, "", "", 0, 0, std::move(kids));
}

inline FormulaPtr f_implies(FormulaPtr p, FormulaPtr q) {
  return logic_detail::node(FormulaKind::Implies, "", "", 0, 0, {std::move(p), std::move(q)});
}

// derived: built from the core connectives, not an AST node of its own
inline FormulaPtr f_iff(FormulaPtr p, FormulaPtr q) {
  return f_and({f_implies(p, q), f_implies(q, p)});
}

inline FormulaPtr f_true() { return f_and({}); }
inline FormulaPtr f_false() { return f_or({}); }

inline FormulaPtr f_exists(std::string x, FormulaPtr body) {
  logic_detail::require_var(x, "exists");
  return logic_detail::node(FormulaKind::Exists, std::move(x), "", 0, 0, {std::move(body)});
}

inline FormulaPtr f_forall(std::string x, FormulaPtr body) {
  logic_detail::require_var(x, "forall");
  return logic_detail::node(FormulaKind::Forall, std::move(x), "", 0, 0, {std::move(body)});
}

inline FormulaPtr f_is_vertex(std::string x) {
  logic_detail::require_var(x, "v");
  return logic_detail::node(FormulaKind::IsV, std::move(x), "", 0, 0, {});
}

inline FormulaPtr f_is_edge(std::string x) {
  logic_detail::require_var(x, "e");
  return logic_detail::node(FormulaKind::IsE, std::move(x), "", 0, 0, {});
}

inline FormulaPtr f_size(std::string x, long long k) {
  logic_detail::require_var(x, "size");
  if (k < 0) throw FormulaError("size: negative member count");
  return logic_detail::node(FormulaKind::Size, std::move(x), "", k, 0, {});
}

inline FormulaPtr f_adjacent(std::string x, std::string y) {
  logic_detail::require_var(x, "adj");
  logic_detail::require_var(y, "adj");
  return logic_detail::node(FormulaKind::Adj, std::move(x), std::move(y), 0, 0, {});
}

// x and y share at least m distinct edges, each of size exactly k
inline FormulaPtr f_adjacent(std::string x, std::string y, long long m, long long k) {
  logic_detail::require_var(x, "adj");
  logic_detail::require_var(y, "adj");
  if (m < 1) throw FormulaError("adj: shared-edge count must be >= 1");
  if (k < 0) throw FormulaError("adj: negative edge size");
  return logic_detail::node(FormulaKind::Adj, std::move(x), std::move(y), k, m, {});
}

inline FormulaPtr f_degree(std::string x, long long k) {
  logic_detail::require_var(x, "deg");
  if (k < 0) throw FormulaError("deg: negative degree");
  return logic_detail::node(FormulaKind::Deg, std::move(x), "", k, 0, {});
}

// --- structural helpers -----------------------------------------------------

inline void collect_variables(const Formula& f, std::set<std::string>& out) {
  if (!f.a.empty()) out.insert(f.a);
  if (!f.b.empty()) out.insert(f.b);
  for (const auto& kid : f.kids) collect_variables(*kid, out);
}

inline void free_variables(const Formula& f, std::set<std::string>& bound,
                           std::set<std::string>& out) {
  switch (f.kind) {
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      bool was_bound = bound.count(f.a) > 0;
      bound.insert(f.a);
      free_variables(*f.kids[0], bound, out);
      if (!was_bound) bound.erase(f.a);
      return;
    }
    default:
      if (!f.a.empty() && !bound.count(f.a)) out.insert(f.a);
      if (!f.b.empty() && !bound.count(f.b)) out.insert(f.b);
      for (const auto& kid : f.kids) free_variables(*kid, bound, out);
  }
}

inline std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> bound, out;
  free_variables(f, bound, out);
  return out;
}

inline bool is_sentence(const Formula& f) { return free_variables(f).empty(); }

// --- macro expansion --------------------------------------------------------

namespace logic_detail {

struct FreshNames {
  std::set<std::string> used;
  long long next = 0;
  std::string take() {
    for (;;) {
      std::string cand = "_" + std::to_string(next++);
      if (!used.count(cand)) {
        used.insert(cand);
        return cand;
      }
    }
  }
};

inline FormulaPtr all_distinct(const std::vector<std::string>& xs) {
  std::vector<FormulaPtr> parts;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) parts.push_back(f_not(f_eq(xs[i], xs[j])));
  return f_and(std::move(parts));
}

inline FormulaPtr expand(const FormulaPtr& f, FreshNames& fresh);

// ∃x_1..x_k pairwise distinct, each satisfying atom(x_i), such that every
// witness of atom is one of them: the "exactly k witnesses" scheme shared by
// |x| = k (atom: u ∈ x) and deg(x) = k (atom: x ∈ u).
inline FormulaPtr exactly_k_witnesses(long long k, FreshNames& fresh,
                                      const std::function<FormulaPtr(const std::string&)>& atom) {
  std::string u = fresh.take();
  if (k == 0) return f_forall(u, f_not(atom(u)));
  std::vector<std::string> w;
  for (long long i = 0; i < k; ++i) w.push_back(fresh.take());
  std::vector<FormulaPtr> body;
  for (const std::string& x : w) body.push_back(atom(x));
  body.push_back(all_distinct(w));
  std::vector<FormulaPtr> others;
  for (const std::string& x : w) others.push_back(f_not(f_eq(u, x)));
  body.push_back(f_forall(u, f_implies(f_and(std::move(others)), f_not(atom(u)))));
  FormulaPtr inner = f_and(std::move(body));
  for (auto it = w.rbegin(); it != w.rend(); ++it) inner = f_exists(*it, std::move(inner));
  return inner;
}

inline FormulaPtr expand(const FormulaPtr& f, FreshNames& fresh) {
  switch (f->kind) {
    case FormulaKind::Eq:
    case FormulaKind::In:
      return f;
    case FormulaKind::Not:
      return f_not(expand(f->kids[0], fresh));
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<FormulaPtr> kids;
      kids.reserve(f->kids.size());
      for (const auto& kid : f->kids) kids.push_back(expand(kid, fresh));
      return f->kind == FormulaKind::And ? f_and(std::move(kids)) : f_or(std::move(kids));
    }
    case FormulaKind::Implies:
      return f_implies(expand(f->kids[0], fresh), expand(f->kids[1], fresh));
    case FormulaKind::Exists:
      return f_exists(f->a, expand(f->kids[0], fresh));
    case FormulaKind::Forall:
      return f_forall(f->a, expand(f->kids[0], fresh));
    case FormulaKind::IsV: {
      std::string y = fresh.take();
      return f_forall(y, f_not(f_in(y, f->a)));
    }
    case FormulaKind::IsE: {
      std::string y = fresh.take();
      return f_exists(y, f_in(y, f->a));
    }
    case FormulaKind::Size: {
      const std::string x = f->a;
      return exactly_k_witnesses(f->k, fresh,
                                 [&x](const std::string& u) { return f_in(u, x); });
    }
    case FormulaKind::Deg: {
      const std::string x = f->a;
      return exactly_k_witnesses(f->k, fresh,
                                 [&x](const std::string& u) { return f_in(x, u); });
    }
    case FormulaKind::Adj: {
      if (f->m == 0) {
        std::string e = fresh.take();
        return f_exists(e, f_and({f_in(f->a, e), f_in(f->b, e)}));
      }
      std::vector<std::string> es;
      for (long long i = 0; i < f->m; ++i) es.push_back(fresh.take());
      std::vector<FormulaPtr> body;
      for (const std::string& e : es) {
        body.push_back(f_in(f->a, e));
        body.push_back(f_in(f->b, e));
        body.push_back(expand(f_size(e, f->k), fresh));
      }
      body.push_back(all_distinct(es));
      FormulaPtr inner = f_and(std::move(body));
      for (auto it = es.rbegin(); it != es.rend(); ++it) inner = f_exists(*it, std::move(inner));
      return inner;
    }
  }
  throw FormulaError("expand: unknown node kind");
}

}  // namespace logic_detail

// Rewrite all sugar into the quantifier core. Fresh bound variables are drawn
// from _0, _1, ... skipping any name already used in the formula.
inline FormulaPtr expand_macros(const FormulaPtr& f) {
  logic_detail::FreshNames fresh;
  collect_variables(*f, fresh.used);
  return logic_detail::expand(f, fresh);
}

// maximal quantifier nesting of the macro expansion
inline int quantifier_depth(const FormulaPtr& f) {
  struct Walk {
    static int depth(const Formula& f) {
      int best = 0;
      for (const auto& kid : f.kids) best = std::max(best, depth(*kid));
      if (f.kind == FormulaKind::Exists || f.kind == FormulaKind::Forall) return best + 1;
      return best;
    }
  };
  return Walk::depth(*expand_macros(f));
}

// --- s-expression exchange format -------------------------------------------

inline void write_sexpr(const Formula& f, std::ostream& os) {
  switch (f.kind) {
    case FormulaKind::Eq: os << "(eq " << f.a << ' ' << f.b << ')'; return;
    case FormulaKind::In: os << "(in " << f.a << ' ' << f.b << ')'; return;
    case FormulaKind::Not:
      os << "(not ";
      write_sexpr(*f.kids[0], os);
      os << ')';
      return;
    case FormulaKind::And:
    case FormulaKind::Or:
      os << (f.kind == FormulaKind::And ? "(and" : "(or");
      for (const auto& kid : f.kids) {
        os << ' ';
        write_sexpr(*kid, os);
      }
      os << ')';
      return;
    case FormulaKind::Implies:
      os << "(implies ";
      write_sexpr(*f.kids[0], os);
      os << ' ';
      write_sexpr(*f.kids[1], os);
      os << ')';
      return;
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      os << (f.kind == FormulaKind::Exists ? "(exists " : "(forall ") << f.a << ' ';
      write_sexpr(*f.kids[0], os);
      os << ')';
      return;
    case FormulaKind::IsV: os << "(v " << f.a << ')'; return;
    case FormulaKind::IsE: os << "(e " << f.a << ')'; return;
    case FormulaKind::Size: os << "(size " << f.a << ' ' << f.k << ')'; return;
    case FormulaKind::Adj:
      os << "(adj " << f.a << ' ' << f.b;
      if (f.m > 0) os << ' ' << f.m << ' ' << f.k;
      os << ')';
      return;
    case FormulaKind::Deg: os << "(deg " << f.a << ' ' << f.k << ')'; return;
  }
}

inline std::string to_sexpr(const FormulaPtr& f) {
  std::ostringstream os;
  write_sexpr(*f, os);
  return os.str();
}

namespace logic_detail {

struct Tokens {
  std::vector<std::string> toks;
  std::size_t pos = 0;
  const std::string& peek() {
    if (pos >= toks.size()) throw FormulaError("parse: unexpected end of input");
    return toks[pos];
  }
  std::string take() {
    std::string t = peek();
    ++pos;
    return t;
  }
};

inline Tokens tokenize(const std::string& text) {
  Tokens t;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      t.toks.push_back(cur);
      cur.clear();
    }
  };
  for (char c : text) {
    if (c == '(' || c == ')') {
      flush();
      t.toks.push_back(std::string(1, c));
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return t;
}

inline long long parse_int(const std::string& tok) {
  try {
    std::size_t used = 0;
    long long val = std::stoll(tok, &used);
    if (used != tok.size()) throw FormulaError("parse: expected integer, got " + tok);
    return val;
  } catch (const FormulaError&) {
    throw;
  } catch (...) {
    throw FormulaError("parse: expected integer, got " + tok);
  }
}

inline FormulaPtr parse_formula(Tokens& t) {
  if (t.take() != "(") throw FormulaError("parse: expected (");
  std::string head = t.take();
  auto var = [&] { return t.take(); };
  auto close = [&] {
    if (t.take() != ")") throw FormulaError("parse: expected ) after " + head);
  };
  if (head == "eq" || head == "in") {
    std::string x = var(), y = var();
    close();
    return head == "eq" ? f_eq(x, y) : f_in(x, y);
  }
  if (head == "not") {
    FormulaPtr kid = parse_formula(t);
    close();
    return f_not(std::move(kid));
  }
  if (head == "and" || head == "or") {
    std::vector<FormulaPtr> kids;
    while (t.peek() != ")") kids.push_back(parse_formula(t));
    close();
    return head == "and" ? f_and(std::move(kids)) : f_or(std::move(kids));
  }
  if (head == "implies") {
    FormulaPtr p = parse_formula(t);
    FormulaPtr q = parse_formula(t);
    close();
    return f_implies(std::move(p), std::move(q));
  }
  if (head == "exists" || head == "forall") {
    std::string x = var();
    FormulaPtr body = parse_formula(t);
    close();
    return head == "exists" ? f_exists(x, std::move(body)) : f_forall(x, std::move(body));
  }
  if (head == "v" || head == "e") {
    std::string x = var();
    close();
    return head == "v" ? f_is_vertex(x) : f_is_edge(x);
  }
  if (head == "size" || head == "deg") {
    std::string x = var();
    long long k = parse_int(t.take());
    close();
    return head == "size" ? f_size(x, k) : f_degree(x, k);
  }
  if (head == "adj") {
    std::string x = var(), y = var();
    if (t.peek() == ")") {
      close();
      return f_adjacent(x, y);
    }
    long long m = parse_int(t.take());
    long long k = parse_int(t.take());
    close();
    return f_adjacent(x, y, m, k);
  }
  throw FormulaError("parse: unknown head " + head);
}

}  // namespace logic_detail

inline FormulaPtr parse_sexpr(const std::string& text) {
  logic_detail::Tokens t = logic_detail::tokenize(text);
  FormulaPtr f = logic_detail::parse_formula(t);
  if (t.pos != t.toks.size()) throw FormulaError("parse: trailing content after formula");
  return f;
}

// --- exact evaluation -------------------------------------------------------

namespace logic_detail {

// Recursive model checking over the unified node domain with short-circuiting
// connectives and, at each quantifier node, memoization keyed by the values of
// the node's free variables.
struct Evaluator {
  const IncidenceGraph& g;
  std::map<const Formula*, std::vector<std::string>> free_cache;
  std::map<std::pair<const Formula*, std::vector<int>>, bool> memo;
  std::vector<std::pair<std::string, int>> env;

  explicit Evaluator(const IncidenceGraph& host) : g(host) {}

  const std::vector<std::string>& frees(const Formula& f) {
    auto it = free_cache.find(&f);
    if (it != free_cache.end()) return it->second;
    std::set<std::string> s = free_variables(f);
    return free_cache.emplace(&f, std::vector<std::string>(s.begin(), s.end())).first->second;
  }

  int lookup(const std::string& x) const {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == x) return it->second;
    throw FormulaError("evaluate: unbound variable " + x);
  }

  bool membership(int a, int b) const {
    if (a >= g.n_v() || b < g.n_v()) return false;
    return g.multiplicity(a, b - g.n_v()) > 0;
  }

  bool eval(const Formula& f) {
    switch (f.kind) {
      case FormulaKind::Eq: return lookup(f.a) == lookup(f.b);
      case FormulaKind::In: return membership(lookup(f.a), lookup(f.b));
      case FormulaKind::Not: return !eval(*f.kids[0]);
      case FormulaKind::And:
        for (const auto& kid : f.kids)
          if (!eval(*kid)) return false;
        return true;
      case FormulaKind::Or:
        for (const auto& kid : f.kids)
          if (eval(*kid)) return true;
        return false;
      case FormulaKind::Implies: return !eval(*f.kids[0]) || eval(*f.kids[1]);
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        std::vector<int> key;
        for (const std::string& x : frees(f)) key.push_back(lookup(x));
        auto memo_key = std::make_pair(&f, std::move(key));
        auto hit = memo.find(memo_key);
        if (hit != memo.end()) return hit->second;
        const bool want = f.kind == FormulaKind::Exists;
        bool result = !want;
        env.emplace_back(f.a, -1);
        for (int id = 0; id < g.n_nodes(); ++id) {
          env.back().second = id;
          if (eval(*f.kids[0]) == want) {
            result = want;
            break;
          }
        }
        env.pop_back();
        memo.emplace(std::move(memo_key), result);
        return result;
      }
      default:
        throw FormulaError("evaluate: macro survived expansion");
    }
  }
};

}  // namespace logic_detail

// Exact truth value of a sentence on a finite incidence graph, quantifying
// over all nodes of both sides. Throws FormulaError when `f` has free
// variables.
inline bool evaluate(const FormulaPtr& f, const IncidenceGraph& g) {
  std::set<std::string> frees = free_variables(*f);
  if (!frees.empty())
    throw FormulaError("evaluate: not a sentence, free variable " + *frees.begin());
  FormulaPtr core = expand_macros(f);
  logic_detail::Evaluator ev(g);
  return ev.eval(*core);
}

}  // namespace hmg
