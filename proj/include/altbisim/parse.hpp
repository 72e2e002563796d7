#pragma once

// Text formats.
//
// System files are line-oriented ('#' starts a comment; a statement may span
// lines until its braces balance):
//
//   ats M                          lats P
//   agents 2                       controls { a b }
//   obs { p1 p2 p3 }               disturbances { d }
//   metric table { p1 p2 = 1; ... }       metric chebyshev dim 2
//   state q1 obs p1                state s obs (0,0.5)
//   choice q1 agent 1 = { {q1 q2} ; {q3} }
//                                  trans s a d -> t
//
// Formulas:  !  binds tightest, then X / <<Ag>> / <eps>, then U and R
// (right-associative), then &, then |.  'true' expands to p | !p over the
// first declared observation (state/path) or to the disjunction of all
// observations (positive fragment).  In chebyshev systems, observation names
// are coordinate vectors written literally, e.g. <0.5> (0,1).

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "altbisim/agent_system.hpp"
#include "altbisim/common.hpp"
#include "altbisim/formula.hpp"
#include "altbisim/labeled_system.hpp"
#include "altbisim/metric.hpp"

namespace altbisim {

struct ParseDiagnostic {
  int line = 0, col = 0;
  std::string message;
  std::string render() const {
    return std::to_string(line) + ":" + std::to_string(col) + ": " + message;
  }
};

struct parse_error : input_error {
  ParseDiagnostic diag;
  explicit parse_error(ParseDiagnostic d)
      : input_error(d.render()), diag(std::move(d)) {}
};

[[noreturn]] inline void fail_at(int line, int col, std::string msg) {
  throw parse_error({line, col, std::move(msg)});
}

// ---- tokenizer ---------------------------------------------------------------

namespace detail {

struct Token {
  enum class Kind {
    ident, number, vec, lbrace, rbrace, lparen, rparen, semi, comma, eq,
    arrow, bang, amp, pipe, lt, gt, eof
  };
  Kind kind;
  std::string text;
  double num = 0.0;
  std::vector<double> coords;  // vec
  int line = 1, col = 1;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}
inline bool num_start(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : s_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_ws_and_comments();
      Token t;
      t.line = line_;
      t.col = col_;
      if (eof()) {
        t.kind = Token::Kind::eof;
        out.push_back(t);
        return out;
      }
      char c = peek();
      if (ident_start(c)) {
        while (!eof() && ident_char(peek())) t.text += get();
        t.kind = Token::Kind::ident;
      } else if (num_start(c) && (std::isdigit(static_cast<unsigned char>(c)) ||
                                  has_digit_after_sign())) {
        t.kind = Token::Kind::number;
        t.num = lex_number();
      } else if (c == '(') {
        // Lookahead: a parenthesis followed by a number is a coordinate
        // vector (an observation name); otherwise ordinary grouping.
        size_t save_i = i_;
        int save_l = line_, save_c = col_;
        get();
        skip_ws_and_comments();
        if (!eof() && num_start(peek()) && has_digit_after_sign()) {
          t.kind = Token::Kind::vec;
          while (true) {
            skip_ws_and_comments();
            t.coords.push_back(lex_number());
            skip_ws_and_comments();
            if (eof()) fail_at(line_, col_, "unterminated coordinate vector");
            char d = get();
            if (d == ')') break;
            if (d != ',')
              fail_at(line_, col_ - 1, "expected ',' or ')' in coordinate vector");
          }
          t.text = render_point(t.coords);
        } else {
          i_ = save_i;
          line_ = save_l;
          col_ = save_c;
          get();
          t.kind = Token::Kind::lparen;
        }
      } else {
        get();
        switch (c) {
          case ')': t.kind = Token::Kind::rparen; break;
          case '{': t.kind = Token::Kind::lbrace; break;
          case '}': t.kind = Token::Kind::rbrace; break;
          case ';': t.kind = Token::Kind::semi; break;
          case ',': t.kind = Token::Kind::comma; break;
          case '=': t.kind = Token::Kind::eq; break;
          case '!': t.kind = Token::Kind::bang; break;
          case '&': t.kind = Token::Kind::amp; break;
          case '|': t.kind = Token::Kind::pipe; break;
          case '<': t.kind = Token::Kind::lt; break;
          case '>': t.kind = Token::Kind::gt; break;
          case '-':
            if (!eof() && peek() == '>') {
              get();
              t.kind = Token::Kind::arrow;
              break;
            }
            [[fallthrough]];
          default:
            fail_at(t.line, t.col, std::string("unexpected character '") + c + "'");
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  bool eof() const { return i_ >= s_.size(); }
  char peek() const { return s_[i_]; }
  char get() {
    char c = s_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void skip_ws_and_comments() {
    while (!eof()) {
      char c = peek();
      if (c == '#') {
        while (!eof() && peek() != '\n') get();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        get();
      } else {
        return;
      }
    }
  }
  // '-'/'+'/'.' only start a number when a digit actually follows.
  bool has_digit_after_sign() const {
    size_t j = i_;
    if (j < s_.size() && (s_[j] == '-' || s_[j] == '+')) ++j;
    if (j < s_.size() && s_[j] == '.') ++j;
    return j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]));
  }
  double lex_number() {
    int l = line_, c = col_;
    std::string text;
    if (!eof() && (peek() == '-' || peek() == '+')) text += get();
    while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) ||
                      peek() == '.' || peek() == 'e' || peek() == 'E'))
      {
        char d = get();
        text += d;
        if ((d == 'e' || d == 'E') && !eof() && (peek() == '-' || peek() == '+'))
          text += get();
      }
    try {
      size_t used = 0;
      double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      fail_at(l, c, "malformed number '" + text + "'");
    }
  }

  std::string_view s_;
  size_t i_ = 0;
  int line_ = 1, col_ = 1;
};

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}
  const Token& peek(int ahead = 0) const {
    size_t j = i_ + static_cast<size_t>(ahead);
    return j < toks_.size() ? toks_[j] : toks_.back();
  }
  const Token& get() {
    const Token& t = toks_[i_];
    if (i_ + 1 < toks_.size()) ++i_;
    return t;
  }
  bool at(Token::Kind k) const { return peek().kind == k; }
  bool accept(Token::Kind k) {
    if (!at(k)) return false;
    get();
    return true;
  }
  const Token& expect(Token::Kind k, const std::string& what) {
    if (!at(k)) fail_at(peek().line, peek().col, "expected " + what);
    return get();
  }
  bool at_ident(const std::string& word) const {
    return at(Token::Kind::ident) && peek().text == word;
  }
  bool accept_ident(const std::string& word) {
    if (!at_ident(word)) return false;
    get();
    return true;
  }
  void expect_ident(const std::string& word) {
    if (!accept_ident(word))
      fail_at(peek().line, peek().col, "expected '" + word + "'");
  }

 private:
  std::vector<Token> toks_;
  size_t i_ = 0;
};

}  // namespace detail

// ---- formula parsing ----------------------------------------------------------

// Neutral parse tree, elaborated per formula kind afterwards.
namespace detail {

struct PNode;
using PNodePtr = std::shared_ptr<PNode>;

struct PNode {
  enum class K { atom, dia, truelit, neg, conj, disj, next, until, release, coalition };
  K k;
  std::string obs;
  double eps = 0.0;
  IntSet agents;
  PNodePtr a, b;
  int line = 1, col = 1;
};

inline PNodePtr pnode(PNode::K k, const Token& at) {
  auto n = std::make_shared<PNode>();
  n->k = k;
  n->line = at.line;
  n->col = at.col;
  return n;
}

class FormulaParser {
 public:
  explicit FormulaParser(TokenStream& ts) : ts_(ts) {}

  PNodePtr parse() {
    PNodePtr f = parse_or();
    if (!ts_.at(Token::Kind::eof))
      fail_at(ts_.peek().line, ts_.peek().col, "trailing input after formula");
    return f;
  }

 private:
  PNodePtr parse_or() {
    PNodePtr f = parse_and();
    while (ts_.at(Token::Kind::pipe)) {
      const Token& op = ts_.get();
      auto n = pnode(PNode::K::disj, op);
      n->a = f;
      n->b = parse_and();
      f = n;
    }
    return f;
  }

  PNodePtr parse_and() {
    PNodePtr f = parse_until();
    while (ts_.at(Token::Kind::amp)) {
      const Token& op = ts_.get();
      auto n = pnode(PNode::K::conj, op);
      n->a = f;
      n->b = parse_until();
      f = n;
    }
    return f;
  }

  PNodePtr parse_until() {  // right associative; R is release sugar
    PNodePtr f = parse_unary();
    if (ts_.at_ident("U") || ts_.at_ident("R")) {
      bool release = ts_.peek().text == "R";
      const Token& op = ts_.get();
      auto n = pnode(release ? PNode::K::release : PNode::K::until, op);
      n->a = f;
      n->b = parse_until();
      return n;
    }
    return f;
  }

  PNodePtr parse_unary() {
    const Token& t = ts_.peek();
    if (ts_.accept(Token::Kind::bang)) {
      auto n = pnode(PNode::K::neg, t);
      n->a = parse_unary();
      return n;
    }
    if (ts_.at_ident("X")) {
      ts_.get();
      auto n = pnode(PNode::K::next, t);
      n->a = parse_unary();
      return n;
    }
    if (ts_.at(Token::Kind::lt) && ts_.peek(1).kind == Token::Kind::lt) {
      ts_.get();
      ts_.get();
      auto n = pnode(PNode::K::coalition, t);
      if (!ts_.at(Token::Kind::gt)) {
        while (true) {
          const Token& num = ts_.expect(Token::Kind::number, "agent number");
          n->agents.push_back(static_cast<int>(num.num));
          if (!ts_.accept(Token::Kind::comma)) break;
        }
      }
      ts_.expect(Token::Kind::gt, "'>>'");
      ts_.expect(Token::Kind::gt, "'>>'");
      n->agents = set_sorted(std::move(n->agents));
      n->a = parse_unary();
      return n;
    }
    if (ts_.at(Token::Kind::lt)) {
      ts_.get();
      const Token& num = ts_.expect(Token::Kind::number, "epsilon value");
      ts_.expect(Token::Kind::gt, "'>'");
      auto n = pnode(PNode::K::dia, t);
      n->eps = num.num;
      n->obs = expect_obs_name();
      return n;
    }
    return parse_primary();
  }

  std::string expect_obs_name() {
    if (ts_.at(Token::Kind::ident) && !reserved(ts_.peek().text))
      return ts_.get().text;
    if (ts_.at(Token::Kind::vec)) return ts_.get().text;
    fail_at(ts_.peek().line, ts_.peek().col, "expected observation name");
  }

  static bool reserved(const std::string& w) {
    return w == "U" || w == "R" || w == "X" || w == "true";
  }

  PNodePtr parse_primary() {
    const Token& t = ts_.peek();
    if (ts_.accept(Token::Kind::lparen)) {
      PNodePtr f = parse_or();
      ts_.expect(Token::Kind::rparen, "')'");
      return f;
    }
    if (ts_.accept_ident("true")) return pnode(PNode::K::truelit, t);
    if (ts_.at(Token::Kind::ident) || ts_.at(Token::Kind::vec)) {
      auto n = pnode(PNode::K::atom, t);
      n->obs = expect_obs_name();
      return n;
    }
    fail_at(t.line, t.col, "expected a formula");
  }

  TokenStream& ts_;
};

inline bool state_compatible(const PNode& n) {
  switch (n.k) {
    case PNode::K::next:
    case PNode::K::until:
    case PNode::K::release:
      return false;
    case PNode::K::coalition:  // a coalition formula is a state formula
    case PNode::K::atom:
    case PNode::K::dia:
    case PNode::K::truelit:
      return true;
    case PNode::K::neg:
      return state_compatible(*n.a);
    default:
      return state_compatible(*n.a) && state_compatible(*n.b);
  }
}

}  // namespace detail

struct FormulaOpts {
  // Observation alphabet, used only to expand 'true'.
  std::vector<std::string> obs_names;
};

namespace detail {

inline StatePtr elab_state(const PNode& n, const FormulaOpts& o);
inline PathPtr elab_path(const PNode& n, const FormulaOpts& o);

// Negation that keeps the maximal-lifting invariant: a negated state-only
// subtree stays inside the lift, so printing and reparsing is a fixpoint.
inline PathPtr elab_path_neg(const PNode& n, const FormulaOpts& o) {
  if (state_compatible(n)) return pf::lift(sf::neg(elab_state(n, o)));
  return pf::neg(elab_path(n, o));
}

inline PathPtr elab_path(const PNode& n, const FormulaOpts& o) {
  if (state_compatible(n)) return pf::lift(elab_state(n, o));
  switch (n.k) {
    case PNode::K::neg:
      return pf::neg(elab_path(*n.a, o));
    case PNode::K::conj:
      return pf::conj(elab_path(*n.a, o), elab_path(*n.b, o));
    case PNode::K::disj:
      return pf::neg(
          pf::conj(elab_path_neg(*n.a, o), elab_path_neg(*n.b, o)));
    case PNode::K::next:
      return pf::next(elab_path(*n.a, o));
    case PNode::K::until:
      return pf::until(elab_path(*n.a, o), elab_path(*n.b, o));
    case PNode::K::release:
      return pf::neg(
          pf::until(elab_path_neg(*n.a, o), elab_path_neg(*n.b, o)));
    default:
      fail_at(n.line, n.col, "internal: unelaborable path node");
  }
}

inline StatePtr elab_state(const PNode& n, const FormulaOpts& o) {
  switch (n.k) {
    case PNode::K::atom:
      return sf::atom(n.obs);
    case PNode::K::dia:
      return sf::diamond(n.eps, n.obs);
    case PNode::K::truelit:
      if (o.obs_names.empty())
        fail_at(n.line, n.col, "'true' needs a known observation alphabet");
      return sf::truth(o.obs_names[0]);
    case PNode::K::neg:
      return sf::neg(elab_state(*n.a, o));
    case PNode::K::conj:
      return sf::conj(elab_state(*n.a, o), elab_state(*n.b, o));
    case PNode::K::disj:
      return sf::disj(elab_state(*n.a, o), elab_state(*n.b, o));
    case PNode::K::coalition:
      return sf::coalition(n.agents, elab_path(*n.a, o));
    default:
      fail_at(n.line, n.col, "temporal operator outside a coalition quantifier");
  }
}

inline LtlPtr elab_positive(const PNode& n, const FormulaOpts& o) {
  switch (n.k) {
    case PNode::K::atom:
      return lf::atom(n.obs);
    case PNode::K::dia:
      return lf::diamond(n.eps, n.obs);
    case PNode::K::truelit: {
      if (o.obs_names.empty())
        fail_at(n.line, n.col, "'true' needs a known observation alphabet");
      LtlPtr f = lf::atom(o.obs_names[0]);
      for (size_t i = 1; i < o.obs_names.size(); ++i)
        f = lf::disj(f, lf::atom(o.obs_names[i]));
      return f;
    }
    case PNode::K::conj:
      return lf::conj(elab_positive(*n.a, o), elab_positive(*n.b, o));
    case PNode::K::disj:
      return lf::disj(elab_positive(*n.a, o), elab_positive(*n.b, o));
    case PNode::K::next:
      return lf::next(elab_positive(*n.a, o));
    case PNode::K::until:
      return lf::until(elab_positive(*n.a, o), elab_positive(*n.b, o));
    case PNode::K::neg:
      fail_at(n.line, n.col, "negation not allowed in the positive fragment");
    case PNode::K::release:
      fail_at(n.line, n.col, "release not allowed in the positive fragment");
    default:
      fail_at(n.line, n.col, "coalitions not allowed in the positive fragment");
  }
}

inline PNodePtr parse_pnode(const std::string& text) {
  Lexer lex(text);
  TokenStream ts(lex.run());
  FormulaParser p(ts);
  return p.parse();
}

}  // namespace detail

inline StatePtr parse_state_formula(const std::string& text,
                                    const FormulaOpts& opts = {}) {
  return detail::elab_state(*detail::parse_pnode(text), opts);
}

inline PathPtr parse_path_formula(const std::string& text,
                                  const FormulaOpts& opts = {}) {
  return detail::elab_path(*detail::parse_pnode(text), opts);
}

inline LtlPtr parse_ltl(const std::string& text, const FormulaOpts& opts = {}) {
  return detail::elab_positive(*detail::parse_pnode(text), opts);
}

// ---- system parsing -------------------------------------------------------------

using ParsedSystem = std::variant<AgentAts, LabelAts>;

namespace detail {

class SystemParser {
 public:
  explicit SystemParser(TokenStream& ts) : ts_(ts) {}

  ParsedSystem parse() {
    const Token& head = ts_.peek();
    if (ts_.accept_ident("ats")) return parse_agent();
    if (ts_.accept_ident("lats")) return parse_labeled();
    fail_at(head.line, head.col, "file must start with 'ats NAME' or 'lats NAME'");
  }

 private:
  // shared pieces ------------------------------------------------------------
  std::string expect_name(const std::string& what) {
    if (ts_.at(Token::Kind::ident)) return ts_.get().text;
    fail_at(ts_.peek().line, ts_.peek().col, "expected " + what);
  }

  std::vector<std::string> parse_name_block() {
    std::vector<std::string> out;
    ts_.expect(Token::Kind::lbrace, "'{'");
    while (!ts_.accept(Token::Kind::rbrace)) {
      if (ts_.at(Token::Kind::ident))
        out.push_back(ts_.get().text);
      else if (ts_.at(Token::Kind::vec))
        out.push_back(ts_.get().text);
      else
        fail_at(ts_.peek().line, ts_.peek().col, "expected name or '}'");
      ts_.accept(Token::Kind::comma);
    }
    return out;
  }

  // metric table { p q = d ; ... } or metric chebyshev dim N
  void parse_metric() {
    if (ts_.accept_ident("table")) {
      metric_mode_ = Mode::table;
      ts_.expect(Token::Kind::lbrace, "'{'");
      while (!ts_.accept(Token::Kind::rbrace)) {
        const Token& at = ts_.peek();
        std::string a = expect_name("observation name");
        std::string b = expect_name("observation name");
        ts_.expect(Token::Kind::eq, "'='");
        const Token& num = ts_.expect(Token::Kind::number, "distance value");
        if (!table_entries_.insert({{a, b}, num.num}).second)
          fail_at(at.line, at.col, "duplicate metric entry " + a + " " + b);
        ts_.accept(Token::Kind::semi);
      }
    } else if (ts_.accept_ident("chebyshev")) {
      metric_mode_ = Mode::chebyshev;
      ts_.expect_ident("dim");
      const Token& num = ts_.expect(Token::Kind::number, "dimension");
      cheb_dim_ = static_cast<int>(num.num);
      if (cheb_dim_ < 1)
        fail_at(num.line, num.col, "dimension must be positive");
    } else {
      fail_at(ts_.peek().line, ts_.peek().col, "expected 'table' or 'chebyshev'");
    }
  }

  // Register an observation usage; in chebyshev mode undeclared points are
  // collected in first-use order unless an obs block pinned them.
  int obs_index(const Token& tok) {
    std::string name;
    std::vector<double> coords;
    if (tok.kind == Token::Kind::vec) {
      name = tok.text;
      coords = tok.coords;
    } else {
      name = tok.text;
    }
    for (size_t i = 0; i < obs_names_.size(); ++i)
      if (obs_names_[i] == name) return static_cast<int>(i);
    if (metric_mode_ == Mode::chebyshev && !obs_pinned_) {
      if (tok.kind != Token::Kind::vec)
        fail_at(tok.line, tok.col, "chebyshev observations are coordinate vectors");
      obs_names_.push_back(name);
      obs_coords_.push_back(coords);
      return static_cast<int>(obs_names_.size()) - 1;
    }
    fail_at(tok.line, tok.col, "unknown observation '" + name + "'");
  }

  MetricObsSpace build_space() {
    if (metric_mode_ == Mode::unset) fail_at(1, 1, "missing metric declaration");
    if (metric_mode_ == Mode::table) {
      if (obs_names_.empty())
        fail_at(1, 1, "table metric requires an obs { ... } declaration");
      return make_table_space(obs_names_, table_entries_);
    }
    if (obs_names_.size() != obs_coords_.size())
      fail_at(1, 1, "chebyshev observations must be coordinate vectors");
    return make_chebyshev_space(cheb_dim_, obs_coords_);
  }

  // Observations must be known before states can reference them.
  void require_obs_ready(const Token& at) {
    if (metric_mode_ == Mode::unset)
      fail_at(at.line, at.col, "declare the metric before states");
    if (metric_mode_ == Mode::table && !obs_pinned_)
      fail_at(at.line, at.col, "declare obs { ... } before states");
  }

  const Token& expect_obs_token() {
    if (ts_.at(Token::Kind::ident) || ts_.at(Token::Kind::vec)) return ts_.get();
    fail_at(ts_.peek().line, ts_.peek().col, "expected observation");
  }

  void parse_obs_block(const Token& at) {
    if (obs_pinned_)
      fail_at(at.line, at.col, "duplicate obs declaration");
    ts_.expect(Token::Kind::lbrace, "'{'");
    while (!ts_.accept(Token::Kind::rbrace)) {
      if (ts_.at(Token::Kind::ident)) {
        const Token& t = ts_.get();
        obs_names_.push_back(t.text);
      } else if (ts_.at(Token::Kind::vec)) {
        const Token& t = ts_.get();
        obs_names_.push_back(t.text);
        obs_coords_.push_back(t.coords);
      } else {
        fail_at(ts_.peek().line, ts_.peek().col, "expected observation or '}'");
      }
      ts_.accept(Token::Kind::comma);
    }
    obs_pinned_ = true;
  }

  // agent systems --------------------------------------------------------------
  ParsedSystem parse_agent() {
    AgentAts T;
    T.name = expect_name("system name");
    std::map<std::string, int> state_ix;
    // (state, agent) -> menu, collected then placed
    std::map<std::pair<int, int>, std::vector<IntSet>> menus;
    struct PendingChoice {
      int line, col;
      std::string state;
      int agent;
      std::vector<std::vector<std::string>> sets;
    };
    std::vector<PendingChoice> pending;

    while (!ts_.at(Token::Kind::eof)) {
      const Token& head = ts_.peek();
      if (ts_.accept_ident("agents")) {
        const Token& num = ts_.expect(Token::Kind::number, "agent count");
        T.agent_count = static_cast<int>(num.num);
        if (T.agent_count < 1) fail_at(num.line, num.col, "agent count must be >= 1");
      } else if (ts_.accept_ident("obs")) {
        parse_obs_block(head);
      } else if (ts_.accept_ident("metric")) {
        parse_metric();
      } else if (ts_.accept_ident("state")) {
        require_obs_ready(head);
        std::string sname = expect_name("state name");
        if (state_ix.count(sname))
          fail_at(head.line, head.col, "duplicate state '" + sname + "'");
        ts_.expect_ident("obs");
        const Token& obst = expect_obs_token();
        state_ix[sname] = static_cast<int>(T.state_names.size());
        T.state_names.push_back(sname);
        T.obs_of.push_back(obs_index(obst));
      } else if (ts_.accept_ident("choice")) {
        PendingChoice pc;
        pc.line = head.line;
        pc.col = head.col;
        pc.state = expect_name("state name");
        ts_.expect_ident("agent");
        const Token& num = ts_.expect(Token::Kind::number, "agent number");
        pc.agent = static_cast<int>(num.num);
        ts_.expect(Token::Kind::eq, "'='");
        ts_.expect(Token::Kind::lbrace, "'{'");
        while (!ts_.accept(Token::Kind::rbrace)) {
          ts_.expect(Token::Kind::lbrace, "'{'");
          std::vector<std::string> states;
          while (!ts_.accept(Token::Kind::rbrace)) {
            states.push_back(expect_name("state name"));
            ts_.accept(Token::Kind::comma);
          }
          pc.sets.push_back(std::move(states));
          ts_.accept(Token::Kind::semi);
        }
        pending.push_back(std::move(pc));
      } else {
        fail_at(head.line, head.col, "unknown directive '" + head.text + "'");
      }
    }

    T.obs = build_space();
    if (T.agent_count == 0) fail_at(1, 1, "missing 'agents' declaration");
    T.choices.assign(T.state_names.size(),
                     std::vector<std::vector<IntSet>>(
                         static_cast<size_t>(T.agent_count)));
    for (const PendingChoice& pc : pending) {
      auto it = state_ix.find(pc.state);
      if (it == state_ix.end())
        fail_at(pc.line, pc.col, "choice for unknown state '" + pc.state + "'");
      if (pc.agent < 1 || pc.agent > T.agent_count)
        fail_at(pc.line, pc.col, "choice for unknown agent " + std::to_string(pc.agent));
      auto& menu = T.choices[static_cast<size_t>(it->second)]
                            [static_cast<size_t>(pc.agent - 1)];
      for (const auto& set_names : pc.sets) {
        IntSet s;
        for (const std::string& sn : set_names) {
          auto sit = state_ix.find(sn);
          if (sit == state_ix.end())
            fail_at(pc.line, pc.col, "choice set names unknown state '" + sn + "'");
          s.push_back(sit->second);
        }
        menu.push_back(set_sorted(std::move(s)));
      }
    }
    return T;
  }

  // labeled systems -------------------------------------------------------------
  ParsedSystem parse_labeled() {
    LabelAts T;
    T.name = expect_name("system name");
    std::map<std::string, int> state_ix;
    struct PendingTrans {
      int line, col;
      std::string q, a, b, to;
    };
    std::vector<PendingTrans> pending;

    while (!ts_.at(Token::Kind::eof)) {
      const Token& head = ts_.peek();
      if (ts_.accept_ident("controls")) {
        T.control_names = parse_name_block();
      } else if (ts_.accept_ident("disturbances")) {
        T.disturbance_names = parse_name_block();
      } else if (ts_.accept_ident("obs")) {
        parse_obs_block(head);
      } else if (ts_.accept_ident("metric")) {
        parse_metric();
      } else if (ts_.accept_ident("state")) {
        require_obs_ready(head);
        std::string sname = expect_name("state name");
        if (state_ix.count(sname))
          fail_at(head.line, head.col, "duplicate state '" + sname + "'");
        ts_.expect_ident("obs");
        const Token& obst = expect_obs_token();
        state_ix[sname] = static_cast<int>(T.state_names.size());
        T.state_names.push_back(sname);
        T.obs_of.push_back(obs_index(obst));
      } else if (ts_.accept_ident("trans")) {
        PendingTrans pt;
        pt.line = head.line;
        pt.col = head.col;
        pt.q = expect_name("state name");
        pt.a = expect_name("control name");
        pt.b = expect_name("disturbance name");
        ts_.expect(Token::Kind::arrow, "'->'");
        pt.to = expect_name("state name");
        pending.push_back(std::move(pt));
      } else {
        fail_at(head.line, head.col, "unknown directive '" + head.text + "'");
      }
    }

    T.obs = build_space();
    T.succ.assign(T.state_names.size(),
                  std::vector<std::vector<IntSet>>(
                      static_cast<size_t>(T.control_count()),
                      std::vector<IntSet>(static_cast<size_t>(T.disturbance_count()))));
    for (const PendingTrans& pt : pending) {
      auto q = state_ix.find(pt.q);
      auto to = state_ix.find(pt.to);
      int a = T.control_index(pt.a);
      int b = T.disturbance_index(pt.b);
      if (q == state_ix.end())
        fail_at(pt.line, pt.col, "transition from unknown state '" + pt.q + "'");
      if (to == state_ix.end())
        fail_at(pt.line, pt.col, "transition to unknown state '" + pt.to + "'");
      if (a < 0) fail_at(pt.line, pt.col, "unknown control '" + pt.a + "'");
      if (b < 0) fail_at(pt.line, pt.col, "unknown disturbance '" + pt.b + "'");
      auto& ss = T.succ[static_cast<size_t>(q->second)][static_cast<size_t>(a)]
                       [static_cast<size_t>(b)];
      ss = set_sorted([&] {
        auto v = ss;
        v.push_back(to->second);
        return v;
      }());
    }
    return T;
  }

  enum class Mode { unset, table, chebyshev };

  TokenStream& ts_;
  Mode metric_mode_ = Mode::unset;
  std::map<std::pair<std::string, std::string>, double> table_entries_;
  int cheb_dim_ = 0;
  bool obs_pinned_ = false;
  std::vector<std::string> obs_names_;
  std::vector<std::vector<double>> obs_coords_;
};

}  // namespace detail

// Parses a system file; throws parse_error with position info on bad input.
// Well-formedness (validate) is the caller's business: violations are data.
inline ParsedSystem parse_system(const std::string& text) {
  detail::Lexer lex(text);
  detail::TokenStream ts(lex.run());
  detail::SystemParser p(ts);
  return p.parse();
}

// ---- DSL emission (round-trips through parse_system) ---------------------------

inline std::string metric_dsl(const MetricObsSpace& sp) {
  std::string out;
  if (sp.kind == MetricObsSpace::Kind::chebyshev) {
    out += "metric chebyshev dim " + std::to_string(sp.dim) + "\n";
    out += "obs { " + join(sp.names, " ") + " }\n";
    return out;
  }
  out += "obs { " + join(sp.names, " ") + " }\n";
  out += "metric table {";
  bool first = true;
  for (int i = 0; i < sp.size(); ++i)
    for (int j = i + 1; j < sp.size(); ++j) {
      out += first ? " " : "; ";
      first = false;
      out += sp.names[static_cast<size_t>(i)] + " " + sp.names[static_cast<size_t>(j)] +
             " = " + fmt_double(sp.distance(i, j));
    }
  out += " }\n";
  return out;
}

inline std::string to_dsl(const AgentAts& T) {
  std::string out = "ats " + (T.name.empty() ? std::string("M") : T.name) + "\n";
  out += "agents " + std::to_string(T.agent_count) + "\n";
  out += metric_dsl(T.obs);
  for (int q = 0; q < T.state_count(); ++q)
    out += "state " + T.state_names[static_cast<size_t>(q)] + " obs " +
           T.obs_name(q) + "\n";
  for (int q = 0; q < T.state_count(); ++q)
    for (int i = 1; i <= T.agent_count; ++i) {
      out += "choice " + T.state_names[static_cast<size_t>(q)] + " agent " +
             std::to_string(i) + " = {";
      const auto& menu = T.menu(q, i);
      for (size_t c = 0; c < menu.size(); ++c) {
        out += c ? "; {" : " {";
        std::vector<std::string> names;
        for (int v : menu[c]) names.push_back(T.state_names[static_cast<size_t>(v)]);
        out += join(names, " ") + "}";
      }
      out += " }\n";
    }
  return out;
}

inline std::string to_dsl(const LabelAts& T) {
  std::string out = "lats " + (T.name.empty() ? std::string("P") : T.name) + "\n";
  out += "controls { " + join(T.control_names, " ") + " }\n";
  out += "disturbances { " + join(T.disturbance_names, " ") + " }\n";
  out += metric_dsl(T.obs);
  for (int q = 0; q < T.state_count(); ++q)
    out += "state " + T.state_names[static_cast<size_t>(q)] + " obs " +
           T.obs_name(q) + "\n";
  for (int q = 0; q < T.state_count(); ++q)
    for (int a = 0; a < T.control_count(); ++a)
      for (int b = 0; b < T.disturbance_count(); ++b)
        for (int v : T.successors(q, a, b))
          out += "trans " + T.state_names[static_cast<size_t>(q)] + " " +
                 T.control_names[static_cast<size_t>(a)] + " " +
                 T.disturbance_names[static_cast<size_t>(b)] + " -> " +
                 T.state_names[static_cast<size_t>(v)] + "\n";
  return out;
}

}  // namespace altbisim
