#include "occ/parse.hpp"

#include <cctype>
#include <set>

namespace occ {

namespace {

enum class Tok {
  Ident,
  Number,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Colon,
  Star,
  Arrow,
  Caret,
  Equals,
  Lambda,
  Sup0,
  Sup1,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourceLocation loc;
};

// Multi-byte symbols recognised by the lexer.
struct Symbol {
  std::string_view utf8;
  Tok kind;
};
constexpr Symbol kSymbols[] = {
    {"λ", Tok::Lambda}, {"→", Tok::Arrow}, {"⁰", Tok::Sup0}, {"¹", Tok::Sup1}, {"->", Tok::Arrow},
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      SourceLocation loc{line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", loc});
        return out;
      }
      if (auto s = symbol()) {
        advance(s->utf8.size());
        out.push_back({s->kind, std::string(s->utf8), loc});
        continue;
      }
      unsigned char ch = static_cast<unsigned char>(src_[pos_]);
      if (std::isdigit(ch)) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance(1);
        out.push_back({Tok::Number, std::string(src_.substr(start, pos_ - start)), loc});
        continue;
      }
      if (ident_start(ch)) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && !symbol() && ident_char(static_cast<unsigned char>(src_[pos_]))) advance(1);
        out.push_back({Tok::Ident, std::string(src_.substr(start, pos_ - start)), loc});
        continue;
      }
      Tok k;
      switch (ch) {
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        case '[': k = Tok::LBracket; break;
        case ']': k = Tok::RBracket; break;
        case ',': k = Tok::Comma; break;
        case ':': k = Tok::Colon; break;
        case '*': k = Tok::Star; break;
        case '^': k = Tok::Caret; break;
        case '=': k = Tok::Equals; break;
        case '\\': k = Tok::Lambda; break;
        default:
          throw Error(ErrorKind::SyntaxError, "unexpected character '" + std::string(1, src_[pos_]) + "'", loc);
      }
      advance(1);
      out.push_back({k, std::string(1, static_cast<char>(ch)), loc});
    }
  }

 private:
  static bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
  static bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '\'' || c >= 0x80; }

  const Symbol* symbol() const {
    for (const auto& s : kSymbols) {
      if (src_.substr(pos_, s.utf8.size()) == s.utf8) return &s;
    }
    return nullptr;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        break;
      }
    }
  }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i, ++pos_) {
      unsigned char c = static_cast<unsigned char>(src_[pos_]);
      if (c == '\n') {
        ++line_;
        col_ = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++col_;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool keyword(const std::string& s) { return s == "let" || s == "in" || s == "fix" || s == "pi1" || s == "pi2"; }

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Term program() {
    Term t = expr();
    expect(Tok::End, "end of input");
    return t;
  }

  Type whole_type() {
    Type t = type();
    expect(Tok::End, "end of input");
    return t;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(std::string_view w) const { return at(Tok::Ident) && peek().text == w; }

  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void error(const std::string& what) const {
    std::string found = at(Tok::End) ? "end of input" : "'" + peek().text + "'";
    throw Error(ErrorKind::SyntaxError, "expected " + what + ", found " + found, peek().loc);
  }

  Token expect(Tok k, const std::string& what) {
    if (!at(k)) error(what);
    return take();
  }

  void expect_word(std::string_view w) {
    if (!at_word(w)) error("'" + std::string(w) + "'");
    take();
  }

  std::string ident(const std::string& what) {
    if (!at(Tok::Ident) || keyword(peek().text)) error(what);
    return take().text;
  }

  // ---- types ----

  Type type() {
    Type t = prim_type();
    while (at(Tok::Star)) {
      take();
      t = Type::product(t, prim_type());
    }
    return t;
  }

  Type prim_type() {
    if (at(Tok::LParen)) {
      take();
      Type t = type();
      expect(Tok::RParen, "')'");
      return t;
    }
    if (at(Tok::LBracket)) return closure_type();
    return Type::atom(ident("a type"));
  }

  Dep dep() {
    if (at(Tok::Sup0) || at(Tok::Sup1)) return take().kind == Tok::Sup1 ? Dep::One : Dep::Zero;
    if (!at(Tok::Caret)) return Dep::Zero;
    take();
    Token n = expect(Tok::Number, "0 or 1 after '^'");
    if (n.text != "0" && n.text != "1") throw Error(ErrorKind::SyntaxError, "annotation must be 0 or 1", n.loc);
    return n.text == "1" ? Dep::One : Dep::Zero;
  }

  Type closure_type() {
    expect(Tok::LBracket, "'['");
    Context c;
    DepVector d;
    if (!at(Tok::RBracket)) {
      for (;;) {
        std::string n = ident("a variable");
        expect(Tok::Colon, "':'");
        Type t = type();
        c.push_back(n, t);
        d.push_back(n, dep());
        if (!at(Tok::Comma)) break;
        take();
      }
    }
    expect(Tok::RBracket, "']'");
    expect(Tok::LParen, "'('");
    ClosureData data;
    data.param = ident("a parameter");
    expect(Tok::Colon, "':'");
    data.param_type = type();
    data.param_dep = dep();
    expect(Tok::RParen, "')'");
    expect(Tok::Arrow, "'->'");
    data.result = type();
    data.captured = AnnotatedContext(std::move(c), std::move(d));
    return Type::closure(std::move(data));
  }

  // ---- terms ----

  bool starts_binder() const { return at(Tok::Lambda) || at_word("let") || at_word("fix"); }

  bool starts_prefix() const {
    if (at(Tok::LParen)) return true;
    return at(Tok::Ident) && (peek().text == "pi1" || peek().text == "pi2" || !keyword(peek().text));
  }

  Term expr() {
    if (starts_binder()) return binder();
    Term t = prefix();
    while (starts_prefix() || starts_binder()) {
      SourceLocation loc = peek().loc;
      if (starts_binder()) return Term::app(t, binder(), loc);
      t = Term::app(t, prefix(), loc);
    }
    return t;
  }

  Term binder() {
    SourceLocation loc = peek().loc;
    if (at(Tok::Lambda)) {
      take();
      expect(Tok::LParen, "'(' after lambda");
      std::string x = ident("a parameter");
      expect(Tok::Colon, "':'");
      Type t = type();
      expect(Tok::RParen, "')'");
      return Term::lam(x, t, expr(), loc);
    }
    if (at_word("fix")) {
      take();
      std::string f = ident("a function name");
      expect(Tok::LParen, "'('");
      std::string x = ident("a parameter");
      expect(Tok::Colon, "':'");
      Type t = type();
      expect(Tok::RParen, "')'");
      expect(Tok::Colon, "':'");
      Type r = type();
      expect(Tok::Equals, "'='");
      return Term::fix(f, x, t, r, expr(), loc);
    }
    expect_word("let");
    std::string x = ident("a variable");
    expect(Tok::Equals, "'='");
    Term d = expr();
    expect_word("in");
    return Term::let(x, d, expr(), loc);
  }

  Term prefix() {
    SourceLocation loc = peek().loc;
    if (at_word("pi1") || at_word("pi2")) {
      int i = take().text == "pi1" ? 1 : 2;
      return Term::proj(i, prefix(), loc);
    }
    if (at(Tok::LParen)) {
      take();
      Term a = expr();
      if (at(Tok::Comma)) {
        take();
        Term b = expr();
        expect(Tok::RParen, "')'");
        return Term::pair(a, b, loc);
      }
      expect(Tok::RParen, "')' or ','");
      return a;
    }
    return Term::var(ident("an expression"), loc);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---- binder renaming ----

void collect_names(const Type& t, std::set<std::string>& out) {
  switch (t.kind()) {
    case Type::Kind::Atom:
      return;
    case Type::Kind::Product:
      collect_names(t.left(), out);
      collect_names(t.right(), out);
      return;
    case Type::Kind::Closure: {
      const auto& c = t.closure();
      for (const auto& b : c.captured.context) {
        out.insert(b.name);
        collect_names(b.type, out);
      }
      out.insert(c.param);
      collect_names(c.param_type, out);
      collect_names(c.result, out);
      return;
    }
  }
}

void collect_names(const Term& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case Term::Kind::Var:
      out.insert(e.name());
      return;
    case Term::Kind::Pair:
    case Term::Kind::App:
      collect_names(e.first(), out);
      collect_names(e.second(), out);
      return;
    case Term::Kind::Proj:
      collect_names(e.first(), out);
      return;
    case Term::Kind::Let:
      out.insert(e.name());
      collect_names(e.first(), out);
      collect_names(e.second(), out);
      return;
    case Term::Kind::Fix:
      out.insert(e.fname());
      collect_names(e.result_type(), out);
      [[fallthrough]];
    case Term::Kind::Lam:
      out.insert(e.name());
      collect_names(e.param_type(), out);
      collect_names(e.body(), out);
      return;
  }
}

class Renamer {
 public:
  Renamer(std::set<std::string> taken, std::set<std::string> all) : taken_(std::move(taken)), all_(std::move(all)) {}

  Term run(const Term& e) { return go(e); }
  std::vector<std::pair<std::string, std::string>> renamed;

 private:
  struct Frame {
    std::string original;
    std::string current;
  };

  std::string bind(const std::string& n) {
    bool clash = taken_.count(n) > 0;
    for (const auto& f : scope_) clash = clash || f.current == n;
    std::string out = n;
    if (clash) {
      for (int k = 1;; ++k) {
        out = std::string(base_name(n)) + "'" + std::to_string(k);
        if (!all_.count(out)) break;
      }
      all_.insert(out);
      renamed.emplace_back(n, out);
    }
    scope_.push_back({n, out});
    return out;
  }

  const std::string& lookup(const std::string& n) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->original == n) return it->current;
    }
    return n;
  }

  Type fix_type(const Type& t) const {
    Type out = t;
    std::set<std::string> seen;
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (!seen.insert(it->original).second) continue;
      if (it->original != it->current) out = rename_free(out, it->original, it->current);
    }
    return out;
  }

  Term go(const Term& e) {
    const SourceLocation& loc = e.loc();
    switch (e.kind()) {
      case Term::Kind::Var:
        return Term::var(lookup(e.name()), loc);
      case Term::Kind::Pair:
        return Term::pair(go(e.first()), go(e.second()), loc);
      case Term::Kind::App:
        return Term::app(go(e.first()), go(e.second()), loc);
      case Term::Kind::Proj:
        return Term::proj(e.index(), go(e.first()), loc);
      case Term::Kind::Let: {
        Term d = go(e.first());
        std::string x = bind(e.name());
        Term b = go(e.second());
        scope_.pop_back();
        return Term::let(x, d, b, loc);
      }
      case Term::Kind::Lam: {
        Type t = fix_type(e.param_type());
        std::string x = bind(e.name());
        Term b = go(e.body());
        scope_.pop_back();
        return Term::lam(x, t, b, loc);
      }
      case Term::Kind::Fix: {
        Type t = fix_type(e.param_type());
        std::string f = bind(e.fname());
        std::string x = bind(e.name());
        Type r = fix_type(e.result_type());
        Term b = go(e.body());
        scope_.pop_back();
        scope_.pop_back();
        return Term::fix(f, x, t, r, b, loc);
      }
    }
    return e;
  }

  std::set<std::string> taken_;
  std::set<std::string> all_;
  std::vector<Frame> scope_;
};

}  // namespace

Term parse_term(std::string_view src) { return Parser(Lexer(src).run()).program(); }

Type parse_type(std::string_view src) { return Parser(Lexer(src).run()).whole_type(); }

ParsedProgram parse_program(std::string_view src) {
  ParsedProgram p;
  p.source = std::string(src);
  Term raw = parse_term(src);
  p.free = free_variables(raw);
  std::set<std::string> all;
  collect_names(raw, all);
  Renamer r(std::set<std::string>(p.free.begin(), p.free.end()), std::move(all));
  p.term = r.run(raw);
  p.renamed = std::move(r.renamed);
  return p;
}

}  // namespace occ
