#include "updatepi/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

namespace updatepi {

namespace {

std::string describe(const SourceSpan& s, const std::string& message) {
  return s.file + ":" + std::to_string(s.startLine) + ":" +
         std::to_string(s.startCol) + ": " + message;
}

}  // namespace

ParseError::ParseError(Kind kind, SourceSpan span, std::string message,
                       std::set<std::string> expected)
    : std::runtime_error(describe(span, message)),
      kind_(kind),
      span_(std::move(span)),
      expected_(std::move(expected)) {}

namespace {

enum class Tok { Ident, Var, Number, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line, col, endLine, endCol;
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& file)
      : text_(text), file_(file) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip();
      std::size_t line = line_, col = col_;
      if (i_ >= text_.size()) {
        out.push_back({Tok::End, "", line, col, line, col});
        return out;
      }
      char c = text_[i_];
      Tok kind;
      std::string lexeme;
      if (std::islower(static_cast<unsigned char>(c)) ||
          std::isupper(static_cast<unsigned char>(c))) {
        kind = std::islower(static_cast<unsigned char>(c)) ? Tok::Ident
                                                            : Tok::Var;
        while (i_ < text_.size() && ident_char(text_[i_])) lexeme += take();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        kind = Tok::Number;
        while (i_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[i_]))) {
          lexeme += take();
        }
      } else if (std::string_view("|;.,(){}[]!?>*#@").find(c) !=
                 std::string_view::npos) {
        kind = Tok::Punct;
        lexeme += take();
      } else {
        SourceSpan s{file_, line, col, line, col + 1};
        std::string shown = std::isprint(static_cast<unsigned char>(c))
                                ? std::string(1, c)
                                : "byte " + std::to_string(
                                                static_cast<unsigned char>(c));
        throw ParseError(ParseError::Kind::Syntax, s,
                         "unexpected character '" + shown + "'");
      }
      out.push_back({kind, lexeme, line, col, line_, col_});
    }
  }

 private:
  std::string_view text_;
  const std::string& file_;
  std::size_t i_ = 0, line_ = 1, col_ = 1;

  char take() {
    char c = text_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip() {
    while (i_ < text_.size()) {
      char c = text_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else if (c == '-' && i_ + 1 < text_.size() && text_[i_ + 1] == '-') {
        while (i_ < text_.size() && text_[i_] != '\n') take();
      } else {
        return;
      }
    }
  }
};

class Parser {
 public:
  Parser(std::vector<Token> toks, const ParseOptions& opts)
      : toks_(std::move(toks)), opts_(opts) {}

  Process top() {
    Process p = par_expr();
    if (peek().kind != Tok::End) fail({"'|'", "';'", "end of input"});
    return p;
  }

  Name lone_name() {
    Name n = name(false);
    if (peek().kind != Tok::End) fail({"end of input"});
    return n;
  }

 private:
  std::vector<Token> toks_;
  const ParseOptions& opts_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;
  std::vector<ProcessVar> scope_;

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > p.opts_.maxDepth) {
        throw ParseError(ParseError::Kind::Syntax, p.span(p.peek()),
                         "nesting too deep");
      }
    }
    ~DepthGuard() { --p.depth_; }
  };

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is(const char* punct, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::Punct && t.text == punct;
  }
  bool keyword(const char* kw, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::Ident && t.text == kw;
  }

  SourceSpan span(const Token& t) const {
    return {opts_.file, t.line, t.col, t.endLine, t.endCol};
  }
  SourceSpan span(const Token& from, const Token& to) const {
    return {opts_.file, from.line, from.col, to.endLine, to.endCol};
  }

  [[noreturn]] void fail(std::set<std::string> expected) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    std::string list;
    for (const auto& e : expected) {
      if (!list.empty()) list += ", ";
      list += e;
    }
    throw ParseError(ParseError::Kind::Syntax, span(t),
                     "expected " + list + ", found " + found,
                     std::move(expected));
  }

  void expect(const char* punct) {
    if (!is(punct)) fail({std::string("'") + punct + "'"});
    next();
  }

  template <class F>
  Process build(const Token& from, F&& make) {
    try {
      return make();
    } catch (const std::invalid_argument& e) {
      throw ParseError(ParseError::Kind::Syntax, span(from, toks_[pos_ ? pos_ - 1 : 0]),
                       e.what());
    }
  }

  Name name(bool binder) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || t.text == "new" || t.text == "up") {
      fail({"name"});
    }
    next();
    std::optional<std::uint32_t> version;
    if (is("@")) {
      if (binder) {
        throw ParseError(ParseError::Kind::Syntax, span(peek()),
                         "binder '" + t.text + "' cannot carry a version");
      }
      next();
      const Token& v = peek();
      if (v.kind != Tok::Number) fail({"version number"});
      next();
      if (v.text.size() > 10 ||
          std::stoull(v.text) > std::numeric_limits<std::uint32_t>::max()) {
        throw ParseError(ParseError::Kind::Syntax, span(v),
                         "version number too large");
      }
      version = static_cast<std::uint32_t>(std::stoul(v.text));
    }
    return Name(t.text, version);
  }

  ProcessVar variable() {
    const Token& t = peek();
    if (t.kind != Tok::Var) fail({"process variable"});
    next();
    return ProcessVar(t.text);
  }

  Process par_expr() {
    DepthGuard g(*this);
    Process p = seq_expr();
    while (is("|")) {
      next();
      Process q = seq_expr();
      p = par(std::move(p), std::move(q));
    }
    return p;
  }

  Process seq_expr() {
    DepthGuard g(*this);
    Process p = unary();
    while (is(";")) {
      next();
      Process q = unary();
      p = seq(std::move(p), std::move(q));
    }
    return p;
  }

  InputMode mode() {
    if (is(">")) {
      next();
      return InputMode::Once;
    }
    if (is("*")) {
      next();
      return InputMode::Replicated;
    }
    fail({"'>'", "'*'"});
  }

  Process unary() {
    DepthGuard g(*this);
    const Token& start = peek();
    if (keyword("new")) {
      next();
      Name b = name(true);
      expect(".");
      Process body = unary();
      return build(start, [&] { return restrict(b, body); });
    }
    if (keyword("up") && is("?", 1)) {
      next();
      next();
      expect("(");
      Name l = name(false);
      expect(",");
      ProcessVar x = variable();
      expect(")");
      expect("#");
      expect("{");
      scope_.push_back(x);
      Process log = par_expr();
      expect("}");
      expect("*");
      Process body = unary();
      scope_.pop_back();
      return build(start, [&] { return upd_recv(l, x, log, body); });
    }
    if (keyword("up")) return atom();
    if (start.kind == Tok::Ident) {
      std::size_t save = pos_;
      Name subject = name(false);
      if (!is("?")) {
        pos_ = save;
        return atom();
      }
      next();
      // a?(X) is accepted as a spelling of a?{X}
      bool var_in_parens = is("(") && peek(1).kind == Tok::Var;
      if (is("(") && !var_in_parens) {
        next();
        std::vector<Name> bs{name(true)};
        while (is(",")) {
          next();
          bs.push_back(name(true));
        }
        expect(")");
        InputMode m = mode();
        Process body = unary();
        return build(start, [&] {
          return input(NamePattern{subject, bs}, m, body);
        });
      }
      bool proc = is("{") || var_in_parens;
      if (!proc && !is("[")) fail({"'('", "'{'", "'['"});
      const std::string close = is("{") ? "}" : is("(") ? ")" : "]";
      next();
      ProcessVar x = variable();
      expect(close.c_str());
      InputMode m = mode();
      scope_.push_back(x);
      Process body = unary();
      scope_.pop_back();
      return build(start, [&] {
        return proc ? input(ProcPattern{subject, x}, m, body)
                    : input(LocPattern{subject, x}, m, body);
      });
    }
    return atom();
  }

  Process atom() {
    DepthGuard g(*this);
    const Token& start = peek();
    if (start.kind == Tok::Number) {
      if (start.text != "0") fail({"'0'", "process"});
      next();
      return nil();
    }
    if (start.kind == Tok::Var) {
      ProcessVar x = variable();
      if (opts_.closed &&
          std::find(scope_.begin(), scope_.end(), x) == scope_.end()) {
        throw ParseError(ParseError::Kind::Scope, span(start),
                         "unbound process variable '" + x.ident + "'");
      }
      return var(x);
    }
    if (is("(")) {
      next();
      Process p = par_expr();
      expect(")");
      return p;
    }
    if (is("[")) {
      next();
      expect("[");
      Process p = par_expr();
      expect("]");
      expect("]");
      return blocked(p);
    }
    if (keyword("up")) {
      next();
      expect("!");
      expect("(");
      Name l = name(false);
      expect(")");
      expect("{");
      Process p = par_expr();
      expect("}");
      return build(start, [&] { return upd_prov(l, p); });
    }
    if (start.kind == Tok::Ident && start.text != "new") {
      Name subject = name(false);
      if (is("[")) {
        next();
        Process p = par_expr();
        expect("]");
        return build(start, [&] { return loc(subject, p); });
      }
      if (!is("!")) fail({"'['", "'!'", "'?'"});
      next();
      if (is("(")) {
        next();
        std::vector<Name> ps{name(false)};
        while (is(",")) {
          next();
          ps.push_back(name(false));
        }
        expect(")");
        return build(start, [&] { return out_name(subject, ps); });
      }
      expect("{");
      Process p = par_expr();
      expect("}");
      return build(start, [&] { return out_proc(subject, p); });
    }
    fail({"process"});
  }
};

// Precedence levels: 0 parallel, 1 sequence, 2 prefix, 3 atom.
class Printer {
 public:
  std::string out;

  void emit(const Process& p, int ctx) {
    switch (p.kind()) {
      case Kind::Nil:
        out += '0';
        return;
      case Kind::Var:
        out += p.as<node::Var>().var.ident;
        return;
      case Kind::Par: {
        const auto& n = p.as<node::Par>();
        open(ctx > 0);
        emit(n.left, 0);
        out += " | ";
        emit(n.right, 1);
        close(ctx > 0);
        return;
      }
      case Kind::Seq: {
        const auto& n = p.as<node::Seq>();
        open(ctx > 1);
        emit(n.first, 1);
        out += " ; ";
        emit(n.then, 2);
        close(ctx > 1);
        return;
      }
      case Kind::Restrict: {
        const auto& n = p.as<node::Restrict>();
        open(ctx > 2);
        out += "new " + to_string(n.binder) + ". ";
        emit(n.body, 2);
        close(ctx > 2);
        return;
      }
      case Kind::Input: {
        const auto& n = p.as<node::Input>();
        open(ctx > 2);
        std::visit(
            [this](const auto& pat) {
              using T = std::decay_t<decltype(pat)>;
              out += to_string(pat.subject) + "?";
              if constexpr (std::is_same_v<T, NamePattern>) {
                out += '(';
                names(pat.binders);
                out += ')';
              } else if constexpr (std::is_same_v<T, ProcPattern>) {
                out += "{" + pat.binder.ident + "}";
              } else {
                out += "[" + pat.binder.ident + "]";
              }
            },
            n.pattern);
        out += n.mode == InputMode::Once ? " > " : " * ";
        emit(n.body, 2);
        close(ctx > 2);
        return;
      }
      case Kind::UpdRecv: {
        const auto& n = p.as<node::UpdRecv>();
        open(ctx > 2);
        out += "up?(" + to_string(n.pattern) + ", " + n.binder.ident + ")#{";
        emit(n.log, 0);
        out += "} * ";
        emit(n.body, 2);
        close(ctx > 2);
        return;
      }
      case Kind::Loc: {
        const auto& n = p.as<node::Loc>();
        out += to_string(n.loc) + "[";
        emit(n.body, 0);
        out += ']';
        return;
      }
      case Kind::OutName: {
        const auto& n = p.as<node::OutName>();
        out += to_string(n.subject) + "!(";
        names(n.payloads);
        out += ')';
        return;
      }
      case Kind::OutProc: {
        const auto& n = p.as<node::OutProc>();
        out += to_string(n.subject) + "!{";
        emit(n.payload, 0);
        out += '}';
        return;
      }
      case Kind::UpdProv: {
        const auto& n = p.as<node::UpdProv>();
        out += "up!(" + to_string(n.loc) + "){";
        emit(n.payload, 0);
        out += '}';
        return;
      }
      case Kind::Blocked:
        out += "[[";
        emit(p.as<node::Blocked>().body, 0);
        out += "]]";
        return;
    }
  }

 private:
  void open(bool b) {
    if (b) out += '(';
  }
  void close(bool b) {
    if (b) out += ')';
  }
  void names(const std::vector<Name>& ns) {
    for (std::size_t i = 0; i < ns.size(); ++i) {
      if (i) out += ", ";
      out += to_string(ns[i]);
    }
  }
};

}  // namespace

Process parse(std::string_view text, const ParseOptions& opts) {
  return Parser(Lexer(text, opts.file).run(), opts).top();
}

Name parse_name(std::string_view text) {
  ParseOptions opts;
  return Parser(Lexer(text, opts.file).run(), opts).lone_name();
}

std::string print(const Process& p) {
  Printer pr;
  pr.emit(p, 0);
  return std::move(pr.out);
}

}  // namespace updatepi
