#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dgtrace/error.hpp"
#include "dgtrace/minifort/ast.hpp"
#include "dgtrace/minifort/lexer.hpp"

namespace dgtrace::minifort {

namespace detail {

struct SyntaxError {
  std::string message;
};

inline bool is_type_keyword(std::string_view w) {
  return w == "real" || w == "integer" || w == "logical" || w == "character" ||
         w == "complex" || w == "double" || w == "type" || w == "class";
}

// Keywords of statements that are understood but carry no data flow.
inline bool is_inert_keyword(std::string_view w) {
  static const std::set<std::string, std::less<>> words = {
      "do",        "enddo",     "endif",     "cycle",     "exit",      "return",
      "continue",  "stop",      "select",    "case",      "print",     "write",
      "read",      "open",      "close",     "allocate",  "deallocate", "nullify",
      "implicit",  "goto",      "go",        "save",      "data",      "format",
      "where",     "elsewhere", "endwhere",  "forall",    "endforall", "associate",
      "block",     "include",   "inquire",   "rewind",    "backspace", "flush",
      "entry",     "external",  "intrinsic", "namelist",  "equivalence", "common",
      "sequence",  "optional",  "pointer",   "target",    "allocatable", "parameter",
      "intent",    "dimension", "endselect", "error",     "else",      "elseif"};
  return words.count(w) > 0;
}

class StatementParser {
 public:
  explicit StatementParser(const std::vector<Token>& toks) : toks_(toks) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at_end() const { return peek().kind == TokenKind::end; }
  std::size_t pos() const { return pos_; }
  void reset(std::size_t p) { pos_ = p; }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool accept(std::string_view t) {
    if (peek().is(t)) {
      next();
      return true;
    }
    return false;
  }
  void expect(std::string_view t) {
    if (!accept(t)) fail("expected '" + std::string(t) + "' near '" + peek().text + "'");
  }
  std::string identifier() {
    if (peek().kind != TokenKind::identifier) fail("expected identifier near '" + peek().text + "'");
    return next().text;
  }
  [[noreturn]] static void fail(std::string msg) { throw SyntaxError{std::move(msg)}; }

  // Skips a balanced parenthesized group; the current token must be "(".
  void skip_group() {
    expect("(");
    int depth = 1;
    while (depth > 0) {
      if (at_end()) fail("unbalanced parentheses");
      const Token& t = next();
      if (t.is("(") || t.is("(/")) ++depth;
      if (t.is(")") || t.is("/)")) --depth;
    }
  }

  // Parses `name[(args)]{%name[(args)]}`. A single part with parentheses is a
  // CallNode; anything else is a VariableRef.
  Expr designator() {
    std::string base = identifier();
    std::vector<std::string> path;
    bool indexed = false;
    std::optional<CallNode> call;
    if (peek().is("(")) {
      CallNode c;
      c.name = base;
      argument_list(c);
      call = std::move(c);
      indexed = true;
    }
    while (accept("%")) {
      path.push_back(identifier());
      if (peek().is("(")) {
        CallNode discard;
        argument_list(discard);
        indexed = true;
      }
    }
    if (call && path.empty()) return Expr{std::move(*call)};
    return Expr{VariableRef{base, std::move(path), indexed}};
  }

  void argument_list(CallNode& c) {
    expect("(");
    if (accept(")")) return;
    while (true) {
      std::string kw;
      if (peek().kind == TokenKind::identifier && peek(1).is("=")) {
        kw = next().text;
        next();
      }
      c.args.push_back(range_or_expr());
      c.keywords.push_back(kw);
      if (accept(")")) return;
      expect(",");
    }
  }

  // Array-section triplets `[lo]:[hi][:stride]` appear only inside argument lists.
  Expr range_or_expr() {
    auto starts_operand = [&] { return !(peek().is(":") || peek().is(",") || peek().is(")")); };
    Operation range{":", {}};
    std::optional<Expr> first;
    if (starts_operand()) first = expression();
    if (!peek().is(":")) {
      if (!first) fail("empty argument");
      return std::move(*first);
    }
    if (first) range.operands.push_back(std::move(*first));
    while (accept(":"))
      if (starts_operand()) range.operands.push_back(expression());
    return Expr{std::move(range)};
  }

  Expr expression() { return binary_level(0); }

 private:
  static int precedence(const Token& t) {
    if (t.kind != TokenKind::op) return -1;
    const std::string& s = t.text;
    if (s == ".eqv." || s == ".neqv.") return 0;
    if (s == ".or.") return 1;
    if (s == ".and.") return 2;
    if (s == "==" || s == "/=" || s == "<" || s == "<=" || s == ">" || s == ">=" ||
        s == ".eq." || s == ".ne." || s == ".lt." || s == ".le." || s == ".gt." || s == ".ge.")
      return 4;
    if (s == "//") return 5;
    if (s == "+" || s == "-") return 6;
    if (s == "*" || s == "/") return 7;
    if (s == "**") return 8;
    return -1;
  }

  Expr binary_level(int min_prec) {
    Expr lhs = unary();
    while (true) {
      int p = precedence(peek());
      if (p < min_prec) break;
      std::string op = next().text;
      Expr rhs = op == "**" ? binary_level(p) : binary_level(p + 1);
      lhs = Expr{Operation{op, {std::move(lhs), std::move(rhs)}}};
    }
    return lhs;
  }

  Expr unary() {
    if (peek().is("-") || peek().is("+") || peek().is(".not.")) {
      std::string op = next().text;
      int prec = op == ".not." ? 3 : 6;
      Expr operand = binary_level(prec + 1 > 8 ? 8 : prec + 1);
      return Expr{Operation{op, {std::move(operand)}}};
    }
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    if (t.kind == TokenKind::number) return Expr{Literal{next().text}};
    if (t.kind == TokenKind::string) return Expr{Literal{"'" + next().text + "'"}};
    if (t.is("(")) {
      next();
      Expr inner = expression();
      if (accept(",")) {  // complex literal (re, im)
        Expr im = expression();
        expect(")");
        return Expr{Operation{"complex", {std::move(inner), std::move(im)}}};
      }
      expect(")");
      return inner;
    }
    if (t.is("(/") || t.is("[")) {
      std::string close = t.is("[") ? "]" : "/)";
      next();
      Operation ctor{"[]", {}};
      if (!accept(close)) {
        while (true) {
          ctor.operands.push_back(expression());
          if (accept(close)) break;
          expect(",");
        }
      }
      return Expr{std::move(ctor)};
    }
    if (t.kind == TokenKind::identifier) return designator();
    fail("unexpected '" + t.text + "' in expression");
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
};

inline VariableRef as_lhs(Expr e) {
  if (auto* v = std::get_if<VariableRef>(&e.node)) return std::move(*v);
  if (auto* c = std::get_if<CallNode>(&e.node)) return VariableRef{c->name, {}, true};
  StatementParser::fail("invalid assignment target");
}

inline std::string lower_copy(std::string_view s) {
  std::string r(s);
  for (auto& c : r) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return r;
}

// Builds a unit from logical lines. Holds the block state machine.
class UnitBuilder {
 public:
  explicit UnitBuilder(std::string path) { unit_.path = std::move(path); }

  SourceUnit finish(std::string_view tail_context) {
    if (!header_seen_)
      throw FatalSyntax(unit_.path + ": no module header" + std::string(tail_context));
    if (!open_subs_.empty()) {
      diag(Severity::warning, last_line_, "subprogram '" + open_subs_.back().name + "' not closed");
      while (!open_subs_.empty()) close_subprogram(last_line_);
    }
    if (!module_closed_) diag(Severity::warning, last_line_, "missing 'end module'");
    compute_public_symbols();
    return std::move(unit_);
  }

  void feed(const LogicalLine& ll) {
    last_line_ = ll.line;
    Statement st;
    st.line = ll.line;
    st.text = ll.text;

    auto toks = tokenize(ll.text);
    if (!header_seen_) {
      if (!toks || toks->size() < 3 || !(*toks)[0].is("module") ||
          (*toks)[1].kind != TokenKind::identifier || (*toks)[2].kind != TokenKind::end ||
          (*toks)[1].text == "procedure")
        throw FatalSyntax(unit_.path + ":" + std::to_string(ll.line) +
                          ": expected 'module <name>' header, found '" + ll.text + "'");
      unit_.module_name = (*toks)[1].text;
      header_seen_ = true;
      unit_.statements.push_back(st);
      return;
    }
    if (!toks) {
      bad(std::move(st), "cannot tokenize statement");
      return;
    }
    if (module_closed_) {
      bad(std::move(st), "statement after 'end module'");
      return;
    }
    if (skip_block_ != SkipKind::none) {
      handle_skipped(std::move(st), *toks);
      return;
    }
    try {
      StatementParser p(*toks);
      dispatch(std::move(st), p);
    } catch (const SyntaxError& e) {
      bad(std::move(st), e.message);
    }
  }

 private:
  enum class SkipKind { none, type_def, interface };

  std::vector<Statement>& current_statements() {
    return open_subs_.empty() ? unit_.statements : open_subs_.back().statements;
  }

  void diag(Severity s, int line, std::string msg) {
    unit_.diagnostics.push_back({s, unit_.module_name, line, std::move(msg)});
  }

  void bad(Statement st, std::string msg) {
    st.kind = StatementKind::other;
    diag(Severity::warning, st.line, "unparsed statement: " + msg);
    st.diagnostic = std::move(msg);
    current_statements().push_back(std::move(st));
  }

  void push(Statement st) { current_statements().push_back(std::move(st)); }

  void handle_skipped(Statement st, const std::vector<Token>& t) {
    bool ends = false;
    if (t[0].is("end") && t.size() > 1) {
      ends = (skip_block_ == SkipKind::type_def && t[1].is("type")) ||
             (skip_block_ == SkipKind::interface && t[1].is("interface"));
    }
    if (t[0].is("endtype") && skip_block_ == SkipKind::type_def) ends = true;
    if (t[0].is("endinterface") && skip_block_ == SkipKind::interface) ends = true;
    if (ends) skip_block_ = SkipKind::none;
    push(std::move(st));
  }

  void dispatch(Statement st, StatementParser& p) {
    const Token& t0 = p.peek();

    // Assignment (tried first: Fortran keywords are not reserved)
    if (t0.kind == TokenKind::identifier) {
      try {
        Expr target = p.designator();
        if (p.peek().is("=") || p.peek().is("=>")) {
          st.pointer_assignment = p.next().is("=>");
          st.lhs = as_lhs(std::move(target));
          st.rhs = p.expression();
          if (!p.at_end()) StatementParser::fail("trailing tokens after expression");
          st.kind = StatementKind::assignment;
          note_assigned(st.lhs);
          push(std::move(st));
          return;
        }
      } catch (const SyntaxError&) {
        // not an assignment; fall through to keyword statements
      }
      p.reset(0);
    }

    const std::string w = t0.text;
    if (t0.kind != TokenKind::identifier) StatementParser::fail("statement must start with a keyword or name");

    if (w == "module" && p.peek(1).is("procedure")) return push(std::move(st));
    if (w == "module") StatementParser::fail("nested module header");
    if (w == "contains") return push(std::move(st));
    if (w == "use") return parse_use(std::move(st), p);
    if (w == "public" || w == "private") return parse_visibility(std::move(st), p);
    if (w == "interface" || (w == "abstract" && p.peek(1).is("interface"))) {
      skip_block_ = SkipKind::interface;
      diag(Severity::note, st.line, "interface block ignored");
      return push(std::move(st));
    }
    if (w == "type" && !p.peek(1).is("(")) {
      skip_block_ = SkipKind::type_def;
      return push(std::move(st));
    }
    if (is_end_statement(p)) return parse_end(std::move(st), p);
    if (try_subprogram_header(st, p)) return;
    if (is_type_keyword(w)) return parse_declaration(std::move(st), p);
    if (w == "call") return parse_call(std::move(st), p);
    if (w == "if") return parse_if(std::move(st), p);
    if (is_inert_keyword(w)) return push(std::move(st));
    StatementParser::fail("unrecognized statement");
  }

  void note_assigned(const VariableRef& lhs) {
    if (open_subs_.empty()) module_assigned_.insert(lhs.base_name);
  }

  static bool is_end_statement(StatementParser& p) {
    const std::string& w = p.peek().text;
    return w == "end" || w == "endsubroutine" || w == "endfunction" || w == "endmodule";
  }

  void parse_end(Statement st, StatementParser& p) {
    std::string w = p.next().text;
    std::string what;
    if (w == "end") {
      if (!p.at_end()) what = p.next().text;
    } else {
      what = w.substr(3);
    }
    if (what.empty()) what = open_subs_.empty() ? "module" : "subprogram";
    if (what == "subroutine" || what == "function" || what == "subprogram") {
      if (open_subs_.empty()) StatementParser::fail("'end " + what + "' outside a subprogram");
      push(std::move(st));
      close_subprogram(current_line());
      return;
    }
    if (what == "module") {
      if (!open_subs_.empty()) {
        diag(Severity::warning, st.line, "module closed with open subprogram");
        while (!open_subs_.empty()) close_subprogram(st.line);
      }
      module_closed_ = true;
      push(std::move(st));
      return;
    }
    // end if / end do / end select / ...
    push(std::move(st));
  }

  int current_line() const { return last_line_; }

  bool try_subprogram_header(Statement& st, StatementParser& p) {
    std::size_t i = 0;
    // prefixes: type specs with optional (kind), double precision, attributes
    while (true) {
      const Token& t = p.peek(i);
      if (t.kind != TokenKind::identifier) return false;
      if (t.text == "subroutine" || t.text == "function") break;
      static const std::set<std::string, std::less<>> prefixes = {
          "real", "integer", "logical", "complex", "character", "double", "precision",
          "pure", "elemental", "recursive", "impure", "type", "class"};
      if (!prefixes.count(t.text)) return false;
      ++i;
      if (p.peek(i).is("(")) {
        int depth = 0;
        do {
          if (p.peek(i).kind == TokenKind::end) return false;
          if (p.peek(i).is("(")) ++depth;
          if (p.peek(i).is(")")) --depth;
          ++i;
        } while (depth > 0);
      }
    }
    for (std::size_t k = 0; k < i; ++k) p.next();
    SubprogramDef def;
    def.kind = p.next().is("function") ? SubprogramKind::function : SubprogramKind::subroutine;
    def.name = p.identifier();
    def.line_begin = st.line;
    if (p.accept("(")) {
      if (!p.accept(")")) {
        while (true) {
          def.formals.push_back(p.identifier());
          if (p.accept(")")) break;
          p.expect(",");
        }
      }
    }
    if (def.kind == SubprogramKind::function) {
      def.result_name = def.name;
      if (p.accept("result")) {
        p.expect("(");
        def.result_name = p.identifier();
        p.expect(")");
      }
    }
    if (!p.at_end()) StatementParser::fail("trailing tokens after subprogram header");
    for (const auto& other : unit_.subprograms)
      if (other.name == def.name)
        diag(Severity::warning, st.line, "duplicate subprogram '" + def.name + "'");
    def.statements.push_back(std::move(st));
    open_subs_.push_back(std::move(def));
    return true;
  }

  void close_subprogram(int line) {
    SubprogramDef def = std::move(open_subs_.back());
    open_subs_.pop_back();
    def.line_end = line;
    unit_.subprograms.push_back(std::move(def));
  }

  void parse_use(Statement st, StatementParser& p) {
    p.next();
    if (p.peek().is(",")) {  // use, intrinsic :: iso_c_binding
      diag(Severity::note, st.line, "intrinsic module use ignored");
      return push(std::move(st));
    }
    p.accept("::");
    UseStatement u;
    u.source_module = p.identifier();
    if (p.accept(",")) {
      if (p.peek().is("only") && p.peek(1).is(":")) {
        p.next();
        p.next();
        u.has_only = true;
        while (!p.at_end()) {
          std::string local = p.identifier();
          std::string remote = local;
          if (p.accept("=>")) remote = p.identifier();
          u.only_list.emplace_back(remote, local);
          if (remote != local) u.renames[remote] = local;
          if (!p.at_end()) p.expect(",");
        }
      } else {
        while (!p.at_end()) {
          std::string local = p.identifier();
          p.expect("=>");
          std::string remote = p.identifier();
          u.renames[remote] = local;
          if (!p.at_end()) p.expect(",");
        }
      }
    }
    if (!p.at_end()) StatementParser::fail("trailing tokens in use statement");
    st.kind = StatementKind::declaration;
    st.use = u;
    if (open_subs_.empty())
      unit_.uses.push_back(std::move(u));
    else
      open_subs_.back().uses.push_back(std::move(u));
    push(std::move(st));
  }

  void parse_visibility(Statement st, StatementParser& p) {
    bool is_public = p.next().is("public");
    if (p.at_end()) {
      if (open_subs_.empty()) default_private_ = !is_public;
      return push(std::move(st));
    }
    p.accept("::");
    while (!p.at_end()) {
      std::string n = p.identifier();
      (is_public ? explicit_public_ : explicit_private_).insert(n);
      if (!p.at_end()) p.expect(",");
    }
    st.kind = StatementKind::declaration;
    push(std::move(st));
  }

  void parse_declaration(Statement st, StatementParser& p) {
    Declaration d;
    d.type_spec = p.next().text;
    if (d.type_spec == "double") d.type_spec += " " + p.identifier();
    if (p.peek().is("(")) p.skip_group();
    if (p.accept("*")) p.next();  // character*8
    while (p.accept(",")) {
      std::string attr = p.identifier();
      if (attr == "intent") {
        p.expect("(");
        std::string which = p.identifier();
        if (which == "in" && p.peek().is("out")) which += p.next().text;
        p.expect(")");
        d.intent = which == "in" ? Intent::in : which == "out" ? Intent::out : Intent::inout;
      } else if (attr == "dimension") {
        d.dimensioned = true;
        p.skip_group();
      } else if (attr == "public" || attr == "private") {
        d.visibility_public = attr == "public";
      } else if (p.peek().is("(")) {
        p.skip_group();
      }
    }
    p.accept("::");
    while (!p.at_end()) {
      DeclaredEntity e;
      e.name = p.identifier();
      e.dimensioned = d.dimensioned;
      if (p.peek().is("(")) {
        p.skip_group();
        e.dimensioned = true;
      }
      if (p.accept("*")) p.next();
      if (p.accept("=") || p.accept("=>")) {  // initializer: constants, ignored
        int depth = 0;
        while (!p.at_end() && !(depth == 0 && p.peek().is(","))) {
          if (p.peek().is("(") || p.peek().is("(/")) ++depth;
          if (p.peek().is(")") || p.peek().is("/)")) --depth;
          p.next();
        }
      }
      d.entities.push_back(e);
      if (!p.at_end()) p.expect(",");
    }
    if (d.entities.empty()) StatementParser::fail("declaration without entities");
    record_declaration(d);
    st.kind = StatementKind::declaration;
    st.declaration = std::move(d);
    push(std::move(st));
  }

  void record_declaration(const Declaration& d) {
    for (const auto& e : d.entities) {
      if (open_subs_.empty()) {
        unit_.declared.insert(e.name);
        if (e.dimensioned) unit_.arrays.insert(e.name);
        if (d.visibility_public) (*d.visibility_public ? explicit_public_ : explicit_private_).insert(e.name);
      } else {
        auto& s = open_subs_.back();
        s.declared.insert(e.name);
        if (e.dimensioned) s.arrays.insert(e.name);
        if (d.intent != Intent::unspecified) s.intents[e.name] = d.intent;
      }
    }
  }

  void parse_call(Statement st, StatementParser& p) {
    p.next();
    Expr target = p.designator();
    if (!p.at_end()) StatementParser::fail("trailing tokens after call");
    if (auto* c = target.as<CallNode>()) {
      st.call = *c;
    } else if (auto* v = target.as<VariableRef>(); v && v->derived_path.empty() && !v->is_indexed) {
      st.call.name = v->base_name;
    } else {
      StatementParser::fail("type-bound procedure calls are not supported");
    }
    st.kind = StatementKind::call;
    push(std::move(st));
  }

  void parse_if(Statement st, StatementParser& p) {
    p.next();
    p.skip_group();
    if (p.at_end()) StatementParser::fail("if without statement");
    if (p.peek().is("then") && p.peek(1).kind == TokenKind::end) return push(std::move(st));
    // logical if: the guarded statement carries the data flow
    std::size_t start = p.pos();
    std::vector<Token> rest;
    for (std::size_t i = start;; ++i) {
      rest.push_back(p.peek(i - start));
      if (rest.back().kind == TokenKind::end) break;
    }
    StatementParser inner(rest);
    dispatch(std::move(st), inner);
  }

  void compute_public_symbols() {
    std::set<std::string> own = unit_.declared;
    own.insert(module_assigned_.begin(), module_assigned_.end());
    for (const auto& s : unit_.subprograms) own.insert(s.name);
    std::set<std::string> pub;
    if (default_private_) {
      for (const auto& n : explicit_public_)
        if (own.count(n)) pub.insert(n);
    } else {
      for (const auto& n : own)
        if (!explicit_private_.count(n)) pub.insert(n);
    }
    unit_.public_symbols = std::move(pub);
  }

  SourceUnit unit_;
  std::vector<SubprogramDef> open_subs_;
  std::set<std::string> explicit_public_, explicit_private_, module_assigned_;
  bool default_private_ = false;
  bool header_seen_ = false;
  bool module_closed_ = false;
  SkipKind skip_block_ = SkipKind::none;
  int last_line_ = 0;
};

}  // namespace detail

// Parses the text of one MiniFort file. Statements that cannot be parsed are
// kept as `other` with a diagnostic; only a missing/malformed module header
// is fatal.
inline SourceUnit parse_unit(std::string_view text, std::string path) {
  detail::UnitBuilder b(std::move(path));
  for (const auto& ll : logical_lines(text)) b.feed(ll);
  return b.finish("");
}

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SourceUnit read_unit(const std::filesystem::path& p) {
  return parse_unit(read_text_file(p), p.string());
}

// Sorts units by module name and rejects duplicate module names.
inline SourceCorpus make_corpus(std::vector<SourceUnit> units) {
  std::sort(units.begin(), units.end(),
            [](const SourceUnit& a, const SourceUnit& b) { return a.module_name < b.module_name; });
  for (std::size_t i = 1; i < units.size(); ++i)
    if (units[i].module_name == units[i - 1].module_name)
      throw InputError("duplicate module '" + units[i].module_name + "' in " + units[i - 1].path +
                       " and " + units[i].path);
  SourceCorpus c;
  for (const auto& u : units) c.diagnostics.insert(c.diagnostics.end(), u.diagnostics.begin(), u.diagnostics.end());
  c.units = std::move(units);
  return c;
}

// Loads every *.mf90 file under `dir` (non-recursive).
inline SourceCorpus load_corpus(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir, ec))
    if (e.is_regular_file() && e.path().extension() == ".mf90") files.push_back(e.path());
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  std::vector<SourceUnit> units;
  units.reserve(files.size());
  for (const auto& f : files) units.push_back(read_unit(f));
  return make_corpus(std::move(units));
}

}  // namespace dgtrace::minifort
