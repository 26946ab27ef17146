#include "impan/parser.hpp"

#include <functional>
#include <optional>
#include <set>

namespace impan {

namespace {

struct Parser {
  const std::vector<Token>& ts;
  size_t pos = 0;

  const Token& peek() const { return ts[pos]; }
  bool at(Tok k) const { return peek().kind == k; }
  Token eat() { return ts[pos++]; }
  Token expect(Tok k, const char* what) {
    if (!at(k)) fail(what);
    return eat();
  }
  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError(peek().line, peek().col, expected);
  }

  Expr parse_expr() { return parse_and(); }

  Expr parse_and() {
    Expr e = parse_not();
    while (at(Tok::AndAnd)) {
      eat();
      e = binary(ExprKind::And, std::move(e), parse_not());
    }
    return e;
  }

  Expr parse_not() {
    if (at(Tok::Bang)) {
      eat();
      return not_of(parse_not());
    }
    return parse_cmp();
  }

  Expr parse_cmp() {
    Expr e = parse_add();
    if (at(Tok::Eq) || at(Tok::Lt) || at(Tok::Gt)) {
      Tok op = eat().kind;
      ExprKind k = op == Tok::Eq   ? ExprKind::CmpEq
                   : op == Tok::Lt ? ExprKind::CmpLt
                                   : ExprKind::CmpGt;
      e = binary(k, std::move(e), parse_add());
    }
    return e;
  }

  Expr parse_add() {
    Expr e = parse_mul();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      ExprKind k = eat().kind == Tok::Plus ? ExprKind::Add : ExprKind::Sub;
      e = binary(k, std::move(e), parse_mul());
    }
    return e;
  }

  Expr parse_mul() {
    Expr e = parse_atom();
    while (at(Tok::Star)) {
      eat();
      e = binary(ExprKind::Mul, std::move(e), parse_atom());
    }
    return e;
  }

  Expr parse_atom() {
    switch (peek().kind) {
      case Tok::Int:
        return int_lit(eat().value);
      case Tok::Minus: {
        eat();
        Token t = expect(Tok::Int, "an integer literal");
        return int_lit(-t.value);
      }
      case Tok::Str:
        return str_lit(eat().text);
      case Tok::KwTrue:
        eat();
        return bool_lit(true);
      case Tok::KwFalse:
        eat();
        return bool_lit(false);
      case Tok::Ident:
        return var_ref(eat().text);
      case Tok::KwSubstr: {
        eat();
        expect(Tok::LParen, "'('");
        Expr s = parse_expr();
        expect(Tok::Comma, "','");
        Expr i = parse_expr();
        expect(Tok::Comma, "','");
        Expr j = parse_expr();
        expect(Tok::RParen, "')'");
        return substr_of(std::move(s), std::move(i), std::move(j));
      }
      case Tok::LParen: {
        eat();
        Expr e = parse_expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      default:
        fail("an expression");
    }
  }

  Stmt parse_block() {
    expect(Tok::LBrace, "'{'");
    Stmt body = parse_stmts(true);
    expect(Tok::RBrace, "'}'");
    return body;
  }

  Stmt parse_stmt() {
    switch (peek().kind) {
      case Tok::KwSkip:
        eat();
        return skip_stmt();
      case Tok::KwEval: {
        eat();
        expect(Tok::LParen, "'('");
        Expr e = parse_expr();
        expect(Tok::RParen, "')'");
        return eval_stmt(std::move(e));
      }
      case Tok::KwIf: {
        eat();
        expect(Tok::LParen, "'('");
        Expr cond = parse_expr();
        expect(Tok::RParen, "')'");
        Stmt then_branch = parse_block();
        if (at(Tok::KwElse)) eat();
        Stmt else_branch = parse_block();
        return if_stmt(std::move(cond), std::move(then_branch), std::move(else_branch));
      }
      case Tok::KwWhile: {
        eat();
        expect(Tok::LParen, "'('");
        Expr cond = parse_expr();
        expect(Tok::RParen, "')'");
        Stmt body = parse_block();
        return while_stmt(std::move(cond), std::move(body));
      }
      case Tok::Ident: {
        std::string name = eat().text;
        if (at(Tok::Assign) || at(Tok::Eq))
          eat();
        else
          fail("':='");
        return assign_stmt(std::move(name), parse_expr());
      }
      default:
        fail("a statement");
    }
  }

  // A nonempty ;-separated statement list. The terminator after a primitive
  // statement may be omitted only directly before '}' or at end of input;
  // after a block it is always optional.
  Stmt parse_stmts(bool in_block) {
    Tok stop = in_block ? Tok::RBrace : Tok::End;
    std::optional<Stmt> acc;
    for (;;) {
      Stmt s = parse_stmt();
      bool block_form = s.kind == StmtKind::If || s.kind == StmtKind::While;
      if (acc)
        acc = seq_stmt(std::move(*acc), std::move(s));
      else
        acc = std::move(s);
      if (at(Tok::Semi))
        eat();
      else if (!block_form && !at(stop))
        fail("';'");
      if (at(stop)) return std::move(*acc);
    }
  }
};

std::optional<VarSort> sort_of(const Expr& e, const std::map<std::string, VarSort>& sorts) {
  switch (e.kind) {
    case ExprKind::IntLit:
    case ExprKind::AbsNum:
    case ExprKind::BulkNum:
    case ExprKind::Sub:
    case ExprKind::Mul:
      return VarSort::Int;
    case ExprKind::StrLit:
    case ExprKind::AbsStr:
    case ExprKind::BulkStr:
    case ExprKind::Concat:
    case ExprKind::Substr:
      return VarSort::Str;
    case ExprKind::BoolLit:
    case ExprKind::AbsBool:
    case ExprKind::CmpEq:
    case ExprKind::CmpLt:
    case ExprKind::CmpGt:
    case ExprKind::And:
    case ExprKind::Not:
      return VarSort::Bool;
    case ExprKind::Var: {
      auto it = sorts.find(e.text);
      if (it == sorts.end()) return std::nullopt;
      return it->second;
    }
    case ExprKind::Add: {
      auto l = sort_of(e.kids[0], sorts);
      auto r = sort_of(e.kids[1], sorts);
      if (l) return l;
      return r;
    }
  }
  return std::nullopt;
}

const char* sort_name(VarSort s) {
  return s == VarSort::Int ? "integer" : s == VarSort::Bool ? "boolean" : "string";
}

// Pushes an expected sort down the tree, binding variables along the way.
// Sets `changed` when a new binding appears.
void require_sort(const Expr& e, VarSort want, std::map<std::string, VarSort>& sorts,
                  bool& changed) {
  auto want_is = [&](VarSort s) {
    if (want != s)
      throw SortError(std::string(sort_name(s)) + " expression used as " + sort_name(want));
  };
  switch (e.kind) {
    case ExprKind::IntLit:
    case ExprKind::AbsNum:
    case ExprKind::BulkNum:
      want_is(VarSort::Int);
      return;
    case ExprKind::StrLit:
    case ExprKind::AbsStr:
    case ExprKind::BulkStr:
      want_is(VarSort::Str);
      return;
    case ExprKind::BoolLit:
    case ExprKind::AbsBool:
      want_is(VarSort::Bool);
      return;
    case ExprKind::Var: {
      auto it = sorts.find(e.text);
      if (it == sorts.end()) {
        sorts.emplace(e.text, want);
        changed = true;
      } else if (it->second != want) {
        throw SortError("variable " + e.text + " used as both " + sort_name(it->second) +
                        " and " + sort_name(want));
      }
      return;
    }
    case ExprKind::Add:
      if (want == VarSort::Bool) throw SortError("'+' cannot produce a boolean");
      require_sort(e.kids[0], want, sorts, changed);
      require_sort(e.kids[1], want, sorts, changed);
      return;
    case ExprKind::Sub:
    case ExprKind::Mul:
      want_is(VarSort::Int);
      require_sort(e.kids[0], VarSort::Int, sorts, changed);
      require_sort(e.kids[1], VarSort::Int, sorts, changed);
      return;
    case ExprKind::CmpLt:
    case ExprKind::CmpGt:
      want_is(VarSort::Bool);
      require_sort(e.kids[0], VarSort::Int, sorts, changed);
      require_sort(e.kids[1], VarSort::Int, sorts, changed);
      return;
    case ExprKind::CmpEq: {
      want_is(VarSort::Bool);
      auto s = sort_of(e.kids[0], sorts);
      if (!s) s = sort_of(e.kids[1], sorts);
      if (s) {
        require_sort(e.kids[0], *s, sorts, changed);
        require_sort(e.kids[1], *s, sorts, changed);
      }
      return;
    }
    case ExprKind::And:
      want_is(VarSort::Bool);
      require_sort(e.kids[0], VarSort::Bool, sorts, changed);
      require_sort(e.kids[1], VarSort::Bool, sorts, changed);
      return;
    case ExprKind::Not:
      want_is(VarSort::Bool);
      require_sort(e.kids[0], VarSort::Bool, sorts, changed);
      return;
    case ExprKind::Concat:
      want_is(VarSort::Str);
      require_sort(e.kids[0], VarSort::Str, sorts, changed);
      require_sort(e.kids[1], VarSort::Str, sorts, changed);
      return;
    case ExprKind::Substr:
      want_is(VarSort::Str);
      require_sort(e.kids[0], VarSort::Str, sorts, changed);
      require_sort(e.kids[1], VarSort::Int, sorts, changed);
      require_sort(e.kids[2], VarSort::Int, sorts, changed);
      return;
  }
}

void infer_stmt(Stmt& s, std::map<std::string, VarSort>& sorts, bool& changed) {
  switch (s.kind) {
    case StmtKind::Skip:
      return;
    case StmtKind::Assign: {
      auto it = sorts.find(s.var);
      if (it != sorts.end()) {
        require_sort(s.exprs[0], it->second, sorts, changed);
      } else if (auto rhs = sort_of(s.exprs[0], sorts)) {
        sorts.emplace(s.var, *rhs);
        changed = true;
        require_sort(s.exprs[0], *rhs, sorts, changed);
      }
      return;
    }
    case StmtKind::Seq:
      infer_stmt(s.kids[0], sorts, changed);
      infer_stmt(s.kids[1], sorts, changed);
      return;
    case StmtKind::If:
    case StmtKind::While:
      require_sort(s.exprs[0], VarSort::Bool, sorts, changed);
      for (auto& k : s.kids) infer_stmt(k, sorts, changed);
      return;
    case StmtKind::Eval:
      require_sort(s.exprs[0], VarSort::Str, sorts, changed);
      return;
  }
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
  if (e.kind == ExprKind::Var) out.insert(e.text);
  for (auto& k : e.kids) collect_vars(k, out);
}

void collect_vars(const Stmt& s, std::set<std::string>& out) {
  if (s.kind == StmtKind::Assign) out.insert(s.var);
  for (auto& e : s.exprs) collect_vars(e, out);
  for (auto& k : s.kids) collect_vars(k, out);
}

void rewrite_adds(Expr& e, const std::map<std::string, VarSort>& sorts) {
  for (auto& k : e.kids) rewrite_adds(k, sorts);
  if (e.kind == ExprKind::Add && sort_of(e, sorts) == VarSort::Str) e.kind = ExprKind::Concat;
}

void rewrite_adds(Stmt& s, const std::map<std::string, VarSort>& sorts) {
  for (auto& e : s.exprs) rewrite_adds(e, sorts);
  for (auto& k : s.kids) rewrite_adds(k, sorts);
}

}  // namespace

std::map<std::string, VarSort> resolve_sorts(Stmt& root) {
  std::map<std::string, VarSort> sorts;
  bool changed = true;
  while (changed) {
    changed = false;
    infer_stmt(root, sorts, changed);
  }
  // Variables no constraint ever reached default to integers.
  std::set<std::string> vars;
  collect_vars(root, vars);
  bool defaulted = false;
  for (auto& v : vars)
    if (!sorts.count(v)) {
      sorts.emplace(v, VarSort::Int);
      defaulted = true;
    }
  if (defaulted) {
    changed = true;
    while (changed) {
      changed = false;
      infer_stmt(root, sorts, changed);
    }
  }
  // Validation sweep: every binding is now known, so any remaining mismatch
  // (including deferred '=' operand sorts) surfaces here.
  bool ignored = false;
  infer_stmt(root, sorts, ignored);
  std::function<void(const Expr&)> check_eq = [&](const Expr& e) {
    for (auto& k : e.kids) check_eq(k);
    if (e.kind == ExprKind::CmpEq) {
      auto l = sort_of(e.kids[0], sorts);
      auto r = sort_of(e.kids[1], sorts);
      if (l && r && *l != *r)
        throw SortError("'=' compares " + std::string(sort_name(*l)) + " with " + sort_name(*r));
    }
  };
  std::function<void(const Stmt&)> walk = [&](const Stmt& s) {
    for (auto& e : s.exprs) check_eq(e);
    for (auto& k : s.kids) walk(k);
  };
  walk(root);
  rewrite_adds(root, sorts);
  return sorts;
}

namespace {

int label_walk(Stmt& s, int pre, int& counter) {
  s.pre = pre;
  switch (s.kind) {
    case StmtKind::Skip:
    case StmtKind::Assign:
    case StmtKind::Eval:
      s.post = ++counter;
      break;
    case StmtKind::Seq: {
      int mid = label_walk(s.kids[0], pre, counter);
      s.post = label_walk(s.kids[1], mid, counter);
      break;
    }
    case StmtKind::If: {
      int tpre = ++counter;
      label_walk(s.kids[0], tpre, counter);
      int epre = ++counter;
      label_walk(s.kids[1], epre, counter);
      s.post = ++counter;
      break;
    }
    case StmtKind::While: {
      int bpre = ++counter;
      label_walk(s.kids[0], bpre, counter);
      s.post = ++counter;
      break;
    }
  }
  return s.post;
}

}  // namespace

int assign_labels(Stmt& root) {
  int counter = 1;
  label_walk(root, 1, counter);
  return counter;
}

LabeledProgram parse_program(const std::string& text) {
  auto tokens = lex(text);
  Parser p{tokens};
  if (p.at(Tok::End)) p.fail("a statement");
  Stmt root = p.parse_stmts(false);
  p.expect(Tok::End, "end of input");
  LabeledProgram prog;
  prog.var_sorts = resolve_sorts(root);
  prog.num_labels = assign_labels(root);
  prog.entry = 1;
  prog.exit = root.post;
  prog.root = std::move(root);
  return prog;
}

Stmt parse_fragment(const std::string& text) {
  try {
    auto tokens = lex(text);
    Parser p{tokens};
    if (p.at(Tok::End)) throw NotExecutable("empty text");
    Stmt root = p.parse_stmts(false);
    p.expect(Tok::End, "end of input");
    resolve_sorts(root);
    return root;
  } catch (const SyntaxError& e) {
    throw NotExecutable(e.what());
  } catch (const SortError& e) {
    throw NotExecutable(e.what());
  }
}

}  // namespace impan
