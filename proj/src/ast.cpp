#include "impan/ast.hpp"

namespace impan {

Expr int_lit(long long n) {
  Expr e;
  e.kind = ExprKind::IntLit;
  e.int_val = n;
  return e;
}

Expr str_lit(std::string s) {
  Expr e;
  e.kind = ExprKind::StrLit;
  e.text = std::move(s);
  return e;
}

Expr bool_lit(bool b) {
  Expr e;
  e.kind = ExprKind::BoolLit;
  e.bool_val = b;
  return e;
}

Expr var_ref(std::string name) {
  Expr e;
  e.kind = ExprKind::Var;
  e.text = std::move(name);
  return e;
}

Expr binary(ExprKind op, Expr l, Expr r) {
  Expr e;
  e.kind = op;
  e.kids.push_back(std::move(l));
  e.kids.push_back(std::move(r));
  return e;
}

Expr not_of(Expr inner) {
  Expr e;
  e.kind = ExprKind::Not;
  e.kids.push_back(std::move(inner));
  return e;
}

Expr substr_of(Expr s, Expr i, Expr j) {
  Expr e;
  e.kind = ExprKind::Substr;
  e.kids.push_back(std::move(s));
  e.kids.push_back(std::move(i));
  e.kids.push_back(std::move(j));
  return e;
}

Expr abs_num(Sign s) {
  Expr e;
  e.kind = ExprKind::AbsNum;
  e.sign = s;
  return e;
}

Expr abs_bool(BoolSet b) {
  Expr e;
  e.kind = ExprKind::AbsBool;
  e.bools = b;
  return e;
}

Expr abs_str(Dfa d) {
  Expr e;
  e.kind = ExprKind::AbsStr;
  e.lang = minimize(d);
  return e;
}

Expr bulk_num(Dfa numerals) {
  Expr e;
  e.kind = ExprKind::BulkNum;
  e.lang = minimize(numerals);
  return e;
}

Expr bulk_str(Dfa contents) {
  Expr e;
  e.kind = ExprKind::BulkStr;
  e.lang = minimize(contents);
  return e;
}

bool is_abstract_leaf(ExprKind k) {
  return k == ExprKind::AbsNum || k == ExprKind::AbsBool || k == ExprKind::AbsStr ||
         k == ExprKind::BulkNum || k == ExprKind::BulkStr;
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.int_val != b.int_val || a.bool_val != b.bool_val ||
      a.text != b.text || a.sign != b.sign || !(a.bools == b.bools))
    return false;
  if (a.lang.has_value() != b.lang.has_value()) return false;
  if (a.lang && canonical_key(*a.lang) != canonical_key(*b.lang)) return false;
  if (a.kids.size() != b.kids.size()) return false;
  for (size_t i = 0; i < a.kids.size(); ++i)
    if (!expr_equal(a.kids[i], b.kids[i])) return false;
  return true;
}

Stmt skip_stmt() { return {}; }

Stmt assign_stmt(std::string target, Expr rhs) {
  Stmt s;
  s.kind = StmtKind::Assign;
  s.var = std::move(target);
  s.exprs.push_back(std::move(rhs));
  return s;
}

Stmt seq_stmt(Stmt first, Stmt second) {
  Stmt s;
  s.kind = StmtKind::Seq;
  s.kids.push_back(std::move(first));
  s.kids.push_back(std::move(second));
  return s;
}

Stmt if_stmt(Expr cond, Stmt then_branch, Stmt else_branch) {
  Stmt s;
  s.kind = StmtKind::If;
  s.exprs.push_back(std::move(cond));
  s.kids.push_back(std::move(then_branch));
  s.kids.push_back(std::move(else_branch));
  return s;
}

Stmt while_stmt(Expr cond, Stmt body) {
  Stmt s;
  s.kind = StmtKind::While;
  s.exprs.push_back(std::move(cond));
  s.kids.push_back(std::move(body));
  return s;
}

Stmt eval_stmt(Expr arg) {
  Stmt s;
  s.kind = StmtKind::Eval;
  s.exprs.push_back(std::move(arg));
  return s;
}

bool stmt_equal(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.var != b.var) return false;
  if (a.exprs.size() != b.exprs.size() || a.kids.size() != b.kids.size()) return false;
  for (size_t i = 0; i < a.exprs.size(); ++i)
    if (!expr_equal(a.exprs[i], b.exprs[i])) return false;
  for (size_t i = 0; i < a.kids.size(); ++i)
    if (!stmt_equal(a.kids[i], b.kids[i])) return false;
  return true;
}

}  // namespace impan
