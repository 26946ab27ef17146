#pragma once

#include <optional>
#include <string>
#include <vector>

#include "impan/value.hpp"

namespace impan {

// Expression nodes. Add doubles as integer addition and, after sort
// resolution, is rewritten to Concat where operands are strings. The
// abstract leaves (AbsNum .. BulkStr) never come out of the text parser;
// they appear in labels produced by code abstraction, where a leaf stands
// for a set of same-sort literals. Bulk leaves carry the set as the
// automaton of its literal spellings.
enum class ExprKind {
  IntLit,
  StrLit,
  BoolLit,
  Var,
  Add,
  Sub,
  Mul,
  CmpEq,
  CmpLt,
  CmpGt,
  And,
  Not,
  Concat,
  Substr,
  AbsNum,
  AbsBool,
  AbsStr,
  BulkNum,
  BulkStr,
};

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  long long int_val = 0;
  bool bool_val = false;
  std::string text;         // Var name, StrLit contents
  Sign sign = Sign::Bot;    // AbsNum
  BoolSet bools{};          // AbsBool
  std::optional<Dfa> lang;  // AbsStr / BulkNum / BulkStr
  std::vector<Expr> kids;
};

Expr int_lit(long long n);
Expr str_lit(std::string s);
Expr bool_lit(bool b);
Expr var_ref(std::string name);
Expr binary(ExprKind op, Expr l, Expr r);
Expr not_of(Expr e);
Expr substr_of(Expr s, Expr i, Expr j);
Expr abs_num(Sign s);
Expr abs_bool(BoolSet b);
Expr abs_str(Dfa d);
Expr bulk_num(Dfa numerals);
Expr bulk_str(Dfa contents);

bool is_abstract_leaf(ExprKind k);
bool expr_equal(const Expr& a, const Expr& b);

enum class StmtKind { Skip, Assign, Seq, If, While, Eval };

// exprs: Assign rhs / If cond / While cond / Eval argument.
// kids: Seq both halves; If then and else; While body.
// pre/post: program points, 0 until labeled.
struct Stmt {
  StmtKind kind = StmtKind::Skip;
  std::string var;
  std::vector<Expr> exprs;
  std::vector<Stmt> kids;
  int pre = 0;
  int post = 0;
};

Stmt skip_stmt();
Stmt assign_stmt(std::string target, Expr rhs);
Stmt seq_stmt(Stmt first, Stmt second);
Stmt if_stmt(Expr cond, Stmt then_branch, Stmt else_branch);
Stmt while_stmt(Expr cond, Stmt body);
Stmt eval_stmt(Expr arg);

// Structural equality, ignoring labels.
bool stmt_equal(const Stmt& a, const Stmt& b);

enum class VarSort { Int, Bool, Str };

struct LabeledProgram {
  Stmt root;
  int entry = 0;
  int exit = 0;
  int num_labels = 0;
  std::map<std::string, VarSort> var_sorts;
};

}  // namespace impan
