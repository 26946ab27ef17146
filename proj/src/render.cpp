#include "impan/render.hpp"

#include "impan/regex.hpp"
#include "impan/value.hpp"

namespace impan {

namespace {

// Binding strength: And < comparisons < additive < multiplicative < atoms.
int level(ExprKind k) {
  switch (k) {
    case ExprKind::And:
      return 0;
    case ExprKind::CmpEq:
    case ExprKind::CmpLt:
    case ExprKind::CmpGt:
      return 1;
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Concat:
      return 2;
    case ExprKind::Mul:
      return 3;
    default:
      return 4;
  }
}

std::string rx(const Expr& e, int min_level) {
  int lv = level(e.kind);
  std::string s;
  switch (e.kind) {
    case ExprKind::IntLit:
      s = std::to_string(e.int_val);
      break;
    case ExprKind::StrLit:
      s = "\"" + e.text + "\"";
      break;
    case ExprKind::BoolLit:
      s = e.bool_val ? "true" : "false";
      break;
    case ExprKind::Var:
      s = e.text;
      break;
    case ExprKind::Add:
    case ExprKind::Concat:
      s = rx(e.kids[0], 2) + "+" + rx(e.kids[1], 3);
      break;
    case ExprKind::Sub:
      s = rx(e.kids[0], 2) + "-" + rx(e.kids[1], 3);
      break;
    case ExprKind::Mul:
      s = rx(e.kids[0], 3) + "*" + rx(e.kids[1], 4);
      break;
    case ExprKind::CmpEq:
      s = rx(e.kids[0], 2) + "=" + rx(e.kids[1], 2);
      break;
    case ExprKind::CmpLt:
      s = rx(e.kids[0], 2) + "<" + rx(e.kids[1], 2);
      break;
    case ExprKind::CmpGt:
      s = rx(e.kids[0], 2) + ">" + rx(e.kids[1], 2);
      break;
    case ExprKind::And:
      s = rx(e.kids[0], 0) + "&&" + rx(e.kids[1], 1);
      break;
    case ExprKind::Not:
      s = "!(" + rx(e.kids[0], 0) + ")";
      break;
    case ExprKind::Substr:
      s = "substr(" + rx(e.kids[0], 0) + "," + rx(e.kids[1], 0) + "," + rx(e.kids[2], 0) + ")";
      break;
    case ExprKind::AbsNum:
      switch (e.sign) {
        case Sign::Pos: s = "Z+"; break;
        case Sign::Neg: s = "Z-"; break;
        case Sign::Zero: s = "0"; break;
        case Sign::Top: s = "Z"; break;
        case Sign::Bot: s = "{}"; break;
      }
      break;
    case ExprKind::AbsBool:
      s = bool_set_name(e.bools);
      break;
    case ExprKind::AbsStr:
    case ExprKind::BulkStr:
      s = "\"" + dfa_to_regex(*e.lang) + "\"";
      break;
    case ExprKind::BulkNum:
      s = dfa_to_regex(*e.lang);
      break;
  }
  if (lv < min_level) return "(" + s + ")";
  return s;
}

bool is_block(const Stmt& s) { return s.kind == StmtKind::If || s.kind == StmtKind::While; }

void flatten(const Stmt& s, std::vector<const Stmt*>& out) {
  if (s.kind == StmtKind::Seq) {
    flatten(s.kids[0], out);
    flatten(s.kids[1], out);
  } else {
    out.push_back(&s);
  }
}

std::string render_one(const Stmt& s);

// top: every statement ';'-terminated; block body: last statement bare.
std::string render_list(const Stmt& s, bool top) {
  std::vector<const Stmt*> items;
  flatten(s, items);
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    out += render_one(*items[i]);
    if (top || i + 1 < items.size()) out += ";";
  }
  return out;
}

std::string render_one(const Stmt& s) {
  switch (s.kind) {
    case StmtKind::Skip:
      return "skip";
    case StmtKind::Assign:
      return s.var + ":=" + rx(s.exprs[0], 0);
    case StmtKind::Seq:
      // Unreachable through render_list; kept for direct calls.
      return render_list(s, false);
    case StmtKind::If:
      return "if(" + rx(s.exprs[0], 0) + "){" + render_list(s.kids[0], false) + "}{" +
             render_list(s.kids[1], false) + "}";
    case StmtKind::While:
      return "while(" + rx(s.exprs[0], 0) + "){" + render_list(s.kids[0], false) + "}";
    case StmtKind::Eval:
      return "eval(" + rx(s.exprs[0], 0) + ")";
  }
  return "";
}

}  // namespace

std::string render(const Stmt& s) { return render_list(s, true); }

std::string render_expr(const Expr& e) { return rx(e, 0); }

}  // namespace impan
