#include "impan/value.hpp"

#include <array>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "impan/collecting.hpp"
#include "impan/expr_eval.hpp"
#include "impan/memory.hpp"
#include "impan/parser.hpp"

using namespace impan;

namespace {

const std::vector<Sign> kSigns{Sign::Bot, Sign::Zero, Sign::Pos, Sign::Neg, Sign::Top};

// Everything an operator can produce from the bounded concretizations.
std::set<Concrete> op_image(Sign a, Sign b, long long (*op)(long long, long long),
                            const Bounds& bounds) {
  std::set<Concrete> out;
  for (auto& x : gamma_bounded(Value::of_sign(a), bounds))
    for (auto& y : gamma_bounded(Value::of_sign(b), bounds))
      out.insert(conc_int(op(std::get<long long>(x), std::get<long long>(y))));
  return out;
}

Sign alpha_sign(const std::set<Concrete>& s) {
  Sign acc = Sign::Bot;
  for (auto& c : s) acc = sign_join(acc, sign_of(std::get<long long>(c)));
  return acc;
}

// Random values and environments for the evaluator soundness property.
struct ValueGen {
  std::mt19937 rng;
  explicit ValueGen(unsigned seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  std::string word() {
    std::string w;
    int len = pick(4);
    for (int i = 0; i < len; ++i) w += "ab5"[pick(3)];
    return w;
  }

  Dfa lang() {
    Dfa d = from_literal(word());
    int extra = pick(2);
    for (int i = 0; i < extra; ++i) d = lang_union(d, from_literal(word()));
    if (pick(4) == 0) d = concat(d, chars_star("5"));
    return d;
  }

  BoolSet bools() { return BoolSet{pick(2) == 0, pick(2) == 0}; }

  Value value_of(VarSort sort) {
    if (pick(8) == 0) return Value::top();
    switch (sort) {
      case VarSort::Int:
        return Value::of_sign(kSigns[pick(5)]);
      case VarSort::Bool:
        return Value::of_bools(bools());
      default:
        return Value::of_lang(lang());
    }
  }

  Expr aexp(int depth) {
    if (depth == 0 || pick(3) == 0) {
      switch (pick(4)) {
        case 0:
          return var_ref(pick(2) ? "x" : "y");
        case 1:
          return int_lit(pick(13) - 4);
        case 2:
          return abs_num(kSigns[pick(5)]);
        default: {
          Dfa d = from_literal(std::to_string(pick(7)));
          if (pick(2)) d = lang_union(d, from_literal(std::to_string(pick(100))));
          return bulk_num(d);
        }
      }
    }
    std::array<ExprKind, 3> ops{ExprKind::Add, ExprKind::Sub, ExprKind::Mul};
    return binary(ops[pick(3)], aexp(depth - 1), aexp(depth - 1));
  }

  Expr sexp(int depth) {
    if (depth == 0 || pick(3) == 0) {
      switch (pick(4)) {
        case 0:
          return var_ref(pick(2) ? "s" : "t");
        case 1:
          return str_lit(word());
        case 2:
          return abs_str(lang());
        default:
          return bulk_str(lang());
      }
    }
    if (pick(3) == 0) return substr_of(sexp(depth - 1), aexp(depth - 1), aexp(depth - 1));
    return binary(ExprKind::Concat, sexp(depth - 1), sexp(depth - 1));
  }

  Expr bexp(int depth) {
    if (depth == 0 || pick(4) == 0) {
      switch (pick(3)) {
        case 0:
          return var_ref(pick(2) ? "p" : "q");
        case 1:
          return bool_lit(pick(2) == 0);
        default:
          return abs_bool(bools());
      }
    }
    switch (pick(6)) {
      case 0:
        return binary(ExprKind::And, bexp(depth - 1), bexp(depth - 1));
      case 1:
        return not_of(bexp(depth - 1));
      case 2:
        return binary(ExprKind::CmpLt, aexp(depth - 1), aexp(depth - 1));
      case 3:
        return binary(ExprKind::CmpGt, aexp(depth - 1), aexp(depth - 1));
      case 4:
        return binary(ExprKind::CmpEq, aexp(depth - 1), aexp(depth - 1));
      default:
        return binary(ExprKind::CmpEq, sexp(depth - 1), sexp(depth - 1));
    }
  }

  Expr expr(int depth) {
    switch (pick(3)) {
      case 0:
        return aexp(depth);
      case 1:
        return sexp(depth);
      default:
        return bexp(depth);
    }
  }
};

}  // namespace

TEST_SUITE("value") {

TEST_CASE("sign lattice laws") {
  for (Sign a : kSigns) {
    CHECK(sign_join(a, a) == a);
    CHECK(sign_meet(a, a) == a);
    CHECK(sign_leq(Sign::Bot, a));
    CHECK(sign_leq(a, Sign::Top));
    for (Sign b : kSigns) {
      CHECK(sign_join(a, b) == sign_join(b, a));
      CHECK(sign_meet(a, b) == sign_meet(b, a));
      CHECK(sign_leq(a, sign_join(a, b)));
      CHECK(sign_leq(sign_meet(a, b), a));
      CHECK(sign_leq(a, b) == (sign_join(a, b) == b));
      for (Sign c : kSigns) {
        CHECK(sign_join(sign_join(a, b), c) == sign_join(a, sign_join(b, c)));
        CHECK(sign_meet(sign_meet(a, b), c) == sign_meet(a, sign_meet(b, c)));
      }
    }
  }
}

TEST_CASE("sign operators match the bounded image exactly") {
  Bounds bounds;
  auto add = [](long long x, long long y) { return x + y; };
  auto sub = [](long long x, long long y) { return x - y; };
  auto mul = [](long long x, long long y) { return x * y; };
  for (Sign a : kSigns)
    for (Sign b : kSigns) {
      CHECK(sign_add(a, b) == alpha_sign(op_image(a, b, +add, bounds)));
      CHECK(sign_sub(a, b) == alpha_sign(op_image(a, b, +sub, bounds)));
      CHECK(sign_mul(a, b) == alpha_sign(op_image(a, b, +mul, bounds)));
    }
}

TEST_CASE("coalesced values") {
  Value pos = Value::of_sign(Sign::Pos);
  Value lang = Value::of_lang(from_literal("a"));
  Value truth = Value::of_bools(bool_only(true));

  CHECK(value_join(pos, lang).is_top());
  CHECK(value_join(lang, truth).is_top());
  CHECK(value_meet(pos, lang).is_bot());
  CHECK(value_meet(truth, pos).is_bot());

  // Top is strictly above the all-integers element.
  CHECK(value_leq(Value::of_sign(Sign::Top), Value::top()));
  CHECK_FALSE(value_leq(Value::top(), Value::of_sign(Sign::Top)));

  // Empty payloads normalize to the shared bottom.
  CHECK(Value::of_sign(Sign::Bot).is_bot());
  CHECK(Value::of_bools(bool_none()).is_bot());
  CHECK(Value::of_lang(empty_language()).is_bot());

  CHECK(value_eq(value_join(lang, Value::of_lang(from_literal("b"))),
                 Value::of_lang(lang_union(from_literal("a"), from_literal("b")))));
  CHECK(value_name(pos) == "+");
  CHECK(value_name(Value::top()) == "⊤");
  CHECK(value_name(Value::bot()) == "⊥");
  CHECK(value_name(lang) == "\"a\"");
}

TEST_CASE("alpha is extensive and monotone") {
  ValueGen g(4211);
  Bounds bounds;
  for (int iter = 0; iter < 50; ++iter) {
    std::set<Concrete> small, big;
    int n = 1 + g.pick(6);
    for (int i = 0; i < n; ++i) {
      Concrete c = g.pick(3) == 0   ? conc_int(g.pick(9) - 4)
                   : g.pick(2) == 0 ? conc_bool(g.pick(2) == 0)
                                    : conc_str(g.word());
      big.insert(c);
      if (g.pick(2) == 0) small.insert(c);
    }
    Value va = alpha(big);
    for (auto& c : big) CHECK(value_contains(va, c));
    CHECK(value_leq(alpha(small), va));
    // Bounded concretization stays inside the exact one.
    for (auto& c : gamma_bounded(va, bounds)) CHECK(value_contains(va, c));
  }
  CHECK(alpha({}).is_bot());
}

TEST_CASE("alpha is additive") {
  ValueGen g(912);
  auto draw = [&] {
    std::set<Concrete> s;
    int n = g.pick(5);
    for (int i = 0; i < n; ++i)
      s.insert(g.pick(3) == 0   ? conc_int(g.pick(9) - 4)
               : g.pick(2) == 0 ? conc_bool(g.pick(2) == 0)
                                : conc_str(g.word()));
    return s;
  };
  for (int iter = 0; iter < 100; ++iter) {
    std::set<Concrete> s1 = draw(), s2 = draw(), both = s1;
    both.insert(s2.begin(), s2.end());
    CHECK(value_eq(alpha(both), value_join(alpha(s1), alpha(s2))));
  }
}

TEST_CASE("numeral language signs") {
  CHECK(numeral_language_sign(from_literal("5")) == Sign::Pos);
  CHECK(numeral_language_sign(from_literal("007")) == Sign::Pos);
  CHECK(numeral_language_sign(from_literal("0")) == Sign::Zero);
  CHECK(numeral_language_sign(zeros_nonempty()) == Sign::Zero);
  CHECK(numeral_language_sign(from_literal("-5")) == Sign::Neg);
  CHECK(numeral_language_sign(from_literal("-0")) == Sign::Zero);
  CHECK(numeral_language_sign(lang_union(from_literal("0"), from_literal("7"))) == Sign::Top);
  CHECK(numeral_language_sign(concat(from_literal("5"), chars_star("5"))) == Sign::Pos);
  CHECK(numeral_language_sign(from_literal("x")) == Sign::Top);
  CHECK(numeral_language_sign(empty_language()) == Sign::Bot);
  CHECK(numeral_language_sign(digits_nonempty()) == Sign::Top);
}

TEST_CASE("abstract memory") {
  AbstractMemory m;
  CHECK(m.get("x").is_top());
  m.set("x", Value::of_sign(Sign::Pos));
  CHECK(value_eq(m.get("x"), Value::of_sign(Sign::Pos)));
  m.set("x", Value::top());
  CHECK(m.vars.empty());

  m.set("x", Value::of_sign(Sign::Pos));
  m.set("y", Value::bot());
  CHECK(m.is_bot());
  CHECK(m.get("x").is_bot());

  AbstractMemory a, b;
  a.set("x", Value::of_sign(Sign::Pos));
  a.set("s", Value::of_lang(from_literal("ab")));
  b.set("x", Value::of_sign(Sign::Zero));
  b.set("p", Value::of_bools(bool_only(true)));

  AbstractMemory j = mem_join(a, b);
  CHECK(value_eq(j.get("x"), Value::of_sign(Sign::Top)));
  CHECK(j.get("s").is_top());
  CHECK(j.get("p").is_top());
  CHECK(mem_leq(a, j));
  CHECK(mem_leq(b, j));
  CHECK_FALSE(mem_leq(j, a));

  AbstractMemory w = mem_widen(a, b, 2);
  CHECK(mem_leq(j, w));

  CHECK(mem_leq(AbstractMemory::bot(), a));
  CHECK_FALSE(mem_leq(a, AbstractMemory::bot()));
  CHECK(mem_eq(mem_join(AbstractMemory::bot(), a), a));
  CHECK(mem_eq(a, a));
  CHECK(mem_name(AbstractMemory::bot()) == "⊥");
  CHECK(mem_name(AbstractMemory::top()) == "⊤");

  // Cross-sort join widens the binding away rather than keeping a sum.
  AbstractMemory c;
  c.set("s", Value::of_sign(Sign::Pos));
  AbstractMemory sj = mem_join(a, c);
  CHECK(sj.get("s").is_top());

  AbstractMemory d;
  d.set("p", Value::of_bools(bool_only(true)));
  AbstractMemory met = mem_meet(a, d);
  CHECK(value_eq(met.get("x"), Value::of_sign(Sign::Pos)));
  CHECK(value_eq(met.get("p"), Value::of_bools(bool_only(true))));
  CHECK(mem_leq(met, a));
  CHECK(mem_leq(met, d));
  CHECK(mem_eq(mem_meet(a, AbstractMemory::top()), a));
  CHECK(mem_meet(a, AbstractMemory::bot()).is_bot());
  // Disjoint signs on the same variable empty the whole store.
  CHECK(mem_meet(a, b).is_bot());
}

TEST_CASE("collecting states") {
  MemorySet ms;
  CHECK(alpha_memories(ms).is_bot());

  ConcreteMemory e1{{"x", conc_int(1)}, {"s", conc_str("a")}};
  ConcreteMemory e2{{"x", conc_int(2)}, {"s", conc_str("ab")}};
  ms = {e1, e2};
  AbstractMemory am = alpha_memories(ms);
  CHECK(value_eq(am.get("x"), Value::of_sign(Sign::Pos)));
  CHECK(value_eq(am.get("s"),
                 Value::of_lang(lang_union(from_literal("a"), from_literal("ab")))));
  CHECK(mem_contains(am, e1));
  CHECK(mem_contains(am, e2));
  CHECK_FALSE(mem_contains(am, ConcreteMemory{{"x", conc_int(-1)}, {"s", conc_str("a")}}));
  CHECK_FALSE(mem_contains(am, ConcreteMemory{{"x", conc_int(1)}}));

  // A variable missing somewhere stays unconstrained.
  ms.insert(ConcreteMemory{{"x", conc_int(3)}});
  CHECK(alpha_memories(ms).get("s").is_top());

  CHECK_FALSE(mem_contains(AbstractMemory::bot(), ConcreteMemory{}));
  CHECK(mem_contains(AbstractMemory::top(), ConcreteMemory{}));
}

TEST_CASE("cartesian collecting memory") {
  CollectingMemory m;
  CHECK(m.get("x").empty());
  m.set("x", {conc_int(0), conc_int(4)});
  CHECK(m.get("x").size() == 2);
  m.set("y", {});
  CHECK(m.is_bot());
  CHECK(m.get("x").empty());

  CollectingMemory a, b;
  a.set("x", {conc_int(1)});
  b.set("x", {conc_int(2)});
  b.set("s", {conc_str("a")});
  CollectingMemory j = coll_join(a, b);
  CHECK(j.get("x") == std::set<Concrete>{conc_int(1), conc_int(2)});
  CHECK(j.get("s") == std::set<Concrete>{conc_str("a")});
  CHECK(coll_leq(a, j));
  CHECK(coll_leq(b, j));
  CHECK_FALSE(coll_leq(j, a));
  CHECK(coll_leq(CollectingMemory::bot(), a));
  CHECK_FALSE(coll_leq(a, CollectingMemory::bot()));
  CHECK(coll_eq(coll_join(CollectingMemory::bot(), a), a));
  CHECK(coll_name(CollectingMemory::bot()) == "⊥");
  CHECK(coll_name(a) == "{x ↦ {1}}");

  CHECK(alpha_collecting(CollectingMemory::bot()).is_bot());
  AbstractMemory aj = alpha_collecting(j);
  CHECK(value_eq(aj.get("x"), Value::of_sign(Sign::Pos)));
  CHECK(value_eq(aj.get("s"), Value::of_lang(from_literal("a"))));

  // Expanding to environments and recombining loses nothing cartesian.
  long long fuel = 1000;
  MemorySet envs = expand_memory(j, fuel);
  CHECK(envs.size() == 2);
  CHECK(coll_eq(to_cartesian(envs), j));
  CHECK(mem_eq(alpha_collecting(j), alpha_memories(envs)));
  CHECK(expand_memory(CollectingMemory::bot(), fuel).empty());
  CHECK(to_cartesian(MemorySet{}).is_bot());
}

TEST_CASE("collecting expression evaluation") {
  Bounds bounds;

  CollectingMemory m1;
  m1.set("x", {conc_int(0), conc_int(4)});
  CHECK(eval_collecting_expr(binary(ExprKind::Add, var_ref("x"), int_lit(1)), m1, bounds) ==
        std::set<Concrete>{conc_int(1), conc_int(5)});
  // Consistent draws: both occurrences of x see the same value.
  CHECK(eval_collecting_expr(binary(ExprKind::Add, var_ref("x"), var_ref("x")), m1, bounds) ==
        std::set<Concrete>{conc_int(0), conc_int(8)});

  CollectingMemory m2;
  m2.set("x", {conc_int(3), conc_int(7)});
  CHECK(eval_collecting_expr(binary(ExprKind::CmpLt, var_ref("x"), int_lit(5)), m2, bounds) ==
        std::set<Concrete>{conc_bool(false), conc_bool(true)});

  CollectingMemory m3;
  m3.set("s", {conc_str("a"), conc_str("b")});
  CHECK(eval_collecting_expr(binary(ExprKind::Concat, var_ref("s"), str_lit("c")), m3, bounds) ==
        std::set<Concrete>{conc_str("ac"), conc_str("bc")});

  // Unbound variables and unreachable states are stuck.
  CHECK(eval_collecting_expr(binary(ExprKind::Add, var_ref("y"), int_lit(1)), m1, bounds).empty());
  CHECK(eval_collecting_expr(int_lit(1), CollectingMemory::bot(), bounds).empty());
}

TEST_CASE("collecting interpreter") {
  Bounds bounds;
  auto run = [&](const std::string& text, const CollectingMemory& m, long long fuel = 100000) {
    return collecting_run(parse_fragment(text), m, bounds, fuel);
  };

  CollectingMemory x0;
  x0.set("x", {conc_int(0)});
  CHECK(run("x:=0; while(x<5){x:=x+1;} x:=7;", x0).get("x") == std::set<Concrete>{conc_int(7)});

  CollectingMemory seeds;
  seeds.set("i", {conc_int(0), conc_int(5)});
  CHECK(run("while(i<3){i:=i+1;}", seeds).get("i") ==
        std::set<Concrete>{conc_int(3), conc_int(5)});

  // Branch join keeps the untouched variable's full set.
  CollectingMemory forked;
  forked.set("x", {conc_int(0), conc_int(3)});
  CollectingMemory forked_out = run("if(x<1){y:=0;}{y:=1;}", forked);
  CHECK(forked_out.get("x") == std::set<Concrete>{conc_int(0), conc_int(3)});
  CHECK(forked_out.get("y") == std::set<Concrete>{conc_int(0), conc_int(1)});

  // eval discards strings that are not statements instead of getting stuck.
  CollectingMemory evm;
  evm.set("x", {conc_int(0)});
  evm.set("s", {conc_str("x:=5;"), conc_str("not code")});
  CollectingMemory evo = run("eval(s)", evm);
  CHECK(evo.get("x") == std::set<Concrete>{conc_int(5)});
  CHECK(evo.get("s") == std::set<Concrete>{conc_str("x:=5;")});

  // Computed argument, then one more level of reflection.
  CollectingMemory built;
  built.set("x", {conc_int(0)});
  CHECK(run("s := \"x:=\" + \"5;\"; eval(s)", built).get("x") ==
        std::set<Concrete>{conc_int(5)});
  CollectingMemory nested;
  nested.set("x", {conc_int(0)});
  nested.set("t", {conc_str("x:=1;")});
  CHECK(run("eval(\"eval(t);\")", nested).get("x") == std::set<Concrete>{conc_int(1)});

  CHECK(run("x:=1;", CollectingMemory::bot()).is_bot());
  CHECK_THROWS_AS(run("while(true){skip}", x0, 1000), FuelExhausted);
}

TEST_CASE("concrete evaluation") {
  ConcreteMemory env{{"x", conc_int(4)}, {"s", conc_str("abc")}, {"p", conc_bool(true)}};

  CHECK(eval_concrete_expr(binary(ExprKind::Add, var_ref("x"), int_lit(2)), env) == conc_int(6));
  CHECK(eval_concrete_expr(binary(ExprKind::Mul, int_lit(-2), int_lit(3)), env) == conc_int(-6));
  CHECK(eval_concrete_expr(binary(ExprKind::CmpLt, var_ref("x"), int_lit(5)), env) ==
        conc_bool(true));
  CHECK(eval_concrete_expr(binary(ExprKind::Concat, var_ref("s"), str_lit("d")), env) ==
        conc_str("abcd"));
  CHECK(eval_concrete_expr(binary(ExprKind::CmpEq, var_ref("s"), str_lit("abc")), env) ==
        conc_bool(true));
  CHECK(eval_concrete_expr(not_of(var_ref("p")), env) == conc_bool(false));

  // Both substring indices clamp into the word before the emptiness test.
  auto sub = [&](long long i, long long j) {
    return eval_concrete_expr(substr_of(var_ref("s"), int_lit(i), int_lit(j)), env);
  };
  CHECK(sub(0, 1) == conc_str("ab"));
  CHECK(sub(1, 1) == conc_str("b"));
  CHECK(sub(5, 9) == conc_str("c"));
  CHECK(sub(-2, -1) == conc_str("a"));
  CHECK(sub(2, 0) == conc_str(""));
  CHECK(sub(-5, 7) == conc_str("abc"));
  CHECK(eval_concrete_expr(substr_of(str_lit(""), int_lit(0), int_lit(2)), env) == conc_str(""));

  CHECK_THROWS_AS(eval_concrete_expr(binary(ExprKind::Add, int_lit(1), str_lit("a")), env),
                  EvalError);
  CHECK_THROWS_AS(eval_concrete_expr(var_ref("zz"), env), EvalError);
  CHECK_THROWS_AS(eval_concrete_expr(abs_num(Sign::Pos), env), EvalError);
  CHECK_THROWS_AS(eval_concrete_expr(binary(ExprKind::CmpEq, int_lit(1), str_lit("1")), env),
                  EvalError);
}

TEST_CASE("abstract evaluation pins") {
  AbstractMemory m;
  m.set("x", Value::of_sign(Sign::Pos));
  m.set("s", Value::of_lang(from_literal("x:=5")));
  m.set("p", Value::of_bools(bool_only(true)));

  auto val = [&](const Expr& e) { return eval_abstract_expr(e, m); };

  CHECK(value_eq(val(binary(ExprKind::Add, var_ref("x"), int_lit(1))), Value::of_sign(Sign::Pos)));
  CHECK(value_eq(val(binary(ExprKind::Sub, var_ref("x"), var_ref("x"))),
                 Value::of_sign(Sign::Top)));
  CHECK(value_eq(val(binary(ExprKind::Mul, int_lit(0), var_ref("x"))),
                 Value::of_sign(Sign::Zero)));

  CHECK(value_eq(val(binary(ExprKind::CmpLt, var_ref("x"), int_lit(0))),
                 Value::of_bools(bool_only(false))));
  CHECK(value_eq(val(binary(ExprKind::CmpGt, var_ref("x"), int_lit(0))),
                 Value::of_bools(bool_only(true))));
  CHECK(value_eq(val(binary(ExprKind::CmpEq, var_ref("x"), int_lit(0))),
                 Value::of_bools(bool_only(false))));
  CHECK(value_eq(val(binary(ExprKind::CmpLt, var_ref("x"), var_ref("x"))),
                 Value::of_bools(bool_both())));

  CHECK(value_eq(val(binary(ExprKind::Concat, var_ref("s"), str_lit(";"))),
                 Value::of_lang(from_literal("x:=5;"))));
  CHECK(value_eq(val(binary(ExprKind::CmpEq, var_ref("s"), str_lit("x:=5"))),
                 Value::of_bools(bool_only(true))));
  CHECK(value_eq(val(binary(ExprKind::CmpEq, var_ref("s"), str_lit("other"))),
                 Value::of_bools(bool_only(false))));
  CHECK(value_eq(val(binary(ExprKind::CmpEq, abs_str(chars_plus("a")), str_lit("aa"))),
                 Value::of_bools(bool_both())));

  CHECK(value_eq(val(binary(ExprKind::And, var_ref("p"), bool_lit(false))),
                 Value::of_bools(bool_only(false))));
  CHECK(value_eq(val(not_of(var_ref("p"))), Value::of_bools(bool_only(false))));

  // Literal indices keep the substring exact.
  CHECK(value_eq(val(substr_of(var_ref("s"), int_lit(0), int_lit(1))),
                 Value::of_lang(from_literal("x:"))));
  CHECK(value_eq(val(substr_of(var_ref("s"), int_lit(9), int_lit(9))),
                 Value::of_lang(from_literal("5"))));
  // An unknown index falls back to factors of the subject.
  Value fuzzy = val(substr_of(var_ref("s"), var_ref("y"), int_lit(3)));
  CHECK(value_leq(Value::of_lang(from_literal(":=5")), fuzzy));
  CHECK(value_leq(Value::of_lang(from_literal("x:=5")), fuzzy));

  // Wrong sorts are stuck, unknowns stay permissive.
  CHECK(val(binary(ExprKind::Add, var_ref("x"), var_ref("s"))).is_bot());
  CHECK(val(binary(ExprKind::And, var_ref("x"), var_ref("p"))).is_bot());
  CHECK(value_eq(val(binary(ExprKind::Add, var_ref("x"), var_ref("unbound"))),
                 Value::of_sign(Sign::Top)));
  CHECK(value_eq(val(binary(ExprKind::CmpEq, var_ref("unbound"), var_ref("unbound"))),
                 Value::of_bools(bool_both())));

  // Abstract leaves evaluate to their own denotation.
  CHECK(value_eq(val(abs_num(Sign::Neg)), Value::of_sign(Sign::Neg)));
  CHECK(value_eq(val(bulk_num(concat(from_literal("5"), chars_star("5")))),
                 Value::of_sign(Sign::Pos)));
  CHECK(value_eq(val(bulk_str(from_literal("ab"))), Value::of_lang(from_literal("ab"))));

  CHECK(eval_abstract_expr(int_lit(1), AbstractMemory::bot()).is_bot());
}

TEST_CASE("set evaluation pins") {
  Bounds bounds{0, 6, 3, "ab5"};
  ConcreteMemory env{{"x", conc_int(2)}};

  // Variables draw consistently; abstract leaves draw independently.
  CHECK(eval_expr_set(binary(ExprKind::Add, var_ref("x"), var_ref("x")), env, bounds) ==
        std::set<Concrete>{conc_int(4)});
  Bounds small{1, 3, 3, "ab5"};
  std::set<Concrete> sums =
      eval_expr_set(binary(ExprKind::Add, abs_num(Sign::Pos), abs_num(Sign::Pos)), env, small);
  CHECK(sums == std::set<Concrete>{conc_int(2), conc_int(3), conc_int(4), conc_int(5),
                                   conc_int(6)});

  std::set<Concrete> bulk = eval_expr_set(
      binary(ExprKind::Add, bulk_num(lang_union(from_literal("0"), from_literal("5"))),
             int_lit(1)),
      env, bounds);
  CHECK(bulk == std::set<Concrete>{conc_int(1), conc_int(6)});

  // Stuck combinations vanish.
  CHECK(eval_expr_set(binary(ExprKind::Add, int_lit(1), str_lit("a")), env, bounds).empty());
  CHECK(eval_expr_set(var_ref("unbound"), env, bounds).empty());
}

TEST_CASE("abstract evaluation covers drawn concrete runs") {
  Bounds bounds;
  const std::vector<std::pair<std::string, VarSort>> pool{
      {"x", VarSort::Int}, {"y", VarSort::Int}, {"s", VarSort::Str},
      {"t", VarSort::Str}, {"p", VarSort::Bool}, {"q", VarSort::Bool}};

  for (int iter = 0; iter < 150; ++iter) {
    ValueGen g(9103u + static_cast<unsigned>(iter));
    AbstractMemory mem;
    for (auto& [name, sort] : pool) mem.set(name, g.value_of(sort));
    Expr e = g.expr(2);
    Value abstract = eval_abstract_expr(e, mem);

    std::map<std::string, std::vector<Concrete>> draws;
    bool feasible = !mem.is_bot();
    for (auto& [name, sort] : pool) {
      if (!feasible) break;
      auto gamma = gamma_bounded(mem.get(name), bounds);
      if (gamma.empty()) {
        feasible = false;
        break;
      }
      draws[name].assign(gamma.begin(), gamma.end());
    }
    if (!feasible) continue;

    for (int draw = 0; draw < 12; ++draw) {
      ConcreteMemory env;
      for (auto& [name, options] : draws)
        env[name] = options[g.pick(static_cast<int>(options.size()))];
      REQUIRE(mem_contains(mem, env));
      for (auto& result : eval_expr_set(e, env, bounds)) {
        CAPTURE(iter);
        CAPTURE(concrete_name(result));
        REQUIRE(value_contains(abstract, result));
      }
    }
  }
}

}  // TEST_SUITE
