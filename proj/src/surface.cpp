#include "hcolc/surface.hpp"

#include <json.hpp>

namespace hcolc::surface {

using json = nlohmann::json;

Result<Language> language_from_name(std::string_view name) {
  if (name == "hcol") return Language::Hcol;
  if (name == "shcol") return Language::Shcol;
  if (name == "mshcol") return Language::Mshcol;
  if (name == "dhcol") return Language::Dhcol;
  return Result<Language>::err(ErrKind::ParseError, "unknown language " + std::string(name));
}

// ---- reader -----------------------------------------------------------------

namespace {

struct Sexp {
  bool is_atom = false;
  std::string atom;
  std::vector<Sexp> items;
  size_t line = 1, col = 1;
};

struct Reader {
  std::string_view src;
  size_t pos = 0, line = 1, col = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error{ErrKind::ParseError,
                msg + " at line " + std::to_string(line) + ", column " + std::to_string(col)};
  }

  void advance() {
    if (pos < src.size() && src[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_ws() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == ';') {
        while (pos < src.size() && src[pos] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ',') {
        advance();
      } else {
        break;
      }
    }
  }

  Sexp read() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of input");
    Sexp s;
    s.line = line;
    s.col = col;
    if (src[pos] == '(') {
      advance();
      while (true) {
        skip_ws();
        if (pos >= src.size()) fail("missing closing parenthesis");
        if (src[pos] == ')') {
          advance();
          break;
        }
        s.items.push_back(read());
      }
      return s;
    }
    if (src[pos] == ')') fail("unexpected ')'");
    s.is_atom = true;
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '(' || c == ')' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ',' ||
          c == ';')
        break;
      s.atom.push_back(c);
      advance();
    }
    return s;
  }
};

[[noreturn]] void fail_632at(const Sexp& s, const std::string& msg) {
  throw Error{ErrKind::ParseError,
              msg + " at line " + std::to_string(s.line) + ", column " + std::to_string(s.col)};
}
#define fail_at fail_632at

const Sexp& item(const Sexp& s, size_t i) {
  if (s.is_atom || i >= s.items.size()) fail_at(s, "missing operand " + std::to_string(i));
  return s.items[i];
}

std::string head(const Sexp& s) {
  if (s.is_atom || s.items.empty() || !s.items[0].is_atom) fail_at(s, "expected an operator form");
  return s.items[0].atom;
}

void arity(const Sexp& s, size_t n) {
  if (s.items.size() != n + 1)
    fail_at(s, "'" + head(s) + "' expects " + std::to_string(n) + " operands");
}

uint64_t nat_atom(const Sexp& s) {
  if (!s.is_atom) fail_at(s, "expected a natural number");
  try {
    size_t used = 0;
    unsigned long long v = std::stoull(s.atom, &used);
    if (used != s.atom.size()) fail_at(s, "bad natural number");
    return v;
  } catch (const std::exception&) {
    fail_at(s, "bad natural number");
  }
}

BigInt bignat_atom(const Sexp& s) {
  if (!s.is_atom) fail_at(s, "expected a natural number");
  try {
    return BigInt::from_decimal(s.atom);
  } catch (const std::exception&) {
    fail_at(s, "bad natural number");
  }
}

CarrierLit lit_atom(const Sexp& s) {
  if (!s.is_atom) fail_at(s, "expected a numeric literal");
  try {
    return CarrierLit::of(Rational::parse(s.atom));
  } catch (const std::exception&) {
    fail_at(s, "bad numeric literal");
  }
}

IndexExpr index_expr(const Sexp& s) {
  if (s.is_atom) {
    if (!s.atom.empty() && s.atom[0] == '$') {
      try {
        return IndexExpr::fam(std::stoull(s.atom.substr(1)));
      } catch (const std::exception&) {
        fail_at(s, "bad family index");
      }
    }
    return IndexExpr::constant(nat_atom(s));
  }
  std::string h = head(s);
  arity(s, 2);
  if (h == "+") return IndexExpr::add(index_expr(item(s, 1)), index_expr(item(s, 2)));
  if (h == "*") return IndexExpr::mul(index_expr(item(s, 1)), index_expr(item(s, 2)));
  fail_at(s, "bad index expression");
}

// ---- scalar functions -------------------------------------------------------

CTExprPtr ct_expr(const Sexp& s, const std::vector<std::string>& args) {
  if (s.is_atom) {
    for (size_t i = 0; i < args.size(); ++i)
      if (s.atom == args[i]) return ct_arg(static_cast<uint32_t>(i));
    return ct_lit(lit_atom(s));
  }
  std::string h = head(s);
  if (h == "abs") {
    arity(s, 1);
    return ct_unary(CTExpr::Tag::Abs, ct_expr(item(s, 1), args));
  }
  if (h == "nth") {
    arity(s, 2);
    const Sexp& name = item(s, 1);
    if (!name.is_atom) fail_at(s, "expected a parameter name");
    return ct_param_nth(name.atom, index_expr(item(s, 2)));
  }
  CTExpr::Tag t;
  if (h == "plus") t = CTExpr::Tag::Plus;
  else if (h == "sub") t = CTExpr::Tag::Sub;
  else if (h == "mul") t = CTExpr::Tag::Mult;
  else if (h == "min") t = CTExpr::Tag::Min;
  else if (h == "max") t = CTExpr::Tag::Max;
  else if (h == "lt") t = CTExpr::Tag::ZLess;
  else fail_at(s, "unknown scalar operation '" + h + "'");
  arity(s, 2);
  return ct_binary(t, ct_expr(item(s, 1), args), ct_expr(item(s, 2), args));
}

// indexed = the first lambda binder is the vector index, not a value
ScalarFun scalar_fun(const Sexp& s, size_t value_args, bool indexed) {
  if (s.is_atom) {
    if (s.atom == "plus") return sf_plus();
    if (s.atom == "sub") return sf_sub();
    if (s.atom == "mul") return sf_mult();
    if (s.atom == "min") return sf_min();
    if (s.atom == "max") return sf_max();
    if (s.atom == "lt") return sf_zless();
    if (s.atom == "abs") return sf_abs();
    fail_at(s, "unknown function '" + s.atom + "'");
  }
  if (head(s) != "fun") fail_at(s, "expected a function");
  size_t binders = s.items.size() - 2;
  size_t expect = value_args + (indexed ? 1 : 0);
  if (binders != expect)
    fail_at(s, "function expects " + std::to_string(expect) + " parameters");
  std::vector<std::string> args;
  for (size_t i = 0; i < value_args; ++i) {
    const Sexp& b = item(s, 1 + (indexed ? 1 : 0) + i);
    if (!b.is_atom) fail_at(s, "bad parameter name");
    args.push_back(b.atom);
  }
  return ScalarFun{static_cast<uint32_t>(value_args),
                   ct_expr(s.items.back(), args)};
}

// ---- hcol -------------------------------------------------------------------

hcol::VecOperand vec_operand(const Sexp& s) {
  std::string h = head(s);
  if (h == "vec") {
    std::vector<CarrierLit> lits;
    for (size_t i = 1; i < s.items.size(); ++i) lits.push_back(lit_atom(s.items[i]));
    return hcol::VecOperand::literal(std::move(lits));
  }
  if (h == "param") {
    arity(s, 2);
    const Sexp& name = item(s, 1);
    if (!name.is_atom) fail_at(s, "expected a parameter name");
    return hcol::VecOperand::param(name.atom, nat_atom(item(s, 2)));
  }
  fail_at(s, "expected (vec ...) or (param name size)");
}

hcol::HExprPtr hcol_expr(const Sexp& s) {
  using namespace hcolc::hcol;
  std::string h = head(s);
  if (h == "pointwise") {
    arity(s, 2);
    return h_pointwise(nat_atom(item(s, 1)), scalar_fun(item(s, 2), 1, true));
  }
  if (h == "atomic") {
    arity(s, 1);
    return h_atomic(scalar_fun(item(s, 1), 1, false));
  }
  if (h == "scalarprod") {
    arity(s, 1);
    return h_scalarprod(nat_atom(item(s, 1)));
  }
  if (h == "binop") {
    arity(s, 2);
    return h_binop(nat_atom(item(s, 1)), scalar_fun(item(s, 2), 2, true));
  }
  if (h == "reduction") {
    arity(s, 3);
    return h_reduction(nat_atom(item(s, 3)), scalar_fun(item(s, 1), 2, false),
                       lit_atom(item(s, 2)));
  }
  if (h == "evalpoly") {
    arity(s, 1);
    return h_evalpolynomial(vec_operand(item(s, 1)));
  }
  if (h == "prepend") {
    arity(s, 2);
    return h_prepend(vec_operand(item(s, 1)), nat_atom(item(s, 2)));
  }
  if (h == "append") {
    arity(s, 2);
    return h_append(vec_operand(item(s, 1)), nat_atom(item(s, 2)));
  }
  if (h == "monomial") {
    arity(s, 1);
    return h_monomial_enumerator(nat_atom(item(s, 1)));
  }
  if (h == "inductor") {
    arity(s, 3);
    return h_inductor(nat_atom(item(s, 1)), scalar_fun(item(s, 2), 2, false), lit_atom(item(s, 3)));
  }
  if (h == "induction") {
    arity(s, 3);
    return h_induction(nat_atom(item(s, 1)), scalar_fun(item(s, 2), 2, false), lit_atom(item(s, 3)));
  }
  if (h == "infnorm") {
    arity(s, 1);
    return h_infinity_norm(nat_atom(item(s, 1)));
  }
  if (h == "chebyshev") {
    arity(s, 1);
    return h_chebyshev_distance(nat_atom(item(s, 1)));
  }
  if (h == "vminus") {
    arity(s, 1);
    return h_vminus(nat_atom(item(s, 1)));
  }
  if (h == "cross") {
    arity(s, 2);
    return h_cross(hcol_expr(item(s, 1)), hcol_expr(item(s, 2)));
  }
  if (h == "stack") {
    arity(s, 2);
    return h_stack(hcol_expr(item(s, 1)), hcol_expr(item(s, 2)));
  }
  if (h == "compose") {
    arity(s, 2);
    return h_compose(hcol_expr(item(s, 1)), hcol_expr(item(s, 2)));
  }
  if (h == "tless") {
    arity(s, 2);
    return h_tless(hcol_expr(item(s, 1)), hcol_expr(item(s, 2)));
  }
  fail_at(s, "unknown operator '" + h + "'");
}

// ---- sigma -------------------------------------------------------------------

sigma::IndexMap index_map(const Sexp& s, size_t codomain) {
  if (head(s) != "map") fail_at(s, "expected (map k ...)");
  std::vector<size_t> image;
  for (size_t i = 1; i < s.items.size(); ++i) image.push_back(nat_atom(s.items[i]));
  auto m = sigma::IndexMap::make(std::move(image), codomain);
  if (!m.ok()) fail_at(s, m.error().message);
  return m.value();
}

sigma::SHExprPtr sh_expr(const Sexp& s) {
  using namespace hcolc::sigma;
  std::string h = head(s);
  if (h == "embed") {
    arity(s, 3);
    return sh_embed(lit_atom(item(s, 1)), nat_atom(item(s, 2)), index_expr(item(s, 3)));
  }
  if (h == "pick") {
    arity(s, 3);
    return sh_pick(lit_atom(item(s, 1)), nat_atom(item(s, 2)), index_expr(item(s, 3)));
  }
  if (h == "scatter") {
    arity(s, 4);
    size_t m = nat_atom(item(s, 3));
    return sh_scatter(lit_atom(item(s, 1)), nat_atom(item(s, 2)), m, index_map(item(s, 4), m));
  }
  if (h == "gather") {
    arity(s, 4);
    size_t n = nat_atom(item(s, 2));
    return sh_gather(lit_atom(item(s, 1)), n, nat_atom(item(s, 3)), index_map(item(s, 4), n));
  }
  if (h == "lift") {
    arity(s, 2);
    return sh_lift(hcol_expr(item(s, 1)), lit_atom(item(s, 2)));
  }
  if (h == "spointwise") {
    arity(s, 3);
    return sh_pointwise(lit_atom(item(s, 1)), nat_atom(item(s, 2)), scalar_fun(item(s, 3), 1, true));
  }
  if (h == "sbinop") {
    arity(s, 3);
    return sh_binop(lit_atom(item(s, 1)), nat_atom(item(s, 2)), scalar_fun(item(s, 3), 2, true));
  }
  if (h == "sinductor") {
    arity(s, 4);
    return sh_inductor(lit_atom(item(s, 1)), index_expr(item(s, 2)),
                       scalar_fun(item(s, 3), 2, false), lit_atom(item(s, 4)));
  }
  if (h == "apply2union") {
    arity(s, 4);
    return sh_apply2union(lit_atom(item(s, 1)), scalar_fun(item(s, 2), 2, false),
                          sh_expr(item(s, 3)), sh_expr(item(s, 4)));
  }
  if (h == "safecast") {
    arity(s, 1);
    return sh_safecast(sh_expr(item(s, 1)));
  }
  if (h == "unsafecast") {
    arity(s, 1);
    return sh_unsafecast(sh_expr(item(s, 1)));
  }
  if (h == "scompose") {
    arity(s, 2);
    return sh_compose(sh_expr(item(s, 1)), sh_expr(item(s, 2)));
  }
  if (h == "ireduction") {
    arity(s, 4);
    return sh_ireduction(lit_atom(item(s, 1)), scalar_fun(item(s, 2), 2, false),
                         nat_atom(item(s, 3)), sh_expr(item(s, 4)));
  }
  if (h == "iunion") {
    arity(s, 4);
    return sh_iunion(lit_atom(item(s, 1)), scalar_fun(item(s, 2), 2, false), nat_atom(item(s, 3)),
                     sh_expr(item(s, 4)));
  }
  fail_at(s, "unknown operator '" + h + "'");
}

// ---- mshcol -------------------------------------------------------------------

mshcol::MSHExprPtr msh_expr(const Sexp& s) {
  using namespace hcolc::mshcol;
  std::string h = head(s);
  if (h == "membed") {
    arity(s, 2);
    return msh_embed(nat_atom(item(s, 1)), index_expr(item(s, 2)));
  }
  if (h == "mpick") {
    arity(s, 2);
    return msh_pick(nat_atom(item(s, 1)), index_expr(item(s, 2)));
  }
  if (h == "mpointwise") {
    arity(s, 2);
    return msh_pointwise(nat_atom(item(s, 1)), scalar_fun(item(s, 2), 1, true));
  }
  if (h == "mbinop") {
    arity(s, 2);
    return msh_binop(nat_atom(item(s, 1)), scalar_fun(item(s, 2), 2, true));
  }
  if (h == "minductor") {
    arity(s, 3);
    return msh_inductor(index_expr(item(s, 1)), scalar_fun(item(s, 2), 2, false),
                        lit_atom(item(s, 3)));
  }
  if (h == "mapply2union") {
    arity(s, 3);
    return msh_apply2union(scalar_fun(item(s, 1), 2, false), msh_expr(item(s, 2)),
                           msh_expr(item(s, 3)));
  }
  if (h == "mcompose") {
    arity(s, 2);
    return msh_compose(msh_expr(item(s, 1)), msh_expr(item(s, 2)));
  }
  if (h == "mireduction") {
    arity(s, 4);
    return msh_ireduction(lit_atom(item(s, 1)), scalar_fun(item(s, 2), 2, false),
                          nat_atom(item(s, 3)), msh_expr(item(s, 4)));
  }
  if (h == "miunion") {
    arity(s, 2);
    return msh_iunion(nat_atom(item(s, 1)), msh_expr(item(s, 2)));
  }
  fail_at(s, "unknown operator '" + h + "'");
}

// ---- dhcol --------------------------------------------------------------------

dhcol::PExpr pexpr(const Sexp& s) {
  if (head(s) != "pvar") fail_at(s, "expected (pvar k)");
  arity(s, 1);
  return dhcol::PExpr{nat_atom(item(s, 1))};
}

dhcol::NExprPtr nexpr(const Sexp& s) {
  using namespace hcolc::dhcol;
  if (s.is_atom) return n_const(bignat_atom(s));
  std::string h = head(s);
  if (h == "nvar") {
    arity(s, 1);
    return n_var(nat_atom(item(s, 1)));
  }
  if (h == "nconst") {
    arity(s, 1);
    return n_const(bignat_atom(item(s, 1)));
  }
  NOp op;
  if (h == "ndiv") op = NOp::Div;
  else if (h == "nmod") op = NOp::Mod;
  else if (h == "nplus") op = NOp::Plus;
  else if (h == "nminus") op = NOp::Minus;
  else if (h == "nmult") op = NOp::Mult;
  else if (h == "nmin") op = NOp::Min;
  else if (h == "nmax") op = NOp::Max;
  else fail_at(s, "unknown integer operation '" + h + "'");
  arity(s, 2);
  return n_bin(op, nexpr(item(s, 1)), nexpr(item(s, 2)));
}

dhcol::MExpr mexpr(const Sexp& s) {
  using namespace hcolc::dhcol;
  std::string h = head(s);
  if (h == "mptr") {
    arity(s, 1);
    return m_deref(pexpr(item(s, 1)));
  }
  if (h == "mconst") {
    arity(s, 2);
    std::map<uint64_t, CarrierLit> cells;
    const Sexp& blk = item(s, 1);
    if (blk.is_atom) fail_at(s, "expected a cell list");
    for (const auto& cell : blk.items) {
      if (cell.is_atom || cell.items.size() != 2) fail_at(s, "expected (offset value)");
      cells[nat_atom(cell.items[0])] = lit_atom(cell.items[1]);
    }
    return m_const(std::move(cells), bignat_atom(item(s, 2)));
  }
  fail_at(s, "expected a memory expression");
}

dhcol::AExprPtr aexpr(const Sexp& s) {
  using namespace hcolc::dhcol;
  if (s.is_atom) return a_const(lit_atom(s));
  std::string h = head(s);
  if (h == "avar") {
    arity(s, 1);
    return a_var(nat_atom(item(s, 1)));
  }
  if (h == "aconst") {
    arity(s, 1);
    return a_const(lit_atom(item(s, 1)));
  }
  if (h == "anth") {
    arity(s, 2);
    return a_nth(mexpr(item(s, 1)), nexpr(item(s, 2)));
  }
  if (h == "aabs") {
    arity(s, 1);
    return a_abs(aexpr(item(s, 1)));
  }
  AOp op;
  if (h == "aplus") op = AOp::Plus;
  else if (h == "aminus") op = AOp::Minus;
  else if (h == "amult") op = AOp::Mult;
  else if (h == "amin") op = AOp::Min;
  else if (h == "amax") op = AOp::Max;
  else if (h == "azless") op = AOp::ZLess;
  else fail_at(s, "unknown scalar operation '" + h + "'");
  arity(s, 2);
  return a_bin(op, aexpr(item(s, 1)), aexpr(item(s, 2)));
}

dhcol::MemRef memref(const Sexp& s) {
  if (s.is_atom || s.items.size() != 2) fail_at(s, "expected ((pvar k) index)");
  return dhcol::MemRef{pexpr(s.items[0]), nexpr(s.items[1])};
}

dhcol::DshPtr dsh_expr(const Sexp& s) {
  using namespace hcolc::dhcol;
  std::string h = head(s);
  if (h == "nop") return d_nop();
  if (h == "assign") {
    arity(s, 2);
    return d_assign(memref(item(s, 1)), memref(item(s, 2)));
  }
  if (h == "imap") {
    arity(s, 4);
    return d_imap(bignat_atom(item(s, 1)), pexpr(item(s, 2)), pexpr(item(s, 3)), aexpr(item(s, 4)));
  }
  if (h == "binop") {
    arity(s, 4);
    return d_binop(bignat_atom(item(s, 1)), pexpr(item(s, 2)), pexpr(item(s, 3)), aexpr(item(s, 4)));
  }
  if (h == "memmap2") {
    arity(s, 5);
    return d_memmap2(bignat_atom(item(s, 1)), pexpr(item(s, 2)), pexpr(item(s, 3)),
                     pexpr(item(s, 4)), aexpr(item(s, 5)));
  }
  if (h == "power") {
    arity(s, 5);
    return d_power(nexpr(item(s, 1)), memref(item(s, 2)), memref(item(s, 3)), aexpr(item(s, 4)),
                   lit_atom(item(s, 5)));
  }
  if (h == "loop") {
    arity(s, 2);
    return d_loop(bignat_atom(item(s, 1)), dsh_expr(item(s, 2)));
  }
  if (h == "alloc") {
    arity(s, 2);
    return d_alloc(bignat_atom(item(s, 1)), dsh_expr(item(s, 2)));
  }
  if (h == "meminit") {
    arity(s, 2);
    return d_meminit(pexpr(item(s, 1)), lit_atom(item(s, 2)));
  }
  if (h == "seq") {
    arity(s, 2);
    return d_seq(dsh_expr(item(s, 1)), dsh_expr(item(s, 2)));
  }
  fail_at(s, "unknown operator '" + h + "'");
}

// ---- family-index closedness ---------------------------------------------------

bool index_closed(const IndexExpr& ix, size_t depth) {
  switch (ix.tag) {
    case IndexExpr::Tag::Const: return true;
    case IndexExpr::Tag::FamVar: return ix.k < depth;
    default: return index_closed(*ix.a, depth) && index_closed(*ix.b, depth);
  }
}

bool ct_closed(const CTExprPtr& e, size_t depth) {
  if (!e) return true;
  if (e->tag == CTExpr::Tag::ParamNth && !index_closed(e->pidx, depth)) return false;
  return ct_closed(e->a, depth) && ct_closed(e->b, depth);
}

bool sh_closed(const sigma::SHExprPtr& e, size_t depth) {
  if (!e) return true;
  if (!index_closed(e->b, depth) || !index_closed(e->count, depth)) return false;
  if (!ct_closed(e->fn.body, depth) || !ct_closed(e->dot.body, depth)) return false;
  if (!sh_closed(e->f, depth) || !sh_closed(e->g, depth)) return false;
  if (e->fam.body) return sh_closed(e->fam.body, depth + 1);
  return true;
}

bool msh_closed(const mshcol::MSHExprPtr& e, size_t depth) {
  if (!e) return true;
  if (!index_closed(e->b, depth) || !index_closed(e->count, depth)) return false;
  if (!ct_closed(e->fn.body, depth) || !ct_closed(e->dot.body, depth)) return false;
  if (!msh_closed(e->f, depth) || !msh_closed(e->g, depth)) return false;
  if (e->fam.body) return msh_closed(e->fam.body, depth + 1);
  return true;
}

}  // namespace

Result<Parsed> parse_program(std::string_view text, Language lang) {
  using R = Result<Parsed>;
  try {
    Reader rd{text};
    Sexp s = rd.read();
    rd.skip_ws();
    if (rd.pos != text.size()) rd.fail("trailing input");
    Parsed p;
    p.lang = lang;
    switch (lang) {
      case Language::Hcol: p.h = hcol_expr(s); break;
      case Language::Shcol:
        p.sh = sh_expr(s);
        if (!sh_closed(p.sh, 0))
          return R::err(ErrKind::ParseError, "unbound family index in a top-level operator");
        break;
      case Language::Mshcol:
        p.msh = msh_expr(s);
        if (!msh_closed(p.msh, 0))
          return R::err(ErrKind::ParseError, "unbound family index in a top-level operator");
        break;
      case Language::Dhcol: p.dsh = dsh_expr(s); break;
    }
    return p;
  } catch (const Error& e) {
    return R(e);
  }
}

Result<std::vector<CarrierValue>> parse_values(std::string_view text, CarrierKind kind) {
  using R = Result<std::vector<CarrierValue>>;
  std::vector<CarrierValue> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == ',' || text[i] == '\t' ||
                               text[i] == '\n' || text[i] == '\r'))
      ++i;
    if (i >= text.size()) break;
    size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != ',' && text[j] != '\t' &&
           text[j] != '\n' && text[j] != '\r')
      ++j;
    try {
      Rational q = Rational::parse(text.substr(i, j - i));
      out.push_back(kind == CarrierKind::Rational ? CarrierValue(q) : CarrierValue(q.to_double()));
    } catch (const std::exception& e) {
      return R::err(ErrKind::ParseError, std::string("bad value: ") + e.what());
    }
    i = j;
  }
  return out;
}

std::string print_program(const Parsed& p) {
  switch (p.lang) {
    case Language::Hcol: return hcol::to_string(p.h);
    case Language::Shcol: return sigma::to_string(p.sh);
    case Language::Mshcol: return mshcol::to_string(p.msh);
    case Language::Dhcol: return dhcol::to_string(p.dsh);
  }
  return "";
}

// ---- JSON -----------------------------------------------------------------------

namespace {

json dims_json(const Result<hcol::Dims>& d) {
  if (!d.ok()) return json{{"error", d.error().message}};
  return json{{"in", d.value().in}, {"out", d.value().out}};
}

}  // namespace

json to_json(const hcol::HExprPtr& e) {
  json j;
  j["node"] = hcol::to_string(e);
  j["dims"] = dims_json(hcol::dims(e));
  if (e->f) j["f"] = to_json(e->f);
  if (e->g) j["g"] = to_json(e->g);
  return j;
}

json to_json(const sigma::SHExprPtr& e) {
  json j;
  j["node"] = sigma::to_string(e);
  j["dims"] = dims_json(sigma::dims(e));
  try {
    auto c = sigma::sparsity_contract(e);
    if (c.ok()) {
      j["in_index_set"] = c.value().in;
      j["out_index_set"] = c.value().out;
    }
  } catch (const std::logic_error&) {
    // family bodies have free index variables; contracts appear on closed nodes
  }
  if (e->f) j["f"] = to_json(e->f);
  if (e->g) j["g"] = to_json(e->g);
  if (e->fam.body) j["family"] = json{{"size", e->fam.size}, {"body", to_json(e->fam.body)}};
  return j;
}

json to_json(const mshcol::MSHExprPtr& e) {
  json j;
  j["node"] = mshcol::to_string(e);
  j["dims"] = dims_json(mshcol::dims(e));
  try {
    auto c = mshcol::msh_contract(e);
    if (c.ok()) {
      j["in_index_set"] = c.value().in;
      j["out_index_set"] = c.value().out;
    }
  } catch (const std::logic_error&) {
  }
  if (e->f) j["f"] = to_json(e->f);
  if (e->g) j["g"] = to_json(e->g);
  if (e->fam.body) j["family"] = json{{"size", e->fam.size}, {"body", to_json(e->fam.body)}};
  return j;
}

json to_json(const dhcol::DshPtr& e) {
  json j;
  j["op"] = dhcol::to_string(e);
  return j;
}

json to_json(const mshcol::MemBlock& b) {
  json j = json::object();
  for (const auto& [k, v] : b.cells()) j[std::to_string(k)] = v.to_string();
  return j;
}

json to_json(const mshcol::Memory& m) {
  json j = json::object();
  for (const auto& [addr, blk] : m.blocks()) j[std::to_string(addr)] = to_json(blk);
  return j;
}

json program_json(const Parsed& p) {
  switch (p.lang) {
    case Language::Hcol: return to_json(p.h);
    case Language::Shcol: return to_json(p.sh);
    case Language::Mshcol: return to_json(p.msh);
    case Language::Dhcol: return to_json(p.dsh);
  }
  return {};
}

}  // namespace hcolc::surface
