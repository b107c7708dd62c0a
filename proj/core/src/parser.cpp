#include "bond/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <map>
#include <set>

namespace bond {

namespace {

struct Token {
  enum class Kind { Ident, Number, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  double number = 0.0;
  SourceSpan span;
};

const std::set<std::string, std::less<>> kKeywords = {"species", "law",  "affinity", "mixture",
                                                      "param",   "new",  "in",       "at"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token tok;
    tok.span = SourceSpan{i, i, line, col};
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      tok.kind = Token::Kind::Ident;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && text[j] == '.' && j + 1 < text.size() &&
          std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
          while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
          j = k;
        }
      }
      tok.kind = Token::Kind::Number;
      tok.text = std::string(text.substr(i, j - i));
      tok.number = std::strtod(tok.text.c_str(), nullptr);
      advance(j - i);
    } else if (c == '|' && i + 1 < text.size() && text[i + 1] == '|') {
      tok.kind = Token::Kind::Punct;
      tok.text = "||";
      advance(2);
    } else if (std::string_view("(),;=.@+|&{}*/-").find(c) != std::string_view::npos) {
      tok.kind = Token::Kind::Punct;
      tok.text = std::string(1, c);
      advance(1);
    } else {
      std::size_t len = 1;
      if (static_cast<unsigned char>(c) >= 0x80) {
        while (i + len < text.size() && (static_cast<unsigned char>(text[i + len]) & 0xC0) == 0x80) ++len;
      }
      SourceSpan span{i, i + len, line, col};
      throw ParseError(ErrorCode::Parse, span,
                       "unexpected character '" + std::string(text.substr(i, len)) + "'");
    }
    tok.span.end = i;
    out.push_back(std::move(tok));
  }
  Token end;
  end.kind = Token::Kind::End;
  end.span = SourceSpan{text.size(), text.size(), line, col};
  out.push_back(end);
  return out;
}

std::string describe_token(const Token& t) {
  switch (t.kind) {
    case Token::Kind::End: return "end of input";
    case Token::Kind::Ident: return "identifier '" + t.text + "'";
    case Token::Kind::Number: return "number '" + t.text + "'";
    case Token::Kind::Punct: return "'" + t.text + "'";
  }
  return "token";
}

SourceSpan join_spans(const SourceSpan& a, const SourceSpan& b) {
  SourceSpan s = a;
  s.end = std::max(a.end, b.end);
  return s;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text), toks_(lex(text)) {}

  Model parse_model() {
    Model model;
    while (!at_end()) {
      const Token& t = peek();
      if (is_keyword("param")) {
        parse_param(model);
      } else if (is_keyword("species")) {
        parse_species_def(model);
      } else if (is_keyword("law")) {
        parse_law(model);
      } else if (is_keyword("affinity")) {
        parse_affinity(model);
      } else if (is_keyword("mixture")) {
        parse_mixture(model);
      } else {
        fail(t, {"'species'", "'law'", "'affinity'", "'mixture'", "'param'"});
      }
    }
    validate(model);
    return model;
  }

  SpeciesTerm parse_standalone_species() {
    SpeciesTerm t = parse_body();
    if (!at_end()) fail(peek(), {"end of input"});
    return t;
  }

 private:
  // -- token helpers --------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Kind::Punct && t.text == p;
  }
  bool is_keyword(std::string_view k) const {
    return peek().kind == Token::Kind::Ident && peek().text == k;
  }
  bool accept(std::string_view p) {
    if (is_punct(p)) {
      next();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const Token& t, std::vector<std::string> expected) const {
    std::string msg = "expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    msg += ", found " + describe_token(t);
    throw ParseError(ErrorCode::Parse, t.span, msg, std::move(expected));
  }
  [[noreturn]] static void fail_at(ErrorCode code, const SourceSpan& span, const std::string& msg) {
    throw ParseError(code, span, msg);
  }
  const Token& expect(std::string_view p) {
    if (!is_punct(p)) fail(peek(), {"'" + std::string(p) + "'"});
    return next();
  }
  void expect_keyword(std::string_view k) {
    if (!is_keyword(k)) fail(peek(), {"'" + std::string(k) + "'"});
    next();
  }
  const Token& expect_name(const char* what) {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident || kKeywords.count(t.text)) fail(t, {what});
    return next();
  }
  double expect_number() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Number) fail(t, {"number"});
    next();
    return t.number;
  }

  std::string expect_location() {
    const Token& t = expect_name("location name");
    note_location(t);
    return t.text;
  }

  std::vector<std::string> parse_location_list(const char* what) {
    std::vector<std::string> out;
    std::vector<SourceSpan> spans;
    do {
      spans.push_back(peek().span);
      out.push_back(expect_location());
    } while (accept(","));
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (out[i] == out[j]) {
          fail_at(ErrorCode::Parse, spans[i],
                  std::string("duplicate ") + what + " '" + out[i] + "'");
        }
      }
    }
    return out;
  }

  void note_location(const Token& t) { locations_.try_emplace(t.text, t.span); }
  void note_site(const Token& t) { sites_.try_emplace(t.text, t.span); }

  // -- species ---------------------------------------------------------------

  SpeciesTerm parse_body() {
    const Token& first = peek();
    SpeciesTerm head = parse_unary();
    if (!is_punct("+")) return head;
    std::vector<PrefixGuard> guards;
    auto absorb = [&](const SpeciesTerm& t, const Token& where) {
      const auto* sum = t.as<SumTerm>();
      if (!sum) fail_at(ErrorCode::Parse, where.span, "choice '+' needs a prefix guard on each side");
      guards.insert(guards.end(), sum->guards.begin(), sum->guards.end());
    };
    absorb(head, first);
    while (accept("+")) {
      const Token& where = peek();
      absorb(parse_unary(), where);
    }
    return SpeciesTerm::sum(std::move(guards));
  }

  SpeciesTerm parse_unary() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Number) {
      if (t.text != "0") fail(t, {"'0'", "species"});
      next();
      return SpeciesTerm::nil();
    }
    if (is_punct("(")) {
      next();
      std::vector<SpeciesTerm> parts;
      parts.push_back(parse_body());
      while (accept("|")) parts.push_back(parse_body());
      expect(")");
      return SpeciesTerm::parallel(std::move(parts));
    }
    if (is_keyword("new")) {
      next();
      std::vector<std::string> bound = parse_location_list("restricted location");
      expect_keyword("in");
      return SpeciesTerm::restriction(std::move(bound), parse_unary());
    }
    if (t.kind != Token::Kind::Ident || kKeywords.count(t.text)) {
      fail(t, {"species", "'0'", "'('", "'new'"});
    }
    const Token& name = next();
    Location loc;
    bool guard = false;
    if (accept("@")) {
      loc = Location::named(expect_location());
      guard = true;
    }
    std::vector<std::string> locs;
    std::vector<Token> loc_tokens;
    if (is_punct("(")) {
      next();
      if (!is_punct(")")) {
        do {
          loc_tokens.push_back(expect_name("location name"));
          locs.push_back(loc_tokens.back().text);
        } while (accept(","));
      }
      expect(")");
    }
    for (const auto& lt : loc_tokens) note_location(lt);
    if (is_punct(".")) {
      next();
      note_site(name);
      for (std::size_t i = 0; i < locs.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
          if (locs[i] == locs[j]) {
            fail_at(ErrorCode::Parse, loc_tokens[i].span, "duplicate received location '" + locs[i] + "'");
          }
        }
      }
      SpeciesTerm cont = parse_unary();
      return SpeciesTerm::prefix(Site{name.text}, loc, std::move(locs), std::move(cont));
    }
    if (guard) fail(peek(), {"'.'"});
    invocations_.push_back({name.text, locs.size(), name.span});
    return SpeciesTerm::invoke(name.text, std::move(locs));
  }

  void parse_species_def(Model& model) {
    const Token& kw = next();
    const Token& name = expect_name("species name");
    std::vector<std::string> formals;
    if (accept("(")) {
      formals = parse_location_list("formal location");
      expect(")");
    }
    expect("=");
    SpeciesTerm body = parse_body();
    const Token& semi = expect(";");
    if (model.species.find(name.text)) {
      fail_at(ErrorCode::Parse, name.span, "duplicate definition of species '" + name.text + "'");
    }
    NameSet free = free_locations(body);
    for (const auto& f : formals) free.erase(f);
    if (!free.empty()) {
      fail_at(ErrorCode::Parse, name.span,
              "species '" + name.text + "' has unbound location '" + *free.begin() + "'");
    }
    model.species.add(SpeciesDef{name.text, std::move(formals), std::move(body),
                                 join_spans(kw.span, semi.span)});
  }

  // -- parameters, laws ------------------------------------------------------

  void parse_param(Model& model) {
    const Token& kw = next();
    const Token& name = expect_name("parameter name");
    expect("=");
    double sign = accept("-") ? -1.0 : 1.0;
    double value = sign * expect_number();
    const Token& semi = expect(";");
    if (model.param_index(name.text)) {
      fail_at(ErrorCode::Parse, name.span, "duplicate definition of parameter '" + name.text + "'");
    }
    model.params.push_back(Parameter{name.text, value, join_spans(kw.span, semi.span)});
  }

  void parse_law(Model& model) {
    const Token& kw = next();
    const Token& name = expect_name("law name");
    expect("(");
    std::vector<std::string> params;
    if (!is_punct(";")) {
      do params.push_back(expect_name("law parameter").text);
      while (accept(","));
    }
    expect(";");
    std::vector<std::string> args;
    do args.push_back(expect_name("law argument").text);
    while (accept(","));
    expect(")");
    expect("=");
    std::vector<std::string> all = params;
    all.insert(all.end(), args.begin(), args.end());
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (all[i] == all[j]) fail_at(ErrorCode::Parse, name.span, "duplicate law variable '" + all[i] + "'");
      }
    }
    std::size_t body_start = peek().span.start;
    Expr body = parse_expr(params, args);
    std::size_t body_end = toks_[pos_ - 1].span.end;
    const Token& semi = expect(";");
    if (name.text == "MA" || model.find_law(name.text)) {
      fail_at(ErrorCode::Parse, name.span, "duplicate definition of law '" + name.text + "'");
    }
    KineticLaw law;
    law.name = name.text;
    law.params = std::move(params);
    law.args = std::move(args);
    law.body = std::move(body);
    law.source = std::string(text_.substr(body_start, body_end - body_start));
    law.span = join_spans(kw.span, semi.span);
    model.laws.push_back(std::move(law));
  }

  Expr parse_expr(const std::vector<std::string>& params, const std::vector<std::string>& args) {
    Expr lhs = parse_term(params, args);
    while (is_punct("+") || is_punct("-")) {
      bool plus = next().text == "+";
      Expr rhs = parse_term(params, args);
      lhs = plus ? lhs + rhs : lhs - rhs;
    }
    return lhs;
  }

  Expr parse_term(const std::vector<std::string>& params, const std::vector<std::string>& args) {
    Expr lhs = parse_factor(params, args);
    while (is_punct("*") || is_punct("/")) {
      bool times = next().text == "*";
      Expr rhs = parse_factor(params, args);
      lhs = times ? lhs * rhs : lhs / rhs;
    }
    return lhs;
  }

  Expr parse_factor(const std::vector<std::string>& params, const std::vector<std::string>& args) {
    const Token& t = peek();
    if (accept("-")) {
      if (peek().kind == Token::Kind::Number) return Expr::constant(-next().number);
      return Expr::mul({Expr::constant(-1.0), parse_factor(params, args)});
    }
    if (t.kind == Token::Kind::Number) {
      next();
      return Expr::constant(t.number);
    }
    if (accept("(")) {
      Expr inner = parse_expr(params, args);
      expect(")");
      return inner;
    }
    if (t.kind == Token::Kind::Ident && !kKeywords.count(t.text)) {
      next();
      if (auto it = std::find(params.begin(), params.end(), t.text); it != params.end()) {
        return Expr::var(VarKind::LawParam, static_cast<std::size_t>(it - params.begin()), t.text);
      }
      if (auto it = std::find(args.begin(), args.end(), t.text); it != args.end()) {
        return Expr::var(VarKind::Arg, static_cast<std::size_t>(it - args.begin()), t.text);
      }
      fail_at(ErrorCode::Parse, t.span, "unknown identifier '" + t.text + "' in law body");
    }
    fail(t, {"number", "identifier", "'('", "'-'"});
  }

  // -- affinity network, mixture --------------------------------------------

  void parse_affinity(Model& model) {
    next();
    expect("{");
    while (!is_punct("}")) {
      const Token& first = peek();
      Pattern pattern;
      do {
        std::vector<Site> sites;
        do {
          const Token& s = expect_name("site name");
          note_site(s);
          pattern_sites_.try_emplace(s.text, s.span);
          sites.push_back(Site{s.text});
        } while (accept("&"));
        pattern.clusters.emplace_back(std::move(sites));
      } while (accept("||"));
      expect_keyword("at");
      const Token& law = expect_name("law name");
      expect("(");
      std::vector<LawArg> args;
      if (!is_punct(")")) {
        do {
          const Token& a = peek();
          if (a.kind == Token::Kind::Number) {
            args.emplace_back(expect_number());
          } else {
            args.emplace_back(expect_name("number or parameter name").text);
            param_refs_.push_back({a.text, a.span});
          }
        } while (accept(","));
      }
      const Token& close = expect(")");
      const Token& semi = expect(";");
      (void)close;
      model.affinity.push_back(
          AffinityEntry{std::move(pattern), law.text, std::move(args), join_spans(first.span, semi.span)});
      law_refs_.push_back({law.text, law.span, model.affinity.size() - 1});
    }
    expect("}");
  }

  void parse_mixture(Model& model) {
    next();
    expect("{");
    if (!is_punct("}")) {
      do {
        const Token& num = peek();
        double c = expect_number();
        const Token& name = expect_name("species name");
        model.mixture.push_back(MixtureItem{c, name.text, join_spans(num.span, name.span)});
      } while (accept(","));
    }
    expect("}");
  }

  // -- whole-model checks ----------------------------------------------------

  void validate(Model& model) {
    for (const auto& inv : invocations_) {
      const SpeciesDef* def = model.species.find(inv.name);
      if (!def) fail_at(ErrorCode::Parse, inv.span, "unknown species '" + inv.name + "'");
      if (def->formals.size() != inv.arity) {
        fail_at(ErrorCode::Arity, inv.span,
                "species '" + inv.name + "' expects " + std::to_string(def->formals.size()) +
                    " location arguments, got " + std::to_string(inv.arity));
      }
    }
    for (const auto& [name, span] : sites_) {
      if (auto it = locations_.find(name); it != locations_.end()) {
        const SourceSpan& later = it->second.start > span.start ? it->second : span;
        fail_at(ErrorCode::Parse, later, "name '" + name + "' is used both as a site and as a location");
      }
    }
    for (const auto& ref : param_refs_) {
      if (!model.param_index(ref.name)) {
        fail_at(ErrorCode::Parse, ref.span, "unknown parameter '" + ref.name + "'");
      }
    }
    for (const auto& ref : law_refs_) {
      const KineticLaw* law = model.find_law(ref.name);
      if (!law) fail_at(ErrorCode::Parse, ref.span, "unknown law '" + ref.name + "'");
      const AffinityEntry& entry = model.affinity[ref.entry];
      if (entry.args.size() != law->params.size()) {
        fail_at(ErrorCode::Arity, ref.span,
                "law '" + law->name + "' takes " + std::to_string(law->params.size()) +
                    " parameters, got " + std::to_string(entry.args.size()));
      }
      if (!law->variadic && law->args.size() != entry.pattern.clusters.size()) {
        fail_at(ErrorCode::Arity, ref.span,
                "law '" + law->name + "' takes " + std::to_string(law->args.size()) +
                    " site arguments but the pattern has " +
                    std::to_string(entry.pattern.clusters.size()) + " clusters");
      }
    }
    for (const auto& item : model.mixture) {
      const SpeciesDef* def = model.species.find(item.species);
      if (!def) fail_at(ErrorCode::Parse, item.span, "unknown species '" + item.species + "' in mixture");
      if (!def->formals.empty()) {
        fail_at(ErrorCode::Arity, item.span,
                "mixture species '" + item.species + "' must not take location arguments");
      }
      if (item.concentration < 0) {
        fail_at(ErrorCode::Parse, item.span, "negative concentration");
      }
    }
    std::set<std::string> guard_sites;
    for (const auto& def : model.species.ordered()) collect_sites(def.body, guard_sites);
    for (const auto& [name, span] : pattern_sites_) {
      if (!guard_sites.count(name)) {
        model.warnings.push_back(std::to_string(span.line) + ":" + std::to_string(span.column) +
                                 ": site '" + name + "' in the affinity network appears in no species");
      }
    }
  }

  static void collect_sites(const SpeciesTerm& t, std::set<std::string>& out) {
    if (const auto* sum = t.as<SumTerm>()) {
      for (const auto& g : sum->guards) {
        out.insert(g.site.name);
        collect_sites(g.continuation, out);
      }
    } else if (const auto* par = t.as<ParallelTerm>()) {
      for (const auto& p : par->parts) collect_sites(p, out);
    } else if (const auto* res = t.as<RestrictionTerm>()) {
      collect_sites(res->body, out);
    }
  }

  struct Invocation {
    std::string name;
    std::size_t arity;
    SourceSpan span;
  };
  struct NameRef {
    std::string name;
    SourceSpan span;
  };
  struct LawRef {
    std::string name;
    SourceSpan span;
    std::size_t entry;
  };

  std::string_view text_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Invocation> invocations_;
  std::vector<NameRef> param_refs_;
  std::vector<LawRef> law_refs_;
  std::map<std::string, SourceSpan> sites_;
  std::map<std::string, SourceSpan> locations_;
  std::map<std::string, SourceSpan> pattern_sites_;
};

std::string render_law_arg(const LawArg& arg) {
  if (const double* v = std::get_if<double>(&arg)) return format_number(*v);
  return std::get<std::string>(arg);
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += xs[i];
  }
  return out;
}

}  // namespace

Model parse_model(std::string_view text) { return Parser(text).parse_model(); }

SpeciesTerm parse_species(std::string_view text) { return Parser(text).parse_standalone_species(); }

std::string render_model(const Model& model) {
  std::string out;
  for (const auto& p : model.params) {
    out += "param " + p.name + " = " + format_number(p.value) + ";\n";
  }
  if (!model.params.empty()) out += "\n";
  for (const auto& law : model.laws) {
    std::string body = law.source;
    if (body.empty()) {
      body = render_text(law.body, [&](const Expr& leaf) {
        return leaf.var_kind() == VarKind::LawParam ? law.params.at(leaf.var_index())
                                                    : law.args.at(leaf.var_index());
      });
    }
    out += "law " + law.name + "(" + join(law.params) + "; " + join(law.args) + ") = " + body + ";\n";
  }
  if (!model.laws.empty()) out += "\n";
  for (const auto& def : model.species.ordered()) {
    out += "species " + def.name;
    if (!def.formals.empty()) out += "(" + join(def.formals) + ")";
    out += " = " + to_string(def.body) + ";\n";
  }
  if (!model.affinity.empty()) {
    out += "\naffinity {\n";
    for (const auto& e : model.affinity) {
      std::vector<std::string> args;
      for (const auto& a : e.args) args.push_back(render_law_arg(a));
      out += "  " + e.pattern.to_string() + " at " + e.law + "(" + join(args) + ");\n";
    }
    out += "}\n";
  }
  if (!model.mixture.empty()) {
    out += "\nmixture {";
    for (std::size_t i = 0; i < model.mixture.size(); ++i) {
      out += i ? ", " : " ";
      out += format_number(model.mixture[i].concentration) + " " + model.mixture[i].species;
    }
    out += " }\n";
  }
  return out;
}

std::string describe(const ParseError& error) {
  return std::to_string(error.span().line) + ":" + std::to_string(error.span().column) + ": " +
         error.what();
}

}  // namespace bond
