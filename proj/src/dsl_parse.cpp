#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

#include "glmp/dsl.hpp"
#include "glmp/names.hpp"

namespace glmp {

std::string normalize_newlines(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

ModelSource ModelSource::from_text(std::string_view text, std::string origin) {
  return {normalize_newlines(text), std::move(origin)};
}

ModelSource ModelSource::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory),
                            "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str(), path.string());
}

namespace {

enum class Tok { Ident, String, Number, LParen, RParen, LBrace, RBrace, Comma, Semicolon, End, Bad };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

constexpr std::size_t kMaxErrors = 200;

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}

bool is_ident_char(unsigned char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9') || c == '-';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// Returns the offset of the first invalid UTF-8 sequence, if any.
std::optional<std::size_t> invalid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return i;
    }
    if (i + len > s.size()) return i;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (cc & 0x3F);
    }
    const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                          (len == 4 && cp < 0x10000);
    if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return i;
    i += len;
  }
  return std::nullopt;
}

class Lexer {
 public:
  Lexer(std::string_view text, Diagnostics& diags) : text_(text), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t = next();
      const bool end = t.kind == Tok::End;
      out.push_back(std::move(t));
      if (end) break;
    }
    return out;
  }

 private:
  std::string_view text_;
  Diagnostics& diags_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  bool eof() const { return pos_ >= text_.size(); }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (!eof() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  SourceSpan here() const { return {line_, col_, 0, pos_}; }

  Token finish(Tok kind, SourceSpan start, std::string text) {
    start.length = pos_ - start.offset;
    return {kind, std::move(text), start};
  }

  Token next() {
    const SourceSpan start = here();
    if (eof()) return {Tok::End, {}, start};
    const char c = peek();
    switch (c) {
      case '(': advance(); return finish(Tok::LParen, start, "(");
      case ')': advance(); return finish(Tok::RParen, start, ")");
      case '{': advance(); return finish(Tok::LBrace, start, "{");
      case '}': advance(); return finish(Tok::RBrace, start, "}");
      case ',': advance(); return finish(Tok::Comma, start, ",");
      case ';': advance(); return finish(Tok::Semicolon, start, ";");
      case '"': return string_literal(start);
      default: break;
    }
    if (is_digit(c) || (c == '-' && is_digit(peek(1)))) {
      if (c == '-') advance();
      while (is_digit(peek())) advance();
      if (peek() == '.' && is_digit(peek(1))) {
        advance();
        while (is_digit(peek())) advance();
      }
      return finish(Tok::Number, start, std::string(text_.substr(start.offset, pos_ - start.offset)));
    }
    if (is_ident_start(static_cast<unsigned char>(c))) {
      while (!eof() && is_ident_char(static_cast<unsigned char>(peek()))) advance();
      return finish(Tok::Ident, start, std::string(text_.substr(start.offset, pos_ - start.offset)));
    }
    // Consume one whole UTF-8 sequence so columns stay meaningful.
    advance();
    while (!eof() && (static_cast<unsigned char>(peek()) & 0xC0) == 0x80) advance();
    Token bad = finish(Tok::Bad, start, std::string(text_.substr(start.offset, pos_ - start.offset)));
    diags_.push_back({Severity::Error, std::string(diag::kSyntax),
                      "unexpected character '" + bad.text + "'", bad.span});
    return bad;
  }

  Token string_literal(SourceSpan start) {
    advance();  // opening quote
    std::string value;
    for (;;) {
      if (eof() || peek() == '\n') {
        Token t = finish(Tok::Bad, start, value);
        diags_.push_back({Severity::Error, std::string(diag::kSyntax),
                          "unterminated string literal", t.span});
        return t;
      }
      const char c = peek();
      if (c == '"') {
        advance();
        return finish(Tok::String, start, std::move(value));
      }
      if (c == '\\') {
        const char e = peek(1);
        if (e == '"' || e == '\\') {
          value.push_back(e);
        } else if (e == 'n') {
          value.push_back('\n');
        } else if (e == 't') {
          value.push_back('\t');
        } else {
          SourceSpan s = here();
          s.length = 2;
          diags_.push_back({Severity::Error, std::string(diag::kSyntax),
                            "unknown escape sequence", s});
          if (e == '\0' || e == '\n') {
            advance();
            continue;
          }
        }
        advance();
        advance();
        continue;
      }
      value.push_back(c);
      advance();
    }
  }
};

struct Name {
  std::string text;
  SourceSpan span;
};

struct RawVariable {
  Name name;
  std::vector<Name> labels;
  std::optional<std::vector<MembershipFunction>> partition;
  SourceSpan partition_span;
  std::optional<std::vector<double>> relevance;
  SourceSpan relevance_span;
};

struct RawRule {
  std::vector<std::pair<Name, Name>> antecedents;
  Name consequent;
  SourceSpan span;
};

struct RawStatement {
  Level level = Level::Measure;
  Name name;
  // measure
  std::string unit;
  bool has_unit = false;
  std::optional<std::pair<double, double>> range;
  bool cohort = false;
  bool invert = false;
  std::optional<Source> source;
  // attribute / dimension / skill
  std::vector<Name> inputs;
  Aggregation aggregation = Aggregation::RuleBase;
  bool has_using = false;
  std::vector<RawRule> rules;
  std::vector<double> weights;
  SourceSpan weights_span;
  // shared
  std::optional<Name> as;
  std::optional<std::string> text_template;
};

const std::set<std::string, std::less<>>& statement_keywords() {
  static const std::set<std::string, std::less<>> kws{"variable", "measure", "attribute",
                                                     "dimension", "skill"};
  return kws;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, Diagnostics& diags)
      : toks_(std::move(tokens)), diags_(diags) {}

  void run() {
    while (cur().kind != Tok::End && !stopped_) {
      const std::size_t before = pos_;
      if (!statement()) recover();
      if (pos_ == before) ++pos_;  // always make progress
    }
  }

  std::vector<RawVariable> variables;
  std::vector<RawStatement> statements;

 private:
  std::vector<Token> toks_;
  Diagnostics& diags_;
  std::size_t pos_ = 0;
  std::size_t errors_ = 0;
  bool stopped_ = false;

  const Token& cur() const { return toks_[std::min(pos_, toks_.size() - 1)]; }
  const Token& take() {
    const Token& t = cur();
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  bool at_kw(std::string_view kw) const {
    return cur().kind == Tok::Ident && ascii_lower(cur().text) == kw;
  }
  bool at_statement_start() const {
    return cur().kind == Tok::Ident && statement_keywords().count(ascii_lower(cur().text)) > 0;
  }

  bool fail(std::string message) {
    return fail_at(cur().span, std::move(message));
  }
  bool fail_at(SourceSpan span, std::string message) {
    if (stopped_) return false;
    if (++errors_ > kMaxErrors) {
      diags_.push_back({Severity::Error, std::string(diag::kTooManyErrors),
                        "too many errors, giving up", span});
      stopped_ = true;
      return false;
    }
    diags_.push_back({Severity::Error, std::string(diag::kSyntax), std::move(message), span});
    return false;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::String: return "string \"" + t.text + "\"";
      default: return "'" + t.text + "'";
    }
  }

  void recover() {
    while (cur().kind != Tok::End) {
      if (at_statement_start()) return;
      take();
    }
  }

  bool expect(Tok kind, std::string_view what) {
    if (cur().kind != kind) return fail("expected " + std::string(what) + ", found " + describe(cur()));
    take();
    return true;
  }

  bool expect_kw(std::string_view kw) {
    if (!at_kw(kw)) return fail("expected '" + std::string(kw) + "', found " + describe(cur()));
    take();
    return true;
  }

  std::optional<Name> name(std::string_view what) {
    if (cur().kind != Tok::Ident && cur().kind != Tok::String) {
      fail("expected " + std::string(what) + ", found " + describe(cur()));
      return std::nullopt;
    }
    const Token& t = take();
    return Name{t.text, t.span};
  }

  std::optional<double> number() {
    if (cur().kind != Tok::Number) {
      fail("expected number, found " + describe(cur()));
      return std::nullopt;
    }
    const Token& t = take();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v,
                                     std::chars_format::fixed);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
      fail_at(t.span, "number '" + t.text + "' is out of range");
      return std::nullopt;
    }
    return v;
  }

  // '(' num {',' num} ')'
  std::optional<std::vector<double>> number_list() {
    if (!expect(Tok::LParen, "'('")) return std::nullopt;
    std::vector<double> out;
    for (;;) {
      auto v = number();
      if (!v) return std::nullopt;
      out.push_back(*v);
      if (cur().kind == Tok::Comma) {
        take();
        continue;
      }
      if (!expect(Tok::RParen, "',' or ')'")) return std::nullopt;
      return out;
    }
  }

  bool statement() {
    if (at_kw("variable")) return variable();
    if (at_kw("measure")) return measure();
    if (cur().kind == Tok::Ident) {
      if (auto level = parse_level(ascii_lower(cur().text)); level && *level != Level::Measure &&
                                                             ascii_lower(cur().text) != "measure") {
        return mapping(*level);
      }
    }
    return fail("expected 'variable', 'measure', 'attribute', 'dimension' or 'skill', found " +
                describe(cur()));
  }

  bool variable() {
    take();
    RawVariable v;
    auto n = name("variable name");
    if (!n) return false;
    v.name = *n;
    if (!expect_kw("labels")) return false;
    while (cur().kind == Tok::Ident || cur().kind == Tok::String || cur().kind == Tok::Comma) {
      if (cur().kind == Tok::Comma) {
        take();
        continue;
      }
      if (cur().kind == Tok::Ident && (at_statement_start() || at_kw("partition") || at_kw("relevance"))) {
        break;
      }
      const Token& t = take();
      v.labels.push_back({t.text, t.span});
    }
    if (v.labels.empty()) return fail("expected at least one label");
    for (;;) {
      if (at_kw("partition") && !v.partition) {
        v.partition_span = take().span;
        std::vector<MembershipFunction> fns;
        while (cur().kind == Tok::LParen) {
          auto triple = number_list();
          if (!triple) return false;
          if (triple->size() != 3) {
            return fail_at(v.partition_span, "partition entries are (left, peak, right) triples");
          }
          fns.push_back({(*triple)[0], (*triple)[1], (*triple)[2]});
        }
        if (fns.empty()) return fail("expected '(' after 'partition'");
        v.partition = std::move(fns);
      } else if (at_kw("relevance") && !v.relevance) {
        v.relevance_span = take().span;
        auto list = number_list();
        if (!list) return false;
        v.relevance = std::move(*list);
      } else {
        break;
      }
    }
    if (cur().kind != Tok::End && !at_statement_start()) {
      return fail("unexpected " + describe(cur()) + " in variable definition");
    }
    variables.push_back(std::move(v));
    return true;
  }

  bool template_clause(RawStatement& s) {
    take();
    if (s.text_template) return fail("duplicate 'template' clause");
    if (cur().kind != Tok::String) return fail("expected string after 'template', found " + describe(cur()));
    s.text_template = take().text;
    return true;
  }

  bool as_clause(RawStatement& s) {
    take();
    if (s.as) return fail("duplicate 'as' clause");
    auto n = name("variable name");
    if (!n) return false;
    s.as = *n;
    return true;
  }

  bool measure() {
    take();
    RawStatement s;
    s.level = Level::Measure;
    s.aggregation = Aggregation::Fuzzify;
    auto n = name("measure name");
    if (!n) return false;
    s.name = *n;
    while (cur().kind != Tok::End && !at_statement_start()) {
      if (at_kw("unit")) {
        take();
        if (s.has_unit) return fail("duplicate 'unit' clause");
        auto u = name("unit");
        if (!u) return false;
        s.unit = u->text;
        s.has_unit = true;
      } else if (at_kw("range")) {
        take();
        if (s.range || s.cohort) return fail("duplicate 'range' clause");
        if (at_kw("cohort")) {
          take();
          s.cohort = true;
        } else {
          auto lo = number();
          if (!lo) return false;
          auto hi = number();
          if (!hi) return false;
          s.range = {*lo, *hi};
        }
      } else if (at_kw("invert")) {
        take();
        s.invert = true;
      } else if (at_kw("source")) {
        take();
        if (s.source) return fail("duplicate 'source' clause");
        auto src = name("source");
        if (!src) return false;
        s.source = parse_source(ascii_lower(src->text));
        if (!s.source) return fail_at(src->span, "source must be text, audio or video");
      } else if (at_kw("as")) {
        if (!as_clause(s)) return false;
      } else if (at_kw("template")) {
        if (!template_clause(s)) return false;
      } else {
        return fail("unexpected " + describe(cur()) + " in measure definition");
      }
    }
    if (!s.has_unit) return fail_at(s.name.span, "measure '" + s.name.text + "' needs a 'unit' clause");
    if (!s.source) return fail_at(s.name.span, "measure '" + s.name.text + "' needs a 'source' clause");
    statements.push_back(std::move(s));
    return true;
  }

  bool mapping(Level level) {
    take();
    RawStatement s;
    s.level = level;
    auto n = name(std::string(to_string(level)) + " name");
    if (!n) return false;
    s.name = *n;
    if (!expect_kw("from")) return false;
    for (;;) {
      auto in = name("input name");
      if (!in) return false;
      s.inputs.push_back(*in);
      if (cur().kind != Tok::Comma) break;
      take();
    }
    while (cur().kind != Tok::End && !at_statement_start()) {
      if (at_kw("as")) {
        if (!as_clause(s)) return false;
      } else if (at_kw("template")) {
        if (!template_clause(s)) return false;
      } else if (at_kw("using")) {
        take();
        if (s.has_using) return fail("duplicate 'using' clause");
        s.has_using = true;
        if (at_kw("rules")) {
          take();
          s.aggregation = Aggregation::RuleBase;
          if (!rules(s)) return false;
        } else if (at_kw("weights")) {
          s.weights_span = take().span;
          s.aggregation = Aggregation::WeightedAverage;
          auto list = number_list();
          if (!list) return false;
          s.weights = std::move(*list);
        } else {
          return fail("expected 'rules' or 'weights', found " + describe(cur()));
        }
      } else {
        return fail("unexpected " + describe(cur()) + " in " + std::string(to_string(level)) +
                    " definition");
      }
    }
    if (!s.has_using) {
      return fail_at(s.name.span, std::string(to_string(level)) + " '" + s.name.text +
                                      "' needs a 'using rules' or 'using weights' clause");
    }
    statements.push_back(std::move(s));
    return true;
  }

  bool rules(RawStatement& s) {
    if (!expect(Tok::LBrace, "'{'")) return false;
    while (cur().kind != Tok::RBrace) {
      if (cur().kind == Tok::Semicolon) {
        take();
        continue;
      }
      RawRule r;
      r.span = cur().span;
      if (!expect_kw("if")) return false;
      for (;;) {
        auto in = name("input name");
        if (!in) return false;
        if (!expect_kw("is")) return false;
        auto label = name("label");
        if (!label) return false;
        r.antecedents.emplace_back(*in, *label);
        if (!at_kw("and")) break;
        take();
      }
      if (!expect_kw("then")) return false;
      auto cons = name("label");
      if (!cons) return false;
      r.consequent = *cons;
      r.span.length = cons->span.offset + cons->span.length - r.span.offset;
      s.rules.push_back(std::move(r));
      if (cur().kind == Tok::Semicolon) {
        take();
      } else if (cur().kind != Tok::RBrace) {
        return fail("expected ';' or '}', found " + describe(cur()));
      }
    }
    take();
    return true;
  }
};

// Resolves names in the raw statements and produces the model.
class Builder {
 public:
  explicit Builder(Diagnostics& diags) : diags_(diags) {}

  GlmpModel build(const std::vector<RawVariable>& vars, const std::vector<RawStatement>& stmts) {
    GlmpModel model = GlmpModel::empty();
    for (const auto& v : vars) add_variable(model, v);
    model.reindex();

    std::map<std::string, const RawStatement*> by_key;
    std::vector<const RawStatement*> accepted;
    for (const auto& s : stmts) {
      const std::string key = name_key(s.name.text);
      if (key.empty()) {
        error(diag::kSyntax, s.name.span, "empty name");
        continue;
      }
      if (!by_key.emplace(key, &s).second) {
        error(diag::kDuplicate, s.name.span, "'" + s.name.text + "' is already defined");
        continue;
      }
      accepted.push_back(&s);
    }

    // Output variable of every statement, needed to resolve rule labels.
    std::map<std::string, VariablePtr> outputs;
    for (const RawStatement* s : accepted) {
      VariablePtr var = model.find_variable(kDefaultVariable);
      if (s->as) {
        var = model.find_variable(s->as->text);
        if (!var) {
          unknown(s->as->span, "variable", s->as->text);
        }
      }
      outputs[name_key(s->name.text)] = var;
    }

    for (const RawStatement* s : accepted) {
      PerceptionMapping pm;
      pm.name = s->name.text;
      pm.level = s->level;
      pm.span = s->name.span;
      pm.text_template = s->text_template;
      const VariablePtr out = outputs[name_key(s->name.text)];
      pm.output = s->as ? name_key(s->as->text) : std::string(kDefaultVariable);
      if (out) pm.output = name_key(out->name());

      if (s->level == Level::Measure) {
        pm.aggregation = Aggregation::Fuzzify;
        pm.inputs = {name_key(s->name.text)};
        model.measures.push_back(measure_spec(*s));
      } else {
        pm.aggregation = s->aggregation;
        bool inputs_ok = true;
        std::set<std::string> seen;
        for (const auto& in : s->inputs) {
          const std::string key = name_key(in.text);
          if (!by_key.count(key)) {
            unknown(in.span, "component", in.text);
            inputs_ok = false;
          } else if (!seen.insert(key).second) {
            error(diag::kDuplicate, in.span, "input '" + in.text + "' is listed twice");
            inputs_ok = false;
          }
          pm.inputs.push_back(key);
        }
        if (s->aggregation == Aggregation::WeightedAverage) {
          pm.weights = s->weights;
        } else if (inputs_ok && out) {
          resolve_rules(*s, pm, outputs);
        }
      }
      model.pms.push_back(std::move(pm));
    }
    model.reindex();
    return model;
  }

 private:
  Diagnostics& diags_;

  void error(std::string_view code, SourceSpan span, std::string msg) {
    diags_.push_back({Severity::Error, std::string(code), std::move(msg), span});
  }
  void unknown(SourceSpan span, std::string_view what, const std::string& name) {
    error(diag::kUnknownIdentifier, span, "unknown " + std::string(what) + " '" + name + "'");
  }

  void add_variable(GlmpModel& model, const RawVariable& v) {
    const std::string key = name_key(v.name.text);
    auto existing = std::find_if(model.variables.begin(), model.variables.end(), [&](const auto& d) {
      return name_key(d.variable->name()) == key;
    });
    if (existing != model.variables.end() && existing->declared) {
      error(diag::kDuplicate, v.name.span, "variable '" + v.name.text + "' is already defined");
      return;
    }
    std::vector<std::string> labels;
    std::set<std::string> seen;
    for (const auto& l : v.labels) {
      if (!seen.insert(name_key(l.text)).second) {
        error(diag::kVariable, l.span, "label '" + l.text + "' is repeated");
        return;
      }
      labels.push_back(l.text);
    }
    if (labels.size() < 2 || labels.size() > kMaxLabels) {
      error(diag::kVariable, v.name.span,
            "variable '" + v.name.text + "' must have between 2 and " + std::to_string(kMaxLabels) +
                " labels");
      return;
    }
    std::set<std::string> abbreviations;
    for (const auto& l : labels) {
      std::string a(1, l.front());
      if (!abbreviations.insert(ascii_lower(a)).second) {
        error(diag::kVariable, v.name.span,
              "labels of '" + v.name.text + "' must start with distinct letters");
        return;
      }
    }
    auto partition = v.partition.value_or(uniform_partition(labels.size()));
    if (partition.size() != labels.size()) {
      error(diag::kPartition, v.partition_span, "partition needs one triple per label");
      return;
    }
    for (const auto& f : partition) {
      if (!f.valid()) {
        error(diag::kPartition, v.partition_span,
              "partition triples need 0 <= left <= peak <= right <= 1");
        return;
      }
    }
    if (!is_ruspini_partition(partition)) {
      error(diag::kPartition, v.partition_span,
            "membership degrees of '" + v.name.text + "' do not sum to 1 over [0, 1]");
      return;
    }
    LabelVector relevance = LabelVector::Ones(static_cast<Eigen::Index>(labels.size()));
    if (v.relevance) {
      if (v.relevance->size() != labels.size()) {
        error(diag::kVariable, v.relevance_span, "relevance needs one value per label");
        return;
      }
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if ((*v.relevance)[i] < 0.0) {
          error(diag::kVariable, v.relevance_span, "relevance values must be non-negative");
          return;
        }
        relevance(static_cast<Eigen::Index>(i)) = (*v.relevance)[i];
      }
    }
    VariableDecl decl{std::make_shared<const LinguisticVariable>(v.name.text, std::move(labels),
                                                                 std::move(partition),
                                                                 std::move(relevance)),
                      true, v.name.span};
    if (existing != model.variables.end()) {
      *existing = std::move(decl);
    } else {
      model.variables.push_back(std::move(decl));
    }
  }

  MeasureSpec measure_spec(const RawStatement& s) {
    MeasureSpec m;
    m.name = s.name.text;
    m.unit = s.unit;
    m.invert = s.invert;
    m.cohort_range = s.cohort;
    m.source = *s.source;
    m.span = s.name.span;
    if (s.range) {
      std::tie(m.lo, m.hi) = *s.range;
    } else if (!s.cohort) {
      const std::string unit = name_key(s.unit);
      if (unit == "ratio") {
        m.lo = 0.0;
        m.hi = 1.0;
      } else if (unit == "percent") {
        m.lo = 0.0;
        m.hi = 100.0;
      } else {
        error(diag::kRange, s.name.span,
              "measure '" + s.name.text + "' with unit \"" + s.unit + "\" needs a 'range' clause");
      }
    }
    return m;
  }

  void resolve_rules(const RawStatement& s, PerceptionMapping& pm,
                     const std::map<std::string, VariablePtr>& outputs) {
    const VariablePtr out = outputs.at(name_key(s.name.text));
    std::vector<std::pair<FuzzyRule, SourceSpan>> resolved;
    for (const auto& raw : s.rules) {
      FuzzyRule rule;
      bool ok = true;
      std::set<std::size_t> used;
      for (const auto& [in, label] : raw.antecedents) {
        const std::string key = name_key(in.text);
        auto it = std::find(pm.inputs.begin(), pm.inputs.end(), key);
        if (it == pm.inputs.end()) {
          error(diag::kUnknownIdentifier, in.span,
                "'" + in.text + "' is not an input of '" + s.name.text + "'");
          ok = false;
          continue;
        }
        const auto idx = static_cast<std::size_t>(it - pm.inputs.begin());
        if (!used.insert(idx).second) {
          error(diag::kArity, in.span, "input '" + in.text + "' appears twice in one rule");
          ok = false;
          continue;
        }
        const VariablePtr var = outputs.at(key);
        if (!var) {
          ok = false;
          continue;
        }
        auto l = var->find_label(label.text);
        if (!l) {
          error(diag::kUnknownLabel, label.span,
                "'" + label.text + "' is not a label of '" + var->name() + "'");
          ok = false;
          continue;
        }
        rule.antecedents.emplace_back(idx, *l);
      }
      auto c = out->find_label(raw.consequent.text);
      if (!c) {
        error(diag::kUnknownLabel, raw.consequent.span,
              "'" + raw.consequent.text + "' is not a label of '" + out->name() + "'");
        ok = false;
      }
      if (!ok) continue;
      rule.consequent = *c;
      std::sort(rule.antecedents.begin(), rule.antecedents.end());
      resolved.emplace_back(std::move(rule), raw.span);
    }
    const std::size_t n = pm.inputs.size();
    const auto sort_key = [n](const FuzzyRule& r) {
      std::vector<std::size_t> k(n + 1, SIZE_MAX);
      for (auto [i, l] : r.antecedents) k[i] = l;
      k[n] = r.consequent;
      return k;
    };
    std::stable_sort(resolved.begin(), resolved.end(), [&](const auto& a, const auto& b) {
      return sort_key(a.first) < sort_key(b.first);
    });
    for (auto& [r, span] : resolved) {
      pm.rules.push_back(std::move(r));
      pm.rule_spans.push_back(span);
    }
  }
};

}  // namespace

ParseResult parse_model(const ModelSource& src) {
  ParseResult result;
  Diagnostics& diags = result.diagnostics;
  if (auto bad = invalid_utf8(src.text)) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < *bad; ++i) {
      if (src.text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    diags.push_back({Severity::Error, std::string(diag::kEncoding), "invalid UTF-8 sequence",
                     {line, col, 1, *bad}});
    return result;
  }
  Lexer lexer(src.text, diags);
  Parser parser(lexer.run(), diags);
  parser.run();
  Builder builder(diags);
  GlmpModel model = builder.build(parser.variables, parser.statements);
  if (!has_errors(diags)) {
    Diagnostics v = validate_model(model);
    diags.insert(diags.end(), v.begin(), v.end());
  }
  sort_by_position(diags);
  if (!has_errors(diags)) result.model = std::move(model);
  return result;
}

}  // namespace glmp
