#include "pathfx/dsl.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace pathfx {

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_atom_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

bool is_identifier(std::string_view text) {
  if (text.empty() || !is_ident_start(text[0])) return false;
  for (char c : text) {
    if (!is_ident_char(c)) return false;
  }
  return true;
}

enum class TokenKind { Atom, String, Punct, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // atom/string content or punctuation spelling
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token token = current_;
    advance();
    return token;
  }

  [[noreturn]] void fail(const Token& at, const std::string& message,
                         std::optional<std::string> expected = std::nullopt) {
    throw Error(ErrorCode::ParseError, at.line, at.column, message,
                std::move(expected));
  }

 private:
  void advance() {
    skip_trivia();
    current_.line = line_;
    current_.column = column_;
    if (pos_ >= text_.size()) {
      current_.kind = TokenKind::End;
      current_.text.clear();
      return;
    }
    char c = text_[pos_];
    if (c == '"') {
      lex_string();
      return;
    }
    if (is_atom_char(c)) {
      lex_atom();
      return;
    }
    if (c == '<' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
      current_.kind = TokenKind::Punct;
      current_.text = "<-";
      consume();
      consume();
      return;
    }
    if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      current_.kind = TokenKind::Punct;
      current_.text = "->";
      consume();
      consume();
      return;
    }
    static constexpr std::string_view kSingles = "{}()[]:;,~|";
    if (kSingles.find(c) != std::string_view::npos) {
      current_.kind = TokenKind::Punct;
      current_.text = std::string(1, c);
      consume();
      return;
    }
    throw Error(ErrorCode::ParseError, line_, column_,
                std::string("unexpected character '") + c + "'");
  }

  void lex_atom() {
    current_.kind = TokenKind::Atom;
    current_.text.clear();
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (is_atom_char(c)) {
        current_.text += c;
        consume();
        continue;
      }
      // Exponent sign inside a numeric atom, e.g. 2.5e-07.
      if ((c == '+' || c == '-') && !current_.text.empty() &&
          (current_.text.back() == 'e' || current_.text.back() == 'E') &&
          std::isdigit(static_cast<unsigned char>(current_.text[0])) &&
          pos_ + 1 < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
        current_.text += c;
        consume();
        continue;
      }
      break;
    }
  }

  void lex_string() {
    current_.kind = TokenKind::String;
    current_.text.clear();
    int start_line = line_;
    int start_column = column_;
    consume();  // opening quote
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '"') {
        consume();
        return;
      }
      if (c == '\n') break;
      if (c == '\\' && pos_ + 1 < text_.size()) {
        consume();
        c = text_[pos_];
      }
      current_.text += c;
      consume();
    }
    throw Error(ErrorCode::ParseError, start_line, start_column,
                "unterminated string");
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') consume();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        consume();
      } else {
        break;
      }
    }
  }

  void consume() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  Token current_;
};

[[noreturn]] void semantic_fail(const Token& at, const std::string& message) {
  throw Error(ErrorCode::SemanticError, at.line, at.column, message);
}

std::string tuple_text(const std::vector<std::string>& labels,
                       int noise_split = -1) {
  std::string text = "(";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i > 0) text += noise_split >= 0 && i == labels.size() - 1 ? "; " : ",";
    text += labels[i];
  }
  if (noise_split >= 0 && labels.size() == 1) {
    text = "(; " + labels[0];
  }
  text += ")";
  return text;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) {}

  ModelFile parse() {
    expect_keyword("model");
    Token name = lexer_.take();
    if (name.kind != TokenKind::String) {
      lexer_.fail(name, "expected model name", "quoted string");
    }
    file_.name = name.text;

    while (lexer_.peek().kind != TokenKind::End) {
      Token keyword = lexer_.peek();
      if (keyword.kind != TokenKind::Atom) {
        lexer_.fail(keyword, "expected a declaration",
                    "var, cpt, noise or mech");
      }
      if (keyword.text == "var") {
        parse_var();
      } else if (keyword.text == "cpt") {
        require_kind(ModelKind::CptModel, keyword);
        parse_cpt();
      } else if (keyword.text == "noise") {
        require_kind(ModelKind::Scm, keyword);
        parse_noise();
      } else if (keyword.text == "mech") {
        require_kind(ModelKind::Scm, keyword);
        parse_mech();
      } else {
        lexer_.fail(keyword, "unknown declaration '" + keyword.text + "'",
                    "var, cpt, noise or mech");
      }
    }
    finish();
    return file_;
  }

 private:
  void require_kind(ModelKind kind, const Token& at) {
    if (!kind_.has_value()) {
      kind_ = kind;
      file_.kind = kind;
      return;
    }
    if (*kind_ != kind) {
      semantic_fail(at,
                    "cannot mix cpt and noise/mech declarations in one model");
    }
  }

  void expect_keyword(const std::string& word) {
    Token token = lexer_.take();
    if (token.kind != TokenKind::Atom || token.text != word) {
      lexer_.fail(token, "expected '" + word + "'", word);
    }
  }

  Token expect_punct(const std::string& spelling) {
    Token token = lexer_.take();
    if (token.kind != TokenKind::Punct || token.text != spelling) {
      lexer_.fail(token, "expected '" + spelling + "'", spelling);
    }
    return token;
  }

  bool peek_punct(const std::string& spelling) {
    return lexer_.peek().kind == TokenKind::Punct &&
           lexer_.peek().text == spelling;
  }

  Token expect_identifier(const std::string& what) {
    Token token = lexer_.take();
    if (token.kind != TokenKind::Atom || !is_identifier(token.text)) {
      lexer_.fail(token, "expected " + what, "identifier");
    }
    return token;
  }

  // A domain value: bare atom or quoted string.
  Token expect_value() {
    Token token = lexer_.take();
    if (token.kind != TokenKind::Atom && token.kind != TokenKind::String) {
      lexer_.fail(token, "expected a value", "value or quoted string");
    }
    return token;
  }

  double expect_probability() {
    Token token = lexer_.take();
    if (token.kind != TokenKind::Atom) {
      lexer_.fail(token, "expected a probability", "number");
    }
    const char* begin = token.text.c_str();
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end != begin + token.text.size() || !std::isfinite(value)) {
      lexer_.fail(token, "'" + token.text + "' is not a number", "number");
    }
    return value;
  }

  const VarDecl& lookup_var(const Token& name) {
    for (const auto& v : file_.vars) {
      if (v.name == name.text) return v;
    }
    semantic_fail(name, "undeclared variable " + name.text);
  }

  const NoiseDecl& lookup_noise(const Token& name) {
    for (const auto& n : file_.noises) {
      if (n.name == name.text) return n;
    }
    semantic_fail(name, "undeclared noise " + name.text);
  }

  bool name_taken(const std::string& name) const {
    for (const auto& v : file_.vars) {
      if (v.name == name) return true;
    }
    for (const auto& n : file_.noises) {
      if (n.name == name) return true;
    }
    return false;
  }

  Domain parse_domain(const std::string& owner) {
    expect_punct("{");
    Domain domain;
    for (;;) {
      Token value = expect_value();
      if (domain.index_of(value.text) >= 0) {
        semantic_fail(value, "domain of " + owner + " repeats value " +
                                 value.text);
      }
      domain.values.push_back(value.text);
      if (peek_punct(",")) {
        lexer_.take();
        continue;
      }
      expect_punct("}");
      return domain;
    }
  }

  // [p1, p2, ...] with the expected length and row normalization checked.
  std::vector<double> parse_prob_vector(std::size_t expected, const char* what,
                                        const std::string& owner) {
    Token open = expect_punct("[");
    std::vector<double> probs;
    if (!peek_punct("]")) {
      for (;;) {
        probs.push_back(expect_probability());
        if (peek_punct(",")) {
          lexer_.take();
          continue;
        }
        break;
      }
    }
    expect_punct("]");
    if (probs.size() != expected) {
      semantic_fail(open, std::string(what) + " for " + owner + " has " +
                              std::to_string(probs.size()) +
                              " probabilities, expected " +
                              std::to_string(expected));
    }
    double sum = 0.0;
    for (double p : probs) {
      if (p < 0.0) {
        semantic_fail(open, std::string(what) + " for " + owner +
                                " has a negative probability");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kNormalizationTolerance) {
      std::ostringstream os;
      os << what << " for " << owner << " sums to " << sum << ", expected 1";
      semantic_fail(open, os.str());
    }
    return probs;
  }

  void parse_var() {
    lexer_.take();  // var
    Token name = expect_identifier("variable name");
    if (name_taken(name.text)) {
      semantic_fail(name, "duplicate name " + name.text);
    }
    expect_punct(":");
    Domain domain = parse_domain(name.text);
    file_.vars.push_back({name.text, std::move(domain)});
  }

  void parse_noise() {
    lexer_.take();  // noise
    Token name = expect_identifier("noise name");
    if (name_taken(name.text)) {
      semantic_fail(name, "duplicate name " + name.text);
    }
    expect_punct(":");
    Domain domain = parse_domain(name.text);
    expect_punct("~");
    std::vector<double> dist =
        parse_prob_vector(domain.size(), "distribution", name.text);
    file_.noises.push_back({name.text, std::move(domain), std::move(dist)});
  }

  // Parses "(v1, v2, ...)" against the given domains, returning the row index.
  std::size_t parse_value_tuple(const std::vector<const Domain*>& domains,
                                const std::vector<std::string>& names,
                                Token& open_out) {
    open_out = expect_punct("(");
    std::vector<int> digits;
    for (std::size_t i = 0; i < domains.size(); ++i) {
      if (i > 0) expect_punct(",");
      Token value = expect_value();
      int index = domains[i]->index_of(value.text);
      if (index < 0) {
        semantic_fail(value, "value " + value.text +
                                 " is not in the domain of " + names[i]);
      }
      digits.push_back(index);
    }
    expect_punct(")");
    std::vector<std::size_t> radices;
    for (const Domain* d : domains) radices.push_back(d->size());
    return flat_index(digits, radices);
  }

  std::vector<std::string> unflatten_labels(
      const std::vector<const Domain*>& domains, std::size_t row) {
    std::vector<int> digits(domains.size(), 0);
    for (std::size_t i = domains.size(); i-- > 0;) {
      digits[i] = static_cast<int>(row % domains[i]->size());
      row /= domains[i]->size();
    }
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < digits.size(); ++i) {
      labels.push_back(domains[i]->values[digits[i]]);
    }
    return labels;
  }

  void parse_cpt() {
    lexer_.take();  // cpt
    Token child = expect_identifier("variable name");
    const VarDecl& child_var = lookup_var(child);
    for (const auto& c : file_.cpts) {
      if (c.child == child.text) {
        semantic_fail(child, "duplicate cpt for " + child.text);
      }
    }
    expect_punct("|");

    std::vector<std::string> parents;
    std::vector<const Domain*> parent_domains;
    while (!peek_punct(":")) {
      if (!parents.empty()) expect_punct(",");
      Token parent = expect_identifier("parent name");
      const VarDecl& parent_var = lookup_var(parent);
      if (parent.text == child.text) {
        semantic_fail(parent, "variable " + child.text + " cannot parent "
                                                         "itself");
      }
      for (const auto& p : parents) {
        if (p == parent.text) {
          semantic_fail(parent, "duplicate parent " + parent.text);
        }
      }
      parents.push_back(parent.text);
      parent_domains.push_back(&parent_var.domain);
    }
    expect_punct(":");

    std::size_t child_size = child_var.domain.size();
    if (parents.empty()) {
      std::vector<double> row =
          parse_prob_vector(child_size, "probability vector", child.text);
      file_.cpts.push_back({child.text, {}, std::move(row)});
      return;
    }

    Token open = expect_punct("{");
    std::size_t rows = 1;
    for (const Domain* d : parent_domains) rows *= d->size();
    std::vector<double> table(rows * child_size, 0.0);
    std::vector<bool> filled(rows, false);
    while (!peek_punct("}")) {
      Token tuple_open;
      std::size_t row =
          parse_value_tuple(parent_domains, parents, tuple_open);
      std::string row_name =
          "row " + tuple_text(unflatten_labels(parent_domains, row));
      if (filled[row]) {
        semantic_fail(tuple_open, "duplicate " + row_name + " for " +
                                      child.text);
      }
      expect_punct(":");
      std::vector<double> row_probs =
          parse_prob_vector(child_size, row_name.c_str(), child.text);
      std::copy(row_probs.begin(), row_probs.end(),
                table.begin() + static_cast<std::ptrdiff_t>(row * child_size));
      filled[row] = true;
    }
    Token close = expect_punct("}");
    for (std::size_t r = 0; r < rows; ++r) {
      if (!filled[r]) {
        semantic_fail(close,
                      "cpt for " + child.text + " is missing row " +
                          tuple_text(unflatten_labels(parent_domains, r)));
      }
    }
    file_.cpts.push_back({child.text, std::move(parents), std::move(table)});
  }

  void parse_mech() {
    lexer_.take();  // mech
    Token child = expect_identifier("variable name");
    const VarDecl& child_var = lookup_var(child);
    for (const auto& m : file_.mechs) {
      if (m.child == child.text) {
        semantic_fail(child, "duplicate mechanism for " + child.text);
      }
    }
    expect_punct("<-");
    expect_punct("(");

    std::vector<std::string> parents;
    std::vector<const Domain*> parent_domains;
    while (!peek_punct(";")) {
      if (!parents.empty()) expect_punct(",");
      Token parent = expect_identifier("parent name");
      const VarDecl& parent_var = lookup_var(parent);
      if (parent.text == child.text) {
        semantic_fail(parent, "variable " + child.text + " cannot parent "
                                                         "itself");
      }
      for (const auto& p : parents) {
        if (p == parent.text) {
          semantic_fail(parent, "duplicate parent " + parent.text);
        }
      }
      parents.push_back(parent.text);
      parent_domains.push_back(&parent_var.domain);
    }
    expect_punct(";");
    Token noise = expect_identifier("noise name");
    const NoiseDecl& noise_decl = lookup_noise(noise);
    expect_punct(")");

    std::vector<const Domain*> input_domains = parent_domains;
    input_domains.push_back(&noise_decl.domain);
    std::vector<std::string> input_names = parents;
    input_names.push_back(noise_decl.name);

    Token open = expect_punct("{");
    std::size_t cells = 1;
    for (const Domain* d : input_domains) cells *= d->size();
    std::vector<int> table(cells, -1);
    while (!peek_punct("}")) {
      Token tuple_open = expect_punct("(");
      std::vector<int> digits;
      for (std::size_t i = 0; i < parents.size(); ++i) {
        if (i > 0) expect_punct(",");
        Token value = expect_value();
        int index = parent_domains[i]->index_of(value.text);
        if (index < 0) {
          semantic_fail(value, "value " + value.text +
                                   " is not in the domain of " + parents[i]);
        }
        digits.push_back(index);
      }
      expect_punct(";");
      Token noise_value = expect_value();
      int noise_index = noise_decl.domain.index_of(noise_value.text);
      if (noise_index < 0) {
        semantic_fail(noise_value, "value " + noise_value.text +
                                       " is not in the domain of " +
                                       noise_decl.name);
      }
      digits.push_back(noise_index);
      expect_punct(")");
      expect_punct("->");
      Token output = expect_value();
      int output_index = child_var.domain.index_of(output.text);
      if (output_index < 0) {
        semantic_fail(output, "value " + output.text +
                                  " is not in the domain of " + child.text);
      }
      std::vector<std::size_t> radices;
      for (const Domain* d : input_domains) radices.push_back(d->size());
      std::size_t cell = flat_index(digits, radices);
      if (table[cell] >= 0) {
        semantic_fail(tuple_open,
                      "duplicate mechanism row " +
                          tuple_text(unflatten_labels(input_domains, cell),
                                     static_cast<int>(parents.size())) +
                          " for " + child.text);
      }
      table[cell] = output_index;
    }
    Token close = expect_punct("}");
    for (std::size_t cell = 0; cell < cells; ++cell) {
      if (table[cell] < 0) {
        semantic_fail(close,
                      "mechanism for " + child.text + " is missing input " +
                          tuple_text(unflatten_labels(input_domains, cell),
                                     static_cast<int>(parents.size())));
      }
    }
    file_.mechs.push_back(
        {child.text, std::move(parents), noise_decl.name, std::move(table)});
  }

  void finish() {
    Token eof = lexer_.peek();
    if (kind_.value_or(ModelKind::CptModel) == ModelKind::CptModel) {
      for (const auto& v : file_.vars) {
        bool found = false;
        for (const auto& c : file_.cpts) found = found || c.child == v.name;
        if (!found) semantic_fail(eof, "no cpt declared for " + v.name);
      }
    } else {
      for (const auto& v : file_.vars) {
        bool found = false;
        for (const auto& m : file_.mechs) found = found || m.child == v.name;
        if (!found) semantic_fail(eof, "no mechanism declared for " + v.name);
      }
      for (const auto& n : file_.noises) {
        bool used = false;
        for (const auto& m : file_.mechs) used = used || m.noise == n.name;
        if (!used) semantic_fail(eof, "noise " + n.name + " is unused");
      }
    }
  }

  Lexer lexer_;
  ModelFile file_;
  std::optional<ModelKind> kind_;
};

std::string format_probability(double p) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", p);
  return buffer;
}

bool bare_value(const std::string& label) {
  if (label.empty()) return false;
  for (char c : label) {
    if (!is_atom_char(c)) return false;
  }
  return true;
}

std::string render_value(const std::string& label) {
  if (bare_value(label)) return label;
  std::string out = "\"";
  for (char c : label) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += "\"";
  return out;
}

void render_domain(std::ostringstream& os, const Domain& domain) {
  os << "{";
  for (std::size_t i = 0; i < domain.values.size(); ++i) {
    if (i > 0) os << ", ";
    os << render_value(domain.values[i]);
  }
  os << "}";
}

void render_prob_vector(std::ostringstream& os, std::span<const double> probs) {
  os << "[";
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (i > 0) os << ", ";
    os << format_probability(probs[i]);
  }
  os << "]";
}

}  // namespace

ModelFile parse_model(std::string_view text) { return Parser(text).parse(); }

std::string serialize_model(const ModelFile& file) {
  std::ostringstream os;
  os << "model \"";
  for (char c : file.name) {
    if (c == '"' || c == '\\') os << '\\';
    os << c;
  }
  os << "\"\n";

  std::map<std::string, const Domain*> domains;
  for (const auto& v : file.vars) {
    domains[v.name] = &v.domain;
    os << "var " << v.name << " : ";
    render_domain(os, v.domain);
    os << "\n";
  }
  for (const auto& n : file.noises) {
    domains[n.name] = &n.domain;
    os << "noise " << n.name << " : ";
    render_domain(os, n.domain);
    os << " ~ ";
    render_prob_vector(os, n.dist);
    os << "\n";
  }

  auto input_labels = [&](const std::vector<std::string>& names,
                          std::size_t row) {
    std::vector<int> digits(names.size(), 0);
    for (std::size_t i = names.size(); i-- > 0;) {
      std::size_t size = domains.at(names[i])->size();
      digits[i] = static_cast<int>(row % size);
      row /= size;
    }
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < names.size(); ++i) {
      labels.push_back(domains.at(names[i])->values[digits[i]]);
    }
    return labels;
  };

  for (const auto& c : file.cpts) {
    os << "cpt " << c.child << " | ";
    for (std::size_t i = 0; i < c.parents.size(); ++i) {
      if (i > 0) os << ", ";
      os << c.parents[i];
    }
    os << (c.parents.empty() ? ": " : " : ");
    std::size_t child_size = domains.at(c.child)->size();
    if (c.parents.empty()) {
      render_prob_vector(os, c.table);
      os << "\n";
      continue;
    }
    std::size_t rows = c.table.size() / child_size;
    os << "{\n";
    for (std::size_t r = 0; r < rows; ++r) {
      auto labels = input_labels(c.parents, r);
      os << "  (";
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i > 0) os << ", ";
        os << render_value(labels[i]);
      }
      os << ") : ";
      render_prob_vector(
          os, std::span<const double>(c.table.data() + r * child_size,
                                      child_size));
      os << "\n";
    }
    os << "}\n";
  }

  for (const auto& m : file.mechs) {
    os << "mech " << m.child << " <- (";
    for (std::size_t i = 0; i < m.parents.size(); ++i) {
      if (i > 0) os << ", ";
      os << m.parents[i];
    }
    os << "; " << m.noise << ") {\n";
    std::vector<std::string> input_names = m.parents;
    input_names.push_back(m.noise);
    const Domain& child_domain = *domains.at(m.child);
    for (std::size_t cell = 0; cell < m.table.size(); ++cell) {
      auto labels = input_labels(input_names, cell);
      os << "  (";
      for (std::size_t i = 0; i + 1 < labels.size(); ++i) {
        if (i > 0) os << ", ";
        os << render_value(labels[i]);
      }
      os << "; " << render_value(labels.back()) << ") -> "
         << render_value(child_domain.values[m.table[cell]]) << "\n";
    }
    os << "}\n";
  }
  return os.str();
}

CptModel to_cpt_model(const ModelFile& file) {
  if (file.kind != ModelKind::CptModel || !file.noises.empty() ||
      !file.mechs.empty()) {
    throw Error(ErrorCode::SemanticError,
                "model " + file.name + " is not a cpt model");
  }
  std::vector<VariableSpec> variables;
  for (const auto& v : file.vars) variables.push_back({v.name, v.domain});
  std::vector<Cpt> cpts;
  for (const auto& c : file.cpts) cpts.push_back({c.child, c.parents, c.table});
  return build_cpt_model(std::move(variables), std::move(cpts));
}

Scm to_scm(const ModelFile& file) {
  if (file.kind != ModelKind::Scm || !file.cpts.empty()) {
    throw Error(ErrorCode::RequiresScm,
                "model " + file.name + " is not an scm");
  }
  std::vector<VariableSpec> variables;
  for (const auto& v : file.vars) variables.push_back({v.name, v.domain});
  std::vector<NoiseSpec> noises;
  for (const auto& n : file.noises) {
    noises.push_back({n.name, n.domain, n.dist});
  }
  std::vector<Mechanism> mechanisms;
  for (const auto& m : file.mechs) {
    mechanisms.push_back({m.child, m.parents, m.noise, m.table});
  }
  return build_scm(std::move(variables), std::move(noises),
                   std::move(mechanisms));
}

ModelFile to_model_file(const CptModel& model, std::string name) {
  ModelFile file;
  file.name = std::move(name);
  file.kind = ModelKind::CptModel;
  for (const auto& v : model.variables) file.vars.push_back({v.name, v.domain});
  for (const auto& v : model.variables) {
    const Cpt& c = model.cpt_for(v.name);
    file.cpts.push_back({c.child, c.parents, c.table});
  }
  return file;
}

ModelFile to_model_file(const Scm& scm, std::string name) {
  ModelFile file;
  file.name = std::move(name);
  file.kind = ModelKind::Scm;
  for (const auto& v : scm.variables) file.vars.push_back({v.name, v.domain});
  for (const auto& n : scm.noises) {
    file.noises.push_back({n.name, n.domain, n.dist});
  }
  for (const auto& v : scm.variables) {
    const Mechanism& m = scm.mechanism_for(v.name);
    file.mechs.push_back({m.child, m.parents, m.noise, m.table});
  }
  return file;
}

}  // namespace pathfx
