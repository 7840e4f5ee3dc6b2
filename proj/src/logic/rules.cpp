#include "nsrl/logic/rules.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "nsrl/errors.hpp"

namespace nsrl::logic {

namespace {

enum class Tok { kIdent, kLParen, kRParen, kComma, kImplies, kPeriod, kEnd };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    skip_ws_and_comments();
    const int line = line_, col = col_;
    if (pos_ >= text_.size()) return {Tok::kEnd, "", line, col};
    const char c = text_[pos_];
    if (c == '(') return advance({Tok::kLParen, "(", line, col}, 1);
    if (c == ')') return advance({Tok::kRParen, ")", line, col}, 1);
    if (c == ',') return advance({Tok::kComma, ",", line, col}, 1);
    if (c == '.') return advance({Tok::kPeriod, ".", line, col}, 1);
    if (c == ':') {
      if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
        return advance({Tok::kImplies, ":-", line, col}, 2);
      }
      throw RuleParseError(line, col, "expected ':-'");
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t end = pos_;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) ||
              text_[end] == '_')) {
        ++end;
      }
      Token t{Tok::kIdent, text_.substr(pos_, end - pos_), line, col};
      col_ += static_cast<int>(end - pos_);
      pos_ = end;
      return t;
    }
    throw RuleParseError(line, col,
                         std::string("unexpected character '") + c + "'");
  }

 private:
  Token advance(Token t, int n) {
    pos_ += n;
    col_ += n;
    return t;
  }

  void skip_ws_and_comments() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++pos_;
        ++line_;
        col_ = 1;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
        ++col_;
      } else if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(const std::string& text, const Vocabulary* vocab)
      : lexer_(text), vocab_(vocab) {
    cur_ = lexer_.next();
  }

  std::vector<HornRule> parse_all() {
    std::vector<HornRule> rules;
    while (cur_.kind != Tok::kEnd) {
      rules.push_back(parse_rule());
    }
    return rules;
  }

 private:
  void bump() { cur_ = lexer_.next(); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw RuleParseError(cur_.line, cur_.col, msg);
  }

  Token expect(Tok kind, const std::string& what) {
    if (cur_.kind != kind) {
      fail("expected " + what + ", got '" + cur_.text + "'");
    }
    Token t = cur_;
    bump();
    return t;
  }

  RuleAtom parse_atom() {
    const Token name = expect(Tok::kIdent, "predicate name");
    RuleAtom atom;
    atom.pred = name.text;
    if (cur_.kind == Tok::kLParen) {
      bump();
      while (true) {
        const Token arg = expect(Tok::kIdent, "argument");
        Term t;
        t.is_var = std::isupper(static_cast<unsigned char>(arg.text[0])) != 0;
        t.text = arg.text;
        atom.args.push_back(std::move(t));
        if (cur_.kind == Tok::kComma) {
          bump();
          continue;
        }
        break;
      }
      expect(Tok::kRParen, "')'");
    }
    return atom;
  }

  Literal parse_literal() {
    Literal lit;
    if (cur_.kind == Tok::kIdent && cur_.text == "not") {
      // `not` followed by another identifier is negation-as-failure;
      // `not(...)` or a bare trailing `not` is a predicate named not.
      const Token saved = cur_;
      bump();
      if (cur_.kind == Tok::kIdent) {
        lit.negated = true;
        lit.atom = parse_atom();
        return lit;
      }
      if (cur_.kind == Tok::kLParen) {
        bump();
        RuleAtom atom;
        atom.pred = saved.text;
        while (true) {
          const Token arg = expect(Tok::kIdent, "argument");
          Term t;
          t.is_var = std::isupper(static_cast<unsigned char>(arg.text[0])) != 0;
          t.text = arg.text;
          atom.args.push_back(std::move(t));
          if (cur_.kind == Tok::kComma) {
            bump();
            continue;
          }
          break;
        }
        expect(Tok::kRParen, "')'");
        lit.atom = std::move(atom);
        return lit;
      }
      lit.atom.pred = saved.text;
      return lit;
    }
    lit.atom = parse_atom();
    return lit;
  }

  HornRule parse_rule() {
    HornRule rule;
    const int head_line = cur_.line, head_col = cur_.col;
    rule.head = parse_atom();
    expect(Tok::kImplies, "':-'");
    while (true) {
      rule.body.push_back(parse_literal());
      if (cur_.kind == Tok::kComma) {
        bump();
        continue;
      }
      break;
    }
    expect(Tok::kPeriod, "'.'");
    validate(rule, head_line, head_col);
    return rule;
  }

  void validate(const HornRule& rule, int line, int col) const {
    std::set<std::string> positive_vars;
    for (const Literal& lit : rule.body) {
      if (lit.negated) continue;
      for (const Term& t : lit.atom.args) {
        if (t.is_var) positive_vars.insert(t.text);
      }
    }
    for (const Term& t : rule.head.args) {
      if (t.is_var && !positive_vars.count(t.text)) {
        throw RuleParseError(line, col,
                             "head variable " + t.text +
                                 " does not occur in a positive body literal");
      }
    }
    for (const Literal& lit : rule.body) {
      if (!lit.negated) continue;
      for (const Term& t : lit.atom.args) {
        if (t.is_var && !positive_vars.count(t.text)) {
          throw RuleParseError(
              line, col,
              "variable " + t.text +
                  " under negation does not occur in a positive body literal");
        }
      }
    }
    if (vocab_) {
      const int head_arity = static_cast<int>(rule.head.args.size());
      if (!vocab_->has_action(rule.head.pred, head_arity)) {
        throw RuleParseError(line, col,
                             "unknown action predicate " + rule.head.pred +
                                 "/" + std::to_string(head_arity));
      }
      for (const Literal& lit : rule.body) {
        const int arity = static_cast<int>(lit.atom.args.size());
        if (!vocab_->has_fact(lit.atom.pred, arity)) {
          throw RuleParseError(line, col,
                               "unknown predicate " + lit.atom.pred + "/" +
                                   std::to_string(arity));
        }
      }
    }
  }

  Lexer lexer_;
  const Vocabulary* vocab_;
  Token cur_;
};

}  // namespace

SymbolicPolicy parse_rules(const std::string& text,
                           const std::string& source_name,
                           const Vocabulary* vocab) {
  SymbolicPolicy policy;
  policy.source_name = source_name;
  Parser parser(text, vocab);
  policy.rules = parser.parse_all();
  return policy;
}

SymbolicPolicy parse_rules_file(const std::string& path,
                                const Vocabulary* vocab) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rule file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_rules(ss.str(), path, vocab);
}

std::string to_string(const Atom& a) {
  std::string s = a.pred;
  if (!a.args.empty()) {
    s += "(";
    for (size_t i = 0; i < a.args.size(); ++i) {
      if (i) s += ", ";
      s += a.args[i];
    }
    s += ")";
  }
  return s;
}

std::string to_string(const RuleAtom& a) {
  std::string s = a.pred;
  if (!a.args.empty()) {
    s += "(";
    for (size_t i = 0; i < a.args.size(); ++i) {
      if (i) s += ", ";
      s += a.args[i].text;
    }
    s += ")";
  }
  return s;
}

std::string to_string(const HornRule& r) {
  std::string s = to_string(r.head) + " :- ";
  for (size_t i = 0; i < r.body.size(); ++i) {
    if (i) s += ", ";
    if (r.body[i].negated) s += "not ";
    s += to_string(r.body[i].atom);
  }
  return s + ".";
}

std::string to_string(const SymbolicPolicy& p) {
  std::string s;
  for (const HornRule& r : p.rules) {
    s += to_string(r);
    s += "\n";
  }
  return s;
}

}  // namespace nsrl::logic
