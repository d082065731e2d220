#include "pcor/term.hpp"

#include <cctype>

namespace pcor {

namespace {

struct Parser {
  const std::string& src;
  const Signature& sig;
  bool allow_internal;
  size_t pos = 0;

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= src.size();
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(pos, msg); }

  static bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  // an atom can begin here (used to detect juxtaposition)
  bool atom_ahead() {
    char c = peek();
    return c == '(' || c == '0' || c == '1' || ident_start(c);
  }

  Term parse_expr() {
    Term t = parse_inter();
    while (eat('+')) t = mk_plus(t, parse_inter());
    return t;
  }

  Term parse_inter() {
    Term t = parse_seq();
    while (eat('&')) t = mk_inter(t, parse_seq());
    return t;
  }

  Term parse_seq() {
    Term t = parse_postfix();
    for (;;) {
      if (eat(';')) {
        t = mk_seq(t, parse_postfix());
      } else if (atom_ahead()) {
        t = mk_seq(t, parse_postfix());  // juxtaposition
      } else {
        return t;
      }
    }
  }

  Term parse_postfix() {
    Term t = parse_atom();
    for (;;) {
      skip_ws();
      if (pos < src.size() && src[pos] == '*') {
        ++pos;
        t = mk_star(t);
      } else if (pos < src.size() && src[pos] == '~') {
        ++pos;
        t = mk_conv(t);
      } else if (pos + 1 < src.size() && src[pos] == '^' && src[pos + 1] == '-') {
        if (!is_test_term(t, sig)) fail("'^-' applies only to test subterms");
        pos += 2;
        t = mk_testnot(t);
      } else {
        return t;
      }
    }
  }

  Term parse_atom() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of input");
    char c = src[pos];
    if (c == '(') {
      size_t open = pos;
      ++pos;
      Term t = parse_expr();
      if (!eat(')')) throw ParseError(open, "unmatched '('");
      return t;
    }
    if (c == '0') {
      ++pos;
      return mk_zero();
    }
    if (c == '1') {
      ++pos;
      return mk_one();
    }
    if (ident_start(c)) {
      size_t start = pos;
      while (pos < src.size() && ident_char(src[pos])) ++pos;
      std::string name = src.substr(start, pos - start);
      if (name == "T") return mk_top();
      if (!allow_internal && (is_reserved_name(name) || is_derived_name(name)))
        throw ParseError(start, "reserved name: " + name);
      return mk_var(name);
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

Term parse_term(const std::string& text, const Signature& sig, bool allow_internal) {
  Parser p{text, sig, allow_internal};
  Term t = p.parse_expr();
  if (!p.at_end()) p.fail("trailing input");
  return t;
}

}  // namespace pcor
