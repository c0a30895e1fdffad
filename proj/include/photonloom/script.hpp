#pragma once

#include <cctype>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "photonloom/circuit.hpp"
#include "photonloom/common.hpp"

namespace photonloom {

struct ParseError : SimError {
  int line = 0;
  int col = 0;
  ParseError(const std::string& msg, int line_, int col_)
      : SimError("line " + std::to_string(line_) + ", col " + std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_) {}
};

struct UndeclaredMode : ParseError {
  using ParseError::ParseError;
};

struct ArityError : ParseError {
  using ParseError::ParseError;
};

namespace script_detail {

struct Token {
  std::string text;
  int line;
  int col;  // 1-based
};

inline double parse_real(const Token& t, const std::string& what) {
  const char* begin = t.text.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + t.text.size() || t.text.empty() || !std::isfinite(v))
    throw ParseError("expected " + what + ", got '" + t.text + "'", t.line, t.col);
  return v;
}

inline int parse_count(const Token& t) {
  if (t.text.empty() ||
      !std::all_of(t.text.begin(), t.text.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw ParseError("expected a photon count, got '" + t.text + "'", t.line, t.col);
  long v = std::strtol(t.text.c_str(), nullptr, 10);
  if (v > 1000) throw ParseError("photon count out of range: '" + t.text + "'", t.line, t.col);
  return static_cast<int>(v);
}

inline Pol parse_pol(const Token& t) {
  if (t.text == "H") return Pol::H;
  if (t.text == "V") return Pol::V;
  throw ParseError("expected H or V, got '" + t.text + "'", t.line, t.col);
}

/// Complex literals: `re`, `imj`, or `re+imj` / `re-imj` (DSL form; the split
/// point is the last sign that does not follow an exponent marker).
inline Complex parse_complex(const Token& t) {
  const std::string& s = t.text;
  if (s.empty()) throw ParseError("expected a complex literal", t.line, t.col);
  if (s.back() != 'j') return {parse_real(t, "a number"), 0.0};
  std::string body = s.substr(0, s.size() - 1);
  if (body.empty())
    throw ParseError("expected a complex literal, got '" + s + "'", t.line, t.col);
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  auto sub = [&](std::string text) { return Token{std::move(text), t.line, t.col}; };
  if (split == std::string::npos) return {0.0, parse_real(sub(body), "a number")};
  return {parse_real(sub(body.substr(0, split)), "a number"),
          parse_real(sub(body.substr(split)), "a number")};
}

inline std::vector<Token> tokenize_line(const std::string& text, int line_no) {
  std::vector<Token> toks;
  std::size_t limit = text.find('#');
  if (limit == std::string::npos) limit = text.size();
  std::size_t i = 0;
  while (i < limit) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < limit && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    toks.push_back({text.substr(start, i - start), line_no, static_cast<int>(start) + 1});
  }
  return toks;
}

}  // namespace script_detail

/// Parses the circuit DSL: one statement per line, `#` comments,
/// whitespace-separated tokens, every mode declared before use.
inline Circuit parse_circuit(const std::string& text) {
  using script_detail::Token;
  Circuit c;
  std::set<std::string> declared;

  auto known = [&](const Token& t) {
    if (!declared.count(t.text))
      throw UndeclaredMode("mode '" + t.text + "' used before declaration", t.line, t.col);
    return t.text;
  };
  auto distinct = [&](const Token& a, const Token& b) {
    if (a.text == b.text)
      throw ParseError("modes must be distinct, got '" + a.text + "' twice", b.line, b.col);
  };

  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos
                                                                 : eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;

    auto toks = script_detail::tokenize_line(line, line_no);
    if (toks.empty()) continue;
    const Token& head = toks[0];
    const std::string& kw = head.text;
    auto args = static_cast<int>(toks.size()) - 1;
    auto need = [&](int n) {
      if (args != n)
        throw ArityError(kw + " expects " + std::to_string(n) + " arguments, got " +
                             std::to_string(args),
                         head.line, head.col);
    };

    if (kw == "mode") {
      if (args < 1) throw ArityError("mode expects at least 1 argument", head.line, head.col);
      std::vector<std::string> names;
      for (int i = 1; i <= args; ++i) {
        if (declared.count(toks[i].text))
          throw ParseError("mode '" + toks[i].text + "' already declared", toks[i].line,
                           toks[i].col);
        declared.insert(toks[i].text);
        names.push_back(toks[i].text);
      }
      c.stmts.push_back(Stmt::declare(std::move(names)));
    } else if (kw == "source") {
      need(3);
      c.stmts.push_back(Stmt::source(known(toks[1]), script_detail::parse_pol(toks[2]),
                                     script_detail::parse_count(toks[3])));
    } else if (kw == "pair") {
      need(4);
      distinct(toks[1], toks[2]);
      c.stmts.push_back(Stmt::pair(known(toks[1]), known(toks[2]),
                                   script_detail::parse_complex(toks[3]),
                                   script_detail::parse_complex(toks[4])));
    } else if (kw == "pbs") {
      need(4);
      distinct(toks[1], toks[2]);
      distinct(toks[3], toks[4]);
      c.stmts.push_back(
          Stmt::pbs(known(toks[1]), known(toks[2]), known(toks[3]), known(toks[4])));
    } else if (kw == "hwp") {
      need(2);
      c.stmts.push_back(
          Stmt::hwp(known(toks[1]), script_detail::parse_real(toks[2], "an angle")));
    } else if (kw == "bs") {
      need(5);
      distinct(toks[1], toks[2]);
      distinct(toks[3], toks[4]);
      double t = script_detail::parse_real(toks[5], "a transmittance");
      if (!(t >= 0.0 && t <= 1.0))
        throw TransmittanceOutOfRange("transmittance must lie in [0,1], got " + toks[5].text);
      c.stmts.push_back(
          Stmt::bs(known(toks[1]), known(toks[2]), known(toks[3]), known(toks[4]), t));
    } else if (kw == "detect") {
      need(2);
      c.stmts.push_back(Stmt::detect(known(toks[1]), script_detail::parse_count(toks[2])));
    } else if (kw == "detect-none") {
      need(1);
      c.stmts.push_back(Stmt::detect(known(toks[1]), 0));
    } else if (kw == "detect-rail") {
      need(3);
      c.stmts.push_back(Stmt::detect_rail(known(toks[1]), script_detail::parse_pol(toks[2]),
                                          script_detail::parse_count(toks[3])));
    } else if (kw == "measure-diag") {
      need(1);
      c.stmts.push_back(Stmt::measure_diag(known(toks[1])));
    } else if (kw == "relabel") {
      need(2);
      distinct(toks[1], toks[2]);
      c.stmts.push_back(Stmt::relabel(known(toks[1]), known(toks[2])));
    } else {
      throw ParseError("unknown statement '" + kw + "'", head.line, head.col);
    }
  }
  return c;
}

}  // namespace photonloom
