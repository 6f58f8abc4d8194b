#include <cctype>
#include <set>

#include "elevator/frontend.hpp"

namespace elevator {

namespace {

const std::set<std::string>& keywords() {
  static const std::set<std::string> kw = {"def",   "data", "forall", "load",  "in",   "match", "with", "susp",
                                           "force", "store", "thunk", "unit",  "Unit", "Type",  "Up",   "Down",
                                           "modes"};
  return kw;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

}  // namespace

std::vector<Token> lex(const std::string& src, const std::string& file) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t j = 0; j < n; ++j, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  static const char* const multi[] = {"/\\", "|-", "->", "-o", "=>"};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.compare(i, 2, "--") == 0) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (ident_start(c)) {
      size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.text = src.substr(i, j - i);
      t.kind = keywords().count(t.text) ? Token::Kind::Keyword : Token::Kind::Ident;
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::Kind::Number;
      t.text = src.substr(i, j - i);
      advance(j - i);
    } else if (c == '"') {
      size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '"')
        throw Error(codes::kParse, "unterminated string literal", {file, line, col});
      t.kind = Token::Kind::String;
      t.text = src.substr(i + 1, j - i - 1);
      advance(j + 1 - i);
    } else {
      t.kind = Token::Kind::Symbol;
      for (const char* m : multi) {
        if (src.compare(i, 2, m) == 0) {
          t.text = m;
          break;
        }
      }
      if (t.text.empty()) {
        if (std::string("\\.:,()[]{}<>@=|").find(c) == std::string::npos)
          throw Error(codes::kParse, std::string("unexpected character '") + c + "'", {file, line, col});
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Token::Kind::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

}  // namespace elevator
