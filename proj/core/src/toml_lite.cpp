#include "mixest/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <vector>

#include "mixest/common.hpp"

namespace mixest::toml {

namespace {

using nlohmann::json;

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  json run() {
    root_ = json::object();
    current_ = &root_;
    skip_blank();
    while (!eof()) {
      if (peek() == '[') {
        parse_header();
      } else {
        parse_key_value(*current_);
        expect_line_end();
      }
      skip_blank();
    }
    return std::move(root_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + msg);
  }

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  char take() {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  // Skips spaces/tabs and comments on the current line.
  void skip_inline_ws() {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '#') {
        while (!eof() && peek() != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  // Skips whitespace, comments, and newlines.
  void skip_blank() {
    while (!eof()) {
      skip_inline_ws();
      if (!eof() && peek() == '\n') {
        take();
      } else {
        break;
      }
    }
  }

  void expect_line_end() {
    skip_inline_ws();
    if (eof()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    take();
  }

  std::string parse_key() {
    skip_inline_ws();
    if (eof()) fail("expected key");
    const char c = peek();
    if (c == '"' || c == '\'') return parse_string();
    std::string key;
    while (!eof()) {
      const char k = peek();
      if (std::isalnum(static_cast<unsigned char>(k)) || k == '_' || k == '-') {
        key.push_back(take());
      } else {
        break;
      }
    }
    if (key.empty()) fail("expected key");
    return key;
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path;
    path.push_back(parse_key());
    skip_inline_ws();
    while (!eof() && peek() == '.') {
      take();
      path.push_back(parse_key());
      skip_inline_ws();
    }
    return path;
  }

  void parse_header() {
    take();  // '['
    const bool array_of_tables = !eof() && peek() == '[';
    if (array_of_tables) take();
    const std::vector<std::string> path = parse_key_path();
    skip_inline_ws();
    if (eof() || take() != ']') fail("expected ']' in table header");
    if (array_of_tables) {
      if (eof() || take() != ']') fail("expected ']]' in array-of-tables header");
    }
    expect_line_end();

    json* node = &root_;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      node = descend(node, path[i]);
    }
    const std::string& leaf = path.back();
    if (array_of_tables) {
      if (!node->contains(leaf)) (*node)[leaf] = json::array();
      json& arr = (*node)[leaf];
      if (!arr.is_array()) fail("'" + leaf + "' is not an array of tables");
      arr.push_back(json::object());
      current_ = &arr.back();
    } else {
      if (!node->contains(leaf)) (*node)[leaf] = json::object();
      json& tbl = (*node)[leaf];
      if (!tbl.is_object()) fail("'" + leaf + "' is not a table");
      current_ = &tbl;
    }
  }

  // Descends one path segment; an array-of-tables segment resolves to its
  // most recent element, per TOML semantics.
  json* descend(json* node, const std::string& key) {
    if (!node->contains(key)) (*node)[key] = json::object();
    json& next = (*node)[key];
    if (next.is_array()) {
      if (next.empty()) fail("'" + key + "' is an empty array of tables");
      return &next.back();
    }
    if (!next.is_object()) fail("'" + key + "' is not a table");
    return &next;
  }

  void parse_key_value(json& table) {
    const std::string key = parse_key();
    skip_inline_ws();
    if (eof() || take() != '=') fail("expected '=' after key '" + key + "'");
    skip_inline_ws();
    if (table.contains(key)) fail("duplicate key '" + key + "'");
    table[key] = parse_value();
  }

  json parse_value() {
    skip_inline_ws();
    if (eof()) fail("expected value");
    const char c = peek();
    if (c == '"' || c == '\'') return parse_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    return parse_scalar();
  }

  std::string parse_string() {
    const char quote = take();
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = take();
      if (c == quote) break;
      if (quote == '"' && c == '\\') {
        if (eof()) fail("unterminated escape");
        const char e = take();
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: fail(std::string("unsupported escape '\\") + e + "'");
        }
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  json parse_array() {
    take();  // '['
    json arr = json::array();
    while (true) {
      skip_blank();
      if (eof()) fail("unterminated array");
      if (peek() == ']') {
        take();
        break;
      }
      arr.push_back(parse_value());
      skip_blank();
      if (eof()) fail("unterminated array");
      if (peek() == ',') {
        take();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
    return arr;
  }

  json parse_inline_table() {
    take();  // '{'
    json tbl = json::object();
    skip_inline_ws();
    if (!eof() && peek() == '}') {
      take();
      return tbl;
    }
    while (true) {
      parse_key_value(tbl);
      skip_inline_ws();
      if (eof()) fail("unterminated inline table");
      const char c = take();
      if (c == '}') break;
      if (c != ',') fail("expected ',' or '}' in inline table");
    }
    return tbl;
  }

  json parse_scalar() {
    std::string tok;
    while (!eof()) {
      const char c = peek();
      if (c == '\n' || c == ',' || c == ']' || c == '}' || c == '#' ||
          c == ' ' || c == '\t' || c == '\r') {
        break;
      }
      tok.push_back(take());
    }
    if (tok.empty()) fail("expected value");
    if (tok == "true") return true;
    if (tok == "false") return false;

    std::string digits;
    digits.reserve(tok.size());
    for (const char c : tok) {
      if (c != '_') digits.push_back(c);
    }
    const bool looks_float =
        digits.find_first_of(".eEnN") != std::string::npos &&
        digits != "e" && digits != "E";
    if (!looks_float) {
      std::int64_t iv = 0;
      const char* first = digits.data();
      const char* last = digits.data() + digits.size();
      if (!digits.empty() && digits.front() == '+') ++first;
      const auto [p, ec] = std::from_chars(first, last, iv);
      if (ec == std::errc() && p == last) return iv;
    }
    try {
      std::size_t used = 0;
      const double dv = std::stod(digits, &used);
      if (used == digits.size()) return dv;
    } catch (const std::exception&) {
    }
    fail("cannot parse value '" + tok + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  json root_;
  json* current_ = nullptr;
};

}  // namespace

nlohmann::json parse(const std::string& text) { return Parser(text).run(); }

nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace mixest::toml
