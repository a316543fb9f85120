#pragma once
// Minimal TOML-subset reader for config and material files. Supports:
// [tables], bare keys, strings, bools, ints/floats, flat or nested arrays
// (multi-line allowed), and # comments. Errors carry file:line context.
// Deliberately not a full TOML implementation.

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"

namespace dpp::toml {

struct Value {
  enum class Kind { number, string, boolean, array } kind = Kind::number;
  double num = 0.0;
  bool is_integer = false;  // number was written without . e E
  std::string str;
  bool flag = false;
  std::vector<Value> items;
  int line = 0;
};

using Table = std::map<std::string, Value>;

struct Document {
  std::string origin;                    // file name for error messages
  std::map<std::string, Table> tables;   // "" = root table

  const Table* find(const std::string& name) const {
    auto it = tables.find(name);
    return it == tables.end() ? nullptr : &it->second;
  }
};

namespace detail {

struct Cursor {
  const std::string& text;
  size_t pos = 0;
  int line = 1;
  std::string origin;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
  }
  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    const char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }
  // Skip spaces/tabs and comments; newlines only when multiline=true.
  void skip_ws(bool multiline) {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') { take(); continue; }
      if (c == '#') {
        while (!eof() && peek() != '\n') take();
        continue;
      }
      if (c == '\n' && multiline) { take(); continue; }
      break;
    }
  }
};

inline std::string parse_string(Cursor& c) {
  c.take();  // opening quote
  std::string out;
  while (true) {
    if (c.eof()) c.fail("unterminated string");
    const char ch = c.take();
    if (ch == '"') return out;
    if (ch == '\n') c.fail("newline inside string");
    if (ch == '\\') {
      if (c.eof()) c.fail("dangling escape");
      const char e = c.take();
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: c.fail(std::string("unsupported escape \\") + e);
      }
    } else {
      out += ch;
    }
  }
}

inline Value parse_value(Cursor& c);

inline Value parse_array(Cursor& c) {
  Value v;
  v.kind = Value::Kind::array;
  v.line = c.line;
  c.take();  // '['
  while (true) {
    c.skip_ws(true);
    if (c.eof()) c.fail("unterminated array");
    if (c.peek() == ']') { c.take(); return v; }
    v.items.push_back(parse_value(c));
    c.skip_ws(true);
    if (c.eof()) c.fail("unterminated array");
    if (c.peek() == ',') { c.take(); continue; }
    if (c.peek() == ']') { c.take(); return v; }
    c.fail("expected ',' or ']' in array");
  }
}

inline Value parse_value(Cursor& c) {
  c.skip_ws(false);
  if (c.eof()) c.fail("expected a value");
  Value v;
  v.line = c.line;
  const char ch = c.peek();
  if (ch == '"') {
    v.kind = Value::Kind::string;
    v.str = parse_string(c);
    return v;
  }
  if (ch == '[') return parse_array(c);
  // bare token: number or bool
  std::string tok;
  while (!c.eof()) {
    const char t = c.peek();
    if (std::isalnum(static_cast<unsigned char>(t)) || t == '+' || t == '-' ||
        t == '.' || t == '_') {
      tok += c.take();
    } else {
      break;
    }
  }
  if (tok.empty()) c.fail("expected a value");
  if (tok == "true" || tok == "false") {
    v.kind = Value::Kind::boolean;
    v.flag = (tok == "true");
    return v;
  }
  std::string digits;
  for (char t : tok)
    if (t != '_') digits += t;
  try {
    size_t used = 0;
    v.num = std::stod(digits, &used);
    if (used != digits.size()) c.fail("malformed number '" + tok + "'");
  } catch (const std::exception&) {
    c.fail("malformed value '" + tok + "'");
  }
  v.kind = Value::Kind::number;
  v.is_integer = digits.find_first_of(".eE") == std::string::npos;
  return v;
}

}  // namespace detail

inline Document parse(const std::string& text, const std::string& origin) {
  detail::Cursor c{text, 0, 1, origin};
  Document doc;
  doc.origin = origin;
  std::string current;  // root table
  doc.tables[current];
  while (true) {
    c.skip_ws(true);
    if (c.eof()) return doc;
    if (c.peek() == '[') {
      c.take();
      std::string name;
      while (!c.eof() && c.peek() != ']' && c.peek() != '\n') name += c.take();
      if (c.eof() || c.peek() != ']') c.fail("unterminated table header");
      c.take();
      if (name.empty()) c.fail("empty table name");
      if (doc.tables.count(name)) c.fail("duplicate table [" + name + "]");
      current = name;
      doc.tables[current];
      continue;
    }
    // key = value
    std::string key;
    while (!c.eof()) {
      const char t = c.peek();
      if (std::isalnum(static_cast<unsigned char>(t)) || t == '_' || t == '-') key += c.take();
      else break;
    }
    if (key.empty()) c.fail(std::string("unexpected character '") + c.peek() + "'");
    c.skip_ws(false);
    if (c.eof() || c.peek() != '=') c.fail("expected '=' after key '" + key + "'");
    c.take();
    const int key_line = c.line;
    Value v = detail::parse_value(c);
    v.line = key_line;
    auto& tbl = doc.tables[current];
    if (tbl.count(key)) c.fail("duplicate key '" + key + "'");
    tbl[key] = std::move(v);
    c.skip_ws(false);
    if (!c.eof() && c.peek() != '\n') c.fail("trailing content after value for '" + key + "'");
  }
}

// ---- typed accessors ------------------------------------------------------

[[noreturn]] inline void fail_at(const Document& doc, int line, const std::string& msg) {
  throw ConfigError(doc.origin + ":" + std::to_string(line) + ": " + msg);
}

inline const Value* find_key(const Table& t, const std::string& key) {
  auto it = t.find(key);
  return it == t.end() ? nullptr : &it->second;
}

inline const Value& require_key(const Document& doc, const Table& t, const std::string& table,
                                const std::string& key) {
  const Value* v = find_key(t, key);
  if (!v)
    throw ConfigError(doc.origin + ": missing required key '" + key + "'" +
                      (table.empty() ? "" : " in [" + table + "]"));
  return *v;
}

inline double as_number(const Document& doc, const Value& v, const std::string& what) {
  if (v.kind != Value::Kind::number) fail_at(doc, v.line, what + " must be a number");
  return v.num;
}

inline long long as_integer(const Document& doc, const Value& v, const std::string& what) {
  if (v.kind != Value::Kind::number || !v.is_integer)
    fail_at(doc, v.line, what + " must be an integer");
  return static_cast<long long>(v.num);
}

inline std::string as_string(const Document& doc, const Value& v, const std::string& what) {
  if (v.kind != Value::Kind::string) fail_at(doc, v.line, what + " must be a string");
  return v.str;
}

inline bool as_bool(const Document& doc, const Value& v, const std::string& what) {
  if (v.kind != Value::Kind::boolean) fail_at(doc, v.line, what + " must be true or false");
  return v.flag;
}

inline std::vector<double> as_number_array(const Document& doc, const Value& v,
                                           const std::string& what) {
  if (v.kind != Value::Kind::array) fail_at(doc, v.line, what + " must be an array");
  std::vector<double> out;
  out.reserve(v.items.size());
  for (const auto& item : v.items) out.push_back(as_number(doc, item, what + " element"));
  return out;
}

inline std::vector<std::string> as_string_array(const Document& doc, const Value& v,
                                                const std::string& what) {
  if (v.kind != Value::Kind::array) fail_at(doc, v.line, what + " must be an array");
  std::vector<std::string> out;
  out.reserve(v.items.size());
  for (const auto& item : v.items) out.push_back(as_string(doc, item, what + " element"));
  return out;
}

}  // namespace dpp::toml
