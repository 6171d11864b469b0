#include "mpbandit/config.h"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "mpbandit/errors.h"

namespace mpbandit {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ConfigDocument Document() {
    ConfigDocument doc;
    std::string section;
    while (true) {
      SkipBlankAndComments(true);
      if (AtEnd()) break;
      if (Peek() == '[') {
        ++pos_;
        section = ReadBareKey();
        SkipSpaces();
        Expect(']');
      } else {
        const std::string key = ReadKey();
        SkipSpaces();
        Expect('=');
        SkipSpaces();
        const int line = line_;
        ConfigValue value = Value();
        value.line = line;
        if (doc.Find(section, key) != nullptr) Fail("duplicate key '" + key + "'");
        doc.Set(section, key, std::move(value));
      }
      SkipSpaces();
      SkipComment();
      if (!AtEnd() && Peek() != '\n') Fail("unexpected text after value");
    }
    return doc;
  }

  ConfigValue Lone() {
    SkipSpaces();
    ConfigValue v = Value();
    SkipSpaces();
    if (!AtEnd()) Fail("unexpected text after value");
    return v;
  }

 private:
  bool AtEnd() const { return pos_ >= text_.size(); }
  char Peek() const { return text_[pos_]; }

  [[noreturn]] void Fail(const std::string& what) const {
    throw ConfigError({"line " + std::to_string(line_) + ": " + what});
  }

  void Expect(char c) {
    if (AtEnd() || Peek() != c) Fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void SkipSpaces() {
    while (!AtEnd() && (Peek() == ' ' || Peek() == '\t' || Peek() == '\r')) ++pos_;
  }

  void SkipComment() {
    if (!AtEnd() && Peek() == '#') {
      while (!AtEnd() && Peek() != '\n') ++pos_;
    }
  }

  void SkipBlankAndComments(bool newlines) {
    while (!AtEnd()) {
      SkipSpaces();
      SkipComment();
      if (newlines && !AtEnd() && Peek() == '\n') {
        ++pos_;
        ++line_;
        continue;
      }
      break;
    }
  }

  std::string ReadBareKey() {
    SkipSpaces();
    const std::size_t start = pos_;
    while (!AtEnd() && (std::isalnum(static_cast<unsigned char>(Peek())) ||
                        Peek() == '_' || Peek() == '-' || Peek() == '.')) {
      ++pos_;
    }
    if (start == pos_) Fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string ReadKey() {
    if (!AtEnd() && Peek() == '"') return ReadString();
    return ReadBareKey();
  }

  std::string ReadString() {
    Expect('"');
    std::string out;
    while (true) {
      if (AtEnd() || Peek() == '\n') Fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (AtEnd()) Fail("unterminated string");
      const char e = text_[pos_++];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: Fail(std::string("unsupported escape \\") + e);
      }
    }
    return out;
  }

  ConfigValue Value() {
    if (AtEnd()) Fail("missing value");
    ConfigValue v;
    const char c = Peek();
    if (c == '"') {
      v.data = ReadString();
    } else if (c == '[') {
      ++pos_;
      ConfigValue::Array items;
      while (true) {
        SkipBlankAndComments(true);
        if (AtEnd()) Fail("unterminated array");
        if (Peek() == ']') {
          ++pos_;
          break;
        }
        items.push_back(Value());
        SkipBlankAndComments(true);
        if (!AtEnd() && Peek() == ',') {
          ++pos_;
        } else if (AtEnd() || Peek() != ']') {
          Fail("expected ',' or ']' in array");
        }
      }
      v.data = std::move(items);
    } else if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      v.data = true;
    } else if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      v.data = false;
    } else {
      v.data = Number();
    }
    v.line = line_;
    return v;
  }

  double Number() {
    const std::size_t start = pos_;
    while (!AtEnd() && (std::isalnum(static_cast<unsigned char>(Peek())) ||
                        Peek() == '+' || Peek() == '-' || Peek() == '.' ||
                        Peek() == '_')) {
      ++pos_;
    }
    std::string digits;
    for (char ch : text_.substr(start, pos_ - start)) {
      if (ch != '_') digits.push_back(ch);
    }
    if (digits.empty()) Fail("expected a value");
    double value = 0.0;
    const char* first = digits.data();
    if (*first == '+') ++first;
    const char* last = digits.data() + digits.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) Fail("invalid number '" + digits + "'");
    return value;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

ConfigDocument ConfigDocument::Parse(std::string_view text) {
  return Parser(text).Document();
}

ConfigDocument ConfigDocument::ParseFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

ConfigValue ConfigDocument::ParseValue(std::string_view text) {
  return Parser(text).Lone();
}

const ConfigValue* ConfigDocument::Find(std::string_view section,
                                        std::string_view key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

void ConfigDocument::Set(const std::string& section, const std::string& key,
                         ConfigValue value) {
  sections_[section][key] = std::move(value);
}

}  // namespace mpbandit
