#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vardf/text.hpp"

namespace vardf::html {

struct attribute {
  std::string name;   // lowercased
  std::string value;  // entity-decoded
};

struct tag {
  std::string name;  // lowercased
  bool closing = false;
  bool self_closing = false;
  std::vector<attribute> attrs;

  const std::string* attr(std::string_view attr_name) const {
    for (const auto& a : attrs) {
      if (a.name == attr_name) return &a.value;
    }
    return nullptr;
  }
};

// Decodes the common named entities and numeric character references.
// Unknown entities are left verbatim. Decoded code points outside ASCII are
// emitted as '\x1f' placeholders, which the tokenizer treats as separators.
inline std::string decode_entities(std::string_view text) {
  static constexpr std::pair<std::string_view, char> named[] = {
      {"amp", '&'},  {"lt", '<'},    {"gt", '>'},   {"quot", '"'},
      {"apos", '\''}, {"nbsp", ' '}, {"copy", '\x1f'}, {"ndash", '-'},
      {"mdash", '-'}, {"hellip", '\x1f'},
  };
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out.push_back(text[i++]);
      continue;
    }
    std::size_t end = text.find(';', i + 1);
    if (end == std::string_view::npos || end - i > 10) {
      out.push_back(text[i++]);
      continue;
    }
    std::string_view body = text.substr(i + 1, end - i - 1);
    bool decoded = false;
    if (!body.empty() && body.front() == '#') {
      // numeric reference, decimal or hex
      std::uint32_t cp = 0;
      bool ok = body.size() > 1;
      if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
        for (std::size_t k = 2; k < body.size() && ok; ++k) {
          char c = to_lower_ascii(body[k]);
          if (c >= '0' && c <= '9') cp = cp * 16 + (c - '0');
          else if (c >= 'a' && c <= 'f') cp = cp * 16 + (c - 'a' + 10);
          else ok = false;
        }
      } else {
        for (std::size_t k = 1; k < body.size() && ok; ++k) {
          if (body[k] >= '0' && body[k] <= '9') cp = cp * 10 + (body[k] - '0');
          else ok = false;
        }
      }
      if (ok) {
        out.push_back(cp < 128 ? static_cast<char>(cp) : '\x1f');
        decoded = true;
      }
    } else {
      for (const auto& [name, repl] : named) {
        if (body == name) {
          out.push_back(repl);
          decoded = true;
          break;
        }
      }
    }
    if (decoded) {
      i = end + 1;
    } else {
      out.push_back('&');
      ++i;
    }
  }
  return out;
}

// Pull scanner over tag-soup HTML. Yields interleaved text chunks and tags;
// never fails. Comments, doctypes and processing instructions are skipped.
// A lone '<' that does not start a tag is treated as text.
class scanner {
public:
  enum class event { text, tag, end };

  explicit scanner(std::string_view html) : html_(html) {}

  event next() {
    text_.clear();
    while (pos_ < html_.size()) {
      if (html_[pos_] != '<') {
        std::size_t start = pos_;
        while (pos_ < html_.size() && html_[pos_] != '<') ++pos_;
        text_.assign(html_.substr(start, pos_ - start));
        return event::text;
      }
      if (try_skip_comment() || try_skip_declaration()) continue;
      if (parse_tag()) return event::tag;
      // '<' not followed by a tag: emit it as text
      text_.assign(1, '<');
      ++pos_;
      return event::text;
    }
    return event::end;
  }

  const std::string& current_text() const { return text_; }
  const tag& current_tag() const { return tag_; }

  // Consumes raw content up to (not including) the close tag of the given
  // element. Used for script/style, whose bodies are not document text.
  void skip_raw_text(std::string_view element) {
    std::string close = "</" + std::string(element);
    while (pos_ < html_.size()) {
      std::size_t lt = html_.find('<', pos_);
      if (lt == std::string_view::npos) {
        pos_ = html_.size();
        return;
      }
      if (matches_ci(lt, close)) {
        pos_ = lt;
        return;
      }
      pos_ = lt + 1;
    }
  }

private:
  bool matches_ci(std::size_t at, std::string_view needle) const {
    if (at + needle.size() > html_.size()) return false;
    for (std::size_t k = 0; k < needle.size(); ++k) {
      if (to_lower_ascii(html_[at + k]) != to_lower_ascii(needle[k])) return false;
    }
    return true;
  }

  bool try_skip_comment() {
    if (!matches_ci(pos_, "<!--")) return false;
    std::size_t end = html_.find("-->", pos_ + 4);
    pos_ = (end == std::string_view::npos) ? html_.size() : end + 3;
    return true;
  }

  bool try_skip_declaration() {
    if (pos_ + 1 >= html_.size()) return false;
    char c = html_[pos_ + 1];
    if (c != '!' && c != '?') return false;
    std::size_t end = html_.find('>', pos_ + 1);
    pos_ = (end == std::string_view::npos) ? html_.size() : end + 1;
    return true;
  }

  static bool is_name_char(char c) {
    return is_term_char(c) || c == '-' || c == '_' || c == ':';
  }

  // Parses "<name attrs>" or "</name>"; returns false when the '<' does not
  // begin a tag. Unterminated tags consume the rest of the input.
  bool parse_tag() {
    std::size_t p = pos_ + 1;
    bool closing = false;
    if (p < html_.size() && html_[p] == '/') {
      closing = true;
      ++p;
    }
    if (p >= html_.size() || !is_alpha(html_[p])) return false;

    tag_ = tag{};
    tag_.closing = closing;
    while (p < html_.size() && is_name_char(html_[p])) {
      tag_.name.push_back(to_lower_ascii(html_[p++]));
    }

    while (p < html_.size() && html_[p] != '>') {
      if (html_[p] == '/' && p + 1 < html_.size() && html_[p + 1] == '>') {
        tag_.self_closing = true;
        p += 1;
        break;
      }
      if (is_space(html_[p])) {
        ++p;
        continue;
      }
      // attribute name
      attribute a;
      while (p < html_.size() && !is_space(html_[p]) && html_[p] != '=' &&
             html_[p] != '>' && html_[p] != '/') {
        a.name.push_back(to_lower_ascii(html_[p++]));
      }
      while (p < html_.size() && is_space(html_[p])) ++p;
      if (p < html_.size() && html_[p] == '=') {
        ++p;
        while (p < html_.size() && is_space(html_[p])) ++p;
        std::string raw;
        if (p < html_.size() && (html_[p] == '"' || html_[p] == '\'')) {
          char quote = html_[p++];
          while (p < html_.size() && html_[p] != quote) raw.push_back(html_[p++]);
          if (p < html_.size()) ++p;
        } else {
          while (p < html_.size() && !is_space(html_[p]) && html_[p] != '>') {
            raw.push_back(html_[p++]);
          }
        }
        a.value = decode_entities(raw);
      }
      if (!a.name.empty()) tag_.attrs.push_back(std::move(a));
    }
    pos_ = (p < html_.size()) ? p + 1 : html_.size();
    return true;
  }

  static bool is_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  }
  static bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
  }

  std::string_view html_;
  std::size_t pos_ = 0;
  std::string text_;
  tag tag_;
};

}  // namespace vardf::html
