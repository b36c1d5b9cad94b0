#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vardf/errors.hpp"
#include "vardf/html.hpp"
#include "vardf/text.hpp"

namespace vardf {

// Metadata locations a term occurrence can be attributed to. h1-h6 collapse
// into the single heading class.
enum class position {
  title,
  meta_keywords,
  meta_description,
  heading,
  paragraph,
  alt_text,
};

inline constexpr std::array<position, 6> all_positions = {
    position::title,        position::meta_keywords, position::meta_description,
    position::heading,      position::paragraph,     position::alt_text,
};

inline std::string_view position_name(position p) {
  switch (p) {
    case position::title: return "title";
    case position::meta_keywords: return "meta_keywords";
    case position::meta_description: return "meta_description";
    case position::heading: return "heading";
    case position::paragraph: return "paragraph";
    case position::alt_text: return "alt";
  }
  return "unknown";
}

inline std::optional<position> position_from_name(std::string_view name) {
  for (position p : all_positions) {
    if (position_name(p) == name) return p;
  }
  return std::nullopt;
}

// A document decomposed into positional term occurrences. Terms are
// normalized and stop-filtered; a term may occur at several positions, each
// as its own (position, frequency) record.
struct parsed_document {
  std::string doc_id;
  std::string source_ref;
  std::map<std::string, std::map<position, std::uint32_t>> occurrences;

  std::set<std::string> vocabulary() const {
    std::set<std::string> terms;
    for (const auto& [term, by_pos] : occurrences) terms.insert(term);
    return terms;
  }

  std::uint64_t token_count() const {
    std::uint64_t total = 0;
    for (const auto& [term, by_pos] : occurrences)
      for (const auto& [pos, freq] : by_pos) total += freq;
    return total;
  }

  bool operator==(const parsed_document&) const = default;
};

namespace detail {

inline void add_terms(parsed_document& doc, std::string_view text, position pos,
                      const stop_word_list& stops) {
  for (auto& term : tokenize(html::decode_entities(text))) {
    if (!stops.contains(term)) ++doc.occurrences[std::move(term)][pos];
  }
}

inline std::optional<position> container_position(std::string_view tag_name) {
  if (tag_name == "title") return position::title;
  if (tag_name == "p") return position::paragraph;
  if (tag_name.size() == 2 && tag_name[0] == 'h' && tag_name[1] >= '1' &&
      tag_name[1] <= '6') {
    return position::heading;
  }
  return std::nullopt;
}

}  // namespace detail

// Extracts positional occurrences from one HTML document. Pure function of
// (html, stoplist); tag soup is handled best-effort. Text is attributed to
// the nearest enclosing recognized element; everything outside recognized
// locations is ignored. Throws malformed_input only when the bytes cannot
// be text at all (embedded NUL).
inline parsed_document parse_document(std::string doc_id, std::string_view html_text,
                                      const stop_word_list& stops,
                                      std::string source_ref = {}) {
  if (html_text.find('\0') != std::string_view::npos) {
    throw malformed_input("document '" + doc_id + "' contains NUL bytes");
  }

  parsed_document doc;
  doc.doc_id = std::move(doc_id);
  doc.source_ref = std::move(source_ref);

  struct open_element {
    std::string name;
    position pos;
  };
  std::vector<open_element> stack;

  html::scanner scan(html_text);
  for (auto ev = scan.next(); ev != html::scanner::event::end; ev = scan.next()) {
    if (ev == html::scanner::event::text) {
      if (!stack.empty()) {
        detail::add_terms(doc, scan.current_text(), stack.back().pos, stops);
      }
      continue;
    }
    const html::tag& t = scan.current_tag();
    if (!t.closing && (t.name == "script" || t.name == "style")) {
      scan.skip_raw_text(t.name);
      continue;
    }
    if (t.name == "meta") {
      const std::string* name = t.attr("name");
      const std::string* content = t.attr("content");
      if (name && content) {
        std::string lowered;
        for (char c : *name) lowered.push_back(to_lower_ascii(c));
        if (lowered == "keywords") {
          detail::add_terms(doc, *content, position::meta_keywords, stops);
        } else if (lowered == "description") {
          detail::add_terms(doc, *content, position::meta_description, stops);
        }
      }
      continue;
    }
    if (t.name == "img") {
      if (const std::string* alt = t.attr("alt")) {
        detail::add_terms(doc, *alt, position::alt_text, stops);
      }
      continue;
    }
    auto pos = detail::container_position(t.name);
    if (!pos) continue;
    if (!t.closing) {
      if (!t.self_closing) stack.push_back({t.name, *pos});
    } else {
      // pop to the nearest matching open element, discarding anything the
      // close tag implicitly terminates
      for (std::size_t k = stack.size(); k-- > 0;) {
        if (stack[k].name == t.name) {
          stack.resize(k);
          break;
        }
      }
    }
  }
  return doc;
}

struct ingest_result {
  std::vector<parsed_document> documents;
  std::vector<std::string> warnings;
};

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

// Reads every .html/.htm file in the directory (sorted by filename) and
// parses it; doc_id defaults to the file stem. Undecodable files are skipped
// with a warning rather than failing the batch.
inline ingest_result ingest_directory(const std::filesystem::path& dir,
                                      const stop_word_list& stops) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw io_error("not a readable directory: " + dir.string());
  }

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    if (ext == ".html" || ext == ".htm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  ingest_result result;
  std::set<std::string> seen_ids;
  for (const auto& path : files) {
    std::string doc_id = path.stem().string();
    if (!seen_ids.insert(doc_id).second) {
      result.warnings.push_back("duplicate doc id '" + doc_id + "' from " +
                                path.string() + "; skipped");
      continue;
    }
    try {
      result.documents.push_back(
          parse_document(doc_id, read_file_bytes(path), stops, path.string()));
    } catch (const malformed_input& e) {
      result.warnings.push_back(std::string(e.what()) + "; skipped");
    }
  }
  return result;
}

}  // namespace vardf
