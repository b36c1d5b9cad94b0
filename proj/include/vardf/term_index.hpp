#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "vardf/corpus.hpp"
#include "vardf/errors.hpp"

namespace vardf {

struct position_stats {
  std::set<std::string> docs;        // sorted for deterministic serialization
  std::uint64_t total_frequency = 0;

  bool operator==(const position_stats&) const = default;
};

struct index_entry {
  std::map<position, position_stats> per_position;

  bool operator==(const index_entry&) const = default;
};

// Per-term, per-position document sets and frequencies over the retrieved
// collection. Grows as the crawl proceeds; documents are never removed.
// Single writer; reads are safe when no writer is active.
class term_statistics_index {
public:
  // Idempotent: a doc_id already indexed leaves the index unchanged.
  void add_document(const parsed_document& doc) {
    if (!indexed_docs_.insert(doc.doc_id).second) return;
    for (const auto& [term, by_pos] : doc.occurrences) {
      index_entry& entry = entries_[term];
      for (const auto& [pos, freq] : by_pos) {
        auto [it, first_at_pos] = entry.per_position.try_emplace(pos);
        if (first_at_pos) ++distinct_terms_at_[pos];
        it->second.docs.insert(doc.doc_id);
        it->second.total_frequency += freq;
      }
    }
  }

  // Number of indexed documents containing the term at the position.
  std::size_t df(const std::string& term, position pos) const {
    auto entry = entries_.find(term);
    if (entry == entries_.end()) return 0;
    auto stats = entry->second.per_position.find(pos);
    if (stats == entry->second.per_position.end()) return 0;
    return stats->second.docs.size();
  }

  // Number of distinct terms with at least one occurrence at the position.
  std::size_t distinct_terms_count(position pos) const {
    auto it = distinct_terms_at_.find(pos);
    return it == distinct_terms_at_.end() ? 0 : it->second;
  }

  std::size_t document_count() const { return indexed_docs_.size(); }
  bool contains_document(const std::string& doc_id) const {
    return indexed_docs_.count(doc_id) > 0;
  }

  const std::map<std::string, index_entry>& entries() const { return entries_; }
  const std::set<std::string>& indexed_docs() const { return indexed_docs_; }

  bool operator==(const term_statistics_index&) const = default;

  nlohmann::json to_json() const {
    nlohmann::json terms = nlohmann::json::object();
    for (const auto& [term, entry] : entries_) {
      nlohmann::json by_pos = nlohmann::json::object();
      for (const auto& [pos, stats] : entry.per_position) {
        by_pos[std::string(position_name(pos))] = {
            {"docs", stats.docs},
            {"freq", stats.total_frequency},
        };
      }
      terms[term] = std::move(by_pos);
    }
    return nlohmann::json{{"docs", indexed_docs_}, {"terms", std::move(terms)}};
  }

  std::string serialize() const { return to_json().dump(2); }

  static term_statistics_index from_json(const nlohmann::json& j) {
    const char* shape =
        R"(expected {"docs": [...], "terms": {term: {position: {"docs": [...], "freq": n}}}})";
    if (!j.is_object() || !j.contains("docs") || !j.contains("terms") ||
        !j["docs"].is_array() || !j["terms"].is_object()) {
      throw format_error(std::string("bad index shape: ") + shape);
    }
    term_statistics_index index;
    for (const auto& id : j["docs"]) {
      if (!id.is_string()) throw format_error("doc ids must be strings");
      index.indexed_docs_.insert(id.get<std::string>());
    }
    for (const auto& [term, by_pos] : j["terms"].items()) {
      if (!by_pos.is_object() || by_pos.empty()) {
        throw format_error("term '" + term + "' has no positions");
      }
      index_entry entry;
      for (const auto& [pos_name, stats] : by_pos.items()) {
        auto pos = position_from_name(pos_name);
        if (!pos) throw format_error("unknown position '" + pos_name + "'");
        if (!stats.is_object() || !stats.contains("docs") ||
            !stats.contains("freq") || !stats["docs"].is_array() ||
            !stats["freq"].is_number_unsigned()) {
          throw format_error("bad stats for term '" + term + "' at '" +
                             pos_name + "': " + shape);
        }
        position_stats ps;
        for (const auto& id : stats["docs"]) {
          if (!id.is_string()) throw format_error("doc ids must be strings");
          std::string doc = id.get<std::string>();
          if (!index.indexed_docs_.count(doc)) {
            throw format_error("term '" + term + "' lists unindexed doc '" +
                               doc + "'");
          }
          ps.docs.insert(std::move(doc));
        }
        ps.total_frequency = stats["freq"].get<std::uint64_t>();
        if (ps.docs.empty() || ps.total_frequency < ps.docs.size()) {
          throw format_error("inconsistent stats for term '" + term + "' at '" +
                             pos_name + "'");
        }
        auto [it, first_at_pos] = entry.per_position.emplace(*pos, std::move(ps));
        if (first_at_pos) ++index.distinct_terms_at_[*pos];
      }
      index.entries_.emplace(term, std::move(entry));
    }
    return index;
  }

  static term_statistics_index deserialize(std::string_view bytes) {
    nlohmann::json j = nlohmann::json::parse(bytes, nullptr, false);
    if (j.is_discarded()) throw format_error("index is not valid JSON");
    return from_json(j);
  }

private:
  std::map<std::string, index_entry> entries_;
  std::set<std::string> indexed_docs_;
  std::map<position, std::size_t> distinct_terms_at_;  // cache; agrees with entries_
};

}  // namespace vardf
