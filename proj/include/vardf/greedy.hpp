#pragma once

#include <cassert>
#include <chrono>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vardf/corpus.hpp"
#include "vardf/errors.hpp"
#include "vardf/term_index.hpp"
#include "vardf/text.hpp"
#include "vardf/weighting.hpp"

namespace vardf {

// Stopping rules for a crawl run.
struct crawl_limits {
  std::size_t max_queries = 1000;
  std::optional<std::size_t> db_size_hint;   // stop when coverage reaches it
  std::optional<double> budget_seconds;      // wall-clock allowance
};

enum class outcome_class { successful, unsuccessful, no_results };

inline std::string_view outcome_class_name(outcome_class c) {
  switch (c) {
    case outcome_class::successful: return "Successful";
    case outcome_class::unsuccessful: return "Unsuccessful";
    case outcome_class::no_results: return "NoResults";
  }
  return "unknown";
}

inline std::optional<outcome_class> outcome_class_from_name(std::string_view name) {
  if (name == "Successful") return outcome_class::successful;
  if (name == "Unsuccessful") return outcome_class::unsuccessful;
  if (name == "NoResults") return outcome_class::no_results;
  return std::nullopt;
}

// One issued query: the term, what it returned, and how it classified.
// Successful means at least one fresh document; Unsuccessful means hits but
// nothing fresh; NoResults means an empty result set.
struct query_outcome {
  std::string term;
  std::size_t docs_returned = 0;
  std::size_t fresh_docs = 0;
  outcome_class classification = outcome_class::no_results;
  std::size_t issued_at = 0;  // 1-based sequence number

  bool operator==(const query_outcome&) const = default;
};

// The single-textbox search surface the crawl drives. search() returns hit
// ids only; fetch() downloads one document. Either may throw search_failure.
class query_interface {
public:
  virtual ~query_interface() = default;

  virtual std::set<std::string> search(const std::string& term) = 0;
  virtual std::string fetch(const std::string& doc_id) = 0;

  // Batch fetch; implementations may parallelize. The sorted map keeps
  // ingestion order deterministic either way.
  virtual std::map<std::string, std::string> fetch_all(
      const std::set<std::string>& doc_ids) {
    std::map<std::string, std::string> docs;
    for (const auto& id : doc_ids) docs.emplace(id, fetch(id));
    return docs;
  }
};

// Full crawl state: the issued-query log, the candidate term pool, retrieved
// documents and the statistics index over them. Single-owner; transferable
// between threads.
struct crawl_state {
  std::vector<query_outcome> issued_queries;
  std::set<std::string> candidate_pool;  // never contains issued terms
  std::set<std::string> issued_terms;
  std::set<std::string> retrieved_docs;
  term_statistics_index index;
  stop_word_list stops;
  std::optional<std::string> staged_seed;  // issued by the first step

  std::size_t coverage() const { return retrieved_docs.size(); }

  bool has_next_term() const {
    return staged_seed.has_value() || !candidate_pool.empty();
  }
};

// Stages the normalized seed term as the first query. Throws empty_seed when
// the seed normalizes to nothing; a multi-token seed uses its first token
// (the interface accepts single terms only).
inline crawl_state init_state(std::string_view domain_seed,
                              stop_word_list stops = stop_word_list::defaults()) {
  auto tokens = tokenize(domain_seed);
  if (tokens.empty()) {
    throw empty_seed("seed '" + std::string(domain_seed) +
                     "' normalizes to nothing");
  }
  crawl_state state;
  state.stops = std::move(stops);
  state.staged_seed = tokens.front();
  return state;
}

// Issues the next query: the staged seed first, thereafter the top-ranked
// unissued term. Fresh results are parsed and ingested, the pool absorbs
// their vocabulary, and the outcome is classified and logged.
inline query_outcome step(crawl_state& state, query_interface& search) {
  std::string term;
  if (state.staged_seed) {
    term = *state.staged_seed;
    state.staged_seed.reset();
  } else {
    auto ranked = rank_terms(state.index, state.issued_terms);
    if (ranked.empty()) {
      // cannot occur while the pool is non-empty: pool terms come from
      // indexed documents
      assert(state.candidate_pool.empty());
      throw pool_exhausted("no unused candidate term remains");
    }
    term = ranked.front().term;
  }

  state.issued_terms.insert(term);
  state.candidate_pool.erase(term);

  std::set<std::string> hits = search.search(term);
  std::set<std::string> fresh_ids;
  for (const auto& id : hits) {
    if (!state.retrieved_docs.count(id)) fresh_ids.insert(id);
  }

  // fetch the batch, then ingest in sorted doc_id order
  std::map<std::string, std::string> fetched = search.fetch_all(fresh_ids);
  for (const auto& [doc_id, html_text] : fetched) {
    parsed_document parsed =
        parse_document(doc_id, html_text, state.stops);
    state.retrieved_docs.insert(doc_id);
    state.index.add_document(parsed);
    for (const auto& vocab_term : parsed.vocabulary()) {
      if (!state.issued_terms.count(vocab_term)) {
        state.candidate_pool.insert(vocab_term);
      }
    }
  }

  query_outcome outcome;
  outcome.term = term;
  outcome.docs_returned = hits.size();
  outcome.fresh_docs = fresh_ids.size();
  if (outcome.docs_returned == 0) {
    outcome.classification = outcome_class::no_results;
  } else if (outcome.fresh_docs > 0) {
    outcome.classification = outcome_class::successful;
  } else {
    outcome.classification = outcome_class::unsuccessful;
  }
  outcome.issued_at = state.issued_queries.size() + 1;
  state.issued_queries.push_back(outcome);
  return outcome;
}

// Applies step until the pool is exhausted, the known database size is
// covered, the query budget is spent, or the wall-clock budget runs out.
// The state keeps the complete outcome log; search failures propagate with
// the state intact up to the failing query.
inline void run(crawl_state& state, query_interface& search,
                const crawl_limits& limits) {
  if (limits.max_queries < 1) {
    throw std::invalid_argument("max_queries must be at least 1");
  }
  auto started = std::chrono::steady_clock::now();
  while (state.has_next_term()) {
    if (state.issued_queries.size() >= limits.max_queries) break;
    if (limits.db_size_hint && state.coverage() >= *limits.db_size_hint) break;
    if (limits.budget_seconds) {
      std::chrono::duration<double> elapsed =
          std::chrono::steady_clock::now() - started;
      if (elapsed.count() >= *limits.budget_seconds) break;
    }
    step(state, search);
  }
}

// How many fresh documents the term would contribute right now. Read-only:
// the state is not touched.
inline std::size_t marginal_coverage(const crawl_state& state,
                                     const std::string& term,
                                     query_interface& search) {
  std::size_t fresh = 0;
  for (const auto& id : search.search(term)) {
    if (!state.retrieved_docs.count(id)) ++fresh;
  }
  return fresh;
}

// Testing oracle with full corpus visibility: exact greedy marginal-coverage
// maximization (ties term-ascending) until full coverage or the vocabulary
// is exhausted. Intended for small corpora.
inline std::vector<std::string> oracle_greedy_cover(
    const std::map<std::string, std::set<std::string>>& corpus,
    const std::set<std::string>& vocab) {
  std::map<std::string, std::set<std::string>> hits_by_term;
  for (const auto& [doc_id, terms] : corpus) {
    for (const auto& term : terms) {
      if (vocab.count(term)) hits_by_term[term].insert(doc_id);
    }
  }

  std::set<std::string> remaining(vocab);
  std::set<std::string> covered;
  std::vector<std::string> sequence;
  while (!remaining.empty() && covered.size() < corpus.size()) {
    std::string best;
    std::size_t best_gain = 0;
    bool have_best = false;
    for (const auto& term : remaining) {
      std::size_t gain = 0;
      auto hits = hits_by_term.find(term);
      if (hits != hits_by_term.end()) {
        for (const auto& id : hits->second) {
          if (!covered.count(id)) ++gain;
        }
      }
      if (!have_best || gain > best_gain) {
        best = term;
        best_gain = gain;
        have_best = true;
      }
    }
    sequence.push_back(best);
    remaining.erase(best);
    auto hits = hits_by_term.find(best);
    if (hits != hits_by_term.end()) {
      covered.insert(hits->second.begin(), hits->second.end());
    }
  }
  return sequence;
}

inline nlohmann::json to_json(const query_outcome& outcome) {
  return nlohmann::json{
      {"term", outcome.term},
      {"docs_returned", outcome.docs_returned},
      {"fresh_docs", outcome.fresh_docs},
      {"classification", std::string(outcome_class_name(outcome.classification))},
      {"issued_at", outcome.issued_at},
  };
}

// One outcome per line, keys sorted, compact.
inline void write_outcomes_jsonl(std::ostream& out,
                                 const std::vector<query_outcome>& outcomes) {
  for (const auto& o : outcomes) out << to_json(o).dump() << '\n';
}

inline std::vector<query_outcome> read_outcomes_jsonl(std::istream& in) {
  std::vector<query_outcome> outcomes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw format_error("outcomes line " + std::to_string(line_no) +
                         " is not a JSON object");
    }
    try {
      query_outcome o;
      o.term = j.at("term").get<std::string>();
      o.docs_returned = j.at("docs_returned").get<std::size_t>();
      o.fresh_docs = j.at("fresh_docs").get<std::size_t>();
      auto cls = outcome_class_from_name(j.at("classification").get<std::string>());
      if (!cls) throw format_error("unknown classification");
      o.classification = *cls;
      o.issued_at = j.at("issued_at").get<std::size_t>();
      outcomes.push_back(std::move(o));
    } catch (const nlohmann::json::exception& e) {
      throw format_error("outcomes line " + std::to_string(line_no) + ": " +
                         e.what());
    }
  }
  return outcomes;
}

inline void write_outcomes_csv(std::ostream& out,
                               const std::vector<query_outcome>& outcomes) {
  out << "issued_at,term,docs_returned,fresh_docs,classification\n";
  for (const auto& o : outcomes) {
    out << o.issued_at << ',' << o.term << ',' << o.docs_returned << ','
        << o.fresh_docs << ',' << outcome_class_name(o.classification) << '\n';
  }
}

}  // namespace vardf
