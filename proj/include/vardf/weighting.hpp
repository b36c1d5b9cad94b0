#pragma once

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "vardf/format.hpp"
#include "vardf/term_index.hpp"

namespace vardf {

// A ranked candidate term: total weight plus its per-position contributions.
struct term_weight {
  std::string term;
  double weight = 0.0;
  std::map<position, double> breakdown;  // varwt(pos) * df(pos) where df > 0
};

// Position weight: total indexed documents over the number of distinct terms
// occurring at that position. An unoccupied position weighs 0 by definition.
inline double varwt(const term_statistics_index& index, position pos) {
  std::size_t distinct = index.distinct_terms_count(pos);
  if (distinct == 0) return 0.0;
  return static_cast<double>(index.document_count()) /
         static_cast<double>(distinct);
}

// Variable document frequency: sum of varwt(pos) * df(term, pos) over every
// position where the term appears. Unknown terms weigh 0.
inline term_weight vardf(const term_statistics_index& index,
                         const std::string& term) {
  term_weight result;
  result.term = term;
  auto entry = index.entries().find(term);
  if (entry == index.entries().end()) return result;
  for (const auto& [pos, stats] : entry->second.per_position) {
    double contribution =
        varwt(index, pos) * static_cast<double>(stats.docs.size());
    result.breakdown[pos] = contribution;
    result.weight += contribution;
  }
  return result;
}

// Every indexed term not in `exclude`, weight descending; ties break by term
// ascending so the ranking is deterministic.
inline std::vector<term_weight> rank_terms(const term_statistics_index& index,
                                           const std::set<std::string>& exclude = {}) {
  std::vector<term_weight> ranked;
  ranked.reserve(index.entries().size());
  for (const auto& [term, entry] : index.entries()) {
    if (exclude.count(term)) continue;
    ranked.push_back(vardf(index, term));
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const term_weight& a, const term_weight& b) {
              if (a.weight != b.weight) return a.weight > b.weight;
              return a.term < b.term;
            });
  return ranked;
}

// CSV dump: term, total weight, then one column per position contribution.
inline void write_weights_csv(std::ostream& out,
                              const std::vector<term_weight>& ranked) {
  out << "term,weight";
  for (position p : all_positions) out << ',' << position_name(p);
  out << '\n';
  for (const term_weight& w : ranked) {
    out << w.term << ',' << format_number(w.weight);
    for (position p : all_positions) {
      auto it = w.breakdown.find(p);
      out << ',' << format_number(it == w.breakdown.end() ? 0.0 : it->second);
    }
    out << '\n';
  }
}

}  // namespace vardf
