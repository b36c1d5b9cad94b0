#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "vardf/format.hpp"
#include "vardf/greedy.hpp"

namespace vardf {

// Query-level crawl metrics over the Successful/Unsuccessful/NoResults
// tallies. A metric whose denominator is zero is undefined, which is
// reported distinctly from zero.
struct metrics_report {
  std::size_t s = 0;  // queries retrieving at least one fresh document
  std::size_t u = 0;  // queries retrieving only already-seen documents
  std::size_t n = 0;  // queries retrieving nothing
  double alpha = 1.0;
  std::optional<double> precision;  // s / (s + u)
  std::optional<double> recall;     // s / (s + n)
  std::optional<double> f_measure;  // (1 + alpha) P R / (alpha P + R)
};

struct sun_tally {
  std::size_t s = 0;
  std::size_t u = 0;
  std::size_t n = 0;
};

inline sun_tally tally(const std::vector<query_outcome>& outcomes) {
  sun_tally t;
  for (const auto& o : outcomes) {
    switch (o.classification) {
      case outcome_class::successful: ++t.s; break;
      case outcome_class::unsuccessful: ++t.u; break;
      case outcome_class::no_results: ++t.n; break;
    }
  }
  return t;
}

inline metrics_report compute_metrics(std::size_t s, std::size_t u,
                                      std::size_t n, double alpha = 1.0) {
  metrics_report r;
  r.s = s;
  r.u = u;
  r.n = n;
  r.alpha = alpha;
  if (s + u > 0) {
    r.precision = static_cast<double>(s) / static_cast<double>(s + u);
  }
  if (s + n > 0) {
    r.recall = static_cast<double>(s) / static_cast<double>(s + n);
  }
  if (r.precision && r.recall) {
    double denom = alpha * *r.precision + *r.recall;
    if (denom > 0) {
      r.f_measure = (1.0 + alpha) * *r.precision * *r.recall / denom;
    }
  }
  return r;
}

inline metrics_report compute_metrics(const sun_tally& t, double alpha = 1.0) {
  return compute_metrics(t.s, t.u, t.n, alpha);
}

// Undefined metrics serialize as null, never as 0.
inline nlohmann::json to_json(const metrics_report& r) {
  return nlohmann::json{
      {"s", r.s},
      {"u", r.u},
      {"n", r.n},
      {"alpha", json_number(r.alpha)},
      {"precision", json_number(r.precision)},
      {"recall", json_number(r.recall)},
      {"f_measure", json_number(r.f_measure)},
  };
}

inline void print_metrics_table(std::ostream& out, const metrics_report& r) {
  out << "queries       " << (r.s + r.u + r.n) << '\n'
      << "successful    " << r.s << '\n'
      << "unsuccessful  " << r.u << '\n'
      << "no_results    " << r.n << '\n'
      << "precision     " << format_percent(r.precision) << '\n'
      << "recall        " << format_percent(r.recall) << '\n'
      << "f_measure     " << format_percent(r.f_measure) << '\n';
}

}  // namespace vardf
