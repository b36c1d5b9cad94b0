#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "vardf/errors.hpp"
#include "vardf/evaluation.hpp"
#include "vardf/greedy.hpp"
#include "vardf/hidden_db.hpp"
#include "vardf/html.hpp"
#include "vardf/url.hpp"

namespace vardf {

// What the first form on a page looks like: where it submits, and whether it
// is a single-textbox keyword interface. keyword_based holds exactly when
// there is one text input and no other data input that would need filling
// (submit controls and hidden fields are not data inputs).
struct form_descriptor {
  std::string action_url;
  std::string method = "GET";
  std::vector<std::string> text_inputs;  // input names, document order
  std::size_t other_inputs = 0;          // non-text data controls
  bool keyword_based = false;
};

inline form_descriptor analyze_form(std::string_view html_text) {
  html::scanner scan(html_text);
  bool in_form = false;
  bool found_form = false;
  form_descriptor form;

  for (auto ev = scan.next(); ev != html::scanner::event::end; ev = scan.next()) {
    if (ev != html::scanner::event::tag) continue;
    const html::tag& t = scan.current_tag();
    if (!t.closing && (t.name == "script" || t.name == "style")) {
      scan.skip_raw_text(t.name);
      continue;
    }
    if (!in_form) {
      if (t.name == "form" && !t.closing && !found_form) {
        in_form = true;
        found_form = true;
        if (const std::string* action = t.attr("action")) form.action_url = *action;
        if (const std::string* method = t.attr("method")) {
          std::string upper;
          for (char c : *method) {
            upper.push_back(c >= 'a' && c <= 'z' ? static_cast<char>(c - 'a' + 'A') : c);
          }
          form.method = (upper == "POST") ? "POST" : "GET";
        }
      }
      continue;
    }
    if (t.name == "form" && t.closing) break;
    if (t.name == "input" && !t.closing) {
      std::string type = "text";  // the HTML default
      if (const std::string* attr = t.attr("type")) {
        type.clear();
        for (char c : *attr) type.push_back(to_lower_ascii(c));
      }
      if (type == "text" || type == "search") {
        const std::string* name = t.attr("name");
        form.text_inputs.push_back(name ? *name : "");
      } else if (type == "submit" || type == "button" || type == "image" ||
                 type == "reset" || type == "hidden") {
        // not a data input the crawler would have to fill
      } else {
        ++form.other_inputs;
      }
    } else if ((t.name == "select" || t.name == "textarea") && !t.closing) {
      ++form.other_inputs;
    }
  }

  if (!found_form) throw no_form_found("page contains no form element");
  form.keyword_based = form.text_inputs.size() == 1 && form.other_inputs == 0;
  return form;
}

// Pulls document ids out of a result page: every /doc/{id} anchor under the
// <ol id="results"> list, in page order.
inline std::vector<std::string> extract_result_ids(std::string_view results_html) {
  html::scanner scan(results_html);
  std::vector<std::string> ids;
  int list_depth = 0;
  for (auto ev = scan.next(); ev != html::scanner::event::end; ev = scan.next()) {
    if (ev != html::scanner::event::tag) continue;
    const html::tag& t = scan.current_tag();
    if (t.name == "ol") {
      if (!t.closing) {
        const std::string* id = t.attr("id");
        if (list_depth > 0 || (id && *id == "results")) ++list_depth;
      } else if (list_depth > 0) {
        --list_depth;
      }
      continue;
    }
    if (list_depth == 0 || t.closing || t.name != "a") continue;
    const std::string* href = t.attr("href");
    if (!href) continue;
    auto at = href->find("/doc/");
    if (at == std::string::npos) continue;
    std::string id = href->substr(at + 5);
    if (auto cut = id.find_first_of("?#"); cut != std::string::npos) {
      id.resize(cut);
    }
    ids.push_back(percent_decode(id));
  }
  return ids;
}

// A query_interface that can also hand over the search form page, so the
// keyword-interface gate runs identically over HTTP and in process.
class crawl_transport : public query_interface {
public:
  virtual std::string form_page() = 0;
  virtual void prepare(const form_descriptor&) {}
};

// Direct access to a hidden_database, bypassing HTTP. Presents the same
// form page and result semantics as the served simulator.
class in_process_transport final : public crawl_transport {
public:
  explicit in_process_transport(const hidden_database& db) : db_(&db) {}

  std::string form_page() override { return simulator_form_page(); }

  std::set<std::string> search(const std::string& term) override {
    return db_->search(term);
  }

  std::string fetch(const std::string& doc_id) override {
    const std::string* doc = db_->document(doc_id);
    if (!doc) throw search_failure("unknown document id: " + doc_id);
    return *doc;
  }

private:
  const hidden_database* db_;
};

struct http_options {
  int max_retries = 3;       // extra attempts after the first
  int backoff_ms = 250;      // fixed pause between attempts
  int politeness_delay_ms = 0;  // pause before each query submission
};

// HTTP transport written against the simulator's page contract: form
// submission, result-link following, document download. Transient failures
// (connect errors, 5xx) are retried; anything left over aborts the crawl as
// a network_error.
class http_transport final : public crawl_transport {
public:
  explicit http_transport(const std::string& url, http_options opts = {})
      : opts_(opts) {
    auto split = split_url(url);
    origin_ = split.origin;
    page_path_ = split.path;
  }

  std::string form_page() override { return request(page_path_, nullptr); }

  void prepare(const form_descriptor& form) override {
    action_path_ = resolve_action(origin_, page_path_, form.action_url);
    param_name_ = form.text_inputs.empty() ? "" : form.text_inputs.front();
    use_post_ = form.method == "POST";
  }

  std::set<std::string> search(const std::string& term) override {
    if (param_name_.empty()) {
      throw search_failure("transport not prepared with a form descriptor");
    }
    if (opts_.politeness_delay_ms > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(opts_.politeness_delay_ms));
    }
    std::string body;
    if (use_post_) {
      std::string form_body =
          percent_encode(param_name_) + "=" + percent_encode(term);
      body = request(action_path_, &form_body);
    } else {
      body = request(action_path_ + "?" + percent_encode(param_name_) + "=" +
                         percent_encode(term),
                     nullptr);
    }
    auto ids = extract_result_ids(body);
    return {ids.begin(), ids.end()};
  }

  std::string fetch(const std::string& doc_id) override {
    return request("/doc/" + percent_encode(doc_id), nullptr);
  }

  // Fetches are pure reads, so the batch runs concurrently in bounded
  // chunks; the caller ingests from the sorted map.
  std::map<std::string, std::string> fetch_all(
      const std::set<std::string>& doc_ids) override {
    std::map<std::string, std::string> docs;
    if (doc_ids.size() < 2) {
      for (const auto& id : doc_ids) docs.emplace(id, fetch(id));
      return docs;
    }
    constexpr std::size_t max_in_flight = 8;
    std::vector<std::string> ids(doc_ids.begin(), doc_ids.end());
    std::exception_ptr failure;
    for (std::size_t base = 0; base < ids.size(); base += max_in_flight) {
      std::size_t count = std::min(max_in_flight, ids.size() - base);
      std::vector<std::future<std::string>> in_flight;
      in_flight.reserve(count);
      for (std::size_t k = 0; k < count; ++k) {
        in_flight.push_back(std::async(std::launch::async, [this, &ids, base, k] {
          return fetch(ids[base + k]);
        }));
      }
      for (std::size_t k = 0; k < count; ++k) {
        try {
          docs.emplace(ids[base + k], in_flight[k].get());
        } catch (...) {
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) break;
    }
    if (failure) std::rethrow_exception(failure);
    return docs;
  }

private:
  // One HTTP exchange with the retry policy. post_body, when given, is an
  // x-www-form-urlencoded payload.
  std::string request(const std::string& path, const std::string* post_body) {
    std::string last_error;
    for (int attempt = 0; attempt <= opts_.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(opts_.backoff_ms));
      }
      httplib::Client client(origin_);
      httplib::Result result =
          post_body ? client.Post(path, *post_body,
                                  "application/x-www-form-urlencoded")
                    : client.Get(path);
      if (!result) {
        last_error = "connect: " + httplib::to_string(result.error());
        continue;
      }
      if (result->status >= 500) {
        last_error = "HTTP " + std::to_string(result->status);
        continue;
      }
      if (result->status != 200) {
        throw network_error("HTTP " + std::to_string(result->status) + " for " +
                            origin_ + path);
      }
      return result->body;
    }
    throw network_error("request failed after " +
                        std::to_string(opts_.max_retries + 1) + " attempts: " +
                        origin_ + path + " (" + last_error + ")");
  }

  std::string origin_;
  std::string page_path_;
  std::string action_path_;
  std::string param_name_;
  bool use_post_ = false;
  http_options opts_;
};

// Decorator that writes every fetched document to {dir}/{doc_id}.html.
// Only fresh documents are ever fetched, so the store holds exactly the
// retrieved set.
class document_store final : public query_interface {
public:
  document_store(query_interface& inner, std::filesystem::path dir)
      : inner_(&inner), dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw io_error("cannot create storage dir: " + dir_.string());
  }

  std::set<std::string> search(const std::string& term) override {
    return inner_->search(term);
  }

  std::string fetch(const std::string& doc_id) override {
    std::string bytes = inner_->fetch(doc_id);
    save(doc_id, bytes);
    return bytes;
  }

  std::map<std::string, std::string> fetch_all(
      const std::set<std::string>& doc_ids) override {
    auto docs = inner_->fetch_all(doc_ids);
    for (const auto& [id, bytes] : docs) save(id, bytes);
    return docs;
  }

private:
  void save(const std::string& doc_id, const std::string& bytes) const {
    std::string name = doc_id;
    for (char& c : name) {
      if (c == '/' || c == '\\') c = '_';  // keep ids inside the store
    }
    auto path = dir_ / (name + ".html");
    std::ofstream out(path, std::ios::binary);
    if (!out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
      throw io_error("cannot write " + path.string());
    }
  }

  query_interface* inner_;
  std::filesystem::path dir_;
};

struct crawl_options {
  std::string seed;
  crawl_limits limits;
  std::filesystem::path storage_dir;  // empty: documents are not saved
  stop_word_list stops = stop_word_list::defaults();
  double alpha = 1.0;
};

// Everything a finished (or aborted) crawl produced.
struct crawl_report {
  std::vector<query_outcome> outcomes;
  std::size_t coverage = 0;
  std::size_t total_queries = 0;
  std::string documents_dir;
  metrics_report metrics;
  std::optional<std::string> error;  // set when a network failure cut the run short
};

inline nlohmann::json to_json(const crawl_report& report) {
  nlohmann::json outcomes = nlohmann::json::array();
  for (const auto& o : report.outcomes) outcomes.push_back(to_json(o));
  return nlohmann::json{
      {"coverage", report.coverage},
      {"total_queries", report.total_queries},
      {"documents_dir", report.documents_dir},
      {"metrics", to_json(report.metrics)},
      {"outcomes", std::move(outcomes)},
      {"error", report.error ? nlohmann::json(*report.error) : nlohmann::json()},
  };
}

// Verifies the interface is a single-textbox keyword form, then runs the
// greedy crawl through it. A network failure aborts the run but the report
// keeps everything retrieved up to that point.
inline crawl_report crawl(crawl_transport& transport, const crawl_options& opts) {
  form_descriptor form = analyze_form(transport.form_page());
  if (!form.keyword_based) {
    throw not_keyword_interface(
        "form is not a single-textbox keyword interface (" +
        std::to_string(form.text_inputs.size()) + " text inputs, " +
        std::to_string(form.other_inputs) + " other data inputs)");
  }
  if (form.text_inputs.front().empty()) {
    throw not_keyword_interface("the text input has no name to submit");
  }
  transport.prepare(form);

  crawl_state state = init_state(opts.seed, opts.stops);

  std::optional<document_store> store;
  query_interface* search = &transport;
  if (!opts.storage_dir.empty()) {
    store.emplace(transport, opts.storage_dir);
    search = &*store;
  }

  crawl_report report;
  try {
    run(state, *search, opts.limits);
  } catch (const search_failure& e) {
    report.error = e.what();
  }

  report.outcomes = state.issued_queries;
  report.coverage = state.coverage();
  report.total_queries = report.outcomes.size();
  report.documents_dir = opts.storage_dir.string();
  report.metrics = compute_metrics(tally(report.outcomes), opts.alpha);
  return report;
}

}  // namespace vardf
