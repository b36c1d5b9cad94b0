#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <httplib.h>

#include "vardf/corpus.hpp"
#include "vardf/errors.hpp"
#include "vardf/text.hpp"
#include "vardf/url.hpp"

namespace vardf {

// The single-textbox search page every simulated database serves.
inline std::string simulator_form_page() {
  return "<!DOCTYPE html>\n"
         "<html>\n"
         "<head><title>Hidden database search</title></head>\n"
         "<body>\n"
         "<form action=\"/search\" method=\"get\">\n"
         "<input type=\"text\" name=\"q\">\n"
         "<input type=\"submit\" value=\"Search\">\n"
         "</form>\n"
         "</body>\n"
         "</html>\n";
}

namespace detail {

inline std::string escape_html_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

// Result page contract: an <ol id="results"> holding one /doc/{id} anchor
// per hit, ids ascending; the list element is present even with zero hits.
inline std::string simulator_results_page(const std::set<std::string>& hit_ids) {
  std::string body =
      "<!DOCTYPE html>\n"
      "<html>\n"
      "<head><title>Search results</title></head>\n"
      "<body>\n"
      "<ol id=\"results\">\n";
  for (const auto& id : hit_ids) {
    body += "<li><a href=\"/doc/" + percent_encode(id) + "\">" +
            detail::escape_html_text(id) + "</a></li>\n";
  }
  body +=
      "</ol>\n"
      "</body>\n"
      "</html>\n";
  return body;
}

// A corpus reachable only through keyword search: raw documents plus an
// inverted index over their parsed occurrences (any position counts).
// Immutable after build; concurrent reads are safe.
class hidden_database {
public:
  hidden_database() = default;

  static hidden_database build(const std::map<std::string, std::string>& docs,
                               const stop_word_list& stops) {
    hidden_database db;
    for (const auto& [doc_id, html_text] : docs) {
      db.add(doc_id, html_text, stops);
    }
    return db;
  }

  // Ingests every parseable .html/.htm file; undecodable files are skipped
  // with a warning.
  static hidden_database build_from_directory(
      const std::filesystem::path& dir, const stop_word_list& stops,
      std::vector<std::string>* warnings = nullptr) {
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

    hidden_database db;
    for (const auto& path : files) {
      std::string bytes = read_file_bytes(path);
      try {
        db.add(path.stem().string(), std::move(bytes), stops);
      } catch (const malformed_input& e) {
        if (warnings) warnings->push_back(std::string(e.what()) + "; skipped");
      }
    }
    return db;
  }

  // Exact-match single-token search. The raw query is normalized; anything
  // that is not a single token (including the empty string) finds nothing.
  // Stop words are not filtered from the query; they simply have no index
  // entries to hit.
  std::set<std::string> search(std::string_view raw_term) const {
    auto tokens = tokenize(raw_term);
    if (tokens.size() != 1) return {};
    auto it = search_index_.find(tokens.front());
    if (it == search_index_.end()) return {};
    return it->second;
  }

  const std::string* document(const std::string& doc_id) const {
    auto it = documents_.find(doc_id);
    return it == documents_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return documents_.size(); }
  const std::map<std::string, std::string>& documents() const {
    return documents_;
  }
  const std::map<std::string, std::set<std::string>>& search_index() const {
    return search_index_;
  }

  std::string results_page(std::string_view raw_term) const {
    return simulator_results_page(search(raw_term));
  }

private:
  void add(std::string doc_id, std::string html_text,
           const stop_word_list& stops) {
    parsed_document parsed = parse_document(doc_id, html_text, stops);
    for (const auto& term : parsed.vocabulary()) {
      search_index_[term].insert(doc_id);
    }
    documents_.emplace(std::move(doc_id), std::move(html_text));
  }

  std::map<std::string, std::string> documents_;
  std::map<std::string, std::set<std::string>> search_index_;
};

// Serves a hidden_database over HTTP on a background thread:
//   GET /            the single-textbox search form
//   GET /search?q=t  the result list page
//   GET /doc/{id}    the stored document, byte for byte
// Binds in the constructor (port 0 picks an ephemeral port); stops on
// destruction. The database must outlive the server.
class db_server {
public:
  db_server(const hidden_database& db, const std::string& host, int port)
      : db_(&db), host_(host) {
    server_.Get("/", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(simulator_form_page(), "text/html");
    });
    server_.Get("/search",
                [this](const httplib::Request& req, httplib::Response& res) {
                  std::string q = req.get_param_value("q");
                  res.set_content(db_->results_page(q), "text/html");
                });
    server_.Get(R"(/doc/(.+))",
                [this](const httplib::Request& req, httplib::Response& res) {
                  const std::string* doc = db_->document(req.matches[1]);
                  if (!doc) {
                    res.status = 404;
                    res.set_content("document not found", "text/plain");
                    return;
                  }
                  res.set_content(*doc, "text/html");
                });

    // SO_REUSEADDR alone: a stopped server's port is rebindable right away,
    // but a port another live server holds fails loudly instead of being
    // silently shared through SO_REUSEPORT.
    server_.set_socket_options([](socket_t sock) {
      int on = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR,
                   reinterpret_cast<const char*>(&on), sizeof(on));
    });

    if (port == 0) {
      port_ = server_.bind_to_any_port(host);
      if (port_ < 0) throw bind_error("cannot bind " + host + " (any port)");
    } else {
      if (!server_.bind_to_port(host, port)) {
        throw bind_error("cannot bind " + host + ":" + std::to_string(port));
      }
      port_ = port;
    }
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  db_server(const db_server&) = delete;
  db_server& operator=(const db_server&) = delete;

  ~db_server() { stop(); }

  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }

  int port() const { return port_; }

  std::string base_url() const {
    return "http://" + host_ + ":" + std::to_string(port_);
  }

private:
  const hidden_database* db_;
  std::string host_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace vardf
