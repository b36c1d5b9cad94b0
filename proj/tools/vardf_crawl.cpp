// vardf-crawl: serve a simulated hidden database, crawl a keyword search
// interface, and evaluate the resulting query log.
//
// Exit codes: 0 success, 1 domain/runtime errors, 2 usage errors.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "vardf/vardf.hpp"

namespace {

// A bad flag combination detected after parsing; reported like any other
// usage error (exit 2).
struct usage_failure {
  std::string message;
};

std::atomic<bool> g_shutdown{false};

void request_shutdown(int) { g_shutdown = true; }

using config_map = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
  auto not_space = [](unsigned char c) { return std::isspace(c) == 0; };
  auto begin = std::find_if(s.begin(), s.end(), not_space);
  auto end = std::find_if(s.rbegin(), s.rend(), not_space).base();
  return begin < end ? std::string(begin, end) : std::string();
}

// Flat key=value settings file; blank lines and '#' lines are ignored.
// Flags override file values, which override built-in defaults.
config_map load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw vardf::io_error("cannot open config file: " + path);
  config_map values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw vardf::format_error("config line " + std::to_string(line_no) +
                                " is not key=value: " + entry);
    }
    values[trim(entry.substr(0, eq))] = trim(entry.substr(eq + 1));
  }
  return values;
}

// flag > config file > compiled-in default (the flag variable's initial value).
std::string resolve_text(const CLI::Option* opt, const std::string& flag_value,
                         const config_map& cfg, const char* key) {
  if (opt->count() > 0) return flag_value;
  if (auto it = cfg.find(key); it != cfg.end()) return it->second;
  return flag_value;
}

std::size_t parse_config_count(const std::string& text, const char* key) {
  try {
    std::size_t used = 0;
    auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw vardf::format_error(std::string("config value for ") + key +
                              " is not a count: " + text);
  }
}

double parse_config_real(const std::string& text, const char* key) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw vardf::format_error(std::string("config value for ") + key +
                              " is not a number: " + text);
  }
}

// flag > config stopwords_path > VARDF_STOPWORDS > built-in list.
vardf::stop_word_list resolve_stopwords(const CLI::Option* opt,
                                        const std::string& flag_value,
                                        const config_map& cfg) {
  if (opt->count() > 0) return vardf::stop_word_list::load_file(flag_value);
  if (auto it = cfg.find("stopwords_path"); it != cfg.end()) {
    return vardf::stop_word_list::load_file(it->second);
  }
  if (const char* env = std::getenv("VARDF_STOPWORDS"); env && *env) {
    return vardf::stop_word_list::load_file(env);
  }
  return vardf::stop_word_list::defaults();
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

void write_text_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw vardf::io_error("cannot write " + path.string());
  }
}

std::pair<std::string, int> split_bind_addr(const std::string& addr) {
  auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon + 1 == addr.size()) {
    throw usage_failure{"--addr must be HOST:PORT, got '" + addr + "'"};
  }
  std::string host = addr.substr(0, colon);
  if (host.empty()) host = "127.0.0.1";
  try {
    std::size_t used = 0;
    int port = std::stoi(addr.substr(colon + 1), &used);
    if (used != addr.size() - colon - 1 || port < 0 || port > 65535) {
      throw std::invalid_argument(addr);
    }
    return {host, port};
  } catch (const std::exception&) {
    throw usage_failure{"--addr has a bad port: '" + addr + "'"};
  }
}

vardf::term_statistics_index index_corpus_dir(const std::string& dir,
                                              const vardf::stop_word_list& stops) {
  auto ingested = vardf::ingest_directory(dir, stops);
  print_warnings(ingested.warnings);
  vardf::term_statistics_index index;
  for (const auto& doc : ingested.documents) index.add_document(doc);
  return index;
}

int run_serve(const std::string& corpus, const std::string& addr,
              const vardf::stop_word_list& stops) {
  auto [host, port] = split_bind_addr(addr);
  std::vector<std::string> warnings;
  auto db = vardf::hidden_database::build_from_directory(corpus, stops, &warnings);
  print_warnings(warnings);

  vardf::db_server server(db, host, port);
  std::cout << "serving " << db.size() << " documents at " << server.base_url()
            << "/" << std::endl;

  std::signal(SIGINT, request_shutdown);
  std::signal(SIGTERM, request_shutdown);
  while (!g_shutdown) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  server.stop();
  return 0;
}

int finish_crawl(const vardf::crawl_report& report, const std::string& report_path,
                 const std::string& outcomes_path, const std::string& csv_path) {
  if (!report_path.empty()) {
    write_text_file(report_path, vardf::to_json(report).dump(2) + "\n");
  }
  if (!outcomes_path.empty()) {
    std::ofstream out(outcomes_path, std::ios::binary);
    if (!out) throw vardf::io_error("cannot write " + outcomes_path);
    vardf::write_outcomes_jsonl(out, report.outcomes);
  }
  if (!csv_path.empty()) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw vardf::io_error("cannot write " + csv_path);
    vardf::write_outcomes_csv(out, report.outcomes);
  }

  std::cout << "coverage      " << report.coverage << '\n';
  if (!report.documents_dir.empty()) {
    std::cout << "stored_in     " << report.documents_dir << '\n';
  }
  vardf::print_metrics_table(std::cout, report.metrics);

  if (report.error) {
    std::cerr << "error: crawl aborted: " << *report.error << '\n';
    return 1;
  }
  return 0;
}

int run_evaluate(const vardf::metrics_report& metrics) {
  std::cout << vardf::to_json(metrics).dump(2) << "\n\n";
  vardf::print_metrics_table(std::cout, metrics);
  return 0;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"crawl a hidden text database behind a keyword search form"};
  app.name("vardf-crawl");
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "flat key=value settings file (flags take precedence)");

  // serve ------------------------------------------------------------------
  auto* serve = app.add_subcommand(
      "serve", "serve a corpus directory as a searchable hidden database");
  serve->fallthrough();
  std::string serve_corpus;
  std::string serve_addr = "127.0.0.1:8080";
  std::string serve_stops;
  auto* serve_corpus_opt =
      serve->add_option("--corpus", serve_corpus, "directory of .html documents");
  auto* serve_addr_opt =
      serve->add_option("--addr", serve_addr, "bind address HOST:PORT (port 0 = ephemeral)");
  auto* serve_stops_opt =
      serve->add_option("--stopwords", serve_stops, "stop-word list file");

  // crawl ------------------------------------------------------------------
  auto* crawl_cmd = app.add_subcommand(
      "crawl", "run a greedy term-by-term crawl against a search interface");
  crawl_cmd->fallthrough();
  std::string crawl_url, crawl_corpus, crawl_seed, crawl_stops;
  std::string crawl_out = "documents";
  std::string report_path, outcomes_path, outcomes_csv_path;
  bool self_serve = false;
  bool in_process = false;
  std::size_t max_queries = 1000;
  std::size_t db_size = 0;
  double alpha = 1.0;
  double budget_seconds = 0.0;
  int delay_ms = 0;
  auto* url_opt =
      crawl_cmd->add_option("--url", crawl_url, "URL of the search form page");
  crawl_cmd->add_flag("--self-serve", self_serve,
                      "serve --corpus on an ephemeral port and crawl it");
  crawl_cmd->add_flag("--in-process", in_process,
                      "with --self-serve: query the database directly, no HTTP");
  auto* crawl_corpus_opt = crawl_cmd->add_option(
      "--corpus", crawl_corpus, "corpus directory for --self-serve");
  auto* seed_opt =
      crawl_cmd->add_option("--seed", crawl_seed, "domain seed term, issued first");
  auto* max_q_opt = crawl_cmd->add_option("--max-queries", max_queries, "query budget")
                        ->check(CLI::PositiveNumber);
  auto* db_size_opt =
      crawl_cmd->add_option("--db-size", db_size,
                            "known database size; crawl stops at full coverage")
          ->check(CLI::PositiveNumber);
  auto* budget_opt =
      crawl_cmd->add_option("--budget-seconds", budget_seconds, "wall-clock budget")
          ->check(CLI::PositiveNumber);
  crawl_cmd->add_option("--delay-ms", delay_ms, "politeness delay before each query")
      ->check(CLI::NonNegativeNumber);
  auto* out_opt = crawl_cmd->add_option("--out", crawl_out,
                                        "directory for retrieved documents");
  auto* crawl_stops_opt =
      crawl_cmd->add_option("--stopwords", crawl_stops, "stop-word list file");
  crawl_cmd->add_option("--report", report_path, "write the crawl report as JSON");
  crawl_cmd->add_option("--outcomes", outcomes_path,
                        "write the outcome log as JSON lines");
  crawl_cmd->add_option("--outcomes-csv", outcomes_csv_path,
                        "write the outcome log as CSV");
  auto* crawl_alpha_opt =
      crawl_cmd->add_option("--alpha", alpha, "precision weight in the F-measure")
          ->check(CLI::NonNegativeNumber);

  // evaluate ---------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "compute precision/recall/F from an outcome log or raw counts");
  eval_cmd->fallthrough();
  std::string eval_outcomes;
  unsigned long long ev_s = 0, ev_u = 0, ev_n = 0;
  double eval_alpha = 1.0;
  auto* eval_outcomes_opt = eval_cmd->add_option(
      "--outcomes", eval_outcomes, "outcome log in JSON-lines form");
  auto* s_opt = eval_cmd->add_option("--s", ev_s, "count of successful queries");
  auto* u_opt = eval_cmd->add_option("--u", ev_u, "count of unsuccessful queries");
  auto* n_opt = eval_cmd->add_option("--n", ev_n, "count of no-result queries");
  auto* eval_alpha_opt =
      eval_cmd->add_option("--alpha", eval_alpha, "precision weight in the F-measure")
          ->check(CLI::NonNegativeNumber);

  // weights dump -----------------------------------------------------------
  auto* weights_cmd = app.add_subcommand("weights", "term-weight utilities");
  weights_cmd->fallthrough();
  weights_cmd->require_subcommand(1);
  auto* dump_cmd =
      weights_cmd->add_subcommand("dump", "rank terms by weight and emit CSV");
  dump_cmd->fallthrough();
  std::string wd_index, wd_corpus, wd_stops, wd_out;
  auto* wd_index_opt = dump_cmd->add_option(
      "--index", wd_index, "serialized term-statistics index (JSON)");
  auto* wd_corpus_opt = dump_cmd->add_option(
      "--corpus", wd_corpus, "corpus directory to index on the fly");
  auto* wd_stops_opt =
      dump_cmd->add_option("--stopwords", wd_stops, "stop-word list file");
  dump_cmd->add_option("--out", wd_out, "output CSV path (default: stdout)");

  // index build ------------------------------------------------------------
  auto* index_cmd = app.add_subcommand("index", "term-statistics index utilities");
  index_cmd->fallthrough();
  index_cmd->require_subcommand(1);
  auto* build_cmd =
      index_cmd->add_subcommand("build", "index a corpus directory and emit JSON");
  build_cmd->fallthrough();
  std::string ib_corpus, ib_stops, ib_out;
  auto* ib_corpus_opt =
      build_cmd->add_option("--corpus", ib_corpus, "directory of .html documents");
  auto* ib_stops_opt =
      build_cmd->add_option("--stopwords", ib_stops, "stop-word list file");
  build_cmd->add_option("--out", ib_out, "output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    CLI::App* target = &app;
    while (!target->get_subcommands().empty()) {
      target = target->get_subcommands().front();
    }
    std::cout << target->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  config_map cfg;
  if (!config_path.empty()) cfg = load_config(config_path);

  if (serve->parsed()) {
    std::string corpus = resolve_text(serve_corpus_opt, serve_corpus, cfg, "corpus_dir");
    if (corpus.empty()) {
      throw usage_failure{"serve needs --corpus (or corpus_dir in the config)"};
    }
    std::string addr = resolve_text(serve_addr_opt, serve_addr, cfg, "bind_addr");
    return run_serve(corpus, addr, resolve_stopwords(serve_stops_opt, serve_stops, cfg));
  }

  if (crawl_cmd->parsed()) {
    std::string corpus = resolve_text(crawl_corpus_opt, crawl_corpus, cfg, "corpus_dir");
    bool have_url = url_opt->count() > 0;
    if (have_url == self_serve) {
      throw usage_failure{"crawl needs exactly one of --url or --self-serve"};
    }
    if (in_process && !self_serve) {
      throw usage_failure{"--in-process requires --self-serve"};
    }
    if (self_serve && corpus.empty()) {
      throw usage_failure{"--self-serve needs --corpus (or corpus_dir in the config)"};
    }

    vardf::crawl_options opts;
    opts.seed = resolve_text(seed_opt, crawl_seed, cfg, "seed_term");
    if (opts.seed.empty()) {
      throw usage_failure{"crawl needs --seed (or seed_term in the config)"};
    }
    opts.limits.max_queries = max_queries;
    if (max_q_opt->count() == 0) {
      if (auto it = cfg.find("max_queries"); it != cfg.end()) {
        opts.limits.max_queries = parse_config_count(it->second, "max_queries");
      }
    }
    if (db_size_opt->count() > 0) {
      opts.limits.db_size_hint = db_size;
    } else if (auto it = cfg.find("db_size"); it != cfg.end()) {
      opts.limits.db_size_hint = parse_config_count(it->second, "db_size");
    }
    if (budget_opt->count() > 0) opts.limits.budget_seconds = budget_seconds;
    opts.storage_dir = resolve_text(out_opt, crawl_out, cfg, "output_dir");
    opts.stops = resolve_stopwords(crawl_stops_opt, crawl_stops, cfg);
    opts.alpha = alpha;
    if (crawl_alpha_opt->count() == 0) {
      if (auto it = cfg.find("alpha"); it != cfg.end()) {
        opts.alpha = parse_config_real(it->second, "alpha");
      }
    }

    vardf::http_options hopts;
    hopts.politeness_delay_ms = delay_ms;

    vardf::crawl_report report;
    if (self_serve) {
      std::vector<std::string> warnings;
      auto db = vardf::hidden_database::build_from_directory(
          corpus, opts.stops, &warnings);
      print_warnings(warnings);
      if (in_process) {
        vardf::in_process_transport transport(db);
        report = vardf::crawl(transport, opts);
      } else {
        vardf::db_server server(db, "127.0.0.1", 0);
        vardf::http_transport transport(server.base_url() + "/", hopts);
        report = vardf::crawl(transport, opts);
        server.stop();
      }
    } else {
      vardf::http_transport transport(crawl_url, hopts);
      report = vardf::crawl(transport, opts);
    }
    return finish_crawl(report, report_path, outcomes_path, outcomes_csv_path);
  }

  if (eval_cmd->parsed()) {
    double a = eval_alpha;
    if (eval_alpha_opt->count() == 0) {
      if (auto it = cfg.find("alpha"); it != cfg.end()) {
        a = parse_config_real(it->second, "alpha");
      }
    }
    bool have_counts = s_opt->count() || u_opt->count() || n_opt->count();
    if (eval_outcomes_opt->count() > 0 && have_counts) {
      throw usage_failure{"pass either --outcomes or --s/--u/--n, not both"};
    }
    if (eval_outcomes_opt->count() > 0) {
      std::ifstream in(eval_outcomes, std::ios::binary);
      if (!in) throw vardf::io_error("cannot open outcome log: " + eval_outcomes);
      auto outcomes = vardf::read_outcomes_jsonl(in);
      return run_evaluate(vardf::compute_metrics(vardf::tally(outcomes), a));
    }
    if (s_opt->count() && u_opt->count() && n_opt->count()) {
      return run_evaluate(vardf::compute_metrics(ev_s, ev_u, ev_n, a));
    }
    throw usage_failure{"evaluate needs --outcomes FILE or all of --s/--u/--n"};
  }

  if (dump_cmd->parsed()) {
    std::string corpus = resolve_text(wd_corpus_opt, wd_corpus, cfg, "corpus_dir");
    if (wd_index_opt->count() > 0 && wd_corpus_opt->count() > 0) {
      throw usage_failure{"pass either --index or --corpus, not both"};
    }
    vardf::term_statistics_index index;
    if (wd_index_opt->count() > 0) {
      index = vardf::term_statistics_index::deserialize(
          vardf::read_file_bytes(wd_index));
    } else if (!corpus.empty()) {
      index = index_corpus_dir(corpus, resolve_stopwords(wd_stops_opt, wd_stops, cfg));
    } else {
      throw usage_failure{"weights dump needs --index FILE or --corpus DIR"};
    }
    auto ranked = vardf::rank_terms(index);
    if (!wd_out.empty()) {
      std::ofstream out(wd_out, std::ios::binary);
      if (!out) throw vardf::io_error("cannot write " + wd_out);
      vardf::write_weights_csv(out, ranked);
    } else {
      vardf::write_weights_csv(std::cout, ranked);
    }
    return 0;
  }

  if (build_cmd->parsed()) {
    std::string corpus = resolve_text(ib_corpus_opt, ib_corpus, cfg, "corpus_dir");
    if (corpus.empty()) {
      throw usage_failure{"index build needs --corpus (or corpus_dir in the config)"};
    }
    auto index = index_corpus_dir(corpus, resolve_stopwords(ib_stops_opt, ib_stops, cfg));
    std::string serialized = index.serialize() + "\n";
    if (!ib_out.empty()) {
      write_text_file(ib_out, serialized);
    } else {
      std::cout << serialized;
    }
    return 0;
  }

  throw usage_failure{"no subcommand selected"};
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const usage_failure& e) {
    std::cerr << "usage error: " << e.message << '\n';
    return 2;
  } catch (const vardf::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
