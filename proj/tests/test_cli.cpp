#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "test_support.hpp"
#include "vardf/vardf.hpp"

using Catch::Matchers::ContainsSubstring;

namespace {

struct cli_result {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the installed binary through the shell, capturing both streams.
cli_result run_cli(const std::string& args, const std::string& env_prefix = "") {
  static std::atomic<int> counter{0};
  auto base = std::filesystem::temp_directory_path() /
              ("vardf-cli-" + std::to_string(::getpid()) + "-" +
               std::to_string(++counter));
  std::string out_path = base.string() + ".out";
  std::string err_path = base.string() + ".err";

  std::string cmd = env_prefix;
  if (!cmd.empty()) cmd += ' ';
  cmd += std::string("\"") + VARDF_CRAWL_BIN + "\" " + args + " >" + out_path +
         " 2>" + err_path;

  int status = std::system(cmd.c_str());

  cli_result r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = testsup::read_file(out_path);
  r.err = testsup::read_file(err_path);
  std::filesystem::remove(out_path);
  std::filesystem::remove(err_path);
  return r;
}

// Three connected documents: "web" reaches a and b, "pages" then reaches c.
void write_mini_corpus(const std::filesystem::path& dir) {
  testsup::write_corpus(
      dir, {
               {"a", testsup::simple_page("Alpha Web", "h1", "Notes",
                                          "web links alpha")},
               {"b", testsup::simple_page("Beta Pages", "h1", "Notes",
                                          "web beta pages")},
               {"c", testsup::simple_page("Gamma Archive", "h1", "Notes",
                                          "pages gamma archive")},
           });
}

nlohmann::json parse_leading_json(const std::string& text) {
  auto split = text.find("\n\n");
  REQUIRE(split != std::string::npos);
  return nlohmann::json::parse(text.substr(0, split));
}

}  // namespace

TEST_CASE("no arguments is a usage error") {
  auto r = run_cli("");
  CHECK(r.exit_code == 2);
  CHECK_THAT(r.err, ContainsSubstring("usage error"));
  CHECK_THAT(r.err, ContainsSubstring("Subcommand"));
}

TEST_CASE("help exits cleanly") {
  auto top = run_cli("--help");
  CHECK(top.exit_code == 0);
  CHECK_THAT(top.out, ContainsSubstring("serve"));
  CHECK_THAT(top.out, ContainsSubstring("crawl"));
  CHECK_THAT(top.out, ContainsSubstring("evaluate"));

  auto sub = run_cli("crawl --help");
  CHECK(sub.exit_code == 0);
  CHECK_THAT(sub.out, ContainsSubstring("--seed"));
  CHECK_THAT(sub.out, ContainsSubstring("--self-serve"));
}

TEST_CASE("an unknown flag is a usage error") {
  auto r = run_cli("evaluate --nope 3");
  CHECK(r.exit_code == 2);
  CHECK_THAT(r.err, ContainsSubstring("usage error"));
}

TEST_CASE("evaluate from raw counts prints JSON and a table") {
  auto r = run_cli("evaluate --s 32 --u 6 --n 4");
  REQUIRE(r.exit_code == 0);

  auto j = parse_leading_json(r.out);
  CHECK(j["s"] == 32);
  CHECK(j["u"] == 6);
  CHECK(j["n"] == 4);
  CHECK(j["alpha"] == 1.0);
  CHECK_THAT(j["precision"].get<double>(),
             Catch::Matchers::WithinAbs(0.842105, 1e-9));
  CHECK_THAT(j["recall"].get<double>(),
             Catch::Matchers::WithinAbs(0.888889, 1e-9));
  CHECK_THAT(j["f_measure"].get<double>(),
             Catch::Matchers::WithinAbs(0.864865, 1e-9));

  CHECK_THAT(r.out, ContainsSubstring("queries       42\n"));
  CHECK_THAT(r.out, ContainsSubstring("precision     84.2%\n"));
  CHECK_THAT(r.out, ContainsSubstring("recall        88.9%\n"));
  CHECK_THAT(r.out, ContainsSubstring("f_measure     86.5%\n"));
}

TEST_CASE("evaluate validates its input combinations") {
  CHECK(run_cli("evaluate").exit_code == 2);
  CHECK(run_cli("evaluate --s 1 --u 2").exit_code == 2);
  CHECK(run_cli("evaluate --outcomes x.jsonl --s 1 --u 1 --n 1").exit_code == 2);
}

TEST_CASE("evaluate reads an outcome log") {
  testsup::temp_dir dir;
  auto log_path = dir.path() / "outcomes.jsonl";
  {
    std::ofstream out(log_path, std::ios::binary);
    vardf::write_outcomes_jsonl(
        out, {
                 {"web", 3, 3, vardf::outcome_class::successful, 1},
                 {"pages", 2, 0, vardf::outcome_class::unsuccessful, 2},
                 {"zzz", 0, 0, vardf::outcome_class::no_results, 3},
                 {"archive", 1, 1, vardf::outcome_class::successful, 4},
             });
  }

  auto r = run_cli("evaluate --outcomes " + log_path.string() + " --alpha 2");
  REQUIRE(r.exit_code == 0);
  auto j = parse_leading_json(r.out);
  CHECK(j["s"] == 2);
  CHECK(j["u"] == 1);
  CHECK(j["n"] == 1);
  CHECK(j["alpha"] == 2.0);
}

TEST_CASE("a missing outcome log is a domain error") {
  auto r = run_cli("evaluate --outcomes /nonexistent/outcomes.jsonl");
  CHECK(r.exit_code == 1);
  CHECK_THAT(r.err, ContainsSubstring("error:"));
}

TEST_CASE("index build emits the same bytes on every run") {
  testsup::temp_dir dir;
  auto corpus = dir.path() / "corpus";
  write_mini_corpus(corpus);
  auto first = dir.path() / "i1.json";
  auto second = dir.path() / "i2.json";

  REQUIRE(run_cli("index build --corpus " + corpus.string() + " --out " +
                  first.string())
              .exit_code == 0);
  REQUIRE(run_cli("index build --corpus " + corpus.string() + " --out " +
                  second.string())
              .exit_code == 0);
  CHECK(testsup::read_file(first) == testsup::read_file(second));

  auto to_stdout = run_cli("index build --corpus " + corpus.string());
  CHECK(to_stdout.exit_code == 0);
  CHECK(to_stdout.out == testsup::read_file(first));

  auto j = nlohmann::json::parse(testsup::read_file(first));
  CHECK(j["docs"] == nlohmann::json::array({"a", "b", "c"}));
  CHECK(j["terms"].contains("web"));

  CHECK(run_cli("index build").exit_code == 2);
}

TEST_CASE("weights dump ranks the same from a corpus or its index") {
  testsup::temp_dir dir;
  auto corpus = dir.path() / "corpus";
  write_mini_corpus(corpus);
  auto index_path = dir.path() / "index.json";
  REQUIRE(run_cli("index build --corpus " + corpus.string() + " --out " +
                  index_path.string())
              .exit_code == 0);

  auto from_corpus = run_cli("weights dump --corpus " + corpus.string());
  auto from_index = run_cli("weights dump --index " + index_path.string());
  REQUIRE(from_corpus.exit_code == 0);
  REQUIRE(from_index.exit_code == 0);
  CHECK(from_corpus.out == from_index.out);
  CHECK_THAT(from_corpus.out,
             ContainsSubstring("term,weight,title,meta_keywords,"
                               "meta_description,heading,paragraph,alt\n"));
  CHECK_THAT(from_corpus.out, ContainsSubstring("\nweb,"));

  auto to_file = dir.path() / "weights.csv";
  REQUIRE(run_cli("weights dump --corpus " + corpus.string() + " --out " +
                  to_file.string())
              .exit_code == 0);
  CHECK(testsup::read_file(to_file) == from_corpus.out);

  CHECK(run_cli("weights dump").exit_code == 2);
  CHECK(run_cli("weights dump --corpus " + corpus.string() + " --index " +
                index_path.string())
            .exit_code == 2);
}

TEST_CASE("crawl validates its flag combinations") {
  testsup::temp_dir dir;
  auto corpus = dir.path() / "corpus";
  write_mini_corpus(corpus);

  // neither --url nor --self-serve
  CHECK(run_cli("crawl --seed web").exit_code == 2);
  // both at once
  CHECK(run_cli("crawl --url http://x/ --self-serve --corpus " +
                corpus.string() + " --seed web")
            .exit_code == 2);
  // --in-process needs --self-serve
  CHECK(run_cli("crawl --url http://x/ --in-process --seed web").exit_code == 2);
  // --self-serve needs a corpus
  CHECK(run_cli("crawl --self-serve --seed web").exit_code == 2);
  // missing seed
  CHECK(run_cli("crawl --self-serve --corpus " + corpus.string()).exit_code == 2);
}

TEST_CASE("self-serve crawls agree between HTTP and in-process") {
  testsup::temp_dir dir;
  auto corpus = dir.path() / "corpus";
  write_mini_corpus(corpus);

  auto stage = [&](const std::string& tag, const std::string& extra) {
    auto docs = dir.path() / ("docs-" + tag);
    auto report = dir.path() / (tag + "-report.json");
    auto jsonl = dir.path() / (tag + "-outcomes.jsonl");
    auto csv = dir.path() / (tag + "-outcomes.csv");
    auto r = run_cli("crawl --self-serve --corpus " + corpus.string() +
                     " --seed web --db-size 3 --out " + docs.string() +
                     " --report " + report.string() + " --outcomes " +
                     jsonl.string() + " --outcomes-csv " + csv.string() + " " +
                     extra);
    REQUIRE(r.exit_code == 0);
    CHECK_THAT(r.out, ContainsSubstring("coverage      3\n"));
    CHECK_THAT(r.out, ContainsSubstring("stored_in     "));
    return std::tuple{docs, report, jsonl, csv};
  };

  auto [http_docs, http_report, http_jsonl, http_csv] = stage("http", "");
  auto [proc_docs, proc_report, proc_jsonl, proc_csv] =
      stage("proc", "--in-process");

  CHECK(testsup::read_file(http_jsonl) == testsup::read_file(proc_jsonl));
  CHECK(testsup::read_file(http_csv) == testsup::read_file(proc_csv));

  auto http_j = nlohmann::json::parse(testsup::read_file(http_report));
  auto proc_j = nlohmann::json::parse(testsup::read_file(proc_report));
  CHECK(http_j["coverage"] == 3);
  CHECK(http_j["error"].is_null());
  CHECK(http_j["outcomes"] == proc_j["outcomes"]);
  CHECK(http_j["metrics"] == proc_j["metrics"]);

  // the retrieved copies are byte-identical to the corpus, on both paths
  for (const char* id : {"a", "b", "c"}) {
    auto original = testsup::read_file(corpus / (std::string(id) + ".html"));
    CHECK(testsup::read_file(http_docs / (std::string(id) + ".html")) == original);
    CHECK(testsup::read_file(proc_docs / (std::string(id) + ".html")) == original);
  }
}

TEST_CASE("crawl against an unreachable server is a domain error") {
  auto r = run_cli("crawl --url http://127.0.0.1:1/ --seed web --max-queries 2");
  CHECK(r.exit_code == 1);
  CHECK_THAT(r.err, ContainsSubstring("error:"));
}

TEST_CASE("config file values apply under the flags") {
  testsup::temp_dir dir;
  auto corpus_a = dir.path() / "corpus-a";
  auto corpus_b = dir.path() / "corpus-b";
  testsup::write_corpus(corpus_a,
                        {{"only", testsup::simple_page("Aardvark Habits", "h1",
                                                       "Burrows", "digging soil")}});
  testsup::write_corpus(corpus_b,
                        {{"only", testsup::simple_page("Zebra Stripes", "h1",
                                                       "Savanna", "grazing grass")}});
  auto cfg = dir.path() / "settings.cfg";
  testsup::write_file(cfg,
                      "# toolkit settings\n"
                      "corpus_dir = " + corpus_a.string() + "\n");

  auto from_config = run_cli("weights dump --config " + cfg.string());
  REQUIRE(from_config.exit_code == 0);
  CHECK_THAT(from_config.out, ContainsSubstring("aardvark"));

  auto overridden = run_cli("weights dump --config " + cfg.string() +
                            " --corpus " + corpus_b.string());
  REQUIRE(overridden.exit_code == 0);
  CHECK_THAT(overridden.out, ContainsSubstring("zebra"));
  CHECK(overridden.out.find("aardvark") == std::string::npos);

  auto bad_cfg = dir.path() / "broken.cfg";
  testsup::write_file(bad_cfg, "corpus_dir\n");
  CHECK(run_cli("weights dump --config " + bad_cfg.string()).exit_code == 1);
}

TEST_CASE("stop words come from the flag, the config, or the environment") {
  testsup::temp_dir dir;
  auto corpus = dir.path() / "corpus";
  testsup::write_corpus(corpus, {{"only", testsup::simple_page(
                                              "Alpha Beta", "h1", "Gamma",
                                              "alpha beta gamma")}});
  auto stop_alpha = dir.path() / "stop-alpha.txt";
  testsup::write_file(stop_alpha, "alpha\n");
  auto stop_beta = dir.path() / "stop-beta.txt";
  testsup::write_file(stop_beta, "beta\n");

  auto by_env = run_cli("weights dump --corpus " + corpus.string(),
                        "VARDF_STOPWORDS=" + stop_alpha.string());
  REQUIRE(by_env.exit_code == 0);
  CHECK(by_env.out.find("alpha") == std::string::npos);
  CHECK_THAT(by_env.out, ContainsSubstring("beta"));

  // the flag wins over the environment
  auto by_flag = run_cli("weights dump --corpus " + corpus.string() +
                             " --stopwords " + stop_beta.string(),
                         "VARDF_STOPWORDS=" + stop_alpha.string());
  REQUIRE(by_flag.exit_code == 0);
  CHECK_THAT(by_flag.out, ContainsSubstring("alpha"));
  CHECK(by_flag.out.find("beta") == std::string::npos);

  auto cfg = dir.path() / "settings.cfg";
  testsup::write_file(cfg, "stopwords_path=" + stop_beta.string() + "\n");
  auto by_config = run_cli("weights dump --corpus " + corpus.string() +
                           " --config " + cfg.string());
  REQUIRE(by_config.exit_code == 0);
  CHECK_THAT(by_config.out, ContainsSubstring("alpha"));
  CHECK(by_config.out.find("beta") == std::string::npos);
}

TEST_CASE("serve answers searches until it is told to stop") {
  testsup::temp_dir dir;
  auto corpus = dir.path() / "corpus";
  write_mini_corpus(corpus);
  auto out_path = dir.path() / "serve.out";

  pid_t pid = ::fork();
  REQUIRE(pid >= 0);
  if (pid == 0) {
    std::freopen(out_path.c_str(), "w", stdout);
    std::freopen("/dev/null", "w", stderr);
    ::execl(VARDF_CRAWL_BIN, VARDF_CRAWL_BIN, "serve", "--corpus",
            corpus.c_str(), "--addr", "127.0.0.1:0", (char*)nullptr);
    std::_Exit(127);
  }

  // wait for the announcement line, then talk to the server
  std::regex line(R"(serving (\d+) documents at http://127\.0\.0\.1:(\d+)/)");
  std::string doc_count, port;
  for (int i = 0; i < 200 && port.empty(); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(25));
    std::ifstream in(out_path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    std::smatch m;
    if (std::regex_search(text, m, line)) {
      doc_count = m[1];
      port = m[2];
    }
  }
  REQUIRE_FALSE(port.empty());
  CHECK(doc_count == "3");

  httplib::Client client("127.0.0.1", std::stoi(port));
  auto front = client.Get("/");
  REQUIRE(front);
  CHECK(front->status == 200);
  CHECK_THAT(front->body, ContainsSubstring("<form action=\"/search\""));
  auto hits = client.Get("/search?q=web");
  REQUIRE(hits);
  CHECK_THAT(hits->body, ContainsSubstring("/doc/a"));
  CHECK_THAT(hits->body, ContainsSubstring("/doc/b"));

  ::kill(pid, SIGTERM);
  int status = 0;
  REQUIRE(::waitpid(pid, &status, 0) == pid);
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
}
