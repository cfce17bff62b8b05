// Subprocess tests for the command-line tool: exit codes, file outputs, and
// the end-to-end pipeline. Invoked as: cli_tests <path-to-cli>.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

#define REQUIRE(cond, msg)                                                       \
  do {                                                                           \
    if (!(cond)) {                                                               \
      std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << (msg)      \
                << "\n";                                                         \
      ++failures;                                                                \
    }                                                                            \
  } while (0)

std::string g_cli;
fs::path g_dir;

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + g_cli + " " + args;
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -2;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

long line_count(const fs::path& p) {
  std::ifstream in(p);
  long n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

void test_exit_codes() {
  REQUIRE(run("--help >/dev/null 2>&1") == 0, "--help exits 0");
  REQUIRE(run("frobnicate >/dev/null 2>&1") == 2, "unknown subcommand exits 2");
  REQUIRE(run(">/dev/null 2>&1") == 2, "missing subcommand exits 2");
  REQUIRE(run("train --model nb >/dev/null 2>&1") == 2, "missing required flags exit 2");

  const fs::path err = g_dir / "err.txt";
  const int code = run("train --model nb --features unigram --in " +
                       q(g_dir / "missing.jsonl") + " >/dev/null 2>" + q(err));
  REQUIRE(code == 1, "missing input file exits 1");
  REQUIRE(slurp(err).find("missing.jsonl") != std::string::npos,
          "diagnostic names the missing path");
}

void test_synth_determinism() {
  const fs::path a = g_dir / "a.jsonl", b = g_dir / "b.jsonl";
  REQUIRE(run("synth --seed 42 --n-tweets 80 --out " + q(a) + " 2>/dev/null") == 0, "synth a");
  REQUIRE(run("synth --seed 42 --n-tweets 80 --out " + q(b) + " 2>/dev/null") == 0, "synth b");
  const std::string ca = slurp(a);
  REQUIRE(!ca.empty() && ca == slurp(b), "same seed gives identical corpora");
  REQUIRE(line_count(a) == 80, "synth honors --n-tweets");

  const fs::path c = g_dir / "c.jsonl";
  REQUIRE(run("synth --seed 43 --n-tweets 80 --out " + q(c) + " 2>/dev/null") == 0, "synth c");
  REQUIRE(ca != slurp(c), "different seed gives a different corpus");
}

void test_pipeline() {
  const fs::path corpus = g_dir / "corpus.jsonl";
  const fs::path train = g_dir / "train.jsonl";
  const fs::path val = g_dir / "val.jsonl";
  const fs::path model = g_dir / "model.json";
  const fs::path row = g_dir / "row.tsv";
  const fs::path predicted = g_dir / "predicted.jsonl";
  const fs::path clusters = g_dir / "clusters.csv";
  const fs::path cities = g_dir / "cities.csv";
  const fs::path cohort = g_dir / "cohort.csv";
  const fs::path report = g_dir / "report.txt";
  const std::string event = "storm:2018-01-01:2018-01-05";

  REQUIRE(run("synth --seed 7 --n-tweets 400 --class-token-prob 0.8 --out " + q(corpus) +
              " 2>/dev/null") == 0,
          "synth");
  REQUIRE(run("split --in " + q(corpus) + " --out-train " + q(train) + " --out-val " + q(val) +
              " --fraction 0.9 --seed 7 2>/dev/null") == 0,
          "split");
  REQUIRE(line_count(train) + line_count(val) == 400, "split partitions the corpus");

  REQUIRE(run("train --model nb --features unigram --in " + q(train) + " --out " + q(model) +
              " 2>/dev/null") == 0,
          "train nb");
  REQUIRE(run("eval --model " + q(model) + " --val " + q(val) + " --out " + q(row) +
              " >/dev/null 2>/dev/null") == 0,
          "eval");
  const std::string row_text = slurp(row);
  REQUIRE(row_text.rfind("Unigram Naive Bayes\t", 0) == 0, "eval row names the method");
  REQUIRE(row_text.find('%') != std::string::npos, "eval row shows percentages");
  REQUIRE(row_text.find("\t-") != std::string::npos, "no test set shows a dash");

  REQUIRE(run("predict --model " + q(model) + " --in " + q(val) + " --out " + q(predicted) +
              " 2>/dev/null") == 0,
          "predict");
  REQUIRE(line_count(predicted) == line_count(val), "predict keeps every record");

  REQUIRE(run("geo-cluster --in " + q(predicted) + " --k 2 --seed 5 --out " + q(clusters) +
              " --city-out " + q(cities) + " --event " + event + " 2>/dev/null") == 0,
          "geo-cluster");
  REQUIRE(slurp(clusters).rfind("cluster,lat,lon,size,mean_sentiment\n", 0) == 0,
          "cluster CSV header");
  REQUIRE(slurp(cities).rfind("city,window,mean,count\n", 0) == 0, "city CSV header");

  REQUIRE(run("cohort --in " + q(predicted) + " --event " + event + " --out " + q(cohort) +
              " 2>/dev/null") == 0,
          "cohort");
  REQUIRE(slurp(cohort).rfind("event,block,pre_mean,post_mean,diff,n_pre,n_post,t,df,p,sig_1pct",
                              0) == 0,
          "cohort CSV header");
  REQUIRE(line_count(cohort) == 3, "cohort CSV has two blocks per event");

  REQUIRE(run("report --in " + q(cohort) + " --out " + q(report) + " 2>/dev/null") == 0,
          "report");
  const std::string rep = slurp(report);
  REQUIRE(rep.find("storm") != std::string::npos, "report mentions the event");
  REQUIRE(rep.find("within_cohort") != std::string::npos, "report shows the cohort block");
}

void test_rnn_pipeline() {
  const fs::path corpus = g_dir / "rnn_corpus.jsonl";
  const fs::path model = g_dir / "rnn_model.json";
  const fs::path embeddings = g_dir / "vectors.txt";
  REQUIRE(run("synth --seed 9 --n-tweets 60 --out " + q(corpus) + " 2>/dev/null") == 0,
          "synth for rnn");
  {
    std::ofstream out(embeddings);
    for (int i = 0; i < 40; ++i)
      out << "pos" << i << " 0.5 0.1 0.2 0.3\n"
          << "neg" << i << " -0.5 -0.1 -0.2 -0.3\n";
  }
  REQUIRE(run("train --model rnn --features tokenizer --in " + q(corpus) + " --val " + q(corpus) +
              " --embeddings " + q(embeddings) +
              " --hidden-size 6 --dense-size 4 --max-len 8 --epochs 1 --out " + q(model) +
              " 2>/dev/null") == 0,
          "train rnn from an embeddings file");
  REQUIRE(run("train --model rnn --features unigram --in " + q(corpus) +
              " >/dev/null 2>&1") == 1,
          "rnn with non-tokenizer features exits 1");
}

void test_config_and_env() {
  const fs::path cfg = g_dir / "run.ini";
  {
    std::ofstream out(cfg);
    out << "[synth]\nn-tweets=30\nseed=11\n";
  }
  const fs::path a = g_dir / "cfg_a.jsonl";
  REQUIRE(run("--config " + q(cfg) + " synth --out " + q(a) + " 2>/dev/null") == 0,
          "config file drives synth");
  REQUIRE(line_count(a) == 30, "config file provides n-tweets");

  const fs::path b = g_dir / "cfg_b.jsonl";
  REQUIRE(run("--config " + q(cfg) + " synth --n-tweets 12 --out " + q(b) + " 2>/dev/null") == 0,
          "flags override config");
  REQUIRE(line_count(b) == 12, "command-line flag wins over config");

  const fs::path envdir = g_dir / "outdir";
  fs::create_directories(envdir);
  REQUIRE(run("synth --seed 3 --n-tweets 10 2>/dev/null",
              "TWEETSENT_OUT=" + envdir.string()) == 0,
          "synth with TWEETSENT_OUT");
  REQUIRE(fs::exists(envdir / "synthetic.jsonl"), "default output lands in TWEETSENT_OUT");
}

void test_label_flow() {
  const fs::path corpus = g_dir / "influential.jsonl";
  const fs::path stances = g_dir / "stances.jsonl";
  const fs::path labeled = g_dir / "labeled.jsonl";
  {
    std::ofstream out(corpus);
    out << R"({"id":"1","user":"GreenVoice","created_at":"2018-01-01T00:00:00Z","text":"warming is real"})"
        << "\n"
        << R"({"id":"2","user":"denier","created_at":"2018-01-01T00:00:01Z","text":"hoax"})"
        << "\n"
        << R"({"id":"3","user":"unlisted","created_at":"2018-01-01T00:00:02Z","text":"who knows"})"
        << "\n";
  }
  {
    std::ofstream out(stances);
    out << R"({"handle":"@greenvoice","stance":1})" << "\n"
        << R"({"handle":"Denier","stance":-1})" << "\n";
  }
  REQUIRE(run("label --in " + q(corpus) + " --stances " + q(stances) + " --out " + q(labeled) +
              " 2>/dev/null") == 0,
          "label");
  const std::string out = slurp(labeled);
  REQUIRE(line_count(labeled) == 2, "unlisted authors are dropped");
  REQUIRE(out.find("\"label\":1") != std::string::npos, "positive stance applied");
  REQUIRE(out.find("\"label\":-1") != std::string::npos, "negative stance applied");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_tests <path-to-cli>\n";
    return 2;
  }
  g_cli = argv[1];
  g_dir = fs::temp_directory_path() / ("tweetsent_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(g_dir);

  test_exit_codes();
  test_synth_determinism();
  test_pipeline();
  test_rnn_pipeline();
  test_config_and_env();
  test_label_flow();

  fs::remove_all(g_dir);
  if (failures == 0) {
    std::cout << "cli tests: all passed\n";
    return 0;
  }
  std::cerr << "cli tests: " << failures << " failure(s)\n";
  return 1;
}
