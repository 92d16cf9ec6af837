// Runs the command-line tool as a subprocess.
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(PARAEVAL_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("paraeval_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string put(const std::string& name, const std::string& content) const {
    std::ofstream(dir / name, std::ios::binary) << content;
    return path(name);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

const char* kTsv =
    "source\tparaphrase\n"
    "The cat sat on the mat.\tA cat was sitting on the mat.\tmrpc\n"
    "He left early.\tHe departed early.\tmrpc\n"
    "He  left early.\tHe departed early.\tmrpc\n";

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run("").code == 1);
  CHECK(run("score").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("report --in x --format pdf").code == 1);
  CHECK(run("--version").code == 0);
}

TEST_CASE("ingest, score, report") {
  Workspace ws;
  const auto tsv = ws.put("pairs.tsv", kTsv);
  REQUIRE(run("ingest --in " + tsv + " --format tsv --header --out " + ws.path("corpus.jsonl")).code == 0);
  CHECK(fs::exists(ws.path("corpus.rejects.jsonl")));
  const auto corpus = slurp(ws.path("corpus.jsonl"));
  CHECK(std::count(corpus.begin(), corpus.end(), '\n') == 2);

  const auto trees = ws.put("trees.jsonl",
                            R"J({"id":"1","source_tree":"(S (NP (DT The) (NN cat)) (VP (VBD sat)))","paraphrase_tree":"(S (NP (DT A) (NN cat)) (VP (VBD was)))"})J"
                            "\n"
                            R"J({"id":"2","source_tree":"(S (NP (PRP He)) (VP (VBD left)))","paraphrase_tree":"(S (NP (PRP He)) (VP (VBD departed)))"})J"
                            "\n");
  const auto scored = run("score --in " + ws.path("corpus.jsonl") + " --metrics lexical,syntax,semantic --trees " + trees +
                          " --provider bow=test_hash: --system demo --out " + ws.path("scores.jsonl") + " --tables " +
                          ws.path("tables.md"));
  REQUIRE(scored.code == 0);
  const auto tables = slurp(ws.path("tables.md"));
  CHECK(tables.find("### semantic") != std::string::npos);
  CHECK(tables.find("### syntactic") != std::string::npos);
  CHECK(tables.find("| demo |") != std::string::npos);

  const auto rep = run("report --in " + ws.path("scores.jsonl") + " --table lexical --format csv");
  REQUIRE(rep.code == 0);
  CHECK(rep.out.rfind("Model,BOW Overlap Score (↑),Corpus BLEU Score (↑)", 0) == 0);

  const auto json = run("report --in " + ws.path("scores.jsonl") + " --table syntactic --format json --out " +
                        ws.path("syn.json"));
  REQUIRE(json.code == 0);
  const auto again = run("report --in " + ws.path("syn.json") + " --table syntactic --format json");
  CHECK(again.out == slurp(ws.path("syn.json")));
}

TEST_CASE("data errors exit 2") {
  Workspace ws;
  const auto bad = ws.put("bad.jsonl", "{\"source\": \"a\"}\n");
  CHECK(run("ingest --in " + bad + " --out " + ws.path("o.jsonl")).code == 2);
  CHECK(run("ingest --in " + ws.path("missing.jsonl") + " --out " + ws.path("o.jsonl")).code == 2);
  const auto corpus = ws.put("c.jsonl", R"J({"id":"1","source":"a b","paraphrase":"b a"})J"
                                        "\n");
  CHECK(run("score --in " + corpus + " --metrics syntax --out " + ws.path("s.jsonl")).code == 2);
}

TEST_CASE("external failures exit 3") {
  Workspace ws;
  const auto corpus = ws.put("c.jsonl", R"J({"id":"1","source":"a b","paraphrase":"b a"})J"
                                        "\n");
  CHECK(run("score --in " + corpus + " --metrics semantic --provider remote=http:http://127.0.0.1:9/embed --out " +
            ws.path("s.jsonl"))
            .code == 3);
}

TEST_CASE("offline judge and Likert table") {
  Workspace ws;
  const auto corpus = ws.put("c.jsonl", R"J({"id":"a","source":"s1","paraphrase":"p1"})J"
                                        "\n"
                                        R"J({"id":"b","source":"s2","paraphrase":"p2"})J"
                                        "\n");
  const auto fixtures = ws.put(
      "r.jsonl",
      R"J({"pair_id":"a","response":"{\"Semantic Similarity\": 4, \"Lexical Diversity\": 3, \"Syntactic Diversity\": 3, \"Grammatical Correctness\": 5}"})J"
      "\n"
      R"J({"pair_id":"b","response":"Ratings: {\"Semantic Similarity\": 2, \"Lexical Diversity\": 3, \"Syntactic Diversity\": 3, \"Grammatical Correctness\": 5}"})J"
      "\n");
  REQUIRE(run("judge --in " + corpus + " --offline " + fixtures + " --system teacher --out " + ws.path("j.jsonl")).code == 0);
  const auto rep = run("report --in " + ws.path("j.jsonl") + " --table likert");
  REQUIRE(rep.code == 0);
  CHECK(rep.out ==
        "| Model | Semantic Similarity (↑) | Lexical Diversity (↑) | Syntactic Diversity (↑) | Grammatical Correctness (↑) |\n"
        "| :--- | ---: | ---: | ---: | ---: |\n"
        "| teacher | 3.00 | 3.00 | 3.00 | 5.00 |\n");
}

TEST_CASE("config file supplies flags") {
  Workspace ws;
  const auto corpus = ws.put("c.jsonl", R"J({"id":"1","source":"a b c","paraphrase":"c b a"})J"
                                        "\n");
  const auto cfg = ws.put("cfg.toml", "[score]\nin = \"" + corpus + "\"\nout = \"" + ws.path("s.jsonl") +
                                          "\"\nsystem = \"from-config\"\n");
  REQUIRE(run("--config " + cfg + " score").code == 0);
  CHECK(slurp(ws.path("s.jsonl")).find("from-config") != std::string::npos);
  REQUIRE(run("--config " + cfg + " score --system from-flag").code == 0);
  CHECK(slurp(ws.path("s.jsonl")).find("from-flag") != std::string::npos);
}
