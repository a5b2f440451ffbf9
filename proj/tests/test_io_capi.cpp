#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "sidiwo.h"
#include "sidiwo/hier.hpp"
#include "sidiwo/io.hpp"
#include "sidiwo/synth.hpp"

using namespace sidiwo;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("sidiwo_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<uintptr_t>(this)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

Corpus small_text_corpus() {
  const TopicModel model = synth::gen_hier_model(2, 24);
  return synth::sample_corpus(model, 120, 20, 3);
}

}  // namespace

TEST_CASE("uci corpus round trip is byte-identical") {
  TempDir tmp;
  const Corpus corpus = small_text_corpus();
  io::write_corpus_uci(corpus, tmp.file("c.txt"), tmp.file("v.txt"));
  const Corpus back = io::read_corpus_uci(tmp.file("c.txt"), tmp.file("v.txt"));
  REQUIRE(back.n_docs() == corpus.n_docs());
  CHECK(back.vocab_size == corpus.vocab_size);
  for (int64_t i = 0; i < corpus.n_docs(); ++i)
    CHECK(back.docs[size_t(i)].counts == corpus.docs[size_t(i)].counts);
  io::write_corpus_uci(back, tmp.file("c2.txt"), tmp.file("v2.txt"));
  CHECK(io::read_text_file(tmp.file("c.txt")) == io::read_text_file(tmp.file("c2.txt")));
  CHECK(io::read_text_file(tmp.file("v.txt")) == io::read_text_file(tmp.file("v2.txt")));
}

TEST_CASE("uci parser reports line numbers") {
  TempDir tmp;
  io::write_text_file(tmp.file("bad.txt"), "2\n3\n2\n1 1 1\n1 9 1\n");
  CHECK_THROWS_WITH_AS(io::read_corpus_uci(tmp.file("bad.txt")), doctest::Contains(":5:"), Error);
  io::write_text_file(tmp.file("bad2.txt"), "2\n3\n5\n1 1 1\n2 1 1\n");
  CHECK_THROWS_WITH_AS(io::read_corpus_uci(tmp.file("bad2.txt")),
                       doctest::Contains("declares 5"), Error);
  io::write_text_file(tmp.file("bad3.txt"), "2\n3\n2\n2 1 1\n1 1 1\n");
  CHECK_THROWS_WITH_AS(io::read_corpus_uci(tmp.file("bad3.txt")),
                       doctest::Contains("ascending"), Error);
  CHECK_THROWS_AS(io::read_corpus_uci(tmp.file("missing.txt")), Error);
}

TEST_CASE("text reader tokenizes, filters stopwords, and truncates the vocabulary") {
  TempDir tmp;
  io::write_text_file(tmp.file("docs.txt"),
                      "the cat sat on the mat\n"
                      "the dog sat on the log\n"
                      "cat and dog and bird\n");
  io::write_text_file(tmp.file("stop.txt"), "the\non\nand\n");
  const Corpus corpus = io::read_corpus_text(tmp.file("docs.txt"), tmp.file("stop.txt"), 4);
  CHECK(corpus.n_docs() == 3);
  CHECK(corpus.vocab_size == 4);
  // ties break lexicographically after frequency: cat, dog, sat (2 each), then bird/log/mat (1)
  CHECK(corpus.vocab[0] == "cat");
  CHECK(corpus.vocab[1] == "dog");
  CHECK(corpus.vocab[2] == "sat");
  CHECK(corpus.vocab[3] == "bird");
  // first document: "cat sat mat" -> retained tokens "cat sat"
  CHECK(corpus.docs[0].total == 2);
  CHECK_FALSE(corpus.docs[0].has_lead_words());  // fewer than 3 retained tokens
  CHECK(corpus.docs[2].has_lead_words());        // cat dog bird
  CHECK(corpus.docs[2].lead_words[0] == 0);
  CHECK(corpus.docs[2].lead_words[1] == 1);
  CHECK(corpus.docs[2].lead_words[2] == 3);
}

TEST_CASE("labels round trip") {
  TempDir tmp;
  const std::vector<int32_t> labels{3, 1, 4, 1, 5};
  io::write_labels(labels, tmp.file("labels.txt"));
  CHECK(io::read_labels(tmp.file("labels.txt")) == labels);
}

TEST_CASE("moments artifact round trip is byte-identical") {
  TempDir tmp;
  auto corpus = std::make_shared<Corpus>(small_text_corpus());
  const MomentStats stats = estimate_moments_counts(corpus);
  io::save_moments(stats, tmp.file("m.json"));
  const MomentStats back = io::load_moments(tmp.file("m.json"), corpus);
  CHECK(back.n_docs == stats.n_docs);
  CHECK((back.m1 - stats.m1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.m2 - stats.m2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.estimator == stats.estimator);
  io::save_moments(back, tmp.file("m2.json"));
  CHECK(io::read_text_file(tmp.file("m.json")) == io::read_text_file(tmp.file("m2.json")));
  // attaching a mismatched corpus fails
  auto other = std::make_shared<Corpus>(small_text_corpus());
  other->docs.pop_back();
  other->labels.pop_back();
  CHECK_THROWS_AS(io::load_moments(tmp.file("m.json"), other), Error);
  // loading without a corpus cannot serve slabs
  const MomentStats detached = io::load_moments(tmp.file("m.json"));
  CHECK_FALSE(detached.replayable());
}

TEST_CASE("model artifact round trip is byte-identical") {
  TempDir tmp;
  auto corpus = std::make_shared<Corpus>(small_text_corpus());
  const MomentStats stats = estimate_moments_counts(corpus);
  const RecoveredModel model = decompose(stats, 2, {.project_to_simplex = true});
  io::save_model(model, tmp.file("model.json"));
  const RecoveredModel back = io::load_model(tmp.file("model.json"));
  CHECK((back.centers - model.centers).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.weights - model.weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.residual == model.residual);
  CHECK(back.diagnostics.a_star == model.diagnostics.a_star);
  io::save_model(back, tmp.file("model2.json"));
  CHECK(io::read_text_file(tmp.file("model.json")) == io::read_text_file(tmp.file("model2.json")));
}

TEST_CASE("tree artifact round trip and doc-id policy") {
  TempDir tmp;
  const Corpus corpus = small_text_corpus();
  hier::TreeOptions opts;
  opts.max_depth = 2;
  const hier::ClusterTree tree = hier::build_tree(corpus, opts);
  io::save_tree(tree, tmp.file("tree.json"), true);
  const hier::ClusterTree back = io::load_tree(tmp.file("tree.json"));
  CHECK(back.n_docs == tree.n_docs);
  CHECK(back.nodes().size() == tree.nodes().size());
  io::save_tree(back, tmp.file("tree2.json"), true);
  CHECK(io::read_text_file(tmp.file("tree.json")) == io::read_text_file(tmp.file("tree2.json")));

  io::save_tree(tree, tmp.file("slim.json"), false);
  const hier::ClusterTree slim = io::load_tree(tmp.file("slim.json"));
  CHECK(slim.root->doc_ids.empty());
  CHECK_THROWS_WITH_AS(io::evaluate_tree(slim, corpus.labels), doctest::Contains("doc_ids"),
                       Error);

  io::save_tree_dot(tree, tmp.file("tree.dot"));
  const std::string dot = io::read_text_file(tmp.file("tree.dot"));
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("n0 ->") != std::string::npos);
}

TEST_CASE("tree evaluation report") {
  const Corpus corpus = small_text_corpus();
  hier::TreeOptions opts;
  opts.max_depth = 2;
  const hier::ClusterTree tree = hier::build_tree(corpus, opts);
  const io::EvalReport report = io::evaluate_tree(tree, corpus.labels);
  CHECK(report.rows.size() == tree.nodes().size());
  CHECK(report.rows[0].n_docs == corpus.n_docs());
  for (const auto& row : report.rows) {
    CHECK(row.purity >= 0.0);
    CHECK(row.purity <= 1.0);
  }
  const std::string csv = io::eval_report_csv(report);
  CHECK(csv.find("node_id,depth,n_docs,leaf,purity") == 0);
  const std::string json = io::eval_report_json(report);
  CHECK(json.find("\"ari\"") != std::string::npos);
  // perfect labels: score the tree against its own leaf assignment
  const std::vector<int32_t> own = tree.leaf_assignment();
  CHECK(io::evaluate_tree(tree, own).ari == doctest::Approx(1.0));
  CHECK_THROWS_AS(io::evaluate_tree(tree, std::vector<int32_t>{1, 2, 3}), Error);
}

TEST_CASE("c api pipeline: synth, moments, decompose, tree, eval") {
  TempDir tmp;
  sidiwo_corpus* corpus = nullptr;
  REQUIRE(sidiwo_corpus_synth(3, 100, 400, 50, 7, &corpus) == SIDIWO_OK);
  int64_t n = 0;
  int32_t d = 0;
  CHECK(sidiwo_corpus_n_docs(corpus, &n) == SIDIWO_OK);
  CHECK(sidiwo_corpus_vocab_size(corpus, &d) == SIDIWO_OK);
  CHECK(n == 400);
  CHECK(d == 100);
  int has_labels = 0;
  CHECK(sidiwo_corpus_has_labels(corpus, &has_labels) == SIDIWO_OK);
  CHECK(has_labels == 1);
  REQUIRE(sidiwo_corpus_write_labels(corpus, tmp.file("labels.txt").c_str()) == SIDIWO_OK);
  REQUIRE(sidiwo_corpus_write_uci(corpus, tmp.file("c.txt").c_str(), tmp.file("v.txt").c_str()) ==
          SIDIWO_OK);

  sidiwo_corpus* loaded = nullptr;
  REQUIRE(sidiwo_corpus_read_uci(tmp.file("c.txt").c_str(), tmp.file("v.txt").c_str(), &loaded) ==
          SIDIWO_OK);
  const char* token = nullptr;
  CHECK(sidiwo_corpus_word(loaded, 0, &token) == SIDIWO_OK);
  CHECK(std::string(token) == "w0");

  sidiwo_moments* moments = nullptr;
  REQUIRE(sidiwo_moments_estimate(loaded, 0, 0, 2, &moments) == SIDIWO_OK);
  REQUIRE(sidiwo_moments_save(moments, tmp.file("m.json").c_str()) == SIDIWO_OK);
  sidiwo_moments* reloaded = nullptr;
  REQUIRE(sidiwo_moments_load(tmp.file("m.json").c_str(), loaded, &reloaded) == SIDIWO_OK);

  sidiwo_decompose_options dopts;
  sidiwo_decompose_options_default(&dopts);
  dopts.project_to_simplex = 1;
  sidiwo_model* model = nullptr;
  REQUIRE(sidiwo_decompose(reloaded, 2, &dopts, &model) == SIDIWO_OK);
  int32_t md = 0, ml = 0;
  CHECK(sidiwo_model_dims(model, &md, &ml) == SIDIWO_OK);
  CHECK(md == 100);
  CHECK(ml == 2);
  double w0 = 0, w1 = 0;
  CHECK(sidiwo_model_weight(model, 0, &w0) == SIDIWO_OK);
  CHECK(sidiwo_model_weight(model, 1, &w1) == SIDIWO_OK);
  CHECK(w0 >= w1);
  std::vector<double> center(100);
  CHECK(sidiwo_model_center(model, 0, center.data()) == SIDIWO_OK);
  double sum = 0;
  for (double x : center) sum += x;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
  REQUIRE(sidiwo_model_save(model, tmp.file("model.json").c_str()) == SIDIWO_OK);
  sidiwo_model* model2 = nullptr;
  REQUIRE(sidiwo_model_load(tmp.file("model.json").c_str(), &model2) == SIDIWO_OK);

  sidiwo_tree_options topts;
  sidiwo_tree_options_default(&topts);
  topts.max_depth = 3;
  sidiwo_tree* tree = nullptr;
  REQUIRE(sidiwo_tree_build(loaded, &topts, &tree) == SIDIWO_OK);
  int32_t count = 0;
  CHECK(sidiwo_tree_node_count(tree, &count) == SIDIWO_OK);
  CHECK(count >= 3);
  int32_t depth = 0, left = 0, right = 0;
  int64_t docs = 0;
  CHECK(sidiwo_tree_node_info(tree, 0, &depth, &docs, &left, &right) == SIDIWO_OK);
  CHECK(depth == 0);
  CHECK(docs == 400);
  CHECK(left > 0);
  int32_t words = 0;
  CHECK(sidiwo_tree_node_top_word_count(tree, 0, &words) == SIDIWO_OK);
  CHECK(words == 10);
  const char* word = nullptr;
  double rel = 0;
  CHECK(sidiwo_tree_node_top_word(tree, 0, 0, &word, &rel) == SIDIWO_OK);
  CHECK(word[0] == 'w');

  REQUIRE(sidiwo_tree_save_json(tree, tmp.file("tree.json").c_str(), 1) == SIDIWO_OK);
  sidiwo_tree* tree2 = nullptr;
  REQUIRE(sidiwo_tree_load_json(tmp.file("tree.json").c_str(), &tree2) == SIDIWO_OK);
  double ari = 0.0;
  char* json_text = nullptr;
  char* csv_text = nullptr;
  REQUIRE(sidiwo_tree_eval(tree2, tmp.file("labels.txt").c_str(), &ari, &json_text, &csv_text) ==
          SIDIWO_OK);
  CHECK(ari > 0.8);
  CHECK(std::string(json_text).find("\"ari\"") != std::string::npos);
  CHECK(std::string(csv_text).find("node_id") == 0);
  sidiwo_string_free(json_text);
  sidiwo_string_free(csv_text);

  sidiwo_tree_free(tree2);
  sidiwo_tree_free(tree);
  sidiwo_model_free(model2);
  sidiwo_model_free(model);
  sidiwo_moments_free(reloaded);
  sidiwo_moments_free(moments);
  sidiwo_corpus_free(loaded);
  sidiwo_corpus_free(corpus);
}

TEST_CASE("c api reports structured errors") {
  sidiwo_corpus* corpus = nullptr;
  CHECK(sidiwo_corpus_read_uci("/nonexistent/path.txt", nullptr, &corpus) == SIDIWO_ERR_IO);
  CHECK(std::string(sidiwo_last_error()).find("nonexistent") != std::string::npos);
  CHECK(sidiwo_corpus_read_uci(nullptr, nullptr, &corpus) == SIDIWO_ERR_INVALID_ARGUMENT);
  CHECK(std::string(sidiwo_status_name(SIDIWO_ERR_RANK_DEFICIENT)) == "RankDeficient");
  CHECK(sidiwo_status_is_numerical(SIDIWO_ERR_RANK_DEFICIENT) == 1);
  CHECK(sidiwo_status_is_numerical(SIDIWO_ERR_PARSE) == 0);

  // rank-deficient decompose surfaces with the right status
  sidiwo_corpus* synth = nullptr;
  REQUIRE(sidiwo_corpus_synth(1, 8, 60, 10, 3, &synth) == SIDIWO_OK);
  sidiwo_moments* moments = nullptr;
  REQUIRE(sidiwo_moments_estimate(synth, 0, 0, 1, &moments) == SIDIWO_OK);
  sidiwo_model* model = nullptr;
  CHECK(sidiwo_decompose(moments, 5, nullptr, &model) == SIDIWO_ERR_UNSUPPORTED_RANK);
  sidiwo_decompose_options dopts;
  sidiwo_decompose_options_default(&dopts);
  dopts.assume_realizable = 1;
  CHECK(sidiwo_decompose(moments, 9, &dopts, &model) == SIDIWO_ERR_INVALID_ARGUMENT);
  sidiwo_moments_free(moments);
  sidiwo_corpus_free(synth);
  CHECK(std::string(sidiwo_version()).find('.') != std::string::npos);
}
