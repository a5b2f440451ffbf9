// Command-line front end. Everything numerical happens behind the C API
// in sidiwo.h; this file only parses flags, moves files around, and
// formats output.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sidiwo.h"

namespace {

constexpr int kExitInputError = 2;
constexpr int kExitNumericalError = 3;

struct RunConfig {
  std::string corpus_path;
  std::string vocab_path;
  std::string stopwords_path;
  std::string labels_path;
  std::string moments_path;
  std::string tree_path;
  std::string output_path;
  std::string format = "json";
  std::string estimator = "counts";
  std::string input_kind = "uci";  // uci | text
  int32_t d_keep = 3000;
  int32_t l = 2;
  int max_depth = 3;
  int min_split_size = 20;
  double lambda_relevance = 0.7;
  int grid_size = 10000;
  uint64_t seed = 0;
  int threads = 0;  // 0 = all cores
  bool serial = false;
  bool realizable = false;
  bool project = false;
  bool emit_doc_ids = true;
  bool allow_short_docs = false;
  // synth
  int levels = 3;
  int32_t vocab_size = 100;
  int64_t n_docs = 400;
  int64_t doc_len = 50;
};

int effective_threads(const RunConfig& cfg) {
  if (cfg.serial) return 1;
  if (cfg.threads > 0) return cfg.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

[[noreturn]] void die(sidiwo_status status) {
  std::cerr << sidiwo_status_name(status) << ": " << sidiwo_last_error() << "\n";
  std::exit(sidiwo_status_is_numerical(status) ? kExitNumericalError : kExitInputError);
}

void check(sidiwo_status status) {
  if (status != SIDIWO_OK) die(status);
}

struct CorpusHandle {
  sidiwo_corpus* ptr = nullptr;
  ~CorpusHandle() { sidiwo_corpus_free(ptr); }
};
struct MomentsHandle {
  sidiwo_moments* ptr = nullptr;
  ~MomentsHandle() { sidiwo_moments_free(ptr); }
};
struct ModelHandle {
  sidiwo_model* ptr = nullptr;
  ~ModelHandle() { sidiwo_model_free(ptr); }
};
struct TreeHandle {
  sidiwo_tree* ptr = nullptr;
  ~TreeHandle() { sidiwo_tree_free(ptr); }
};

void load_corpus(const RunConfig& cfg, CorpusHandle& corpus) {
  if (cfg.input_kind == "text") {
    check(sidiwo_corpus_read_text(cfg.corpus_path.c_str(),
                                  cfg.stopwords_path.empty() ? nullptr : cfg.stopwords_path.c_str(),
                                  cfg.d_keep, &corpus.ptr));
  } else {
    check(sidiwo_corpus_read_uci(cfg.corpus_path.c_str(),
                                 cfg.vocab_path.empty() ? nullptr : cfg.vocab_path.c_str(),
                                 &corpus.ptr));
  }
}

int estimator_code(const RunConfig& cfg) { return cfg.estimator == "triples" ? 1 : 0; }

int cmd_moments(const RunConfig& cfg) {
  CorpusHandle corpus;
  load_corpus(cfg, corpus);
  MomentsHandle moments;
  check(sidiwo_moments_estimate(corpus.ptr, estimator_code(cfg), cfg.allow_short_docs ? 1 : 0,
                                effective_threads(cfg), &moments.ptr));
  check(sidiwo_moments_save(moments.ptr, cfg.output_path.c_str()));
  int64_t n = 0;
  int32_t d = 0;
  sidiwo_moments_n_docs(moments.ptr, &n);
  sidiwo_moments_vocab_size(moments.ptr, &d);
  std::cout << "moments: " << n << " documents, vocabulary " << d << ", estimator "
            << cfg.estimator << " -> " << cfg.output_path << "\n";
  return 0;
}

int cmd_decompose(const RunConfig& cfg) {
  CorpusHandle corpus;
  load_corpus(cfg, corpus);
  MomentsHandle moments;
  if (!cfg.moments_path.empty()) {
    check(sidiwo_moments_load(cfg.moments_path.c_str(), corpus.ptr, &moments.ptr));
  } else {
    check(sidiwo_moments_estimate(corpus.ptr, estimator_code(cfg), cfg.allow_short_docs ? 1 : 0,
                                  effective_threads(cfg), &moments.ptr));
  }
  sidiwo_decompose_options opts;
  sidiwo_decompose_options_default(&opts);
  opts.assume_realizable = cfg.realizable ? 1 : 0;
  opts.grid_size = cfg.grid_size;
  opts.project_to_simplex = cfg.project ? 1 : 0;
  opts.seed = cfg.seed;
  opts.n_threads = effective_threads(cfg);
  ModelHandle model;
  check(sidiwo_decompose(moments.ptr, cfg.l, &opts, &model.ptr));
  check(sidiwo_model_save(model.ptr, cfg.output_path.c_str()));

  int32_t d = 0, l = 0;
  sidiwo_model_dims(model.ptr, &d, &l);
  double residual = 0, a_star = 0, f_min = 0, cost = 0;
  sidiwo_model_residual(model.ptr, &residual);
  sidiwo_model_diagnostics(model.ptr, &a_star, &f_min, &cost);
  std::cout << "model: l=" << l << ", residual=" << residual << ", cost=" << cost;
  if (!std::isnan(a_star)) std::cout << ", a*=" << a_star << ", F(a*)=" << f_min;
  std::cout << " -> " << cfg.output_path << "\n";
  int32_t warnings = 0;
  sidiwo_model_warning_count(model.ptr, &warnings);
  for (int32_t i = 0; i < warnings; ++i) {
    const char* w = nullptr;
    sidiwo_model_warning(model.ptr, i, &w);
    std::cerr << "warning: " << w << "\n";
  }
  return 0;
}

void print_tree_table(const sidiwo_tree* tree) {
  int32_t count = 0;
  check(sidiwo_tree_node_count(tree, &count));
  std::printf("%-8s %-6s %-8s %s\n", "node", "depth", "docs", "top words");
  for (int32_t id = 0; id < count; ++id) {
    int32_t depth = 0, left = -1, right = -1;
    int64_t n_docs = 0;
    check(sidiwo_tree_node_info(tree, id, &depth, &n_docs, &left, &right));
    int32_t words = 0;
    check(sidiwo_tree_node_top_word_count(tree, id, &words));
    std::string joined;
    for (int32_t i = 0; i < words; ++i) {
      const char* word = nullptr;
      check(sidiwo_tree_node_top_word(tree, id, i, &word, nullptr));
      if (i > 0) joined += " ";
      joined += word;
    }
    std::printf("%-8d %-6d %-8lld %s\n", id, depth, static_cast<long long>(n_docs),
                joined.c_str());
    int32_t warnings = 0;
    check(sidiwo_tree_node_warning_count(tree, id, &warnings));
    for (int32_t i = 0; i < warnings; ++i) {
      const char* w = nullptr;
      check(sidiwo_tree_node_warning(tree, id, i, &w));
      std::fprintf(stderr, "node %d: %s\n", id, w);
    }
  }
}

int cmd_tree(const RunConfig& cfg) {
  CorpusHandle corpus;
  load_corpus(cfg, corpus);
  sidiwo_tree_options opts;
  sidiwo_tree_options_default(&opts);
  opts.max_depth = cfg.max_depth;
  opts.min_split_size = cfg.min_split_size;
  opts.estimator = estimator_code(cfg);
  opts.allow_short_docs = cfg.allow_short_docs ? 1 : 0;
  opts.lambda_relevance = cfg.lambda_relevance;
  opts.grid_size = cfg.grid_size;
  opts.n_threads = effective_threads(cfg);
  opts.parallel = cfg.serial ? 0 : 1;

  const auto start = std::chrono::steady_clock::now();
  TreeHandle tree;
  check(sidiwo_tree_build(corpus.ptr, &opts, &tree.ptr));
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (cfg.format == "dot") {
    check(sidiwo_tree_save_dot(tree.ptr, cfg.output_path.c_str()));
  } else {
    check(sidiwo_tree_save_json(tree.ptr, cfg.output_path.c_str(), cfg.emit_doc_ids ? 1 : 0));
  }
  print_tree_table(tree.ptr);
  std::cout << "tree -> " << cfg.output_path << " (" << elapsed << " s)\n";
  return 0;
}

int cmd_eval(const RunConfig& cfg) {
  TreeHandle tree;
  check(sidiwo_tree_load_json(cfg.tree_path.c_str(), &tree.ptr));
  double ari = 0.0;
  char* json_text = nullptr;
  char* csv_text = nullptr;
  check(sidiwo_tree_eval(tree.ptr, cfg.labels_path.c_str(), &ari,
                         cfg.format == "json" ? &json_text : nullptr,
                         cfg.format == "csv" ? &csv_text : nullptr));
  std::cout << "ari " << ari << "\n";
  if (!cfg.output_path.empty()) {
    std::ofstream out(cfg.output_path);
    if (!out) {
      std::cerr << "IoFailure: cannot open '" << cfg.output_path << "' for writing\n";
      return kExitInputError;
    }
    out << (json_text != nullptr ? json_text : (csv_text != nullptr ? csv_text : ""));
  } else if (csv_text != nullptr) {
    std::cout << csv_text;
  }
  sidiwo_string_free(json_text);
  sidiwo_string_free(csv_text);
  return 0;
}

int cmd_synth(const RunConfig& cfg) {
  CorpusHandle corpus;
  check(sidiwo_corpus_synth(cfg.levels, cfg.vocab_size, cfg.n_docs, cfg.doc_len, cfg.seed,
                            &corpus.ptr));
  check(sidiwo_corpus_write_uci(corpus.ptr, cfg.output_path.c_str(),
                                cfg.vocab_path.empty() ? nullptr : cfg.vocab_path.c_str()));
  if (!cfg.labels_path.empty())
    check(sidiwo_corpus_write_labels(corpus.ptr, cfg.labels_path.c_str()));
  std::cout << "synth: " << cfg.n_docs << " documents, " << (1 << cfg.levels) << " topics, vocab "
            << cfg.vocab_size << " -> " << cfg.output_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical topic discovery via whitened joint diagonalization of moments"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&cfg](CLI::App* cmd) {
    cmd->add_option("--threads", cfg.threads, "worker threads (0 = all cores)")
        ->envname("SIDIWO_THREADS");
    cmd->add_flag("--serial", cfg.serial, "deterministic single-threaded mode");
  };
  auto add_corpus_input = [&cfg](CLI::App* cmd) {
    cmd->add_option("--corpus-path", cfg.corpus_path, "input corpus file")
        ->required()
        ->envname("SIDIWO_CORPUS_PATH");
    cmd->add_option("--vocab-path", cfg.vocab_path, "vocabulary file (one token per line)")
        ->envname("SIDIWO_VOCAB_PATH");
    cmd->add_option("--input-kind", cfg.input_kind, "corpus format: uci|text")
        ->check(CLI::IsMember({"uci", "text"}))
        ->envname("SIDIWO_INPUT_KIND");
    cmd->add_option("--stopwords-path", cfg.stopwords_path, "stop-word list for text input")
        ->envname("SIDIWO_STOPWORDS_PATH");
    cmd->add_option("--d-keep", cfg.d_keep, "vocabulary truncation for text input")
        ->envname("SIDIWO_D_KEEP");
    cmd->add_option("--estimator", cfg.estimator, "moment estimator: counts|triples")
        ->check(CLI::IsMember({"counts", "triples"}))
        ->envname("SIDIWO_ESTIMATOR");
    cmd->add_flag("--allow-short-docs", cfg.allow_short_docs,
                  "admit 2-token documents into M1/M2");
  };

  CLI::App* moments = app.add_subcommand("moments", "estimate and store M1/M2");
  add_corpus_input(moments);
  add_common(moments);
  moments->add_option("--output-path", cfg.output_path, "moments artifact (json)")
      ->required()
      ->envname("SIDIWO_OUTPUT_PATH");

  CLI::App* decompose = app.add_subcommand("decompose", "recover pseudo-centers at rank l");
  add_corpus_input(decompose);
  add_common(decompose);
  decompose->add_option("--moments-path", cfg.moments_path,
                        "reuse a stored moments artifact for M1/M2");
  decompose->add_option("--l", cfg.l, "number of components")->envname("SIDIWO_L");
  decompose->add_flag("--realizable", cfg.realizable, "declare l to be the true rank");
  decompose->add_flag("--project", cfg.project, "project centers onto the simplex");
  decompose->add_option("--grid-size", cfg.grid_size, "rotation search grid")
      ->envname("SIDIWO_GRID_SIZE");
  decompose->add_option("--seed", cfg.seed, "seed for the realizable-mode rotation")
      ->envname("SIDIWO_SEED");
  decompose->add_option("--output-path", cfg.output_path, "model artifact (json)")->required();

  CLI::App* tree = app.add_subcommand("tree", "build the divisive cluster tree");
  add_corpus_input(tree);
  add_common(tree);
  tree->add_option("--max-depth", cfg.max_depth, "tree depth")->envname("SIDIWO_MAX_DEPTH");
  tree->add_option("--min-split-size", cfg.min_split_size, "smallest splittable node")
      ->envname("SIDIWO_MIN_SPLIT_SIZE");
  tree->add_option("--lambda-relevance", cfg.lambda_relevance, "relevance weight")
      ->envname("SIDIWO_LAMBDA_RELEVANCE");
  tree->add_option("--grid-size", cfg.grid_size, "rotation search grid");
  tree->add_option("--format", cfg.format, "output format: json|dot")
      ->check(CLI::IsMember({"json", "dot"}));
  tree->add_flag("!--no-doc-ids", cfg.emit_doc_ids, "omit per-node document ids");
  tree->add_option("--output-path", cfg.output_path, "tree artifact")->required();

  CLI::App* eval = app.add_subcommand("eval", "score a stored tree against labels");
  eval->add_option("--tree-path", cfg.tree_path, "tree artifact (json with doc ids)")->required();
  eval->add_option("--labels-path", cfg.labels_path, "labels sidecar (one integer per line)")
      ->required();
  eval->add_option("--format", cfg.format, "report format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  eval->add_option("--output-path", cfg.output_path, "report file (stdout if omitted)");

  CLI::App* synth = app.add_subcommand("synth", "generate a labelled synthetic corpus");
  synth->add_option("--levels", cfg.levels, "hierarchy depth (2^levels topics)")
      ->envname("SIDIWO_LEVELS");
  synth->add_option("--vocab-size", cfg.vocab_size, "vocabulary size")
      ->envname("SIDIWO_VOCAB_SIZE");
  synth->add_option("--n-docs", cfg.n_docs, "number of documents")->envname("SIDIWO_N_DOCS");
  synth->add_option("--doc-len", cfg.doc_len, "tokens per document")->envname("SIDIWO_DOC_LEN");
  synth->add_option("--seed", cfg.seed, "sampling seed")->envname("SIDIWO_SEED");
  synth->add_option("--vocab-path", cfg.vocab_path, "also write a vocabulary file");
  synth->add_option("--labels-path", cfg.labels_path, "also write the labels sidecar");
  synth->add_option("--output-path", cfg.output_path, "corpus file (bag-of-words format)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  if (moments->parsed()) return cmd_moments(cfg);
  if (decompose->parsed()) return cmd_decompose(cfg);
  if (tree->parsed()) return cmd_tree(cfg);
  if (eval->parsed()) return cmd_eval(cfg);
  if (synth->parsed()) return cmd_synth(cfg);
  return kExitInputError;
}
