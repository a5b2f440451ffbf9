#include "sidiwo/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "sidiwo/metrics.hpp"

namespace sidiwo::io {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_failure, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_failure, "cannot open '" + path + "' for writing");
  return out;
}

[[noreturn]] void parse_fail(const std::string& path, int64_t line_no, const std::string& what) {
  fail(ErrorCode::parse_failure, path + ":" + std::to_string(line_no) + ": " + what);
}

int64_t parse_int(const std::string& token, const std::string& path, int64_t line_no) {
  try {
    size_t pos = 0;
    const int64_t value = std::stoll(token, &pos);
    if (pos != token.size()) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    parse_fail(path, line_no, "expected an integer, got '" + token + "'");
  }
}

json load_json(const std::string& path, const std::string& expected_kind) {
  std::ifstream in = open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_failure, path + ": " + e.what());
  }
  if (!j.contains("format_version") || !j["format_version"].is_number_integer())
    fail(ErrorCode::parse_failure, path + ": missing format_version");
  if (j["format_version"].get<int>() != kFormatVersion)
    fail(ErrorCode::parse_failure,
         path + ": unsupported format_version " + to_string(j["format_version"]));
  if (!j.contains("kind") || j["kind"].get<std::string>() != expected_kind)
    fail(ErrorCode::parse_failure, path + ": expected a '" + expected_kind + "' artifact");
  return j;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Vector vector_from_json(const json& arr) {
  Vector v(static_cast<Index>(arr.size()));
  for (size_t i = 0; i < arr.size(); ++i) v(static_cast<Index>(i)) = arr[i].get<double>();
  return v;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out = open_output(path);
  out << content;
  if (!out) fail(ErrorCode::io_failure, "failed writing '" + path + "'");
}

Corpus read_corpus_uci(const std::string& corpus_path, const std::string& vocab_path) {
  std::ifstream in = open_input(corpus_path);
  std::string line;
  int64_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      return true;
    }
    return false;
  };

  int64_t header[3] = {0, 0, 0};
  for (int i = 0; i < 3; ++i) {
    if (!next_line()) parse_fail(corpus_path, line_no + 1, "missing header line");
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) parse_fail(corpus_path, line_no, "empty header line");
    header[i] = parse_int(tok, corpus_path, line_no);
    std::string extra;
    if (ss >> extra) parse_fail(corpus_path, line_no, "unexpected token '" + extra + "'");
  }
  const int64_t n = header[0], d = header[1], nnz = header[2];
  if (n < 0 || d <= 0 || nnz < 0) parse_fail(corpus_path, line_no, "invalid header values");

  Corpus corpus;
  corpus.vocab_size = static_cast<int32_t>(d);
  corpus.docs.resize(static_cast<size_t>(n));

  int64_t seen = 0;
  int64_t current_doc = 0;
  std::vector<std::pair<int32_t, int32_t>> pending;
  auto flush = [&corpus, &pending](int64_t doc_id) {
    if (doc_id == 0) return;
    corpus.docs[static_cast<size_t>(doc_id - 1)] = Document::from_counts(std::move(pending));
    pending.clear();
  };
  while (next_line()) {
    std::istringstream ss(line);
    std::string t1, t2, t3, extra;
    if (!(ss >> t1)) continue;  // blank line
    if (!(ss >> t2 >> t3) || (ss >> extra))
      parse_fail(corpus_path, line_no, "expected 'doc_id word_id count'");
    const int64_t doc_id = parse_int(t1, corpus_path, line_no);
    const int64_t word_id = parse_int(t2, corpus_path, line_no);
    const int64_t count = parse_int(t3, corpus_path, line_no);
    if (doc_id < 1 || doc_id > n)
      parse_fail(corpus_path, line_no, "doc_id " + std::to_string(doc_id) + " outside [1, " +
                                           std::to_string(n) + "]");
    if (word_id < 1 || word_id > d)
      parse_fail(corpus_path, line_no, "word_id " + std::to_string(word_id) + " outside [1, " +
                                           std::to_string(d) + "]");
    if (count < 1) parse_fail(corpus_path, line_no, "count must be positive");
    if (doc_id < current_doc)
      parse_fail(corpus_path, line_no, "doc_id values must be ascending");
    if (doc_id > current_doc) {
      flush(current_doc);
      current_doc = doc_id;
    }
    pending.emplace_back(static_cast<int32_t>(word_id - 1), static_cast<int32_t>(count));
    ++seen;
  }
  flush(current_doc);
  if (seen != nnz)
    fail(ErrorCode::parse_failure, corpus_path + ": header declares " + std::to_string(nnz) +
                                       " entries but " + std::to_string(seen) + " were found");

  if (!vocab_path.empty()) {
    std::ifstream vin = open_input(vocab_path);
    std::string token;
    int64_t vline = 0;
    while (std::getline(vin, token)) {
      ++vline;
      if (vline > d) fail(ErrorCode::parse_failure, vocab_path + ": more tokens than vocab_size");
      corpus.vocab.push_back(token);
    }
    if (static_cast<int64_t>(corpus.vocab.size()) != d)
      fail(ErrorCode::parse_failure,
           vocab_path + ": expected " + std::to_string(d) + " tokens, found " +
               std::to_string(corpus.vocab.size()));
  }
  corpus.validate();
  return corpus;
}

void write_corpus_uci(const Corpus& corpus, const std::string& corpus_path,
                      const std::string& vocab_path) {
  corpus.validate();
  int64_t nnz = 0;
  for (const Document& doc : corpus.docs) nnz += static_cast<int64_t>(doc.counts.size());
  std::ofstream out = open_output(corpus_path);
  out << corpus.n_docs() << "\n" << corpus.vocab_size << "\n" << nnz << "\n";
  for (int64_t i = 0; i < corpus.n_docs(); ++i)
    for (auto [w, c] : corpus.docs[static_cast<size_t>(i)].counts)
      out << (i + 1) << " " << (w + 1) << " " << c << "\n";
  if (!out) fail(ErrorCode::io_failure, "failed writing '" + corpus_path + "'");

  if (!vocab_path.empty()) {
    std::ofstream vout = open_output(vocab_path);
    if (corpus.vocab.empty()) {
      for (int32_t w = 0; w < corpus.vocab_size; ++w) vout << "w" << w << "\n";
    } else {
      for (const std::string& token : corpus.vocab) vout << token << "\n";
    }
    if (!vout) fail(ErrorCode::io_failure, "failed writing '" + vocab_path + "'");
  }
}

Corpus read_corpus_text(const std::string& text_path, const std::string& stopwords_path,
                        int32_t d_keep) {
  std::unordered_set<std::string> stopwords;
  if (!stopwords_path.empty()) {
    std::ifstream sin = open_input(stopwords_path);
    std::string token;
    while (std::getline(sin, token)) {
      if (!token.empty()) stopwords.insert(token);
    }
  }

  std::ifstream in = open_input(text_path);
  std::vector<std::vector<std::string>> docs;
  std::unordered_map<std::string, int64_t> freq;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ss >> tok) {
      if (stopwords.count(tok)) continue;
      tokens.push_back(tok);
      ++freq[tok];
    }
    docs.push_back(std::move(tokens));
  }
  if (docs.empty()) fail(ErrorCode::empty_corpus, text_path + ": no documents");

  // Vocabulary: top d_keep by frequency, ties lexicographic.
  std::vector<std::pair<std::string, int64_t>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (d_keep > 0 && static_cast<int64_t>(ranked.size()) > d_keep)
    ranked.resize(static_cast<size_t>(d_keep));
  if (ranked.empty()) fail(ErrorCode::empty_corpus, text_path + ": no tokens survive filtering");

  Corpus corpus;
  corpus.vocab_size = static_cast<int32_t>(ranked.size());
  corpus.vocab.reserve(ranked.size());
  std::unordered_map<std::string, int32_t> word_id;
  for (const auto& [token, count] : ranked) {
    word_id.emplace(token, static_cast<int32_t>(corpus.vocab.size()));
    corpus.vocab.push_back(token);
  }
  corpus.docs.reserve(docs.size());
  std::vector<int32_t> ids;
  for (const auto& tokens : docs) {
    ids.clear();
    for (const std::string& t : tokens) {
      auto it = word_id.find(t);
      if (it != word_id.end()) ids.push_back(it->second);
    }
    corpus.docs.push_back(Document::from_tokens(ids));
  }
  corpus.validate();
  return corpus;
}

std::vector<int32_t> read_labels(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<int32_t> labels;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    labels.push_back(static_cast<int32_t>(parse_int(line, path, line_no)));
  }
  return labels;
}

void write_labels(std::span<const int32_t> labels, const std::string& path) {
  std::ofstream out = open_output(path);
  for (int32_t label : labels) out << label << "\n";
  if (!out) fail(ErrorCode::io_failure, "failed writing '" + path + "'");
}

void save_moments(const MomentStats& stats, const std::string& path) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "moments";
  j["n_docs"] = stats.n_docs;
  j["d"] = stats.vocab_size();
  j["estimator"] = estimator_name(stats.estimator);
  j["allow_short_docs"] = stats.allow_short_docs;
  j["m1"] = vector_to_json(stats.m1);
  json m2 = json::array();
  for (Index r = 0; r < stats.m2.rows(); ++r)
    for (Index c = 0; c < stats.m2.cols(); ++c) m2.push_back(stats.m2(r, c));
  j["m2"] = std::move(m2);
  write_text_file(path, j.dump() + "\n");
}

MomentStats load_moments(const std::string& path, std::shared_ptr<const Corpus> corpus) {
  const json j = load_json(path, "moments");
  MomentStats stats;
  stats.n_docs = j.at("n_docs").get<int64_t>();
  const Index d = j.at("d").get<Index>();
  stats.estimator = estimator_from_name(j.at("estimator").get<std::string>());
  stats.allow_short_docs = j.at("allow_short_docs").get<bool>();
  stats.m1 = vector_from_json(j.at("m1"));
  if (stats.m1.size() != d) fail(ErrorCode::parse_failure, path + ": m1 length mismatch");
  const auto& m2 = j.at("m2");
  if (static_cast<Index>(m2.size()) != d * d)
    fail(ErrorCode::parse_failure, path + ": m2 length mismatch");
  stats.m2.resize(d, d);
  size_t idx = 0;
  for (Index r = 0; r < d; ++r)
    for (Index c = 0; c < d; ++c) stats.m2(r, c) = m2[idx++].get<double>();
  if (corpus) {
    if (corpus->vocab_size != d)
      fail(ErrorCode::length_mismatch, "attached corpus has vocab_size " +
                                           std::to_string(corpus->vocab_size) +
                                           ", artifact says " + std::to_string(d));
    if (corpus->n_docs() != stats.n_docs)
      fail(ErrorCode::length_mismatch,
           "attached corpus has " + std::to_string(corpus->n_docs()) + " documents, artifact says " +
               std::to_string(stats.n_docs));
    stats.corpus = std::move(corpus);
  }
  return stats;
}

void save_model(const RecoveredModel& model, const std::string& path) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "model";
  j["d"] = model.vocab_size();
  j["l"] = model.n_centers();
  json centers = json::array();
  for (Index c = 0; c < model.centers.cols(); ++c) centers.push_back(vector_to_json(model.centers.col(c)));
  j["centers"] = std::move(centers);
  j["weights"] = vector_to_json(model.weights);
  j["residual"] = model.residual;
  json diag;
  diag["projected"] = model.diagnostics.projected;
  if (std::isfinite(model.diagnostics.a_star)) diag["a_star"] = model.diagnostics.a_star;
  if (std::isfinite(model.diagnostics.f_min)) diag["f_min"] = model.diagnostics.f_min;
  if (std::isfinite(model.diagnostics.cost)) diag["cost"] = model.diagnostics.cost;
  diag["warnings"] = model.diagnostics.warnings;
  j["diagnostics"] = std::move(diag);
  write_text_file(path, j.dump(2) + "\n");
}

RecoveredModel load_model(const std::string& path) {
  const json j = load_json(path, "model");
  RecoveredModel model;
  const Index d = j.at("d").get<Index>();
  const Index l = j.at("l").get<Index>();
  model.centers.resize(d, l);
  const auto& centers = j.at("centers");
  if (static_cast<Index>(centers.size()) != l)
    fail(ErrorCode::parse_failure, path + ": center count mismatch");
  for (Index c = 0; c < l; ++c) {
    Vector col = vector_from_json(centers[static_cast<size_t>(c)]);
    if (col.size() != d) fail(ErrorCode::parse_failure, path + ": center length mismatch");
    model.centers.col(c) = col;
  }
  model.weights = vector_from_json(j.at("weights"));
  if (model.weights.size() != l) fail(ErrorCode::parse_failure, path + ": weights length mismatch");
  model.residual = j.at("residual").get<double>();
  const auto& diag = j.at("diagnostics");
  model.diagnostics.projected = diag.at("projected").get<bool>();
  if (diag.contains("a_star")) model.diagnostics.a_star = diag["a_star"].get<double>();
  if (diag.contains("f_min")) model.diagnostics.f_min = diag["f_min"].get<double>();
  if (diag.contains("cost")) model.diagnostics.cost = diag["cost"].get<double>();
  for (const auto& w : diag.at("warnings")) model.diagnostics.warnings.push_back(w.get<std::string>());
  return model;
}

namespace {

json node_to_json(const hier::TreeNode& node, bool emit_doc_ids) {
  json j;
  j["node_id"] = node.node_id;
  j["depth"] = node.depth;
  j["n_docs"] = static_cast<int64_t>(node.doc_ids.size());
  if (emit_doc_ids) j["doc_ids"] = node.doc_ids;
  json words = json::array();
  for (const auto& [word, rel] : node.top_words) {
    json w;
    w["word"] = word;
    w["relevance"] = rel;
    words.push_back(std::move(w));
  }
  j["top_words"] = std::move(words);
  json children = json::array();
  if (!node.is_leaf()) {
    children.push_back(node_to_json(*node.left, emit_doc_ids));
    children.push_back(node_to_json(*node.right, emit_doc_ids));
  }
  j["children"] = std::move(children);
  return j;
}

std::unique_ptr<hier::TreeNode> node_from_json(const json& j, const std::string& path) {
  auto node = std::make_unique<hier::TreeNode>();
  node->node_id = j.at("node_id").get<int>();
  node->depth = j.at("depth").get<int>();
  if (j.contains("doc_ids")) {
    for (const auto& id : j["doc_ids"]) node->doc_ids.push_back(id.get<int64_t>());
    if (static_cast<int64_t>(node->doc_ids.size()) != j.at("n_docs").get<int64_t>())
      fail(ErrorCode::parse_failure, path + ": doc_ids length disagrees with n_docs");
  }
  for (const auto& w : j.at("top_words"))
    node->top_words.emplace_back(w.at("word").get<std::string>(), w.at("relevance").get<double>());
  const auto& children = j.at("children");
  if (children.size() == 2) {
    node->left = node_from_json(children[0], path);
    node->right = node_from_json(children[1], path);
  } else if (!children.empty()) {
    fail(ErrorCode::parse_failure, path + ": nodes must have exactly 0 or 2 children");
  }
  return node;
}

std::string escape_dot(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

void save_tree(const hier::ClusterTree& tree, const std::string& path, bool emit_doc_ids) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "tree";
  j["n_docs"] = tree.n_docs;
  j["vocab_size"] = tree.vocab_size;
  j["max_depth"] = tree.max_depth;
  j["lambda_relevance"] = tree.lambda_relevance;
  j["root"] = node_to_json(*tree.root, emit_doc_ids);
  write_text_file(path, j.dump(2) + "\n");
}

hier::ClusterTree load_tree(const std::string& path) {
  const json j = load_json(path, "tree");
  hier::ClusterTree tree;
  tree.n_docs = j.at("n_docs").get<int64_t>();
  tree.vocab_size = j.at("vocab_size").get<int32_t>();
  tree.max_depth = j.at("max_depth").get<int>();
  tree.lambda_relevance = j.at("lambda_relevance").get<double>();
  tree.root = node_from_json(j.at("root"), path);
  return tree;
}

void save_tree_dot(const hier::ClusterTree& tree, const std::string& path) {
  std::ostringstream out;
  out << "digraph clusters {\n  node [shape=box, fontname=\"Helvetica\"];\n";
  for (const hier::TreeNode* node : tree.nodes()) {
    out << "  n" << node->node_id << " [label=\"";
    const size_t n_words = std::min<size_t>(5, node->top_words.size());
    for (size_t i = 0; i < n_words; ++i) {
      if (i > 0) out << "\\n";
      out << escape_dot(node->top_words[i].first);
    }
    out << "\"];\n";
  }
  for (const hier::TreeNode* node : tree.nodes()) {
    if (node->is_leaf()) continue;
    out << "  n" << node->node_id << " -> n" << node->left->node_id << ";\n";
    out << "  n" << node->node_id << " -> n" << node->right->node_id << ";\n";
  }
  out << "}\n";
  write_text_file(path, out.str());
}

EvalReport evaluate_tree(const hier::ClusterTree& tree, std::span<const int32_t> labels) {
  if (static_cast<int64_t>(labels.size()) != tree.n_docs)
    fail(ErrorCode::length_mismatch, "tree covers " + std::to_string(tree.n_docs) +
                                         " documents but " + std::to_string(labels.size()) +
                                         " labels were given");
  for (const hier::TreeNode* node : tree.nodes())
    if (node->doc_ids.empty() && tree.n_docs > 0)
      fail(ErrorCode::invalid_argument,
           "tree was saved without doc_ids; re-export it with doc_ids enabled");

  EvalReport report;
  const std::vector<int32_t> assignment = tree.leaf_assignment();
  report.ari = metrics::ari(labels, assignment);
  for (const hier::TreeNode* node : tree.nodes()) {
    EvalNodeRow row;
    row.node_id = node->node_id;
    row.depth = node->depth;
    row.n_docs = static_cast<int64_t>(node->doc_ids.size());
    row.leaf = node->is_leaf();
    row.purity = metrics::purity(labels, node->doc_ids);
    report.rows.push_back(row);
  }
  return report;
}

std::string eval_report_json(const EvalReport& report) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "eval";
  j["ari"] = report.ari;
  json rows = json::array();
  for (const EvalNodeRow& row : report.rows) {
    json r;
    r["node_id"] = row.node_id;
    r["depth"] = row.depth;
    r["n_docs"] = row.n_docs;
    r["leaf"] = row.leaf;
    r["purity"] = row.purity;
    rows.push_back(std::move(r));
  }
  j["nodes"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string eval_report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "node_id,depth,n_docs,leaf,purity\n";
  for (const EvalNodeRow& row : report.rows) {
    std::ostringstream purity;
    purity.precision(17);
    purity << row.purity;
    out << row.node_id << "," << row.depth << "," << row.n_docs << ","
        << (row.leaf ? 1 : 0) << "," << purity.str() << "\n";
  }
  return out.str();
}

}  // namespace sidiwo::io
