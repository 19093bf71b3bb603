// pairforge: command-line driver for the embedding-pair pipeline.
//
//   embed           texts.jsonl -> corpus.jsonl (HTTP endpoint or offline)
//   stats           pairwise-distance distribution summary of a corpus
//   mine            hard positive/negative pairs via percentile thresholds
//   build-rag-pairs validated QA pairs from synthetic QA records
//   blend           mix mined pairs into a synthetic pair dataset
//   score-pairs     per-pair contrastive scores for a pair dataset
//   train-toy       train a linear projection head on a pair dataset
//   eval-recall     recall@k report for a query set against a corpus
//
// Exit codes: 0 success, 1 validation error, 2 I/O or network error.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pairforge/contrastive.hpp"
#include "pairforge/embed.hpp"
#include "pairforge/eval.hpp"
#include "pairforge/jsonl.hpp"
#include "pairforge/kdtree.hpp"
#include "pairforge/miner.hpp"
#include "pairforge/rag.hpp"
#include "pairforge/stats.hpp"

namespace {

using nlohmann::ordered_json;
using namespace pairforge;

constexpr const char* kVersion =
    "pairforge 0.1.0\n"
    "formats: corpus.jsonl v1, qa.jsonl v1, pairs.jsonl v1, eval.jsonl v1, "
    "report.json v1, head.json v1";

struct GlobalOptions {
  std::uint64_t seed = 42;
  unsigned threads = 1;
  bool json = false;
  bool quiet = false;
};

void emit_summary(const GlobalOptions& global, const ordered_json& summary,
                  const std::string& text) {
  if (global.json)
    std::cout << summary.dump() << '\n';
  else if (!global.quiet)
    std::cout << text << '\n';
}

void add_embed(CLI::App& app, GlobalOptions& global) {
  auto* cmd = app.add_subcommand("embed", "Embed a texts file into a corpus file");
  cmd->fallthrough();
  struct Opts {
    std::string in, out, endpoint, model;
    std::size_t batch_size = 32, concurrency = 4, dim = 64;
    int max_retries = 3;
    double timeout = 30.0;
    bool offline = false;
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--in", opts->in, "texts.jsonl with {id, text} lines")->required();
  cmd->add_option("--out", opts->out, "output corpus.jsonl (appended on resume)")->required();
  cmd->add_option("--endpoint", opts->endpoint, "embeddings endpoint URL");
  cmd->add_option("--model", opts->model, "model name sent to the endpoint");
  cmd->add_option("--batch-size", opts->batch_size, "texts per request")
      ->capture_default_str();
  cmd->add_option("--concurrency", opts->concurrency, "max in-flight batches")
      ->capture_default_str();
  cmd->add_option("--max-retries", opts->max_retries, "retries for transient failures")
      ->capture_default_str();
  cmd->add_option("--timeout", opts->timeout, "request timeout in seconds")
      ->capture_default_str();
  cmd->add_flag("--offline", opts->offline, "deterministic hash-seeded provider (no network)");
  cmd->add_option("--dim", opts->dim, "offline provider dimension")->capture_default_str();

  cmd->callback([opts, &global] {
    std::unique_ptr<EmbeddingProvider> provider;
    if (opts->offline) {
      provider = std::make_unique<OfflineProvider>(opts->dim, global.seed);
    } else {
      if (opts->endpoint.empty())
        throw std::invalid_argument("embed: --endpoint is required unless --offline");
      if (opts->model.empty())
        throw std::invalid_argument("embed: --model is required with --endpoint");
      ProviderConfig config;
      config.endpoint_url = opts->endpoint;
      config.model_name = opts->model;
      if (const char* key = std::getenv("EMBED_API_KEY")) config.api_key = key;
      config.batch_size = opts->batch_size;
      config.concurrency = opts->concurrency;
      config.max_retries = opts->max_retries;
      config.timeout_seconds = opts->timeout;
      provider = std::make_unique<HttpProvider>(std::move(config));
    }
    const std::size_t embedded = embed_corpus_file(*provider, opts->in, opts->out);
    ordered_json summary;
    summary["embedded"] = embedded;
    summary["out"] = opts->out;
    emit_summary(global, summary,
                 "embedded " + std::to_string(embedded) + " records into " + opts->out);
  });
}

void add_stats(CLI::App& app, GlobalOptions& global) {
  auto* cmd = app.add_subcommand(
      "stats", "Pairwise-distance distribution summary of an embedding corpus");
  cmd->fallthrough();
  struct Opts {
    std::string corpus;
    std::size_t sample_count = 100000;
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--corpus", opts->corpus, "corpus.jsonl")->required();
  cmd->add_option("--sample-count", opts->sample_count, "distance pairs to sample")
      ->capture_default_str();

  cmd->callback([opts, &global] {
    const Corpus corpus = read_embedding_corpus(opts->corpus);
    const auto vectors = corpus.extract_vectors();
    const auto dist = sample_pairwise_distances(vectors, opts->sample_count, global.seed);
    ordered_json out;
    out["count"] = dist.count();
    out["mean"] = mean(dist);
    try {
      out["skewness"] = skewness(dist);
    } catch (const std::invalid_argument&) {
      out["skewness"] = nullptr;  // degenerate distribution
    }
    ordered_json pct;
    std::vector<double> sorted = dist.samples;
    std::sort(sorted.begin(), sorted.end());
    for (double p : {5.0, 50.0, 95.0})
      pct[std::to_string(static_cast<int>(p))] = detail::percentile_sorted(sorted, p);
    out["percentiles"] = std::move(pct);
    std::cout << out.dump() << '\n';
  });
}

void add_mine(CLI::App& app, GlobalOptions& global) {
  auto* cmd = app.add_subcommand(
      "mine", "Mine hard positive/negative pairs with percentile distance thresholds");
  cmd->fallthrough();
  struct Opts {
    std::string corpus, out;
    double lower_pct = 5.0, upper_pct = 95.0;
    std::size_t max_size = 5, sample_count = 100000;
    bool brute_force = false;
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--corpus", opts->corpus, "corpus.jsonl")->required();
  cmd->add_option("--out", opts->out, "output pairs.jsonl")->required();
  cmd->add_option("--lower-pct", opts->lower_pct, "hard-positive percentile")
      ->capture_default_str();
  cmd->add_option("--upper-pct", opts->upper_pct, "hard-negative percentile")
      ->capture_default_str();
  cmd->add_option("--max-size", opts->max_size, "cap per anchor on each list")
      ->capture_default_str();
  cmd->add_option("--sample-count", opts->sample_count, "distance pairs sampled for thresholds")
      ->capture_default_str();
  cmd->add_flag("--brute-force", opts->brute_force,
                "rank by full scan instead of the KD-tree (better at high dimension)");

  cmd->callback([opts, &global] {
    const Corpus corpus = read_embedding_corpus(opts->corpus);
    const auto vectors = corpus.extract_vectors();
    const auto dist = sample_pairwise_distances(vectors, opts->sample_count, global.seed);
    const ThresholdPair thresholds =
        compute_thresholds(dist, opts->lower_pct, opts->upper_pct);
    MiningConfig config;
    config.thresholds = thresholds;
    config.max_size = opts->max_size;
    config.seed = global.seed;
    MineOptions mine_options;
    mine_options.threads = global.threads;
    mine_options.brute_force = opts->brute_force;
    const MiningResult result = mine_corpus(corpus, config, mine_options);
    write_pairs(opts->out, result.pairs);
    ordered_json summary;
    summary["anchors"] = result.anchors_processed;
    summary["emitted"] = result.pairs.size();
    summary["dropped"] = result.anchors_dropped;
    summary["lower_bound"] = thresholds.lower_bound;
    summary["upper_bound"] = thresholds.upper_bound;
    summary["out"] = opts->out;
    emit_summary(global, summary,
                 "mined " + std::to_string(result.anchors_processed) + " anchors: " +
                     std::to_string(result.pairs.size()) + " pairs written, " +
                     std::to_string(result.anchors_dropped) + " dropped (bounds " +
                     std::to_string(thresholds.lower_bound) + " / " +
                     std::to_string(thresholds.upper_bound) + ")");
  });
}

void add_build_rag_pairs(CLI::App& app, GlobalOptions& global) {
  auto* cmd = app.add_subcommand(
      "build-rag-pairs", "Build validated training pairs from synthetic QA records");
  cmd->fallthrough();
  struct Opts {
    std::string qa, out, audit;
    double overlap_threshold = 0.6;
    std::size_t negatives = 3, positives_cap = 0;
    std::string negative_source = "questions_and_answers";
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--qa", opts->qa, "qa.jsonl")->required();
  cmd->add_option("--out", opts->out, "output pairs.jsonl")->required();
  cmd->add_option("--overlap-threshold", opts->overlap_threshold,
                  "minimum answer/context keyword overlap")
      ->capture_default_str();
  cmd->add_option("--negatives", opts->negatives, "negatives sampled per query")
      ->capture_default_str();
  cmd->add_option("--positives-cap", opts->positives_cap,
                  "cap on positives per query (0 keeps all)")
      ->capture_default_str();
  cmd->add_option("--negative-source", opts->negative_source,
                  "questions_and_answers or questions_only")
      ->capture_default_str();
  cmd->add_option("--audit", opts->audit, "write rejected items with scores to this file");

  cmd->callback([opts, &global] {
    const auto records = read_qa_records(opts->qa);
    PairAssemblyConfig assembly;
    assembly.positives_per_query = opts->positives_cap;
    assembly.negatives_per_query = opts->negatives;
    assembly.seed = global.seed;
    if (opts->negative_source == "questions_and_answers")
      assembly.negative_source = NegativeSource::questions_and_answers;
    else if (opts->negative_source == "questions_only")
      assembly.negative_source = NegativeSource::questions_only;
    else
      throw std::invalid_argument("build-rag-pairs: unknown --negative-source '" +
                                  opts->negative_source + "'");
    OverlapConfig overlap;
    overlap.threshold = opts->overlap_threshold;
    const RagBuildResult result = build_pairs(records, assembly, overlap);
    write_pairs(opts->out, result.pairs);
    if (!opts->audit.empty()) {
      std::ofstream audit(opts->audit, std::ios::trunc);
      if (!audit) throw IoError("cannot write " + opts->audit);
      for (const auto& rej : result.rejected) {
        ordered_json j;
        j["record_index"] = rej.record_index;
        j["question"] = rej.item.question;
        j["answer"] = rej.item.answer;
        j["overlap"] = rej.overlap;
        audit << j.dump() << '\n';
      }
    }
    ordered_json summary;
    summary["records"] = records.size();
    summary["pairs"] = result.pairs.size();
    summary["records_skipped"] = result.records_skipped;
    summary["items_rejected"] = result.rejected.size();
    summary["out"] = opts->out;
    emit_summary(global, summary,
                 "built " + std::to_string(result.pairs.size()) + " pairs from " +
                     std::to_string(records.size()) + " records (" +
                     std::to_string(result.records_skipped) + " skipped, " +
                     std::to_string(result.rejected.size()) + " items rejected)");
  });
}

void add_blend(CLI::App& app, GlobalOptions& global) {
  auto* cmd = app.add_subcommand(
      "blend", "Mix mined pairs into a synthetic pair dataset at a fixed fraction");
  cmd->fallthrough();
  struct Opts {
    std::string synthetic, mined, out;
    double fraction = 0.3;
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--synthetic", opts->synthetic, "synthetic pairs.jsonl")->required();
  cmd->add_option("--mined", opts->mined, "mined pairs.jsonl")->required();
  cmd->add_option("--fraction", opts->fraction, "fraction of output drawn from mined")
      ->capture_default_str();
  cmd->add_option("--out", opts->out, "output pairs.jsonl")->required();

  cmd->callback([opts, &global] {
    const auto synthetic = read_pairs(opts->synthetic);
    const auto mined = read_pairs(opts->mined);
    const auto blended = blend_datasets(synthetic, mined, opts->fraction, global.seed);
    write_pairs(opts->out, blended);
    const auto mined_used = static_cast<std::size_t>(
        std::llround(opts->fraction * static_cast<double>(synthetic.size())));
    ordered_json summary;
    summary["synthetic"] = synthetic.size();
    summary["mined_available"] = mined.size();
    summary["mined_used"] = mined_used;
    summary["out_records"] = blended.size();
    summary["out"] = opts->out;
    emit_summary(global, summary,
                 "blended " + std::to_string(mined_used) + " mined + " +
                     std::to_string(blended.size() - mined_used) + " synthetic pairs into " +
                     opts->out);
  });
}

ContrastiveParams make_params(double alpha, const std::string& mode, double lr,
                              std::size_t epochs) {
  ContrastiveParams params;
  params.alpha = alpha;
  params.mode = parse_score_mode(mode);
  params.learning_rate = lr;
  params.epochs = epochs;
  validate_params(params);
  return params;
}

void add_score_pairs(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "score-pairs", "Per-pair contrastive scores for a pair dataset over a corpus");
  cmd->fallthrough();
  struct Opts {
    std::string pairs, corpus, head;
    double alpha = 0.5;
    std::string mode = "cosine";
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--pairs", opts->pairs, "pairs.jsonl")->required();
  cmd->add_option("--corpus", opts->corpus, "corpus.jsonl providing the embeddings")
      ->required();
  cmd->add_option("--alpha", opts->alpha, "margin")->capture_default_str();
  cmd->add_option("--mode", opts->mode, "cosine or euclidean")->capture_default_str();
  cmd->add_option("--head", opts->head, "optional head.json applied before scoring");

  cmd->callback([opts] {
    const auto pairs = read_pairs(opts->pairs);
    const Corpus corpus = read_embedding_corpus(opts->corpus);
    auto vector_pairs = pairs_to_vector_pairs(pairs, corpus);
    if (vector_pairs.empty())
      throw std::invalid_argument("score-pairs: no pairs to score");
    if (!opts->head.empty()) {
      const ProjectionHead head = load_head(opts->head);
      for (auto& vp : vector_pairs) {
        vp.a = head.project(vp.a);
        vp.b = head.project(vp.b);
      }
    }
    const auto params = make_params(opts->alpha, opts->mode, 0.0, 0);
    const auto scores = score_pairs(vector_pairs, params);
    double mean_loss = 0.0;
    for (const auto& s : scores) {
      ordered_json j;
      j["y"] = s.y;
      j["d"] = s.d;
      j["loss"] = s.loss;
      std::cout << j.dump() << '\n';
      mean_loss += s.loss;
    }
    mean_loss /= static_cast<double>(scores.size());
    ordered_json summary;
    summary["pairs"] = scores.size();
    summary["mean_loss"] = mean_loss;
    std::cout << summary.dump() << '\n';
  });
}

void add_train_toy(CLI::App& app, GlobalOptions& global) {
  auto* cmd = app.add_subcommand(
      "train-toy", "Train a linear projection head on a pair dataset (desk scale)");
  cmd->fallthrough();
  struct Opts {
    std::string pairs, corpus, out;
    double alpha = 0.5, lr = 0.05;
    std::size_t epochs = 200, head_dim = 0;
    std::string mode = "cosine";
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--pairs", opts->pairs, "pairs.jsonl")->required();
  cmd->add_option("--corpus", opts->corpus, "corpus.jsonl providing the embeddings")
      ->required();
  cmd->add_option("--alpha", opts->alpha, "margin")->capture_default_str();
  cmd->add_option("--mode", opts->mode, "cosine or euclidean")->capture_default_str();
  cmd->add_option("--lr", opts->lr, "learning rate")->capture_default_str();
  cmd->add_option("--epochs", opts->epochs, "full-batch epochs")->capture_default_str();
  cmd->add_option("--head-dim", opts->head_dim, "projection output dim (0 = input dim)")
      ->capture_default_str();
  cmd->add_option("--out", opts->out, "output head.json")->required();

  cmd->callback([opts, &global] {
    const auto pairs = read_pairs(opts->pairs);
    const Corpus corpus = read_embedding_corpus(opts->corpus);
    const auto vector_pairs = pairs_to_vector_pairs(pairs, corpus);
    const auto params = make_params(opts->alpha, opts->mode, opts->lr, opts->epochs);
    const TrainResult result = train_head(vector_pairs, params, global.seed, opts->head_dim);
    save_head(opts->out, result.head);
    ordered_json summary;
    summary["pairs"] = vector_pairs.size();
    summary["epochs"] = opts->epochs;
    summary["initial_loss"] = result.loss_trace.front();
    summary["final_loss"] = result.loss_trace.back();
    summary["out"] = opts->out;
    emit_summary(global, summary,
                 "trained head on " + std::to_string(vector_pairs.size()) + " pairs: loss " +
                     std::to_string(result.loss_trace.front()) + " -> " +
                     std::to_string(result.loss_trace.back()) + ", wrote " + opts->out);
  });
}

void add_eval_recall(CLI::App& app, GlobalOptions& global) {
  auto* cmd = app.add_subcommand(
      "eval-recall", "recall@k report for a query set against a document corpus");
  cmd->fallthrough();
  struct Opts {
    std::string queries, query_corpus, doc_corpus, out, dump_ranks, head, name;
    std::vector<std::size_t> k_values{1, 3, 5, 10};
    std::string mode = "cosine";
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--queries", opts->queries, "eval.jsonl")->required();
  cmd->add_option("--query-corpus", opts->query_corpus, "corpus.jsonl of query embeddings")
      ->required();
  cmd->add_option("--doc-corpus", opts->doc_corpus, "corpus.jsonl of document embeddings")
      ->required();
  cmd->add_option("--k", opts->k_values, "comma-separated k values")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--mode", opts->mode, "cosine or euclidean")->capture_default_str();
  cmd->add_option("--out", opts->out, "output report.json")->required();
  cmd->add_option("--dump-ranks", opts->dump_ranks,
                  "write per-query {query_id, rank_of_relevant} lines to this file");
  cmd->add_option("--head", opts->head, "optional head.json applied to both sides");
  cmd->add_option("--name", opts->name, "dataset name for the report");

  cmd->callback([opts, &global] {
    EvalOptions options;
    options.k_values = opts->k_values;
    options.mode = parse_score_mode(opts->mode);
    options.dataset_name = opts->name;
    options.threads = global.threads;
    ProjectionHead head;
    if (!opts->head.empty()) {
      head = load_head(opts->head);
      options.head = &head;
    }
    const EvalOutcome outcome =
        evaluate_from_files(opts->queries, opts->query_corpus, opts->doc_corpus, options);
    write_report(opts->out, outcome.report);
    if (!opts->dump_ranks.empty()) write_ranks(opts->dump_ranks, outcome.ranks);
    ordered_json summary;
    summary["query_count"] = outcome.report.query_count;
    auto recall = ordered_json::object();
    std::string text = "recall:";
    for (const auto& [k, v] : outcome.report.recall_at) {
      recall[std::to_string(k)] = std::round(v * 100.0) / 100.0;
      char formatted[32];
      std::snprintf(formatted, sizeof formatted, "%.2f", v);
      text += " @" + std::to_string(k) + "=" + formatted;
    }
    summary["recall_at"] = std::move(recall);
    summary["out"] = opts->out;
    emit_summary(global, summary, text + "  (" + std::to_string(outcome.report.query_count) +
                                      " queries, report " + opts->out + ")");
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Embedding-pair toolkit: hard mining, RAG pair building, contrastive "
      "scoring and recall@k evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "seed threaded through every stochastic step")
      ->capture_default_str();
  app.add_option("--threads", global.threads, "worker threads for parallel stages")
      ->capture_default_str();
  app.add_flag("--json", global.json, "machine-readable summaries on stdout");
  app.add_flag("--quiet", global.quiet, "suppress text summaries");

  add_embed(app, global);
  add_stats(app, global);
  add_mine(app, global);
  add_build_rag_pairs(app, global);
  add_blend(app, global);
  add_score_pairs(app);
  add_train_toy(app, global);
  add_eval_recall(app, global);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const pairforge::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
