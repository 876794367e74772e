#include "bq/cli.hpp"

#include <CLI11.hpp>

#include <memory>
#include <optional>

#include "bq/errors.hpp"
#include "bq/eval.hpp"
#include "bq/index.hpp"
#include "bq/io.hpp"
#include "bq/quantizer.hpp"

namespace bq {

namespace {

constexpr std::uint64_t kSplitStream = 0x73706C74;  // "splt"

struct FitFlags {
  std::string method = "atq";
  std::string preprocess = "center";
  int bits = 16;
  std::uint64_t seed = 0;
  CgParams cg;
  std::optional<double> bandwidth;
  int restarts = 1;
  int itq_iters = 50;

  FitOptions options() const {
    FitOptions o;
    o.preprocess = parse_preprocess(preprocess);
    o.cg = cg;
    o.cg.validate();
    o.bandwidth = bandwidth;
    o.restarts = restarts;
    o.itq_iters = itq_iters;
    return o;
  }
};

void add_fit_flags(CLI::App* cmd, FitFlags& f) {
  cmd->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  cmd->add_option("--preprocess", f.preprocess, "none | center | zscore")->capture_default_str();
  cmd->add_option("--lambda", f.cg.lambda, "Armijo constant")->capture_default_str();
  cmd->add_option("--epsilon", f.cg.epsilon, "Stopping-rule constant")->capture_default_str();
  cmd->add_option("--alpha0", f.cg.alpha0, "Initial step size")->capture_default_str();
  cmd->add_option("--beta", f.cg.beta, "Backtracking factor")->capture_default_str();
  cmd->add_option("--max-iters", f.cg.max_iters, "CG iteration cap")->capture_default_str();
  cmd->add_option("--max-backtracks", f.cg.max_backtracks, "Line-search cap")->capture_default_str();
  cmd->add_option("--bandwidth", f.bandwidth, "Gaussian scale for cq/atq (default: 1/median distance)");
  cmd->add_option("--restarts", f.restarts, "ATQ random restarts")->capture_default_str();
  cmd->add_option("--itq-iters", f.itq_iters, "ITQ iterations")->capture_default_str();
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& n : names) out.push_back(parse_method(n));
  return out;
}

void cmd_fit(const FitFlags& f, const std::string& input, const std::string& output, std::ostream& out) {
  const FeatureMatrix x = load_dataset(input);
  const Method method = parse_method(f.method);
  const FitResult fit = fit_quantizer(method, x, f.bits, f.seed, f.options());
  save_model(output, fit.model);
  out << "method=" << to_string(method) << " bits=" << f.bits << " d=" << x.dims()
      << " n=" << x.samples() << " seed=" << f.seed << '\n';
  if (fit.trace) {
    out << "iterations=" << fit.trace->iterations << " initial_objective=" << fit.initial_objective
        << " final_objective=" << fit.final_objective << " stop=" << to_string(fit.trace->stop) << '\n';
  }
}

void cmd_encode(const std::string& model_path, const std::string& input, const std::string& output,
                std::ostream& out) {
  const QuantizerModel model = load_model(model_path);
  const FeatureMatrix x = load_dataset(input);
  if (x.dims() != model.dims()) {
    throw InvalidInput("feature dimension mismatch: data d = " + std::to_string(x.dims()) +
                       ", model d = " + std::to_string(model.dims()));
  }
  const BinaryCodeSet codes = model.encode(x);
  save_codes(output, codes);
  out << "encoded " << codes.size() << " samples to " << codes.bits() << "-bit codes\n";
}

void cmd_query(const std::string& db_path, const std::string& query_path, std::int64_t k,
               std::ostream& out) {
  const BinaryCodeSet db = load_codes(db_path);
  const BinaryCodeSet queries = load_codes(query_path);
  if (db.bits() != queries.bits()) {
    throw InvalidInput("code length mismatch: database r = " + std::to_string(db.bits()) +
                       ", queries r = " + std::to_string(queries.bits()));
  }
  if (k < 1 || k > db.size()) {
    throw InvalidInput("k = " + std::to_string(k) + " must lie in [1, " + std::to_string(db.size()) + "]");
  }
  for (std::int64_t q = 0; q < queries.size(); ++q) {
    const RankedResult res = top_k(db, queries.code(q), k, q);
    out << q << '\t';
    for (std::size_t i = 0; i < res.neighbors.size(); ++i) {
      out << (i ? " " : "") << res.neighbors[i].id << ':' << res.neighbors[i].distance;
    }
    out << '\n';
  }
}

struct BenchFlags {
  std::string input;
  std::string output = "results.csv";
  std::vector<std::string> methods{"lsh", "cq", "sh", "itq", "atq"};
  std::vector<int> bit_sweep;
  std::vector<Index> neighbor_sweep;
  Index gt_neighbors = 50;
  Index db_size = 10000;
  Index query_size = 1000;
  std::optional<Index> rank_cutoff;
  int threads = 0;
  bool timing = false;
};

void cmd_bench(const FitFlags& f, const BenchFlags& b, std::ostream& out) {
  const FeatureMatrix all = load_dataset(b.input);
  const DataSplit split = split_dataset(all.samples(), b.db_size, b.query_size, f.seed);
  const FeatureMatrix db = all.select(split.db);
  const FeatureMatrix queries = all.select(split.queries);
  const std::vector<Method> methods = parse_methods(b.methods);

  SweepOptions opts;
  opts.fit = f.options();
  opts.rank_cutoff = b.rank_cutoff;
  opts.threads = b.threads;
  opts.timing = b.timing;

  std::vector<EvalReport> reports;
  const bool neighbors_only = b.bit_sweep.empty() && !b.neighbor_sweep.empty();
  if (!neighbors_only) {
    const std::vector<int> bits = b.bit_sweep.empty() ? std::vector<int>{f.bits} : b.bit_sweep;
    auto r = sweep_bits(db, queries, methods, bits, b.gt_neighbors, f.seed, opts);
    reports.insert(reports.end(), r.begin(), r.end());
  }
  if (!b.neighbor_sweep.empty()) {
    auto r = sweep_neighbors(db, queries, methods, b.neighbor_sweep, f.bits, f.seed, opts);
    reports.insert(reports.end(), r.begin(), r.end());
  }
  write_results_csv(reports, b.output);
  for (const auto& r : reports) {
    if (!r.error.empty()) out << "cell " << r.method << " bits=" << r.bits << " k=" << r.neighbors
                              << " failed: " << r.error << '\n';
  }
  out << "wrote " << reports.size() << " rows to " << b.output << '\n';
}

}  // namespace

DataSplit split_dataset(Index n, Index db_size, Index query_size, std::uint64_t seed) {
  if (db_size < 1 || query_size < 1) throw InvalidInput("db and query sizes must be positive");
  if (db_size + query_size > n) {
    throw InvalidInput("data set has " + std::to_string(n) + " samples, need " +
                       std::to_string(db_size + query_size) + " for the db/query split");
  }
  RandomSource rng(derive_seed(seed, {kSplitStream}));
  const std::vector<Index> order = shuffled_indices(n, rng);
  DataSplit s;
  s.db.assign(order.begin(), order.begin() + db_size);
  s.queries.assign(order.begin() + db_size, order.begin() + db_size + query_size);
  return s;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Binary quantization toolkit: fit, encode, query and benchmark hashing methods"};
  app.require_subcommand(1);

  FitFlags fit_flags;
  std::string input, output, model_path, db_path, query_path;
  std::int64_t k = 10;
  BenchFlags bench;

  auto* fit = app.add_subcommand("fit", "Fit a quantizer on a feature file and save the model");
  fit->add_option("--method", fit_flags.method, "lsh | cq | sh | itq | atq")->capture_default_str();
  fit->add_option("--bits", fit_flags.bits, "Code length")->capture_default_str();
  fit->add_option("--input", input, "Feature file (BQF1, CSV or IDX images)")->required();
  fit->add_option("--out", output, "Model file to write")->required();
  add_fit_flags(fit, fit_flags);

  auto* encode = app.add_subcommand("encode", "Encode a feature file with a saved model");
  encode->add_option("--model", model_path, "Model file")->required();
  encode->add_option("--input", input, "Feature file")->required();
  encode->add_option("--out", output, "Code file to write")->required();

  auto* query = app.add_subcommand("query", "Rank database codes by Hamming distance per query");
  query->add_option("--db", db_path, "Database code file")->required();
  query->add_option("--queries", query_path, "Query code file")->required();
  query->add_option("-k,--k", k, "Neighbors per query")->capture_default_str();

  auto* benchcmd = app.add_subcommand("bench", "Run the mAP sweeps and write a results CSV");
  benchcmd->add_option("--input", bench.input, "Data set (IDX images, BQF1 or CSV)")->required();
  benchcmd->add_option("--out", bench.output, "Results CSV")->capture_default_str();
  benchcmd->add_option("--methods", bench.methods, "Comma-separated methods")->delimiter(',');
  benchcmd->add_option("--bit-sweep", bench.bit_sweep, "Code lengths for the bit sweep")->delimiter(',');
  benchcmd->add_option("--neighbor-sweep", bench.neighbor_sweep, "Neighbor counts for the neighbor sweep")->delimiter(',');
  benchcmd->add_option("--bits", fit_flags.bits, "Code length when not sweeping bits")->capture_default_str();
  benchcmd->add_option("--gt-neighbors", bench.gt_neighbors, "Euclidean neighbors counted relevant")->capture_default_str();
  benchcmd->add_option("--db-size", bench.db_size, "Database samples")->capture_default_str();
  benchcmd->add_option("--query-size", bench.query_size, "Query samples")->capture_default_str();
  benchcmd->add_option("--rank-cutoff", bench.rank_cutoff, "Truncate AP at this ranking depth");
  benchcmd->add_option("--threads", bench.threads, "Worker threads (0 = all cores)")->capture_default_str();
  benchcmd->add_flag("--timing", bench.timing, "Record wall-clock timings in the CSV");
  add_fit_flags(benchcmd, fit_flags);

  std::vector<std::string> argv_store{"bqtool"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*fit) cmd_fit(fit_flags, input, output, out);
    else if (*encode) cmd_encode(model_path, input, output, out);
    else if (*query) cmd_query(db_path, query_path, k, out);
    else if (*benchcmd) cmd_bench(fit_flags, bench, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace bq
