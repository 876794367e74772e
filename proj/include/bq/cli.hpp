#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "bq/core.hpp"

namespace bq {

/// Runs one bqtool invocation. `args` excludes the program name.
/// Returns the process exit code: 0 on success, non-zero on any error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The bench split: a seeded shuffle of all sample ids, the first `db_size`
/// become the database and the next `query_size` the queries.
struct DataSplit {
  std::vector<Index> db;
  std::vector<Index> queries;
};
DataSplit split_dataset(Index n, Index db_size, Index query_size, std::uint64_t seed);

}  // namespace bq
