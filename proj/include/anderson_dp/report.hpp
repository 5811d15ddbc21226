#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "anderson_dp/experiment.hpp"

namespace anderson_dp {

// CSV writers. Reals use 17 significant digits, lines end in LF, and rows are
// written in the canonical order of each type (see experiment.hpp).

/// Columns: mdp_seed,algorithm,m,iteration,norm_error,greedy_error
std::string records_csv(std::vector<ExperimentRecord> records);
/// Columns: algorithm,m,iteration,metric,mean,std
std::string aggregates_csv(const std::vector<AggregateRow>& rows);
/// Columns: mdp_seed,algorithm,m,iteration,message
std::string failures_csv(const std::vector<FailedRun>& failures);

/// Parses a file produced by records_csv.
std::vector<ExperimentRecord> parse_records_csv(const std::string& text);

/// Writes `contents` to `path` in binary mode; throws std::runtime_error naming the path.
void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(const std::string& bytes);

}  // namespace anderson_dp
