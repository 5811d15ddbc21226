#include "anderson_dp/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <openssl/evp.h>

namespace anderson_dp {

std::string records_csv(std::vector<ExperimentRecord> records) {
    std::stable_sort(records.begin(), records.end(), record_order);
    std::string out = "mdp_seed,algorithm,m,iteration,norm_error,greedy_error\n";
    for (const auto& r : records) {
        out += fmt::format("{},{},{},{},{:.17g},{:.17g}\n", r.mdp_seed, algorithm_name(r.algorithm), r.m,
                           r.iteration, r.norm_error, r.greedy_error);
    }
    return out;
}

std::string aggregates_csv(const std::vector<AggregateRow>& rows) {
    std::string out = "algorithm,m,iteration,metric,mean,std\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{:.17g},{:.17g}\n", algorithm_name(r.algorithm), r.m, r.iteration,
                           metric_name(r.metric), r.mean, r.std);
    }
    return out;
}

std::string failures_csv(const std::vector<FailedRun>& failures) {
    std::string out = "mdp_seed,algorithm,m,iteration,message\n";
    for (const auto& f : failures) {
        std::string message = f.message;
        std::replace_if(message.begin(), message.end(), [](char c) { return c == ',' || c == '\n'; }, ';');
        out += fmt::format("{},{},{},{},{}\n", f.mdp_seed, algorithm_name(f.algorithm), f.m, f.iteration, message);
    }
    return out;
}

namespace {

template <typename T>
T parse_integer(const std::string& field) {
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw std::runtime_error(fmt::format("parse_records_csv: bad integer '{}'", field));
    }
    return value;
}

double parse_real(const std::string& field) {
    char* end = nullptr;
    const double value = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size()) {
        throw std::runtime_error(fmt::format("parse_records_csv: bad real '{}'", field));
    }
    return value;
}

}  // namespace

std::vector<ExperimentRecord> parse_records_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "mdp_seed,algorithm,m,iteration,norm_error,greedy_error") {
        throw std::runtime_error("parse_records_csv: missing or unexpected header");
    }
    std::vector<ExperimentRecord> records;
    std::vector<std::string> fields;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        fields.clear();
        std::istringstream row(line);
        for (std::string f; std::getline(row, f, ',');) fields.push_back(f);
        if (fields.size() != 6) throw std::runtime_error(fmt::format("parse_records_csv: bad row '{}'", line));
        const auto algorithm = parse_algorithm(fields[1]);
        if (!algorithm) throw std::runtime_error(fmt::format("parse_records_csv: unknown algorithm '{}'", fields[1]));
        records.push_back({parse_integer<std::uint64_t>(fields[0]), *algorithm,
                           parse_integer<std::size_t>(fields[2]), parse_integer<std::size_t>(fields[3]),
                           parse_real(fields[4]), parse_real(fields[5])});
    }
    return records;
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot open '{}' for reading", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256_hex: digest failed");
    }
    std::string hex;
    for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

}  // namespace anderson_dp
