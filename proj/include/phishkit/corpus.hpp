#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace phishkit::corpus {

struct EmailRecord {
    std::string id;
    std::string text;
    int label = 0; // 1 = phishing, 0 = benign
};

// URL row as read from disk; the type column is still a raw string.
struct RawUrlRecord {
    std::string url;
    std::string type;
};

struct UrlRecord {
    std::string url;
    int label = 0; // 1 = malicious, 0 = benign
};

struct PrepConfig {
    std::size_t min_text_len = 20;       // characters (Unicode scalar values)
    std::size_t min_url_len = 10;
    std::size_t email_target_size = 7500;
    std::size_t url_target_size = 20000;
    std::uint64_t seed = 42;
    bool balance = true;
    bool require_dot_in_url = false;     // optional syntactic-validity filter
};

struct DatasetSplit {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

// CSV contract: UTF-8, header "text,label", label in {0,1}. Malformed rows
// are reported with the line they start on.
std::vector<EmailRecord> load_email_csv(const std::string& path);

// CSV contract: UTF-8, header "url,type", type validated later by
// preprocess_urls so the raw record keeps the string.
std::vector<RawUrlRecord> load_url_csv(const std::string& path);

// Fixed pipeline: drop null/empty, lowercase, dedup (first kept), drop short,
// then (when balance is on) a seeded stratified subsample to
// email_target_size with equal class halves. Survivors keep input order.
std::vector<EmailRecord> preprocess_emails(std::span<const EmailRecord> records,
                                           const PrepConfig& config,
                                           std::vector<std::string>* warnings = nullptr);

// Label mapping benign->0, {phishing, malware, defacement}->1, then lowercase,
// dedup, length filter, and a seeded subsample to url_target_size preserving
// the post-filter class ratio. Unknown type strings are a hard error.
std::vector<UrlRecord> preprocess_urls(std::span<const RawUrlRecord> records,
                                       const PrepConfig& config,
                                       std::vector<std::string>* warnings = nullptr);

// Seeded uniform shuffle of 0..n-1; |train| = floor(ratio * n). Indices stay
// in shuffle order.
DatasetSplit split(std::size_t n, double ratio, std::uint64_t seed);

void write_email_csv(const std::string& path, std::span<const EmailRecord> records);
void write_url_csv(const std::string& path, std::span<const UrlRecord> records);

} // namespace phishkit::corpus
