#include "phishkit/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "phishkit/csv.hpp"
#include "phishkit/errors.hpp"
#include "phishkit/rng.hpp"
#include "phishkit/utf8.hpp"

namespace phishkit::corpus {

namespace {

bool is_blank_record(const csv::Record& rec) {
    return rec.fields.size() == 1 && rec.fields[0].empty();
}

void check_header(const csv::Record& header, const std::string& first,
                  const std::string& second, const std::string& what) {
    if (header.fields.size() != 2 || header.fields[0] != first ||
        header.fields[1] != second) {
        throw DataError(what + ": expected header '" + first + "," + second + "'");
    }
}

// Picks k1 of n1 positives and k0 of n0 negatives with independent seeded
// streams, then restores input order. `positions` maps class member -> index
// into the original sequence.
std::vector<std::size_t> stratified_pick(const std::vector<std::size_t>& class0,
                                         const std::vector<std::size_t>& class1,
                                         std::size_t k0, std::size_t k1,
                                         std::uint64_t seed) {
    std::vector<std::size_t> picked;
    picked.reserve(k0 + k1);
    Rng rng0(mix_seed(seed, 0));
    for (std::size_t pos : rng0.sample_without_replacement(class0.size(), k0)) {
        picked.push_back(class0[pos]);
    }
    Rng rng1(mix_seed(seed, 1));
    for (std::size_t pos : rng1.sample_without_replacement(class1.size(), k1)) {
        picked.push_back(class1[pos]);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

} // namespace

std::vector<EmailRecord> load_email_csv(const std::string& path) {
    const auto records = csv::read_file(path);
    if (records.empty()) {
        throw DataError("emails: " + path + ": missing header row");
    }
    check_header(records[0], "text", "label", "emails: " + path);
    std::vector<EmailRecord> out;
    out.reserve(records.size() - 1);
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (is_blank_record(rec)) continue;
        if (rec.fields.size() != 2) {
            throw DataError("emails: " + path + ": line " + std::to_string(rec.line) +
                            ": expected 2 columns, got " + std::to_string(rec.fields.size()));
        }
        const std::string& label = rec.fields[1];
        if (label != "0" && label != "1") {
            throw DataError("emails: " + path + ": line " + std::to_string(rec.line) +
                            ": label must be 0 or 1, got '" + label + "'");
        }
        out.push_back({std::to_string(rec.line), rec.fields[0], label == "1" ? 1 : 0});
    }
    return out;
}

std::vector<RawUrlRecord> load_url_csv(const std::string& path) {
    const auto records = csv::read_file(path);
    if (records.empty()) {
        throw DataError("urls: " + path + ": missing header row");
    }
    check_header(records[0], "url", "type", "urls: " + path);
    std::vector<RawUrlRecord> out;
    out.reserve(records.size() - 1);
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (is_blank_record(rec)) continue;
        if (rec.fields.size() != 2) {
            throw DataError("urls: " + path + ": line " + std::to_string(rec.line) +
                            ": expected 2 columns, got " + std::to_string(rec.fields.size()));
        }
        out.push_back({rec.fields[0], rec.fields[1]});
    }
    return out;
}

std::vector<EmailRecord> preprocess_emails(std::span<const EmailRecord> records,
                                           const PrepConfig& config,
                                           std::vector<std::string>* warnings) {
    if (config.email_target_size == 0) {
        throw std::invalid_argument("preprocess_emails: target size must be > 0");
    }
    // Pipeline order is fixed: null -> lowercase -> dedup -> length -> subsample.
    std::vector<EmailRecord> kept;
    kept.reserve(records.size());
    std::unordered_set<std::string> seen;
    for (const EmailRecord& rec : records) {
        if (rec.text.empty()) continue;
        EmailRecord r{rec.id, utf8::lowercase_ascii(rec.text), rec.label};
        if (!seen.insert(r.text).second) continue;
        if (utf8::length(r.text) < config.min_text_len) continue;
        kept.push_back(std::move(r));
    }
    if (!config.balance) return kept;

    std::vector<std::size_t> class0, class1;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        (kept[i].label == 1 ? class1 : class0).push_back(i);
    }
    // Equal class halves; benign absorbs the odd slot.
    const std::size_t target = std::min(config.email_target_size, kept.size());
    std::size_t k1 = target / 2;
    std::size_t k0 = target - k1;
    if (class1.size() < k1) {
        k1 = class1.size();
        k0 = std::min(target - k1, class0.size());
        if (warnings) {
            warnings->push_back("balance: phishing class has only " +
                                std::to_string(class1.size()) + " records, filling from benign");
        }
    } else if (class0.size() < k0) {
        k0 = class0.size();
        k1 = std::min(target - k0, class1.size());
        if (warnings) {
            warnings->push_back("balance: benign class has only " +
                                std::to_string(class0.size()) + " records, filling from phishing");
        }
    }
    std::vector<EmailRecord> out;
    out.reserve(k0 + k1);
    for (std::size_t idx : stratified_pick(class0, class1, k0, k1, config.seed)) {
        out.push_back(kept[idx]);
    }
    return out;
}

std::vector<UrlRecord> preprocess_urls(std::span<const RawUrlRecord> records,
                                       const PrepConfig& config,
                                       std::vector<std::string>* warnings) {
    (void)warnings;
    if (config.url_target_size == 0) {
        throw std::invalid_argument("preprocess_urls: target size must be > 0");
    }
    if (config.min_url_len < 1) {
        throw std::invalid_argument("preprocess_urls: min_url_len must be >= 1");
    }
    std::vector<UrlRecord> kept;
    kept.reserve(records.size());
    std::unordered_set<std::string> seen;
    for (const RawUrlRecord& rec : records) {
        int label;
        if (rec.type == "benign") {
            label = 0;
        } else if (rec.type == "phishing" || rec.type == "malware" ||
                   rec.type == "defacement") {
            label = 1;
        } else {
            throw DataError("urls: unknown type '" + rec.type + "' for url '" +
                            rec.url + "'");
        }
        std::string url = utf8::lowercase_ascii(rec.url);
        if (url.empty()) continue;
        if (!seen.insert(url).second) continue;
        if (utf8::length(url) < config.min_url_len) continue;
        if (config.require_dot_in_url && url.find('.') == std::string::npos) continue;
        kept.push_back({std::move(url), label});
    }
    if (kept.size() <= config.url_target_size) return kept;

    std::vector<std::size_t> class0, class1;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        (kept[i].label == 1 ? class1 : class0).push_back(i);
    }
    // Preserve the post-filter class ratio, rounding to the nearest count.
    const std::size_t target = config.url_target_size;
    const double ratio1 = static_cast<double>(class1.size()) / static_cast<double>(kept.size());
    auto k1 = static_cast<std::size_t>(std::llround(ratio1 * static_cast<double>(target)));
    k1 = std::min(k1, class1.size());
    k1 = std::max(k1, target - std::min(target, class0.size()));
    const std::size_t k0 = target - k1;

    std::vector<UrlRecord> out;
    out.reserve(target);
    for (std::size_t idx : stratified_pick(class0, class1, k0, k1, config.seed)) {
        out.push_back(kept[idx]);
    }
    return out;
}

DatasetSplit split(std::size_t n, double ratio, std::uint64_t seed) {
    if (n < 2) {
        throw std::invalid_argument("split: need at least 2 records");
    }
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw std::invalid_argument("split: ratio must be in (0,1)");
    }
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Rng rng(seed);
    rng.shuffle(idx);
    const auto n_train = static_cast<std::size_t>(
        std::floor(ratio * static_cast<double>(n)));
    DatasetSplit s;
    s.train_indices.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test_indices.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    return s;
}

void write_email_csv(const std::string& path, std::span<const EmailRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("emails: cannot write " + path);
    out << "text,label\n";
    for (const EmailRecord& rec : records) {
        out << csv::format_row({rec.text, std::to_string(rec.label)});
    }
}

void write_url_csv(const std::string& path, std::span<const UrlRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("urls: cannot write " + path);
    out << "url,label\n";
    for (const UrlRecord& rec : records) {
        out << csv::format_row({rec.url, std::to_string(rec.label)});
    }
}

} // namespace phishkit::corpus
