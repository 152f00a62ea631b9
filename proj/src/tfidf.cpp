#include "phishkit/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "phishkit/errors.hpp"
#include "phishkit/utf8.hpp"

namespace phishkit::tfidf {

using nlohmann::json;

namespace {
constexpr int kFormatVersion = 1;
}

const char* norm_name(Norm n) {
    return n == Norm::l2 ? "l2" : "none";
}

Norm norm_from_name(const std::string& name) {
    if (name == "l2") return Norm::l2;
    if (name == "none") return Norm::none;
    throw DataError("tfidf: unknown norm: " + name);
}

std::unordered_map<std::string, std::uint32_t>
extract_char_ngrams(const std::string& s, int n_min, int n_max) {
    if (n_min < 1 || n_min > n_max) {
        throw std::invalid_argument("extract_char_ngrams: need 1 <= n_min <= n_max");
    }
    std::unordered_map<std::string, std::uint32_t> counts;
    const std::vector<char32_t> cps = utf8::decode(s);
    const int len = static_cast<int>(cps.size());
    std::string gram;
    for (int n = n_min; n <= n_max; ++n) {
        for (int i = 0; i + n <= len; ++i) {
            gram.clear();
            for (int k = 0; k < n; ++k) utf8::append(gram, cps[i + k]);
            ++counts[gram];
        }
    }
    return counts;
}

TfidfModel fit(std::span<const std::string> corpus, int n_min, int n_max,
               Norm norm, std::uint32_t min_df) {
    if (corpus.empty()) {
        throw std::invalid_argument("tfidf::fit: empty corpus");
    }
    std::unordered_map<std::string, std::uint64_t> df;
    for (const std::string& doc : corpus) {
        for (const auto& [gram, count] : extract_char_ngrams(doc, n_min, n_max)) {
            (void)count; // df counts documents, not occurrences
            ++df[gram];
        }
    }

    TfidfModel model;
    model.n_min = n_min;
    model.n_max = n_max;
    model.norm = norm;
    model.fitted_doc_count = corpus.size();

    auto& vocab = model.vocabulary;
    vocab.grams.reserve(df.size());
    for (const auto& [gram, count] : df) {
        if (count >= min_df) vocab.grams.push_back(gram);
    }
    std::sort(vocab.grams.begin(), vocab.grams.end());

    const double n_docs = static_cast<double>(corpus.size());
    vocab.document_frequency.resize(vocab.grams.size());
    model.idf.resize(vocab.grams.size());
    vocab.gram_to_index.reserve(vocab.grams.size());
    for (std::uint32_t i = 0; i < vocab.grams.size(); ++i) {
        const std::uint64_t d = df[vocab.grams[i]];
        vocab.gram_to_index[vocab.grams[i]] = i;
        vocab.document_frequency[i] = d;
        model.idf[i] = std::log((1.0 + n_docs) / (1.0 + static_cast<double>(d))) + 1.0;
    }
    return model;
}

SparseVector transform(const TfidfModel& model, const std::string& s) {
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (const auto& [gram, count] : extract_char_ngrams(s, model.n_min, model.n_max)) {
        const auto it = model.vocabulary.gram_to_index.find(gram);
        if (it == model.vocabulary.gram_to_index.end()) continue;
        entries.emplace_back(it->second, static_cast<double>(count) * model.idf[it->second]);
    }
    std::sort(entries.begin(), entries.end());

    SparseVector v;
    v.indices.reserve(entries.size());
    v.values.reserve(entries.size());
    for (const auto& [idx, val] : entries) {
        v.indices.push_back(idx);
        v.values.push_back(val);
    }
    if (model.norm == Norm::l2 && !v.empty()) {
        const double n = v.norm();
        if (n > 0.0) {
            for (double& x : v.values) x /= n;
        }
    }
    return v;
}

std::string to_json_string(const TfidfModel& model) {
    json grams = json::array();
    for (std::uint32_t i = 0; i < model.vocabulary.grams.size(); ++i) {
        grams.push_back(json::array({model.vocabulary.grams[i], i,
                                     model.vocabulary.document_frequency[i],
                                     model.idf[i]}));
    }
    json j{{"format_version", kFormatVersion},
           {"model_type", "tfidf"},
           {"n_min", model.n_min},
           {"n_max", model.n_max},
           {"norm", norm_name(model.norm)},
           {"fitted_doc_count", model.fitted_doc_count},
           {"grams", std::move(grams)}};
    return j.dump();
}

TfidfModel from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("tfidf: bad model json: ") + e.what());
    }
    if (j.value("format_version", -1) != kFormatVersion) {
        throw DataError("tfidf: unsupported format_version");
    }
    TfidfModel model;
    model.n_min = j.at("n_min").get<int>();
    model.n_max = j.at("n_max").get<int>();
    model.norm = norm_from_name(j.at("norm").get<std::string>());
    model.fitted_doc_count = j.at("fitted_doc_count").get<std::uint64_t>();
    const auto& grams = j.at("grams");
    model.vocabulary.grams.resize(grams.size());
    model.vocabulary.document_frequency.resize(grams.size());
    model.idf.resize(grams.size());
    for (const auto& g : grams) {
        const auto idx = g.at(1).get<std::uint32_t>();
        if (idx >= grams.size()) throw DataError("tfidf: gram index out of range");
        model.vocabulary.grams[idx] = g.at(0).get<std::string>();
        model.vocabulary.document_frequency[idx] = g.at(2).get<std::uint64_t>();
        model.idf[idx] = g.at(3).get<double>();
    }
    for (std::uint32_t i = 0; i < model.vocabulary.grams.size(); ++i) {
        model.vocabulary.gram_to_index[model.vocabulary.grams[i]] = i;
    }
    return model;
}

void save(const TfidfModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("tfidf: cannot write " + path);
    out << to_json_string(model) << '\n';
}

TfidfModel load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("tfidf: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

} // namespace phishkit::tfidf
