#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "phishkit/sparse.hpp"

namespace phishkit::tfidf {

enum class Norm { l2, none };

const char* norm_name(Norm n);
Norm norm_from_name(const std::string& name);

// Character n-gram vocabulary. Column indices follow the lexicographic order
// of the grams, assigned at fit time, so the fitted model is independent of
// corpus order.
struct Vocabulary {
    std::vector<std::string> grams;                         // sorted; index = position
    std::unordered_map<std::string, std::uint32_t> gram_to_index;
    std::vector<std::uint64_t> document_frequency;

    std::size_t size() const { return grams.size(); }
};

struct TfidfModel {
    Vocabulary vocabulary;
    std::vector<double> idf;
    int n_min = 2;
    int n_max = 6;
    Norm norm = Norm::l2;
    std::uint64_t fitted_doc_count = 0;
};

// All contiguous substrings of length n_min..n_max with multiplicity, counted
// over Unicode scalar values. No boundary padding.
std::unordered_map<std::string, std::uint32_t>
extract_char_ngrams(const std::string& s, int n_min, int n_max);

// Smoothed IDF: ln((1+N)/(1+df)) + 1. Grams kept when df >= min_df.
TfidfModel fit(std::span<const std::string> corpus, int n_min, int n_max,
               Norm norm = Norm::l2, std::uint32_t min_df = 1);

// Raw term frequency times IDF per in-vocabulary gram, then L2 normalization
// when the model says so. Out-of-vocabulary grams are ignored.
SparseVector transform(const TfidfModel& model, const std::string& s);

std::string to_json_string(const TfidfModel& model);
TfidfModel from_json_string(const std::string& text);
void save(const TfidfModel& model, const std::string& path);
TfidfModel load(const std::string& path);

} // namespace phishkit::tfidf
