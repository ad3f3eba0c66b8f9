#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "alstop/errors.hpp"

namespace alstop {

inline constexpr int kDefaultMinCount = 4;

// Term -> dense feature index map fitted on the training split only.
// Indices are assigned in lexicographic term order; every retained term
// occurs at least min_count times in the training split and is not a
// stopword.
class Vocabulary {
 public:
  Vocabulary() = default;

  // terms must already be deduplicated, lexicographically sorted and
  // filtered; counts are parallel to terms.
  Vocabulary(std::vector<std::string> terms, std::vector<std::int64_t> counts,
             int min_count);

  int size() const { return static_cast<int>(terms_.size()); }
  const std::string& term(int index) const { return terms_[index]; }
  std::int64_t count(int index) const { return counts_[index]; }
  int min_count() const { return min_count_; }

  std::optional<int> index_of(std::string_view term) const;

  bool operator==(const Vocabulary& other) const {
    return terms_ == other.terms_ && counts_ == other.counts_ &&
           min_count_ == other.min_count_;
  }

 private:
  std::vector<std::string> terms_;       // feature index -> term
  std::vector<std::int64_t> counts_;     // training-split occurrence counts
  std::unordered_map<std::string, int> index_;
  int min_count_ = kDefaultMinCount;
};

// Binary bag-of-words document: feature presence only, no counts.
struct SparseDoc {
  int doc_id = 0;
  std::vector<int> features;  // strictly increasing, each < vocabulary size
  int label = 0;              // class id in [0, num_classes)

  bool operator==(const SparseDoc&) const = default;
};

enum class Split { kTrain, kTest };

struct Corpus {
  std::vector<SparseDoc> docs;
  Vocabulary vocabulary;
  std::vector<std::string> class_names;
  Split split = Split::kTrain;

  int num_classes() const { return static_cast<int>(class_names.size()); }
};

// Train and test corpora sharing one vocabulary (fitted on train).
struct DataSplit {
  Corpus train;
  Corpus test;
};

// Maximal runs of ASCII letters, lowercased; everything else separates.
std::vector<std::string> tokenize(std::string_view text);

using StopwordSet = std::unordered_set<std::string>;

// One lowercase word per line; blank lines and '#' comment lines skipped.
StopwordSet load_stopwords(const std::filesystem::path& file);
StopwordSet parse_stopwords(std::string_view text);

// Retains exactly the non-stopword terms whose total occurrence count over
// train_docs is >= min_count. Throws EmptyVocabulary if nothing survives.
Vocabulary build_vocabulary(
    const std::vector<std::vector<std::string>>& train_docs,
    const StopwordSet& stopwords, int min_count = kDefaultMinCount);

// Sorted set of feature indices for the in-vocabulary tokens; duplicates
// collapse, out-of-vocabulary tokens are dropped.
std::vector<int> vectorize(const std::vector<std::string>& tokens,
                           const Vocabulary& vocab);

// Reads a <root>/{train,test}/<category>/<file> tree. One class per
// category directory; doc ids follow sorted path order within each split.
DataSplit load_newsgroups(const std::filesystem::path& root,
                          const StopwordSet& stopwords,
                          int min_count = kDefaultMinCount);

struct SynthParams {
  int classes = 2;
  int vocab_size = 500;
  int docs = 2000;       // total across both splits
  int doc_length = 40;   // tokens per document
  double skew = 0.5;     // probability a token comes from the class's own word block
  std::uint64_t seed = 1;
};

// Class-conditional categorical documents; skew 1 gives disjoint class
// vocabularies (linearly separable), skew 0 removes the class signal.
// Deterministic per seed; 80/20 train/test split stratified by class.
DataSplit generate_synthetic(const SynthParams& params);

// Versioned line-delimited cache format holding the vocabulary and both
// splits. See README for the exact grammar.
std::string serialize_corpus(const DataSplit& data);
DataSplit parse_corpus(std::string_view text);
void save_corpus(const DataSplit& data, const std::filesystem::path& file);
DataSplit load_corpus_file(const std::filesystem::path& file);

// FNV-1a over the serialized form; identifies the dataset in curve headers.
std::string corpus_fingerprint(const DataSplit& data);

// Relabels docs for a one-vs-rest run: class `category` becomes 1, the rest
// 0. Vocabulary and doc ids are unchanged.
DataSplit to_binary_task(const DataSplit& data, int category);

}  // namespace alstop
