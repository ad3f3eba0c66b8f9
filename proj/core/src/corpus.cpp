#include "alstop/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "alstop/format.hpp"
#include "alstop/rng.hpp"

namespace alstop {

namespace fs = std::filesystem;

Vocabulary::Vocabulary(std::vector<std::string> terms,
                       std::vector<std::int64_t> counts, int min_count)
    : terms_(std::move(terms)), counts_(std::move(counts)),
      min_count_(min_count) {
  if (terms_.size() != counts_.size()) {
    throw InvalidParams("vocabulary terms and counts differ in length");
  }
  if (min_count_ < 1) {
    throw InvalidParams("min_count must be >= 1");
  }
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) {
      throw InvalidParams("vocabulary terms not strictly sorted: '" +
                          terms_[i] + "'");
    }
    if (counts_[i] < min_count_) {
      throw InvalidParams("vocabulary term below min_count: '" + terms_[i] +
                          "'");
    }
    index_.emplace(terms_[i], static_cast<int>(i));
  }
}

std::optional<int> Vocabulary::index_of(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char raw : text) {
    const unsigned char ch = static_cast<unsigned char>(raw);
    if (ch >= 'A' && ch <= 'Z') {
      current.push_back(static_cast<char>(ch - 'A' + 'a'));
    } else if (ch >= 'a' && ch <= 'z') {
      current.push_back(static_cast<char>(ch));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r' || s.front() == '\n')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string read_file_bytes(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure: " + file.string());
  return std::move(buf).str();
}

void write_file_bytes(const fs::path& file, std::string_view bytes) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing: " + file.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure: " + file.string());
}

}  // namespace

StopwordSet parse_stopwords(std::string_view text) {
  StopwordSet words;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    line = trim(line);
    if (!line.empty() && line.front() != '#') {
      words.emplace(line);
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return words;
}

StopwordSet load_stopwords(const fs::path& file) {
  return parse_stopwords(read_file_bytes(file));
}

Vocabulary build_vocabulary(
    const std::vector<std::vector<std::string>>& train_docs,
    const StopwordSet& stopwords, int min_count) {
  if (min_count < 1) throw InvalidParams("min_count must be >= 1");
  // std::map keeps terms in lexicographic order, which fixes the feature
  // index assignment.
  std::map<std::string, std::int64_t> counts;
  for (const auto& doc : train_docs) {
    for (const auto& token : doc) {
      if (stopwords.contains(token)) continue;
      ++counts[token];
    }
  }
  std::vector<std::string> terms;
  std::vector<std::int64_t> kept_counts;
  for (const auto& [term, count] : counts) {
    if (count >= min_count) {
      terms.push_back(term);
      kept_counts.push_back(count);
    }
  }
  if (terms.empty()) {
    throw EmptyVocabulary("no term meets min_count " +
                          std::to_string(min_count));
  }
  return Vocabulary(std::move(terms), std::move(kept_counts), min_count);
}

std::vector<int> vectorize(const std::vector<std::string>& tokens,
                           const Vocabulary& vocab) {
  if (vocab.size() == 0) throw InvalidParams("vectorize needs a nonempty vocabulary");
  std::vector<int> features;
  for (const auto& token : tokens) {
    if (const auto idx = vocab.index_of(token)) features.push_back(*idx);
  }
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()),
                 features.end());
  return features;
}

namespace {

struct RawDoc {
  std::string sort_key;  // "<category>/<filename>"
  int label = 0;
  std::vector<std::string> tokens;
};

std::vector<std::string> list_category_dirs(const fs::path& split_dir) {
  std::vector<std::string> cats;
  std::error_code ec;
  if (!fs::is_directory(split_dir, ec) || ec) return cats;
  for (const auto& entry : fs::directory_iterator(split_dir, ec)) {
    if (entry.is_directory()) {
      cats.push_back(entry.path().filename().string());
    }
  }
  if (ec) throw IoError("cannot list " + split_dir.string());
  std::sort(cats.begin(), cats.end());
  return cats;
}

std::vector<RawDoc> read_split_docs(
    const fs::path& split_dir, const std::vector<std::string>& categories,
    const std::map<std::string, int>& class_of) {
  std::vector<RawDoc> raw;
  for (const auto& cat : categories) {
    const fs::path cat_dir = split_dir / cat;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(cat_dir, ec)) {
      if (!entry.is_regular_file()) continue;
      RawDoc doc;
      doc.sort_key = cat + "/" + entry.path().filename().string();
      doc.label = class_of.at(cat);
      doc.tokens = tokenize(read_file_bytes(entry.path()));
      raw.push_back(std::move(doc));
    }
    if (ec) throw IoError("cannot list " + cat_dir.string());
  }
  std::sort(raw.begin(), raw.end(), [](const RawDoc& a, const RawDoc& b) {
    return a.sort_key < b.sort_key;
  });
  return raw;
}

Corpus assemble_corpus(const std::vector<RawDoc>& raw, const Vocabulary& vocab,
                       const std::vector<std::string>& class_names,
                       Split split) {
  Corpus corpus;
  corpus.vocabulary = vocab;
  corpus.class_names = class_names;
  corpus.split = split;
  corpus.docs.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    SparseDoc doc;
    doc.doc_id = static_cast<int>(i);
    doc.label = raw[i].label;
    doc.features = vectorize(raw[i].tokens, vocab);
    corpus.docs.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace

DataSplit load_newsgroups(const fs::path& root, const StopwordSet& stopwords,
                          int min_count) {
  std::error_code ec;
  if (!fs::exists(root, ec) || ec) {
    throw IoError("cannot access dataset root: " + root.string());
  }
  if (!fs::is_directory(root, ec)) {
    throw IoError("dataset root is not a directory: " + root.string());
  }

  const auto train_cats = list_category_dirs(root / "train");
  if (train_cats.empty()) {
    throw LayoutError("no category directories under " +
                      (root / "train").string());
  }
  const auto test_cats = list_category_dirs(root / "test");
  std::map<std::string, int> class_of;
  for (std::size_t i = 0; i < train_cats.size(); ++i) {
    class_of.emplace(train_cats[i], static_cast<int>(i));
  }
  for (const auto& cat : test_cats) {
    if (!class_of.contains(cat)) {
      throw LayoutError("test category '" + cat +
                        "' has no train counterpart");
    }
  }

  const auto train_raw = read_split_docs(root / "train", train_cats, class_of);
  const auto test_raw = read_split_docs(root / "test", test_cats, class_of);
  if (train_raw.empty()) {
    throw LayoutError("train split contains no documents under " +
                      root.string());
  }

  std::vector<std::vector<std::string>> train_tokens;
  train_tokens.reserve(train_raw.size());
  for (const auto& doc : train_raw) train_tokens.push_back(doc.tokens);
  const Vocabulary vocab =
      build_vocabulary(train_tokens, stopwords, min_count);

  DataSplit data;
  data.train = assemble_corpus(train_raw, vocab, train_cats, Split::kTrain);
  data.test = assemble_corpus(test_raw, vocab, train_cats, Split::kTest);
  return data;
}

DataSplit generate_synthetic(const SynthParams& p) {
  if (p.classes < 2) throw InvalidParams("synthetic corpus needs classes >= 2");
  if (p.vocab_size < p.classes) {
    throw InvalidParams("synthetic corpus needs vocab_size >= classes");
  }
  if (p.docs < 2 * p.classes) {
    throw InvalidParams("synthetic corpus needs docs >= 2 * classes");
  }
  if (p.doc_length < 1) throw InvalidParams("doc_length must be >= 1");
  if (p.skew < 0.0 || p.skew > 1.0) {
    throw InvalidParams("skew must be in [0, 1]");
  }

  // Zero-padded names keep lexicographic term order equal to numeric order.
  const int width = static_cast<int>(std::to_string(p.vocab_size - 1).size());
  std::vector<std::string> terms(p.vocab_size);
  for (int i = 0; i < p.vocab_size; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "w%0*d", width, i);
    terms[i] = buf;
  }

  Rng rng(p.seed);
  std::vector<RawDoc> all(p.docs);
  for (int i = 0; i < p.docs; ++i) {
    const int label = i % p.classes;
    // Each class owns a contiguous block of the vocabulary; skew is the
    // probability a token is drawn from that block instead of uniformly.
    const int block_begin =
        static_cast<int>(static_cast<std::int64_t>(label) * p.vocab_size /
                         p.classes);
    const int block_end =
        static_cast<int>(static_cast<std::int64_t>(label + 1) * p.vocab_size /
                         p.classes);
    RawDoc& doc = all[i];
    doc.label = label;
    doc.tokens.reserve(p.doc_length);
    for (int j = 0; j < p.doc_length; ++j) {
      int idx;
      if (rng.next_unit() < p.skew) {
        idx = block_begin + static_cast<int>(rng.next_below(
                                static_cast<std::uint64_t>(block_end - block_begin)));
      } else {
        idx = static_cast<int>(
            rng.next_below(static_cast<std::uint64_t>(p.vocab_size)));
      }
      doc.tokens.push_back(terms[idx]);
    }
  }

  // Stratified 80/20 split: the last fifth of each class's docs (at least
  // one) goes to the test split; generation order is kept within each split.
  std::vector<int> per_class(p.classes, 0);
  for (const auto& doc : all) ++per_class[doc.label];
  std::vector<int> test_quota(p.classes);
  for (int c = 0; c < p.classes; ++c) {
    test_quota[c] = std::max(1, per_class[c] / 5);
  }
  std::vector<int> seen(p.classes, 0);
  std::vector<RawDoc> train_raw;
  std::vector<RawDoc> test_raw;
  for (auto& doc : all) {
    const int c = doc.label;
    ++seen[c];
    if (seen[c] > per_class[c] - test_quota[c]) {
      test_raw.push_back(std::move(doc));
    } else {
      train_raw.push_back(std::move(doc));
    }
  }

  std::vector<std::vector<std::string>> train_tokens;
  train_tokens.reserve(train_raw.size());
  for (const auto& doc : train_raw) train_tokens.push_back(doc.tokens);
  const Vocabulary vocab = build_vocabulary(train_tokens, StopwordSet{}, 1);

  std::vector<std::string> class_names(p.classes);
  for (int c = 0; c < p.classes; ++c) {
    class_names[c] = "class" + std::to_string(c);
  }

  DataSplit data;
  data.train = assemble_corpus(train_raw, vocab, class_names, Split::kTrain);
  data.test = assemble_corpus(test_raw, vocab, class_names, Split::kTest);
  return data;
}

namespace {

void append_corpus_docs(std::string& out, const Corpus& corpus,
                        const char* split_name) {
  out += "split ";
  out += split_name;
  out += ' ';
  out += std::to_string(corpus.docs.size());
  out += '\n';
  for (const auto& doc : corpus.docs) {
    out += "doc ";
    out += std::to_string(doc.doc_id);
    out += ' ';
    out += std::to_string(doc.label);
    for (const int f : doc.features) {
      out += ' ';
      out += std::to_string(f);
    }
    out += '\n';
  }
}

}  // namespace

std::string serialize_corpus(const DataSplit& data) {
  const Corpus& train = data.train;
  std::string out;
  out += "alstop-corpus v1\n";
  out += "classes " + std::to_string(train.class_names.size()) + '\n';
  for (const auto& name : train.class_names) {
    out += "class " + name + '\n';
  }
  out += "min_count " + std::to_string(train.vocabulary.min_count()) + '\n';
  out += "vocab " + std::to_string(train.vocabulary.size()) + '\n';
  for (int i = 0; i < train.vocabulary.size(); ++i) {
    // Count first so the term can be taken as the line remainder.
    out += "term " + std::to_string(train.vocabulary.count(i)) + ' ' +
           train.vocabulary.term(i) + '\n';
  }
  append_corpus_docs(out, data.train, "train");
  append_corpus_docs(out, data.test, "test");
  return out;
}

namespace {

// Forward-only line reader over the serialized corpus text.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ > text_.size()) return false;
    const std::size_t eol = text_.find('\n', pos_);
    if (eol == std::string_view::npos) {
      line = trim(text_.substr(pos_));
      pos_ = text_.size() + 1;
      return !line.empty();
    }
    line = text_.substr(pos_, eol - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = eol + 1;
    return true;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string_view expect_prefix(std::string_view line, std::string_view prefix,
                               const char* what) {
  if (!line.starts_with(prefix)) {
    throw IoError(std::string("corpus file: expected ") + what + ", got '" +
                  std::string(line) + "'");
  }
  return line.substr(prefix.size());
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    std::size_t end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

Corpus parse_corpus_docs(LineReader& reader, const char* split_name,
                         Split split, const Vocabulary& vocab,
                         const std::vector<std::string>& class_names) {
  std::string_view line;
  if (!reader.next(line)) throw IoError("corpus file: missing split header");
  const auto rest = expect_prefix(line, std::string("split ") + split_name + " ",
                                  "split header");
  const auto count = parse_int(rest);
  if (count < 0) throw IoError("corpus file: negative doc count");

  Corpus corpus;
  corpus.vocabulary = vocab;
  corpus.class_names = class_names;
  corpus.split = split;
  corpus.docs.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    if (!reader.next(line)) throw IoError("corpus file: truncated doc list");
    const auto fields = split_fields(line);
    if (fields.size() < 3 || fields[0] != "doc") {
      throw IoError("corpus file: bad doc line '" + std::string(line) + "'");
    }
    SparseDoc doc;
    doc.doc_id = static_cast<int>(parse_int(fields[1]));
    doc.label = static_cast<int>(parse_int(fields[2]));
    if (doc.label < 0 ||
        doc.label >= static_cast<int>(class_names.size())) {
      throw IoError("corpus file: label out of range in '" +
                    std::string(line) + "'");
    }
    doc.features.reserve(fields.size() - 3);
    int prev = -1;
    for (std::size_t j = 3; j < fields.size(); ++j) {
      const int f = static_cast<int>(parse_int(fields[j]));
      if (f <= prev || f >= vocab.size()) {
        throw IoError("corpus file: bad feature index in '" +
                      std::string(line) + "'");
      }
      doc.features.push_back(f);
      prev = f;
    }
    corpus.docs.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace

DataSplit parse_corpus(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.next(line) || line != "alstop-corpus v1") {
    throw IoError("corpus file: missing or unsupported version header");
  }

  if (!reader.next(line)) throw IoError("corpus file: truncated header");
  const int num_classes =
      static_cast<int>(parse_int(expect_prefix(line, "classes ", "class count")));
  if (num_classes < 1) throw IoError("corpus file: bad class count");
  std::vector<std::string> class_names;
  class_names.reserve(num_classes);
  for (int i = 0; i < num_classes; ++i) {
    if (!reader.next(line)) throw IoError("corpus file: truncated class list");
    class_names.emplace_back(expect_prefix(line, "class ", "class name"));
  }

  if (!reader.next(line)) throw IoError("corpus file: truncated header");
  const int min_count =
      static_cast<int>(parse_int(expect_prefix(line, "min_count ", "min_count")));

  if (!reader.next(line)) throw IoError("corpus file: truncated header");
  const auto vocab_size =
      parse_int(expect_prefix(line, "vocab ", "vocabulary size"));
  std::vector<std::string> terms;
  std::vector<std::int64_t> counts;
  terms.reserve(static_cast<std::size_t>(vocab_size));
  counts.reserve(static_cast<std::size_t>(vocab_size));
  for (long long i = 0; i < vocab_size; ++i) {
    if (!reader.next(line)) throw IoError("corpus file: truncated vocabulary");
    const auto rest = expect_prefix(line, "term ", "term entry");
    const std::size_t space = rest.find(' ');
    if (space == std::string_view::npos) {
      throw IoError("corpus file: bad term line '" + std::string(line) + "'");
    }
    counts.push_back(parse_int(rest.substr(0, space)));
    terms.emplace_back(rest.substr(space + 1));
  }
  Vocabulary vocab(std::move(terms), std::move(counts), min_count);

  DataSplit data;
  data.train =
      parse_corpus_docs(reader, "train", Split::kTrain, vocab, class_names);
  data.test =
      parse_corpus_docs(reader, "test", Split::kTest, vocab, class_names);
  return data;
}

void save_corpus(const DataSplit& data, const fs::path& file) {
  write_file_bytes(file, serialize_corpus(data));
}

DataSplit load_corpus_file(const fs::path& file) {
  return parse_corpus(read_file_bytes(file));
}

std::string corpus_fingerprint(const DataSplit& data) {
  const std::string bytes = serialize_corpus(data);
  std::uint64_t hash = 1469598103934665603ULL;  // FNV-1a 64-bit
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(buf);
}

DataSplit to_binary_task(const DataSplit& data, int category) {
  if (category < 0 || category >= data.train.num_classes()) {
    throw InvalidParams("category " + std::to_string(category) +
                        " out of range");
  }
  DataSplit binary = data;
  const std::vector<std::string> names = {
      "rest", data.train.class_names[category]};
  for (Corpus* corpus : {&binary.train, &binary.test}) {
    corpus->class_names = names;
    for (auto& doc : corpus->docs) {
      doc.label = doc.label == category ? 1 : 0;
    }
  }
  return binary;
}

}  // namespace alstop
