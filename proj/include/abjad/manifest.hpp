#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "abjad/common.hpp"

namespace abjad {

enum class Category { Alphabet, Number, Color };

inline std::string to_string(Category c) {
  switch (c) {
    case Category::Alphabet: return "alphabet";
    case Category::Number: return "number";
    case Category::Color: return "color";
  }
  return "?";
}

inline Category category_from_string(const std::string& s) {
  if (s == "alphabet") return Category::Alphabet;
  if (s == "number") return Category::Number;
  if (s == "color") return Category::Color;
  throw Error(ErrorCode::ManifestBadCategory, "unknown category: " + s);
}

struct ManifestEntry {
  std::string path;
  std::string label;  // UTF-8, may be Arabic text
  Category category = Category::Alphabet;
  std::string speaker_id;
  std::optional<int> age_years;
  std::string origin;  // source clip path for augmented entries, else empty

  bool is_augmented() const { return !origin.empty(); }
};

// Immutable after construction; class ids are assigned by lexicographic
// (byte-wise UTF-8) label order so they are stable across runs and platforms.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::map<std::string, int> class_index;

  void rebuild_class_index() {
    class_index.clear();
    std::set<std::string> labels;
    for (const auto& e : entries) labels.insert(e.label);
    int id = 0;
    for (const auto& l : labels) class_index[l] = id++;
  }

  int n_classes() const { return int(class_index.size()); }

  std::set<std::string> speakers() const {
    std::set<std::string> s;
    for (const auto& e : entries) s.insert(e.speaker_id);
    return s;
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace detail

// CSV with header `path,label,category,speaker_id,age`; augmented manifests
// carry a sixth `origin` column. Empty age allowed; rejects duplicate paths.
inline DatasetManifest load_manifest(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(bool(std::getline(in, line)), ErrorCode::ManifestMissingColumn,
          "manifest: empty input");
  auto header = detail::split_csv_line(line);
  const std::vector<std::string> want = {"path", "label", "category",
                                         "speaker_id", "age"};
  require(header.size() >= want.size(), ErrorCode::ManifestMissingColumn,
          "manifest: expected header path,label,category,speaker_id,age");
  for (size_t i = 0; i < want.size(); ++i)
    require(header[i] == want[i], ErrorCode::ManifestMissingColumn,
            "manifest: missing column '" + want[i] + "'");
  bool has_origin = header.size() > 5 && header[5] == "origin";

  DatasetManifest m;
  std::set<std::string> seen_paths;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto f = detail::split_csv_line(line);
    require(f.size() >= 5, ErrorCode::ManifestMissingColumn,
            "manifest: short row: " + line);
    ManifestEntry e;
    e.path = f[0];
    e.label = f[1];
    e.category = category_from_string(f[2]);
    e.speaker_id = f[3];
    require(!e.path.empty(), ErrorCode::ManifestMissingColumn,
            "manifest: empty path");
    if (!f[4].empty()) {
      int age = std::stoi(f[4]);
      require(age >= 3 && age <= 12, ErrorCode::ManifestBadAge,
              "manifest: age out of [3,12]: " + f[4]);
      e.age_years = age;
    }
    if (has_origin && f.size() > 5) e.origin = f[5];
    require(seen_paths.insert(e.path).second, ErrorCode::ManifestDuplicatePath,
            "manifest: duplicate path " + e.path);
    m.entries.push_back(std::move(e));
  }
  m.rebuild_class_index();
  return m;
}

inline std::string serialize_manifest(const DatasetManifest& m) {
  std::ostringstream out;
  out << "path,label,category,speaker_id,age,origin\n";
  for (const auto& e : m.entries) {
    out << e.path << ',' << e.label << ',' << to_string(e.category) << ','
        << e.speaker_id << ','
        << (e.age_years ? std::to_string(*e.age_years) : std::string()) << ','
        << e.origin << '\n';
  }
  return out.str();
}

struct SplitResult {
  DatasetManifest train;
  DatasetManifest test;
};

// Speaker-disjoint split: speakers are shuffled by a seeded RNG and assigned
// to test until the test sample count first reaches test_fraction * total.
// Totals count original entries only; augmented entries follow their speaker
// into train and are dropped (not placed in test) when their speaker lands on
// the test side.
inline SplitResult split_by_speaker(const DatasetManifest& m,
                                    double test_fraction, uint64_t seed) {
  require(test_fraction > 0.0 && test_fraction < 1.0, ErrorCode::BadArgument,
          "test_fraction must be in (0,1)");
  std::set<std::string> speaker_set = m.speakers();
  std::vector<std::string> speakers(speaker_set.begin(), speaker_set.end());
  require(speakers.size() >= 2, ErrorCode::TooFewSpeakers,
          "split needs at least 2 distinct speakers");

  std::map<std::string, size_t> original_count;
  size_t total = 0;
  for (const auto& e : m.entries) {
    if (e.is_augmented()) continue;
    ++original_count[e.speaker_id];
    ++total;
  }
  require(total > 0, ErrorCode::EmptyDataset, "no original entries to split");

  Rng rng(seed);
  rng.shuffle(speakers);

  std::set<std::string> test_speakers;
  size_t test_count = 0;
  double threshold = test_fraction * double(total);
  for (const auto& s : speakers) {
    if (double(test_count) >= threshold) break;
    if (test_speakers.size() + 1 == speakers.size()) break;  // keep train non-empty
    test_speakers.insert(s);
    test_count += original_count[s];
  }

  SplitResult out;
  for (const auto& e : m.entries) {
    if (test_speakers.count(e.speaker_id)) {
      if (!e.is_augmented()) out.test.entries.push_back(e);
    } else {
      out.train.entries.push_back(e);
    }
  }
  out.train.rebuild_class_index();
  out.test.rebuild_class_index();
  return out;
}

// Per-category class/sample counts, used by `validate`.
struct ManifestSummary {
  std::map<Category, int> classes;
  std::map<Category, size_t> samples;
  int total_classes = 0;
  size_t total_samples = 0;
};

inline ManifestSummary summarize(const DatasetManifest& m) {
  ManifestSummary s;
  std::map<Category, std::set<std::string>> labels;
  for (const auto& e : m.entries) {
    labels[e.category].insert(e.label);
    ++s.samples[e.category];
    ++s.total_samples;
  }
  for (auto& [cat, set] : labels) s.classes[cat] = int(set.size());
  s.total_classes = m.n_classes();
  return s;
}

}  // namespace abjad
