#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "abjad/common.hpp"
#include "abjad/features.hpp"
#include "abjad/manifest.hpp"

namespace abjad {

enum class GroupProvenance { Static, Dynamic };

// Total assignment of every manifest class to one of G groups.
struct GroupMap {
  std::vector<std::string> group_names;
  std::map<std::string, int> assignment;  // class label -> group index
  GroupProvenance provenance = GroupProvenance::Static;

  int n_groups() const { return int(group_names.size()); }

  int group_of(const std::string& label) const {
    auto it = assignment.find(label);
    require(it != assignment.end(), ErrorCode::BadArgument,
            "label not in group map: " + label);
    return it->second;
  }

  std::vector<std::vector<std::string>> classes_per_group() const {
    std::vector<std::vector<std::string>> out(static_cast<size_t>(n_groups()));
    for (const auto& [label, g] : assignment) out[size_t(g)].push_back(label);
    return out;
  }
};

// Arabic letter -> articulation group over all 28 letters. The paper's exact
// per-letter assignment is not recoverable from its text; this default follows
// classical tajweed articulation points with the remaining tongue letters
// merged into Aqsa-lessan so the six group names partition the alphabet. The
// table is data, not code: load_group_table() accepts a user file.
struct StaticGroupTable {
  std::vector<std::string> group_names;
  std::map<std::string, std::string> letter_to_group;
};

inline StaticGroupTable default_static_table() {
  StaticGroupTable t;
  t.group_names = {"Aqsa-lessan", "Halq", "Jouf", "Shafatan", "Thanaya1",
                   "Thanaya2"};
  auto add = [&](const std::string& group,
                 std::initializer_list<const char*> letters) {
    for (const char* l : letters) t.letter_to_group[l] = group;
  };
  add("Aqsa-lessan", {"ق", "ك", "ج", "ش", "ض", "ل", "ن", "ر"});
  add("Halq", {"ه", "ع", "ح", "غ", "خ"});
  add("Jouf", {"ا", "و", "ي"});
  add("Shafatan", {"ف", "ب", "م"});
  add("Thanaya1", {"ط", "د", "ت", "ث", "ذ", "ظ"});
  add("Thanaya2", {"ص", "ز", "س"});
  return t;
}

// Lines `letter<TAB>group_name`, UTF-8; group order follows first appearance.
inline StaticGroupTable parse_group_table(const std::string& text) {
  StaticGroupTable t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    require(tab != std::string::npos, ErrorCode::BadArgument,
            "group table line missing tab: " + line);
    std::string letter = line.substr(0, tab);
    std::string group = line.substr(tab + 1);
    if (std::find(t.group_names.begin(), t.group_names.end(), group) ==
        t.group_names.end())
      t.group_names.push_back(group);
    t.letter_to_group[letter] = group;
  }
  return t;
}

inline std::string serialize_group_table(const StaticGroupTable& t) {
  std::ostringstream out;
  for (const auto& g : t.group_names)
    for (const auto& [letter, group] : t.letter_to_group)
      if (group == g) out << letter << '\t' << group << '\n';
  return out.str();
}

// A label resolves to its letter either because it is the letter itself or
// because it ends with a parenthesized letter suffix, e.g. "word (X)".
inline std::string letter_of_label(const std::string& label,
                                   const StaticGroupTable& table) {
  if (table.letter_to_group.count(label)) return label;
  auto close = label.rfind(')');
  auto open = label.rfind('(');
  if (open != std::string::npos && close != std::string::npos && open < close) {
    std::string inner = label.substr(open + 1, close - open - 1);
    while (!inner.empty() && inner.front() == ' ') inner.erase(inner.begin());
    while (!inner.empty() && inner.back() == ' ') inner.pop_back();
    if (table.letter_to_group.count(inner)) return inner;
  }
  throw Error(ErrorCode::LetterNotInTable,
              "cannot resolve label to a letter in the table: " + label);
}

// Maps every alphabet-category class of the manifest to its letter's group.
inline GroupMap static_group_map(const DatasetManifest& m,
                                 const StaticGroupTable& table) {
  GroupMap gm;
  gm.provenance = GroupProvenance::Static;
  gm.group_names = table.group_names;
  std::map<std::string, int> group_index;
  for (size_t i = 0; i < table.group_names.size(); ++i)
    group_index[table.group_names[i]] = int(i);
  for (const auto& [label, id] : m.class_index) {
    std::string letter = letter_of_label(label, table);
    gm.assignment[label] = group_index.at(table.letter_to_group.at(letter));
  }
  return gm;
}

struct ClusteringResult {
  int k = 0;
  std::vector<std::vector<double>> centroids;
  std::vector<int> assignment;
  double wcss = 0.0;
  std::vector<double> wcss_trace;  // per Lloyd iteration of the winning run
};

namespace detail {

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

inline ClusteringResult kmeans_single(const std::vector<std::vector<double>>& points,
                                      int k, Rng& rng, int max_iter) {
  size_t n = points.size();
  ClusteringResult res;
  res.k = k;

  // k-means++ seeding
  res.centroids.push_back(points[rng.uniform_int(n)]);
  std::vector<double> d2(n, std::numeric_limits<double>::max());
  while (int(res.centroids.size()) < k) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(points[i], res.centroids.back()));
      total += d2[i];
    }
    size_t pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      double cum = 0.0;
      for (size_t i = 0; i < n; ++i) {
        cum += d2[i];
        if (cum >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.uniform_int(n);
    }
    res.centroids.push_back(points[pick]);
  }

  res.assignment.assign(n, -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    double wcss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::max();
      for (int c = 0; c < k; ++c) {
        double d = sq_dist(points[i], res.centroids[size_t(c)]);
        if (d < best_d) {  // ties resolve to the lowest index
          best_d = d;
          best = c;
        }
      }
      if (res.assignment[i] != best) {
        res.assignment[i] = best;
        changed = true;
      }
      wcss += best_d;
    }
    res.wcss_trace.push_back(wcss);
    res.wcss = wcss;
    if (!changed && iter > 0) break;

    size_t dim = points[0].size();
    std::vector<std::vector<double>> sums(size_t(k), std::vector<double>(dim, 0.0));
    std::vector<size_t> counts(size_t(k), 0);
    for (size_t i = 0; i < n; ++i) {
      for (size_t d = 0; d < dim; ++d) sums[size_t(res.assignment[i])][d] += points[i][d];
      ++counts[size_t(res.assignment[i])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[size_t(c)] == 0) {
        // re-seed an empty cluster to the point farthest from its centroid
        size_t far = 0;
        double far_d = -1.0;
        for (size_t i = 0; i < n; ++i) {
          double d = sq_dist(points[i], res.centroids[size_t(res.assignment[i])]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        res.centroids[size_t(c)] = points[far];
      } else {
        for (size_t d = 0; d < dim; ++d)
          res.centroids[size_t(c)][d] = sums[size_t(c)][d] / double(counts[size_t(c)]);
      }
    }
  }
  // final pass so wcss matches the returned centroids/assignment
  double wcss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::max();
    for (int c = 0; c < k; ++c) {
      double d = sq_dist(points[i], res.centroids[size_t(c)]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    res.assignment[i] = best;
    wcss += best_d;
  }
  res.wcss = wcss;
  return res;
}

}  // namespace detail

// k-means++ seeding, Lloyd iterations to a fixpoint, best of `restarts` runs
// by WCSS. Deterministic given the seed: restart r draws from its own stream
// derived from (seed, r).
inline ClusteringResult kmeans(const std::vector<std::vector<double>>& points,
                               int k, uint64_t seed, int restarts = 10,
                               int max_iter = 300) {
  require(!points.empty(), ErrorCode::BadArgument, "kmeans: no points");
  require(k >= 1 && size_t(k) <= points.size(), ErrorCode::BadArgument,
          "kmeans: require 1 <= k <= n");
  ClusteringResult best;
  best.wcss = std::numeric_limits<double>::max();
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, 0x04EA45, uint64_t(r)));
    ClusteringResult res = detail::kmeans_single(points, k, rng, max_iter);
    if (res.wcss < best.wcss) best = std::move(res);
  }
  return best;
}

struct ElbowCurve {
  std::vector<std::pair<int, double>> points;  // (k, wcss)
  int chosen_k = 0;
};

// Runs kmeans per k and picks the k whose min-max-normalized (k, wcss) point
// lies farthest from the chord joining the curve's endpoints. Normalizing
// both axes makes the choice invariant to uniform scaling of the data.
inline ElbowCurve elbow_select_k(const std::vector<std::vector<double>>& points,
                                 int k_min, int k_max, uint64_t seed,
                                 int restarts = 10) {
  require(k_min >= 1 && k_min <= k_max && size_t(k_max) <= points.size(),
          ErrorCode::BadArgument, "elbow: bad k range");
  ElbowCurve curve;
  for (int k = k_min; k <= k_max; ++k)
    curve.points.emplace_back(k, kmeans(points, k, seed, restarts).wcss);

  if (curve.points.size() == 1) {
    curve.chosen_k = k_min;
    return curve;
  }
  double w_min = std::numeric_limits<double>::max(), w_max = 0.0;
  for (auto& [k, w] : curve.points) {
    w_min = std::min(w_min, w);
    w_max = std::max(w_max, w);
  }
  double w_span = w_max > w_min ? w_max - w_min : 1.0;
  double k_span = double(k_max - k_min);
  auto norm = [&](size_t i) -> std::pair<double, double> {
    return {double(curve.points[i].first - k_min) / k_span,
            (curve.points[i].second - w_min) / w_span};
  };
  auto [x0, y0] = norm(0);
  auto [x1, y1] = norm(curve.points.size() - 1);
  double chord = std::hypot(x1 - x0, y1 - y0);
  double best_d = -1.0;
  for (size_t i = 0; i < curve.points.size(); ++i) {
    auto [x, y] = norm(i);
    double d = chord > 0.0
                   ? std::abs((x1 - x0) * (y0 - y) - (x0 - x) * (y1 - y0)) / chord
                   : 0.0;
    if (d > best_d) {
      best_d = d;
      curve.chosen_k = curve.points[i].first;
    }
  }
  return curve;
}

struct Dendrogram {
  struct Merge {
    int left, right;    // node ids; leaves are 0..L-1
    double height;      // Ward distance at the merge
    int new_id;         // L + step
  };
  std::vector<Merge> merges;
  int leaves = 0;
};

// Agglomerative clustering with Ward linkage (Lance-Williams update) on
// Euclidean distances. Emits k-1 merges; Ward heights are non-decreasing.
inline Dendrogram agglomerate(const std::vector<std::vector<double>>& points) {
  int n = int(points.size());
  require(n >= 2, ErrorCode::BadArgument, "agglomerate needs >= 2 points");
  Dendrogram dg;
  dg.leaves = n;

  struct Node {
    int id;
    size_t size;
    bool alive;
  };
  std::vector<Node> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back({i, 1, true});

  // squared-distance matrix over active node slots
  std::vector<std::vector<double>> d2(size_t(n), std::vector<double>(size_t(n), 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      d2[size_t(i)][size_t(j)] = d2[size_t(j)][size_t(i)] =
          detail::sq_dist(points[size_t(i)], points[size_t(j)]);

  int next_id = n;
  for (int step = 0; step < n - 1; ++step) {
    int bi = -1, bj = -1;
    double best = std::numeric_limits<double>::max();
    for (int i = 0; i < n; ++i) {
      if (!nodes[size_t(i)].alive) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!nodes[size_t(j)].alive) continue;
        if (d2[size_t(i)][size_t(j)] < best) {
          best = d2[size_t(i)][size_t(j)];
          bi = i;
          bj = j;
        }
      }
    }
    double ni = double(nodes[size_t(bi)].size), nj = double(nodes[size_t(bj)].size);
    dg.merges.push_back({nodes[size_t(bi)].id, nodes[size_t(bj)].id,
                         std::sqrt(best), next_id});
    // Lance-Williams (Ward) update against every other active node
    for (int w = 0; w < n; ++w) {
      if (!nodes[size_t(w)].alive || w == bi || w == bj) continue;
      double nw = double(nodes[size_t(w)].size);
      double updated = ((nw + ni) * d2[size_t(w)][size_t(bi)] +
                        (nw + nj) * d2[size_t(w)][size_t(bj)] -
                        nw * best) /
                       (nw + ni + nj);
      d2[size_t(w)][size_t(bi)] = d2[size_t(bi)][size_t(w)] = updated;
    }
    nodes[size_t(bi)].id = next_id++;
    nodes[size_t(bi)].size += nodes[size_t(bj)].size;
    nodes[size_t(bj)].alive = false;
  }
  return dg;
}

inline std::string serialize_dendrogram(const Dendrogram& dg) {
  std::ostringstream out;
  out << "leaves: " << dg.leaves << "\n";
  char buf[128];
  for (const auto& m : dg.merges) {
    std::snprintf(buf, sizeof buf, "merge %d %d -> %d height %.6f\n", m.left,
                  m.right, m.new_id, m.height);
    out << buf;
  }
  return out.str();
}

inline std::string serialize_elbow(const ElbowCurve& curve) {
  std::ostringstream out;
  out << "k\twcss\n";
  char buf[64];
  for (const auto& [k, w] : curve.points) {
    std::snprintf(buf, sizeof buf, "%d\t%.6f\n", k, w);
    out << buf;
  }
  out << "chosen_k: " << curve.chosen_k << "\n";
  return out.str();
}

// Z-scores every vector per dimension over the pooled sample, then averages
// per class. Zero-variance dimensions standardize with unit scale.
inline std::pair<std::vector<std::string>, std::vector<std::vector<double>>>
class_centroids(const std::map<std::string, std::vector<std::vector<double>>>&
                    features_by_class) {
  require(!features_by_class.empty(), ErrorCode::EmptyClass, "no classes");
  size_t dim = 0;
  size_t total = 0;
  for (const auto& [label, vecs] : features_by_class) {
    require(!vecs.empty(), ErrorCode::EmptyClass, "class has no vectors: " + label);
    for (const auto& v : vecs) {
      if (dim == 0) dim = v.size();
      require(v.size() == dim, ErrorCode::DimensionMismatch,
              "feature dimension mismatch");
      ++total;
    }
  }
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  for (const auto& [label, vecs] : features_by_class)
    for (const auto& v : vecs)
      for (size_t d = 0; d < dim; ++d) mean[d] += v[d];
  for (size_t d = 0; d < dim; ++d) mean[d] /= double(total);
  for (const auto& [label, vecs] : features_by_class)
    for (const auto& v : vecs)
      for (size_t d = 0; d < dim; ++d) {
        double diff = v[d] - mean[d];
        var[d] += diff * diff;
      }
  std::vector<double> scale(dim);
  for (size_t d = 0; d < dim; ++d) {
    double s = std::sqrt(var[d] / double(total));
    scale[d] = s > 1e-12 ? s : 1.0;
  }

  std::vector<std::string> labels;
  std::vector<std::vector<double>> centroids;
  for (const auto& [label, vecs] : features_by_class) {
    std::vector<double> c(dim, 0.0);
    for (const auto& v : vecs)
      for (size_t d = 0; d < dim; ++d) c[d] += (v[d] - mean[d]) / scale[d];
    for (size_t d = 0; d < dim; ++d) c[d] /= double(vecs.size());
    labels.push_back(label);
    centroids.push_back(std::move(c));
  }
  return {labels, centroids};
}

struct DynamicGroupingResult {
  GroupMap group_map;
  ElbowCurve elbow;
  Dendrogram dendrogram;  // over the chosen k centroids (k >= 2)
};

// class_centroids -> elbow_select_k -> kmeans at the chosen k. Classes whose
// centroids coincide land in the same cluster by construction.
inline DynamicGroupingResult dynamic_group_map(
    const DatasetManifest& m,
    const std::map<std::string, std::vector<std::vector<double>>>& features,
    uint64_t seed, int k_min = 2, int k_max = 15) {
  for (const auto& [label, id] : m.class_index)
    require(features.count(label) > 0, ErrorCode::EmptyClass,
            "no features for class " + label);

  auto [labels, centroids] = class_centroids(features);
  int n = int(centroids.size());
  k_min = std::min(k_min, n);
  k_max = std::min(k_max, n);

  DynamicGroupingResult out;
  out.elbow = elbow_select_k(centroids, k_min, k_max, seed);
  ClusteringResult clusters = kmeans(centroids, out.elbow.chosen_k, seed);

  out.group_map.provenance = GroupProvenance::Dynamic;
  for (int g = 0; g < clusters.k; ++g)
    out.group_map.group_names.push_back("cluster_" + std::to_string(g));
  for (size_t i = 0; i < labels.size(); ++i)
    out.group_map.assignment[labels[i]] = clusters.assignment[i];

  if (clusters.k >= 2) out.dendrogram = agglomerate(clusters.centroids);
  return out;
}

// CSV `label,group_index,group_name,provenance`.
inline std::string serialize_group_map(const GroupMap& gm) {
  std::ostringstream out;
  out << "label,group_index,group_name,provenance\n";
  for (const auto& [label, g] : gm.assignment)
    out << label << ',' << g << ',' << gm.group_names[size_t(g)] << ','
        << (gm.provenance == GroupProvenance::Static ? "static" : "dynamic")
        << '\n';
  return out.str();
}

inline GroupMap parse_group_map(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(bool(std::getline(in, line)), ErrorCode::BadArgument,
          "empty group map");
  GroupMap gm;
  std::map<int, std::string> names;
  bool dynamic = false;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto f = detail::split_csv_line(line);
    require(f.size() >= 4, ErrorCode::BadArgument, "short group map row");
    int g = std::stoi(f[1]);
    gm.assignment[f[0]] = g;
    names[g] = f[2];
    dynamic = f[3] == "dynamic";
  }
  gm.provenance = dynamic ? GroupProvenance::Dynamic : GroupProvenance::Static;
  int max_g = -1;
  for (auto& [g, name] : names) max_g = std::max(max_g, g);
  gm.group_names.resize(size_t(max_g + 1));
  for (auto& [g, name] : names) gm.group_names[size_t(g)] = name;
  return gm;
}

}  // namespace abjad
