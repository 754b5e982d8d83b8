// Batch front end for the keyword-spotting toolkit: corpus synthesis,
// validation, preprocessing/augmentation/feature caching, class grouping,
// two-stage training, evaluation, and single-clip inference.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "abjad/grouping.hpp"
#include "abjad/hierarchy.hpp"
#include "abjad/logreg.hpp"
#include "abjad/model_io.hpp"
#include "abjad/pipeline.hpp"
#include "abjad/presets.hpp"
#include "abjad/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace abjad;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDiverged = 3;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::BadArgument:
      return kExitUsage;
    case ErrorCode::TrainingDiverged:
      return kExitDiverged;
    default:
      return kExitData;
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::trunc);
  require(out.good(), ErrorCode::IoError, "cannot write " + path);
  out << text;
}

void apply_json(RunConfig& cfg, const json& j) {
  if (j.contains("corpus_root")) cfg.corpus_root = j["corpus_root"];
  if (j.contains("manifest")) cfg.manifest_path = j["manifest"];
  if (j.contains("work_dir")) cfg.work_dir = j["work_dir"];
  if (j.contains("group_table")) cfg.group_table_path = j["group_table"];
  if (j.contains("target_rate")) cfg.target_rate = j["target_rate"];
  if (j.contains("target_seconds")) cfg.target_seconds = j["target_seconds"];
  if (j.contains("pre_emphasis_alpha")) cfg.pre_emphasis_alpha = j["pre_emphasis_alpha"];
  if (j.contains("window")) {
    const auto& w = j["window"];
    if (w.contains("frame_len")) cfg.window.frame_len = w["frame_len"];
    if (w.contains("hop")) cfg.window.hop = w["hop"];
    if (w.contains("fft_size")) cfg.window.fft_size = w["fft_size"];
  }
  if (j.contains("noise_gate")) {
    const auto& g = j["noise_gate"];
    if (g.contains("floor_percentile")) cfg.noise_gate.floor_percentile = g["floor_percentile"];
    if (g.contains("threshold_factor")) cfg.noise_gate.threshold_factor = g["threshold_factor"];
    if (g.contains("min_gain")) cfg.noise_gate.min_gain = g["min_gain"];
    if (g.contains("smooth_time")) cfg.noise_gate.smooth_time = g["smooth_time"];
    if (g.contains("smooth_freq")) cfg.noise_gate.smooth_freq = g["smooth_freq"];
  }
  if (j.contains("features")) {
    const auto& f = j["features"];
    if (f.contains("n_mels")) cfg.features.n_mels = f["n_mels"];
    if (f.contains("n_mfcc")) cfg.features.n_mfcc = f["n_mfcc"];
    if (f.contains("mel_fmin")) cfg.features.mel_fmin = f["mel_fmin"];
    if (f.contains("mel_fmax")) cfg.features.mel_fmax = f["mel_fmax"];
    if (f.contains("rolloff_pct")) cfg.features.rolloff_pct = f["rolloff_pct"];
    if (f.contains("aggregation"))
      cfg.features.aggregation =
          f["aggregation"] == "stats" ? Aggregation::Stats : Aggregation::Mean;
  }
  if (j.contains("augment")) {
    const auto& a = j["augment"];
    if (a.contains("copies_per_sample")) cfg.augment.copies_per_sample = a["copies_per_sample"];
    if (a.contains("pitch_semitones"))
      cfg.augment.pitch_semitones = a["pitch_semitones"].get<std::vector<double>>();
    if (a.contains("lowpass_min_hz")) cfg.augment.lowpass_min_hz = a["lowpass_min_hz"];
    if (a.contains("lowpass_max_hz")) cfg.augment.lowpass_max_hz = a["lowpass_max_hz"];
    if (a.contains("lowpass_prob")) cfg.augment.lowpass_prob = a["lowpass_prob"];
    if (a.contains("gain_db_min")) cfg.augment.gain_db_min = a["gain_db_min"];
    if (a.contains("gain_db_max")) cfg.augment.gain_db_max = a["gain_db_max"];
    if (a.contains("seed")) cfg.augment.seed = a["seed"];
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    if (t.contains("learning_rate")) cfg.train.learning_rate = t["learning_rate"];
    if (t.contains("batch_size")) cfg.train.batch_size = t["batch_size"];
    if (t.contains("epochs")) cfg.train.epochs = t["epochs"];
    if (t.contains("seed")) cfg.train.seed = t["seed"];
  }
  if (j.contains("test_fraction")) cfg.test_fraction = j["test_fraction"];
  if (j.contains("split_seed")) cfg.split_seed = j["split_seed"];
  if (j.contains("group_seed")) cfg.group_seed = j["group_seed"];
  if (j.contains("stage1_preset")) cfg.stage1_preset = j["stage1_preset"];
  if (j.contains("flat_preset")) cfg.flat_preset = j["flat_preset"];
  if (j.contains("stage2_presets"))
    for (auto& [k, v] : j["stage2_presets"].items())
      cfg.stage2_presets[k] = v.get<std::string>();
}

struct CommonArgs {
  std::string config_path;
  std::string corpus, manifest, work;
  int64_t seed = -1;
  std::string preset_name;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON run configuration");
  cmd->add_option("--corpus", args.corpus, "corpus root directory");
  cmd->add_option("--manifest", args.manifest, "manifest CSV path");
  cmd->add_option("--work", args.work, "working directory for artifacts");
  cmd->add_option("--seed", args.seed, "master seed (overrides config seeds)");
  cmd->add_option("--preset", args.preset_name, "model preset name");
}

RunConfig resolve_config(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty())
    apply_json(cfg, json::parse(read_text(args.config_path)));
  if (!args.corpus.empty()) cfg.corpus_root = args.corpus;
  if (!args.manifest.empty()) cfg.manifest_path = args.manifest;
  if (!args.work.empty()) cfg.work_dir = args.work;
  if (args.seed >= 0) {
    uint64_t seed = uint64_t(args.seed);
    cfg.train.seed = seed;
    cfg.split_seed = derive_seed(seed, 0x5);
    cfg.group_seed = derive_seed(seed, 0x6);
    cfg.augment.seed = derive_seed(seed, 0x7);
  }
  if (cfg.manifest_path.empty() && !cfg.corpus_root.empty())
    cfg.manifest_path = (fs::path(cfg.corpus_root) / "manifest.csv").string();
  return cfg;
}

DatasetManifest load_manifest_file(const std::string& path) {
  return load_manifest(read_text(path));
}

StaticGroupTable resolve_table(const RunConfig& cfg) {
  if (cfg.group_table_path.empty()) return default_static_table();
  return parse_group_table(read_text(cfg.group_table_path));
}

std::string split_dir(const RunConfig& cfg) {
  return (fs::path(cfg.work_dir) / "split").string();
}
std::string models_dir(const RunConfig& cfg) {
  return (fs::path(cfg.work_dir) / "models").string();
}
std::string reports_dir(const RunConfig& cfg) {
  return (fs::path(cfg.work_dir) / "reports").string();
}

DatasetManifest load_split(const RunConfig& cfg, const char* which) {
  fs::path p = fs::path(split_dir(cfg)) / (std::string(which) + ".csv");
  require(fs::exists(p), ErrorCode::MissingArtifact,
          std::string(which) + " split not found; run `prepare` first: " +
              p.string());
  return load_manifest_file(p.string());
}

GroupMap load_group_map_artifact(const RunConfig& cfg) {
  fs::path p = fs::path(cfg.work_dir) / "groupmap.csv";
  require(fs::exists(p), ErrorCode::MissingArtifact,
          "group map not found; run `group static` or `group dynamic` first: " +
              p.string());
  return parse_group_map(read_text(p.string()));
}

ModelConfig preset_or(const std::string& flag_name, const std::string& fallback) {
  return preset(flag_name.empty() ? fallback : flag_name);
}

int cmd_synth(const CommonArgs& common, const std::string& out_dir, int classes,
              int groups, int speakers, int per_class, double noise,
              int64_t seed) {
  SynthSpec spec;
  spec.n_classes = classes;
  spec.n_groups = groups;
  spec.speakers = speakers;
  spec.samples_per_class = per_class;
  spec.noise_level = noise;
  spec.seed = seed >= 0 ? uint64_t(seed) : (common.seed >= 0 ? uint64_t(common.seed) : 7);
  auto manifest = generate_synthetic(spec, out_dir);
  write_text((fs::path(out_dir) / "manifest.csv").string(),
             serialize_manifest(manifest));
  std::cout << "synth: " << manifest.entries.size() << " clips, "
            << manifest.n_classes() << " classes -> " << out_dir << "\n";
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg, bool scan) {
  auto manifest = load_manifest_file(cfg.manifest_path);
  auto summary = summarize(manifest);
  std::cout << "classes: " << summary.total_classes << "\n";
  std::cout << "samples: " << summary.total_samples << "\n";
  for (auto cat : {Category::Alphabet, Category::Number, Category::Color}) {
    auto c = summary.classes.count(cat) ? summary.classes.at(cat) : 0;
    auto s = summary.samples.count(cat) ? summary.samples.at(cat) : 0;
    std::cout << to_string(cat) << ": " << c << " classes, " << s << " samples\n";
  }
  if (scan) {
    size_t nonconforming = 0;
    for (const auto& e : manifest.entries) {
      try {
        auto clip = read_wav_file((fs::path(cfg.corpus_root) / e.path).string());
        bool ok = clip.sample_rate == cfg.target_rate &&
                  clip.samples.size() ==
                      size_t(std::llround(cfg.target_seconds * cfg.target_rate));
        if (!ok) {
          ++nonconforming;
          std::cout << "nonconforming: " << e.path << " (" << clip.sample_rate
                    << " Hz, " << clip.samples.size() << " samples)\n";
        }
      } catch (const Error& err) {
        ++nonconforming;
        std::cout << "nonconforming: " << e.path << " (" << err.what() << ")\n";
      }
    }
    std::cout << "nonconforming files: " << nonconforming << "\n";
  }
  return kExitOk;
}

int cmd_prepare(const RunConfig& cfg) {
  auto manifest = load_manifest_file(cfg.manifest_path);
  auto prepared = prepare(manifest, cfg, true);
  write_text((fs::path(split_dir(cfg)) / "train.csv").string(),
             serialize_manifest(prepared.train));
  write_text((fs::path(split_dir(cfg)) / "test.csv").string(),
             serialize_manifest(prepared.test));
  std::cout << "prepare: train " << prepared.train.entries.size() << ", test "
            << prepared.test.entries.size() << ", cache hits "
            << prepared.cache.hits << ", misses " << prepared.cache.misses
            << "\n";
  return kExitOk;
}

int cmd_group_static(const RunConfig& cfg) {
  auto train = load_split(cfg, "train");
  auto gm = static_group_map(train, resolve_table(cfg));
  write_text((fs::path(cfg.work_dir) / "groupmap.csv").string(),
             serialize_group_map(gm));
  std::cout << "group static: " << gm.assignment.size() << " classes -> "
            << gm.n_groups() << " groups\n";
  return kExitOk;
}

int cmd_group_dynamic(const RunConfig& cfg) {
  auto train = load_split(cfg, "train");
  auto features = load_feature_vectors(train, cfg);
  auto result = dynamic_group_map(train, features, cfg.group_seed);
  write_text((fs::path(cfg.work_dir) / "groupmap.csv").string(),
             serialize_group_map(result.group_map));
  write_text((fs::path(cfg.work_dir) / "elbow.txt").string(),
             serialize_elbow(result.elbow));
  write_text((fs::path(cfg.work_dir) / "dendrogram.txt").string(),
             serialize_dendrogram(result.dendrogram));
  std::cout << "group dynamic: chose k = " << result.elbow.chosen_k << " over "
            << result.group_map.assignment.size() << " classes\n";
  return kExitOk;
}

int cmd_train_stage1(const RunConfig& cfg, const std::string& preset_flag) {
  auto train_m = load_split(cfg, "train");
  auto test_m = load_split(cfg, "test");
  auto gm = load_group_map_artifact(cfg);
  auto train_samples = load_samples(train_m, cfg);
  auto val_samples = load_samples(test_m, cfg);

  std::vector<LabeledMfcc> t, v;
  for (const auto& s : train_samples)
    t.push_back({s.mfcc, size_t(gm.group_of(s.label))});
  for (const auto& s : val_samples)
    v.push_back({s.mfcc, size_t(gm.group_of(s.label))});

  ModelConfig mc = preset_or(preset_flag, cfg.stage1_preset);
  mc.n_classes = size_t(gm.n_groups());
  CnnLstmModel<double> model(mc, t[0].mfcc.frames, t[0].mfcc.coeffs,
                             derive_seed(cfg.train.seed, 0x51));
  auto history = train(model, t, v.empty() ? t : v, cfg.train);
  fs::create_directories(models_dir(cfg));
  save_model_file((fs::path(models_dir(cfg)) / "stage1.abjd").string(), model,
                  gm.group_names);
  std::cout << "train stage1: final train acc "
            << history.epochs.back().train_accuracy << ", val acc "
            << history.epochs.back().val_accuracy << "\n";
  return kExitOk;
}

int cmd_train_stage2(const RunConfig& cfg, const std::string& preset_flag) {
  auto train_m = load_split(cfg, "train");
  auto test_m = load_split(cfg, "test");
  auto gm = load_group_map_artifact(cfg);
  auto train_samples = load_samples(train_m, cfg);
  auto val_samples = load_samples(test_m, cfg);
  fs::create_directories(models_dir(cfg));

  auto classes_per_group = gm.classes_per_group();
  for (int g = 0; g < gm.n_groups(); ++g) {
    auto classes = classes_per_group[size_t(g)];
    std::sort(classes.begin(), classes.end());
    if (classes.size() < 2) {
      std::cout << "group " << gm.group_names[size_t(g)]
                << ": single class, stage 2 bypassed\n";
      continue;
    }
    std::map<std::string, size_t> idx;
    for (size_t i = 0; i < classes.size(); ++i) idx[classes[i]] = i;
    std::vector<LabeledMfcc> t, v;
    for (const auto& s : train_samples)
      if (gm.group_of(s.label) == g) t.push_back({s.mfcc, idx.at(s.label)});
    for (const auto& s : val_samples)
      if (gm.group_of(s.label) == g) v.push_back({s.mfcc, idx.at(s.label)});
    require(!t.empty(), ErrorCode::EmptyClass,
            "no training samples for group " + gm.group_names[size_t(g)]);

    std::string preset_name = !preset_flag.empty() ? preset_flag
                              : cfg.stage2_presets.count(gm.group_names[size_t(g)])
                                  ? cfg.stage2_presets.at(gm.group_names[size_t(g)])
                                  : cfg.stage1_preset;
    ModelConfig mc = preset(preset_name);
    mc.n_classes = classes.size();
    CnnLstmModel<double> model(mc, t[0].mfcc.frames, t[0].mfcc.coeffs,
                               derive_seed(cfg.train.seed, 0x52, uint64_t(g)));
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cfg.train.seed, 0x7C2, uint64_t(g));
    auto history = train(model, t, v.empty() ? t : v, tc);
    save_model_file(
        (fs::path(models_dir(cfg)) / ("stage2_" + std::to_string(g) + ".abjd"))
            .string(),
        model, classes);
    std::cout << "train stage2[" << gm.group_names[size_t(g)] << "]: val acc "
              << history.epochs.back().val_accuracy << "\n";
  }
  return kExitOk;
}

int cmd_train_flat(const RunConfig& cfg, const std::string& preset_flag) {
  auto train_m = load_split(cfg, "train");
  auto test_m = load_split(cfg, "test");
  auto train_samples = load_samples(train_m, cfg);
  auto val_samples = load_samples(test_m, cfg);
  TrainHistory history;
  auto flat = train_flat<double>(train_samples, val_samples,
                                 preset_or(preset_flag, cfg.flat_preset),
                                 cfg.train, &history);
  fs::create_directories(models_dir(cfg));
  save_model_file((fs::path(models_dir(cfg)) / "flat.abjd").string(),
                  *flat.model, flat.class_labels);
  std::cout << "train flat: final val acc "
            << history.epochs.back().val_accuracy << "\n";
  return kExitOk;
}

int cmd_train_logreg(const RunConfig& cfg) {
  auto train_m = load_split(cfg, "train");
  auto by_class = load_feature_vectors(train_m, cfg);
  std::map<std::string, size_t> label_idx;
  std::vector<std::string> labels;
  for (const auto& [label, vecs] : by_class) {
    label_idx[label] = labels.size();
    labels.push_back(label);
  }
  std::vector<std::vector<double>> x;
  std::vector<size_t> y;
  std::vector<std::string> speakers;
  {
    std::string cache_dir = (fs::path(cfg.work_dir) / "cache").string();
    for (const auto& e : train_m.entries) {
      auto rec = extract_cached(cfg.corpus_root, e.path, cfg, cache_dir);
      x.push_back(rec.vector.values);
      y.push_back(label_idx.at(e.label));
      speakers.push_back(e.speaker_id);
    }
  }
  auto model = train_logreg(x, y, speakers, labels.size(), {0.01, 0.1, 1.0},
                            derive_seed(cfg.train.seed, 0x106));
  fs::create_directories(models_dir(cfg));
  std::ofstream out((fs::path(models_dir(cfg)) / "logreg.abjd").string(),
                    std::ios::binary | std::ios::trunc);
  save_logreg(out, model, labels);
  size_t correct = 0;
  for (size_t i = 0; i < x.size(); ++i)
    if (argmax(model.predict_proba(x[i])) == y[i]) ++correct;
  std::cout << "train logreg: l2 = " << model.chosen_l2 << ", train acc "
            << double(correct) / double(x.size()) << "\n";
  return kExitOk;
}

template <typename S>
HierarchyModel<S> load_hierarchy(const RunConfig& cfg) {
  HierarchyModel<S> h;
  h.group_map = load_group_map_artifact(cfg);
  h.group_names = h.group_map.group_names;
  fs::path dir = models_dir(cfg);
  require(fs::exists(dir / "stage1.abjd"), ErrorCode::MissingArtifact,
          "stage1 model not found; run `train stage1` first");
  auto s1 = load_model_file<S>((dir / "stage1.abjd").string());
  h.stage1 = std::make_unique<CnnLstmModel<S>>(std::move(s1.model));
  int n_groups = h.group_map.n_groups();
  h.stage2.resize(size_t(n_groups));
  h.stage2_labels.resize(size_t(n_groups));
  auto classes_per_group = h.group_map.classes_per_group();
  for (int g = 0; g < n_groups; ++g) {
    auto classes = classes_per_group[size_t(g)];
    std::sort(classes.begin(), classes.end());
    h.stage2_labels[size_t(g)] = classes;
    fs::path p = dir / ("stage2_" + std::to_string(g) + ".abjd");
    if (classes.size() < 2) continue;
    require(fs::exists(p), ErrorCode::MissingArtifact,
            "stage2 model missing for group " +
                h.group_map.group_names[size_t(g)] + "; run `train stage2`");
    auto s2 = load_model_file<S>(p.string());
    require(s2.class_labels == classes, ErrorCode::IoError,
            "stage2 bundle labels do not match the group map");
    h.stage2[size_t(g)] = std::make_unique<CnnLstmModel<S>>(std::move(s2.model));
  }
  return h;
}

int cmd_eval(const RunConfig& cfg, bool flat, bool logreg) {
  auto test_m = load_split(cfg, "test");
  fs::create_directories(reports_dir(cfg));
  if (logreg) {
    fs::path p = fs::path(models_dir(cfg)) / "logreg.abjd";
    require(fs::exists(p), ErrorCode::MissingArtifact,
            "logreg model not found; run `train logreg` first");
    std::ifstream in(p.string(), std::ios::binary);
    auto loaded = load_logreg(in);
    std::map<std::string, size_t> idx;
    for (size_t i = 0; i < loaded.class_labels.size(); ++i)
      idx[loaded.class_labels[i]] = i;
    std::string cache_dir = (fs::path(cfg.work_dir) / "cache").string();
    size_t correct = 0;
    for (const auto& e : test_m.entries) {
      auto rec = extract_cached(cfg.corpus_root, e.path, cfg, cache_dir);
      if (loaded.class_labels[argmax(loaded.model.predict_proba(
              rec.vector.values))] == e.label)
        ++correct;
    }
    double acc = double(correct) / double(test_m.entries.size());
    char buf[64];
    std::snprintf(buf, sizeof buf, "logreg_test_accuracy: %.6f\n", acc);
    write_text((fs::path(reports_dir(cfg)) / "eval_logreg.txt").string(), buf);
    std::cout << buf;
    return kExitOk;
  }
  auto samples = load_samples(test_m, cfg);
  if (flat) {
    fs::path p = fs::path(models_dir(cfg)) / "flat.abjd";
    require(fs::exists(p), ErrorCode::MissingArtifact,
            "flat model not found; run `train flat` first");
    auto loaded = load_model_file<double>(p.string());
    FlatModel<double> fm;
    fm.model = std::make_unique<CnnLstmModel<double>>(std::move(loaded.model));
    fm.class_labels = loaded.class_labels;
    auto report = evaluate_flat(fm, samples);
    auto text = serialize_report(report);
    write_text((fs::path(reports_dir(cfg)) / "eval_flat.txt").string(), text);
    std::cout << "flat end-to-end accuracy: " << report.end_to_end_accuracy
              << "\n";
    return kExitOk;
  }
  auto h = load_hierarchy<double>(cfg);
  auto report = evaluate_hierarchy(h, samples);
  auto text = serialize_report(report);
  write_text((fs::path(reports_dir(cfg)) / "eval.txt").string(), text);
  std::cout << text;
  return kExitOk;
}

int cmd_infer(const RunConfig& cfg, const std::string& wav_path) {
  auto h = load_hierarchy<double>(cfg);
  AudioClip clip = preprocess_clip(read_wav_file(wav_path), cfg);
  auto extracted = extract(clip, cfg.window, cfg.features);
  auto pred = predict_two_stage(h, extracted.mfcc);
  std::cout << "group: " << h.group_names[size_t(pred.group)] << " (index "
            << pred.group << ")\n";
  std::cout << "class: " << pred.label << "\n";
  std::cout << "stage1_probs:";
  for (double p : pred.stage1_probs) std::cout << ' ' << p;
  std::cout << "\nstage2_probs:";
  for (double p : pred.stage2_probs) std::cout << ' ' << p;
  std::cout << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical keyword-spotting toolkit for child speech"};
  app.require_subcommand(1);

  CommonArgs common;

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  std::string synth_out = "synth_corpus";
  int classes = 12, groups = 4, speakers = 40, per_class = 50;
  double noise = 0.01;
  int64_t synth_seed = -1;
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--classes", classes);
  synth->add_option("--groups", groups);
  synth->add_option("--speakers", speakers);
  synth->add_option("--per-class", per_class);
  synth->add_option("--noise", noise);
  synth->add_option("--seed", synth_seed);

  // validate
  auto* validate = app.add_subcommand("validate", "manifest + conformance scan");
  bool scan = false;
  add_common(validate, common);
  validate->add_flag("--scan", scan, "read every WAV and flag nonconforming files");

  // prepare
  auto* prep = app.add_subcommand(
      "prepare", "split, augment the train side, extract + cache features");
  add_common(prep, common);

  // group
  auto* group = app.add_subcommand("group", "build the class-to-group map");
  group->require_subcommand(1);
  auto* group_static = group->add_subcommand("static", "articulation table");
  auto* group_dynamic = group->add_subcommand("dynamic", "elbow + k-means");
  CommonArgs gs_args, gd_args;
  add_common(group_static, gs_args);
  add_common(group_dynamic, gd_args);

  // train
  auto* train_cmd = app.add_subcommand("train", "train models");
  train_cmd->require_subcommand(1);
  CommonArgs t1_args, t2_args, tf_args, tl_args;
  auto* train_s1 = train_cmd->add_subcommand("stage1", "group classifier");
  auto* train_s2 = train_cmd->add_subcommand("stage2", "per-group classifiers");
  auto* train_fl = train_cmd->add_subcommand("flat", "single flat classifier");
  auto* train_lr = train_cmd->add_subcommand("logreg", "classical baseline");
  add_common(train_s1, t1_args);
  add_common(train_s2, t2_args);
  add_common(train_fl, tf_args);
  add_common(train_lr, tl_args);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate on the test split");
  CommonArgs ev_args;
  bool eval_flat = false, eval_logreg = false;
  add_common(eval_cmd, ev_args);
  eval_cmd->add_flag("--flat", eval_flat, "evaluate the flat model");
  eval_cmd->add_flag("--logreg", eval_logreg, "evaluate the classical baseline");

  // infer
  auto* infer_cmd = app.add_subcommand("infer", "classify one WAV file");
  CommonArgs in_args;
  std::string wav_path;
  add_common(infer_cmd, in_args);
  infer_cmd->add_option("wav", wav_path, "path to a WAV file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed())
      return cmd_synth(common, synth_out, classes, groups, speakers, per_class,
                       noise, synth_seed);
    if (validate->parsed()) return cmd_validate(resolve_config(common), scan);
    if (prep->parsed()) return cmd_prepare(resolve_config(common));
    if (group_static->parsed()) return cmd_group_static(resolve_config(gs_args));
    if (group_dynamic->parsed()) return cmd_group_dynamic(resolve_config(gd_args));
    if (train_s1->parsed())
      return cmd_train_stage1(resolve_config(t1_args), t1_args.preset_name);
    if (train_s2->parsed())
      return cmd_train_stage2(resolve_config(t2_args), t2_args.preset_name);
    if (train_fl->parsed())
      return cmd_train_flat(resolve_config(tf_args), tf_args.preset_name);
    if (train_lr->parsed()) return cmd_train_logreg(resolve_config(tl_args));
    if (eval_cmd->parsed())
      return cmd_eval(resolve_config(ev_args), eval_flat, eval_logreg);
    if (infer_cmd->parsed()) return cmd_infer(resolve_config(in_args), wav_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
