// Copyright 2026 The spokenvec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "spokenvec/cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "spokenvec/cli/gradcheck.hpp"
#include "spokenvec/cli/settings.hpp"
#include "spokenvec/corpus.hpp"
#include "spokenvec/embeddings.hpp"
#include "spokenvec/error.hpp"
#include "spokenvec/features.hpp"
#include "spokenvec/mfcc.hpp"
#include "spokenvec/parallel.hpp"
#include "spokenvec/text.hpp"
#include "spokenvec/trainer.hpp"
#include "spokenvec/wav.hpp"
#include "spokenvec/wordsim.hpp"

namespace spokenvec::cli {
namespace {

namespace fs = std::filesystem;
using train::Precision;

std::string format(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// Shortest text that parses back to the same double.
std::string exact(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

// ---------------------------------------------------------------- settings

void declare_common(Settings& s) {
  s.declare("threads", "1");
  s.declare("deterministic", "false");
}

int resolved_threads(const Settings& s) {
  const int n = s.integer("threads");
  if (n < 1) throw ConfigError("threads must be >= 1");
  return n;
}

void declare_mfcc(Settings& s) {
  const dsp::MfccConfig d;
  s.declare("mfcc.frame_length", exact(d.frame_length));
  s.declare("mfcc.frame_hop", exact(d.frame_hop));
  s.declare("mfcc.num_coefficients", std::to_string(d.num_coefficients));
  s.declare("mfcc.num_mel_filters", std::to_string(d.num_mel_filters));
  s.declare("mfcc.pre_emphasis", exact(d.pre_emphasis));
  s.declare("mfcc.fft_size", std::to_string(d.fft_size));
  s.declare("mfcc.log_floor", exact(d.log_floor));
}

dsp::MfccConfig mfcc_config(const Settings& s) {
  dsp::MfccConfig c;
  c.frame_length = s.real("mfcc.frame_length");
  c.frame_hop = s.real("mfcc.frame_hop");
  c.num_coefficients = s.integer("mfcc.num_coefficients");
  c.num_mel_filters = s.integer("mfcc.num_mel_filters");
  c.pre_emphasis = s.real("mfcc.pre_emphasis");
  c.fft_size = s.integer("mfcc.fft_size");
  c.log_floor = s.real("mfcc.log_floor");
  return c;
}

void declare_model(Settings& s, const nn::ModelConfig& d, bool with_input_dim) {
  if (with_input_dim) s.declare("model.input_dim", std::to_string(d.input_dim));
  s.declare("model.hidden_size", std::to_string(d.hidden_size));
  s.declare("model.encoder_layers", std::to_string(d.encoder_layers));
  s.declare("model.loss", "per-frame");
  s.declare("model.teacher_forcing", d.teacher_forcing ? "true" : "false");
}

nn::ModelConfig model_config(const Settings& s, bool with_input_dim) {
  nn::ModelConfig m;
  if (with_input_dim) m.input_dim = s.integer("model.input_dim");
  m.hidden_size = s.integer("model.hidden_size");
  m.encoder_layers = s.integer("model.encoder_layers");
  const auto loss = s.text("model.loss");
  if (loss == "per-frame") {
    m.loss = nn::LossNormalization::kPerFrame;
  } else if (loss == "raw-sum") {
    m.loss = nn::LossNormalization::kRawSum;
  } else {
    throw ConfigError("model.loss must be per-frame or raw-sum, got '" + loss + "'");
  }
  m.teacher_forcing = s.boolean("model.teacher_forcing");
  m.validate();
  return m;
}

void declare_train(Settings& s) {
  const train::TrainConfig d;
  s.declare("train.learning_rate", exact(d.learning_rate));
  s.declare("train.epochs", std::to_string(d.epochs));
  s.declare("train.k", std::to_string(d.k));
  s.declare("train.batch_size", std::to_string(d.batch_size));
  s.declare("train.grad_clip_norm", exact(*d.grad_clip_norm));
  s.declare("train.seed", std::to_string(d.seed));
  s.declare("train.precision", train::to_string(d.precision));
  s.declare("train.checkpoint_every", "25");
}

train::TrainConfig train_config(const Settings& s) {
  train::TrainConfig c;
  c.learning_rate = s.real("train.learning_rate");
  c.epochs = s.integer("train.epochs");
  c.k = s.integer("train.k");
  c.batch_size = s.integer("train.batch_size");
  c.grad_clip_norm = s.optional_real("train.grad_clip_norm");
  c.seed = s.unsigned_integer("train.seed");
  c.precision = train::parse_precision(s.text("train.precision"));
  // A single worker keeps the gradient reduction order independent of
  // --threads.
  c.threads = s.boolean("deterministic") ? 1 : resolved_threads(s);
  if (c.k < 1) throw ConfigError("train.k must be >= 1");
  c.validate();
  return c;
}

fs::path required_path(const Settings& s, std::string_view key) {
  const auto& p = s.text(key);
  if (p.empty()) throw ConfigError(std::string(key) + " is required");
  return p;
}

fs::path manifest_path(const Settings& s) {
  const auto& m = s.text("manifest");
  return m.empty() ? required_path(s, "features_dir") / "manifest.tsv" : fs::path(m);
}

std::vector<corpus::ManifestRow> read_manifest_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest " + path.string());
  return corpus::read_manifest(in);
}

void write_atomically(const fs::path& path, const std::string& bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

// ---------------------------------------------------------------- features

int cmd_features(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto audio_dir = required_path(s, "audio_dir");
  const auto out_dir = required_path(s, "out_dir");
  const bool force = s.boolean("force");
  const auto config = mfcc_config(s);
  const auto cap = s.unsigned_integer("corpus.length_cap");
  const int threads = resolved_threads(s);
  if (!fs::is_directory(audio_dir)) {
    throw InputError("audio directory " + audio_dir.string() + " does not exist");
  }

  std::map<std::string, corpus::UtteranceAlignment> alignments;
  std::vector<std::string> aligned_order;
  if (!s.text("alignments").empty()) {
    std::ifstream in(s.text("alignments"));
    if (!in) throw InputError("cannot open alignments " + s.text("alignments"));
    for (auto& u : corpus::load_alignments(in)) {
      aligned_order.push_back(u.utterance_id);
      alignments.emplace(u.utterance_id, std::move(u));
    }
  }

  std::vector<fs::path> wavs;
  for (const auto& entry : fs::directory_iterator(audio_dir)) {
    if (entry.is_regular_file() && text::to_lower(entry.path().extension().string()) == ".wav") {
      wavs.push_back(entry.path());
    }
  }
  std::sort(wavs.begin(), wavs.end());
  fs::create_directories(out_dir);

  struct Outcome {
    bool skipped = false;
    std::string error;
    corpus::ExcisionResult excision;
  };
  std::vector<Outcome> outcomes(wavs.size());
  parallel_for(wavs.size(), threads, [&](std::size_t i) {
    auto& o = outcomes[i];
    const auto id = wavs[i].stem().string();
    const auto cache = out_dir / (id + ".a2vf");
    try {
      FeatureSequence features;
      bool have = false;
      if (!force && fs::exists(cache) &&
          fs::last_write_time(cache) >= fs::last_write_time(wavs[i])) {
        try {
          features = dsp::read_feature_cache(cache);
          have = o.skipped = true;
        } catch (const FormatError&) {
        }
      }
      if (!have) {
        features = dsp::extract_mfcc(dsp::read_wav(wavs[i]), config);
        if (features.length() == 0) throw InputError("audio shorter than one frame");
        dsp::write_feature_cache(cache, features);
      }
      auto it = alignments.find(id);
      if (it != alignments.end()) {
        o.excision = corpus::excise_segments(features, it->second.entries, config.frame_hop, cap);
      }
    } catch (const std::exception& e) {
      o.error = e.what();
    }
  });

  std::vector<corpus::ManifestRow> rows;
  std::size_t failed = 0, skipped = 0, dropped = 0, over_cap = 0;
  for (std::size_t i = 0; i < wavs.size(); ++i) {
    const auto& o = outcomes[i];
    if (!o.error.empty()) {
      ++failed;
      err << "error: ";
      if (o.error.find(wavs[i].string()) == std::string::npos) err << wavs[i].string() << ": ";
      err << o.error << '\n';
      continue;
    }
    skipped += o.skipped;
    dropped += o.excision.dropped_empty;
    over_cap += o.excision.over_length_cap;
    for (const auto& seg : o.excision.segments) rows.push_back(corpus::manifest_row(seg));
  }
  std::size_t missing_audio = 0;
  for (const auto& id : aligned_order) {
    const bool found = std::any_of(wavs.begin(), wavs.end(),
                                   [&](const fs::path& p) { return p.stem().string() == id; });
    missing_audio += !found;
  }

  std::ostringstream manifest;
  corpus::write_manifest(manifest, rows);
  write_atomically(out_dir / "manifest.tsv", manifest.str());

  out << format("utterances\t%zu\nreused\t%zu\nfailed\t%zu\nsegments\t%zu\n", wavs.size(), skipped,
                failed, rows.size());
  if (dropped > 0) err << "warning: " << dropped << " empty segments dropped\n";
  if (over_cap > 0) err << "warning: " << over_cap << " segments exceed " << cap << " frames\n";
  if (missing_audio > 0) {
    err << "warning: " << missing_audio << " aligned utterances have no audio file\n";
  }
  return failed > 0 ? kExitInvalid : kExitOk;
}

// ---------------------------------------------------------------- train

template <typename S>
int train_with(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto ckpt = required_path(s, "out");
  const auto rows = read_manifest_file(manifest_path(s));
  auto data = corpus::load_corpus(required_path(s, "features_dir"), rows);
  if (data.segments.empty()) throw InputError("manifest lists no segments");

  train::TrainState<S> state;
  if (!s.text("resume").empty()) {
    train::CheckpointInfo info;
    state = train::load_checkpoint<S>(s.text("resume"), &info);
    if (state.model.input_dim != data.feature_dim()) {
      throw ContractViolation("checkpoint expects " + std::to_string(state.model.input_dim) +
                              "-dim features, corpus has " + std::to_string(data.feature_dim()));
    }
    const auto cfg = train_config(s);
    state.config.epochs = cfg.epochs;
    state.config.threads = cfg.threads;
    state.config.validate();
    err << "# resumed from " << s.text("resume") << " at epoch " << state.epoch
        << "; model and training settings come from the checkpoint\n";
  } else {
    auto model = model_config(s, false);
    model.input_dim = static_cast<int>(data.feature_dim());
    const auto cfg = train_config(s);
    auto stats = corpus::compute_normalization(
        std::span<const corpus::WordSegment>(data.segments), cfg.threads);
    state = train::initial_state<S>(model, cfg, std::move(stats));
  }
  err << "# effective\n" << train::format_config(state.model, state.config);

  for (auto& seg : data.segments) seg.features = state.normalization.apply(seg.features);
  const auto built = corpus::build_skipgram_examples(data.utterances, state.config.k);
  if (built.examples.empty()) throw InputError("no segment has a neighbour; nothing to train");
  const auto views = train::example_views(built.examples, data.segments);
  err << "# segments " << data.segments.size() << ", examples " << views.size()
      << ", isolated " << built.isolated_segments << '\n';

  std::ofstream log;
  if (!s.text("log").empty()) {
    log.open(s.text("log"), state.epoch > 0 ? std::ios::app : std::ios::trunc);
    if (!log) throw InputError("cannot write log " + s.text("log"));
  }
  const int every = s.integer("train.checkpoint_every");
  if (every < 1) throw ConfigError("train.checkpoint_every must be >= 1");

  int saved_epoch = -1;
  train::TrainHooks<S> hooks;
  hooks.on_epoch = [&](const train::EpochStats& e) {
    const auto line = format("%d\t%.9g\t%.3f\n", e.epoch, e.mean_loss, e.wall_seconds);
    out << line << std::flush;
    if (log.is_open()) log << line << std::flush;
  };
  hooks.on_state = [&](const train::TrainState<S>& st) {
    if (st.epoch % every == 0 || st.epoch == st.config.epochs) {
      train::save_checkpoint(st, ckpt);
      saved_epoch = st.epoch;
    }
  };
  try {
    if (state.epoch >= state.config.epochs) {
      train::save_checkpoint(state, ckpt);
    } else {
      (void)train::train<S>(views, std::move(state), hooks);
    }
  } catch (const train::TrainingDiverged& e) {
    err << "error: " << e.what() << '\n';
    if (saved_epoch >= 0) {
      err << "last good checkpoint: " << ckpt.string() << " (epoch " << saved_epoch << ")\n";
    } else {
      err << "no checkpoint was written before the failure\n";
    }
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_train(const Settings& s, std::ostream& out, std::ostream& err) {
  Precision p = train::parse_precision(s.text("train.precision"));
  if (!s.text("resume").empty()) p = train::checkpoint_precision(s.text("resume"));
  return p == Precision::kF32 ? train_with<float>(s, out, err) : train_with<double>(s, out, err);
}

// ---------------------------------------------------------------- export

template <typename S>
embed::WordVectorTable export_with(const Settings& s, const corpus::Corpus& data) {
  const auto state = train::load_checkpoint<S>(required_path(s, "checkpoint"));
  const int batch = s.integer("embed.batch_size");
  if (batch < 1) throw ConfigError("embed.batch_size must be >= 1");
  return embed::average_by_word(embed::encode_corpus(
      state.params, state.normalization, std::span<const corpus::WordSegment>(data.segments),
      resolved_threads(s), batch));
}

int cmd_export(const Settings& s, std::ostream& out, std::ostream&) {
  const auto ckpt = required_path(s, "checkpoint");
  const auto dest = required_path(s, "out");
  const auto data =
      corpus::load_corpus(required_path(s, "features_dir"), read_manifest_file(manifest_path(s)));
  const auto table = train::checkpoint_precision(ckpt) == Precision::kF32
                         ? export_with<float>(s, data)
                         : export_with<double>(s, data);
  std::ostringstream text;
  embed::export_table(table, text);
  write_atomically(dest, text.str());
  out << format("words\t%zu\ndimension\t%d\nsegments\t%zu\n", table.size(), table.dimension(),
                data.segments.size());
  return kExitOk;
}

// ---------------------------------------------------------------- eval

int cmd_eval(const Settings& s, std::ostream& out, std::ostream& err) {
  embed::ImportStats stats;
  const auto table = embed::import_table(required_path(s, "vectors"), &stats);
  if (stats.case_collisions > 0) {
    err << "warning: " << stats.case_collisions
        << " words collide after lowercasing; the first occurrence was kept\n";
  }
  const auto entries = wordsim::load_manifest(required_path(s, "benchmarks"));

  struct Outcome {
    std::optional<wordsim::EvalResult> result;
    std::string error;
    std::string warning;
  };
  std::vector<Outcome> outcomes(entries.size());
  parallel_for(entries.size(), resolved_threads(s), [&](std::size_t i) {
    const auto& e = entries[i];
    auto& o = outcomes[i];
    try {
      const auto pairs = wordsim::load_benchmark(e.path);
      auto expected = e.expected_pairs;
      if (!expected) {
        for (const auto& c : wordsim::canonical_benchmarks()) {
          if (e.name == c.name) expected = c.table_pairs;
        }
      }
      if (expected && *expected != pairs.size()) {
        o.warning = format("%zu pairs in file, %zu expected", pairs.size(), *expected);
      }
      o.result = wordsim::evaluate(table, pairs, e.name);
    } catch (const std::exception& ex) {
      o.error = ex.what();
    }
  });

  std::vector<wordsim::EvalResult> results;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& o = outcomes[i];
    if (!o.warning.empty()) err << "warning: " << entries[i].name << ": " << o.warning << '\n';
    if (o.result) {
      results.push_back(*o.result);
    } else {
      ++failed;
      err << "error: " << entries[i].name << ": " << o.error << '\n';
    }
  }
  out << wordsim::report_text(results);
  if (!s.text("tsv").empty()) write_atomically(s.text("tsv"), wordsim::report_tsv(results));
  return failed > 0 ? kExitInvalid : kExitOk;
}

// ---------------------------------------------------------------- gradcheck

int cmd_gradcheck(const Settings& s, std::ostream& out, std::ostream&) {
  GradcheckOptions o;
  o.model = model_config(s, true);
  o.k = s.integer("train.k");
  o.max_length = s.integer("gradcheck.max_length");
  o.epsilon = s.real("gradcheck.epsilon");
  if (o.k < 1 || o.max_length < 1 || o.epsilon <= 0) {
    throw ConfigError("train.k, gradcheck.max_length and gradcheck.epsilon must be positive");
  }
  const auto first = s.unsigned_integer("gradcheck.seed");
  const auto count = s.unsigned_integer("gradcheck.seeds");
  const double threshold = s.real("gradcheck.threshold");
  const bool perturb = s.boolean("gradcheck.perturb");
  if (count < 1) throw ConfigError("gradcheck.seeds must be >= 1");

  std::vector<nn::FiniteDifferenceReport> reports(count);
  parallel_for(count, resolved_threads(s), [&](std::size_t i) {
    reports[i] = run_gradcheck(make_gradcheck_instance(o, first + i), o.epsilon, perturb);
  });
  double worst = 0;
  out << "seed\tmax_rel_error\tparameter\tanalytic\tnumeric\n";
  for (std::size_t i = 0; i < count; ++i) {
    const auto& r = reports[i];
    worst = std::max(worst, r.max_relative_error);
    out << format("%llu\t%.3e\t", static_cast<unsigned long long>(first + i),
                  r.max_relative_error)
        << r.worst_parameter << format("\t%.9e\t%.9e\n", r.analytic_at_worst, r.numeric_at_worst);
  }
  const bool pass = worst < threshold;
  out << format("max relative error %.3e over %llu seeds (threshold %g): %s\n", worst,
                static_cast<unsigned long long>(count), threshold, pass ? "PASS" : "FAIL");
  return pass ? kExitOk : kExitNumerical;
}

// ---------------------------------------------------------------- wiring

struct Command {
  CLI::App* app = nullptr;
  Settings settings;
  int (*handler)(const Settings&, std::ostream&, std::ostream&) = nullptr;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<std::string> sets;
  std::string config_path;
  bool faithful = false;

  void option(const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { overrides.emplace_back(key, v); }, help)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }
  void flag(const std::string& name, const std::string& key, const std::string& help) {
    app->add_flag_callback(name, [this, key] { overrides.emplace_back(key, "true"); }, help);
  }
  void common() {
    declare_common(settings);
    app->add_option("--config", config_path, "flat key = value settings file");
    app->add_option("--set", sets, "override any setting as key=value");
    option("--threads", "threads", "worker threads");
    flag("--deterministic", "deterministic", "results independent of --threads");
  }
};

Settings resolve(Command& c) {
  auto s = c.settings;
  if (!c.config_path.empty()) s.load_file(c.config_path);
  if (c.faithful) {
    s.set("model.loss", "raw-sum");
    s.set("train.grad_clip_norm", "none");
  }
  for (const auto& [k, v] : c.overrides) s.set(k, v);
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    s.set(text::trim(std::string_view(kv).substr(0, eq)),
          std::string(text::trim(std::string_view(kv).substr(eq + 1))));
  }
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Acoustic word embeddings: features, training, export, evaluation.", "spokenvec");
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Command>> commands;
  auto add = [&](const char* name, const char* help, auto handler) {
    auto c = std::make_unique<Command>();
    c->app = app.add_subcommand(name, help);
    c->handler = handler;
    commands.push_back(std::move(c));
    return commands.back().get();
  };

  auto* features = add("features", "extract MFCC feature caches and the segment manifest",
                       &cmd_features);
  features->settings.declare("audio_dir", "");
  features->settings.declare("alignments", "");
  features->settings.declare("out_dir", "");
  features->settings.declare("force", "false");
  declare_mfcc(features->settings);
  features->settings.declare("corpus.length_cap", std::to_string(corpus::kDefaultSegmentLengthCap));
  features->common();
  features->option("--audio-dir", "audio_dir", "directory of <utterance_id>.wav files");
  features->option("--alignments", "alignments", "word alignment TSV");
  features->option("--out-dir", "out_dir", "output directory for caches and manifest.tsv");
  features->flag("--force", "force", "recompute caches that are up to date");

  auto* train = add("train", "train the model and write a checkpoint", &cmd_train);
  for (const char* k : {"features_dir", "manifest", "out", "log", "resume"}) {
    train->settings.declare(k, "");
  }
  declare_model(train->settings, nn::ModelConfig{}, false);
  declare_train(train->settings);
  train->common();
  train->option("--features-dir", "features_dir", "directory of feature caches");
  train->option("--manifest", "manifest", "segment manifest (default <features-dir>/manifest.tsv)");
  train->option("--out", "out", "checkpoint path");
  train->option("--log", "log", "also append the training log to this file");
  train->option("--resume", "resume", "continue from a checkpoint");
  train->option("--epochs", "train.epochs", "number of epochs");
  train->option("--lr", "train.learning_rate", "learning rate");
  train->option("--k", "train.k", "skip-gram window");
  train->option("--batch-size", "train.batch_size", "examples per batch");
  train->option("--seed", "train.seed", "random seed");
  train->option("--precision", "train.precision", "f32 or f64");
  train->option("--hidden-size", "model.hidden_size", "LSTM width");
  train->option("--encoder-layers", "model.encoder_layers", "encoder depth");
  train->option("--checkpoint-every", "train.checkpoint_every", "epochs between checkpoints");
  train->app->add_flag("--faithful", train->faithful,
                       "no gradient clipping and raw-sum loss");

  auto* exp = add("export", "encode every segment and write per-word vectors", &cmd_export);
  for (const char* k : {"checkpoint", "features_dir", "manifest", "out"}) {
    exp->settings.declare(k, "");
  }
  exp->settings.declare("embed.batch_size", "64");
  exp->common();
  exp->option("--checkpoint", "checkpoint", "trained checkpoint");
  exp->option("--features-dir", "features_dir", "directory of feature caches");
  exp->option("--manifest", "manifest", "segment manifest (default <features-dir>/manifest.tsv)");
  exp->option("--out", "out", "word-vector text file to write");

  auto* eval = add("eval", "score word vectors on similarity benchmarks", &cmd_eval);
  for (const char* k : {"vectors", "benchmarks", "tsv"}) eval->settings.declare(k, "");
  eval->common();
  eval->option("--vectors", "vectors", "word-vector text file");
  eval->option("--benchmarks", "benchmarks", "benchmark manifest (name<TAB>path<TAB>pairs)");
  eval->option("--tsv", "tsv", "also write the report as TSV");

  auto* grad = add("gradcheck", "compare analytic and finite-difference gradients",
                   &cmd_gradcheck);
  declare_model(grad->settings, GradcheckOptions{}.model, true);
  grad->settings.declare("train.k", "2");
  grad->settings.declare("gradcheck.max_length", "4");
  grad->settings.declare("gradcheck.seed", "0");
  grad->settings.declare("gradcheck.seeds", "1");
  grad->settings.declare("gradcheck.epsilon", "1e-05");
  grad->settings.declare("gradcheck.threshold", "1e-06");
  grad->settings.declare("gradcheck.perturb", "false");
  grad->common();
  grad->option("--seed", "gradcheck.seed", "first seed");
  grad->option("--seeds", "gradcheck.seeds", "number of consecutive seeds");
  grad->option("--epsilon", "gradcheck.epsilon", "finite-difference step");
  grad->option("--threshold", "gradcheck.threshold", "maximum allowed relative error");
  grad->flag("--perturb", "gradcheck.perturb", "corrupt the analytic gradient (detector test)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  for (auto& c : commands) {
    if (!c->app->parsed()) continue;
    try {
      const auto settings = resolve(*c);
      err << "# resolved config: " << c->app->get_name() << '\n' << settings.dump();
      return c->handler(settings, out, err);
    } catch (const NumericalError& e) {
      err << "error: " << e.what() << '\n';
      return kExitNumerical;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitInvalid;
    }
  }
  return kExitInvalid;
}

}  // namespace spokenvec::cli
