// Copyright 2026 The CMLA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cmla/cli.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cmla/checkpoint.h"
#include "cmla/embeddings.h"
#include "cmla/lexicon.h"
#include "cmla/metrics.h"
#include "cmla/model.h"
#include "cmla/predict.h"
#include "cmla/semeval.h"
#include "cmla/synthetic.h"
#include "cmla/text.h"
#include "cmla/train.h"

namespace cmla {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string data;
  std::string embeddings;
  std::string lexicon;
  std::string checkpoint;
  std::string predictions;
  std::string input;
  std::string out_dir;
  std::string fixture;
  std::string name;
  std::vector<std::string> exclude_sources;
  std::vector<std::string> words;
  std::size_t dim = 0;
  std::size_t k = 20;
  std::size_t layers = 2;
  double lr = 0.07;
  std::size_t epochs = 30;
  double clip = 5.0;
  std::uint64_t seed = 1;
  std::size_t oov_buckets = 0;
  std::optional<std::uint64_t> synth_seed;
  std::size_t sentences = 0;
  std::size_t top = 5;
  bool quiet = false;
};

std::string Fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

std::string Exact(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

fs::path PrepareOutDir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

void WriteFile(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << contents;
  if (!out) throw DataError("failed writing " + path.string());
}

EmbeddingTable LoadTable(const Options& o, std::ostream& err) {
  LoadedEmbeddings loaded = LoadEmbeddings(o.embeddings);
  if (loaded.duplicates > 0) {
    err << "warning: " << loaded.duplicates << " duplicate words in "
        << o.embeddings << " (last occurrence kept)\n";
  }
  if (o.oov_buckets > 0) loaded.table.set_oov_policy(OovPolicy::HashBucket(o.oov_buckets));
  return std::move(loaded.table);
}

std::vector<Sentence> LoadDataset(const std::string& path, const Options& o,
                                  std::ostream& err) {
  ParseResult parsed = ParseSemEvalXml(path);
  for (const std::string& d : parsed.diagnostics) err << path << ": " << d << '\n';
  if (parsed.skipped_sentences > 0) {
    err << path << ": skipped " << parsed.skipped_sentences << " sentences\n";
  }
  std::vector<Sentence> sentences =
      ExcludeSources(std::move(parsed.sentences), o.exclude_sources);
  if (!o.lexicon.empty()) AnnotateOpinions(sentences, LoadLexicon(o.lexicon));
  return sentences;
}

void AddConfigFile(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Flat key = value file; flags override it")
      ->check(CLI::ExistingFile);
}

// CLI11 reads config files only at the top level, so a subcommand's --config
// is expanded here into --key=value arguments placed ahead of the user's own.
std::vector<std::string> ExpandConfig(const CLI::App& app, std::vector<std::string> args) {
  if (args.empty()) return args;
  const CLI::App* cmd = app.get_subcommand_no_throw(args[0]);
  if (cmd == nullptr) return args;
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (path.empty()) return args;
  if (!fs::is_regular_file(path)) throw CLI::FileError::Missing(path);
  std::vector<std::string> injected;
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_file(path)) {
    const CLI::Option* opt =
        item.parents.empty() ? cmd->get_option_no_throw("--" + item.name) : nullptr;
    if (opt == nullptr || item.name == "config") throw CLI::ConfigError::Extras(item.fullname());
    for (const std::string& value : item.inputs) injected.push_back("--" + item.name + "=" + value);
  }
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

void AddFilter(CLI::App* cmd, Options& o) {
  cmd->add_option("--exclude-source", o.exclude_sources,
                  "Drop sentences whose review id starts with this prefix");
}

int RunTrain(const Options& o, std::ostream& out, std::ostream& err) {
  const EmbeddingTable table = LoadTable(o, err);
  if (o.dim != 0 && o.dim != table.dim()) {
    throw DataError("--dim " + std::to_string(o.dim) + " disagrees with embedding dim " +
                    std::to_string(table.dim()));
  }
  const std::vector<Sentence> sentences = LoadDataset(o.data, o, err);
  const std::vector<Example> examples = MakeExamples(sentences, table);
  if (examples.empty()) throw DataError(o.data + ": no trainable sentences");
  const fs::path dir = PrepareOutDir(o.out_dir);

  ModelConfig config{table.dim(), o.k, o.layers};
  TrainConfig tc;
  tc.lr = o.lr;
  tc.epochs = o.epochs;
  tc.clip = o.clip;
  tc.seed = o.seed + 1;
  tc.on_epoch = [&](std::size_t epoch, double loss) {
    if (!o.quiet) err << "epoch " << epoch + 1 << " loss " << Fixed(loss, 6) << '\n';
    return true;
  };
  TrainResult result = Train(examples, CmlaParams::Init(config, o.seed), tc);

  SaveCheckpoint(dir / "model.ckpt", result.params);
  std::ostringstream trace;
  trace << "epoch\tloss\n";
  for (std::size_t e = 0; e < result.loss_trace.size(); ++e) {
    trace << e + 1 << '\t' << Exact(result.loss_trace[e]) << '\n';
  }
  WriteFile(dir / "loss_trace.tsv", trace.str());

  const CorpusScores scores = ScoreCorpus(result.params, sentences, table);
  out << "trained on " << examples.size() << " sentences for "
      << result.loss_trace.size() << " epochs\n";
  out << MetricsTable(scores, "train");
  out << "checkpoint: " << (dir / "model.ckpt").string() << '\n';
  return kExitOk;
}

int RunEval(const Options& o, std::ostream& out, std::ostream& err) {
  const std::vector<Sentence> gold = LoadDataset(o.data, o, err);
  CorpusScores scores;
  if (!o.predictions.empty()) {
    const std::vector<Sentence> predicted = LoadDataset(o.predictions, o, err);
    try {
      scores = ScoreAnnotated(gold, predicted);
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what());
    }
  } else {
    if (o.checkpoint.empty() || o.embeddings.empty()) {
      throw CLI::ValidationError("eval needs --predictions or --checkpoint with --embeddings");
    }
    const CmlaParams params = LoadCheckpoint(o.checkpoint);
    const EmbeddingTable table = LoadTable(o, err);
    if (table.dim() != params.config.dim) {
      throw DataError("embedding dim " + std::to_string(table.dim()) +
                      " does not match checkpoint dim " +
                      std::to_string(params.config.dim));
    }
    scores = ScoreCorpus(params, gold, table);
  }
  const std::string name = o.name.empty() ? fs::path(o.data).stem().string() : o.name;
  const std::string table_text = MetricsTable(scores, name);
  const std::string tsv = MetricsTsv(scores);
  out << table_text;
  if (!o.out_dir.empty()) {
    const fs::path dir = PrepareOutDir(o.out_dir);
    WriteFile(dir / "metrics.tsv", tsv);
    WriteFile(dir / "metrics.txt", table_text);
  }
  return kExitOk;
}

std::string SpanList(const Sentence& s, const std::vector<Span>& spans) {
  std::string text;
  for (const Span& span : spans) {
    if (!text.empty()) text += ", ";
    text += s.SpanText(span) + " [" + std::to_string(span.start) + "," +
            std::to_string(span.end) + ")";
  }
  return text.empty() ? "-" : text;
}

int RunPredict(const Options& o, std::istream& in, std::ostream& out,
               std::ostream& err) {
  const CmlaParams params = LoadCheckpoint(o.checkpoint);
  const EmbeddingTable table = LoadTable(o, err);
  if (table.dim() != params.config.dim) {
    throw DataError("embedding dim " + std::to_string(table.dim()) +
                    " does not match checkpoint dim " + std::to_string(params.config.dim));
  }
  std::ifstream file;
  std::istream* source = &in;
  if (!o.input.empty() && o.input != "-") {
    file.open(o.input);
    if (!file) throw DataError("cannot open " + o.input);
    source = &file;
  }

  std::ostringstream report;
  std::string line;
  std::size_t count = 0;
  while (std::getline(*source, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Sentence s;
    s.id = "input:" + std::to_string(count);
    s.raw_text = line;
    s.tokens = Tokenize(line);
    if (s.tokens.empty()) continue;
    ++count;
    const Prediction pred = Predict(s, table, params);
    report << "# sentence " << count << ": " << s.raw_text << '\n';
    report << "# aspects: " << SpanList(s, pred.aspects) << '\n';
    report << "# opinions: " << SpanList(s, pred.opinions) << '\n';
    report << "# merged:";
    for (MergedTag t : pred.merged) report << ' ' << MergedTagName(t);
    report << '\n';
    report << AttentionTsv(AttentionReport(s, pred)) << '\n';
  }
  out << report.str();
  if (!o.out_dir.empty()) {
    WriteFile(PrepareOutDir(o.out_dir) / "predictions.tsv", report.str());
  }
  return kExitOk;
}

int RunSynth(const Options& o, std::ostream& out) {
  SyntheticConfig config =
      o.fixture.empty() ? SyntheticConfig::Default() : LoadSyntheticConfig(o.fixture);
  if (o.sentences > 0) config.n_sentences = o.sentences;
  if (o.dim > 0) config.dim = o.dim;
  if (o.synth_seed) config.seed = *o.synth_seed;
  const SyntheticCorpus corpus = GenerateSynthetic(config);
  const fs::path dir = PrepareOutDir(o.out_dir);

  std::ostringstream xml, emb, lex;
  WriteSemEvalXml(xml, corpus.sentences);
  WriteEmbeddings(emb, corpus.embeddings);
  for (const std::string& w : corpus.lexicon.entries()) lex << w << '\n';
  WriteFile(dir / "corpus.xml", xml.str());
  WriteFile(dir / "embeddings.txt", emb.str());
  WriteFile(dir / "lexicon.txt", lex.str());

  const DatasetStats stats = ComputeStats(corpus.sentences);
  out << "wrote " << stats.sentences << " sentences (" << stats.aspect_spans
      << " aspect spans, " << stats.opinion_spans << " opinion spans), "
      << corpus.embeddings.size() << " embeddings of dim " << corpus.embeddings.dim()
      << " to " << dir.string() << '\n';
  return kExitOk;
}

int RunInspect(const Options& o, std::ostream& out, std::ostream& err) {
  const EmbeddingTable table = LoadTable(o, err);
  out << "embeddings: " << o.embeddings << '\n';
  out << "vocabulary: " << table.size() << "\ndim: " << table.dim() << '\n';

  if (!o.words.empty()) {
    std::size_t found = 0;
    for (const std::string& w : o.words) {
      auto vec = table.Find(w);
      if (vec.empty()) {
        out << w << "\tOOV\n";
        continue;
      }
      ++found;
      double norm = 0.0;
      for (double x : vec) norm += x * x;
      out << w << "\tfound\tnorm=" << Fixed(std::sqrt(norm), 6) << '\n';
      std::size_t shown = 0;
      for (const Neighbor& n : NearestNeighbors(table, vec, o.top + 1)) {
        if (n.word == w || shown == o.top) continue;
        out << "  " << n.word << '\t' << Fixed(n.cosine, 6) << '\n';
        ++shown;
      }
    }
    out << "query coverage: " << Fixed(100.0 * found / o.words.size(), 2) << "%\n";
  }

  if (!o.data.empty()) {
    const std::vector<Sentence> sentences = LoadDataset(o.data, o, err);
    const DatasetStats stats = ComputeStats(sentences);
    std::size_t covered = 0;
    for (const Sentence& s : sentences) {
      for (const Token& t : s.tokens) covered += table.Contains(t.text) ? 1 : 0;
    }
    out << "dataset: " << o.data << '\n';
    out << "sentences: " << stats.sentences << "\ntokens: " << stats.tokens
        << "\naspect spans: " << stats.aspect_spans
        << "\nopinion spans: " << stats.opinion_spans
        << "\nsentences without aspects: " << stats.sentences_without_aspects << '\n';
    out << "token coverage: "
        << Fixed(stats.tokens == 0 ? 0.0 : 100.0 * covered / stats.tokens, 2) << "%\n";
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::istream& in,
           std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Coupled multi-layer attention aspect and opinion extraction", "cmla"};
  app.require_subcommand(1);

  CLI::App* train = app.add_subcommand("train", "Train a model and write a checkpoint");
  AddConfigFile(train, o);
  train->add_option("--data", o.data, "SemEval XML training file")
      ->required()->check(CLI::ExistingFile);
  train->add_option("--embeddings", o.embeddings, "Text embedding file")
      ->required()->check(CLI::ExistingFile);
  train->add_option("--lexicon", o.lexicon, "Opinion word list")->check(CLI::ExistingFile);
  train->add_option("--out", o.out_dir, "Output directory")->required();
  train->add_option("--dim", o.dim, "Expected embedding dimension");
  train->add_option("--k", o.k, "Compositions per prototype")->check(CLI::PositiveNumber);
  train->add_option("--layers", o.layers, "Attention layers")->check(CLI::PositiveNumber);
  train->add_option("--lr", o.lr, "SGD learning rate")->check(CLI::PositiveNumber);
  train->add_option("--epochs", o.epochs, "Training epochs");
  train->add_option("--clip", o.clip, "Gradient norm cap (<= 0 disables)");
  train->add_option("--seed", o.seed, "Random seed");
  train->add_option("--oov-buckets", o.oov_buckets, "Hash OOV words into N buckets");
  train->add_flag("--quiet", o.quiet, "No per-epoch log");
  AddFilter(train, o);

  CLI::App* eval = app.add_subcommand("eval", "Score predictions against gold spans");
  AddConfigFile(eval, o);
  eval->add_option("--data", o.data, "Gold SemEval XML file")
      ->required()->check(CLI::ExistingFile);
  eval->add_option("--lexicon", o.lexicon, "Opinion word list")->check(CLI::ExistingFile);
  eval->add_option("--checkpoint", o.checkpoint, "Model checkpoint")->check(CLI::ExistingFile);
  eval->add_option("--embeddings", o.embeddings, "Text embedding file")
      ->check(CLI::ExistingFile);
  eval->add_option("--predictions", o.predictions, "Predicted SemEval XML file")
      ->check(CLI::ExistingFile)->excludes("--checkpoint");
  eval->add_option("--oov-buckets", o.oov_buckets, "Hash OOV words into N buckets");
  eval->add_option("--name", o.name, "Dataset label in the table");
  eval->add_option("--out", o.out_dir, "Directory for metrics.tsv and metrics.txt");
  AddFilter(eval, o);

  CLI::App* predict = app.add_subcommand("predict", "Tag sentences, one per input line");
  AddConfigFile(predict, o);
  predict->add_option("--checkpoint", o.checkpoint, "Model checkpoint")
      ->required()->check(CLI::ExistingFile);
  predict->add_option("--embeddings", o.embeddings, "Text embedding file")
      ->required()->check(CLI::ExistingFile);
  predict->add_option("--input", o.input, "Sentence file; '-' or absent reads stdin");
  predict->add_option("--oov-buckets", o.oov_buckets, "Hash OOV words into N buckets");
  predict->add_option("--out", o.out_dir, "Directory for predictions.tsv");

  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic fixture corpus");
  AddConfigFile(synth, o);
  synth->add_option("--fixture", o.fixture, "Synthetic fixture definition")
      ->check(CLI::ExistingFile);
  synth->add_option("--sentences", o.sentences, "Number of sentences");
  synth->add_option("--dim", o.dim, "Embedding dimension");
  synth->add_option("--seed", o.synth_seed, "Random seed (fixture value, else 42)");
  synth->add_option("--out", o.out_dir, "Output directory")->required();

  CLI::App* inspect = app.add_subcommand("inspect", "Report on an embedding file");
  AddConfigFile(inspect, o);
  inspect->add_option("--embeddings", o.embeddings, "Text embedding file")
      ->required()->check(CLI::ExistingFile);
  inspect->add_option("words", o.words, "Query words");
  inspect->add_option("--top", o.top, "Neighbors per query word");
  inspect->add_option("--data", o.data, "SemEval XML file for coverage statistics")
      ->check(CLI::ExistingFile);
  inspect->add_option("--lexicon", o.lexicon, "Opinion word list")->check(CLI::ExistingFile);
  AddFilter(inspect, o);

  for (CLI::App* cmd : app.get_subcommands({})) {
    for (CLI::Option* opt : cmd->get_options()) {
      if (opt->get_items_expected_max() == 1) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
  }

  std::vector<std::string> expanded;
  std::vector<const char*> argv{"cmla"};
  try {
    expanded = ExpandConfig(app, args);
    for (const std::string& a : expanded) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    err << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (train->parsed()) return RunTrain(o, out, err);
    if (eval->parsed()) return RunEval(o, out, err);
    if (predict->parsed()) return RunPredict(o, in, out, err);
    if (synth->parsed()) return RunSynth(o, out);
    if (inspect->parsed()) return RunInspect(o, out, err);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const ShapeError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace cmla
