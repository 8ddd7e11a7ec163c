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

#include "cmla/synthetic.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "cmla/semeval.h"
#include "cmla/text.h"

namespace cmla {
namespace {

constexpr std::string_view kAspectSlot = "ASPECT";
constexpr std::string_view kOpinionSlot = "OPINION";

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> SplitList(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t comma = value.find(',', start);
    if (comma == std::string_view::npos) comma = value.size();
    std::string_view item = Trim(value.substr(start, comma - start));
    if (!item.empty()) out.emplace_back(item);
    start = comma + 1;
  }
  return out;
}

}  // namespace

SyntheticConfig SyntheticConfig::Default() {
  SyntheticConfig c;
  c.templates = {
      "the ASPECT was OPINION",
      "OPINION ASPECT and OPINION ASPECT",
      "we thought the ASPECT was really OPINION today",
      "ASPECT is OPINION but the ASPECT is OPINION",
      "a OPINION ASPECT , nothing more",
  };
  c.aspects = {"food",   "service", "staff", "terrace", "location",
               "wine list", "sea view", "pizza", "dessert", "waiter"};
  c.opinions = {"great", "awful", "delicious", "friendly", "rude",
                "lovely", "cold", "excellent", "slow", "nice"};
  return c;
}

void SyntheticConfig::Validate() const {
  if (templates.empty() || aspects.empty() || opinions.empty()) {
    throw std::invalid_argument("synthetic config needs templates, aspects and opinions");
  }
  if (dim == 0) throw std::invalid_argument("synthetic dim must be positive");
  if (!(scale > 0)) throw std::invalid_argument("synthetic scale must be positive");
  for (const std::string& t : templates) {
    auto words = SplitWords(t);
    const bool has_aspect = std::find(words.begin(), words.end(), kAspectSlot) != words.end();
    const bool has_opinion = std::find(words.begin(), words.end(), kOpinionSlot) != words.end();
    if (!has_aspect || !has_opinion) {
      throw std::invalid_argument("template \"" + t + "\" lacks an ASPECT or OPINION slot");
    }
  }
}

SyntheticCorpus GenerateSynthetic(const SyntheticConfig& config) {
  config.Validate();
  Rng rng(config.seed);
  SyntheticCorpus corpus;

  std::set<std::string> vocabulary;
  for (const std::string& t : config.templates) {
    for (const std::string& w : SplitWords(t)) {
      if (w != kAspectSlot && w != kOpinionSlot) {
        for (const Token& tok : Tokenize(w)) vocabulary.insert(Lowercase(tok.text));
      }
    }
  }
  for (const auto* list : {&config.aspects, &config.opinions}) {
    for (const std::string& entry : *list) {
      for (const Token& tok : Tokenize(entry)) vocabulary.insert(Lowercase(tok.text));
    }
  }

  for (std::size_t i = 0; i < config.n_sentences; ++i) {
    const std::string& tmpl = config.templates[rng.Index(config.templates.size())];
    std::string text;
    std::vector<CharSpan> aspect_chars, opinion_chars;
    std::size_t position = 0;  // code points written so far
    for (const std::string& word : SplitWords(tmpl)) {
      if (!text.empty()) {
        text.push_back(' ');
        ++position;
      }
      std::string filler = word;
      std::vector<CharSpan>* target = nullptr;
      if (word == kAspectSlot) {
        filler = config.aspects[rng.Index(config.aspects.size())];
        target = &aspect_chars;
      } else if (word == kOpinionSlot) {
        filler = config.opinions[rng.Index(config.opinions.size())];
        target = &opinion_chars;
      }
      const std::size_t len = CodePointLength(filler);
      if (target) target->push_back({position, position + len});
      text += filler;
      position += len;
    }

    Sentence s;
    s.id = "synthetic:" + std::to_string(i);
    s.source_id = "synthetic-review-" + std::to_string(i / 5);
    s.raw_text = std::move(text);
    s.tokens = Tokenize(s.raw_text);
    s.aspect_spans = AlignSpans(aspect_chars, s.tokens, Head::kAspect).spans;
    s.opinion_spans = AlignSpans(opinion_chars, s.tokens, Head::kOpinion).spans;
    std::sort(s.aspect_spans.begin(), s.aspect_spans.end());
    std::sort(s.opinion_spans.begin(), s.opinion_spans.end());
    corpus.sentences.push_back(std::move(s));
  }

  corpus.embeddings = RandomEmbeddings(
      std::vector<std::string>(vocabulary.begin(), vocabulary.end()), config.dim,
      config.scale, config.seed ^ 0x5eed5eed5eed5eedULL);
  corpus.lexicon = OpinionLexicon(config.opinions);
  return corpus;
}

SyntheticConfig ReadSyntheticConfig(std::istream& in, std::string_view name) {
  SyntheticConfig config = SyntheticConfig::Default();
  bool templates_seen = false;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    return DataError(std::string(name) + ":" + std::to_string(line_no) + ": " + what);
  };
  auto parse_size = [&](std::string_view v, auto& out) {
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw fail("invalid number \"" + std::string(v) + "\"");
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = Trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw fail("expected key = value");
    const std::string_view key = Trim(text.substr(0, eq));
    const std::string_view value = Trim(text.substr(eq + 1));
    if (key == "sentences") {
      parse_size(value, config.n_sentences);
    } else if (key == "seed") {
      parse_size(value, config.seed);
    } else if (key == "dim") {
      parse_size(value, config.dim);
    } else if (key == "scale") {
      parse_size(value, config.scale);
    } else if (key == "template") {
      if (!templates_seen) config.templates.clear();
      templates_seen = true;
      config.templates.emplace_back(value);
    } else if (key == "aspects") {
      config.aspects = SplitList(value);
    } else if (key == "opinions") {
      config.opinions = SplitList(value);
    } else {
      throw fail("unknown key \"" + std::string(key) + "\"");
    }
  }
  try {
    config.Validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string(name) + ": " + e.what());
  }
  return config;
}

SyntheticConfig LoadSyntheticConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return ReadSyntheticConfig(in, path.string());
}

EmbeddingTable RandomEmbeddings(std::vector<std::string> vocabulary,
                                std::size_t dim, double scale,
                                std::uint64_t seed) {
  std::sort(vocabulary.begin(), vocabulary.end());
  vocabulary.erase(std::unique(vocabulary.begin(), vocabulary.end()), vocabulary.end());
  EmbeddingTable table(dim);
  Rng rng(seed);
  std::vector<double> v(dim);
  for (const std::string& w : vocabulary) {
    for (double& x : v) x = rng.Uniform(-scale, scale);
    table.Set(w, v);
  }
  return table;
}

}  // namespace cmla
