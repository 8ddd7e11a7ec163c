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

#include "cmla/semeval.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "cmla/text.h"

namespace cmla {
namespace {

namespace pt = boost::property_tree;

std::optional<std::size_t> ParseOffset(const std::string& s) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::string Attr(const pt::ptree& node, const char* name) {
  return node.get<std::string>(std::string("<xmlattr>.") + name, "");
}

struct Annotation {
  std::string target;
  std::string from;
  std::string to;
};

class Parser {
 public:
  explicit Parser(ParseResult& result) : result_(result) {}

  void Walk(const pt::ptree& node, const std::string& review_id) {
    for (const auto& [tag, child] : node) {
      if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
      if (tag == "Review") {
        Walk(child, Attr(child, "rid"));
      } else if (tag == "sentence") {
        ReadSentence(child, review_id);
      } else {
        Walk(child, review_id);
      }
    }
  }

 private:
  void ReadSentence(const pt::ptree& node, const std::string& review_id) {
    Sentence s;
    s.id = Attr(node, "id");
    s.source_id = review_id.empty() ? s.id : review_id;
    s.raw_text = node.get<std::string>("text", "");
    s.tokens = Tokenize(s.raw_text);
    const std::size_t length = CodePointLength(s.raw_text);

    std::vector<Annotation> annotations;
    if (auto opinions = node.get_child_optional("Opinions")) {
      for (const auto& [tag, op] : *opinions) {
        if (tag != "Opinion") continue;
        annotations.push_back({Attr(op, "target"), Attr(op, "from"), Attr(op, "to")});
      }
    }
    if (auto terms = node.get_child_optional("aspectTerms")) {
      for (const auto& [tag, term] : *terms) {
        if (tag != "aspectTerm") continue;
        annotations.push_back({Attr(term, "term"), Attr(term, "from"), Attr(term, "to")});
      }
    }

    std::vector<CharSpan> char_spans;
    for (const Annotation& a : annotations) {
      ++result_.opinion_elements;
      if (a.target == "NULL" || a.target.empty()) {
        ++result_.null_targets;
        continue;
      }
      auto from = ParseOffset(a.from);
      auto to = ParseOffset(a.to);
      if (!from || !to || *from >= *to || *to > length) {
        Skip(s, "offsets [" + a.from + "," + a.to + ") invalid for text of length " +
                    std::to_string(length));
        return;
      }
      const std::string covered = Utf8Substr(s.raw_text, *from, *to);
      if (covered != a.target) {
        Skip(s, "target \"" + a.target + "\" does not match text \"" + covered +
                    "\" at [" + a.from + "," + a.to + ")");
        return;
      }
      char_spans.push_back({*from, *to});
    }

    AlignResult aligned = AlignSpans(char_spans, s.tokens, Head::kAspect);
    for (std::size_t idx : aligned.failed) {
      Note(s, "target at [" + std::to_string(char_spans[idx].begin) + "," +
                  std::to_string(char_spans[idx].end) + ") covers no token");
    }
    std::sort(aligned.spans.begin(), aligned.spans.end(),
              [](const Span& a, const Span& b) {
                return a.start != b.start ? a.start < b.start : a.end > b.end;
              });
    aligned.spans.erase(std::unique(aligned.spans.begin(), aligned.spans.end()),
                        aligned.spans.end());
    for (const Span& span : aligned.spans) {
      if (!s.aspect_spans.empty() && span.start < s.aspect_spans.back().end) {
        Note(s, "dropped aspect span [" + std::to_string(span.start) + "," +
                    std::to_string(span.end) + ") overlapping an earlier one");
        continue;
      }
      s.aspect_spans.push_back(span);
    }
    result_.sentences.push_back(std::move(s));
  }

  void Skip(const Sentence& s, const std::string& why) {
    ++result_.skipped_sentences;
    result_.diagnostics.push_back("sentence " + s.id + " skipped: " + why);
  }

  void Note(const Sentence& s, const std::string& what) {
    result_.diagnostics.push_back("sentence " + s.id + ": " + what);
  }

  ParseResult& result_;
};

std::string Escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

ParseResult ParseStream(std::istream& in, std::string_view name) {
  pt::ptree tree;
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw DataError(std::string(name) + ":" + std::to_string(e.line()) +
                    ": malformed XML: " + e.message());
  }
  ParseResult result;
  Parser(result).Walk(tree, "");
  return result;
}

}  // namespace

AlignResult AlignSpans(std::span<const CharSpan> char_spans,
                       std::span<const Token> tokens, Head kind) {
  AlignResult result;
  for (std::size_t i = 0; i < char_spans.size(); ++i) {
    const CharSpan& cs = char_spans[i];
    std::size_t first = tokens.size(), last = 0;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (tokens[t].char_start < cs.end && cs.begin < tokens[t].char_end) {
        first = std::min(first, t);
        last = t;
      }
    }
    if (first == tokens.size()) {
      result.failed.push_back(i);
    } else {
      result.spans.push_back(Span{first, last + 1, kind});
    }
  }
  return result;
}

ParseResult ParseSemEvalXml(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return ParseStream(in, path.string());
}

ParseResult ParseSemEvalXmlString(std::string_view xml, std::string_view name) {
  std::istringstream in{std::string(xml)};
  return ParseStream(in, name);
}

void WriteSemEvalXml(std::ostream& out, std::span<const Sentence> sentences) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n";
  out << "<Reviews>\n";
  std::size_t i = 0;
  while (i < sentences.size()) {
    const std::string rid =
        sentences[i].source_id.empty() ? sentences[i].id : sentences[i].source_id;
    out << "  <Review rid=\"" << Escape(rid) << "\">\n    <sentences>\n";
    for (; i < sentences.size(); ++i) {
      const Sentence& s = sentences[i];
      const std::string this_rid = s.source_id.empty() ? s.id : s.source_id;
      if (this_rid != rid) break;
      out << "      <sentence id=\"" << Escape(s.id) << "\">\n";
      out << "        <text>" << Escape(s.raw_text) << "</text>\n";
      if (!s.aspect_spans.empty()) {
        out << "        <Opinions>\n";
        for (const Span& span : s.aspect_spans) {
          out << "          <Opinion target=\"" << Escape(s.SpanText(span))
              << "\" category=\"RESTAURANT#GENERAL\" polarity=\"positive\" from=\""
              << s.tokens[span.start].char_start << "\" to=\""
              << s.tokens[span.end - 1].char_end << "\"/>\n";
        }
        out << "        </Opinions>\n";
      }
      out << "      </sentence>\n";
    }
    out << "    </sentences>\n  </Review>\n";
  }
  out << "</Reviews>\n";
}

}  // namespace cmla
