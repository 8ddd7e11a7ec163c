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

#include "cmla/bio.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cmla {
namespace {

bool IsInside(MergedTag t) { return t == MergedTag::kIAsp || t == MergedTag::kIOp; }

MergedTag BeginOf(MergedTag t) {
  if (t == MergedTag::kIAsp) return MergedTag::kBAsp;
  if (t == MergedTag::kIOp) return MergedTag::kBOp;
  return t;
}

bool SameHead(MergedTag a, MergedTag b) {
  auto head = [](MergedTag t) {
    return t == MergedTag::kBAsp || t == MergedTag::kIAsp ? 0
           : t == MergedTag::kO                           ? 2
                                                          : 1;
  };
  return head(a) == head(b);
}

}  // namespace

std::string_view HeadName(Head head) {
  return head == Head::kAspect ? "aspect" : "opinion";
}

std::string_view TagName(Tag tag) {
  switch (tag) {
    case Tag::kB: return "B";
    case Tag::kI: return "I";
    case Tag::kO: return "O";
  }
  return "?";
}

std::string_view MergedTagName(MergedTag tag) {
  switch (tag) {
    case MergedTag::kBAsp: return "B-ASP";
    case MergedTag::kIAsp: return "I-ASP";
    case MergedTag::kBOp: return "B-OP";
    case MergedTag::kIOp: return "I-OP";
    case MergedTag::kO: return "O";
  }
  return "?";
}

bool LabelSeq::WellFormed() const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == Tag::kI && (i == 0 || labels[i - 1] == Tag::kO)) return false;
  }
  return true;
}

LabelSeq SpansToLabels(std::size_t n_tokens, std::span<const Span> spans,
                       Head head) {
  std::vector<Span> sorted(spans.begin(), spans.end());
  std::sort(sorted.begin(), sorted.end());
  LabelSeq out{std::vector<Tag>(n_tokens, Tag::kO), head};
  std::size_t last_end = 0;
  for (std::size_t s = 0; s < sorted.size(); ++s) {
    const Span& span = sorted[s];
    if (span.kind != head) {
      throw std::invalid_argument("span of kind " + std::string(HeadName(span.kind)) +
                                  " given for head " + std::string(HeadName(head)));
    }
    if (span.start >= span.end || span.end > n_tokens) {
      throw std::invalid_argument("span [" + std::to_string(span.start) + "," +
                                  std::to_string(span.end) + ") invalid for " +
                                  std::to_string(n_tokens) + " tokens");
    }
    if (s > 0 && span.start < last_end) {
      throw std::invalid_argument("overlapping spans at token " +
                                  std::to_string(span.start));
    }
    out.labels[span.start] = Tag::kB;
    for (std::size_t i = span.start + 1; i < span.end; ++i) out.labels[i] = Tag::kI;
    last_end = span.end;
  }
  return out;
}

std::vector<Span> LabelsToSpans(const LabelSeq& labels) {
  std::vector<Span> spans;
  const auto& tags = labels.labels;
  std::size_t i = 0;
  while (i < tags.size()) {
    if (tags[i] == Tag::kO) {
      ++i;
      continue;
    }
    // B, or an orphan I treated as B.
    const std::size_t start = i++;
    while (i < tags.size() && tags[i] == Tag::kI) ++i;
    spans.push_back(Span{start, i, labels.head});
  }
  return spans;
}

std::vector<MergedTag> MergeHeads(const LabelSeq& aspect,
                                  const LabelSeq& opinion,
                                  std::span<const double> aspect_confidence,
                                  std::span<const double> opinion_confidence) {
  const std::size_t n = aspect.size();
  if (opinion.size() != n || aspect_confidence.size() != n ||
      opinion_confidence.size() != n) {
    throw std::invalid_argument("merge_heads: length mismatch");
  }
  std::vector<MergedTag> out(n, MergedTag::kO);
  for (std::size_t i = 0; i < n; ++i) {
    const Tag a = aspect.labels[i];
    const Tag p = opinion.labels[i];
    const bool use_aspect =
        a != Tag::kO &&
        (p == Tag::kO || aspect_confidence[i] >= opinion_confidence[i]);
    if (use_aspect) {
      out[i] = a == Tag::kB ? MergedTag::kBAsp : MergedTag::kIAsp;
    } else if (p != Tag::kO) {
      out[i] = p == Tag::kB ? MergedTag::kBOp : MergedTag::kIOp;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (IsInside(out[i]) && (i == 0 || out[i - 1] == MergedTag::kO ||
                             !SameHead(out[i - 1], out[i]))) {
      out[i] = BeginOf(out[i]);
    }
  }
  return out;
}

bool MergedWellFormed(std::span<const MergedTag> tags) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (!IsInside(tags[i])) continue;
    if (i == 0 || tags[i - 1] == MergedTag::kO || !SameHead(tags[i - 1], tags[i])) {
      return false;
    }
  }
  return true;
}

}  // namespace cmla
