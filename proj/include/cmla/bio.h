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

#ifndef CMLA_BIO_H_
#define CMLA_BIO_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace cmla {

// Which extraction head a label or span belongs to.
enum class Head : std::uint8_t { kAspect = 0, kOpinion = 1 };

// Per-head BIO tag. The numeric value is the class index used by the model.
enum class Tag : std::uint8_t { kB = 0, kI = 1, kO = 2 };
inline constexpr std::size_t kNumTags = 3;

// The merged five-category view of both heads.
enum class MergedTag : std::uint8_t { kBAsp, kIAsp, kBOp, kIOp, kO };

std::string_view HeadName(Head head);
std::string_view TagName(Tag tag);
std::string_view MergedTagName(MergedTag tag);

// Token range [start, end).
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  Head kind = Head::kAspect;

  friend auto operator<=>(const Span&, const Span&) = default;
};

struct LabelSeq {
  std::vector<Tag> labels;
  Head head = Head::kAspect;

  std::size_t size() const { return labels.size(); }
  // No I at position 0 and no I directly after O.
  bool WellFormed() const;

  friend bool operator==(const LabelSeq&, const LabelSeq&) = default;
};

// Throws std::invalid_argument for spans out of range, of the wrong kind, or
// overlapping each other.
LabelSeq SpansToLabels(std::size_t n_tokens, std::span<const Span> spans,
                       Head head);

// Total: maximal B I* runs become spans and an orphan I opens a new span.
std::vector<Span> LabelsToSpans(const LabelSeq& labels);

// Overlay of the two heads. A token claimed by both goes to the head whose
// confidence is higher (aspect on ties); the result is repaired so that no
// I-X follows anything but B-X or I-X.
std::vector<MergedTag> MergeHeads(const LabelSeq& aspect,
                                  const LabelSeq& opinion,
                                  std::span<const double> aspect_confidence,
                                  std::span<const double> opinion_confidence);

bool MergedWellFormed(std::span<const MergedTag> tags);

}  // namespace cmla

#endif  // CMLA_BIO_H_
