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

#include <vector>

#include "cmla/bio.h"
#include "cmla/tensor.h"
#include "doctest.h"

namespace cmla {
namespace {

constexpr Tag B = Tag::kB, I = Tag::kI, O = Tag::kO;

LabelSeq Seq(std::vector<Tag> tags, Head head = Head::kAspect) {
  return LabelSeq{std::move(tags), head};
}

Span Asp(std::size_t s, std::size_t e) { return Span{s, e, Head::kAspect}; }
Span Op(std::size_t s, std::size_t e) { return Span{s, e, Head::kOpinion}; }

// Independent decoder: scans for maximal B I* / I+ runs.
std::vector<Span> OracleSpans(const LabelSeq& seq) {
  std::vector<Span> out;
  std::size_t i = 0;
  const std::size_t n = seq.size();
  while (i < n) {
    if (seq.labels[i] == O) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n && seq.labels[j] == I) ++j;
    out.push_back(Span{i, j, seq.head});
    i = j;
  }
  return out;
}

std::vector<Tag> Decode(std::size_t code, std::size_t n) {
  std::vector<Tag> tags(n);
  for (std::size_t i = 0; i < n; ++i, code /= 3) tags[i] = static_cast<Tag>(code % 3);
  return tags;
}

TEST_CASE("spans_to_labels examples") {
  std::vector<Span> one{Asp(2, 3)};
  CHECK(SpansToLabels(6, one, Head::kAspect).labels == std::vector<Tag>{O, O, B, O, O, O});
  std::vector<Span> two{Asp(3, 4), Asp(0, 2)};
  CHECK(SpansToLabels(4, two, Head::kAspect).labels == std::vector<Tag>{B, I, O, B});
  CHECK(SpansToLabels(3, {}, Head::kOpinion) == Seq({O, O, O}, Head::kOpinion));
}

TEST_CASE("spans_to_labels rejects invalid spans") {
  std::vector<Span> overlap{Asp(0, 2), Asp(1, 3)};
  CHECK_THROWS_AS(SpansToLabels(4, overlap, Head::kAspect), std::invalid_argument);
  std::vector<Span> beyond{Asp(2, 5)};
  CHECK_THROWS_AS(SpansToLabels(4, beyond, Head::kAspect), std::invalid_argument);
  std::vector<Span> empty{Asp(2, 2)};
  CHECK_THROWS_AS(SpansToLabels(4, empty, Head::kAspect), std::invalid_argument);
  std::vector<Span> kind{Op(0, 1)};
  CHECK_THROWS_AS(SpansToLabels(4, kind, Head::kAspect), std::invalid_argument);
}

TEST_CASE("labels_to_spans examples") {
  CHECK(LabelsToSpans(Seq({O, O, O})).empty());
  CHECK(LabelsToSpans(Seq({B, I, I, O, B})) == std::vector<Span>{Asp(0, 3), Asp(4, 5)});
  CHECK(LabelsToSpans(Seq({O, I, I})) == std::vector<Span>{Asp(1, 3)});
  CHECK(LabelsToSpans(Seq({I, O, B, B, I}, Head::kOpinion)) ==
        std::vector<Span>{Op(0, 1), Op(2, 3), Op(3, 5)});
  CHECK(LabelsToSpans(Seq({})).empty());
}

TEST_CASE("well-formedness") {
  CHECK(Seq({B, I, O, B}).WellFormed());
  CHECK_FALSE(Seq({I, O}).WellFormed());
  CHECK_FALSE(Seq({B, O, I}).WellFormed());
  CHECK(Seq({}).WellFormed());
}

TEST_CASE("decoder agrees with the scan oracle on every sequence up to length 8") {
  for (std::size_t n = 0; n <= 8; ++n) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      LabelSeq seq = Seq(Decode(code, n), Head::kOpinion);
      REQUIRE(LabelsToSpans(seq) == OracleSpans(seq));
    }
  }
}

TEST_CASE("well-formed sequences survive labels to spans to labels") {
  std::size_t checked = 0;
  for (std::size_t n = 0; n <= 8; ++n) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      LabelSeq seq = Seq(Decode(code, n));
      if (!seq.WellFormed()) continue;
      ++checked;
      REQUIRE(SpansToLabels(n, LabelsToSpans(seq), Head::kAspect) == seq);
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("random disjoint span sets round-trip") {
  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.Index(20);
    std::vector<Span> spans;
    std::size_t pos = rng.Index(3);
    while (pos < n) {
      const std::size_t len = 1 + rng.Index(std::min<std::size_t>(4, n - pos));
      spans.push_back(Asp(pos, pos + len));
      pos += len + rng.Index(3);
    }
    REQUIRE(LabelsToSpans(SpansToLabels(n, spans, Head::kAspect)) == spans);
  }
}

TEST_CASE("decoding any sequence yields a valid sorted disjoint span list") {
  Rng rng(9);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = rng.Index(15);
    LabelSeq seq = Seq(Decode(rng.Next(), n));
    const std::vector<Span> spans = LabelsToSpans(seq);
    std::size_t last = 0;
    for (const Span& s : spans) {
      CHECK(s.start >= last);
      CHECK(s.start < s.end);
      CHECK(s.end <= n);
      last = s.end;
    }
    // Decoding the re-encoded spans is stable.
    CHECK(LabelsToSpans(SpansToLabels(n, spans, Head::kAspect)) == spans);
  }
}

TEST_CASE("merge_heads without conflict") {
  std::vector<double> ca{0.9, 0.9, 0.9}, cp{0.9, 0.9, 0.9};
  CHECK(MergeHeads(Seq({O, O, B}), Seq({B, O, O}, Head::kOpinion), ca, cp) ==
        std::vector<MergedTag>{MergedTag::kBOp, MergedTag::kO, MergedTag::kBAsp});
}

TEST_CASE("merge_heads resolves conflicts by confidence") {
  std::vector<double> high{0.9}, low{0.6};
  CHECK(MergeHeads(Seq({B}), Seq({B}, Head::kOpinion), high, low) ==
        std::vector<MergedTag>{MergedTag::kBAsp});
  CHECK(MergeHeads(Seq({B}), Seq({B}, Head::kOpinion), low, high) ==
        std::vector<MergedTag>{MergedTag::kBOp});
  CHECK(MergeHeads(Seq({B}), Seq({B}, Head::kOpinion), low, low) ==
        std::vector<MergedTag>{MergedTag::kBAsp});
}

TEST_CASE("merge_heads repairs an inside tag cut off from its head") {
  std::vector<double> ca{0.9, 0.5}, cp{0.2, 0.8};
  CHECK(MergeHeads(Seq({B, I}), Seq({O, B}, Head::kOpinion), ca, cp) ==
        std::vector<MergedTag>{MergedTag::kBAsp, MergedTag::kBOp});
  std::vector<double> ca2{0.1, 0.9}, cp2{0.8, 0.1};
  CHECK(MergeHeads(Seq({B, I}), Seq({B, O}, Head::kOpinion), ca2, cp2) ==
        std::vector<MergedTag>{MergedTag::kBOp, MergedTag::kBAsp});
}

TEST_CASE("merge_heads rejects mismatched lengths") {
  std::vector<double> c2{1, 1}, c1{1};
  CHECK_THROWS_AS(MergeHeads(Seq({O, O}), Seq({O, O}, Head::kOpinion), c2, c1),
                  std::invalid_argument);
}

// Independent restatement of the merge rule followed by the repair pass.
std::vector<MergedTag> OracleMerge(const LabelSeq& a, const LabelSeq& p,
                                   const std::vector<double>& ca,
                                   const std::vector<double>& cp) {
  std::vector<MergedTag> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    bool aspect = a.labels[i] != O && (p.labels[i] == O || ca[i] >= cp[i]);
    if (aspect) {
      out.push_back(a.labels[i] == B ? MergedTag::kBAsp : MergedTag::kIAsp);
    } else if (p.labels[i] != O) {
      out.push_back(p.labels[i] == B ? MergedTag::kBOp : MergedTag::kIOp);
    } else {
      out.push_back(MergedTag::kO);
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == MergedTag::kIAsp && (i == 0 || (out[i - 1] != MergedTag::kBAsp &&
                                                  out[i - 1] != MergedTag::kIAsp))) {
      out[i] = MergedTag::kBAsp;
    }
    if (out[i] == MergedTag::kIOp && (i == 0 || (out[i - 1] != MergedTag::kBOp &&
                                                 out[i - 1] != MergedTag::kIOp))) {
      out[i] = MergedTag::kBOp;
    }
  }
  return out;
}

TEST_CASE("fuzzed conflicts always merge to well-formed output") {
  Rng rng(33);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng.Index(12);
    LabelSeq a = Seq(Decode(rng.Next(), n));
    LabelSeq p = Seq(Decode(rng.Next(), n), Head::kOpinion);
    std::vector<double> ca(n), cp(n);
    for (std::size_t i = 0; i < n; ++i) {
      ca[i] = rng.Uniform(0.34, 1.0);
      cp[i] = rng.Index(4) == 0 ? ca[i] : rng.Uniform(0.34, 1.0);
    }
    const std::vector<MergedTag> merged = MergeHeads(a, p, ca, cp);
    REQUIRE(MergedWellFormed(merged));
    REQUIRE(merged == OracleMerge(a, p, ca, cp));
  }
}

TEST_CASE("merged well-formedness") {
  CHECK(MergedWellFormed(std::vector<MergedTag>{MergedTag::kBAsp, MergedTag::kIAsp}));
  CHECK_FALSE(MergedWellFormed(std::vector<MergedTag>{MergedTag::kBOp, MergedTag::kIAsp}));
  CHECK_FALSE(MergedWellFormed(std::vector<MergedTag>{MergedTag::kIOp}));
}

TEST_CASE("names") {
  CHECK(TagName(B) == "B");
  CHECK(HeadName(Head::kOpinion) == "opinion");
  CHECK(MergedTagName(MergedTag::kIAsp) == "I-ASP");
  CHECK(MergedTagName(MergedTag::kO) == "O");
}

}  // namespace
}  // namespace cmla
