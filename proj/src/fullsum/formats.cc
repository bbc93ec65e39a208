// src/fullsum/formats.cc
//
// Copyright 2026 The fullsum Authors
// SPDX-License-Identifier: Apache-2.0
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

#include "fullsum/formats.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>

#include "fullsum/text_util.h"

namespace fullsum {

namespace {

void PutU32(std::ostream &out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

std::uint32_t GetU32(std::istream &in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char *>(b), 4)) DataError("truncated container");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void PutF32(std::ostream &out, double v) {
  PutU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

double GetF32(std::istream &in) {
  return static_cast<double>(std::bit_cast<float>(GetU32(in)));
}

void PutMagic(std::ostream &out, const char *magic) { out.write(magic, 4); }

void ExpectMagic(std::istream &in, const char *magic) {
  char got[4];
  if (!in.read(got, 4)) DataError("truncated container");
  if (std::memcmp(got, magic, 4) != 0)
    DataError(std::string("bad magic, expected ") + std::string(magic, 4));
}

struct Header {
  std::uint32_t rows = 0, cols = 0;
  double frame_shift_ms = 10.0;
};

void PutHeader(std::ostream &out, const char *magic, std::size_t rows,
               std::size_t cols, double shift) {
  PutMagic(out, magic);
  PutU32(out, static_cast<std::uint32_t>(rows));
  PutU32(out, static_cast<std::uint32_t>(cols));
  PutF32(out, shift);
}

Header GetHeader(std::istream &in, const char *magic) {
  ExpectMagic(in, magic);
  Header h;
  h.rows = GetU32(in);
  h.cols = GetU32(in);
  h.frame_shift_ms = GetF32(in);
  if (!(h.frame_shift_ms > 0)) DataError("container has invalid frame shift");
  return h;
}

void PutMatrix(std::ostream &out, const Matrix &m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) PutF32(out, m.data()[i]);
}

Matrix GetMatrix(std::istream &in, std::uint32_t rows, std::uint32_t cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = GetF32(in);
  return m;
}

std::ifstream OpenIn(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) DataError("cannot open '" + path + "'");
  return in;
}

}  // namespace

void WriteFrameScores(std::ostream &out, const FrameScores &scores) {
  PutHeader(out, "FSC1", scores.NumFrames(), scores.NumLabels(),
            scores.frame_shift_ms);
  PutMatrix(out, scores.scores);
}

FrameScores ReadFrameScores(std::istream &in) {
  Header h = GetHeader(in, "FSC1");
  FrameScores s;
  s.frame_shift_ms = h.frame_shift_ms;
  s.scores = GetMatrix(in, h.rows, h.cols);
  return s;
}

void WriteSoftAlignment(std::ostream &out, const SoftAlignment &soft) {
  const Matrix &q = soft.occupation;
  for (Eigen::Index t = 0; t < q.rows(); ++t)
    if (std::abs(q.row(t).sum() - 1.0) > 1e-9)
      DataError("soft alignment row " + std::to_string(t) +
                " does not sum to 1");
  PutHeader(out, "SAL1", q.rows(), q.cols(), soft.frame_shift_ms);
  PutMatrix(out, q);
}

SoftAlignment ReadSoftAlignment(std::istream &in) {
  Header h = GetHeader(in, "SAL1");
  SoftAlignment s;
  s.frame_shift_ms = h.frame_shift_ms;
  s.occupation = GetMatrix(in, h.rows, h.cols);
  return s;
}

void WriteHardAlignment(std::ostream &out, const HardAlignment &hard,
                        int num_labels) {
  PutHeader(out, "HAL1", hard.labels.size(), num_labels, hard.frame_shift_ms);
  for (int l : hard.labels) {
    if (l < 0 || l >= num_labels) DataError("hard alignment label out of range");
    PutU32(out, static_cast<std::uint32_t>(l));
  }
}

HardAlignment ReadHardAlignment(std::istream &in, int *num_labels) {
  Header h = GetHeader(in, "HAL1");
  HardAlignment hard;
  hard.frame_shift_ms = h.frame_shift_ms;
  for (std::uint32_t t = 0; t < h.rows; ++t) {
    std::uint32_t l = GetU32(in);
    if (l >= h.cols) DataError("hard alignment label out of range");
    hard.labels.push_back(static_cast<int>(l));
  }
  hard.units.assign(hard.labels.size(), -1);
  for (int t = 0; t < hard.NumFrames(); ++t) {
    if (!hard.segments.empty() && hard.segments.back().label == hard.labels[t])
      hard.segments.back().end = t + 1;
    else
      hard.segments.push_back({hard.labels[t], -1, t, t + 1});
  }
  if (num_labels) *num_labels = static_cast<int>(h.cols);
  return hard;
}

FrameScores ReadFrameScoresFile(const std::string &path) {
  auto in = OpenIn(path);
  return ReadFrameScores(in);
}

void WriteFrameScoresFile(const std::string &path, const FrameScores &scores) {
  WriteFileAtomic(path, SerializeToString(
                            [&](std::ostream &o) { WriteFrameScores(o, scores); }));
}

SoftAlignment ReadSoftAlignmentFile(const std::string &path) {
  auto in = OpenIn(path);
  return ReadSoftAlignment(in);
}

HardAlignment ReadHardAlignmentFile(const std::string &path, int *num_labels) {
  auto in = OpenIn(path);
  return ReadHardAlignment(in, num_labels);
}

void WriteFeatureArchive(std::ostream &out,
                         const std::vector<Utterance> &utts) {
  PutMagic(out, "FEA1");
  PutU32(out, static_cast<std::uint32_t>(utts.size()));
  for (const auto &u : utts) {
    PutU32(out, static_cast<std::uint32_t>(u.id.size()));
    out.write(u.id.data(), static_cast<std::streamsize>(u.id.size()));
    PutU32(out, static_cast<std::uint32_t>(u.features.rows()));
    PutU32(out, static_cast<std::uint32_t>(u.features.cols()));
    PutMatrix(out, u.features);
  }
}

std::vector<Utterance> ReadFeatureArchive(std::istream &in) {
  ExpectMagic(in, "FEA1");
  std::uint32_t n = GetU32(in);
  std::vector<Utterance> out;
  for (std::uint32_t i = 0; i < n; ++i) {
    Utterance u;
    std::uint32_t len = GetU32(in);
    if (len > 4096) DataError("feature archive: implausible id length");
    u.id.resize(len);
    if (!in.read(u.id.data(), len)) DataError("truncated container");
    std::uint32_t rows = GetU32(in), cols = GetU32(in);
    u.features = GetMatrix(in, rows, cols);
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<Utterance> ReadFeatureArchiveFile(const std::string &path) {
  auto in = OpenIn(path);
  return ReadFeatureArchive(in);
}

void AlignmentSet::Add(const std::string &id, HardAlignment hard) {
  if (!utts.count(id)) order.push_back(id);
  utts[id] = std::move(hard);
}

std::string FormatAlignmentText(const AlignmentSet &set,
                                const LabelInventory &inventory) {
  std::ostringstream os;
  os << "#frame_shift_ms " << set.frame_shift_ms << '\n';
  for (const auto &id : set.order) {
    const HardAlignment &h = set.utts.at(id);
    for (const Segment &s : h.segments) {
      LabelUnit u = inventory.Unit(s.label);
      const char *type = u.kind == LabelUnit::Kind::kSilence ? "silence"
                         : u.kind == LabelUnit::Kind::kBlank ? "blank"
                                                             : "phoneme";
      os << id << '\t' << s.start << '\t' << s.end << '\t'
         << inventory.Name(s.label) << '\t' << type << '\n';
    }
    for (const WordSegment &w : h.words)
      os << id << '\t' << w.start << '\t' << w.end << '\t' << w.word
         << "\tword\n";
  }
  return os.str();
}

AlignmentSet ParseAlignmentText(std::istream &in,
                                const LabelInventory *inventory) {
  AlignmentSet set;
  std::map<std::string, int> names;
  if (inventory)
    for (int l = 0; l < inventory->NumLabels(); ++l)
      names[inventory->Name(l)] = l;
  std::string line;
  int lineno = 0;
  bool have_shift = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = Trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      auto parts = SplitWhitespace(t);
      if (parts.size() == 2 && parts[0] == "#frame_shift_ms") {
        set.frame_shift_ms = ParseDouble(parts[1], "frame shift");
        if (!(set.frame_shift_ms > 0)) DataError("frame shift must be positive");
        have_shift = true;
      }
      continue;
    }
    auto f = Split(t, '\t');
    if (f.size() != 5)
      DataError("alignment line " + std::to_string(lineno) +
                ": expected 5 tab-separated fields");
    std::string id(Trim(f[0]));
    int start = static_cast<int>(ParseInt(f[1], "start frame"));
    int end = static_cast<int>(ParseInt(f[2], "end frame"));
    if (start < 0 || end <= start)
      DataError("alignment line " + std::to_string(lineno) + ": bad interval");
    std::string token(Trim(f[3])), type(Trim(f[4]));
    if (!set.utts.count(id)) {
      set.order.push_back(id);
      set.utts[id].frame_shift_ms = set.frame_shift_ms;
    }
    HardAlignment &h = set.utts[id];
    if (type == "word") {
      h.words.push_back({token, start, end});
    } else if (type == "phoneme" || type == "silence" || type == "blank") {
      int label = -1;
      if (inventory) {
        auto it = names.find(token);
        if (it == names.end())
          DataError("alignment line " + std::to_string(lineno) +
                    ": unknown token '" + token + "'");
        label = it->second;
      }
      h.segments.push_back({label, -1, start, end});
      if (static_cast<int>(h.labels.size()) < end) {
        h.labels.resize(end, -1);
        h.units.resize(end, -1);
      }
      for (int fr = start; fr < end; ++fr) h.labels[fr] = label;
    } else {
      DataError("alignment line " + std::to_string(lineno) +
                ": unknown segment type '" + type + "'");
    }
  }
  if (!have_shift && !set.utts.empty())
    Warn("alignment file has no #frame_shift_ms header; assuming 10 ms");
  for (auto &[id, h] : set.utts) h.frame_shift_ms = set.frame_shift_ms;
  return set;
}

AlignmentSet ReadAlignmentTextFile(const std::string &path,
                                   const LabelInventory *inventory) {
  std::ifstream in(path);
  if (!in) DataError("cannot open alignment '" + path + "'");
  return ParseAlignmentText(in, inventory);
}

}  // namespace fullsum
