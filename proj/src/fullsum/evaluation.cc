// src/fullsum/evaluation.cc
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

#include "fullsum/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fullsum/text_util.h"

namespace fullsum {

namespace {

std::vector<std::string> WordSequence(const HardAlignment &h) {
  std::vector<std::string> out;
  for (const auto &w : h.words) out.push_back(w.word);
  return out;
}

std::string Fmt(const char *fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string XmlEscape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

TseReport ComputeTse(const AlignmentSet &candidate,
                     const AlignmentSet &reference, double bin_ms) {
  if (!(bin_ms > 0)) ConfigError("histogram bin width must be positive");
  TseReport report;
  report.bin_ms = bin_ms;
  double total = 0.0;
  int overlap = 0;
  for (const auto &id : reference.order) {
    auto it = candidate.utts.find(id);
    if (it == candidate.utts.end()) continue;
    ++overlap;
    const HardAlignment &c = it->second;
    const HardAlignment &r = reference.utts.at(id);
    if (WordSequence(c) != WordSequence(r)) {
      report.skipped.push_back(id);
      continue;
    }
    TseUtterance u{id, static_cast<int>(r.words.size()), 0.0};
    for (std::size_t w = 0; w < r.words.size(); ++w) {
      double ds = std::abs(c.words[w].start * c.frame_shift_ms -
                           r.words[w].start * r.frame_shift_ms);
      double de = std::abs(c.words[w].end * c.frame_shift_ms -
                           r.words[w].end * r.frame_shift_ms);
      u.total_ms += ds + de;
      for (double d : {ds, de})
        ++report.histogram[static_cast<long>(std::floor(d / bin_ms + 1e-9))];
    }
    total += u.total_ms;
    report.words += u.words;
    report.utterances.push_back(u);
  }
  if (overlap == 0)
    DataError("candidate and reference alignments share no utterances");
  if (!report.skipped.empty())
    Warn(std::to_string(report.skipped.size()) +
         " utterances skipped for TSE: word sequences differ");
  if (report.words == 0) DataError("no utterance with matching words for TSE");
  report.mean_ms = total / (2.0 * static_cast<double>(report.words));
  return report;
}

std::string TseReport::ToText() const {
  std::ostringstream os;
  os << "tse_ms\t" << Fmt("%.4f", mean_ms) << '\n';
  os << "words\t" << words << '\n';
  os << "utterances\t" << utterances.size() << '\n';
  os << "skipped\t" << skipped.size();
  for (const auto &s : skipped) os << '\t' << s;
  os << '\n';
  for (const auto &u : utterances)
    os << "utt\t" << u.id << '\t' << u.words << '\t'
       << Fmt("%.4f", u.words ? u.total_ms / (2.0 * u.words) : 0.0) << '\n';
  for (const auto &[bin, n] : histogram)
    os << "hist\t" << Fmt("%g", bin * bin_ms) << '\t'
       << Fmt("%g", (bin + 1) * bin_ms) << '\t' << n << '\n';
  return os.str();
}

double WerResult::Percent() const {
  if (reference_words == 0) DataError("WER undefined for empty references");
  return 100.0 * static_cast<double>(Errors()) /
         static_cast<double>(reference_words);
}

std::string WerResult::ToText() const {
  std::ostringstream os;
  os << "wer\t" << Fmt("%.2f", Percent()) << '\n'
     << "errors\t" << Errors() << '\n'
     << "substitutions\t" << substitutions << '\n'
     << "deletions\t" << deletions << '\n'
     << "insertions\t" << insertions << '\n'
     << "reference_words\t" << reference_words << '\n';
  return os.str();
}

WerResult AlignWords(const std::vector<std::string> &reference,
                     const std::vector<std::string> &hypothesis) {
  const std::size_t n = reference.size(), m = hypothesis.size();
  std::vector<std::vector<long>> d(n + 1, std::vector<long>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = static_cast<long>(i);
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = static_cast<long>(j);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      d[i][j] = std::min({d[i - 1][j - 1] +
                              (reference[i - 1] == hypothesis[j - 1] ? 0 : 1),
                          d[i - 1][j] + 1, d[i][j - 1] + 1});
  WerResult r;
  r.reference_words = static_cast<long>(n);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      long sub = reference[i - 1] == hypothesis[j - 1] ? 0 : 1;
      if (d[i][j] == d[i - 1][j - 1] + sub) {
        r.substitutions += sub;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ++r.deletions;
      --i;
    } else {
      ++r.insertions;
      --j;
    }
  }
  return r;
}

WerResult ComputeWer(const Transcripts &hypotheses,
                     const Transcripts &references) {
  if (references.empty()) DataError("reference corpus is empty");
  WerResult total;
  for (const auto &[id, ref] : references) {
    auto it = hypotheses.find(id);
    if (it == hypotheses.end())
      DataError("no hypothesis for utterance '" + id + "'");
    WerResult r = AlignWords(ref, it->second);
    total.substitutions += r.substitutions;
    total.deletions += r.deletions;
    total.insertions += r.insertions;
    total.reference_words += r.reference_words;
  }
  for (const auto &[id, hyp] : hypotheses)
    if (!references.count(id))
      DataError("hypothesis utterance '" + id + "' has no reference");
  if (total.reference_words == 0) DataError("reference corpus has no words");
  return total;
}

Transcripts ReadTranscripts(const std::string &path) {
  std::ifstream in(path);
  if (!in) DataError("cannot open transcripts '" + path + "'");
  Transcripts out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::string id;
    std::vector<std::string> words;
    if (t.find('\t') != std::string_view::npos) {
      auto f = Split(t, '\t');
      id = std::string(Trim(f[0]));
      words = SplitWhitespace(f[1]);
    } else {
      words = SplitWhitespace(t);
      id = words.front();
      words.erase(words.begin());
    }
    if (out.count(id))
      DataError("transcripts line " + std::to_string(lineno) +
                ": duplicate utterance '" + id + "'");
    out[id] = std::move(words);
  }
  return out;
}

std::string RenderAlignmentSvg(const PlotInput &in) {
  if (!in.soft && !in.hard)
    UsageError("plot needs a soft or a hard alignment");
  int frames = -1, labels = 0;
  auto check_frames = [&frames](int t, const char *what) {
    if (frames >= 0 && t != frames)
      DataError(std::string("plot: ") + what + " has " + std::to_string(t) +
                " frames, expected " + std::to_string(frames));
    frames = t;
  };
  if (in.soft) {
    check_frames(static_cast<int>(in.soft->occupation.rows()), "soft alignment");
    labels = static_cast<int>(in.soft->occupation.cols());
  }
  if (in.hard) {
    check_frames(in.hard->NumFrames(), "hard alignment");
    for (int l : in.hard->labels) labels = std::max(labels, l + 1);
  }
  if (in.reference) {
    int t = 0;
    for (const auto &s : in.reference->segments) t = std::max(t, s.end);
    for (const auto &w : in.reference->words) t = std::max(t, w.end);
    if (in.reference->NumFrames() > 0) t = in.reference->NumFrames();
    check_frames(t, "reference");
    for (const auto &s : in.reference->segments)
      labels = std::max(labels, s.label + 1);
  }
  labels = std::max(labels, static_cast<int>(in.label_names.size()));
  if (frames < 1 || labels < 1) DataError("plot: nothing to draw");

  const int cell = 12, left = 90, top = 30, bottom = 30, right = 10;
  const int width = left + frames * cell + right;
  const int height = top + labels * cell + bottom;
  auto x = [&](double t) { return left + t * cell; };
  // Label 0 at the top row.
  auto y = [&](double l) { return top + l * cell; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
     << height << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
     << "\" fill=\"white\"/>\n";
  if (!in.title.empty())
    os << "<text x=\"" << left << "\" y=\"18\" font-family=\"monospace\" "
       << "font-size=\"12\">" << XmlEscape(in.title) << "</text>\n";
  os << "<g font-family=\"monospace\" font-size=\"9\" text-anchor=\"end\">\n";
  for (int l = 0; l < labels; ++l) {
    std::string name = l < static_cast<int>(in.label_names.size())
                           ? in.label_names[l]
                           : std::to_string(l);
    os << "<text x=\"" << left - 4 << "\" y=\"" << Fmt("%.1f", y(l + 0.75))
       << "\">" << XmlEscape(name) << "</text>\n";
  }
  os << "</g>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\""
     << frames * cell << "\" height=\"" << labels * cell
     << "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"0.5\"/>\n";

  if (in.soft) {
    os << "<g fill=\"#1f4e9c\">\n";
    for (int t = 0; t < frames; ++t)
      for (int l = 0; l < labels; ++l) {
        double q = in.soft->occupation(t, l);
        if (q < 5e-4) continue;
        os << "<rect x=\"" << x(t) << "\" y=\"" << y(l) << "\" width=\""
           << cell << "\" height=\"" << cell << "\" fill-opacity=\""
           << Fmt("%.3f", std::min(1.0, q)) << "\"/>\n";
      }
    os << "</g>\n";
  }

  if (in.reference) {
    os << "<g stroke=\"#c0392b\" stroke-width=\"1\" stroke-dasharray=\"3,2\">\n";
    std::vector<int> cuts;
    for (const auto &s : in.reference->segments) {
      cuts.push_back(s.start);
      cuts.push_back(s.end);
      if (s.label >= 0)
        os << "<line x1=\"" << x(s.start) << "\" y1=\"" << y(s.label + 1)
           << "\" x2=\"" << x(s.end) << "\" y2=\"" << y(s.label + 1)
           << "\"/>\n";
    }
    for (const auto &w : in.reference->words) {
      cuts.push_back(w.start);
      cuts.push_back(w.end);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (int c : cuts)
      if (c > 0 && c < frames)
        os << "<line x1=\"" << x(c) << "\" y1=\"" << top << "\" x2=\""
           << x(c) << "\" y2=\"" << y(labels) << "\"/>\n";
    os << "</g>\n";
  }

  if (in.hard) {
    os << "<polyline fill=\"none\" stroke=\"#e67e22\" stroke-width=\"2\" "
          "points=\"";
    for (int t = 0; t < frames; ++t) {
      double yy = y(in.hard->labels[t] + 0.5);
      if (t > 0) os << ' ';
      os << x(t) << ',' << Fmt("%.1f", yy) << ' ' << x(t + 1) << ','
         << Fmt("%.1f", yy);
    }
    os << "\"/>\n";
  }

  os << "<g font-family=\"monospace\" font-size=\"9\" text-anchor=\"middle\">\n";
  const int tick = frames <= 20 ? 1 : frames <= 100 ? 10 : 50;
  for (int t = 0; t <= frames; t += tick)
    os << "<text x=\"" << x(t) << "\" y=\"" << y(labels) + 14 << "\">" << t
       << "</text>\n";
  os << "</g>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace fullsum
