// src/fullsum/pipeline.cc
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

#include "fullsum/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "fullsum/decoder.h"
#include "fullsum/estimation.h"
#include "fullsum/evaluation.h"
#include "fullsum/formats.h"
#include "fullsum/lattice.h"
#include "fullsum/ngram.h"
#include "fullsum/parallel.h"
#include "fullsum/synth.h"
#include "fullsum/text_util.h"

namespace fullsum {

namespace {

std::vector<KeySpec> TrainingKeys(const std::string &subsample) {
  return {
      {"features", "", true, "FEA1 feature archive"},
      {"corpus", "", true, "corpus metadata (id, duration-ms, words)"},
      {"lexicon", "", true, "pronunciation lexicon"},
      {"inventory", "", true, "phoneme inventory"},
      {"eow", "true", false, "end-of-word phoneme variants"},
      {"states", "1", false, "HMM states per phoneme (1 or 3)"},
      {"subsample", subsample, false, "frame subsampling factor"},
      {"min-duration", "1", false, "minimum frames per speech label"},
      {"epochs", "50", false, "training epochs"},
      {"batch-size", "5", false, "utterances per update"},
      {"hidden-dim", "32", false, "hidden units of the acoustic model"},
      {"peak-lr", "5", false, "peak learning rate"},
      {"oclr-fraction", "0.9", false, "share of steps in the one-cycle span"},
      {"min-lr", "1e-5", false, "learning rate after the one-cycle span"},
      {"seed", "1", false, "initialisation and shuffling seed"},
      {"jobs", "1", false, "worker threads"},
      {"descent-check", "true", false, "probe the gradient every 10 steps"},
      {"transitions", "", false, "transition model file (else P-approx)"},
      {"prior", "", false, "label prior file (else P-approx)"},
      {"mean-phoneme-ms", "80", false, "P-approx mean phoneme duration"},
      {"frame-shift-ms", "10", false, "feature frame shift"},
      {"prior-floor", "1e-4", false, "P-approx prior floor"},
  };
}

std::vector<CommandSpec> BuildCommands() {
  std::vector<CommandSpec> cmds;

  cmds.push_back({"synth", "generate the seeded synthetic corpus", "",
                  {
                      {"out", "", true, "output directory"},
                      {"seed", "7", false, "corpus seed"},
                      {"utts", "50", false, "number of utterances"},
                      {"phonemes", "8", false, "phoneme inventory size (<= 10)"},
                      {"vocab", "12", false, "vocabulary size"},
                      {"min-pron", "2", false, "shortest pronunciation"},
                      {"max-pron", "4", false, "longest pronunciation"},
                      {"min-words", "2", false, "fewest words per utterance"},
                      {"max-words", "4", false, "most words per utterance"},
                      {"eow", "true", false, "end-of-word phoneme variants"},
                      {"speech-loop", "0.875", false, "planted speech loop"},
                      {"silence-loop", "0.8", false, "planted silence loop"},
                      {"inner-silence", "0.3", false,
                       "probability of silence between words"},
                      {"noise", "0.1", false, "feature noise deviation"},
                      {"frame-shift-ms", "10", false, "frame shift"},
                  }});

  CommandSpec train{"train", "full-sum training of the toy acoustic model", "",
                    TrainingKeys("1")};
  train.keys.insert(train.keys.begin() + 4,
                    {{"variant", "p-hmm-s", false, "ctc, p-hmm, p-hmm-s, h-hmm"},
                     {"alpha", "auto", false, "prior scale"},
                     {"beta", "auto", false, "transition scale"},
                     {"gamma", "auto", false, "posterior scale"}});
  train.keys.push_back({"out", "", true, "checkpoint path"});
  train.keys.push_back({"loss-csv", "", false, "per-epoch loss trace"});
  cmds.push_back(train);

  cmds.push_back({"align", "Viterbi or Baum-Welch alignment with a checkpoint",
                  "",
                  {
                      {"model", "", true, "checkpoint"},
                      {"features", "", true, "FEA1 feature archive"},
                      {"corpus", "", true, "corpus metadata"},
                      {"lexicon", "", true, "pronunciation lexicon"},
                      {"mode", "viterbi", false, "viterbi or baum-welch"},
                      {"out", "", true, "output directory"},
                      {"jobs", "1", false, "worker threads"},
                  }});

  cmds.push_back({"decode", "prefix-tree search with a bigram LM", "",
                  {
                      {"model", "", true, "checkpoint"},
                      {"features", "", true, "FEA1 feature archive"},
                      {"lexicon", "", true, "pronunciation lexicon"},
                      {"lm", "", true, "ARPA language model"},
                      {"alpha", "0", false, "prior scale"},
                      {"beta", "0", false, "transition scale"},
                      {"gamma", "1", false, "posterior scale"},
                      {"lambda", "1", false, "LM scale"},
                      {"beam", "inf", false, "score offset beam"},
                      {"prior", "", false, "prior file (else checkpoint)"},
                      {"transitions", "", false,
                       "transition file (else checkpoint)"},
                      {"out", "", false, "hypothesis file (else stdout)"},
                      {"jobs", "1", false, "worker threads"},
                  }});

  cmds.push_back(
      {"estimate", "fixed transition and prior estimates", "mode",
       {
           {"mode", "", true, "p-approx or marginal-prior"},
           {"corpus", "", false, "corpus metadata (p-approx)"},
           {"lexicon", "", false, "pronunciation lexicon (p-approx)"},
           {"inventory", "", false, "phoneme inventory (p-approx)"},
           {"eow", "true", false, "end-of-word phoneme variants"},
           {"states", "1", false, "HMM states per phoneme"},
           {"mean-phoneme-ms", "80", false, "mean phoneme duration"},
           {"frame-shift-ms", "10", false, "frame shift"},
           {"prior-floor", "1e-4", false, "smallest prior probability"},
           {"model", "", false, "checkpoint (marginal-prior)"},
           {"features", "", false, "feature archive (marginal-prior)"},
           {"transitions-out", "", false, "transition file (else stdout)"},
           {"prior-out", "", false, "prior file"},
           {"jobs", "1", false, "worker threads"},
       }});

  cmds.push_back({"tse", "time-stamp error against a reference alignment", "",
                  {
                      {"cand", "", true, "candidate alignment text"},
                      {"ref", "", true, "reference alignment text"},
                      {"bin-ms", "10", false, "histogram bin width"},
                      {"out", "", false, "report file (else stdout)"},
                  }});

  cmds.push_back({"wer", "word error rate", "",
                  {
                      {"hyp", "", true, "hypotheses"},
                      {"ref", "", false, "reference transcripts"},
                      {"ref-corpus", "", false, "corpus metadata as reference"},
                      {"out", "", false, "report file (else stdout)"},
                  }});

  cmds.push_back({"plot", "SVG alignment plot", "",
                  {
                      {"soft", "", false, "SAL1 occupation file"},
                      {"hard", "", false, "HAL1 alignment file"},
                      {"ref", "", false, "reference alignment text"},
                      {"utt", "", false, "utterance id within --ref"},
                      {"names", "", false, "label names, one per line"},
                      {"title", "", false, "plot title"},
                      {"out", "", true, "SVG path"},
                  }});

  CommandSpec sweep{"sweep", "h-hmm training over a grid of scales", "",
                    TrainingKeys("4")};
  sweep.keys.push_back({"alphas", "1,0.5,0.3,0.1", false, "prior scales"});
  sweep.keys.push_back({"betas", "1,0.1,0.3,0.01", false, "transition scales"});
  sweep.keys.push_back({"gamma", "1", false, "posterior scale"});
  sweep.keys.push_back({"reference", "", false, "reference alignment for TSE"});
  sweep.keys.push_back({"bar", "0.1", false, "convergence loss ratio"});
  sweep.keys.push_back({"out", "", false, "result table (else stdout)"});
  cmds.push_back(sweep);
  return cmds;
}

// ---- shared loading ------------------------------------------------------

struct TrainingData {
  std::vector<std::string> phonemes;
  Lexicon lexicon;
  std::vector<CorpusEntry> metadata;
  std::vector<TrainingUtterance> utts;
};

TrainingData LoadTrainingData(const Config &c) {
  TrainingData d;
  d.phonemes = ReadPhonemeInventory(c.GetString("inventory"));
  d.lexicon = Lexicon::Read(c.GetString("lexicon"), d.phonemes);
  d.metadata = ReadCorpusMetadata(c.GetString("corpus"));
  d.utts = JoinCorpus(ReadFeatureArchiveFile(c.GetString("features")),
                      d.metadata);
  return d;
}

int GetPositiveInt(const Config &c, std::string_view key) {
  long v = c.GetInt(key);
  if (v < 1 || v > std::numeric_limits<int>::max())
    ConfigError("'" + std::string(key) + "' must be a positive integer");
  return static_cast<int>(v);
}

TrainConfig MakeTrainConfig(const Config &c, Variant variant, Scales scales) {
  TrainConfig tc;
  tc.variant = variant;
  tc.scales = scales;
  tc.eow = c.GetBool("eow");
  tc.states_per_phoneme = GetPositiveInt(c, "states");
  tc.subsample = GetPositiveInt(c, "subsample");
  tc.min_duration = GetPositiveInt(c, "min-duration");
  tc.epochs = static_cast<int>(c.GetInt("epochs"));
  tc.batch_size = GetPositiveInt(c, "batch-size");
  tc.hidden_dim = GetPositiveInt(c, "hidden-dim");
  tc.schedule.peak_lr = c.GetDouble("peak-lr");
  tc.schedule.oclr_fraction = c.GetDouble("oclr-fraction");
  tc.schedule.min_lr = c.GetDouble("min-lr");
  long seed = c.GetInt("seed");
  if (seed < 0) ConfigError("'seed' must be non-negative");
  tc.seed = static_cast<std::uint64_t>(seed);
  tc.jobs = GetPositiveInt(c, "jobs");
  tc.descent_check = c.GetBool("descent-check");
  tc.Validate();
  return tc;
}

PApproxOptions MakePApproxOptions(const Config &c) {
  PApproxOptions o;
  o.mean_phoneme_ms = c.GetDouble("mean-phoneme-ms");
  o.frame_shift_ms = c.GetDouble("frame-shift-ms");
  o.prior_floor = c.GetDouble("prior-floor");
  return o;
}

bool NeedsTransitions(Variant v) {
  return v == Variant::kPHmm || v == Variant::kHHmm;
}

struct Tables {
  std::optional<TransitionModel> transitions;
  std::optional<PriorModel> prior;
};

// Files win; otherwise P-approx estimates from the training corpus.
Tables ResolveTables(const Config &c, Variant variant, const TrainingData &d,
                     const LabelInventory &inventory) {
  Tables t;
  const std::string &tpath = c.GetString("transitions");
  const std::string &ppath = c.GetString("prior");
  if (NeedsTransitions(variant)) {
    if (!tpath.empty()) {
      t.transitions = TransitionModel::Read(tpath);
    } else {
      t.transitions = PApproxTransitions(MakePApproxOptions(c), d.metadata,
                                         d.lexicon, inventory);
      Info("transitions (P-approx): speech-loop " +
           std::to_string(t.transitions->speech_loop) + ", silence-loop " +
           std::to_string(t.transitions->silence_loop));
    }
  } else if (!tpath.empty()) {
    Warn(std::string(VariantName(variant)) + " ignores the transition model");
  }
  if (variant == Variant::kHHmm) {
    if (!ppath.empty()) {
      t.prior = PriorModel::Read(ppath, LabelNames(inventory));
    } else {
      t.prior = PApproxPrior(MakePApproxOptions(c), d.metadata, d.lexicon,
                             inventory);
    }
  } else if (!ppath.empty()) {
    Warn(std::string(VariantName(variant)) + " ignores the prior");
  }
  return t;
}

std::string CheckpointText(const Config &resolved,
                           const std::vector<std::string> &phonemes,
                           const Tables &tables,
                           const LabelInventory &inventory) {
  std::string text = resolved.ToText();
  text += "[phonemes]\n";
  for (const auto &p : phonemes) text += p + "\n";
  if (tables.transitions)
    text += "[transitions]\n" + tables.transitions->ToText();
  if (tables.prior)
    text += "[prior]\n" + tables.prior->ToText(LabelNames(inventory));
  return text;
}

void WriteOrPrint(const Config &c, const std::string &key,
                  const std::string &text, std::ostream &out) {
  const std::string &path = c.GetString(key);
  if (path.empty()) {
    out << text;
  } else {
    WriteFileAtomic(path, text);
    Info("wrote " + path);
  }
}

std::string FormatScore(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void CheckFileName(const std::string &id) {
  if (id.empty() || id.find('/') != std::string::npos || id == "." ||
      id == "..")
    DataError("utterance id '" + id + "' is not usable as a file name");
}

// ---- commands ------------------------------------------------------------

void RunSynth(const Config &c, std::ostream &out) {
  SynthConfig s;
  long seed = c.GetInt("seed");
  if (seed < 0) ConfigError("'seed' must be non-negative");
  s.seed = static_cast<std::uint64_t>(seed);
  s.utterances = GetPositiveInt(c, "utts");
  s.phonemes = GetPositiveInt(c, "phonemes");
  s.vocabulary = GetPositiveInt(c, "vocab");
  s.min_pronunciation = GetPositiveInt(c, "min-pron");
  s.max_pronunciation = GetPositiveInt(c, "max-pron");
  s.min_words = GetPositiveInt(c, "min-words");
  s.max_words = GetPositiveInt(c, "max-words");
  s.eow = c.GetBool("eow");
  s.speech_loop = c.GetDouble("speech-loop");
  s.silence_loop = c.GetDouble("silence-loop");
  s.inner_silence = c.GetDouble("inner-silence");
  s.noise = c.GetDouble("noise");
  s.frame_shift_ms = c.GetDouble("frame-shift-ms");
  SynthCorpus corpus = GenerateSynthCorpus(s);
  WriteSynthCorpus(corpus, c.GetString("out"));
  long frames = 0;
  for (const auto &u : corpus.features) frames += u.features.rows();
  out << "utterances\t" << corpus.features.size() << "\nframes\t" << frames
      << "\nwords\t" << corpus.lexicon.size() << '\n';
}

void RunTrain(const Config &c, std::uint64_t fp, std::ostream &out) {
  Variant variant = ParseVariant(c.GetString("variant"));
  TrainConfig tc = MakeTrainConfig(c, variant, ResolveScales(c, variant));
  TrainingData d = LoadTrainingData(c);
  LabelInventory inventory =
      InventoryFor(d.lexicon, variant, tc.eow, tc.states_per_phoneme);
  Tables tables = ResolveTables(c, variant, d, inventory);
  TrainResult r = Train(tc, d.utts, d.lexicon, tables.transitions,
                        tables.prior, [](const EpochStats &e) {
                          if (e.epoch % 10 == 0)
                            Info("epoch " + std::to_string(e.epoch) +
                                 " loss " + std::to_string(e.loss));
                        });
  r.model.Save(c.GetString("out"), fp,
               CheckpointText(c, d.phonemes, tables, inventory));
  Info("wrote " + c.GetString("out"));
  if (!c.GetString("loss-csv").empty())
    WriteFileAtomic(c.GetString("loss-csv"), FormatLossTrace(r.trace));
  out << "initial_loss\t" << FormatScore(r.trace.front().loss)
      << "\nfinal_loss\t" << FormatScore(r.trace.back().loss)
      << "\nepochs_to_10pct\t" << r.EpochsToReach(0.1) << "\nskipped\t"
      << r.skipped << "\ndescent_failures\t" << r.descent_failures << '\n';
}

void RunAlign(const Config &c, std::ostream &out) {
  const std::string &mode = c.GetString("mode");
  if (mode != "viterbi" && mode != "baum-welch")
    ConfigError("align mode must be viterbi or baum-welch, got '" + mode + "'");
  Checkpoint ck = LoadCheckpoint(c.GetString("model"));
  Lexicon lexicon = Lexicon::Read(c.GetString("lexicon"), ck.phonemes);
  auto utts = JoinCorpus(ReadFeatureArchiveFile(c.GetString("features")),
                         ReadCorpusMetadata(c.GetString("corpus")));
  const std::string dir = c.GetString("out");
  std::filesystem::create_directories(dir);
  const int factor = ck.model.shape().subsample;
  const int num_labels = ck.inventory.NumLabels();

  std::vector<std::optional<HardAlignment>> hards(utts.size());
  std::vector<bool> skipped(utts.size(), false);
  ParallelFor(static_cast<int>(utts.size()),
              GetPositiveInt(c, "jobs"), [&](int i) {
    const auto &u = utts[i];
    CheckFileName(u.id);
    AlignmentFsa fsa = BuildUtteranceFsa(u.words, lexicon, ck.inventory,
                                         ck.min_duration, u.id);
    FrameScores post = ck.model.LogPosteriors(u.features, ck.frame_shift_ms);
    if (post.NumFrames() < fsa.MinPathLength()) {
      skipped[i] = true;
      return;
    }
    ArcWeightFn w = MakeArcWeightFn(ck.spec, post);
    if (mode == "viterbi") {
      ViterbiResult v = Viterbi(fsa, post, w);
      WriteFileAtomic(dir + "/" + u.id + ".hal",
                      SerializeToString([&](std::ostream &o) {
                        WriteHardAlignment(o, v.alignment, num_labels);
                      }));
      hards[i] = ExpandAlignment(v.alignment, factor);
    } else {
      SoftAlignment soft = OccupationProbabilities(fsa, post, w);
      WriteFileAtomic(dir + "/" + u.id + ".sal",
                      SerializeToString([&](std::ostream &o) {
                        WriteSoftAlignment(o, soft);
                      }));
    }
  });

  int n_skipped = 0;
  for (std::size_t i = 0; i < utts.size(); ++i)
    if (skipped[i]) {
      Warn("utterance '" + utts[i].id + "' is shorter than its lattice");
      ++n_skipped;
    }
  WriteFileAtomic(dir + "/labels.txt", Join(LabelNames(ck.inventory), "\n") +
                                           "\n");
  if (mode == "viterbi") {
    AlignmentSet set;
    set.frame_shift_ms = ck.frame_shift_ms;
    for (std::size_t i = 0; i < utts.size(); ++i)
      if (hards[i]) set.Add(utts[i].id, std::move(*hards[i]));
    WriteFileAtomic(dir + "/alignment.ali",
                    FormatAlignmentText(set, ck.inventory));
  }
  out << "aligned\t" << utts.size() - n_skipped << "\nskipped\t" << n_skipped
      << '\n';
}

void RunDecode(const Config &c, std::ostream &out) {
  Checkpoint ck = LoadCheckpoint(c.GetString("model"));
  Lexicon lexicon = Lexicon::Read(c.GetString("lexicon"), ck.phonemes);
  NGramLm lm = NGramLm::ReadArpa(c.GetString("lm"));
  auto utts = ReadFeatureArchiveFile(c.GetString("features"));
  DecodingGraph graph = BuildDecodingGraph(lexicon, ck.inventory);

  DecodeOptions opts;
  opts.scales.alpha = c.GetDouble("alpha");
  opts.scales.beta = c.GetDouble("beta");
  opts.scales.gamma = c.GetDouble("gamma");
  opts.scales.lambda = c.GetDouble("lambda");
  opts.scales.Validate();
  opts.beam = c.GetDouble("beam");
  if (!(opts.beam > 0)) ConfigError("'beam' must be positive");

  std::optional<PriorModel> prior = ck.spec.prior;
  if (!c.GetString("prior").empty())
    prior = PriorModel::Read(c.GetString("prior"), LabelNames(ck.inventory));
  std::optional<TransitionModel> transitions = ck.spec.transitions;
  if (!c.GetString("transitions").empty())
    transitions = TransitionModel::Read(c.GetString("transitions"));
  if (opts.scales.alpha > 0 && !prior)
    ConfigError("alpha > 0 needs a prior (none in checkpoint or --prior)");
  if (opts.scales.beta > 0 && ck.inventory.topology() == Topology::kHmm01 &&
      !transitions)
    ConfigError("beta > 0 needs transitions (none in checkpoint or --transitions)");
  if (prior) opts.prior = &*prior;
  if (transitions) opts.transitions = &*transitions;

  std::vector<std::string> lines(utts.size());
  ParallelFor(static_cast<int>(utts.size()), GetPositiveInt(c, "jobs"),
              [&](int i) {
    FrameScores post =
        ck.model.LogPosteriors(utts[i].features, ck.frame_shift_ms);
    std::string words, score = "-inf";
    try {
      DecodeResult r = Decode(post, graph, lm, opts);
      words = Join(r.words, " ");
      score = FormatScore(r.score);
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::kData) throw;
      Warn(utts[i].id + ": " + e.what());
    }
    lines[i] = utts[i].id + "\t" + words + "\t" + score + "\n";
  });
  std::string text;
  for (const auto &l : lines) text += l;
  WriteOrPrint(c, "out", text, out);
}

void RunEstimate(const Config &c, std::ostream &out) {
  const std::string &mode = c.GetString("mode");
  if (mode == "p-approx") {
    for (const char *key : {"lexicon", "inventory"})
      if (c.GetString(key).empty())
        ConfigError(std::string("p-approx needs --") + key);
    auto phonemes = ReadPhonemeInventory(c.GetString("inventory"));
    Lexicon lexicon = Lexicon::Read(c.GetString("lexicon"), phonemes);
    LabelInventory inventory(phonemes, c.GetBool("eow"),
                             GetPositiveInt(c, "states"), Topology::kHmm01);
    std::vector<CorpusEntry> corpus;
    if (!c.GetString("corpus").empty())
      corpus = ReadCorpusMetadata(c.GetString("corpus"));
    PApproxOptions opts = MakePApproxOptions(c);
    TransitionModel tm = PApproxTransitions(opts, corpus, lexicon, inventory);
    WriteOrPrint(c, "transitions-out", tm.ToText(), out);
    if (!c.GetString("prior-out").empty()) {
      if (corpus.empty()) ConfigError("the P-approx prior needs --corpus");
      PriorModel prior = PApproxPrior(opts, corpus, lexicon, inventory);
      WriteFileAtomic(c.GetString("prior-out"),
                      prior.ToText(LabelNames(inventory)));
      Info("wrote " + c.GetString("prior-out"));
    }
  } else if (mode == "marginal-prior") {
    for (const char *key : {"model", "features", "prior-out"})
      if (c.GetString(key).empty())
        ConfigError(std::string("marginal-prior needs --") + key);
    Checkpoint ck = LoadCheckpoint(c.GetString("model"));
    auto utts = ReadFeatureArchiveFile(c.GetString("features"));
    std::vector<FrameScores> posts(utts.size());
    ParallelFor(static_cast<int>(utts.size()), GetPositiveInt(c, "jobs"),
                [&](int i) {
      posts[i] = ck.model.LogPosteriors(utts[i].features, ck.frame_shift_ms);
    });
    PriorModel prior = MarginalPrior(posts, c.GetDouble("prior-floor"));
    WriteFileAtomic(c.GetString("prior-out"),
                    prior.ToText(LabelNames(ck.inventory)));
    Info("wrote " + c.GetString("prior-out"));
  } else {
    ConfigError("estimate mode must be p-approx or marginal-prior, got '" +
                mode + "'");
  }
}

void RunTse(const Config &c, std::ostream &out) {
  AlignmentSet cand = ReadAlignmentTextFile(c.GetString("cand"));
  AlignmentSet ref = ReadAlignmentTextFile(c.GetString("ref"));
  double bin = c.GetDouble("bin-ms");
  if (!(bin > 0)) ConfigError("'bin-ms' must be positive");
  TseReport r = ComputeTse(cand, ref, bin);
  WriteOrPrint(c, "out", r.ToText(), out);
}

void RunWer(const Config &c, std::ostream &out) {
  const std::string &ref = c.GetString("ref");
  const std::string &ref_corpus = c.GetString("ref-corpus");
  if (ref.empty() == ref_corpus.empty())
    ConfigError("wer needs exactly one of --ref and --ref-corpus");
  Transcripts refs;
  if (!ref.empty()) {
    refs = ReadTranscripts(ref);
  } else {
    for (auto &e : ReadCorpusMetadata(ref_corpus)) refs[e.id] = e.words;
  }
  WerResult r = ComputeWer(ReadTranscripts(c.GetString("hyp")), refs);
  WriteOrPrint(c, "out", r.ToText(), out);
}

int Rescale(int frame, double from_ms, double to_ms) {
  return static_cast<int>(std::lround(frame * from_ms / to_ms));
}

// Maps a reference alignment onto a coarser or finer frame grid of |frames|
// frames, dropping segments that vanish.
HardAlignment RegridReference(const HardAlignment &ref, double to_ms,
                              int frames) {
  HardAlignment out;
  out.frame_shift_ms = to_ms;
  out.labels.assign(frames, -1);
  out.units.assign(frames, -1);
  auto clamp = [&](int f) { return std::clamp(f, 0, frames); };
  for (const auto &s : ref.segments) {
    Segment n = s;
    n.start = clamp(Rescale(s.start, ref.frame_shift_ms, to_ms));
    n.end = clamp(Rescale(s.end, ref.frame_shift_ms, to_ms));
    if (n.end <= n.start) continue;
    for (int t = n.start; t < n.end; ++t) out.labels[t] = n.label;
    out.segments.push_back(n);
  }
  for (const auto &w : ref.words) {
    WordSegment n = w;
    n.start = clamp(Rescale(w.start, ref.frame_shift_ms, to_ms));
    n.end = clamp(Rescale(w.end, ref.frame_shift_ms, to_ms));
    if (n.end > n.start) out.words.push_back(n);
  }
  return out;
}

void RunPlot(const Config &c, std::ostream &out) {
  std::optional<SoftAlignment> soft;
  std::optional<HardAlignment> hard;
  std::optional<HardAlignment> ref;
  if (!c.GetString("soft").empty())
    soft = ReadSoftAlignmentFile(c.GetString("soft"));
  if (!c.GetString("hard").empty())
    hard = ReadHardAlignmentFile(c.GetString("hard"));
  if (!soft && !hard) ConfigError("plot needs --soft or --hard");
  if (soft && hard && std::abs(soft->frame_shift_ms - hard->frame_shift_ms) >
                          1e-9)
    DataError("plot: soft and hard alignments differ in frame shift");
  const int frames = soft ? static_cast<int>(soft->occupation.rows())
                          : hard->NumFrames();
  const double shift = soft ? soft->frame_shift_ms : hard->frame_shift_ms;

  if (!c.GetString("ref").empty()) {
    AlignmentSet set = ReadAlignmentTextFile(c.GetString("ref"));
    std::string utt = c.GetString("utt");
    if (utt.empty()) {
      if (set.order.size() != 1)
        ConfigError("--ref holds several utterances; choose one with --utt");
      utt = set.order.front();
    }
    auto it = set.utts.find(utt);
    if (it == set.utts.end())
      DataError("utterance '" + utt + "' not in the reference");
    HardAlignment r = it->second;
    r.frame_shift_ms = set.frame_shift_ms;
    // Reference tokens are not mapped onto model labels; only boundaries
    // are drawn.
    for (auto &s : r.segments) s.label = -1;
    ref = RegridReference(r, shift, frames);
  }

  PlotInput in;
  if (soft) in.soft = &*soft;
  if (hard) in.hard = &*hard;
  if (ref) in.reference = &*ref;
  if (!c.GetString("names").empty()) {
    std::istringstream names(ReadFile(c.GetString("names")));
    std::string line;
    while (std::getline(names, line))
      if (!Trim(line).empty()) in.label_names.emplace_back(Trim(line));
  }
  in.title = c.GetString("title");
  WriteFileAtomic(c.GetString("out"), RenderAlignmentSvg(in));
  out << "wrote\t" << c.GetString("out") << '\n';
}

struct SweepCell {
  double alpha = 0, beta = 0;
  double loss0 = 0, loss = 0;
  double ratio = 0;
  bool converged = false;
  double tse_ms = std::numeric_limits<double>::quiet_NaN();
};

// Per-frame p-hmm-s loss: a yardstick that does not move with the scales.
double EvalLoss(const AcousticModel &model,
                const std::vector<TrainingUtterance> &utts,
                const std::vector<AlignmentFsa> &fsas, int jobs) {
  const ModelSpec eval{Variant::kPHmmS, DefaultScales(Variant::kPHmmS), {}, {}};
  std::vector<double> loss(utts.size(), 0.0);
  std::vector<long> frames(utts.size(), 0);
  ParallelFor(static_cast<int>(utts.size()), jobs, [&](int i) {
    FrameScores p = model.LogPosteriors(utts[i].features, 10.0);
    if (p.NumFrames() < fsas[i].MinPathLength()) return;
    loss[i] = FullSumLoss(eval, fsas[i], p, utts[i].id);
    frames[i] = p.NumFrames();
  });
  double total = 0;
  long n = 0;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    total += loss[i];
    n += frames[i];
  }
  if (n == 0) DataError("sweep: no utterance fits its lattice");
  return total / static_cast<double>(n);
}

void RunSweep(const Config &c, std::ostream &out) {
  const Variant variant = Variant::kHHmm;
  TrainingData d = LoadTrainingData(c);
  TrainConfig base = MakeTrainConfig(c, variant, DefaultScales(variant));
  LabelInventory inventory =
      InventoryFor(d.lexicon, variant, base.eow, base.states_per_phoneme);
  Tables tables = ResolveTables(c, variant, d, inventory);
  const double gamma = c.GetDouble("gamma");
  const double bar = c.GetDouble("bar");
  if (!(bar > 0 && bar < 1)) ConfigError("'bar' must lie in (0, 1)");
  std::optional<AlignmentSet> reference;
  if (!c.GetString("reference").empty())
    reference = ReadAlignmentTextFile(c.GetString("reference"));

  // Lattices without MinDur for the yardstick loss.
  LabelInventory eval_inventory =
      InventoryFor(d.lexicon, Variant::kPHmmS, base.eow, base.states_per_phoneme);
  std::vector<AlignmentFsa> eval_fsas;
  for (const auto &u : d.utts)
    eval_fsas.push_back(
        BuildUtteranceFsa(u.words, d.lexicon, eval_inventory, 1, u.id));
  AcousticModel untrained(
      {static_cast<int>(d.utts.front().features.cols()), base.hidden_dim,
       inventory.NumLabels(), base.subsample},
      base.seed);
  const double eval0 = EvalLoss(untrained, d.utts, eval_fsas, base.jobs);
  const double shift = c.GetDouble("frame-shift-ms");

  std::vector<SweepCell> cells;
  for (double alpha : c.GetDoubleList("alphas"))
    for (double beta : c.GetDoubleList("betas")) {
      TrainConfig tc = base;
      tc.scales = {alpha, beta, gamma, 1.0};
      tc.scales.Validate();
      TrainResult r = Train(tc, d.utts, d.lexicon, tables.transitions,
                            tables.prior);
      SweepCell cell;
      cell.alpha = alpha;
      cell.beta = beta;
      cell.loss0 = r.trace.front().loss;
      cell.loss = r.trace.back().loss;
      cell.ratio = EvalLoss(r.model, d.utts, eval_fsas, base.jobs) / eval0;
      cell.converged = cell.ratio <= bar;
      if (reference) {
        ModelSpec spec{variant, tc.scales, tables.transitions, tables.prior};
        AlignmentSet cand;
        cand.frame_shift_ms = shift;
        std::vector<std::optional<HardAlignment>> hards(d.utts.size());
        ParallelFor(static_cast<int>(d.utts.size()), base.jobs, [&](int i) {
          const auto &u = d.utts[i];
          AlignmentFsa fsa = BuildUtteranceFsa(u.words, d.lexicon, inventory,
                                               base.min_duration, u.id);
          FrameScores p = r.model.LogPosteriors(u.features, shift);
          if (p.NumFrames() < fsa.MinPathLength()) return;
          hards[i] = ExpandAlignment(
              Viterbi(fsa, p, MakeArcWeightFn(spec, p)).alignment,
              base.subsample);
        });
        for (std::size_t i = 0; i < d.utts.size(); ++i)
          if (hards[i]) cand.Add(d.utts[i].id, std::move(*hards[i]));
        cell.tse_ms = ComputeTse(cand, *reference).mean_ms;
      }
      Info("alpha " + std::to_string(alpha) + " beta " + std::to_string(beta) +
           " ratio " + std::to_string(cell.ratio));
      cells.push_back(cell);
    }

  std::size_t worst = 0;
  for (std::size_t i = 1; i < cells.size(); ++i)
    if (cells[i].ratio > cells[worst].ratio) worst = i;

  std::ostringstream os;
  os << "alpha\tbeta\tgamma\tinitial_loss\tfinal_loss\teval_ratio\tconverged"
        "\ttse_ms\tmarker\n";
  char buf[256];
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const SweepCell &s = cells[i];
    std::snprintf(buf, sizeof buf, "%g\t%g\t%g\t%.6f\t%.6f\t%.6f\t%s\t%s\t%s\n",
                  s.alpha, s.beta, gamma, s.loss0, s.loss, s.ratio,
                  s.converged ? "yes" : "no",
                  std::isnan(s.tse_ms) ? "-" : FormatScore(s.tse_ms).c_str(),
                  i == worst ? "worst" : "-");
    os << buf;
  }
  WriteOrPrint(c, "out", os.str(), out);
}

std::vector<std::string> SectionLines(const std::string &text,
                                      const std::string &section) {
  std::vector<std::string> lines;
  bool inside = section.empty();
  for (const auto &line : Split(text, '\n')) {
    // Headers have no blanks, unlike prior lines such as "[SILENCE] 0.1".
    if (line.size() > 2 && line.front() == '[' && line.back() == ']' &&
        line.find_first_of(" \t") == std::string::npos) {
      inside = line == "[" + section + "]";
      continue;
    }
    if (inside) lines.push_back(line);
  }
  return lines;
}

}  // namespace

const std::vector<CommandSpec> &Commands() {
  static const std::vector<CommandSpec> commands = BuildCommands();
  return commands;
}

const CommandSpec &FindCommand(std::string_view name) {
  for (const auto &c : Commands())
    if (c.name == name) return c;
  UsageError("unknown command '" + std::string(name) + "'");
}

Config ResolveConfig(std::string_view command, const Config &given) {
  const CommandSpec &spec = FindCommand(command);
  Config resolved;
  for (const auto &[key, value] : given.values()) {
    bool known = std::any_of(spec.keys.begin(), spec.keys.end(),
                             [&](const KeySpec &k) { return k.name == key; });
    if (!known)
      UsageError("unknown option '" + key + "' for " + spec.name);
  }
  for (const auto &k : spec.keys) {
    std::string v = given.Has(k.name) ? given.GetString(k.name)
                                      : k.default_value;
    if (k.required && v.empty())
      UsageError(spec.name + " requires --" + k.name);
    resolved.Set(k.name, v);
  }
  resolved.Set("command", spec.name);
  return resolved;
}

std::uint64_t RunCommand(std::string_view command, const Config &given,
                         std::ostream &out) {
  Config c = ResolveConfig(command, given);
  const std::uint64_t fp = c.Fingerprint();
  const std::string &name = c.GetString("command");
  if (name == "synth") RunSynth(c, out);
  else if (name == "train") RunTrain(c, fp, out);
  else if (name == "align") RunAlign(c, out);
  else if (name == "decode") RunDecode(c, out);
  else if (name == "estimate") RunEstimate(c, out);
  else if (name == "tse") RunTse(c, out);
  else if (name == "wer") RunWer(c, out);
  else if (name == "plot") RunPlot(c, out);
  else if (name == "sweep") RunSweep(c, out);
  return fp;
}

Checkpoint LoadCheckpoint(const std::string &path) {
  Checkpoint ck;
  std::string text;
  ck.model = AcousticModel::Load(path, &ck.fingerprint, &text);
  Config c;
  for (const auto &line : SectionLines(text, "")) {
    auto eq = line.find('=');
    if (line.empty()) continue;
    if (eq == std::string::npos) DataError("checkpoint: malformed config");
    c.Set(line.substr(0, eq), line.substr(eq + 1));
  }
  ck.train_config = c;
  try {
    for (const auto &p : SectionLines(text, "phonemes"))
      if (!p.empty()) ck.phonemes.push_back(p);
    const Variant variant = ParseVariant(c.GetString("variant"));
    ck.inventory = InventoryFor(Lexicon(ck.phonemes), variant,
                                c.GetBool("eow"), GetPositiveInt(c, "states"));
    ck.spec.variant = variant;
    ck.spec.scales = ResolveScales(c, variant);
    ck.min_duration = GetPositiveInt(c, "min-duration");
    ck.frame_shift_ms = c.GetDouble("frame-shift-ms");
  } catch (const Error &e) {
    DataError("checkpoint '" + path + "': " + e.what());
  }
  auto tlines = SectionLines(text, "transitions");
  if (!tlines.empty()) {
    std::istringstream in(Join(tlines, "\n"));
    ck.spec.transitions = TransitionModel::Parse(in);
  }
  auto plines = SectionLines(text, "prior");
  if (!plines.empty()) {
    std::istringstream in(Join(plines, "\n"));
    ck.spec.prior = PriorModel::Parse(in, LabelNames(ck.inventory));
  }
  if (ck.model.shape().num_labels != ck.inventory.NumLabels())
    DataError("checkpoint '" + path + "': label count does not match config");
  ck.spec.Validate();
  return ck;
}

std::vector<std::string> LabelNames(const LabelInventory &inventory) {
  std::vector<std::string> names;
  for (int l = 0; l < inventory.NumLabels(); ++l)
    names.push_back(inventory.Name(l));
  return names;
}

Scales ResolveScales(const Config &config, Variant variant) {
  Scales s = DefaultScales(variant);
  auto pick = [&](const char *key, double *dst) {
    if (config.Has(key) && config.GetString(key) != "auto")
      *dst = config.GetDouble(key);
  };
  pick("alpha", &s.alpha);
  pick("beta", &s.beta);
  pick("gamma", &s.gamma);
  s.Validate();
  return s;
}

}  // namespace fullsum
