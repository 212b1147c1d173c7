#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "ged/checkpoint.hpp"
#include "ged/corpus.hpp"
#include "ged/dataset.hpp"
#include "ged/error.hpp"
#include "ged/evaluate.hpp"
#include "ged/lingpipe.hpp"
#include "ged/model.hpp"
#include "ged/noisegen.hpp"
#include "ged/train.hpp"
#include "ged/vocabulary.hpp"

namespace ged::cli {
namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  return in;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// --- preprocess -----------------------------------------------------------

struct PreprocessArgs {
  std::string in, out;
  std::size_t min_len = 6, max_len = 50;
  bool keep_parentheses = false;
  bool keep_numbers = false;
};

void preprocess(const PreprocessArgs& a, std::ostream& out) {
  NormalizationRules rules;
  rules.min_length = a.min_len;
  rules.max_length = a.max_len;
  rules.strip_parentheses = !a.keep_parentheses;
  rules.replace_numbers = !a.keep_numbers;
  if (rules.min_length > rules.max_length) throw Error("--min-len exceeds --max-len");
  const Normalizer normalize(rules);

  auto in = open_input(a.in);
  std::vector<Sentence> accepted;
  std::map<RejectReason, std::size_t> rejected;
  std::size_t rejected_total = 0;
  std::string line;
  while (std::getline(in, line)) {
    auto outcome = normalize(line);
    if (auto* s = std::get_if<Sentence>(&outcome)) {
      accepted.push_back(std::move(*s));
    } else {
      ++rejected[std::get<Rejection>(outcome).reason];
      ++rejected_total;
    }
  }
  if (in.bad()) throw Error("error reading " + a.in);
  auto file = open_output(a.out);
  write_sentences(file, accepted);

  out << "accepted " << accepted.size() << " / rejected " << rejected_total << "\n";
  for (const auto& [reason, count] : rejected) out << "  " << to_string(reason) << " " << count << "\n";
}

// --- build-vocab ----------------------------------------------------------

struct VocabArgs {
  std::string in, data, out;
  std::uint64_t min_freq = 1;
};

void build_vocab(const VocabArgs& a, std::ostream& out) {
  std::vector<Sentence> corpus;
  if (!a.in.empty()) {
    corpus = read_sentences(std::filesystem::path(a.in));
  } else {
    for (auto& s : read_dataset(std::filesystem::path(a.data))) corpus.push_back({std::move(s.tokens)});
  }
  const Vocabulary vocab = build_vocabulary(corpus, a.min_freq);
  vocab.save(std::filesystem::path(a.out));
  out << "vocabulary " << vocab.size() << " entries (" << vocab.content_tokens().size()
      << " tokens with count >= " << a.min_freq << ")\n";
}

// --- build-subst ----------------------------------------------------------

struct SubstArgs {
  std::string tagged, out;
};

void build_subst(const SubstArgs& a, std::ostream& out, std::ostream& err) {
  const auto corpus = parse_tagged_corpus(std::filesystem::path(a.tagged));
  const SubstitutionTable table = build_substitution_table(corpus);
  if (table.empty()) err << "warning: " << a.tagged << " contains no tagged tokens; table is empty\n";
  table.save(std::filesystem::path(a.out));
  out << "sets " << table.sets().size() << ", dictionary " << table.dictionary().size() << "\n";
  for (PosGroup g : kAllPosGroups) {
    const std::size_t n = table.set_count(g);
    if (n) out << "  " << to_string(g) << " " << n << "\n";
  }
}

// --- noisify --------------------------------------------------------------

struct NoisifyArgs {
  std::string in, table, mode = "ling", groups, vocab, out;
  std::uint64_t seed = 0;
  std::uint64_t min_freq = 1;
};

std::set<PosGroup> parse_groups(const std::string& list) {
  std::set<PosGroup> groups;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto g = parse_pos_group(item);
    if (!g) throw Error("unknown part-of-speech group '" + item + "'");
    groups.insert(*g);
  }
  if (groups.empty()) throw Error("--groups is empty");
  return groups;
}

void noisify(const NoisifyArgs& a, std::ostream& out) {
  NoiseConfig config;
  config.seed = a.seed;
  if (a.mode == "ling") {
    config.mode = NoiseMode::kLinguistic;
  } else if (a.mode == "uniform") {
    config.mode = NoiseMode::kUniform;
  } else {
    throw Error("--mode must be uniform or ling");
  }
  if (!a.groups.empty()) config.group_filter = parse_groups(a.groups);

  const auto corpus = read_sentences(std::filesystem::path(a.in));
  std::optional<SubstitutionTable> table;
  std::vector<std::string> pool;
  if (config.mode == NoiseMode::kLinguistic) {
    if (a.table.empty()) throw Error("--mode ling requires --table");
    table = SubstitutionTable::load(std::filesystem::path(a.table));
  } else {
    const Vocabulary vocab = a.vocab.empty() ? build_vocabulary(corpus, a.min_freq)
                                             : Vocabulary::load(std::filesystem::path(a.vocab));
    pool.assign(vocab.content_tokens().begin(), vocab.content_tokens().end());
  }
  const auto result = generate_training_set(corpus, table ? &*table : nullptr, pool, config);
  write_dataset(std::filesystem::path(a.out), result.sentences);
  out << "sentences " << result.sentences.size() << ", skipped " << result.skipped << ", mode "
      << to_string(config.mode) << ", seed " << a.seed << "\n";
}

// --- train ----------------------------------------------------------------

struct TrainArgs {
  std::string data, vocab, model = "bilstm-attn", out, dev, optimizer = "adam";
  std::uint64_t seed = 1;
  std::size_t epochs = 10, batch_size = 32, patience = 0;
  double lr = 1e-3, clip = 5.0, init_range = 0.05;
  std::size_t d_emb = 150, d_hidden = 150, conv_window = 3, conv_d_emb = 50;
};

void train_command(const TrainArgs& a, std::ostream& out) {
  Vocabulary vocab;
  try {
    vocab = Vocabulary::load(std::filesystem::path(a.vocab));
  } catch (const FormatError& e) {
    throw Error(std::string("vocab/data mismatch: invalid vocabulary file: ") + e.what());
  }
  const auto data = read_dataset(std::filesystem::path(a.data));
  if (data.empty()) throw Error(a.data + " contains no sentences");
  std::size_t tokens = 0, unknown = 0;
  for (const auto& s : data) {
    for (const auto& t : s.tokens) {
      ++tokens;
      if (vocab.id(t) == Vocabulary::kUnkId && t != kUnkToken) ++unknown;
    }
  }
  if (unknown == tokens) {
    throw Error("vocab/data mismatch: none of the " + std::to_string(tokens) + " tokens in " +
                a.data + " is in " + a.vocab);
  }
  std::vector<LabeledSentence> dev;
  if (!a.dev.empty()) dev = read_dataset(std::filesystem::path(a.dev));

  ModelConfig mc;
  mc.architecture = parse_architecture(a.model);
  mc.vocab_size = vocab.size();
  mc.d_emb = a.d_emb;
  mc.d_hidden = a.d_hidden;
  mc.conv_window = a.conv_window;
  mc.conv_d_emb = a.conv_d_emb;
  mc.init_range = a.init_range;

  TrainConfig tc;
  tc.seed = a.seed;
  tc.epochs = a.epochs;
  tc.learning_rate = a.lr;
  tc.clip_norm = a.clip;
  tc.batch_size = a.batch_size;
  tc.patience = a.patience;
  if (a.optimizer == "adam") {
    tc.optimizer = ad::OptimizerKind::kAdam;
  } else if (a.optimizer == "sgd") {
    tc.optimizer = ad::OptimizerKind::kSgd;
  } else {
    throw Error("--optimizer must be adam or sgd");
  }

  out << "model " << to_string(mc.architecture) << ", " << data.size() << " sentences, "
      << tokens << " tokens (" << unknown << " unknown)\n";
  const auto result = train(data, vocab, mc, tc, dev, [&](const EpochLog& e) {
    out << "epoch " << e.epoch << " loss " << fixed(e.train_loss, 6);
    if (e.dev_loss >= 0) out << " dev " << fixed(e.dev_loss, 6);
    out << "\n";
  });
  save_checkpoint(result.checkpoint, std::filesystem::path(a.out));
  out << "initial loss " << fixed(result.initial_loss, 6) << ", final loss "
      << fixed(result.final_loss, 6) << "\n";
}

// --- evaluate / detect ----------------------------------------------------

Detector<float> load_model(const std::string& path, Checkpoint& ckpt) {
  ckpt = load_checkpoint(std::filesystem::path(path));
  return load_detector(ckpt);
}

struct EvaluateArgs {
  std::string model, data, json;
  double threshold = 0.5, beta = 0.5;
};

void evaluate_command(const EvaluateArgs& a, std::ostream& out) {
  Checkpoint ckpt;
  const auto detector = load_model(a.model, ckpt);
  const auto data = read_dataset(std::filesystem::path(a.data));
  const auto encoded = encode_dataset(data, ckpt.vocabulary);
  const EvalReport report = evaluate(detector, std::span<const EncodedSentence>(encoded),
                                     a.threshold, a.beta);
  out << format_report_text(report);
  if (!a.json.empty()) {
    auto file = open_output(a.json);
    file << format_report_json(report);
  }
}

struct DetectArgs {
  std::string model, in;
  double threshold = 0.5;
};

void detect(const DetectArgs& a, std::ostream& out) {
  Checkpoint ckpt;
  const auto detector = load_model(a.model, ckpt);
  auto in = open_input(a.in);
  std::string line;
  while (std::getline(in, line)) {
    const Tokens tokens = split_tokens(line);
    if (tokens.empty()) continue;
    std::vector<TokenId> ids;
    for (const auto& t : tokens) {
      ids.push_back(ckpt.vocabulary.id(is_numeric_token(t) ? kNumToken : std::string_view(t)));
    }
    const auto probs = detector.predict(ids);
    const auto flagged = flagged_positions<float>(probs, a.threshold);
    std::string marked, indices;
    std::size_t next = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) marked += ' ';
      if (next < flagged.size() && flagged[next] == i) {
        marked += "[[" + tokens[i] + "]]";
        if (next) indices += ',';
        indices += std::to_string(i);
        ++next;
      } else {
        marked += tokens[i];
      }
    }
    out << marked << "\nindices: " << indices << "\n";
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Token-level grammatical error detection toolkit", "ged"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "Normalize and filter raw sentences");
  c_pre->add_option("--in", pre.in, "Raw text, one sentence per line")->required();
  c_pre->add_option("--out", pre.out, "Accepted sentences")->required();
  c_pre->add_option("--min-len", pre.min_len, "Minimum tokens (inclusive)")->capture_default_str();
  c_pre->add_option("--max-len", pre.max_len, "Maximum tokens (inclusive)")->capture_default_str();
  c_pre->add_flag("--keep-parentheses", pre.keep_parentheses, "Do not strip parenthesized text");
  c_pre->add_flag("--keep-numbers", pre.keep_numbers, "Do not replace numbers with <num>");

  VocabArgs voc;
  auto* c_voc = app.add_subcommand("build-vocab", "Build a vocabulary file");
  auto* voc_in = c_voc->add_option("--in", voc.in, "Sentences, one per line");
  auto* voc_data = c_voc->add_option("--data", voc.data, "Labeled TSV");
  voc_in->excludes(voc_data);
  c_voc->add_option("--out", voc.out, "Vocabulary file")->required();
  c_voc->add_option("--min-freq", voc.min_freq, "Minimum token count")->capture_default_str();

  SubstArgs sub;
  auto* c_sub = app.add_subcommand("build-subst", "Build substitution sets from a tagged corpus");
  c_sub->add_option("--tagged", sub.tagged, "token<TAB>TAG lines")->required();
  c_sub->add_option("--out", sub.out, "Substitution table")->required();

  NoisifyArgs noi;
  auto* c_noi = app.add_subcommand("noisify", "Inject one error per sentence");
  c_noi->add_option("--in", noi.in, "Clean sentences")->required();
  c_noi->add_option("--out", noi.out, "Labeled TSV")->required();
  c_noi->add_option("--mode", noi.mode, "uniform or ling")->capture_default_str();
  c_noi->add_option("--table", noi.table, "Substitution table (ling mode)");
  c_noi->add_option("--seed", noi.seed, "Random seed")->capture_default_str();
  c_noi->add_option("--groups", noi.groups, "Comma-separated groups, e.g. VERB,NOUN,PREP,DET");
  c_noi->add_option("--vocab", noi.vocab, "Replacement vocabulary (uniform mode)");
  c_noi->add_option("--min-freq", noi.min_freq,
                    "Minimum count when the uniform vocabulary is built from --in")
      ->capture_default_str();

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "Train a detector");
  c_tr->add_option("--data", tr.data, "Labeled TSV")->required();
  c_tr->add_option("--vocab", tr.vocab, "Vocabulary file")->required();
  c_tr->add_option("--out", tr.out, "Checkpoint path")->required();
  c_tr->add_option("--model", tr.model, "bilstm-attn, bilstm-noattn or conv")->capture_default_str();
  c_tr->add_option("--seed", tr.seed, "Random seed")->capture_default_str();
  c_tr->add_option("--epochs", tr.epochs)->capture_default_str();
  c_tr->add_option("--lr", tr.lr, "Learning rate")->capture_default_str();
  c_tr->add_option("--clip", tr.clip, "Global gradient norm clip")->capture_default_str();
  c_tr->add_option("--batch-size", tr.batch_size)->capture_default_str();
  c_tr->add_option("--optimizer", tr.optimizer, "adam or sgd")->capture_default_str();
  c_tr->add_option("--d-emb", tr.d_emb)->capture_default_str();
  c_tr->add_option("--d-hidden", tr.d_hidden)->capture_default_str();
  c_tr->add_option("--conv-window", tr.conv_window)->capture_default_str();
  c_tr->add_option("--conv-d-emb", tr.conv_d_emb)->capture_default_str();
  c_tr->add_option("--init-range", tr.init_range)->capture_default_str();
  c_tr->add_option("--dev", tr.dev, "Labeled TSV for early stopping");
  c_tr->add_option("--patience", tr.patience, "Epochs without dev improvement; 0 disables")
      ->capture_default_str();

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Token-level precision, recall and F-measure");
  c_ev->add_option("--model", ev.model, "Checkpoint")->required();
  c_ev->add_option("--data", ev.data, "Labeled TSV")->required();
  c_ev->add_option("--threshold", ev.threshold)->capture_default_str();
  c_ev->add_option("--beta", ev.beta)->capture_default_str();
  c_ev->add_option("--json", ev.json, "Also write the report as JSON");

  DetectArgs de;
  auto* c_de = app.add_subcommand("detect", "Mark suspected errors in sentences");
  c_de->add_option("--model", de.model, "Checkpoint")->required();
  c_de->add_option("--in", de.in, "Tokenized sentences, one per line")->required();
  c_de->add_option("--threshold", de.threshold)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*c_pre) preprocess(pre, out);
    else if (*c_voc) {
      if (voc.in.empty() && voc.data.empty()) throw Error("build-vocab needs --in or --data");
      build_vocab(voc, out);
    }
    else if (*c_sub) build_subst(sub, out, err);
    else if (*c_noi) noisify(noi, out);
    else if (*c_tr) train_command(tr, out);
    else if (*c_ev) evaluate_command(ev, out);
    else if (*c_de) detect(de, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace ged::cli
