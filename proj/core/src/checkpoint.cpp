#include "ged/checkpoint.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ged/error.hpp"

namespace ged {
namespace {

constexpr std::string_view kMagic = "GEDCKPT";

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

template <class T>
bool parse_number(std::string_view text, T& out) {
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && end == text.data() + text.size();
}

std::map<std::string, std::string> config_entries(const ModelConfig& c) {
  return {{"architecture", std::string(to_string(c.architecture))},
          {"vocab_size", std::to_string(c.vocab_size)},
          {"d_emb", std::to_string(c.d_emb)},
          {"d_hidden", std::to_string(c.d_hidden)},
          {"conv_window", std::to_string(c.conv_window)},
          {"conv_d_emb", std::to_string(c.conv_d_emb)},
          {"init_range", format_double(c.init_range)}};
}

bool is_config_key(const std::string& key) {
  static const auto keys = config_entries(ModelConfig{});
  return keys.count(key) > 0;
}

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::string line(const char* what) {
    std::string s;
    if (!std::getline(in_, s)) fail(std::string("truncated file: expected ") + what);
    ++line_;
    return s;
  }

  void bytes(char* dst, std::size_t n, const std::string& what) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) fail("truncated data for " + what);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError(source_, line_, "corrupt checkpoint: " + msg);
  }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

ModelConfig parse_config(const std::map<std::string, std::string>& entries, const Reader& r) {
  auto get = [&](const char* key) -> const std::string& {
    auto it = entries.find(key);
    if (it == entries.end()) r.fail(std::string("missing metadata key '") + key + "'");
    return it->second;
  };
  auto size = [&](const char* key) {
    std::size_t v = 0;
    if (!parse_number(get(key), v)) r.fail(std::string("bad value for '") + key + "'");
    return v;
  };
  ModelConfig c;
  try {
    c.architecture = parse_architecture(get("architecture"));
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    r.fail(e.what());
  }
  c.vocab_size = size("vocab_size");
  c.d_emb = size("d_emb");
  c.d_hidden = size("d_hidden");
  c.conv_window = size("conv_window");
  c.conv_d_emb = size("conv_d_emb");
  if (!parse_number(get("init_range"), c.init_range)) r.fail("bad value for 'init_range'");
  return c;
}

}  // namespace

Checkpoint make_checkpoint(const Detector<float>& detector, const Vocabulary& vocabulary,
                           std::map<std::string, std::string> metadata) {
  if (detector.config().vocab_size != vocabulary.size()) {
    throw ShapeError("model vocabulary size " + std::to_string(detector.config().vocab_size) +
                     " does not match vocabulary of " + std::to_string(vocabulary.size()));
  }
  for (const auto& [key, value] : metadata) {
    if (is_config_key(key)) throw Error("metadata key '" + key + "' is reserved");
    if (key.empty() || key.find_first_of("=\n") != std::string::npos ||
        value.find('\n') != std::string::npos) {
      throw Error("invalid metadata entry '" + key + "'");
    }
  }
  Checkpoint c;
  c.model = detector.config();
  c.vocabulary = vocabulary;
  c.metadata = std::move(metadata);
  const auto& params = detector.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    c.parameters.push_back({params[i].name, params[i].value});
  }
  return c;
}

void restore_parameters(Detector<float>& detector, const Checkpoint& checkpoint) {
  auto& params = detector.parameters();
  if (params.size() != checkpoint.parameters.size()) {
    throw ShapeError("checkpoint has " + std::to_string(checkpoint.parameters.size()) +
                     " tensors, model expects " + std::to_string(params.size()));
  }
  for (const auto& t : checkpoint.parameters) {
    auto* p = params.find(t.name);
    if (!p) throw ShapeError("model has no parameter '" + t.name + "'");
    if (p->value.shape != t.value.shape) {
      throw ShapeError("parameter '" + t.name + "': checkpoint shape " +
                       ad::shape_string(t.value.shape) + " vs model shape " +
                       ad::shape_string(p->value.shape));
    }
  }
  for (const auto& t : checkpoint.parameters) params.get(t.name).value = t.value;
}

Detector<float> load_detector(const Checkpoint& checkpoint) {
  if (checkpoint.model.vocab_size != checkpoint.vocabulary.size()) {
    throw ShapeError("checkpoint vocabulary has " + std::to_string(checkpoint.vocabulary.size()) +
                     " entries, model expects " + std::to_string(checkpoint.model.vocab_size));
  }
  Detector<float> d(checkpoint.model);
  restore_parameters(d, checkpoint);
  return d;
}

void save_checkpoint(const Checkpoint& checkpoint, std::ostream& out) {
  out << kMagic << '\n' << "version " << Checkpoint::kFormatVersion << '\n';
  for (const auto& [k, v] : config_entries(checkpoint.model)) out << k << '=' << v << '\n';
  for (const auto& [k, v] : checkpoint.metadata) out << k << '=' << v << '\n';
  out << "vocab " << checkpoint.vocabulary.size() << '\n';
  for (const auto& tok : checkpoint.vocabulary.tokens()) out << tok << '\n';
  out << "params " << checkpoint.parameters.size() << '\n';
  for (const auto& t : checkpoint.parameters) {
    out << "param " << t.name << ' ' << t.value.rank();
    for (auto d : t.value.shape) out << ' ' << d;
    out << '\n';
    std::string bytes(t.value.size() * 4, '\0');
    for (std::size_t i = 0; i < t.value.size(); ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(t.value.data[i]);
      for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out << '\n';
  }
  out << "end\n";
  if (!out) throw Error("failed to write checkpoint");
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  save_checkpoint(checkpoint, out);
}

Checkpoint load_checkpoint(std::istream& in, const std::string& source) {
  Reader r(in, source);
  if (r.line("magic") != kMagic) r.fail("not a checkpoint file");
  const std::string version_line = r.line("version");
  int version = 0;
  if (version_line.rfind("version ", 0) != 0 ||
      !parse_number(std::string_view(version_line).substr(8), version)) {
    r.fail("bad version line");
  }
  if (version != Checkpoint::kFormatVersion) {
    throw FormatError(source, 2,
                      "checkpoint format version " + std::to_string(version) +
                          " is not supported (expected " +
                          std::to_string(Checkpoint::kFormatVersion) + ")");
  }

  std::map<std::string, std::string> entries;
  std::string s;
  while (true) {
    s = r.line("metadata or vocab");
    if (s.rfind("vocab ", 0) == 0) break;
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) r.fail("bad metadata line '" + s + "'");
    if (!entries.emplace(s.substr(0, eq), s.substr(eq + 1)).second) {
      r.fail("duplicate metadata key '" + s.substr(0, eq) + "'");
    }
  }
  Checkpoint c;
  c.model = parse_config(entries, r);
  for (auto& [k, v] : entries) {
    if (!is_config_key(k)) c.metadata.emplace(k, v);
  }

  std::size_t vocab_count = 0;
  if (!parse_number(std::string_view(s).substr(6), vocab_count)) r.fail("bad vocab count");
  std::vector<std::string> tokens;
  tokens.reserve(vocab_count);
  for (std::size_t i = 0; i < vocab_count; ++i) tokens.push_back(r.line("vocabulary entry"));
  try {
    c.vocabulary = Vocabulary::from_tokens(std::move(tokens));
  } catch (const Error& e) {
    r.fail(std::string("bad vocabulary: ") + e.what());
  }

  s = r.line("params");
  std::size_t param_count = 0;
  if (s.rfind("params ", 0) != 0 || !parse_number(std::string_view(s).substr(7), param_count)) {
    r.fail("bad params line");
  }
  for (std::size_t p = 0; p < param_count; ++p) {
    std::istringstream header(r.line("param header"));
    std::string tag, name;
    std::size_t rank = 0;
    header >> tag >> name >> rank;
    if (!header || tag != "param" || rank == 0 || rank > 2) r.fail("bad param header");
    ad::Shape shape(rank);
    for (auto& d : shape) {
      if (!(header >> d) || d == 0) r.fail("bad shape for '" + name + "'");
    }
    std::string rest;
    if (header >> rest) r.fail("trailing data in header for '" + name + "'");
    const std::size_t n = ad::shape_size(shape);
    if (n > (std::size_t{1} << 31)) r.fail("implausible size for '" + name + "'");
    std::string bytes(n * 4, '\0');
    r.bytes(bytes.data(), bytes.size(), name);
    std::vector<float> values(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) {
        bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i * 4 + b])) << (8 * b);
      }
      values[i] = std::bit_cast<float>(bits);
    }
    if (!r.line("tensor terminator").empty()) r.fail("bad terminator after '" + name + "'");
    c.parameters.push_back({name, ad::Tensor<float>(std::move(shape), std::move(values))});
  }
  if (r.line("end marker") != "end") r.fail("missing end marker");
  return c;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  return load_checkpoint(in, path.string());
}

}  // namespace ged
