#include "pru/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace pru {

namespace {

constexpr char kMagic[4] = {'P', 'R', 'U', '1'};

struct Fnv1a {
  std::uint64_t state = 14695981039346656037ull;
  void feed(const char* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      state ^= static_cast<unsigned char>(data[i]);
      state *= 1099511628211ull;
    }
  }
};

class CheckedWriter {
 public:
  explicit CheckedWriter(std::ostream& out) : out_(out) {}

  void bytes(const char* data, std::size_t n) {
    out_.write(data, static_cast<long>(n));
    hash_.feed(data, n);
  }
  void u32(std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    bytes(b, 4);
  }
  void u64(std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    bytes(b, 8);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::uint64_t digest() const { return hash_.state; }
  void raw_u64(std::uint64_t v) {  // trailing checksum, not hashed
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out_.write(b, 8);
  }

 private:
  std::ostream& out_;
  Fnv1a hash_;
};

class CheckedReader {
 public:
  explicit CheckedReader(std::istream& in) : in_(in) {}

  void bytes(char* data, std::size_t n) {
    in_.read(data, static_cast<long>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw PersistenceError("checkpoint truncated");
    }
    hash_.feed(data, n);
  }
  std::uint32_t u32() {
    char b[4];
    bytes(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    char b[8];
    bytes(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::uint64_t digest() const { return hash_.state; }
  std::uint64_t raw_u64() {
    char b[8];
    in_.read(b, 8);
    if (in_.gcount() != 8) throw PersistenceError("checkpoint truncated at checksum");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }

 private:
  std::istream& in_;
  Fnv1a hash_;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string canonical_config_text(const LMConfig& cfg) {
  std::ostringstream out;
  out << "vocab=" << cfg.vocab << "\n"
      << "embed_dim=" << cfg.embed_dim << "\n"
      << "hidden_dim=" << cfg.hidden_dim << "\n"
      << "layers=" << cfg.layers << "\n"
      << "levels=" << cfg.levels << "\n"
      << "groups=" << cfg.groups << "\n"
      << "subsample=" << subsample_mode_name(cfg.mode) << "\n"
      << "dropout=" << format_double(cfg.dropout) << "\n"
      << "tie_weights=" << (cfg.tie_weights ? 1 : 0) << "\n"
      << "residual=" << (cfg.residual ? 1 : 0) << "\n"
      << "shrink_last=" << (cfg.shrink_last ? 1 : 0) << "\n";
  return out.str();
}

LMConfig parse_config_text(const std::string& text) {
  LMConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw PersistenceError("bad config line: " + line);
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    try {
      if (key == "vocab") cfg.vocab = std::stoul(val);
      else if (key == "embed_dim") cfg.embed_dim = std::stoul(val);
      else if (key == "hidden_dim") cfg.hidden_dim = std::stoul(val);
      else if (key == "layers") cfg.layers = std::stoul(val);
      else if (key == "levels") cfg.levels = std::stoul(val);
      else if (key == "groups") cfg.groups = std::stoul(val);
      else if (key == "subsample") cfg.mode = subsample_mode_from_name(val);
      else if (key == "dropout") cfg.dropout = std::stod(val);
      else if (key == "tie_weights") cfg.tie_weights = val == "1";
      else if (key == "residual") cfg.residual = val == "1";
      else if (key == "shrink_last") cfg.shrink_last = val == "1";
      else throw PersistenceError("unknown config key in checkpoint: " + key);
    } catch (const std::invalid_argument&) {
      throw PersistenceError("bad config value: " + line);
    }
  }
  return cfg;
}

void save_checkpoint(LanguageModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PersistenceError("cannot open checkpoint for writing: " + path);
  CheckedWriter w(out);
  w.bytes(kMagic, 4);
  w.u32(kCheckpointVersion);
  std::string cfg = canonical_config_text(model.config());
  w.u32(static_cast<std::uint32_t>(cfg.size()));
  w.bytes(cfg.data(), cfg.size());

  std::vector<Parameter*> params = model.parameters();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (Parameter* p : params) {
    w.u32(static_cast<std::uint32_t>(p->name.size()));
    w.bytes(p->name.data(), p->name.size());
    w.u32(static_cast<std::uint32_t>(p->value.rank()));
    for (std::size_t e : p->value.shape()) w.u64(e);
    const double* d = p->value.data();
    for (std::size_t i = 0; i < p->value.size(); ++i) w.f64(d[i]);
  }
  w.raw_u64(w.digest());
  out.flush();
  if (!out) throw PersistenceError("checkpoint write failed: " + path);
}

LanguageModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PersistenceError("cannot open checkpoint: " + path);
  CheckedReader r(in);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw PersistenceError("not a checkpoint file (bad magic)");
  }
  std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw PersistenceError("unsupported checkpoint version " + std::to_string(version));
  }
  std::uint32_t cfg_len = r.u32();
  std::string cfg_text(cfg_len, '\0');
  r.bytes(cfg_text.data(), cfg_len);
  LMConfig cfg = parse_config_text(cfg_text);
  cfg.validate();

  std::uint32_t count = r.u32();
  std::map<std::string, std::pair<Shape, std::vector<double>>> tensors;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t name_len = r.u32();
    std::string name(name_len, '\0');
    r.bytes(name.data(), name_len);
    std::uint32_t rank = r.u32();
    if (rank > 8) throw PersistenceError("implausible tensor rank");
    Shape shape(rank);
    std::size_t n = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      shape[d] = static_cast<std::size_t>(r.u64());
      if (shape[d] == 0 || shape[d] > (1ull << 32)) {
        throw PersistenceError("implausible tensor extent");
      }
      n *= shape[d];
    }
    std::vector<double> data(n);
    for (std::size_t k = 0; k < n; ++k) data[k] = r.f64();
    if (!tensors.emplace(name, std::make_pair(std::move(shape), std::move(data))).second) {
      throw PersistenceError("duplicate tensor name: " + name);
    }
  }
  std::uint64_t expect = r.digest();
  std::uint64_t stored = r.raw_u64();
  if (expect != stored) throw PersistenceError("checkpoint checksum mismatch");

  Rng rng(0);  // initial weights are replaced below
  LanguageModel model(cfg, rng);
  for (Parameter* p : model.parameters()) {
    auto it = tensors.find(p->name);
    if (it == tensors.end()) {
      throw PersistenceError("checkpoint missing tensor: " + p->name);
    }
    if (it->second.first != p->value.shape()) {
      throw PersistenceError("checkpoint tensor shape mismatch: " + p->name);
    }
    p->value = Tensor(it->second.first, std::move(it->second.second));
    tensors.erase(it);
  }
  if (!tensors.empty()) {
    throw PersistenceError("checkpoint has unexpected tensor: " + tensors.begin()->first);
  }
  return model;
}

void require_same_model_shape(const LMConfig& checkpoint, const LMConfig& train) {
  LMConfig a = checkpoint, b = train;
  a.dropout = b.dropout = 0.0;  // dropout has no parameters; shape keys must match
  if (canonical_config_text(a) != canonical_config_text(b)) {
    throw ConfigError("checkpoint model shape does not match training configuration");
  }
}

}  // namespace pru
