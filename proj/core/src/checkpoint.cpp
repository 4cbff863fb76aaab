#include "advalstm/checkpoint.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>

#include "advalstm/error.hpp"

namespace advalstm::nn {

namespace {

constexpr std::array<char, 8> kMagic{'A', 'D', 'V', 'A', 'L', 'S', 'T', 'M'};
constexpr std::uint64_t kMaxCount = 1u << 28;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) { little_endian(v, 4); }
  void u64(std::uint64_t v) { little_endian(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

 private:
  void little_endian(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(bytes(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(bytes(4)); }
  std::uint64_t u64() { return bytes(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > kMaxCount) fail(ErrorKind::kParse, "checkpoint: string length out of range");
    std::string s(n, '\0');
    in_.read(s.data(), n);
    if (!in_) fail(ErrorKind::kParse, "checkpoint: truncated string");
    return s;
  }

 private:
  std::uint64_t bytes(int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      const int c = in_.get();
      if (c == std::char_traits<char>::eof()) fail(ErrorKind::kParse, "checkpoint: truncated file");
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return v;
  }
  std::istream& in_;
};

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint) {
  checkpoint.params.check_same_shape(ParamSet::zeros(checkpoint.dims), "write_checkpoint");
  Writer w(out);
  out.write(kMagic.data(), kMagic.size());
  w.u32(kCheckpointVersion);
  const ModelDims& d = checkpoint.dims;
  w.u64(d.features);
  w.u64(d.mapping);
  w.u64(d.hidden);
  w.u64(d.attention);
  w.u64(d.lag);
  w.u8(d.use_attention ? 1 : 0);
  w.u64(checkpoint.seed);
  w.u32(static_cast<std::uint32_t>(checkpoint.metadata.size()));
  for (const auto& [key, value] : checkpoint.metadata) {
    w.str(key);
    w.str(value);
  }
  w.u32(static_cast<std::uint32_t>(kParamCount));
  for (std::size_t k = 0; k < kParamCount; ++k) {
    const Tensor& t = checkpoint.params.tensors()[k];
    w.str(std::string(ParamSet::name(k)));
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (std::size_t dim : t.shape()) w.u64(dim);
    for (double v : t.data()) w.f64(v);
  }
}

Checkpoint read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) fail(ErrorKind::kParse, "not an advalstm checkpoint");
  Reader r(in);
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    fail(ErrorKind::kMismatch, "unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  ck.dims.features = r.u64();
  ck.dims.mapping = r.u64();
  ck.dims.hidden = r.u64();
  ck.dims.attention = r.u64();
  ck.dims.lag = r.u64();
  ck.dims.use_attention = r.u8() != 0;
  ck.seed = r.u64();
  const std::uint32_t n_meta = r.u32();
  if (n_meta > kMaxCount) fail(ErrorKind::kParse, "checkpoint: metadata count out of range");
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string key = r.str();
    ck.metadata[key] = r.str();
  }
  ck.params = ParamSet::zeros(ck.dims);
  const std::uint32_t n_tensors = r.u32();
  if (n_tensors != kParamCount) fail(ErrorKind::kMismatch, "checkpoint: unexpected tensor count");
  for (std::size_t k = 0; k < kParamCount; ++k) {
    const std::string name = r.str();
    if (name != ParamSet::name(k)) {
      fail(ErrorKind::kMismatch, "checkpoint: expected tensor " + std::string(ParamSet::name(k)) +
                                     ", found " + name);
    }
    Tensor& t = ck.params.tensors()[k];
    const std::uint32_t rank = r.u32();
    std::vector<std::size_t> shape(rank);
    for (auto& dim : shape) dim = r.u64();
    if (shape != t.shape()) fail(ErrorKind::kShape, "checkpoint: tensor " + name + " has wrong shape");
    for (double& v : t.data()) v = r.f64();
  }
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  write_checkpoint(out, checkpoint);
  if (!out) fail(ErrorKind::kIo, "failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace advalstm::nn
