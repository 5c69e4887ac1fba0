#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <json.hpp>

#include "memlb/errors.hpp"
#include "memlb/io.hpp"

namespace memlb {

namespace {

constexpr char kMagic[5] = {'M', 'T', 'I', 'N', '1'};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void signs(const RowMatrix& m) {
    std::uint8_t byte = 0;
    int used = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (m(r, c) > 0.0) byte |= static_cast<std::uint8_t>(1u << used);
        if (++used == 8) {
          out_.push_back(byte);
          byte = 0;
          used = 0;
        }
      }
    }
    if (used > 0) out_.push_back(byte);
  }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{in_[pos_++]} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{in_[pos_++]} << (8 * i);
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }

  RowMatrix signs(Eigen::Index rows, Eigen::Index cols, double magnitude) {
    const auto total = static_cast<std::size_t>(rows * cols);
    need((total + 7) / 8);
    RowMatrix m(rows, cols);
    std::size_t bit = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c, ++bit) {
        const bool plus = (in_[pos_ + bit / 8] >> (bit % 8)) & 1u;
        m(r, c) = plus ? magnitude : -magnitude;
      }
    }
    pos_ += (total + 7) / 8;
    return m;
  }

  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw FormatError("instance file truncated");
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_instance(const HardInstance& inst) {
  const Params& p = inst.params;
  Writer w;
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u8(static_cast<std::uint8_t>(p.profile));
  w.u32(static_cast<std::uint32_t>(p.d));
  w.f64(p.delta);
  w.f64(p.gamma);
  w.i64(p.n_terms);
  w.f64(p.log_l_scale);
  w.f64(p.l_scale);
  w.f64(p.s_corr);
  w.i64(p.k_msg);
  w.i64(p.n_rows);
  w.f64(p.xi);
  w.f64(p.xi_prime);
  w.f64(p.eps);
  w.f64(p.log_base);
  w.u64(inst.seed);
  w.signs(inst.a);
  w.signs(inst.nemirovski);
  return w.take();
}

HardInstance decode_instance(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  for (char c : kMagic) {
    if (r.u8() != static_cast<std::uint8_t>(c)) throw FormatError("not an MTIN1 instance file");
  }
  HardInstance inst;
  Params& p = inst.params;
  const std::uint8_t profile = r.u8();
  if (profile > 1) throw FormatError("unknown profile tag");
  p.profile = static_cast<Profile>(profile);
  p.d = static_cast<int>(r.u32());
  p.delta = r.f64();
  p.gamma = r.f64();
  p.n_terms = r.i64();
  p.log_l_scale = r.f64();
  p.l_scale = r.f64();
  p.s_corr = r.f64();
  p.k_msg = r.i64();
  p.n_rows = r.i64();
  p.xi = r.f64();
  p.xi_prime = r.f64();
  p.eps = r.f64();
  p.log_base = r.f64();
  inst.seed = r.u64();
  try {
    validate(p);
  } catch (const Error& e) {
    throw FormatError(std::string("invalid params in instance file: ") + e.what());
  }
  if (p.d > (1 << 16) || p.n_terms > (1 << 20)) throw FormatError("instance dimensions implausible");
  inst.a = r.signs(p.d / 2, p.d, 1.0);
  inst.nemirovski = r.signs(static_cast<Eigen::Index>(p.n_terms), p.d, 1.0 / std::sqrt(p.d));
  if (!r.done()) throw FormatError("trailing bytes after instance payload");
  return inst;
}

void save_instance(const HardInstance& inst, const std::filesystem::path& path) {
  const auto bytes = encode_instance(inst);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed: " + path.string());
}

HardInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open instance file " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_instance(bytes);
}

std::string params_to_json(const Params& p) {
  nlohmann::ordered_json j;
  j["profile"] = to_string(p.profile);
  j["d"] = p.d;
  j["delta"] = p.delta;
  j["gamma"] = p.gamma;
  j["n_terms"] = p.n_terms;
  j["log_l_scale"] = p.log_l_scale;
  j["l_scale"] = p.l_scale;
  j["s_corr"] = p.s_corr;
  j["k_msg"] = p.k_msg;
  j["n_rows"] = p.n_rows;
  j["xi"] = p.xi;
  j["xi_prime"] = p.xi_prime;
  j["eps"] = p.eps;
  j["log_base"] = p.log_base;
  return j.dump();
}

std::string instance_to_text(const HardInstance& inst) {
  nlohmann::ordered_json j;
  j["format"] = "MTIN1-text";
  j["seed"] = inst.seed;
  j["params"] = nlohmann::ordered_json::parse(params_to_json(inst.params));
  auto sign_rows = [](const RowMatrix& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      std::string s;
      for (Eigen::Index c = 0; c < m.cols(); ++c) s += m(r, c) > 0.0 ? '+' : '-';
      rows.push_back(s);
    }
    return rows;
  };
  j["A"] = sign_rows(inst.a);
  j["V_signs"] = sign_rows(inst.nemirovski);
  return j.dump(2) + "\n";
}

}  // namespace memlb
