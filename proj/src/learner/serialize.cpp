#include "bt/learner/serialize.hpp"

#include <bit>
#include <cstring>

namespace bt::learner {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_array(std::string& out, const Eigen::MatrixXd& m) {
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.size(); ++i) put_f64(out, m.data()[i]);
}

void put_array(std::string& out, const Eigen::VectorXd& v) {
  put_u32(out, static_cast<std::uint32_t>(v.size()));
  put_u32(out, 1);
  for (Eigen::Index i = 0; i < v.size(); ++i) put_f64(out, v[i]);
}

std::string_view ByteReader::take(std::size_t n) {
  if (remaining() < n) throw IntegrityError("truncated data");
  const auto s = data_.substr(pos_, n);
  pos_ += n;
  return s;
}

std::uint32_t ByteReader::u32() {
  const auto s = take(4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[i]);
  return v;
}

std::uint64_t ByteReader::u64() {
  const auto s = take(8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[i]);
  return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

Eigen::MatrixXd ByteReader::array() {
  const std::uint32_t rows = u32();
  const std::uint32_t cols = u32();
  const std::uint64_t n = static_cast<std::uint64_t>(rows) * cols;
  if (n * 8 > remaining()) throw IntegrityError("truncated array");
  Eigen::MatrixXd m(rows, cols);
  for (std::uint64_t i = 0; i < n; ++i) m.data()[i] = f64();
  return m;
}

void put_qfunction(std::string& out, const QFunction& qf) {
  put_u32(out, qf.mode() == ReprMode::tabular ? 0u : 1u);
  put_u32(out, static_cast<std::uint32_t>(qf.input_dim()));
  put_u32(out, static_cast<std::uint32_t>(qf.feature_dim()));
  put_u32(out, static_cast<std::uint32_t>(qf.n_actions_base()));
  put_u32(out, qf.has_extra_action() ? 1u : 0u);
  put_array(out, qf.params().w1);
  put_array(out, qf.params().b1);
  put_array(out, qf.params().w2);
  put_array(out, qf.params().b2);
}

QFunction read_qfunction(ByteReader& in) {
  const std::uint32_t mode = in.u32();
  if (mode > 1) throw IntegrityError("unknown representation mode");
  const auto input_dim = static_cast<int>(in.u32());
  const auto feature_dim = static_cast<int>(in.u32());
  const auto n_actions = static_cast<int>(in.u32());
  const bool extra = in.u32() != 0;
  if (input_dim <= 0 || feature_dim <= 0 || n_actions <= 0) {
    throw IntegrityError("invalid architecture descriptor");
  }
  QFunction qf;
  if (mode == 0) {
    qf = QFunction::tabular(input_dim, n_actions, extra);
  } else {
    Rng rng(0);
    qf = QFunction::encoder_head(input_dim, feature_dim, n_actions, extra, rng);
  }
  auto& p = qf.params();
  auto load = [&in](auto& dst, const char* name) {
    Eigen::MatrixXd m = in.array();
    if (m.rows() != dst.rows() || m.cols() != dst.cols()) {
      throw IntegrityError(std::string("parameter array ") + name + " has the wrong shape");
    }
    dst = m;
  };
  load(p.w1, "w1");
  load(p.b1, "b1");
  load(p.w2, "w2");
  load(p.b2, "b2");
  return qf;
}

}  // namespace bt::learner
