#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "bt/learner/q_function.hpp"

namespace bt::learner {

// Little-endian byte encoding shared by checkpoints and policy digests.
void put_u32(std::string& out, std::uint32_t v);
void put_u64(std::string& out, std::uint64_t v);
void put_f64(std::string& out, double v);
/// u32 rows, u32 cols, then rows*cols f64 values in column-major order.
void put_array(std::string& out, const Eigen::MatrixXd& m);
void put_array(std::string& out, const Eigen::VectorXd& v);

/// Cursor over an encoded buffer; every read throws IntegrityError on
/// truncation.
class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  Eigen::MatrixXd array();
  [[nodiscard]] std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::string_view take(std::size_t n);
  std::string_view data_;
  std::size_t pos_ = 0;
};

/// Architecture descriptor followed by the four parameter arrays.
void put_qfunction(std::string& out, const QFunction& qf);
QFunction read_qfunction(ByteReader& in);

}  // namespace bt::learner
