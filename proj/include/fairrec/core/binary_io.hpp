#ifndef FAIRREC_CORE_BINARY_IO_HPP_
#define FAIRREC_CORE_BINARY_IO_HPP_

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <type_traits>

#include <Eigen/Dense>

#include "fairrec/core/error.hpp"

namespace fairrec {

// Little helpers for the versioned flat binary files (model.bin,
// embeddings.bin, classifier.bin). Scalars are written in host byte order;
// every file starts with a 4-byte magic and a uint32 version.
class BinaryWriter {
 public:
  BinaryWriter(const std::filesystem::path& path, const char (&magic)[5], std::uint32_t version)
      : path_(path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary);
    if (!out_) throw IoError("cannot write " + path.string());
    out_.write(magic, 4);
    put(version);
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }

  template <typename Derived>
  void put_matrix(const Eigen::DenseBase<Derived>& m) {
    put(static_cast<std::int64_t>(m.rows()));
    put(static_cast<std::int64_t>(m.cols()));
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic> dense = m.template cast<double>();
    out_.write(reinterpret_cast<const char*>(dense.data()),
               static_cast<std::streamsize>(sizeof(double) * dense.size()));
  }

  void finish() {
    out_.flush();
    if (!out_) throw IoError("write failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class BinaryReader {
 public:
  BinaryReader(const std::filesystem::path& path, const char (&magic)[5],
               std::uint32_t expected_version)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open " + path.string());
    char got[4];
    in_.read(got, 4);
    if (!in_ || std::memcmp(got, magic, 4) != 0) {
      throw IoError(path.string() + ": not a " + std::string(magic, 4) + " file");
    }
    const auto version = get<std::uint32_t>();
    if (version != expected_version) {
      throw IoError(path.string() + ": version " + std::to_string(version) +
                    " is not supported (expected " + std::to_string(expected_version) + ")");
    }
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    T value{};
    in_.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in_) throw IoError(path_.string() + ": truncated file");
    return value;
  }

  Eigen::MatrixXd get_matrix() {
    const auto rows = get<std::int64_t>();
    const auto cols = get<std::int64_t>();
    if (rows < 0 || cols < 0 || rows * cols > (std::int64_t{1} << 32)) {
      throw IoError(path_.string() + ": corrupt matrix header");
    }
    Eigen::MatrixXd m(rows, cols);
    in_.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
    if (!in_) throw IoError(path_.string() + ": truncated file");
    return m;
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

}  // namespace fairrec

#endif  // FAIRREC_CORE_BINARY_IO_HPP_
