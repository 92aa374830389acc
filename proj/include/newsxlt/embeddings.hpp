#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "newsxlt/error.hpp"

namespace newsxlt {

/// Dense id -> vector table; vectors are rows of a row-major matrix.
template <typename Scalar>
class EmbeddingTable {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  EmbeddingTable() = default;
  explicit EmbeddingTable(Eigen::Index dim) : vectors_(0, dim) {}

  /// Throws Error on an empty or duplicate id, a wrong-length vector or a
  /// non-finite component.
  EmbeddingTable(std::vector<std::string> ids, Matrix vectors, bool normalized = false)
      : ids_(std::move(ids)), vectors_(std::move(vectors)), normalized_(normalized) {
    if (static_cast<Eigen::Index>(ids_.size()) != vectors_.rows())
      throw Error("embedding table: id count does not match row count");
    if (vectors_.cols() <= 0) throw Error("embedding table: dimension must be positive");
    index_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (ids_[i].empty()) throw Error("embedding table: empty id");
      if (!vectors_.row(static_cast<Eigen::Index>(i)).allFinite())
        throw Error("embedding table: non-finite value for id " + ids_[i]);
      if (!index_.emplace(ids_[i], static_cast<Eigen::Index>(i)).second)
        throw Error("embedding table: duplicate id " + ids_[i]);
    }
  }

  Eigen::Index dim() const noexcept { return vectors_.cols(); }
  std::size_t size() const noexcept { return ids_.size(); }
  bool normalized() const noexcept { return normalized_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const Matrix& matrix() const noexcept { return vectors_; }

  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  /// Row index of `id`; throws CoverageError naming the id if absent.
  Eigen::Index row_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw CoverageError("missing embedding for news id " + id);
    return it->second;
  }

  auto row(const std::string& id) const { return vectors_.row(row_of(id)); }

  bool operator==(const EmbeddingTable& other) const {
    return ids_ == other.ids_ && vectors_.rows() == other.vectors_.rows() &&
           vectors_.cols() == other.vectors_.cols() && vectors_ == other.vectors_;
  }

 private:
  std::vector<std::string> ids_;
  Matrix vectors_;
  std::unordered_map<std::string, Eigen::Index> index_;
  bool normalized_ = false;
};

using EmbeddingTablef = EmbeddingTable<float>;

/// Unit-length copy of `table`; throws Error naming the first zero vector.
template <typename Scalar>
EmbeddingTable<Scalar> l2_normalize(const EmbeddingTable<Scalar>& table) {
  typename EmbeddingTable<Scalar>::Matrix out = table.matrix();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double norm = out.row(r).template cast<double>().norm();
    if (norm == 0.0) throw Error("cannot normalize zero vector for id " + table.ids()[static_cast<std::size_t>(r)]);
    out.row(r) = (out.row(r).template cast<double>() / norm).template cast<Scalar>();
  }
  return EmbeddingTable<Scalar>(table.ids(), std::move(out), true);
}

inline constexpr char kBinaryMagic[4] = {'N', 'B', 'E', 'M'};
inline constexpr unsigned char kBinaryVersion = 0x01;

/// Reads either encoding, chosen by the leading magic bytes.
EmbeddingTablef load_embeddings(const std::filesystem::path& path);
EmbeddingTablef read_embeddings(std::istream& in);
EmbeddingTablef read_embeddings_binary(std::istream& in);
EmbeddingTablef read_embeddings_tsv(std::istream& in);

void write_embeddings_binary(const EmbeddingTablef& table, std::ostream& out);
/// "id<TAB>v1,...,vd" with shortest round-trip float formatting.
void write_embeddings_tsv(const EmbeddingTablef& table, std::ostream& out);

}  // namespace newsxlt
