#pragma once

// Systematic k-of-n MDS erasure code over GF(2^8).
//
// Field: GF(256) with reducing polynomial x^8 + x^4 + x^3 + x^2 + 1 (0x11D),
// generator element 2.
//
// Generator matrix: start from the n x k Vandermonde matrix V[i][j] = x_i^j
// with distinct evaluation points x_i = i (i = 0..n-1), then right-multiply
// by the inverse of its top k x k block. The result G has the identity in
// its first k rows (chunks 0..k-1 are the raw message split) and every k x k
// row subset of G stays invertible, because any k rows of V form a
// Vandermonde matrix on distinct points. Chunk i is row i of G applied
// byte-column-wise to the k data chunks.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace covert::codec {

using Bytes = std::vector<std::uint8_t>;

class CodecError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Fewer than k distinct chunks were supplied to decode.
class InsufficientChunks : public CodecError {
public:
  using CodecError::CodecError;
};

/// Chunk payloads or indices are inconsistent with the stated code.
class FormatError : public CodecError {
public:
  using CodecError::CodecError;
};

inline constexpr int kMaxChunks = 255;

class Gf256 {
public:
  static const Gf256& instance() {
    static const Gf256 field;
    return field;
  }

  static std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }

  std::uint8_t mul(std::uint8_t a, std::uint8_t b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }

  std::uint8_t inv(std::uint8_t a) const {
    if (a == 0) throw std::domain_error("zero has no inverse in GF(256)");
    return exp_[255 - log_[a]];
  }

  std::uint8_t pow(std::uint8_t a, unsigned e) const {
    if (e == 0) return 1;
    if (a == 0) return 0;
    return exp_[(log_[a] * e) % 255];
  }

private:
  Gf256() {
    unsigned x = 1;
    for (unsigned i = 0; i < 255; ++i) {
      exp_[i] = static_cast<std::uint8_t>(x);
      log_[x] = static_cast<std::uint8_t>(i);
      x <<= 1;
      if (x & 0x100) x ^= 0x11D;
    }
    for (unsigned i = 255; i < exp_.size(); ++i) exp_[i] = exp_[i - 255];
  }

  std::array<std::uint8_t, 510> exp_{};
  std::array<std::uint8_t, 256> log_{};
};

/// Row-major square or rectangular matrix over GF(256).
class Matrix {
public:
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint8_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::uint8_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    const auto& gf = Gf256::instance();
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < b.cols_; ++j) {
        std::uint8_t acc = 0;
        for (std::size_t t = 0; t < a.cols_; ++t) acc ^= gf.mul(a(i, t), b(t, j));
        out(i, j) = acc;
      }
    return out;
  }

  /// Gauss-Jordan inverse; throws FormatError if singular.
  Matrix inverse() const {
    if (rows_ != cols_) throw std::logic_error("inverse of a non-square matrix");
    const auto& gf = Gf256::instance();
    const std::size_t n = rows_;
    Matrix work = *this;
    Matrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i) inv(i, i) = 1;

    for (std::size_t col = 0; col < n; ++col) {
      std::size_t pivot = col;
      while (pivot < n && work(pivot, col) == 0) ++pivot;
      if (pivot == n) throw FormatError("singular decoding matrix");
      if (pivot != col)
        for (std::size_t c = 0; c < n; ++c) {
          std::swap(work(pivot, c), work(col, c));
          std::swap(inv(pivot, c), inv(col, c));
        }
      const std::uint8_t scale = gf.inv(work(col, col));
      for (std::size_t c = 0; c < n; ++c) {
        work(col, c) = gf.mul(work(col, c), scale);
        inv(col, c) = gf.mul(inv(col, c), scale);
      }
      for (std::size_t row = 0; row < n; ++row) {
        if (row == col || work(row, col) == 0) continue;
        const std::uint8_t factor = work(row, col);
        for (std::size_t c = 0; c < n; ++c) {
          work(row, c) ^= gf.mul(factor, work(col, c));
          inv(row, c) ^= gf.mul(factor, inv(col, c));
        }
      }
    }
    return inv;
  }

private:
  std::size_t rows_, cols_;
  std::vector<std::uint8_t> data_;
};

/// n x k systematic generator matrix (see the file comment).
inline Matrix generator_matrix(int k, int n) {
  const auto& gf = Gf256::instance();
  Matrix vandermonde(static_cast<std::size_t>(n), static_cast<std::size_t>(k));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j)
      vandermonde(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          gf.pow(static_cast<std::uint8_t>(i), static_cast<unsigned>(j));

  Matrix top(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      top(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          vandermonde(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return vandermonde * top.inverse();
}

struct Chunk {
  int index = 0;
  Bytes payload;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct ChunkSet {
  int k = 0;
  int n = 0;
  std::size_t message_length = 0;
  std::vector<Chunk> chunks;

  std::size_t chunk_length() const { return chunks.empty() ? 0 : chunks.front().payload.size(); }
};

inline void check_code(int k, int n) {
  if (k < 1) throw FormatError("k must be >= 1");
  if (k > n) throw FormatError("k must not exceed n");
  if (n > kMaxChunks) throw FormatError("n must not exceed 255 in GF(256)");
}

/// Zero-pads the message to a multiple of k and emits n chunks of
/// ceil(|message| / k) bytes each; chunks 0..k-1 carry the message verbatim.
inline ChunkSet encode(std::span<const std::uint8_t> message, int k, int n) {
  check_code(k, n);
  if (message.empty()) throw FormatError("message must be non-empty");
  const std::size_t len = (message.size() + static_cast<std::size_t>(k) - 1) / static_cast<std::size_t>(k);

  ChunkSet set{k, n, message.size(), {}};
  set.chunks.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < k; ++i) {
    Bytes payload(len, 0);
    const std::size_t begin = static_cast<std::size_t>(i) * len;
    if (begin < message.size()) {
      const std::size_t count = std::min(len, message.size() - begin);
      std::copy_n(message.begin() + static_cast<std::ptrdiff_t>(begin), count, payload.begin());
    }
    set.chunks.push_back({i, std::move(payload)});
  }
  if (n == k) return set;

  const auto& gf = Gf256::instance();
  const Matrix g = generator_matrix(k, n);
  for (int i = k; i < n; ++i) {
    Bytes parity(len, 0);
    for (int j = 0; j < k; ++j) {
      const std::uint8_t coeff = g(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (coeff == 0) continue;
      const Bytes& data = set.chunks[static_cast<std::size_t>(j)].payload;
      for (std::size_t b = 0; b < len; ++b) parity[b] ^= gf.mul(coeff, data[b]);
    }
    set.chunks.push_back({i, std::move(parity)});
  }
  return set;
}

inline ChunkSet encode(std::string_view message, int k, int n) {
  return encode(std::span(reinterpret_cast<const std::uint8_t*>(message.data()), message.size()), k, n);
}

/// Rebuilds the original message from any k distinct-index chunks. Extra or
/// repeated chunks are ignored.
inline Bytes decode(std::span<const Chunk> chunks, int k, int n, std::size_t message_length) {
  check_code(k, n);
  std::vector<const Chunk*> picked;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (const auto& c : chunks) {
    if (c.index < 0 || c.index >= n)
      throw FormatError("chunk index " + std::to_string(c.index) + " outside [0, n)");
    if (seen[static_cast<std::size_t>(c.index)]) continue;
    seen[static_cast<std::size_t>(c.index)] = true;
    if (static_cast<int>(picked.size()) < k) picked.push_back(&c);
  }
  if (static_cast<int>(picked.size()) < k)
    throw InsufficientChunks("need " + std::to_string(k) + " distinct chunks, got " +
                             std::to_string(picked.size()));

  const std::size_t len = picked.front()->payload.size();
  for (const auto* c : picked)
    if (c->payload.size() != len) throw FormatError("chunk payloads differ in length");
  if (message_length > len * static_cast<std::size_t>(k))
    throw FormatError("message length exceeds k * chunk length");

  const Matrix g = generator_matrix(k, n);
  Matrix sub(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      sub(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          g(static_cast<std::size_t>(picked[static_cast<std::size_t>(i)]->index), static_cast<std::size_t>(j));
  const Matrix recover = sub.inverse();

  const auto& gf = Gf256::instance();
  Bytes out(len * static_cast<std::size_t>(k), 0);
  for (int row = 0; row < k; ++row) {
    std::uint8_t* dst = out.data() + static_cast<std::size_t>(row) * len;
    for (int j = 0; j < k; ++j) {
      const std::uint8_t coeff = recover(static_cast<std::size_t>(row), static_cast<std::size_t>(j));
      if (coeff == 0) continue;
      const Bytes& src = picked[static_cast<std::size_t>(j)]->payload;
      for (std::size_t b = 0; b < len; ++b) dst[b] ^= gf.mul(coeff, src[b]);
    }
  }
  out.resize(message_length);
  return out;
}

}  // namespace covert::codec
