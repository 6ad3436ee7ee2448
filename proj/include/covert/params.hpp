#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace covert {

/// Raised when a parameter combination violates the protocol's domain
/// constraints. The message names the violated constraint.
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class DelayModel {
  Model1,  // fixed discovery cost 1 per vertex, transmission only at fresh relays
  Model2,  // uniform dwell at every visited vertex
};

inline std::string_view to_string(DelayModel model) {
  return model == DelayModel::Model1 ? "1" : "2";
}

inline DelayModel parse_delay_model(std::string_view text) {
  if (text == "1") return DelayModel::Model1;
  if (text == "2") return DelayModel::Model2;
  throw ParameterError("model must be 1 or 2, got '" + std::string(text) + "'");
}

/// Protocol parameters. Construct through SystemParams::make, which enforces
/// 1 <= k <= n <= r <= s and lambda, w, m > 0. Every other routine in the
/// library assumes a validated instance.
class SystemParams {
public:
  struct Raw {
    std::int64_t s = 50;    // vertices of the complete graph
    std::int64_t r = 10;    // relays
    double m = 10.0;        // message length (bits)
    std::int64_t k = 3;     // data chunks
    std::int64_t n = 5;     // coded chunks
    double lambda = 1.0;    // tail rate of the shifted-exponential transmission
    double w = 50.0;        // warden arrival window U(0, w)
  };

  static SystemParams make(const Raw& raw) {
    auto fail = [](const std::string& what) { throw ParameterError(what); };
    if (raw.k < 1) fail("constraint 1 <= k violated (k=" + std::to_string(raw.k) + ")");
    if (raw.k > raw.n)
      fail("constraint k <= n violated (k=" + std::to_string(raw.k) +
           ", n=" + std::to_string(raw.n) + ")");
    if (raw.n > raw.r)
      fail("constraint n <= r violated (n=" + std::to_string(raw.n) +
           ", r=" + std::to_string(raw.r) + ")");
    if (raw.r > raw.s)
      fail("constraint r <= s violated (r=" + std::to_string(raw.r) +
           ", s=" + std::to_string(raw.s) + ")");
    if (!(raw.lambda > 0.0) || !std::isfinite(raw.lambda)) fail("constraint lambda > 0 violated");
    if (!(raw.w > 0.0) || !std::isfinite(raw.w)) fail("constraint w > 0 violated");
    if (!(raw.m > 0.0) || !std::isfinite(raw.m)) fail("constraint m > 0 violated");
    return SystemParams(raw);
  }

  static SystemParams make(std::int64_t s, std::int64_t r, double m, std::int64_t k,
                           std::int64_t n, double lambda, double w) {
    return make(Raw{s, r, m, k, n, lambda, w});
  }

  std::int64_t s() const { return raw_.s; }
  std::int64_t r() const { return raw_.r; }
  double m() const { return raw_.m; }
  std::int64_t k() const { return raw_.k; }
  std::int64_t n() const { return raw_.n; }
  double lambda() const { return raw_.lambda; }
  double w() const { return raw_.w; }

  /// Payload length of one chunk, m/k. Real valued, never rounded.
  double chunk_length() const { return raw_.m / static_cast<double>(raw_.k); }

  const Raw& raw() const { return raw_; }

  SystemParams with_kn(std::int64_t k, std::int64_t n) const {
    Raw copy = raw_;
    copy.k = k;
    copy.n = n;
    return make(copy);
  }

  friend bool operator==(const SystemParams& a, const SystemParams& b) {
    return a.raw_.s == b.raw_.s && a.raw_.r == b.raw_.r && a.raw_.m == b.raw_.m &&
           a.raw_.k == b.raw_.k && a.raw_.n == b.raw_.n && a.raw_.lambda == b.raw_.lambda &&
           a.raw_.w == b.raw_.w;
  }

private:
  explicit SystemParams(const Raw& raw) : raw_(raw) {}
  Raw raw_;
};

}  // namespace covert
