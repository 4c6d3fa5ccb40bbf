#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lcsgeom {

/// Exact rational number with 64-bit numerator and denominator.
///
/// Arithmetic is checked: every operation returns std::nullopt instead of
/// overflowing, so callers can fall back to leaving an expression unfolded.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)

  /// Reduced form of n/d. Returns nullopt when d == 0 or the reduction overflows.
  static std::optional<Rational> make(std::int64_t n, std::int64_t d);

  /// Exact value of a decimal literal such as "12", "0.25" or "1.5e-3".
  static std::optional<Rational> from_decimal(std::string_view text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool is_integer() const { return den_ == 1; }
  bool is_negative() const { return num_ < 0; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  friend bool operator==(const Rational&, const Rational&) = default;

  static std::optional<Rational> add(const Rational& a, const Rational& b);
  static std::optional<Rational> sub(const Rational& a, const Rational& b);
  static std::optional<Rational> mul(const Rational& a, const Rational& b);
  static std::optional<Rational> div(const Rational& a, const Rational& b);
  static std::optional<Rational> neg(const Rational& a);
  static std::optional<Rational> pow(const Rational& a, int k);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace lcsgeom
