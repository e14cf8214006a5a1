#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace mg {

/// Exact rational number with a 64-bit numerator and denominator.
///
/// Values are kept normalized: the denominator is positive and shares no
/// factor with the numerator. Intermediate products are computed in 128 bits;
/// a result that does not fit back into 64 bits throws std::overflow_error.
class Rat {
 public:
  constexpr Rat() = default;
  constexpr Rat(std::int64_t n) : num_(n) {}  // NOLINT(implicit)
  Rat(std::int64_t n, std::int64_t d);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_integer() const { return den_ == 1; }
  int sign() const { return (num_ > 0) - (num_ < 0); }

  Rat operator-() const;
  Rat& operator+=(const Rat& o);
  Rat& operator-=(const Rat& o);
  Rat& operator*=(const Rat& o);
  Rat& operator/=(const Rat& o);

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

  friend bool operator==(const Rat& a, const Rat& b) = default;
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b);

  /// "p/q", or "p" for integers.
  std::string str() const;

  /// Parses "p", "-p" or "p/q". Returns nullopt on malformed input or a zero
  /// denominator; `error_pos` receives the offending character index.
  static std::optional<Rat> parse(std::string_view s, std::size_t* error_pos = nullptr);

 private:
  static Rat from_wide(__int128 n, __int128 d);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rat& r);

Rat abs(const Rat& r);
Rat min(const Rat& a, const Rat& b);
Rat max(const Rat& a, const Rat& b);

/// Edge length: a positive rational or the distinguished infinite length.
class Length {
 public:
  constexpr Length() = default;
  Length(Rat value);  // NOLINT(implicit)
  static Length infinity();

  bool is_infinite() const { return infinite_; }
  /// Throws std::logic_error for the infinite length.
  const Rat& value() const;

  friend bool operator==(const Length& a, const Length& b) = default;
  std::string str() const;

 private:
  bool infinite_ = false;
  Rat value_{0};
};

}  // namespace mg
