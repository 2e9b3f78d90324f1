#pragma once

// Exact scalar types shared by every module: the rational scalar, the
// dense Eigen aliases over it, and the extended reals R ∪ {−∞, +∞}.

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace condual {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::mpz_int;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorQ = Vector<Rational>;
using MatrixQ = Matrix<Rational>;
using Index = Eigen::Index;

/// Parses "p/q", "p" or "-p/q". Throws std::invalid_argument on anything else.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form; integers are written as "p/1" so every number in
/// reports has the same shape.
std::string to_string(const Rational& value);

inline Rational q(std::int64_t num, std::int64_t den = 1) { return Rational(num, den); }

/// Builds a rational vector from integer-pair literals, mainly for tests.
VectorQ make_vector(std::initializer_list<Rational> values);

/// A value in R ∪ {−∞, +∞}. The −∞ state only appears as an operation
/// output (unbounded-below infima); map definitions never store it.
class Extended {
public:
  enum class Kind : std::uint8_t { NegInf, Finite, PosInf };

  Extended() = default;
  Extended(Rational value) : kind_(Kind::Finite), value_(std::move(value)) {}  // NOLINT
  Extended(std::int64_t value) : kind_(Kind::Finite), value_(value) {}         // NOLINT

  static Extended pos_inf() { return Extended(Kind::PosInf); }
  static Extended neg_inf() { return Extended(Kind::NegInf); }

  Kind kind() const { return kind_; }
  bool finite() const { return kind_ == Kind::Finite; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }

  /// Precondition: finite().
  const Rational& value() const {
    if (!finite()) throw std::logic_error("Extended::value on an infinite value");
    return value_;
  }

  friend bool operator==(const Extended& a, const Extended& b) {
    if (a.kind_ != b.kind_) return false;
    return !a.finite() || a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const Extended& a, const Extended& b) {
    if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
    if (!a.finite()) return std::strong_ordering::equal;
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (b.value_ < a.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  // Arithmetic with a finite shift; infinities absorb.
  friend Extended operator+(const Extended& a, const Rational& b) {
    return a.finite() ? Extended(a.value_ + b) : a;
  }
  friend Extended operator-(const Extended& a, const Rational& b) {
    return a.finite() ? Extended(a.value_ - b) : a;
  }

  /// a − b with the convention +∞ − (+∞) = 0 (and likewise for −∞), used
  /// when comparing map values across arguments.
  friend Extended difference(const Extended& a, const Extended& b);

private:
  explicit Extended(Kind kind) : kind_(kind) {}
  Kind kind_ = Kind::Finite;
  Rational value_{0};
};

Extended min(const Extended& a, const Extended& b);
Extended max(const Extended& a, const Extended& b);

/// "p/q", "+inf" or "-inf".
std::string to_string(const Extended& value);
Extended parse_extended(std::string_view text);

}  // namespace condual
