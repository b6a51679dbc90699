#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace alcsheaf {

/// Exact rationals.
class Rational {
 public:
  Rational() = default;
  Rational(long v) : q_(v) {}
  explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

  static int characteristic() { return 0; }

  bool is_zero() const { return sgn(q_) == 0; }
  bool is_one() const { return q_ == 1; }

  Rational operator+(const Rational& o) const { return Rational(mpq_class(q_ + o.q_)); }
  Rational operator-(const Rational& o) const { return Rational(mpq_class(q_ - o.q_)); }
  Rational operator*(const Rational& o) const { return Rational(mpq_class(q_ * o.q_)); }
  Rational operator/(const Rational& o) const {
    if (o.is_zero()) throw std::domain_error("division by zero");
    return Rational(mpq_class(q_ / o.q_));
  }
  Rational operator-() const { return Rational(mpq_class(-q_)); }
  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational inverse() const { return Rational(1) / *this; }
  bool operator==(const Rational& o) const { return q_ == o.q_; }

  std::string str() const { return q_.get_str(); }
  const mpq_class& value() const { return q_; }

 private:
  mpq_class q_;
};

/// Integers modulo a prime. The modulus is per-thread and set through `Scope`.
class ModP {
 public:
  class Scope {
   public:
    explicit Scope(std::uint32_t p) : saved_(current_) {
      if (p < 2) throw std::invalid_argument("modulus must be a prime >= 2");
      for (std::uint32_t d = 2; d * d <= p; ++d)
        if (p % d == 0) throw std::invalid_argument("modulus must be prime");
      current_ = p;
    }
    ~Scope() { current_ = saved_; }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    std::uint32_t saved_;
  };

  ModP() = default;
  ModP(long v) {
    long m = static_cast<long>(current_);
    long r = v % m;
    v_ = static_cast<std::uint32_t>(r < 0 ? r + m : r);
  }

  static int characteristic() { return static_cast<int>(current_); }

  bool is_zero() const { return v_ == 0; }
  bool is_one() const { return v_ == 1; }

  ModP operator+(const ModP& o) const { return raw((v_ + o.v_) % current_); }
  ModP operator-(const ModP& o) const { return raw((v_ + current_ - o.v_) % current_); }
  ModP operator*(const ModP& o) const {
    return raw(static_cast<std::uint32_t>(static_cast<std::uint64_t>(v_) * o.v_ % current_));
  }
  ModP operator/(const ModP& o) const { return *this * o.inverse(); }
  ModP operator-() const { return raw(v_ == 0 ? 0 : current_ - v_); }
  ModP& operator+=(const ModP& o) { return *this = *this + o; }
  ModP& operator-=(const ModP& o) { return *this = *this - o; }
  ModP& operator*=(const ModP& o) { return *this = *this * o; }
  ModP inverse() const {
    if (v_ == 0) throw std::domain_error("division by zero");
    std::uint64_t base = v_, acc = 1;
    std::uint32_t e = current_ - 2;
    while (e) {
      if (e & 1) acc = acc * base % current_;
      base = base * base % current_;
      e >>= 1;
    }
    return raw(static_cast<std::uint32_t>(acc));
  }
  bool operator==(const ModP& o) const { return v_ == o.v_; }

  std::string str() const { return std::to_string(v_); }
  std::uint32_t value() const { return v_; }

 private:
  static ModP raw(std::uint32_t v) {
    ModP r;
    r.v_ = v;
    return r;
  }
  static inline thread_local std::uint32_t current_ = 5;
  std::uint32_t v_ = 0;
};

/// Runs `f.template operator()<K>()` with K chosen from the characteristic.
template <class F>
decltype(auto) with_field(int characteristic, F&& f) {
  if (characteristic == 0) return f.template operator()<Rational>();
  ModP::Scope scope(static_cast<std::uint32_t>(characteristic));
  return f.template operator()<ModP>();
}

}  // namespace alcsheaf
