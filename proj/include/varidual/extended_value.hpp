#pragma once

#include <cmath>
#include <ostream>

#include "varidual/errors.hpp"

namespace varidual {

// A value in R u {+inf}. The infinite state is an explicit tag, never a
// sentinel float, and -inf is not representable (proper functions only).
class ExtendedValue {
  public:
    ExtendedValue() : finite_(true), v_(0.0) {}

    static ExtendedValue finite(double v) {
        if (!std::isfinite(v)) throw UsageError("ExtendedValue::finite: value not finite");
        ExtendedValue e;
        e.finite_ = true;
        e.v_ = v;
        return e;
    }

    static ExtendedValue infinity() {
        ExtendedValue e;
        e.finite_ = false;
        e.v_ = 0.0;
        return e;
    }

    bool is_finite() const { return finite_; }
    bool is_infinite() const { return !finite_; }

    double value() const {
        if (!finite_) throw UsageError("ExtendedValue::value on +inf");
        return v_;
    }

    double value_or(double fallback) const { return finite_ ? v_ : fallback; }

    // Extended-real arithmetic: +inf absorbs.
    friend ExtendedValue operator+(ExtendedValue a, ExtendedValue b) {
        if (!a.finite_ || !b.finite_) return infinity();
        return finite(a.v_ + b.v_);
    }
    friend ExtendedValue operator+(ExtendedValue a, double b) { return a + finite(b); }
    friend ExtendedValue operator*(double s, ExtendedValue a) {
        if (s < 0.0) throw UsageError("ExtendedValue: negative scaling could reach -inf");
        if (!a.finite_) return s == 0.0 ? finite(0.0) : infinity();
        return finite(s * a.v_);
    }

    friend bool operator==(ExtendedValue a, ExtendedValue b) {
        if (a.finite_ != b.finite_) return false;
        return !a.finite_ || a.v_ == b.v_;
    }
    // Order of the extended real line.
    friend bool operator<(ExtendedValue a, ExtendedValue b) {
        if (!a.finite_) return false;
        if (!b.finite_) return true;
        return a.v_ < b.v_;
    }
    friend bool operator<=(ExtendedValue a, ExtendedValue b) { return a == b || a < b; }

    friend std::ostream& operator<<(std::ostream& os, ExtendedValue e) {
        if (e.finite_) return os << e.v_;
        return os << "inf";
    }

  private:
    bool finite_;
    double v_;
};

}  // namespace varidual
