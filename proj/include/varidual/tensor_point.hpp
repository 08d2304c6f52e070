#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <ostream>

#include "varidual/errors.hpp"

namespace varidual {

// A point of the flattened symmetric tensor space, dimension m in {1,2,3}.
//
// Index map (fixed):
//   m=1 : (a)            scalar                      weights (1)
//   m=2 : (a_x, a_y)     first-order, two variables  weights (1,1)
//   m=3 : (a_xx, a_yy, a_xy)  symmetric 2x2, the mixed entry stored once
//         and counted twice in the inner product      weights (1,1,2)
//
// The inner product and norm are the Frobenius ones of the underlying
// tensors, so the m=3 cross component carries multiplicity 2.
class TensorPoint {
  public:
    TensorPoint() : m_(1), c_{0.0, 0.0, 0.0} {}

    explicit TensorPoint(double a) : m_(1), c_{a, 0.0, 0.0} { check_finite(); }
    TensorPoint(double a, double b) : m_(2), c_{a, b, 0.0} { check_finite(); }
    TensorPoint(double a, double b, double c) : m_(3), c_{a, b, c} { check_finite(); }

    static TensorPoint zeros(int m) {
        if (m < 1 || m > 3) throw UsageError("TensorPoint: dimension must be 1, 2 or 3");
        TensorPoint p;
        p.m_ = m;
        return p;
    }

    int dim() const { return m_; }

    double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

    static double component_weight(int m, int i) { return (m == 3 && i == 2) ? 2.0 : 1.0; }
    double weight(int i) const { return component_weight(m_, i); }

    double dot(const TensorPoint& o) const {
        require_same_dim(o);
        double s = 0.0;
        for (int i = 0; i < m_; ++i) s += weight(i) * c_[static_cast<std::size_t>(i)] * o.c_[static_cast<std::size_t>(i)];
        return s;
    }

    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }

    friend TensorPoint operator+(TensorPoint a, const TensorPoint& b) {
        a.require_same_dim(b);
        for (int i = 0; i < a.m_; ++i) a.c_[static_cast<std::size_t>(i)] += b.c_[static_cast<std::size_t>(i)];
        return a;
    }
    friend TensorPoint operator-(TensorPoint a, const TensorPoint& b) {
        a.require_same_dim(b);
        for (int i = 0; i < a.m_; ++i) a.c_[static_cast<std::size_t>(i)] -= b.c_[static_cast<std::size_t>(i)];
        return a;
    }
    friend TensorPoint operator*(double s, TensorPoint a) {
        for (int i = 0; i < a.m_; ++i) a.c_[static_cast<std::size_t>(i)] *= s;
        return a;
    }

    friend bool operator==(const TensorPoint& a, const TensorPoint& b) {
        if (a.m_ != b.m_) return false;
        for (int i = 0; i < a.m_; ++i)
            if (a.c_[static_cast<std::size_t>(i)] != b.c_[static_cast<std::size_t>(i)]) return false;
        return true;
    }

    friend std::ostream& operator<<(std::ostream& os, const TensorPoint& p) {
        os << "(";
        for (int i = 0; i < p.m_; ++i) os << (i ? ", " : "") << p.c_[static_cast<std::size_t>(i)];
        return os << ")";
    }

  private:
    void check_finite() const {
        for (int i = 0; i < m_; ++i)
            if (!std::isfinite(c_[static_cast<std::size_t>(i)])) throw UsageError("TensorPoint: coordinate not finite");
    }
    void require_same_dim(const TensorPoint& o) const {
        if (m_ != o.m_) throw UsageError("TensorPoint: dimension mismatch");
    }

    int m_;
    std::array<double, 3> c_;
};

}  // namespace varidual
