#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>

namespace rsoc {

inline constexpr int kMaxDim = 3;

/// Fixed-capacity vector in R^d, d <= kMaxDim. Keeps the simulation and
/// stencil inner loops free of heap traffic.
class Vec {
 public:
  Vec() = default;
  explicit Vec(int dim, double fill = 0.0) : dim_(dim) {
    assert(dim >= 0 && dim <= kMaxDim);
    data_.fill(0.0);
    for (int i = 0; i < dim; ++i) data_[i] = fill;
  }
  Vec(std::initializer_list<double> values) : dim_(static_cast<int>(values.size())) {
    assert(dim_ <= kMaxDim);
    int i = 0;
    for (double v : values) data_[i++] = v;
  }

  int size() const noexcept { return dim_; }
  double& operator[](int i) noexcept { return data_[i]; }
  double operator[](int i) const noexcept { return data_[i]; }
  double* begin() noexcept { return data_.data(); }
  double* end() noexcept { return data_.data() + dim_; }
  const double* begin() const noexcept { return data_.data(); }
  const double* end() const noexcept { return data_.data() + dim_; }

  Vec& operator+=(const Vec& o) noexcept {
    for (int i = 0; i < dim_; ++i) data_[i] += o.data_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) noexcept {
    for (int i = 0; i < dim_; ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Vec& operator*=(double s) noexcept {
    for (int i = 0; i < dim_; ++i) data_[i] *= s;
    return *this;
  }
  friend Vec operator+(Vec a, const Vec& b) noexcept { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) noexcept { return a -= b; }
  friend Vec operator*(Vec a, double s) noexcept { return a *= s; }
  friend Vec operator*(double s, Vec a) noexcept { return a *= s; }
  friend bool operator==(const Vec& a, const Vec& b) noexcept {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
      if (a.data_[i] != b.data_[i]) return false;
    return true;
  }

 private:
  std::array<double, kMaxDim> data_{};
  int dim_ = 0;
};

inline double dot(const Vec& a, const Vec& b) noexcept {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) noexcept { return std::sqrt(dot(a, a)); }

/// Dense d x d matrix, row-major, same capacity rules as Vec.
class Mat {
 public:
  Mat() = default;
  explicit Mat(int dim) : dim_(dim) {}

  static Mat identity(int dim) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  int size() const noexcept { return dim_; }
  double& operator()(int i, int j) noexcept { return data_[i * kMaxDim + j]; }
  double operator()(int i, int j) const noexcept { return data_[i * kMaxDim + j]; }

  Vec operator*(const Vec& x) const noexcept {
    Vec y(dim_);
    for (int i = 0; i < dim_; ++i) {
      double s = 0.0;
      for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  /// M M^T
  Mat outer_self() const noexcept {
    Mat a(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        double s = 0.0;
        for (int k = 0; k < dim_; ++k) s += (*this)(i, k) * (*this)(j, k);
        a(i, j) = s;
      }
    return a;
  }

 private:
  std::array<double, kMaxDim * kMaxDim> data_{};
  int dim_ = 0;
};

}  // namespace rsoc
