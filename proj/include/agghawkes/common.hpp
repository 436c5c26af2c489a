#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hawkes {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double squared_norm(Vec2 v) { return v.x * v.x + v.y * v.y; }

// Axis-aligned rectangle [x0, x1) x [y0, y1).
struct Window {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    bool contains(Vec2 s) const { return s.x >= x0 && s.x < x1 && s.y >= y0 && s.y < y1; }

    friend bool operator==(const Window& a, const Window& b) {
        return a.x0 == b.x0 && a.y0 == b.y0 && a.x1 == b.x1 && a.y1 == b.y1;
    }
};

// Dense L x L matrix with (source, target) indexing, row-major.
template <typename T>
class PairMatrix {
  public:
    PairMatrix() = default;
    explicit PairMatrix(int n, T fill = T{}) : n_(n), data_(static_cast<size_t>(n) * n, fill) {}

    int dim() const { return n_; }
    T& operator()(int from, int to) { return data_[static_cast<size_t>(from) * n_ + to]; }
    const T& operator()(int from, int to) const { return data_[static_cast<size_t>(from) * n_ + to]; }

    friend bool operator==(const PairMatrix& a, const PairMatrix& b) {
        return a.n_ == b.n_ && a.data_ == b.data_;
    }

  private:
    int n_ = 0;
    std::vector<T> data_;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace hawkes
