#ifndef LDG_UTIL_HPP
#define LDG_UTIL_HPP

#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <thread>
#include <vector>

namespace ldg {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double c, const Vec3& a) { return {c * a[0], c * a[1], c * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) {
    double n = norm(a);
    return {a[0] / n, a[1] / n, a[2] / n};
}

// Row-major 3x3 matrix, only used for dense tensor arithmetic.
struct Mat3 {
    double m[3][3];

    static Mat3 zero() { return Mat3{{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}}; }
    static Mat3 identity() { return Mat3{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }
    static Mat3 outer(const Vec3& a, const Vec3& b) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = a[i] * b[j];
        return r;
    }

    double trace() const { return m[0][0] + m[1][1] + m[2][2]; }
    double det() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }
};

inline Mat3 operator+(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] + b.m[i][j];
    return r;
}
inline Mat3 operator-(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] - b.m[i][j];
    return r;
}
inline Mat3 operator*(double c, const Mat3& a) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = c * a.m[i][j];
    return r;
}
inline Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r = Mat3::zero();
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 3; ++j) r.m[i][j] += a.m[i][k] * b.m[k][j];
    return r;
}
inline Vec3 operator*(const Mat3& a, const Vec3& v) {
    return {a.m[0][0] * v[0] + a.m[0][1] * v[1] + a.m[0][2] * v[2],
            a.m[1][0] * v[0] + a.m[1][1] * v[1] + a.m[1][2] * v[2],
            a.m[2][0] * v[0] + a.m[2][1] * v[1] + a.m[2][2] * v[2]};
}
inline double frob2(const Mat3& a) {
    double s = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += a.m[i][j] * a.m[i][j];
    return s;
}

// Worker count for the parallel reductions below. 1 = run inline.
int thread_count();
void set_thread_count(int n);

// Deterministic chunked reduction: each chunk is a fixed index range, partial
// results are combined in chunk order, so the result is bit-identical for any
// worker count.
namespace detail {
constexpr std::size_t kChunk = 4096;

template <class PerChunk>
void run_chunks(std::size_t nchunks, PerChunk&& body) {
    int tc = thread_count();
    if (tc <= 1 || nchunks <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c) body(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= nchunks) break;
            body(c);
        }
    };
    std::vector<std::thread> pool;
    int nw = tc < static_cast<int>(nchunks) ? tc : static_cast<int>(nchunks);
    pool.reserve(static_cast<std::size_t>(nw - 1));
    for (int t = 0; t < nw - 1; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}
}  // namespace detail

template <class F>
double parallel_sum(std::size_t n, F&& f) {
    if (n == 0) return 0.0;
    std::size_t nchunks = (n + detail::kChunk - 1) / detail::kChunk;
    std::vector<double> partial(nchunks, 0.0);
    detail::run_chunks(nchunks, [&](std::size_t c) {
        std::size_t i0 = c * detail::kChunk;
        std::size_t i1 = i0 + detail::kChunk < n ? i0 + detail::kChunk : n;
        double s = 0;
        for (std::size_t i = i0; i < i1; ++i) s += f(i);
        partial[c] = s;
    });
    double total = 0;
    for (double p : partial) total += p;
    return total;
}

template <class F>
double parallel_max(std::size_t n, F&& f) {
    if (n == 0) return 0.0;
    std::size_t nchunks = (n + detail::kChunk - 1) / detail::kChunk;
    std::vector<double> partial(nchunks, -HUGE_VAL);
    detail::run_chunks(nchunks, [&](std::size_t c) {
        std::size_t i0 = c * detail::kChunk;
        std::size_t i1 = i0 + detail::kChunk < n ? i0 + detail::kChunk : n;
        double s = -HUGE_VAL;
        for (std::size_t i = i0; i < i1; ++i) {
            double v = f(i);
            if (v > s) s = v;
        }
        partial[c] = s;
    });
    double total = -HUGE_VAL;
    for (double p : partial)
        if (p > total) total = p;
    return total;
}

template <class F>
void parallel_apply(std::size_t n, F&& f) {
    if (n == 0) return;
    std::size_t nchunks = (n + detail::kChunk - 1) / detail::kChunk;
    detail::run_chunks(nchunks, [&](std::size_t c) {
        std::size_t i0 = c * detail::kChunk;
        std::size_t i1 = i0 + detail::kChunk < n ? i0 + detail::kChunk : n;
        for (std::size_t i = i0; i < i1; ++i) f(i);
    });
}

// splitmix64: tiny seedable generator for reproducible random fields/tensors.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // uniform in [lo, hi)
    double uniform(double lo, double hi) {
        double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
};

}  // namespace ldg

#endif
