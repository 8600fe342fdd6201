#pragma once

#include <algorithm>
#include <chrono>
#include <vector>

namespace uvt {

class Stopwatch {
public:
    using clock = std::chrono::steady_clock;

    Stopwatch() : start_(clock::now()) {}
    void reset() { start_ = clock::now(); }
    double seconds() const { return std::chrono::duration<double>(clock::now() - start_).count(); }

private:
    clock::time_point start_;
};

/// Median wall time of `repeat` calls (repeat >= 1).
template <class Fn>
double median_seconds(int repeat, Fn&& fn) {
    std::vector<double> t;
    t.reserve(repeat);
    for (int i = 0; i < repeat; ++i) {
        Stopwatch sw;
        fn();
        t.push_back(sw.seconds());
    }
    std::sort(t.begin(), t.end());
    const std::size_t n = t.size();
    return n % 2 ? t[n / 2] : 0.5 * (t[n / 2 - 1] + t[n / 2]);
}

}  // namespace uvt
