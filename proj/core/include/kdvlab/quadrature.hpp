#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace kdvlab {

/// Gauss-Chebyshev rule of the first kind:
///   int_{-1}^{1} f(t) / sqrt(1 - t^2) dt ~ (pi / N) sum_j f(t_j).
struct ChebyshevRule {
    std::vector<double> t;
    double weight = 0.0;

    explicit ChebyshevRule(int N) : t(N), weight(std::numbers::pi / N) {
        for (int j = 0; j < N; ++j) t[j] = std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * N));
    }
    int size() const { return static_cast<int>(t.size()); }
    /// sqrt(1 - t_j^2) without cancellation near the endpoints
    double sqrt1m(int j) const {
        return std::sin((2.0 * j + 1.0) * std::numbers::pi / (2.0 * size()));
    }
};

}  // namespace kdvlab
