#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

namespace smd {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Points = std::vector<Vec>;
using Rng = std::mt19937_64;

// Compensated accumulator; keeps summation error independent of term count.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

inline double dist(const Vec& a, const Vec& b) { return (a - b).norm(); }

}  // namespace smd
