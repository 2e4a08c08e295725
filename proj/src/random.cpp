#include "ssocert/random.hpp"

#include <Eigen/QR>

#include <cmath>
#include <numbers>

namespace ssocert {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

Vector Rng::normal_vector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = normal();
    return v;
}

Matrix Rng::normal_matrix(int rows, int cols) {
    Matrix a(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a(i, j) = normal();
    return a;
}

Matrix Rng::symmetric_matrix(int m) {
    const Matrix a = normal_matrix(m, m);
    return 0.5 * (a + a.transpose());
}

Matrix Rng::orthogonal(int n) {
    const Matrix a = normal_matrix(n, n);
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < n; ++k)
        if (r(k, k) < 0.0) q.col(k) *= -1.0;
    return q;
}

}  // namespace ssocert
